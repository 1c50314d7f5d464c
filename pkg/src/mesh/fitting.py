"""
Interface-Anpassung - Schneidet ein Hintergrundgitter entlang der Kurve Γ.

Ablauf:
1. Ecken näher als snap_factor·h_e an Γ werden auf Γ verschoben.
2. Ecken auf Γ, an denen eine Gitterkante Γ (fast) tangential berührt,
   werden um release_factor·h_e von Γ gelöst.
3. Schnittpunkte von Γ mit Hintergrundkanten werden per Nullstellensuche
   bestimmt.
4. Geschnittene Zellen werden entlang des Bogens geteilt; im Dreiecks-Ablauf
   werden Viereckstücke in zwei Dreiecke zerlegt. Findet sich keine Zerlegung
   mit positiver Jacobi-Determinante, wird der Bogen in seinem Mittelpunkt
   geteilt und beide Teilstücke werden vom Mittelpunkt aus aufgefächert.
5. Regularität und Vollständigkeit des Interfaces werden geprüft.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ..exceptions import CellCutTwice, DegenerateCut, MeshError
from .curve import SIDE_1, SIDE_2, SIDE_ON, TOL_GEOM, InterfaceCurve
from .mesh import Cell, InterfaceMesh, MeshBuilder, points_in_polygon
from .statistics import mesh_statistics

logger = logging.getLogger(__name__)

SNAP_FACTOR = 0.2
RELEASE_FACTOR = 0.25
TANGENT_ANGLE = np.radians(15.0)
MIN_JACOBIAN_RATIO = 1e-3      # min detJ/h_T² einer Teilzerlegung
REFINE_HINT = "Gitter verfeinern"

_ARC_CHECKS = 17

Piece = Tuple[List[int], List[Optional[Tuple]]]


def _wrap(delta: float) -> float:
    """Parameterdifferenz auf (-0.5, 0.5]."""
    delta = float(np.mod(delta, 1.0))
    return delta - 1.0 if delta > 0.5 else delta


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _line_angle(direction: np.ndarray, tangent: np.ndarray) -> float:
    """Winkel in [0, π/2] zwischen einer Geraden und einer Kurventangente."""
    norm = float(np.linalg.norm(direction) * np.linalg.norm(tangent))
    if norm == 0.0:
        return 0.0
    return float(np.arcsin(min(1.0, abs(float(_cross(direction, tangent))) / norm)))


class InterfaceFitter:
    """
    Passt ein Hintergrundgitter an eine Interface-Kurve an.

    Attributes:
        snap_factor: Ecken mit Abstand < snap_factor·h_e werden auf Γ gelegt
        release_factor: Abstand gelöster Tangentialecken von Γ, relativ zu h_e
        tangent_angle: kleinster zulässiger Winkel zwischen Γ und einer Kante
            an einer Ecke auf Γ
        tol_geom: Toleranz der Nullstellensuche (absolut, Gebietseinheiten)
        edge_samples: Stützpunkte je Kante zur Erkennung doppelter Schnitte
    """

    def __init__(
        self,
        snap_factor: float = SNAP_FACTOR,
        tol_geom: float = TOL_GEOM,
        edge_samples: int = 9,
        release_factor: float = RELEASE_FACTOR,
        tangent_angle: float = TANGENT_ANGLE,
    ) -> None:
        self.snap_factor = snap_factor
        self.release_factor = release_factor
        self.tangent_angle = tangent_angle
        self.tol_geom = tol_geom
        self.edge_samples = edge_samples
        logger.info(f"InterfaceFitter initialisiert (snap_factor={snap_factor}, tol_geom={tol_geom:g})")

    def fit(self, mesh: InterfaceMesh, curve: InterfaceCurve) -> InterfaceMesh:
        """
        Erzeugt das interface-angepasste Gitter.

        Args:
            mesh: Hintergrundgitter ohne Interface
            curve: Interface-Kurve

        Returns:
            Neues InterfaceMesh mit gekrümmten Interface-Kanten

        Raises:
            CellCutTwice: Ein Zellrand trifft Γ mehr als zweimal
            DegenerateCut: Ein Schnitt verletzt die Regularitätsschranken;
                die Meldung nennt das Level und empfiehlt eine Verfeinerung
        """
        if mesh.curve is not None:
            raise ValueError("Gitter ist bereits an ein Interface angepasst")
        self._check_curve_inside(mesh, curve)
        if not curve.is_simple:
            raise DegenerateCut(
                f"Kurve {curve.describe()} ist nicht einfach geschlossen "
                f"(minimaler Radius {curve.min_radius():.3e})"
            )
        try:
            fitted, crossings = self._fit(mesh, curve)
        except MeshError as e:
            raise e.with_level(mesh.level).with_hint(REFINE_HINT)
        logger.info(
            f"Interface angepasst: {fitted.num_cells} Zellen, "
            f"{len(fitted.interface_edges())} Interface-Kanten, {crossings} Schnittpunkte"
        )
        return fitted

    def _fit(self, mesh: InterfaceMesh, curve: InterfaceCurve) -> Tuple[InterfaceMesh, int]:
        coords = np.array(mesh.vertices, dtype=float)
        h_e = self._vertex_spacing(mesh)
        labels, params = self._snap(mesh, curve, coords, h_e)
        self._release_tangent_vertices(mesh, curve, coords, labels, params, h_e)
        self._check_edge_crossings(mesh, curve, coords, labels)
        chords = self._chord_edges(mesh, curve, coords, labels, params)

        builder = MeshBuilder(coords, curve=curve, domain=mesh.domain)
        crossings: Dict[int, int] = {}
        for cell in mesh.cells:
            self._process_cell(cell, mesh, curve, builder, labels, params, chords, crossings)

        fitted = builder.build(level=mesh.level, kind=mesh.kind)
        self._verify(fitted, curve)
        return fitted, len(crossings)

    def _check_curve_inside(self, mesh: InterfaceMesh, curve: InterfaceCurve) -> None:
        samples = curve.point(np.arange(1024) / 1024.0)
        x0, x1, y0, y1 = mesh.domain
        inside = (samples[:, 0] > x0) & (samples[:, 0] < x1) & (samples[:, 1] > y0) & (samples[:, 1] < y1)
        if not np.all(inside):
            raise ValueError(f"Kurve {curve.describe()} liegt nicht strikt im Gebiet {mesh.domain}")

    @staticmethod
    def _vertex_spacing(mesh: InterfaceMesh) -> np.ndarray:
        """h_e je Ecke: kürzeste anliegende Kante."""
        h_e = np.full(len(mesh.vertices), np.inf)
        for edge in mesh.edges:
            length = mesh.chord_length(edge.id)
            for v in edge.vertices:
                h_e[v] = min(h_e[v], length)
        return h_e

    def _snap(
        self, mesh: InterfaceMesh, curve: InterfaceCurve, coords: np.ndarray, h_e: np.ndarray
    ) -> Tuple[np.ndarray, Dict[int, float]]:
        """Verschiebt Ecken nahe Γ auf Γ und klassifiziert alle Ecken."""
        x0, x1, y0, y1 = mesh.domain
        on_boundary = (
            np.isclose(coords[:, 0], x0) | np.isclose(coords[:, 0], x1)
            | np.isclose(coords[:, 1], y0) | np.isclose(coords[:, 1], y1)
        )
        labels = curve.classify(coords)
        params: Dict[int, float] = {}
        candidates = np.flatnonzero((np.abs(curve.level(coords)) < 4.0 * h_e) & ~on_boundary)
        snapped = 0
        for v in candidates:
            dist, t = curve.distance(coords[v])
            if dist < self.snap_factor * h_e[v]:
                coords[v] = curve.point(t)
                labels[v] = SIDE_ON
                params[int(v)] = t
                snapped += 1
        logger.debug(f"{snapped} Ecken auf das Interface verschoben")
        return labels, params

    def _release_tangent_vertices(
        self,
        mesh: InterfaceMesh,
        curve: InterfaceCurve,
        coords: np.ndarray,
        labels: np.ndarray,
        params: Dict[int, float],
        h_e: np.ndarray,
    ) -> None:
        """
        Löst Ecken auf Γ, an denen eine Hintergrundkante Γ unter weniger als
        tangent_angle berührt, entlang der Normalen um release_factor·h_e von Γ.

        Gewählt wird die Seite mit dem größeren kleinsten Schnittwinkel der
        anliegenden Kanten; Seiten, auf denen eine Kante Γ mehrfach trifft,
        scheiden aus.
        """
        neighbours: Dict[int, List[int]] = {}
        for edge in mesh.edges:
            va, vb = edge.vertices
            neighbours.setdefault(va, []).append(vb)
            neighbours.setdefault(vb, []).append(va)

        released = 0
        for v in np.flatnonzero(labels == SIDE_ON):
            v = int(v)
            t = params.get(v, float(curve.parameter_of(coords[v])))
            current = self._incidence_angle(coords[v], SIDE_ON, t, neighbours[v], curve, coords, labels, params)
            if current >= self.tangent_angle:
                continue
            best: Optional[Tuple[float, np.ndarray, int]] = None
            for sign, side in ((1.0, SIDE_2), (-1.0, SIDE_1)):
                point = coords[v] + sign * self.release_factor * h_e[v] * curve.normal(t)
                if int(curve.classify(point[None, :])[0]) != side:
                    continue
                angle = self._incidence_angle(point, side, t, neighbours[v], curve, coords, labels, params)
                if angle > current and (best is None or angle > best[0]):
                    best = (angle, point, side)
            if best is None:
                logger.warning(f"Ecke {v} berührt Γ tangential und lässt sich nicht lösen")
                continue
            coords[v] = best[1]
            labels[v] = best[2]
            params.pop(v, None)
            released += 1
            logger.debug(
                f"Ecke {v} von Γ gelöst: Seite {best[2]}, Winkel {np.degrees(current):.1f}° → "
                f"{np.degrees(best[0]):.1f}°"
            )
        if released:
            logger.debug(f"{released} tangentiale Ecken von Γ gelöst")

    def _incidence_angle(
        self,
        point: np.ndarray,
        side: int,
        t: float,
        neighbours: Sequence[int],
        curve: InterfaceCurve,
        coords: np.ndarray,
        labels: np.ndarray,
        params: Dict[int, float],
    ) -> float:
        """
        Kleinster Winkel zwischen Γ und den Kanten von point zu seinen Nachbarn.

        Liefert 0, wenn eine Kante Γ öfter trifft als ihre Endpunkte zulassen.
        """
        tau = np.linspace(0.0, 1.0, self.edge_samples + 2)[1:-1]
        smallest = 0.5 * np.pi
        for q in neighbours:
            other, q_side = coords[q], int(labels[q])
            if side == SIDE_ON and q_side == SIDE_ON:
                continue
            direction = other - point
            inner = curve.classify(point + tau[:, None] * direction)
            if side == SIDE_ON:
                if np.any(inner != q_side):
                    return 0.0
                angle = _line_angle(direction, curve.derivative(t))
            elif q_side == SIDE_ON:
                if np.any(inner != side):
                    return 0.0
                t_q = params.get(q, float(curve.parameter_of(other)))
                angle = _line_angle(direction, curve.derivative(t_q))
            elif q_side == side:
                if np.any(inner != side):
                    return 0.0
                continue
            else:
                sequence = np.concatenate([[side], inner[inner != SIDE_ON], [q_side]])
                if np.count_nonzero(np.diff(sequence)) != 1:
                    return 0.0
                s = brentq(lambda s: float(curve.level(point + s * direction)), 0.0, 1.0, xtol=self.tol_geom)
                crossing = point + s * direction
                angle = _line_angle(direction, curve.derivative(float(curve.parameter_of(crossing))))
            smallest = min(smallest, angle)
        return smallest

    def _check_edge_crossings(
        self, mesh: InterfaceMesh, curve: InterfaceCurve, coords: np.ndarray, labels: np.ndarray
    ) -> None:
        """Erkennt Hintergrundkanten, die Γ mehr als einmal kreuzen."""
        tau = np.linspace(0.0, 1.0, self.edge_samples + 2)
        for edge in mesh.edges:
            a, b = coords[edge.vertices[0]], coords[edge.vertices[1]]
            lvl = curve.level(a + tau[:, None] * (b - a))
            lvl[0] = 0.0 if labels[edge.vertices[0]] == SIDE_ON else lvl[0]
            lvl[-1] = 0.0 if labels[edge.vertices[1]] == SIDE_ON else lvl[-1]
            signs = np.sign(lvl[np.abs(lvl) > self.tol_geom])
            if np.count_nonzero(np.diff(signs)) > 1:
                raise CellCutTwice(
                    f"Kante {edge.id} kreuzt das Interface mehrfach; Gitter verfeinern",
                    cell_ids=edge.owners,
                )

    def _chord_edges(
        self,
        mesh: InterfaceMesh,
        curve: InterfaceCurve,
        coords: np.ndarray,
        labels: np.ndarray,
        params: Dict[int, float],
    ) -> Dict[int, Tuple[float, float]]:
        """Kanten mit beiden Ecken auf Γ, denen die Kurve direkt folgt."""
        chords: Dict[int, Tuple[float, float]] = {}
        for edge in mesh.edges:
            va, vb = edge.vertices
            if labels[va] != SIDE_ON or labels[vb] != SIDE_ON:
                continue
            ta = params.get(va, float(curve.parameter_of(coords[va])))
            tb = params.get(vb, float(curve.parameter_of(coords[vb])))
            delta = _wrap(tb - ta)
            chord = float(np.linalg.norm(coords[vb] - coords[va]))
            if curve.arc_length(ta, ta + delta, panels=2) <= 1.5 * chord:
                if edge.is_boundary:
                    raise DegenerateCut(f"Interface folgt der Randkante {edge.id}", cell_ids=edge.owners)
                chords[edge.id] = (ta, ta + delta)
        return chords

    def _crossing_vertex(
        self,
        edge_id: int,
        a: int,
        b: int,
        curve: InterfaceCurve,
        builder: MeshBuilder,
        params: Dict[int, float],
        crossings: Dict[int, int],
    ) -> int:
        """Schnittpunkt von Γ mit einer Hintergrundkante (einmal je Kante)."""
        if edge_id in crossings:
            return crossings[edge_id]
        pa, pb = builder.vertices[a], builder.vertices[b]
        length = float(np.linalg.norm(pb - pa))
        s = brentq(
            lambda s: float(curve.level(pa + s * (pb - pa))),
            0.0, 1.0,
            xtol=self.tol_geom / length,
        )
        t = float(curve.parameter_of(pa + s * (pb - pa)))
        vertex = builder.add_vertex(curve.point(t))
        params[vertex] = t
        crossings[edge_id] = vertex
        return vertex

    def _process_cell(
        self,
        cell: Cell,
        mesh: InterfaceMesh,
        curve: InterfaceCurve,
        builder: MeshBuilder,
        labels: np.ndarray,
        params: Dict[int, float],
        chords: Dict[int, Tuple[float, float]],
        crossings: Dict[int, int],
    ) -> None:
        verts = list(cell.vertices)
        nv = len(verts)
        cell_labels = [int(labels[v]) for v in verts]
        strict = {label for label in cell_labels if label != SIDE_ON}
        if not strict:
            raise DegenerateCut(f"Alle Ecken von Zelle {cell.id} liegen auf dem Interface", [cell.id])

        augmented: List[int] = []
        gamma: List[int] = []
        for i in range(nv):
            if cell_labels[i] == SIDE_ON:
                gamma.append(len(augmented))
            augmented.append(verts[i])
            j = (i + 1) % nv
            if {cell_labels[i], cell_labels[j]} == {SIDE_1, SIDE_2}:
                vertex = self._crossing_vertex(
                    cell.edges[i], verts[i], verts[j], curve, builder, params, crossings
                )
                gamma.append(len(augmented))
                augmented.append(vertex)

        chord_positions = [i for i in range(nv) if cell.edges[i] in chords]

        if len(strict) == 1:
            side = strict.pop()
            geometry: List[Optional[Tuple]] = [None] * nv
            if len(chord_positions) > 1 or len(gamma) > 2:
                raise DegenerateCut(f"Zelle {cell.id} berührt das Interface zu oft", [cell.id])
            for i in chord_positions:
                ta, tb = chords[cell.edges[i]]
                stored = mesh.edges[cell.edges[i]].vertices
                geometry[i] = ("arc", ta, tb) if stored == (verts[i], verts[(i + 1) % nv]) else ("arc", tb, ta)
            if len(gamma) == 2 and not chord_positions:
                self._reject_interior_arc(cell, augmented, gamma, curve, builder, params)
            builder.add_cell(verts, geometry, side)
            return

        if chord_positions or len(gamma) != 2:
            raise CellCutTwice(
                f"Rand von Zelle {cell.id} trifft das Interface {len(gamma)}-mal; Gitter verfeinern",
                cell_ids=[cell.id],
            )
        self._cut_cell(cell, mesh, curve, builder, labels, params, augmented, gamma)

    def _reject_interior_arc(
        self,
        cell: Cell,
        augmented: Sequence[int],
        gamma: Sequence[int],
        curve: InterfaceCurve,
        builder: MeshBuilder,
        params: Dict[int, float],
    ) -> None:
        ta, tb = params[augmented[gamma[0]]], params[augmented[gamma[1]]]
        mid = curve.point(ta + 0.5 * _wrap(tb - ta))
        polygon = np.array([builder.vertices[v] for v in augmented])
        if points_in_polygon(polygon, mid[None, :])[0]:
            raise DegenerateCut(
                f"Interface durchquert Zelle {cell.id} zwischen zwei Ecken ohne Seitenwechsel",
                [cell.id],
            )

    def _cut_cell(
        self,
        cell: Cell,
        mesh: InterfaceMesh,
        curve: InterfaceCurve,
        builder: MeshBuilder,
        labels: np.ndarray,
        params: Dict[int, float],
        augmented: List[int],
        gamma: List[int],
    ) -> None:
        ia, ib = gamma
        a, b = augmented[ia], augmented[ib]
        tb = params[b]
        delta = _wrap(params[a] - tb)
        arc_ba = (tb, tb + delta)

        polygon = np.array([builder.vertices[v] for v in augmented])
        mid = curve.point(tb + 0.5 * delta)
        if not points_in_polygon(polygon, mid[None, :])[0]:
            raise DegenerateCut(f"Schnittbogen verlässt Zelle {cell.id}", [cell.id])

        pieces = [
            (augmented[ia:ib + 1], ("arc",) + arc_ba),
            (augmented[ib:] + augmented[:ia + 1], ("arc", arc_ba[1], arc_ba[0])),
        ]
        original = set(cell.vertices)
        sides = []
        for verts, _ in pieces:
            if len(verts) < 3:
                raise DegenerateCut(f"Entartetes Teilstück in Zelle {cell.id}", [cell.id])
            piece_sides = {int(labels[v]) for v in verts if v in original and labels[v] != SIDE_ON}
            if len(piece_sides) != 1:
                raise DegenerateCut(f"Teilstück von Zelle {cell.id} liegt auf beiden Seiten", [cell.id])
            sides.append(piece_sides.pop())

        plans = [
            self._plan_piece(cell, mesh.kind, builder, verts, arc, side, curve)
            for (verts, arc), side in zip(pieces, sides)
        ]
        if any(plan is None for plan in plans):
            plans = self._split_at_midpoint(cell, builder, curve, params, pieces, sides, tb + 0.5 * delta)
        for plan, side in zip(plans, sides):
            for verts, geometry in plan:
                self._add_piece(cell, builder, verts, geometry, side, curve)

    def _plan_piece(
        self,
        cell: Cell,
        kind: str,
        builder: MeshBuilder,
        verts: List[int],
        arc: Tuple,
        side: int,
        curve: InterfaceCurve,
    ) -> Optional[List[Piece]]:
        """Zerlegung eines Teilstücks; None, wenn keine gültige Zerlegung existiert."""
        geometry = [None] * (len(verts) - 1) + [arc]
        if len(verts) == 3:
            if self._triangle_quality(builder, verts, geometry, side, curve) > MIN_JACOBIAN_RATIO:
                return [(verts, geometry)]
            return None
        if kind == "tri" and len(verts) == 4:
            return self._split_quad_piece(builder, verts, arc, side, curve)
        if kind == "tri":
            raise DegenerateCut(f"Unerwartetes Teilstück mit {len(verts)} Ecken in Zelle {cell.id}", [cell.id])
        return [(verts, geometry)]

    def _split_quad_piece(
        self,
        builder: MeshBuilder,
        verts: List[int],
        arc: Tuple,
        side: int,
        curve: InterfaceCurve,
    ) -> Optional[List[Piece]]:
        """Zerlegt [A, S1, S2, B] mit Bogen B → A in zwei Dreiecke (bessere gültige Diagonale)."""
        a, s1, s2, b = verts
        options = [
            [([a, s1, s2], [None, None, None]), ([a, s2, b], [None, None, arc])],
            [([a, s1, b], [None, None, arc]), ([s1, s2, b], [None, None, None])],
        ]
        scored = [
            (min(self._triangle_quality(builder, tri, geom, side, curve) for tri, geom in option), option)
            for option in options
        ]
        quality, best = max(scored, key=lambda item: item[0])
        return best if quality > MIN_JACOBIAN_RATIO else None

    def _split_at_midpoint(
        self,
        cell: Cell,
        builder: MeshBuilder,
        curve: InterfaceCurve,
        params: Dict[int, float],
        pieces: Sequence[Tuple[List[int], Tuple]],
        sides: Sequence[int],
        t_mid: float,
    ) -> List[List[Piece]]:
        """
        Teilt den Schnittbogen im Parametermittelpunkt M und fächert beide
        Teilstücke von M aus in Dreiecke mit je höchstens einem Bogen auf.
        """
        m = builder.add_vertex(curve.point(t_mid))
        params[m] = t_mid
        plans = []
        for (verts, arc), side in zip(pieces, sides):
            # Bogen verts[-1] → verts[0] wird zu verts[-1] → M → verts[0]
            arc_in = ("arc", arc[1], t_mid)
            arc_out = ("arc", t_mid, arc[2])
            last = len(verts) - 1
            plan: List[Piece] = []
            for j in range(last):
                tri = [m, verts[j], verts[j + 1]]
                geom = [arc_out if j == 0 else None, None, arc_in if j + 1 == last else None]
                if self._triangle_quality(builder, tri, geom, side, curve) <= MIN_JACOBIAN_RATIO:
                    raise DegenerateCut(
                        f"Zelle {cell.id} lässt sich nicht in Dreiecke mit positiver Jacobi-Determinante "
                        f"zerlegen",
                        [cell.id],
                    )
                plan.append((tri, geom))
            plans.append(plan)
        logger.debug(f"Schnittbogen von Zelle {cell.id} im Mittelpunkt geteilt")
        return plans

    def _triangle_quality(
        self,
        builder: MeshBuilder,
        verts: Sequence[int],
        geometry: Sequence[Optional[Tuple]],
        side: int,
        curve: InterfaceCurve,
    ) -> float:
        """
        min detJ/h_T² der Referenzabbildung eines (gekrümmten) Dreiecks.

        Für einen Bogen auf Kante i ist die Spitze die Ecke vor dem Bogen und
        detJ = (γ(s) − V0) × γ'(s). Gerade Kanten, die die Seite `side`
        verlassen, machen die Zerlegung ungültig (-inf).
        """
        pts = [builder.vertices[v] for v in verts]
        other = SIDE_2 if side == SIDE_1 else SIDE_1
        tau = np.linspace(0.0, 1.0, self.edge_samples + 2)[1:-1]
        for i, geom in enumerate(geometry):
            if geom is None:
                a, b = pts[i], pts[(i + 1) % 3]
                if np.any(curve.classify(a + tau[:, None] * (b - a)) == other):
                    return -np.inf
        diam2 = builder.diameter(verts, geometry) ** 2
        curved = [i for i, geom in enumerate(geometry) if geom is not None]
        if not curved:
            return float(_cross(pts[1] - pts[0], pts[2] - pts[0])) / diam2
        i = curved[0]
        _, t0, t1 = geometry[i]
        apex = pts[(i - 1) % 3]
        t = t0 + np.linspace(0.0, 1.0, _ARC_CHECKS) * (t1 - t0)
        det = _cross(curve.point(t) - apex, (t1 - t0) * curve.derivative(t))
        return float(det.min()) / diam2

    def _add_piece(
        self,
        cell: Cell,
        builder: MeshBuilder,
        verts: List[int],
        geometry: List,
        side: int,
        curve: InterfaceCurve,
    ) -> None:
        area, centroid = builder.area_and_centroid(verts, geometry)
        if area <= 0.0:
            raise DegenerateCut(f"Teilstück von Zelle {cell.id} hat Fläche {area:.3e}", [cell.id])
        centroid_side = int(curve.classify(centroid[None, :])[0])
        if centroid_side not in (side, SIDE_ON):
            logger.warning(
                f"Schwerpunkt eines Teilstücks von Zelle {cell.id} liegt auf Seite {centroid_side}, "
                f"Ecken auf Seite {side}"
            )
        builder.add_cell(verts, geometry, side)

    def _verify(self, fitted: InterfaceMesh, curve: InterfaceCurve) -> None:
        covered = sum(abs(e.arc[1] - e.arc[0]) for e in fitted.interface_edges())
        if abs(covered - 1.0) > 1e-9:
            raise CellCutTwice(
                f"Interface nur zu {covered:.6f} erfasst; Kurve verläuft innerhalb einzelner Zellen"
            )
        for edge in fitted.interface_edges():
            sides = {fitted.cells[c].subdomain for c in edge.owners}
            if sides != {SIDE_1, SIDE_2}:
                raise DegenerateCut(
                    f"Interface-Kante {edge.id} trennt die Teilgebiete nicht", cell_ids=edge.owners
                )
        problems = fitted.check_consistency()
        if problems:
            raise DegenerateCut(f"Inkonsistentes Gitter: {problems[0]}")
        stats = mesh_statistics(fitted)
        if not stats.passed:
            raise DegenerateCut(
                f"Regularitätsprüfung fehlgeschlagen für Zellen {list(stats.offending_cells[:10])} "
                f"(min. Innenwinkel {stats.min_angle:.2f}°)",
                cell_ids=stats.offending_cells,
            )


def fit_interface(mesh: InterfaceMesh, curve: InterfaceCurve) -> InterfaceMesh:
    """Passt das Hintergrundgitter mit Standardeinstellungen an Γ an."""
    return InterfaceFitter().fit(mesh, curve)


def polygonal_approximation(mesh: InterfaceMesh) -> InterfaceMesh:
    """
    Ersetzt jeden Interface-Bogen durch seine Sehne.

    Die Interface-Kanten behalten ihre zwei Spur-Slots; nur die Geometrie
    wird gerade.
    """
    if mesh.curve is None:
        raise ValueError("Gitter ohne Interface kann nicht polygonal approximiert werden")
    builder = MeshBuilder(mesh.vertices, curve=mesh.curve, domain=mesh.domain)
    for cell in mesh.cells:
        geometry = [("chord",) if mesh.edges[e].is_interface else None for e in cell.edges]
        builder.add_cell(list(cell.vertices), geometry, cell.subdomain)
    chordal = builder.build(level=mesh.level, kind=mesh.kind, chordal=True)
    logger.info(f"Polygonale Approximation: {len(chordal.interface_edges())} Sehnen")
    return chordal
