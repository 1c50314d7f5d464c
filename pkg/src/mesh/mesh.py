"""
Mesh - Gitterdatenstrukturen und Hintergrundgitter.

Dieses Modul enthält:
- Edge, Cell, InterfaceMesh: unveränderliche Gitterdaten
- MeshBuilder: sammelt Zellen als Eckenzyklen und erzeugt daraus Kanten
- build_background_mesh: uniformes Dreiecks- oder Vierecksgitter
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from .curve import SIDE_1, InterfaceCurve

logger = logging.getLogger(__name__)

EDGE_INTERIOR = "interior"
EDGE_BOUNDARY = "boundary"
EDGE_INTERFACE = "interface"

MESH_KINDS = ("tri", "quad")

# Gauß-Punkte für Flächen, Schwerpunkte und Bogenlängen (Green'sche Formel)
_GREEN_ORDER = 16
_ARC_SAMPLES = 17

Domain = Tuple[float, float, float, float]
DEFAULT_DOMAIN: Domain = (-1.0, 1.0, -1.0, 1.0)


@dataclass(frozen=True)
class Edge:
    """
    Gitterkante.

    Attributes:
        id: Kanten-ID
        vertices: Anfangs- und Endecke (v0, v1)
        tag: "interior", "boundary" oder "interface"
        owners: IDs der angrenzenden Zellen (1 oder 2)
        arc: (t_start, t_end) auf der Interface-Kurve von v0 nach v1, None für gerade Kanten
    """
    id: int
    vertices: Tuple[int, int]
    tag: str
    owners: Tuple[int, ...]
    arc: Optional[Tuple[float, float]] = None

    @property
    def curved(self) -> bool:
        return self.arc is not None

    @property
    def is_interface(self) -> bool:
        return self.tag == EDGE_INTERFACE

    @property
    def is_boundary(self) -> bool:
        return self.tag == EDGE_BOUNDARY

    @property
    def num_slots(self) -> int:
        """Anzahl der Spur-Slots: zwei auf dem Interface, sonst einer."""
        return 2 if self.is_interface else 1


@dataclass(frozen=True)
class Cell:
    """
    Gitterzelle mit Ecken gegen den Uhrzeigersinn.

    edges[i] verbindet vertices[i] mit vertices[i+1]; orientations[i] ist +1,
    wenn die Kante in ihrer gespeicherten Richtung durchlaufen wird.
    """
    id: int
    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]
    orientations: Tuple[int, ...]
    subdomain: int
    curved: bool
    diameter: float
    area: float
    centroid: Tuple[float, float]

    @property
    def kind(self) -> str:
        if len(self.vertices) == 3:
            return "tri"
        if len(self.vertices) == 4:
            return "quad"
        return "polygon"


@dataclass(frozen=True, eq=False)
class InterfaceMesh:
    """
    Interface-angepasstes Gitter eines Rechtecks.

    Attributes:
        vertices: Eckkoordinaten, Form (N, 2), schreibgeschützt
        edges: Kantenliste, Index = Kanten-ID
        cells: Zellliste, Index = Zellen-ID
        curve: Interface-Kurve (None für Gitter ohne Interface)
        level: Verfeinerungsindex n
        kind: Hintergrundtyp "tri" oder "quad"
        domain: (x_min, x_max, y_min, y_max)
        chordal: True, wenn Interface-Bögen durch Sehnen ersetzt sind
    """
    vertices: np.ndarray
    edges: Tuple[Edge, ...]
    cells: Tuple[Cell, ...]
    curve: Optional[InterfaceCurve]
    level: int
    kind: str
    domain: Domain = DEFAULT_DOMAIN
    chordal: bool = False

    def __post_init__(self) -> None:
        vertices = np.array(self.vertices, dtype=float).reshape(-1, 2)
        vertices.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def h(self) -> float:
        """Gitterweite h = max h_T."""
        return max((c.diameter for c in self.cells), default=0.0)

    @property
    def domain_area(self) -> float:
        x0, x1, y0, y1 = self.domain
        return (x1 - x0) * (y1 - y0)

    def interface_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.is_interface]

    def boundary_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.is_boundary]

    def cell_coordinates(self, cell_id: int) -> np.ndarray:
        return self.vertices[list(self.cells[cell_id].vertices)]

    def edge_points(self, edge_id: int, tau: np.ndarray) -> np.ndarray:
        """
        Punkte auf der Kante für tau ∈ [0, 1] in Richtung v0 → v1.

        Gerade Kanten sind linear in tau, gekrümmte Kanten linear im
        Kurvenparameter.
        """
        edge = self.edges[edge_id]
        tau = np.asarray(tau, dtype=float)
        if edge.curved:
            t0, t1 = edge.arc
            return self.curve.point(t0 + tau * (t1 - t0))
        a, b = self.vertices[edge.vertices[0]], self.vertices[edge.vertices[1]]
        return a + tau[..., None] * (b - a)

    def edge_derivative(self, edge_id: int, tau: np.ndarray) -> np.ndarray:
        """Ableitung der Kantenparametrisierung nach tau."""
        edge = self.edges[edge_id]
        tau = np.asarray(tau, dtype=float)
        if edge.curved:
            t0, t1 = edge.arc
            return (t1 - t0) * self.curve.derivative(t0 + tau * (t1 - t0))
        a, b = self.vertices[edge.vertices[0]], self.vertices[edge.vertices[1]]
        return np.broadcast_to(b - a, tau.shape + (2,)).copy()

    def edge_length(self, edge_id: int) -> float:
        edge = self.edges[edge_id]
        if not edge.curved:
            a, b = self.vertices[edge.vertices[0]], self.vertices[edge.vertices[1]]
            return float(np.linalg.norm(b - a))
        return self.curve.arc_length(*edge.arc, panels=4)

    def chord_length(self, edge_id: int) -> float:
        a, b = self.edges[edge_id].vertices
        return float(np.linalg.norm(self.vertices[b] - self.vertices[a]))

    def check_consistency(self, tol: float = 1e-10) -> List[str]:
        """
        Prüft Kanten-Zellen-Adjazenz, Orientierungen und die Flächensumme.

        Returns:
            Liste der gefundenen Probleme (leer, wenn alles konsistent ist)
        """
        problems: List[str] = []
        seen: Dict[int, List[int]] = {}
        for cell in self.cells:
            for edge_id, orient in zip(cell.edges, cell.orientations):
                seen.setdefault(edge_id, []).append(orient)
                if cell.id not in self.edges[edge_id].owners:
                    problems.append(f"Zelle {cell.id} fehlt in owners von Kante {edge_id}")
        for edge in self.edges:
            orients = seen.get(edge.id, [])
            if edge.is_boundary and len(orients) != 1:
                problems.append(f"Randkante {edge.id} hat {len(orients)} Besitzer")
            if not edge.is_boundary and (len(orients) != 2 or sum(orients) != 0):
                problems.append(f"Kante {edge.id}: Orientierungen {orients} nicht entgegengesetzt")
            if edge.curved and not edge.is_interface:
                problems.append(f"Gekrümmte Kante {edge.id} ist keine Interface-Kante")
            if edge.curved:
                ends = self.curve.point(np.array(edge.arc))
                expected = self.vertices[list(edge.vertices)]
                if np.max(np.abs(ends - expected)) > tol:
                    problems.append(f"Bogenenden von Kante {edge.id} treffen die Ecken nicht")
        total = sum(c.area for c in self.cells)
        if self.cells and abs(total - self.domain_area) > tol * self.domain_area:
            problems.append(f"Flächensumme {total:.15g} != {self.domain_area:.15g}")
        for cell in self.cells:
            n_interface = sum(1 for e in cell.edges if self.edges[e].is_interface)
            if n_interface > 1:
                problems.append(f"Zelle {cell.id} hat {n_interface} Interface-Kanten")
        return problems


EdgeGeometry = Optional[Tuple]


def _gauss(order: int = _GREEN_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


class MeshBuilder:
    """
    Sammelt Zellen als Eckenzyklen und erzeugt daraus ein InterfaceMesh.

    Die Geometrie jeder Zellkante wird beim Hinzufügen angegeben:
    None (gerade), ("arc", t_a, t_b) für einen Kurvenbogen in
    Durchlaufrichtung oder ("chord",) für eine gerade Interface-Kante.
    """

    def __init__(
        self,
        vertices: np.ndarray,
        curve: Optional[InterfaceCurve] = None,
        domain: Domain = DEFAULT_DOMAIN,
    ) -> None:
        self.vertices: List[np.ndarray] = [np.asarray(v, dtype=float) for v in vertices]
        self.curve = curve
        self.domain = domain
        self._cells: List[Tuple[List[int], List[EdgeGeometry], int]] = []

    def add_vertex(self, point: Sequence[float]) -> int:
        self.vertices.append(np.asarray(point, dtype=float))
        return len(self.vertices) - 1

    def move_vertex(self, vertex: int, point: Sequence[float]) -> None:
        self.vertices[vertex] = np.asarray(point, dtype=float)

    def add_cell(self, vertices: Sequence[int], geometry: Sequence[EdgeGeometry], subdomain: int) -> int:
        if len(vertices) != len(geometry) or len(vertices) < 3:
            raise ValueError(f"Ungültige Zelle: {len(vertices)} Ecken, {len(geometry)} Kanten")
        self._cells.append((list(vertices), list(geometry), subdomain))
        return len(self._cells) - 1

    def cell_geometry_points(
        self, vertices: Sequence[int], geometry: Sequence[EdgeGeometry]
    ) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Gauß-Punkte und Ableitungen auf jeder Kante eines Eckenzyklus."""
        tau, _ = _gauss()
        result = []
        for i, geom in enumerate(geometry):
            a = self.vertices[vertices[i]]
            b = self.vertices[vertices[(i + 1) % len(vertices)]]
            if geom is not None and geom[0] == "arc":
                t = geom[1] + tau * (geom[2] - geom[1])
                result.append((self.curve.point(t), (geom[2] - geom[1]) * self.curve.derivative(t)))
            else:
                result.append((a + tau[:, None] * (b - a), np.tile(b - a, (len(tau), 1))))
        return result

    def area_and_centroid(
        self, vertices: Sequence[int], geometry: Sequence[EdgeGeometry]
    ) -> Tuple[float, np.ndarray]:
        """Fläche und Schwerpunkt über die Green'sche Formel."""
        _, w = _gauss()
        area = cx = cy = 0.0
        for pts, d in self.cell_geometry_points(vertices, geometry):
            x, y = pts[:, 0], pts[:, 1]
            area += 0.5 * np.sum(w * (x * d[:, 1] - y * d[:, 0]))
            cx += 0.5 * np.sum(w * x * x * d[:, 1])
            cy -= 0.5 * np.sum(w * y * y * d[:, 0])
        if area <= 0.0:
            return float(area), np.array([np.nan, np.nan])
        return float(area), np.array([cx / area, cy / area])

    def diameter(self, vertices: Sequence[int], geometry: Sequence[EdgeGeometry]) -> float:
        points = [self.vertices[v] for v in vertices]
        tau = np.linspace(0.0, 1.0, _ARC_SAMPLES)
        for geom in geometry:
            if geom is not None and geom[0] == "arc":
                points.extend(self.curve.point(geom[1] + tau * (geom[2] - geom[1])))
        return float(pdist(np.array(points)).max())

    def build(self, level: int, kind: str, chordal: bool = False) -> InterfaceMesh:
        """Erzeugt Kanten, Besitzer, Kantentypen und Zellgeometrie."""
        edge_index: Dict[Tuple[int, int, bool], int] = {}
        edge_vertices: List[Tuple[int, int]] = []
        edge_arcs: List[Optional[Tuple[float, float]]] = []
        edge_interface: List[bool] = []
        edge_owners: List[List[int]] = []
        cells: List[Cell] = []

        for cell_id, (verts, geometry, subdomain) in enumerate(self._cells):
            edge_ids, orientations = [], []
            for i, geom in enumerate(geometry):
                a, b = verts[i], verts[(i + 1) % len(verts)]
                interface = geom is not None
                key = (min(a, b), max(a, b), interface)
                if key not in edge_index:
                    edge_index[key] = len(edge_vertices)
                    edge_vertices.append((a, b))
                    edge_arcs.append((geom[1], geom[2]) if interface and geom[0] == "arc" else None)
                    edge_interface.append(interface)
                    edge_owners.append([])
                eid = edge_index[key]
                edge_ids.append(eid)
                orientations.append(1 if edge_vertices[eid] == (a, b) else -1)
                edge_owners[eid].append(cell_id)

            area, centroid = self.area_and_centroid(verts, geometry)
            cells.append(Cell(
                id=cell_id,
                vertices=tuple(verts),
                edges=tuple(edge_ids),
                orientations=tuple(orientations),
                subdomain=subdomain,
                curved=any(g is not None and g[0] == "arc" for g in geometry),
                diameter=self.diameter(verts, geometry),
                area=area,
                centroid=(float(centroid[0]), float(centroid[1])),
            ))

        edges = []
        for eid, (verts, arc, interface, owners) in enumerate(
            zip(edge_vertices, edge_arcs, edge_interface, edge_owners)
        ):
            if interface:
                tag = EDGE_INTERFACE
            elif len(owners) == 1:
                tag = EDGE_BOUNDARY
            else:
                tag = EDGE_INTERIOR
            edges.append(Edge(id=eid, vertices=verts, tag=tag, owners=tuple(owners), arc=arc))

        mesh = InterfaceMesh(
            vertices=np.array(self.vertices),
            edges=tuple(edges),
            cells=tuple(cells),
            curve=self.curve,
            level=level,
            kind=kind,
            domain=self.domain,
            chordal=chordal,
        )
        logger.debug(f"Gitter erzeugt: {mesh.num_cells} Zellen, {mesh.num_edges} Kanten")
        return mesh


def background_resolution(n: int) -> int:
    """Zellen je Richtung auf Level n (4×4-Vorlage, n-mal halbiert)."""
    return 4 * 2 ** n


def build_background_mesh(
    domain: Domain = DEFAULT_DOMAIN, n: int = 0, kind: str = "tri"
) -> InterfaceMesh:
    """
    Erzeugt ein uniformes Hintergrundgitter ohne Interface.

    Args:
        domain: Rechteck (x_min, x_max, y_min, y_max)
        n: Verfeinerungslevel, 4·2^n Zellen je Richtung
        kind: "tri" (Quadrate entlang der NO-Diagonale geteilt) oder "quad"

    Returns:
        InterfaceMesh mit ausschließlich geraden Kanten
    """
    if n < 0:
        raise ValueError(f"Verfeinerungslevel muss >= 0 sein: {n}")
    if kind not in MESH_KINDS:
        raise ValueError(f"Unbekannter Gittertyp: {kind}")
    x0, x1, y0, y1 = (float(v) for v in domain)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"Entartetes Gebiet: {domain}")

    m = background_resolution(n)
    xs = np.linspace(x0, x1, m + 1)
    ys = np.linspace(y0, y1, m + 1)
    grid_x, grid_y = np.meshgrid(xs, ys)
    vertices = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    def vid(i: int, j: int) -> int:
        return j * (m + 1) + i

    builder = MeshBuilder(vertices, curve=None, domain=(x0, x1, y0, y1))
    for j in range(m):
        for i in range(m):
            v00, v10, v11, v01 = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            if kind == "quad":
                builder.add_cell([v00, v10, v11, v01], [None] * 4, SIDE_1)
            else:
                builder.add_cell([v00, v10, v11], [None] * 3, SIDE_1)
                builder.add_cell([v00, v11, v01], [None] * 3, SIDE_1)

    mesh = builder.build(level=n, kind=kind)
    logger.info(f"Hintergrundgitter ({kind}, n={n}): {mesh.num_cells} Zellen, h={mesh.h:.4e}")
    return mesh


def points_in_polygon(polygon: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Strahlverfahren: liegen die Punkte im (geraden) Polygon?"""
    polygon = np.asarray(polygon, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    xj, yj = polygon[-1]
    for xi, yi in polygon:
        crosses = (yi > y) != (yj > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
        inside ^= crosses & (x < x_cross)
        xj, yj = xi, yi
    return inside
