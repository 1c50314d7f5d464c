"""
Lesen und Schreiben von Gittern im Textformat "WGMESH 1".

Aufbau:
    WGMESH 1
    KIND <tri|quad>
    LEVEL <n>
    DOMAIN <x_min> <x_max> <y_min> <y_max>
    CHORDAL <0|1>
    CURVES <anzahl>
    <id> <kind> <cx> <cy> <params...>
    VERTICES <anzahl>
    <id> <x> <y>
    EDGES <anzahl>
    <id> <v0> <v1> <tag> [<curve_id> <t0> <t1>]
    CELLS <anzahl>
    <id> <subdomain> <edge-ids...>

Gleitkommazahlen werden mit 17 signifikanten Stellen geschrieben.
"""

import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .curve import InterfaceCurve
from .mesh import EDGE_INTERFACE, Cell, Edge, InterfaceMesh, MeshBuilder

logger = logging.getLogger(__name__)

HEADER = "WGMESH 1"


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def save_mesh(mesh: InterfaceMesh, path: Union[str, Path]) -> Path:
    """Schreibt das Gitter als WGMESH-Datei."""
    path = Path(path)
    if not path.suffix:
        path = path.with_suffix(".wgmesh")
    lines = [
        HEADER,
        f"KIND {mesh.kind}",
        f"LEVEL {mesh.level}",
        "DOMAIN " + " ".join(_fmt(v) for v in mesh.domain),
        f"CHORDAL {int(mesh.chordal)}",
    ]
    curves = [mesh.curve] if mesh.curve is not None else []
    lines.append(f"CURVES {len(curves)}")
    for cid, curve in enumerate(curves):
        values = [_fmt(v) for v in curve.center + curve.params]
        lines.append(f"{cid} {curve.kind} " + " ".join(values))

    lines.append(f"VERTICES {len(mesh.vertices)}")
    lines.extend(f"{i} {_fmt(x)} {_fmt(y)}" for i, (x, y) in enumerate(mesh.vertices))

    lines.append(f"EDGES {mesh.num_edges}")
    for edge in mesh.edges:
        row = f"{edge.id} {edge.vertices[0]} {edge.vertices[1]} {edge.tag}"
        if edge.curved:
            row += f" 0 {_fmt(edge.arc[0])} {_fmt(edge.arc[1])}"
        lines.append(row)

    lines.append(f"CELLS {mesh.num_cells}")
    for cell in mesh.cells:
        lines.append(f"{cell.id} {cell.subdomain} " + " ".join(str(e) for e in cell.edges))

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Gitter gespeichert: {path}")
    return path


class _Reader:
    def __init__(self, text: str, path: Path) -> None:
        self.lines = [line.split() for line in text.splitlines() if line.strip()]
        self.pos = 0
        self.path = path

    def next(self) -> List[str]:
        if self.pos >= len(self.lines):
            raise ValueError(f"Unerwartetes Dateiende in {self.path}")
        tokens = self.lines[self.pos]
        self.pos += 1
        return tokens

    def keyed(self, key: str) -> List[str]:
        tokens = self.next()
        if tokens[0] != key:
            raise ValueError(f"{self.path}: erwartet '{key}', gefunden '{tokens[0]}'")
        return tokens[1:]


def _chain(edges: List[Edge], edge_ids: List[int]) -> Tuple[List[int], List[int]]:
    """Leitet Eckenfolge und Orientierungen aus der Kantenfolge ab."""
    first, second = edges[edge_ids[0]], edges[edge_ids[1]]
    if first.vertices[1] in second.vertices:
        current, orientations = first.vertices[0], []
    else:
        current, orientations = first.vertices[1], []
    vertices = []
    for eid in edge_ids:
        v0, v1 = edges[eid].vertices
        vertices.append(current)
        if v0 == current:
            orientations.append(1)
            current = v1
        elif v1 == current:
            orientations.append(-1)
            current = v0
        else:
            raise ValueError(f"Kante {eid} schließt nicht an Ecke {current} an")
    return vertices, orientations


def load_mesh(path: Union[str, Path]) -> InterfaceMesh:
    """
    Liest eine WGMESH-Datei.

    Raises:
        FileNotFoundError: Datei existiert nicht
        ValueError: Formatfehler
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Gitterdatei nicht gefunden: {path}")
    reader = _Reader(path.read_text(encoding="utf-8"), path)
    if " ".join(reader.next()) != HEADER:
        raise ValueError(f"{path}: Kopfzeile '{HEADER}' fehlt")

    kind = reader.keyed("KIND")[0]
    level = int(reader.keyed("LEVEL")[0])
    domain = tuple(float(v) for v in reader.keyed("DOMAIN"))
    chordal = bool(int(reader.keyed("CHORDAL")[0]))

    curve = None
    for _ in range(int(reader.keyed("CURVES")[0])):
        tokens = reader.next()
        values = [float(v) for v in tokens[2:]]
        curve = InterfaceCurve(tokens[1], tuple(values[2:]), center=(values[0], values[1]))

    n_vertices = int(reader.keyed("VERTICES")[0])
    vertices = np.array([[float(t) for t in reader.next()[1:3]] for _ in range(n_vertices)])

    n_edges = int(reader.keyed("EDGES")[0])
    raw_edges = []
    for _ in range(n_edges):
        tokens = reader.next()
        arc = (float(tokens[5]), float(tokens[6])) if len(tokens) > 4 else None
        raw_edges.append((int(tokens[0]), (int(tokens[1]), int(tokens[2])), tokens[3], arc))

    n_cells = int(reader.keyed("CELLS")[0])
    raw_cells = []
    owners: List[List[int]] = [[] for _ in range(n_edges)]
    for _ in range(n_cells):
        tokens = reader.next()
        cid, subdomain, edge_ids = int(tokens[0]), int(tokens[1]), [int(t) for t in tokens[2:]]
        raw_cells.append((cid, subdomain, edge_ids))
        for eid in edge_ids:
            owners[eid].append(cid)

    edges = [
        Edge(id=eid, vertices=verts, tag=tag, owners=tuple(owners[eid]), arc=arc)
        for eid, verts, tag, arc in raw_edges
    ]

    builder = MeshBuilder(vertices, curve=curve, domain=domain)
    cells = []
    for cid, subdomain, edge_ids in raw_cells:
        verts, orientations = _chain(edges, edge_ids)
        geometry = []
        for eid, orient in zip(edge_ids, orientations):
            edge = edges[eid]
            if edge.curved:
                geometry.append(("arc",) + (edge.arc if orient > 0 else edge.arc[::-1]))
            elif edge.tag == EDGE_INTERFACE:
                geometry.append(("chord",))
            else:
                geometry.append(None)
        area, centroid = builder.area_and_centroid(verts, geometry)
        cells.append(Cell(
            id=cid,
            vertices=tuple(verts),
            edges=tuple(edge_ids),
            orientations=tuple(orientations),
            subdomain=subdomain,
            curved=any(edges[e].curved for e in edge_ids),
            diameter=builder.diameter(verts, geometry),
            area=area,
            centroid=(float(centroid[0]), float(centroid[1])),
        ))

    mesh = InterfaceMesh(
        vertices=vertices,
        edges=tuple(edges),
        cells=tuple(cells),
        curve=curve,
        level=level,
        kind=kind,
        domain=domain,
        chordal=chordal,
    )
    logger.info(f"Gitter geladen: {path} ({mesh.num_cells} Zellen)")
    return mesh
