"""Open Heegaard diagrams of Dunwoody manifolds.

The graph Γ(a,b,c,n) has ``n`` upper disks ``D_i^u`` and ``n`` lower disks
``D_i^d``, each carrying ``d = 2a+b+c`` vertex slots. Slot positions are
fixed as follows (position ``p`` carries label ``p+1`` on upper disks and
label ``p+1-r`` mod ``d`` on lower disks):

========  ==============================  ==============================
block     ``D_i^u`` positions             ``D_i^d`` positions
========  ==============================  ==============================
left      ``0..a-1`` upper arcs to i-1    ``0..a-1`` lower arcs to i-1
middle    ``a..a+b-1`` diagonals to         ``a..a+c-1`` verticals
          ``D_{i-1}^d``; then             ``a+c..a+b+c-1`` diagonals
          ``a+b..a+b+c-1`` verticals      to ``D_{i+1}^u``
right     ``a+b+c..d-1`` upper arcs       ``a+b+c..d-1`` lower arcs
          to i+1                          to i+1
========  ==============================  ==============================

Upper positions increase counterclockwise and lower positions clockwise.
Parallel horizontal arcs are nested, so the k-th left slot of ``D_i^u``
meets the ``(a-1-k)``-th right slot of ``D_{i-1}^u``. Gluing identifies
``D_j^u`` with ``D_{j+s}^d`` slot by label. With this labelling the curve
through label ``a+b+1`` of ``D_i^u`` is ``e_i``.
"""
from collections import namedtuple
from dataclasses import dataclass, field
import enum
from math import gcd
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from . import context
from .util import InvariantError, mod_index
from .words import BraidWord, GeneratorLetter, Kind, WordContext, concat, exponent_vector

import logging

LOG = logging.getLogger(__name__)

__all__ = [
    "AdmissibilityReport",
    "ArcType",
    "Curve",
    "CurveSystem",
    "DunwoodyTuple",
    "ElementaryArcRef",
    "NotAdmissibleError",
    "OpenDiagram",
    "TupleError",
    "build_graph",
    "compute_s_bar",
    "curve_arcs",
    "curve_to_word",
    "dict_word",
    "export_graphml",
    "fibonacci",
    "fibonacci_word",
    "glue_and_extract",
    "is_admissible",
    "minkus",
    "psl_set",
    "sieradski",
    "sieradski_word",
    "z2_rank",
]

UP = "u"
DOWN = "d"

Slot = namedtuple("Slot", ["row", "index", "position"])


class TupleError(ValueError):
    pass


class NotAdmissibleError(ValueError):
    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class DunwoodyTuple:
    """The 6-tuple (a, b, c, n, r, s); ``r`` is kept mod d and ``s`` mod n."""

    a: int
    b: int
    c: int
    n: int
    r: int = 0
    s: int = 0

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise TupleError(f"a, b, c must be non-negative in {self.as_tuple()}")
        if self.a + self.b + self.c == 0:
            raise TupleError("a + b + c must be positive")
        if self.n < 1:
            raise TupleError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "r", self.r % self.d)
        object.__setattr__(self, "s", self.s % self.n)

    @property
    def d(self):
        return 2 * self.a + self.b + self.c

    @classmethod
    def parse(cls, text):
        try:
            values = [int(v) for v in text.split(",")]
        except ValueError:
            raise TupleError(f'malformed tuple "{text}", expected a,b,c,n,r,s') from None
        if len(values) != 6:
            raise TupleError(f'expected six integers a,b,c,n,r,s, got "{text}"')
        return cls(*values)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.n, self.r, self.s)

    def __str__(self):
        return "M({},{},{},{},{},{})".format(*self.as_tuple())


class ArcType(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    DIAGONAL = "diagonal"
    VERTICAL = "vertical"


@dataclass(frozen=True)
class Arc:
    """An arc of Γ; ``ends[0]`` lies on a disk of period ``period``."""

    type: ArcType
    period: int
    ends: Tuple[Slot, Slot]


@dataclass(frozen=True)
class OpenDiagram:
    tuple: DunwoodyTuple
    arcs: Tuple[Arc, ...]
    slot_arcs: Dict[Slot, Tuple[int, int]] = field(repr=False, compare=False)

    @property
    def disks(self):
        n = self.tuple.n
        return [(UP, i) for i in range(1, n + 1)] + [(DOWN, i) for i in range(1, n + 1)]

    def label(self, slot):
        t = self.tuple
        if slot.row == UP:
            return slot.position + 1
        return (slot.position - t.r) % t.d + 1

    def glued(self, slot):
        """The slot identified with ``slot`` by the gluing ``D_j^u = D_{j+s}^d``."""
        t = self.tuple
        if slot.row == UP:
            return Slot(DOWN, mod_index(slot.index + t.s, t.n), (slot.position + t.r) % t.d)
        return Slot(UP, mod_index(slot.index - t.s, t.n), (slot.position - t.r) % t.d)

    def other_end(self, slot):
        arc_index, end = self.slot_arcs[slot]
        return self.arcs[arc_index].ends[1 - end]

    def arc_counts(self):
        counts = {arc_type: 0 for arc_type in ArcType}
        for arc in self.arcs:
            counts[arc.type] += 1
        return counts

    def with_gluing(self, r, s):
        return build_graph(DunwoodyTuple(*self.tuple.as_tuple()[:4], r, s))

    def to_dict(self):
        t = self.tuple
        return {
            "family": "dunwoody",
            "tuple": list(t.as_tuple()),
            "disks": [
                {
                    "row": row,
                    "index": index,
                    "labels": [self.label(Slot(row, index, p)) for p in range(t.d)],
                }
                for row, index in self.disks
            ],
            "arcs": [
                {
                    "type": arc.type.value,
                    "ends": [
                        {"row": e.row, "index": e.index, "slot": e.position, "label": self.label(e)}
                        for e in arc.ends
                    ],
                }
                for arc in self.arcs
            ],
        }

    def to_graph(self):
        """A ``networkx.MultiGraph`` with one node per disk and one edge per arc."""
        graph = nx.MultiGraph(family="dunwoody", tuple=str(self.tuple))
        for row, index in self.disks:
            graph.add_node(f"{row}{index}", row=row, index=index, slots=self.tuple.d)
        for arc in self.arcs:
            tail, head = arc.ends
            graph.add_edge(
                f"{tail.row}{tail.index}",
                f"{head.row}{head.index}",
                type=arc.type.value,
                tail_label=self.label(tail),
                head_label=self.label(head),
            )
        return graph


def build_graph(t: DunwoodyTuple) -> OpenDiagram:
    """Build the labelled graph Γ(a,b,c,n) of a tuple.

    Returns:
        OpenDiagram: ``2n`` disks with ``d`` slots each and ``n·d`` arcs, every
        slot being the endpoint of exactly one arc.

    Raises:
        InvariantError: if the slot assignment is not a perfect matching.
    """
    a, b, c, n, d = t.a, t.b, t.c, t.n, t.d
    right = a + b + c
    arcs = []
    for i in range(1, n + 1):
        prev = mod_index(i - 1, n)
        for k in range(a):
            arcs.append(
                Arc(ArcType.UPPER, i, (Slot(UP, i, k), Slot(UP, prev, right + a - 1 - k)))
            )
            arcs.append(
                Arc(ArcType.LOWER, i, (Slot(DOWN, i, k), Slot(DOWN, prev, right + a - 1 - k)))
            )
        for k in range(b):
            arcs.append(
                Arc(ArcType.DIAGONAL, i, (Slot(UP, i, a + k), Slot(DOWN, prev, a + c + k)))
            )
        for k in range(c):
            arcs.append(
                Arc(ArcType.VERTICAL, i, (Slot(UP, i, a + b + k), Slot(DOWN, i, a + k)))
            )

    slot_arcs = {}
    for arc_index, arc in enumerate(arcs):
        for end, slot in enumerate(arc.ends):
            if slot in slot_arcs:
                raise InvariantError(f"slot {slot} of {t} carries two arcs")
            slot_arcs[slot] = (arc_index, end)
    if len(slot_arcs) != 2 * n * d:
        raise InvariantError(f"{t}: {len(slot_arcs)} slots used, expected {2 * n * d}")
    return OpenDiagram(t, tuple(arcs), slot_arcs)


class Orientation(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


ARROWS = {
    ("AU", Orientation.FORWARD): "→",
    ("AU", Orientation.BACKWARD): "←",
    ("AL", Orientation.FORWARD): "→",
    ("AL", Orientation.BACKWARD): "←",
    ("B", Orientation.FORWARD): "↓",
    ("B", Orientation.BACKWARD): "↑",
    ("C", Orientation.FORWARD): "↓",
    ("C", Orientation.BACKWARD): "↑",
}
NAMES = {"AU": "A^U", "AL": "A^L", "B": "B", "C": "C"}


@dataclass(frozen=True)
class ElementaryArcRef:
    """A named elementary piece: an arc type, an orientation and a base index.

    FORWARD means ``→`` for horizontal arcs (towards ``i-1``) and ``↓`` for
    vertical and diagonal arcs (from ``D^u`` to ``D^d``).
    """

    type: str
    orientation: Orientation
    index: int
    n: int
    s: int

    def __post_init__(self):
        if self.type not in NAMES:
            raise ValueError(f"unknown Dunwoody arc type {self.type}")
        object.__setattr__(self, "index", mod_index(self.index, self.n))

    def __str__(self):
        arrow = ARROWS[(self.type, self.orientation)]
        suffix = f"^{self.s}" if self.type in ("B", "C") else ""
        return f"{arrow}{NAMES[self.type]}_{self.index}{suffix}"


@dataclass(frozen=True)
class Curve:
    """A closed curve of the glued diagram.

    ``steps`` lists ``(arc index, forward)`` pairs in traversal order, where
    ``forward`` means the arc is run from ``ends[0]`` to ``ends[1]``.
    """

    start: Slot
    steps: Tuple[Tuple[int, bool], ...]

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class CurveSystem:
    diagram: OpenDiagram
    curves: Tuple[Curve, ...]
    indexed: bool

    @property
    def m(self):
        return len(self.curves)


def _walk(diag, start):
    limit = context.get("max_traversal_factor") * max(len(diag.arcs), 1)
    steps, slot = [], start
    while True:
        arc_index, end = diag.slot_arcs[slot]
        steps.append((arc_index, end == 0))
        slot = diag.glued(diag.arcs[arc_index].ends[1 - end])
        if slot == start:
            return Curve(start, tuple(steps))
        if len(steps) > limit:
            raise InvariantError(f"curve from {start} in {diag.tuple} does not close")


def _start_slot(t, i):
    return Slot(UP, i, (t.a + t.b) % t.d)


def glue_and_extract(diag: OpenDiagram, r=None, s=None) -> CurveSystem:
    """Glue ``D_i^u`` to ``D_{i+s}^d`` and split the arcs into closed curves.

    Curves are first traced from label ``a+b+1`` of ``D_1^u``, ..., ``D_n^u``
    (downwards when that slot carries a vertical arc); arcs not met by those
    curves are then covered in slot order.

    Returns:
        CurveSystem: the curves, with ``indexed`` telling whether the first
        ``n`` curves are ``e_1..e_n`` in the sense of the ``a+b+1`` rule.

    Raises:
        InvariantError: if some arc is traversed twice or never.
    """
    if r is not None or s is not None:
        t = diag.tuple
        diag = diag.with_gluing(t.r if r is None else r, t.s if s is None else s)
    t = diag.tuple
    used = [False] * len(diag.arcs)
    curves = []

    def trace(start):
        curve = _walk(diag, start)
        for arc_index, _ in curve.steps:
            if used[arc_index]:
                raise InvariantError(f"arc {arc_index} of {t} traversed twice")
            used[arc_index] = True
        curves.append(curve)

    indexed = True
    for i in range(1, t.n + 1):
        start = _start_slot(t, i)
        if used[diag.slot_arcs[start][0]]:
            indexed = False
            continue
        trace(start)
    for slot in sorted(diag.slot_arcs):
        if not used[diag.slot_arcs[slot][0]]:
            trace(slot)
    if not all(used):
        raise InvariantError(f"arcs of {t} left outside every curve")
    LOG.debug("%s: %d curves", t, len(curves))
    return CurveSystem(diag, tuple(curves), indexed and len(curves) >= t.n)


def _piece(diag, arc_index, forward):
    t = diag.tuple
    arc = diag.arcs[arc_index]
    i = arc.period
    direction = Orientation.FORWARD if forward else Orientation.BACKWARD
    if arc.type in (ArcType.UPPER, ArcType.LOWER):
        kind = "AU" if arc.type is ArcType.UPPER else "AL"
        # backward runs i-1 -> i, i.e. leaves D_{i-1} to its right
        return ElementaryArcRef(kind, direction, i if forward else i - 1, t.n, t.s)
    if arc.type is ArcType.VERTICAL:
        return ElementaryArcRef("C", direction, i, t.n, t.s)
    return ElementaryArcRef("B", direction, i if forward else i - 1, t.n, t.s)


def curve_arcs(curve: Curve, diag: OpenDiagram) -> List[ElementaryArcRef]:
    """The elementary pieces of a curve in traversal order."""
    return [_piece(diag, arc_index, forward) for arc_index, forward in curve.steps]


def _context(n):
    return WordContext(genus=n, strands=1)


def _letter(kind, index, exponent):
    return GeneratorLetter(kind, index, exponent)


def _beta_run(i, s, n, inverse=False):
    length = (n - s) % n
    letters = [_letter(Kind.BETA, mod_index(i + j, n), 1) for j in range(length)]
    word = BraidWord(letters, _context(n))
    return ~word if inverse else word


def dict_word(arc: ElementaryArcRef) -> BraidWord:
    """Word of an elementary piece.

    ``w_{i,s}`` is the run ``β_i β_{i+1} ... β_{i+L-1}`` with
    ``L = (n - s) mod n``; it is empty when ``s = 0``.
    """
    i, n, s = arc.index, arc.n, arc.s
    ctx = _context(n)
    forward = arc.orientation is Orientation.FORWARD

    def word(*letters):
        return BraidWord([_letter(k, mod_index(j, n), e) for k, j, e in letters], ctx)

    if arc.type == "AU":
        if forward:
            return word((Kind.BETA, i - 1, -1), (Kind.ALPHA, i - 1, 1))
        return word((Kind.BETA, i, 1), (Kind.ALPHA, i + 1, 1))
    if arc.type == "AL":
        return word((Kind.ALPHA, i - s - 1 if forward else i - s + 1, -1))
    if arc.type == "B":
        if forward:
            return dict_word(ElementaryArcRef("C", arc.orientation, i, n, s + 1))
        return dict_word(ElementaryArcRef("C", arc.orientation, i + 1, n, s + 1))
    if forward:
        return concat(_beta_run(i, s, n), word((Kind.ALPHA, i + n - s, -1)))
    return concat(_beta_run(i, s, n, inverse=True), word((Kind.ALPHA, i, 1)))


def curve_to_word(curve: Curve, diag: OpenDiagram, start=0, reverse=False) -> BraidWord:
    """Translate a curve into a reduced braid word.

    Args:
        curve (Curve): a curve of ``diag``.
        diag (OpenDiagram): the diagram the curve was extracted from.
        start (int): index of the first piece (rotates the traversal).
        reverse (bool): run the curve against its traced orientation.

    Returns:
        BraidWord: the product of the dictionary words of the pieces.
    """
    steps = list(curve.steps)
    steps = steps[start:] + steps[:start]
    if reverse:
        steps = [(arc_index, not forward) for arc_index, forward in reversed(steps)]
    result = BraidWord.empty(_context(diag.tuple.n))
    for arc_index, forward in steps:
        result = concat(result, dict_word(_piece(diag, arc_index, forward)))
    return result


def z2_rank(rows) -> int:
    """Rank over Z/2 of an integer matrix given as a list of rows."""
    matrix = np.array(rows, dtype=np.int64).reshape(len(rows), -1) % 2
    matrix = matrix.astype(np.uint8)
    rank = 0
    n_rows, n_cols = matrix.shape
    for col in range(n_cols):
        pivot = None
        for row in range(rank, n_rows):
            if matrix[row, col]:
                pivot = row
                break
        if pivot is None:
            continue
        if pivot != rank:
            matrix[[rank, pivot]] = matrix[[pivot, rank]]
        for row in range(n_rows):
            if row != rank and matrix[row, col]:
                matrix[row, :] ^= matrix[rank, :]
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass(frozen=True)
class AdmissibilityReport:
    tuple: DunwoodyTuple
    curve_count: int
    z2_rank: int
    face_count: int
    cut_connected: bool

    @property
    def admissible(self):
        return self.curve_count == self.tuple.n and self.cut_connected

    def __bool__(self):
        return self.admissible

    def to_dict(self):
        return {
            "tuple": list(self.tuple.as_tuple()),
            "admissible": self.admissible,
            "m": self.curve_count,
            "z2_rank": self.z2_rank,
            "faces": self.face_count,
            "cut_connected": self.cut_connected,
        }


def _boundary_step(diag, slot):
    step = 1 if slot.row == UP else -1
    return slot._replace(position=(slot.position + step) % diag.tuple.d)


def _segment(diag, slot):
    """The boundary segment crossed when leaving ``slot`` along its disk."""
    if slot.row == UP:
        return slot
    return slot._replace(position=(slot.position - 1) % diag.tuple.d)


def _faces(diag):
    face_of = {}
    faces = []
    for start in sorted(diag.slot_arcs):
        if start in face_of:
            continue
        face = len(faces)
        segments = []
        slot = start
        while slot not in face_of:
            face_of[slot] = face
            arrival = diag.other_end(slot)
            segments.append(_segment(diag, arrival))
            slot = _boundary_step(diag, arrival)
        faces.append(segments)
    return faces


def _cut_surface(diag):
    """Faces of the planar diagram joined through the glued disk boundaries."""
    t = diag.tuple
    faces = _faces(diag)
    face_of_segment = {seg: f for f, segments in enumerate(faces) for seg in segments}

    disk_graph = nx.Graph()
    disk_graph.add_nodes_from(diag.disks)
    disk_graph.add_edges_from(
        ((arc.ends[0].row, arc.ends[0].index), (arc.ends[1].row, arc.ends[1].index))
        for arc in diag.arcs
    )
    region = nx.utils.UnionFind(range(len(faces)))
    if not nx.is_connected(disk_graph):
        # A face of the sphere bounded by several components is traced once
        # per component; join those traces.
        if t.a == 0:
            region.union(*(face_of_segment[Slot(UP, i, t.d - 1)] for i in range(1, t.n + 1)))
        else:
            region.union(
                face_of_segment[Slot(UP, 1, t.a - 1)], face_of_segment[Slot(DOWN, 1, t.a - 1)]
            )

    cut = nx.MultiGraph()
    cut.add_nodes_from(region[f] for f in range(len(faces)))
    for i in range(1, t.n + 1):
        for p in range(t.d):
            upper = Slot(UP, i, p)
            lower = diag.glued(upper)
            cut.add_edge(region[face_of_segment[upper]], region[face_of_segment[lower]])
    return len(faces), nx.is_connected(cut)


def is_admissible(t: DunwoodyTuple) -> AdmissibilityReport:
    """Decide whether a tuple defines a Dunwoody manifold.

    The tuple is admissible when the glued diagram has exactly ``n`` curves
    and cutting the genus ``n`` surface along them leaves it connected.

    Returns:
        AdmissibilityReport: truthy iff admissible; also carries ``m``, the
        Z/2 rank of the curve exponent vectors and the face count.
    """
    diag = build_graph(t)
    system = glue_and_extract(diag)
    vectors = [exponent_vector(curve_to_word(c, diag)) for c in system.curves]
    face_count, connected = _cut_surface(diag)
    report = AdmissibilityReport(t, system.m, z2_rank(vectors), face_count, connected)
    LOG.info("%s: m=%d, cut connected=%s", t, system.m, connected)
    return report


def psl_set(t: DunwoodyTuple) -> List[BraidWord]:
    """The words ``ē_1..ē_n`` of an admissible tuple.

    Raises:
        NotAdmissibleError: carrying the admissibility report.
    """
    report = is_admissible(t)
    if not report:
        raise NotAdmissibleError(
            f"{t} is not admissible (m={report.curve_count}, "
            f"Z/2 rank={report.z2_rank}, cut connected={report.cut_connected})",
            report,
        )
    diag = build_graph(t)
    system = glue_and_extract(diag)
    return [curve_to_word(curve, diag) for curve in system.curves]


def compute_s_bar(a: int, n: int, r: int) -> int:
    """Signed count of horizontal arcs along one period of ``e_1``.

    Works on Γ(a,0,1,n,r,0): starting from label ``a+1`` of ``D_1^u`` and
    running the vertical arc downwards, arcs going from ``i-1`` to ``i``
    count +1 and arcs going from ``i`` to ``i-1`` count -1, until the curve
    meets the next vertical arc.

    Raises:
        TupleError: unless ``gcd(2a+1, 2r) = 1``.
        InvariantError: if no vertical arc is met again.
    """
    if gcd(2 * a + 1, 2 * r) != 1:
        raise TupleError(f"gcd(2a+1, 2r) must be 1, got a={a}, r={r}")
    t = DunwoodyTuple(a, 0, 1, n, r, 0)
    diag = build_graph(t)
    slot = diag.glued(diag.other_end(_start_slot(t, 1)))
    total = 0
    for _ in range(len(diag.arcs)):
        arc_index, end = diag.slot_arcs[slot]
        arc = diag.arcs[arc_index]
        if arc.type is ArcType.VERTICAL:
            return total
        total += -1 if end == 0 else 1
        slot = diag.glued(arc.ends[1 - end])
    raise InvariantError(f"curve e_1 of {t} never returns to a vertical arc")


def fibonacci(n):
    return DunwoodyTuple(2, 0, 1, n, 1, 0)


def sieradski(n):
    return DunwoodyTuple(1, 0, 1, n, 1, -2)


def minkus(a, n, r):
    """The tuple M(a,0,1,n,r,s̄) of the n-fold cyclic cover of b(2a+1, 2r)."""
    return DunwoodyTuple(a, 0, 1, n, r, compute_s_bar(a, n, r))


def fibonacci_word(i, n):
    ctx = _context(n)
    spec = [("a", i, -1), ("b", i - 1, -1), ("a", i - 1, 1), ("a", i, -1), ("b", i, 1), ("a", i + 1, 1), ("a", i, -1)]
    return BraidWord([_letter(Kind(k), mod_index(j, n), e) for k, j, e in spec], ctx)


def sieradski_word(i, n):
    ctx = _context(n)
    spec = [("b", i, 1), ("b", i + 1, 1), ("a", i + 2, -1), ("b", i + 1, -1), ("a", i + 1, 1), ("a", i, -1)]
    return BraidWord([_letter(Kind(k), mod_index(j, n), e) for k, j, e in spec], ctx)


def export_graphml(diagram, path):
    """Write ``diagram.to_graph()`` as GraphML for external renderers."""
    nx.write_graphml(diagram.to_graph(), path)
    LOG.info("Wrote diagram graph to %s", path)
