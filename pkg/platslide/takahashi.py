"""Open Heegaard diagrams of periodic Takahashi manifolds T_n(p/q, r/s).

The Heegaard surface has genus ``2n``; its diagram has disks ``D_1^u..D_{2n}^u``
and ``D_1^d..D_{2n}^d`` and ``D_j^u`` is glued to ``D_j^d`` slot by slot.
Each period ``i`` carries two curves: the P-curve, whose bundle
multiplicities are linear in ``p`` and ``q``, and the R-curve, linear in
``r`` and ``s``. Both are assembled from eight types of elementary arcs:

========  ====================================  =========================
type      forward run                           index parity
========  ====================================  =========================
``AU``    ``D_k^u -> D_{k+1}^u``                even
``AL``    ``D_k^d -> D_{k+1}^d``                even
``B``     ``D_k^u -> D_{k+1}^d``                odd
``C``     ``D_k^u -> D_k^d``                    any
``F``     ``D_k^u -> D_{k+2}^u``                even
``G``     ``D_k^u -> D_{k+2}^u``                odd
``X``     ``D_{k+1}^d -> D_{k+3}^d``            odd
``Y``     ``D_k^d -> D_{k+2}^d``                odd
========  ====================================  =========================

For ``F``, ``G``, ``X`` and ``Y`` the backward arc with index ``k`` leaves
the same disk in the opposite direction, so reversing ``→F_k`` gives
``←F_{k+2}``. Vertical ``C`` runs sit on the odd handles when ``p > q``
and on the even handles when ``r > s``.

Each of the four parameter cases has its own itinerary per curve, written
down arc by arc. :func:`build_diagram` numbers the slots of every handle in
the order those itineraries cross it, so each arc is used exactly once by
construction and the walk in :func:`extract_curves` only confirms the
gluing. The real check on the encodings is the cross-oracle against the
surgery description in :func:`platslide.invariants.takahashi_surgery_h1`.
"""
from collections import Counter
from dataclasses import dataclass, field
import enum
from math import gcd
from typing import Dict, List, Tuple

import networkx as nx

from . import context
from .dunwoody import DOWN, UP, Curve, Orientation, Slot
from .util import InvariantError, balanced_steps, mod_index, parse_fraction
from .words import BraidWord, GeneratorLetter, Kind, WordContext, commutator, concat

import logging

LOG = logging.getLogger(__name__)

__all__ = [
    "Case",
    "ParamsError",
    "TakArc",
    "TakArcRef",
    "TakahashiDiagram",
    "TakahashiParams",
    "TakCurveSystem",
    "build_diagram",
    "extract_curves",
    "itineraries",
    "tak_curve_arcs",
    "tak_curve_to_word",
    "tak_dict_word",
    "tak_psl_set",
]


class ParamsError(ValueError):
    pass


class Case(enum.Enum):
    P_GT_Q_R_GT_S = "p>q,r>s"
    P_LT_Q_R_LT_S = "p<q,r<s"
    P_GT_Q_R_LT_S = "p>q,r<s"
    P_LT_Q_R_GT_S = "p<q,r>s"


@dataclass(frozen=True)
class TakahashiParams:
    """Parameters of T_n(p/q, r/s).

    Raises:
        ParamsError: for negative values, ``gcd(p,q) != 1``,
            ``gcd(r,s) != 1`` or a coefficient equal to 1.
    """

    n: int
    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.n < 1:
            raise ParamsError(f"n must be positive, got {self.n}")
        if min(self.p, self.q, self.r, self.s) < 0:
            raise ParamsError(f"coefficients must be non-negative in {self}")
        for num, den in ((self.p, self.q), (self.r, self.s)):
            if gcd(num, den) != 1:
                raise ParamsError(f"coefficient {num}/{den} is not reduced")
            if num == den:
                raise ParamsError(f"coefficient {num}/{den} equals 1")

    @classmethod
    def parse(cls, n, pq, rs):
        try:
            p, q = parse_fraction(pq)
            r, s = parse_fraction(rs)
        except ValueError as exc:
            raise ParamsError(str(exc)) from exc
        return cls(n, p, q, r, s)

    @property
    def case(self):
        if self.p > self.q:
            return Case.P_GT_Q_R_GT_S if self.r > self.s else Case.P_GT_Q_R_LT_S
        return Case.P_LT_Q_R_GT_S if self.r > self.s else Case.P_LT_Q_R_LT_S

    @property
    def genus(self):
        return 2 * self.n

    def relabelled(self):
        """T_n(r/s, p/q), the same manifold with the chain shifted by one."""
        return TakahashiParams(self.n, self.r, self.s, self.p, self.q)

    def to_dict(self):
        return {
            "n": self.n,
            "pq": f"{self.p}/{self.q}",
            "rs": f"{self.r}/{self.s}",
            "case": self.case.value,
        }

    def __str__(self):
        return f"T_{self.n}({self.p}/{self.q},{self.r}/{self.s})"


EVEN_TYPES = ("AU", "AL", "F")
ODD_TYPES = ("B", "G", "X", "Y")
ANY_TYPES = ("C",)
# type -> (start row, start offset, end row, end offset) of the forward arc
FORWARD_ENDS = {
    "AU": (UP, 0, UP, 1),
    "AL": (DOWN, 0, DOWN, 1),
    "B": (UP, 0, DOWN, 1),
    "C": (UP, 0, DOWN, 0),
    "F": (UP, 0, UP, 2),
    "G": (UP, 0, UP, 2),
    "X": (DOWN, 1, DOWN, 3),
    "Y": (DOWN, 0, DOWN, 2),
}
NAMES = {"AU": "A^U", "AL": "A^L", "B": "B", "C": "C", "F": "F", "G": "G", "X": "X", "Y": "Y"}


@dataclass(frozen=True)
class TakArcRef:
    """A named elementary arc of a Takahashi diagram, e.g. ``←F_2``."""

    type: str
    orientation: Orientation
    index: int
    n: int

    def __post_init__(self):
        if self.type in EVEN_TYPES:
            parity = 0
        elif self.type in ODD_TYPES:
            parity = 1
        elif self.type in ANY_TYPES:
            parity = self.index % 2
        else:
            raise ParamsError(f"unknown Takahashi arc type {self.type}")
        if self.index % 2 != parity:
            raise ParamsError(
                f"{self.type} arcs need an {'odd' if parity else 'even'} index, "
                f"got {self.index}"
            )
        object.__setattr__(self, "index", mod_index(self.index, 2 * self.n))

    @property
    def forward(self):
        return self.orientation is Orientation.FORWARD

    def endpoints(self):
        """``((row, disk), (row, disk))`` of the arc in its running direction."""
        g = 2 * self.n
        start_row, start, end_row, end = FORWARD_ENDS[self.type]
        k = self.index
        if self.forward:
            return (start_row, mod_index(k + start, g)), (end_row, mod_index(k + end, g))
        if self.type in ("F", "G", "X", "Y"):
            return (start_row, mod_index(k + start, g)), (end_row, mod_index(k + start - 2, g))
        return (end_row, mod_index(k + end, g)), (start_row, mod_index(k + start, g))

    def reversed(self):
        other = Orientation.BACKWARD if self.forward else Orientation.FORWARD
        index = self.index
        if self.type in ("F", "G", "X", "Y"):
            index += 2 if self.forward else -2
        return TakArcRef(self.type, other, index, self.n)

    def __str__(self):
        if self.type == "C":
            arrow = "↓" if self.forward else "↑"
        else:
            arrow = "→" if self.forward else "←"
        return f"{arrow}{NAMES[self.type]}_{self.index}"


def _ref(kind, index, n, forward=True):
    return TakArcRef(kind, Orientation.FORWARD if forward else Orientation.BACKWARD, index, n)


def tak_dict_word(arc: TakArcRef, n: int = None) -> BraidWord:
    """Word of an elementary arc in B_{2n,2}.

    Indices are taken mod ``2n`` into ``[1, 2n]``; ``[x, y]`` is the
    commutator ``x^-1 y^-1 x y``.

    Raises:
        ParamsError: if ``n`` disagrees with the arc or the index parity is wrong.
    """
    n = arc.n if n is None else n
    if n != arc.n:
        raise ParamsError(f"arc {arc} belongs to n={arc.n}, not n={n}")
    g = 2 * n
    ctx = WordContext(genus=g, strands=1)
    k = arc.index

    def word(*letters):
        return BraidWord([GeneratorLetter(kind, mod_index(j, g), e) for kind, j, e in letters], ctx)

    a, b = Kind.ALPHA, Kind.BETA
    fwd = arc.forward
    if arc.type == "AU":
        return word((b, k + 1, -1), (a, k + 1, 1)) if fwd else word((b, k + 1, 1), (a, k, 1))
    if arc.type == "AL":
        return word((a, k + 1 if fwd else k, -1))
    if arc.type == "B":
        return word((a, k + 1, -1)) if fwd else word((a, k, 1))
    if arc.type == "C":
        return word((a, k, -1 if fwd else 1))
    if arc.type == "F":
        if fwd:
            bracket = commutator(word((a, k + 1, 1)), word((b, k + 1, 1)))
            return concat(bracket, word((b, k + 2, -1), (a, k + 2, 1)))
        bracket = commutator(word((b, k - 1, 1)), word((a, k - 1, 1)))
        return concat(concat(word((b, k, 1)), bracket), word((a, k - 2, 1)))
    if arc.type == "G":
        if fwd:
            return word((b, k + 1, -1), (b, k + 2, -1), (a, k + 2, 1))
        return word((b, k, 1), (b, k - 1, 1), (a, k - 2, 1))
    if arc.type == "X":
        if fwd:
            return word((b, k + 2, -1), (a, k + 3, -1))
        return word((b, k, -1), (a, k - 1, -1))
    return word((a, k + 2 if fwd else k - 2, -1))


def _rotate(steps):
    return steps[-1:] + steps[:-1]


def _p_itinerary(t, i):
    n, p, q = t.n, t.p, t.q
    if q == 0:
        return [_ref("C", 2 * i - 1, n)]
    steps = []
    if p < q:
        for visit in balanced_steps(p, q):
            steps.append(_ref("F", 2 * i, n, forward=False))
            if visit:
                steps += [_ref("AL", 2 * i - 2, n), _ref("B", 2 * i - 1, n)]
            else:
                steps.append(_ref("X", 2 * i - 3, n))
    else:
        for count in balanced_steps(p - q, q):
            steps += [_ref("F", 2 * i, n, forward=False), _ref("AL", 2 * i - 2, n)]
            steps += [_ref("C", 2 * i - 1, n)] * count
            steps.append(_ref("B", 2 * i - 1, n))
    return _rotate(steps)


def _r_itinerary(t, i):
    n, r, s = t.n, t.r, t.s
    if s == 0:
        return [_ref("C", 2 * i, n)]
    steps = []
    if r < s:
        for visit in balanced_steps(r, s):
            steps.append(_ref("Y", 2 * i + 1, n, forward=False))
            if visit:
                steps += [_ref("B", 2 * i - 1, n), _ref("AU", 2 * i, n)]
            else:
                steps.append(_ref("G", 2 * i - 1, n))
    else:
        for count in balanced_steps(r - s, s):
            steps += [_ref("Y", 2 * i + 1, n, forward=False), _ref("B", 2 * i - 1, n)]
            steps += [_ref("C", 2 * i, n)] * count
            steps.append(_ref("AU", 2 * i, n))
    return _rotate(steps)


def itineraries(t: TakahashiParams) -> List[List[TakArcRef]]:
    """Arc sequences of ``e_1..e_{2n}``: P-curves of periods 1..n, then R-curves."""
    LOG.debug("%s: itineraries for case %s", t, t.case.value)
    return [_p_itinerary(t, i) for i in range(1, t.n + 1)] + [
        _r_itinerary(t, i) for i in range(1, t.n + 1)
    ]


@dataclass(frozen=True)
class TakArc:
    """An arc of the diagram, named after its run from ``ends[0]`` to ``ends[1]``."""

    ref: TakArcRef
    ends: Tuple[Slot, Slot]


@dataclass(frozen=True)
class TakahashiDiagram:
    params: TakahashiParams
    arcs: Tuple[TakArc, ...]
    sizes: Tuple[int, ...]
    starts: Tuple[Slot, ...]
    slot_arcs: Dict[Slot, Tuple[int, int]] = field(repr=False, compare=False)

    @property
    def disks(self):
        g = self.params.genus
        return [(UP, j) for j in range(1, g + 1)] + [(DOWN, j) for j in range(1, g + 1)]

    def glued(self, slot):
        return slot._replace(row=DOWN if slot.row == UP else UP)

    def other_end(self, slot):
        arc_index, end = self.slot_arcs[slot]
        return self.arcs[arc_index].ends[1 - end]

    def arc_counts(self):
        return dict(Counter(arc.ref.type for arc in self.arcs))

    def to_dict(self):
        return {
            "family": "takahashi",
            "params": self.params.to_dict(),
            "disks": [
                {"row": row, "index": j, "slots": self.sizes[j - 1]} for row, j in self.disks
            ],
            "arcs": [
                {
                    "type": arc.ref.type,
                    "name": str(arc.ref),
                    "ends": [{"row": e.row, "index": e.index, "slot": e.position} for e in arc.ends],
                }
                for arc in self.arcs
            ],
        }

    def to_graph(self):
        graph = nx.MultiGraph(family="takahashi", params=str(self.params))
        for row, j in self.disks:
            graph.add_node(f"{row}{j}", row=row, index=j, slots=self.sizes[j - 1])
        for arc in self.arcs:
            tail, head = arc.ends
            graph.add_edge(
                f"{tail.row}{tail.index}",
                f"{head.row}{head.index}",
                type=arc.ref.type,
                name=str(arc.ref),
                tail_slot=tail.position,
                head_slot=head.position,
            )
        return graph


def build_diagram(t: TakahashiParams) -> TakahashiDiagram:
    """Lay out the arcs of T_n(p/q, r/s) on the ``4n`` disks.

    Slots of a handle are numbered in the order the curves ``e_1..e_{2n}``
    cross it, so the k-th crossing of handle ``j`` is slot ``k`` on both
    ``D_j^u`` and ``D_j^d``.

    Raises:
        InvariantError: if consecutive arcs do not meet on glued disks.
    """
    g = t.genus
    sizes = [0] * g
    arcs, starts = [], []
    for curve in itineraries(t):
        crossings = []
        for step, ref in enumerate(curve):
            (end_row, end_disk) = ref.endpoints()[1]
            (next_row, next_disk) = curve[(step + 1) % len(curve)].endpoints()[0]
            if end_disk != next_disk or end_row == next_row:
                raise InvariantError(f"{t}: {ref} does not lead into the next arc")
            crossings.append(Slot(end_row, end_disk, sizes[end_disk - 1]))
            sizes[end_disk - 1] += 1
        for step, ref in enumerate(curve):
            arrival = crossings[step - 1]
            start = arrival._replace(row=DOWN if arrival.row == UP else UP)
            arcs.append(TakArc(ref, (start, crossings[step])))
            if step == 0:
                starts.append(start)

    slot_arcs = {}
    for arc_index, arc in enumerate(arcs):
        for end, slot in enumerate(arc.ends):
            if slot in slot_arcs:
                raise InvariantError(f"slot {slot} of {t} carries two arcs")
            slot_arcs[slot] = (arc_index, end)
    if len(slot_arcs) != 2 * sum(sizes):
        raise InvariantError(f"{t}: {len(slot_arcs)} slots used, expected {2 * sum(sizes)}")
    return TakahashiDiagram(t, tuple(arcs), tuple(sizes), tuple(starts), slot_arcs)


@dataclass(frozen=True)
class TakCurveSystem:
    diagram: TakahashiDiagram
    curves: Tuple[Curve, ...]

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
            raise InvariantError(f"curve from {start} in {diag.params} does not close")


def extract_curves(diag: TakahashiDiagram) -> TakCurveSystem:
    """Trace ``e_1..e_{2n}`` from their base slots.

    Raises:
        InvariantError: if an arc is traversed twice or never.
    """
    used = [False] * len(diag.arcs)
    curves = []
    for start in diag.starts:
        curve = _walk(diag, start)
        for arc_index, _ in curve.steps:
            if used[arc_index]:
                raise InvariantError(f"arc {arc_index} of {diag.params} traversed twice")
            used[arc_index] = True
        curves.append(curve)
    if not all(used):
        raise InvariantError(f"arcs of {diag.params} left outside every curve")
    LOG.debug("%s: %d curves", diag.params, len(curves))
    return TakCurveSystem(diag, tuple(curves))


def tak_curve_arcs(curve: Curve, diag: TakahashiDiagram) -> List[TakArcRef]:
    return [
        diag.arcs[arc_index].ref if forward else diag.arcs[arc_index].ref.reversed()
        for arc_index, forward in curve.steps
    ]


def tak_curve_to_word(curve: Curve, diag: TakahashiDiagram, start=0, reverse=False) -> BraidWord:
    """Translate a curve into a reduced word of B_{2n,2}.

    Args:
        curve (Curve): a curve of ``diag``.
        diag (TakahashiDiagram): the diagram it was traced on.
        start (int): index of the first arc.
        reverse (bool): run the curve backwards.
    """
    refs = tak_curve_arcs(curve, diag)
    refs = refs[start:] + refs[:start]
    if reverse:
        refs = [ref.reversed() for ref in reversed(refs)]
    result = BraidWord.empty(WordContext(genus=diag.params.genus, strands=1))
    for ref in refs:
        result = concat(result, tak_dict_word(ref))
    return result


def tak_psl_set(t: TakahashiParams) -> List[BraidWord]:
    """The words ``ē_1..ē_{2n}`` of T_n(p/q, r/s)."""
    diag = build_diagram(t)
    system = extract_curves(diag)
    return [tak_curve_to_word(curve, diag) for curve in system.curves]
