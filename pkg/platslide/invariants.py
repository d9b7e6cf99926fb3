"""Group presentations and first homology of the generated manifolds.

The β curves are the standard meridians of the outer handlebody, so the
relator carried by a curve is its word with every β letter deleted and
``α_j`` renamed ``x_j``. H_1 is read off the Smith normal form of the
abelianized relators. For Takahashi manifolds an independent answer comes
from the linking matrix of the surgery description on the chain link.
"""
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import reduce
from itertools import islice
from math import gcd
import re
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as _sympy_snf
from sympy.polys.domains import ZZ

from . import context
from .dunwoody import AdmissibilityReport, DunwoodyTuple, is_admissible, psl_set
from .takahashi import TakahashiParams, tak_psl_set
from .words import BraidWord, Kind, free_reduce

import logging

LOG = logging.getLogger(__name__)

__all__ = [
    "GroupPresentation",
    "HomologyResult",
    "PresentationError",
    "ScanRecord",
    "h1_from_diagram",
    "presentation_from_psl",
    "relation_matrix",
    "scan_admissible",
    "smith_normal_form",
    "surgery_matrix",
    "takahashi_surgery_h1",
]

SCAN_WINDOW = 4  # tasks in flight per worker

Relator = Tuple[Tuple[int, int], ...]


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GroupPresentation:
    """Generators ``x_1..x_g`` and relators as ``(index, exponent)`` runs."""

    generators: int
    relators: Tuple[Relator, ...]

    def __post_init__(self):
        for relator in self.relators:
            for index, _ in relator:
                if not 1 <= index <= self.generators:
                    raise PresentationError(
                        f"relator letter x{index} outside x1..x{self.generators}"
                    )

    def __str__(self):
        gens = ", ".join(f"x{j}" for j in range(1, self.generators + 1))
        rels = ", ".join(_relator_text(r) for r in self.relators)
        return f"<{gens} | {rels}>"


def _relator_text(relator):
    if not relator:
        return "1"
    return " ".join(f"x{j}" if e == 1 else f"x{j}^{e}" for j, e in relator)


def _relator(word: BraidWord) -> Relator:
    if word.has_sigma:
        raise PresentationError(f"word {word} contains braid letters")
    reduced = free_reduce(word.letters_only([Kind.ALPHA]))
    return tuple((letter.index, letter.exponent) for letter in reduced)


def presentation_from_psl(words: Sequence[BraidWord], g: int) -> GroupPresentation:
    """Presentation of π_1 with one relator per curve word.

    Args:
        words (List[BraidWord]): the words ``ē_1..ē_m``.
        g (int): genus of the Heegaard surface.

    Raises:
        PresentationError: if a word has Sigma letters or another genus.
    """
    for word in words:
        if word.context.genus != g:
            raise PresentationError(f"word {word} has genus {word.context.genus}, expected {g}")
    return GroupPresentation(g, tuple(_relator(word) for word in words))


def relation_matrix(presentation: GroupPresentation) -> List[List[int]]:
    """Abelianized relators, one row per relator and one column per generator."""
    rows = []
    for relator in presentation.relators:
        row = [0] * presentation.generators
        for index, exponent in relator:
            row[index - 1] += exponent
        rows.append(row)
    return rows


def _divisibility_chain(values):
    values = list(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            x, y = values[i], values[j]
            if x and y % x:
                g = gcd(x, y)
                values[i], values[j] = g, x * y // g
    return values


def smith_normal_form(rows: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Invariant factors of an integer matrix.

    Returns:
        Tuple[int, ...]: ``min(rows, columns)`` non-negative integers
        ``d_1 | d_2 | ...``, with the zeros last.
    """
    rows = [list(row) for row in rows]
    if not rows or not rows[0]:
        return ()
    matrix = Matrix(rows)
    diagonal = _sympy_snf(matrix, domain=ZZ)
    size = min(matrix.shape)
    values = [abs(int(diagonal[k, k])) for k in range(size)]
    nonzero = sorted(v for v in values if v)
    return tuple(_divisibility_chain(nonzero)) + (0,) * (size - len(nonzero))


TERM_RE = re.compile(r"^Z(?:\^([0-9]+)|/([0-9]+))?$")


@dataclass(frozen=True)
class HomologyResult:
    """``Z^free_rank + Z/d_1 + ... + Z/d_k`` with ``d_1 | ... | d_k``."""

    free_rank: int
    torsion: Tuple[int, ...] = ()

    @classmethod
    def from_matrix(cls, rows, generators):
        """Cokernel of the map ``Z^relators -> Z^generators`` given by ``rows``."""
        invariants = smith_normal_form(rows) if rows else ()
        nonzero = [d for d in invariants if d]
        return cls(generators - len(nonzero), tuple(d for d in nonzero if d > 1))

    @classmethod
    def parse(cls, text):
        """Inverse of ``str``: ``"Z^2 + Z/3"``, ``"Z"`` or ``"0"``."""
        text = text.strip()
        if text == "0":
            return cls(0)
        free, torsion = 0, []
        for term in text.split("+"):
            match = TERM_RE.match(term.strip())
            if not match:
                raise ValueError(f'malformed homology term "{term.strip()}"')
            power, order = match.groups()
            if order is not None:
                torsion.append(int(order))
            else:
                free += int(power) if power is not None else 1
        return cls(free, tuple(torsion))

    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        return reduce(lambda x, y: x * y, self.torsion, 1)

    def to_dict(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion), "text": str(self)}

    def __str__(self):
        terms = []
        if self.free_rank == 1:
            terms.append("Z")
        elif self.free_rank:
            terms.append(f"Z^{self.free_rank}")
        terms += [f"Z/{d}" for d in self.torsion]
        return " + ".join(terms) if terms else "0"


def h1_from_diagram(source: Union[DunwoodyTuple, TakahashiParams]) -> HomologyResult:
    """H_1 of a Dunwoody or Takahashi manifold computed from its curve words.

    Raises:
        NotAdmissibleError: for a Dunwoody tuple that is not admissible.
    """
    if isinstance(source, DunwoodyTuple):
        words, genus = psl_set(source), source.n
    elif isinstance(source, TakahashiParams):
        words, genus = tak_psl_set(source), source.genus
    else:
        raise TypeError(f"expected DunwoodyTuple or TakahashiParams, got {type(source).__name__}")
    presentation = presentation_from_psl(words, genus)
    result = HomologyResult.from_matrix(relation_matrix(presentation), genus)
    LOG.info("H_1(%s) = %s", source, result)
    return result


def _clasp_sign(k):
    # components 2i-1 and 2i clasp positively, 2i and 2i+1 negatively
    return 1 if k % 2 == 1 else -1


def surgery_matrix(t: TakahashiParams) -> List[List[int]]:
    """Linking matrix of the surgery on the ``2n``-component chain link.

    Row ``k`` has the numerator of component ``k`` on the diagonal and its
    denominator times the clasp sign against each neighbour.
    """
    size = 2 * t.n
    rows = [[0] * size for _ in range(size)]
    for k in range(1, size + 1):
        num, den = (t.p, t.q) if k % 2 else (t.r, t.s)
        row = rows[k - 1]
        row[k - 1] += num
        row[k % size] += den * _clasp_sign(k)
        row[(k - 2) % size] += den * _clasp_sign(k - 1 if k > 1 else size)
    return rows


def takahashi_surgery_h1(t: TakahashiParams) -> HomologyResult:
    """H_1 of T_n(p/q, r/s) from its Dehn surgery description."""
    return HomologyResult.from_matrix(surgery_matrix(t), 2 * t.n)


@dataclass(frozen=True)
class ScanRecord:
    tuple: DunwoodyTuple
    report: AdmissibilityReport
    h1: Optional[HomologyResult]

    def to_dict(self):
        record = self.report.to_dict()
        record["h1"] = str(self.h1) if self.h1 is not None else None
        return record


def _scan_grid(a_max, b_max, c_max, n_max):
    for n in range(1, n_max + 1):
        for a in range(a_max + 1):
            for b in range(b_max + 1):
                for c in range(c_max + 1):
                    d = 2 * a + b + c
                    if d == 0:
                        continue
                    for r in range(d):
                        for s in range(n):
                            yield DunwoodyTuple(a, b, c, n, r, s)


def _evaluate(t):
    report = is_admissible(t)
    return ScanRecord(t, report, h1_from_diagram(t) if report else None)


def scan_admissible(
    a_max: int, b_max: int, c_max: int, n_max: int, workers: int = None, everything=False
) -> Iterator[ScanRecord]:
    """Evaluate every tuple with ``a, b, c, n`` up to the given bounds.

    Records come out in grid order (``n``, then ``a, b, c, r, s``) whatever
    the number of workers. At most ``SCAN_WINDOW`` tuples per worker are
    submitted ahead of the consumer, so closing the iterator early leaves
    little work behind.

    Args:
        workers (int): size of the process pool; capped by the
            ``scan_workers`` option, which is also the default.
        everything (bool): yield inadmissible tuples too.
    """
    limit = context.get("scan_workers")
    workers = limit if workers is None else max(1, min(workers, limit))
    grid = _scan_grid(a_max, b_max, c_max, n_max)
    LOG.info("Scanning up to (%d,%d,%d,%d) on %d workers", a_max, b_max, c_max, n_max, workers)
    if workers == 1:
        records = map(_evaluate, grid)
        for record in records:
            if everything or record.h1 is not None:
                yield record
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        window = islice(grid, workers * SCAN_WINDOW)
        pending = deque(pool.submit(_evaluate, t) for t in window)
        try:
            while pending:
                record = pending.popleft().result()
                pending.extend(pool.submit(_evaluate, t) for t in islice(grid, 1))
                if everything or record.h1 is not None:
                    yield record
        finally:
            for future in pending:
                future.cancel()
