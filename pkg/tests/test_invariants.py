from concurrent.futures import Future

from hypothesis import given, settings, strategies as st
import pytest
from sympy import Matrix

import platslide
from platslide.dunwoody import DunwoodyTuple, NotAdmissibleError, fibonacci, psl_set
from platslide.invariants import (
    GroupPresentation,
    HomologyResult,
    PresentationError,
    SCAN_WINDOW,
    h1_from_diagram,
    presentation_from_psl,
    relation_matrix,
    scan_admissible,
    smith_normal_form,
    surgery_matrix,
    takahashi_surgery_h1,
)
from platslide.takahashi import ParamsError, TakahashiParams, tak_psl_set
from platslide.words import BraidWord, GeneratorLetter, Kind, WordContext, concat, parse_word


def setup_function():
    platslide.reset()


def test_presentation_golden():
    words = psl_set(DunwoodyTuple(1, 1, 1, 3, 2, 1))
    presentation = presentation_from_psl(words, 3)
    assert presentation.relators[0] == ((3, -1), (1, 1), (3, 1), (1, -1))
    assert str(presentation).startswith("<x1, x2, x3 | x3^-1 x1 x3 x1^-1, ")
    assert relation_matrix(presentation) == [[0, 0, 0]] * 3


def test_presentation_fibonacci_relator():
    n = 5
    presentation = presentation_from_psl(psl_set(fibonacci(n)), n)
    for i, relator in enumerate(presentation.relators, start=1):
        expected = [(i, -1), ((i - 2) % n + 1, 1), (i, -1), (i % n + 1, 1), (i, -1)]
        assert list(relator) == expected


def test_presentation_merges_alpha_runs():
    word = parse_word("a1 b2 a1 b1^-1 a2", genus=2)
    presentation = presentation_from_psl([word], 2)
    assert str(presentation) == "<x1, x2 | x1^2 x2>"


def test_presentation_empty_relator():
    presentation = presentation_from_psl([parse_word("b1 b2", genus=2)], 2)
    assert str(presentation) == "<x1, x2 | 1>"
    assert relation_matrix(presentation) == [[0, 0]]


def test_presentation_errors():
    with pytest.raises(PresentationError):
        presentation_from_psl([parse_word("a1 s1", genus=2, strands=1)], 2)
    with pytest.raises(PresentationError):
        presentation_from_psl([parse_word("a1", genus=3)], 2)
    with pytest.raises(PresentationError):
        GroupPresentation(2, (((3, 1),),))


@pytest.mark.parametrize(
    "rows,expected",
    [
        ([[2, 0], [0, 3]], (1, 6)),
        ([[0, 0, 0]] * 3, (0, 0, 0)),
        ([[12, 6, 4], [3, 9, 6], [2, 16, 14]], (1, 10, 30)),
        ([[2, 0, 0], [0, 3, 0]], (1, 6)),
        ([[4], [6]], (2,)),
        ([[0, 2], [0, 0]], (2, 0)),
        ([], ()),
    ],
)
def test_smith_normal_form(rows, expected):
    assert smith_normal_form(rows) == expected


matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda size: st.lists(
        st.lists(st.integers(min_value=-6, max_value=6), min_size=size, max_size=size),
        min_size=size,
        max_size=size,
    )
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_normal_form_divides(rows):
    invariants = smith_normal_form(rows)
    nonzero = [d for d in invariants if d]
    assert list(invariants) == nonzero + [0] * (len(invariants) - len(nonzero))
    for x, y in zip(nonzero, nonzero[1:]):
        assert y % x == 0
    product = 1
    for d in invariants:
        product *= d
    assert product == abs(Matrix(rows).det())


@settings(max_examples=200, deadline=None)
@given(matrices, st.data())
def test_smith_normal_form_row_operations(rows, data):
    size = len(rows)
    i = data.draw(st.integers(min_value=0, max_value=size - 1))
    j = data.draw(st.integers(min_value=0, max_value=size - 1))
    factor = data.draw(st.integers(min_value=-3, max_value=3))
    swapped = list(rows)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert smith_normal_form(swapped) == smith_normal_form(rows)
    if i != j:
        added = [list(row) for row in rows]
        added[i] = [x + factor * y for x, y in zip(rows[i], rows[j])]
        assert smith_normal_form(added) == smith_normal_form(rows)


def naive_invariants(rows):
    """Invariant factors by plain gcd elimination on a copy of ``rows``."""
    a = [list(row) for row in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    found = []
    t = 0
    while t < min(m, n):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        pivot = a[t][t]
        cleared = True
        for i in range(t + 1, m):
            factor = a[i][t] // pivot
            a[i] = [x - factor * y for x, y in zip(a[i], a[t])]
            cleared = cleared and a[i][t] == 0
        for j in range(t + 1, n):
            factor = a[t][j] // pivot
            for row in a:
                row[j] -= factor * row[t]
            cleared = cleared and a[t][j] == 0
        if not cleared:
            continue
        stuck = [i for i in range(t + 1, m) if any(a[i][j] % pivot for j in range(t + 1, n))]
        if stuck:
            a[t] = [x + y for x, y in zip(a[t], a[stuck[0]])]
            continue
        found.append(abs(pivot))
        t += 1
    return tuple(found) + (0,) * (min(m, n) - len(found))


@pytest.mark.parametrize(
    "rows",
    [[[12, 6, 4], [3, 9, 6], [2, 16, 14]], [[2, 0, 0], [0, 3, 0]], [[4], [6]], [[0, 2], [0, 0]]],
)
def test_naive_invariants_examples(rows):
    assert naive_invariants(rows) == smith_normal_form(rows)


sides = st.integers(min_value=1, max_value=4)
rectangular = st.tuples(sides, sides).flatmap(
    lambda shape: st.lists(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=shape[1], max_size=shape[1]),
        min_size=shape[0],
        max_size=shape[0],
    )
)


@settings(max_examples=300, deadline=None)
@given(st.one_of(matrices, rectangular))
def test_smith_normal_form_matches_elimination(rows):
    assert smith_normal_form(rows) == naive_invariants(rows)


CONTEXT = WordContext(genus=3)
letters = st.builds(
    GeneratorLetter,
    st.sampled_from([Kind.ALPHA, Kind.BETA]),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=-2, max_value=2).filter(bool),
)
words = st.lists(letters, max_size=12).map(lambda ls: BraidWord(ls, CONTEXT))


def reduce_runs(runs):
    stack = []
    for index, exponent in runs:
        if stack and stack[-1][0] == index:
            exponent += stack.pop()[1]
        if exponent:
            stack.append((index, exponent))
    return tuple(stack)


@settings(max_examples=300, deadline=None)
@given(words, words)
def test_beta_deletion_is_multiplicative(u, v):
    joined = presentation_from_psl([concat(u, v)], 3).relators[0]
    parts = presentation_from_psl([u, v], 3).relators
    assert joined == reduce_runs(parts[0] + parts[1])


def test_homology_result_text():
    assert str(HomologyResult(0)) == "0"
    assert str(HomologyResult(1)) == "Z"
    assert str(HomologyResult(3)) == "Z^3"
    assert str(HomologyResult(0, (44,))) == "Z/44"
    assert str(HomologyResult(2, (2, 6))) == "Z^2 + Z/2 + Z/6"


@pytest.mark.parametrize("text", ["0", "Z", "Z^3", "Z/44", "Z^2 + Z/2 + Z/6"])
def test_homology_result_parse(text):
    assert str(HomologyResult.parse(text)) == text


@pytest.mark.parametrize("text", ["Q", "Z^", "Z/", "Z + "])
def test_homology_result_parse_errors(text):
    with pytest.raises(ValueError):
        HomologyResult.parse(text)


def test_homology_result_order():
    assert HomologyResult(0, (2, 4)).order() == 8
    assert HomologyResult(0).order() == 1
    assert HomologyResult(1, (2,)).order() is None
    assert HomologyResult(0, (5,)).to_dict() == {"free_rank": 0, "torsion": [5], "text": "Z/5"}


def test_from_matrix_drops_units():
    assert HomologyResult.from_matrix([[2, 0], [0, 3]], 2) == HomologyResult(0, (6,))
    assert HomologyResult.from_matrix([], 2) == HomologyResult(2)
    assert HomologyResult.from_matrix([[0, 0], [0, 5]], 2) == HomologyResult(1, (5,))


def test_h1_golden():
    assert h1_from_diagram(DunwoodyTuple(1, 1, 1, 3, 2, 1)) == HomologyResult(3)


@pytest.mark.parametrize("a", range(1, 6))
def test_h1_lens_family(a):
    assert h1_from_diagram(DunwoodyTuple(a, 0, 1, 2, 1, 0)).order() == 2 * a + 1


def test_h1_fibonacci():
    assert h1_from_diagram(fibonacci(2)) == HomologyResult(0, (5,))


@pytest.mark.parametrize(
    "source,genus",
    [
        (DunwoodyTuple(1, 1, 1, 3, 2, 1), 3),
        (DunwoodyTuple(3, 0, 1, 2, 1, 0), 2),
        (fibonacci(4), 4),
        (TakahashiParams(2, 1, 2, 2, 3), 4),
        (TakahashiParams(3, 3, 2, 4, 1), 6),
    ],
    ids=str,
)
def test_h1_survives_index_shift(source, genus):
    words = psl_set(source) if isinstance(source, DunwoodyTuple) else tak_psl_set(source)
    expected = h1_from_diagram(source)
    for k in range(1, genus):
        shifted = presentation_from_psl([word.shift(k) for word in words], genus)
        assert HomologyResult.from_matrix(relation_matrix(shifted), genus) == expected


def test_h1_not_admissible():
    with pytest.raises(NotAdmissibleError):
        h1_from_diagram(DunwoodyTuple(0, 0, 2, 1, 0, 0))


def test_h1_wrong_source():
    with pytest.raises(TypeError):
        h1_from_diagram((1, 1, 1, 3, 2, 1))


def test_h1_takahashi_golden():
    t = TakahashiParams(2, 1, 2, 2, 3)
    h1 = h1_from_diagram(t)
    assert h1.order() == 44
    assert h1 == takahashi_surgery_h1(t)


def test_surgery_matrix_golden():
    assert surgery_matrix(TakahashiParams(2, 1, 2, 2, 3)) == [
        [1, 2, 0, -2],
        [3, 2, -3, 0],
        [0, -2, 1, 2],
        [-3, 0, 3, 2],
    ]


@pytest.mark.parametrize("p,q,r,s", [(0, 1, 0, 1), (2, 3, 1, 2), (1, 0, 3, 4), (5, 2, 0, 1)])
def test_surgery_single_period(p, q, r, s):
    t = TakahashiParams(1, p, q, r, s)
    assert surgery_matrix(t) == [[p, 0], [0, r]]
    free = [v for v in (p, r) if v == 0]
    torsion = tuple(d for d in smith_normal_form([[p, 0], [0, r]]) if d > 1)
    assert takahashi_surgery_h1(t) == HomologyResult(len(free), torsion)


def test_surgery_trivial_coefficients():
    assert takahashi_surgery_h1(TakahashiParams(1, 0, 1, 0, 1)) == HomologyResult(2)
    assert h1_from_diagram(TakahashiParams(1, 0, 1, 0, 1)) == HomologyResult(2)
    assert h1_from_diagram(TakahashiParams(1, 1, 0, 0, 1)) == HomologyResult(1)


def _cross_grid():
    for n in (1, 2, 3):
        for p in range(5):
            for q in range(5):
                for r in range(5):
                    for s in range(5):
                        try:
                            t = TakahashiParams(n, p, q, r, s)
                        except ParamsError:
                            continue
                        yield t


@pytest.mark.parametrize("t", list(_cross_grid()), ids=str)
def test_diagram_agrees_with_surgery(t):
    assert h1_from_diagram(t) == takahashi_surgery_h1(t)


@pytest.mark.parametrize(
    "t",
    [
        TakahashiParams(2, 2, 1, 3, 1),
        TakahashiParams(2, 3, 2, 1, 0),
        TakahashiParams(3, 4, 3, 2, 1),
    ],
    ids=str,
)
def test_relabelling_keeps_homology(t):
    assert h1_from_diagram(t) == h1_from_diagram(t.relabelled())


def test_both_coefficients_greater_than_one():
    t = TakahashiParams(2, 2, 1, 3, 1)
    assert surgery_matrix(t) == [
        [2, 1, 0, -1],
        [1, 3, -1, 0],
        [0, -1, 2, 1],
        [-1, 0, 1, 3],
    ]
    assert h1_from_diagram(t) == takahashi_surgery_h1(t)
    assert h1_from_diagram(TakahashiParams(2, 1, 0, 1, 0)) == HomologyResult(0)


def test_scan_in_process():
    records = list(scan_admissible(1, 0, 1, 2, workers=1))
    tuples = [record.tuple for record in records]
    assert DunwoodyTuple(1, 0, 1, 2, 1, 0) in tuples
    for record in records:
        assert record.report.admissible
        assert record.h1 == h1_from_diagram(record.tuple)
    lens = records[tuples.index(DunwoodyTuple(1, 0, 1, 2, 1, 0))]
    assert lens.to_dict()["h1"] == "Z/3"


def test_scan_everything():
    records = list(scan_admissible(1, 1, 1, 1, workers=1, everything=True))
    assert len(records) == 16
    assert all((record.h1 is None) != bool(record.report) for record in records)


def finished(fn, t):
    future = Future()
    future.set_result(fn(t))
    return future


def test_scan_workers_capped(mocker):
    platslide.set("scan_workers", 2)
    pool = mocker.patch("platslide.invariants.ProcessPoolExecutor")
    pool.return_value.__enter__.return_value.submit.side_effect = finished
    records = list(scan_admissible(1, 0, 1, 2, workers=8))
    pool.assert_called_once_with(max_workers=2)
    assert records == list(scan_admissible(1, 0, 1, 2, workers=1))


def test_scan_submits_in_windows(mocker):
    platslide.set("scan_workers", 2)
    pool = mocker.patch("platslide.invariants.ProcessPoolExecutor")
    executor = pool.return_value.__enter__.return_value
    executor.submit.side_effect = finished
    records = scan_admissible(3, 3, 3, 4, workers=2, everything=True)
    first = next(records)
    assert first.tuple == DunwoodyTuple(0, 0, 1, 1, 0, 0)
    assert executor.submit.call_count == 2 * SCAN_WINDOW + 1
    next(records)
    assert executor.submit.call_count == 2 * SCAN_WINDOW + 2
    records.close()
    assert executor.submit.call_count == 2 * SCAN_WINDOW + 2
