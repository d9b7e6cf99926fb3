"""Words in the surface braid group B_{g,2n} and the plat-slide move engine.

A word is a finite sequence of generator letters ``σ_i``, ``α_j`` and ``β_j``
carrying run-length exponents. Equality of words is free equality: no
relation of the surface braid group is ever applied, adjacent letters with the
same generator are merged and letters with exponent zero are dropped.
"""
from dataclasses import dataclass
import enum
import re
from typing import Iterable, List, Optional, Sequence, Tuple

from .util import mod_index

import logging

LOG = logging.getLogger(__name__)

__all__ = [
    "BraidWord",
    "Direction",
    "GeneratorLetter",
    "Kind",
    "Move",
    "MoveError",
    "MoveSpec",
    "Side",
    "WordContext",
    "WordError",
    "apply_move",
    "apply_moves",
    "commutator",
    "concat",
    "cyclic_reduce",
    "exponent_vector",
    "free_reduce",
    "invert",
    "parse_word",
    "serialize_word",
    "stabilize_Tk",
    "word_from_dict",
    "word_to_dict",
]

EMPTY_WORD = "1"
TOKEN_RE = re.compile(r"^([abs])([1-9][0-9]*)(?:\^(-?[1-9][0-9]*))?$")


class WordError(ValueError):
    """Raised for malformed letters, words or mismatched contexts."""


class MoveError(ValueError):
    """Raised when a move cannot be applied to a word."""


class Kind(enum.Enum):
    SIGMA = "s"
    ALPHA = "a"
    BETA = "b"


@dataclass(frozen=True)
class GeneratorLetter:
    kind: Kind
    index: int
    exponent: int = 1

    def __post_init__(self):
        if self.exponent == 0:
            raise WordError(f"letter {self.kind.value}{self.index} has exponent 0")
        if self.index < 1:
            raise WordError(f"letter index must be positive, got {self.index}")

    @property
    def generator(self):
        return (self.kind, self.index)

    def inverse(self):
        return GeneratorLetter(self.kind, self.index, -self.exponent)

    def __str__(self):
        token = f"{self.kind.value}{self.index}"
        return token if self.exponent == 1 else f"{token}^{self.exponent}"


@dataclass(frozen=True)
class WordContext:
    """Ambient group B_{g,2n}: genus ``g`` and half strand count ``n``."""

    genus: int
    strands: int = 1

    def __post_init__(self):
        if self.genus < 1:
            raise WordError(f"genus must be positive, got {self.genus}")
        if self.strands < 1:
            raise WordError(f"strand pairs must be positive, got {self.strands}")

    @property
    def max_sigma(self):
        return 2 * self.strands - 1

    def normalize(self, letter):
        """Bring a letter into this context.

        Alpha and Beta indices are taken mod ``g`` into ``[1, g]``; Sigma
        indices are checked against ``[1, 2n-1]``.
        """
        if letter.kind is Kind.SIGMA:
            if not 1 <= letter.index <= self.max_sigma:
                raise WordError(
                    f"s{letter.index} out of range for {2 * self.strands} strands"
                )
            return letter
        index = mod_index(letter.index, self.genus)
        if index == letter.index:
            return letter
        return GeneratorLetter(letter.kind, index, letter.exponent)


class BraidWord(object):
    """An immutable word over the generators of B_{g,2n}.

    The letters are stored as given (after index normalization); use
    :func:`free_reduce` to obtain the reduced form. Arithmetic operators
    always return reduced words.

    Example::

        w = parse_word("b1 b2 a3^-1", genus=3)
        assert str(w * ~w) == "1"
    """

    __slots__ = ("context", "letters")

    def __init__(self, letters: Iterable[GeneratorLetter], context: WordContext):
        object.__setattr__(self, "context", context)
        object.__setattr__(
            self, "letters", tuple(context.normalize(letter) for letter in letters)
        )

    def __setattr__(self, name, value):
        raise AttributeError("BraidWord is immutable")

    @classmethod
    def empty(cls, context):
        return cls((), context)

    @classmethod
    def of(cls, context, *specs):
        """Build a word from ``(kind, index, exponent)`` triples."""
        return cls(
            (GeneratorLetter(Kind(kind), index, exponent) for kind, index, exponent in specs),
            context,
        )

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        if not isinstance(other, BraidWord):
            return NotImplemented
        return self.context == other.context and self.letters == other.letters

    def __hash__(self):
        return hash((self.context, self.letters))

    def __repr__(self):
        return (
            f"BraidWord({serialize_word(self)!r}, genus={self.context.genus}, "
            f"strands={self.context.strands})"
        )

    def __str__(self):
        return serialize_word(self)

    def __mul__(self, other):
        return concat(self, other)

    def __invert__(self):
        return invert(self)

    def __pow__(self, power):
        if power < 0:
            return invert(self) ** -power
        result = BraidWord.empty(self.context)
        for _ in range(power):
            result = concat(result, self)
        return result

    @property
    def has_sigma(self):
        return any(letter.kind is Kind.SIGMA for letter in self.letters)

    def is_reduced(self):
        for left, right in zip(self.letters, self.letters[1:]):
            if left.generator == right.generator:
                return False
        return True

    def shift(self, k):
        """Add ``k`` to every Alpha/Beta index (mod g)."""
        return BraidWord(
            (
                letter
                if letter.kind is Kind.SIGMA
                else GeneratorLetter(letter.kind, letter.index + k, letter.exponent)
                for letter in self.letters
            ),
            self.context,
        )

    def letters_only(self, kinds):
        kinds = set(kinds)
        return BraidWord((l for l in self.letters if l.kind in kinds), self.context)

    def in_context(self, context):
        return BraidWord(self.letters, context)

    def is_cyclic_conjugate(self, other):
        """Whether two words agree up to cyclic rotation after cyclic reduction."""
        mine = cyclic_reduce(self).letters
        theirs = cyclic_reduce(other).letters
        if len(mine) != len(theirs):
            return False
        if not mine:
            return True
        doubled = mine + mine
        return any(
            doubled[start : start + len(theirs)] == theirs for start in range(len(mine))
        )


def _reduce_letters(letters: Iterable[GeneratorLetter]) -> List[GeneratorLetter]:
    stack: List[GeneratorLetter] = []
    for letter in letters:
        if stack and stack[-1].generator == letter.generator:
            exponent = stack[-1].exponent + letter.exponent
            stack.pop()
            if exponent:
                stack.append(GeneratorLetter(letter.kind, letter.index, exponent))
        else:
            stack.append(letter)
    return stack


def free_reduce(w: BraidWord) -> BraidWord:
    """Return the freely reduced form of ``w``.

    Adjacent letters on the same generator are merged and letters whose
    exponent becomes zero are removed. The result is unique and
    ``free_reduce`` is idempotent.
    """
    return BraidWord(_reduce_letters(w.letters), w.context)


def concat(u: BraidWord, v: BraidWord) -> BraidWord:
    """Reduced product ``u·v``.

    Raises:
        WordError: if the words live in different contexts.
    """
    if u.context != v.context:
        raise WordError(
            f"cannot multiply words of contexts {u.context} and {v.context}"
        )
    return BraidWord(_reduce_letters(u.letters + v.letters), u.context)


def invert(w: BraidWord) -> BraidWord:
    return BraidWord((letter.inverse() for letter in reversed(w.letters)), w.context)


def cyclic_reduce(w: BraidWord) -> BraidWord:
    """Reduce ``w`` and strip letters cancelling between its two ends."""
    letters = _reduce_letters(w.letters)
    while len(letters) > 1 and letters[0].generator == letters[-1].generator:
        first, last = letters[0], letters[-1]
        exponent = first.exponent + last.exponent
        middle = letters[1:-1]
        letters = ([GeneratorLetter(first.kind, first.index, exponent)] if exponent else []) + middle
        letters = _reduce_letters(letters)
    return BraidWord(letters, w.context)


def commutator(x: BraidWord, y: BraidWord) -> BraidWord:
    """``[x, y] = x^-1 y^-1 x y``."""
    return concat(concat(invert(x), invert(y)), concat(x, y))


def exponent_vector(w: BraidWord, strict=False) -> Tuple[int, ...]:
    """Abelianize ``w`` over ``α_1..α_g, β_1..β_g``.

    Component ``j-1`` is the total exponent of ``α_j`` and component
    ``g+j-1`` that of ``β_j``. Sigma letters are ignored.

    Raises:
        WordError: if ``strict`` and the word contains Sigma letters.
    """
    g = w.context.genus
    vector = [0] * (2 * g)
    for letter in w.letters:
        if letter.kind is Kind.ALPHA:
            vector[letter.index - 1] += letter.exponent
        elif letter.kind is Kind.BETA:
            vector[g + letter.index - 1] += letter.exponent
        elif strict:
            raise WordError(f"word {w} contains braid letter {letter}")
    if w.has_sigma:
        LOG.debug("Sigma letters ignored in exponent vector of %s", w)
    return tuple(vector)


def serialize_word(w: BraidWord) -> str:
    """Text form of a word: space separated tokens, ``1`` for the empty word."""
    if not w.letters:
        return EMPTY_WORD
    return " ".join(str(letter) for letter in w.letters)


def parse_word(text: str, genus: int, strands: int = 1) -> BraidWord:
    """Parse the text form of a word.

    Args:
        text (str): tokens ``a<j>``, ``b<j>`` or ``s<i>``, each optionally
            followed by ``^<exponent>``, separated by single spaces. ``1``
            denotes the empty word.
        genus (int): genus ``g`` of the ambient surface.
        strands (int): half the number of strands.

    Returns:
        BraidWord: the parsed (not reduced) word.

    Raises:
        WordError: naming the offending token and its 1-based position.
    """
    context = WordContext(genus, strands)
    if text == EMPTY_WORD:
        return BraidWord.empty(context)
    letters = []
    for position, token in enumerate(text.split(" "), start=1):
        match = TOKEN_RE.match(token)
        if not match:
            raise WordError(f'malformed token "{token}" at position {position}')
        kind, index, exponent = match.groups()
        letter = GeneratorLetter(Kind(kind), int(index), int(exponent or 1))
        try:
            letters.append(context.normalize(letter))
        except WordError as exc:
            raise WordError(f'token "{token}" at position {position}: {exc}') from exc
    return BraidWord(letters, context)


def word_to_dict(w: BraidWord) -> dict:
    return {
        "genus": w.context.genus,
        "strands": w.context.strands,
        "letters": [
            {"kind": l.kind.value, "index": l.index, "exponent": l.exponent}
            for l in w.letters
        ],
    }


def word_from_dict(data: dict) -> BraidWord:
    try:
        context = WordContext(int(data["genus"]), int(data.get("strands", 1)))
        letters = [
            GeneratorLetter(Kind(l["kind"]), int(l["index"]), int(l["exponent"]))
            for l in data["letters"]
        ]
    except (KeyError, TypeError) as exc:
        raise WordError(f"malformed structured word: {exc}") from exc
    return BraidWord(letters, context)


class Move(enum.Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M4 = "M4"
    M5 = "M5"
    M6 = "M6"
    PSL_STAR = "PslStar"
    PSL = "Psl"


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class Direction(enum.Enum):
    APPLY = "apply"
    INVERT = "invert"


SIDED_MOVES = {Move.M1, Move.M2, Move.M3, Move.M4, Move.M5}


@dataclass(frozen=True)
class MoveSpec:
    """One plat-slide move.

    ``parameter`` is the ``i`` of M2, the ``j`` of M4/M5, the ``k`` of M6
    and the index of the psl word for PslStar/Psl. PslStar always acts on the
    right and Psl on the left, so ``side`` only matters for M1..M5.
    """

    move: Move
    side: Side = Side.RIGHT
    parameter: int = 1
    direction: Direction = Direction.APPLY

    @classmethod
    def parse(cls, text):
        """Parse ``MOVE[:side][:parameter][:invert]``, e.g. ``M4:left:2``."""
        parts = text.split(":")
        try:
            move = Move(parts[0])
        except ValueError:
            raise MoveError(f'unknown move "{parts[0]}"') from None
        side, parameter, direction = Side.RIGHT, 1, Direction.APPLY
        for part in parts[1:]:
            if part in ("left", "right"):
                side = Side(part)
            elif part == "invert":
                direction = Direction.INVERT
            elif part.isdigit():
                parameter = int(part)
            else:
                raise MoveError(f'malformed move field "{part}" in "{text}"')
        return cls(move, side, parameter, direction)

    def inverted(self):
        other = Direction.APPLY if self.direction is Direction.INVERT else Direction.INVERT
        return MoveSpec(self.move, self.side, self.parameter, other)

    def __str__(self):
        fields = [self.move.value]
        if self.move in SIDED_MOVES:
            fields.append(self.side.value)
        if self.move not in (Move.M1, Move.M3):
            fields.append(str(self.parameter))
        if self.direction is Direction.INVERT:
            fields.append("invert")
        return ":".join(fields)


def _sigma(context, *pairs):
    return BraidWord.of(context, *((Kind.SIGMA.value, i, e) for i, e in pairs))


def _move_word(spec: MoveSpec, context: WordContext, psl_words) -> BraidWord:
    g, n, p = context.genus, context.strands, spec.parameter
    if spec.move is Move.M1:
        return _sigma(context, (1, 1))
    if spec.move is Move.M2:
        if not 1 <= p <= n - 1:
            raise MoveError(f"M2 needs 1 <= i <= {n - 1}, got {p}")
        return _sigma(context, (2 * p, 1), (2 * p + 1, 1), (2 * p - 1, 1), (2 * p, 1))
    if spec.move is Move.M3:
        if n < 2:
            raise MoveError("M3 needs at least 4 strands")
        return _sigma(context, (2, 1), (1, 2), (2, 1))
    if spec.move in (Move.M4, Move.M5, Move.PSL_STAR, Move.PSL):
        if not 1 <= p <= g:
            raise MoveError(f"{spec.move.value} needs 1 <= j <= {g}, got {p}")
    if spec.move in (Move.M4, Move.M5):
        kind = Kind.ALPHA if spec.move is Move.M4 else Kind.BETA
        return BraidWord.of(
            context, (kind.value, p, 1), ("s", 1, -1), (kind.value, p, 1), ("s", 1, -1)
        )
    if spec.move is Move.PSL_STAR:
        return BraidWord.of(context, ("b", p, 1))
    if not psl_words:
        raise MoveError("Psl move needs the psl words of the diagram")
    if p > len(psl_words):
        raise MoveError(f"no psl word {p}, only {len(psl_words)} given")
    word = psl_words[p - 1]
    if word.has_sigma:
        raise MoveError(f"psl word {p} contains braid letters: {word}")
    if word.context.genus != g:
        raise MoveError(f"psl word {p} has genus {word.context.genus}, expected {g}")
    return word.in_context(context)


def stabilize_Tk(w: BraidWord, k: int) -> BraidWord:
    """Apply the stabilization ``T_k: B_{g,2n} -> B_{g,2n+2}`` letterwise.

    Alpha and Beta letters are fixed, ``σ_i`` with ``i < 2k`` is fixed,
    ``σ_{2k}`` goes to ``σ_{2k}σ_{2k+1}σ_{2k+2}σ_{2k+1}^-1σ_{2k}^-1`` and
    ``σ_i`` with ``i > 2k`` to ``σ_{i+2}``.

    Raises:
        MoveError: unless ``1 <= k`` and ``2k <= 2n``.
    """
    n = w.context.strands
    if not 1 <= k <= n:
        raise MoveError(f"T_k needs 1 <= k <= {n}, got {k}")
    target = WordContext(w.context.genus, n + 1)
    image = []
    for letter in w.letters:
        if letter.kind is not Kind.SIGMA or letter.index < 2 * k:
            image.append(letter)
        elif letter.index == 2 * k:
            image.extend(
                [
                    GeneratorLetter(Kind.SIGMA, 2 * k, 1),
                    GeneratorLetter(Kind.SIGMA, 2 * k + 1, 1),
                    GeneratorLetter(Kind.SIGMA, 2 * k + 2, letter.exponent),
                    GeneratorLetter(Kind.SIGMA, 2 * k + 1, -1),
                    GeneratorLetter(Kind.SIGMA, 2 * k, -1),
                ]
            )
        else:
            image.append(GeneratorLetter(Kind.SIGMA, letter.index + 2, letter.exponent))
    return BraidWord(_reduce_letters(image), target)


def _destabilize(w: BraidWord, k: int) -> BraidWord:
    n = w.context.strands
    if n < 2 or not 1 <= k <= n - 1:
        raise MoveError(f"inverse M6 with k={k} is undefined on {2 * n} strands")
    body = concat(w, _sigma(w.context, (2 * k, -1))).letters
    target = WordContext(w.context.genus, n - 1)
    preimage, pos = [], 0
    while pos < len(body):
        letter = body[pos]
        if letter.kind is not Kind.SIGMA or letter.index < 2 * k:
            preimage.append(letter)
            pos += 1
        elif letter.index > 2 * k + 2:
            preimage.append(GeneratorLetter(Kind.SIGMA, letter.index - 2, letter.exponent))
            pos += 1
        else:
            block = body[pos : pos + 5]
            shape = [(l.kind, l.index, l.exponent) for l in block[:2] + block[3:]]
            expected = [
                (Kind.SIGMA, 2 * k, 1),
                (Kind.SIGMA, 2 * k + 1, 1),
                (Kind.SIGMA, 2 * k + 1, -1),
                (Kind.SIGMA, 2 * k, -1),
            ]
            if len(block) < 5 or shape != expected or block[2].generator != (
                Kind.SIGMA,
                2 * k + 2,
            ):
                raise MoveError(
                    f"word {w} is not of the form T_{k}(u)·s{2 * k} at letter {pos + 1}"
                )
            preimage.append(GeneratorLetter(Kind.SIGMA, 2 * k, block[2].exponent))
            pos += 5
    return BraidWord(_reduce_letters(preimage), target)


def apply_move(
    w: BraidWord, m: MoveSpec, psl_words: Optional[Sequence[BraidWord]] = None
) -> BraidWord:
    """Apply one plat-slide move to ``w``.

    Args:
        w (BraidWord): the braid word.
        m (MoveSpec): the move; ``direction=INVERT`` undoes the move.
        psl_words (List[BraidWord]): the representatives ``d̄_1..d̄_g`` used
            by ``Psl`` moves.

    Returns:
        BraidWord: the reduced word after the move. M6 changes the context
        from ``(g, n)`` to ``(g, n+1)`` (or back when inverted).

    Raises:
        MoveError: if the move parameter is out of range, Psl data is missing,
            or an inverse M6 is applied to a word outside the image of T_k.
    """
    if m.move is Move.M6:
        if m.direction is Direction.INVERT:
            return _destabilize(w, m.parameter)
        stabilized = stabilize_Tk(w, m.parameter)
        return concat(stabilized, _sigma(stabilized.context, (2 * m.parameter, 1)))

    factor = _move_word(m, w.context, psl_words)
    if m.direction is Direction.INVERT:
        factor = invert(factor)
    if m.move is Move.PSL_STAR:
        side = Side.RIGHT
    elif m.move is Move.PSL:
        side = Side.LEFT
    else:
        side = m.side
    LOG.debug("Applying %s to %s", m, w)
    return concat(factor, w) if side is Side.LEFT else concat(w, factor)


def apply_moves(w, specs, psl_words=None):
    for spec in specs:
        w = apply_move(w, spec, psl_words)
    return w
