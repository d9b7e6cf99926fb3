from fractions import Fraction

__all__ = [
    "InvariantError",
    "balanced_steps",
    "mod_index",
    "parse_fraction",
]


class InvariantError(RuntimeError):
    """Raised when an internal construction invariant does not hold.

    This always indicates a bug (for instance a slot labelling that does not
    produce a permutation), never bad user input.
    """


def mod_index(i, modulus):
    """Normalize an integer index into the range ``[1, modulus]``."""
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    return (i - 1) % modulus + 1


def parse_fraction(text):
    """Parse a surgery coefficient written as ``P/Q``.

    The fraction is kept unreduced so that ``gcd`` checks can be reported
    against what the user typed.

    Args:
        text (str): the coefficient, e.g. ``"2/3"``. A bare integer ``"P"``
            is read as ``P/1``.

    Returns:
        Tuple[int, int]: numerator and denominator.

    Raises:
        ValueError: if the text is not of the form ``P/Q`` with integers.
    """
    parts = text.strip().split("/")
    if len(parts) > 2 or not all(p.strip().lstrip("-").isdigit() for p in parts):
        raise ValueError(f'malformed coefficient "{text}", expected P/Q')
    num = int(parts[0])
    den = int(parts[1]) if len(parts) == 2 else 1
    return num, den


def balanced_steps(k, m):
    """Spread ``k`` marks as evenly as possible over ``m`` slots.

    Returns a list of ``m`` non-negative integers summing to ``k``; entry j is
    ``floor((j+1)k/m) - floor(jk/m)``. For ``k <= m`` this is the Christoffel
    pattern of slope ``k/m``.
    """
    if m <= 0:
        return []
    slope = Fraction(k, m)
    return [int((j + 1) * slope) - int(j * slope) for j in range(m)]
