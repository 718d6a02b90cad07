"""Interval helpers on top of mpmath.

Each computation gets its own interval context so that working precision is
never shared global state.
"""

import math
from decimal import Decimal
from fractions import Fraction

import mpmath
from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext

from .errors import PrecisionUnattainable

MIN_PRECISION_BITS = 24
MAX_PRECISION_BITS = 1 << 16


def interval_context(bits: int) -> MPIntervalContext:
    if not MIN_PRECISION_BITS <= bits <= MAX_PRECISION_BITS:
        raise PrecisionUnattainable(
            f"precision_bits={bits} outside [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}]"
        )
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


def real_context(bits: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if not man:
        if raw in (libmp.fzero,):
            return Fraction(0)
        raise PrecisionUnattainable("interval endpoint is not finite")
    value = Fraction(int(man)) * (Fraction(2) ** exp)
    return -value if sign else value


def endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval value."""
    lo, hi = x._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


def fraction_to_mpf(q: Fraction, bits: int, rounding: str = "n") -> mpmath.mpf:
    ctx = real_context(bits)
    return ctx.make_mpf(libmp.from_rational(q.numerator, q.denominator, bits, rounding))


def mpf_to_fraction(x) -> Fraction:
    if isinstance(x, (int, Fraction, Decimal)):
        return Fraction(x)
    return _raw_to_fraction(x._mpf_)


def decimal_up(q: Fraction, digits: int = 8) -> Decimal:
    """Smallest decimal with ``digits`` significant digits that is >= q (q >= 0)."""
    q = Fraction(q)
    if q <= 0:
        return Decimal(0)
    e = math.floor(math.log10(q.numerator) - math.log10(q.denominator))
    shift = digits - 1 - e
    scaled = q * Fraction(10) ** shift
    m = -((-scaled.numerator) // scaled.denominator)
    return Decimal(m).scaleb(-shift).normalize()


def decimal_digits(bits: int) -> int:
    """Significant digits that make an mpf of ``bits`` round-trip through text."""
    return int(math.ceil(bits * math.log10(2))) + 2


def mpf_str(x) -> str:
    return mpmath.nstr(x, decimal_digits(x.context.prec), strip_zeros=False, min_fixed=-4, max_fixed=20)


def parse_mpf(text: str, bits: int) -> mpmath.mpf:
    return real_context(bits).mpf(text)


def enclose(x, bits: int) -> tuple[mpmath.mpf, Decimal]:
    """Return ``(value, error_bound)`` with the interval inside value +/- error_bound.

    The value is the midpoint rounded to nearest; the error bound is an exact
    decimal rounded up.
    """
    lo, hi = endpoints(x)
    return centered(lo, hi, (lo + hi) / 2, bits)


def centered(lo: Fraction, hi: Fraction, center: Fraction, bits: int) -> tuple[mpmath.mpf, Decimal]:
    value = fraction_to_mpf(center, bits)
    v = mpf_to_fraction(value)
    return value, decimal_up(max(v - lo, hi - v, Fraction(0)))


def ball(ctx: MPIntervalContext, value, error_bound):
    """Interval [value - error_bound, value + error_bound] in ``ctx``."""
    v = mpf_to_fraction(value)
    e = mpf_to_fraction(error_bound)
    return ctx.mpf([_frac_mpf(v - e, ctx.prec, "d"), _frac_mpf(v + e, ctx.prec, "u")])


def _frac_mpf(q: Fraction, bits: int, rounding: str):
    return real_context(bits).make_mpf(libmp.from_rational(q.numerator, q.denominator, bits, rounding))


def exact_interval(ctx: MPIntervalContext, q: Fraction):
    """Tightest outward-rounded interval around a rational."""
    q = Fraction(q)
    return ctx.mpf([_frac_mpf(q, ctx.prec, "d"), _frac_mpf(q, ctx.prec, "u")])
