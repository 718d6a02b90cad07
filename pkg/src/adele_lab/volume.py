"""Covolumes of principal arithmetic subgroups of SL_n(D).

Exact pieces (discriminant powers, factorials, lambda factors) are big
rationals; only pi, square roots and the zeta values pass through interval
arithmetic.  Every result carries a rigorous error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

import mpmath

from . import _numerics
from .brauer import BrauerClass, division_algebra_degree, validate
from .errors import (
    DegenerateGroup,
    DegreeMismatch,
    InvalidInput,
    MissingFieldDiscriminant,
    MissingZeta,
    UndeterminedPrime,
)
from .fieldlab import NumberFieldSpec, SplitStatus, ZetaEstimate, splitting_type, zeta_partial

DEFAULT_PRECISION_BITS = 128


# ---------------------------------------------------------------------------
# lambda factors


def _lambda_closed(q: int, nd: int, d_v: int) -> int:
    if nd == d_v:
        return math.prod(q**i - 1 for i in range(1, nd))
    return math.prod(q**i - 1 for i in range(1, nd) if i % d_v)


def _lambda_quotient(q: int, nd: int, d_v: int) -> Fraction:
    n_v = nd // d_v
    num = math.prod(q ** (i + 1) - 1 for i in range(1, nd))
    den = math.prod(q ** (d_v * (i + 1)) - 1 for i in range(1, n_v)) * sum(q**i for i in range(d_v))
    return Fraction(num, den)


def lambda_factor(q: int, nd: int, d_v: int) -> Fraction:
    """Local factor at a ramified place with residue field of size ``q``.

    Computed from two independent expressions that must agree exactly.
    """
    if q < 2 or d_v < 2:
        raise InvalidInput("need q >= 2 and d_v >= 2")
    if nd % d_v:
        raise DegreeMismatch(f"d_v={d_v} does not divide nd={nd}")
    closed = Fraction(_lambda_closed(q, nd, d_v))
    quotient = _lambda_quotient(q, nd, d_v)
    if closed != quotient:
        raise RuntimeError(f"lambda forms disagree at q={q}, nd={nd}, d_v={d_v}: {closed} vs {quotient}")
    return closed


# ---------------------------------------------------------------------------
# inputs and results


@dataclass(frozen=True)
class RamDatum:
    q: int
    d_v: int

    def __post_init__(self):
        if self.q < 2 or self.d_v < 2:
            raise InvalidInput(f"bad ramification datum (q={self.q}, d_v={self.d_v})")

    def to_json(self) -> dict:
        return {"q": self.q, "d_v": self.d_v}


@dataclass(frozen=True)
class VolumeInput:
    field_degree: int
    abs_disc: int
    n: int
    d: int
    ram: tuple[RamDatum, ...] = ()
    zeta: tuple[ZetaEstimate, ...] = ()
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        object.__setattr__(self, "ram", tuple(r if isinstance(r, RamDatum) else RamDatum(*r) for r in self.ram))
        object.__setattr__(self, "zeta", tuple(sorted(self.zeta, key=lambda z: z.s)))
        if self.field_degree < 1 or self.abs_disc < 1 or self.n < 1 or self.d < 1:
            raise InvalidInput("field_degree, abs_disc, n and d must be positive")

    @property
    def nd(self) -> int:
        return self.n * self.d

    def to_json(self) -> dict:
        return {
            "field_degree": self.field_degree,
            "abs_disc": str(self.abs_disc),
            "n": self.n,
            "d": self.d,
            "ram": [r.to_json() for r in self.ram],
            "zeta": [z.to_json() for z in self.zeta],
            "precision_bits": self.precision_bits,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "VolumeInput":
        try:
            return cls(
                field_degree=int(doc["field_degree"]),
                abs_disc=int(doc["abs_disc"]),
                n=int(doc["n"]),
                d=int(doc["d"]),
                ram=tuple(RamDatum(int(r["q"]), int(r["d_v"])) for r in doc.get("ram", [])),
                zeta=tuple(ZetaEstimate.from_json(z) for z in doc.get("zeta", [])),
                precision_bits=int(doc.get("precision_bits", DEFAULT_PRECISION_BITS)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed volume input: {exc}") from exc


@dataclass(frozen=True)
class VolumeResult:
    value: mpmath.mpf
    error_bound: Decimal
    # (factor name, value, error bound)
    breakdown: tuple[tuple[str, mpmath.mpf, Decimal], ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "value": _numerics.mpf_str(self.value),
            "error_bound": str(self.error_bound),
            "breakdown": [
                {"factor": name, "value": _numerics.mpf_str(v), "error_bound": str(e)}
                for name, v, e in self.breakdown
            ],
        }

    def contains(self, q) -> bool:
        """True when the exact rational ``q`` lies within value +/- error_bound."""
        v = _numerics.mpf_to_fraction(self.value)
        return abs(Fraction(q) - v) <= Fraction(self.error_bound)


def _result(total, parts, bits: int) -> VolumeResult:
    value, err = _numerics.enclose(total, bits)
    breakdown = tuple((name,) + _numerics.enclose(x, bits) for name, x in parts)
    return VolumeResult(value, err, breakdown)


def _disc_power(ctx, abs_disc: int, twice_exponent: int):
    # |D|^(twice_exponent / 2) with the integer part kept exact
    whole = _numerics.exact_interval(ctx, Fraction(abs_disc ** (twice_exponent // 2)))
    if twice_exponent % 2:
        whole = whole * ctx.sqrt(_numerics.exact_interval(ctx, Fraction(abs_disc)))
    return whole


def _factorial_part(ctx, m: int, field_degree: int):
    """(prod_{i=1}^{m-1} i! / (2 pi)^(i+1))^[K:Q]."""
    facts = math.prod(math.factorial(i) for i in range(1, m))
    power = sum(i + 1 for i in range(1, m)) * field_degree
    return _numerics.exact_interval(ctx, Fraction(facts**field_degree)) / (2 * ctx.pi) ** power


def volume_sl_n_d(inp: VolumeInput) -> VolumeResult:
    m = inp.nd
    if m == 1:
        raise DegenerateGroup("nd = 1: SL_1(K) is trivial")
    for r in inp.ram:
        if m % r.d_v:
            raise DegreeMismatch(f"d_v={r.d_v} does not divide nd={m}")
    by_s = {z.s: z for z in inp.zeta}
    for s in range(2, m + 1):
        if s not in by_s:
            raise MissingZeta(f"zeta_K({s}) not supplied")
    ctx = _numerics.interval_context(inp.precision_bits)
    lam = math.prod((lambda_factor(r.q, m, r.d_v) for r in inp.ram), start=Fraction(1))
    parts = [
        ("disc_power", _disc_power(ctx, inp.abs_disc, m * m - 1)),
        ("archimedean", _factorial_part(ctx, m, inp.field_degree)),
        ("zeta_product", math.prod((by_s[s].interval(ctx) for s in range(2, m + 1)), start=ctx.mpf(1))),
        ("lambda_product", _numerics.exact_interval(ctx, lam)),
    ]
    total = math.prod((x for _, x in parts), start=ctx.mpf(1))
    return _result(total, parts, inp.precision_bits)


def covolume_cf(
    abs_disc: int, zeta2: ZetaEstimate, ext_degree: int, precision_bits: int | None = None
) -> VolumeResult:
    """|D|^(3/2) zeta_K(2) / (2^12 pi^7 ext_degree).

    The ext_degree division is applied to the exact interval endpoints, so
    results for two degrees differ by exactly their ratio whenever that ratio
    is a power of two.
    """
    if ext_degree < 1:
        raise InvalidInput("ext_degree must be >= 1")
    if zeta2.s != 2:
        raise MissingZeta("covolume needs zeta_K(2)")
    bits = precision_bits or zeta2.precision_bits
    ctx = _numerics.interval_context(bits)
    disc = _disc_power(ctx, abs_disc, 3)
    z = zeta2.interval(ctx)
    pi_part = 1 / (_numerics.exact_interval(ctx, Fraction(2**12)) * ctx.pi**7)
    base = disc * z * pi_part
    lo, hi = _numerics.endpoints(base)
    lo, hi = lo / ext_degree, hi / ext_degree
    value, err = _numerics.centered(lo, hi, (lo + hi) / 2, bits)
    parts = (
        ("disc_power", disc),
        ("zeta_product", z),
        ("pi_power", pi_part),
    )
    breakdown = tuple((name,) + _numerics.enclose(x, bits) for name, x in parts)
    breakdown += (("ext_degree", _numerics.fraction_to_mpf(Fraction(ext_degree), bits), Decimal(0)),)
    return VolumeResult(value, err, breakdown)


def exponent_product(d: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> tuple[mpmath.mpf, Decimal]:
    """prod_{i=1}^{d-1} i! / (2 pi)^(i+1), enclosed."""
    if d < 2:
        raise InvalidInput("d must be >= 2")
    ctx = _numerics.interval_context(precision_bits)
    return _numerics.enclose(_factorial_part(ctx, d, 1), precision_bits)


def exponent_product_interval(d: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> tuple[Fraction, Fraction]:
    ctx = _numerics.interval_context(precision_bits)
    return _numerics.endpoints(_factorial_part(ctx, d, 1))


# ---------------------------------------------------------------------------
# building inputs from field data


def ram_data(c: BrauerClass, K: NumberFieldSpec) -> list[RamDatum]:
    """(q_v, d_v) at the finite ramified places of a class over K."""
    out = []
    for place, value in c.invariants:
        if not place.is_finite or not value % 1:
            continue
        split = splitting_type(K, place.p)
        if split.status is SplitStatus.UNDETERMINED:
            raise UndeterminedPrime(place.p)
        if place.slot >= len(split.degrees):
            raise InvalidInput(f"{place} does not exist in {K.label}")
        out.append(RamDatum(place.p ** split.degrees[place.slot], value.denominator))
    return out


def volume_input_for(
    K: NumberFieldSpec,
    c: BrauerClass,
    n: int,
    zeta_bound: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> VolumeInput:
    if K.field_discriminant is None:
        raise MissingFieldDiscriminant(f"{K.label} has no field discriminant")
    problems = validate(c, K.signature)
    if problems:
        raise InvalidInput("; ".join(problems))
    d = division_algebra_degree(c)
    if n * d == 1:
        raise DegenerateGroup("nd = 1: SL_1(K) is trivial")
    zetas = tuple(zeta_partial(K, s, zeta_bound, precision_bits) for s in range(2, n * d + 1))
    return VolumeInput(
        field_degree=K.degree,
        abs_disc=abs(K.field_discriminant),
        n=n,
        d=d,
        ram=tuple(ram_data(c, K)),
        zeta=zetas,
        precision_bits=precision_bits,
    )
