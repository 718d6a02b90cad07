"""Number fields seen through their local data.

A field is given by a monic irreducible integer polynomial.  At a prime ``p``
not dividing the polynomial discriminant, the places of the field over ``p``
correspond to the irreducible factors of the polynomial mod ``p`` and the
residue degrees are the factor degrees.  At the remaining primes the local
data (pairs ``(e, f)``) must be supplied by the caller, otherwise the prime is
reported as undetermined.

Polynomials are coefficient lists ordered from the constant term up to the
leading coefficient.
"""

from __future__ import annotations

import functools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_ddf_zassenhaus,
    gf_factor,
    gf_from_int_poly,
    gf_monic,
    gf_sqf_list,
)

from . import _numerics, _sweep
from .errors import (
    CompositeModulus,
    InvalidFieldSpec,
    InvalidInput,
    NonSquarefree,
    ReducibleMinpoly,
)

IRREDUCIBILITY_PRIME_LIMIT = 200
SIEVE_PRIME_COUNT = 25


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """A place of a number field.

    Finite places are ``(p, slot)`` where ``slot`` is the position in the
    ascending residue-degree ordering of the places over ``p``.  Archimedean
    places are ``("real" | "complex", index)``.
    """

    kind: str
    p: int = 0
    index: int = 0

    @classmethod
    def finite(cls, p: int, slot: int = 0) -> "Place":
        return cls("finite", p, slot)

    @classmethod
    def real(cls, index: int = 0) -> "Place":
        return cls("real", 0, index)

    @classmethod
    def complex(cls, index: int = 0) -> "Place":
        return cls("complex", 0, index)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def slot(self) -> int:
        return self.index

    def sort_key(self):
        return ({"finite": 0, "real": 1, "complex": 2}[self.kind], self.p, self.index)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.is_finite:
            return f"{self.p}.{self.index}"
        return f"{self.kind}{self.index}"

    def to_json(self) -> dict:
        if self.is_finite:
            return {"p": self.p, "slot": self.index}
        return {"arch": self.kind, "index": self.index}

    @classmethod
    def from_json(cls, doc: dict) -> "Place":
        try:
            if "arch" in doc:
                if doc["arch"] not in ("real", "complex"):
                    raise InvalidInput(f"unknown archimedean type {doc['arch']!r}")
                return cls(doc["arch"], 0, int(doc["index"]))
            return cls.finite(int(doc["p"]), int(doc["slot"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed place {doc!r}") from exc


# ---------------------------------------------------------------------------
# polynomial plumbing


def _strip(coeffs: Sequence[int]) -> list[int]:
    out = [int(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return out


def _check_prime(p: int) -> None:
    if p < 2 or not sympy.isprime(p):
        raise CompositeModulus(f"{p} is not prime")


def _reduce_mod(minpoly: Sequence[int], p: int) -> list[int]:
    g = gf_from_int_poly(list(reversed(_strip(minpoly))), p)
    if not g:
        raise InvalidInput(f"polynomial vanishes mod {p}")
    return gf_monic(g, p, ZZ)[1]


def factor_mod_p(minpoly: Sequence[int], p: int) -> Counter:
    """Degrees of the irreducible factors of ``minpoly`` mod ``p``.

    Returns a Counter ``{degree: count}`` where repeated factors are counted
    with their multiplicity, so ``sum(d * c) == deg(minpoly mod p)``.
    """
    _check_prime(p)
    g = _reduce_mod(minpoly, p)
    degrees: Counter = Counter()
    for part, mult in gf_sqf_list(g, p, ZZ)[1]:
        for block, d in gf_ddf_zassenhaus(part, p, ZZ):
            degrees[d] += mult * ((len(block) - 1) // d)
    return degrees


def irreducible_factors_mod_p(minpoly: Sequence[int], p: int) -> list[tuple[tuple[int, ...], int]]:
    """Monic irreducible factors mod ``p`` with multiplicities, canonically ordered.

    Factors are returned constant-term first, sorted by degree and then
    lexicographically on the coefficient list.
    """
    _check_prime(p)
    g = _reduce_mod(minpoly, p)
    _, factors = gf_factor(g, p, ZZ)
    out = [(tuple(int(c) for c in reversed(f)), int(m)) for f, m in factors]
    return sorted(out, key=lambda fm: (len(fm[0]), fm[0]))


def poly_discriminant(minpoly: Sequence[int]) -> int:
    coeffs = _strip(minpoly)
    if len(coeffs) < 2:
        raise InvalidInput("discriminant needs degree >= 1")
    if len(coeffs) == 2:
        return 1
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain="ZZ")
    return int(poly.discriminant())


def _frac_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and any(a):
        q = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def sturm_sequence(coeffs: Sequence[int]) -> list[list[Fraction]]:
    f = [Fraction(c) for c in _strip(coeffs)]
    seq = [f, [i * c for i, c in enumerate(f)][1:]]
    while len(seq[-1]) > 1:
        r = _frac_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(signs: Iterable[int]) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def signature(minpoly: Sequence[int]) -> tuple[int, int]:
    """``(r1, r2)`` from a Sturm count of the real roots."""
    coeffs = _strip(minpoly)
    n = len(coeffs) - 1
    if n < 1:
        raise InvalidInput("signature needs degree >= 1")
    if n == 1:
        return (1, 0)
    seq = sturm_sequence(coeffs)
    if len(seq[-1]) > 1:
        raise NonSquarefree("gcd(f, f') is nonconstant")
    at_pos = [1 if q[-1] > 0 else -1 for q in seq]
    at_neg = [s * (-1) ** (len(q) - 1) for s, q in zip(at_pos, seq)]
    r1 = _sign_changes(at_neg) - _sign_changes(at_pos)
    return r1, (n - r1) // 2


# ---------------------------------------------------------------------------
# fields


def _irreducibility_diagnostic(coeffs: tuple[int, ...]) -> str | None:
    """Return None if the polynomial is irreducible over Q, else a reason."""
    n = len(coeffs) - 1
    if n == 1:
        return None
    disc = poly_discriminant(coeffs)
    if disc == 0:
        return "polynomial is not squarefree"
    possible = set(range(1, n))
    sieved = 0
    for p in sympy.primerange(2, 10**6):
        if disc % p == 0:
            continue
        degrees = factor_mod_p(coeffs, p)
        if p <= IRREDUCIBILITY_PRIME_LIMIT and degrees == Counter({n: 1}):
            return None
        sums = {0}
        for d, c in degrees.items():
            for _ in range(c):
                sums |= {s + d for s in sums}
        possible &= sums
        if not possible:
            return None
        sieved += 1
        if sieved >= SIEVE_PRIME_COUNT and p > IRREDUCIBILITY_PRIME_LIMIT:
            break
    # mod-p evidence is inconclusive (e.g. x^4 + 1); settle it exactly
    x = sympy.Symbol("x")
    _, parts = sympy.factor_list(sympy.Poly(list(reversed(coeffs)), x, domain="ZZ"))
    if len(parts) == 1 and parts[0][1] == 1:
        return None
    degs = sorted(f.degree() for f, m in parts for _ in range(m))
    return f"factors over Q with degrees {degs}"


@functools.lru_cache(maxsize=256)
def _checked_irreducible(coeffs: tuple[int, ...]) -> str | None:
    return _irreducibility_diagnostic(coeffs)


@dataclass(frozen=True)
class NumberFieldSpec:
    label: str
    minpoly: tuple[int, ...]
    field_discriminant: int | None = None
    # ((p, ((e, f), ...)), ...) sorted by p
    ramified: tuple[tuple[int, tuple[tuple[int, int], ...]], ...] = field(default=())

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.minpoly)
        object.__setattr__(self, "minpoly", coeffs)
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise InvalidFieldSpec(f"{self.label}: minpoly must be monic of degree >= 1")
        ram = self.ramified
        if isinstance(ram, dict):
            ram = ram.items()
        ram = tuple(sorted((int(p), tuple((int(e), int(f)) for e, f in ef)) for p, ef in ram))
        object.__setattr__(self, "ramified", ram)
        for p, ef in ram:
            if not ef or any(e < 1 or f < 1 for e, f in ef):
                raise InvalidFieldSpec(f"{self.label}: bad (e, f) data at p={p}")
            if sum(e * f for e, f in ef) != self.degree:
                raise InvalidFieldSpec(f"{self.label}: sum of e*f at p={p} is not {self.degree}")
        if self.field_discriminant is not None:
            object.__setattr__(self, "field_discriminant", int(self.field_discriminant))
        reason = _checked_irreducible(coeffs)
        if reason is not None:
            raise ReducibleMinpoly(f"{self.label}: {reason}")

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @functools.cached_property
    def poly_disc(self) -> int:
        return poly_discriminant(self.minpoly)

    @functools.cached_property
    def signature(self) -> tuple[int, int]:
        return signature(self.minpoly)

    def supplied(self, p: int) -> tuple[tuple[int, int], ...] | None:
        for q, ef in self.ramified:
            if q == p:
                return ef
        return None

    def archimedean_places(self) -> list[Place]:
        r1, r2 = self.signature
        return [Place.real(i) for i in range(r1)] + [Place.complex(i) for i in range(r2)]

    def to_json(self) -> dict:
        doc = {"label": self.label, "minpoly": [str(c) for c in self.minpoly]}
        if self.field_discriminant is not None:
            doc["field_discriminant"] = str(self.field_discriminant)
        if self.ramified:
            doc["ramified"] = {str(p): [list(x) for x in ef] for p, ef in self.ramified}
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "NumberFieldSpec":
        try:
            disc = doc.get("field_discriminant")
            ram = {int(p): [tuple(x) for x in ef] for p, ef in doc.get("ramified", {}).items()}
            return cls(
                label=str(doc["label"]),
                minpoly=tuple(int(c) for c in doc["minpoly"]),
                field_discriminant=None if disc is None else int(disc),
                ramified=ram,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidFieldSpec(f"malformed field document: {exc}") from exc


def load_field(path) -> NumberFieldSpec:
    with open(path, encoding="utf-8") as fh:
        return NumberFieldSpec.from_json(json.load(fh))


def builtin_fields() -> dict[str, NumberFieldSpec]:
    return {
        "Q": NumberFieldSpec("Q", (-1, 1), field_discriminant=1),
        "Qi": NumberFieldSpec("Qi", (1, 0, 1), field_discriminant=-4, ramified={2: [(2, 1)]}),
        "cubic2": NumberFieldSpec(
            "cubic2", (-2, 0, 0, 1), field_discriminant=-108, ramified={2: [(3, 1)], 3: [(3, 1)]}
        ),
        "oct799": NumberFieldSpec("oct799", (-799, 0, 0, 0, 0, 0, 0, 0, 1)),
        "oct12784": NumberFieldSpec("oct12784", (-12784, 0, 0, 0, 0, 0, 0, 0, 1)),
    }


# ---------------------------------------------------------------------------
# splitting


class SplitStatus(str, Enum):
    UNRAMIFIED = "Unramified"
    RAMIFIED_USER_SUPPLIED = "RamifiedUserSupplied"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class PrimeSplitting:
    p: int
    degrees: tuple[int, ...]
    status: SplitStatus
    # local degrees [K_v : Q_p] = e*f, aligned with ``degrees``
    local_degrees: tuple[int, ...] = ()

    @property
    def determined(self) -> bool:
        return self.status is not SplitStatus.UNDETERMINED

    def places(self) -> list[Place]:
        return [Place.finite(self.p, i) for i in range(len(self.degrees))]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "status": self.status.value,
            "degrees": list(self.degrees),
            "local_degrees": list(self.local_degrees),
        }


@functools.lru_cache(maxsize=1 << 16)
def splitting_type(field: NumberFieldSpec, p: int) -> PrimeSplitting:
    _check_prime(p)
    if field.degree == 1:
        return PrimeSplitting(p, (1,), SplitStatus.UNRAMIFIED, (1,))
    if field.poly_disc % p:
        degrees = factor_mod_p(field.minpoly, p)
        flat = tuple(sorted(d for d, c in degrees.items() for _ in range(c)))
        return PrimeSplitting(p, flat, SplitStatus.UNRAMIFIED, flat)
    ef = field.supplied(p)
    if ef is not None:
        pairs = sorted((f, e) for e, f in ef)
        return PrimeSplitting(
            p,
            tuple(f for f, _ in pairs),
            SplitStatus.RAMIFIED_USER_SUPPLIED,
            tuple(e * f for f, e in pairs),
        )
    return PrimeSplitting(p, (), SplitStatus.UNDETERMINED, ())


def splitting_sweep(field: NumberFieldSpec, primes: Sequence[int]) -> list[PrimeSplitting]:
    return _sweep.ordered_map(functools.partial(splitting_type, field), primes)


def places_over(field: NumberFieldSpec, p: int) -> list[tuple[Place, tuple[int, ...] | None]]:
    """Places over ``p`` with the factor mod ``p`` attached to each slot.

    Slots follow ascending residue degree; equal degrees are ordered by the
    canonical factor ordering.  Ramified places carry no factor.
    """
    split = splitting_type(field, p)
    if split.status is not SplitStatus.UNRAMIFIED:
        return [(pl, None) for pl in split.places()]
    factors = [f for f, _ in irreducible_factors_mod_p(field.minpoly, p)]
    return [(Place.finite(p, i), f) for i, f in enumerate(factors)]


def residue_degree_gcd(field: NumberFieldSpec, p: int) -> int | None:
    """gcd of the residue degrees over ``p``; None when the prime is undetermined."""
    split = splitting_type(field, p)
    if not split.determined:
        return None
    return math.gcd(*split.degrees)


# ---------------------------------------------------------------------------
# zeta


@dataclass(frozen=True)
class ZetaEstimate:
    s: int
    prime_bound: int
    value: mpmath.mpf
    error_bound: Decimal
    precision_bits: int = 128
    undetermined: tuple[int, ...] = ()
    exact: Fraction | None = None  # the truncated product, when cheap to carry

    def interval(self, ctx):
        return _numerics.ball(ctx, self.value, self.error_bound)

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "prime_bound": self.prime_bound,
            "precision_bits": self.precision_bits,
            "value": _numerics.mpf_str(self.value),
            "error_bound": str(self.error_bound),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ZetaEstimate":
        try:
            bits = int(doc.get("precision_bits", 128))
            return cls(
                s=int(doc["s"]),
                prime_bound=int(doc["prime_bound"]),
                value=_numerics.parse_mpf(doc["value"], bits),
                error_bound=Decimal(doc["error_bound"]),
                precision_bits=bits,
            )
        except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
            raise InvalidInput(f"malformed zeta estimate: {exc}") from exc


EXACT_PRODUCT_LIMIT = 2000


def zeta_partial(
    field: NumberFieldSpec, s: int, prime_bound: int, precision_bits: int = 128
) -> ZetaEstimate:
    """Truncated Euler product of the Dedekind zeta function at integer ``s``.

    The returned error bound encloses the true value of zeta_K(s): the tail over
    primes above the bound contributes at most a factor
    ``exp(n * B^(1-s) / ((s-1)(1-B^-s)))``, and each undetermined prime is
    bracketed between 1 and ``(1 - p^-s)^-n`` with the geometric mean used as
    the central value.
    """
    if s < 2:
        raise InvalidInput("s must be >= 2")
    if prime_bound < 2:
        raise InvalidInput("prime_bound must be >= 2")
    ctx = _numerics.interval_context(precision_bits)
    n = field.degree
    one = ctx.mpf(1)
    central = one
    bracket = one
    undetermined = []
    exact = Fraction(1) if prime_bound <= EXACT_PRODUCT_LIMIT else None
    primes = list(sympy.primerange(2, prime_bound + 1))
    for split in splitting_sweep(field, primes):
        p = split.p
        if not split.determined:
            undetermined.append(p)
            worst = (one - one / ctx.mpf(p) ** s) ** (-n)
            half = ctx.sqrt(worst)
            central *= half
            bracket *= half
            exact = None
            continue
        for f in split.degrees:
            q = ctx.mpf(p) ** f
            central /= one - one / q**s
            if exact is not None:
                qs = Fraction(p) ** (f * s)
                exact *= qs / (qs - 1)
    B = ctx.mpf(prime_bound)
    tail = ctx.exp(n * B ** (1 - s) / ((s - 1) * (one - B ** (-s))))
    lower = central / bracket
    upper = central * bracket * tail
    lo, _ = _numerics.endpoints(lower)
    _, hi = _numerics.endpoints(upper)
    center = exact if exact is not None else (lo + hi) / 2
    value, error_bound = _numerics.centered(lo, hi, center, precision_bits)
    return ZetaEstimate(s, prime_bound, value, error_bound, precision_bits, tuple(undetermined), exact)
