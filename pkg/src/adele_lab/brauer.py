"""Brauer classes of number fields as vectors of local Hasse invariants.

A class is a finitely supported map from places to Q/Z.  Invariants are kept
as Fractions in [0, 1); the group law is pointwise addition.  A vector is a
genuine Brauer class exactly when the invariants sum to 0 in Q/Z, real places
carry 0 or 1/2 and complex places carry 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import (
    FieldMismatch,
    InvalidInput,
    OddQuaternionicRank,
    UndeterminedPrime,
)
from .fieldlab import NumberFieldSpec, Place, SplitStatus, splitting_type

if TYPE_CHECKING:
    from .equivalence import PlaceBijectionData

HALF = Fraction(1, 2)
RATIONALS = "Q"


def qz(a, m: int = 1) -> Fraction:
    """The element a/m of Q/Z, reduced into [0, 1)."""
    return Fraction(a, m) % 1


def _items(invariants) -> Iterable[tuple[Place, Fraction]]:
    if isinstance(invariants, Mapping):
        invariants = invariants.items()
    for place, value in invariants:
        if isinstance(value, tuple):
            value = Fraction(*value)
        yield place, Fraction(value)


@dataclass(frozen=True)
class BrauerClass:
    """Hasse-invariant vector of a class in Br(K).

    The plain constructor stores what it is given (sorted by place), so that
    malformed vectors can be inspected with :func:`validate`.  Use
    :meth:`of` to build a normalized class.
    """

    field: str
    invariants: tuple[tuple[Place, Fraction], ...] = ()

    def __post_init__(self):
        items = sorted(_items(self.invariants), key=lambda pv: pv[0].sort_key())
        object.__setattr__(self, "invariants", tuple(items))

    @classmethod
    def of(cls, field: str, invariants=()) -> "BrauerClass":
        merged: dict[Place, Fraction] = {}
        for place, value in _items(invariants):
            merged[place] = (merged.get(place, Fraction(0)) + value) % 1
        return cls(field, tuple((pl, v) for pl, v in merged.items() if v))

    @classmethod
    def trivial(cls, field: str) -> "BrauerClass":
        return cls(field, ())

    @property
    def inv(self) -> dict[Place, Fraction]:
        return dict(self.invariants)

    def __getitem__(self, place: Place) -> Fraction:
        return self.inv.get(place, Fraction(0))

    def support(self) -> list[Place]:
        return [pl for pl, _ in self.invariants]

    def __str__(self) -> str:
        if not self.invariants:
            return f"[{self.field}: trivial]"
        body = ", ".join(f"{pl}:{v}" for pl, v in self.invariants)
        return f"[{self.field}: {body}]"

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "inv": [
                {"place": pl.to_json(), "num": v.numerator, "den": v.denominator}
                for pl, v in self.invariants
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BrauerClass":
        try:
            items = [
                (Place.from_json(e["place"]), Fraction(int(e["num"]), int(e["den"])))
                for e in doc.get("inv", [])
            ]
            return cls(str(doc["field"]), tuple(items))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"malformed class document: {exc}") from exc


def validate(c: BrauerClass, signature: tuple[int, int] | None = None) -> list[str]:
    """Violations of the Brauer-class constraints; an empty list means valid."""
    problems = []
    seen = set()
    total = Fraction(0)
    for place, value in c.invariants:
        if place in seen:
            problems.append(f"duplicate place {place}")
        seen.add(place)
        if not 0 <= value < 1:
            problems.append(f"unreduced invariant {value} at {place}")
        if value % 1 == 0:
            problems.append(f"stored zero invariant at {place}")
        if place.kind == "real" and value % 1 not in (0, HALF):
            problems.append(f"real place {place} carries {value}, not 0 or 1/2")
        if place.kind == "complex" and value % 1:
            problems.append(f"complex place {place} carries {value}")
        if signature is not None and not place.is_finite:
            r1, r2 = signature
            limit = r1 if place.kind == "real" else r2
            if place.index >= limit:
                problems.append(f"{place} does not exist for signature {signature}")
        total += value
    if total % 1:
        problems.append(f"reciprocity fails: invariants sum to {total % 1} in Q/Z")
    return problems


def is_valid(c: BrauerClass, signature: tuple[int, int] | None = None) -> bool:
    return not validate(c, signature)


def tensor(c1: BrauerClass, c2: BrauerClass) -> BrauerClass:
    if c1.field != c2.field:
        raise FieldMismatch(f"{c1.field} vs {c2.field}")
    return BrauerClass.of(c1.field, list(c1.invariants) + list(c2.invariants))


def power(c: BrauerClass, m: int) -> BrauerClass:
    return BrauerClass.of(c.field, [(pl, v * m) for pl, v in c.invariants])


def inverse(c: BrauerClass) -> BrauerClass:
    return BrauerClass.of(c.field, [(pl, -v) for pl, v in c.invariants])


def is_trivial(c: BrauerClass) -> bool:
    return all(v % 1 == 0 for _, v in c.invariants)


def division_algebra_degree(c: BrauerClass) -> int:
    """Degree of the division algebra in the class: lcm of the local orders."""
    return reduce(math.lcm, (v.denominator for _, v in c.invariants if v % 1), 1)


def ram_sets(c: BrauerClass) -> tuple[list[Place], list[Place]]:
    """(finite ramified places, real ramified places)."""
    finite = [pl for pl, v in c.invariants if v % 1 and pl.is_finite]
    real = [pl for pl, v in c.invariants if v % 1 and pl.kind == "real"]
    return finite, real


def restrict_from_Q(c: BrauerClass, K: NumberFieldSpec, prime_bound: int | None = None) -> BrauerClass:
    """Res_{K/Q}: multiply each invariant by the local degree [K_v : Q_p]."""
    if c.field != RATIONALS:
        raise FieldMismatch(f"restriction starts from {RATIONALS!r}, class lives over {c.field!r}")
    problems = validate(c, (1, 0))
    if problems:
        raise InvalidInput("; ".join(problems))
    out: list[tuple[Place, Fraction]] = []
    r1, _ = K.signature
    for place, value in c.invariants:
        if place.kind == "real":
            out.extend((Place.real(i), value) for i in range(r1))
            continue
        p = place.p
        if prime_bound is not None and p > prime_bound:
            raise InvalidInput(f"p={p} exceeds the prime bound {prime_bound}")
        split = splitting_type(K, p)
        if split.status is SplitStatus.UNDETERMINED:
            raise UndeterminedPrime(p)
        for slot, n_v in enumerate(split.local_degrees):
            out.append((Place.finite(p, slot), n_v * value))
    return BrauerClass.of(K.label, out)


def transport(c: BrauerClass, phi: "PlaceBijectionData") -> BrauerClass:
    """Relabel invariants along a place matching K -> K'."""
    if c.field != phi.left_field:
        raise FieldMismatch(f"class lives over {c.field}, matching starts at {phi.left_field}")
    return BrauerClass.of(phi.right_field, [(phi.map_place(pl), v) for pl, v in c.invariants])


@dataclass(frozen=True)
class ArchimedeanType:
    """Counts of the simple factors SL(m, C), SL(m, R), SL(m/2, H)."""

    size: int  # nd
    complex_factors: int
    real_factors: int
    quaternionic_factors: int

    @property
    def compact_quaternionic(self) -> bool:
        return self.quaternionic_factors > 0 and self.size == 2

    def factors(self) -> list[tuple[str, int, int]]:
        m = self.size
        out = []
        if self.complex_factors:
            out.append((f"SL({m},C)", self.complex_factors, m > 1))
        if self.real_factors:
            out.append((f"SL({m},R)", self.real_factors, m > 1))
        if self.quaternionic_factors:
            out.append((f"SL({m // 2},H)", self.quaternionic_factors, m > 2))
        return out

    def describe(self, noncompact_only: bool = False) -> str:
        parts = [
            f"{name}^{count}"
            for name, count, noncompact in self.factors()
            if noncompact or not noncompact_only
        ]
        return " x ".join(parts) if parts else "trivial"

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "complex": self.complex_factors,
            "real": self.real_factors,
            "quaternionic": self.quaternionic_factors,
            "compact_quaternionic": self.compact_quaternionic,
            "group": self.describe(),
            "noncompact": self.describe(noncompact_only=True),
        }


def archimedean_group_type(c: BrauerClass, n: int, signature: tuple[int, int]) -> ArchimedeanType:
    problems = validate(c, signature)
    if problems:
        raise InvalidInput("; ".join(problems))
    if n < 1:
        raise InvalidInput("matrix size must be >= 1")
    r1, r2 = signature
    m = n * division_algebra_degree(c)
    _, ram_inf = ram_sets(c)
    if ram_inf and m % 2:
        raise OddQuaternionicRank(f"nd={m} is odd but {len(ram_inf)} real places ramify")
    return ArchimedeanType(m, r2, r1 - len(ram_inf), len(ram_inf))


def random_class(
    K: NumberFieldSpec,
    rng,
    primes,
    max_support: int = 4,
    denominators: tuple[int, ...] = (2, 3, 4, 6),
) -> BrauerClass:
    """A random valid class over K supported on places over ``primes`` and real places.

    One finite place absorbs the reciprocity defect, so the result always
    validates.  Primes with undetermined splitting are never used.
    """
    finite = []
    for p in primes:
        split = splitting_type(K, p)
        if split.determined:
            finite.extend(split.places())
    if not finite:
        raise InvalidInput("no determined finite places to support a class")
    r1, _ = K.signature
    pool = finite + [Place.real(i) for i in range(r1)]
    m = rng.choice(denominators)
    chosen = rng.sample(pool, min(len(pool), rng.randint(1, max_support)))
    balance = rng.choice(finite)
    items = []
    total = Fraction(0)
    for place in chosen:
        if place == balance:
            continue
        value = HALF * rng.randrange(2) if place.kind == "real" else Fraction(rng.randrange(m), m)
        items.append((place, value))
        total += value
    items.append((balance, -total))
    return BrauerClass.of(K.label, items)
