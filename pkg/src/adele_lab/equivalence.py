"""Bounded tests of local equivalence and locally-GCD equivalence.

Both tests are semidecisions: a refutation at a prime is definitive, while
agreement only says the fields look alike at every prime up to the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .brauer import BrauerClass, is_trivial, restrict_from_Q, validate
from .errors import (
    InvalidInput,
    MatchingObstruction,
    OutOfMatchingRange,
    PreconditionGcd,
    SearchExhausted,
    SignatureMismatch,
)
from .fieldlab import (
    NumberFieldSpec,
    Place,
    PrimeSplitting,
    SplitStatus,
    residue_degree_gcd,
    splitting_sweep,
    splitting_type,
)

WITNESS_SEARCH_CEILING = 10**6


@dataclass(frozen=True)
class Refuted:
    prime: int | None  # None: the infinite prime (signatures differ)
    reason: str

    kind = "Refuted"

    def to_json(self) -> dict:
        return {"kind": self.kind, "prime": self.prime, "reason": self.reason}


@dataclass(frozen=True)
class ConsistentUpTo:
    bound: int
    skipped_primes: tuple[int, ...] = ()

    kind = "ConsistentUpTo"

    def to_json(self) -> dict:
        return {"kind": self.kind, "bound": self.bound, "skipped_primes": list(self.skipped_primes)}


EquivalenceVerdict = Refuted | ConsistentUpTo


def verdict_from_json(doc: dict) -> EquivalenceVerdict:
    if doc.get("kind") == "Refuted":
        return Refuted(doc["prime"], doc["reason"])
    if doc.get("kind") == "ConsistentUpTo":
        return ConsistentUpTo(int(doc["bound"]), tuple(doc.get("skipped_primes", ())))
    raise InvalidInput(f"unknown verdict kind {doc.get('kind')!r}")


def _paired_splittings(K: NumberFieldSpec, K2: NumberFieldSpec, bound: int):
    primes = list(sympy.primerange(2, bound + 1))
    return zip(splitting_sweep(K, primes), splitting_sweep(K2, primes))


def _signature_refutation(K, K2) -> Refuted | None:
    if K.signature != K2.signature:
        return Refuted(None, f"signatures differ: {K.signature} vs {K2.signature}")
    return None


def _both_comparable(a: PrimeSplitting, b: PrimeSplitting) -> bool:
    if a.status is SplitStatus.UNRAMIFIED and b.status is SplitStatus.UNRAMIFIED:
        return True
    supplied = SplitStatus.RAMIFIED_USER_SUPPLIED
    return a.status is supplied and b.status is supplied


def check_local_equivalence(K: NumberFieldSpec, K2: NumberFieldSpec, prime_bound: int) -> EquivalenceVerdict:
    """Compare residue-degree multisets at every prime up to ``prime_bound``.

    Primes whose local data is unknown on either side are skipped and listed.
    Where both sides carry user-supplied ramified data, the (e, f) multisets
    are compared as well.
    """
    skipped = []
    for a, b in _paired_splittings(K, K2, prime_bound):
        if not _both_comparable(a, b):
            skipped.append(a.p)
            continue
        if (a.degrees, a.local_degrees) != (b.degrees, b.local_degrees):
            return Refuted(a.p, f"residue degrees {list(a.degrees)} vs {list(b.degrees)}")
    return _signature_refutation(K, K2) or ConsistentUpTo(prime_bound, tuple(skipped))


def check_gcd_equivalence(K: NumberFieldSpec, K2: NumberFieldSpec, prime_bound: int) -> EquivalenceVerdict:
    """Compare gcds of residue degrees at primes unramified in both fields."""
    skipped = []
    for a, b in _paired_splittings(K, K2, prime_bound):
        if a.status is not SplitStatus.UNRAMIFIED or b.status is not SplitStatus.UNRAMIFIED:
            skipped.append(a.p)
            continue
        ga, gb = math.gcd(*a.degrees), math.gcd(*b.degrees)
        if ga != gb:
            return Refuted(a.p, f"gcd {ga} vs {gb}")
    return ConsistentUpTo(prime_bound, tuple(skipped))


@dataclass(frozen=True)
class PlaceBijectionData:
    """A place matching K -> K' verified on all unramified primes up to a bound.

    ``finite_matching[p][i]`` is the slot over ``p`` in K' matched to slot ``i``
    in K.
    """

    left_field: str
    right_field: str
    verified_bound: int
    archimedean_matching: tuple[tuple[Place, Place], ...]
    finite_matching: dict[int, tuple[int, ...]] = field(default_factory=dict)
    # residue degrees of the matched slots, per prime (left side ordering)
    degrees: dict[int, tuple[int, ...]] = field(default_factory=dict, compare=False)

    def __hash__(self):
        return hash((self.left_field, self.right_field, self.verified_bound))

    def map_place(self, place: Place) -> Place:
        if not place.is_finite:
            for a, b in self.archimedean_matching:
                if a == place:
                    return b
            raise OutOfMatchingRange(place)
        perm = self.finite_matching.get(place.p)
        if perm is None or place.p > self.verified_bound or place.slot >= len(perm):
            raise OutOfMatchingRange(place)
        return Place.finite(place.p, perm[place.slot])

    def inverse(self) -> "PlaceBijectionData":
        finite = {}
        degrees = {}
        for p, perm in self.finite_matching.items():
            inv = [0] * len(perm)
            for i, j in enumerate(perm):
                inv[j] = i
            finite[p] = tuple(inv)
            if p in self.degrees:
                degrees[p] = tuple(self.degrees[p][i] for i in inv)
        return PlaceBijectionData(
            self.right_field,
            self.left_field,
            self.verified_bound,
            tuple((b, a) for a, b in self.archimedean_matching),
            finite,
            degrees,
        )

    def matched_places(self) -> list[Place]:
        places = [a for a, _ in self.archimedean_matching]
        for p in sorted(self.finite_matching):
            places.extend(Place.finite(p, i) for i in range(len(self.finite_matching[p])))
        return places

    def to_json(self) -> dict:
        return {
            "left_field": self.left_field,
            "right_field": self.right_field,
            "verified_bound": self.verified_bound,
            "archimedean": [[a.to_json(), b.to_json()] for a, b in self.archimedean_matching],
            "finite": [
                {"p": p, "perm": list(self.finite_matching[p]), "degrees": list(self.degrees.get(p, ()))}
                for p in sorted(self.finite_matching)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PlaceBijectionData":
        try:
            return cls(
                doc["left_field"],
                doc["right_field"],
                int(doc["verified_bound"]),
                tuple((Place.from_json(a), Place.from_json(b)) for a, b in doc["archimedean"]),
                {int(e["p"]): tuple(e["perm"]) for e in doc["finite"]},
                {int(e["p"]): tuple(e.get("degrees", ())) for e in doc["finite"]},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed matching document: {exc}") from exc


def build_place_matching(K: NumberFieldSpec, K2: NumberFieldSpec, prime_bound: int) -> PlaceBijectionData:
    """Canonical slot-to-slot matching on primes unramified in both fields."""
    if K.signature != K2.signature:
        raise SignatureMismatch(f"{K.signature} vs {K2.signature}")
    finite: dict[int, tuple[int, ...]] = {}
    degrees: dict[int, tuple[int, ...]] = {}
    for a, b in _paired_splittings(K, K2, prime_bound):
        if a.status is not SplitStatus.UNRAMIFIED or b.status is not SplitStatus.UNRAMIFIED:
            continue
        if a.degrees != b.degrees:
            raise MatchingObstruction(a.p)
        finite[a.p] = tuple(range(len(a.degrees)))
        degrees[a.p] = a.degrees
    arch = tuple((pl, pl) for pl in K.archimedean_places())
    return PlaceBijectionData(K.label, K2.label, prime_bound, arch, finite, degrees)


def gcd_witness_algebra(
    K: NumberFieldSpec,
    K2: NumberFieldSpec,
    p0: int,
    search_ceiling: int = WITNESS_SEARCH_CEILING,
) -> BrauerClass:
    """A class over Q that restricts trivially to K but not to K'.

    With g = gcd of residue degrees of K at p0 larger than that of K', the
    class has invariant 1/g at p0 and at the next g-1 primes (ascending)
    unramified in both fields where K has the same gcd g.
    """
    a, b = splitting_type(K, p0), splitting_type(K2, p0)
    if a.status is not SplitStatus.UNRAMIFIED or b.status is not SplitStatus.UNRAMIFIED:
        raise PreconditionGcd(f"p0={p0} must be unramified in both fields")
    g, g2 = residue_degree_gcd(K, p0), residue_degree_gcd(K2, p0)
    if not g2 < g:
        raise PreconditionGcd(f"need gcd_K({p0}) > gcd_K'({p0}), got {g} and {g2}")
    chosen = [p0]
    for p in sympy.primerange(2, search_ceiling + 1):
        if len(chosen) == g:
            break
        if p == p0:
            continue
        sa, sb = splitting_type(K, p), splitting_type(K2, p)
        if sa.status is SplitStatus.UNRAMIFIED and sb.status is SplitStatus.UNRAMIFIED:
            if math.gcd(*sa.degrees) == g:
                chosen.append(p)
    if len(chosen) < g:
        raise SearchExhausted(search_ceiling)
    witness = BrauerClass.of("Q", [(Place.finite(p), Fraction(1, g)) for p in chosen])
    if validate(witness) or not is_trivial(restrict_from_Q(witness, K)) or is_trivial(
        restrict_from_Q(witness, K2)
    ):
        raise RuntimeError(f"witness {witness} failed its restriction checks")
    return witness
