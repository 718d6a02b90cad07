"""Counting bounds for division algebras sharing maximal subfields.

Theta is the product of Euler totients of the local degrees at the finite
ramified places.  The lambda factors of those places are bounded by a volume
budget, which in turn bounds Theta; the brute-force search below checks that
bound by exhausting small ramification configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from sympy import totient

from . import _numerics
from .brauer import BrauerClass
from .errors import AlphaTooSmall, InvalidInput, MissingFieldDiscriminant, SearchSpaceTooLarge
from .fieldlab import Place
from .volume import lambda_factor

PR_SCALE = 10**33
PR_SMALL_DEGREE_LIMIT = 28
SEARCH_LIMIT = 3**10
DEFAULT_MAX_PLACES = 12
DEFAULT_DEGREES = range(2, 9)


def _exact(x) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return _numerics.mpf_to_fraction(x)


def theta(local_degrees: Iterable[int]) -> int:
    out = 1
    for d_v in local_degrees:
        if d_v < 2:
            raise InvalidInput(f"local degree {d_v} < 2")
        out *= int(totient(d_v))
    return out


def pr_bound(V, d: int) -> int:
    """Largest integer not exceeding 1 + 10^33 V (or 1 + V once d > 28)."""
    V = _exact(V)
    if V <= 0 or d < 2:
        raise InvalidInput("need V > 0 and d >= 2")
    scale = 1 if d > PR_SMALL_DEGREE_LIMIT else PR_SCALE
    return math.floor(1 + scale * V)


@dataclass(frozen=True)
class LambdaBudget:
    refined: Fraction  # 10^33 V / |D|^((d^2-1)/2), rounded up
    coarse: Fraction  # 10^33 V


def _sqrt_lower(n: int, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(math.isqrt(n * scale * scale), scale)


def lambda_budget(V, d: int, abs_disc: int | None, precision_bits: int = 128) -> LambdaBudget:
    """Upper bounds for the lambda product at the finite ramified places."""
    if abs_disc is None:
        raise MissingFieldDiscriminant("the refined budget needs |D_K|")
    V = _exact(V)
    if V <= 0 or abs_disc < 1:
        raise InvalidInput("need V > 0 and |D_K| >= 1")
    coarse = PR_SCALE * V
    twice = d * d - 1
    denom = Fraction(abs_disc ** (twice // 2))
    if twice % 2:
        root = math.isqrt(abs_disc)
        denom *= root if root * root == abs_disc else _sqrt_lower(abs_disc, precision_bits)
    return LambdaBudget(min(coarse / denom, coarse), coarse)


def isobound(N) -> tuple[int, int]:
    """(alpha, bound) with alpha the largest integer such that 3^alpha <= N."""
    N = _exact(N)
    if N < 1:
        raise InvalidInput("N must be >= 1")
    alpha = 0
    while 3 ** (alpha + 1) <= N:
        alpha += 1
    return alpha, (1 if alpha < 2 else 2**alpha)


def dmax_construct(alpha: int) -> list[tuple[Place, int, Fraction]]:
    """Cubic local invariants at ``alpha`` places over 2 that sum to 0."""
    if alpha < 2:
        raise AlphaTooSmall(f"alpha={alpha}")
    k = (-alpha) % 3  # copies of 2/3
    values = [Fraction(1, 3)] * (alpha - k) + [Fraction(2, 3)] * k
    return [(Place.finite(2, i), 3, v) for i, v in enumerate(values)]


def dmax_class(alpha: int, field_label: str = "K") -> BrauerClass:
    return BrauerClass.of(field_label, [(pl, v) for pl, _, v in dmax_construct(alpha)])


# ---------------------------------------------------------------------------
# brute-force search


@dataclass(frozen=True, order=True)
class RamConfig:
    """Local degrees at finite ramified places (all with q = 2) for one nd."""

    local_degrees: tuple[int, ...]
    nd: int = 0

    def to_json(self) -> dict:
        return {"nd": self.nd, "local_degrees": list(self.local_degrees)}


def realizable(local_degrees: tuple[int, ...]) -> bool:
    """Whether invariants of exact orders d_v can sum to 0 in Q/Z."""
    if not local_degrees:
        return True
    if len(local_degrees) < 2:
        return False
    L = math.lcm(*local_degrees)
    reach = {0}
    for d_v in local_degrees:
        step = L // d_v
        units = [a for a in range(1, d_v) if math.gcd(a, d_v) == 1]
        reach = {(r + a * step) % L for r in reach for a in units}
    return 0 in reach


def realize(local_degrees: tuple[int, ...]) -> list[Fraction] | None:
    """A witness invariant list for :func:`realizable`, or None."""
    if not local_degrees:
        return []
    if len(local_degrees) < 2:
        return None
    L = math.lcm(*local_degrees)
    layers = [{0: None}]
    for d_v in local_degrees:
        step = L // d_v
        nxt = {}
        for r in layers[-1]:
            for a in range(1, d_v):
                if math.gcd(a, d_v) == 1:
                    nxt.setdefault((r + a * step) % L, (r, a))
        layers.append(nxt)
    if 0 not in layers[-1]:
        return None
    out = []
    r = 0
    for d_v, layer in zip(reversed(local_degrees), reversed(layers[1:])):
        r, a = layer[r]
        out.append(Fraction(a, d_v))
    return out[::-1]


def enumerate_configs(
    N, max_places: int = DEFAULT_MAX_PLACES, d_range: Iterable[int] = DEFAULT_DEGREES
) -> Iterator[tuple[Fraction, int, RamConfig]]:
    """Realizable configurations with lambda product <= N as (lambda, theta, config)."""
    N = _exact(N)
    if N > SEARCH_LIMIT:
        raise SearchSpaceTooLarge(f"N={N} exceeds {SEARCH_LIMIT}")
    d_range = sorted(set(d_range))
    yield Fraction(1), 1, RamConfig(())
    for nd in d_range:
        if nd < 2:
            continue
        choices = [(d_v, lambda_factor(2, nd, d_v)) for d_v in d_range if d_v >= 2 and nd % d_v == 0]

        def grow(start: int, degs: list[int], lam: Fraction):
            if len(degs) >= 2 and realizable(tuple(degs)):
                yield lam, theta(degs), RamConfig(tuple(degs), nd)
            if len(degs) == max_places:
                return
            for i in range(start, len(choices)):
                d_v, lam_v = choices[i]
                if lam * lam_v <= N:
                    degs.append(d_v)
                    yield from grow(i, degs, lam * lam_v)
                    degs.pop()

        yield from grow(0, [], Fraction(1))


def brute_force_theta_max(
    N, max_places: int = DEFAULT_MAX_PLACES, d_range: Iterable[int] = DEFAULT_DEGREES
) -> tuple[int, RamConfig]:
    best_theta, best = 0, None
    for _, th, config in enumerate_configs(N, max_places, d_range):
        if th > best_theta or (th == best_theta and config < best):
            best_theta, best = th, config
    return best_theta, best


def theta_max_profile(
    Ns: Iterable, max_places: int = DEFAULT_MAX_PLACES, d_range: Iterable[int] = DEFAULT_DEGREES
) -> dict:
    """brute_force_theta_max for many budgets from a single enumeration."""
    Ns = sorted({_exact(n) for n in Ns})
    if not Ns:
        return {}
    found = sorted(
        enumerate_configs(Ns[-1], max_places, d_range), key=lambda t: (t[0], -t[1], t[2])
    )
    out = {}
    best_theta, best = 0, None
    i = 0
    for n in Ns:
        while i < len(found) and found[i][0] <= n:
            _, th, config = found[i]
            if th > best_theta or (th == best_theta and config < best):
                best_theta, best = th, config
            i += 1
        out[n] = (best_theta, best)
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class GenusBoundReport:
    theta: int
    bound: int
    alpha: int
    budget: Fraction
    branch: str
    details: tuple[tuple[int, int], ...] = field(default=())  # (d_v, phi(d_v))

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "bound": str(self.bound),
            "alpha": self.alpha,
            "budget": str(_numerics.decimal_up(self.budget, 12)),
            "branch": self.branch,
            "details": [{"d_v": d, "phi": p} for d, p in self.details],
        }


def genus_report(V, d: int, abs_disc: int | None, local_degrees: Iterable[int] = ()) -> GenusBoundReport:
    """Theta of a ramification pattern and the best bound available for it."""
    local_degrees = tuple(local_degrees)
    budget = lambda_budget(V, d, abs_disc).refined
    pr = pr_bound(V, d)
    alpha, iso = isobound(max(budget, Fraction(1)))
    if iso < pr:
        bound, branch = iso, "isobound"
    else:
        bound, branch = pr, ("large-degree" if d > PR_SMALL_DEGREE_LIMIT else "general")
    details = tuple((d_v, int(totient(d_v))) for d_v in local_degrees)
    return GenusBoundReport(theta(local_degrees), bound, alpha, budget, branch, details)
