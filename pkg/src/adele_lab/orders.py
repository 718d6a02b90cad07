"""Orders as local deviations from a maximal order, and the SL2 tree.

An order of a central simple algebra is recorded by the finitely many finite
places where it differs from a fixed maximal order: a level exponent plus an
opaque label for the local datum.  Level ideals and transport along a place
matching only ever read these.

The Bruhat-Tits tree of SL(2, Q_p) is modelled by homothety classes of
Z_p-lattices in Q_p^2, each stored as a reduced Hermite normal form.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .brauer import BrauerClass, transport
from .errors import ClassMismatch, InvalidInput, PrimeMismatch
from .fieldlab import Place


@dataclass(frozen=True)
class LevelIdeal:
    exponents: tuple[tuple[Place, int], ...] = ()

    def __post_init__(self):
        items = self.exponents.items() if isinstance(self.exponents, dict) else self.exponents
        items = sorted(((pl, int(e)) for pl, e in items if e), key=lambda pe: pe[0].sort_key())
        if any(e < 0 for _, e in items):
            raise InvalidInput("level exponents must be nonnegative")
        object.__setattr__(self, "exponents", tuple(items))

    @property
    def is_trivial(self) -> bool:
        return not self.exponents

    def relabel(self, phi) -> "LevelIdeal":
        return LevelIdeal(tuple((phi.map_place(pl), e) for pl, e in self.exponents))

    def __str__(self) -> str:
        if not self.exponents:
            return "(1)"
        return " * ".join(f"P{pl}^{e}" for pl, e in self.exponents)

    def to_json(self) -> dict:
        return {"exponents": [{"place": pl.to_json(), "e": e} for pl, e in self.exponents]}


@dataclass(frozen=True)
class OrderData:
    """An order given by its local deviations from a maximal order."""

    ambient_class: BrauerClass
    deviations: tuple[tuple[Place, int, str], ...] = ()

    def __post_init__(self):
        devs = []
        seen = set()
        for place, e, label in self.deviations:
            if not place.is_finite:
                raise InvalidInput(f"orders deviate only at finite places, got {place}")
            if e < 0:
                raise InvalidInput(f"negative level exponent at {place}")
            if place in seen:
                raise InvalidInput(f"two deviations at {place}")
            seen.add(place)
            if e:
                devs.append((place, int(e), str(label)))
        devs.sort(key=lambda d: d[0].sort_key())
        object.__setattr__(self, "deviations", tuple(devs))

    @classmethod
    def maximal(cls, ambient_class: BrauerClass) -> "OrderData":
        return cls(ambient_class, ())

    def to_json(self) -> dict:
        return {
            "class": self.ambient_class.to_json(),
            "dev": [{"place": pl.to_json(), "e": e, "label": label} for pl, e, label in self.deviations],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "OrderData":
        try:
            devs = tuple(
                (Place.from_json(d["place"]), int(d["e"]), str(d.get("label", "")))
                for d in doc.get("dev", [])
            )
            return cls(BrauerClass.from_json(doc["class"]), devs)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed order document: {exc}") from exc


def level_ideal(order: OrderData) -> LevelIdeal:
    return LevelIdeal(tuple((pl, e) for pl, e, _ in order.deviations))


def is_maximal(order: OrderData) -> bool:
    return level_ideal(order).is_trivial


def transport_order(order: OrderData, phi, transported_class: BrauerClass) -> OrderData:
    """Carry an order over K to the matching order over K'.

    Each local deviation moves to the matched place with the same exponent
    and label, so the level ideal is relabelled along the matching.
    """
    if transport(order.ambient_class, phi) != transported_class:
        raise ClassMismatch(f"{order.ambient_class} does not transport to {transported_class}")
    devs = tuple((phi.map_place(pl), e, label) for pl, e, label in order.deviations)
    return OrderData(transported_class, devs)


# ---------------------------------------------------------------------------
# Bruhat-Tits tree for SL(2, Q_p)


def vp(x, p: int) -> float | int:
    """p-adic valuation of a rational; +inf for zero."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _det2(m) -> Fraction:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _inv2(m):
    d = _det2(m)
    return ((m[1][1] / d, -m[0][1] / d), (-m[1][0] / d, m[0][0] / d))


def _mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


@dataclass(frozen=True)
class TreeVertex:
    """Homothety class of the lattice with rows (p^a, b) and (0, p^n).

    The representative is primitive (not inside p * Z_p^2), which makes the
    triple (a, n, b) with 0 <= b < p^n unique.
    """

    p: int
    a: int
    n: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.n < 0 or not 0 <= self.b < self.p**self.n:
            raise InvalidInput(f"({self.a}, {self.n}, {self.b}) is not a normal form")
        if min(self.a, self.n, vp(self.b, self.p)) != 0:
            raise InvalidInput(f"({self.a}, {self.n}, {self.b}) is not reduced mod homothety")

    @classmethod
    def standard(cls, p: int) -> "TreeVertex":
        return cls(p, 0, 0, 0)

    @classmethod
    def from_basis(cls, p: int, rows: Sequence[Sequence]) -> "TreeVertex":
        """Vertex of the lattice spanned (over Z_p) by two rational row vectors."""
        m = [[Fraction(x) for x in row] for row in rows]
        if _det2(m) == 0:
            raise InvalidInput("basis is singular")
        scale = 1
        for row in m:
            for x in row:
                scale = scale * x.denominator // _gcd(scale, x.denominator)
        (x1, y1), (x2, y2) = [[int(x * scale) for x in row] for row in m]
        a = min(vp(x1, p), vp(x2, p))
        x, y = (x1, y1) if vp(x1, p) == a else (x2, y2)
        c = vp(x1 * y2 - x2 * y1, p) - a
        modulus = p**c
        unit = x // p**a
        b = (y * pow(unit, -1, modulus)) % modulus if modulus > 1 else 0
        k = min(a, c, vp(b, p))
        a, c = a - k, c - k
        b = (b // p**k) % p**c
        return cls(p, a, c, b)

    def basis(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        p = self.p
        return ((Fraction(p**self.a), Fraction(self.b)), (Fraction(0), Fraction(p**self.n)))

    def to_json(self) -> dict:
        return {"p": self.p, "a": self.a, "n": self.n, "b": str(self.b)}

    @classmethod
    def from_json(cls, doc: dict) -> "TreeVertex":
        try:
            return cls(int(doc["p"]), int(doc["a"]), int(doc["n"]), int(doc["b"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed vertex document: {exc}") from exc

    def __str__(self) -> str:
        return f"[p={self.p}: {self.a},{self.n},{self.b}]"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def tree_distance(u: TreeVertex, v: TreeVertex) -> int:
    """Difference of the elementary-divisor exponents of the change of basis."""
    if u.p != v.p:
        raise PrimeMismatch(f"{u.p} vs {v.p}")
    m = _mul(v.basis(), _inv2(u.basis()))
    low = min(vp(x, u.p) for row in m for x in row)
    return int(vp(_det2(m), u.p) - 2 * low)


def tree_neighbors(u: TreeVertex) -> list[TreeVertex]:
    """The p + 1 index-p sublattices containing p * L, up to homothety."""
    p = u.p
    (v1, v2) = u.basis()
    out = []
    for t in range(p):
        w = tuple(x + t * y for x, y in zip(v1, v2))
        out.append(TreeVertex.from_basis(p, (w, tuple(p * y for y in v2))))
    out.append(TreeVertex.from_basis(p, (tuple(p * x for x in v1), v2)))
    return out


def tree_ball(center: TreeVertex, radius: int) -> set[TreeVertex]:
    seen = {center}
    frontier = deque([(center, 0)])
    while frontier:
        u, r = frontier.popleft()
        if r == radius:
            continue
        for w in tree_neighbors(u):
            if w not in seen:
                seen.add(w)
                frontier.append((w, r + 1))
    return seen


# ---------------------------------------------------------------------------
# maximal orders End(L) inside Mat(2, Q_p)


def _endomorphism_basis(v: TreeVertex) -> list[tuple[Fraction, ...]]:
    # row-vector convention: X preserves L = Z_p^2 B iff B X B^-1 is integral
    b = v.basis()
    b_inv = _inv2(b)
    out = []
    for i, j in itertools.product(range(2), repeat=2):
        e = tuple(tuple(Fraction(int(r == i and c == j)) for c in range(2)) for r in range(2))
        x = _mul(_mul(b_inv, e), b)
        out.append(tuple(x[0]) + tuple(x[1]))
    return out


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return det


def _solve_rows(coords_of: list[tuple], basis: list[tuple]) -> list[list[Fraction]]:
    """Rows T with T * basis = coords_of (exact, square nonsingular basis)."""
    n = len(basis)
    # solve X * basis = Y  <=>  basis^T X^T = Y^T
    bt = [[basis[j][i] for j in range(n)] for i in range(n)]
    out = []
    for y in coords_of:
        aug = [list(bt[i]) + [y[i]] for i in range(n)]
        for c in range(n):
            pivot = next(r for r in range(c, n) if aug[r][c] != 0)
            aug[c], aug[pivot] = aug[pivot], aug[c]
            piv = aug[c][c]
            aug[c] = [x / piv for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * z for x, z in zip(aug[r], aug[c])]
        out.append([aug[i][n] for i in range(n)])
    return out


def elementary_divisor_exponents(m: list[list[Fraction]], p: int) -> list[int]:
    """p-adic elementary divisor exponents of a nonsingular square matrix."""
    n = len(m)
    deltas = [0]
    for k in range(1, n + 1):
        best = float("inf")
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                minor = _det([[m[r][c] for c in cols] for r in rows])
                best = min(best, vp(minor, p))
        deltas.append(best)
    return [int(deltas[k] - deltas[k - 1]) for k in range(1, n + 1)]


def intersection_level_exponent(u: TreeVertex, v: TreeVertex) -> int:
    """Length of End(L_u) / (End(L_u) meet End(L_v)) as a Z_p-module.

    Computed as the length of (O_u + O_v) / O_v from the elementary divisors
    of the O_u basis written in O_v coordinates.
    """
    if u.p != v.p:
        raise PrimeMismatch(f"{u.p} vs {v.p}")
    t = _solve_rows(_endomorphism_basis(u), _endomorphism_basis(v))
    return sum(max(0, -e) for e in elementary_divisor_exponents(t, u.p))


def eichler_order(ambient_class: BrauerClass, place: Place, u: TreeVertex, v: TreeVertex) -> OrderData:
    """Order equal to the maximal order away from ``place`` and to End(L_u) meet End(L_v) there."""
    e = intersection_level_exponent(u, v)
    return OrderData(ambient_class, ((place, e, f"eichler:{tree_distance(u, v)}"),))


def random_vertex(rng, p: int, max_exponent: int = 4) -> TreeVertex:
    rows = [[rng.randrange(-p**max_exponent, p**max_exponent + 1) for _ in range(2)] for _ in range(2)]
    while _det2([[Fraction(x) for x in r] for r in rows]) == 0:
        rows = [[rng.randrange(-p**max_exponent, p**max_exponent + 1) for _ in range(2)] for _ in range(2)]
    return TreeVertex.from_basis(p, rows)


def vertices(items: Iterable[TreeVertex]) -> list[TreeVertex]:
    return sorted(items, key=lambda v: (v.p, v.a + v.n, v.a, v.n, v.b))
