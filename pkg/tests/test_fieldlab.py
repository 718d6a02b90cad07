import itertools
import json
import math
import random
from collections import Counter
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from adele_lab import _numerics
from adele_lab.errors import (
    CompositeModulus,
    InvalidFieldSpec,
    NonSquarefree,
    PrecisionUnattainable,
    ReducibleMinpoly,
)
from adele_lab.fieldlab import (
    NumberFieldSpec,
    Place,
    SplitStatus,
    ZetaEstimate,
    factor_mod_p,
    irreducible_factors_mod_p,
    places_over,
    poly_discriminant,
    residue_degree_gcd,
    signature,
    splitting_type,
    zeta_partial,
)


# --- small oracles -------------------------------------------------------


def roots_mod_p(coeffs, p):
    return [x for x in range(p) if sum(c * x**i for i, c in enumerate(coeffs)) % p == 0]


def polymul_mod(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def polymod(a, b, p):
    a = [x % p for x in a]
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        q = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - q * c) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def irreducible_by_trial(f, p):
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not polymod(f, list(low) + [1], p):
                return False
    return True


def sylvester_discriminant(coeffs):
    f = [Fraction(c) for c in coeffs]
    n = len(f) - 1
    g = [i * c for i, c in enumerate(f)][1:]
    m = n - 1
    size = n + m
    rows = []
    for i in range(m):
        rows.append([Fraction(0)] * i + f[::-1] + [Fraction(0)] * (size - n - 1 - i))
    for i in range(n):
        rows.append([Fraction(0)] * i + g[::-1] + [Fraction(0)] * (size - m - 1 - i))
    det = Fraction(1)
    for c in range(size):
        piv = next((r for r in range(c, size) if rows[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, size):
            k = rows[r][c] / rows[c][c]
            rows[r] = [x - k * y for x, y in zip(rows[r], rows[c])]
    return int((-1) ** (n * (n - 1) // 2) * det / f[-1])


# --- factorization -------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_factors_multiply_back_and_are_irreducible(p):
    rng = random.Random(p)
    for _ in range(40):
        n = rng.randint(2, 5)
        f = [rng.randrange(-9, 10) for _ in range(n)] + [1]
        prod = [1]
        for fac, mult in irreducible_factors_mod_p(f, p):
            assert irreducible_by_trial(list(fac), p)
            for _ in range(mult):
                prod = polymul_mod(prod, list(fac), p)
        assert prod == [c % p for c in f]


def test_linear_factor_count_matches_root_count():
    rng = random.Random(7)
    for _ in range(60):
        p = rng.choice([3, 5, 7, 11, 13])
        f = [rng.randrange(-20, 21) for _ in range(4)] + [1]
        degrees = factor_mod_p(f, p)
        distinct = {fac for fac, _ in irreducible_factors_mod_p(f, p) if len(fac) == 2}
        assert len(distinct) == len(roots_mod_p(f, p))
        assert sum(d * c for d, c in degrees.items()) == 4


def test_composite_modulus_rejected():
    with pytest.raises(CompositeModulus):
        factor_mod_p([1, 0, 1], 9)


def test_cube_root_two_splitting():
    # x^3 - 2 has the single root 3 mod 5, and no roots mod 7
    assert factor_mod_p([-2, 0, 0, 1], 5) == Counter({1: 1, 2: 1})
    assert factor_mod_p([-2, 0, 0, 1], 7) == Counter({3: 1})
    assert roots_mod_p([-2, 0, 0, 1], 5) == [3]
    assert roots_mod_p([-2, 0, 0, 1], 7) == []


# --- discriminant and signature ------------------------------------------


def test_discriminant_matches_sylvester():
    assert poly_discriminant([-2, 0, 0, 1]) == sylvester_discriminant([-2, 0, 0, 1]) == -108
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(2, 6)
        f = [rng.randrange(-12, 13) for _ in range(n)] + [1]
        assert poly_discriminant(f) == sylvester_discriminant(f)


def test_octic_discriminant_magnitude():
    for a in (799, 12784):
        d = poly_discriminant([-a] + [0] * 7 + [1])
        assert abs(d) == 8**8 * a**7


def test_signature_against_numpy_roots():
    rng = random.Random(11)
    checked = 0
    while checked < 100:
        n = rng.randint(1, 7)
        f = [rng.randrange(-10, 11) for _ in range(n)] + [1]
        if poly_discriminant(f) == 0:
            with pytest.raises(NonSquarefree):
                signature(f)
            continue
        roots = np.roots(f[::-1])
        imag = np.abs(roots.imag)
        if np.any((imag > 1e-9) & (imag < 1e-5)):
            continue  # numerically ambiguous, not a fair oracle
        r1 = int(np.sum(imag <= 1e-9))
        assert signature(f) == (r1, (n - r1) // 2)
        checked += 1


def test_octic_signatures(fields):
    assert fields["oct799"].signature == (2, 3)
    assert fields["oct12784"].signature == (2, 3)


# --- field specs ---------------------------------------------------------


def test_reducible_minpoly_rejected():
    with pytest.raises(ReducibleMinpoly):
        NumberFieldSpec("bad", (-1, 0, 1))
    with pytest.raises(ReducibleMinpoly):
        NumberFieldSpec("bad", (4, 0, 0, 0, 1))  # (x^2+2x+2)(x^2-2x+2)


def test_irreducible_everywhere_reducible_mod_p_accepted():
    spec = NumberFieldSpec("z8", (1, 0, 0, 0, 1))
    assert spec.signature == (0, 2)


def test_bad_local_data_rejected():
    with pytest.raises(InvalidFieldSpec):
        NumberFieldSpec("Qi", (1, 0, 1), ramified={2: [(1, 1)]})
    with pytest.raises(InvalidFieldSpec):
        NumberFieldSpec("x", (1, 0, 2))  # not monic
    with pytest.raises(InvalidFieldSpec):
        NumberFieldSpec.from_json({"minpoly": [1, 0, 1]})


def test_field_json_round_trip(fields):
    for spec in fields.values():
        doc = json.loads(json.dumps(spec.to_json()))
        assert NumberFieldSpec.from_json(doc) == spec


# --- splitting -----------------------------------------------------------


def test_splitting_statuses(fields):
    qi = fields["Qi"]
    assert splitting_type(qi, 5).degrees == (1, 1)
    assert splitting_type(qi, 7).degrees == (2,)
    s = splitting_type(qi, 2)
    assert s.status is SplitStatus.RAMIFIED_USER_SUPPLIED
    assert s.local_degrees == (2,)
    assert splitting_type(fields["oct799"], 17).status is SplitStatus.UNDETERMINED
    assert residue_degree_gcd(fields["oct799"], 17) is None


def test_local_degrees_sum_to_field_degree(fields):
    for spec in fields.values():
        for p in (2, 3, 5, 7, 11, 13, 101):
            s = splitting_type(spec, p)
            if s.determined:
                assert sum(s.local_degrees) == spec.degree


def test_places_over_attach_factors(fields):
    slots = places_over(fields["cubic2"], 5)
    assert [pl for pl, _ in slots] == [Place.finite(5, 0), Place.finite(5, 1)]
    assert [len(f) - 1 for _, f in slots] == [1, 2]


# --- zeta ----------------------------------------------------------------


def _contains(z, exact_value, dps=60):
    mpmath.mp.dps = dps
    v = mpmath.mpf(_numerics.mpf_to_fraction(z.value).numerator) / _numerics.mpf_to_fraction(z.value).denominator
    return abs(v - exact_value) <= mpmath.mpf(str(z.error_bound))


def test_zeta_Q_encloses_pi_squared_over_six(fields):
    mpmath.mp.dps = 60
    for bound in (100, 1000, 20000):
        z = zeta_partial(fields["Q"], 2, bound)
        assert _contains(z, mpmath.pi**2 / 6)


def test_zeta_gaussian_encloses_zeta_times_catalan(fields):
    mpmath.mp.dps = 60
    target = mpmath.pi**2 / 6 * mpmath.catalan
    for bound in (100, 5000):
        assert _contains(zeta_partial(fields["Qi"], 2, bound), target)


def test_zeta_Q_at_three(fields):
    mpmath.mp.dps = 60
    assert _contains(zeta_partial(fields["Q"], 3, 500), mpmath.zeta(3))


def test_zeta_exact_truncation(fields):
    z = zeta_partial(fields["Q"], 2, 2)
    assert z.exact == Fraction(4, 3)
    # direct Euler factors up to 30
    expected = math.prod((Fraction(p * p, p * p - 1) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)), start=Fraction(1))
    assert zeta_partial(fields["Q"], 2, 30).exact == expected


def test_zeta_error_shrinks_with_bound(fields):
    errs = [zeta_partial(fields["Qi"], 2, b).error_bound for b in (100, 1000, 10000)]
    assert errs[0] > errs[1] > errs[2]


def test_zeta_with_undetermined_primes_still_encloses(fields):
    z = zeta_partial(fields["oct799"], 2, 200)
    assert z.undetermined == (2, 17, 47)
    assert z.error_bound > 0


def test_zeta_json_round_trip(fields):
    z = zeta_partial(fields["cubic2"], 2, 300)
    doc = json.loads(json.dumps(z.to_json()))
    back = ZetaEstimate.from_json(doc)
    assert back.value == z.value and back.error_bound == z.error_bound
    assert back.to_json() == z.to_json()


def test_precision_limits(fields):
    with pytest.raises(PrecisionUnattainable):
        zeta_partial(fields["Q"], 2, 100, precision_bits=8)
