import json
from fractions import Fraction

import mpmath
import pytest

from adele_lab import _numerics
from adele_lab.brauer import BrauerClass, random_class, transport
from adele_lab.errors import DegenerateGroup, DegreeMismatch, MissingFieldDiscriminant, MissingZeta
from adele_lab.fieldlab import Place, zeta_partial
from adele_lab.volume import (
    RamDatum,
    VolumeInput,
    covolume_cf,
    exponent_product,
    exponent_product_interval,
    lambda_factor,
    ram_data,
    volume_input_for,
    volume_sl_n_d,
)

HALF = Fraction(1, 2)


def quaternion_input(fields, bound=10**5, bits=128):
    return VolumeInput(1, 1, 1, 2, (RamDatum(2, 2), RamDatum(3, 2)), (zeta_partial(fields["Q"], 2, bound, bits),), bits)


def test_lambda_examples():
    assert lambda_factor(2, 2, 2) == 1
    assert lambda_factor(2, 3, 3) == 3
    assert lambda_factor(2, 4, 2) == (2 - 1) * (2**3 - 1) == 7
    assert lambda_factor(3, 2, 2) == 2
    with pytest.raises(DegreeMismatch):
        lambda_factor(2, 4, 3)


def test_lambda_monotone_in_q():
    for nd in range(2, 10):
        for d_v in range(2, nd + 1):
            if nd % d_v:
                continue
            values = [lambda_factor(q, nd, d_v) for q in (2, 3, 4, 5, 7, 8, 9)]
            assert values == sorted(values) and len(set(values)) == len(values)


def test_quaternion_volume_is_one_twelfth(fields):
    mpmath.mp.dps = 50
    oracle = mpmath.zeta(2) / (4 * mpmath.pi**2) * 2
    r = volume_sl_n_d(quaternion_input(fields))
    v = _numerics.mpf_to_fraction(r.value)
    assert abs(mpmath.mpf(v.numerator) / v.denominator - oracle) <= mpmath.mpf(str(r.error_bound))
    assert r.contains(Fraction(1, 12))
    names = [name for name, _, _ in r.breakdown]
    assert names == ["disc_power", "archimedean", "zeta_product", "lambda_product"]


def test_volume_errors(fields):
    z = zeta_partial(fields["Q"], 2, 100)
    with pytest.raises(DegenerateGroup):
        volume_sl_n_d(VolumeInput(1, 1, 1, 1, (), (z,)))
    with pytest.raises(MissingZeta):
        volume_sl_n_d(VolumeInput(1, 1, 1, 3, (RamDatum(2, 3),), (z,)))
    with pytest.raises(DegreeMismatch):
        volume_sl_n_d(VolumeInput(1, 1, 1, 2, (RamDatum(2, 3),), (z,)))


def test_error_bound_shrinks(fields):
    errs = [volume_sl_n_d(quaternion_input(fields, b)).error_bound for b in (100, 1000, 10000)]
    assert errs[0] > errs[1] > errs[2]
    coarse = volume_sl_n_d(quaternion_input(fields, 1000, 40)).error_bound
    fine = volume_sl_n_d(quaternion_input(fields, 1000, 200)).error_bound
    assert fine <= coarse


def test_volume_is_deterministic(fields):
    inp = quaternion_input(fields, 2000)
    a, b = volume_sl_n_d(inp), volume_sl_n_d(inp)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())


def test_half_integer_disc_power(fields):
    # nd = 2 over Q(i): |D|^(3/2) = 8
    c = BrauerClass.of("Qi", [(Place.finite(5, 0), HALF), (Place.finite(5, 1), HALF)])
    r = volume_sl_n_d(volume_input_for(fields["Qi"], c, 1, 2000))
    disc = next(v for name, v, _ in r.breakdown if name == "disc_power")
    assert abs(disc - 8) < mpmath.mpf(10) ** -30


def test_volume_input_json_round_trip(fields):
    inp = quaternion_input(fields, 500)
    back = VolumeInput.from_json(json.loads(json.dumps(inp.to_json())))
    assert back.to_json() == inp.to_json()
    assert volume_sl_n_d(back).value == volume_sl_n_d(inp).value


def test_missing_field_discriminant(fields):
    c = BrauerClass.of("oct799", [(Place.finite(3), HALF), (Place.finite(5), HALF)])
    with pytest.raises(MissingFieldDiscriminant):
        volume_input_for(fields["oct799"], c, 1, 100)


def test_ram_data_survives_transport(fields, octic_matching, rng):
    primes = sorted(octic_matching.finite_matching)[:25]
    for _ in range(30):
        c = random_class(fields["oct799"], rng, primes)
        assert ram_data(c, fields["oct799"]) == ram_data(transport(c, octic_matching), fields["oct12784"])


def test_covolume(fields):
    mpmath.mp.dps = 50
    z = zeta_partial(fields["Q"], 2, 3000)
    plain = covolume_cf(799, z, 1)
    zv = _numerics.mpf_to_fraction(z.value)
    oracle = mpmath.mpf(799) ** 1.5 * (mpmath.mpf(zv.numerator) / zv.denominator) / (2**12 * mpmath.pi**7)
    assert abs(plain.value - oracle) <= mpmath.mpf(str(plain.error_bound))
    a, b = covolume_cf(799, z, 64), covolume_cf(799, z, 128)
    assert a.value / b.value == 2
    assert covolume_cf(799, z, 3).value * 3 - plain.value < mpmath.mpf(10) ** -30


def test_exponent_product():
    mpmath.mp.dps = 50
    v, e = exponent_product(2)
    assert abs(v - 1 / (4 * mpmath.pi**2)) <= mpmath.mpf(str(e))
    lo28, hi28 = exponent_product_interval(28)
    lo29, _ = exponent_product_interval(29)
    assert hi28 <= 1 < lo29
    assert min(exponent_product_interval(d)[0] for d in range(2, 101)) > Fraction(1, 10**33)
