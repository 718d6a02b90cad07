"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or directly
with ``python3 tests/test_acceptance.py``.  The random seed can be overridden
through ``ADELE_LAB_SEED``.
"""

import os
import random
import sys
import time
from fractions import Fraction

import mpmath

from adele_lab import _numerics
from adele_lab.brauer import (
    BrauerClass,
    inverse,
    is_trivial,
    is_valid,
    random_class,
    restrict_from_Q,
    tensor,
    transport,
    validate,
)
from adele_lab.equivalence import (
    ConsistentUpTo,
    Refuted,
    build_place_matching,
    check_gcd_equivalence,
    check_local_equivalence,
    gcd_witness_algebra,
)
from adele_lab.fieldlab import Place, builtin_fields, signature, zeta_partial
from adele_lab.genus import brute_force_theta_max, isobound
from adele_lab.orders import (
    OrderData,
    TreeVertex,
    is_maximal,
    level_ideal,
    random_vertex,
    transport_order,
    tree_ball,
    tree_distance,
    tree_neighbors,
)
from adele_lab.volume import (
    RamDatum,
    VolumeInput,
    _lambda_closed,
    _lambda_quotient,
    covolume_cf,
    exponent_product_interval,
    volume_sl_n_d,
)

SEED = int(os.environ.get("ADELE_LAB_SEED", "1729"))
FIELDS = builtin_fields()


def report(n: int, title: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  [{n:2d}] {title}: {detail}")
    assert ok, f"criterion {n} failed: {detail}"


def test_01_locally_equivalent_octics():
    t0 = time.perf_counter()
    sigs = (signature(FIELDS["oct799"].minpoly), signature(FIELDS["oct12784"].minpoly))
    verdict = check_local_equivalence(FIELDS["oct799"], FIELDS["oct12784"], 5000)
    elapsed = time.perf_counter() - t0
    ok = sigs == ((2, 3), (2, 3)) and isinstance(verdict, ConsistentUpTo) and verdict.bound == 5000 and elapsed < 60
    report(1, "x^8-799 vs x^8-12784", ok,
           f"signatures {sigs}, {verdict.kind}({getattr(verdict, 'bound', '-')}) skipped {getattr(verdict, 'skipped_primes', ())}, {elapsed:.2f}s")


def test_02_gcd_refutation_and_witness():
    K, Q = FIELDS["cubic2"], FIELDS["Q"]
    verdict = check_gcd_equivalence(K, Q, 100)
    w = gcd_witness_algebra(K, Q, 7)
    expected = BrauerClass.of("Q", [(Place.finite(p), Fraction(1, 3)) for p in (7, 13, 19)])
    ok = (
        isinstance(verdict, Refuted)
        and verdict.prime == 7
        and w == expected
        and not validate(w)
        and is_trivial(restrict_from_Q(w, K))
        and not is_trivial(restrict_from_Q(w, Q))
    )
    report(2, "gcd refutation of Q(cbrt 2) vs Q", ok, f"verdict prime {verdict.prime}, witness {w}")


def _random_Q_class(rng, primes):
    return random_class(FIELDS["Q"], rng, primes, max_support=4)


def test_03_brauer_laws_and_transport():
    rng = random.Random(SEED)
    pairs = [("Qi", "Qi"), ("oct799", "oct12784"), ("cubic2", "cubic2")]
    failures = []
    counts = []
    for left, right in pairs:
        K, K2 = FIELDS[left], FIELDS[right]
        phi = build_place_matching(K, K2, 300)
        primes = sorted(phi.finite_matching)[:40]
        classes = [random_class(K, rng, primes) for _ in range(120)]
        trivial = BrauerClass.trivial(K.label)
        for a, b in zip(classes, classes[1:] + classes[:1]):
            if not (is_valid(a, K.signature) and tensor(a, trivial) == a and is_trivial(tensor(a, inverse(a)))
                    and tensor(a, b) == tensor(b, a)):
                failures.append(f"group law {left}: {a}, {b}")
            ta, tb = transport(a, phi), transport(b, phi)
            if transport(tensor(a, b), phi) != tensor(ta, tb) or transport(inverse(a), phi) != inverse(ta):
                failures.append(f"homomorphism {left}: {a}, {b}")
            if transport(ta, phi.inverse()) != a or not is_valid(ta, K2.signature):
                failures.append(f"round trip {left}: {a}")
        natural = 0
        for _ in range(60):
            B = _random_Q_class(rng, primes)
            if transport(restrict_from_Q(B, K), phi) != restrict_from_Q(B, K2):
                failures.append(f"naturality {left}: {B}")
            natural += 1
        counts.append(f"{left}->{right}: {len(classes)} classes, {natural} restrictions")
    report(3, "Brauer group laws and transport", not failures, "; ".join(counts) if not failures else failures[0])


def test_04_lambda_forms_agree():
    checked, bad = 0, []
    for q in (2, 3, 4, 5):
        for nd in range(2, 13):
            for d_v in range(2, nd + 1):
                if nd % d_v or nd // d_v < 2:
                    continue
                checked += 1
                if Fraction(_lambda_closed(q, nd, d_v)) != _lambda_quotient(q, nd, d_v):
                    bad.append((q, nd, d_v))
    report(4, "lambda closed form = quotient form", not bad and checked > 0, f"{checked} cases exact, {len(bad)} mismatches")


def test_05_quaternion_volume():
    z = zeta_partial(FIELDS["Q"], 2, 2 * 10**5)
    r = volume_sl_n_d(VolumeInput(1, 1, 1, 2, (RamDatum(2, 2), RamDatum(3, 2)), (z,)))
    value = _numerics.mpf_to_fraction(r.value)
    err = Fraction(r.error_bound)
    mpmath.mp.dps = 50
    oracle = mpmath.zeta(2) / (4 * mpmath.pi**2) * 2
    oracle_gap = abs(mpmath.mpf(value.numerator) / value.denominator - oracle)
    total = abs(value - Fraction(1, 12)) + err
    ok = total <= Fraction(1, 10**6) and oracle_gap <= mpmath.mpf(str(r.error_bound)) and abs(oracle - mpmath.mpf(1) / 12) < mpmath.mpf(10) ** -40
    report(5, "quaternion volume over Q is 1/12", ok, f"value {float(value):.9f} +/- {r.error_bound}, |v-1/12|+err = {float(total):.2e}")


def test_06_covolume_ratio():
    z1 = zeta_partial(FIELDS["oct799"], 2, 5000)
    z2 = zeta_partial(FIELDS["oct12784"], 2, 5000)
    same_zeta = z1.value == z2.value and z1.error_bound == z2.error_bound
    disc = 2**24 * 799**7  # any shared value; the ratio does not depend on it
    a = covolume_cf(disc, z1, 64)
    b = covolume_cf(disc, z2, 128)
    ratio = _numerics.mpf_to_fraction(a.value) / _numerics.mpf_to_fraction(b.value)
    report(6, "covolume ratio at extension degrees 64 and 128", same_zeta and ratio == 2, f"equal zeta inputs {same_zeta}, ratio {ratio}")


def test_07_exponent_product_thresholds():
    lo28, hi28 = exponent_product_interval(28)
    lo29, _ = exponent_product_interval(29)
    lows = {d: exponent_product_interval(d)[0] for d in range(2, 101)}
    d_min = min(lows, key=lows.get)
    # independent check through log-gamma at high working precision
    mpmath.mp.dps = 60

    def log_e(d):
        return sum(mpmath.loggamma(i + 1) - (i + 1) * mpmath.log(2 * mpmath.pi) for i in range(1, d))

    oracle_ok = log_e(28) < 0 < log_e(29) and min(log_e(d) for d in range(2, 101)) > -33 * mpmath.log(10)
    ok = hi28 <= 1 < lo29 and lows[d_min] > Fraction(1, 10**33) and oracle_ok
    report(7, "exponent product crosses 1 at 28/29, stays above 1e-33", ok,
           f"E(28) <= {float(hi28):.6f}, E(29) >= {float(lo29):.4g}, min at d={d_min} >= {float(lows[d_min]):.4g}")


def test_08_isobound_vs_oracle():
    t0 = time.perf_counter()
    got = {n: brute_force_theta_max(n)[0] for n in (9, 27, 81, 243)}
    small = {n: brute_force_theta_max(n)[0] for n in range(1, 9)}
    elapsed = time.perf_counter() - t0
    ok = all(got[n] == isobound(n)[1] for n in got) and all(v == 1 for v in small.values()) and elapsed < 120
    report(8, "brute-force theta max equals isobound", ok, f"{got}, N<=8 -> {set(small.values())}, {elapsed:.2f}s")


def test_09_order_transport():
    rng = random.Random(SEED + 9)
    phi = build_place_matching(FIELDS["oct799"], FIELDS["oct12784"], 300)
    primes = sorted(phi.finite_matching)[:40]
    places = [pl for pl in phi.matched_places() if pl.is_finite and pl.p in primes]
    bad, maximal = [], 0
    for i in range(100):
        c = random_class(FIELDS["oct799"], rng, primes)
        k = 0 if i % 4 == 0 else rng.randint(1, 4)
        devs = tuple((pl, rng.randint(0, 3), f"t{rng.randrange(10)}") for pl in rng.sample(places, k))
        order = OrderData(c, devs)
        moved = transport_order(order, phi, transport(c, phi))
        if level_ideal(moved) != level_ideal(order).relabel(phi):
            bad.append(order)
        if is_maximal(moved) != is_maximal(order):
            bad.append(order)
        maximal += is_maximal(order)
    report(9, "order transport relabels level ideals", not bad, f"100 orders ({maximal} maximal), {len(bad)} failures")


def test_10_tree_metric():
    rng = random.Random(SEED + 10)
    failures = []
    sizes = {}
    for p in (2, 3, 5):
        for _ in range(200):
            u, v, w = (random_vertex(rng, p) for _ in range(3))
            duv, dvw, duw = tree_distance(u, v), tree_distance(v, w), tree_distance(u, w)
            if tree_distance(u, u) != 0 or duv != tree_distance(v, u) or duw > duv + dvw or (duv == 0) != (u == v):
                failures.append((p, u, v, w))
            if len(set(tree_neighbors(u))) != p + 1:
                failures.append((p, u))
        sizes[p] = len(tree_ball(TreeVertex.standard(p), 3))
        if sizes[p] != 1 + (p + 1) * (1 + p + p * p):
            failures.append((p, "ball", sizes[p]))
    report(10, "tree distance axioms, degrees and balls", not failures, f"radius-3 balls {sizes}, {len(failures)} failures")


def main() -> int:
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
