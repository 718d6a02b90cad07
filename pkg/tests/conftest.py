import random

import pytest
import sympy

from adele_lab.equivalence import build_place_matching
from adele_lab.fieldlab import builtin_fields

SEED = 20240611


@pytest.fixture(scope="session")
def fields():
    return builtin_fields()


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def octic_matching(fields):
    return build_place_matching(fields["oct799"], fields["oct12784"], 400)


@pytest.fixture(scope="session")
def small_primes():
    return list(sympy.primerange(3, 200))
