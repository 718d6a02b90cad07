"""Domain errors raised by adele_lab.

Every error carries a stable ``name`` (the class name) so the CLI can report it
verbatim and scripts can match on it.
"""


class AdeleLabError(Exception):
    """Base class for all domain errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


# fieldlab
class CompositeModulus(AdeleLabError):
    pass


class NonSquarefree(AdeleLabError):
    pass


class ReducibleMinpoly(AdeleLabError):
    pass


class InvalidFieldSpec(AdeleLabError):
    pass


class PrecisionUnattainable(AdeleLabError):
    pass


class MissingFieldDiscriminant(AdeleLabError):
    pass


# equivalence
class MatchingObstruction(AdeleLabError):
    def __init__(self, prime, message=None):
        self.prime = prime
        super().__init__(message or f"residue degree multisets differ at p={prime}")


class SignatureMismatch(AdeleLabError):
    pass


class SearchExhausted(AdeleLabError):
    def __init__(self, bound, message=None):
        self.bound = bound
        super().__init__(message or f"not enough auxiliary primes below {bound}")


class PreconditionGcd(AdeleLabError):
    pass


# brauer
class FieldMismatch(AdeleLabError):
    pass


class UndeterminedPrime(AdeleLabError):
    def __init__(self, prime, message=None):
        self.prime = prime
        super().__init__(message or f"splitting of p={prime} is undetermined")


class InvalidInput(AdeleLabError):
    pass


class OutOfMatchingRange(AdeleLabError):
    def __init__(self, place, message=None):
        self.place = place
        super().__init__(message or f"place {place} is outside the verified matching")


class OddQuaternionicRank(AdeleLabError):
    pass


# orders
class ClassMismatch(AdeleLabError):
    pass


class PrimeMismatch(AdeleLabError):
    pass


# volume
class DegreeMismatch(AdeleLabError):
    pass


class MissingZeta(AdeleLabError):
    def __init__(self, s, message=None):
        self.s = s
        super().__init__(message or f"no zeta estimate supplied for s={s}")


class DegenerateGroup(AdeleLabError):
    pass


# genus
class AlphaTooSmall(AdeleLabError):
    pass


class SearchSpaceTooLarge(AdeleLabError):
    pass
