"""Exception hierarchy.

Every error carries an ``exit_code`` that the command-line front-end maps
directly onto its process status: 2 for bad input or violated
preconditions, 3 when two pipelines that must agree do not.
"""


class StringyError(Exception):
    exit_code = 4


class InputError(StringyError, ValueError):
    exit_code = 2


class VerificationError(StringyError):
    exit_code = 3


# exact core
class NonSquare(InputError):
    pass


class Singular(InputError):
    pass


class ParseError(InputError):
    pass


# polytopes
class EmptyPolynomial(InputError):
    pass


class DimMismatch(InputError):
    pass


class NotFullDim(InputError):
    pass


class NotInterior(InputError):
    pass


# triangulations
class DegenerateLift(InputError):
    pass


class RetriesExhausted(InputError):
    pass


# cayley
class NotSaturated(InputError):
    def __init__(self, message, diagonal=()):
        super().__init__(message)
        self.diagonal = tuple(diagonal)


class RankDeficient(InputError):
    pass


class NonPositiveWeight(InputError):
    pass


# amplitudes
class ParameterOnWall(InputError):
    pass


class NotPointed(InputError):
    pass


# critical points
class DegenerateCritical(InputError):
    pass


class PoleAtCritical(InputError):
    pass


class IncompleteRootSet(VerificationError):
    pass


class NonRealResult(VerificationError):
    pass


# residue pairing
class SingularResidue(InputError):
    pass


class NonGenericArrangement(InputError):
    pass


class ZeroWeightAtVertex(InputError):
    pass


class NonZeroWeightSum(InputError):
    pass


# quadrature
class NoConvergence(InputError):
    pass


class DivergentTable(VerificationError):
    pass


# gamma series
class NonUnimodular(InputError):
    pass


class IntegralParameter(InputError):
    pass


class NotInDomain(InputError):
    pass
