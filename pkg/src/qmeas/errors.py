"""Exception types shared across the package."""


class QmeasError(Exception):
    """Base class for every error raised by this package."""


# -- shape and dimension problems -------------------------------------------

class DimensionMismatch(QmeasError):
    """Operands have incompatible dimensions."""


class NonSquare(DimensionMismatch):
    """A square matrix was required."""


class BadDimension(DimensionMismatch):
    """Dimension is not a power of two (not a qubit register)."""


class BadSplit(DimensionMismatch):
    """Bipartition sizes do not multiply to the full dimension."""


class BadTarget(QmeasError):
    """Target qubit selection is invalid for the operation."""


class BadPartition(QmeasError):
    """Index sets do not form a disjoint exact cover."""


class BadSelector(QmeasError):
    """Unknown error selector."""


# -- structural validation failures ------------------------------------------

class NotHermitian(QmeasError):
    """Matrix is not Hermitian within tolerance."""


class NotPsd(QmeasError):
    """Matrix is not positive semidefinite within tolerance."""


class NotUnitary(QmeasError):
    """Matrix is not unitary within tolerance."""


class NotOrthonormal(QmeasError):
    """Vectors are not pairwise orthonormal within tolerance."""


class NotNormalized(QmeasError):
    """State vector norm deviates from 1 beyond tolerance."""


class NotBalanced(QmeasError):
    """Measurement does not split into equal-rank blocks."""


class InvalidState(QmeasError):
    """Density matrix fails Hermitian/PSD/unit-trace validation."""


class InvalidMeasurement(QmeasError):
    """Projector or effect set violates its defining constraints."""


class InvalidChannel(QmeasError):
    """Kraus set violates the completeness relation."""


class InvalidCircuit(QmeasError):
    """Circuit references bad qubits, undefined bits, or non-unitary gates."""


# -- probabilistic and run-time conditions -----------------------------------

class ProbabilityMismatch(QmeasError):
    """Ensemble probabilities do not sum to one."""


class BadProbabilities(QmeasError):
    """Probability arguments are negative or do not normalize."""


class ZeroProbabilityOutcome(QmeasError):
    """Conditioning on an outcome whose probability is numerically zero."""


class IdenticalStates(QmeasError):
    """Discrimination requested between states equal up to phase."""


class TooManyBranches(QmeasError):
    """Exact branch enumeration would exceed the classical-bit budget."""


# -- experiment front end -----------------------------------------------------

class ExperimentError(QmeasError):
    """Base class for experiment-file problems."""


class ExperimentParseError(ExperimentError):
    """Experiment file is not syntactically valid."""


class ExperimentValidationError(ExperimentError):
    """Experiment file parsed but violates a structural constraint."""
