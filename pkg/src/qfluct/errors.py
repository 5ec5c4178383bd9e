"""Exception hierarchy for qfluct.

Errors are grouped by where they surface in the pipeline so the CLI can map
them to exit codes: parse errors (netlist text), model errors (unsupported or
degenerate circuit structure) and numerical errors (evaluation/decomposition
failures).
"""

from __future__ import annotations


class QfluctError(Exception):
    """Base class for all qfluct errors."""


# --- netlist parsing -------------------------------------------------------

class NetlistError(QfluctError):
    """Base class for netlist parsing errors."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class NetlistSemanticError(NetlistError):
    """Valid syntax but inconsistent circuit (unknown node, bad value, ...)."""


# --- model / structure -----------------------------------------------------

class ModelError(QfluctError):
    """Base class for circuit-structure errors."""


class ModeUnsupportedElement(ModelError):
    """Element not representable in the requested analysis mode."""


class SingularKinetic(ModelError):
    """Kinetic matrix not invertible; no Legendre transformation exists."""


class FreeParticleSector(ModelError):
    """J*h has a non-diagonal Jordan block (free-particle dynamics)."""


class NotPSD(ModelError):
    """Matrix expected to be symmetric positive semidefinite is not."""


class NoImmittance(ModelError):
    """det(1 - S) vanishes identically; no impedance matrix exists."""


class NoConstantEigenspace(ModelError):
    """No frequency-independent +1/-1 eigenspace; plain conversion applies."""


class NotLossless(ModelError):
    """Scattering matrix is not unitary on the imaginary axis."""


class NotLosslessPR(ModelError):
    """Matrix is not lossless positive-real."""


class ResidueNotPSD(ModelError):
    def __init__(self, message: str, eigenvalue: float | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


# --- numerical evaluation --------------------------------------------------

class NumericalError(QfluctError):
    """Base class for evaluation/quadrature errors."""


class PoleEvaluation(NumericalError):
    """Evaluation point is (numerically) a pole of the rational matrix."""


class ClusterAmbiguity(NumericalError):
    """Two distinct poles fall inside one clustering tolerance ball."""


class ResonantEvaluation(NumericalError):
    """s coincides with an eigenvalue of J*h."""


class ZeroFrequency(NumericalError):
    """Thermal occupation requested at omega = 0."""


class LossyMeasure(NumericalError):
    """Operation requires a purely atomic spectral measure."""


class QuadratureUnderResolved(NumericalError):
    """Doubling the quadrature order still changes the result beyond tol."""


class SpectralFormRequired(NumericalError):
    """Operation needs the spectral measure, not just time samples."""
