"""Parameter records and coefficient tables for the two coupled oscillator models.

Model 1::

    H = (p1^2 + x1^2) + (p2^2 + x2^2 + 2i x2) + 2 eps x1 x2

Model 2::

    H = (p1^2 + x1^2 + 2i tau1 x1) + (p2^2 + x2^2 + 2i tau2 x2) + 2 eps x1 x2

Model 1 is stored as the ``tau1 = 0, tau2 = 1`` instance of Model 2.  Numbers
are kept in whatever type the caller passes, so ``fractions.Fraction`` inputs
give exact coefficient tables.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Number

SYMBOLS = ("p1^2", "p2^2", "p1p2", "x1^2", "x2^2", "x1x2", "x1", "x2", "1")

DEFAULT_GAUGE = 1 / math.sqrt(2)


class ModelError(ValueError):
    """Invalid model parameters or an operation that does not apply to them."""


class CriticalCouplingError(ModelError):
    """Raised at |epsilon| = 1, where the normal-mode form does not exist."""

    def __init__(self, epsilon):
        super().__init__(f"critical coupling |epsilon| = 1 (epsilon={epsilon!r})")
        self.epsilon = epsilon


class RegimeError(ModelError):
    """An operation defined only in the unbroken regime was called outside it."""


class Model(enum.Enum):
    MODEL1 = 1
    MODEL2 = 2


def _finite(value) -> bool:
    try:
        return math.isfinite(value)
    except TypeError:
        return False


@dataclass(frozen=True)
class ModelParams:
    model: Model
    epsilon: Number
    tau1: Number = 0
    tau2: Number = 1
    a: Number = DEFAULT_GAUGE
    b: Number = DEFAULT_GAUGE
    zeta: int = 1

    def __post_init__(self):
        if not isinstance(self.model, Model):
            object.__setattr__(self, "model", Model(self.model))
        for name in ("epsilon", "tau1", "tau2", "a", "b"):
            if not _finite(getattr(self, name)):
                raise ModelError(f"{name} must be a finite real number")
        if self.a == 0 or self.b == 0:
            raise ModelError("gauge parameters a and b must be non-zero")
        if self.zeta not in (1, -1):
            raise ModelError("zeta must be +1 or -1")
        if self.model is Model.MODEL1 and (self.tau1 != 0 or self.tau2 != 1):
            raise ModelError("Model 1 fixes tau1 = 0 and tau2 = 1")

    @classmethod
    def model1(cls, epsilon, *, a=DEFAULT_GAUGE, b=DEFAULT_GAUGE, zeta=1) -> "ModelParams":
        return cls(Model.MODEL1, epsilon, 0, 1, a, b, zeta)

    @classmethod
    def model2(cls, epsilon, tau1, tau2, *, a=DEFAULT_GAUGE, b=DEFAULT_GAUGE, zeta=1) -> "ModelParams":
        return cls(Model.MODEL2, epsilon, tau1, tau2, a, b, zeta)

    def replace(self, **changes) -> "ModelParams":
        fields = dict(model=self.model, epsilon=self.epsilon, tau1=self.tau1, tau2=self.tau2,
                      a=self.a, b=self.b, zeta=self.zeta)
        fields.update(changes)
        return ModelParams(**fields)

    def as_dict(self) -> dict:
        return {
            "model": self.model.value,
            "epsilon": float(self.epsilon),
            "tau1": float(self.tau1),
            "tau2": float(self.tau2),
            "a": float(self.a),
            "b": float(self.b),
            "zeta": self.zeta,
        }


@dataclass(frozen=True)
class HamiltonianSpec:
    """Coefficient table of a two-mode quadratic Hamiltonian.

    The linear terms carry purely imaginary coefficients; only their imaginary
    parts are stored (``x1_imag`` multiplies ``i x1``).
    """

    p1sq: Number
    p2sq: Number
    x1sq: Number
    x2sq: Number
    x1x2: Number
    x1_imag: Number
    x2_imag: Number
    constant: Number = 0
    p1p2: Number = 0

    def table(self) -> dict[str, complex]:
        return {
            "p1^2": complex(self.p1sq),
            "p2^2": complex(self.p2sq),
            "p1p2": complex(self.p1p2),
            "x1^2": complex(self.x1sq),
            "x2^2": complex(self.x2sq),
            "x1x2": complex(self.x1x2),
            "x1": 1j * self.x1_imag,
            "x2": 1j * self.x2_imag,
            "1": complex(self.constant),
        }

    def without_constant(self) -> "HamiltonianSpec":
        return HamiltonianSpec(self.p1sq, self.p2sq, self.x1sq, self.x2sq, self.x1x2,
                               self.x1_imag, self.x2_imag, 0, self.p1p2)

    def pt_image(self) -> dict[str, complex]:
        """Table after x -> -x, p -> -p and i -> -i."""
        # degree-2 monomials are even under the sign flip
        odd = {"x1", "x2"}
        return {k: (-v.conjugate() if k in odd else v.conjugate()) for k, v in self.table().items()}

    @property
    def is_hermitian(self) -> bool:
        return self.x1_imag == 0 and self.x2_imag == 0


def build_hamiltonian(params: ModelParams) -> HamiltonianSpec:
    return HamiltonianSpec(
        p1sq=1, p2sq=1, x1sq=1, x2sq=1,
        x1x2=2 * params.epsilon,
        x1_imag=2 * params.tau1,
        x2_imag=2 * params.tau2,
    )


def is_critical(epsilon, tol: float = 0.0) -> bool:
    return abs(abs(epsilon) - 1) <= tol


def hermitian_counterpart(params: ModelParams) -> HamiltonianSpec:
    """Hermitian Hamiltonian with the same spectrum as Model 1.

    Drops the ``2i x2`` term and adds the constant ``1/(1 - eps^2)``.
    """
    if params.model is not Model.MODEL1:
        raise ModelError("the Hermitian counterpart is only defined for Model 1")
    eps = params.epsilon
    if is_critical(eps):
        raise CriticalCouplingError(eps)
    return HamiltonianSpec(
        p1sq=1, p2sq=1, x1sq=1, x2sq=1,
        x1x2=2 * eps,
        x1_imag=0, x2_imag=0,
        constant=1 / (1 - eps * eps),
    )
