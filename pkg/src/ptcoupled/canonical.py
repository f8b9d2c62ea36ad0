"""Canonical transformation to normal modes and the shifted diagonal form.

The new variables are::

    p1 = a P1 + b P2,   p2 = c P1 + d P2,
    x1 = e X1 + f X2,   x2 = g X1 + h X2

with ``c = zeta a, d = -zeta b, e = 1/(2a), f = 1/(2b), g = zeta/(2a),
h = -zeta/(2b)``.  After completing the square each mode is an oscillator in a
complex-shifted coordinate ``XX_j = X_j + i I_j``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .model import CriticalCouplingError, ModelParams, SYMBOLS, build_hamiltonian

BRANCH = "principal"

# ordering of phase-space vectors used by the 4x4 maps below
PHASE_SPACE_ORDER = ("x1", "x2", "p1", "p2")


@dataclass(frozen=True)
class CanonicalSolution:
    a: Number
    b: Number
    c: Number
    d: Number
    e: Number
    f: Number
    g: Number
    h: Number
    zeta: int

    def matrix(self, dtype=float) -> np.ndarray:
        """Map from (X1, X2, P1, P2) to (x1, x2, p1, p2)."""
        return np.array(
            [
                [self.e, self.f, 0, 0],
                [self.g, self.h, 0, 0],
                [0, 0, self.a, self.b],
                [0, 0, self.c, self.d],
            ],
            dtype=dtype,
        )

    def inverse_matrix(self, dtype=float) -> np.ndarray:
        """Map from (x1, x2, p1, p2) to (X1, X2, P1, P2)."""
        a, b, z = self.a, self.b, self.zeta
        return np.array(
            [
                [a, z * a, 0, 0],
                [b, -z * b, 0, 0],
                [0, 0, 1 / (2 * a), z / (2 * a)],
                [0, 0, 1 / (2 * b), -z / (2 * b)],
            ],
            dtype=dtype,
        )


def symplectic_form(dtype=float) -> np.ndarray:
    eye = np.eye(2, dtype=dtype)
    zero = np.zeros((2, 2), dtype=dtype)
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_defect(matrix: np.ndarray) -> float:
    """max |M^T J M - J| for a 4x4 map; zero for a canonical transformation."""
    J = symplectic_form(matrix.dtype)
    return float(np.max(np.abs(matrix.T @ J @ matrix - J)))


def solve_canonical(params: ModelParams) -> CanonicalSolution:
    a, b, z = params.a, params.b, params.zeta
    # ModelParams already rejects a == 0 or b == 0
    return CanonicalSolution(
        a=a, b=b,
        c=z * a, d=-z * b,
        e=1 / (2 * a), f=1 / (2 * b),
        g=z / (2 * a), h=-z / (2 * b),
        zeta=z,
    )


@dataclass(frozen=True)
class DiagonalForm:
    """``H = k1 P1^2 + v1 XX1^2 + k2 P2^2 + v2 XX2^2 + const_shift``.

    ``omega1**2 == 1 + zeta*eps`` and ``omega2**2 == 1 - zeta*eps``; each mode
    contributes ``omega_j (2 n_j + 1)`` to the energy.
    """

    omega1: complex
    omega2: complex
    kinetic1: Number
    kinetic2: Number
    potential1: Number
    potential2: Number
    I1: complex
    I2: complex
    const_shift: complex
    branch: str = BRANCH

    @property
    def frequencies(self) -> tuple[complex, complex]:
        return self.omega1, self.omega2

    @property
    def shifts(self) -> tuple[complex, complex]:
        return self.I1, self.I2

    def is_real(self) -> bool:
        values = (self.omega1, self.omega2, self.I1, self.I2, self.const_shift)
        return all(complex(v).imag == 0 for v in values)


def diagonalize(params: ModelParams) -> DiagonalForm:
    eps, z = params.epsilon, params.zeta
    t1, t2 = params.tau1, params.tau2
    a, b = params.a, params.b
    if abs(eps) == 1:
        raise CriticalCouplingError(eps)
    plus = 1 + z * eps
    minus = 1 - z * eps
    return DiagonalForm(
        omega1=cmath.sqrt(plus),
        omega2=cmath.sqrt(minus),
        kinetic1=2 * a * a,
        kinetic2=2 * b * b,
        potential1=plus / (2 * a * a),
        potential2=minus / (2 * b * b),
        I1=complex(a * (t1 + z * t2) / plus),
        I2=complex(b * (t1 - z * t2) / minus),
        const_shift=complex((t1 * t1 + t2 * t2 - 2 * eps * t1 * t2) / (1 - eps * eps)),
    )


def original_shift(params: ModelParams, form: DiagonalForm | None = None) -> np.ndarray:
    """Real vector ``s`` with ``XX_j`` equal to ``X_j`` evaluated at ``x + i s``.

    The non-Hermitian Hamiltonian is the Hermitian one with ``x`` replaced by
    ``x + i s``, i.e. its eigenfunctions are centred at ``x = -i s``.
    """
    form = form or diagonalize(params)
    a, b, z = params.a, params.b, params.zeta
    u = form.I1 / a
    v = form.I2 / b
    return np.array([(u + v) / 2, z * (u - v) / 2]).real


def _add(table, key, value):
    table[key] = table.get(key, 0) + value


def expand_to_original(params: ModelParams, form: DiagonalForm | None = None) -> dict[str, complex]:
    """Expand the diagonal form back into the nine original-variable coefficients."""
    form = form or diagonalize(params)
    a, b, z = params.a, params.b, params.zeta
    out: dict[str, complex] = {k: 0j for k in SYMBOLS}

    # kinetic: k (mu p1 + nu p2)^2
    for k, (mu, nu) in (
        (form.kinetic1, (1 / (2 * a), z / (2 * a))),
        (form.kinetic2, (1 / (2 * b), -z / (2 * b))),
    ):
        _add(out, "p1^2", k * mu * mu)
        _add(out, "p2^2", k * nu * nu)
        _add(out, "p1p2", 2 * k * mu * nu)

    # potential: v (alpha x1 + beta x2 + i I)^2
    for v, (alpha, beta, shift) in (
        (form.potential1, (a, z * a, 1j * form.I1)),
        (form.potential2, (b, -z * b, 1j * form.I2)),
    ):
        _add(out, "x1^2", v * alpha * alpha)
        _add(out, "x2^2", v * beta * beta)
        _add(out, "x1x2", 2 * v * alpha * beta)
        _add(out, "x1", 2 * v * alpha * shift)
        _add(out, "x2", 2 * v * beta * shift)
        _add(out, "1", v * shift * shift)

    _add(out, "1", form.const_shift)
    return {k: complex(v) for k, v in out.items()}


def roundtrip_defect(params: ModelParams) -> float:
    expanded = expand_to_original(params)
    target = build_hamiltonian(params).table()
    return max(abs(expanded[k] - target[k]) for k in SYMBOLS)
