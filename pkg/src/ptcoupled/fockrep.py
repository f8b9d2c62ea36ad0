"""Truncated two-mode Fock-space representations and operator-identity checks.

Basis states ``|n1, n2>`` with ``0 <= n_j <= N`` are stored at flat index
``n1 * (N + 1) + n2``.  Single-mode quadratures are the standard ones,
``x = (a + a^dag)/sqrt(2)`` and ``p = i (a^dag - a)/sqrt(2)``.

Any product of at most ``k`` quadratures has exact matrix elements on states
with ``n_j <= N - k``, so identities are compared on that interior block
(``K = 4`` levels dropped per mode by default).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg

from .canonical import diagonalize, original_shift, solve_canonical
from .model import Model, ModelError, ModelParams, build_hamiltonian, hermitian_counterpart, HamiltonianSpec
from .spectrum import Regime, energy, level_indices, require_regime

INTERIOR_MARGIN = 4
TRUNCATION_CAP = 24
CONVERGENCE_TOL = 1e-6
DEFAULT_TOLERANCE = 1e-9


class Basis(enum.Enum):
    ORIGINAL = "OriginalOsc"
    DIAGONAL = "DiagonalModes"


class BasisMismatchError(ValueError):
    pass


class OracleError(RuntimeError):
    """The dense eigensolver failed."""


@dataclass(frozen=True, eq=False)
class FockOperator:
    matrix: np.ndarray
    truncation: int
    basis: Basis = Basis.ORIGINAL

    def __post_init__(self):
        dim = (self.truncation + 1) ** 2
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix for truncation {self.truncation}, "
                             f"got {self.matrix.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _check(self, other: "FockOperator"):
        if other.truncation != self.truncation:
            raise ValueError("operators have different truncations")
        if other.basis is not self.basis:
            raise BasisMismatchError(f"cannot combine {self.basis.value} with {other.basis.value}")

    def _wrap(self, matrix) -> "FockOperator":
        return FockOperator(matrix, self.truncation, self.basis)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return self._wrap(self.matrix @ other.matrix)

    def __add__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return self._wrap(self.matrix + other.matrix)
        return self._wrap(self.matrix + other * np.eye(self.dim))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return self._wrap(self.matrix - other.matrix)
        return self._wrap(self.matrix - other * np.eye(self.dim))

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, scalar):
        return self._wrap(scalar * self.matrix)

    __rmul__ = __mul__

    def dag(self) -> "FockOperator":
        return self._wrap(self.matrix.conj().T)

    def interior(self, margin: int = INTERIOR_MARGIN) -> np.ndarray:
        idx = interior_indices(self.truncation, margin)
        return self.matrix[np.ix_(idx, idx)]


def commutator(A: FockOperator, B: FockOperator) -> FockOperator:
    return A @ B - B @ A


def identity(truncation: int, basis: Basis = Basis.ORIGINAL) -> FockOperator:
    return FockOperator(np.eye((truncation + 1) ** 2, dtype=complex), truncation, basis)


def mode_numbers(truncation: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(truncation + 1)
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    return n1.ravel(), n2.ravel()


def basis_index(n1: int, n2: int, truncation: int) -> int:
    return n1 * (truncation + 1) + n2


def interior_indices(truncation: int, margin: int = INTERIOR_MARGIN) -> np.ndarray:
    top = truncation - margin
    if top < 0:
        raise ValueError(f"truncation {truncation} leaves no interior with margin {margin}")
    n1, n2 = mode_numbers(truncation)
    return np.flatnonzero((n1 <= top) & (n2 <= top))


@dataclass
class AntilinearRep:
    """Operator ``v -> L @ (conj(v) if conjugates else v)``."""

    linear_part: FockOperator
    conjugates: bool = True

    def compose(self, other: "AntilinearRep") -> "AntilinearRep":
        rhs = other.linear_part.matrix
        if self.conjugates:
            rhs = rhs.conj()
        other_lin = FockOperator(rhs, other.linear_part.truncation, other.linear_part.basis)
        return AntilinearRep(self.linear_part @ other_lin, self.conjugates != other.conjugates)

    def __call__(self, vector: np.ndarray) -> np.ndarray:
        v = np.conj(vector) if self.conjugates else vector
        return self.linear_part.matrix @ v

    @classmethod
    def linear(cls, op: FockOperator) -> "AntilinearRep":
        return cls(op, False)


# --------------------------------------------------------------------------
# single-mode building blocks


def ladder_matrices(truncation: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-mode lowering and raising matrices on ``|0>..|N>``.

    Raising annihilates ``|N>``; that column is a truncation artefact.
    """
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    lower = np.diag(np.sqrt(np.arange(1, truncation + 1, dtype=float)), 1).astype(complex)
    return lower, lower.T.copy()


def _single_mode_quadratures(truncation: int):
    lower, upper = ladder_matrices(truncation)
    x = (lower + upper) / math.sqrt(2)
    p = 1j * (upper - lower) / math.sqrt(2)
    n = np.arange(truncation + 1, dtype=float)
    off = np.sqrt((n[:-2] + 1) * (n[:-2] + 2)) / 2
    band = np.diag(off, 2) + np.diag(off, -2)
    # exact squares, including the top two states
    x2 = (np.diag(n + 0.5) + band).astype(complex)
    p2 = (np.diag(n + 0.5) - band).astype(complex)
    return x, p, x2, p2


def embed(single: np.ndarray, mode: int, truncation: int, basis: Basis = Basis.ORIGINAL) -> FockOperator:
    eye = np.eye(truncation + 1)
    if mode == 1:
        matrix = np.kron(single, eye)
    elif mode == 2:
        matrix = np.kron(eye, single)
    else:
        raise ValueError("mode must be 1 or 2")
    return FockOperator(matrix.astype(complex), truncation, basis)


def build_phase_space_ops(truncation: int) -> dict[str, FockOperator]:
    x, p, x2, p2 = _single_mode_quadratures(truncation)
    ops = {}
    for j in (1, 2):
        ops[f"x{j}"] = embed(x, j, truncation)
        ops[f"p{j}"] = embed(p, j, truncation)
        ops[f"x{j}^2"] = embed(x2, j, truncation)
        ops[f"p{j}^2"] = embed(p2, j, truncation)
    return ops


def assemble(spec: HamiltonianSpec, truncation: int) -> FockOperator:
    """Matrix of a coefficient table in the original oscillator basis."""
    ops = build_phase_space_ops(truncation)
    table = spec.table()
    H = (
        table["p1^2"] * ops["p1^2"].matrix
        + table["p2^2"] * ops["p2^2"].matrix
        + table["p1p2"] * (ops["p1"] @ ops["p2"]).matrix
        + table["x1^2"] * ops["x1^2"].matrix
        + table["x2^2"] * ops["x2^2"].matrix
        + table["x1x2"] * (ops["x1"] @ ops["x2"]).matrix
        + table["x1"] * ops["x1"].matrix
        + table["x2"] * ops["x2"].matrix
        + table["1"] * np.eye((truncation + 1) ** 2)
    )
    return FockOperator(H, truncation, Basis.ORIGINAL)


def build_H_matrix(params: ModelParams, truncation: int, basis: Basis = Basis.ORIGINAL) -> FockOperator:
    if basis is Basis.ORIGINAL:
        return assemble(build_hamiltonian(params), truncation)
    require_regime(params, Regime.UNBROKEN, Regime.BROKEN)
    n1, n2 = mode_numbers(truncation)
    values = [energy(params, int(i), int(j)).value for i, j in zip(n1, n2)]
    return FockOperator(np.diag(np.array(values, dtype=complex)), truncation, Basis.DIAGONAL)


def build_counterpart_matrix(params: ModelParams, truncation: int) -> FockOperator:
    return assemble(hermitian_counterpart(params), truncation)


def _parity_diagonal(truncation: int) -> np.ndarray:
    n1, n2 = mode_numbers(truncation)
    return np.where((n1 + n2) % 2 == 0, 1.0, -1.0)


def build_P_matrix(truncation: int, basis: Basis = Basis.ORIGINAL) -> FockOperator:
    if truncation < 0:
        raise ValueError("truncation must be >= 0")
    return FockOperator(np.diag(_parity_diagonal(truncation)).astype(complex), truncation, basis)


def build_PT(truncation: int, basis: Basis = Basis.ORIGINAL) -> AntilinearRep:
    """PT as P followed by complex conjugation of number-basis coefficients.

    In the original basis ``x`` is real and ``p`` imaginary, so conjugation is
    T.  In the diagonal-mode basis (unbroken regime) the eigenfunctions obey
    ``PT phi_n = (-1)^(n1+n2) phi_n`` with real expansion, giving the same
    diagonal.
    """
    return AntilinearRep(build_P_matrix(truncation, basis), True)


# --------------------------------------------------------------------------
# metric and V


def _momentum_exponential_terms(lam, m: int, n: int):
    # <m| exp(lam p) |n> = exp(lam^2/4) i^(m+n) (-1)^n sum_k (lam/sqrt2)^(m+n-2k) sqrt(m! n!) / ((m-k)! (n-k)! k!)
    # every term in the sum carries the same sign, so there is no cancellation
    beta = abs(lam) / math.sqrt(2)
    sign = 1 if lam >= 0 or (m + n) % 2 == 0 else -1
    logs = []
    for k in range(min(m, n) + 1):
        power = m + n - 2 * k
        if beta == 0 and power > 0:
            continue
        log_beta = math.log(beta) if power else 0.0
        logs.append(
            power * log_beta
            + 0.5 * (math.lgamma(m + 1) + math.lgamma(n + 1))
            - math.lgamma(m - k + 1) - math.lgamma(n - k + 1) - math.lgamma(k + 1)
        )
    return sign, logs


def momentum_exponential(lam: float, truncation: int) -> np.ndarray:
    """Exact number-basis elements of ``exp(lam * p)`` for one mode.

    Unlike ``expm`` of a truncated ``p`` these are the true operator elements,
    so products with banded operators are exact on the interior block.
    """
    size = truncation + 1
    out = np.zeros((size, size), dtype=complex)
    phase = [1, 1j, -1, -1j]
    for m in range(size):
        for n in range(size):
            sign, logs = _momentum_exponential_terms(lam, m, n)
            if not logs:
                continue
            top = max(logs)
            total = math.exp(top + lam * lam / 4) * math.fsum(math.exp(v - top) for v in logs)
            out[m, n] = sign * total * phase[(m + n) % 4] * (-1) ** n
    return out


def momentum_exponential_real_part(lam, size: int, dps: int) -> mpmath.matrix:
    """High-precision real symmetric ``S`` with ``exp(lam p) = D S D^dag``, ``D = diag(i^m)``.

    Returned without the common ``exp(lam^2/4)`` factor.
    """
    with mpmath.workdps(dps):
        lam = mpmath.mpf(lam)
        beta = lam / mpmath.sqrt(2)
        fact = [mpmath.factorial(k) for k in range(size)]
        S = mpmath.matrix(size, size)
        for m in range(size):
            for n in range(m + 1):
                total = mpmath.mpf(0)
                for k in range(n + 1):
                    total += beta ** (m + n - 2 * k) / (fact[m - k] * fact[n - k] * fact[k])
                S[m, n] = S[n, m] = total * mpmath.sqrt(fact[m] * fact[n])
        return S


def metric_exponents(params: ModelParams) -> np.ndarray:
    """Per-mode ``lam_j`` with ``eta_+ = exp(lam_1 p1) exp(lam_2 p2)``."""
    return 2 * original_shift(params)


def build_metric(params: ModelParams, truncation: int) -> FockOperator:
    """``eta_+ = P V`` in the original oscillator basis.

    V is the parity about the complex centre of the eigenfunctions: the
    oscillator-basis parity conjugated by the imaginary translation that the
    canonical shift induces (the linear part of the transformation commutes
    with parity).  With ``x -> x + i s`` this gives ``eta_+ = exp(2 s.p)``.
    """
    require_regime(params, Regime.UNBROKEN)
    lam1, lam2 = metric_exponents(params)
    matrix = np.kron(momentum_exponential(lam1, truncation), momentum_exponential(lam2, truncation))
    return FockOperator(matrix, truncation, Basis.ORIGINAL)


def build_V_matrix(params: ModelParams, truncation: int, basis: Basis = Basis.DIAGONAL) -> FockOperator:
    require_regime(params, Regime.UNBROKEN)
    if basis is Basis.DIAGONAL:
        return build_P_matrix(truncation, Basis.DIAGONAL)
    return build_P_matrix(truncation) @ build_metric(params, truncation)


# --------------------------------------------------------------------------
# algebraic ladder operators


def normal_mode_ops(params: ModelParams, truncation: int) -> dict[str, FockOperator]:
    """Shifted coordinates ``XX_j`` (non-Hermitian) and momenta ``PP_j``."""
    sol = solve_canonical(params)
    form = diagonalize(params)
    ops = build_phase_space_ops(truncation)
    a, b, z = sol.a, sol.b, sol.zeta
    x1, x2, p1, p2 = ops["x1"], ops["x2"], ops["p1"], ops["p2"]
    return {
        "X1": a * (x1 + z * x2) + 1j * form.I1,
        "X2": b * (x1 - z * x2) + 1j * form.I2,
        "P1": (p1 + z * p2) * (1 / (2 * a)),
        "P2": (p1 - z * p2) * (1 / (2 * b)),
    }


def ladder_operators(params: ModelParams, truncation: int) -> dict[str, FockOperator]:
    """Annihilators ``a_j`` and their PV-adjoints ``a‡_j`` (keys ``a1, a2, ad1, ad2``)."""
    form = diagonalize(params)
    ops = normal_mode_ops(params, truncation)
    out = {}
    for j, gauge, omega in ((1, params.a, form.omega1), (2, params.b, form.omega2)):
        pref = gauge / np.sqrt(omega)
        X = ops[f"X{j}"] * (omega / (2 * gauge * gauge))
        P = ops[f"P{j}"] * 1j
        out[f"a{j}"] = (P + X) * pref
        out[f"ad{j}"] = (X - P) * pref
    return out


# --------------------------------------------------------------------------
# defect reports


@dataclass
class DefectReport:
    check: str
    defects: dict[str, float]
    tolerance: float
    details: dict = field(default_factory=dict)
    overrides: dict[str, float] = field(default_factory=dict)

    def limit(self, name: str) -> float:
        """Tolerance for one defect; per-defect overrides win over the shared value."""
        return self.overrides.get(name, self.tolerance)

    @property
    def worst(self) -> float:
        return max(self.defects.values()) if self.defects else 0.0

    @property
    def passed(self) -> bool:
        within = all(v <= self.limit(k) for k, v in self.defects.items())
        return within and self.details.get("ok", True)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "defects": dict(self.defects),
            "overrides": dict(self.overrides),
            "details": dict(self.details),
        }


def _norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def _rel(m: np.ndarray, scale: float) -> float:
    return _norm(m) / scale if scale else _norm(m)


def metric_min_eigenvalue(params: ModelParams, truncation: int, margin: int = INTERIOR_MARGIN,
                          dps: int = 80) -> tuple[mpmath.mpf, int]:
    """Smallest eigenvalue of the interior block of ``eta_+``, in high precision.

    The interior block factorises over the modes and each factor is unitarily
    similar to a real symmetric matrix, so the minimum is the product of the
    per-mode minima.  The entries span many decades, hence mpmath.
    Returns the eigenvalue and the precision used.
    """
    size = truncation - margin + 1
    while True:
        with mpmath.workdps(dps):
            result = mpmath.mpf(1)
            for lam in metric_exponents(params):
                S = momentum_exponential_real_part(lam, size, dps)
                evals = mpmath.eigsy(S, eigvals_only=True)
                result *= min(evals) * mpmath.exp(mpmath.mpf(lam) ** 2 / 4)
            # accept when the smallest eigenvalue is resolved well above working precision
            scale = max(mpmath.exp(mpmath.mpf(lam) ** 2 / 4) for lam in metric_exponents(params))
            if result > scale ** 2 * mpmath.mpf(10) ** (-(dps - 20)) or dps >= 640:
                return result, dps
        dps *= 2


def verify_pseudo_hermiticity(params: ModelParams, truncation: int, margin: int = INTERIOR_MARGIN,
                              tolerance: float = DEFAULT_TOLERANCE) -> DefectReport:
    require_regime(params, Regime.UNBROKEN)
    H = build_H_matrix(params, truncation)
    P = build_P_matrix(truncation)
    eta = build_metric(params, truncation)
    V = P @ eta
    PT = build_PT(truncation)
    VPT = AntilinearRep.linear(V).compose(PT)
    PTV = PT.compose(AntilinearRep.linear(V))

    eta_i = eta.interior(margin)
    h_scale = _norm(H.interior(margin))
    e_scale = _norm(eta_i)
    min_eig, dps = metric_min_eigenvalue(params, truncation, margin)

    defects = {
        "eta_hermiticity": _rel(eta_i - eta_i.conj().T, e_scale),
        "eta_intertwining": _rel((H.dag() @ eta - eta @ H).interior(margin), h_scale * e_scale),
        "p_pseudo_hermiticity": _rel((P @ H @ P - H.dag()).interior(margin), h_scale),
        "v_commutes_with_h": _rel(commutator(V, H).interior(margin), h_scale * e_scale),
        "v_commutes_with_pt": _rel(
            (VPT.linear_part - PTV.linear_part).interior(margin), e_scale),
    }
    details = {
        "min_eigenvalue": float(min_eig),
        "log10_min_eigenvalue": float(mpmath.log10(min_eig)) if min_eig > 0 else None,
        "positive_definite": bool(min_eig > 0),
        "eigen_dps": dps,
        "metric_exponents": [float(v) for v in metric_exponents(params)],
        "truncation": truncation,
        "margin": margin,
        "norm": "Frobenius, relative to the operands' interior norms",
    }
    details["ok"] = details["positive_definite"]
    return DefectReport("pseudo_hermiticity", defects, tolerance, details)


def commutator_counterpart_check(params: ModelParams, truncation: int, margin: int = INTERIOR_MARGIN,
                                 tolerance: float = DEFAULT_TOLERANCE) -> DefectReport:
    """``[H, H_herm] = -4 p2`` for Model 1."""
    if params.model is not Model.MODEL1:
        raise ModelError("the counterpart commutator is a Model 1 identity")
    H = build_H_matrix(params, truncation)
    Hh = build_counterpart_matrix(params, truncation)
    p2 = build_phase_space_ops(truncation)["p2"]
    residual = commutator(H, Hh) + 4 * p2
    return DefectReport(
        "counterpart_commutator",
        {"commutator_plus_4p2": _norm(residual.interior(margin)),
         "self_commutator": _norm(commutator(H, H).interior(margin))},
        tolerance,
        {"commutator_norm": _norm(commutator(H, Hh).interior(margin)),
         "truncation": truncation, "margin": margin, "norm": "Frobenius"},
    )


def ladder_algebra_check(params: ModelParams, truncation: int, margin: int = INTERIOR_MARGIN,
                         tolerance: float = DEFAULT_TOLERANCE) -> DefectReport:
    require_regime(params, Regime.UNBROKEN)
    ops = ladder_operators(params, truncation)
    form = diagonalize(params)
    one = identity(truncation)
    H = build_H_matrix(params, truncation)
    eta = build_metric(params, truncation)

    def d(op):
        return _norm(op.interior(margin))

    defects = {}
    numbers = {j: ops[f"ad{j}"] @ ops[f"a{j}"] for j in (1, 2)}
    for j in (1, 2):
        for k in (1, 2):
            delta = 1.0 if j == k else 0.0
            a_j, ad_j, a_k, ad_k = ops[f"a{j}"], ops[f"ad{j}"], ops[f"a{k}"], ops[f"ad{k}"]
            defects[f"[a{j},ad{k}]-delta"] = d(commutator(a_j, ad_k) - delta * one)
            defects[f"[N{j},ad{k}]-ad{j}delta"] = d(commutator(numbers[j], ad_k) - delta * ad_j)
            defects[f"[N{j},a{k}]+a{j}delta"] = d(commutator(numbers[j], a_k) + delta * a_j)
    defects["[a1,a2]"] = d(commutator(ops["a1"], ops["a2"]))
    defects["[ad1,ad2]"] = d(commutator(ops["ad1"], ops["ad2"]))

    rebuilt = (form.omega1 * (2 * numbers[1] + one) + form.omega2 * (2 * numbers[2] + one)
               + form.const_shift * one)
    defects["number_form"] = d(H - rebuilt)

    # a‡ = eta^-1 a^dag eta, compared as eta a‡ = a^dag eta so only banded products enter
    e_scale = _norm(eta.interior(margin))
    for j in (1, 2):
        lhs = eta @ ops[f"ad{j}"]
        rhs = ops[f"a{j}"].dag() @ eta
        defects[f"metric_adjoint_{j}"] = _rel((lhs - rhs).interior(margin),
                                              e_scale * _norm(ops[f"ad{j}"].interior(margin)))
    return DefectReport("ladder_algebra", defects, tolerance,
                        {"truncation": truncation, "margin": margin,
                         "norm": "Frobenius; metric_adjoint_* relative"})


# --------------------------------------------------------------------------
# spectral oracle


@dataclass
class OracleSpectrum:
    eigenvalues: np.ndarray
    deltas: np.ndarray
    truncation: int
    step: int

    @property
    def converged(self) -> np.ndarray:
        return self.deltas <= CONVERGENCE_TOL

    def converged_values(self) -> np.ndarray:
        return self.eigenvalues[self.converged]

    def nearest(self, value: complex) -> tuple[complex, float]:
        i = int(np.argmin(np.abs(self.eigenvalues - value)))
        return complex(self.eigenvalues[i]), float(abs(self.eigenvalues[i] - value))


def sort_complex(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return values[np.lexsort((values.imag, values.real))]


def dense_eigenvalues(op: FockOperator) -> np.ndarray:
    try:
        return sort_complex(scipy.linalg.eigvals(op.matrix))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise OracleError(f"dense eigensolve failed at truncation {op.truncation}: {exc}") from exc


def oracle_eigensolve(params: ModelParams, truncation: int, step: int = INTERIOR_MARGIN,
                      matrix_builder=build_H_matrix) -> OracleSpectrum:
    """Eigenvalues of the truncated original-basis matrix with convergence deltas.

    Each delta is the distance to the nearest eigenvalue at truncation ``N - step``.
    """
    if truncation < 8:
        raise ValueError("oracle needs truncation >= 8")
    fine = dense_eigenvalues(matrix_builder(params, truncation))
    coarse = dense_eigenvalues(matrix_builder(params, truncation - step))
    deltas = np.min(np.abs(fine[:, None] - coarse[None, :]), axis=1)
    return OracleSpectrum(fine, deltas, truncation, step)


def compare_with_closed_form(params: ModelParams, truncation: int, max_total: int,
                             oracle: OracleSpectrum | None = None) -> list[dict]:
    oracle = oracle or oracle_eigensolve(params, truncation)
    rows = []
    for n1, n2 in level_indices(max_total):
        closed = energy(params, n1, n2).value
        nearest, delta = oracle.nearest(closed)
        i = int(np.argmin(np.abs(oracle.eigenvalues - closed)))
        rows.append({
            "n1": n1, "n2": n2,
            "closed_form": closed,
            "oracle": nearest,
            "delta": delta,
            "oracle_convergence": float(oracle.deltas[i]),
        })
    return rows


def conjugation_closure_defect(values: np.ndarray) -> float:
    """Largest distance from a conjugated eigenvalue to the set, relative to the spectral scale."""
    values = np.asarray(values, dtype=complex)
    dist = np.min(np.abs(values.conj()[:, None] - values[None, :]), axis=1)
    return float(np.max(dist) / max(1.0, np.max(np.abs(values))))
