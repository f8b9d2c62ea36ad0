"""Shifted-Hermite eigenfunctions and their PV-pseudo inner products.

Each eigenfunction factorises into single-mode Hermite functions

    phi_n(XX) = sqrt(c) pi^(-1/4) (2^n n!)^(-1/2) exp(-(c XX)^2 / 2) H_n(c XX)

of the complex coordinate ``XX_j = X_j + i I_j``, with ``X_j`` real.

For real ``c_j`` and ``I_j`` the PV bracket reduces, through the parity
reflection, ``V phi_m = (-1)^m phi_m`` and ``conj(phi(z)) = phi(conj z)``, to

    <phi_n | phi_m>_PV = prod_j  int phi_nj(t - i I_j) phi_mj(t - i I_j) dt

and the PTV bracket to the same integrand on ``t + i I_j``.  On a shifted
line ``exp(-(c z)^2)`` has modulus ``exp(c^2 I^2 - c^2 t^2)`` while the integral is
O(1), so the quadrature sums run in mpmath with enough guard digits.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .canonical import diagonalize
from .model import ModelParams, RegimeError
from .spectrum import level_indices

DEFAULT_ORDER = 96
ORDER_MARGIN = 10


def hermite_eval(n: int, z: complex) -> complex:
    """Physicists' Hermite polynomial ``H_n(z)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    prev, cur = 0, 1
    for k in range(n):
        prev, cur = cur, 2 * z * cur - 2 * k * prev
    return cur


def hermite_function(n: int, c: complex, z) -> np.ndarray:
    """Normalised single-mode Hermite function of scale ``c`` at complex ``z``.

    Runs the normalised recurrence with a running log scale so that large
    ``n`` or ``|c z|`` does not overflow before the Gaussian is applied.
    """
    u = c * np.asarray(z, dtype=complex)
    h_prev = np.zeros_like(u)
    h = np.ones_like(u)
    log_scale = np.zeros(u.shape, dtype=float)
    for k in range(n):
        h_prev, h = h, math.sqrt(2 / (k + 1)) * u * h - math.sqrt(k / (k + 1)) * h_prev
        big = np.abs(h) > 1e100
        if np.any(big):
            s = np.where(big, np.abs(h), 1.0)
            h = h / s
            h_prev = h_prev / s
            log_scale = log_scale + np.log(s)
    log_pref = 0.5 * cmath.log(c) - 0.25 * math.log(math.pi)
    return h * np.exp(log_pref - u * u / 2 + log_scale)


@dataclass(frozen=True)
class Eigenfunction:
    n1: int
    n2: int
    c1: complex
    c2: complex
    I1: complex
    I2: complex

    @property
    def indices(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def parity(self) -> int:
        return -1 if (self.n1 + self.n2) % 2 else 1

    @property
    def is_real_frame(self) -> bool:
        return all(complex(v).imag == 0 for v in (self.c1, self.c2, self.I1, self.I2))

    def conjugate_scales(self) -> "Eigenfunction":
        return Eigenfunction(self.n1, self.n2, complex(self.c1).conjugate(),
                             complex(self.c2).conjugate(), self.I1, self.I2)


def scales(params: ModelParams) -> tuple[complex, complex]:
    """``c1 = (1 + zeta eps)^(1/4) / sqrt(2 a^2)`` and ``c2`` likewise (principal roots)."""
    form = diagonalize(params)
    c1 = cmath.sqrt(form.omega1) / math.sqrt(2 * params.a ** 2)
    c2 = cmath.sqrt(form.omega2) / math.sqrt(2 * params.b ** 2)
    return c1, c2


def eigenfunction(params: ModelParams, n1: int, n2: int) -> Eigenfunction:
    if n1 < 0 or n2 < 0:
        raise ValueError("quantum numbers must be non-negative")
    form = diagonalize(params)
    c1, c2 = scales(params)
    return Eigenfunction(n1, n2, c1, c2, form.I1, form.I2)


def _evaluate(ef: Eigenfunction, z1, z2):
    return hermite_function(ef.n1, ef.c1, z1) * hermite_function(ef.n2, ef.c2, z2)


def eigenfunction_eval(ef: Eigenfunction, t1, t2):
    """``phi`` at ``XX_j = t_j + i I_j`` (real ``t_j``)."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    return _evaluate(ef, t1 + 1j * ef.I1, t2 + 1j * ef.I2)


def v_apply(ef: Eigenfunction, t1, t2):
    """``(V phi)`` at ``X = t``: the reflection ``XX -> -XX`` about the complex centre."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    return _evaluate(ef, -t1 - 1j * ef.I1, -t2 - 1j * ef.I2)


def pt_apply(ef: Eigenfunction, t1, t2):
    """``(PT phi)`` at ``X = t``: reflect ``X -> -X`` then complex-conjugate."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    return np.conj(_evaluate(ef, -t1 + 1j * ef.I1, -t2 + 1j * ef.I2))


def _window(ef: Eigenfunction, points: int, width: float):
    L1 = width / abs(ef.c1)
    L2 = width / abs(ef.c2)
    g1, g2 = np.meshgrid(np.linspace(-L1, L1, points), np.linspace(-L2, L2, points), indexing="ij")
    return g1, g2


def pt_overlap(params: ModelParams, n1: int, n2: int, points: int = 241, width: float = 6.0):
    """Compare ``PT phi`` with ``phi`` on a window of the real ``X`` plane.

    Returns ``(deviation, ratio)`` where ``deviation = 1 - |<PT phi, phi>| /
    (|PT phi| |phi|)`` (zero iff proportional) and ``ratio`` is the least-squares
    constant in ``PT phi ~ ratio * phi``.  Uses a finite window because in the
    broken regime the eigenfunctions are not square integrable along the line.
    """
    ef = eigenfunction(params, n1, n2)
    g1, g2 = _window(ef, points, width)
    f = pt_apply(ef, g1, g2).ravel()
    g = eigenfunction_eval(ef, g1, g2).ravel()
    inner = np.vdot(g, f)
    norm = np.linalg.norm(f) * np.linalg.norm(g)
    deviation = max(0.0, 1.0 - abs(inner) / norm)
    ratio = complex(inner / np.vdot(g, g))
    return float(deviation), ratio


def pt_deviation(params: ModelParams, n1: int, n2: int, points: int = 241, width: float = 6.0) -> float:
    return pt_overlap(params, n1, n2, points, width)[0]


# --------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=None)
def gauss_hermite(order: int, dps: int) -> tuple[tuple, tuple]:
    """Gauss-Hermite nodes and weights (weight ``exp(-s^2)``) at ``dps`` digits.

    numpy's double-precision nodes are polished by Newton steps on the
    orthonormal Hermite polynomial; weights are Christoffel numbers.
    """
    seeds, _ = np.polynomial.hermite.hermgauss(order)
    with mpmath.workdps(dps + 10):
        nodes, weights = [], []
        quarter = mpmath.pi ** mpmath.mpf(-0.25)
        for seed in seeds:
            x = mpmath.mpf(float(seed))
            for _ in range(60):
                q_prev, q = mpmath.mpf(0), quarter
                for k in range(order):
                    q_prev, q = q, mpmath.sqrt(mpmath.mpf(2) / (k + 1)) * x * q - mpmath.sqrt(mpmath.mpf(k) / (k + 1)) * q_prev
                step = q / (mpmath.sqrt(2 * order) * q_prev)
                x -= step
                if abs(step) < mpmath.mpf(10) ** (-(dps + 5)):
                    break
            # recompute weight at the converged node
            q_prev, q = mpmath.mpf(0), quarter
            total = q * q
            for k in range(order - 1):
                q_prev, q = q, mpmath.sqrt(mpmath.mpf(2) / (k + 1)) * x * q - mpmath.sqrt(mpmath.mpf(k) / (k + 1)) * q_prev
                total += q * q
            nodes.append(+x)
            weights.append(1 / total)
    return tuple(nodes), tuple(weights)


def _guard_digits(c: float, shift: float, nmax: int) -> int:
    # log10 of the cancellation factor exp(c^2 I^2) plus polynomial growth
    return 30 + int(math.ceil((c * shift) ** 2 / math.log(10))) + 2 * nmax


def line_integrals(c: float, shift: float, nmax: int, order: int = DEFAULT_ORDER) -> np.ndarray:
    """``G[n, m] = int phi_n(z) phi_m(z) dz`` along ``z = t + i shift``, ``n, m <= nmax``.

    With ``s = c t`` the Gaussian of the integrand becomes the Gauss-Hermite
    weight and what is left is ``exp(c^2 shift^2 - 2 i c shift s)`` times
    the normalised Hermite polynomials at ``u = s + i c shift``.
    """
    if order < nmax + ORDER_MARGIN:
        raise ValueError(f"quadrature order {order} < nmax + {ORDER_MARGIN}")
    dps = _guard_digits(c, shift, nmax)
    nodes, weights = gauss_hermite(order, dps)
    with mpmath.workdps(dps):
        cy = mpmath.mpf(c) * mpmath.mpf(shift)
        acc = [[mpmath.mpc(0) for _ in range(nmax + 1)] for _ in range(nmax + 1)]
        sqrt2 = [mpmath.sqrt(mpmath.mpf(2) / (k + 1)) for k in range(nmax)]
        ratio = [mpmath.sqrt(mpmath.mpf(k) / (k + 1)) for k in range(nmax)]
        for s, w in zip(nodes, weights):
            u = mpmath.mpc(s, cy)
            h = [mpmath.mpc(1)]
            prev = mpmath.mpc(0)
            for k in range(nmax):
                nxt = sqrt2[k] * u * h[-1] - ratio[k] * prev
                prev = h[-1]
                h.append(nxt)
            factor = w * mpmath.exp(mpmath.mpc(cy * cy, -2 * cy * s))
            for n in range(nmax + 1):
                fn = factor * h[n]
                for m in range(n, nmax + 1):
                    acc[n][m] += fn * h[m]
        norm = 1 / mpmath.sqrt(mpmath.pi)
        out = np.empty((nmax + 1, nmax + 1), dtype=complex)
        for n in range(nmax + 1):
            for m in range(n, nmax + 1):
                out[n, m] = out[m, n] = complex(acc[n][m] * norm)
    return out


def _real_frame(*efs: Eigenfunction) -> None:
    ref = efs[0]
    for ef in efs:
        if not ef.is_real_frame:
            raise RegimeError("inner products need real scales and shifts (unbroken regime)")
        if (ef.c1, ef.c2, ef.I1, ef.I2) != (ref.c1, ref.c2, ref.I1, ref.I2):
            raise ValueError("eigenfunctions belong to different parameter sets")


def _check_order(order: int, *efs: Eigenfunction) -> None:
    top = max(max(ef.n1, ef.n2) for ef in efs)
    if order < top + ORDER_MARGIN:
        raise ValueError(f"quadrature order {order} too low for degree {top}")


def _bracket(ef_n: Eigenfunction, ef_m: Eigenfunction, order: int, sign: int) -> complex:
    _real_frame(ef_n, ef_m)
    _check_order(order, ef_n, ef_m)
    value = 1 + 0j
    for n, m, c, shift in ((ef_n.n1, ef_m.n1, ef_n.c1, ef_n.I1), (ef_n.n2, ef_m.n2, ef_n.c2, ef_n.I2)):
        top = max(n, m)
        value *= line_integrals(c.real, sign * complex(shift).real, top, order)[n, m]
    return value


def pv_inner_product(ef_n: Eigenfunction, ef_m: Eigenfunction, order: int = DEFAULT_ORDER) -> complex:
    """``<phi_n | phi_m>_PV`` along the lines ``t - i I_j``."""
    return _bracket(ef_n, ef_m, order, -1)


def ptv_inner_product(ef_n: Eigenfunction, ef_m: Eigenfunction, order: int = DEFAULT_ORDER) -> complex:
    """``<phi_n, phi_m>_PTV``; the PT-reflected bra lands on the lines ``t + i I_j``."""
    return _bracket(ef_n, ef_m, order, +1)


def real_axis_product(ef_n: Eigenfunction, ef_m: Eigenfunction, order: int = DEFAULT_ORDER) -> complex:
    _real_frame(ef_n, ef_m)
    _check_order(order, ef_n, ef_m)
    value = 1 + 0j
    for n, m, c in ((ef_n.n1, ef_m.n1, ef_n.c1), (ef_n.n2, ef_m.n2, ef_n.c2)):
        value *= line_integrals(c.real, 0.0, max(n, m), order)[n, m]
    return value


def contour_shift_check(ef_n: Eigenfunction, ef_m: Eigenfunction, order: int = DEFAULT_ORDER) -> float:
    """|shifted-line integral - real-axis integral| of the reduced PV integrand."""
    return abs(pv_inner_product(ef_n, ef_m, order) - real_axis_product(ef_n, ef_m, order))


@dataclass
class GramMatrix:
    entries: np.ndarray
    indices: list[tuple[int, int]]
    quadrature_order: int
    contour: dict = field(default_factory=dict)

    @property
    def max_offdiag(self) -> float:
        off = self.entries - np.diag(np.diag(self.entries))
        return float(np.max(np.abs(off))) if off.size else 0.0

    @property
    def max_diag_deviation(self) -> float:
        return float(np.max(np.abs(np.diag(self.entries) - 1)))

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.entries - np.eye(len(self.indices)))))

    def diagnostics(self) -> dict:
        return {
            "max_offdiag": self.max_offdiag,
            "max_diag_deviation": self.max_diag_deviation,
            "max_deviation": self.max_deviation,
            "finite": bool(np.all(np.isfinite(self.entries))),
        }


def gram(params: ModelParams, nmax: int, order: int = DEFAULT_ORDER, route: str = "pv") -> GramMatrix:
    """Gram matrix over all ``(n1, n2)`` with ``n1 + n2 <= nmax``.

    The 2D integrals factorise, so one table of line integrals per mode is
    enough; entries are products of table elements in a fixed order.
    """
    if route not in ("pv", "ptv"):
        raise ValueError("route must be 'pv' or 'ptv'")
    ref = eigenfunction(params, 0, 0)
    _real_frame(ref)
    sign = -1 if route == "pv" else 1
    shifts = (sign * ref.I1.real, sign * ref.I2.real)
    tables = (line_integrals(ref.c1.real, shifts[0], nmax, order),
              line_integrals(ref.c2.real, shifts[1], nmax, order))
    idx = level_indices(nmax)
    entries = np.empty((len(idx), len(idx)), dtype=complex)
    for i, (n1, n2) in enumerate(idx):
        for j, (m1, m2) in enumerate(idx):
            entries[i, j] = tables[0][n1, m1] * tables[1][n2, m2]
    contour = {
        "route": route,
        "line_imag_parts": list(shifts),
        "scales": [ref.c1.real, ref.c2.real],
    }
    return GramMatrix(entries, idx, order, contour)
