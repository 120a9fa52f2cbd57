"""Numerical kernels for the Gross-Pitaevskii solver.

Two interchangeable implementations: a compiled Cython extension (built at
install time when a C compiler is available) and a NumPy/SciPy fallback. The
active one is chosen at import; USING_COMPILED records the outcome and the
environment variable RAMSEY_LAB_PURE_PYTHON=1 forces the fallback.

All kernels operate on complex128 arrays. Tridiagonal systems are strictly
diagonally dominant (unit diagonal plus imaginary off-diagonal shifts), so the
Thomas algorithm is stable without pivoting.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.linalg import solve_banded

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None

USING_COMPILED = _compiled is not None and not bool(
    int(os.environ.get("RAMSEY_LAB_PURE_PYTHON", "0")))


def solve_tridiagonal_numpy(lower, diag, upper, rhs):
    """Solve the tridiagonal system for every column of rhs (shape (n, m))."""
    n = diag.shape[0]
    ab = np.zeros((3, n), dtype=np.complex128)
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs, overwrite_ab=True,
                        check_finite=False)


def apply_tridiagonal_numpy(lower, diag, upper, x):
    """Tridiagonal matrix times every column of x (shape (n, m))."""
    out = diag[:, None] * x
    out[:-1] += upper[:-1, None] * x[1:]
    out[1:] += lower[1:, None] * x[:-1]
    return out


def phase_step_numpy(psi1, psi2, pot, g11, g12, g22, dt):
    """In-place nonlinear + potential phase rotation over dt.

    Densities are evaluated once from the incoming fields; since the step is
    diagonal it leaves them invariant, making the substep exact.
    """
    d1 = np.abs(psi1) ** 2
    d2 = np.abs(psi2) ** 2
    psi1 *= np.exp(-1j * dt * (pot + g11 * d1 + g12 * d2))
    psi2 *= np.exp(-1j * dt * (pot + g22 * d2 + g12 * d1))


if USING_COMPILED:
    def solve_tridiagonal(lower, diag, upper, rhs):
        rhs = np.ascontiguousarray(rhs, dtype=np.complex128)
        return _compiled.solve_tridiagonal(
            np.ascontiguousarray(lower, dtype=np.complex128),
            np.ascontiguousarray(diag, dtype=np.complex128),
            np.ascontiguousarray(upper, dtype=np.complex128), rhs)

    def apply_tridiagonal(lower, diag, upper, x):
        return _compiled.apply_tridiagonal(
            np.ascontiguousarray(lower, dtype=np.complex128),
            np.ascontiguousarray(diag, dtype=np.complex128),
            np.ascontiguousarray(upper, dtype=np.complex128),
            np.ascontiguousarray(x, dtype=np.complex128))

    def phase_step(psi1, psi2, pot, g11, g12, g22, dt):
        _compiled.phase_step(psi1, psi2,
                             np.ascontiguousarray(pot, dtype=np.float64),
                             float(g11), float(g12), float(g22), float(dt))
else:
    solve_tridiagonal = solve_tridiagonal_numpy
    apply_tridiagonal = apply_tridiagonal_numpy
    phase_step = phase_step_numpy
