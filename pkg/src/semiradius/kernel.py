"""Dense complex matrix primitives.

Every operator, metric and vector in the package is a numpy complex128 array.
This module owns the spectral plumbing the rest of the package builds on: a
cyclic Jacobi eigensolver for Hermitian matrices, the PSD pseudoinverse and
square root derived from it, and the classical numerical radius computed as
sup over theta of lambda_max((e^{i theta} S + e^{-i theta} S*) / 2).
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .errors import BadShape, NonConvergence, NonSquare, NotHermitian, NotPSD
from .types import Settings
from .utils import load_settings

log = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def as_matrix(M, name="matrix") -> ComplexMatrix:
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise BadShape(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BadShape(f"{name} has non-finite entries")
    return arr


def as_vector(x, name="vector"):
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1 or arr.size < 1:
        raise BadShape(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BadShape(f"{name} has non-finite entries")
    return arr


def require_square(M, name="matrix"):
    if M.shape[0] != M.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {M.shape}")
    return M


def fro(M):
    return float(np.linalg.norm(M, "fro"))


def adjoint(M):
    return np.conj(M).T


def frozen(M):
    """Read-only copy, so cached spectral data cannot be mutated by callers."""
    out = np.array(M, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


# -----------------------------------------------------------------------------
# HERMITIAN EIGENDECOMPOSITION
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class HermitianEig:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: ComplexMatrix  # columns


def _jacobi_pair(a, p, q):
    """2x2 unitary J with (J* B J) diagonal for B = a[[p,q]][:, [p,q]]."""
    apq = a[p, q]
    r = abs(apq)
    phase = apq / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # diag(1, conj(phase)) makes the pair real, then a real rotation zeroes it
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=np.complex128)


def herm_eig(M, settings: Optional[Settings] = None) -> HermitianEig:
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Sweeps over all (p, q) pairs in row order until the off-diagonal
    Frobenius mass drops to roundoff level. Deterministic: the same input
    always produces the same rotations in the same order.

    Raises NotHermitian if ||M - M*||_F > eps_herm (1 + ||M||_F) and
    NonConvergence if `max_sweeps` sweeps do not suffice.
    """
    cfg = (settings or load_settings()).kernel
    M = require_square(as_matrix(M))
    norm = fro(M)
    if fro(M - adjoint(M)) > cfg.eps_herm * (1.0 + norm):
        raise NotHermitian("matrix is not Hermitian within eps_herm")

    n = M.shape[0]
    a = (M + adjoint(M)) / 2.0
    V = np.eye(n, dtype=np.complex128)
    target = 4.0 * n * np.finfo(float).eps * norm

    prev_off = np.inf
    for sweep in range(cfg.max_sweeps + 1):
        off = fro(a - np.diag(np.diag(a)))
        # roundoff floor: a sweep that no longer halves a tiny residual is done
        if off <= target or (off <= 1e3 * target and off > 0.5 * prev_off):
            break
        prev_off = off
        if sweep == cfg.max_sweeps:
            raise NonConvergence(f"Jacobi did not converge in {cfg.max_sweeps} sweeps (off={off:.3e})")
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) == 0.0:
                    continue
                J = _jacobi_pair(a, p, q)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ J
                a[idx, :] = adjoint(J) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                V[:, idx] = V[:, idx] @ J

    lam = np.real(np.diag(a)).copy()
    order = np.argsort(lam, kind="stable")
    return HermitianEig(eigenvalues=lam[order], eigenvectors=V[:, order])


def operator_norm_2(M) -> float:
    """Largest singular value."""
    M = as_matrix(M)
    return float(np.linalg.norm(M, 2))


# -----------------------------------------------------------------------------
# PSD FUNCTIONS
# -----------------------------------------------------------------------------
def psd_spectrum(M, eps_rank=None, settings: Optional[Settings] = None) -> Tuple[HermitianEig, np.ndarray]:
    """Eigendecomposition of a PSD matrix plus its numerical-range mask.

    Eigenvalues in [-eps_neg * lambda_max, 0) are clipped to 0; anything more
    negative raises NotPSD. The mask marks eigenvalues above
    eps_rank * lambda_max, which every derived quantity (pseudoinverse,
    square root, range projector) treats as the support.
    """
    cfg = (settings or load_settings()).kernel
    eps_rank = cfg.eps_rank if eps_rank is None else eps_rank
    if not 0.0 < eps_rank < 1.0:
        raise ValueError(f"eps_rank must lie in (0, 1), got {eps_rank}")
    eig = herm_eig(M, settings)
    lam = eig.eigenvalues
    lam_max = max(float(lam[-1]), 0.0)
    floor = cfg.eps_neg * lam_max + np.finfo(float).eps * fro(M)
    if lam[0] < -floor:
        raise NotPSD(f"eigenvalue {lam[0]:.3e} below -eps_neg * lambda_max")
    lam = np.clip(lam, 0.0, None)
    mask = lam > eps_rank * lam_max if lam_max > 0 else np.zeros_like(lam, dtype=bool)
    return HermitianEig(eigenvalues=lam, eigenvectors=eig.eigenvectors), mask


def spectral_function(eig: HermitianEig, mask, fn) -> ComplexMatrix:
    """Q f(Lambda) Q* over the masked support; zero elsewhere."""
    Q = eig.eigenvectors[:, mask]
    vals = fn(eig.eigenvalues[mask])
    return (Q * vals) @ adjoint(Q)


def pseudo_inverse(M, eps_rank=None, settings: Optional[Settings] = None) -> ComplexMatrix:
    eig, mask = psd_spectrum(M, eps_rank, settings)
    return spectral_function(eig, mask, lambda lam: 1.0 / lam)


def sqrt_psd(M, eps_rank=None, settings: Optional[Settings] = None) -> ComplexMatrix:
    eig, mask = psd_spectrum(M, eps_rank, settings)
    return spectral_function(eig, mask, np.sqrt)


# -----------------------------------------------------------------------------
# ANGULAR MAXIMIZATION
# -----------------------------------------------------------------------------
def _golden_refine(fn, lo, hi, tol):
    """Vectorized golden-section maximization, one bracket per entry of lo/hi."""
    a, b = lo.astype(float), hi.astype(float)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    width = float(np.max(b - a))
    n_iter = int(np.ceil(np.log(tol / width) / np.log(_GOLDEN))) if width > tol else 0
    for _ in range(n_iter):
        left = fc > fd  # max lies in [a, d]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - _GOLDEN * (b - a), d)
        d_new = np.where(left, c, a + _GOLDEN * (b - a))
        fx = fn(np.where(left, c_new, d_new))
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
        c, d = c_new, d_new
    best_c = fc >= fd
    return np.where(best_c, c, d), np.where(best_c, fc, fd)


def maximize_on_circle(fn: Callable[[np.ndarray], np.ndarray], settings: Optional[Settings] = None, tol=None,
                       grid_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None):
    """Global max of a periodic function of theta in [0, 2 pi).

    `fn` maps an array of angles to an array of values. A K-point grid finds
    the candidate peaks; the best `refine_brackets` of them are refined by
    golden section on [theta_k - h, theta_k + h] until the bracket is < tol.
    `grid_fn`, when given, evaluates the whole grid in place of `fn`.
    Returns (theta, value).
    """
    cfg = (settings or load_settings()).theta
    tol = cfg.tol_theta if tol is None else tol
    K = cfg.grid_points
    h = 2.0 * np.pi / K
    thetas = h * np.arange(K)
    vals = (grid_fn or fn)(thetas)
    peaks = np.flatnonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))
    if peaks.size == 0:
        peaks = np.arange(K)
    top = peaks[np.argsort(-vals[peaks], kind="stable")[: cfg.refine_brackets]]
    th, fv = _golden_refine(fn, thetas[top] - h, thetas[top] + h, tol)
    k = int(np.argmax(fv))
    g = int(np.argmax(vals))
    if vals[g] > fv[k]:
        return float(thetas[g]), float(vals[g])
    return float(np.mod(th[k], 2.0 * np.pi)), float(fv[k])


def hermitian_part_stack(S, thetas):
    """(e^{i theta} S + e^{-i theta} S*) / 2 for every theta, shape (len, n, n)."""
    z = np.exp(1j * np.asarray(thetas, dtype=float))[:, None, None]
    return (z * S + np.conj(z) * adjoint(S)) / 2.0


def numerical_radius_classical(S, tol=None, settings: Optional[Settings] = None) -> float:
    """w(S) = sup_theta lambda_max(Re(e^{i theta} S)).

    `tol` bounds the final theta bracket; since |f(t) - f(t')| <= w(S) |t - t'|
    the returned value is within w(S) * tol of the supremum.
    """
    S = require_square(as_matrix(S, "S"))
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")

    def f(thetas):
        return np.linalg.eigvalsh(hermitian_part_stack(S, thetas))[..., -1]

    def grid(thetas):
        # H(theta + pi) = -H(theta): one eigvalsh covers two grid points
        half = thetas.size // 2
        if thetas.size % 2:
            return f(thetas)
        lam = np.linalg.eigvalsh(hermitian_part_stack(S, thetas[:half]))
        return np.concatenate([lam[:, -1], -lam[:, 0]])

    _, value = maximize_on_circle(f, settings, tol, grid_fn=grid)
    return max(value, 0.0)


def dense_grid_radius(S, points=100_000) -> float:
    """Brute-force w(S): lambda_max of Re(e^{i theta} S) on a uniform grid, no refinement.

    A lower bound within w(S) * pi / points of the sup; used as an oracle.
    """
    S = require_square(as_matrix(S, "S"))
    best = 0.0
    for chunk in np.array_split(np.linspace(0.0, 2.0 * np.pi, points, endpoint=False), 20):
        best = max(best, float(np.linalg.eigvalsh(hermitian_part_stack(S, chunk))[:, -1].max()))
    return best
