"""Operators on a space carrying the semi-inner product <x, y>_A = <Ax, y>.

A Metric caches the spectral data of a PSD matrix A (A-dagger, A^{1/2}, its
pseudoinverse and the range projector P). A SemiOperator binds an operator T
to a metric, records membership in B_{A^{1/2}} and B_A, and carries the
distinguished A-adjoint T^# = A-dagger T* A when it exists.

In finite dimensions both membership sets equal {T : T(N(A)) in N(A)}. The
two flags are still computed by independent tests (null-space invariance and
the Douglas range condition) and must agree.

Seminorms and radii go through the compression T~ = A^{1/2} T (A^{1/2})-dagger:
||T||_A = sigma_max(T~) and w_A(T) = w(T~), valid because ||x||_A = ||A^{1/2} x||
and T preserves N(A). The sup over x with ||x||_A = 1 is used in place of the
sup over the closure of R(A); for T in B_{A^{1/2}} they coincide.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, MembershipMismatch, MethodDisagreement, NotAdjointable
from .kernel import (
    ComplexMatrix, HermitianEig, adjoint, as_matrix, as_vector, fro, frozen, herm_eig,
    maximize_on_circle, numerical_radius_classical, operator_norm_2, psd_spectrum,
    require_square, spectral_function,
)
from .types import RadiusMethod, Settings
from .utils import complex_gaussian, load_settings, rng_stream

log = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# TYPES
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class ExtendedRadius:
    """A seminorm or radius value that may be +infinity.

    Deliberately defines no arithmetic; call `finite()` to get a float.
    """
    value: Optional[float]

    @property
    def is_unbounded(self):
        return self.value is None

    def finite(self) -> float:
        if self.value is None:
            raise NotAdjointable("value is unbounded: T does not preserve N(A)")
        return self.value

    def __str__(self):
        return "unbounded" if self.value is None else f"{self.value:.8g}"


UNBOUNDED = ExtendedRadius(None)


@dataclass(frozen=True, eq=False)
class Metric:
    A: ComplexMatrix
    spec: HermitianEig
    mask: np.ndarray
    rank: int
    pinv: ComplexMatrix
    sqrt: ComplexMatrix
    sqrt_pinv: ComplexMatrix
    proj: ComplexMatrix
    eps_rank: float

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def range_basis(self):
        return self.spec.eigenvectors[:, self.mask]

    @property
    def null_basis(self):
        return self.spec.eigenvectors[:, ~self.mask]


@dataclass(frozen=True, eq=False)
class SemiOperator:
    metric: Metric
    T: ComplexMatrix
    in_half: bool
    in_full: bool
    sharp_cache: Optional[ComplexMatrix] = None

    @property
    def n(self):
        return self.T.shape[0]


# -----------------------------------------------------------------------------
# METRIC
# -----------------------------------------------------------------------------
def metric_from_spectrum(A, eig: HermitianEig, mask, eps_rank) -> Metric:
    return Metric(
        A=frozen(A),
        spec=HermitianEig(eigenvalues=eig.eigenvalues.copy(), eigenvectors=frozen(eig.eigenvectors)),
        mask=mask.copy(),
        rank=int(np.count_nonzero(mask)),
        pinv=frozen(spectral_function(eig, mask, lambda lam: 1.0 / lam)),
        sqrt=frozen(spectral_function(eig, mask, np.sqrt)),
        sqrt_pinv=frozen(spectral_function(eig, mask, lambda lam: 1.0 / np.sqrt(lam))),
        proj=frozen(spectral_function(eig, mask, np.ones_like)),
        eps_rank=eps_rank,
    )


def new_metric(A, eps_rank=None, settings: Optional[Settings] = None) -> Metric:
    settings = settings or load_settings()
    eps_rank = settings.kernel.eps_rank if eps_rank is None else eps_rank
    A = require_square(as_matrix(A, "A"), "A")
    eig, mask = psd_spectrum(A, eps_rank, settings)
    A = (A + adjoint(A)) / 2.0
    return metric_from_spectrum(A, eig, mask, eps_rank)


def identity_metric(n, settings: Optional[Settings] = None) -> Metric:
    return new_metric(np.eye(n), settings=settings)


def _check_vec(m: Metric, x, name):
    x = as_vector(x, name)
    if x.shape[0] != m.n:
        raise DimensionMismatch(f"{name} has length {x.shape[0]}, metric has dimension {m.n}")
    return x


def a_inner(m: Metric, x, y) -> complex:
    """<x, y>_A = <Ax, y> = y* A x."""
    x, y = _check_vec(m, x, "x"), _check_vec(m, y, "y")
    return complex(np.vdot(y, m.A @ x))


def a_norm_vec(m: Metric, x) -> float:
    return float(np.sqrt(max(a_inner(m, x, x).real, 0.0)))


# -----------------------------------------------------------------------------
# BINDING AND THE A-ADJOINT
# -----------------------------------------------------------------------------
def bind(m: Metric, T, settings: Optional[Settings] = None) -> SemiOperator:
    eps_mem = (settings or load_settings()).semihilbert.eps_mem
    T = as_matrix(T, "T")
    if T.shape != (m.n, m.n):
        raise DimensionMismatch(f"T has shape {T.shape}, metric has dimension {m.n}")

    # both tests measure ||P T (I - P)|| against the same threshold; the range
    # residual is taken after A-dagger so it carries no factor of lambda
    tol = eps_mem * (1.0 + operator_norm_2(T))

    # T(N(A)) in N(A): P T v = 0 for every null vector v
    null = m.null_basis
    if null.shape[1] == 0:
        in_half = True
    else:
        in_half = operator_norm_2(m.proj @ T @ null) <= tol

    # Douglas: R(T* A) in R(A)
    TA = adjoint(T) @ m.A
    residual = (TA - m.proj @ TA) @ m.pinv
    in_full = operator_norm_2(residual) <= tol

    if in_half != in_full:
        raise MembershipMismatch(
            f"null-space test says {in_half}, range test says {in_full}; A is too close to its rank threshold"
        )
    sharp_ = frozen(m.pinv @ TA) if in_full else None
    return SemiOperator(metric=m, T=frozen(T), in_half=in_half, in_full=in_full, sharp_cache=sharp_)


def sharp(op: SemiOperator) -> ComplexMatrix:
    """T^# = A-dagger T* A, the distinguished solution of A X = T* A."""
    if not op.in_full or op.sharp_cache is None:
        raise NotAdjointable("T does not admit an A-adjoint: R(T*A) is not contained in R(A)")
    return op.sharp_cache


def sharp_of(m: Metric, T, settings: Optional[Settings] = None) -> ComplexMatrix:
    return sharp(bind(m, T, settings))


def double_sharp_identity_check(op: SemiOperator, settings: Optional[Settings] = None) -> float:
    """||(T^#)^# - P T P||_F."""
    m = op.metric
    twice = sharp(bind(m, sharp(op), settings))
    return fro(twice - m.proj @ op.T @ m.proj)


def triple_sharp_residual(op: SemiOperator, settings: Optional[Settings] = None) -> float:
    """||((T^#)^#)^# - T^#||_F."""
    m = op.metric
    once = sharp(op)
    thrice = sharp(bind(m, sharp(bind(m, once, settings)), settings))
    return fro(thrice - once)


def compression(op: SemiOperator) -> ComplexMatrix:
    m = op.metric
    return m.sqrt @ op.T @ m.sqrt_pinv


def range_compression(op: SemiOperator) -> ComplexMatrix:
    """T~ in an orthonormal basis R of R(A), an r x r matrix.

    P T~ = T~ P = T~, so T~ = R (R* T~ R) R* and both share sigma_max and w.
    """
    R = op.metric.range_basis
    return adjoint(R) @ compression(op) @ R


# -----------------------------------------------------------------------------
# SEMINORM AND NUMERICAL RADIUS
# -----------------------------------------------------------------------------
def a_seminorm_op(op: SemiOperator) -> ExtendedRadius:
    if not op.in_half:
        return UNBOUNDED
    if op.metric.rank == 0:
        return ExtendedRadius(0.0)
    return ExtendedRadius(operator_norm_2(range_compression(op)))


def _theta_sup(op: SemiOperator, settings: Settings) -> float:
    """sup_theta || (e^{i theta} T + (e^{i theta} T)^#) / 2 ||_A.

    ||K||_A^2 = lambda_max(W K* A K W) with W = (A^{1/2})-dagger; writing
    K(theta) = cos(theta) R1 + sin(theta) R2 makes the Gram matrix a
    quadratic form in (cos, sin) so the whole grid is one batched eigvalsh.
    """
    m = op.metric
    Ts = sharp(op)
    R1 = (op.T + Ts) / 2.0
    R2 = 1j * (op.T - Ts) / 2.0
    W = m.sqrt_pinv
    G11 = W @ adjoint(R1) @ m.A @ R1 @ W
    G22 = W @ adjoint(R2) @ m.A @ R2 @ W
    G12 = W @ adjoint(R1) @ m.A @ R2 @ W
    G12 = G12 + adjoint(G12)

    def f(thetas):
        c = np.cos(thetas)[:, None, None]
        s = np.sin(thetas)[:, None, None]
        G = c * c * G11 + s * s * G22 + c * s * G12
        return np.sqrt(np.clip(np.linalg.eigvalsh(G)[..., -1], 0.0, None))

    _, value = maximize_on_circle(f, settings)
    return value


def _sampled_radius(op: SemiOperator, count: int, seed: int, settings: Settings) -> float:
    """max |<Tx, x>_A| over `count` random A-unit vectors.

    x = (A^{1/2})-dagger v with v uniform on the unit sphere of R(A), so the
    draws are uniform on {||x||_A = 1} modulo N(A). Every value is attained by
    an explicit vector and the result is a lower bound on w_A(T).

    With `sampling_polish_steps > 0` the best sample is then moved to the top
    eigenvector of Re(e^{-i phi} T~), phi = arg <T~y, y>, while that increases
    the value. Polished values are no longer independent of Compression.
    """
    m = op.metric
    if m.rank == 0:
        return 0.0
    rng = rng_stream(seed, "sampling", m.n, m.rank)
    embed = m.sqrt_pinv @ m.range_basis
    AT = m.A @ op.T
    best, best_x = 0.0, None
    chunk = 8192
    remaining = count
    while remaining > 0:
        k = min(chunk, remaining)
        remaining -= k
        X = embed @ complex_gaussian(rng, (m.rank, k))
        den = np.real(np.einsum("ik,ik->k", np.conj(X), m.A @ X))
        num = np.abs(np.einsum("ik,ik->k", np.conj(X), AT @ X))
        ok = den > 1e-300
        if not np.any(ok):
            continue
        vals = np.where(ok, num / np.where(ok, den, 1.0), 0.0)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, best_x = float(vals[j]), X[:, j].copy()

    if best_x is None:
        return best
    Tc = compression(op)
    y = m.sqrt @ best_x
    for _ in range(settings.semihilbert.sampling_polish_steps):
        phi = np.angle(np.vdot(y, Tc @ y))
        H = (np.exp(-1j * phi) * Tc + np.exp(1j * phi) * adjoint(Tc)) / 2.0
        lam, vecs = np.linalg.eigh(H)
        if lam[-1] <= 0.0:
            break
        x = m.sqrt_pinv @ vecs[:, -1]
        den = a_inner(m, x, x).real
        if den <= 1e-300:
            break
        val = abs(a_inner(m, op.T @ x, x)) / den
        if val <= best * (1.0 + 1e-15):
            break
        best, y = val, m.sqrt @ x
    return best


def a_numerical_radius(
    op: SemiOperator,
    method: Union[RadiusMethod, str, None] = None,
    count: Optional[int] = None,
    seed: int = 0,
    settings: Optional[Settings] = None,
) -> ExtendedRadius:
    """w_A(T) = sup |<Tx, x>_A| over ||x||_A = 1; Unbounded when T(N(A)) leaves N(A)."""
    settings = settings or load_settings()
    cfg = settings.semihilbert
    method = RadiusMethod(method or cfg.method)
    if not op.in_half:
        return UNBOUNDED

    if method is RadiusMethod.sampling:
        return ExtendedRadius(_sampled_radius(op, count or cfg.sampling_count, seed, settings))
    if method is RadiusMethod.theta_sup:
        return ExtendedRadius(_theta_sup(op, settings))

    if op.metric.rank == 0:
        return ExtendedRadius(0.0)
    value = numerical_radius_classical(range_compression(op), settings=settings)
    if cfg.cross_validate:
        other = _theta_sup(op, settings)
        if abs(value - other) > cfg.agreement_tol * (1.0 + value):
            raise MethodDisagreement(f"compression {value!r} vs theta-sup {other!r}")
    return ExtendedRadius(value)


def submultiplicativity_slack(op1: SemiOperator, op2: SemiOperator, settings: Optional[Settings] = None) -> float:
    """||T||_A ||S||_A - ||TS||_A, nonnegative up to roundoff."""
    prod = bind(op1.metric, op1.T @ op2.T, settings)
    return a_seminorm_op(op1).finite() * a_seminorm_op(op2).finite() - a_seminorm_op(prod).finite()


# -----------------------------------------------------------------------------
# PREDICATES
# -----------------------------------------------------------------------------
def is_a_selfadjoint(op: SemiOperator, settings: Optional[Settings] = None) -> bool:
    eps_mem = (settings or load_settings()).semihilbert.eps_mem
    AT = op.metric.A @ op.T
    return fro(AT - adjoint(AT)) <= eps_mem * (1.0 + fro(AT))


def is_a_positive(op: SemiOperator, settings: Optional[Settings] = None) -> bool:
    eps_mem = (settings or load_settings()).semihilbert.eps_mem
    if not is_a_selfadjoint(op, settings):
        return False
    AT = op.metric.A @ op.T
    lam_min = float(np.linalg.eigvalsh((AT + adjoint(AT)) / 2.0)[0])
    return lam_min >= -eps_mem * (1.0 + fro(AT))


def range_in_closure(op: SemiOperator, settings: Optional[Settings] = None) -> bool:
    """R(T) in closure(R(A))."""
    eps_mem = (settings or load_settings()).semihilbert.eps_mem
    m = op.metric
    return fro(op.T - m.proj @ op.T) <= eps_mem * (1.0 + fro(op.T))


def is_self_sharp(op: SemiOperator, settings: Optional[Settings] = None) -> bool:
    """T == T^#; holds iff T is A-selfadjoint with R(T) in closure(R(A))."""
    eps_mem = (settings or load_settings()).semihilbert.eps_mem
    if not op.in_full:
        return False
    return fro(op.T - sharp(op)) <= eps_mem * (1.0 + fro(op.T))


def a_positive_sup(op: SemiOperator, settings: Optional[Settings] = None) -> float:
    """sup <Tx, x>_A over ||x||_A = 1, which equals ||T||_A for A-positive T."""
    if not is_a_positive(op, settings):
        raise ValueError("operator is not A-positive")
    Tc = compression(op)
    return max(float(np.linalg.eigvalsh((Tc + adjoint(Tc)) / 2.0)[-1]), 0.0)


def is_a_unitary(op: SemiOperator, settings: Optional[Settings] = None) -> bool:
    """U^# U = (U^#)^# U^# = P."""
    eps_mem = (settings or load_settings()).semihilbert.eps_mem
    if not op.in_full:
        return False
    m = op.metric
    Us = sharp(op)
    Uss = sharp(bind(m, Us, settings))
    tol = eps_mem * (1.0 + operator_norm_2(op.T))
    return fro(Us @ op.T - m.proj) <= tol and fro(Uss @ Us - m.proj) <= tol


def random_a_unitary(m: Metric, seed, settings: Optional[Settings] = None) -> ComplexMatrix:
    """U = (A^{1/2})-dagger V A^{1/2} with V = exp(iH) on R(A) and identity on N(A)."""
    rng = rng_stream(seed, "a-unitary", m.n, m.rank)
    R = m.range_basis
    r = R.shape[1]
    if r == 0:
        return np.zeros((m.n, m.n), dtype=np.complex128)
    G = complex_gaussian(rng, (r, r))
    eig = herm_eig((G + adjoint(G)) / 2.0, settings)
    Q = eig.eigenvectors
    W = (Q * np.exp(1j * np.pi * eig.eigenvalues)) @ adjoint(Q)
    V = R @ W @ adjoint(R) + (np.eye(m.n) - m.proj)
    return m.sqrt_pinv @ V @ m.sqrt
