"""2x2 block operators on H + H with the doubled metric diag(A, A)."""
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch
from .kernel import ComplexMatrix, HermitianEig, as_matrix, fro, frozen
from .semihilbert import (
    Metric, SemiOperator, a_numerical_radius, a_seminorm_op, bind, metric_from_spectrum, sharp,
)
from .types import Settings


def double_metric(m: Metric) -> Metric:
    """diag(A, A), built from the spectrum of A rather than re-decomposed."""
    n = m.n
    Q = m.spec.eigenvectors
    Q2 = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    Q2[:n, :n] = Q
    Q2[n:, n:] = Q
    lam2 = np.concatenate([m.spec.eigenvalues, m.spec.eigenvalues])
    mask2 = np.concatenate([m.mask, m.mask])
    order = np.argsort(lam2, kind="stable")
    A2 = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    A2[:n, :n] = m.A
    A2[n:, n:] = m.A
    eig2 = HermitianEig(eigenvalues=lam2[order], eigenvectors=Q2[:, order])
    return metric_from_spectrum(A2, eig2, mask2[order], m.eps_rank)


def assemble(T, X, Y, S) -> ComplexMatrix:
    """[[T, X], [Y, S]] by explicit index placement."""
    n = T.shape[0]
    M = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    M[:n, :n] = T
    M[:n, n:] = X
    M[n:, :n] = Y
    M[n:, n:] = S
    return M


def split(M) -> Tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    n = M.shape[0] // 2
    return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]


@dataclass(frozen=True, eq=False)
class BlockOperator:
    metric: Metric
    metric2: Metric
    T: ComplexMatrix
    X: ComplexMatrix
    Y: ComplexMatrix
    S: ComplexMatrix
    assembled: ComplexMatrix
    op: SemiOperator


def make_block(m: Metric, T, X, Y, S, metric2: Optional[Metric] = None,
               settings: Optional[Settings] = None) -> BlockOperator:
    blocks = {}
    for name, B in (("T", T), ("X", X), ("Y", Y), ("S", S)):
        B = as_matrix(B, name)
        if B.shape != (m.n, m.n):
            raise DimensionMismatch(f"block {name} has shape {B.shape}, expected {(m.n, m.n)}")
        blocks[name] = frozen(B)
    metric2 = metric2 or double_metric(m)
    M = assemble(blocks["T"], blocks["X"], blocks["Y"], blocks["S"])
    return BlockOperator(metric=m, metric2=metric2, assembled=frozen(M), op=bind(metric2, M, settings), **blocks)


def zero_block(n):
    return np.zeros((n, n), dtype=np.complex128)


def rotation_unitary(n) -> ComplexMatrix:
    """(1/sqrt 2) [[I, I], [-I, I]], A-unitary for every doubled metric."""
    I = np.eye(n, dtype=np.complex128)
    return assemble(I, I, -I, I) / np.sqrt(2.0)


# -----------------------------------------------------------------------------
# BLOCK IDENTITIES
# -----------------------------------------------------------------------------
class Identity(NamedTuple):
    label: str
    lhs: float
    rhs: float

    @property
    def residual(self):
        return abs(self.lhs - self.rhs)


class Lemma21Residuals(NamedTuple):
    sharp: float
    norm_diag: float
    norm_off: float
    radius_diag: float
    radius_swap: float

    def worst(self):
        return max(self)


class DirectEvaluator:
    """Seminorms, radii and A-adjoints computed on demand, with no memo.

    `tag` selects the metric: "A" for the base metric, "AA" for diag(A, A).
    CheckContext offers the same three methods backed by a per-instance memo.
    """

    def __init__(self, m: Metric, m2: Metric, settings: Optional[Settings] = None):
        self.metrics = {"A": m, "AA": m2}
        self.settings = settings

    def norm(self, M, tag="A") -> float:
        return a_seminorm_op(bind(self.metrics[tag], M, self.settings)).finite()

    def radius(self, M, tag="A") -> float:
        return a_numerical_radius(bind(self.metrics[tag], M, self.settings), settings=self.settings).finite()

    def sharp(self, M, tag="A") -> ComplexMatrix:
        return sharp(bind(self.metrics[tag], M, self.settings))


def lemma21_sides(b: BlockOperator, settings: Optional[Settings] = None, ev=None) -> List[Identity]:
    """Both sides of each block identity, computed independently.

    `ev` supplies norm/radius/sharp; pass a CheckContext to share its memo.
    """
    ev = ev or DirectEvaluator(b.metric, b.metric2, settings)
    Z = zero_block(b.metric.n)

    sharp_blocks = assemble(*(ev.sharp(B) for B in (b.T, b.Y, b.X, b.S)))
    sides = [Identity("(i) sharp of block", fro(ev.sharp(b.assembled, "AA") - sharp_blocks), 0.0)]

    X, Y = b.X, b.Y
    n_max = max(ev.norm(X), ev.norm(Y))
    sides.append(Identity("(ii) diagonal seminorm", ev.norm(assemble(X, Z, Z, Y), "AA"), n_max))
    sides.append(Identity("(ii) off-diagonal seminorm", ev.norm(assemble(Z, X, Y, Z), "AA"), n_max))
    sides.append(Identity(
        "(iii) diagonal radius", ev.radius(assemble(X, Z, Z, Y), "AA"), max(ev.radius(X), ev.radius(Y))
    ))
    sides.append(Identity(
        "(iv) swap radius", ev.radius(assemble(X, Y, Y, X), "AA"), max(ev.radius(X + Y), ev.radius(X - Y))
    ))
    sides.append(Identity("(iv) symmetric off-diagonal", ev.radius(assemble(Z, Y, Y, Z), "AA"), ev.radius(Y)))
    return sides


def lemma21_residuals(b: BlockOperator, settings: Optional[Settings] = None) -> Lemma21Residuals:
    r = [s.residual for s in lemma21_sides(b, settings)]
    return Lemma21Residuals(sharp=r[0], norm_diag=r[1], norm_off=r[2], radius_diag=r[3], radius_swap=max(r[4], r[5]))


def rotate_block_rows(m: Metric, T, S, metric2: Optional[Metric] = None,
                      settings: Optional[Settings] = None) -> Tuple[ComplexMatrix, float]:
    """U^# [[T, S], [T, S]] U and its distance to [[0, 0], [T - S, T + S]].

    The target is exact only on closure(R(A)), so both sides are compared
    after compression by the range projector of the doubled metric.
    """
    metric2 = metric2 or double_metric(m)
    n = m.n
    U = rotation_unitary(n)
    M = assemble(T, S, T, S)
    Us = sharp(bind(metric2, U, settings))
    out = Us @ M @ U
    Z = zero_block(n)
    target = assemble(Z, Z, T - S, T + S)
    P = metric2.proj
    return out, fro(P @ (out - target) @ P)
