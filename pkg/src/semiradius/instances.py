"""Seeded instance generation.

Each instance draws a metric A = Q diag(lambda_1..lambda_r, 0..0) Q* with a
Haar unitary Q and lambda_i in [0.1, 2], then builds the named operators in
the eigenbasis with the block structure [[T_RR, 0], [T_NR, T_NN]] (range
coordinates first) so that T(N(A)) is contained in N(A) exactly before the
rotation back. Every random draw comes from its own Philox stream keyed by
(seed, dim, rank, role), so instances regenerate bit for bit.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import BadShape
from .kernel import ComplexMatrix, adjoint, frozen
from .semihilbert import Metric, new_metric
from .types import Settings
from .utils import complex_gaussian, rng_stream

OPERATOR_NAMES: Tuple[str, ...] = ("T", "S", "X", "Y")
MAX_DIM = 8
LAMBDA_RANGE = (0.1, 2.0)


@dataclass(frozen=True, eq=False)
class Instance:
    seed: int
    dim: int
    rank: int
    metric: Metric
    basis: ComplexMatrix  # columns: range directions first, then null directions
    ops: Dict[str, ComplexMatrix] = field(default_factory=dict)

    def with_ops(self, **ops):
        merged = dict(self.ops)
        merged.update({k: frozen(v) for k, v in ops.items()})
        return replace(self, ops=merged)


def haar_unitary(rng, n) -> ComplexMatrix:
    Z = complex_gaussian(rng, (n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def allowed_mask(dim, rank) -> np.ndarray:
    """Entries of an operator, in basis coordinates, that keep N(A) invariant."""
    mask = np.ones((dim, dim), dtype=bool)
    mask[:rank, rank:] = False
    return mask


def draw_operator(seed, dim, rank, name, basis, attempt=0) -> ComplexMatrix:
    rng = rng_stream(seed, dim, rank, "op", name, attempt)
    B = complex_gaussian(rng, (dim, dim)) * allowed_mask(dim, rank)
    return basis @ B @ adjoint(basis)


def _check_shape(dim, rank):
    if not (1 <= rank <= dim <= MAX_DIM):
        raise BadShape(f"need 1 <= rank <= dim <= {MAX_DIM}, got dim={dim}, rank={rank}")


def gen_instance(seed, dim, rank, settings: Optional[Settings] = None) -> Instance:
    _check_shape(dim, rank)
    rng = rng_stream(seed, dim, rank, "metric")
    Q = haar_unitary(rng, dim)
    lam = np.zeros(dim)
    lam[:rank] = rng.uniform(*LAMBDA_RANGE, size=rank)
    A = (Q * lam) @ adjoint(Q)
    metric = new_metric(A, settings=settings)

    ops = {}
    for name in OPERATOR_NAMES:
        attempt = 0
        T = draw_operator(seed, dim, rank, name, Q, attempt)
        # a zero draw is resampled on an appended stream index
        while not np.any(T):
            attempt += 1
            T = draw_operator(seed, dim, rank, name, Q, attempt)
        ops[name] = frozen(T)
    return Instance(seed=int(seed), dim=dim, rank=rank, metric=metric, basis=frozen(Q), ops=ops)


def identity_instance(seed, dim, settings: Optional[Settings] = None) -> Instance:
    """Instance over A = I, operators drawn as in gen_instance at full rank."""
    _check_shape(dim, dim)
    basis = np.eye(dim, dtype=np.complex128)
    metric = new_metric(basis, settings=settings)
    ops = {name: frozen(draw_operator(seed, dim, dim, name, basis)) for name in OPERATOR_NAMES}
    return Instance(seed=int(seed), dim=dim, rank=dim, metric=metric, basis=frozen(basis), ops=ops)

