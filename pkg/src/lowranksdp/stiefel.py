"""Geometry of the Stiefel-product manifold behind the Orthogonal-Cut problem.

A point is an (m*d) x k matrix whose i-th row block R_i (d rows) satisfies
R_i R_i^T = I_d, i.e. the transposed k x d frame sigma_i is orthonormal.
Tangent blocks U_i satisfy skew-symmetry of U_i R_i^T.  The retraction is the
blockwise polar factor (nearest orthonormal frame).

For d = 1 every operation here delegates to the sphere kernels on the same
arrays, so the reduction to the product of spheres is exact to the bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sphere
from .sphere import row_dots
from .symmat import SymmetricMatrix

__all__ = [
    "StiefelConfig",
    "StiefelTangent",
    "OcHessianOperator",
    "oc_project_tangent",
    "oc_retract",
    "oc_gradient",
    "oc_rayleigh",
    "oc_objective",
    "oc_random_config",
    "oc_random_tangent",
    "oc_lambda_blocks",
    "save_oc_config",
    "load_oc_config",
]

BLOCK_TOL = 1e-9
_MIN_SINGULAR = 1e-12


def _blocks(rows: np.ndarray, m: int, d: int) -> np.ndarray:
    return rows.reshape(m, d, rows.shape[1])


@dataclass(frozen=True)
class StiefelConfig:
    """Point of the Stiefel product: m row blocks of d orthonormal rows in R^k."""

    rows: np.ndarray
    d: int

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        d = int(self.d)
        if rows.ndim != 2 or d < 1 or rows.shape[0] % d != 0:
            raise ValueError("rows must stack m blocks of d rows each")
        if rows.shape[1] < d:
            raise ValueError("rank k must be at least the block dimension d")
        m = rows.shape[0] // d
        blk = _blocks(rows, m, d)
        gram = np.einsum("bik,bjk->bij", blk, blk)
        dev = gram - np.eye(d)
        err = np.sqrt(np.einsum("bij,bij->b", dev, dev))
        if np.any(err > BLOCK_TOL):
            raise ValueError("blocks are not orthonormal (max deviation %.3g)" % float(err.max()))
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1]

    @property
    def m(self) -> int:
        return self.rows.shape[0] // self.d

    def blocks(self) -> np.ndarray:
        return _blocks(self.rows, self.m, self.d)


@dataclass(frozen=True)
class StiefelTangent:
    """Tangent element: per block, U_i R_i^T is skew-symmetric."""

    rows: np.ndarray
    base: StiefelConfig

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.shape != self.base.rows.shape:
            raise ValueError("tangent shape does not match base configuration")
        m, d = self.base.m, self.base.d
        s = np.einsum("bik,bjk->bij", _blocks(rows, m, d), self.base.blocks())
        sym = s + s.transpose(0, 2, 1)
        scale = 1.0 + np.sqrt(np.einsum("bik,bik->b", _blocks(rows, m, d), _blocks(rows, m, d)))
        err = np.sqrt(np.einsum("bij,bij->b", sym, sym))
        if np.any(err > BLOCK_TOL * scale):
            raise ValueError("rows do not satisfy the block skew-symmetry condition")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.rows))


# -- raw-row kernels (shared with the solver) ---------------------------------


def project_rows(config: StiefelConfig, v: np.ndarray) -> np.ndarray:
    if config.d == 1:
        return sphere.project_rows(config.rows, v)
    m, d = config.m, config.d
    vb = _blocks(np.asarray(v, dtype=float), m, d)
    rb = config.blocks()
    s = np.einsum("bik,bjk->bij", vb, rb)
    s = 0.5 * (s + s.transpose(0, 2, 1))
    out = vb - np.einsum("bij,bjk->bik", s, rb)
    return out.reshape(config.rows.shape)


def retract_rows(config: StiefelConfig, u_rows: np.ndarray, t: float) -> np.ndarray:
    if config.d == 1:
        return sphere.retract_rows(config.rows, u_rows, t)
    m, d = config.m, config.d
    moved = _blocks(config.rows + t * u_rows, m, d)
    u, s, vt = np.linalg.svd(moved, full_matrices=False)
    if s.min() < _MIN_SINGULAR:
        raise ValueError("retraction undefined: rank-deficient block")
    polar = np.einsum("bij,bjk->bik", u, vt)
    return polar.reshape(config.rows.shape)


def _lambda_blocks_from_asig(config: StiefelConfig, asig: np.ndarray) -> np.ndarray:
    """Symmetrized diagonal d x d blocks of A sigma sigma^T."""
    m, d = config.m, config.d
    ab = _blocks(asig, m, d)
    rb = config.blocks()
    lam = np.einsum("bik,bjk->bij", ab, rb)
    return 0.5 * (lam + lam.transpose(0, 2, 1))


# -- public operations ---------------------------------------------------------


def oc_project_tangent(config: StiefelConfig, v: np.ndarray) -> StiefelTangent:
    """Blockwise projection v_i - sym(v_i R_i^T) R_i; idempotent, self-adjoint."""
    v = np.asarray(v, dtype=float)
    if v.shape != config.rows.shape:
        raise ValueError("shape mismatch in tangent projection")
    return StiefelTangent(project_rows(config, v), config)


def oc_retract(config: StiefelConfig, u: StiefelTangent, t: float) -> StiefelConfig:
    """Blockwise polar retraction: nearest orthonormal frame to sigma + t*u."""
    if u.base is not config and u.base.rows is not config.rows:
        raise ValueError("tangent field is based at a different configuration")
    if t == 0.0:
        return config
    return StiefelConfig(retract_rows(config, u.rows, float(t)), config.d)


def _require_block_match(A: SymmetricMatrix, config: StiefelConfig) -> None:
    if A.n != config.n:
        raise ValueError("dimension mismatch between matrix and configuration")
    if A.block_dim != config.d:
        raise ValueError("matrix lacks matching block structure (block_dim != d)")


def oc_objective(A: SymmetricMatrix, config: StiefelConfig) -> float:
    if A.n != config.n:
        raise ValueError("dimension mismatch between matrix and configuration")
    return float(row_dots(config.rows, A.dot(config.rows)).sum())


def oc_gradient(A: SymmetricMatrix, config: StiefelConfig) -> StiefelTangent:
    """Riemannian gradient 2(A - Lambda) sigma with block-diagonal Lambda."""
    _require_block_match(A, config)
    asig = A.dot(config.rows)
    if config.d == 1:
        lam = row_dots(config.rows, asig)
        g = 2.0 * (asig - lam[:, None] * config.rows)
        return StiefelTangent(g, config)
    lam = _lambda_blocks_from_asig(config, asig)
    g = 2.0 * (asig - np.einsum("bij,bjk->bik", lam, config.blocks()).reshape(config.rows.shape))
    return StiefelTangent(g, config)


def oc_lambda_blocks(A: SymmetricMatrix, config: StiefelConfig) -> np.ndarray:
    """The m dense d x d blocks of the constraint multiplier Lambda."""
    _require_block_match(A, config)
    return _lambda_blocks_from_asig(config, A.dot(config.rows))


class OcHessianOperator:
    """Hessian of the Orthogonal-Cut objective at a fixed configuration.

    On the tangent space the Hessian acts as u -> P_T(2(A - Lambda) u); the
    quadratic form is 2 <u, (A - Lambda) u>.
    """

    def __init__(self, A: SymmetricMatrix, config: StiefelConfig):
        _require_block_match(A, config)
        self.A = A
        self.config = config
        self._asig = A.dot(config.rows)
        if config.d == 1:
            self._lam_rows = row_dots(config.rows, self._asig)
            self._lam_blocks = None
        else:
            self._lam_rows = None
            self._lam_blocks = _lambda_blocks_from_asig(config, self._asig)

    def objective_value(self) -> float:
        if self.config.d == 1:
            return float(self._lam_rows.sum())
        return float(np.trace(self._lam_blocks.sum(axis=0)))

    def gradient(self) -> StiefelTangent:
        if self.config.d == 1:
            g = 2.0 * (self._asig - self._lam_rows[:, None] * self.config.rows)
        else:
            lam_sig = np.einsum("bij,bjk->bik", self._lam_blocks, self.config.blocks())
            g = 2.0 * (self._asig - lam_sig.reshape(self.config.rows.shape))
        return StiefelTangent(g, self.config)

    def _lam_times(self, rows: np.ndarray) -> np.ndarray:
        if self.config.d == 1:
            return self._lam_rows[:, None] * rows
        m, d = self.config.m, self.config.d
        return np.einsum("bij,bjk->bik", self._lam_blocks, _blocks(rows, m, d)).reshape(rows.shape)

    def _check_base(self, u: StiefelTangent) -> None:
        if u.base is not self.config and u.base.rows is not self.config.rows:
            raise ValueError("tangent field is based at a different configuration")

    def apply(self, u: StiefelTangent) -> StiefelTangent:
        self._check_base(u)
        return StiefelTangent(self.apply_rows(u.rows), self.config)

    def apply_rows(self, u_rows: np.ndarray) -> np.ndarray:
        if self.config.d == 1:
            au = self.A.dot(u_rows)
            w = 2.0 * (au - self._lam_rows[:, None] * u_rows)
            return sphere.project_rows(self.config.rows, w)
        w = 2.0 * (self.A.dot(u_rows) - self._lam_times(u_rows))
        return project_rows(self.config, w)

    def rayleigh(self, u: StiefelTangent) -> float:
        self._check_base(u)
        uu = float(np.sum(u.rows * u.rows))
        if uu == 0.0:
            raise ValueError("rayleigh quotient of the zero tangent")
        quad = 2.0 * (float(np.sum(u.rows * self.A.dot(u.rows)))
                      - float(np.sum(u.rows * self._lam_times(u.rows))))
        return quad / uu

    def random_tangent(self, seed) -> StiefelTangent:
        return oc_random_tangent(self.config, seed)


def oc_rayleigh(A: SymmetricMatrix, config: StiefelConfig, u: StiefelTangent) -> float:
    """Hessian quadratic form 2<u, (A - Lambda)u> / <u, u>."""
    return OcHessianOperator(A, config).rayleigh(u)


def oc_random_config(m: int, d: int, k: int, seed) -> StiefelConfig:
    """Blocks drawn as polar factors of Gaussian d x k matrices; deterministic per seed."""
    if m < 1 or d < 1 or k < d:
        raise ValueError("need m, d >= 1 and k >= d")
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal((m * d, k))
    if d == 1:
        return StiefelConfig(sphere.normalize_rows(rows), 1)
    g = rows.reshape(m, d, k)
    u, s, vt = np.linalg.svd(g, full_matrices=False)
    while s.min() < _MIN_SINGULAR:  # essentially impossible for Gaussian draws
        g = rng.standard_normal((m, d, k))
        u, s, vt = np.linalg.svd(g, full_matrices=False)
    polar = np.einsum("bij,bjk->bik", u, vt)
    return StiefelConfig(polar.reshape(m * d, k), d)


def oc_random_tangent(config: StiefelConfig, seed) -> StiefelTangent:
    """Projected Gaussian of unit Frobenius norm; deterministic per seed."""
    if config.d == 1 and config.k == 1:
        raise ValueError("tangent space is trivial for d = k = 1")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        g = rng.standard_normal(config.rows.shape)
        p = project_rows(config, g)
        nrm = np.linalg.norm(p)
        # same degenerate-draw guard as the sphere sampler
        if nrm > 1e-8 * np.linalg.norm(g):
            return StiefelTangent(p / nrm, config)
    raise ValueError("degenerate random tangent draw")


# -- text serialization ------------------------------------------------------
#
# Header ``occonfig m <m> d <d> k <k>``, then m*d rows of k floats with 17
# significant digits (bit-exact round trip), mirroring the sphere format.


def save_oc_config(config: StiefelConfig, path) -> None:
    lines = [f"occonfig m {config.m} d {config.d} k {config.k}"]
    for row in config.rows:
        lines.append(" ".join(f"{x:.17g}" for x in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_oc_config(path) -> StiefelConfig:
    with open(path) as fh:
        header = fh.readline().split()
        if (len(header) != 7 or header[0] != "occonfig" or header[1] != "m"
                or header[3] != "d" or header[5] != "k"):
            raise ValueError("not an occonfig file: bad header")
        m, d, k = int(header[2]), int(header[4]), int(header[6])
        rows = np.loadtxt(fh, dtype=float, ndmin=2)
    if rows.shape != (m * d, k):
        raise ValueError("occonfig body does not match header dimensions")
    return StiefelConfig(rows, d)
