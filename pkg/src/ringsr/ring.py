"""Tensor ring format: evaluation, materialization, ALS fitting, rank growth.

A ring over an order-N tensor is a cycle of N third-order cores; core k has
shape (ranks[k], extent_k, ranks[k+1]) and the bond after the last core
wraps back to the first.  Entry (i_0, ..., i_{N-1}) is the trace of the
ordered product of the per-core lateral slices.

Fitting is alternating least squares: core k is solved against the rest of
the ring through the subchain matrix
M_j = G_{k+1}(i_{k+1}) ... G_{N-1}(i_{N-1}) G_0(i_0) ... G_{k-1}(i_{k-1}),
whose entry (b, a) couples the trailing bond b and leading bond a of the
core being solved.  The normal-equation Gram matrix is assembled from small
per-core transfer contractions, so the full design matrix is never formed;
correctness of the convention is enforced by the materialization oracles in
the test suite rather than by matching any external reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_BOND = "abcdefghijklm"
_PHYS = "nopqrstuvwxyz"

# cutoff for the rank-revealing lstsq solve of the (possibly singular)
# normal equations; discarded directions fall back to the minimum-norm part
_LSTSQ_RCOND = 1e-12


@dataclass
class TensorRing:
    """Closed chain of third-order cores with circularly consistent bonds."""

    cores: list[np.ndarray]

    def __post_init__(self):
        if not self.cores:
            raise ValueError("a tensor ring needs at least one core")
        self.cores = [np.asarray(c, dtype=np.float64) for c in self.cores]
        for k, c in enumerate(self.cores):
            if c.ndim != 3:
                raise ValueError(f"core {k} must be third order, got shape {c.shape}")
        n = len(self.cores)
        for k in range(n):
            nxt = self.cores[(k + 1) % n]
            if self.cores[k].shape[2] != nxt.shape[0]:
                raise ValueError(
                    f"bond mismatch between core {k} (trailing {self.cores[k].shape[2]}) "
                    f"and core {(k + 1) % n} (leading {nxt.shape[0]})"
                )

    @property
    def order(self) -> int:
        return len(self.cores)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def bond_ranks(self) -> list[int]:
        """Leading rank of each core; bond k sits between cores k-1 and k."""
        return [c.shape[0] for c in self.cores]

    @property
    def ranks(self) -> list[int]:
        """Circular rank vector [R0, ..., RN] with R0 == RN."""
        r = self.bond_ranks
        return r + [r[0]]

    def copy(self) -> "TensorRing":
        return TensorRing([c.copy() for c in self.cores])


@dataclass
class RankSchedule:
    """Growth plan for the bond ranks: start at `initial`, add `step` per
    outer iteration, never exceed `max_rank` (or the per-bond caps)."""

    initial: int | list[int]
    max_rank: int
    step: int = 1
    bond_caps: list[int] | None = None

    def __post_init__(self):
        if self.max_rank < 1:
            raise ValueError("max_rank must be positive")
        if self.step < 0:
            raise ValueError("step must be nonnegative")
        for r in np.atleast_1d(self.initial):
            if r > self.max_rank:
                raise ValueError(f"initial rank {r} exceeds max_rank {self.max_rank}")

    def initial_bonds(self, order: int) -> list[int]:
        return normalize_ranks(self.initial, order)

    def caps(self, order: int) -> list[int]:
        if self.bond_caps is None:
            return [self.max_rank] * order
        caps = normalize_ranks(self.bond_caps, order)
        return [min(c, self.max_rank) for c in caps]


def normalize_ranks(ranks, order: int) -> list[int]:
    """Accept a scalar, a length-N bond list, or the circular length-N+1
    vector (first == last) and return the N-bond list."""
    if np.isscalar(ranks):
        ranks = [int(ranks)] * order
    ranks = [int(r) for r in ranks]
    if len(ranks) == order + 1:
        if ranks[0] != ranks[-1]:
            raise ValueError("circular rank vector must have equal first and last entries")
        ranks = ranks[:-1]
    if len(ranks) != order:
        raise ValueError(f"expected {order} bond ranks, got {len(ranks)}")
    if any(r < 1 for r in ranks):
        raise ValueError("ranks must be positive")
    return ranks


def random_ring(shape, ranks, rng=None, scale=1.0) -> TensorRing:
    """Ring with independent Gaussian core entries, for initialization and
    for generating exact-rank test targets."""
    rng = np.random.default_rng() if rng is None else rng
    shape = tuple(int(s) for s in shape)
    bonds = normalize_ranks(ranks, len(shape))
    cores = []
    for k, extent in enumerate(shape):
        r_in = bonds[k]
        r_out = bonds[(k + 1) % len(shape)]
        cores.append(scale * rng.standard_normal((r_in, extent, r_out)))
    return TensorRing(cores)


def tr_element(ring: TensorRing, index) -> float:
    """Trace of the ordered product of lateral slices at a multi-index."""
    index = tuple(int(i) for i in index)
    if len(index) != ring.order:
        raise ValueError(f"index of length {len(index)} for an order-{ring.order} ring")
    for k, (i, c) in enumerate(zip(index, ring.cores)):
        if not 0 <= i < c.shape[1]:
            raise ValueError(f"index {i} out of range for mode {k} of extent {c.shape[1]}")
    m = ring.cores[0][:, index[0], :]
    for k in range(1, ring.order):
        m = m @ ring.cores[k][:, index[k], :]
    return float(np.trace(m))


def tr_to_dense(ring: TensorRing) -> np.ndarray:
    """Materialize the full tensor, contracting all bonds including the wrap."""
    n = ring.order
    if n > len(_BOND):
        raise ValueError(f"order {n} exceeds the supported maximum {len(_BOND)}")
    subs = ",".join(_BOND[k] + _PHYS[k] + _BOND[(k + 1) % n] for k in range(n))
    return np.einsum(subs + "->" + _PHYS[:n], *ring.cores, optimize=True)


def _subchain_gram(cores, k):
    """Gram matrix of the subchain design for core k, built from per-core
    transfer contractions: entry ((a,b), (a',b')) = sum_j M_j[b,a] M_j[b',a']."""
    n = len(cores)
    env = None
    for j in range(1, n):
        g = cores[(k + j) % n]
        t = np.einsum("ric,sid->rscd", g, g)
        env = t if env is None else np.einsum("rscd,cdef->rsef", env, t)
    if env is None:  # single-core ring: the subchain product is the identity
        r = cores[0].shape[0]
        eye = np.eye(r)
        env = np.einsum("ba,dc->bdac", eye, eye)
    ra, rb = env.shape[2], env.shape[0]
    return env.transpose(2, 0, 3, 1).reshape(ra * rb, ra * rb)


class _TargetLayouts:
    """Per-fit cache of the target tensor with a chosen mode moved last and
    made contiguous, so the first (and dominant) contraction of every core
    update is a copy-free matmul.  At most a couple of layouts are ever
    materialized for a given shape."""

    def __init__(self, target: np.ndarray):
        self.target = target
        self._cache: dict[int, np.ndarray] = {target.ndim - 1: target}

    def mode_last(self, mode: int) -> np.ndarray:
        if mode not in self._cache:
            self._cache[mode] = np.ascontiguousarray(np.moveaxis(self.target, mode, -1))
        return self._cache[mode]


def _subchain_rhs(layouts: _TargetLayouts, cores, k):
    """Projection of the target onto the subchain of all cores but k: entry
    (a, i, b) = sum_j M_j[b,a] * unfold_mode(target, k)[i, j].

    Contracts the largest mode first (through a cached mode-last layout of
    the target) so later intermediates are small, then folds in the
    remaining cores by descending mode size, consuming bond axes as they
    become shared."""
    n = len(cores)
    target = layouts.target
    if n == 1:
        r = cores[0].shape[0]
        return np.eye(r)[:, None, :] * target[None, :, None]
    shape = target.shape
    order = sorted((m for m in range(n) if m != k), key=lambda m: -shape[m])

    first = order[0]
    ra, extent, rb = cores[first].shape
    base = layouts.mode_last(first)
    w = base.reshape(-1, extent) @ cores[first].transpose(1, 0, 2).reshape(extent, ra * rb)
    w = w.reshape(base.shape[:-1] + (ra, rb))
    axes = [("p", m) for m in range(n) if m != first] + [("b", first), ("b", (first + 1) % n)]

    for m in order[1:]:
        core_axes = [("b", m), ("p", m), ("b", (m + 1) % n)]
        shared = [ax for ax in core_axes if ax in axes]
        w = np.tensordot(
            w,
            cores[m],
            axes=([axes.index(ax) for ax in shared], [core_axes.index(ax) for ax in shared]),
        )
        axes = [ax for ax in axes if ax not in shared] + [ax for ax in core_axes if ax not in shared]

    want = [("b", k), ("p", k), ("b", (k + 1) % n)]
    return np.ascontiguousarray(np.transpose(w, [axes.index(ax) for ax in want]))


@dataclass
class FitResult:
    """Fitted ring plus the squared Frobenius objective after each sweep."""

    ring: TensorRing
    objectives: list[float] = field(default_factory=list)

    @property
    def final_objective(self) -> float:
        return self.objectives[-1] if self.objectives else float("nan")


def tr_als_fit(target, ring: TensorRing, sweeps: int = 10, tol: float = 1e-4) -> FitResult:
    """Fit a ring to a fully observed target by alternating least squares.

    Each sweep updates every core once, solving the normal equations of the
    per-core linear least-squares problem with all other cores fixed.  Stops
    after `sweeps` sweeps or as soon as the relative objective decrease
    between consecutive sweeps falls below `tol`.  Singular subchain systems
    get the minimum-norm solution, so the objective is non-increasing up to
    solver roundoff.
    """
    target = np.asarray(target, dtype=np.float64)
    if target.shape != ring.shape:
        raise ValueError(f"target shape {target.shape} does not match ring shape {ring.shape}")
    if sweeps < 1:
        raise ValueError("sweeps must be at least 1")
    cores = [c.copy() for c in ring.cores]
    n = len(cores)
    norm_sq = float(np.dot(target.ravel(), target.ravel()))
    layouts = _TargetLayouts(target)
    objectives: list[float] = []
    for _ in range(sweeps):
        gram = rhs = None
        for k in range(n):
            gram = _subchain_gram(cores, k)
            rhs = _subchain_rhs(layouts, cores, k)
            ra, extent, rb = rhs.shape
            sol, *_ = np.linalg.lstsq(
                gram, rhs.transpose(0, 2, 1).reshape(ra * rb, extent), rcond=_LSTSQ_RCOND
            )
            cores[k] = sol.reshape(ra, rb, extent).transpose(0, 2, 1)
        # objective from the quantities of the last core update: with that
        # core refreshed, <target, model> = sum(core * rhs) and |model|^2 is
        # the Gram quadratic form, so no materialization is needed
        ra, _, rb = cores[-1].shape
        gram4 = gram.reshape(ra, rb, ra, rb)
        cross = float(np.sum(cores[-1] * rhs))
        model_sq = float(np.einsum("aib,abcd,cid->", cores[-1], gram4, cores[-1]))
        objective = max(norm_sq - 2.0 * cross + model_sq, 0.0)
        objectives.append(objective)
        if len(objectives) > 1:
            prev = objectives[-2]
            if prev - objective <= tol * max(prev, np.finfo(float).tiny):
                break
        if objective <= 1e-28 * max(norm_sq, np.finfo(float).tiny):
            break
    return FitResult(TensorRing(cores), objectives)


def rank_increment(
    ring: TensorRing,
    step: int = 1,
    noise_scale: float = 1e-2,
    rng=None,
    bond_caps=None,
) -> TensorRing:
    """Grow every bond rank by `step`, preserving the existing cores in the
    leading sub-block.  New slabs are zero-mean Gaussian entries with RMS
    `noise_scale` relative to each core's RMS, so the materialized tensor
    moves by at most O(noise_scale); with noise_scale 0 it is unchanged
    exactly.  Optional per-bond caps clamp the growth."""
    if step < 0:
        raise ValueError("step must be nonnegative")
    if step == 0:
        return ring.copy()
    rng = np.random.default_rng() if rng is None else rng
    n = ring.order
    old = ring.bond_ranks
    new = [r + step for r in old]
    if bond_caps is not None:
        caps = normalize_ranks(bond_caps, n)
        new = [min(r, c) for r, c in zip(new, caps)]
    new = [max(r_new, r_old) for r_new, r_old in zip(new, old)]
    cores = []
    for k, core in enumerate(ring.cores):
        ra, extent, rb = core.shape
        na, nb = new[k], new[(k + 1) % n]
        rms = float(np.sqrt(np.mean(core**2)))
        grown = rng.standard_normal((na, extent, nb)) * (noise_scale * rms)
        grown[:ra, :, :rb] = core
        cores.append(grown)
    return TensorRing(cores)
