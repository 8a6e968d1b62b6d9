"""Numeric cross-check of the combinatorial theory on small systems.

Random realizations of a sparsity pattern are fed to the nonlinear
controllability matrix: starting from the input columns, the span is grown by
the images ``A(v_1, ..., v_{k-1})`` of vectors already in the span until it
stops growing.  Structural controllability predicts full rank for almost every
realization, and rank deficiency for every realization otherwise.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import factorial
from typing import Any, Callable, Iterable

import numpy as np

from .errors import CapacityError, ValidationError
from .hypergraph import SparsityPattern, build_hypergraph

log = logging.getLogger(__name__)

DEFAULT_CAP = 8
DEFAULT_TOL = 1e-8


def bounded_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform on [-1, -0.1] U [0.1, 1]."""
    mag = rng.uniform(0.1, 1.0, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return mag * sign


@dataclass(frozen=True)
class Realization:
    pattern: SparsityPattern
    values_A: dict[tuple[int, ...], float]
    values_B: dict[tuple[int, int], float]
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        if set(self.values_A) != set(self.pattern.nonzeros_A) or set(self.values_B) != set(self.pattern.nonzeros_B):
            raise ValidationError("realization support must equal the pattern support")
        if any(c == 0 for c in self.values_A.values()) or any(c == 0 for c in self.values_B.values()):
            raise ValidationError("realization coefficients must be nonzero")

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def k(self) -> int:
        return self.pattern.k

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(heads, tails, coeffs)`` in sorted tuple order; ``tails`` has shape (nnz, k-1)."""
        keys = sorted(self.values_A)
        heads = np.array([t[0] for t in keys], dtype=np.intp)
        tails = np.array([t[1:] for t in keys], dtype=np.intp).reshape(len(keys), self.k - 1)
        coeffs = np.array([self.values_A[t] for t in keys], dtype=float)
        return heads, tails, coeffs

    def input_matrix(self) -> np.ndarray:
        b = np.zeros((self.n, self.pattern.m))
        for (r, c), val in self.values_B.items():
            b[r, c] = val
        return b

    def dense(self) -> np.ndarray:
        t = np.zeros((self.n,) * self.k)
        for idx, val in self.values_A.items():
            t[idx] = val
        return t


def realize_random(
    pattern: SparsityPattern,
    seed: int | None = None,
    dist: Callable[[np.random.Generator, int], np.ndarray] = bounded_uniform,
) -> Realization:
    """Draw i.i.d. coefficients for every nonzero of the pattern."""
    pattern.validate()
    rng = np.random.default_rng(seed)
    keys_a = sorted(pattern.nonzeros_A)
    keys_b = sorted(pattern.nonzeros_B)
    vals = dist(rng, len(keys_a) + len(keys_b))
    values_a = {t: float(c) for t, c in zip(keys_a, vals[: len(keys_a)])}
    values_b = {t: float(c) for t, c in zip(keys_b, vals[len(keys_a) :])}
    return Realization(pattern, values_a, values_b, seed)


def _check_vectors(r: Realization, vectors: tuple[np.ndarray, ...]) -> list[np.ndarray]:
    if len(vectors) != r.k - 1:
        raise ValidationError(f"expected {r.k - 1} vectors, got {len(vectors)}")
    out = [np.asarray(v, dtype=float) for v in vectors]
    if any(v.shape != (r.n,) for v in out):
        raise ValidationError(f"vectors must have shape ({r.n},)")
    return out


def apply_polynomial(r: Realization, *vectors: np.ndarray) -> np.ndarray:
    """``A x_2 v_1 x_3 v_2 ... x_k v_{k-1}`` evaluated over the stored nonzeros only."""
    vs = _check_vectors(r, vectors)
    heads, tails, coeffs = r.arrays()
    terms = coeffs.copy()
    for i, v in enumerate(vs):
        terms *= v[tails[:, i]]
    return np.bincount(heads, weights=terms, minlength=r.n)


def apply_symmetric(r: Realization, *vectors: np.ndarray) -> np.ndarray:
    """Product with the tensor symmetrized over modes 2..k.

    Equal to the mean of ``apply_polynomial`` over all orderings of the
    arguments.  Each nonzero contributes ``c * perm(V[i, t_j]) / (k-1)!``; the
    permanents are evaluated with Ryser's inclusion-exclusion formula,
    vectorized across nonzeros.
    """
    vs = _check_vectors(r, vectors)
    heads, tails, coeffs = r.arrays()
    d = r.k - 1
    # vals[i][:, j] = v_i[t_j] for every nonzero
    vals = [v[tails] for v in vs]
    perm = np.zeros(len(coeffs))
    for size in range(1, d + 1):
        sign = (-1) ** (d - size)
        for cols in combinations(range(d), size):
            prod = np.ones(len(coeffs))
            for i in range(d):
                prod *= vals[i][:, cols].sum(axis=1)
            perm += sign * prod
    return np.bincount(heads, weights=coeffs * perm / factorial(d), minlength=r.n)


@dataclass
class ControllabilityBasis:
    basis: np.ndarray
    stage: int
    rank: int = field(init=False)

    def __post_init__(self) -> None:
        self.rank = int(self.basis.shape[0])


def _try_extend(basis: list[np.ndarray], vec: np.ndarray, tol: float) -> bool:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return False
    res = vec / norm
    for _ in range(2):
        for q in basis:
            res = res - (q @ res) * q
    rn = float(np.linalg.norm(res))
    if rn > tol:
        basis.append(res / rn)
        return True
    return False


def _driver_columns(r: Realization, drivers: Iterable[int]) -> list[np.ndarray]:
    cols = []
    for d in sorted(set(drivers)):
        if not 0 <= d < r.n:
            raise ValidationError(f"driver {d + 1} out of range for n={r.n}")
        rng = np.random.default_rng([0 if r.rng_seed is None else r.rng_seed, d])
        col = np.zeros(r.n)
        col[d] = bounded_uniform(rng, 1)[0]
        cols.append(col)
    return cols


def controllability_rank(
    r: Realization, drivers: Iterable[int] = (), tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP
) -> tuple[int, ControllabilityBasis]:
    """Rank of the nonlinear controllability matrix of ``r`` with one extra input per driver.

    The span starts from the input columns.  Each sweep evaluates the
    symmetrized product on every multiset of ``k - 1`` vectors from the basis
    held at the start of the sweep; a candidate joins when its residual after
    projection exceeds ``tol`` relative to its norm.  At most ``n - 1`` sweeps.
    """
    n = r.n
    if n > cap:
        raise CapacityError(f"controllability oracle limited to n <= {cap}, got n={n}")
    if r.k % 2 == 1:
        warnings.warn(
            "odd tensor order gives even-degree dynamics; full rank certifies strong accessibility only",
            stacklevel=2,
        )
    basis: list[np.ndarray] = []
    for col in list(r.input_matrix().T) + _driver_columns(r, drivers):
        if len(basis) < n:
            _try_extend(basis, col, tol)
    stage = 0
    while 0 < len(basis) < n and stage < n - 1:
        stage += 1
        snapshot = list(basis)
        grew = False
        for combo in combinations_with_replacement(range(len(snapshot)), r.k - 1):
            cand = apply_symmetric(r, *(snapshot[i] for i in combo))
            grew |= _try_extend(basis, cand, tol)
            if len(basis) == n:
                break
        if not grew:
            break
    mat = np.array(basis) if basis else np.zeros((0, n))
    return len(basis), ControllabilityBasis(mat, stage)


@dataclass
class OracleReport:
    trials: int
    per_trial_ranks: list[int]
    seeds: list[int]
    n: int
    structural_verdict: bool | None
    strong_accessibility_only: bool = False

    @property
    def fraction_full_rank(self) -> float | None:
        if not self.per_trial_ranks:
            return None
        return sum(r == self.n for r in self.per_trial_ranks) / len(self.per_trial_ranks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "fraction_full_rank": self.fraction_full_rank,
            "per_trial_ranks": self.per_trial_ranks,
            "seeds": self.seeds,
            "structural_verdict": self.structural_verdict,
            "strong_accessibility_only": self.strong_accessibility_only,
        }


def trial_seeds(seed: int, trials: int) -> list[int]:
    if trials <= 0:
        return []
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials)]


def cross_validate(
    pattern: SparsityPattern,
    drivers: Iterable[int],
    trials: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    cap: int = DEFAULT_CAP,
) -> OracleReport:
    """Compare the structural verdict for ``drivers`` with ranks over random realizations."""
    from .select import verify_structural_controllability

    drivers = sorted(set(drivers))
    if pattern.n > cap:
        raise CapacityError(f"controllability oracle limited to n <= {cap}, got n={pattern.n}")
    if trials <= 0:
        return OracleReport(0, [], [], pattern.n, None)
    h = build_hypergraph(pattern)
    verdict, _ = verify_structural_controllability(h, drivers)
    seeds = trial_seeds(seed, trials)
    ranks = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for s in seeds:
            rank, _ = controllability_rank(realize_random(pattern, s), drivers, tol, cap)
            ranks.append(rank)
            if verdict and rank < pattern.n:
                log.info("generic rank failure: seed=%d rank=%d n=%d", s, rank, pattern.n)
    return OracleReport(trials, ranks, seeds, pattern.n, verdict, pattern.k % 2 == 1)
