"""Total-degree homotopy continuation for square polynomial systems.

``solve_all`` builds the start system g_i = c_i (x_i^{d_i} - 1), deforms
it into the target through H(x,t) = gamma (1-t) G(x) + t F(x) with a
seeded random unit-modulus gamma, tracks every start solution, and
reduces the endpoints into a deduplicated, classified SolutionSet.  If
any path fails, the solve is retried with a fresh gamma (up to 3
attempts total) before the result is declared non-certified.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import _kernels, polysys
from .polysys import Monomial, PolynomialSystem


class PathStatus(enum.Enum):
    FINITE = "Finite"
    AT_INFINITY = "AtInfinity"
    SINGULAR = "Singular"
    FAILED = "Failed"


_STATUS_FROM_CODE = {
    0: PathStatus.FINITE,
    1: PathStatus.AT_INFINITY,
    2: PathStatus.SINGULAR,
    3: PathStatus.FAILED,
}


@dataclass(frozen=True)
class TrackerConfig:
    """Numerical knobs for path tracking.

    corrector_tol is an absolute Newton-step tolerance near unit-norm
    points and relative above; max_steps is a hard per-path budget;
    gamma_retries counts total solve attempts, each with a fresh gamma.
    """

    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.1
    corrector_tol: float = 1e-10
    corrector_max_iters: int = 3
    divergence_norm: float = 1e8
    endgame_start: float = 0.9
    dedup_tol: float = 1e-6
    real_tol: float = 1e-6
    seed: int = 0
    max_steps: int = 20000
    singular_cond_limit: float = 1e12
    gamma_retries: int = 3

    def __post_init__(self):
        if not (0 < self.min_step < self.initial_step <= self.max_step < 1):
            raise ValueError(
                "need 0 < min_step < initial_step <= max_step < 1")
        for name in ("corrector_tol", "divergence_norm", "dedup_tol",
                     "real_tol", "singular_cond_limit"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (0 < self.endgame_start < 1):
            raise ValueError("endgame_start must lie in (0, 1)")
        if self.corrector_max_iters < 1 or self.max_steps < 1:
            raise ValueError("iteration budgets must be at least 1")
        if self.gamma_retries < 1:
            raise ValueError("gamma_retries must be at least 1")

    def digest(self) -> str:
        """Hash of every numerical field except the seed."""
        doc = {f.name: getattr(self, f.name) for f in fields(self)
               if f.name != "seed"}
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Homotopy:
    start: PolynomialSystem
    target: PolynomialSystem
    gamma: complex

    def __post_init__(self):
        if self.start.num_vars != self.target.num_vars:
            raise ValueError("start and target differ in num_vars")
        if polysys.degrees(self.start) != polysys.degrees(self.target):
            raise ValueError("start and target differ in degrees")
        g = complex(self.gamma)
        if abs(abs(g) - 1.0) > 1e-9:
            raise ValueError("gamma must lie on the unit circle")
        object.__setattr__(self, "gamma", g)


@dataclass(frozen=True)
class PathResult:
    status: PathStatus
    endpoint: np.ndarray
    final_residual: float
    steps_taken: int
    start_index: int


@dataclass(frozen=True)
class SolutionSet:
    """Deduplicated endpoints of all paths, with full accounting.

    finite[i] occurs with multiplicities[i] paths; the invariant
    sum(multiplicities) + num_at_infinity + num_singular + num_failed
    = num_paths holds on every run.  num_failed > 0 marks the set
    non-certified.
    """

    finite: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]
    num_paths: int
    num_at_infinity: int
    num_singular: int
    num_failed: int
    real_indices: tuple[int, ...]
    gamma: complex
    attempts: int
    target: PolynomialSystem
    path_results: tuple[PathResult, ...]

    def __post_init__(self):
        total = (sum(self.multiplicities) + self.num_at_infinity
                 + self.num_singular + self.num_failed)
        if total != self.num_paths:
            raise AssertionError(
                f"path accounting broken: {total} != {self.num_paths}")
        if len(self.finite) != len(self.multiplicities):
            raise AssertionError("finite/multiplicities length mismatch")

    @property
    def num_finite_complex(self) -> int:
        return len(self.finite)

    @property
    def num_real(self) -> int:
        return len(self.real_indices)

    @property
    def certified(self) -> bool:
        return self.num_failed == 0


def build_start_system(target: PolynomialSystem, seed):
    """Total-degree start system and its exact solutions.

    Returns (start, points): g_i = c_i (x_i^{d_i} - 1) with seeded random
    nonzero complex c_i, and all prod(d_i) combinations of d_i-th roots
    of unity in itertools.product order.
    """
    degs = polysys.degrees(target)
    polysys.total_degree(target)
    nv = target.num_vars
    rng = np.random.default_rng(seed)
    moduli = 0.5 + rng.random(nv)
    phases = np.exp(2j * np.pi * rng.random(nv))
    coeffs = moduli * phases
    polys = []
    for i, d in enumerate(degs):
        lead = [0] * nv
        lead[i] = d
        polys.append([
            Monomial(complex(coeffs[i]), tuple(lead)),
            Monomial(-complex(coeffs[i]), tuple([0] * nv)),
        ])
    start = PolynomialSystem(polys, num_vars=nv, var_names=target.var_names)
    roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in degs]
    points = [np.array(combo, dtype=np.complex128)
              for combo in itertools.product(*roots)]
    return start, points


def _kernel_args(h: Homotopy):
    tc, te, to = h.target.packed
    tjc, tje, tjo = h.target.packed_jacobian
    sc, se, so = h.start.packed
    sjc, sje, sjo = h.start.packed_jacobian
    maxdeg = max(h.target.max_exponent, h.start.max_exponent)
    return (tc, te, to, tjc, tje, tjo, sc, se, so, sjc, sje, sjo,
            maxdeg, np.complex128(h.gamma))


def _track_one(k, args, x0, cfg, index) -> PathResult:
    code, endpoint, res, steps = k.track_path(
        *args, np.ascontiguousarray(x0, dtype=np.complex128),
        cfg.initial_step, cfg.min_step, cfg.max_step,
        cfg.corrector_tol, cfg.corrector_max_iters, cfg.divergence_norm,
        cfg.endgame_start, cfg.singular_cond_limit, cfg.max_steps)
    endpoint = np.asarray(endpoint)
    endpoint.flags.writeable = False
    return PathResult(_STATUS_FROM_CODE[int(code)], endpoint,
                      float(res), int(steps), index)


def track_path(h: Homotopy, start_point, cfg: TrackerConfig) -> PathResult:
    """Track one homotopy path from a start-system solution."""
    x0 = np.asarray(start_point, dtype=np.complex128)
    if x0.shape != (h.start.num_vars,):
        raise ValueError(
            f"start point of shape {x0.shape}, expected ({h.start.num_vars},)")
    res0 = float(np.max(np.abs(polysys.evaluate(h.start, x0))))
    if res0 > cfg.corrector_tol:
        raise ValueError(
            f"start point has start-system residual {res0:.3e} "
            f"> corrector_tol {cfg.corrector_tol:.3e}")
    k = _kernels.get_kernels()
    return _track_one(k, _kernel_args(h), x0, cfg, 0)


def _track_all(h: Homotopy, points, cfg: TrackerConfig, threads: int):
    k = _kernels.get_kernels()
    args = _kernel_args(h)
    if threads <= 1:
        return [_track_one(k, args, x0, cfg, i)
                for i, x0 in enumerate(points)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_track_one, k, args, x0, cfg, i)
                   for i, x0 in enumerate(points)]
        return [f.result() for f in futures]


def _reduce(target, results, num_paths, gamma, attempts, cfg) -> SolutionSet:
    """Deduplicate finite endpoints and settle the accounting."""
    counts = {s: 0 for s in PathStatus}
    reps: list[np.ndarray] = []
    mults: list[int] = []
    for r in results:
        counts[r.status] += 1
        if r.status is not PathStatus.FINITE:
            continue
        for j, rep in enumerate(reps):
            if np.max(np.abs(r.endpoint - rep)) < cfg.dedup_tol:
                mults[j] += 1
                break
        else:
            reps.append(r.endpoint)
            mults.append(1)

    # Same endpoint reached by several paths: genuinely multiple (hence
    # singular) solutions get reclassified; generic coefficients make
    # this a measure-zero event.
    finite, multiplicities = [], []
    singular_extra = 0
    for rep, mult in zip(reps, mults):
        if mult > 1:
            cond = float(np.linalg.cond(polysys.jacobian(target, rep)))
            if not math.isfinite(cond) or cond > cfg.singular_cond_limit:
                singular_extra += mult
                continue
        finite.append(rep)
        multiplicities.append(mult)

    real_indices = tuple(
        i for i, rep in enumerate(finite)
        if float(np.max(np.abs(rep.imag))) < cfg.real_tol)
    return SolutionSet(
        finite=tuple(finite),
        multiplicities=tuple(multiplicities),
        num_paths=num_paths,
        num_at_infinity=counts[PathStatus.AT_INFINITY],
        num_singular=counts[PathStatus.SINGULAR] + singular_extra,
        num_failed=counts[PathStatus.FAILED],
        real_indices=real_indices,
        gamma=gamma,
        attempts=attempts,
        target=target,
        path_results=tuple(results),
    )


def solve_all(target: PolynomialSystem, cfg: TrackerConfig,
              threads: int = 1) -> SolutionSet:
    """Find all isolated complex solutions of a square target system.

    Deterministic for fixed (target, cfg) regardless of thread count:
    paths are reduced in start-index order.
    """
    num_paths = polysys.total_degree(target)
    best = None
    for attempt in range(cfg.gamma_retries):
        attempt_seed = int(cfg.seed) + attempt * (2 ** 32)
        gamma_rng = np.random.default_rng((attempt_seed, 0xA77A))
        gamma = complex(np.exp(2j * np.pi * gamma_rng.random()))
        start, points = build_start_system(target, attempt_seed)
        h = Homotopy(start=start, target=target, gamma=gamma)
        results = _track_all(h, points, cfg, threads)
        sset = _reduce(target, results, num_paths, gamma, attempt + 1, cfg)
        if sset.certified:
            return sset
        if best is None or sset.num_failed < best.num_failed:
            best = sset
    return best


def filter_real(sols: SolutionSet, real_tol: float) -> list[np.ndarray]:
    """Real solutions: imaginary part below real_tol, truncated, polished.

    Each candidate gets its imaginary part zeroed, one real Newton step,
    and a residual re-verification at 1e-8; candidates failing the
    re-verification are dropped.
    """
    out = []
    for vec in sols.finite:
        if float(np.max(np.abs(vec.imag))) >= real_tol:
            continue
        xr = np.ascontiguousarray(vec.real, dtype=np.float64)
        f = polysys.evaluate(sols.target, xr).real
        j = polysys.jacobian(sols.target, xr).real
        try:
            xr = xr - np.linalg.solve(j, f)
        except np.linalg.LinAlgError:
            pass
        res = float(np.max(np.abs(polysys.evaluate(sols.target, xr))))
        if res < 1e-8:
            out.append(xr)
    return out
