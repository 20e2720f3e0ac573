"""Seeded random test-case generation.

Topologies come from a uniform random spanning tree (random-walk
construction) plus uniformly drawn extra edges; electrical parameters
follow fixed Gaussian/uniform/Bernoulli distributions on a 100 MVA
base.  Generation is deterministic in the seed with a documented draw
order: topology first, then branches in sorted edge order, then buses
in id order (plus a forced generator draw when none was sampled).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .cliques import Graph
from .pfmodel import Branch, Bus, BusKind, Network

# Recorded in Network.generator so cases are reproducible across tools.
RNG_ALGORITHM = "numpy-default-rng-pcg64"

MIN_REACTANCE = 1e-4


@dataclass(frozen=True)
class GenConfig:
    """Sampling distributions for random cases (per unit, 100 MVA base)."""

    n_buses: int
    seed: int
    mu_r: float = 0.03
    sigma_r: float = 0.03
    mu_x: float = 0.10
    sigma_x: float = 0.03
    mu_b: float = 0.005
    sigma_b: float = 0.001
    transformer_prob: float = 0.08
    mu_tau: float = 1.0
    sigma_tau: float = 0.02
    mu_theta_deg: float = 0.0
    sigma_theta_deg: float = 3.0
    generator_prob: float = 0.30
    vset_low: float = 0.90
    vset_high: float = 1.10
    mu_pg_mw: float = 200.0
    sigma_pg_mw: float = 30.0
    load_prob: float = 0.70
    mu_pd_mw: float = 50.0
    sigma_pd_mw: float = 20.0
    mu_qd_mvar: float = 30.0
    sigma_qd_mvar: float = 20.0
    mu_pz: float = 0.1
    sigma_pz: float = 0.03
    mu_qz: float = 0.1
    sigma_qz: float = 0.05
    mva_base: float = 100.0

    def __post_init__(self):
        if self.n_buses < 2:
            raise ValueError("n_buses must be at least 2")
        for name in ("sigma_r", "sigma_x", "sigma_b", "sigma_tau",
                     "sigma_theta_deg", "sigma_pg_mw", "sigma_pd_mw",
                     "sigma_qd_mvar", "sigma_pz", "sigma_qz"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("transformer_prob", "generator_prob", "load_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not self.vset_low <= self.vset_high:
            raise ValueError("vset range is inverted")
        if self.mva_base <= 0:
            raise ValueError("mva_base must be positive")


def random_spanning_tree(n: int, rng) -> list[tuple[int, int]]:
    """Uniform spanning tree of K_n via first-entrance random walk."""
    if n < 2:
        raise ValueError("spanning tree needs n >= 2")
    current = int(rng.integers(1, n + 1))
    visited = {current}
    edges = []
    while len(visited) < n:
        step = int(rng.integers(1, n))  # uniform over the other n-1 nodes
        nxt = step if step < current else step + 1
        if nxt not in visited:
            visited.add(nxt)
            edges.append((min(current, nxt), max(current, nxt)))
        current = nxt
    return edges


def generate_topology(n: int, rng) -> Graph:
    """Random connected simple graph: spanning tree plus extra edges.

    The line count is uniform on n+1 .. n(n-1)/2; when n+1 already
    exceeds the simple-graph maximum (n = 3) the range collapses to the
    complete graph.
    """
    if n < 3:
        raise ValueError("generate_topology needs n >= 3")
    max_edges = n * (n - 1) // 2
    low = min(n + 1, max_edges)
    target = int(rng.integers(low, max_edges + 1))
    edges = set(random_spanning_tree(n, rng))
    while len(edges) < target:
        u = int(rng.integers(1, n + 1))
        v = int(rng.integers(1, n + 1))
        if u == v:
            continue
        edges.add((min(u, v), max(u, v)))
    return Graph(n, edges)


def sample_branch(cfg: GenConfig, rng) -> dict:
    """Electrical parameters for one branch (the documented draw order)."""
    r = float(rng.normal(cfg.mu_r, cfg.sigma_r))
    if r < 0:
        r = 0.0
    x = float(rng.normal(cfg.mu_x, cfg.sigma_x))
    while abs(x) < MIN_REACTANCE:
        x = float(rng.normal(cfg.mu_x, cfg.sigma_x))
    b = float(rng.normal(cfg.mu_b, cfg.sigma_b))
    is_transformer = bool(rng.random() < cfg.transformer_prob)
    tau, theta_deg = 1.0, 0.0
    if is_transformer:
        tau = float(rng.normal(cfg.mu_tau, cfg.sigma_tau))
        while tau <= 0:
            tau = float(rng.normal(cfg.mu_tau, cfg.sigma_tau))
        theta_deg = float(rng.normal(cfg.mu_theta_deg, cfg.sigma_theta_deg))
    return {"r": r, "x": x, "b": b, "is_transformer": is_transformer,
            "tau": tau, "theta_deg": theta_deg}


def sample_bus_role(cfg: GenConfig, rng) -> dict:
    """Role and parameters for one bus (generator / load / zero-injection)."""
    if rng.random() < cfg.generator_prob:
        return {"role": "generator",
                "vset": float(rng.uniform(cfg.vset_low, cfg.vset_high)),
                "pg_mw": float(rng.normal(cfg.mu_pg_mw, cfg.sigma_pg_mw))}
    if rng.random() < cfg.load_prob:
        return {"role": "load",
                "pd_mw": float(rng.normal(cfg.mu_pd_mw, cfg.sigma_pd_mw)),
                "qd_mvar": float(rng.normal(cfg.mu_qd_mvar, cfg.sigma_qd_mvar)),
                "pz": float(rng.normal(cfg.mu_pz, cfg.sigma_pz)),
                "qz": float(rng.normal(cfg.mu_qz, cfg.sigma_qz))}
    return {"role": "zero"}


def _assemble(cfg: GenConfig, graph: Graph, rng, name: str) -> Network:
    branches = []
    for u, v in graph.sorted_edges():
        d = sample_branch(cfg, rng)
        branches.append(Branch(from_bus=u, to_bus=v, r=d["r"], x=d["x"],
                               b_shunt=d["b"], tau=d["tau"],
                               theta_deg=d["theta_deg"]))
    roles = [sample_bus_role(cfg, rng) for _ in range(graph.num_nodes)]
    gens = [i for i, role in enumerate(roles) if role["role"] == "generator"]
    if not gens:
        forced = int(rng.integers(1, graph.num_nodes + 1)) - 1
        roles[forced] = {
            "role": "generator",
            "vset": float(rng.uniform(cfg.vset_low, cfg.vset_high)),
            "pg_mw": float(rng.normal(cfg.mu_pg_mw, cfg.sigma_pg_mw))}
        gens = [forced]
    slack_idx = gens[0]

    base = cfg.mva_base
    buses = []
    for i, role in enumerate(roles):
        bus_id = i + 1
        if role["role"] == "generator":
            if i == slack_idx:
                buses.append(Bus(bus_id, BusKind.SLACK,
                                 v_setpoint=role["vset"]))
            else:
                buses.append(Bus(bus_id, BusKind.PV,
                                 p_inject=role["pg_mw"] / base,
                                 v_setpoint=role["vset"]))
        elif role["role"] == "load":
            buses.append(Bus(bus_id, BusKind.PQ,
                             p_inject=-role["pd_mw"] / base,
                             q_inject=-role["qd_mvar"] / base,
                             shunt_g=role["pz"], shunt_b=role["qz"]))
        else:
            buses.append(Bus(bus_id, BusKind.PQ))
    return Network(buses=tuple(buses), branches=tuple(branches), name=name,
                   seed=cfg.seed, generator=RNG_ALGORITHM)


def generate_case(cfg: GenConfig) -> Network:
    """One random network: topology plus sampled parameters."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.n_buses == 2:
        graph = Graph(2, [(1, 2)])
    else:
        graph = generate_topology(cfg.n_buses, rng)
    return _assemble(cfg, graph, rng,
                     name=f"case-n{cfg.n_buses}-s{cfg.seed}")


def generate_case_on_topology(cfg: GenConfig, graph: Graph,
                              name: str | None = None) -> Network:
    """Sampled parameters on a fixed topology (no topology draws)."""
    if graph.num_nodes != cfg.n_buses:
        raise ValueError(
            f"graph has {graph.num_nodes} nodes, config says {cfg.n_buses}")
    if not graph.is_connected():
        raise ValueError("topology must be connected")
    rng = np.random.default_rng(cfg.seed)
    return _assemble(cfg, graph, rng,
                     name=name or f"fixed-n{cfg.n_buses}-s{cfg.seed}")


def _canonical_form(n: int, edges: frozenset) -> tuple:
    best = None
    for perm in permutations(range(1, n + 1)):
        mapped = tuple(sorted(
            (min(perm[u - 1], perm[v - 1]), max(perm[u - 1], perm[v - 1]))
            for u, v in edges))
        if best is None or mapped < best:
            best = mapped
    return best


def enumerate_small_topologies(n: int) -> list[Graph]:
    """One representative per isomorphism class of connected graphs.

    Brute-force canonicalization over all n! node relabelings; n <= 5
    keeps this instant.  Output is deterministic: sorted by edge count,
    then by canonical edge list.
    """
    if n > 5:
        raise ValueError("enumerate_small_topologies handles n <= 5")
    if n < 1:
        raise ValueError("need n >= 1")
    all_edges = list(combinations(range(1, n + 1), 2))
    reps = {}
    for mask in range(2 ** len(all_edges)):
        edges = frozenset(e for i, e in enumerate(all_edges) if mask >> i & 1)
        g = Graph(n, edges)
        if not g.is_connected():
            continue
        canon = _canonical_form(n, g.edges)
        if canon not in reps:
            reps[canon] = None
    ordered = sorted(reps, key=lambda c: (len(c), c))
    return [Graph(n, c) for c in ordered]
