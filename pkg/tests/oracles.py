"""Independent oracles and tiny network builders shared by the tests.

Every oracle here reaches its answer by a route separate from the code
under test: central finite differences instead of symbolic derivatives,
the two-bus loadability quadratic instead of continuation, subset-picked
linear systems for zero-injection networks, and brute-force subset
enumeration for maximal cliques.
"""

import itertools
import math

import numpy as np

from gridroots.cliques import Graph
from gridroots.pfmodel import Branch, Bus, BusKind, Network, build_admittance
from gridroots.polysys import evaluate


def fd_jacobian(system, point, step=1e-6):
    """Central-difference Jacobian of ``evaluate`` at ``point``."""
    point = np.asarray(point, dtype=complex)
    cols = []
    for k in range(point.size):
        e = np.zeros_like(point)
        e[k] = step
        cols.append((evaluate(system, point + e) - evaluate(system, point - e))
                    / (2.0 * step))
    return np.stack(cols, axis=1)


def two_bus_voltages(r, x, p_load, q_load):
    """Real solutions of a slack + single-PQ-load network, closed form.

    Eliminating the angle from the bus-2 balance leaves a quadratic in
    t = |V2|^2,

        t^2 + (2(P r + Q x) - 1) t + (P^2 + Q^2)(r^2 + x^2) = 0,

    with P, Q the load (consumption positive).  Back-substitution gives
    Vd = t + P r + Q x and Vq = Q r - P x.  Returns the discriminant and
    the (vd, vq) pairs, high-voltage root first; the list is empty past
    the loadability limit.
    """
    a = p_load * r + q_load * x
    c = (p_load ** 2 + q_load ** 2) * (r ** 2 + x ** 2)
    disc = (2.0 * a - 1.0) ** 2 - 4.0 * c
    if disc < 0.0:
        return disc, []
    pairs = []
    for sign in (1.0, -1.0):
        t = ((1.0 - 2.0 * a) + sign * math.sqrt(disc)) / 2.0
        pairs.append((t + a, q_load * r - p_load * x))
    return disc, pairs


def two_bus_net(r, x, p_load, q_load):
    """Slack (1.0 pu) feeding one PQ load over a single line."""
    return Network(
        buses=(Bus(1, BusKind.SLACK, v_setpoint=1.0),
               Bus(2, BusKind.PQ, p_inject=-p_load, q_inject=-q_load)),
        branches=(Branch(1, 2, r=r, x=x),),
        name="two-bus")


def complete_net(n, rs=None, xs=None, b_shunt=0.0):
    """Complete graph on n buses, slack at bus 1, the rest zero-injection PQ."""
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    rs = rs if rs is not None else [0.03] * len(pairs)
    xs = xs if xs is not None else [0.10] * len(pairs)
    buses = [Bus(1, BusKind.SLACK, v_setpoint=1.0)]
    buses += [Bus(i, BusKind.PQ) for i in range(2, n + 1)]
    branches = [Branch(i, j, r=r, x=x, b_shunt=b_shunt)
                for (i, j), r, x in zip(pairs, rs, xs)]
    return Network(tuple(buses), tuple(branches), name=f"complete-{n}")


def zero_injection_roots(net):
    """All isolated complex solutions of a zero-injection network.

    With every injection zero the balance equations factor through
    u = Vd + j Vq and w = Vd - j Vq (independent over C) as
    u_i (conj(Y) w)_i = 0 and w_i (Y u)_i = 0.  Each solution is picked
    by subsets S, T of the non-slack buses with |S| = |T|: u vanishes on
    S and (Y u) vanishes off T, and symmetrically for w.  Solving the two
    linear systems per (S, T) pair enumerates all sum_k C(n-1, k)^2
    candidates; the S = T pairs are the real ones.

    Returns solution vectors in (Vd2, Vq2, Vd3, Vq3, ...) order.  Raises
    ``numpy.linalg.LinAlgError`` when a subset system is singular, which
    happens for symmetric (identical-branch) networks whose solution set
    has positive-dimensional components.
    """
    n = net.num_buses
    adm = build_admittance(net)
    y = adm.g + 1j * adm.b
    free = list(range(1, n))
    sols = []
    for k in range(0, n):
        for s_set in itertools.combinations(free, k):
            for t_set in itertools.combinations(free, k):
                u = _subset_solve(y, n, free, s_set, t_set)
                w = _subset_solve(np.conj(y), n, free, t_set, s_set)
                vd = (u + w) / 2.0
                vq = (u - w) / 2.0j
                vec = np.empty(2 * (n - 1), dtype=complex)
                for idx, bus in enumerate(free):
                    vec[2 * idx] = vd[bus]
                    vec[2 * idx + 1] = vq[bus]
                sols.append(vec)
    return sols


def _subset_solve(y, n, free, zero_set, flow_set):
    # u = 1 at the slack, u_i = 0 on zero_set, (y u)_j = 0 off flow_set.
    a = np.zeros((n, n), dtype=complex)
    rhs = np.zeros(n, dtype=complex)
    a[0, 0] = 1.0
    rhs[0] = 1.0
    row = 1
    for i in zero_set:
        a[row, i] = 1.0
        row += 1
    for j in free:
        if j not in flow_set:
            a[row, :] = y[j, :]
            row += 1
    return np.linalg.solve(a, rhs)


def brute_force_cliques(g):
    """Maximal cliques by subset enumeration; exponential, tiny graphs only."""
    adj = {v: set() for v in range(1, g.num_nodes + 1)}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    nodes = sorted(adj)
    cliques = []
    for k in range(1, len(nodes) + 1):
        for sub in itertools.combinations(nodes, k):
            if all(b in adj[a] for a, b in itertools.combinations(sub, 2)):
                cliques.append(set(sub))
    return {frozenset(s) for s in cliques
            if not any(s < t for t in cliques)}


def random_connected_graph(rng, n, extra_prob=0.35):
    """Random spanning tree plus a Bernoulli sprinkle of chords."""
    perm = [int(v) for v in rng.permutation(np.arange(1, n + 1))]
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        a, b = perm[i], perm[j]
        edges.add((min(a, b), max(a, b)))
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if (a, b) not in edges and rng.random() < extra_prob:
                edges.add((a, b))
    return Graph(n, frozenset(edges))
