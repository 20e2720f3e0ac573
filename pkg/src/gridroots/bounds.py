"""Closed-form solution-count bounds and their dispatch by topology.

kappa(n) = C(2n-2, n-1) bounds the complex solutions of any n-bus
system.  Networks that decompose nicely tighten it: a product of
per-clique kappas for block networks (proven), the same product halved
once per shared edge for edge-shared clique trees (conjectured), and a
per-block mix of the two.  All arithmetic is integer-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from . import cliques
from .cliques import Graph, TopologyClass

# Far beyond the 7-bus desk scale, but keeps kappa exact and cheap.
MAX_KAPPA_N = 64


def kappa(n: int) -> int:
    """C(2n-2, n-1): the generic complex-solution bound for n buses."""
    if n < 1:
        raise ValueError(f"kappa needs n >= 1, got {n}")
    if n > MAX_KAPPA_N:
        raise OverflowError(f"kappa({n}) refused; limit is n = {MAX_KAPPA_N}")
    return math.comb(2 * n - 2, n - 1)


def kappa1(signature: Iterable[int]) -> int:
    """Product of per-clique kappas (proven for block networks)."""
    sizes = list(signature)
    if not sizes:
        raise ValueError("empty clique signature")
    return math.prod(kappa(s) for s in sizes)


def kappa2(signature: Iterable[int]) -> int:
    """kappa1 halved once per clique-graph tree edge (conjectured).

    Applies to maximal cliques sharing exactly two buses in a tree
    arrangement; for a single clique it coincides with kappa1.
    """
    sizes = list(signature)
    if not sizes:
        raise ValueError("empty clique signature")
    if any(s < 2 for s in sizes):
        raise ValueError(f"clique sizes must be >= 2, got {sorted(sizes)}")
    product = math.prod(kappa(s) for s in sizes)
    halvings = 2 ** (len(sizes) - 1)
    if product % halvings:
        raise AssertionError(
            f"kappa product {product} not divisible by {halvings}")
    return product // halvings


@dataclass(frozen=True)
class BoundReport:
    """Every applicable bound for one network topology.

    per_block_detail pairs each block's clique-size signature with its
    factor; is_conjecture is set whenever any factor came from kappa2.
    """

    bezout: int
    kappa_n: int
    topology_bound: int | None
    topology_class: TopologyClass
    is_conjecture: bool
    per_block_detail: tuple[tuple[str, int], ...]


def bound_for(g: Graph) -> BoundReport:
    """Dispatch the tightest applicable bound by topology class."""
    n = g.num_nodes
    if n < 2:
        raise ValueError("bound_for needs at least 2 nodes")
    bezout = 4 ** (n - 1)
    kn = kappa(n)
    analysis = cliques.block_analysis(g)
    cls = analysis.topology_class
    if cls is TopologyClass.UNCLASSIFIED:
        return BoundReport(bezout, kn, None, cls, False, ())

    detail = []
    conjecture = False
    bound = 1
    for members, kind in zip(analysis.block_cliques, analysis.block_kinds):
        sizes = sorted((len(analysis.structure.cliques[i]) for i in members),
                       reverse=True)
        key = "x".join(str(s) for s in sizes)
        if kind == "clique":
            factor = kappa1(sizes)
        else:
            factor = kappa2(sizes)
            conjecture = True
        detail.append((key, factor))
        bound *= factor
    return BoundReport(bezout, kn, bound, cls, conjecture, tuple(detail))
