"""Bundled reference topologies with known clique structure and bounds.

Nine small networks exercise every topology class the bound machinery
distinguishes: three block networks, three edge-sharing clique trees, one
mixed decomposition, and three graphs that fall outside both rules and
must come back Unclassified.  ``harness.verify_published_examples`` checks
the computed clique structure, classification, and bound of each case
against the expected values recorded here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cliques import Graph, TopologyClass


@dataclass(frozen=True)
class ReferenceCase:
    """One reference topology and its expected analysis results.

    ``bound`` is the topology-dependent solution bound, or None when no
    bound rule applies and only the dense fallback kappa_n holds.
    """

    name: str
    description: str
    num_buses: int
    edges: tuple[tuple[int, int], ...]
    cliques: tuple[tuple[int, ...], ...]
    signature_key: str
    topology_class: TopologyClass
    bound: int | None
    is_conjecture: bool

    @property
    def graph(self) -> Graph:
        return Graph(self.num_buses, self.edges)


REFERENCE_CASES: tuple[ReferenceCase, ...] = (
    ReferenceCase(
        name="star-5",
        description="Five-bus star: four K2 blocks hanging off bus 1.",
        num_buses=5,
        edges=((1, 2), (1, 3), (1, 4), (1, 5)),
        cliques=((1, 2), (1, 3), (1, 4), (1, 5)),
        signature_key="2x2x2x2",
        topology_class=TopologyClass.BLOCK_NETWORK,
        bound=16,
        is_conjecture=False,
    ),
    ReferenceCase(
        name="triangle-tail-4",
        description="Triangle with a pendant bus attached at bus 3.",
        num_buses=4,
        edges=((1, 2), (1, 3), (2, 3), (3, 4)),
        cliques=((1, 2, 3), (3, 4)),
        signature_key="3x2",
        topology_class=TopologyClass.BLOCK_NETWORK,
        bound=12,
        is_conjecture=False,
    ),
    ReferenceCase(
        name="triangle-chain-7",
        description="Three triangles chained at single shared buses 3 and 5.",
        num_buses=7,
        edges=((1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5),
               (5, 6), (5, 7), (6, 7)),
        cliques=((1, 2, 3), (3, 4, 5), (5, 6, 7)),
        signature_key="3x3x3",
        topology_class=TopologyClass.BLOCK_NETWORK,
        bound=216,
        is_conjecture=False,
    ),
    ReferenceCase(
        name="diamond-4",
        description="Two triangles sharing the edge {2,3}.",
        num_buses=4,
        edges=((1, 2), (1, 3), (2, 3), (2, 4), (3, 4)),
        cliques=((1, 2, 3), (2, 3, 4)),
        signature_key="3x3",
        topology_class=TopologyClass.EDGE_SHARED_TREE,
        bound=18,
        is_conjecture=True,
    ),
    ReferenceCase(
        name="triangle-fan-6",
        description="Four triangles whose shared edges form a star on the "
                    "middle triangle.",
        num_buses=6,
        edges=((1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5),
               (4, 5), (2, 6), (4, 6)),
        cliques=((1, 2, 3), (2, 3, 4), (2, 4, 6), (3, 4, 5)),
        signature_key="3x3x3x3",
        topology_class=TopologyClass.EDGE_SHARED_TREE,
        bound=162,
        is_conjecture=True,
    ),
    ReferenceCase(
        name="k4-chain-7",
        description="Two K4s and a triangle chained along shared edges.",
        num_buses=7,
        edges=((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
               (3, 5), (3, 6), (4, 5), (4, 6), (5, 6), (5, 7), (6, 7)),
        cliques=((1, 2, 3, 4), (3, 4, 5, 6), (5, 6, 7)),
        signature_key="4x4x3",
        topology_class=TopologyClass.EDGE_SHARED_TREE,
        bound=600,
        is_conjecture=True,
    ),
    ReferenceCase(
        name="mixed-7",
        description="Three K2 blocks around a central block of two "
                    "edge-sharing triangles.",
        num_buses=7,
        edges=((1, 2), (2, 3), (2, 7), (3, 4), (3, 5), (3, 7),
               (5, 6), (5, 7)),
        cliques=((1, 2), (2, 3, 7), (3, 4), (3, 5, 7), (5, 6)),
        signature_key="3x3x2x2x2",
        topology_class=TopologyClass.MIXED_BLOCK_EDGE_TREE,
        bound=144,
        is_conjecture=True,
    ),
    ReferenceCase(
        name="k4-pair-5",
        description="K5 minus one edge: two K4s sharing three buses, "
                    "outside every bound rule.",
        num_buses=5,
        edges=((1, 2), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5),
               (3, 4), (3, 5), (4, 5)),
        cliques=((1, 2, 4, 5), (2, 3, 4, 5)),
        signature_key="4x4",
        topology_class=TopologyClass.UNCLASSIFIED,
        bound=None,
        is_conjecture=False,
    ),
    ReferenceCase(
        name="triple-fan-5",
        description="Three triangles all sharing the edge {2,3}: a cycle "
                    "in the shared-edge clique graph.",
        num_buses=5,
        edges=((1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (2, 5), (3, 5)),
        cliques=((1, 2, 3), (2, 3, 4), (2, 3, 5)),
        signature_key="3x3x3",
        topology_class=TopologyClass.UNCLASSIFIED,
        bound=None,
        is_conjecture=False,
    ),
    ReferenceCase(
        name="triangle-ring-5",
        description="Four triangles sharing edges in a ring around bus 3.",
        num_buses=5,
        edges=((1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5),
               (1, 4), (2, 5)),
        cliques=((1, 2, 3), (1, 3, 4), (2, 3, 5), (3, 4, 5)),
        signature_key="3x3x3x3",
        topology_class=TopologyClass.UNCLASSIFIED,
        bound=None,
        is_conjecture=False,
    ),
)


def get_case(name: str) -> ReferenceCase:
    for case in REFERENCE_CASES:
        if case.name == name:
            return case
    raise KeyError(f"unknown reference case {name!r}")
