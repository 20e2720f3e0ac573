"""Maximal-clique structure and topology classification of networks.

The classification drives which solution-count bound applies: networks
whose blocks (biconnected components) are all cliques take the proven
product bound; blocks whose maximal cliques overlap pairwise in exactly
two buses and hang together as a tree take the conjectured halved
product; everything else is Unclassified and gets only the generic
bound.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass


class TopologyClass(str, enum.Enum):
    BLOCK_NETWORK = "BlockNetwork"
    EDGE_SHARED_TREE = "EdgeSharedTree"
    MIXED_BLOCK_EDGE_TREE = "MixedBlockEdgeTree"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes 1..num_nodes."""

    num_nodes: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, num_nodes: int, edges):
        if num_nodes < 1:
            raise ValueError("graph needs at least one node")
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (1 <= u <= num_nodes and 1 <= v <= num_nodes):
                raise ValueError(f"edge ({u},{v}) outside 1..{num_nodes}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "num_nodes", int(num_nodes))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, itertools.combinations(range(1, n + 1), 2))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self) -> dict[int, set[int]]:
        adj = {v: set() for v in range(1, self.num_nodes + 1)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def is_connected(self) -> bool:
        if self.num_nodes == 1:
            return True
        adj = self.neighbors()
        seen = {1}
        stack = [1]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_nodes

    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class CliqueStructure:
    """Maximal cliques in canonical order (size descending, then lex)."""

    cliques: tuple[frozenset[int], ...]
    m: int
    signature: tuple[int, ...]
    avg_size: float


@dataclass(frozen=True)
class CliqueGraph:
    """Cliques as nodes; edges labeled with shared-bus counts."""

    num_cliques: int
    edges: tuple[tuple[int, int, int], ...]  # (i, j, shared), 1-based, i < j


def maximal_cliques(g: Graph) -> CliqueStructure:
    """All maximal cliques via Bron-Kerbosch with pivoting."""
    adj = g.neighbors()
    found: list[frozenset[int]] = []

    def expand(r: set, p: set, x: set):
        if not p and not x:
            found.append(frozenset(r))
            return
        pivot = min(p | x, key=lambda v: (-len(adj[v] & p), v))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(1, g.num_nodes + 1)), set())
    ordered = tuple(sorted(found, key=lambda c: (-len(c), sorted(c))))
    sizes = tuple(sorted((len(c) for c in ordered), reverse=True))
    return CliqueStructure(
        cliques=ordered,
        m=len(ordered),
        signature=sizes,
        avg_size=sum(sizes) / len(sizes),
    )


def clique_graph(cs: CliqueStructure) -> CliqueGraph:
    """Intersection graph of the maximal cliques."""
    edges = []
    for i, j in itertools.combinations(range(cs.m), 2):
        shared = len(cs.cliques[i] & cs.cliques[j])
        if shared >= 1:
            edges.append((i + 1, j + 1, shared))
    return CliqueGraph(num_cliques=cs.m, edges=tuple(edges))


def signature_key(cs: CliqueStructure) -> str:
    """Canonical signature string, e.g. "3x3x2x2x2"."""
    return "x".join(str(s) for s in cs.signature)


def biconnected_blocks(g: Graph) -> tuple[frozenset[int], ...]:
    """Vertex sets of the biconnected components (bridges included).

    Deterministic order: blocks sorted by their sorted vertex tuples.
    """
    adj = {v: sorted(nbrs) for v, nbrs in g.neighbors().items()}
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    clock = itertools.count()
    estack: list[tuple[int, int]] = []
    blocks: list[frozenset[int]] = []

    for root in range(1, g.num_nodes + 1):
        if root in disc:
            continue
        disc[root] = low[root] = next(clock)
        stack = [(root, 0, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            pushed = False
            for w in it:
                if w == parent:
                    parent = 0  # skip the tree edge back to parent once
                    stack[-1] = (v, 0, it)
                    continue
                if w not in disc:
                    estack.append((v, w))
                    disc[w] = low[w] = next(clock)
                    stack.append((w, v, iter(adj[w])))
                    pushed = True
                    break
                if disc[w] < disc[v]:
                    estack.append((v, w))
                    low[v] = min(low[v], disc[w])
            if pushed:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    comp = set()
                    while estack:
                        a, b = estack.pop()
                        comp.add(a)
                        comp.add(b)
                        if (a, b) == (u, v):
                            break
                    blocks.append(frozenset(comp))
    return tuple(sorted(blocks, key=sorted))


@dataclass(frozen=True)
class BlockAnalysis:
    """Block decomposition with each block's clique arrangement."""

    structure: CliqueStructure
    blocks: tuple[frozenset[int], ...]
    block_cliques: tuple[tuple[int, ...], ...]  # indices into structure.cliques
    block_kinds: tuple[str, ...]  # "clique" | "edge_tree" | "unknown"
    topology_class: TopologyClass


def _spanning_tree(members, links) -> bool:
    """Do the links form a spanning tree on the member set?"""
    if len(links) != len(members) - 1:
        return False
    comp = {m: m for m in members}

    def find(a):
        while comp[a] != a:
            comp[a] = comp[comp[a]]
            a = comp[a]
        return a

    for a, b in links:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        comp[ra] = rb
    return True


def block_analysis(g: Graph) -> BlockAnalysis:
    """Classify the clique arrangement of every block.

    A block holding exactly one maximal clique is that clique.  A block
    of m >= 2 cliques is an edge-shared tree when all pairwise overlaps
    are at most two buses and the two-bus overlaps connect the cliques
    as a spanning tree.  Anything else (an overlap of three or more
    buses, a cycle, or sparse overlaps as in a chordless cycle) defeats
    both product bounds and the graph is Unclassified.
    """
    cs = maximal_cliques(g)
    blocks = biconnected_blocks(g)
    over3 = any(len(a & b) >= 3
                for a, b in itertools.combinations(cs.cliques, 2))

    block_cliques: list[list[int]] = [[] for _ in blocks]
    for ci, c in enumerate(cs.cliques):
        for bi, bv in enumerate(blocks):
            if c <= bv:
                block_cliques[bi].append(ci)
                break
        else:
            if len(c) == 1:
                continue  # isolated vertex; cannot occur when connected
            raise AssertionError(f"clique {sorted(c)} not inside any block")

    kinds = []
    for members in block_cliques:
        if len(members) == 1:
            kinds.append("clique")
            continue
        links = []
        bad = False
        for a, b in itertools.combinations(members, 2):
            shared = len(cs.cliques[a] & cs.cliques[b])
            if shared >= 3:
                bad = True
                break
            if shared == 2:
                links.append((a, b))
        if bad or not _spanning_tree(members, links):
            kinds.append("unknown")
        else:
            kinds.append("edge_tree")

    if over3 or "unknown" in kinds:
        cls = TopologyClass.UNCLASSIFIED
    elif all(k == "clique" for k in kinds):
        cls = TopologyClass.BLOCK_NETWORK
    elif len(kinds) == 1:
        cls = TopologyClass.EDGE_SHARED_TREE
    else:
        cls = TopologyClass.MIXED_BLOCK_EDGE_TREE
    return BlockAnalysis(
        structure=cs,
        blocks=blocks,
        block_cliques=tuple(tuple(m) for m in block_cliques),
        block_kinds=tuple(kinds),
        topology_class=cls,
    )


def classify(g: Graph) -> TopologyClass:
    """Topology class of a connected graph (see block_analysis)."""
    return block_analysis(g).topology_class


def parse_edge_list(text: str) -> Graph:
    """Graph from an edge-list: one "u v" pair per line, '#' comments."""
    edges = []
    nmax = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        nmax = max(nmax, u, v)
    if not edges:
        raise ValueError("edge list is empty")
    return Graph(nmax, edges)
