"""Chimera annealer topologies, constructive clique minors, and capacities.

A Chimera graph C(M, N, L) is an M x N grid of complete bipartite K_{L,L}
cells.  Qubits on one shore ("u", encoded 0) couple to the same index in the
vertically neighboring cell; the other shore ("v", encoded 1) couples
horizontally.

The classic triangle construction embeds K_{4M} into a square C(M, M, 4)
with 4M chains of length M+1: chain (c, k) runs along row c on the v shore
up to the diagonal, then down column c on the u shore.  This module builds
that construction at any offset and side, a mirrored variant that interlocks
with it inside a t x (t+1) rectangle, and a wrapped variant that fits K_{4t+1}
into a t x t square by adding one long chain through the otherwise unused
upper half.  A shelf packer places several vertex-disjoint cliques from
these pieces; its failures mean "this construction cannot place it", which
is the classical analogue of an annealer refusing to compile.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CapacityError, PackingError
from .qubo import QuboModel, block_decomposition

SHORE_U = 0  # couples vertically
SHORE_V = 1  # couples horizontally

Node = tuple[int, int, int, int]  # (row, col, shore, index)


class ChimeraGraph:
    """Grid of K_{L,L} cells with the standard inter-cell couplers."""

    def __init__(self, m: int, n: int, l: int):
        if min(m, n, l) < 1:
            raise ValueError("all Chimera dimensions must be >= 1")
        self.m = m
        self.n = n
        self.l = l
        adj: dict[Node, set[Node]] = {}
        for r in range(m):
            for c in range(n):
                for i in range(l):
                    adj[(r, c, SHORE_U, i)] = set()
                    adj[(r, c, SHORE_V, i)] = set()
        for r in range(m):
            for c in range(n):
                for i in range(l):
                    u = (r, c, SHORE_U, i)
                    for j in range(l):
                        v = (r, c, SHORE_V, j)
                        adj[u].add(v)
                        adj[v].add(u)
                    if r + 1 < m:
                        adj[u].add((r + 1, c, SHORE_U, i))
                        adj[(r + 1, c, SHORE_U, i)].add(u)
                    if c + 1 < n:
                        v = (r, c, SHORE_V, i)
                        adj[v].add((r, c + 1, SHORE_V, i))
                        adj[(r, c + 1, SHORE_V, i)].add(v)
        self._adj = adj

    @property
    def n_nodes(self) -> int:
        return 2 * self.m * self.n * self.l

    def has_node(self, node: Node) -> bool:
        return node in self._adj

    def neighbors(self, node: Node) -> set[Node]:
        return self._adj[node]

    def has_edge(self, a: Node, b: Node) -> bool:
        return b in self._adj.get(a, ())

    def edges(self):
        for a, nbrs in self._adj.items():
            ia = self.linear_index(a)
            for b in nbrs:
                if self.linear_index(b) > ia:
                    yield a, b

    def n_edges(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def linear_index(self, node: Node) -> int:
        r, c, s, k = node
        return ((r * self.n + c) * 2 + s) * self.l + k


def chimera(m: int, n: int, l: int) -> ChimeraGraph:
    return ChimeraGraph(m, n, l)


@dataclass(frozen=True)
class Embedding:
    """Map from logical qubits to disjoint connected chains of physical nodes."""

    chains: dict[int, frozenset[Node]]

    def max_chain_length(self) -> int:
        return max((len(c) for c in self.chains.values()), default=0)

    def total_nodes(self) -> int:
        return sum(len(c) for c in self.chains.values())


def validate_embedding(g: ChimeraGraph, chains: dict[int, frozenset[Node]],
                       required_edges) -> None:
    """Check disjointness, chain connectivity, and logical edge coverage.

    Independent of the construction code: connectivity is a graph search and
    coverage is a scan of the physical edge set.  Raises ValueError on any
    violation.
    """
    owner: dict[Node, int] = {}
    for logical, chain in chains.items():
        if not chain:
            raise ValueError(f"chain {logical} is empty")
        for node in chain:
            if not g.has_node(node):
                raise ValueError(f"chain {logical} uses nonexistent node {node}")
            if node in owner:
                raise ValueError(f"node {node} shared by chains {owner[node]} and {logical}")
            owner[node] = logical
    for logical, chain in chains.items():
        start = next(iter(chain))
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in g.neighbors(node):
                if nxt in chain and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if len(seen) != len(chain):
            raise ValueError(f"chain {logical} is not connected")
    joined: set[tuple[int, int]] = set()
    for node, logical in owner.items():
        for nxt in g.neighbors(node):
            other = owner.get(nxt)
            if other is not None and other != logical:
                joined.add((min(logical, other), max(logical, other)))
    for a, b in required_edges:
        if a != b and (min(a, b), max(a, b)) not in joined:
            raise ValueError(f"logical edge ({a}, {b}) has no physical coupler")


def _all_pairs(lo: int, hi: int):
    return [(a, b) for a in range(lo, hi) for b in range(a + 1, hi)]


def _lower_chain(r0: int, c0: int, t: int, c: int, k: int) -> frozenset[Node]:
    horizontal = {(r0 + c, c0 + j, SHORE_V, k) for j in range(c + 1)}
    vertical = {(r0 + i, c0 + c, SHORE_U, k) for i in range(c, t)}
    return frozenset(horizontal | vertical)


def _upper_chain(r0: int, c0: int, t: int, c: int, k: int) -> frozenset[Node]:
    # mirrored partner living in the strict upper region of a t x (t+1) rect
    horizontal = {(r0 + c, c0 + j, SHORE_V, k) for j in range(c + 1, t + 1)}
    vertical = {(r0 + i, c0 + c + 1, SHORE_U, k) for i in range(c + 1)}
    return frozenset(horizontal | vertical)


def _triangle_chains(r0: int, c0: int, t: int, size: int, upper: bool):
    maker = _upper_chain if upper else _lower_chain
    return [maker(r0, c0, t, i // 4, i % 4) for i in range(size)]


def _wrap_chain(r0: int, c0: int, t: int) -> frozenset[Node]:
    """Extra chain through the upper half of a t x t lower-triangle square.

    Touches the top of every column segment via vertical couplers and the
    first group's row qubits via horizontal couplers, making one more clique
    member without growing the square.  Requires t >= 2.
    """
    nodes = {(r0, c0 + c, SHORE_V, 0) for c in range(1, t)}
    nodes |= {(r0, c0 + 1, SHORE_V, k) for k in range(1, 4)}
    for c in range(1, t):
        for i in range(c):
            for k in range(4):
                nodes.add((r0 + i, c0 + c, SHORE_U, k))
    return frozenset(nodes)


def clique_embedding(g: ChimeraGraph, k: int) -> Embedding:
    """Triangle embedding of the complete graph K_k into a square Chimera.

    Chains have length at most M+1.  Cliques larger than 4M exceed what the
    construction supports and raise CapacityError (the analogue of a failed
    hardware compile).
    """
    if g.m != g.n:
        raise ValueError("clique embedding requires a square Chimera graph")
    if k < 1:
        raise ValueError("clique size must be >= 1")
    if k > 4 * g.m:
        raise CapacityError(f"K_{k} exceeds the K_{4 * g.m} capacity of C({g.m},{g.m},4)")
    if k == 1:
        chains = {0: frozenset({(0, 0, SHORE_U, 0)})}
    else:
        t = -(-k // 4)
        chains = dict(enumerate(_triangle_chains(0, 0, t, k, upper=False)))
    emb = Embedding(chains=chains)
    validate_embedding(g, emb.chains, _all_pairs(0, k))
    return emb


def disjoint_clique_embedding(g: ChimeraGraph, sizes: list[int]) -> Embedding:
    """Place vertex-disjoint clique embeddings for every requested size.

    Each K_s occupies a triangle of side ceil(s/4); two same-side triangles
    interlock in a t x (t+1) rectangle, and sizes of the form 4t+1 (t >= 2)
    drop to a t x t square using the wrapped construction.  Rectangles are
    tiled onto shelves left to right, top to bottom.  Logical qubits are
    numbered sequentially across cliques in the given order.
    """
    chains: dict[int, frozenset[Node]] = {}
    required: list[tuple[int, int]] = []
    open_slots: dict[int, list[tuple[int, int]]] = {}
    cur_row = cur_col = shelf_h = 0
    base = 0
    for idx, size in enumerate(sizes):
        if size < 1:
            raise ValueError("clique sizes must be >= 1")
        wrapped = size >= 9 and size % 4 == 1
        t = (size - 1) // 4 if wrapped else max(1, -(-size // 4))
        placed = None
        if not wrapped and size > 1 and open_slots.get(t):
            r0, c0 = open_slots[t].pop()
            placed = _triangle_chains(r0, c0, t, size, upper=True)
        else:
            width = 1 if size == 1 else (t if wrapped else (t + 1 if t + 1 <= g.n else t))
            if cur_col + width > g.n:
                cur_row += shelf_h
                cur_col = 0
                shelf_h = 0
            if cur_row + t > g.m or cur_col + width > g.n:
                raise PackingError(
                    f"clique #{idx} (K_{size}) does not fit in C({g.m},{g.n},{g.l})"
                )
            r0, c0 = cur_row, cur_col
            if size == 1:
                placed = [frozenset({(r0, c0, SHORE_U, 0)})]
            elif wrapped:
                placed = _triangle_chains(r0, c0, t, size - 1, upper=False)
                placed.append(_wrap_chain(r0, c0, t))
            else:
                placed = _triangle_chains(r0, c0, t, size, upper=False)
                if width == t + 1:
                    open_slots.setdefault(t, []).append((r0, c0))
            cur_col += width
            shelf_h = max(shelf_h, t)
        for i, chain in enumerate(placed):
            chains[base + i] = chain
        required.extend(_all_pairs(base, base + size))
        base += size
    emb = Embedding(chains=chains)
    validate_embedding(g, emb.chains, required)
    return emb


def embed_qubo(model: QuboModel, g: ChimeraGraph) -> Embedding:
    """Embed a model's coupling graph, treating each component as a clique.

    A connected model of k qubits routes through the single-clique
    construction; otherwise every component of size s becomes one K_s in the
    disjoint packer.  Raises CapacityError/PackingError when the model does
    not fit, mirroring the compile failures of size-limited annealers.
    """
    components = block_decomposition(model)
    if len(components) == 1:
        emb = clique_embedding(g, len(components[0]))
        chains = {components[0][i]: c for i, c in emb.chains.items()}
    else:
        emb = disjoint_clique_embedding(g, [len(c) for c in components])
        chains = {}
        pos = 0
        for comp in components:
            for member in comp:
                chains[member] = emb.chains[pos]
                pos += 1
    return Embedding(chains=chains)


def capacity(g: ChimeraGraph, formulation: str) -> int:
    """Largest usable qubit count on a square grid, per formulation.

    The direct formulation needs one clique, capped at 4M chains (square
    root of twice the physical qubit count).  The block-diagonal formulation
    packs 33-cliques per 16x16 tile, i.e. 33/512 of the physical qubits.
    """
    if g.m != g.n:
        raise ValueError("capacity is defined for square Chimera graphs")
    if formulation == "vanilla":
        return 4 * g.m
    if formulation == "sylvester":
        if g.m % 16 != 0:
            raise ValueError("sylvester capacity requires the grid side to be a multiple of 16")
        return 132 * (g.m // 16) ** 2
    raise ValueError(f"unknown formulation {formulation!r}")


def edge_list_lines(g: ChimeraGraph) -> list[str]:
    """Physical edges as 'u v' lines over flat indices, sorted."""
    pairs = sorted(
        (min(g.linear_index(a), g.linear_index(b)), max(g.linear_index(a), g.linear_index(b)))
        for a, b in g.edges()
    )
    return [f"{a} {b}" for a, b in pairs]


def write_edge_list(g: ChimeraGraph, fp) -> None:
    fp.write("\n".join(edge_list_lines(g)) + "\n")


def embedding_to_json(g: ChimeraGraph, emb: Embedding) -> str:
    """Embedding as a JSON map {logical: [flat physical indices...]}."""
    payload = {
        str(logical): sorted(g.linear_index(n) for n in chain)
        for logical, chain in emb.chains.items()
    }
    return json.dumps(payload, sort_keys=True)
