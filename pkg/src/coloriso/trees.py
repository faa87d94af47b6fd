"""Rooted trees, their density and balancedness, rooted powers, and the
1-subdivision family of complete bipartite graphs.

A rooted tree carries an ordered tuple of root vertices forming an
independent set.  Its density is e(T) / (v(T) - #roots), an exact
rational.  The tree is balanced when no nonempty set S of unrooted
vertices has fewer than density * |S| incident edges, where an edge is
counted as soon as one endpoint lies in S; balancedness is decided by
exhaustive subset enumeration over the unrooted vertices (bitmasks),
which is the honest thing to do at the sizes this package handles.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

from .errors import AllRootsError, CapExceededError, ParameterError
from .rng import rng_for

BALANCE_ENUM_CAP = 20  # max unrooted vertices for exhaustive subset checks


class Graph:
    """Simple undirected graph with hashable vertex labels.

    Vertex order is preserved (it doubles as the canonical order for
    serializing embeddings), edges are stored as frozensets.
    """

    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ParameterError("duplicate vertex labels")
        es = []
        seen = set()
        for e in edges:
            u, v = tuple(e)
            if u == v:
                raise ParameterError(f"loop at {u!r}")
            if u not in vset or v not in vset:
                raise ParameterError(f"edge {e!r} uses unknown vertex")
            fe = frozenset((u, v))
            if fe in seen:
                continue
            seen.add(fe)
            es.append(fe)
        self.edges = tuple(es)
        self._edge_set = frozenset(es)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u, v) -> bool:
        return frozenset((u, v)) in self._edge_set

    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph)
                and set(self.vertices) == set(other.vertices)
                and self._edge_set == other._edge_set)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class RootedTree:
    """A tree plus an ordered tuple of roots forming an independent set."""

    def __init__(self, vertices, edges, roots):
        self.graph = Graph(vertices, edges)
        self.roots = tuple(roots)
        rset = set(self.roots)
        if len(rset) != len(self.roots):
            raise ParameterError("duplicate roots")
        if not rset <= set(self.graph.vertices):
            raise ParameterError("roots must be vertices of the tree")
        if self.graph.m != self.graph.n - 1:
            raise ParameterError("edge count must be vertex count - 1")
        if not self._connected():
            raise ParameterError("edge set does not form a connected tree")
        for e in self.graph.edges:
            if set(e) <= rset:
                raise ParameterError(f"roots are not independent: edge {set(e)}")
        self.unrooted = tuple(v for v in self.graph.vertices if v not in rset)

    def _connected(self) -> bool:
        if self.graph.n == 0:
            return False
        adj = self.graph.adjacency()
        seen = {self.graph.vertices[0]}
        stack = [self.graph.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.graph.n

    @property
    def vertices(self):
        return self.graph.vertices

    @property
    def edges(self):
        return self.graph.edges

    @property
    def r(self) -> int:
        return len(self.roots)

    @property
    def a(self) -> int:
        return len(self.unrooted)

    @property
    def b(self) -> int:
        return self.graph.m

    def __repr__(self) -> str:
        return f"RootedTree(r={self.r}, a={self.a}, b={self.b})"


def density(t: RootedTree) -> Fraction:
    """Edges per unrooted vertex, as an exact rational."""
    if t.a == 0:
        raise AllRootsError("density undefined when every vertex is rooted")
    return Fraction(t.b, t.a)


def _incidence_masks(t: RootedTree):
    """Per-edge bitmask of unrooted endpoints, in unrooted-vertex bit order."""
    pos = {v: i for i, v in enumerate(t.unrooted)}
    masks = []
    for e in t.edges:
        m = 0
        for w in e:
            if w in pos:
                m |= 1 << pos[w]
        masks.append(m)
    return masks


def is_balanced(t: RootedTree, *, enum_cap: int = BALANCE_ENUM_CAP):
    """Decide balancedness; on failure also return a violating vertex set.

    Returns (True, None) or (False, witness) where witness is the set of
    unrooted vertices S with e(S)/|S| < density(t).  Comparison is exact:
    a * e(S) >= b * |S|.
    """
    rho = density(t)  # raises AllRootsError when a == 0
    if t.a > enum_cap:
        raise CapExceededError(
            f"{t.a} unrooted vertices exceed the enumeration cap {enum_cap}")
    masks = _incidence_masks(t)
    a, b = t.a, t.b
    for s in range(1, 1 << t.a):
        e_s = sum(1 for m in masks if m & s)
        size = s.bit_count()
        if a * e_s < b * size:
            witness = {t.unrooted[i] for i in range(t.a) if s >> i & 1}
            return False, witness
    return True, None


def power(t: RootedTree, k: int) -> Graph:
    """Union of k copies of the tree glued along the roots.

    Roots keep their labels; the unrooted vertex v of copy i becomes
    (i, v).  The result has r + k*a vertices and k*b edges.
    """
    if k < 1:
        raise ParameterError("power exponent must be >= 1")
    rset = set(t.roots)
    vertices = list(t.roots)
    edges = []
    for i in range(k):
        relabel = {v: v if v in rset else (i, v) for v in t.vertices}
        vertices.extend(relabel[v] for v in t.unrooted)
        edges.extend((relabel[u], relabel[w]) for u, w in (tuple(e) for e in t.edges))
    return Graph(vertices, edges)


def subdivision_kst(s: int, t: int) -> Graph:
    """1-subdivision of the complete bipartite graph K_{s,t}.

    Every edge of K_{s,t} is replaced by a path of length two through a
    fresh middle vertex: s + t + s*t vertices, 2*s*t edges.
    """
    if s < 2 or t < s:
        raise ParameterError(f"need 2 <= s <= t, got s={s}, t={t}")
    left = [("a", i) for i in range(s)]
    right = [("b", j) for j in range(t)]
    mid = [("m", i, j) for i in range(s) for j in range(t)]
    edges = []
    for i in range(s):
        for j in range(t):
            edges.append((("a", i), ("m", i, j)))
            edges.append((("m", i, j), ("b", j)))
    return Graph(left + right + mid, edges)


def path_tree(length: int, roots="both") -> RootedTree:
    """Path with ``length`` edges on vertices 0..length, rooted at its leaves.

    roots: "both" -> both leaves, "one" -> vertex 0 only.
    """
    if length < 2 and roots == "both":
        raise ParameterError("both-leaf rooting needs length >= 2 (independence)")
    vertices = list(range(length + 1))
    edges = [(i, i + 1) for i in range(length)]
    root_tuple = (0, length) if roots == "both" else (0,)
    return RootedTree(vertices, edges, root_tuple)


def star_tree(legs: int, rooted_leaves: int | None = None) -> RootedTree:
    """Star with ``legs`` leaves around centre "c"; leaves 0..k-1 are rooted.

    By default every leaf is rooted (the all-leaf star is the canonical
    density-``legs`` balanced tree with one unrooted vertex).
    """
    if legs < 1:
        raise ParameterError("star needs at least one leg")
    if rooted_leaves is None:
        rooted_leaves = legs
    if not 1 <= rooted_leaves <= legs:
        raise ParameterError("rooted leaf count out of range")
    vertices = ["c"] + list(range(legs))
    edges = [("c", i) for i in range(legs)]
    return RootedTree(vertices, edges, tuple(range(rooted_leaves)))


def random_rooted_tree(nvertices: int, rng_seed: int, *,
                       max_tries: int = 1000) -> RootedTree:
    """Uniform labelled tree with a random nonempty independent root set.

    The tree is drawn uniformly via a random Pruefer sequence; the root
    set is a random independent subset leaving at least one unrooted
    vertex.  Intended for property-test corpora, not for statistics.
    """
    if nvertices < 2:
        raise ParameterError("need at least two vertices")
    rng = rng_for(rng_seed, "tree")
    vertices = list(range(nvertices))
    if nvertices == 2:
        edges = [(0, 1)]
    else:
        seq = rng.integers(0, nvertices, size=nvertices - 2).tolist()
        degree = [1] * nvertices
        for x in seq:
            degree[x] += 1
        edges = []
        import heapq
        leaves = [v for v in vertices if degree[v] == 1]
        heapq.heapify(leaves)
        for x in seq:
            leaf = heapq.heappop(leaves)
            edges.append((leaf, x))
            degree[x] -= 1
            if degree[x] == 1:
                heapq.heappush(leaves, x)
        u = heapq.heappop(leaves)
        v = heapq.heappop(leaves)
        edges.append((u, v))
    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    for _ in range(max_tries):
        keep = rng.random(nvertices) < 0.5
        roots = []
        taken = set()
        order = rng.permutation(nvertices)
        for v in order:
            v = int(v)
            if keep[v] and not (adj[v] & taken):
                roots.append(v)
                taken.add(v)
        if roots and len(roots) < nvertices:
            return RootedTree(vertices, edges, tuple(sorted(roots)))
    raise ParameterError("failed to draw an admissible root set")  # pragma: no cover


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def tree_to_dict(t: RootedTree) -> dict:
    return {
        "vertices": list(t.vertices),
        "edges": [sorted(e, key=repr) for e in t.edges],
        "roots": list(t.roots),
    }


def tree_from_dict(data: dict) -> RootedTree:
    return RootedTree(data["vertices"], [tuple(e) for e in data["edges"]],
                      tuple(data["roots"]))


def load_tree(path) -> RootedTree:
    with open(path) as fh:
        return tree_from_dict(json.load(fh))


def save_tree(t: RootedTree, path) -> None:
    with open(path, "w") as fh:
        json.dump(tree_to_dict(t), fh, indent=1)


def graph_to_dict(g: Graph) -> dict:
    index = {v: i for i, v in enumerate(g.vertices)}
    return {
        "n": g.n,
        "labels": [repr(v) for v in g.vertices],
        "edges": sorted(sorted((index[u], index[w])) for u, w in
                        (tuple(e) for e in g.edges)),
    }


# Named patterns accepted by the CLI oracle/verify commands.

def pattern_by_name(name: str) -> Graph:
    """Small pattern registry: K2, Pk (path, k edges), Ck (cycle), Ks,t,
    Ks,tsub (1-subdivision)."""
    name = name.strip()
    if name.upper() == "K2":
        return Graph([0, 1], [(0, 1)])
    if name[0] in "Pp" and name[1:].isdigit():
        k = int(name[1:])
        if k < 1:
            raise ParameterError("path needs >= 1 edge")
        return Graph(range(k + 1), [(i, i + 1) for i in range(k)])
    if name[0] in "Cc" and name[1:].isdigit():
        k = int(name[1:])
        if k < 3:
            raise ParameterError("cycle needs >= 3 edges")
        return Graph(range(k), [(i, (i + 1) % k) for i in range(k)])
    if name[0] in "Kk" and "," in name:
        rest = name[1:]
        sub = rest.endswith("sub")
        if sub:
            rest = rest[:-3]
        s_str, t_str = rest.split(",")
        s, t = int(s_str), int(t_str)
        if sub:
            return subdivision_kst(s, t)
        return Graph([("a", i) for i in range(s)] + [("b", j) for j in range(t)],
                     [(("a", i), ("b", j)) for i in range(s) for j in range(t)])
    raise ParameterError(f"unknown pattern name {name!r}")


def enumerate_small_trees(max_vertices: int):
    """Every rooted tree (up to relabelling of the vertex set {0..n-1})
    with an ordered independent root tuple, for exhaustive cross-checks.

    Enumerates parent arrays (not isomorphism classes) so the corpus is
    finite but redundant; callers cap max_vertices at ~6.
    """
    for n in range(2, max_vertices + 1):
        for parents in itertools.product(*[range(i) for i in range(1, n)]):
            edges = [(parents[i - 1], i) for i in range(1, n)]
            adj = {v: set() for v in range(n)}
            for u, v in edges:
                adj[u].add(v)
                adj[v].add(u)
            for rbits in range(1, 1 << n):
                roots = [v for v in range(n) if rbits >> v & 1]
                if len(roots) == n:
                    continue
                rset = set(roots)
                if any(adj[u] & rset for u in roots):
                    continue
                yield RootedTree(range(n), edges, tuple(roots))
