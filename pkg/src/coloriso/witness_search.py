"""Search for colour-isomorphic vertex-disjoint subgraph pairs.

A pair of copies of a pattern h is colour isomorphic when some
isomorphism between them preserves every edge colour; searching over
ordered pairs (map1, map2) of embeddings of the same pattern covers all
isomorphisms.  The searches here embed both maps in lockstep along a
connectivity-first ordering of the pattern vertices and prune the
instant a pattern edge gets two different colours — with a proper host
colouring the (vertex, colour) index pins the partner endpoint to at
most one candidate, which is what makes these searches fast.

Budgeted searches distinguish three outcomes: a certified witness, an
exhausted search space ("none"), and a spent budget ("budget"); a
timeout is never reported as absence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .colouring import EdgeColouring
from .errors import InfeasibleSizeError, ParameterError, SizeError
from .trees import Graph, RootedTree

FOUND = "found"
NONE = "none"
BUDGET = "budget"

DEFAULT_PAIR_BUDGET = 50_000_000


class EmbeddedPair:
    """Two embeddings of one pattern with disjoint host images."""

    def __init__(self, pattern: Graph, map1: dict, map2: dict):
        for m in (map1, map2):
            if set(m) != set(pattern.vertices):
                raise ParameterError("map must cover exactly the pattern vertices")
            if len(set(m.values())) != len(m):
                raise ParameterError("map must be injective")
        if set(map1.values()) & set(map2.values()):
            raise ParameterError("images must be vertex disjoint")
        self.pattern = pattern
        self.map1 = dict(map1)
        self.map2 = dict(map2)

    def host_edges(self, which: int) -> frozenset:
        m = self.map1 if which == 1 else self.map2
        return frozenset(frozenset((m[u], m[v])) for u, v in
                         (tuple(e) for e in self.pattern.edges))

    def colour_trace(self, c: EdgeColouring) -> list:
        out = []
        for u, v in (tuple(e) for e in self.pattern.edges):
            out.append(((u, v), c.colour(self.map1[u], self.map1[v]),
                        c.colour(self.map2[u], self.map2[v])))
        return out

    def key(self) -> frozenset:
        """Identity of the unordered pair of host subgraphs."""
        return frozenset((self.host_edges(1), self.host_edges(2)))


@dataclass
class SearchResult:
    status: str
    pair: EmbeddedPair | None = None
    nodes: int = 0


def _pattern_order(h: Graph):
    """Vertex order maximizing back-edges into the placed prefix."""
    adj = h.adjacency()
    order = []
    placed = set()
    remaining = list(h.vertices)
    while remaining:
        remaining.sort(key=lambda v: (-len(adj[v] & placed), -len(adj[v]), repr(v)))
        v = remaining.pop(0)
        order.append(v)
        placed.add(v)
    back = [sorted((u for u in adj[v] if u in order[:i]),
                   key=order.index) for i, v in enumerate(order)]
    return order, back


def find_pair(c: EdgeColouring, h: Graph, budget: int = 1_000_000) -> SearchResult:
    """One colour-isomorphic vertex-disjoint pair of h-copies, or proof of none.

    Backtracks over simultaneous embeddings; the node budget counts
    candidate extensions, and running out yields status "budget" rather
    than "none".
    """
    n = c.n
    if h.n == 0:
        raise ParameterError("pattern must have at least one vertex")
    if 2 * h.n > n:
        return SearchResult(NONE, None, 0)
    order, back = _pattern_order(h)
    inc = c.incident_by_colour()
    hosts = range(1, n + 1)
    m1, m2 = {}, {}
    used = set()
    nodes = 0

    def extend(i: int):
        nonlocal nodes
        if i == len(order):
            return EmbeddedPair(h, dict(m1), dict(m2))
        w = order[i]
        earlier = back[i]
        if not earlier:
            for a in hosts:
                if a in used:
                    continue
                for b in hosts:
                    if b in used or b == a or (i == 0 and not a < b):
                        continue
                    nodes += 1
                    if nodes > budget:
                        return BUDGET
                    m1[w], m2[w] = a, b
                    used.add(a)
                    used.add(b)
                    res = extend(i + 1)
                    used.discard(a)
                    used.discard(b)
                    del m1[w], m2[w]
                    if res is not None:
                        return res
            return None
        u0 = earlier[0]
        rest = earlier[1:]
        for a in hosts:
            if a in used or a == m1[u0]:
                continue
            col = c.colour(m1[u0], a)
            for b in inc[m2[u0]].get(col, ()):
                if b in used or b == a:
                    continue
                nodes += 1
                if nodes > budget:
                    return BUDGET
                ok = True
                for u in rest:
                    if c.colour(m1[u], a) != c.colour(m2[u], b):
                        ok = False
                        break
                if not ok:
                    continue
                m1[w], m2[w] = a, b
                used.add(a)
                used.add(b)
                res = extend(i + 1)
                used.discard(a)
                used.discard(b)
                del m1[w], m2[w]
                if res is not None:
                    return res
        return None

    res = extend(0)
    if res is BUDGET:
        return SearchResult(BUDGET, None, nodes)
    if res is None:
        return SearchResult(NONE, None, nodes)
    return SearchResult(FOUND, res, nodes)


def enumerate_pairs(c: EdgeColouring, h: Graph, cap: int = 100_000):
    """All colour-isomorphic disjoint pairs of h-copies, as pair keys.

    Returns (set of EmbeddedPair.key() values, truncated flag).  Distinct
    (map1, map2) realizations of the same unordered subgraph pair
    collapse into one key.
    """
    n = c.n
    found: set = set()
    if 2 * h.n > n:
        return found, False
    order, back = _pattern_order(h)
    inc = c.incident_by_colour()
    hosts = range(1, n + 1)
    m1, m2 = {}, {}
    used = set()
    truncated = False

    def extend(i: int):
        nonlocal truncated
        if truncated:
            return
        if i == len(order):
            found.add(EmbeddedPair(h, dict(m1), dict(m2)).key())
            if len(found) > cap:
                truncated = True
            return
        w = order[i]
        earlier = back[i]
        if not earlier:
            for a in hosts:
                if a in used:
                    continue
                for b in hosts:
                    if b in used or b == a or (i == 0 and not a < b):
                        continue
                    m1[w], m2[w] = a, b
                    used.add(a)
                    used.add(b)
                    extend(i + 1)
                    used.discard(a)
                    used.discard(b)
                    del m1[w], m2[w]
            return
        u0 = earlier[0]
        rest = earlier[1:]
        for a in hosts:
            if a in used or a == m1[u0]:
                continue
            col = c.colour(m1[u0], a)
            for b in inc[m2[u0]].get(col, ()):
                if b in used or b == a:
                    continue
                if any(c.colour(m1[u], a) != c.colour(m2[u], b) for u in rest):
                    continue
                m1[w], m2[w] = a, b
                used.add(a)
                used.add(b)
                extend(i + 1)
                used.discard(a)
                used.discard(b)
                del m1[w], m2[w]
        return

    extend(0)
    return found, truncated


# ---------------------------------------------------------------------------
# rooted collections
# ---------------------------------------------------------------------------

@dataclass
class RootedCollection:
    roots: tuple                      # (X, Y)
    members: list = field(default_factory=list)   # list of EmbeddedPair
    truncated: bool = False


def _tree_order(t: RootedTree):
    """Unrooted vertices ordered so each one sees a placed neighbour."""
    adj = t.graph.adjacency()
    placed = set(t.roots)
    order = []
    remaining = [v for v in t.unrooted]
    while remaining:
        remaining.sort(key=lambda v: (-len(adj[v] & placed), repr(v)))
        v = remaining.pop(0)
        order.append(v)
        placed.add(v)
    prefix = list(t.roots)
    back = []
    for v in order:
        back.append(sorted((u for u in adj[v] if u in prefix),
                           key=prefix.index))
        prefix.append(v)
    return order, back


def rooted_collection(c: EdgeColouring, t: RootedTree, roots,
                      cap: int = 1_000_000) -> RootedCollection:
    """All pairs of copies of t rooted at (X, Y) whose matching edges agree.

    X and Y are host tuples, pointwise images of the tree's root order;
    the colour comparison uses the canonical edge correspondence between
    the two copies.  Exact when not truncated.
    """
    X, Y = tuple(roots[0]), tuple(roots[1])
    if len(X) != t.r or len(Y) != t.r:
        raise ParameterError(f"root tuples must have length {t.r}")
    if set(X) & set(Y):
        raise ParameterError("root tuples must be pointwise disjoint")
    inc = c.incident_by_colour()
    order, back = _tree_order(t)
    m1 = dict(zip(t.roots, X))
    m2 = dict(zip(t.roots, Y))
    used = set(X) | set(Y)
    out = RootedCollection((X, Y))
    tree_graph = t.graph

    def extend(i: int):
        if out.truncated:
            return
        if i == len(order):
            out.members.append(EmbeddedPair(tree_graph, dict(m1), dict(m2)))
            if len(out.members) >= cap:
                out.truncated = True
            return
        w = order[i]
        earlier = back[i]
        u0 = earlier[0]          # trees are connected: always a placed neighbour
        rest = earlier[1:]
        for a in range(1, c.n + 1):
            if a in used or a == m1[u0]:
                continue
            col = c.colour(m1[u0], a)
            for b in inc[m2[u0]].get(col, ()):
                if b in used or b == a:
                    continue
                if any(c.colour(m1[u], a) != c.colour(m2[u], b) for u in rest):
                    continue
                m1[w], m2[w] = a, b
                used.add(a)
                used.add(b)
                extend(i + 1)
                used.discard(a)
                used.discard(b)
                del m1[w], m2[w]

    extend(0)
    return out


@dataclass
class MaxCollectionReport:
    max_size: int
    arg_roots: tuple | None
    pairs_scanned: int


def max_rooted_collection(c: EdgeColouring, t: RootedTree, *,
                          pair_budget: int = DEFAULT_PAIR_BUDGET) -> MaxCollectionReport:
    """max over pointwise-disjoint ordered (X, Y) of the collection size.

    Two-root single-centre trees (the shape the certificates target) use
    the array kernel: enumerate every rooted copy once, bucket by colour
    signature, and count disjoint same-signature pairs per root
    quadruple.  Other trees fall back to looping over all (X, Y), which
    is only feasible for small hosts.
    """
    if t.a == 1 and t.r == 2:
        return _max_collection_two_root_star(c, t, pair_budget)
    return _max_collection_generic(c, t, pair_budget)


def _max_collection_two_root_star(c: EdgeColouring, t: RootedTree,
                                  pair_budget: int) -> MaxCollectionReport:
    n = c.n
    idx = np.arange(1, n + 1, dtype=np.int64)
    g = np.stack(np.meshgrid(idx, idx, idx, indexing="ij"), axis=-1).reshape(-1, 3)
    mask = (g[:, 0] != g[:, 1]) & (g[:, 0] != g[:, 2]) & (g[:, 1] != g[:, 2])
    g = g[mask]
    x1, x2, v = g[:, 0], g[:, 1], g[:, 2]

    # palette-index matrix for vectorized colour lookups
    palette = sorted(c.palette, key=lambda col: (type(col).__name__, repr(col)))
    code_of = {col: i for i, col in enumerate(palette)}
    mat = np.zeros((n + 1, n + 1), dtype=np.int64)
    for (u, w), col in c.edges():
        mat[u, w] = mat[w, u] = code_of[col]
    p = len(palette)
    sig = mat[x1, v] * p + mat[x2, v]

    sort = np.argsort(sig, kind="stable")
    x1, x2, v, sig = x1[sort], x2[sort], v[sort], sig[sort]
    boundaries = np.flatnonzero(np.diff(sig)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [sig.size]])
    sizes = ends - starts
    work = int((sizes.astype(np.int64) ** 2).sum())
    if work > pair_budget:
        raise InfeasibleSizeError(
            f"signature groups require {work} pair checks (budget {pair_budget})")

    keys = _accel.emit_pair_keys(x1, x2, v, starts, ends, base=n + 1)
    if keys.size == 0:
        return MaxCollectionReport(0, None, work)
    keys = np.sort(keys)
    edges_at = np.flatnonzero(np.diff(keys)) + 1
    run_starts = np.concatenate([[0], edges_at])
    run_ends = np.concatenate([edges_at, [keys.size]])
    runs = run_ends - run_starts
    best = int(runs.argmax())
    key = int(keys[run_starts[best]])
    base = n + 1
    y2 = key % base
    key //= base
    y1 = key % base
    key //= base
    xx2 = key % base
    xx1 = key // base
    return MaxCollectionReport(int(runs[best]), ((xx1, xx2), (y1, y2)), work)


def _max_collection_generic(c: EdgeColouring, t: RootedTree,
                            pair_budget: int) -> MaxCollectionReport:
    n, r = c.n, t.r
    tuples = 1
    for i in range(2 * r):
        tuples *= max(1, n - i)
    est = tuples * n ** min(2 * t.a, 4)
    if est > pair_budget:
        raise InfeasibleSizeError(
            f"~{est} enumeration steps for the generic scan (budget {pair_budget})")
    best, arg = 0, None
    hosts = range(1, n + 1)
    for X in itertools.permutations(hosts, r):
        rest = [h for h in hosts if h not in X]
        for Y in itertools.permutations(rest, r):
            size = len(rooted_collection(c, t, (X, Y)).members)
            if size > best:
                best, arg = size, (X, Y)
    return MaxCollectionReport(best, arg, tuples)


@dataclass
class PowerFreeCertificate:
    certified: bool
    k0: int
    max_collection: int
    arg_roots: tuple | None


def certify_power_free(c: EdgeColouring, t: RootedTree, k0: int, *,
                       pair_budget: int = DEFAULT_PAIR_BUDGET) -> PowerFreeCertificate:
    """Certify absence of root-aligned colour-isomorphic k0-th power pairs.

    If two disjoint colour-isomorphic copies of the k0-th rooted power
    existed with aligned roots (X, Y), the collection at (X, Y) would
    have at least k0 members; so max < k0 certifies their absence.  The
    complementary search for non-root-aligned power copies is find_pair
    with pattern power(t, k0).
    """
    if k0 < 1:
        raise ParameterError("k0 must be >= 1")
    report = max_rooted_collection(c, t, pair_budget=pair_budget)
    return PowerFreeCertificate(report.max_size < k0, k0,
                                report.max_size, report.arg_roots)


# ---------------------------------------------------------------------------
# exact tiny-host oracle
# ---------------------------------------------------------------------------

def f2_exact(n: int, h: Graph) -> int:
    """Minimum palette of a proper colouring of K_n with no colour-isomorphic
    disjoint pair of h-copies, by exhaustive canonical partition search.

    Colourings are enumerated as partitions of E(K_n) into matchings in
    first-occurrence order (so colour relabellings are visited once);
    vertex symmetry is deliberately not factored out.  Only n <= 6 is
    supported.
    """
    if n > 6 or n * (n - 1) // 2 > 15:
        raise SizeError("exact oracle supports n <= 6 only")
    if n < 2:
        raise SizeError("need at least one edge")
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    vacuous = 2 * h.n > n
    order, back = _pattern_order(h)
    colour: dict = {}
    blocks: list = []
    best = len(edges) + 1

    def pair_exists_partial() -> bool:
        m1, m2 = {}, {}
        used = set()

        def ecol(x, y):
            return colour.get((x, y) if x < y else (y, x))

        def extend(i: int) -> bool:
            if i == len(order):
                return True
            w = order[i]
            earlier = back[i]
            for a in range(1, n + 1):
                if a in used:
                    continue
                cols1 = []
                ok = True
                for u in earlier:
                    cu = ecol(m1[u], a)
                    if cu is None:
                        ok = False
                        break
                    cols1.append(cu)
                if not ok:
                    continue
                for b in range(1, n + 1):
                    if b in used or b == a or (i == 0 and not a < b):
                        continue
                    good = True
                    for u, cu in zip(earlier, cols1):
                        if ecol(m2[u], b) != cu:
                            good = False
                            break
                    if not good:
                        continue
                    m1[w], m2[w] = a, b
                    used.add(a)
                    used.add(b)
                    if extend(i + 1):
                        return True
                    used.discard(a)
                    used.discard(b)
                    del m1[w], m2[w]
            return False

        return extend(0)

    def rec(i: int):
        nonlocal best
        if len(blocks) >= best:
            return
        if i == len(edges):
            best = len(blocks)
            return
        e = edges[i]
        eu, ev = e
        for blk in blocks:
            if any(eu in f or ev in f for f in blk):
                continue
            blk.append(e)
            colour[e] = id(blk)
            if vacuous or not pair_exists_partial():
                rec(i + 1)
            blk.pop()
            del colour[e]
        blocks.append([e])
        colour[e] = id(blocks[-1])
        if vacuous or not pair_exists_partial():
            rec(i + 1)
        blocks.pop()
        del colour[e]

    rec(0)
    return best
