"""Auxiliary-graph pipeline for hunting colour-isomorphic subdivision pairs.

Given a proper colouring of K_n, quarter the vertices along a random
ordering into X1, X2, Y1, Y2 and build the bipartite auxiliary graph on
(X1 x X2) u (Y1 x Y2) whose edges are the monochromatic 2-matchings
split across the parts: ((x1,x2),(y1,y2)) is an edge exactly when
colour(x1,y1) = colour(x2,y2).  Properness forces the neighbourhood of
any auxiliary vertex to have pairwise disjoint underlying vertices,
which is what the greedy subdivision embedding leans on.

The full pipeline: pick the densest of several seeded orderings, trim
the auxiliary graph to an almost-regular balanced subgraph by peeling
and dyadic degree bucketing, classify pairs on the A side as red (>=
2st common neighbours) or blue (1..2st-1), search for a clean red
complete bipartite copy, and greedily expand it into a clean
1-subdivision, which projects back to two vertex-disjoint
colour-isomorphic subdivision copies in K_n.  At the host sizes this
package runs, the pipeline is a best-effort finder with diagnostics,
not a decision procedure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .checker import verify_witness, witness_to_dict
from .colouring import EdgeColouring, is_proper
from .errors import (
    ContractViolationError,
    DegenerateOutputError,
    ImproperColouringError,
    ParameterError,
    SizeError,
)
from .rng import rng_for
from .trees import subdivision_kst
from .witness_search import BUDGET, FOUND, NONE, EmbeddedPair

DEFAULT_ORDERINGS = 16


def count_mono_2matchings(c: EdgeColouring) -> int:
    """Unordered pairs of same-coloured edges; proper input required.

    With a proper colouring same-coloured edges never touch, so every
    such pair is a monochromatic 2-matching.
    """
    proper, clash = is_proper(c)
    if not proper:
        raise ImproperColouringError(f"colouring is not proper: clash {clash}")
    total = 0
    for edges in c.classes().values():
        k = len(edges)
        total += k * (k - 1) // 2
    return total


# ---------------------------------------------------------------------------
# auxiliary graph
# ---------------------------------------------------------------------------

@dataclass
class AuxGraph:
    parts: tuple          # (X1, X2, Y1, Y2) tuples of K_n vertices
    left: tuple           # all ordered pairs X1 x X2
    right: tuple          # all ordered pairs Y1 x Y2
    edges: frozenset      # {(left pair, right pair), ...}
    _adj: dict = field(default_factory=dict, repr=False)

    def adjacency(self) -> dict:
        if not self._adj:
            adj = {v: set() for v in self.left + self.right}
            for lv, rv in self.edges:
                adj[lv].add(rv)
                adj[rv].add(lv)
            self._adj = adj
        return self._adj


def underlying(aux_vertex) -> tuple:
    """The two K_n vertices an auxiliary vertex stands for."""
    return tuple(aux_vertex)


def is_clean(aux_vertices) -> bool:
    """True when the underlying K_n vertices are pairwise distinct."""
    flat = [x for v in aux_vertices for x in v]
    return len(flat) == len(set(flat))


def build_aux_graph(c: EdgeColouring, ordering) -> AuxGraph:
    """Auxiliary graph for the quarter-partition induced by ``ordering``.

    ``ordering`` is a permutation of 1..n; the first 4*(n//4) positions
    fill X1, X2, Y1, Y2 in order and the remainder is dropped.  The edge
    rule is blind to properness so that deliberately broken colourings
    can be probed; only proper inputs carry the disjointness guarantee.
    """
    n = c.n
    if n < 8:
        raise SizeError("auxiliary graph needs n >= 8")
    ordering = [int(v) for v in ordering]
    if sorted(ordering) != list(range(1, n + 1)):
        raise ParameterError("ordering must be a permutation of 1..n")
    m = n // 4
    x1, x2 = ordering[:m], ordering[m:2 * m]
    y1, y2 = ordering[2 * m:3 * m], ordering[3 * m:4 * m]

    by_colour_1: dict = {}
    for a in x1:
        for b in y1:
            by_colour_1.setdefault(c.colour(a, b), []).append((a, b))
    edges = set()
    for a in x2:
        for b in y2:
            col = c.colour(a, b)
            for (a1, b1) in by_colour_1.get(col, ()):
                edges.add(((a1, a), (b1, b)))
    left = tuple((a, b) for a in x1 for b in x2)
    right = tuple((a, b) for a in y1 for b in y2)
    return AuxGraph((tuple(x1), tuple(x2), tuple(y1), tuple(y2)),
                    left, right, frozenset(edges))


@dataclass
class ShadowReport:
    checked: int
    exhaustive: bool
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def check_shadow_disjointness(f: AuxGraph, samples: int, rng_seed: int) -> ShadowReport:
    """Probe triples (e, f, f') with f, f' neighbours of e for shared vertices.

    For auxiliary graphs of proper colourings the three underlying vertex
    pairs are always pairwise disjoint; any violation points at an
    improper source colouring (or a construction bug).  Checks all
    triples when their count is at most ``samples``, else samples.
    """
    adj = f.adjacency()
    centres = [(v, sorted(adj[v])) for v in f.left + f.right if len(adj[v]) >= 2]
    total = sum(len(nb) * (len(nb) - 1) // 2 for _, nb in centres)

    def probe(e, g1, g2, out):
        sets = [set(underlying(e)), set(underlying(g1)), set(underlying(g2))]
        for i in range(3):
            for j in range(i + 1, 3):
                if sets[i] & sets[j]:
                    out.append((e, g1, g2))
                    return

    violations: list = []
    if total <= samples:
        for e, nb in centres:
            for i in range(len(nb)):
                for j in range(i + 1, len(nb)):
                    probe(e, nb[i], nb[j], violations)
        return ShadowReport(total, True, violations)
    rng = rng_for(rng_seed, "shadow")
    weights = [len(nb) * (len(nb) - 1) // 2 for _, nb in centres]
    cum = []
    acc = 0
    for w in weights:
        acc += w
        cum.append(acc)
    for _ in range(samples):
        target = int(rng.integers(0, acc))
        lo = 0
        for idx, bound in enumerate(cum):
            if target < bound:
                lo = idx
                break
        e, nb = centres[lo]
        i, j = map(int, rng.choice(len(nb), size=2, replace=False))
        probe(e, nb[i], nb[j], violations)
    return ShadowReport(samples, False, violations)


# ---------------------------------------------------------------------------
# almost-regular extraction
# ---------------------------------------------------------------------------

@dataclass
class RegularizedGraph:
    a: tuple              # the side the codegree colouring lives on
    b: tuple
    edges: frozenset      # {(a vertex, b vertex), ...}
    delta: int
    max_degree: int
    Delta: int            # ceil(max_degree / delta)
    epsilon: float
    delta_target: float
    _adj_a: dict = field(default_factory=dict, repr=False)

    def adjacency_a(self) -> dict:
        if not self._adj_a:
            adj = {v: set() for v in self.a}
            for av, bv in self.edges:
                adj[av].add(bv)
            self._adj_a = adj
        return self._adj_a


def regularize(g, epsilon: float = 0.5, *, min_edges: int = 1, floor: int = 4,
               max_ratio: int = 16) -> RegularizedGraph:
    """Trim a bipartite graph to a balanced almost-regular subgraph.

    Repeats two moves to a fixpoint: peel every vertex with degree below
    half the current average, then bucket each side dyadically by degree
    and keep the bucket pair spanning the most edges.  Reports the
    achieved (m, delta, Delta); raises DegenerateOutputError when fewer
    than ``floor`` vertices survive on a side or the sides are more
    unbalanced than ``max_ratio``.
    """
    adj = {v: set() for v in tuple(g.left) + tuple(g.right)}
    side = {v: 0 for v in g.left}
    side.update({v: 1 for v in g.right})
    for lv, rv in g.edges:
        adj[lv].add(rv)
        adj[rv].add(lv)
    if len(g.edges) < min_edges:
        raise DegenerateOutputError(
            f"input has {len(g.edges)} edges, need at least {min_edges}")
    live = {v for v in adj if adj[v]}

    def remove(vs):
        for v in vs:
            for w in adj[v]:
                adj[w].discard(v)
            adj[v] = set()
            live.discard(v)

    while True:
        changed = False
        # peel below half the average degree
        while live:
            nedges = sum(len(adj[v]) for v in live) // 2
            avg = 2 * nedges / len(live)
            bad = [v for v in live if len(adj[v]) < avg / 2]
            if not bad:
                break
            remove(bad)
            changed = True
        if not live:
            raise DegenerateOutputError("peeling removed every vertex")
        # dyadic bucket per side; keep the pair with the most edges
        buckets: dict = {}
        for v in live:
            buckets.setdefault((side[v], len(adj[v]).bit_length() - 1), set()).add(v)
        best_pair, best_edges = None, -1
        for (s0, d0), b0 in buckets.items():
            if s0 != 0:
                continue
            for (s1, d1), b1 in buckets.items():
                if s1 != 1:
                    continue
                cnt = sum(len(adj[v] & b1) for v in b0)
                if cnt > best_edges:
                    best_pair, best_edges = (b0, b1), cnt
        if best_pair is None or best_edges == 0:
            raise DegenerateOutputError("no populated bucket pair")
        keep = best_pair[0] | best_pair[1]
        if keep != live:
            remove(live - keep)
            changed = True
        if not changed:
            break

    left = sorted((v for v in live if side[v] == 0), key=repr)
    right = sorted((v for v in live if side[v] == 1), key=repr)
    if min(len(left), len(right)) < floor:
        raise DegenerateOutputError(
            f"only {len(left)}x{len(right)} vertices survive (floor {floor})")
    if max(len(left), len(right)) > max_ratio * min(len(left), len(right)):
        raise DegenerateOutputError(
            f"sides too unbalanced: {len(left)} vs {len(right)}")
    a, b = (left, right) if len(left) <= len(right) else (right, left)
    edges = frozenset((av, bv) for av in a for bv in adj[av])
    degrees = [len(adj[v]) for v in live]
    delta, maxdeg = min(degrees), max(degrees)
    return RegularizedGraph(tuple(a), tuple(b), edges, delta, maxdeg,
                            math.ceil(maxdeg / delta), epsilon,
                            min(len(left), len(right)) ** epsilon)


# ---------------------------------------------------------------------------
# codegree colouring and the greedy clean embedding
# ---------------------------------------------------------------------------

@dataclass
class CodegreeColouring:
    host: RegularizedGraph
    s: int
    t: int
    red: frozenset        # frozenset pairs of A vertices, codegree >= 2st
    blue: frozenset       # codegree in [1, 2st - 1]
    codegree: dict


def codegree_colouring(rg: RegularizedGraph, s: int, t: int) -> CodegreeColouring:
    """Classify A-side pairs by the size of their common B-neighbourhood."""
    if not 1 <= s <= t:
        raise ParameterError("need 1 <= s <= t")
    adj = rg.adjacency_a()
    verts = list(rg.a)
    red, blue = set(), set()
    codeg = {}
    threshold = 2 * s * t
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            u, v = verts[i], verts[j]
            k = len(adj[u] & adj[v])
            if k == 0:
                continue
            pair = frozenset((u, v))
            codeg[pair] = k
            if k >= threshold:
                red.add(pair)
            else:
                blue.add(pair)
    return CodegreeColouring(rg, s, t, frozenset(red), frozenset(blue), codeg)


@dataclass
class CleanEmbedding:
    left: tuple           # s branch vertices in A
    right: tuple          # t branch vertices in A
    mids: dict            # (i, j) -> B vertex subdividing (left[i], right[j])
    exclusions: list      # per greedy step, how many candidates were excluded

    def aux_vertices(self) -> list:
        return list(self.left) + list(self.right) + list(self.mids.values())


def greedy_clean_embed(cc: CodegreeColouring, red_kst) -> CleanEmbedding:
    """Expand a clean red K_{s,t} on A into a clean subdivision copy.

    For the pairs P_1..P_{st} in turn, picks a common B-neighbour whose
    underlying vertices avoid everything chosen so far.  Neighbourhoods
    of a fixed vertex have pairwise disjoint underlyings, so step k+1
    excludes at most 2k candidates out of >= 2st, and a pick always
    remains.
    """
    left, right = tuple(red_kst[0]), tuple(red_kst[1])
    s, t = cc.s, cc.t
    if len(left) != s or len(right) != t:
        raise ParameterError(f"expected {s} + {t} branch vertices")
    if not is_clean(left + right):
        raise ContractViolationError("branch vertex set is not clean")
    adj = cc.host.adjacency_a()
    threshold = 2 * s * t
    for u in left:
        for v in right:
            if len(adj[u] & adj[v]) < threshold:
                raise ContractViolationError(
                    f"pair ({u}, {v}) has codegree below {threshold}")
    used = set()
    for v in left + right:
        used.update(underlying(v))
    mids = {}
    exclusions = []
    for i in range(s):
        for j in range(t):
            common = sorted(adj[left[i]] & adj[right[j]], key=repr)
            viable = [w for w in common if not (set(underlying(w)) & used)]
            exclusions.append(len(common) - len(viable))
            if not viable:
                raise ContractViolationError(
                    f"no clean candidate left for pair ({i}, {j})")
            pick = viable[0]
            mids[(i, j)] = pick
            used.update(underlying(pick))
    return CleanEmbedding(left, right, mids, exclusions)


def project_embedding(emb: CleanEmbedding, s: int, t: int) -> EmbeddedPair:
    """Clean subdivision copy in the auxiliary graph -> pair of K_n copies.

    First coordinates of every auxiliary vertex form copy one, second
    coordinates copy two; the auxiliary edge rule makes matching edges
    share colours.
    """
    pattern = subdivision_kst(s, t)
    map1, map2 = {}, {}
    for i in range(s):
        map1[("a", i)], map2[("a", i)] = emb.left[i]
    for j in range(t):
        map1[("b", j)], map2[("b", j)] = emb.right[j]
    for (i, j), w in emb.mids.items():
        map1[("m", i, j)], map2[("m", i, j)] = w
    return EmbeddedPair(pattern, map1, map2)


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineResult:
    outcome: str                      # "found" / "none" / "budget"
    witness: EmbeddedPair | None
    diagnostics: dict


def _find_clean_red_kst(cc: CodegreeColouring, s: int, t: int, budget: int):
    """Backtracking search for a clean red K_{s,t} on the A side."""
    verts = sorted(cc.host.a, key=repr)
    red_adj = {v: set() for v in verts}
    for pair in cc.red:
        u, v = tuple(pair)
        red_adj[u].add(v)
        red_adj[v].add(u)
    nodes = 0

    def clean_with(chosen, v):
        flat = set()
        for w in chosen:
            flat.update(underlying(w))
        return not (flat & set(underlying(v)))

    def pick_right(cand, chosen_left, chosen_right, start):
        nonlocal nodes
        if len(chosen_right) == t:
            return list(chosen_left), list(chosen_right)
        for k in range(start, len(cand)):
            v = cand[k]
            nodes += 1
            if nodes > budget:
                return BUDGET
            if not clean_with(chosen_left + chosen_right, v):
                continue
            res = pick_right(cand, chosen_left, chosen_right + [v], k + 1)
            if res is not None:
                return res
        return None

    def pick_left(start, chosen_left, cand):
        nonlocal nodes
        if len(chosen_left) == s:
            return pick_right(sorted(cand, key=repr), chosen_left, [], 0)
        for k in range(start, len(verts)):
            v = verts[k]
            nodes += 1
            if nodes > budget:
                return BUDGET
            if len(red_adj[v]) < t:
                continue
            if not clean_with(chosen_left, v):
                continue
            new_cand = red_adj[v] if not chosen_left else cand & red_adj[v]
            if len(new_cand) < t:
                continue
            res = pick_left(k + 1, chosen_left + [v], new_cand)
            if res is not None:
                return res
        return None

    res = pick_left(0, [], set())
    return res, nodes


def _blue_diagnostics(cc: CodegreeColouring, s: int, rng_seed: int,
                      samples: int = 20) -> dict:
    blue_adj = {v: set() for v in cc.host.a}
    for pair in cc.blue:
        u, v = tuple(pair)
        blue_adj[u].add(v)
        blue_adj[v].add(u)
    sizes = sorted(len(nb) for nb in blue_adj.values())
    out = {
        "blue_degree_min": sizes[0] if sizes else 0,
        "blue_degree_max": sizes[-1] if sizes else 0,
        "blue_degree_mean": sum(sizes) / len(sizes) if sizes else 0.0,
    }
    verts = [v for v in cc.host.a if blue_adj[v]]
    common = []
    if len(verts) >= s:
        rng = rng_for(rng_seed, "blue-diag")
        for _ in range(samples):
            pick = [verts[int(i)] for i in rng.choice(len(verts), size=s,
                                                      replace=False)]
            inter = set.intersection(*(blue_adj[v] for v in pick))
            common.append(len(inter))
    out["common_blue_nbhd_samples"] = common
    return out


def find_clean_kst_sub(c: EdgeColouring, s: int, t: int, rng_seed: int,
                       budget: int = 200_000, *,
                       n_orderings: int = DEFAULT_ORDERINGS,
                       orderings=None) -> PipelineResult:
    """Best-effort hunt for two colour-isomorphic disjoint subdivision copies.

    Stages: seeded orderings -> densest auxiliary graph -> almost-regular
    subgraph -> codegree colouring -> clean red K_{s,t} search -> greedy
    clean embedding -> projection, with the witness re-verified by the
    independent checker.  "none" is best-effort (the asymptotic
    guarantees have no desk-scale counterpart); "budget" is reported
    separately.
    """
    if not 2 <= s <= t:
        raise ParameterError("need 2 <= s <= t")
    proper, clash = is_proper(c)
    if not proper:
        raise ImproperColouringError(f"colouring is not proper: clash {clash}")
    if c.n < 8:
        raise SizeError("pipeline needs n >= 8")

    diagnostics: dict = {"n": c.n, "s": s, "t": t}
    if orderings is None:
        orderings = []
        for k in range(n_orderings):
            perm = rng_for(rng_seed, "ordering", k).permutation(c.n) + 1
            orderings.append([int(v) for v in perm])
    best_aux, best_idx = None, -1
    for k, ordering in enumerate(orderings):
        aux = build_aux_graph(c, ordering)
        if best_aux is None or len(aux.edges) > len(best_aux.edges):
            best_aux, best_idx = aux, k
    diagnostics["ordering_index"] = best_idx
    diagnostics["ordering_seed"] = rng_seed
    diagnostics["aux_edges"] = len(best_aux.edges)
    if not best_aux.edges:
        diagnostics["reason"] = "auxiliary graph has no edges"
        return PipelineResult(NONE, None, diagnostics)

    try:
        rg = regularize(best_aux)
    except DegenerateOutputError as exc:
        diagnostics["reason"] = f"regularization degenerated: {exc}"
        return PipelineResult(NONE, None, diagnostics)
    diagnostics["regularized"] = {"m": len(rg.a), "delta": rg.delta,
                                  "Delta": rg.Delta}

    cc = codegree_colouring(rg, s, t)
    diagnostics["red_edges"] = len(cc.red)
    diagnostics["blue_edges"] = len(cc.blue)

    if cc.red:
        found, nodes = _find_clean_red_kst(cc, s, t, budget)
        diagnostics["red_search_nodes"] = nodes
        if found is BUDGET:
            diagnostics["reason"] = "red search budget exhausted"
            return PipelineResult(BUDGET, None, diagnostics)
        if found is not None:
            emb = greedy_clean_embed(cc, found)
            pair = project_embedding(emb, s, t)
            problems = verify_witness(c, witness_to_dict(pair, c))
            if problems:  # pragma: no cover - soundness guard
                raise ContractViolationError(
                    f"pipeline produced an invalid witness: {problems}")
            diagnostics["greedy_exclusions"] = emb.exclusions
            return PipelineResult(FOUND, pair, diagnostics)

    diagnostics.update(_blue_diagnostics(cc, s, rng_seed))
    diagnostics["reason"] = "no clean red complete bipartite copy found"
    return PipelineResult(NONE, None, diagnostics)
