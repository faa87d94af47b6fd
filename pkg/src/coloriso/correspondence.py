"""Glued pairs of tree copies, their edge correspondence, and the
constraint number.

Gluing p pairs of labelled tree copies, all rooted at the same ordered
pair of host tuples (X, Y), yields two host graphs H1 and H2 plus one
generator pair (edge of H1, edge of H2) per copy pair and tree edge.
The generators induce an equivalence relation on the distinct host
edges involved; the constraint number k is the least number of pairs
whose transitive closure recovers that relation.  Expressing an
equivalence relation by pairs minimally is exactly a spanning forest of
the generator graph, so

    k = (#distinct edges in any generator) - (#equivalence classes),

computed with a union-find.  An edge occurring in both H1 and H2 is a
single node, identified by its unordered host-vertex pair.

For balanced trees the sampled systems always satisfy the density lower
bound 2k >= density * (v(H1 u H2) - 2r); ``check_balance_inequality``
hammers that with random glued systems and exact rational comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    FormatError,
    NonDisjointPairError,
    ParameterError,
    RootMismatchError,
    UnbalancedTreeError,
)
from .rng import rng_for, subseed
from .trees import Graph, RootedTree, density, is_balanced


class UnionFind:
    """Union-find with path compression over arbitrary hashable keys."""

    def __init__(self):
        self.parent = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        self.add(x)
        self.add(y)
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[ry] = rx
        return True

    def class_count(self) -> int:
        return sum(1 for x in self.parent if self.parent[x] == x)


class LabelledCopy:
    """An injective embedding of a rooted tree into host vertices."""

    def __init__(self, source: RootedTree, embedding: dict):
        if set(embedding) != set(source.vertices):
            raise ParameterError("embedding must cover exactly the tree vertices")
        if len(set(embedding.values())) != len(embedding):
            raise ParameterError("embedding must be injective")
        self.source = source
        self.embedding = dict(embedding)

    @property
    def root_images(self) -> tuple:
        return tuple(self.embedding[u] for u in self.source.roots)

    @property
    def vertex_images(self) -> frozenset:
        return frozenset(self.embedding.values())

    def host_edges(self) -> list:
        """Host edge per tree edge, in the tree's canonical edge order."""
        return [frozenset((self.embedding[u], self.embedding[w]))
                for u, w in (tuple(e) for e in self.source.edges)]


@dataclass
class CorrespondenceSystem:
    h1: Graph
    h2: Graph
    roots: tuple            # (X, Y) tuples of host vertices
    generators: list        # [(frozenset edge of H1, frozenset edge of H2), ...]

    def distinct_edges(self) -> set:
        out = set()
        for e1, e2 in self.generators:
            out.add(e1)
            out.add(e2)
        return out


def glue(copies, roots) -> CorrespondenceSystem:
    """Union p pairs of labelled copies into (H1, H2) with its generators.

    ``copies`` is a list of (copy1, copy2) pairs sharing one source tree;
    copy1 must be rooted at X = roots[0] and copy2 at Y = roots[1], and
    each pair must be vertex disjoint.  Copies from different pairs may
    overlap arbitrarily; duplicate edges merge in the unions.
    """
    X, Y = tuple(roots[0]), tuple(roots[1])
    if set(X) & set(Y):
        raise RootMismatchError("root tuples X and Y must be pointwise disjoint")
    if not copies:
        raise ParameterError("need at least one copy pair")
    source = copies[0][0].source
    gens = []
    h1_edges, h2_edges = [], []
    h1_vertices, h2_vertices = [], []
    for idx, (c1, c2) in enumerate(copies):
        for c in (c1, c2):
            if c.source is not source and c.source.edges != source.edges:
                raise ParameterError("all copies must share the same source tree")
        if c1.root_images != X:
            raise RootMismatchError(
                f"pair {idx}: first copy rooted at {c1.root_images}, expected {X}")
        if c2.root_images != Y:
            raise RootMismatchError(
                f"pair {idx}: second copy rooted at {c2.root_images}, expected {Y}")
        if c1.vertex_images & c2.vertex_images:
            raise NonDisjointPairError(
                f"pair {idx}: copies share vertices "
                f"{set(c1.vertex_images & c2.vertex_images)}")
        e1s, e2s = c1.host_edges(), c2.host_edges()
        gens.extend(zip(e1s, e2s))
        h1_edges.extend(e1s)
        h2_edges.extend(e2s)
        h1_vertices.extend(c1.embedding.values())
        h2_vertices.extend(c2.embedding.values())
    h1 = Graph(dict.fromkeys(h1_vertices), dict.fromkeys(h1_edges))
    h2 = Graph(dict.fromkeys(h2_vertices), dict.fromkeys(h2_edges))
    return CorrespondenceSystem(h1, h2, (X, Y), gens)


def constraint_number(sys: CorrespondenceSystem) -> int:
    """Least number of generator pairs expressing the full edge relation."""
    uf = UnionFind()
    for e1, e2 in sys.generators:
        uf.union(e1, e2)
    return len(uf.parent) - uf.class_count()


def union_vertex_count(sys: CorrespondenceSystem) -> int:
    return len(set(sys.h1.vertices) | set(sys.h2.vertices))


# ---------------------------------------------------------------------------
# random glued systems and the density lower bound
# ---------------------------------------------------------------------------

def _sample_pair(tree: RootedTree, X, Y, pool, rng, max_rejects=1000):
    """One vertex-disjoint copy pair rooted at (X, Y), unrooted images in pool."""
    a = tree.a
    for _ in range(max_rejects):
        img1 = rng.choice(pool, size=a, replace=False)
        img2 = rng.choice(pool, size=a, replace=False)
        if set(img1.tolist()) & set(img2.tolist()):
            continue  # reject and redraw rather than repair
        emb1 = dict(zip(tree.roots, X))
        emb1.update(zip(tree.unrooted, img1.tolist()))
        emb2 = dict(zip(tree.roots, Y))
        emb2.update(zip(tree.unrooted, img2.tolist()))
        return LabelledCopy(tree, emb1), LabelledCopy(tree, emb2)
    raise ParameterError("could not sample a disjoint pair; host too small")


def sample_glued_system(tree: RootedTree, p: int, host_size: int,
                        rng_seed: int) -> CorrespondenceSystem:
    """Random glued system of p pairs in host {1..host_size}.

    Roots are fixed to X = (1..r), Y = (r+1..2r); unrooted images are
    drawn from the remaining host vertices, so copies from different
    pairs can and do overlap, producing degenerate correspondences.
    """
    r, a = tree.r, tree.a
    if host_size < 2 * r + 2 * a:
        raise ParameterError("host too small for a disjoint pair")
    X = tuple(range(1, r + 1))
    Y = tuple(range(r + 1, 2 * r + 1))
    pool = list(range(2 * r + 1, host_size + 1))
    rng = rng_for(rng_seed, "glue")
    copies = [_sample_pair(tree, X, Y, pool, rng) for _ in range(p)]
    return glue(copies, (X, Y))


@dataclass
class BalanceReport:
    tree_density: Fraction
    trials: int
    violations: list
    tightest_ratio: Fraction | None   # min over trials of 2k / (rho * (v - 2r))

    @property
    def ok(self) -> bool:
        return not self.violations


def check_balance_inequality(tree: RootedTree, p: int, trials: int,
                             host_size: int | None, rng_seed: int) -> BalanceReport:
    """Sample random glued systems, test 2k >= density * (v(H1 u H2) - 2r).

    Exact rational comparison throughout.  Raises UnbalancedTreeError when
    the tree is not balanced (the bound's hypothesis).
    """
    balanced, witness = is_balanced(tree)
    if not balanced:
        raise UnbalancedTreeError(f"tree is unbalanced, witness {witness}")
    if p < 1 or trials < 1:
        raise ParameterError("p and trials must be >= 1")
    rho = density(tree)
    if host_size is None:
        host_size = 2 * tree.r + 3 * tree.a + 2
    violations = []
    tightest = None
    for t in range(trials):
        sys = sample_glued_system(tree, p, host_size, subseed(rng_seed, "trial", t))
        k = constraint_number(sys)
        v = union_vertex_count(sys)
        lhs = Fraction(2 * k)
        rhs = rho * (v - 2 * tree.r)
        if lhs < rhs:
            violations.append({"trial": t, "k": k, "v": v})
        ratio = lhs / rhs if rhs else None
        if ratio is not None and (tightest is None or ratio < tightest):
            tightest = ratio
    return BalanceReport(rho, trials, violations, tightest)


def extension_increment(tree: RootedTree, p: int, host_size: int | None,
                        rng_seed: int) -> dict:
    """Grow a glued system one pair at a time and record the increments.

    For each step from p-1 to p pairs, reports the new constraint number,
    the old one, and max(e(S1), e(S2)) where S_i is the set of vertices
    the new pair adds and e(S_i) counts its tree edges meeting S_i.
    """
    if p < 2:
        raise ParameterError("extension chains need p >= 2")
    if host_size is None:
        host_size = 2 * tree.r + 3 * tree.a + 2
    r = tree.r
    X = tuple(range(1, r + 1))
    Y = tuple(range(r + 1, 2 * r + 1))
    pool = list(range(2 * r + 1, host_size + 1))
    rng = rng_for(rng_seed, "chain")
    copies = [_sample_pair(tree, X, Y, pool, rng) for _ in range(p)]
    steps = []
    for j in range(1, p):
        prev = glue(copies[:j], (X, Y))
        cur = glue(copies[:j + 1], (X, Y))
        seen = set(prev.h1.vertices) | set(prev.h2.vertices)
        c1, c2 = copies[j]
        s1 = c1.vertex_images - seen
        s2 = c2.vertex_images - seen
        e_s1 = sum(1 for e in c1.host_edges() if e & s1)
        e_s2 = sum(1 for e in c2.host_edges() if e & s2)
        steps.append({
            "k_prev": constraint_number(prev),
            "k_cur": constraint_number(cur),
            "increment_bound": max(e_s1, e_s2),
        })
    return {"p": p, "steps": steps}


# ---------------------------------------------------------------------------
# reference configurations and serialization
# ---------------------------------------------------------------------------

def _five_edge_path() -> RootedTree:
    return RootedTree(range(6), [(i, i + 1) for i in range(5)], (0, 5))


def disjoint_double_path_system() -> CorrespondenceSystem:
    """Two pairs of 5-edge path copies, disjoint away from the roots.

    The non-degenerate gluing: both unions have 10 edges and the
    constraint number is 10.
    """
    t = _five_edge_path()
    X, Y = ("xa", "xb"), ("ya", "yb")

    def path_copy(root_pair, inner):
        emb = {0: root_pair[0], 5: root_pair[1]}
        emb.update({i + 1: inner[i] for i in range(4)})
        return LabelledCopy(t, emb)

    pairs = [
        (path_copy(X, ["v1", "v2", "v3", "v4"]),
         path_copy(Y, ["z1", "z2", "z3", "z4"])),
        (path_copy(X, ["w1", "w2", "w3", "w4"]),
         path_copy(Y, ["u1", "u2", "u3", "u4"])),
    ]
    return glue(pairs, (X, Y))


def overlapping_double_path_system() -> CorrespondenceSystem:
    """Two pairs of 5-edge path copies overlapping on interior edges.

    The degenerate gluing: both unions have 7 edges, yet expressing the
    correspondence still needs 9 pairs.
    """
    t = _five_edge_path()
    X, Y = ("xa", "xb"), ("ya", "yb")
    first1 = LabelledCopy(t, {0: "xa", 1: "v1", 2: "v2", 3: "v3", 4: "v4", 5: "xb"})
    # second H1 copy walks the interior in reverse: xa-v4-v3-v2-v1-xb
    second1 = LabelledCopy(t, {0: "xa", 1: "v4", 2: "v3", 3: "v2", 4: "v1", 5: "xb"})
    first2 = LabelledCopy(t, {0: "ya", 1: "z1", 2: "z2", 3: "z3", 4: "z4", 5: "yb"})
    # second H2 copy reuses the first and last edges: ya-z1-z3-z2-z4-yb
    second2 = LabelledCopy(t, {0: "ya", 1: "z1", 2: "z3", 3: "z2", 4: "z4", 5: "yb"})
    return glue([(first1, first2), (second1, second2)], (X, Y))


def system_to_dict(sys: CorrespondenceSystem) -> dict:
    def edge(e):
        return sorted(e, key=repr)

    return {
        "h1_edges": sorted((edge(e) for e in sys.h1.edges), key=repr),
        "h2_edges": sorted((edge(e) for e in sys.h2.edges), key=repr),
        "roots": [list(sys.roots[0]), list(sys.roots[1])],
        "generators": [[edge(e1), edge(e2)] for e1, e2 in sys.generators],
    }


def system_from_dict(data: dict) -> CorrespondenceSystem:
    try:
        h1_edges = [tuple(e) for e in data["h1_edges"]]
        h2_edges = [tuple(e) for e in data["h2_edges"]]
        roots = (tuple(data["roots"][0]), tuple(data["roots"][1]))
        gens = [(frozenset(e1), frozenset(e2)) for e1, e2 in data["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed system JSON: {exc}") from exc
    h1 = Graph(dict.fromkeys(v for e in h1_edges for v in e), h1_edges)
    h2 = Graph(dict.fromkeys(v for e in h2_edges for v in e), h2_edges)
    sys = CorrespondenceSystem(h1, h2, roots, gens)
    validate_system(sys)
    return sys


def validate_system(sys: CorrespondenceSystem) -> None:
    covered = sys.distinct_edges()
    for e in sys.h1.edges:
        if e not in covered:
            raise FormatError(f"H1 edge {set(e)} appears in no generator")
    for e in sys.h2.edges:
        if e not in covered:
            raise FormatError(f"H2 edge {set(e)} appears in no generator")
    if set(sys.roots[0]) & set(sys.roots[1]):
        raise FormatError("root tuples intersect")


def load_system(path) -> CorrespondenceSystem:
    with open(path) as fh:
        return system_from_dict(json.load(fh))


def save_system(sys: CorrespondenceSystem, path) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys), fh, indent=1)
