"""Independent re-verification of witness pairs.

Deliberately shares no logic with the searches: it consumes the flat
JSON form of a witness (pattern edge list over vertex indices, two host
vertex lists) and re-checks every requirement with plain loops.  Any
witness a search emits must come back clean from here.
"""

from __future__ import annotations

from .colouring import EdgeColouring


def witness_to_dict(pair, c: EdgeColouring) -> dict:
    """Flat JSON form: pattern over indices 0..k-1 plus two image lists."""
    vertices = list(pair.pattern.vertices)
    index = {v: i for i, v in enumerate(vertices)}
    edges = sorted(sorted((index[u], index[v])) for u, v in
                   (tuple(e) for e in pair.pattern.edges))
    map1 = [int(pair.map1[v]) for v in vertices]
    map2 = [int(pair.map2[v]) for v in vertices]
    trace = [[i, j,
              _colour_str(c.colour(map1[i], map1[j]))] for i, j in edges]
    return {
        "pattern": {"n": len(vertices), "edges": edges},
        "map1": map1,
        "map2": map2,
        "colour_trace": trace,
    }


def _colour_str(col) -> str:
    return repr(col)


def verify_witness(c: EdgeColouring, witness: dict) -> list:
    """All problems with a claimed witness; an empty list means valid."""
    problems = []
    pat = witness["pattern"]
    k = pat["n"]
    map1 = list(witness["map1"])
    map2 = list(witness["map2"])
    if len(map1) != k or len(map2) != k:
        return [f"maps must have length {k}"]
    for name, m in (("map1", map1), ("map2", map2)):
        if len(set(m)) != k:
            problems.append(f"{name} is not injective")
        for x in m:
            if not 1 <= x <= c.n:
                problems.append(f"{name} image {x} outside 1..{c.n}")
    overlap = set(map1) & set(map2)
    if overlap:
        problems.append(f"images share host vertices {sorted(overlap)}")
    if problems:
        return problems
    for i, j in pat["edges"]:
        if not (0 <= i < k and 0 <= j < k and i != j):
            problems.append(f"bad pattern edge ({i}, {j})")
            continue
        c1 = c.colour(map1[i], map1[j])
        c2 = c.colour(map2[i], map2[j])
        if c1 != c2:
            problems.append(
                f"pattern edge ({i}, {j}): colours differ ({c1!r} vs {c2!r})")
    return problems
