"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

The three inner loops that dominate runtime live here:

* batch evaluation of a dense multivariate polynomial mod q over many points,
* counting sampled coefficient vectors that vanish on a fixed point set,
* emitting root-pair keys for vertex-disjoint colour-matched copy pairs.

Each kernel has a numba ``@njit`` build and a vectorized numpy build that
produce bit-identical outputs.  Set ``COLORISO_DISABLE_NUMBA=1`` to force
the numpy path (the numpy path is also used automatically when numba is
not importable).  ``benchmarks/bench_kernels.py`` compares the two.

All kernels work on int64 arrays and assume ``q < 2**20`` so that partial
products and row sums stay inside int64.
"""

from __future__ import annotations

import os

import numpy as np

_MAX_KERNEL_Q = 1 << 20


def _flag_set(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


NUMBA_DISABLED = _flag_set("COLORISO_DISABLE_NUMBA")

if not NUMBA_DISABLED:
    try:
        from numba import njit

        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_AVAILABLE = False
else:
    NUMBA_AVAILABLE = False


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _power_table_np(points: np.ndarray, dmax: int, q: int) -> np.ndarray:
    """pw[p, v, e] = points[p, v]**e mod q, built iteratively to avoid overflow."""
    npts, nvars = points.shape
    pw = np.empty((npts, nvars, dmax + 1), dtype=np.int64)
    pw[:, :, 0] = 1 % q
    for e in range(1, dmax + 1):
        pw[:, :, e] = pw[:, :, e - 1] * points % q
    return pw


def poly_eval_batch_np(exps: np.ndarray, coeffs: np.ndarray, points: np.ndarray,
                       q: int) -> np.ndarray:
    nmono, nvars = exps.shape
    npts = points.shape[0]
    out = np.empty(npts, dtype=np.int64)
    if nmono == 0:
        out[:] = 0
        return out
    dmax = int(exps.max())
    # Chunk points so the (chunk, nmono) monomial matrix stays modest.
    chunk = max(1, min(npts, 4_000_000 // max(1, nmono)))
    for lo in range(0, npts, chunk):
        hi = min(npts, lo + chunk)
        pw = _power_table_np(points[lo:hi], dmax, q)
        vals = np.ones((hi - lo, nmono), dtype=np.int64)
        for v in range(nvars):
            vals = vals * pw[:, v, :][:, exps[:, v]] % q
        out[lo:hi] = (vals * coeffs[np.newaxis, :] % q).sum(axis=1) % q
    return out


def count_vanishing_np(coeff_rows: np.ndarray, mono_values: np.ndarray, q: int) -> int:
    vals = (coeff_rows @ mono_values) % q
    return int(np.count_nonzero(~vals.any(axis=1)))


def emit_pair_keys_np(x1: np.ndarray, x2: np.ndarray, v: np.ndarray,
                      starts: np.ndarray, ends: np.ndarray, base: int) -> np.ndarray:
    chunks = []
    for g in range(starts.shape[0]):
        s, e = int(starts[g]), int(ends[g])
        if e - s < 2:
            continue
        a1, a2, av = x1[s:e], x2[s:e], v[s:e]
        cols = (a1, a2, av)
        ok = np.ones((e - s, e - s), dtype=bool)
        for ci in cols:
            for cj in cols:
                ok &= ci[:, np.newaxis] != cj[np.newaxis, :]
        i_idx, j_idx = np.nonzero(ok)
        if i_idx.size == 0:
            continue
        keys = ((a1[i_idx] * base + a2[i_idx]) * base + a1[j_idx]) * base + a2[j_idx]
        chunks.append(keys)
    if not chunks:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(chunks)


# ---------------------------------------------------------------------------
# numba implementations (same contracts)
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @njit(cache=True)
    def poly_eval_batch_nb(exps, coeffs, points, q):  # pragma: no cover - jitted
        nmono, nvars = exps.shape
        npts = points.shape[0]
        out = np.zeros(npts, dtype=np.int64)
        if nmono == 0:
            return out
        dmax = 0
        for m in range(nmono):
            for v in range(nvars):
                if exps[m, v] > dmax:
                    dmax = exps[m, v]
        pw = np.empty((nvars, dmax + 1), dtype=np.int64)
        for p in range(npts):
            for v in range(nvars):
                pw[v, 0] = 1 % q
                for e in range(1, dmax + 1):
                    pw[v, e] = pw[v, e - 1] * points[p, v] % q
            acc = np.int64(0)
            for m in range(nmono):
                term = coeffs[m]
                for v in range(nvars):
                    ev = exps[m, v]
                    if ev:
                        term = term * pw[v, ev] % q
                acc = (acc + term) % q
            out[p] = acc
        return out

    @njit(cache=True)
    def count_vanishing_nb(coeff_rows, mono_values, q):  # pragma: no cover - jitted
        trials, nmono = coeff_rows.shape
        m = mono_values.shape[1]
        hits = 0
        for t in range(trials):
            all_zero = True
            for j in range(m):
                acc = np.int64(0)
                for k in range(nmono):
                    acc += coeff_rows[t, k] * mono_values[k, j]
                if acc % q != 0:
                    all_zero = False
                    break
            if all_zero:
                hits += 1
        return hits

    @njit(cache=True)
    def emit_pair_keys_nb(x1, x2, v, starts, ends, base):  # pragma: no cover - jitted
        upper = 0
        for g in range(starts.shape[0]):
            size = ends[g] - starts[g]
            upper += size * size
        out = np.empty(upper, dtype=np.int64)
        k = 0
        for g in range(starts.shape[0]):
            s, e = starts[g], ends[g]
            for i in range(s, e):
                for j in range(s, e):
                    if i == j:
                        continue
                    if (x1[i] == x1[j] or x1[i] == x2[j] or x1[i] == v[j]
                            or x2[i] == x1[j] or x2[i] == x2[j] or x2[i] == v[j]
                            or v[i] == x1[j] or v[i] == x2[j] or v[i] == v[j]):
                        continue
                    out[k] = ((x1[i] * base + x2[i]) * base + x1[j]) * base + x2[j]
                    k += 1
        return out[:k]


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

ACTIVE_BACKEND = "numba" if NUMBA_AVAILABLE else "numpy"


def _as_i64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int64)


def _check_q(q: int) -> None:
    if not 2 <= q < _MAX_KERNEL_Q:
        raise ValueError(f"kernel modulus out of supported range: {q}")


def poly_eval_batch(exps, coeffs, points, q: int) -> np.ndarray:
    """Evaluate sum(coeffs[m] * prod(x**exps[m])) mod q at each point row."""
    _check_q(q)
    exps, coeffs, points = _as_i64(exps), _as_i64(coeffs), _as_i64(points)
    if NUMBA_AVAILABLE:
        return poly_eval_batch_nb(exps, coeffs, points, q)
    return poly_eval_batch_np(exps, coeffs, points, q)


def count_vanishing(coeff_rows, mono_values, q: int) -> int:
    """Count coefficient rows whose polynomial is 0 at every point column."""
    _check_q(q)
    coeff_rows, mono_values = _as_i64(coeff_rows), _as_i64(mono_values)
    if NUMBA_AVAILABLE:
        return int(count_vanishing_nb(coeff_rows, mono_values, q))
    return count_vanishing_np(coeff_rows, mono_values, q)


def emit_pair_keys(x1, x2, v, starts, ends, base: int) -> np.ndarray:
    """Encoded (X, Y) root keys of disjoint copy pairs inside signature groups.

    Input triples (x1[i], x2[i], v[i]) are grouped by colour signature via
    ``starts/ends``.  For every ordered pair of triples in a group whose six
    vertices are pairwise distinct, emits ``((x1_i*b + x2_i)*b + x1_j)*b + x2_j``.
    """
    x1, x2, v = _as_i64(x1), _as_i64(x2), _as_i64(v)
    starts, ends = _as_i64(starts), _as_i64(ends)
    if NUMBA_AVAILABLE:
        return emit_pair_keys_nb(x1, x2, v, starts, ends, base)
    return emit_pair_keys_np(x1, x2, v, starts, ends, base)
