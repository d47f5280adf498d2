"""Hot loops over F_p: row reduction, subspace enumeration, subset scans.

Every kernel has a numba version and a pure-numpy version with identical
results (including tie-breaking).  The numpy path is used when numba is not
importable or when ``SHEAFLTC_DISABLE_NUMBA=1`` is set in the environment.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba as _numba
except Exception:  # pragma: no cover
    _numba = None

USE_NUMBA = _numba is not None and os.environ.get("SHEAFLTC_DISABLE_NUMBA", "0") not in ("1", "true", "yes")

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "rref_inplace",
    "gray_coefficients",
    "span_min_norm",
    "coset_scan",
    "subset_skeleton_scan",
]


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# row reduction


def _rref_numpy(A: np.ndarray, p: int) -> np.ndarray:
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv], :] = A[[piv, r], :]
        inv = pow(int(A[r, c]), -1, p)
        if inv != 1:
            A[r, :] = (A[r, :] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows, :] = (A[rows, :] - np.outer(col[rows], A[r, :])) % p
        pivots.append(c)
        r += 1
    return np.array(pivots, dtype=np.int64)


def _rref_numba_impl(A, p):
    m, n = A.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    r = 0
    for c in range(n):
        if r >= m:
            break
        piv = -1
        for i in range(r, m):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                t = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = t
        a = A[r, c]
        inv = 1
        # modular inverse by exponentiation (p prime)
        e = p - 2
        b = a % p
        while e > 0:
            if e & 1:
                inv = (inv * b) % p
            b = (b * b) % p
            e >>= 1
        if inv != 1:
            for j in range(n):
                A[r, j] = (A[r, j] * inv) % p
        for i in range(m):
            if i != r and A[i, c] != 0:
                f = A[i, c]
                for j in range(n):
                    A[i, j] = (A[i, j] - f * A[r, j]) % p
        pivots[r] = c
        r += 1
    return pivots[:r]


# ---------------------------------------------------------------------------
# modular Gray code enumeration of span(basis)
#
# Index t in [0, p^b) maps to coefficient digits g_j = (n_j - n_{j+1}) mod p,
# where n_j are the base-p digits of t (least significant first).  Consecutive
# indices differ by +1 in exactly one digit, so a running vector is updated by
# adding one basis row.  Ties between equal norms are broken by the
# lexicographically least coefficient vector (first digit most significant).


def gray_coefficients(b: int, p: int) -> np.ndarray:
    """All p^b coefficient vectors in modular Gray order, shape (p^b, b)."""
    if b == 0:
        return np.zeros((1, 0), dtype=np.int64)
    t = np.arange(p ** b, dtype=np.int64)
    digits = np.empty((t.size, b + 1), dtype=np.int64)
    for j in range(b):
        digits[:, j] = (t // p ** j) % p
    digits[:, b] = 0
    return (digits[:, :b] - digits[:, 1:]) % p


def _lex_keys(coef: np.ndarray, p: int) -> np.ndarray:
    b = coef.shape[1]
    w = p ** np.arange(b - 1, -1, -1, dtype=np.int64)
    return coef @ w if b else np.zeros(coef.shape[0], dtype=np.int64)


def _group_norms_numpy(V: np.ndarray, groups: np.ndarray, weights: np.ndarray) -> np.ndarray:
    ng = weights.shape[0]
    if V.shape[1] == 0:
        return np.zeros(V.shape[0], dtype=np.int64)
    hit = np.zeros((V.shape[0], ng), dtype=bool)
    nz = V != 0
    for g in range(ng):
        cols = np.nonzero(groups == g)[0]
        if cols.size:
            hit[:, g] = nz[:, cols].any(axis=1)
    return hit.astype(np.int64) @ weights


_CHUNK = 1 << 16


def _span_min_norm_numpy(offset, basis, p, groups, weights):
    b = basis.shape[0]
    best = None
    best_key = None
    total = p ** b
    coef_all = gray_coefficients(b, p)
    for s in range(0, total, _CHUNK):
        coef = coef_all[s:s + _CHUNK]
        V = (offset[None, :] + coef @ basis) % p
        norms = _group_norms_numpy(V, groups, weights)
        keys = _lex_keys(coef, p)
        m = norms.min()
        cand = np.nonzero(norms == m)[0]
        k = keys[cand].min()
        if best is None or m < best or (m == best and k < best_key):
            best, best_key = int(m), int(k)
    return best, best_key


def _span_min_norm_numba_impl(offset, basis, p, groups, weights):
    b, n = basis.shape
    ng = weights.shape[0]
    v = offset.copy() % p
    coef = np.zeros(b, dtype=np.int64)
    cnt = np.zeros(ng, dtype=np.int64)
    norm = 0
    for j in range(n):
        if v[j] != 0:
            cnt[groups[j]] += 1
    for g in range(ng):
        if cnt[g] > 0:
            norm += weights[g]
    best = norm
    key = 0
    best_key = 0
    pw = np.empty(b, dtype=np.int64)
    acc = 1
    for j in range(b - 1, -1, -1):
        pw[j] = acc
        acc *= p
    total = acc
    for t in range(1, total):
        # digit to bump = number of trailing (p-1) digits of t-1
        u = t - 1
        d = 0
        while u % p == p - 1:
            u //= p
            d += 1
        old = coef[d]
        new = (old + 1) % p
        coef[d] = new
        key += (new - old) * pw[d]
        for j in range(n):
            bj = basis[d, j]
            if bj != 0:
                g = groups[j]
                was = v[j] != 0
                v[j] = (v[j] + bj) % p
                now = v[j] != 0
                if was and not now:
                    cnt[g] -= 1
                    if cnt[g] == 0:
                        norm -= weights[g]
                elif now and not was:
                    if cnt[g] == 0:
                        norm += weights[g]
                    cnt[g] += 1
        if norm < best or (norm == best and key < best_key):
            best = norm
            best_key = key
    return best, best_key


def _coset_scan_numpy(outer, inner, D, p, groups, weights, dgroups, dweights):
    a = outer.shape[0]
    n = outer.shape[1]
    coef_out = gray_coefficients(a, p)
    reps = (coef_out @ outer) % p if a else np.zeros((1, n), dtype=np.int64)
    dn = _group_norms_numpy((reps @ D.T) % p if D.shape[0] else np.zeros((reps.shape[0], 0), dtype=np.int64),
                            dgroups, dweights)
    b = inner.shape[0]
    coef_in = gray_coefficients(b, p)
    span = (coef_in @ inner) % p if b else np.zeros((1, n), dtype=np.int64)
    mins = np.empty(reps.shape[0], dtype=np.int64)
    step = max(1, _CHUNK // max(1, span.shape[0]))
    for s in range(0, reps.shape[0], step):
        R = reps[s:s + step]
        V = (R[:, None, :] + span[None, :, :]) % p
        norms = _group_norms_numpy(V.reshape(-1, n), groups, weights).reshape(R.shape[0], span.shape[0])
        mins[s:s + step] = norms.min(axis=1)
    return coef_out, dn, mins


def _coset_scan_numba_impl(outer, inner, D, p, groups, weights, dgroups, dweights):
    a, n = outer.shape
    b = inner.shape[0]
    r = D.shape[0]
    ng = weights.shape[0]
    ndg = dweights.shape[0]
    total_out = 1
    for _ in range(a):
        total_out *= p
    total_in = 1
    for _ in range(b):
        total_in *= p
    coef_out = np.zeros((total_out, a), dtype=np.int64)
    dn = np.zeros(total_out, dtype=np.int64)
    mins = np.zeros(total_out, dtype=np.int64)
    rep = np.zeros(n, dtype=np.int64)
    drep = np.zeros(r, dtype=np.int64)
    co = np.zeros(a, dtype=np.int64)
    ci = np.zeros(b, dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    cnt = np.zeros(ng, dtype=np.int64)
    dcnt = np.zeros(ndg, dtype=np.int64)
    Dout = np.zeros((a, r), dtype=np.int64)
    for i in range(a):
        for row in range(r):
            s = 0
            for j in range(n):
                s += D[row, j] * outer[i, j]
            Dout[i, row] = s % p
    for t in range(total_out):
        if t > 0:
            u = t - 1
            d = 0
            while u % p == p - 1:
                u //= p
                d += 1
            co[d] = (co[d] + 1) % p
            for j in range(n):
                rep[j] = (rep[j] + outer[d, j]) % p
            for j in range(r):
                drep[j] = (drep[j] + Dout[d, j]) % p
        for i in range(a):
            coef_out[t, i] = co[i]
        for g in range(ndg):
            dcnt[g] = 0
        for j in range(r):
            if drep[j] != 0:
                dcnt[dgroups[j]] += 1
        dnorm = 0
        for g in range(ndg):
            if dcnt[g] > 0:
                dnorm += dweights[g]
        dn[t] = dnorm
        # inner Gray walk starting at rep
        for j in range(n):
            v[j] = rep[j]
        for g in range(ng):
            cnt[g] = 0
        for j in range(n):
            if v[j] != 0:
                cnt[groups[j]] += 1
        norm = 0
        for g in range(ng):
            if cnt[g] > 0:
                norm += weights[g]
        best = norm
        for i in range(b):
            ci[i] = 0
        for s in range(1, total_in):
            u = s - 1
            d = 0
            while u % p == p - 1:
                u //= p
                d += 1
            ci[d] = (ci[d] + 1) % p
            for j in range(n):
                bj = inner[d, j]
                if bj != 0:
                    g = groups[j]
                    was = v[j] != 0
                    v[j] = (v[j] + bj) % p
                    now = v[j] != 0
                    if was and not now:
                        cnt[g] -= 1
                        if cnt[g] == 0:
                            norm -= weights[g]
                    elif now and not was:
                        if cnt[g] == 0:
                            norm += weights[g]
                        cnt[g] += 1
            if norm < best:
                best = norm
        mins[t] = best
    return coef_out, dn, mins


# ---------------------------------------------------------------------------
# subset scan for skeleton expansion:
#   for every nonempty S in X(0), a = sum of edge weights inside S,
#   b = sum of vertex weights of S; maximise (a*D0^2 - b^2*D1) / b.


def _subset_scan_numpy(vw, eu, ev, ew, D0, D1):
    n = vw.shape[0]
    best_num, best_den, best_mask = None, None, 0
    total = 1 << n
    for s in range(1, total, _CHUNK):
        masks = np.arange(s, min(total, s + _CHUNK), dtype=np.int64)
        bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)
        b = bits @ vw
        inside = bits[:, eu] * bits[:, ev]
        a = inside @ ew if ew.size else np.zeros(masks.size, dtype=np.int64)
        num = a * D0 * D0 - b * b * D1
        vals = num / b
        top = vals.max()
        for idx in np.nonzero(vals >= top - 1e-9 * max(1.0, abs(top)))[0]:
            nn, dd = int(num[idx]), int(b[idx])
            if best_num is None or nn * best_den > best_num * dd:
                best_num, best_den, best_mask = nn, dd, int(masks[idx])
    return best_num, best_den, best_mask


def _subset_scan_numba_impl(vw, eu, ev, ew, D0, D1):
    n = vw.shape[0]
    m = ew.shape[0]
    best_num = 0
    best_den = 0
    best_mask = 0
    found = False
    total = 1 << n
    for mask in range(1, total):
        b = 0
        for i in range(n):
            if (mask >> i) & 1:
                b += vw[i]
        a = 0
        for j in range(m):
            if ((mask >> eu[j]) & 1) and ((mask >> ev[j]) & 1):
                a += ew[j]
        num = a * D0 * D0 - b * b * D1
        if not found or num * best_den > best_num * b:
            best_num = num
            best_den = b
            best_mask = mask
            found = True
    return best_num, best_den, best_mask


if USE_NUMBA:
    _rref_nb = _numba.njit(cache=True)(_rref_numba_impl)
    _span_nb = _numba.njit(cache=True)(_span_min_norm_numba_impl)
    _coset_nb = _numba.njit(cache=True)(_coset_scan_numba_impl)
    _subset_nb = _numba.njit(cache=True)(_subset_scan_numba_impl)


def rref_inplace(A: np.ndarray, p: int) -> np.ndarray:
    """Reduce int64 matrix A to reduced row echelon form mod p in place; return pivots."""
    if A.size == 0:
        return np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return _rref_nb(A, np.int64(p))
    return _rref_numpy(A, p)


def span_min_norm(offset, basis, p, groups, weights):
    """Minimum group-support norm over offset + span(basis).

    Returns (norm, key) where key is the lexicographic index of the least
    minimising coefficient vector.
    """
    offset = np.ascontiguousarray(offset, dtype=np.int64)
    basis = np.ascontiguousarray(basis, dtype=np.int64).reshape(-1, offset.shape[0])
    groups = np.ascontiguousarray(groups, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.int64)
    if USE_NUMBA:
        best, key = _span_nb(offset, basis, np.int64(p), groups, weights)
        return int(best), int(key)
    return _span_min_norm_numpy(offset, basis, p, groups, weights)


def coset_scan(outer, inner, D, p, groups, weights, dgroups, dweights):
    """Scan the cosets rep + span(inner) for rep in span(outer).

    Returns (coef_out, dnorm, minnorm): for every outer coefficient vector (in
    modular Gray order) the group norm of D @ rep and the minimum group norm
    over the coset.
    """
    n = len(groups)
    outer = np.ascontiguousarray(outer, dtype=np.int64).reshape(-1, n)
    inner = np.ascontiguousarray(inner, dtype=np.int64).reshape(-1, n)
    D = np.ascontiguousarray(D, dtype=np.int64).reshape(-1, n)
    args = (np.ascontiguousarray(groups, dtype=np.int64), np.ascontiguousarray(weights, dtype=np.int64),
            np.ascontiguousarray(dgroups, dtype=np.int64), np.ascontiguousarray(dweights, dtype=np.int64))
    if USE_NUMBA:
        return _coset_nb(outer, inner, D, np.int64(p), *args)
    return _coset_scan_numpy(outer, inner, D, p, *args)


def subset_skeleton_scan(vw, eu, ev, ew, D0: int, D1: int):
    """Maximise (a*D0^2 - b^2*D1)/b over nonempty vertex subsets; returns (num, den, mask)."""
    vw = np.ascontiguousarray(vw, dtype=np.int64)
    eu = np.ascontiguousarray(eu, dtype=np.int64)
    ev = np.ascontiguousarray(ev, dtype=np.int64)
    ew = np.ascontiguousarray(ew, dtype=np.int64)
    if USE_NUMBA:
        num, den, mask = _subset_nb(vw, eu, ev, ew, np.int64(D0), np.int64(D1))
        return int(num), int(den), int(mask)
    return _subset_scan_numpy(vw, eu, ev, ew, D0, D1)
