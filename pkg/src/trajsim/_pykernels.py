"""Pure-Python implementations of the hot kernels.

Signatures match the compiled ``_ckernels`` module exactly; the package
picks one at import time (see :mod:`trajsim._backend`).
"""

import math

import numpy as np

INF = math.inf

FRECHET = 0
DTW = 1


def band_dp(A, B, lo, hi, mode):
    """Coupling DP over index pairs ``(i, j)`` with ``lo[i] <= j <= hi[i]``.

    ``mode`` FRECHET takes the bottleneck (max) along a coupling, DTW the sum.
    Returns ``(value, cells)`` where ``cells`` counts evaluated pairs; the
    value is ``inf`` when ``(n, m)`` cannot be reached inside the band.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = len(A) - 1
    m = len(B) - 1
    bx = B[:, 0].tolist()
    by = B[:, 1].tolist()
    sqrt = math.sqrt
    use_max = mode == FRECHET
    prev = []
    plo, phi = 0, -1
    cells = 0
    for i in range(n + 1):
        rlo, rhi = int(lo[i]), int(hi[i])
        if rhi < rlo:
            return INF, cells
        ax, ay = float(A[i, 0]), float(A[i, 1])
        cur = [INF] * (rhi - rlo + 1)
        left = INF
        for j in range(rlo, rhi + 1):
            dx = ax - bx[j]
            dy = ay - by[j]
            # same formula as the compiled kernel so both backends agree bitwise
            c = sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                val = c
            else:
                best = left
                if plo <= j <= phi:
                    v = prev[j - plo]
                    if v < best:
                        best = v
                if plo <= j - 1 <= phi:
                    v = prev[j - 1 - plo]
                    if v < best:
                        best = v
                if best == INF:
                    val = INF
                elif use_max:
                    val = c if c > best else best
                else:
                    val = c + best
            cur[j - rlo] = val
            left = val
            cells += 1
        prev, plo, phi = cur, rlo, rhi
    if plo <= m <= phi:
        return prev[m - plo], cells
    return INF, cells


def reach(lv_lo, lv_hi, bh_lo, bh_hi, valid, start_free):
    """Monotone reachability through a free-space diagram.

    ``lv_*`` (shape ``(n+1, m)``) hold the free interval on the vertical edge
    ``x = i, y in [j, j+1]``; ``bh_*`` (shape ``(n, m+1)``) the interval on
    the horizontal edge ``y = j, x in [i, i+1]``; both in local ``[0, 1]``
    coordinates, empty when ``lo > hi``.  Only cells with ``valid[i, j]``
    may carry the path.  Free space is convex inside every cell, so the
    reachable part of an edge is its free interval cut below at the lowest
    reachable entry point.
    """
    n, m = valid.shape
    lv_lo = np.asarray(lv_lo).tolist()
    lv_hi = np.asarray(lv_hi).tolist()
    bh_lo = np.asarray(bh_lo).tolist()
    bh_hi = np.asarray(bh_hi).tolist()
    valid = np.asarray(valid).tolist()
    rv = [[INF] * m for _ in range(n + 1)]
    rh = [[INF] * (m + 1) for _ in range(n)]
    corner = [[False] * (m + 1) for _ in range(n + 1)]
    corner[0][0] = bool(start_free)
    for i in range(n):
        for j in range(m):
            if not valid[i][j]:
                continue
            a_left = rv[i][j]
            a_bot = rh[i][j]
            if corner[i][j]:
                a_left = 0.0
                a_bot = 0.0
            if a_left == INF and a_bot == INF:
                continue
            r0, r1 = lv_lo[i + 1][j], lv_hi[i + 1][j]
            if r0 <= r1:
                if a_bot != INF:
                    rv[i + 1][j] = r0
                elif a_left <= r1:
                    rv[i + 1][j] = a_left if a_left > r0 else r0
                if rv[i + 1][j] != INF and r1 >= 1.0:
                    corner[i + 1][j + 1] = True
            t0, t1 = bh_lo[i][j + 1], bh_hi[i][j + 1]
            if t0 <= t1:
                if a_left != INF:
                    rh[i][j + 1] = t0
                elif a_bot <= t1:
                    rh[i][j + 1] = a_bot if a_bot > t0 else t0
                if rh[i][j + 1] != INF and t1 >= 1.0:
                    corner[i + 1][j + 1] = True
    return corner[n][m]


def metric_edit_dp(dd, a, b, sentinel_s, sentinel_t):
    """Arbitrary-order metric edit distance between padded strings.

    ``a`` and ``b`` are symbol indices padded with the sentinels at both
    ends; ``dd`` holds distances with zero rows for the sentinels (their
    infinite parts cancel and are tracked separately).  ``D[k, l, i, j]``
    is the cheapest way to turn ``b[k..l]`` into ``b[k] a[i..j] b[l]``,
    where ``b[k]`` and ``b[l]`` stay put.  The last deletion inside the
    gap, of ``b[p]``, splits it in two; whatever is inserted after it
    forms one run ``a[i'+1..j'-1]`` between its final neighbours.
    """
    dd = np.asarray(dd, dtype=float)
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    n = len(a) - 2
    m = len(b) - 2
    S, T = int(sentinel_s), int(sentinel_t)
    # path length along a[1..e] minus along a[1..s]
    LA = [0.0] * (n + 2)
    for t in range(2, n + 1):
        LA[t] = LA[t - 1] + dd[a[t - 1], a[t]]
    D = np.full((m + 2, m + 2, n + 2, n + 2), INF)

    def runlen(x, s, e, y):
        if s > e:
            return dd[x, y]
        return dd[x, a[s]] + (LA[e] - LA[s]) + dd[a[e], y]

    for k in range(m + 1):
        l = k + 1
        for i in range(1, n + 2):
            for j in range(i - 1, n + 1):
                if i > j:
                    D[k, l, i, j] = 0.0
                elif b[k] == S and b[l] == T:
                    D[k, l, i, j] = INF
                else:
                    D[k, l, i, j] = runlen(b[k], i, j, b[l]) - dd[b[k], b[l]]

    # candidate anchor symbols and run lengths, vectorized over (i', j')
    for span in range(2, m + 2):
        for k in range(0, m + 2 - span):
            l = k + span
            for i in range(1, n + 2):
                for j in range(i - 1, n + 1):
                    ips = np.arange(i - 1, j + 1)
                    jps = np.arange(i, j + 2)
                    xs = np.where(ips >= i, [a[t] for t in ips], b[k])
                    ys = np.where(jps <= j, [a[t] for t in jps], b[l])
                    IP, JP = np.meshgrid(ips, jps, indexing="ij")
                    X, Y = np.meshgrid(xs, ys, indexing="ij")
                    ok = JP > IP
                    if b[k] == S and b[l] == T:
                        ok &= ~((IP < i) & (JP > j))
                    # path through the inserted run between X and Y
                    s = IP + 1
                    e = JP - 1
                    nonempty = s <= e
                    s_c = np.clip(s, 1, n)
                    e_c = np.clip(e, 1, n)
                    a_arr = np.asarray(a)
                    LA_arr = np.asarray(LA)
                    run = np.where(
                        nonempty,
                        dd[X, a_arr[s_c]] + (LA_arr[e_c] - LA_arr[s_c]) + dd[a_arr[e_c], Y],
                        dd[X, Y],
                    )
                    base = run - 2.0 * dd[X, Y]
                    best = INF
                    for p in range(k + 1, l):
                        bp = b[p]
                        left = D[k, p, i, IP]
                        right = D[p, l, JP, j]
                        tot = left + right + dd[X, bp] + dd[bp, Y] + base
                        tot = np.where(ok, tot, INF)
                        v = float(tot.min())
                        if v < best:
                            best = v
                    D[k, l, i, j] = best
    return float(D[0, m + 1, 1, n])
