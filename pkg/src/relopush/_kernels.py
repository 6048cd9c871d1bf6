"""Compiled inner loops: arc propagation, pose sampling, batch collision checks, Dubins words."""
import heapq
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
FREE, COLLISION, OUT_OF_BOUNDS = 0, 1, 2

WORDS = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")


@njit(cache=True)
def advance(x, y, th, kappa, s):
    """Pose after signed arc length ``s`` at constant curvature ``kappa``."""
    if abs(kappa) < 1e-12:
        return x + s * math.cos(th), y + s * math.sin(th), th
    th2 = th + kappa * s
    return (x + (math.sin(th2) - math.sin(th)) / kappa,
            y - (math.cos(th2) - math.cos(th)) / kappa,
            th2)


@njit(cache=True)
def piece_step(ds, kappa, move, brad):
    """Sample spacing along a piece so no point within ``brad`` of the origin travels more than ``move``."""
    if move > 0.0:
        return min(ds, move / (1.0 + abs(kappa) * brad))
    return ds


@njit(cache=True)
def sample_pieces(x, y, th, kappas, lengths, dirs, ds, move=0.0, brad=0.0):
    """Poses along a piecewise-constant-curvature path, endpoints included.

    Spacing is at most ``ds`` of reference-point travel, and with ``move`` > 0
    also at most ``move`` of travel for any point within ``brad`` of it.
    """
    n = 1
    for i in range(lengths.shape[0]):
        if lengths[i] > 0.0:
            n += max(1, int(math.ceil(lengths[i] / piece_step(ds, kappas[i], move, brad) - 1e-9)))
    out = np.empty((n, 3))
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = th
    k = 1
    for i in range(lengths.shape[0]):
        L = lengths[i]
        if L <= 0.0:
            continue
        m = max(1, int(math.ceil(L / piece_step(ds, kappas[i], move, brad) - 1e-9)))
        step = L / m
        for j in range(1, m + 1):
            px, py, pt = advance(x, y, th, kappas[i], dirs[i] * step * j)
            out[k, 0] = px
            out[k, 1] = py
            out[k, 2] = pt
            k += 1
        x, y, th = advance(x, y, th, kappas[i], dirs[i] * L)
    return out


@njit(cache=True)
def _overlap(ax, ay, bx, by, tol):
    """Separating-axis test; True iff interiors overlap by more than tol."""
    for which in range(2):
        if which == 0:
            px = ax
            py = ay
        else:
            px = bx
            py = by
        n = px.shape[0]
        for i in range(n):
            j = (i + 1) % n
            ex = px[j] - px[i]
            ey = py[j] - py[i]
            ln = math.sqrt(ex * ex + ey * ey)
            if ln < 1e-15:
                continue
            nx = ey / ln
            ny = -ex / ln
            amin = 1e300
            amax = -1e300
            for k in range(ax.shape[0]):
                p = ax[k] * nx + ay[k] * ny
                amin = min(amin, p)
                amax = max(amax, p)
            bmin = 1e300
            bmax = -1e300
            for k in range(bx.shape[0]):
                p = bx[k] * nx + by[k] * ny
                bmin = min(bmin, p)
                bmax = max(bmax, p)
            if amax <= bmin + tol or bmax <= amin + tol:
                return False
    return True


@njit(cache=True)
def check_poses(poses, bverts, boffs, brad, overts, ooffs, ocirc, xmin, ymin, xmax, ymax, tol):
    """Status of a body swept through ``poses``: FREE, COLLISION or OUT_OF_BOUNDS.

    Out-of-bounds takes priority over collision when both occur.
    """
    n = poses.shape[0]
    nv = bverts.shape[0]
    wx = np.empty(nv)
    wy = np.empty(nv)
    for i in range(n):
        c = math.cos(poses[i, 2])
        s = math.sin(poses[i, 2])
        for k in range(nv):
            x = poses[i, 0] + c * bverts[k, 0] - s * bverts[k, 1]
            y = poses[i, 1] + s * bverts[k, 0] + c * bverts[k, 1]
            if x < xmin - tol or x > xmax + tol or y < ymin - tol or y > ymax + tol:
                return OUT_OF_BOUNDS
    nb = boffs.shape[0] - 1
    no = ooffs.shape[0] - 1
    if no == 0:
        return FREE
    ox = np.ascontiguousarray(overts[:, 0])
    oy = np.ascontiguousarray(overts[:, 1])
    for i in range(n):
        c = math.cos(poses[i, 2])
        s = math.sin(poses[i, 2])
        transformed = False
        for o in range(no):
            dx = poses[i, 0] - ocirc[o, 0]
            dy = poses[i, 1] - ocirc[o, 1]
            r = brad + ocirc[o, 2]
            if dx * dx + dy * dy >= r * r:
                continue
            if not transformed:
                for k in range(nv):
                    wx[k] = poses[i, 0] + c * bverts[k, 0] - s * bverts[k, 1]
                    wy[k] = poses[i, 1] + s * bverts[k, 0] + c * bverts[k, 1]
                transformed = True
            for b in range(nb):
                if _overlap(wx[boffs[b]:boffs[b + 1]], wy[boffs[b]:boffs[b + 1]],
                            ox[ooffs[o]:ooffs[o + 1]], oy[ooffs[o]:ooffs[o + 1]], tol):
                    return COLLISION
    return FREE


@njit(cache=True)
def mod2pi(a):
    r = a % TWO_PI
    if r < 0.0:
        r += TWO_PI
    if r > TWO_PI - 1e-10:
        r = 0.0
    return r


@njit(cache=True)
def dubins_words(alpha, beta, d):
    """Normalized segment parameters (t, p, q) for LSL, RSR, LSR, RSL, RLR, LRL.

    Rows are NaN where a word has no solution.
    """
    out = np.full((6, 3), np.nan)
    sa = math.sin(alpha)
    sb = math.sin(beta)
    ca = math.cos(alpha)
    cb = math.cos(beta)
    cab = math.cos(alpha - beta)
    # LSL; sum-of-squares form keeps precision when d is tiny
    p2 = (d + sa - sb) ** 2 + (cb - ca) ** 2
    if p2 >= -1e-12:
        tmp = math.atan2(cb - ca, d + sa - sb)
        out[0, 0] = mod2pi(-alpha + tmp)
        out[0, 1] = math.sqrt(max(p2, 0.0))
        out[0, 2] = mod2pi(beta - tmp)
    # RSR
    p2 = (d - sa + sb) ** 2 + (ca - cb) ** 2
    if p2 >= -1e-12:
        tmp = math.atan2(ca - cb, d - sa + sb)
        out[1, 0] = mod2pi(alpha - tmp)
        out[1, 1] = math.sqrt(max(p2, 0.0))
        out[1, 2] = mod2pi(-beta + tmp)
    # LSR
    p2 = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb)
    if p2 >= -1e-12:
        p = math.sqrt(max(p2, 0.0))
        tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        out[2, 0] = mod2pi(-alpha + tmp)
        out[2, 1] = p
        out[2, 2] = mod2pi(-beta + tmp)
    # RSL
    p2 = d * d - 2.0 + 2.0 * cab - 2.0 * d * (sa + sb)
    if p2 >= -1e-12:
        p = math.sqrt(max(p2, 0.0))
        tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        out[3, 0] = mod2pi(alpha - tmp)
        out[3, 1] = p
        out[3, 2] = mod2pi(beta - tmp)
    # RLR
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp) <= 1.0:
        p = TWO_PI - math.acos(tmp)  # middle arc lies in (pi, 2pi]; never wrap it
        t = mod2pi(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
        out[4, 0] = t
        out[4, 1] = p
        out[4, 2] = mod2pi(alpha - beta - t + p)
    # LRL
    tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp) <= 1.0:
        p = TWO_PI - math.acos(tmp)  # middle arc lies in (pi, 2pi]; never wrap it
        t = mod2pi(-alpha - math.atan2(ca - cb, d + sa - sb) + p / 2.0)
        out[5, 0] = t
        out[5, 1] = p
        out[5, 2] = mod2pi(beta - alpha - t + p)
    return out


@njit(cache=True)
def dubins_length(x0, y0, t0, x1, y1, t1, rho):
    """Length of the shortest forward Dubins path."""
    dx = x1 - x0
    dy = y1 - y0
    D = math.sqrt(dx * dx + dy * dy)
    if D < 1e-12 and abs(mod2pi(t1 - t0)) < 1e-12:
        return 0.0
    phi = math.atan2(dy, dx)
    w = dubins_words(mod2pi(t0 - phi), mod2pi(t1 - phi), D / rho)
    best = 1e300
    for i in range(6):
        if not math.isnan(w[i, 0]):
            s = w[i, 0] + w[i, 1] + w[i, 2]
            if s < best:
                best = s
    return best * rho


@njit(cache=True)
def primitive_end(x, y, th, local, p):
    """End pose of primitive p from (x, y, th); ``local[p, j]`` is its j-th sample in the node frame."""
    n = local.shape[1]
    c = math.cos(th)
    s = math.sin(th)
    return (x + c * local[p, n - 1, 0] - s * local[p, n - 1, 1],
            y + s * local[p, n - 1, 0] + c * local[p, n - 1, 1], th + local[p, n - 1, 2])


@njit(cache=True)
def primitive_status(x, y, th, local, p, kappa, direction, step, bverts, boffs, brad, overts, ooffs, ocirc,
                     xmin, ymin, xmax, ymax, tol):
    """Sweep status of primitive p from (x, y, th): exact bounds first, then the stored samples."""
    one_k = np.full(1, kappa)
    one_l = np.full(1, step)
    one_d = np.full(1, float(direction))
    if not pieces_in_bounds(x, y, th, one_k, one_l, one_d, bverts, xmin, ymin, xmax, ymax, tol):
        return OUT_OF_BOUNDS
    n = local.shape[1]
    poses = np.empty((n, 3))
    c = math.cos(th)
    s = math.sin(th)
    for j in range(n):
        poses[j, 0] = x + c * local[p, j, 0] - s * local[p, j, 1]
        poses[j, 1] = y + s * local[p, j, 0] + c * local[p, j, 1]
        poses[j, 2] = th + local[p, j, 2]
    return check_poses(poses, bverts, boffs, brad, overts, ooffs, ocirc, xmin, ymin, xmax, ymax, tol)


@njit(cache=True)
def best_word(x0, y0, t0, x1, y1, t1, rho):
    """(word index, t, p, q) of the shortest forward Dubins path; word -1 for coincident poses."""
    dx = x1 - x0
    dy = y1 - y0
    D = math.sqrt(dx * dx + dy * dy)
    if D < 1e-12 and abs(mod2pi(t1 - t0)) < 1e-12:
        return -1, 0.0, 0.0, 0.0
    phi = math.atan2(dy, dx)
    w = dubins_words(mod2pi(t0 - phi), mod2pi(t1 - phi), D / rho)
    best = 1e300
    k = -1
    for i in range(6):
        if not math.isnan(w[i, 0]):
            s = w[i, 0] + w[i, 1] + w[i, 2]
            if s < best:
                best = s
                k = i
    return k, w[k, 0], w[k, 1], w[k, 2]


# curvature sign of each letter of each word, in WORDS order
_WORD_SIGNS = np.array([[1, 0, 1], [-1, 0, -1], [1, 0, -1], [-1, 0, 1], [-1, 1, -1], [1, -1, 1]], dtype=np.float64)


@njit(cache=True)
def word_pieces(word, t, p, q, rho, reverse):
    """(kappas, lengths, dirs) of a Dubins word; ``reverse`` drives it backwards from its end."""
    kappas = np.empty(3)
    lengths = np.empty(3)
    dirs = np.empty(3)
    params = (t, p, q)
    for i in range(3):
        j = 2 - i if reverse else i
        kappas[i] = _WORD_SIGNS[word, j] / rho
        lengths[i] = params[j] * rho
        dirs[i] = -1.0 if reverse else 1.0
    return kappas, lengths, dirs


@njit(cache=True)
def hybrid_search(sx, sy, st, gx, gy, gt, h2d, x0, y0, res, local, prim_kappa, prim_dir, step,
                  bins, reverse_penalty, switch_penalty, reach, rho, allow_reverse, max_exp,
                  bverts, boffs, brad, overts, ooffs, ocirc, xmax, ymax, tol, ds, move):
    """Lattice search over (cell, heading bin) ending in an exact analytic Dubins connection.

    Returns (found, primitive indices from the root, tail word, t, p, q, tail reversed, expansions).
    """
    nx = h2d.shape[0]
    ny = h2d.shape[1]
    P = local.shape[0]
    cap = max_exp * P + 1
    nxs = np.empty(cap)
    nys = np.empty(cap)
    nts = np.empty(cap)
    ngs = np.empty(cap)
    npar = np.empty(cap, dtype=np.int64)
    nprim = np.empty(cap, dtype=np.int64)
    ndir = np.empty(cap, dtype=np.int64)
    best_g = np.full(nx * ny * bins, np.inf)
    closed = np.zeros(nx * ny * bins, dtype=np.bool_)
    bw = TWO_PI / bins
    empty = np.zeros(0, dtype=np.int64)

    nxs[0] = sx
    nys[0] = sy
    nts[0] = st
    ngs[0] = 0.0
    npar[0] = -1
    nprim[0] = -1
    ndir[0] = 0
    count = 1
    i0 = min(nx - 1, max(0, int((sx - x0) / res)))
    j0 = min(ny - 1, max(0, int((sy - y0) / res)))
    k0 = (i0 * ny + j0) * bins + int(math.floor(st / bw + 0.5)) % bins
    best_g[k0] = 0.0
    heap = [(0.0, 0)]
    heapq.heappop(heap)
    heapq.heappush(heap, (_heuristic(sx, sy, st, gx, gy, gt, h2d[i0, j0], rho, allow_reverse), 0))
    expansions = 0
    while len(heap) > 0 and expansions < max_exp:
        f, ni = heapq.heappop(heap)
        x = nxs[ni]
        y = nys[ni]
        th = nts[ni]
        ci = min(nx - 1, max(0, int((x - x0) / res)))
        cj = min(ny - 1, max(0, int((y - y0) / res)))
        key = (ci * ny + cj) * bins + int(math.floor(th / bw + 0.5)) % bins
        if closed[key]:
            continue
        closed[key] = True
        expansions += 1
        last = ndir[ni]

        if math.sqrt((gx - x) ** 2 + (gy - y) ** 2) <= reach:
            word, t, p, q = best_word(x, y, th, gx, gy, gt, rho)
            cf = (t + p + q) * rho + (switch_penalty if last == -1 else 0.0)
            rword, rt, rp, rq = -2, 0.0, 0.0, 0.0
            cr = np.inf
            if allow_reverse:
                rword, rt, rp, rq = best_word(gx, gy, gt, x, y, th, rho)
                cr = (rt + rp + rq) * rho * reverse_penalty + (switch_penalty if last == 1 else 0.0)
            for attempt in range(2):
                use_rev = (cr < cf) if attempt == 0 else not (cr < cf)
                if use_rev and not allow_reverse:
                    continue
                if use_rev:
                    kappas, lengths, dirs = word_pieces(rword, rt, rp, rq, rho, True)
                    wd, a, b, c = rword, rt, rp, rq
                else:
                    kappas, lengths, dirs = word_pieces(word, t, p, q, rho, False)
                    wd, a, b, c = word, t, p, q
                if check_pieces(x, y, th, kappas, lengths, dirs, ds, move, bverts, boffs, brad, overts, ooffs, ocirc,
                                x0, y0, xmax, ymax, tol) == FREE:
                    n = 0
                    m = ni
                    while npar[m] >= 0:
                        n += 1
                        m = npar[m]
                    prims = np.empty(n, dtype=np.int64)
                    m = ni
                    for r in range(n - 1, -1, -1):
                        prims[r] = nprim[m]
                        m = npar[m]
                    return True, prims, wd, a, b, c, use_rev, expansions

        for pi in range(P):
            px, py, pt = primitive_end(x, y, th, local, pi)
            si = min(nx - 1, max(0, int((px - x0) / res)))
            sj = min(ny - 1, max(0, int((py - y0) / res)))
            sk = (si * ny + sj) * bins + int(math.floor(pt / bw + 0.5)) % bins
            if closed[sk]:
                continue
            d = prim_dir[pi]
            cost = ngs[ni] + step * (reverse_penalty if d < 0 else 1.0)
            if last != 0 and last != d:
                cost += switch_penalty
            if cost >= best_g[sk] - 1e-12:
                continue
            h2 = h2d[si, sj]
            if not math.isfinite(h2):
                continue
            # the sweep is only checked once the successor would actually be queued
            if primitive_status(x, y, th, local, pi, prim_kappa[pi], d, step, bverts, boffs, brad,
                                overts, ooffs, ocirc, x0, y0, xmax, ymax, tol) != FREE:
                continue
            best_g[sk] = cost
            nxs[count] = px
            nys[count] = py
            nts[count] = pt
            ngs[count] = cost
            npar[count] = ni
            nprim[count] = pi
            ndir[count] = d
            heapq.heappush(heap, (cost + _heuristic(px, py, pt, gx, gy, gt, h2, rho, allow_reverse), count))
            count += 1
    return False, empty, -1, 0.0, 0.0, 0.0, False, expansions


@njit(cache=True)
def _heuristic(x, y, th, gx, gy, gt, h2, rho, allow_reverse):
    hn = dubins_length(x, y, th, gx, gy, gt, rho)
    if allow_reverse:
        hn = min(hn, dubins_length(gx, gy, gt, x, y, th, rho))
    return max(h2, hn)


@njit(cache=True)
def _covers(a0, delta, target):
    """True if sweeping angle a0 by delta (either sign) passes through ``target``."""
    if delta < 0.0:
        a0 += delta
        delta = -delta
    return (target - a0) % TWO_PI <= delta


@njit(cache=True)
def pieces_in_bounds(x, y, th, kappas, lengths, dirs, bverts, xmin, ymin, xmax, ymax, tol):
    """Exact containment of a body driven along constant-curvature pieces.

    Each vertex moves on a line or a circle about the instantaneous centre of
    rotation, so its extreme coordinates are attained at piece ends or at the
    circle's axis-aligned extremes when the swept angle covers them.
    """
    nv = bverts.shape[0]
    for i in range(lengths.shape[0]):
        L = lengths[i]
        if L <= 0.0:
            continue
        c = math.cos(th)
        s = math.sin(th)
        k = kappas[i]
        if abs(k) >= 1e-12:
            cx = x - s / k
            cy = y + c / k
            delta = k * dirs[i] * L
            for v in range(nv):
                px = x + c * bverts[v, 0] - s * bverts[v, 1]
                py = y + s * bverts[v, 0] + c * bverts[v, 1]
                R = math.sqrt((px - cx) ** 2 + (py - cy) ** 2)
                a0 = math.atan2(py - cy, px - cx)
                if _covers(a0, delta, 0.0) and cx + R > xmax + tol:
                    return False
                if _covers(a0, delta, math.pi) and cx - R < xmin - tol:
                    return False
                if _covers(a0, delta, 0.5 * math.pi) and cy + R > ymax + tol:
                    return False
                if _covers(a0, delta, -0.5 * math.pi) and cy - R < ymin - tol:
                    return False
        x, y, th = advance(x, y, th, k, dirs[i] * L)
    return True


@njit(cache=True)
def check_pieces(x, y, th, kappas, lengths, dirs, ds, move, bverts, boffs, brad, overts, ooffs, ocirc,
                 xmin, ymin, xmax, ymax, tol):
    """Status of a body driven along pieces: exact bounds test, then sampled collision test."""
    if not pieces_in_bounds(x, y, th, kappas, lengths, dirs, bverts, xmin, ymin, xmax, ymax, tol):
        return OUT_OF_BOUNDS
    poses = sample_pieces(x, y, th, kappas, lengths, dirs, ds, move, brad)
    return check_poses(poses, bverts, boffs, brad, overts, ooffs, ocirc, xmin, ymin, xmax, ymax, tol)
