"""Independent reference computations used only by the tests."""
import itertools
import math

TWO_PI = 2 * math.pi


def _m(a):
    r = a % TWO_PI
    return 0.0 if r > TWO_PI - 1e-10 else r


def _centers(x, y, th, rho):
    left = (x - rho * math.sin(th), y + rho * math.cos(th))
    right = (x + rho * math.sin(th), y - rho * math.cos(th))
    return left, right


def tangent_circle_lengths(start, goal, rho):
    """Word -> length by explicit turning-circle/tangent-line construction.

    Both middle-circle placements are tried for three-arc words.
    """
    (x0, y0, t0), (x1, y1, t1) = start, goal
    if math.hypot(x1 - x0, y1 - y0) < 1e-12 and abs(_m(t1 - t0)) < 1e-12:
        return {"LSL": 0.0}
    Ls, Rs = _centers(x0, y0, t0, rho)
    Lg, Rg = _centers(x1, y1, t1, rho)
    out = {}

    def arc(turn, h_from, h_to):
        return _m(h_to - h_from) if turn == "L" else _m(h_from - h_to)

    for word, c1, c2 in (("LSL", Ls, Lg), ("RSR", Rs, Rg), ("LSR", Ls, Rg), ("RSL", Rs, Lg)):
        vx, vy = c2[0] - c1[0], c2[1] - c1[1]
        D = math.hypot(vx, vy)
        if word in ("LSL", "RSR"):
            h = math.atan2(vy, vx)
            straight = D
        else:
            if D < 2 * rho:
                continue
            straight = math.sqrt(max(D * D - 4 * rho * rho, 0.0))
            off = math.atan2(2 * rho, straight)
            h = math.atan2(vy, vx) + (off if word == "LSR" else -off)
        out[word] = rho * (arc(word[0], t0, h) + arc(word[2], h, t1)) + straight

    for word, c1, c3 in (("LRL", Ls, Lg), ("RLR", Rs, Rg)):
        vx, vy = c3[0] - c1[0], c3[1] - c1[1]
        D = math.hypot(vx, vy)
        if D > 4 * rho or D < 1e-12:
            continue
        mx, my = (c1[0] + c3[0]) / 2, (c1[1] + c3[1]) / 2
        hgt = math.sqrt(max(4 * rho * rho - (D / 2) ** 2, 0.0))
        px, py = -vy / D, vx / D
        best = math.inf
        for sgn in (1, -1):
            c2 = (mx + sgn * hgt * px, my + sgn * hgt * py)
            T1 = ((c1[0] + c2[0]) / 2, (c1[1] + c2[1]) / 2)
            T2 = ((c2[0] + c3[0]) / 2, (c2[1] + c3[1]) / 2)
            # heading at a point on a circle, given turn direction of that circle
            def heading(T, c, turn):
                rx, ry = (T[0] - c[0]) / rho, (T[1] - c[1]) / rho
                return math.atan2(rx, -ry) if turn == "L" else math.atan2(-rx, ry)
            h1 = heading(T1, c1, word[0])
            h2 = heading(T2, c3, word[2])
            total = rho * (arc(word[0], t0, h1) + arc(word[1], h1, h2) + arc(word[2], h2, t1))
            best = min(best, total)
        out[word] = best
    return out


def tangent_circle_shortest(start, goal, rho):
    lengths = tangent_circle_lengths(start, goal, rho)
    return min(lengths.values())


def integrate_word(start, word, params, rho, steps=2000):
    """Euler-free exact integration of a word with the given normalised parameters."""
    x, y, th = start
    for letter, t in zip(word, params):
        L = t * rho
        if letter == "S":
            x += L * math.cos(th)
            y += L * math.sin(th)
        else:
            k = (1 if letter == "L" else -1) / rho
            th2 = th + k * L
            x += (math.sin(th2) - math.sin(th)) / k
            y -= (math.cos(th2) - math.cos(th)) / k
            th = th2
    return x, y, th


def dijkstra_bruteforce(n, edges, sources, targets, allowed=None):
    """Cheapest simple path by enumerating every vertex permutation (tiny graphs only)."""
    w = {(a, b): c for a, b, c in edges}
    best = math.inf
    for s in sources:
        for t in targets:
            inner = [v for v in range(n) if v not in (s, t) and (allowed is None or v in allowed)]
            for r in range(len(inner) + 1):
                for perm in itertools.permutations(inner, r):
                    seq = (s,) + perm + (t,)
                    cost = 0.0
                    for a, b in zip(seq, seq[1:]):
                        if (a, b) not in w:
                            break
                        cost += w[(a, b)]
                    else:
                        best = min(best, cost)
    return best
