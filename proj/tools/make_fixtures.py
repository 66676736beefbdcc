#!/usr/bin/env python3
"""Builds the bundle fixtures in data/ and checks each one with an
independent exact-arithmetic compatibility test.

Usage: make_fixtures.py [--check]   (--check verifies without writing)
"""

import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"


def rref(rows, n):
    m = [[Fraction(x) for x in r] for r in rows]
    out, r = [], 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return tuple(tuple(row) for row in m[:r])


def span(vectors, n):
    return rref(list(vectors), n)


def add(a, b, n):
    return span(list(a) + list(b), n)


def full(n):
    return span([[int(i == j) for j in range(n)] for i in range(n)], n)


def kernel(rows, n):
    red = rref(rows, n)
    pivots = [next(j for j, x in enumerate(r) if x != 0) for r in red]
    out = []
    for f in range(n):
        if f in pivots:
            continue
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in zip(red, pivots):
            v[p] = -r[f]
        out.append(v)
    return out


def intersect(a, b, n):
    ann = kernel(list(a), n) + kernel(list(b), n)
    return span(kernel(ann, n) if ann else full(n), n)


def contains(big, small, n):
    return add(big, small, n) == big


def dot(u, v):
    return sum(Fraction(a) * b for a, b in zip(u, v))


def filt_at(steps, i, n):
    for t, s in steps:
        if i <= t:
            return s
    return ()


def check(fan, rank, filts, splits):
    """Returns None when every cone satisfies the compatibility identity."""
    n = rank
    for k, cone in enumerate(fan["max_cones"]):
        pieces = splits[k]
        if sum(len(s) for _, s in pieces) != n or len(span([v for _, s in pieces for v in s], n)) != n:
            return f"cone {k}: pieces are not a direct sum decomposition"
        for ray in cone:
            v = fan["rays"][ray]
            vals = [dot(u, v) for u, _ in pieces]
            pts = set()
            for x in vals:
                pts |= {x, x + 1}
            for t, _ in filts[ray]:
                pts |= {t, t + 1}
            pts.add(min(pts) - 1)
            for i in sorted(pts):
                want = filt_at(filts[ray], i, n)
                got = span([w for (u, s), x in zip(pieces, vals) if x >= i for w in s], n)
                if want != got:
                    return f"cone {k}, ray {ray}, i = {i}"
    return None


def fmt(q):
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dump_space(s):
    return [[fmt(x) for x in v] for v in s]


def bundle_json(fan_file, rank, filts, splits):
    return {
        "fan": fan_file,
        "rank": rank,
        "filtrations": {str(r): [{"threshold": t, "subspace": dump_space(s)} for t, s in steps] for r, steps in enumerate(filts)},
        "splittings": {str(k): [{"u": list(u), "subspace": dump_space(s)} for u, s in pieces] for k, pieces in enumerate(splits)},
    }


def load_fan(name):
    return json.loads((DATA / name).read_text())


def pair_pieces(fan, rank, filts, multisets, lines):
    """For each cone, tries every assignment of the given lines to the
    functionals and keeps one that satisfies the identity on that cone."""
    splits = []
    for k, ms in enumerate(multisets):
        single = {"rays": fan["rays"], "max_cones": [fan["max_cones"][k]]}
        found = None
        for perm in itertools.permutations(lines[k]):
            pieces = [(u, span([l], rank)) for u, l in zip(ms, perm)]
            if check(single, rank, filts, [pieces]) is None:
                found = pieces
                break
        splits.append(found)
    return splits


def eikelberg():
    fan = load_fan("eikelberg.fan.json")
    n = 2
    E, L, L1, L2 = full(n), span([[1, 0]], n), span([[0, 1]], n), span([[1, 1]], n)
    filts = [
        [(-12, E)],
        [(-12, E), (18, L)],
        [(-12, E), (0, L1)],
        [(-12, E), (0, L2)],
        [(0, E), (18, L)],
        [(6, E)],
    ]
    multisets = [
        [(15, -15, 3), (3, 3, -9)],
        [(16, -14, -4), (2, 2, -2)],
        [(12, -18, 0), (6, 6, -6)],
        [(24, -18, 0), (-6, 6, -6)],
        [(12, -6, 0), (6, -6, -6)],
    ]
    l, l1, l2 = [1, 0], [0, 1], [1, 1]
    lines = [[l, l1], [l, l2], [l, l2], [l, l1], [l1, l2]]
    splits = pair_pieces(fan, n, filts, multisets, lines)
    return "eikelberg.bundle.json", "eikelberg.fan.json", fan, n, filts, splits


def p2_tangent():
    fan = load_fan("p2.fan.json")
    n = 2
    E = full(n)
    lines = [span([v], n) for v in fan["rays"]]
    filts = [[(0, E), (1, lines[j])] for j in range(3)]
    dual = [(1, 0), (0, 1), (0, 0)]  # e_j^* images in M for j = 1, 2, 3
    splits = []
    for i, cone in enumerate(fan["max_cones"]):
        pieces = []
        for j in cone:
            u = tuple(a - b for a, b in zip(dual[j], dual[i]))
            pieces.append((u, lines[j]))
        splits.append(pieces)
    return "p2_tangent.bundle.json", "p2.fan.json", fan, n, filts, splits


def fulton_rank3():
    fan = load_fan("fulton.fan.json")
    n = 3
    E = full(n)
    L, L1 = [1, 0, 0], [0, 1, 0]
    V = span([L, L1], n)
    V1 = span([L1, [0, 0, 1]], n)
    V2 = span([[1, 1, 0], [0, 0, 1]], n)
    V3 = span([L1, [1, 0, 1]], n)
    sL, sL1 = span([L], n), span([L1], n)
    LL1 = span([L, L1], n)
    filts = [
        [(-1, E), (0, V), (1, sL)],
        [(0, E), (2, LL1)],
        [(0, E), (2, sL1)],
        [(-2, E), (0, V1)],
        [(-2, E), (0, V2)],
        [(0, E), (2, sL1)],
        [(-2, E), (0, V3), (2, sL1)],
        [(-2, E), (0, sL1)],
    ]
    multisets = [
        [(1, -1, 0), (0, -1, 1), (0, 0, 0)],
        [(0, -1, 1), (0, -1, -1), (1, 0, 1)],
        [(1, -1, 0), (0, -1, 1), (0, 0, 0)],
        [(1, 0, 1), (0, -2, 0), (0, 0, 0)],
        [(1, -1, 0), (-1, -1, 0), (1, 0, 1)],
        [(1, -1, 0), (0, -1, 1), (0, 0, 0)],
    ]
    # Each functional gets a line inside the intersection of the filtration
    # steps it must lie in; an empty intersection leaves it without one.
    splits = []
    for k, cone in enumerate(fan["max_cones"]):
        pieces = []
        for u in multisets[k]:
            s = E
            for r in cone:
                s = intersect(s, filt_at(filts[r], dot(u, fan["rays"][r]), n), n)
            pieces.append((u, span([s[0]], n) if s else ()))
        splits.append(pieces)
    return "fulton_rank3.bundle.json", "fulton.fan.json", fan, n, filts, splits


def main():
    write = "--check" not in sys.argv
    status = 0
    for build in (eikelberg, p2_tangent, fulton_rank3):
        out, fan_file, fan, n, filts, splits = build()
        if any(s is None for s in splits):
            print(f"{out}: no line assignment satisfies the identity on some cone")
            status = 1
            continue
        problem = check(fan, n, filts, splits)
        print(f"{out}: {'compatible' if problem is None else 'NOT compatible (' + problem + ')'}")
        if write:
            (DATA / out).write_text(json.dumps(bundle_json(fan_file, n, filts, splits), indent=2) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
