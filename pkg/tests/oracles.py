"""Brute-force reference implementations used to check the library.

Nothing here imports the code under test except the partition value type, so
agreement is evidence rather than a tautology.
"""

from __future__ import annotations

from itertools import combinations, product

import sympy


def set_partitions_by_insertion(n):
    """All set partitions of range(n) as lists of blocks (recursive insertion)."""
    if n == 0:
        yield []
        return
    for smaller in set_partitions_by_insertion(n - 1):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [n - 1]] + smaller[i + 1 :]
        yield smaller + [[n - 1]]


def blocks_of(labels):
    out = {}
    for pos, lab in enumerate(labels):
        out.setdefault(lab, []).append(pos)
    return list(out.values())


def crosses(labels, order):
    """Brute force: some a<b<c<d on the circle with a,c in one block and b,d in another."""
    seq = [labels[i] for i in order]
    for a, b, c, d in combinations(range(len(seq)), 4):
        if seq[a] == seq[c] and seq[b] == seq[d] and seq[a] != seq[b]:
            return True
    return False


def circle(k, l):
    return list(range(k)) + list(range(k + l - 1, k - 1, -1))


def signed_color_balance(p):
    """Per block: signed white count minus signed black count (upper -, lower +)."""
    cols = p.up + p.down
    out = []
    for block in blocks_of(p.labels):
        w = sum((1 if i >= p.k else -1) for i in block if cols[i] == "w")
        b = sum((1 if i >= p.k else -1) for i in block if cols[i] == "b")
        out.append(w - b)
    return out


def is_vertex_member(p, name):
    """Independent membership test for the named categories."""
    sizes = [len(b) for b in blocks_of(p.labels)]
    even = all(s % 2 == 0 for s in sizes)
    pairing = all(s == 2 for s in sizes)
    nc = not crosses(p.labels, circle(p.k, p.l))
    matching = all(x == 0 for x in signed_color_balance(p))
    need = {
        "P": True,
        "NC": nc,
        "Peven": even,
        "P2": pairing,
        "CPeven": even and matching,
        "CP2": pairing and matching,
        "NCeven": even and nc,
        "NC2": pairing and nc,
        "CNCeven": even and nc and matching,
        "CNC2": pairing and nc and matching,
    }
    return need[name]


def dense_t(p, N):
    """T_p as a nested list: rows indexed by lower multi-indices, columns by upper."""
    k, l = p.k, p.l
    uppers = list(product(range(N), repeat=k))
    lowers = list(product(range(N), repeat=l))
    out = []
    for j in lowers:
        row = []
        for i in uppers:
            idx = i + j
            ok = all(idx[a] == idx[b] for a in range(k + l) for b in range(k + l) if p.labels[a] == p.labels[b])
            row.append(1 if ok else 0)
        out.append(row)
    return out


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)] if a else a


def dense_rank(vectors):
    if not vectors:
        return 0
    return sympy.Matrix(vectors).rank()


def flatten(m):
    return [x for row in m for x in row]


def span_rank(partitions, N):
    return dense_rank([flatten(dense_t(p, N)) for p in partitions])
