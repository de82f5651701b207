#!/usr/bin/env python3
"""Generate data/demo_countable.json: a tabulated countable-type family.

Construction (types k = 1..32, geometric damping base 4):

  type 1:  1 child of type 1   w.p. 1/8
           2 children of type 1 w.p. 1/16
           1 child of type j    w.p. 4^-(j+1)   for j = 2..32
           no offspring          with the remaining mass

  type k>=2:
           1 child of type k-1  w.p. 4^-k
           1 child of type k    w.p. 4^-(k+1)
           1 child of type k+1  w.p. 4^-(k+2)   (k < 32; at the tabulation
                                                 edge this mass folds into
                                                 the no-offspring entry)
           2 children of type k w.p. 4^-(2k+1)
           no offspring          with the remaining mass

Weights shipped with the family: phi(k) = k, psi(k) = 8, epsilon = 1.

Why this satisfies the tabulated-family assumptions:
  * Subcriticality at every truncation level: every row of the mean matrix
    sums to < 0.3, so the Perron root is < 0.3 < 1.
  * Positive regularity of every truncation: transitions k -> k-1, k -> k,
    1 -> j give an irreducible support graph and self-loops kill
    periodicity.
  * Non-singularity: type 1 keeps its two-child entry at every level.
  * Growth in k (phi = id, psi = 8): each c-coefficient of type k equals
    the matching type-1 tail coefficient b_j = 4^-(j+1) at the same target
    type, so f_k - 1 <= 3 (f_1 - 1) for the linear part, and the quadratic
    term 4^-(2k+1) q_k^2 is dominated by 8 * C(k,2) b_k^2 q_k^2 inside
    f_1^k.  Hence f_k <= 8 * f_1^k on [1,inf)^32.
  * Weighted subcriticality with epsilon = 1: E_k[2^{sum_j j X_j}] adds
    2^-(k+1) + 2^-(k+2) + 2^-(k+3) + 2^-(2k+2) (+ tail terms 2^-(j+2) for
    type 1) on top of the no-offspring mass, staying well below 2. This
    script checks the inequality exactly per type.
  * Bounded spatial growth: the own-type quadratic entry makes the
    constraint region {f_k(q) <= q_k} bounded in every coordinate f_k
    reads, so f_k(q^{3/2}) stays bounded there.
"""

import json
from fractions import Fraction

D_MAX = 32


def type_entries(k: int):
    entries = {}

    def add(counts, p):
        entries[tuple(counts)] = entries.get(tuple(counts), Fraction(0)) + p

    zero = [0] * D_MAX
    if k == 1:
        c = list(zero)
        c[0] = 1
        add(c, Fraction(1, 8))
        c = list(zero)
        c[0] = 2
        add(c, Fraction(1, 16))
        for j in range(2, D_MAX + 1):
            c = list(zero)
            c[j - 1] = 1
            add(c, Fraction(1, 4 ** (j + 1)))
    else:
        c = list(zero)
        c[k - 2] = 1
        add(c, Fraction(1, 4 ** k))
        c = list(zero)
        c[k - 1] = 1
        add(c, Fraction(1, 4 ** (k + 1)))
        if k < D_MAX:
            c = list(zero)
            c[k] = 1
            add(c, Fraction(1, 4 ** (k + 2)))
        c = list(zero)
        c[k - 1] = 2
        add(c, Fraction(1, 4 ** (2 * k + 1)))

    die = Fraction(1) - sum(entries.values())
    assert die > 0
    add(zero, die)
    return entries


def check_weighted_subcriticality(entries, k):
    # E_k[(1+eps)^{sum_j phi(j) x_j}] <= 1 + eps with phi(j) = j, eps = 1.
    total = Fraction(0)
    for counts, p in entries.items():
        w = sum((j + 1) * x for j, x in enumerate(counts))
        total += p * Fraction(2) ** w
    assert total <= 2, f"type {k}: weighted mean {float(total)} > 2"
    return total


def main():
    types = []
    for k in range(1, D_MAX + 1):
        entries = type_entries(k)
        assert sum(entries.values()) == 1
        check_weighted_subcriticality(entries, k)
        row = sum(p * sum(c) for c, p in entries.items())
        assert row < Fraction(3, 10), f"type {k}: mean row sum {float(row)}"
        ser = []
        for counts in sorted(entries):
            p = entries[counts]
            ser.append({"counts": list(counts), "prob": f"{p.numerator}/{p.denominator}"})
        types.append({"entries": ser})

    family = {
        "d": D_MAX,
        "d_max": D_MAX,
        "phi": list(range(1, D_MAX + 1)),
        "psi": [8] * D_MAX,
        "epsilon": 1.0,
        "types": types,
    }
    with open("data/demo_countable.json", "w") as f:
        json.dump(family, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
