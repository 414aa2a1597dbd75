"""Vectorized empirical-MI score matrices sharing one subset-entropy table.

With search depth b = d1 + d2, every conditional MI that any pair (i, j) can
request decomposes as H(C+i) + H(C+j) - H(C+ij) - H(C) for some conditioning
set C with |C| <= b, so all pairs together only ever need entropies of column
subsets of size <= b + 2. The engine computes those once per sample set
(batched contingency counts over a DFS of the subset lattice) and assembles
each pair's min-max score by array gathers, which is what makes repeated-run
experiments tractable.

Subsets are identified by colexicographic rank among same-size subsets:
rank(A) = sum_t binom(a_t, t+1) for A = {a_0 < a_1 < ...}. Ranks are closed
form, so gather indices never require enumerating the global subset list.
"""

from __future__ import annotations

from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .estimate import MAX_QUERY_NODES, EmpiricalDist
from .model import MI_NEGATIVE_TOL

# refuse instances whose total contingency cells would not fit comfortably
MAX_TOTAL_CELLS = 5 * 10**7


def _binom_table(n: int, kmax: int) -> np.ndarray:
    table = np.zeros((n + 1, kmax + 1), dtype=np.int64)
    table[:, 0] = 1
    for a in range(1, n + 1):
        for k in range(1, kmax + 1):
            table[a, k] = table[a - 1, k - 1] + table[a - 1, k]
    return table


def _colex_ranks(subsets: np.ndarray, binom: np.ndarray) -> np.ndarray:
    """Colex rank of each row of an (R, k) array of ascending subsets."""
    if subsets.shape[-1] == 0:
        return np.zeros(subsets.shape[0], dtype=np.int64)
    k = subsets.shape[-1]
    return binom[subsets, np.arange(1, k + 1)].sum(axis=-1)


def _colex_subsets(m: int, k: int) -> np.ndarray:
    """All k-subsets of range(m) as an (R, k) array in colex order."""
    combos = sorted(combinations(range(m), k), key=lambda t: t[::-1])
    return np.array(combos, dtype=np.int64).reshape(len(combos), k)


def _total_cells(p: int, kmax: int, q: int) -> float:
    total = 0.0
    c = 1.0
    for k in range(kmax + 1):
        if k > 0:
            c = c * (p - k + 1) / k
        total += c * q**k
    return total


def supports(backend, d1: int, d2: int) -> bool:
    """Whether the fast engine can handle this backend and search depth."""
    if not isinstance(backend, EmpiricalDist):
        return False
    kmax = d1 + d2 + 2
    return (
        d2 <= 2
        and backend.p >= 3
        and kmax <= min(backend.p, MAX_QUERY_NODES)
        and _total_cells(backend.p, kmax, backend.q) <= MAX_TOTAL_CELLS
    )


class EntropyTable:
    """Entropies (bits) of every subset of <= kmax columns of one sample set.

    `get(k)` is a flat array indexed by the colex rank of the size-k subset.
    """

    def __init__(self, emp: EmpiricalDist, kmax: int, binom: Optional[np.ndarray] = None):
        p, n, q = emp.p, emp.n, emp.q
        if kmax > min(p, MAX_QUERY_NODES):
            raise ValueError(f"kmax={kmax} too large for p={p}")
        if binom is None:
            binom = _binom_table(p, kmax + 1)
        self.kmax = kmax
        counts_of = emp.codes  # (n, p) digits
        sizes = [int(binom[p, k]) for k in range(kmax + 1)]
        self._tables = [np.zeros(s) for s in sizes]
        self._tables[0][0] = 0.0
        inv_n = 1.0 / n
        # DFS over the subset lattice; each visit batch-counts all children
        # of one subset with a single bincount, so the per-subset Python cost
        # stays O(1) numpy calls.
        stack = [(-1, np.zeros(n, dtype=np.int64), 0, 0)]
        while stack:
            last, enc, rank, k = stack.pop()
            cols = np.arange(last + 1, p)
            if cols.size == 0:
                continue
            ncells = q ** (k + 1)
            child_enc = enc[:, None] * q + counts_of[:, cols]
            flat = (child_enc + np.arange(cols.size, dtype=np.int64) * ncells).ravel()
            counts = np.bincount(flat, minlength=cols.size * ncells)
            probs = counts.reshape(cols.size, ncells) * inv_n
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = probs * np.log2(probs)
            ent = -np.nansum(terms, axis=1)
            child_ranks = rank + binom[cols, k + 1]
            self._tables[k + 1][child_ranks] = ent
            if k + 1 < kmax:
                for t in range(cols.size):
                    stack.append(
                        (int(cols[t]), child_enc[:, t].copy(), int(child_ranks[t]), k + 1)
                    )

    def get(self, k: int) -> np.ndarray:
        return self._tables[k]


class FastScorer:
    """Score-matrix engine bound to (p, a set of (d1, d2) configs).

    The combinatorial scaffolding (relative subset lists, T-gather matrices,
    per-pair entropy gather indices) depends only on p and the configs, so one
    scorer instance amortizes it across many sample sets.
    """

    def __init__(self, p: int, configs: Sequence[tuple[int, int]], q: int = 2):
        if p < 3:
            raise ValueError("need p >= 3")
        self.p = p
        self.q = q
        self.configs = [(int(d1), int(d2)) for d1, d2 in configs]
        self.d1max = max(d1 for d1, _ in self.configs)
        self.d2max = max(d2 for _, d2 in self.configs)
        if self.d2max > 2:
            raise ValueError("fast engine handles d2 <= 2 only")
        self.depth = max(d1 + d2 for d1, d2 in self.configs)
        self.kmax = self.depth + 2
        m = p - 2
        self.m = m
        self.binom = _binom_table(p, self.kmax + 1)
        self.rel = [_colex_subsets(m, k) for k in range(min(self.depth, m) + 1)]
        # ascending complement of each S row, shared by the T gathers
        self.rest = []
        for k in range(min(self.d1max, m) + 1):
            mask = np.ones((len(self.rel[k]), m), dtype=bool)
            rows = np.repeat(np.arange(len(self.rel[k])), k)
            mask[rows, self.rel[k].ravel()] = False
            self.rest.append(np.nonzero(mask)[1].reshape(len(self.rel[k]), m - k))
        self._gather: dict[tuple[int, int], np.ndarray] = {}
        self._pair_ix: dict[tuple[int, int], list[np.ndarray]] = {}

    def _gather_matrix(self, k: int, tau: int) -> np.ndarray:
        """Colex ranks of S u T for each size-k S row and each size-tau T
        drawn from that row's complement; shape (R_k, C(m-k, tau))."""
        key = (k, tau)
        if key not in self._gather:
            s_rows = self.rel[k]
            rest = self.rest[k]
            r_count, rest_w = rest.shape
            cols = np.array(list(combinations(range(rest_w), tau)), dtype=np.int64)
            t_vals = rest[:, cols]  # (R_k, C(rest_w, tau), tau)
            s_rep = np.broadcast_to(
                s_rows[:, None, :], (r_count, len(cols), k)
            )
            unions = np.sort(np.concatenate([s_rep, t_vals], axis=2), axis=2)
            self._gather[key] = _colex_ranks(unions, self.binom)
        return self._gather[key]

    def _pair_index(self, i: int, j: int) -> list[np.ndarray]:
        """For each conditioning size k: (4, R_k) global colex ranks of
        C, C+{i}, C+{j}, C+{i,j} with C running over relative subsets."""
        key = (i, j)
        if key not in self._pair_ix:
            others = np.array(
                [v for v in range(self.p) if v != i and v != j], dtype=np.int64
            )
            per_size = []
            for k in range(min(self.depth, self.m) + 1):
                base = others[self.rel[k]]
                r_count = base.shape[0]

                def with_extra(*extra):
                    cols = [base] + [
                        np.full((r_count, 1), e, dtype=np.int64) for e in extra
                    ]
                    return np.sort(np.concatenate(cols, axis=1), axis=1)

                per_size.append(
                    np.stack(
                        [
                            _colex_ranks(base, self.binom),
                            _colex_ranks(with_extra(i), self.binom),
                            _colex_ranks(with_extra(j), self.binom),
                            _colex_ranks(with_extra(i, j), self.binom),
                        ]
                    )
                )
            self._pair_ix[key] = per_size
        return self._pair_ix[key]

    def entropies(self, emp: EmpiricalDist) -> EntropyTable:
        if emp.p != self.p or emp.q != self.q:
            raise ValueError("sample set shape does not match this scorer")
        return EntropyTable(emp, self.kmax, self.binom)

    def _pair_cmi_arrays(self, table: EntropyTable, i: int, j: int) -> list[np.ndarray]:
        """Clamped CMI values for every conditioning set, grouped by size."""
        out = []
        for k, ix in enumerate(self._pair_index(i, j)):
            vals = (
                table.get(k + 1)[ix[1]]
                + table.get(k + 1)[ix[2]]
                - table.get(k + 2)[ix[3]]
                - table.get(k)[ix[0]]
            )
            if vals.size and vals.min() < -MI_NEGATIVE_TOL:
                raise ArithmeticError(
                    f"mutual information {vals.min()} negative beyond tolerance"
                )
            out.append(np.maximum(vals, 0.0))
        return out

    def _pair_score(
        self, cmi: list[np.ndarray], i: int, j: int, d1: int, d2: int
    ):
        """Min-max over one pair from its per-size CMI arrays.

        Tie-breaking matches the reference enumerator: smaller |S| first,
        then lexicographic S; T the same way within the winning S.
        """
        others = [v for v in range(self.p) if v != i and v != j]
        best = np.inf
        best_k = 0
        d1_eff = min(d1, self.m)
        max_t = [None] * (d1_eff + 1)
        for k in range(d1_eff + 1):
            cur = cmi[k]
            for tau in range(1, min(d2, self.m - k) + 1):
                gathered = cmi[k + tau][self._gather_matrix(k, tau)]
                if gathered.size:
                    cur = np.maximum(cur, gathered.max(axis=1))
            max_t[k] = cur
            low = cur.min()
            if low < best:
                best = low
                best_k = k
        # tied rows within the winning size: decode and take the lex-least S
        tied = np.flatnonzero(max_t[best_k] == best)
        s_rows = [tuple(others[v] for v in self.rel[best_k][r]) for r in tied]
        order = int(tied[min(range(len(tied)), key=lambda t: s_rows[t])])
        s_set = tuple(others[v] for v in self.rel[best_k][order])
        # rebuild the T choice for that single row, size-then-lex
        best_t_val = cmi[best_k][order]
        t_set: tuple[int, ...] = ()
        rest_row = self.rest[best_k][order] if best_k < len(self.rest) else None
        for tau in range(1, min(d2, self.m - best_k) + 1):
            row = cmi[best_k + tau][self._gather_matrix(best_k, tau)[order]]
            if row.size == 0:
                continue
            pos = int(np.argmax(row))
            if row[pos] > best_t_val:
                best_t_val = row[pos]
                cols = list(combinations(range(self.m - best_k), tau))[pos]
                t_set = tuple(others[rest_row[c]] for c in cols)
        return float(best), s_set, t_set

    def score_all(self, emp: EmpiricalDist, table: Optional[EntropyTable] = None):
        """Score matrices for every configured (d1, d2) on one sample set.

        Returns {(d1, d2): (scores ndarray, witnesses dict)}.
        """
        if table is None:
            table = self.entropies(emp)
        out = {
            cfg: (np.zeros((self.p, self.p)), {}) for cfg in self.configs
        }
        for i in range(self.p):
            for j in range(i + 1, self.p):
                cmi = self._pair_cmi_arrays(table, i, j)
                for d1, d2 in self.configs:
                    score, s_set, t_set = self._pair_score(cmi, i, j, d1, d2)
                    scores, witnesses = out[(d1, d2)]
                    scores[i, j] = scores[j, i] = score
                    witnesses[(i, j)] = (s_set, t_set)
        return out

    def score_matrix(self, emp: EmpiricalDist, d1: int, d2: int):
        """(scores, witnesses) for a single configured (d1, d2)."""
        if (d1, d2) not in self.configs:
            raise ValueError(f"({d1}, {d2}) not among configured sizes")
        return self.score_all(emp)[(d1, d2)]
