"""Conditional-independence tests and max-min score matrices.

A "backend" is anything with the JointTable/EmpiricalDist query surface:
`p`, `values`, `marginal(nodes)`, and `cond_mutual_info(i, j, cond)`.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np


class Statistic(enum.Enum):
    """The two dependence statistics: conditional MI, or the largest
    conditional-probability difference over value choices."""

    MUTUAL_INFORMATION = "mi"
    PROBABILITY = "prob"

    @classmethod
    def parse(cls, name: str) -> "Statistic":
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown test kind {name!r}; use 'mi' or 'prob'")


def delta(backend, kind: Statistic, i: int, j: int, cond: Sequence[int] = ()) -> float:
    """Dependence of X_i and X_j given X_cond, per the chosen statistic.

    The probability statistic is max |P(x_i | x_j, x_C) - P(x_i | x_j', x_C)|
    over all values of x_i, x_j, x_j', and x_C; conditioning cells with zero
    mass are skipped, and pairs with fewer than two reachable x_j cells in
    every context score 0.
    """
    cond = tuple(sorted(cond))
    if i == j or i in cond or j in cond:
        raise ValueError(f"nodes overlap: i={i}, j={j}, cond={cond}")
    if kind is Statistic.MUTUAL_INFORMATION:
        return backend.cond_mutual_info(i, j, cond)
    nodes = tuple(sorted((i, j) + cond))
    m = np.asarray(backend.marginal(nodes), dtype=float)
    arr = np.moveaxis(m, (nodes.index(i), nodes.index(j)), (0, 1))
    q = arr.shape[0]
    arr = arr.reshape(q, q, -1)
    mass = arr.sum(axis=0)  # (x_j, context) cell masses
    best = 0.0
    for c in range(arr.shape[2]):
        live = np.flatnonzero(mass[:, c] > 0)
        if len(live) < 2:
            continue
        cp = arr[:, live, c] / mass[live, c]
        # max over (x_j, x_j') pairs of |cp[x_i, a] - cp[x_i, b]|, any x_i
        spread = float((cp.max(axis=1) - cp.min(axis=1)).max())
        best = max(best, spread)
    return best


@dataclass
class MaxMinResult:
    """Outcome of one pair's min-over-S of max-over-T search."""

    score: float
    s_witness: tuple[int, ...]
    t_witness: tuple[int, ...]
    combinations: int  # (S, T) pairs visited
    delta_evals: int  # distinct conditioning sets evaluated
    decided_nonedge: Optional[bool] = None  # set only in threshold mode


def _size_then_lex(space: Sequence[int], max_size: int) -> Iterable[tuple[int, ...]]:
    for k in range(min(max_size, len(space)) + 1):
        yield from combinations(space, k)


def maxmin_score(
    backend,
    kind: Statistic,
    i: int,
    j: int,
    d1: int,
    d2: int,
    space: Optional[Sequence[int]] = None,
    threshold: Optional[float] = None,
    prune: bool = True,
) -> MaxMinResult:
    """min over S (|S| <= d1) of max over T (|T| <= d2, T in space minus S)
    of delta(i, j | S u T).

    S and T are enumerated smallest-size-first, lexicographically within a
    size, and ties keep the first winner, so witnesses are deterministic.

    With `threshold` set the search runs in decision mode: the S loop stops
    at the first S whose full T-max is <= threshold (a non-edge
    certificate), and each T loop aborts as soon as it exceeds the
    threshold. The returned score is then only decision-grade: exact for
    non-edges, a lower bound > threshold for edges. Without a threshold,
    `prune` abandons T loops that can no longer beat the current best min
    (the exact score and witnesses are unaffected).
    """
    if d1 < 0 or d2 < 0:
        raise ValueError(f"search sizes must be nonnegative, got d1={d1}, d2={d2}")
    if space is None:
        space = tuple(v for v in range(backend.p) if v != i and v != j)
    else:
        space = tuple(sorted(set(space) - {i, j}))
    cache: dict[tuple[int, ...], float] = {}
    combos = 0
    best = np.inf
    best_s: tuple[int, ...] = ()
    best_t: tuple[int, ...] = ()
    for s_set in _size_then_lex(space, d1):
        rest = tuple(v for v in space if v not in s_set)
        cur_max = -np.inf
        cur_t: tuple[int, ...] = ()
        aborted = False
        for t_set in _size_then_lex(rest, d2):
            combos += 1
            key = tuple(sorted(s_set + t_set))
            val = cache.get(key)
            if val is None:
                val = delta(backend, kind, i, j, key)
                cache[key] = val
            if val > cur_max:
                cur_max = val
                cur_t = t_set
            if threshold is not None:
                if cur_max > threshold:
                    aborted = True
                    break
            elif prune and cur_max >= best:
                aborted = True
                break
        if threshold is not None:
            if not aborted:
                return MaxMinResult(
                    cur_max, s_set, cur_t, combos, len(cache), decided_nonedge=True
                )
            if cur_max < best:
                best, best_s, best_t = cur_max, s_set, cur_t
        elif not aborted and cur_max < best:
            best, best_s, best_t = cur_max, s_set, cur_t
    return MaxMinResult(
        float(best),
        best_s,
        best_t,
        combos,
        len(cache),
        decided_nonedge=False if threshold is not None else None,
    )


@dataclass
class ScoreMatrix:
    """Symmetric pairwise dependence scores plus the witnessing (S, T) sets."""

    p: int
    scores: np.ndarray
    kind: Optional[Statistic] = None
    d1: Optional[int] = None
    d2: Optional[int] = None
    witnesses: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        if self.scores.shape != (self.p, self.p):
            raise ValueError(f"score matrix must be ({self.p}, {self.p})")
        if not np.allclose(self.scores, self.scores.T):
            raise ValueError("score matrix must be symmetric")

    def pair_values(self) -> np.ndarray:
        """Upper-triangle scores in (i, j) lexicographic pair order."""
        iu = np.triu_indices(self.p, k=1)
        return self.scores[iu]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "score", "S", "T"])
            for i in range(self.p):
                for j in range(i + 1, self.p):
                    s_set, t_set = self.witnesses.get((i, j), ((), ()))
                    writer.writerow([
                        i,
                        j,
                        repr(float(self.scores[i, j])),
                        ";".join(str(v) for v in s_set),
                        ";".join(str(v) for v in t_set),
                    ])

    @classmethod
    def from_csv(cls, path, p: Optional[int] = None) -> "ScoreMatrix":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:3] != ["i", "j", "score"]:
                raise ValueError(f"unexpected score CSV header {header}")
            for rec in reader:
                i, j, score = int(rec[0]), int(rec[1]), float(rec[2])
                s_set = tuple(int(v) for v in rec[3].split(";") if v != "")
                t_set = tuple(int(v) for v in rec[4].split(";") if v != "")
                rows.append((i, j, score, s_set, t_set))
        if p is None:
            p = 1 + max(max(i, j) for i, j, *_ in rows) if rows else 1
        scores = np.zeros((p, p))
        witnesses = {}
        for i, j, score, s_set, t_set in rows:
            scores[i, j] = scores[j, i] = score
            witnesses[(i, j)] = (s_set, t_set)
        return cls(p, scores, witnesses=witnesses)


def score_matrix(
    backend,
    kind: Statistic,
    d1: int,
    d2: int,
    spaces: Optional[Mapping[int, Sequence[int]]] = None,
    engine: str = "auto",
) -> ScoreMatrix:
    """Max-min score for every node pair.

    `spaces` optionally restricts, per node, which candidates may enter S and
    T (the preprocessed algorithm's L_i sets). With per-node spaces the score
    of (i, j) is the max over the two directional searches that exist (j must
    be in i's space for the i-side search, and vice versa); pairs with no
    usable direction score 0.

    engine: "reference" is the plain enumerator; "fast" is the vectorized
    shared-entropy engine (MI statistic on full search spaces only); "auto"
    picks "fast" when eligible. Both produce identical scores up to float
    roundoff; witnesses can differ only between exactly tied candidates.
    """
    if engine not in ("auto", "reference", "fast"):
        raise ValueError(f"unknown engine {engine!r}")
    p = backend.p
    if engine in ("auto", "fast"):
        from . import fastscore

        eligible = (
            spaces is None
            and kind is Statistic.MUTUAL_INFORMATION
            and fastscore.supports(backend, d1, d2)
        )
        if eligible:
            scorer = fastscore.FastScorer(p, [(d1, d2)], q=len(backend.values))
            scores, witnesses = scorer.score_matrix(backend, d1, d2)
            return ScoreMatrix(
                p, scores, kind, d1, d2, witnesses, meta={"engine": "fast"}
            )
        if engine == "fast":
            raise ValueError("fast engine requires the MI statistic on full spaces")

    scores = np.zeros((p, p))
    witnesses = {}
    combos = 0
    evals = 0
    for i in range(p):
        for j in range(i + 1, p):
            if spaces is None:
                results = [maxmin_score(backend, kind, i, j, d1, d2)]
            else:
                results = []
                if j in spaces[i]:
                    results.append(
                        maxmin_score(backend, kind, i, j, d1, d2, space=spaces[i])
                    )
                if i in spaces[j]:
                    results.append(
                        maxmin_score(backend, kind, j, i, d1, d2, space=spaces[j])
                    )
            if results:
                top = max(results, key=lambda r: r.score)
                scores[i, j] = scores[j, i] = top.score
                witnesses[(i, j)] = (top.s_witness, top.t_witness)
                combos += sum(r.combinations for r in results)
                evals += sum(r.delta_evals for r in results)
    return ScoreMatrix(
        p,
        scores,
        kind,
        d1,
        d2,
        witnesses,
        meta={"engine": "reference", "combinations": combos, "delta_evals": evals},
    )
