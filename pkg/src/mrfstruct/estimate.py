"""Plug-in empirical distributions over sample columns.

EmpiricalDist mirrors the query surface of model.JointTable (marginal,
entropy, cond_prob, cond_mutual_info) so scoring code can run on either an
exact table or samples without caring which.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .model import SampleSet, ZeroConditionError, clamp_mi, entropy_bits

# q^k contingency cells get dense arrays; cap the subset size to keep that sane.
MAX_QUERY_NODES = 12


class EmpiricalDist:
    """Relative frequencies of one SampleSet, queried one subset at a time.

    Each query builds a dense contingency table for the requested columns in
    a single pass over the rows (integer encoding + bincount); nothing is
    precomputed, so construction is O(n*p) and queries are O(n*|A|).
    """

    def __init__(self, samples: SampleSet):
        self.samples = samples
        self.values = samples.values
        self.q = len(self.values)
        self.n = samples.n
        self.p = samples.p
        # columns recoded to digits 0..q-1 in ascending value order
        self.codes = np.searchsorted(
            np.asarray(self.values, dtype=np.int8), samples.data
        ).astype(np.int64)
        self._digit = {v: k for k, v in enumerate(self.values)}

    def counts(self, nodes: Sequence[int]) -> np.ndarray:
        """Contingency tensor of raw counts, shape (q,)*len(nodes)."""
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"repeated nodes in {nodes}")
        if any(not 0 <= v < self.p for v in nodes):
            raise ValueError(f"nodes {nodes} out of range for p={self.p}")
        if len(nodes) > MAX_QUERY_NODES:
            raise ValueError(
                f"subset of {len(nodes)} nodes exceeds the {MAX_QUERY_NODES}-node cap"
            )
        if not nodes:
            return np.array(float(self.n))
        enc = np.zeros(self.n, dtype=np.int64)
        for t in reversed(range(len(nodes))):
            enc = enc * self.q + self.codes[:, nodes[t]]
        flat = np.bincount(enc, minlength=self.q ** len(nodes)).astype(float)
        return flat.reshape((self.q,) * len(nodes), order="F")

    def marginal(self, nodes: Sequence[int]) -> np.ndarray:
        """Relative-frequency tensor over `nodes` (ascending), axes in that order."""
        nodes = tuple(nodes)
        if any(a >= b for a, b in zip(nodes, nodes[1:])):
            raise ValueError(f"nodes must be ascending, got {nodes}")
        return self.counts(nodes) / self.n

    def entropy(self, nodes: Sequence[int]) -> float:
        return entropy_bits(self.marginal(nodes))

    def cond_mutual_info(self, i: int, j: int, cond: Sequence[int] = ()) -> float:
        """Plug-in I(X_i; X_j | X_cond) in bits, clamped like the exact version."""
        cond = tuple(sorted(cond))
        h_is = self.entropy(tuple(sorted((i,) + cond)))
        h_js = self.entropy(tuple(sorted((j,) + cond)))
        h_ijs = self.entropy(tuple(sorted((i, j) + cond)))
        h_s = self.entropy(cond)
        return clamp_mi(h_is + h_js - h_ijs - h_s)

    def cond_prob(self, i: int, x_i: int, given: Mapping[int, int]) -> float:
        """P-hat(X_i = x_i | given); raises ZeroConditionError on empty cells."""
        if i in given:
            raise ValueError(f"target node {i} cannot appear in the condition")
        cond_nodes = tuple(sorted(given))
        all_nodes = tuple(sorted((i,) + cond_nodes))
        c = self.counts(all_nodes)
        num = float(c[tuple(
            self._digit[given[v]] if v != i else self._digit[x_i] for v in all_nodes
        )])
        if cond_nodes:
            denom = float(c.sum(axis=all_nodes.index(i))[
                tuple(self._digit[given[v]] for v in cond_nodes)
            ])
        else:
            denom = float(self.n)
        if denom <= 0:
            raise ZeroConditionError(f"no samples match condition {dict(given)}")
        return num / denom


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Sum of absolute differences between two same-shape arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.abs(a - b).sum())
