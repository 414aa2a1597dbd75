"""Ising models, exact joint tables, and samplers.

Conventions used throughout the package:
  * spins take values -1/+1 unless a table says otherwise; value order is
    ascending, so for spins the digit 0 means -1 and the digit 1 means +1;
  * an outcome (x_0, ..., x_{p-1}) of a q-ary table maps to the flat index
    sum_i digit(x_i) * q**i, i.e. node 0 is the least-significant digit;
  * entropies and mutual informations are in bits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import Graph

# Tiny negative MI values are floating-point noise and get clamped to zero;
# anything more negative indicates a real inconsistency and raises.
MI_NEGATIVE_TOL = 1e-12

PROB_ATOL = 1e-12


class ZeroConditionError(ValueError):
    """Conditioning event has zero probability (or zero sample count)."""


def entropy_bits(probs: np.ndarray) -> float:
    """Shannon entropy in bits of a (possibly unnormalized-shape) prob array."""
    p = np.asarray(probs, dtype=float).ravel()
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def clamp_mi(value: float) -> float:
    """Zero out negative MI noise above -MI_NEGATIVE_TOL; reject worse."""
    if value >= 0:
        return value
    if value >= -MI_NEGATIVE_TOL:
        return 0.0
    raise ArithmeticError(f"mutual information {value} is negative beyond tolerance")


@dataclass(eq=False)
class SampleSet:
    """n rows of p discrete observations, plus the value alphabet."""

    data: np.ndarray
    values: tuple[int, ...] = (-1, 1)

    def __post_init__(self):
        self.data = np.ascontiguousarray(np.asarray(self.data, dtype=np.int8))
        if self.data.ndim != 2:
            raise ValueError(f"sample array must be 2-d, got shape {self.data.shape}")
        self.values = tuple(sorted(int(v) for v in self.values))
        if len(set(self.values)) != len(self.values):
            raise ValueError("alphabet values must be distinct")
        if not np.isin(self.data, self.values).all():
            raise ValueError("sample entries outside the declared alphabet")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


def save_samples(samples: SampleSet, path, seed=None) -> None:
    """Write one CSV row per observation, with a provenance comment line."""
    with open(path, "w") as fh:
        header = f"# p={samples.p} n={samples.n}"
        if seed is not None:
            header += f" seed={seed}"
        fh.write(header + "\n")
        for row in samples.data:
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def load_samples(path, values=None) -> SampleSet:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(tok) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"no sample rows in {path}")
    data = np.array(rows, dtype=np.int8)
    if values is None:
        values = tuple(int(v) for v in np.unique(data))
    return SampleSet(data, values)


@dataclass(eq=False)
class IsingModel:
    """Pairwise binary MRF: couplings on graph edges plus per-node fields."""

    graph: Graph
    couplings: dict[tuple[int, int], float]
    fields: np.ndarray = None

    def __post_init__(self):
        if self.fields is None:
            self.fields = np.zeros(self.graph.p)
        self.fields = np.asarray(self.fields, dtype=float)
        if self.fields.shape != (self.graph.p,):
            raise ValueError(
                f"fields shape {self.fields.shape} does not match p={self.graph.p}"
            )
        self.couplings = {
            ((i, j) if i < j else (j, i)): float(v)
            for (i, j), v in self.couplings.items()
        }
        if set(self.couplings) != set(self.graph.edges):
            raise ValueError("couplings must cover exactly the graph edges")
        vals = list(self.couplings.values()) + list(self.fields)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("couplings and fields must be finite")

    @property
    def p(self) -> int:
        return self.graph.p

    def coupling(self, i: int, j: int) -> float:
        return self.couplings[(i, j) if i < j else (j, i)]


def random_model(
    graph: Graph,
    jmin: float,
    jmax: float,
    ferromagnetic: bool = False,
    seed=None,
) -> IsingModel:
    """Draw couplings uniformly from [jmin, jmax] in magnitude, zero fields.

    For non-ferromagnetic models each edge flips sign with probability 1/2.
    Edges are visited in sorted order, one magnitude draw then one sign draw,
    so a seed pins the model exactly.
    """
    if not 0 < jmin <= jmax:
        raise ValueError(f"need 0 < jmin <= jmax, got {jmin}, {jmax}")
    rng = np.random.default_rng(seed)
    couplings = {}
    for e in graph.edges:
        mag = rng.uniform(jmin, jmax)
        if not ferromagnetic and rng.random() < 0.5:
            mag = -mag
        couplings[e] = mag
    return IsingModel(graph, couplings, np.zeros(graph.p))


def model_to_json(m: IsingModel) -> dict:
    return {
        "p": m.p,
        "edges": [[i, j, m.couplings[(i, j)]] for i, j in m.graph.edges],
        "h": [float(v) for v in m.fields],
    }


def model_from_json(obj: dict) -> IsingModel:
    p = int(obj["p"])
    edges = [(int(i), int(j)) for i, j, _ in obj["edges"]]
    couplings = {(int(i), int(j)): float(v) for i, j, v in obj["edges"]}
    return IsingModel(Graph(p, edges), couplings, np.asarray(obj["h"], dtype=float))


def save_model(m: IsingModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_json(m), fh, indent=2)
        fh.write("\n")


def load_model(path) -> IsingModel:
    with open(path) as fh:
        return model_from_json(json.load(fh))


class JointTable:
    """Exact joint distribution of p discrete variables on a shared alphabet."""

    def __init__(self, p: int, probs, values=(-1, 1), check_positive: bool = False):
        self.p = int(p)
        self.values = tuple(sorted(int(v) for v in values))
        self.q = len(self.values)
        probs = np.asarray(probs, dtype=float).ravel()
        if probs.shape != (self.q**self.p,):
            raise ValueError(
                f"need {self.q**self.p} probabilities for p={p}, q={self.q}, "
                f"got {probs.shape}"
            )
        if probs.min() < -PROB_ATOL:
            raise ValueError("negative probability entries")
        if abs(probs.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")
        if check_positive and probs.min() <= 0:
            raise ValueError("table does not have full support")
        self.probs = np.maximum(probs, 0.0)
        self._digit = {v: k for k, v in enumerate(self.values)}

    def tensor(self) -> np.ndarray:
        """View shaped (q,)*p with axis i indexing node i's value."""
        return self.probs.reshape((self.q,) * self.p, order="F")

    def _check_nodes(self, nodes: Sequence[int]) -> tuple[int, ...]:
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"repeated nodes in {nodes}")
        if any(not 0 <= v < self.p for v in nodes):
            raise ValueError(f"nodes {nodes} out of range for p={self.p}")
        return nodes

    def marginal(self, nodes: Sequence[int]) -> np.ndarray:
        """Marginal over `nodes` (must be ascending), axes in that order."""
        nodes = self._check_nodes(nodes)
        if any(a >= b for a, b in zip(nodes, nodes[1:])):
            raise ValueError(f"nodes must be ascending, got {nodes}")
        drop = tuple(v for v in range(self.p) if v not in set(nodes))
        return self.tensor().sum(axis=drop)

    def entropy(self, nodes: Sequence[int]) -> float:
        return entropy_bits(self.marginal(nodes))

    def cond_mutual_info(self, i: int, j: int, cond: Sequence[int] = ()) -> float:
        """I(X_i; X_j | X_cond) in bits via the four-entropy decomposition."""
        cond = tuple(sorted(cond))
        self._check_nodes((i, j) + cond)
        h_is = self.entropy(tuple(sorted((i,) + cond)))
        h_js = self.entropy(tuple(sorted((j,) + cond)))
        h_ijs = self.entropy(tuple(sorted((i, j) + cond)))
        h_s = self.entropy(cond)
        return clamp_mi(h_is + h_js - h_ijs - h_s)

    def cond_prob(self, i: int, x_i: int, given: Mapping[int, int]) -> float:
        """P(X_i = x_i | X_k = given[k] for all k)."""
        if i in given:
            raise ValueError(f"target node {i} cannot appear in the condition")
        cond_nodes = tuple(sorted(given))
        all_nodes = tuple(sorted((i,) + cond_nodes))
        m = self.marginal(all_nodes)
        idx_all = tuple(self._digit[given[v]] if v != i else self._digit[x_i]
                        for v in all_nodes)
        num = float(m[idx_all])
        denom = float(m.sum(axis=all_nodes.index(i))[
            tuple(self._digit[given[v]] for v in cond_nodes)
        ]) if cond_nodes else 1.0
        if denom <= 0:
            raise ZeroConditionError(f"zero-probability condition {dict(given)}")
        return num / denom

    def condition(self, assignment: Mapping[int, int]) -> "JointTable":
        """Distribution of the remaining nodes given a partial assignment.

        Remaining nodes keep their relative order and are renumbered to
        0..p'-1 ascending.
        """
        fixed = dict(assignment)
        self._check_nodes(tuple(fixed))
        idx = tuple(
            self._digit[fixed[v]] if v in fixed else slice(None)
            for v in range(self.p)
        )
        sub = self.tensor()[idx]
        mass = sub.sum()
        if mass <= 0:
            raise ZeroConditionError(f"zero-probability condition {fixed}")
        flat = (sub / mass).reshape(-1, order="F")
        return JointTable(self.p - len(fixed), flat, self.values)


def exact_joint(m: IsingModel) -> JointTable:
    """Enumerate all 2^p spin configurations (p <= 24) into a JointTable.

    Energies are accumulated in log scale and exponentiated after subtracting
    the maximum, so large couplings cannot overflow.
    """
    p = m.p
    if p > 24:
        raise ValueError(f"exact enumeration capped at p=24, got p={p}")
    idx = np.arange(2**p, dtype=np.int64)
    energy = np.zeros(2**p)
    for i in range(p):
        h = m.fields[i]
        if h != 0.0:
            energy += h * (2.0 * ((idx >> i) & 1) - 1.0)
    for (i, j), coupling in m.couplings.items():
        disagree = ((idx >> i) ^ (idx >> j)) & 1
        energy += coupling * (1.0 - 2.0 * disagree)
    energy -= energy.max()
    w = np.exp(energy)
    return JointTable(p, w / w.sum(), (-1, 1))


def xor_triangle(noise: float = 0.1) -> JointTable:
    """Three 0/1 variables: two fair coins plus their XOR flipped w.p. `noise`."""
    if not 0 <= noise <= 1:
        raise ValueError("noise must be a probability")
    probs = np.empty(8)
    for idx in range(8):
        x0, x1, x2 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
        probs[idx] = 0.25 * ((1 - noise) if x2 == x0 ^ x1 else noise)
    return JointTable(3, probs, (0, 1))


def gibbs_sample(
    m: IsingModel,
    n: int,
    burnin: int = 200,
    thin: int = 5,
    seed=None,
) -> SampleSet:
    """Single-chain Gibbs sampler with systematic 0..p-1 site sweeps.

    Runs `burnin` sweeps, then records the state after every `thin`-th sweep
    until n samples are collected. All randomness comes from one generator
    seeded by `seed`: the initial state first, then one uniform per site
    update, so outputs are reproducible.
    """
    if n < 1 or burnin < 0 or thin < 1:
        raise ValueError(f"bad sampler sizes n={n}, burnin={burnin}, thin={thin}")
    p = m.p
    rng = np.random.default_rng(seed)
    state = (rng.integers(0, 2, size=p) * 2 - 1).astype(np.int8)
    sweeps = burnin + n * thin
    uniforms = rng.random(sweeps * p)
    neighbors = [list(m.graph.neighbors(i)) for i in range(p)]
    couplings = [[m.coupling(i, k) for k in neighbors[i]] for i in range(p)]
    fields = [float(v) for v in m.fields]
    out = np.empty((n, p), dtype=np.int8)
    exp = math.exp
    x = state
    k = 0
    row = 0
    for sweep in range(1, sweeps + 1):
        for i in range(p):
            f = fields[i]
            nbr = neighbors[i]
            cpl = couplings[i]
            for t in range(len(nbr)):
                f += cpl[t] * x[nbr[t]]
            x[i] = 1 if uniforms[k] < 1.0 / (1.0 + exp(-2.0 * f)) else -1
            k += 1
        if sweep > burnin and (sweep - burnin) % thin == 0:
            out[row] = x
            row += 1
    return SampleSet(out, (-1, 1))


def exact_sample(t: JointTable, n: int, seed=None) -> SampleSet:
    """n i.i.d. draws from a JointTable by inverse-CDF lookup."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(t.probs)
    flat = np.searchsorted(cdf, rng.random(n), side="right")
    flat = np.minimum(flat, t.q**t.p - 1)
    values = np.asarray(t.values, dtype=np.int8)
    data = np.empty((n, t.p), dtype=np.int8)
    for i in range(t.p):
        data[:, i] = values[(flat // t.q**i) % t.q]
    return SampleSet(data, t.values)
