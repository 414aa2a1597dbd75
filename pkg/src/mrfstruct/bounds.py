"""Closed-form constants and sample-size thresholds behind the learner's guarantees.

Every function evaluates an explicit formula; nothing here touches data. The
sample-size displays all come from a Hoeffding-style concentration argument and
share the shape 2 * [union-bound log terms] / gamma**2.

All logarithms in the sample-size formulas are natural logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .graph import max_degree

LN2 = math.log(2.0)

# Integer scans for the smallest admissible girth / path bound stop here.
SCAN_CAP = 10**6

REGIMES = ("bdd_general", "bdd_girth", "random_mi", "ferro_bdd", "ferro_random")


@dataclass
class ModelParams:
    """Bag of model-level quantities the formulas draw from.

    Only the fields a regime needs have to be set. alphabet is the per-node
    value count (2 for spin models); alpha_conf is the confidence exponent:
    guarantees hold with probability 1 - const / p**alpha_conf. epsilon is the
    caller-chosen information threshold for the regimes whose guarantee is
    existential; big_l caps the screened candidate-list size (defaults to p).
    """

    d: Optional[int] = None
    jmin: Optional[float] = None
    jmax: Optional[float] = None
    p: Optional[int] = None
    c: Optional[float] = None
    g: Optional[int] = None
    d1: Optional[int] = None
    d2: Optional[int] = None
    k: Optional[float] = None
    alphabet: int = 2
    alpha_conf: float = 1.0
    epsilon: Optional[float] = None
    big_l: Optional[int] = None

    def __post_init__(self):
        if self.jmin is not None and self.jmin <= 0:
            raise ValueError("jmin must be positive")
        if self.jmin is not None and self.jmax is not None and self.jmin > self.jmax:
            raise ValueError("jmin must not exceed jmax")
        if self.d is not None and self.d < 1:
            raise ValueError("degree bound must be at least 1")
        if self.k is not None and not 3.0 < self.k < 4.0:
            raise ValueError("k must lie strictly between 3 and 4")
        if self.alphabet < 2:
            raise ValueError("alphabet must have at least two values")

    def require(self, *names: str) -> None:
        missing = [nm for nm in names if getattr(self, nm) is None]
        if missing:
            raise ValueError("missing parameters: " + ", ".join(missing))


def params_from_model(model, **overrides) -> ModelParams:
    """Scan an IsingModel for (d, jmin, jmax, p); overrides fill in the rest."""
    if not model.graph.edges:
        raise ValueError("model has no edges to bound")
    magnitudes = [abs(j) for j in model.couplings.values()]
    fields = dict(
        d=max_degree(model.graph),
        jmin=min(magnitudes),
        jmax=max(magnitudes),
        p=model.graph.p,
    )
    fields.update(overrides)
    return ModelParams(**fields)


def bdd_epsilon(jmin: float, jmax: float) -> float:
    """Floor on the pairwise probability statistic across a true edge when the
    rest of one endpoint's neighborhood is conditioned on.

    Holds for bounded-degree models with arbitrary coupling signs; it is what
    makes those models loosely connected at separator size d and breaker size
    d - 1.
    """
    return math.tanh(2.0 * jmin) / (2.0 * math.exp(2.0 * jmax) + 2.0 * math.exp(-2.0 * jmax))


def decay_params(d: int, jmax: float) -> tuple[float, float]:
    """Correlation-decay pair (beta, alpha).

    Indirect dependence across graph distance l is at most beta * alpha**l,
    with alpha = (d - 1) * tanh(jmax); alpha < 1 is the decay regime. Needs
    d >= 2 (degree-1 graphs have no branching to decay over) and jmax > 0.
    """
    if d < 2:
        raise ValueError("decay parameters need max degree >= 2")
    if jmax <= 0:
        raise ValueError("jmax must be positive")
    alpha = (d - 1) * math.tanh(jmax)
    beta = 4.0 * jmax * d / alpha
    return beta, alpha


def correlation_bound(d: int, jmax: float, distance: int) -> float:
    """Decay bound beta * alpha**distance on dependence at the given distance."""
    beta, alpha = decay_params(d, jmax)
    return beta * alpha**distance


def _require_decay(d: int, jmax: float) -> tuple[float, float]:
    beta, alpha = decay_params(d, jmax)
    if alpha >= 1.0:
        raise ValueError("outside the decay regime: (d - 1) * tanh(jmax) >= 1")
    return beta, alpha


def girth_constants(d: int, jmin: float, jmax: float) -> tuple[float, float, float, int]:
    """Constants for the bounded-degree, large-girth regime.

    Returns (a, epsilon, epsilon_prime, min_girth): the base constant of the
    edge-statistic floor, the decision threshold it induces, the pairwise
    screening threshold, and the smallest even girth under which both floors
    are guaranteed to hold.
    """
    beta, alpha = _require_decay(d, jmax)
    shrink = 1.0 - math.exp(-4.0 * jmin)
    a = shrink / 1800.0 * math.exp(-8.0 * d * jmax)
    epsilon = 48.0 * a * math.exp(4.0 * d * jmax)
    a_pair = shrink / 1800.0
    epsilon_prime = 48.0 * a_pair
    cap_sep = min(a, LN2)
    cap_pair = min(a_pair, LN2)
    for g in range(3, SCAN_CAP + 1):
        # Only even girths qualify; the floor argument splits cycles in half.
        if g % 2:
            continue
        if beta * alpha ** (g / 2) <= cap_sep and beta * alpha ** (g - 1) <= cap_pair:
            return a, epsilon, epsilon_prime, g
    raise RuntimeError("no girth below 10**6 satisfies the decay conditions")


def sparse_loose_constants(
    d: int, jmin: float, jmax: float, d1: int, d2: int
) -> tuple[float, float, int]:
    """Constants for graphs where short paths between any pair can be cut by
    d1 separator nodes plus d2 breaker nodes.

    Returns (a, epsilon, min_h) with min_h the smallest bound on the length of
    the surviving paths for which the edge-statistic floor holds. Specializes
    to the large-girth constants at (d1, d2) = (1, 0) and to the pairwise
    screening constants at (0, 0).
    """
    if d1 < 0 or d2 < 0:
        raise ValueError("search sizes must be nonnegative")
    beta, alpha = _require_decay(d, jmax)
    shrink = 1.0 - math.exp(-4.0 * jmin)
    scale = (d1 + d2) * d * jmax
    a = shrink / 1800.0 * math.exp(-8.0 * scale)
    epsilon = 48.0 * a * math.exp(4.0 * scale)
    cap = min(a, LN2)
    for h in range(1, SCAN_CAP + 1):
        if beta * alpha**h <= cap:
            return a, epsilon, h
    raise RuntimeError("no path bound below 10**6 satisfies the decay condition")


def bdd_delta(d: int, jmax: float) -> float:
    """Probability floor used by the bounded-degree union bounds.

    Lower-bounds the chance of any joint assignment of the node sets the
    learner conditions on. Kept separate from set_prob_floor on purpose: the
    two formulas are stated independently and are not interchangeable.
    """
    if d < 1:
        raise ValueError("degree bound must be at least 1")
    return 2.0 ** (-2 * d) * math.exp(-12.0 * d * d * jmax)


def set_prob_floor(setsize: int, d: int, jmax: float) -> float:
    """Floor on P(x_S) for any assignment of a setsize-node set in a
    bounded-degree model: 2**-|S| * exp(-2 (|S| + d) |S| jmax)."""
    if setsize < 1:
        raise ValueError("setsize must be at least 1")
    return 2.0 ** (-setsize) * math.exp(-2.0 * (setsize + d) * setsize * jmax)


def ferro_epsilons(d: int, jmin: float, jmax: float) -> tuple[float, float]:
    """Decision and screening thresholds for zero-field ferromagnetic models.

    epsilon covers conditioning sets up to size d, whose neighborhoods hold at
    most d**2 nodes; epsilon_prime is the unconditioned pairwise floor and
    depends on jmin alone.
    """
    shrink = (1.0 - math.exp(-4.0 * jmin)) / 16.0
    return shrink * math.exp(-4.0 * d * d * jmax), shrink


def random_graph_params(p: int, c: float, jmax: float, k: float) -> tuple[float, float, float]:
    """Decay constants for sparse random graphs with average degree c.

    Returns (alpha, gamma_p, kappa): the decay rate c * tanh(jmax), the hop
    radius beyond which correlations are negligible, and the polynomial rate
    at which they vanish past that radius.
    """
    if c <= 1:
        raise ValueError("average degree must exceed 1")
    if not 3.0 < k < 4.0:
        raise ValueError("k must lie strictly between 3 and 4")
    alpha = c * math.tanh(jmax)
    if alpha >= 1.0:
        raise ValueError("outside the decay regime: c * tanh(jmax) >= 1")
    gamma_p = math.log(p) / (k * math.log(c))
    kappa = math.log(1.0 / alpha) / (4.0 * math.log(c))
    return alpha, gamma_p, kappa


def concentration_sample_size(
    gamma: float, p: int, alphabet: int = 2, alpha_conf: float = 1.0
) -> float:
    """Threshold above which every empirical pairwise conditional P(x_i | x_j)
    lands within 4 * gamma of the truth simultaneously, with probability
    1 - const / p**alpha_conf. Valid for gamma <= 1/4."""
    if not 0.0 < gamma <= 0.25:
        raise ValueError("gamma must lie in (0, 1/4]")
    return 2.0 * ((2.0 + alpha_conf) * math.log(p) + 2.0 * math.log(alphabet)) / gamma**2


def sample_size(regime: str, params: ModelParams) -> tuple[float, float]:
    """Sample-size threshold (gamma, n_min) for the named parameter regime.

    n_min is the raw display value: any integer n > n_min carries the
    high-probability recovery guarantee. Natural logs throughout.

    bdd_general: bounded degree, probability test over the full search space.
    bdd_girth:   bounded degree plus large girth, screened probability test.
    random_mi:   sparse random graph, information test; epsilon is caller-set
                 since the guarantee only asserts a suitable constant exists.
    ferro_bdd:   ferromagnetic bounded degree, screened probability test.
    ferro_random: ferromagnetic sparse random graph, screened information
                 test; epsilon caller-set as above.
    """
    a = params.alpha_conf
    if regime == "bdd_general":
        params.require("d", "jmin", "jmax", "p")
        eps = bdd_epsilon(params.jmin, params.jmax)
        delta = bdd_delta(params.d, params.jmax)
        gamma = min(eps * delta / 16.0, delta / 2.0)
        d = params.d
        n_min = 2.0 * ((2 * d + 1 + a) * math.log(params.p) + (2 * d + 1) * LN2) / gamma**2
        return gamma, n_min
    if regime == "bdd_girth":
        params.require("d", "jmin", "jmax", "p")
        _, eps, eps_pair, _ = girth_constants(params.d, params.jmin, params.jmax)
        delta = bdd_delta(params.d, params.jmax)
        gamma = min(eps_pair / 32.0, eps * delta / 16.0, delta / 2.0)
        beta, alpha = decay_params(params.d, params.jmax)
        # Hop radius beyond which the pairwise statistic drops under eps_pair/4.
        reach = math.log(4.0 * beta / eps_pair) / math.log(1.0 / alpha)
        n_min = (
            2.0
            * ((2.0 + a) * math.log(params.p) + 2.0 * reach * math.log(params.d) + 3.0 * LN2)
            / gamma**2
        )
        return gamma, n_min
    if regime == "random_mi":
        params.require("p", "epsilon")
        gamma = min((params.epsilon / 32.0**2) ** 2, 1.0 / 64.0)
        n_min = 2.0 * ((5.0 + a) * math.log(params.p) + 5.0 * LN2) / gamma**2
        return gamma, n_min
    if regime == "ferro_bdd":
        params.require("d", "jmin", "jmax", "p")
        eps, eps_pair = ferro_epsilons(params.d, params.jmin, params.jmax)
        delta = bdd_delta(params.d, params.jmax)
        gamma = min(eps_pair / 32.0, eps * delta / 16.0, delta / 2.0)
        big_l = params.big_l if params.big_l is not None else params.p
        d = params.d
        n_min = (
            2.0
            * ((1.0 + a) * math.log(params.p) + (d + 1) * math.log(big_l) + (d + 2) * LN2)
            / gamma**2
        )
        return gamma, n_min
    if regime == "ferro_random":
        params.require("jmin", "p", "epsilon")
        eps_pair = (1.0 - math.exp(-4.0 * params.jmin)) / 16.0
        gamma = min(eps_pair / 32.0, (params.epsilon / 512.0) ** 2, 1.0 / 32.0)
        big_l = params.big_l if params.big_l is not None else params.p
        n_min = (
            2.0 * ((2.0 + a) * math.log(params.p) + 3.0 * math.log(big_l) + 5.0 * LN2) / gamma**2
        )
        return gamma, n_min
    raise ValueError(f"unknown regime {regime!r}; expected one of {', '.join(REGIMES)}")
