"""Self-avoiding-walk trees with fixed cycle-closing leaves.

A pairwise binary model on a loopy graph has the same conditional marginal at
a node i as a tree model built from all self-avoiding walks out of i, provided
each walk that closes a cycle ends in an extra leaf pinned to +1 or -1. The
pinning rule compares, at the revisited node, the edge that closed the cycle
against the edge the cycle left through, under a fixed node ordering.

This module builds such trees, evaluates exact conditionals on them by
leaf-to-root elimination, and cross-checks the identity against brute-force
enumeration on the original graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .graph import Graph
from .model import IsingModel, ZeroConditionError, exact_joint

NODE_BUDGET = 10**6


@dataclass
class SawTree:
    """Tree of self-avoiding walks, stored as parallel per-node lists.

    Node 0 is the root. graph_node maps tree nodes back to graph nodes;
    coupling[v] is the edge weight between v and its parent (0.0 at the root).
    Terminal nodes carry fixed[v] in {-1, +1}; elsewhere fixed[v] = 0.
    """

    root_graph_node: int
    depth_cap: Optional[int]
    graph_node: list[int] = field(default_factory=list)
    parent: list[int] = field(default_factory=list)
    children: list[list[int]] = field(default_factory=list)
    coupling: list[float] = field(default_factory=list)
    node_field: list[float] = field(default_factory=list)
    fixed: list[int] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.graph_node)

    @property
    def terminals(self) -> list[int]:
        return [v for v in range(len(self)) if self.fixed[v] != 0]

    def _add(self, gnode: int, parent: int, coupling: float, h: float, fixed: int) -> int:
        v = len(self.graph_node)
        self.graph_node.append(gnode)
        self.parent.append(parent)
        self.children.append([])
        self.coupling.append(coupling)
        self.node_field.append(h)
        self.fixed.append(fixed)
        self.depth.append(0 if parent < 0 else self.depth[parent] + 1)
        if parent >= 0:
            self.children[parent].append(v)
        return v


def build_saw_tree(
    g: Graph,
    m: IsingModel,
    root: int,
    ordering: Optional[Sequence[int]] = None,
    depth_cap: Optional[int] = None,
    node_budget: int = NODE_BUDGET,
) -> SawTree:
    """Expand every self-avoiding walk out of `root` into a tree.

    A walk extends along any neighbor except the node it just came from.
    Reaching some earlier walk node t closes a cycle and adds a pinned leaf
    copy of t: +1 when the closing edge (t, last walk node) comes after the
    edge the cycle originally left t through, per `ordering` (default
    0..p-1), else -1.

    depth_cap prunes expansion below that depth; it must be given for p > 10
    since the tree grows exponentially. Raises RuntimeError past node_budget.
    """
    if g.p != m.graph.p:
        raise ValueError("graph and model disagree on node count")
    if depth_cap is None and g.p > 10:
        raise ValueError("depth_cap is required for p > 10")
    order = tuple(range(g.p)) if ordering is None else tuple(ordering)
    if sorted(order) != list(range(g.p)):
        raise ValueError("ordering must be a permutation of all nodes")
    pos = {node: idx for idx, node in enumerate(order)}

    tree = SawTree(root_graph_node=root, depth_cap=depth_cap)
    tree._add(root, -1, 0.0, m.fields[root], 0)
    stack = [0]
    while stack:
        v = stack.pop()
        if depth_cap is not None and tree.depth[v] >= depth_cap:
            continue
        # Recover the walk (graph nodes root..v) by chasing parent links.
        walk = []
        u = v
        while u >= 0:
            walk.append(tree.graph_node[u])
            u = tree.parent[u]
        walk.reverse()
        on_walk = {gn: idx for idx, gn in enumerate(walk)}
        came_from = walk[-2] if len(walk) > 1 else None
        here = tree.graph_node[v]
        for nb in sorted(g.neighbors(here)):
            if nb == came_from:
                continue
            j_edge = m.coupling(here, nb)
            if nb in on_walk:
                # Cycle closed at nb: pin the leaf by comparing, at nb, the
                # closing edge (nb, here) against the edge the cycle left
                # through, (nb, successor-on-walk).
                successor = walk[on_walk[nb] + 1]
                pinned = 1 if pos[here] > pos[successor] else -1
                tree._add(nb, v, j_edge, 0.0, pinned)
            else:
                child = tree._add(nb, v, j_edge, m.fields[nb], 0)
                stack.append(child)
            if len(tree) > node_budget:
                raise RuntimeError(f"self-avoiding-walk tree exceeds {node_budget} nodes")
    return tree


def reduce_leaf(j12: float, h2: float) -> float:
    """Field induced on a node when a leaf neighbor is summed out.

    Marginalizing spin 2 with field h2 over edge coupling j12 leaves spin 1
    with the extra field returned here; its magnitude never exceeds
    |h2| * tanh|j12|.
    """
    return 0.5 * (np.logaddexp(j12 + h2, -j12 - h2) - np.logaddexp(h2 - j12, j12 - h2))


def tree_cond_prob(tree: SawTree, root_value: int, conditioning: Optional[dict] = None) -> float:
    """Exact P(root spin = root_value | pinned leaves, conditioned copies).

    `conditioning` maps graph node ids to spin values; every non-terminal
    copy of such a node is clamped to that value (pinned leaves keep their
    built-in values). Evaluation is one bottom-up elimination pass in log
    space, so deep trees cannot overflow.
    """
    if root_value not in (-1, 1):
        raise ValueError("root_value must be -1 or +1")
    conditioning = dict(conditioning or {})
    if tree.root_graph_node in conditioning:
        raise ValueError("cannot condition on the root itself")
    for val in conditioning.values():
        if val not in (-1, 1):
            raise ValueError("conditioning values must be -1 or +1")

    n = len(tree)
    # log-weights of each node's subtree given the node's own spin (+1 / -1)
    lw_plus = np.zeros(n)
    lw_minus = np.zeros(n)
    # Children precede parents in reverse creation order only within a branch,
    # so process nodes in explicit post-order.
    order: list[int] = []
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(tree.children[v])
    for v in reversed(order):
        fixed = tree.fixed[v]
        if fixed == 0:
            fixed = conditioning.get(tree.graph_node[v], 0)
        h = tree.node_field[v]
        up, um = h, -h
        for c in tree.children[v]:
            j = tree.coupling[c]
            up += np.logaddexp(j + lw_plus[c], -j + lw_minus[c])
            um += np.logaddexp(-j + lw_plus[c], j + lw_minus[c])
        if fixed == 1:
            um = -np.inf
        elif fixed == -1:
            up = -np.inf
        lw_plus[v], lw_minus[v] = up, um

    gap = lw_plus[0] - lw_minus[0]
    p_plus = 1.0 / (1.0 + np.exp(-gap))
    return float(p_plus if root_value == 1 else 1.0 - p_plus)


def verify_saw_identity(
    g: Graph,
    m: IsingModel,
    root: int,
    s_nodes: Sequence[int],
    trials: int = 16,
    ordering: Optional[Sequence[int]] = None,
    seed: int = 0,
) -> float:
    """Largest gap between graph-side and tree-side root conditionals.

    Compares P(x_root | x_S) computed by brute-force enumeration on the graph
    against the same conditional on the full-depth walk tree, over both root
    spins and (up to `trials`) assignments of S. Zero-probability
    conditionings are skipped. Needs p small enough to enumerate exactly.
    """
    s_nodes = tuple(sorted(set(s_nodes)))
    if root in s_nodes:
        raise ValueError("root cannot be in the conditioning set")
    joint = exact_joint(m)
    tree = build_saw_tree(g, m, root, ordering=ordering)

    if 2 ** len(s_nodes) <= trials:
        assignments = list(itertools.product((-1, 1), repeat=len(s_nodes)))
    else:
        rng = np.random.default_rng(seed)
        draws = rng.integers(0, 2, size=(trials, len(s_nodes))) * 2 - 1
        assignments = [tuple(int(v) for v in row) for row in draws]

    worst = 0.0
    for values in assignments:
        given = dict(zip(s_nodes, values))
        for x_root in (-1, 1):
            try:
                graph_side = joint.cond_prob(root, x_root, given)
            except ZeroConditionError:
                continue
            tree_side = tree_cond_prob(tree, x_root, given)
            worst = max(worst, abs(graph_side - tree_side))
    return worst
