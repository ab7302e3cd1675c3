"""Hierarchical cut trees built by repeated spectral bisection.

Each cut selects one eligible leaf (most vertices or largest volume within
its induced subgraph), bisects it, and replaces it by two children. K cuts
always yield K+1 leaves that partition the asset universe.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import InvalidInputError, PortfolioCutError
from .market_graph import MarketGraph, market_graph_from_weights
from .spectral import CutObjective, spectral_bisect

__all__ = [
    "LeafSelection",
    "CutPolicy",
    "CutTreeNode",
    "CutTree",
    "build_cut_tree",
    "select_leaf",
    "induced_subgraph",
    "leaf_edge_budget",
    "edge_budget_trace",
]


class LeafSelection(Enum):
    MOST_VERTICES = "vertices"
    LARGEST_VOLUME = "volume"


@dataclass(frozen=True)
class CutPolicy:
    """Controls how many cuts run and which leaf is cut next.

    ``max_cuts`` bounds the number of executed cuts. When
    ``lambda2_threshold`` is set, a candidate leaf whose lambda2 exceeds the
    threshold is marked ineligible instead of cut (well-connected clusters
    stay whole). ``min_leaf_size`` keeps every produced leaf at or above the
    given size; the default of 2 forbids singleton leaves.
    """

    max_cuts: int
    lambda2_threshold: Optional[float] = None
    leaf_selection: LeafSelection = LeafSelection.MOST_VERTICES
    min_leaf_size: int = 2

    def __post_init__(self):
        if self.max_cuts < 0:
            raise InvalidInputError("max_cuts must be >= 0")
        if self.lambda2_threshold is not None and not self.lambda2_threshold > 0:
            raise InvalidInputError("lambda2_threshold must be positive when set")
        if self.min_leaf_size < 1:
            raise InvalidInputError("min_leaf_size must be >= 1")


@dataclass
class CutTreeNode:
    """One node of a cut tree; members index into the root graph."""

    id: int
    members: Tuple[int, ...]
    depth: int
    lambda2_at_split: Optional[float] = None
    children: Tuple[int, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class CutTree:
    """Binary tree of repeated portfolio cuts.

    ``leaf_ids`` keeps dendrogram order: a split leaf is replaced in place by
    its two children. Trees are built once and treated as immutable afterwards.
    """

    nodes: Dict[int, CutTreeNode]
    root_id: int
    k_performed: int
    objective: CutObjective
    leaf_ids: List[int]
    asset_ids: Tuple[str, ...] = ()

    def node(self, node_id: int) -> CutTreeNode:
        return self.nodes[node_id]

    def leaves(self) -> List[CutTreeNode]:
        return [self.nodes[i] for i in self.leaf_ids]

    @property
    def n_assets(self) -> int:
        return len(self.nodes[self.root_id].members)


def induced_subgraph(graph: MarketGraph, members) -> MarketGraph:
    """Restriction of the graph to ``members``, with degrees recomputed.

    Degrees and the Laplacian come from the weight submatrix, not the parent
    graph, so edges severed by earlier cuts do not count.
    """
    idx = np.asarray(members, dtype=int)
    if idx.size == 0:
        raise InvalidInputError("members must be nonempty")
    if len(np.unique(idx)) != idx.size:
        raise InvalidInputError("members must be unique")
    if idx.min() < 0 or idx.max() >= graph.n_vertices:
        raise InvalidInputError(
            f"members out of range for a graph with {graph.n_vertices} vertices"
        )
    sub_w = graph.weights[np.ix_(idx, idx)]
    ids = tuple(graph.asset_ids[i] for i in idx)
    return market_graph_from_weights(sub_w, asset_ids=ids)


def select_leaf(tree: CutTree, graph: MarketGraph, policy: CutPolicy,
                exclude=frozenset()) -> Optional[int]:
    """Next leaf to cut under the policy, or None if no leaf is eligible.

    A leaf is eligible when it holds at least ``2 * min_leaf_size`` members
    and is not in ``exclude`` (the builder passes leaves already rejected by
    the lambda2 threshold). Ties break toward the leaf containing the
    smallest asset index.
    """
    best_id = None
    best_key = None
    for leaf_id in tree.leaf_ids:
        if leaf_id in exclude:
            continue
        node = tree.nodes[leaf_id]
        if node.size < 2 * policy.min_leaf_size:
            continue
        if policy.leaf_selection is LeafSelection.MOST_VERTICES:
            score = float(node.size)
        else:
            score = induced_subgraph(graph, node.members).total_volume
        key = (-score, min(node.members))
        if best_key is None or key < best_key:
            best_key = key
            best_id = leaf_id
    return best_id


def build_cut_tree(graph: MarketGraph, policy: CutPolicy,
                   objective: CutObjective = CutObjective.NORMALIZED) -> CutTree:
    """Grow a cut tree by repeated spectral bisection.

    Stops when ``policy.max_cuts`` cuts have run, when every remaining leaf
    is too small, or when the lambda2 threshold has marked every candidate
    ineligible. A candidate whose split would produce a child below
    ``min_leaf_size`` is likewise marked ineligible rather than split.

    Raises
    ------
    InvalidInputError
        For graphs with fewer than 2 vertices.
    PortfolioCutError subclasses
        Propagated from the spectral machinery, annotated with the leaf
        whose cut failed.
    """
    n = graph.n_vertices
    if n < 2:
        raise InvalidInputError("cut tree needs a graph with at least 2 vertices")

    root = CutTreeNode(id=0, members=tuple(range(n)), depth=0)
    tree = CutTree(
        nodes={0: root},
        root_id=0,
        k_performed=0,
        objective=objective,
        leaf_ids=[0],
        asset_ids=graph.asset_ids,
    )
    ineligible: set = set()
    next_id = 1

    while tree.k_performed < policy.max_cuts:
        leaf_id = select_leaf(tree, graph, policy, exclude=ineligible)
        if leaf_id is None:
            break
        leaf = tree.nodes[leaf_id]
        sub = induced_subgraph(graph, leaf.members)
        try:
            part = spectral_bisect(sub, objective)
        except PortfolioCutError as exc:
            raise type(exc)(
                f"failed to cut leaf {leaf_id} (members {list(leaf.members)}): {exc}"
            ) from exc
        if (policy.lambda2_threshold is not None
                and part.lambda2 > policy.lambda2_threshold):
            ineligible.add(leaf_id)
            continue
        members = np.asarray(leaf.members)
        left = tuple(int(m) for m in members[part.side_of == 1])
        right = tuple(int(m) for m in members[part.side_of == 2])
        if min(len(left), len(right)) < policy.min_leaf_size:
            ineligible.add(leaf_id)
            continue

        child_left = CutTreeNode(id=next_id, members=left, depth=leaf.depth + 1)
        child_right = CutTreeNode(id=next_id + 1, members=right, depth=leaf.depth + 1)
        next_id += 2
        tree.nodes[child_left.id] = child_left
        tree.nodes[child_right.id] = child_right
        leaf.children = (child_left.id, child_right.id)
        leaf.lambda2_at_split = part.lambda2
        pos = tree.leaf_ids.index(leaf_id)
        tree.leaf_ids[pos:pos + 1] = [child_left.id, child_right.id]
        tree.k_performed += 1

    return tree


def leaf_edge_budget(tree: CutTree) -> int:
    """Sum over leaves of N_i (N_i + 1) / 2, the dense-model edge count."""
    return sum(node.size * (node.size + 1) // 2 for node in tree.leaves())


def edge_budget_trace(tree: CutTree) -> List[int]:
    """Edge budget after 0, 1, ..., k_performed cuts.

    Children receive consecutive ids at split time, so replaying internal
    nodes ordered by their first child id reconstructs the build sequence.
    """
    internal = sorted(
        (node for node in tree.nodes.values() if not node.is_leaf),
        key=lambda node: node.children[0],
    )
    sizes = {tree.root_id: tree.nodes[tree.root_id].size}

    def budget() -> int:
        return sum(s * (s + 1) // 2 for s in sizes.values())

    trace = [budget()]
    for node in internal:
        del sizes[node.id]
        for child in node.children:
            sizes[child] = tree.nodes[child].size
        trace.append(budget())
    return trace
