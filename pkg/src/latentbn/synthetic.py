"""Random latent-root networks and datasets drawn from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graph, inference
from .model import LATENT, MANIFEST, Cpt, Network, Variable, WeightedDataset, column_index


@dataclass(frozen=True)
class GeneratorSpec:
    n_roots: int = 2
    n_internal: int = 3
    max_parents: int = 2
    max_cardinality: int = 2
    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_roots < 1 or self.n_internal < 1:
            raise ValueError("need at least one root and one internal variable")
        if self.max_parents < 1 or self.max_cardinality < 2 or self.alpha <= 0:
            raise ValueError("max_parents >= 1, max_cardinality >= 2 and alpha > 0 required")


def random_network(spec: GeneratorSpec, rng: np.random.Generator | None = None) -> Network:
    """Roots first in creation order, internal nodes drawing 1..max_parents earlier nodes.

    Ids are shuffled afterwards so nothing downstream can lean on roots
    having the smallest ids.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n = spec.n_roots + spec.n_internal
    cards = rng.integers(2, spec.max_cardinality + 1, size=n)
    parents: list[tuple[int, ...]] = [() for _ in range(spec.n_roots)]
    for i in range(spec.n_roots, n):
        k = int(rng.integers(1, min(spec.max_parents, i) + 1))
        parents.append(tuple(sorted(int(p) for p in rng.choice(i, size=k, replace=False))))
    perm = rng.permutation(n)  # creation index -> id
    inv = np.argsort(perm)
    variables, cpts = [], []
    for vid in range(n):
        i = int(inv[vid])
        is_root = i < spec.n_roots
        name = f"Y{i}" if is_root else f"Z{i - spec.n_roots}"
        variables.append(Variable(vid, name, int(cards[i]), LATENT if is_root else MANIFEST))
        pa = tuple(int(perm[p]) for p in parents[i])
        ncols = int(np.prod([cards[p] for p in parents[i]])) if pa else 1
        table = rng.dirichlet(np.full(int(cards[i]), spec.alpha), size=ncols).T
        cpts.append(Cpt(vid, pa, table))
    return Network(variables, cpts)


def forward_sample(net: Network, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` complete joint samples, one column per variable id."""
    out = np.zeros((n, len(net)), dtype=np.int64)
    for v in graph.topological_order(net):
        cpt = net.cpts[v]
        cols = column_index(out[:, list(cpt.parents)], [net.cards[p] for p in cpt.parents])
        cdf = np.cumsum(cpt.table[:, cols], axis=0)
        draws = rng.random(n)
        out[:, v] = np.minimum((draws[None, :] >= cdf).sum(axis=0), net.cards[v] - 1)
    return out


def sample_dataset(net: Network, n: int, rng: np.random.Generator) -> WeightedDataset:
    """Forward samples projected on the manifest variables, aggregated to integer weights."""
    manifest = list(net.manifest)
    rows = forward_sample(net, n, rng)[:, manifest]
    keys, counts = np.unique(rows, axis=0, return_counts=True)
    return WeightedDataset(manifest, {tuple(k): float(c) for k, c in zip(keys.tolist(), counts)})


def exact_weights_dataset(net: Network, total: float = 1.0, cap: int = inference.MAX_STATES) -> WeightedDataset:
    """n(z) = total * P(z) over the whole manifest space."""
    states = inference.manifest_states(net, cap)
    p = inference.marginals(net, states)
    return WeightedDataset(
        net.manifest, {tuple(s): total * float(w) for s, w in zip(states.tolist(), p)}
    )


def random_weights_dataset(
    net: Network, rng: np.random.Generator, n_records: int | None = None, total: float = 100.0
) -> WeightedDataset:
    """Arbitrary positive weights on a random subset of manifest states."""
    states = inference.manifest_states(net)
    if n_records is None:
        n_records = int(rng.integers(1, len(states) + 1))
    pick = rng.choice(len(states), size=min(n_records, len(states)), replace=False)
    w = rng.dirichlet(np.ones(len(pick))) * total
    return WeightedDataset(net.manifest, {tuple(states[i]): float(x) for i, x in zip(pick.tolist(), w)})
