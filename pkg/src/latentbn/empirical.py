"""The empirical network over the manifest variables and the likelihood ceiling."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import graph
from .model import Network, WeightedDataset, column_index, total_weight


class UnobservedContextWarning(UserWarning):
    """A queried context had zero weight in the data; a uniform vector was used."""


@dataclass(frozen=True)
class EmpiricalStructure:
    manifest: tuple[int, ...]
    cards: Mapping[int, int]
    parents: Mapping[int, tuple[int, ...]]
    names: Mapping[int, str]

    def n_columns(self, z: int) -> int:
        return math.prod(self.cards[w] for w in self.parents[z])

    def columns(self, z: int, states: np.ndarray) -> np.ndarray:
        """Context column for each row of ``states`` (columns ordered like ``manifest``)."""
        pos = [self.manifest.index(w) for w in self.parents[z]]
        return column_index(states[:, pos], [self.cards[w] for w in self.parents[z]])


def empirical_structure(net: Network) -> EmpiricalStructure:
    manifest = net.manifest
    return EmpiricalStructure(
        manifest=manifest,
        cards={z: net.cards[z] for z in manifest},
        parents=graph.empirical_structure(net),
        names={z: net.name_of(z) for z in manifest},
    )


@dataclass(frozen=True)
class EmpiricalNet:
    """Frequency parameters ``params[z][state, context]`` over the empirical structure."""

    structure: EmpiricalStructure
    params: Mapping[int, np.ndarray]
    observed: Mapping[int, np.ndarray]

    def with_params(self, params: Mapping[int, np.ndarray]) -> "EmpiricalNet":
        return EmpiricalNet(self.structure, dict(params), self.observed)


def _aligned(structure: EmpiricalStructure, d: WeightedDataset):
    if tuple(sorted(d.manifest_order)) != tuple(structure.manifest):
        raise ValueError("dataset columns do not match the manifest variables")
    states, weights = d.arrays()
    perm = [d.manifest_order.index(v) for v in structure.manifest]
    return states[:, perm], weights


def family_counts(structure: EmpiricalStructure, d: WeightedDataset) -> dict[int, np.ndarray]:
    """n(z, w_Z) as a (states x contexts) array for each manifest Z."""
    states, weights = _aligned(structure, d)
    out = {}
    for k, z in enumerate(structure.manifest):
        counts = np.zeros((structure.cards[z], structure.n_columns(z)))
        np.add.at(counts, (states[:, k], structure.columns(z, states)), weights)
        out[z] = counts
    return out


def fit_empirical(structure: EmpiricalStructure, d: WeightedDataset) -> EmpiricalNet:
    """Frequency estimates n(z, w)/n(w); zero-weight contexts are flagged and set uniform."""
    if total_weight(d) <= 0:
        raise ValueError("cannot fit an empirical network on an empty dataset")
    params, observed = {}, {}
    for z, counts in family_counts(structure, d).items():
        totals = counts.sum(axis=0)
        seen = totals > 0
        theta = np.full(counts.shape, 1.0 / counts.shape[0])
        theta[:, seen] = counts[:, seen] / totals[seen]
        params[z], observed[z] = theta, seen
    return EmpiricalNet(structure, params, observed)


def multinomial_log_likelihood(e: EmpiricalNet, d: WeightedDataset) -> float:
    """sum_z n(z) sum_Z log theta_{z|w_Z}; records of zero weight contribute nothing."""
    states, weights = _aligned(e.structure, d)
    per_record = np.zeros(len(weights))
    for k, z in enumerate(e.structure.manifest):
        with np.errstate(divide="ignore"):
            per_record += np.log(e.params[z][states[:, k], e.structure.columns(z, states)])
    return math.fsum(weights * per_record)


def lambda_star(e: EmpiricalNet, d: WeightedDataset) -> float:
    """Global maximum of the multinomial log-likelihood, attained at the fitted frequencies."""
    value = multinomial_log_likelihood(e, d)
    assert value > -math.inf, "fitted frequencies vanish on a supported record"
    return value


def lambda_star_from_counts(structure: EmpiricalStructure, d: WeightedDataset) -> float:
    """Same ceiling written as sum n(z,w) log(n(z,w)/n(w)) with 0 log 0 = 0."""
    terms = []
    for counts in family_counts(structure, d).values():
        totals = counts.sum(axis=0)
        nz = counts > 0
        ratio = counts[nz] / np.broadcast_to(totals, counts.shape)[nz]
        terms.extend((counts[nz] * np.log(ratio)).tolist())
    return math.fsum(terms)


def empirical_log_joint(e: EmpiricalNet, z: Mapping[int, int] | tuple[int, ...]) -> float:
    """log of the empirical network's probability of a complete manifest state."""
    s = e.structure
    if isinstance(z, Mapping):
        row = np.array([[z[v] for v in s.manifest]], dtype=np.int64)
    else:
        row = np.array([z], dtype=np.int64)
    logs = []
    for k, v in enumerate(s.manifest):
        col = int(s.columns(v, row)[0])
        if not e.observed[v][col]:
            warnings.warn(
                f"context {col} of {s.names[v]} is unobserved; uniform parameters used",
                UnobservedContextWarning,
                stacklevel=2,
            )
        p = e.params[v][row[0, k], col]
        logs.append(math.log(p) if p > 0 else -math.inf)
    return sum(logs)
