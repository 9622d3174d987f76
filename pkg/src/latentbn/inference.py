"""Exact inference by enumeration over joint latent configurations.

Latent configurations are enumerated in mixed-radix order with the
lowest-id latent variable as the most significant digit.  Scalar queries
accumulate with :func:`math.fsum`; the batched routines used by the
likelihood and EM code sum along the latent axis with numpy's pairwise
summation.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

import numpy as np

from .model import Network, column_index

MAX_STATES = 10**6


class ZeroProbabilityError(ValueError):
    """Evidence (or a conditioning context) has probability zero."""


class SizeCapError(ValueError):
    """An enumeration would exceed the configured state-space cap."""


def _space(cards: Sequence[int], cap: int = MAX_STATES) -> np.ndarray:
    size = math.prod(cards)
    if size > cap:
        raise SizeCapError(f"state space of size {size} exceeds cap {cap}")
    if not cards:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(*(range(c) for c in cards))), dtype=np.int64)


def latent_configurations(net: Network, cap: int = MAX_STATES) -> np.ndarray:
    return _space([net.cards[y] for y in net.latent], cap)


def manifest_states(net: Network, cap: int = MAX_STATES) -> np.ndarray:
    """All complete manifest states, ascending id order, last manifest variable fastest."""
    return _space([net.cards[z] for z in net.manifest], cap)


def _factor(net: Network, v: int, full: np.ndarray) -> np.ndarray:
    cpt = net.cpts[v]
    cols = column_index(full[..., list(cpt.parents)], [net.cards[p] for p in cpt.parents])
    return cpt.prob(full[..., v], cols)


def joint_prob(net: Network, a: Mapping[int, int]) -> float:
    """Product of CPT entries for a complete assignment."""
    missing = [net.name_of(v) for v in range(len(net)) if v not in a]
    if missing:
        raise ValueError(f"incomplete assignment, missing {missing}")
    full = np.array([a[v] for v in range(len(net))], dtype=np.int64)
    return math.prod(float(_factor(net, v, full)) for v in range(len(net)))


def full_assignments(net: Network, states: np.ndarray, latent: np.ndarray | None = None) -> np.ndarray:
    """R x L x n array pairing every manifest record with every latent configuration."""
    if latent is None:
        latent = latent_configurations(net)
    states = np.asarray(states, dtype=np.int64).reshape(-1, len(net.manifest))
    R, L = states.shape[0], latent.shape[0]
    full = np.empty((R, L, len(net)), dtype=np.int64)
    full[:, :, list(net.latent)] = latent[None, :, :]
    full[:, :, list(net.manifest)] = states[:, None, :]
    return full


def joint_table(net: Network, states: np.ndarray, latent: np.ndarray | None = None) -> np.ndarray:
    """R x L matrix of P(y, z) for every manifest record z and latent configuration y."""
    full = full_assignments(net, states, latent)
    out = np.ones(full.shape[:2])
    for v in range(len(net)):
        out *= _factor(net, v, full)
    return out


def marginals(net: Network, states: np.ndarray) -> np.ndarray:
    """P(z) for each row of ``states`` (columns in ascending manifest id order)."""
    return joint_table(net, states).sum(axis=1)


def manifest_distribution(net: Network, cap: int = MAX_STATES) -> np.ndarray:
    """Full table of P(Z), one axis per manifest variable in ascending id order."""
    states = manifest_states(net, cap)
    cards = [net.cards[z] for z in net.manifest]
    return marginals(net, states).reshape(cards)


def _manifest_vector(net: Network, z: Mapping[int, int]) -> np.ndarray:
    missing = [net.name_of(v) for v in net.manifest if v not in z]
    if missing:
        raise ValueError(f"incomplete manifest assignment, missing {missing}")
    return np.array([z[v] for v in net.manifest], dtype=np.int64)


def marginal_manifest(net: Network, z: Mapping[int, int]) -> float:
    """P(z): the joint summed over every latent configuration (compensated sum)."""
    row = _manifest_vector(net, z)
    return math.fsum(joint_table(net, row[None, :])[0])


def conditional_manifest(net: Network, target: tuple[int, int], context: Mapping[int, int]) -> float:
    """P(target | context) over manifest variables, by summing marginals over completions."""
    var, state = target
    manifest = list(net.manifest)
    fixed = dict(context)
    if var in fixed and fixed[var] != state:
        return 0.0
    free = [v for v in manifest if v not in fixed and v != var]
    free_space = _space([net.cards[v] for v in free])
    base = np.empty((free_space.shape[0], len(manifest)), dtype=np.int64)
    for v, s in fixed.items():
        base[:, manifest.index(v)] = s
    base[:, [manifest.index(v) for v in free]] = free_space
    p_context_parts = []
    p_joint = 0.0
    for s in range(net.cards[var]):
        rows = base.copy()
        rows[:, manifest.index(var)] = s
        p = math.fsum(marginals(net, rows))
        p_context_parts.append(p)
        if s == state:
            p_joint = p
    p_context = math.fsum(p_context_parts)
    if p_context == 0.0:
        raise ZeroProbabilityError(f"context {fixed} has probability zero")
    return p_joint / p_context


def posterior_latents(net: Network, z: Mapping[int, int]) -> np.ndarray:
    """P(y | z) over latent configurations, in :func:`latent_configurations` order."""
    row = _manifest_vector(net, z)
    joint = joint_table(net, row[None, :])[0]
    total = math.fsum(joint)
    if total == 0.0:
        raise ZeroProbabilityError(f"manifest evidence {dict(z)} has probability zero")
    return joint / total
