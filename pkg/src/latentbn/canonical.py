"""Rewrite a network so every internal CPT is deterministic.

Each internal variable Z gets a fresh latent root U_Z as its last parent.
A state u of U_Z encodes a whole function from parent configurations to
states of Z, written as a big-endian base-|Z| number whose most
significant digit belongs to the first parent configuration.  The prior
on U_Z is the product of the original CPT columns, and Z's new CPT just
reads off digit ``pa`` of ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import inference
from .likelihood import log_likelihood
from .model import (
    LATENT,
    Cpt,
    DeterministicCpt,
    Network,
    Variable,
    WeightedDataset,
    require_valid,
)

DEFAULT_SIZE_CAP = 2**20
ENCODING = "mixed-radix-big-endian"


class CanonicalSizeError(ValueError):
    """The auxiliary variable for some family would be too large."""

    def __init__(self, variable: str, required: int, cap: int):
        self.variable = variable
        self.required = required
        self.cap = cap
        super().__init__(f"auxiliary root for {variable} needs {required} states, cap is {cap}")


@dataclass(frozen=True)
class AuxEncoding:
    n_states: int  # |Z|
    n_configs: int  # number of parent configurations

    @property
    def size(self) -> int:
        return self.n_states**self.n_configs

    def decode(self, u: int, pa: int) -> int:
        if not 0 <= u < self.size:
            raise ValueError(f"u={u} out of range [0, {self.size})")
        if not 0 <= pa < self.n_configs:
            raise ValueError(f"parent configuration {pa} out of range [0, {self.n_configs})")
        return (u // self.n_states ** (self.n_configs - 1 - pa)) % self.n_states

    def decode_all(self, u: int) -> tuple[int, ...]:
        return tuple(self.decode(u, pa) for pa in range(self.n_configs))

    def encode(self, function) -> int:
        u = 0
        for z in function:
            u = u * self.n_states + int(z)
        return u

    def table(self) -> np.ndarray:
        """``table[u, pa]`` = decoded state, for every u (vectorised decode)."""
        u = np.arange(self.size, dtype=np.int64)[:, None]
        powers = self.n_states ** np.arange(self.n_configs - 1, -1, -1, dtype=np.int64)
        return (u // powers[None, :]) % self.n_states


def decode_u(enc: AuxEncoding, u: int, pa: int) -> int:
    return enc.decode(u, pa)


def aux_prior(cpt: Cpt) -> np.ndarray:
    """P(U = u) = prod_pa P(Z = u^-1[pa] | pa), first configuration most significant."""
    prior = np.ones(1)
    for col in range(cpt.n_columns):
        prior = np.outer(prior, cpt.column(col)).ravel()
    return prior


@dataclass(frozen=True, eq=False)
class CanonicalNet:
    """The rewritten network plus bookkeeping back to the original."""

    base: Network
    network: Network
    aux_of: Mapping[int, int]  # internal Z -> id of U_Z
    encodings: Mapping[int, AuxEncoding]

    def prior(self, z: int) -> np.ndarray:
        return self.network.cpts[self.aux_of[z]].table[:, 0]

    @classmethod
    def from_network(cls, network: Network) -> "CanonicalNet":
        """Rebuild from a network carrying auxiliary-root annotations."""
        aux_of = {v.aux_for: v.id for v in network.variables if v.aux_for is not None}
        keep = [v for v in network.variables if v.aux_for is None]
        encodings, cpts = {}, []
        for v in keep:
            cpt = network.cpts[v.id]
            if v.id not in aux_of:
                cpts.append(cpt)
                continue
            u = aux_of[v.id]
            if cpt.parents[-1] != u:
                raise ValueError(f"auxiliary root of {v.name} must be its last parent")
            enc = AuxEncoding(v.cardinality, math.prod(network.cards[p] for p in cpt.parents[:-1]))
            encodings[v.id] = enc
            recon = _reconstruct(cpt, network.cpts[u].table[:, 0], enc)
            cpts.append(Cpt(v.id, cpt.parents[:-1], recon))
        base = Network(keep, cpts)
        return cls(base, network, aux_of, encodings)


def _reconstruct(cpt: Cpt, prior: np.ndarray, enc: AuxEncoding) -> np.ndarray:
    """sum_u P(z | pa, u) P(u) as a (states x parent configurations) table."""
    K = prior.size
    out = np.zeros((enc.n_states, enc.n_configs))
    cols = np.arange(enc.n_configs * K)
    pa, u = np.divmod(cols, K)
    if cpt.deterministic:
        np.add.at(out, (cpt.winners, pa), prior[u])
    else:
        t = cpt.table
        for z in range(enc.n_states):
            np.add.at(out[z], pa, t[z, cols] * prior[u])
    return out


def canonicalize(net: Network, size_cap: int = DEFAULT_SIZE_CAP) -> CanonicalNet:
    require_valid(net)
    n = len(net)
    variables = list(net.variables)
    cpts: list[Cpt] = [c for c in net.cpts if not c.parents]
    aux_of, encodings = {}, {}
    for z in net.internal:
        cpt = net.cpts[z]
        enc = AuxEncoding(net.cards[z], cpt.n_columns)
        if enc.size > size_cap:
            raise CanonicalSizeError(net.name_of(z), enc.size, size_cap)
        u_id = n + len(aux_of)
        aux_of[z] = u_id
        encodings[z] = enc
        variables.append(Variable(u_id, f"U_{net.name_of(z)}", enc.size, LATENT, aux_for=z))
        cpts.append(Cpt(u_id, (), aux_prior(cpt)))
        # U_Z is the last, least significant parent: column = pa * |U| + u
        winners = enc.table().T.ravel()
        cpts.append(DeterministicCpt(z, cpt.parents + (u_id,), winners, enc.n_states))
    return CanonicalNet(net, Network(variables, cpts), aux_of, encodings)


@dataclass
class ReconstructionReport:
    max_deviation: float
    per_variable: dict[str, float]
    ok: bool
    tol: float


def reconstructed_cpts(c: CanonicalNet) -> dict[int, np.ndarray]:
    return {
        z: _reconstruct(c.network.cpts[z], c.prior(z), enc)
        for z, enc in c.encodings.items()
    }


def verify_reconstruction(net: Network, c: CanonicalNet, tol: float = 1e-9) -> ReconstructionReport:
    """Max |sum_u P'(z | pa, u) P'(u) - P(z | pa)| for every internal family."""
    per = {}
    for z, recon in reconstructed_cpts(c).items():
        per[net.name_of(z)] = float(np.max(np.abs(recon - net.cpts[z].table)))
    worst = max(per.values(), default=0.0)
    return ReconstructionReport(worst, per, worst <= tol, tol)


def canonical_log_likelihood(c: CanonicalNet, d: WeightedDataset) -> float:
    """Log-likelihood from the canonical network.

    Each U_Z is a root whose only child is Z, so its sum is pushed inside the
    product over internal variables; what remains is an enumeration over the
    original latent roots only.
    """
    recon = reconstructed_cpts(c)
    collapsed = c.base.replace_cpts(
        Cpt(z, c.base.cpts[z].parents, table) for z, table in recon.items()
    )
    return log_likelihood(collapsed, d)


def canonical_joint(c: CanonicalNet, y_and_z: Mapping[int, int]) -> float:
    """P'(y, z) by brute-force summation over every consistent auxiliary configuration."""
    aux = sorted(c.aux_of.values())
    total = []
    for cfg in inference._space([c.network.cards[u] for u in aux]):
        a = dict(y_and_z)
        a.update(zip(aux, (int(s) for s in cfg)))
        total.append(inference.joint_prob(c.network, a))
    return math.fsum(total)
