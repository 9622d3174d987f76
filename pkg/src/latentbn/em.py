"""Expectation-maximisation for all parameters given manifest-only data.

Restart ``i`` draws its initial parameters from ``numpy.random.default_rng(seed ^ i)``
(PCG64).  Uniform initialisation is available but sits on a symmetric
stationary point whenever latent states are interchangeable, so random
Dirichlet draws are the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import inference
from .likelihood import Certificate, Tolerances, certify_global_optimum, log_likelihood
from .model import Cpt, Network, WeightedDataset, aligned_states, column_index, require_valid


class DegenerateEvidenceError(inference.ZeroProbabilityError):
    def __init__(self, record: dict[str, int]):
        self.record = record
        super().__init__(f"record {record} has positive weight but probability zero; EM cannot proceed")


@dataclass(frozen=True)
class EmConfig:
    max_iterations: int = 1000
    ll_improvement_threshold: float = 1e-9
    restarts: int = 1
    seed: int = 0
    init: str = "dirichlet"  # or "uniform"
    alpha: float = 1.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.ll_improvement_threshold < 0:
            raise ValueError("ll_improvement_threshold must be >= 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.init not in ("dirichlet", "uniform"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass
class EmTrace:
    log_likelihoods: list[float] = field(default_factory=list)
    iterations: int = 0
    stop_reason: str = ""
    restart: int = 0
    network: Network | None = None

    def is_monotone(self, tol: float = 1e-12) -> bool:
        ll = self.log_likelihoods
        return all(b >= a - tol for a, b in zip(ll, ll[1:]))

    def to_text(self) -> str:
        lines = ["iteration\tlog_likelihood"]
        lines += [f"{i}\t{v!r}" for i, v in enumerate(self.log_likelihoods)]
        return "\n".join(lines) + "\n"


def _expected_counts(net: Network, d: WeightedDataset):
    states, weights = aligned_states(net, d)
    latent = inference.latent_configurations(net)
    full = inference.full_assignments(net, states, latent)
    joint = np.ones(full.shape[:2])
    for v in range(len(net)):
        cpt = net.cpts[v]
        cols = column_index(full[..., list(cpt.parents)], [net.cards[p] for p in cpt.parents])
        joint *= cpt.prob(full[..., v], cols)
    marg = joint.sum(axis=1)
    bad = np.flatnonzero(marg == 0.0)
    if bad.size:
        row = states[bad[0]]
        raise DegenerateEvidenceError({net.name_of(v): int(s) for v, s in zip(net.manifest, row)})
    resp = joint * (weights / marg)[:, None]
    counts = []
    for v in range(len(net)):
        cpt = net.cpts[v]
        cols = column_index(full[..., list(cpt.parents)], [net.cards[p] for p in cpt.parents])
        acc = np.zeros((net.cards[v], cpt.n_columns))
        np.add.at(acc, (full[..., v].ravel(), cols.ravel()), resp.ravel())
        counts.append(acc)
    return counts


def em_step(net: Network, d: WeightedDataset, iterations: int = 1) -> Network:
    """One (or ``iterations``) E-step/M-step rounds; zero iterations returns ``net``."""
    for _ in range(iterations):
        new = []
        for cpt, counts in zip(net.cpts, _expected_counts(net, d)):
            totals = counts.sum(axis=0)
            visited = totals > 0
            table = np.array(cpt.table, dtype=np.float64)
            table[:, visited] = counts[:, visited] / totals[visited]
            new.append(Cpt(cpt.child, cpt.parents, table))
        net = Network(net.variables, new)
    return net


def initial_parameters(net: Network, rng: np.random.Generator, init: str = "dirichlet", alpha: float = 1.0) -> Network:
    cpts = []
    for cpt in net.cpts:
        shape = (cpt.n_states, cpt.n_columns)
        if init == "uniform":
            table = np.full(shape, 1.0 / cpt.n_states)
        else:
            table = rng.dirichlet(np.full(cpt.n_states, alpha), size=cpt.n_columns).T
        cpts.append(Cpt(cpt.child, cpt.parents, table))
    return Network(net.variables, cpts)


def run_em(net: Network, d: WeightedDataset, cfg: EmConfig, restart: int = 0) -> EmTrace:
    trace = EmTrace(restart=restart)
    ll = log_likelihood(net, d)
    trace.log_likelihoods.append(ll)
    trace.stop_reason = "max_iterations"
    for it in range(cfg.max_iterations):
        net = em_step(net, d)
        new_ll = log_likelihood(net, d)
        trace.log_likelihoods.append(new_ll)
        trace.iterations = it + 1
        if new_ll - ll < cfg.ll_improvement_threshold:
            trace.stop_reason = "converged"
            break
        ll = new_ll
    trace.network = net
    return trace


def em_fit(
    net: Network,
    d: WeightedDataset,
    cfg: EmConfig = EmConfig(),
    tols: Tolerances = Tolerances(),
) -> tuple[Network, EmTrace, Certificate]:
    """Best of ``cfg.restarts`` EM runs (ties to the lowest restart), with its certificate."""
    require_valid(net)
    best: EmTrace | None = None
    for i in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed ^ i)
        start = initial_parameters(net, rng, cfg.init, cfg.alpha)
        trace = run_em(start, d, cfg, restart=i)
        if best is None or trace.log_likelihoods[-1] > best.log_likelihoods[-1]:
            best = trace
    assert best is not None and best.network is not None
    return best.network, best, certify_global_optimum(best.network, d, tols)


def max_column_error(net: Network) -> float:
    return max(float(np.max(np.abs(c.table.sum(axis=0) - 1.0))) for c in net.cpts)

