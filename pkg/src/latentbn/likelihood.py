"""Latent-marginal log-likelihood, compatibility checks and optimality certificates.

The certificate ties three numbers together: the log-likelihood ``l`` of
the data under the full network, the ceiling ``lambda_star`` from the
empirical network, and the largest gap between the network's conditionals
``P(z | w_Z)`` and the data frequencies.  The verdict is driven by the
residual; the gap is cross-checked against it.  Because

    lambda_star - l = sum_Z sum_w n(w) KL(freq(. | w) || P(. | w)),

the gap is second order in the residual, and Pinsker's inequality gives
``gap >= 2 n(w) r^2`` at the residual's location.  That bound, not a
linear comparison of tolerances, is what the cross-check enforces.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import empirical, inference
from .model import Network, WeightedDataset, aligned_states, column_states, require_valid

GLOBAL_OPTIMUM = "global-optimum"
SUBOPTIMAL = "suboptimal"


class CertificateInconsistencyError(RuntimeError):
    """The gap-based and residual-based readings of optimality disagree."""

    def __init__(self, message: str, gap: float, residual: float):
        self.gap = gap
        self.residual = residual
        super().__init__(f"{message} (gap={gap!r}, residual={residual!r})")


@dataclass(frozen=True)
class Tolerances:
    tol_num: float = 1e-9
    tol_gap_rel: float = 1e-6
    tol_compat: float = 1e-6

    def tol_gap(self, lam: float) -> float:
        return self.tol_gap_rel * max(1.0, abs(lam))


def degenerate_records(net: Network, d: WeightedDataset) -> list[dict[str, int]]:
    """Positive-weight records to which the network assigns probability zero."""
    states, weights = aligned_states(net, d)
    p = inference.marginals(net, states)
    return [
        {net.name_of(v): int(s) for v, s in zip(net.manifest, row)}
        for row in states[p == 0.0]
    ]


def log_likelihood(net: Network, d: WeightedDataset) -> float:
    """sum_z n(z) log P(z), skipping zero-weight records; -inf if some P(z) is 0."""
    states, weights = aligned_states(net, d)
    if not len(weights):
        return 0.0
    p = inference.marginals(net, states)
    if np.any(p == 0.0):
        return -math.inf
    return math.fsum(weights * np.log(p))


@dataclass
class CompatibilityReport:
    max_residual: float
    location: dict[str, Any] | None
    compatible: bool
    tol_compat: float
    # weight n(w) of the context where the max residual sits
    context_weight: float = 0.0

    def to_dict(self):
        return asdict(self)


def conditional_tables(net: Network, structure: empirical.EmpiricalStructure | None = None):
    """P_B(z, w_Z) as (states x contexts) arrays, from the full manifest table."""
    if structure is None:
        structure = empirical.empirical_structure(net)
    table = inference.manifest_distribution(net)
    manifest = list(structure.manifest)
    out = {}
    for z in manifest:
        keep = [z] + list(structure.parents[z])
        axes = [manifest.index(v) for v in keep]
        drop = tuple(i for i in range(len(manifest)) if i not in axes)
        marg = table.sum(axis=drop) if drop else table
        # remaining axes are in ascending manifest order; move them to `keep` order
        remaining = sorted(axes)
        marg = np.transpose(marg, [remaining.index(a) for a in axes])
        out[z] = marg.reshape(structure.cards[z], -1)
    return out


def compatibility_report(
    net: Network,
    d: WeightedDataset,
    tol_compat: float = Tolerances.tol_compat,
    structure: empirical.EmpiricalStructure | None = None,
) -> CompatibilityReport:
    """Largest |P_B(z | w_Z) - n(z, w_Z)/n(w_Z)| over observed contexts."""
    require_valid(net)
    if structure is None:
        structure = empirical.empirical_structure(net)
    counts = empirical.family_counts(structure, d)
    joint = conditional_tables(net, structure)
    best = (0.0, None, 0.0)
    for z in structure.manifest:
        n_zw = counts[z]
        n_w = n_zw.sum(axis=0)
        p_zw = joint[z]
        p_w = p_zw.sum(axis=0)
        for col in np.flatnonzero(n_w > 0):
            freq = n_zw[:, col] / n_w[col]
            if p_w[col] == 0.0:
                resid = np.ones_like(freq)
            else:
                resid = np.abs(p_zw[:, col] / p_w[col] - freq)
            k = int(np.argmax(resid))
            if resid[k] > best[0] or best[1] is None:
                pa = column_states(int(col), [structure.cards[w] for w in structure.parents[z]])
                loc = {
                    "variable": structure.names[z],
                    "state": k,
                    "context": {structure.names[w]: int(s) for w, s in zip(structure.parents[z], pa)},
                }
                best = (float(resid[k]), loc, float(n_w[col]))
    r, loc, weight = best
    return CompatibilityReport(r, loc, r <= tol_compat, tol_compat, weight)


@dataclass
class Certificate:
    log_likelihood: float
    lambda_star: float
    gap: float
    max_residual: float
    residual_location: dict[str, Any] | None
    verdict: str
    tolerances: dict[str, float]
    degenerate_records: list[dict[str, int]] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.verdict == GLOBAL_OPTIMUM

    def to_dict(self) -> dict[str, Any]:
        return {
            "l": self.log_likelihood,
            "lambda_star": self.lambda_star,
            "gap": self.gap,
            "max_residual": self.max_residual,
            "residual_location": self.residual_location,
            "verdict": self.verdict,
            "tolerances": dict(self.tolerances),
            "degenerate_records": list(self.degenerate_records),
        }


def certify_global_optimum(net: Network, d: WeightedDataset, tols: Tolerances = Tolerances()) -> Certificate:
    require_valid(net)
    structure = empirical.empirical_structure(net)
    lam = empirical.lambda_star(empirical.fit_empirical(structure, d), d)
    ll = log_likelihood(net, d)
    gap = lam - ll
    report = compatibility_report(net, d, tols.tol_compat, structure)
    tol_gap = tols.tol_gap(lam)
    r = report.max_residual

    if gap < -tols.tol_num:
        raise CertificateInconsistencyError("log-likelihood exceeds the empirical ceiling", gap, r)
    if report.compatible and gap > tol_gap:
        raise CertificateInconsistencyError("compatible data but the gap exceeds tolerance", gap, r)
    if not report.compatible and math.isfinite(gap):
        floor = 2.0 * report.context_weight * r * r
        if gap < floor - tols.tol_num - 1e-12 * abs(lam):
            raise CertificateInconsistencyError(
                f"gap below the Pinsker floor {floor!r} implied by the residual", gap, r
            )

    return Certificate(
        log_likelihood=ll,
        lambda_star=lam,
        gap=gap,
        max_residual=r,
        residual_location=report.location,
        verdict=GLOBAL_OPTIMUM if report.compatible else SUBOPTIMAL,
        tolerances={"tol_num": tols.tol_num, "tol_gap": tol_gap, "tol_compat": tols.tol_compat},
        degenerate_records=degenerate_records(net, d) if ll == -math.inf else [],
    )
