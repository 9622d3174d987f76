"""Variables, conditional probability tables, networks and weighted datasets.

Networks here follow one fixed setting: every root is latent and every
node with at least one parent is manifest.  States are dense 0-based
indices; labels only exist for display and file formats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

LATENT = "latent"
MANIFEST = "manifest"

COLUMN_TOL = 1e-9


class NetworkError(ValueError):
    """Raised when a network cannot even be assembled (bad ids, bad shapes)."""


class InvalidNetworkError(NetworkError):
    """Raised when an operation needs a valid network and got a flawed one."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid network: " + "; ".join(self.violations))


def column_index(states: np.ndarray, cards: Sequence[int]) -> np.ndarray:
    """Mixed-radix value of parent configurations, first parent most significant.

    ``states`` has the parent states along its last axis.
    """
    states = np.asarray(states, dtype=np.int64)
    idx = np.zeros(states.shape[:-1], dtype=np.int64)
    for k, card in enumerate(cards):
        idx = idx * card + states[..., k]
    return idx


def column_states(col: int, cards: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`column_index` for a single column."""
    out = []
    for card in reversed(cards):
        col, digit = divmod(col, card)
        out.append(digit)
    return tuple(reversed(out))


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    cardinality: int
    role: str
    labels: tuple[str, ...] | None = None
    # id of the manifest variable this auxiliary root was built for
    aux_for: int | None = None

    def state_label(self, s: int) -> str:
        return self.labels[s] if self.labels else str(s)


class Cpt:
    """Dense CPT: ``table[child_state, column]`` with one column per parent configuration."""

    deterministic = False

    def __init__(self, child: int, parents: Sequence[int], table):
        self.child = int(child)
        self.parents = tuple(int(p) for p in parents)
        table = np.array(table, dtype=np.float64)
        if table.ndim == 1:
            table = table[:, None]
        if table.ndim != 2:
            raise NetworkError(f"CPT of variable {child}: table must be 2-D")
        table.setflags(write=False)
        self.table = table

    @property
    def n_states(self) -> int:
        return self.table.shape[0]

    @property
    def n_columns(self) -> int:
        return self.table.shape[1]

    def prob(self, child_states, columns):
        return self.table[child_states, columns]

    def column(self, col: int) -> np.ndarray:
        return self.table[:, col]

    def with_table(self, table) -> "Cpt":
        return Cpt(self.child, self.parents, table)

    def __repr__(self):
        return f"Cpt(child={self.child}, parents={self.parents}, shape={self.table.shape})"


class DeterministicCpt(Cpt):
    """Point-mass CPT stored sparsely as the winning child state of each column."""

    deterministic = True

    def __init__(self, child: int, parents: Sequence[int], winners, n_states: int):
        self.child = int(child)
        self.parents = tuple(int(p) for p in parents)
        winners = np.array(winners, dtype=np.int64).ravel()
        if winners.size and (winners.min() < 0 or winners.max() >= n_states):
            raise NetworkError(f"CPT of variable {child}: winner state out of range")
        winners.setflags(write=False)
        self.winners = winners
        self._n_states = int(n_states)

    @property
    def n_states(self) -> int:
        return self._n_states

    @property
    def n_columns(self) -> int:
        return self.winners.size

    @property
    def table(self) -> np.ndarray:
        dense = np.zeros((self._n_states, self.winners.size))
        dense[self.winners, np.arange(self.winners.size)] = 1.0
        return dense

    def prob(self, child_states, columns):
        return (self.winners[columns] == child_states).astype(np.float64)

    def column(self, col: int) -> np.ndarray:
        out = np.zeros(self._n_states)
        out[self.winners[col]] = 1.0
        return out

    def __repr__(self):
        return f"DeterministicCpt(child={self.child}, parents={self.parents}, columns={self.n_columns})"


@dataclass(frozen=True, eq=False)
class Network:
    """A discrete Bayesian network; variable ids are positions in ``variables``."""

    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]
    _children: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __init__(self, variables: Iterable[Variable], cpts: Iterable[Cpt]):
        variables = tuple(variables)
        by_child: dict[int, Cpt] = {}
        for cpt in cpts:
            if cpt.child in by_child:
                raise NetworkError(f"two CPTs given for variable {cpt.child}")
            by_child[cpt.child] = cpt
        n = len(variables)
        for i, v in enumerate(variables):
            if v.id != i:
                raise NetworkError(f"variable {v.name!r} has id {v.id}, expected {i}")
            if i not in by_child:
                raise NetworkError(f"no CPT for variable {v.name!r}")
        for c, cpt in by_child.items():
            if not 0 <= c < n:
                raise NetworkError(f"CPT for unknown variable id {c}")
            for p in cpt.parents:
                if not 0 <= p < n:
                    raise NetworkError(f"CPT of {variables[c].name!r}: unknown parent id {p}")
            if len(set(cpt.parents)) != len(cpt.parents):
                raise NetworkError(f"CPT of {variables[c].name!r}: repeated parent")
            ncols = math.prod(variables[p].cardinality for p in cpt.parents)
            if cpt.n_states != variables[c].cardinality or cpt.n_columns != ncols:
                raise NetworkError(
                    f"CPT of {variables[c].name!r}: expected {variables[c].cardinality}x{ncols} "
                    f"table, got {cpt.n_states}x{cpt.n_columns}"
                )
        ordered = tuple(by_child[i] for i in range(n))
        children: list[list[int]] = [[] for _ in range(n)]
        for cpt in ordered:
            for p in cpt.parents:
                children[p].append(cpt.child)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "cpts", ordered)
        object.__setattr__(self, "_children", tuple(tuple(sorted(c)) for c in children))

    def __len__(self):
        return len(self.variables)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    def parents(self, v: int) -> tuple[int, ...]:
        return self.cpts[v].parents

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(c.child for c in self.cpts if not c.parents)

    @property
    def internal(self) -> tuple[int, ...]:
        return tuple(c.child for c in self.cpts if c.parents)

    @property
    def latent(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.variables if v.role == LATENT)

    @property
    def manifest(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.variables if v.role == MANIFEST)

    def id_of(self, name: str) -> int:
        for v in self.variables:
            if v.name == name:
                return v.id
        raise KeyError(name)

    def name_of(self, v: int) -> str:
        return self.variables[v].name

    def replace_cpts(self, cpts: Iterable[Cpt]) -> "Network":
        new = {c.child: c for c in cpts}
        return Network(self.variables, [new.get(c.child, c) for c in self.cpts])


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _find_cycle(net: Network) -> list[int] | None:
    color = [0] * len(net)
    stack_path: list[int] = []

    def visit(v):
        color[v] = 1
        stack_path.append(v)
        for c in net.children(v):
            if color[c] == 1:
                return stack_path[stack_path.index(c):] + [c]
            if color[c] == 0:
                found = visit(c)
                if found:
                    return found
        stack_path.pop()
        color[v] = 2
        return None

    for v in range(len(net)):
        if color[v] == 0:
            found = visit(v)
            if found:
                return found
    return None


def validate_network(net: Network, tol: float = COLUMN_TOL) -> ValidationReport:
    """List every violation of the latent-root setting; an empty list means valid."""
    out = []
    names = [v.name for v in net.variables]
    for name in sorted({n for n in names if names.count(n) > 1}):
        out.append(f"duplicate variable name {name!r}")
    cycle = _find_cycle(net)
    if cycle:
        out.append("cycle: " + " -> ".join(net.name_of(v) for v in cycle))
    for v in net.variables:
        if v.cardinality < 2:
            out.append(f"{v.name}: cardinality {v.cardinality} < 2")
        if v.role not in (LATENT, MANIFEST):
            out.append(f"{v.name}: unknown role {v.role!r}")
        has_parents = bool(net.parents(v.id))
        if v.role == LATENT and has_parents:
            out.append(f"{v.name}: latent non-root")
        if v.role == MANIFEST and not has_parents:
            out.append(f"{v.name}: manifest root")
        if v.labels is not None and len(v.labels) != v.cardinality:
            out.append(f"{v.name}: {len(v.labels)} labels for {v.cardinality} states")
    for cpt in net.cpts:
        if cpt.deterministic:
            continue
        t = cpt.table
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            out.append(f"{net.name_of(cpt.child)}: negative or non-finite probability")
        sums = t.sum(axis=0)
        for col in np.flatnonzero(np.abs(sums - 1.0) > tol):
            pa = column_states(int(col), [net.cards[p] for p in cpt.parents])
            where = f" at parent configuration {pa}" if cpt.parents else ""
            out.append(f"{net.name_of(cpt.child)}: column sums to {sums[col]:.12g}{where}")
    return ValidationReport(out)


def require_valid(net: Network) -> Network:
    report = validate_network(net)
    if not report.ok:
        raise InvalidNetworkError(report.violations)
    return net


def make_network(
    spec: Mapping[str, int | tuple[int, Sequence[str]]],
    cpts: Mapping[str, tuple[Sequence[str], object]],
) -> Network:
    """Convenience builder keyed by names.

    ``spec`` maps name -> cardinality, in id order; ``cpts`` maps child name ->
    (parent names, table).  Roles follow the structure: roots are latent.
    """
    names = list(spec)
    ids = {n: i for i, n in enumerate(names)}
    variables = []
    for i, n in enumerate(names):
        parents = cpts[n][0]
        variables.append(Variable(i, n, int(spec[n]), MANIFEST if parents else LATENT))
    built = [Cpt(ids[c], [ids[p] for p in pa], t) for c, (pa, t) in cpts.items()]
    return Network(variables, built)


class WeightedDataset:
    """Complete observations of the manifest variables with nonnegative real weights.

    Records are keyed by the tuple of states in ``manifest_order``; adding the
    same record twice sums the weights.
    """

    def __init__(self, manifest_order: Sequence[int], records=()):
        self.manifest_order = tuple(int(v) for v in manifest_order)
        self._records: dict[tuple[int, ...], float] = {}
        items = records.items() if isinstance(records, Mapping) else records
        for z, w in items:
            self.add(z, w)

    def add(self, z: Sequence[int], weight: float = 1.0) -> None:
        z = tuple(int(s) for s in z)
        if len(z) != len(self.manifest_order):
            raise ValueError(f"record {z} does not assign all {len(self.manifest_order)} manifest variables")
        weight = float(weight)
        if not weight >= 0 or math.isinf(weight):
            raise ValueError(f"weight {weight} for record {z} is not a nonnegative real")
        self._records[z] = self._records.get(z, 0.0) + weight

    @property
    def records(self) -> dict[tuple[int, ...], float]:
        return dict(self._records)

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records.items())

    def arrays(self, positive_only: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """(states, weights) with records in sorted order; states is R x m."""
        keys = sorted(k for k, w in self._records.items() if w > 0 or not positive_only)
        m = len(self.manifest_order)
        states = np.array(keys, dtype=np.int64).reshape(len(keys), m)
        weights = np.array([self._records[k] for k in keys], dtype=np.float64)
        return states, weights

    def scaled(self, c: float) -> "WeightedDataset":
        return WeightedDataset(self.manifest_order, {z: c * w for z, w in self._records.items()})

    def check_against(self, net: Network) -> None:
        if tuple(sorted(self.manifest_order)) != tuple(net.manifest):
            raise ValueError("dataset columns do not match the network's manifest variables")
        cards = net.cards
        for z in self._records:
            for v, s in zip(self.manifest_order, z):
                if not 0 <= s < cards[v]:
                    raise ValueError(f"record {z}: state {s} out of range for {net.name_of(v)}")

    def __repr__(self):
        return f"WeightedDataset(order={self.manifest_order}, records={len(self._records)}, N={total_weight(self):g})"


def total_weight(d: WeightedDataset) -> float:
    return math.fsum(w for _, w in d)


def aligned_states(net: Network, d: WeightedDataset, positive_only: bool = True):
    """Dataset records reordered so columns follow ``net.manifest`` (ascending id)."""
    d.check_against(net)
    states, weights = d.arrays(positive_only)
    perm = [d.manifest_order.index(v) for v in net.manifest]
    return states[:, perm], weights
