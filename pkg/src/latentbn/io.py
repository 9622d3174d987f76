"""Network documents (JSON) and weighted datasets (CSV).

A network document lists variables and CPTs by name.  Each dense ``table``
has one row per child state and one column per parent configuration, with
the first listed parent varying slowest::

    {"format_version": 1,
     "variables": [{"name": "Y", "cardinality": 2, "role": "latent"},
                   {"name": "Z", "cardinality": 2, "role": "manifest"}],
     "cpts": [{"child": "Y", "parents": [], "table": [[0.2], [0.8]]},
              {"child": "Z", "parents": ["Y"], "table": [[0.3, 0.4], [0.7, 0.6]]}]}

Deterministic CPTs may instead give ``"deterministic": [winner per column]``.
Auxiliary roots of canonical networks carry an ``auxiliary`` annotation.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from .canonical import ENCODING
from .model import (
    Cpt,
    DeterministicCpt,
    Network,
    NetworkError,
    Variable,
    WeightedDataset,
    validate_network,
)

FORMAT_VERSION = 1


class FormatError(ValueError):
    """A document could not be read; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@lru_cache(maxsize=None)
def network_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("network.schema.json").read_text())


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<document>"


def network_to_dict(net: Network) -> dict[str, Any]:
    variables = []
    for v in net.variables:
        entry: dict[str, Any] = {"name": v.name, "cardinality": v.cardinality, "role": v.role}
        if v.labels:
            entry["states"] = list(v.labels)
        if v.aux_for is not None:
            entry["auxiliary"] = {"for": net.name_of(v.aux_for), "encoding": ENCODING}
        variables.append(entry)
    cpts = []
    for c in net.cpts:
        entry = {"child": net.name_of(c.child), "parents": [net.name_of(p) for p in c.parents]}
        if c.deterministic:
            entry["deterministic"] = c.winners.tolist()
        else:
            entry["table"] = c.table.tolist()
        cpts.append(entry)
    return {"format_version": FORMAT_VERSION, "variables": variables, "cpts": cpts}


def serialize_network(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def network_from_dict(doc: Any, validate: bool = True) -> Network:
    try:
        jsonschema.validate(doc, network_schema())
    except jsonschema.ValidationError as e:
        raise FormatError(e.message, _path(e.absolute_path)) from None

    ids: dict[str, int] = {}
    for i, v in enumerate(doc["variables"]):
        if v["name"] in ids:
            raise FormatError(f"duplicate variable name {v['name']!r}", f"variables[{i}].name")
        ids[v["name"]] = i

    def lookup(name, where):
        if name not in ids:
            raise FormatError(f"unknown variable {name!r}", where)
        return ids[name]

    variables = []
    for i, v in enumerate(doc["variables"]):
        aux = v.get("auxiliary")
        labels = tuple(v["states"]) if "states" in v else None
        if labels is not None and len(labels) != v["cardinality"]:
            raise FormatError(f"{len(labels)} state labels for cardinality {v['cardinality']}", f"variables[{i}].states")
        aux_for = lookup(aux["for"], f"variables[{i}].auxiliary.for") if aux else None
        variables.append(Variable(i, v["name"], v["cardinality"], v["role"], labels, aux_for))

    cpts = []
    seen: set[int] = set()
    for i, c in enumerate(doc["cpts"]):
        where = f"cpts[{i}]"
        child = lookup(c["child"], where + ".child")
        if child in seen:
            raise FormatError(f"second CPT for {c['child']!r}", where)
        seen.add(child)
        parents = [lookup(p, f"{where}.parents[{k}]") for k, p in enumerate(c["parents"])]
        card = variables[child].cardinality
        ncols = math.prod(variables[p].cardinality for p in parents)
        if "deterministic" in c:
            winners = c["deterministic"]
            if len(winners) != ncols:
                raise FormatError(f"CPT of {c['child']!r} needs {ncols} entries, got {len(winners)}", where + ".deterministic")
            bad = [k for k, s in enumerate(winners) if s >= card]
            if bad:
                raise FormatError(f"state {winners[bad[0]]} out of range", f"{where}.deterministic[{bad[0]}]")
            cpts.append(DeterministicCpt(child, parents, winners, card))
            continue
        table = c["table"]
        if len(table) != card:
            raise FormatError(f"CPT of {c['child']!r} needs {card} rows, got {len(table)}", where + ".table")
        for r, row in enumerate(table):
            if len(row) != ncols:
                raise FormatError(
                    f"CPT of {c['child']!r}, row {r}: expected {ncols} entries, got {len(row)}",
                    f"{where}.table[{r}]",
                )
        cpts.append(Cpt(child, parents, table))
    missing = [v.name for v in variables if v.id not in seen]
    if missing:
        raise FormatError(f"no CPT for {missing}", "cpts")
    try:
        net = Network(variables, cpts)
    except NetworkError as e:
        raise FormatError(str(e), "cpts") from None
    if validate:
        report = validate_network(net)
        if not report.ok:
            raise FormatError("; ".join(report.violations), "network")
    return net


def parse_network(text: str, validate: bool = True) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, f"line {e.lineno}, column {e.colno}") from None
    return network_from_dict(doc, validate)


def _state_index(var: Variable, token: str, where: str) -> int:
    token = token.strip()
    if var.labels and token in var.labels:
        return var.labels.index(token)
    try:
        s = int(token)
    except ValueError:
        raise FormatError(f"unknown state {token!r} for {var.name}", where) from None
    if not 0 <= s < var.cardinality:
        raise FormatError(f"state {s} out of range for {var.name}", where)
    return s


def parse_dataset(text: str, net: Network) -> WeightedDataset:
    """CSV with a header of manifest names and an optional ``weight`` column.

    Duplicate rows are aggregated by summing their weights.
    """
    rows = [
        (lineno, r)
        for lineno, r in enumerate(csv.reader(_io.StringIO(text)), start=1)
        if any(cell.strip() for cell in r)
    ]
    if not rows:
        raise FormatError("empty dataset document", "line 1")
    header = [h.strip() for h in rows[0][1]]
    names = [h for h in header if h != "weight"]
    manifest_names = {net.name_of(z) for z in net.manifest}
    for k, h in enumerate(names):
        if h not in manifest_names:
            raise FormatError(f"{h!r} is not a manifest variable", f"line 1, column {k + 1}")
    missing = sorted(manifest_names - set(names))
    if missing:
        raise FormatError(f"missing manifest column(s) {missing}", "line 1")
    if len(set(names)) != len(names):
        raise FormatError("repeated column", "line 1")
    cols = [net.id_of(h) for h in names]
    order = sorted(cols)
    d = WeightedDataset(order)
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(row)}", f"line {lineno}")
        z = {}
        weight = 1.0
        for k, (h, cell) in enumerate(zip(header, row)):
            where = f"line {lineno}, column {k + 1}"
            if h == "weight":
                try:
                    weight = float(cell)
                except ValueError:
                    raise FormatError(f"weight {cell!r} is not a number", where) from None
                if not weight >= 0 or math.isinf(weight):
                    raise FormatError(f"weight {cell!r} must be a nonnegative real", where)
            else:
                v = net.id_of(h)
                z[v] = _state_index(net.variables[v], cell, where)
        d.add([z[v] for v in order], weight)
    return d


def serialize_dataset(d: WeightedDataset, net: Network, labels: bool = True) -> str:
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([net.name_of(v) for v in d.manifest_order] + ["weight"])
    for z, w in sorted(d.records.items()):
        cells = [
            net.variables[v].state_label(s) if labels else str(s)
            for v, s in zip(d.manifest_order, z)
        ]
        writer.writerow(cells + [repr(w)])
    return out.getvalue()


def read_network(path) -> Network:
    with open(path, encoding="utf-8") as f:
        return parse_network(f.read())


def read_dataset(path, net: Network) -> WeightedDataset:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_dataset(f.read(), net)


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def empirical_to_dict(e) -> dict[str, Any]:
    s = e.structure
    return {
        "variables": [
            {
                "name": s.names[z],
                "parents": [s.names[w] for w in s.parents[z]],
                "table": e.params[z].tolist(),
                "observed": e.observed[z].tolist(),
            }
            for z in s.manifest
        ]
    }
