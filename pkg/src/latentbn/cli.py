"""Command-line entry point.

Exit codes: 0 success or global optimum, 2 input error, 3 suboptimal
verdict, 4 degenerate likelihood (a record of probability zero), 5 a
size cap refused the request.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import canonical, em, empirical, graph, io, likelihood, synthetic
from .inference import SizeCapError, ZeroProbabilityError
from .model import InvalidNetworkError, validate_network

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SUBOPTIMAL = 3
EXIT_DEGENERATE = 4
EXIT_SIZE = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        self.code = code
        super().__init__(message)


def _emit(args, doc: dict[str, Any], lines: list[str]) -> None:
    if args.format == "structured":
        print(json.dumps(doc, indent=2, default=_jsonable))
    else:
        print("\n".join(lines))


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _load_net(path):
    if not path:
        raise CliError("--net is required", EXIT_INPUT)
    try:
        return io.read_network(path)
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_INPUT) from None
    except io.FormatError as e:
        raise CliError(f"{path}: {e}", EXIT_INPUT) from None


def _load_data(path, net):
    if not path:
        raise CliError("--data is required", EXIT_INPUT)
    try:
        return io.read_dataset(path, net)
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_INPUT) from None
    except (io.FormatError, ValueError) as e:
        raise CliError(f"{path}: {e}", EXIT_INPUT) from None


def _tols(args) -> likelihood.Tolerances:
    return likelihood.Tolerances(tol_gap_rel=args.tol_gap, tol_compat=args.tol_compat)


def _names(net, ids):
    return [net.name_of(v) for v in sorted(ids)]


def cmd_validate(args) -> int:
    try:
        with open(args.net, encoding="utf-8") as f:
            net = io.parse_network(f.read(), validate=False)
    except OSError as e:
        raise CliError(f"{args.net}: {e.strerror}", EXIT_INPUT) from None
    except io.FormatError as e:
        raise CliError(f"{args.net}: {e}", EXIT_INPUT) from None
    report = validate_network(net)
    _emit(args, {"valid": report.ok, "violations": report.violations},
          ["valid"] if report.ok else report.violations)
    return EXIT_OK if report.ok else EXIT_INPUT


def cmd_analyze(args) -> int:
    net = _load_net(args.net)
    structure = graph.empirical_structure(net)
    comps = [_names(net, b) for b in graph.c_components(net)]
    wz = {net.name_of(z): _names(net, w) for z, w in structure.items()}
    doc = {
        "roots": _names(net, net.roots),
        "internal": _names(net, net.internal),
        "c_components": comps,
        "empirical_parents": wz,
    }
    lines = [
        "roots: " + ", ".join(doc["roots"]),
        "internal: " + ", ".join(doc["internal"]),
        "c-components: " + " ".join("{" + ", ".join(c) + "}" for c in comps),
    ]
    lines += [f"W[{z}] = {{{', '.join(w)}}}" for z, w in wz.items()]
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_empirical(args) -> int:
    net = _load_net(args.net)
    d = _load_data(args.data, net)
    structure = empirical.empirical_structure(net)
    try:
        e = empirical.fit_empirical(structure, d)
    except ValueError as err:
        raise CliError(str(err), EXIT_INPUT) from None
    lam = empirical.lambda_star(e, d)
    doc = io.empirical_to_dict(e)
    doc["lambda_star"] = lam
    if args.out:
        io.write_text(args.out, json.dumps(doc, indent=2) + "\n")
    lines = [f"lambda_star = {lam!r}"]
    for entry in doc["variables"]:
        lines.append(f"{entry['name']} | {', '.join(entry['parents']) or '-'}: {entry['table']}")
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_loglik(args) -> int:
    net = _load_net(args.net)
    d = _load_data(args.data, net)
    ll = likelihood.log_likelihood(net, d)
    bad = likelihood.degenerate_records(net, d) if ll == -math.inf else []
    _emit(args, {"l": ll, "degenerate_records": bad},
          [f"l = {ll!r}"] + [f"zero-probability record: {r}" for r in bad])
    return EXIT_DEGENERATE if bad else EXIT_OK


def _certificate_exit(args, cert: likelihood.Certificate, extra: dict | None = None) -> int:
    doc = cert.to_dict()
    if extra:
        doc.update(extra)
    lines = [
        f"l            = {cert.log_likelihood!r}",
        f"lambda_star  = {cert.lambda_star!r}",
        f"gap          = {cert.gap!r}",
        f"max_residual = {cert.max_residual!r}  at {cert.residual_location}",
        f"verdict      = {cert.verdict}",
        f"tolerances   = {cert.tolerances}",
    ]
    lines += [f"zero-probability record: {r}" for r in cert.degenerate_records]
    _emit(args, doc, lines)
    if cert.degenerate_records:
        return EXIT_DEGENERATE
    return EXIT_OK if cert.optimal else EXIT_SUBOPTIMAL


def cmd_certify(args) -> int:
    net = _load_net(args.net)
    d = _load_data(args.data, net)
    try:
        cert = likelihood.certify_global_optimum(net, d, _tols(args))
    except ValueError as err:
        raise CliError(str(err), EXIT_INPUT) from None
    return _certificate_exit(args, cert)


def cmd_canonicalize(args) -> int:
    net = _load_net(args.net)
    try:
        c = canonical.canonicalize(net, size_cap=args.size_cap)
    except canonical.CanonicalSizeError as err:
        raise CliError(str(err), EXIT_SIZE) from None
    report = canonical.verify_reconstruction(net, c)
    if args.out:
        io.write_text(args.out, io.serialize_network(c.network))
    doc = {
        "max_deviation": report.max_deviation,
        "per_variable": report.per_variable,
        "aux_priors": {net.name_of(z): c.prior(z).tolist() for z in c.aux_of},
    }
    lines = [f"max reconstruction deviation = {report.max_deviation!r}"]
    lines += [f"P(U_{k}) = {v}" for k, v in doc["aux_priors"].items()]
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_em(args) -> int:
    net = _load_net(args.net)
    d = _load_data(args.data, net)
    try:
        cfg = em.EmConfig(
            max_iterations=args.max_iter,
            ll_improvement_threshold=args.threshold,
            restarts=args.restarts,
            seed=args.seed,
            init=args.init,
        )
        fitted, trace, cert = em.em_fit(net, d, cfg, _tols(args))
    except ZeroProbabilityError as err:
        raise CliError(str(err), EXIT_DEGENERATE) from None
    except SizeCapError as err:
        raise CliError(str(err), EXIT_SIZE) from None
    except ValueError as err:
        raise CliError(str(err), EXIT_INPUT) from None
    if args.out:
        io.write_text(args.out, io.serialize_network(fitted))
    if args.trace:
        io.write_text(args.trace, trace.to_text())
    extra = {"iterations": trace.iterations, "stop_reason": trace.stop_reason, "restart": trace.restart}
    return _certificate_exit(args, cert, extra)


def cmd_simulate(args) -> int:
    try:
        spec = synthetic.GeneratorSpec(
            n_roots=args.roots,
            n_internal=args.internal,
            max_parents=args.max_parents,
            max_cardinality=args.max_card,
            alpha=args.alpha,
            seed=args.seed,
        )
    except ValueError as err:
        raise CliError(str(err), EXIT_INPUT) from None
    rng = np.random.default_rng(args.seed)
    net = synthetic.random_network(spec, rng)
    try:
        if args.exact_weights:
            d = synthetic.exact_weights_dataset(net, args.total, cap=args.state_cap)
        else:
            d = synthetic.sample_dataset(net, args.samples, rng)
    except SizeCapError as err:
        raise CliError(str(err), EXIT_SIZE) from None
    if args.out:
        io.write_text(args.out, io.serialize_network(net))
    if args.data:
        io.write_text(args.data, io.serialize_dataset(d, net))
    _emit(args, {"variables": len(net), "records": len(d)},
          [f"network with {len(net)} variables, dataset with {len(d)} records"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentbn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", choices=["text", "structured"], default="text")
        p.set_defaults(func=func)
        return p

    def tol_flags(p):
        p.add_argument("--tol-compat", type=float, default=likelihood.Tolerances.tol_compat)
        p.add_argument("--tol-gap", type=float, default=likelihood.Tolerances.tol_gap_rel,
                       help="relative gap tolerance, scaled by max(1, |lambda*|)")

    p = add("validate", cmd_validate, "check a network document")
    p.add_argument("--net", required=True)

    p = add("analyze", cmd_analyze, "roots, c-components and empirical parents")
    p.add_argument("--net", required=True)

    p = add("empirical", cmd_empirical, "fit the empirical network and report lambda*")
    p.add_argument("--net", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")

    p = add("loglik", cmd_loglik, "log-likelihood of a dataset")
    p.add_argument("--net", required=True)
    p.add_argument("--data", required=True)

    p = add("certify", cmd_certify, "global-optimality certificate")
    p.add_argument("--net", required=True)
    p.add_argument("--data", required=True)
    tol_flags(p)

    p = add("canonicalize", cmd_canonicalize, "rewrite with deterministic internal CPTs")
    p.add_argument("--net", required=True)
    p.add_argument("--out")
    p.add_argument("--size-cap", type=int, default=canonical.DEFAULT_SIZE_CAP)

    p = add("em", cmd_em, "fit parameters by EM and certify the result")
    p.add_argument("--net", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.add_argument("--trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--threshold", type=float, default=1e-9)
    p.add_argument("--init", choices=["dirichlet", "uniform"], default="dirichlet")
    tol_flags(p)

    p = add("simulate", cmd_simulate, "random network plus a dataset drawn from it")
    p.add_argument("--out", help="network output path")
    p.add_argument("--data", help="dataset output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--roots", type=int, default=2)
    p.add_argument("--internal", type=int, default=3)
    p.add_argument("--max-parents", type=int, default=2)
    p.add_argument("--max-card", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--exact-weights", action="store_true")
    p.add_argument("--total", type=float, default=1000.0, help="N for --exact-weights")
    p.add_argument("--state-cap", type=int, default=10**6)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except InvalidNetworkError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
