"""Command-line interface: ``sweepcut <command> ...``.

Every file argument accepts '-' for standard input. Reports are JSON with
floats at 17 significant digits. Exit codes: 0 ok, 1 certificate failure,
2 usage or domain error, 3 parse error, 4 capacity error.
"""

from __future__ import annotations

import argparse
import sys

from .algorithms import balanced_separator, spectral_maxcut
from .bounds import improved_cheeger_certificate, split_eigenfunction
from .certificates import SCHEMA_VERSION, dumps
from .errors import CapacityError, DomainError, ParseError
from .graph import VertexSet, conductance, phi_k_of_partition
from .instances import (gen_barbell, gen_complete, gen_cycle, gen_hypercube, gen_joined_expanders, gen_path,
                        gen_planted_bisection, gen_stable_gadget)
from .io import emit_edge_list, parse_edge_list, parse_partition, read_text
from .regions import dyadic_cheeger_certificates, main_func_dichotomy
from .spectral import LAPLACIAN, SIGNLESS, dense_spectrum
from .steps import build_step_approximation, jump_bound_certificate
from .suite import PROBES_PER_GRAPH, run_battery
from .sweep import sweep_conductance

EXIT_OK, EXIT_CERT, EXIT_USAGE, EXIT_PARSE, EXIT_CAPACITY = 0, 1, 2, 3, 4


def _graph(path: str):
    return parse_edge_list(read_text(path))


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj, indent=2) + "\n")


def _report(kind: str, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "report": kind, **body}


def cmd_spectrum(args) -> int:
    G = _graph(args.file)
    which = SIGNLESS if args.signless else LAPLACIAN
    vals = dense_spectrum(G, which).eigenvalues
    if args.top is not None:
        vals = vals[:args.top]
    _emit(_report("spectrum", {"operator": which, "n": G.n, "eigenvalues": vals}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    G = _graph(args.file)
    sp = dense_spectrum(G, LAPLACIAN)
    res = sweep_conductance(sp.eigenfunction(2), trace=args.trace is not None)
    split = sweep_conductance(split_eigenfunction(G, sp)).value
    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("threshold,conductance\n")
            fh.writelines(f"{t!r},{v!r}\n" for t, v in res.trace)
    _emit(_report("sweep", {"n": G.n, "phi": res.value, "threshold": res.threshold,
                            "set": list(res.set.members), "volume": res.set.volume,
                            "lambda_2": sp.eigenvalue(2), "phi_split": split}))
    return EXIT_OK


def _certify_k(G, k: int, spectrum) -> list:
    f = split_eigenfunction(G, spectrum)
    certs = [improved_cheeger_certificate(G, k, spectrum)]
    lam_k = spectrum.eigenvalue(k)
    if lam_k > 0:
        certs.append(jump_bound_certificate(f, build_step_approximation(f, k, lam_k)))
    certs.extend(main_func_dichotomy(f, k).certificates)
    return certs


def cmd_certify(args) -> int:
    G = _graph(args.file)
    sp = dense_spectrum(G, LAPLACIAN)
    ks = range(2, min(G.n, 12) + 1) if args.all_k else [args.k]
    if args.k is None and not args.all_k:
        raise DomainError("certify needs --k or --all-k")
    entries = []
    for k in ks:
        entries += [{"k": k, **c.to_dict()} for c in _certify_k(G, k, sp)]
    entries += [c.to_dict() for c in dyadic_cheeger_certificates(split_eigenfunction(G, sp))]
    holds = all(e["holds"] for e in entries)
    _emit(_report("certify", {"n": G.n, "certificates": entries, "holds": holds}))
    return EXIT_OK if holds else EXIT_CERT


def _trace_records(steps) -> list[dict]:
    return [{name: getattr(s, name) for name in s.__dataclass_fields__} for s in steps]


def cmd_separator(args) -> int:
    G = _graph(args.file)
    r = balanced_separator(G, args.k)
    trace = _trace_records(r.trace)
    _jsonl(args.trace, trace)
    _emit(_report("separator", {"n": G.n, "k": args.k, "set": list(r.set.members), "volume": r.set.volume,
                                "total_volume": G.total_volume, "balanced": r.balanced,
                                "conductance": r.conductance, "iterations": r.iterations,
                                "epsilon": r.epsilon, "trace": trace}))
    return EXIT_OK if r.balanced else EXIT_CERT


def cmd_maxcut(args) -> int:
    G = _graph(args.file)
    r = spectral_maxcut(G, args.k)
    trace = _trace_records(r.trace)
    _jsonl(args.trace, trace)
    ok = r.guarantee is None or r.cut_fraction >= r.guarantee - 1e-9
    _emit(_report("maxcut", {"n": G.n, "k": args.k, "left": list(r.cut.left.members),
                             "right": list(r.cut.right.members), "cut_fraction": r.cut_fraction,
                             "guarantee": r.guarantee, "epsilon": r.epsilon, "alpha_k": r.alpha_k,
                             "trace": trace}))
    return EXIT_OK if ok else EXIT_CERT


def _jsonl(path: str | None, records: list[dict]) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(dumps(r) + "\n" for r in records)


def cmd_phik(args) -> int:
    G = _graph(args.file)
    parts = parse_partition(read_text(args.parts), G.n)
    sets = [VertexSet(G, p) for p in parts]
    value = phi_k_of_partition(G, sets)
    _emit(_report("phik", {"n": G.n, "k": len(sets), "phi_k": value,
                           "parts": [{"members": list(S.members), "conductance": conductance(G, S.mask)}
                                     for S in sets]}))
    return EXIT_OK


# family -> (generator, parameter converters, number required); the rest default
FAMILIES = {
    "cycle": (gen_cycle, (int,), 1),
    "complete": (gen_complete, (int,), 1),
    "path": (gen_path, (int,), 1),
    "hypercube": (gen_hypercube, (int,), 1),
    "barbell": (gen_barbell, (int, float), 1),
    "planted": (gen_planted_bisection, (int, float, float), 3),
    "expanders": (gen_joined_expanders, (int, int, float), 2),
    "gadget": (gen_stable_gadget, (int, float), 2),
}
_SEEDED = {"planted", "expanders"}


def cmd_gen(args) -> int:
    fn, kinds, required = FAMILIES[args.family]
    if not required <= len(args.params) <= len(kinds):
        raise DomainError(f"{args.family} takes {required} to {len(kinds)} parameters")
    try:
        params = [kind(p) for kind, p in zip(kinds, args.params)]
    except ValueError:
        raise DomainError(f"bad parameters for {args.family}: {' '.join(args.params)}") from None
    if args.family in _SEEDED:
        G = fn(*params, seed=args.seed)
    else:
        G = fn(*params)
    if isinstance(G, tuple):
        G = G[0]
    sys.stdout.write(emit_edge_list(G))
    return EXIT_OK


def cmd_verify_suite(args) -> int:
    report = run_battery(args.seed, probes=args.probes)
    _emit(_report("verify-suite", report))
    return EXIT_OK if report["holds"] else EXIT_CERT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sweepcut", description="Spectral partitioning with certified bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="eigenvalues of the normalized Laplacian or signless operator")
    s.add_argument("file")
    s.add_argument("--signless", action="store_true")
    s.add_argument("--top", type=int, metavar="K")
    s.set_defaults(run=cmd_spectrum)

    s = sub.add_parser("sweep", help="best threshold set of the lambda_2 eigenfunction")
    s.add_argument("file")
    s.add_argument("--trace", metavar="CSV", help="write threshold,conductance rows")
    s.set_defaults(run=cmd_sweep)

    s = sub.add_parser("certify", help="improved Cheeger and related certificates")
    s.add_argument("file")
    s.add_argument("--k", type=int)
    s.add_argument("--all-k", action="store_true", help="every k in 2..min(n, 12)")
    s.set_defaults(run=cmd_certify)

    for name, fn, help_ in (("separator", cmd_separator, "balanced separator"),
                            ("maxcut", cmd_maxcut, "iterative spectral max cut")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file")
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--trace", metavar="JSONL", help="write one JSON record per iteration")
        s.set_defaults(run=fn)

    s = sub.add_parser("gen", help="emit a generated graph as an edge list")
    s.add_argument("family", choices=sorted(FAMILIES))
    s.add_argument("params", nargs="*")
    s.add_argument("--seed", type=int, default=1)
    s.set_defaults(run=cmd_gen)

    s = sub.add_parser("verify-suite", help="run the acceptance battery")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--probes", type=int, default=PROBES_PER_GRAPH, help="energy probes per graph")
    s.set_defaults(run=cmd_verify_suite)

    s = sub.add_parser("phik", help="max conductance over the parts of a partition")
    s.add_argument("file")
    s.add_argument("--parts", required=True)
    s.set_defaults(run=cmd_phik)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ParseError as exc:
        print(f"sweepcut: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"sweepcut: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (DomainError, OSError) as exc:
        print(f"sweepcut: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
