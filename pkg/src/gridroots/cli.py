"""Command line interface.

Subcommands: ``gen`` (random cases), ``solve`` (full solution census of
one network), ``cliques`` and ``bounds`` (topology analysis), ``experiment``
(journaled batches), ``report`` (aggregate + CSV), ``verify-paper``
(reference-topology self-check).  Exit codes: 0 success, 1 usage error,
2 bad input or failed verification, 3 non-certified solve.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import bounds as bounds_mod
from .casegen import GenConfig, generate_case
from .cliques import Graph, block_analysis, clique_graph, maximal_cliques, \
    parse_edge_list, signature_key
from .harness import aggregate, export_fig1_csv, run_experiment, \
    solve_network, verify_published_examples
from .homotopy import TrackerConfig, filter_real
from .pfmodel import ModelError, full_voltage, load_network, network_to_json, \
    save_network, to_graph
from .reference_cases import REFERENCE_CASES


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; this CLI reserves 2 for
    # data errors, so route usage problems to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="solver start-system seed (overrides --config)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for path tracking")
    common.add_argument("--journal", type=Path, default=None,
                        help="JSONL journal path")
    common.add_argument("--config", type=Path, default=None,
                        help="tracker config JSON file")

    parser = _Parser(prog="gridroots",
                     description="Complete power flow solution censuses and "
                                 "clique-structure solution bounds.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate random cases")
    p.add_argument("--buses", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", type=Path, default=None,
                   help="output file (count 1) or directory")

    p = sub.add_parser("solve", parents=[common],
                       help="find all complex power flow solutions")
    p.add_argument("network", type=Path, help="network JSON file")

    p = sub.add_parser("cliques", parents=[common],
                       help="maximal cliques and topology class")
    p.add_argument("graph", type=Path, help="network JSON or edge list file")

    p = sub.add_parser("bounds", parents=[common],
                       help="solution-count bounds for a topology")
    p.add_argument("graph", type=Path, help="network JSON or edge list file")

    p = sub.add_parser("experiment", parents=[common],
                       help="run a batch of seeded random cases")
    p.add_argument("--buses", type=int, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--topology", type=Path, default=None,
                   help="fix the topology to this edge list or network JSON")
    p.add_argument("--name", default=None, help="case id prefix")

    p = sub.add_parser("report", parents=[common],
                       help="aggregate a journal into per-structure maxima")
    p.add_argument("--csv", type=Path, default=None, help="also write CSV")

    sub.add_parser("verify-paper", parents=[common],
                   help="check bundled reference topologies")
    return parser


def _tracker_config(args) -> TrackerConfig:
    cfg = TrackerConfig()
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
            cfg = TrackerConfig(**raw)
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ModelError(f"bad tracker config {args.config}: {exc}")
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _load_graph(path: Path) -> Graph:
    if path.suffix == ".json":
        return to_graph(load_network(path))
    try:
        return parse_edge_list(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ModelError(str(exc))


def _cmd_gen(args) -> int:
    base = args.seed if args.seed is not None else 0
    nets = [generate_case(GenConfig(n_buses=args.buses, seed=base + i))
            for i in range(args.count)]
    if args.out is None:
        if args.count != 1:
            raise ModelError("--out is required when --count > 1")
        sys.stdout.write(network_to_json(nets[0]))
        return 0
    if args.count == 1 and args.out.suffix == ".json":
        save_network(nets[0], args.out)
        print(args.out)
        return 0
    args.out.mkdir(parents=True, exist_ok=True)
    for net in nets:
        target = args.out / f"{net.name}.json"
        save_network(net, target)
        print(target)
    return 0


def _cmd_solve(args) -> int:
    net = load_network(args.network)
    # Precedence: explicit --seed, then the seed recorded on the network,
    # then the config file.
    cfg = _tracker_config(args)
    if args.seed is None and net.seed is not None:
        cfg = replace(cfg, seed=net.seed)
    sols = solve_network(net, cfg, threads=args.threads)
    print(f"network:     {net.name or args.network} ({net.num_buses} buses)")
    print(f"paths:       {sols.num_paths}")
    print(f"finite:      {sols.num_finite_complex}")
    print(f"real:        {sols.num_real}")
    print(f"at-infinity: {sols.num_at_infinity}")
    print(f"singular:    {sols.num_singular}")
    print(f"failed:      {sols.num_failed}")
    print(f"attempts:    {sols.attempts}   certified: {'yes' if sols.certified else 'no'}")
    for k, vec in enumerate(filter_real(sols, cfg.real_tol)):
        v = full_voltage(net, vec)
        parts = "  ".join(
            f"bus{b.id} {abs(v[b.id - 1]):.4f}∠{math.degrees(math.atan2(v[b.id - 1].imag, v[b.id - 1].real)):.2f}°"
            for b in net.buses)
        print(f"real solution {k}: {parts}")
    return 0 if sols.certified else 3


def _cmd_cliques(args) -> int:
    g = _load_graph(args.graph)
    cs = maximal_cliques(g)
    ba = block_analysis(g)
    cg = clique_graph(cs)
    print(f"nodes: {g.num_nodes}  edges: {g.num_edges}")
    for i, c in enumerate(cs.cliques, start=1):
        print(f"C{i}: {{{','.join(map(str, sorted(c)))}}}")
    print(f"signature: {signature_key(cs)}  (avg size {cs.avg_size:.4g})")
    if cg.edges:
        links = "  ".join(f"C{i}-C{j}:{s}" for i, j, s in cg.edges)
        print(f"clique graph shared-bus counts: {links}")
    print(f"blocks: {' '.join('{' + ','.join(map(str, sorted(b))) + '}' for b in ba.blocks)}")
    print(f"class: {ba.topology_class.value}")
    return 0


def _cmd_bounds(args) -> int:
    g = _load_graph(args.graph)
    rep = bounds_mod.bound_for(g)
    print(f"buses:          {g.num_nodes}")
    print(f"bezout:         {rep.bezout}")
    print(f"kappa_n:        {rep.kappa_n}")
    print(f"class:          {rep.topology_class.value}")
    if rep.topology_bound is None:
        print("topology bound: none (kappa_n is the only bound)")
    else:
        tag = " (conjectured)" if rep.is_conjecture else " (proven)"
        detail = " * ".join(f"[{sig}:{factor}]" for sig, factor in rep.per_block_detail)
        print(f"topology bound: {rep.topology_bound}{tag} = {detail}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = _tracker_config(args)
    topo = None
    if args.topology is not None:
        topo = _load_graph(args.topology)
        if topo.num_nodes != args.buses:
            raise ModelError(f"--topology has {topo.num_nodes} nodes, "
                             f"--buses is {args.buses}")
    base = args.seed if args.seed is not None else 0
    recs = run_experiment(args.buses, args.count, base, cfg,
                          journal_path=args.journal, topology=topo,
                          topology_name=args.name, threads=args.threads)
    for r in recs:
        bound = "-" if r.topology_bound is None else str(r.topology_bound)
        flag = "" if r.certified else "  NOT CERTIFIED"
        print(f"{r.case_id}: sig {r.signature_key} [{r.topology_class}] "
              f"finite {r.num_finite_complex} real {r.num_real} "
              f"bound {bound} kappa_n {r.kappa_n} ({r.runtime_ms} ms){flag}")
    certified = sum(1 for r in recs if r.certified)
    print(f"{len(recs)} cases, {certified} certified")
    return 0


def _cmd_report(args) -> int:
    if args.journal is None:
        raise ModelError("report requires --journal")
    rep = aggregate(args.journal)
    if rep.status == "empty":
        print(f"no certified records among {rep.num_records}")
        return 0
    print(f"{'signature':>12} {'n':>2} {'class':>22} {'avg':>6} "
          f"{'max_cx':>6} {'max_re':>6} {'cases':>5} {'kappa_n':>7} {'bound':>6} att")
    for row in rep.rows:
        bound = "-" if row.applicable_bound is None else str(row.applicable_bound)
        print(f"{row.signature_key:>12} {row.n_buses:>2} {row.topology_class:>22} "
              f"{row.avg_clique_size:>6.3g} {row.max_num_finite_complex:>6} "
              f"{row.max_num_real:>6} {row.case_count:>5} {row.kappa_n:>7} "
              f"{bound:>6} {'yes' if row.bound_attained else 'no'}")
        for cid in row.counterexamples:
            print(f"  counterexample: {cid}")
    print(f"records: {rep.num_records} ({rep.num_certified} certified, "
          f"{rep.num_non_certified} not)")
    if args.csv is not None:
        export_fig1_csv(rep, args.csv)
        print(f"wrote {args.csv}")
    return 0


def _cmd_verify(args) -> int:
    rep = verify_published_examples()
    width = max(len(c.name) for c in REFERENCE_CASES)
    for row in rep.rows:
        print(f"{'PASS' if row.ok else 'FAIL'} {row.name:<{width}} {row.got}")
        if not row.ok:
            print(f"     expected: {row.expected}")
    print("all checks passed" if rep.all_ok else "MISMATCH")
    return 0 if rep.all_ok else 2


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "cliques": _cmd_cliques,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
    "report": _cmd_report,
    "verify-paper": _cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
