"""Experiment orchestration, journaling, and aggregation.

Runs batches of randomly generated cases through the solver, records one
self-describing JSON line per case, and reduces journals to per-signature
maxima suitable for plotting solution counts against clique structure.
Journals are append-only; a re-run of the same invocation skips case ids
that are already present, so interrupted batches resume for free.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import bounds
from .casegen import GenConfig, generate_case, generate_case_on_topology
from .cliques import Graph, maximal_cliques, signature_key
from .homotopy import SolutionSet, TrackerConfig, solve_all
from .pfmodel import Network, build_pf_system, to_graph
from .reference_cases import REFERENCE_CASES

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentRecord:
    """Solve outcome and bound context for one generated case."""

    case_id: str
    seed: int
    n_buses: int
    signature_key: str
    topology_class: str
    num_finite_complex: int
    num_real: int
    num_at_infinity: int
    num_singular: int
    num_failed: int
    bezout: int
    kappa_n: int
    topology_bound: int | None
    is_conjecture: bool
    bound_respected: bool | None
    runtime_ms: int
    solver_config_digest: str

    @property
    def certified(self) -> bool:
        return self.num_failed == 0

    def to_dict(self) -> dict:
        d = {"version": SCHEMA_VERSION}
        d.update(asdict(self))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentRecord":
        d = dict(d)
        version = d.pop("version", None)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported journal record version {version!r}")
        return cls(**d)


def solve_network(net: Network, cfg: TrackerConfig | None = None,
                  threads: int = 1) -> SolutionSet:
    """Solve the power flow equations of a network."""
    if cfg is None:
        cfg = TrackerConfig()
    return solve_all(build_pf_system(net), cfg, threads=threads)


def run_case(net: Network, cfg: TrackerConfig | None = None,
             case_id: str | None = None, threads: int = 1) -> ExperimentRecord:
    """Solve one network and package the outcome as a journal record.

    The start-system seed is re-keyed to the network's own seed when it
    has one, so records are reproducible case by case while the config
    digest (which excludes the seed) stays constant across a batch.
    """
    if cfg is None:
        cfg = TrackerConfig()
    if net.seed is not None:
        cfg = replace(cfg, seed=net.seed)
    graph = to_graph(net)
    report = bounds.bound_for(graph)
    sig = signature_key(maximal_cliques(graph))

    t0 = time.perf_counter()
    sols = solve_all(build_pf_system(net), cfg, threads=threads)
    runtime_ms = int(round((time.perf_counter() - t0) * 1000.0))

    respected = None
    if report.topology_bound is not None and sols.certified:
        respected = sols.num_finite_complex <= report.topology_bound
    return ExperimentRecord(
        case_id=case_id or net.name or f"case-s{net.seed}",
        seed=net.seed if net.seed is not None else cfg.seed,
        n_buses=net.num_buses,
        signature_key=sig,
        topology_class=report.topology_class.value,
        num_finite_complex=sols.num_finite_complex,
        num_real=sols.num_real,
        num_at_infinity=sols.num_at_infinity,
        num_singular=sols.num_singular,
        num_failed=sols.num_failed,
        bezout=report.bezout,
        kappa_n=report.kappa_n,
        topology_bound=report.topology_bound,
        is_conjecture=report.is_conjecture,
        bound_respected=respected,
        runtime_ms=runtime_ms,
        solver_config_digest=cfg.digest(),
    )


def append_journal(path: str | Path, record: ExperimentRecord) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def load_journal(path: str | Path) -> list[ExperimentRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(ExperimentRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad journal line: {exc}")
    return records


def run_experiment(n_buses: int, count: int, base_seed: int,
                   cfg: TrackerConfig | None = None,
                   journal_path: str | Path | None = None,
                   topology: Graph | None = None,
                   topology_name: str | None = None,
                   gen_overrides: dict | None = None,
                   threads: int = 1) -> list[ExperimentRecord]:
    """Generate and solve ``count`` cases with seeds base_seed onward.

    With ``topology`` fixed, every case reuses that graph and only the
    electrical parameters vary; otherwise each seed draws its own random
    topology.  Already-journaled case ids are skipped, never re-solved.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if cfg is None:
        cfg = TrackerConfig()

    done: dict[str, ExperimentRecord] = {}
    if journal_path is not None and Path(journal_path).exists():
        for rec in load_journal(journal_path):
            if rec.solver_config_digest != cfg.digest():
                raise ValueError(
                    f"journal {journal_path} was written with a different "
                    f"solver config (digest {rec.solver_config_digest})")
            done[rec.case_id] = rec

    prefix = topology_name or ("topo" if topology is not None else "rand")
    overrides = gen_overrides or {}
    out = []
    for seed in range(base_seed, base_seed + count):
        case_id = f"{prefix}-n{n_buses}-s{seed}"
        if case_id in done:
            out.append(done[case_id])
            continue
        gen = GenConfig(n_buses=n_buses, seed=seed, **overrides)
        if topology is not None:
            net = generate_case_on_topology(gen, topology, name=case_id)
        else:
            net = generate_case(gen)
        rec = run_case(net, cfg, case_id=case_id, threads=threads)
        if journal_path is not None:
            append_journal(journal_path, rec)
        out.append(rec)
    return out


@dataclass(frozen=True)
class AggregateRow:
    """Maxima over all certified cases sharing one clique structure."""

    signature_key: str
    n_buses: int
    topology_class: str
    avg_clique_size: float
    max_num_finite_complex: int
    max_num_real: int
    case_count: int
    kappa_n: int
    applicable_bound: int | None
    bound_attained: bool
    counterexamples: tuple[str, ...]


@dataclass(frozen=True)
class AggregateReport:
    status: str  # "ok" or "empty"
    rows: tuple[AggregateRow, ...]
    num_records: int
    num_certified: int
    num_non_certified: int


def aggregate(journal: str | Path | Iterable[ExperimentRecord]) -> AggregateReport:
    """Reduce a journal to per-(signature, size, class) maxima.

    Only certified records (no failed paths) enter the maxima; the rest
    are counted and set aside.  Journals mixing solver configurations are
    rejected, and a certified count above a proven bound is an error
    rather than a counterexample.
    """
    if isinstance(journal, (str, Path)):
        records: Sequence[ExperimentRecord] = load_journal(journal)
    else:
        records = list(journal)

    digests = {r.solver_config_digest for r in records}
    if len(digests) > 1:
        raise ValueError(f"journal mixes solver configs: {sorted(digests)}")

    certified = [r for r in records if r.certified]
    if not certified:
        return AggregateReport("empty", (), len(records), 0, len(records))

    groups: dict[tuple, list[ExperimentRecord]] = {}
    for rec in certified:
        groups.setdefault(
            (rec.n_buses, rec.signature_key, rec.topology_class), []).append(rec)

    rows = []
    for (n, sig, tclass), recs in sorted(groups.items()):
        sizes = [int(s) for s in sig.split("x")]
        bound_vals = {r.topology_bound for r in recs}
        if len(bound_vals) != 1:
            raise ValueError(f"inconsistent bounds within group {sig}: {bound_vals}")
        bound = bound_vals.pop()
        max_complex = max(r.num_finite_complex for r in recs)
        counter = []
        for r in recs:
            if bound is not None and r.num_finite_complex > bound:
                if not r.is_conjecture:
                    raise ValueError(
                        f"case {r.case_id} exceeds the proven bound {bound}; "
                        "the journal or solver is corrupt")
                counter.append(r.case_id)
        rows.append(AggregateRow(
            signature_key=sig,
            n_buses=n,
            topology_class=tclass,
            avg_clique_size=sum(sizes) / len(sizes),
            max_num_finite_complex=max_complex,
            max_num_real=max(r.num_real for r in recs),
            case_count=len(recs),
            kappa_n=recs[0].kappa_n,
            applicable_bound=bound,
            bound_attained=bound is not None and max_complex == bound,
            counterexamples=tuple(counter),
        ))
    return AggregateReport("ok", tuple(rows), len(records), len(certified),
                           len(records) - len(certified))


CSV_COLUMNS = ("signature_key", "avg_clique_size", "max_complex", "max_real",
               "n_buses", "kappa_n", "applicable_bound", "bound_attained")


def export_fig1_csv(report: AggregateReport, path: str | Path) -> None:
    """Write the aggregate as a flat CSV of solution maxima per structure."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([
                row.signature_key,
                f"{row.avg_clique_size:.6g}",
                row.max_num_finite_complex,
                row.max_num_real,
                row.n_buses,
                row.kappa_n,
                "" if row.applicable_bound is None else row.applicable_bound,
                str(row.bound_attained).lower(),
            ])


@dataclass(frozen=True)
class VerifyRow:
    name: str
    ok: bool
    expected: str
    got: str


@dataclass(frozen=True)
class VerifyReport:
    rows: tuple[VerifyRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)


def verify_published_examples() -> VerifyReport:
    """Check every bundled reference topology against its expected analysis.

    Each row compares the computed maximal cliques, signature, topology
    class, and bound with the values recorded on the fixture.
    """
    rows = []
    for case in REFERENCE_CASES:
        g = case.graph
        cs = maximal_cliques(g)
        rep = bounds.bound_for(g)
        got_cliques = tuple(sorted(tuple(sorted(c)) for c in cs.cliques))
        expected = _describe(tuple(sorted(case.cliques)), case.signature_key,
                             case.topology_class.value, case.bound,
                             case.is_conjecture, bounds.kappa(case.num_buses))
        got = _describe(got_cliques, signature_key(cs),
                        rep.topology_class.value, rep.topology_bound,
                        rep.is_conjecture, rep.kappa_n)
        rows.append(VerifyRow(case.name, expected == got, expected, got))
    return VerifyReport(tuple(rows))


def _describe(cliques, sig, tclass, bound, conjecture, kappa_n) -> str:
    cl = " ".join("{" + ",".join(map(str, c)) + "}" for c in cliques)
    btxt = "none" if bound is None else str(bound)
    if bound is not None and conjecture:
        btxt += " (conjectured)"
    return f"cliques {cl}; signature {sig}; {tclass}; bound {btxt}; kappa_n {kappa_n}"
