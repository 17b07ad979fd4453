"""Check catalog entries against their recorded expectations."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import WalkerlabError
from .exactalg import ZERO, Subspace
from .model.catalog import CatalogEntry, SpanSpec
from .model.expr import eval_expr
from .model.homogeneous import evaluation_env, instantiate, trial_assignments
from .report import Report, build_report

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED-STUB"


@dataclass
class RunResult:
    params: dict
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    report: Report | None = None

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class EntryResult:
    id: str
    status: str
    runs: list = field(default_factory=list)
    error: str | None = None

    def failures(self) -> list:
        out = [f"{self.error}"] if self.error else []
        for r in self.runs:
            label = ", ".join(f"{k}={v}" for k, v in r.params.items()) or "no params"
            out.extend(f"[{label}] {f}" for f in r.failures)
        return out


def span_subspace(entry: CatalogEntry, spec: SpanSpec, env) -> Subspace:
    index = {s: i for i, s in enumerate(entry.m_symbols)}
    vecs = []
    for combo in spec.generators:
        v = [ZERO] * 4
        for sym, coef in combo:
            if sym not in index:
                raise WalkerlabError(f"{sym} is not a basis symbol of m in {entry.id}")
            v[index[sym]] = v[index[sym]] + eval_expr(coef, env)
        vecs.append(v)
    return Subspace(4, vecs)


def applicable_spans(entry: CatalogEntry, specs, env) -> list[Subspace]:
    """Expected subspaces whose ``when`` condition (if any) holds at env."""
    return [span_subspace(entry, s, env) for s in specs if s.when is None or s.when.holds(env)]


def _check_field(kind: str, specs, none_flag: bool, result, entry, env, failures, notes):
    if not specs and not none_flag:
        return
    expected = applicable_spans(entry, specs, env)
    got = list(result.witnesses)
    if result.verdict == "indeterminate-exact":
        failures.append(f"{kind}: indeterminate-exact ({result.reason})")
        return
    if not expected:
        if result.verdict != "none":
            failures.append(f"{kind}: expected none, got {result.verdict} {got}")
        return
    if result.verdict != "exists":
        failures.append(f"{kind}: expected {[str(s) for s in specs]}, got {result.verdict}")
        return
    if result.sentinel:
        return
    for sub in expected:
        if sub not in got:
            failures.append(f"{kind}: expected witness {sub} missing from {got}")
    extra = [w for w in got if w not in expected]
    if extra:
        notes.append(f"{kind}: additional witnesses {extra}")


def check_run(entry: CatalogEntry, params: dict) -> RunResult:
    run = RunResult({k: str(v) for k, v in params.items()})
    env = evaluation_env(entry, params)
    rep = build_report(instantiate(entry, params))
    run.report = rep
    geo, exp = rep.geometry, entry.expected
    f = run.failures
    want_flat = True if exp.conformally_flat is None else exp.conformally_flat
    if geo.conformally_flat != want_flat:
        f.append(f"conformally_flat: expected {want_flat}, got {geo.conformally_flat}")
    if exp.segre is not None and rep.segre.render != exp.segre:
        f.append(f"segre: expected {exp.segre}, got {rep.segre.render}")
    if exp.ricci_parallel is not None and geo.ricci_parallel != exp.ricci_parallel:
        f.append(f"ricci_parallel: expected {exp.ricci_parallel}, got {geo.ricci_parallel}")
    if exp.locally_symmetric is not None and geo.locally_symmetric != exp.locally_symmetric:
        f.append(f"locally_symmetric: expected {exp.locally_symmetric}, got {geo.locally_symmetric}")
    if geo.locally_symmetric and not geo.ricci_parallel:
        f.append("locally symmetric but not Ricci-parallel")
    _check_field("line", exp.lines, exp.line_none, rep.walker.line, entry, env, f, run.notes)
    _check_field("plane", exp.planes, exp.plane_none, rep.walker.plane, entry, env, f, run.notes)
    if rep.walker.oracle_agreement is False:
        f.append("float oracle disagrees with the exact verdicts")
    for res in (rep.walker.line, rep.walker.plane):
        if res.verdict == "none" and not res.certificate.get("exhaustive", False):
            f.append("none verdict without an exhaustive certificate")
    return run


def verify_entry(entry: CatalogEntry, seed: int = 0, trials: int = 3) -> EntryResult:
    if not entry.is_full:
        return EntryResult(entry.id, SKIPPED)
    try:
        assignments = trial_assignments(entry, seed, trials)
    except WalkerlabError as exc:
        return EntryResult(entry.id, FAIL, error=f"no admissible parameters: {exc}")
    runs = []
    for params in assignments:
        try:
            runs.append(check_run(entry, params))
        except WalkerlabError as exc:
            r = RunResult({k: str(v) for k, v in params.items()})
            r.failures.append(f"{type(exc).__name__}: {exc}")
            runs.append(r)
    status = PASS if all(r.ok for r in runs) else FAIL
    return EntryResult(entry.id, status, runs)


def verify_catalog(entries, seed: int = 0, trials: int = 3) -> list[EntryResult]:
    return sorted((verify_entry(e, seed, trials) for e in entries), key=lambda r: r.id)


def summary_dict(results: list[EntryResult], *, seed: int, trials: int) -> dict:
    return {
        "seed": seed,
        "trials": trials,
        "passed": sum(r.status == PASS for r in results),
        "failed": sum(r.status == FAIL for r in results),
        "skipped": sum(r.status == SKIPPED for r in results),
        "entries": [
            {
                "id": r.id,
                "status": r.status,
                "runs": [
                    {
                        "params": run.params,
                        "ok": run.ok,
                        "failures": run.failures,
                        "notes": run.notes,
                        "segre": run.report.segre.render if run.report else None,
                        "line": run.report.walker.line.verdict if run.report else None,
                        "plane": run.report.walker.plane.verdict if run.report else None,
                        "certificates": {
                            "line": run.report.walker.line.certificate,
                            "plane": run.report.walker.plane.certificate,
                        } if run.report else None,
                    }
                    for run in r.runs
                ],
                **({"error": r.error} if r.error else {}),
            }
            for r in results
        ],
    }
