"""Assemble the full per-model report and serialize it (JSON or text)."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .exactalg import Matrix, Scalar
from .geometry import Geometry, analyze
from .model.homogeneous import HomogeneousModel
from .segre import SegreType, classify, to_dict
from .walker import INDETERMINATE, LineFieldResult, PlaneFieldResult, WalkerReport, walker_report


@dataclass(frozen=True)
class Report:
    model: HomogeneousModel
    geometry: Geometry
    segre: SegreType
    walker: WalkerReport
    timing_ms: float

    @property
    def indeterminate(self) -> bool:
        return INDETERMINATE in (self.walker.line.verdict, self.walker.plane.verdict)


def build_report(model: HomogeneousModel, *, oracle: bool = True) -> Report:
    t0 = time.perf_counter()
    geo = analyze(model)
    seg = classify(geo.ricci.Q, model.metric)
    wr = walker_report(model, geo.connection, oracle=oracle)
    return Report(model, geo, seg, wr, (time.perf_counter() - t0) * 1000.0)


# --- serialization ---------------------------------------------------------------

def _s(x) -> str:
    return str(Scalar.coerce(x))


def _mat(M: Matrix) -> list:
    return [[_s(x) for x in row] for row in M.rows]


def _vec(v) -> list:
    return [_s(x) for x in v]


def line_dict(res: LineFieldResult) -> dict:
    out = {
        "verdict": res.verdict,
        "witnesses": [_vec(L.basis[0]) for L in res.witnesses],
        "omegas": [_vec(o) for o in res.omegas],
        "infinite": res.infinite,
        "certificate": res.certificate,
    }
    if res.sentinel:
        out["sentinel"] = res.sentinel
    if res.reason:
        out["reason"] = res.reason
    return out


def plane_dict(res: PlaneFieldResult) -> dict:
    out = {
        "verdict": res.verdict,
        "witnesses": [[_vec(v) for v in W.basis] for W in res.witnesses],
        "infinite": res.infinite,
        "certificate": res.certificate,
    }
    if res.sentinel:
        out["sentinel"] = res.sentinel
    if res.reason:
        out["reason"] = res.reason
    return out


def report_dict(rep: Report, *, timing: bool = True) -> dict:
    m, geo = rep.model, rep.geometry
    out = {
        "id": m.id,
        "params": {k: _s(v) for k, v in sorted(m.params.items())},
        "signature": list(m.signature),
        "lambda": [_mat(L) for L in geo.connection],
        "ricci": _mat(geo.ricci.rho),
        "ricci_operator": _mat(geo.ricci.Q),
        "tau": _s(geo.ricci.tau),
        "segre": to_dict(rep.segre),
        "conformally_flat": geo.conformally_flat,
        "ricci_parallel": geo.ricci_parallel,
        "locally_symmetric": geo.locally_symmetric,
        "walker": {
            "line": line_dict(rep.walker.line),
            "plane": plane_dict(rep.walker.plane),
            "oracle_agreement": rep.walker.oracle_agreement,
        },
    }
    if rep.walker.approx:
        out["approx"] = rep.walker.approx
    if timing:
        out["timing_ms"] = round(rep.timing_ms, 3)
    return out


def to_json(data: dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=False)


def _span_text(vectors, names) -> str:
    def comb(v):
        parts = []
        for name, c in zip(names, v):
            c = Scalar.coerce(c)
            if c.is_zero():
                continue
            t = str(c)
            if t == "1":
                parts.append(name)
            elif t == "-1":
                parts.append("-" + name)
            else:
                parts.append(f"({t})*{name}")
        return "+".join(parts).replace("+-", "-") or "0"

    return "span(" + ", ".join(comb(v) for v in vectors) + ")"


def line_text(res: LineFieldResult, names) -> str:
    if not res.witnesses:
        return f"{res.verdict}" + (f" ({res.reason})" if res.reason else "")
    ws = "; ".join(_span_text(L.basis, names) for L in res.witnesses)
    tail = f" [{res.sentinel}]" if res.sentinel else (" [infinitely many]" if res.infinite else "")
    return f"{res.verdict}: {ws}{tail}"


def plane_text(res: PlaneFieldResult, names) -> str:
    if not res.witnesses:
        tail = f" [{res.sentinel}]" if res.sentinel else ""
        return f"{res.verdict}" + (f" ({res.reason})" if res.reason else "") + tail
    ws = "; ".join(_span_text(W.basis, names) for W in res.witnesses)
    tail = f" [{res.sentinel}]" if res.sentinel else (" [infinitely many]" if res.infinite else "")
    return f"{res.verdict}: {ws}{tail}"


def report_text(rep: Report, *, timing: bool = True) -> str:
    m, geo = rep.model, rep.geometry
    names = m.m_names
    lines = [f"model {m.id}"]
    if m.params:
        lines.append("params " + ", ".join(f"{k}={_s(v)}" for k, v in sorted(m.params.items())))
    lines.append(f"signature ({m.signature[0]},{m.signature[1]})")
    for i, L in enumerate(geo.connection):
        lines.append(f"Lambda_{i + 1} = {_mat(L)}")
    lines.append(f"ricci = {_mat(geo.ricci.rho)}")
    lines.append(f"Q = {_mat(geo.ricci.Q)}")
    lines.append(f"tau = {_s(geo.ricci.tau)}")
    seg = rep.segre.render + (" (approximate)" if rep.segre.approximate else "")
    lines.append(f"segre {seg}")
    lines.append(f"conformally_flat {str(geo.conformally_flat).lower()}")
    lines.append(f"ricci_parallel {str(geo.ricci_parallel).lower()}")
    lines.append(f"locally_symmetric {str(geo.locally_symmetric).lower()}")
    lines.append(f"line {line_text(rep.walker.line, names)}")
    lines.append(f"plane {plane_text(rep.walker.plane, names)}")
    agree = rep.walker.oracle_agreement
    lines.append(f"oracle_agreement {'n/a' if agree is None else str(agree).lower()}")
    if timing:
        lines.append(f"timing_ms {rep.timing_ms:.1f}")
    return "\n".join(lines)
