"""Line-oriented catalog format for homogeneous models.

An entry looks like::

    [entry thm4.2-item3]
    dim_m = 4
    dim_h = 0
    params: c1, c2, c3, c4
    constraint: c2 != 0
    flag: full
    [e3,e4] = (2*c2^2+1)/(2*c2)*(e3+e4)
    g(1,1) = 1
    segre = [(11,2)]
    line = span(e3+e4)

Besides the documented headers two extensions are accepted:
``define: name = expr`` introduces a derived quantity (evaluated after the
parameters, in order) and ``sample: k=v, k=v`` records a preferred parameter
assignment for verification runs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from typing import Mapping

from ..errors import DuplicateId, ExprSyntaxError
from ..exactalg import Scalar
from .expr import Expr, eval_expr, linear_split, parse_expr, to_text

_CMP_OPS = ("!=", "<=", ">=", "==", "=", "<", ">")


@dataclass(frozen=True)
class Constraint:
    lhs: Expr
    op: str
    rhs: Expr

    def holds(self, env: Mapping[str, object]) -> bool:
        s = (eval_expr(self.lhs, env) - eval_expr(self.rhs, env)).sign()
        return {
            "=": s == 0, "==": s == 0, "!=": s != 0,
            "<": s < 0, "<=": s <= 0, ">": s > 0, ">=": s >= 0,
        }[self.op]

    def __str__(self):
        return f"{to_text(self.lhs)} {self.op} {to_text(self.rhs)}"


@dataclass(frozen=True)
class SpanSpec:
    """Expected subspace: generators as {basis symbol: coefficient} maps."""
    generators: tuple
    when: Constraint | None = None

    def __str__(self):
        gens = ", ".join(_combo_text(g) for g in self.generators)
        tail = f" when {self.when}" if self.when is not None else ""
        return f"span({gens}){tail}"


def _combo_text(combo) -> str:
    parts = []
    for sym, coef in combo:
        t = to_text(coef)
        parts.append(sym if t == "1" else f"({t})*{sym}")
    return "+".join(parts) if parts else "0"


@dataclass(frozen=True)
class Expected:
    segre: str | None = None
    conformally_flat: bool | None = None
    ricci_parallel: bool | None = None
    locally_symmetric: bool | None = None
    lines: tuple = ()
    line_none: bool = False
    planes: tuple = ()
    plane_none: bool = False


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    dim_h: int = 0
    params: tuple = ()
    defines: tuple = ()
    constraints: tuple = ()
    flag: str = "full"
    comment: str = ""
    samples: tuple = ()
    brackets: tuple = ()
    metric: tuple = ()
    expected: Expected = field(default_factory=Expected)
    line: int = 0

    @property
    def is_full(self) -> bool:
        return self.flag == "full"

    @property
    def h_symbols(self) -> tuple:
        return tuple(f"e{i + 1}" for i in range(self.dim_h)) if self.dim_h else ()

    @property
    def m_symbols(self) -> tuple:
        if self.dim_h == 0:
            return ("e1", "e2", "e3", "e4")
        return ("u1", "u2", "u3", "u4")

    @property
    def basis_symbols(self) -> tuple:
        return self.h_symbols + self.m_symbols

    def expressions(self):
        """Every expression tree held by the entry (for round-trip checks)."""
        for _, e in self.defines:
            yield e
        for c in self.constraints:
            yield c.lhs
            yield c.rhs
        for _, _, combo in self.brackets:
            for _, e in combo:
                yield e
        for _, e in self.metric:
            yield e


# --- parsing ----------------------------------------------------------------

_ENTRY = re.compile(r"^\[entry\s+(.+?)\]\s*$")
_BRACKET = re.compile(r"^\[\s*(\w+)\s*,\s*(\w+)\s*\]\s*=\s*")
_METRIC = re.compile(r"^g\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*=\s*")
_KEYVAL = re.compile(r"^([A-Za-z_]+)\s*(:|=)\s*")


class _EntryBuilder:
    def __init__(self, ident: str, line: int):
        self.id = ident
        self.line = line
        self.dim_h = 0
        self.params: list[str] = []
        self.defines: list = []
        self.constraints: list = []
        self.flag = "full"
        self.comment: list[str] = []
        self.samples: list = []
        self.brackets: list = []
        self.metric: dict = {}
        self.exp: dict = {"lines": [], "planes": []}

    def build(self) -> CatalogEntry:
        exp = dict(self.exp)
        exp["lines"] = tuple(exp["lines"])
        exp["planes"] = tuple(exp["planes"])
        return CatalogEntry(
            id=self.id, dim_h=self.dim_h, params=tuple(self.params),
            defines=tuple(self.defines), constraints=tuple(self.constraints),
            flag=self.flag, comment="\n".join(self.comment),
            samples=tuple(self.samples), brackets=tuple(self.brackets),
            metric=tuple(sorted(self.metric.items())), expected=Expected(**exp),
            line=self.line,
        )


def _expr_at(text: str, lineno: int, col: int) -> Expr:
    try:
        return parse_expr(text)
    except ExprSyntaxError as exc:
        raise ExprSyntaxError(exc.msg, exc.offset, lineno, col + exc.offset + 1) from None


def _split_top(text: str, sep: str = ",") -> list[tuple[int, str]]:
    """Split at top-level separators; returns (start offset, piece) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((start, text[start:i]))
            start = i + 1
    out.append((start, text[start:]))
    return out


def parse_constraint(text: str, lineno: int = 0, col: int = 0) -> Constraint:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0:
            for op in _CMP_OPS:
                if text.startswith(op, i):
                    lhs = _expr_at(text[:i], lineno, col)
                    rhs = _expr_at(text[i + len(op):], lineno, col + i + len(op))
                    return Constraint(lhs, op, rhs)
    raise ExprSyntaxError("constraint needs a comparison operator", 0, lineno, col + 1)


def parse_assignment(text: str, lineno: int = 0, col: int = 0) -> dict[str, Fraction]:
    """Parse ``k=v, k=v`` with rational values."""
    out: dict[str, Fraction] = {}
    if not text.strip():
        return out
    for off, piece in _split_top(text):
        if "=" not in piece:
            raise ExprSyntaxError(f"expected name=value, found {piece.strip()!r}", off, lineno, col + off + 1)
        k, v = piece.split("=", 1)
        k = k.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", k):
            raise ExprSyntaxError(f"bad parameter name {k!r}", off, lineno, col + off + 1)
        e = _expr_at(v, lineno, col + off + len(k) + 1)
        val = eval_expr(e, {})
        if not val.is_rational:
            raise ExprSyntaxError(f"parameter {k} must be rational", off, lineno, col + off + 1)
        out[k] = val.to_fraction()
    return out


def _parse_bool(text: str, lineno: int, col: int) -> bool:
    t = text.strip().lower()
    if t in ("true", "false"):
        return t == "true"
    raise ExprSyntaxError(f"expected true or false, found {text.strip()!r}", 0, lineno, col + 1)


def _parse_span(text: str, basis: set, lineno: int, col: int, arity: int) -> SpanSpec:
    when = None
    m = re.search(r"\s+when\s+", text)
    if m:
        when = parse_constraint(text[m.end():], lineno, col + m.end())
        text = text[:m.start()]
    t = text.strip()
    if not (t.startswith("span(") and t.endswith(")")):
        raise ExprSyntaxError("expected none or span(...)", 0, lineno, col + 1)
    inner_col = col + text.index("span(") + 5
    pieces = _split_top(t[5:-1])
    if len(pieces) != arity:
        raise ExprSyntaxError(f"span needs {arity} generator(s)", 0, lineno, inner_col + 1)
    gens = []
    for off, piece in pieces:
        e = _expr_at(piece, lineno, inner_col + off)
        try:
            combo = linear_split(e, basis)
        except ValueError as exc:
            raise ExprSyntaxError(str(exc), off, lineno, inner_col + off + 1) from None
        gens.append(tuple(sorted(combo.items())))
    return SpanSpec(tuple(gens), when)


def parse_catalog(text: str) -> list[CatalogEntry]:
    """Parse catalog text; raises ExprSyntaxError (with line/column) or DuplicateId."""
    entries: list[CatalogEntry] = []
    seen: set[str] = set()
    cur: _EntryBuilder | None = None

    def finish():
        if cur is not None:
            entries.append(cur.build())

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        m = _ENTRY.match(stripped)
        if m:
            finish()
            ident = m.group(1).strip()
            if ident in seen:
                raise DuplicateId(f"duplicate entry id {ident!r} at line {lineno}")
            seen.add(ident)
            cur = _EntryBuilder(ident, lineno)
            continue
        if stripped.startswith("[entry"):
            raise ExprSyntaxError("malformed entry header", 0, lineno, indent + 1)
        if cur is None:
            raise ExprSyntaxError("content before the first [entry ...] header", 0, lineno, indent + 1)
        _parse_line(cur, stripped, lineno, indent)
    finish()
    return entries


def _parse_line(cur: _EntryBuilder, s: str, lineno: int, col0: int) -> None:
    basis = set(_basis_for(cur.dim_h))
    m = _BRACKET.match(s)
    if m:
        a, b = m.group(1), m.group(2)
        for sym, off in ((a, m.start(1)), (b, m.start(2))):
            if sym not in basis:
                raise ExprSyntaxError(f"unknown basis symbol {sym!r}", off, lineno, col0 + off + 1)
        if a == b:
            raise ExprSyntaxError("bracket of a symbol with itself", 0, lineno, col0 + 1)
        e = _expr_at(s[m.end():], lineno, col0 + m.end())
        try:
            combo = linear_split(e, basis)
        except ValueError as exc:
            raise ExprSyntaxError(str(exc), m.end(), lineno, col0 + m.end() + 1) from None
        for key in [(a, b), (b, a)]:
            if any((x, y) == key for x, y, _ in cur.brackets):
                raise ExprSyntaxError(f"bracket [{a},{b}] given twice", 0, lineno, col0 + 1)
        cur.brackets.append((a, b, tuple(sorted(combo.items()))))
        return
    m = _METRIC.match(s)
    if m:
        i, j = int(m.group(1)), int(m.group(2))
        if not (1 <= i <= 4 and 1 <= j <= 4):
            raise ExprSyntaxError("metric index out of range 1..4", 0, lineno, col0 + 3)
        key = (min(i, j), max(i, j))
        if key in cur.metric:
            raise ExprSyntaxError(f"metric entry g{key} given twice", 0, lineno, col0 + 1)
        cur.metric[key] = _expr_at(s[m.end():], lineno, col0 + m.end())
        return
    m = _KEYVAL.match(s)
    if not m:
        raise ExprSyntaxError(f"unrecognized line {s!r}", 0, lineno, col0 + 1)
    key, rest, col = m.group(1), s[m.end():], col0 + m.end()
    if key == "dim_m":
        if rest.strip() != "4":
            raise ExprSyntaxError("only dim_m = 4 is supported", 0, lineno, col + 1)
    elif key == "dim_h":
        if not rest.strip().isdigit():
            raise ExprSyntaxError("dim_h needs a nonnegative integer", 0, lineno, col + 1)
        if cur.brackets or cur.exp["lines"] or cur.exp["planes"]:
            raise ExprSyntaxError("dim_h must precede brackets and expectations", 0, lineno, col0 + 1)
        cur.dim_h = int(rest.strip())
    elif key == "params":
        for off, piece in _split_top(rest):
            name = piece.strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise ExprSyntaxError(f"bad parameter name {name!r}", off, lineno, col + off + 1)
            cur.params.append(name)
    elif key == "define":
        if "=" not in rest:
            raise ExprSyntaxError("define needs name = expr", 0, lineno, col + 1)
        name, body = rest.split("=", 1)
        cur.defines.append((name.strip(), _expr_at(body, lineno, col + len(name) + 1)))
    elif key == "constraint":
        cur.constraints.append(parse_constraint(rest, lineno, col))
    elif key == "flag":
        flag = rest.strip()
        if flag not in ("full", "stub"):
            raise ExprSyntaxError("flag must be full or stub", 0, lineno, col + 1)
        cur.flag = flag
    elif key == "comment":
        cur.comment.append(rest.strip())
    elif key == "sample":
        cur.samples.append(tuple(sorted(parse_assignment(rest, lineno, col).items())))
    elif key == "segre":
        cur.exp["segre"] = rest.strip()
    elif key in ("conformally_flat", "ricci_parallel", "locally_symmetric"):
        cur.exp[key] = _parse_bool(rest, lineno, col)
    elif key in ("line", "plane"):
        if rest.strip() == "none":
            cur.exp[f"{key}_none"] = True
        else:
            arity = 1 if key == "line" else 2
            cur.exp[key + "s"].append(_parse_span(rest, basis, lineno, col, arity))
    else:
        raise ExprSyntaxError(f"unknown key {key!r}", 0, lineno, col0 + 1)


def _basis_for(dim_h: int) -> tuple:
    if dim_h == 0:
        return ("e1", "e2", "e3", "e4")
    return tuple(f"e{i + 1}" for i in range(dim_h)) + ("u1", "u2", "u3", "u4")


# --- catalog access -----------------------------------------------------------

def load_catalog(path) -> list[CatalogEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.read())


def builtin_catalog() -> list[CatalogEntry]:
    text = resources.files("walkerlab.model").joinpath("data/builtin.catalog").read_text("utf-8")
    return parse_catalog(text)


def merge_catalogs(base: list[CatalogEntry], extra: list[CatalogEntry]) -> list[CatalogEntry]:
    """Overlay extra entries on base.

    An extra entry whose id names a stub in base and which supplies brackets
    completes that stub: brackets (and anything else it gives) come from the
    extra entry, missing metric/expectations/params are kept from the stub.
    Other clashes are replaced outright; new ids are appended.
    """
    index = {e.id: i for i, e in enumerate(base)}
    out = list(base)
    for e in extra:
        if e.id not in index:
            out.append(e)
            continue
        old = out[index[e.id]]
        if old.is_full:
            out[index[e.id]] = e
            continue
        out[index[e.id]] = replace(
            old,
            dim_h=e.dim_h if e.brackets else old.dim_h,
            params=old.params + tuple(p for p in e.params if p not in old.params),
            defines=old.defines + e.defines,
            constraints=old.constraints + e.constraints,
            flag=e.flag if e.brackets else old.flag,
            comment="\n".join(x for x in (old.comment, e.comment) if x),
            samples=e.samples or old.samples,
            brackets=e.brackets,
            metric=e.metric or old.metric,
            expected=e.expected if e.expected != Expected() else old.expected,
        )
    return out


def find_entry(entries: list[CatalogEntry], ident: str) -> CatalogEntry | None:
    for e in entries:
        if e.id == ident:
            return e
    for e in entries:
        if ident.startswith("komrakov-") and e.id == ident[len("komrakov-"):]:
            return e
        if e.id == "komrakov-" + ident:
            return e
    # a bare case label reaches its metric-only stub row
    bare = ident[len("komrakov-"):] if ident.startswith("komrakov-") else ident
    for e in entries:
        if e.id == bare + "-stub":
            return e
    return None


def select_entries(entries: list[CatalogEntry], case: str | None) -> list[CatalogEntry]:
    """Entries matching a --case selector: exact id, or ids of the form case-..."""
    if case is None:
        return list(entries)
    exact = find_entry(entries, case)
    if exact is not None:
        return [exact]
    return [e for e in entries if e.id.startswith(case + "-")]


def coerce_env(env: Mapping[str, object]) -> dict[str, Scalar]:
    return {k: Scalar.coerce(v) for k, v in env.items()}
