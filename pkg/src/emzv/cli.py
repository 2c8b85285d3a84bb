"""Command-line interface.

Subcommands expose decomposition, q-expansions, constant terms, relation
discovery on both sides (among indices and among the derivations), the
image-constraint checks, the limit-series dump and the built-in
verification suite.  Exit codes: 0 on success (and when every requested
check passes), 1 on computational errors or failed checks (the error name
goes to stderr), 2 on usage errors.

The zeta table ships with the package; ``--mzv-table`` or the environment
variable ``EMZV_MZV_TABLE`` select another file.  Indices are written as
comma-separated entries without spaces (``0,1,0,0``; the empty string is
the empty index).  Note that the table's weight cap bounds the indices the
CLI accepts; the verification suite exercises the closed-form layers beyond
it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .coeffring import (
    MzvTable,
    load_mzv_table,
    render_coeff,
    shipped_table,
)
from .decomp import (
    decompose,
    emzv_qexp,
    find_emzv_relations,
    format_index,
    parse_index,
)
from .derlie import (
    find_lie_relations,
    fourier_membership,
    to_E0_basis,
    uu_dual_membership,
)
from .eisalg import EPoly
from .errors import EmzvError, TableOverflow
from .coeffring import parse_coeff
from .ncalg import build_Ainf
from .verify import VerifyContext, run_checks

ENV_TABLE = "EMZV_MZV_TABLE"


@dataclass
class RunConfig:
    mzv_table_path: Path | None = None
    q_order: int = 20
    nc_degree: int = 8
    lie_degree: int = 16
    fmt: str = "text"

    def __post_init__(self) -> None:
        if self.q_order < 1 or self.nc_degree < 1 or self.lie_degree < 4:
            raise ValueError("bounds: order >= 1, degree >= 1, lie degree >= 4")

    def load_table(self) -> MzvTable:
        path = self.mzv_table_path
        if path is None:
            env = os.environ.get(ENV_TABLE)
            if env:
                path = Path(env)
        if path is None:
            return shipped_table()
        with open(path, "rb") as fh:
            return load_mzv_table(fh)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mzv-table", type=Path, default=None, metavar="PATH")
    common.add_argument("--order", type=int, default=20, metavar="N")
    common.add_argument("--degree", type=int, default=8, metavar="D")
    common.add_argument("--lie-degree", type=int, default=16, metavar="DL")
    common.add_argument("--format", choices=("text", "json"), default="text")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    ap = argparse.ArgumentParser(
        prog="emzv", description="exact decomposition into Eisenstein-integral words"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="decomposition of an index")
    p.add_argument("--index", required=True)

    p = sub.add_parser("qexp", parents=[common], help="Fourier expansion of an index")
    p.add_argument("--index", required=True)

    p = sub.add_parser("gamma", parents=[common], help="constant term of an index")
    p.add_argument("--index", required=True)

    p = sub.add_parser(
        "relations", parents=[common], help="linear relations among indices"
    )
    p.add_argument("--length", type=int, required=True, metavar="L")
    p.add_argument("--weight", type=int, required=True, metavar="W")

    p = sub.add_parser(
        "derlie-relations", parents=[common], help="relations among the derivations"
    )
    p.add_argument("--weight", type=int, required=True, metavar="W")
    p.add_argument("--depth", type=int, required=True, metavar="P")

    for name in ("fourier-check", "membership"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--index")
        p.add_argument("--epoly", metavar="JSON")

    p = sub.add_parser("dump-ainf", parents=[common], help="print the limit series")

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--only", default=None, metavar="SUBSTR")

    return ap


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        mzv_table_path=ns.mzv_table,
        q_order=ns.order,
        nc_degree=ns.degree,
        lie_degree=ns.lie_degree,
        fmt=ns.format,
    )


def _emit(cfg: RunConfig, doc: dict, text: str) -> None:
    print(json.dumps(doc, indent=2) if cfg.fmt == "json" else text)


def _guarded_index(ns: argparse.Namespace, table: MzvTable) -> tuple[int, ...]:
    idx = parse_index(ns.index)
    if sum(idx) > table.max_weight:
        raise TableOverflow(
            f"index weight {sum(idx)} exceeds the table cap {table.max_weight}"
        )
    return idx


def _epoly_argument(ns: argparse.Namespace, table: MzvTable) -> EPoly:
    if (ns.index is None) == (ns.epoly is None):
        raise SystemExit(2)
    if ns.index is not None:
        idx = _guarded_index(ns, table)
        return decompose(idx, table).epoly.without_constant()
    terms = json.loads(ns.epoly)
    return EPoly(
        {parse_index(w): parse_coeff(c, table.symbols) for w, c in terms}, table
    )


def _cmd_decompose(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    dec = decompose(_guarded_index(ns, table), table)
    text = f"gamma = {render_coeff(dec.gamma)}\npsi = {dec.epoly}"
    _emit(cfg, dec.to_doc(), text)
    return 0


def _cmd_qexp(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    series = emzv_qexp(_guarded_index(ns, table), cfg.q_order, table)
    doc = {
        "schema": "emzv.qtseries/1",
        "order": series.order,
        "terms": [[m, j, render_coeff(c)] for m, j, c in series.terms()],
    }
    _emit(cfg, doc, str(series))
    return 0


def _cmd_gamma(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    idx = _guarded_index(ns, table)
    dec = decompose(idx, table)
    doc = {
        "schema": "emzv.gamma/1",
        "index": list(idx),
        "gamma": render_coeff(dec.gamma),
    }
    _emit(cfg, doc, render_coeff(dec.gamma))
    return 0


def _cmd_relations(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    indices = [
        idx
        for idx in _indices_exact(ns.length, ns.weight)
    ]
    vectors = find_emzv_relations(indices, table)
    doc = {
        "schema": "emzv.relations/1",
        "indices": [format_index(i) for i in indices],
        "kernel": [[str(q) for q in v] for v in vectors],
    }
    lines = ["indices: " + " ".join(format_index(i) or "()" for i in indices)]
    lines += ["relation: " + " ".join(str(q) for q in v) for v in vectors]
    if not vectors:
        lines.append("no relations")
    _emit(cfg, doc, "\n".join(lines))
    return 0


def _indices_exact(length: int, weight: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for _ in range(length):
        out = [idx + (k,) for idx in out for k in range(weight - sum(idx) + 1)]
    return [idx for idx in out if sum(idx) == weight]


def _cmd_derlie_relations(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    rel = find_lie_relations(ns.weight, ns.depth, cfg.lie_degree)
    lines = [f"candidates: {' '.join(rel.candidates)}"]
    lines += ["relation: " + " ".join(str(q) for q in v) for v in rel.vectors]
    if not rel.vectors:
        lines.append("no relations")
    _emit(cfg, rel.to_doc(), "\n".join(lines))
    return 0


def _cmd_fourier_check(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    poly = _epoly_argument(ns, table)
    comb, residual = to_E0_basis(poly)
    by_qexp = fourier_membership(poly, cfg.q_order)
    ok = residual.is_zero() and by_qexp
    doc = {
        "schema": "emzv.fourier-check/1",
        "residual_zero": residual.is_zero(),
        "qexp_t_free": by_qexp,
        "member": ok,
    }
    _emit(
        cfg,
        doc,
        f"residual: {residual}\nqexp T-free: {by_qexp}\nmember: {ok}",
    )
    return 0 if ok else 1


def _cmd_membership(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    poly = _epoly_argument(ns, table)
    per_comp = uu_dual_membership(poly)
    ok = all(per_comp.values())
    doc = {
        "schema": "emzv.membership/1",
        "components": [
            {"length": l, "letter_sum": s, "member": m}
            for (l, s), m in sorted(per_comp.items())
        ],
        "member": ok,
    }
    text = "\n".join(
        [f"component length={l} letters={s}: {m}" for (l, s), m in sorted(per_comp.items())]
        + [f"member: {ok}"]
    )
    _emit(cfg, doc, text)
    return 0 if ok else 1


def _cmd_dump_ainf(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    table = cfg.load_table()
    ainf = build_Ainf(cfg.nc_degree, table)
    doc = {
        "schema": "emzv.ncseries/1",
        "maxdeg": ainf.maxdeg,
        "terms": [
            [w, render_coeff(c)]
            for w, c in sorted(ainf.items(), key=lambda t: (len(t[0]), t[0]))
        ],
    }
    _emit(cfg, doc, str(ainf))
    return 0


def _cmd_verify(ns: argparse.Namespace) -> int:
    cfg = _config(ns)
    ctx = VerifyContext(
        table=cfg.load_table(),
        q_order=cfg.q_order,
        nc_degree=cfg.nc_degree,
        lie_degree=cfg.lie_degree,
    )
    results = run_checks(ctx, only=ns.only)
    for name, ok, detail in results:
        print(f"{'ok  ' if ok else 'FAIL'} {name} - {detail}")
    if not results:
        print("no checks selected", file=sys.stderr)
        return 2
    return 0 if all(ok for _, ok, _ in results) else 1


_DISPATCH = {
    "decompose": _cmd_decompose,
    "qexp": _cmd_qexp,
    "gamma": _cmd_gamma,
    "relations": _cmd_relations,
    "derlie-relations": _cmd_derlie_relations,
    "fourier-check": _cmd_fourier_check,
    "membership": _cmd_membership,
    "dump-ainf": _cmd_dump_ainf,
    "verify": _cmd_verify,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[ns.command](ns)
    except EmzvError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as exc:
        print(f"ValueError: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
