"""Command-line front end.

Subcommands: ``catalog list|export``, ``build-mps``, ``build-ehmm-state``,
``verify theorem1``, ``extract``, ``decompose``, ``entropy``, ``selftest``.
Exit codes: 0 success / bound holds, 1 verification failure, 2 usage or I/O
error.  Human tables round to 12 significant digits; ``--format json`` emits
full-precision structured output.  The default dense-state size cap comes
from the MPSHMM_SIZE_CAP environment variable when set.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import catalog, selftest, serialize
from .bridge import (
    DECOMPOSE_TOL,
    decompose_tensors,
    extract_classical_hmm,
    observed_mps,
    tensors_from_ehmm,
)
from .ehmm import (
    DEFAULT_SIZE_CAP,
    EhmmModel,
    build_psi_hn,
    build_psi_hon,
    build_psi_on,
    is_unitary,
)
from .entropy import check_bound
from .linalg import SUPPORT_EPS, TensorVector
from .mps import SiteTensorSet, build_state, state_norm

__all__ = ["main"]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.12g}"


def _fmt_complex(z: complex) -> str:
    if z.imag == 0.0:
        return _fmt(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{_fmt(z.real)}{sign}{_fmt(abs(z.imag))}j"


def _print_matrix(label: str, mat: np.ndarray) -> None:
    print(label)
    for row in np.asarray(mat):
        print("  [" + ", ".join(_fmt_complex(complex(z)) for z in row) + "]")


def _size_cap_default() -> int:
    env = os.environ.get("MPSHMM_SIZE_CAP")
    return int(env) if env else DEFAULT_SIZE_CAP


def _theta_values(raw: str | None) -> list[float] | None:
    if raw is None:
        return None
    return [float(x) for x in raw.split(",") if x]


def _entry_from_name(name: str, theta: str | None) -> catalog.CatalogEntry:
    return catalog.get(name, theta=_theta_values(theta))


def _resolve_model(args: argparse.Namespace) -> EhmmModel:
    if getattr(args, "model", None):
        return serialize.load_model(args.model)
    if getattr(args, "name", None):
        entry = _entry_from_name(args.name, getattr(args, "theta", None))
        if entry.model is None:
            raise ValueError(f"catalog entry {args.name!r} carries no model")
        return entry.model
    raise ValueError("provide --model FILE or --name NAME")


def _resolve_tensors(args: argparse.Namespace) -> SiteTensorSet:
    if getattr(args, "tensors", None):
        return serialize.load_tensors(args.tensors)
    if getattr(args, "name", None):
        entry = _entry_from_name(args.name, getattr(args, "theta", None))
        if entry.tensors is None:
            raise ValueError(f"catalog entry {args.name!r} carries no tensors")
        return entry.tensors
    raise ValueError("provide --tensors FILE or --name NAME")


def _emit_state(v: TensorVector, args: argparse.Namespace, heading: str) -> None:
    doc = serialize.state_to_dict(v)
    if args.out:
        serialize.dump_json(doc, args.out)
        print(f"wrote {args.out}")
    if args.format == "json":
        print(serialize.dump_json(doc))
        return
    print(heading)
    nonzero = int(np.count_nonzero(v.entries))
    print(
        f"factors: {list(v.factor_dims)}  norm: {_fmt(v.norm())}  "
        f"nonzero coefficients: {nonzero}/{v.dim}"
    )
    for idx, z in enumerate(v.entries):
        if abs(z) > 0:
            word = np.unravel_index(idx, v.factor_dims)
            print(f"  |{''.join(str(s) for s in word)}> : {_fmt_complex(complex(z))}")


def _cmd_catalog(args: argparse.Namespace) -> int:
    if args.action == "list":
        for info in catalog.list_entries():
            req = f" (requires {', '.join(info.requires)})" if info.requires else ""
            parts = [x for x, flag in (("tensors", info.has_tensors), ("model", info.has_model)) if flag]
            print(f"{info.name:<13} {'+'.join(parts):<14}{info.summary}{req}")
        return 0
    entry = _entry_from_name(args.entry, args.theta)
    out_dir = Path(args.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if entry.tensors is not None:
        path = out_dir / f"{entry.name}.tensors.json"
        serialize.dump_json(serialize.tensors_to_dict(entry.tensors), path)
        print(f"wrote {path}")
    if entry.model is not None:
        path = out_dir / f"{entry.name}.model.json"
        serialize.dump_json(serialize.model_to_dict(entry.model), path)
        print(f"wrote {path}")
    if entry.notes:
        print(f"notes: {entry.notes}")
    return 0


def _cmd_build_mps(args: argparse.Namespace) -> int:
    if args.tensors or (args.name and not args.model):
        t = _resolve_tensors(args)
    else:
        t = tensors_from_ehmm(_resolve_model(args), require_unitary=False)
    state = build_state(t, args.sites, args.size_cap)
    _emit_state(state, args, f"MPS on {args.sites} sites")
    print(f"transfer-route norm: {_fmt(state_norm(t, args.sites))}")
    return 0


def _cmd_build_ehmm_state(args: argparse.Namespace) -> int:
    model = _resolve_model(args)
    builder = {"hon": build_psi_hon, "hn": build_psi_hn, "on": build_psi_on}[args.which]
    state = builder(model, args.n, args.size_cap)
    _emit_state(state, args, f"state '{args.which}' on n={args.n} sites")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.what != "theorem1":
        raise ValueError(f"unknown verification target {args.what!r}")
    model = _resolve_model(args)
    if not all(is_unitary(u) for u in model.hidden):
        print("note: hidden matrices are not unitary; gauge condition not implied")
    t = tensors_from_ehmm(model, require_unitary=False)
    direct = build_state(t, args.N, args.size_cap)
    failed = False
    for n in args.n:
        measured = observed_mps(model, args.N, n, args.size_cap)
        dev = float(np.max(np.abs(measured.entries - direct.entries)))
        status = "ok" if dev <= args.tol else "FAIL"
        print(f"n={n}: max deviation {dev:.3e}  {status}")
        failed = failed or dev > args.tol
    return 1 if failed else 0


def _cmd_extract(args: argparse.Namespace) -> int:
    t = _resolve_tensors(args)
    extracted = extract_classical_hmm(t)
    doc = serialize.extracted_to_dict(extracted)
    if args.out:
        serialize.dump_json(doc, args.out)
        print(f"wrote {args.out}")
    if args.format == "json":
        print(serialize.dump_json(doc))
        return 0
    for idx, (p, q) in enumerate(zip(extracted.transitions, extracted.emissions), start=1):
        site = "every site" if extracted.translation_invariant else f"site {idx}"
        _print_matrix(f"transition matrix ({site}):", p)
        _print_matrix(f"emission matrix ({site}):", q)
    return 0


def _cmd_decompose(args: argparse.Namespace) -> int:
    t = _resolve_tensors(args)
    result = decompose_tensors(t, args.tol)
    doc = serialize.decomposition_to_dict(result)
    if args.out:
        serialize.dump_json(doc, args.out)
        print(f"wrote {args.out}")
    if args.format == "json":
        print(serialize.dump_json(doc))
        return 0 if result.feasible else 1
    if not result.feasible:
        w = result.witness
        print(
            f"infeasible, site {w.site}, hidden index {w.hidden_index}: "
            f"{w.reason} (sigma2 = {_fmt(w.sigma2)})"
        )
        return 1
    for idx, (u, chi) in enumerate(zip(result.hidden, result.emission), start=1):
        site = "every site" if result.translation_invariant else f"site {idx}"
        _print_matrix(f"hidden amplitudes U ({site}):", u)
        _print_matrix(f"emission amplitudes chi ({site}):", chi)
    print(f"reconstruction error: {result.reconstruction_error:.3e}")
    return 0


def _cmd_entropy(args: argparse.Namespace) -> int:
    model = _resolve_model(args)
    report = check_bound(model, args.N, eps=args.eps, size_cap=args.size_cap)
    doc = serialize.bound_report_to_dict(report)
    if args.out:
        serialize.dump_json(doc, args.out)
        print(f"wrote {args.out}")
    if args.format == "json":
        print(serialize.dump_json(doc))
    else:
        rows = [
            ("S(rho_N || rho_O,N)", _fmt(report.s_value)),
            ("lower bound (RHS)", _fmt(report.rhs_value)),
            ("S of dephased pair", _fmt(report.s_diag)),
            ("holds", str(report.holds)),
            ("trace rho_N", _fmt(report.trace_rho)),
            ("trace rho_O,N", _fmt(report.trace_sigma)),
            ("S (unit-trace rho)", _fmt(report.s_value_normalized)),
            ("RHS (unit-trace rho)", _fmt(report.rhs_value_normalized)),
            ("holds (unit-trace)", str(report.holds_normalized)),
            ("support violation", str(report.support_violation)),
            ("hidden unitary", str(report.hidden_unitary)),
        ]
        width = max(len(k) for k, _ in rows)
        for key, val in rows:
            print(f"{key:<{width}}  {val}")
    return 0 if report.holds and report.holds_normalized else 1


def _cmd_selftest(args: argparse.Namespace) -> int:
    results = selftest.run_all(fixture_path=args.fixture)
    return 0 if all(r.passed for r in results) else 1


def _int_list(raw: str) -> list[int]:
    try:
        return [int(x) for x in raw.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {raw!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpshmm",
        description=(
            "Periodic matrix product states as partial observations of "
            "entangled hidden Markov models."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, out: bool = True) -> None:
        p.add_argument("--format", choices=("table", "json"), default="table")
        if out:
            p.add_argument("--out", help="write structured JSON to this path")

    def add_name(p: argparse.ArgumentParser) -> None:
        p.add_argument("--name", help="catalog entry name")
        p.add_argument("--theta", help="comma-separated theta values for the theta family")

    p_cat = sub.add_parser("catalog", help="list or export named constructions")
    cat_sub = p_cat.add_subparsers(dest="action", required=True)
    cat_sub.add_parser("list", help="show available entries")
    p_exp = cat_sub.add_parser("export", help="write tensor/model files for an entry")
    p_exp.add_argument("entry")
    p_exp.add_argument("--theta")
    p_exp.add_argument("--dir", default=".")
    p_cat.set_defaults(func=_cmd_catalog)

    p_bm = sub.add_parser("build-mps", help="dense periodic MPS from tensors or a model")
    p_bm.add_argument("--tensors", help="tensor-set JSON file")
    p_bm.add_argument("--model", help="model JSON file (tensors derived from it)")
    add_name(p_bm)
    p_bm.add_argument("--sites", type=int, required=True)
    p_bm.add_argument("--size-cap", type=int, default=_size_cap_default())
    add_common(p_bm)
    p_bm.set_defaults(func=_cmd_build_mps)

    p_be = sub.add_parser("build-ehmm-state", help="joint/hidden/observation state vectors")
    p_be.add_argument("--model", help="model JSON file")
    add_name(p_be)
    p_be.add_argument("--n", type=int, required=True)
    p_be.add_argument("--which", choices=("hon", "hn", "on"), default="hon")
    p_be.add_argument("--size-cap", type=int, default=_size_cap_default())
    add_common(p_be)
    p_be.set_defaults(func=_cmd_build_ehmm_state)

    p_ver = sub.add_parser("verify", help="verify the partial-measurement identity")
    p_ver.add_argument("what", choices=("theorem1",))
    p_ver.add_argument("--model")
    add_name(p_ver)
    p_ver.add_argument("--N", type=int, required=True, help="number of kept sites")
    p_ver.add_argument("--n", type=_int_list, required=True, help="joint-state lengths, e.g. 3,4,5")
    p_ver.add_argument("--tol", type=float, default=1e-10)
    p_ver.add_argument("--size-cap", type=int, default=_size_cap_default())
    p_ver.set_defaults(func=_cmd_verify)

    p_ex = sub.add_parser("extract", help="classical transition/emission matrices")
    p_ex.add_argument("--tensors")
    add_name(p_ex)
    add_common(p_ex)
    p_ex.set_defaults(func=_cmd_extract)

    p_dec = sub.add_parser("decompose", help="rank-one factorization a = U * chi")
    p_dec.add_argument("--tensors")
    add_name(p_dec)
    p_dec.add_argument("--tol", type=float, default=DECOMPOSE_TOL)
    add_common(p_dec)
    p_dec.set_defaults(func=_cmd_decompose)

    p_ent = sub.add_parser("entropy", help="relative-entropy lower-bound report")
    p_ent.add_argument("--model")
    add_name(p_ent)
    p_ent.add_argument("--N", type=int, required=True)
    p_ent.add_argument("--eps", type=float, default=SUPPORT_EPS)
    p_ent.add_argument("--size-cap", type=int, default=_size_cap_default())
    add_common(p_ent)
    p_ent.set_defaults(func=_cmd_entropy)

    p_st = sub.add_parser("selftest", help="run the full verification suite")
    p_st.add_argument("--fixture", help="overlap fixture path (written on first run)")
    p_st.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
