"""Command line front end.

Exit codes: 0 success, 1 unreadable or invalid input, 2 when some verdict is
INCONCLUSIVE without an exact reason.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .builtins import NAMES, builtin
from .complement import (
    INCONCLUSIVE,
    MULTIPARTITE,
    ModelError,
    SDescription,
    analyse,
    check_every_bipartition,
    complement_model,
    sucpb_certificate,
    upb_certificate,
)
from .density import EmptyComplement, Inconclusive, entangled_via_range, ppt_report, rho_bar, w_completion
from .search import CheckpointError, SearchConfig, search
from .serialize import (
    InputError,
    dumps,
    load_json,
    opset_from_json,
    parse_bipartition,
    parse_dims,
    states_from_json,
    ts_from_json,
    ts_to_json,
)
from .states import OPSet, build_opb, build_S, stopper, verify_orthogonality
from .tiles import validate

CHECKPOINT_ENV = "TILEUPB_CHECKPOINT_DIR"

log = logging.getLogger("tileupb")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for INCONCLUSIVE here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_input(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=NAMES)
    src.add_argument("--tiles", metavar="FILE", help="tile structure JSON")
    p.add_argument("--opset", metavar="FILE", help="product set JSON living on --tiles (default: the reduced set)")
    p.add_argument("--extra", metavar="FILE", help="extra tile-constant product states to add to S")


def _load_description(args) -> tuple[SDescription, str]:
    if args.builtin:
        if args.opset:
            raise InputError("--opset needs --tiles, not --builtin")
        inst = builtin(args.builtin)
        desc = SDescription(inst.ts, inst.opset, inst.name)
    else:
        ts = ts_from_json(load_json(args.tiles))
        report = validate(ts)
        if not report.ok:
            raise InputError(f"invalid tile structure: {dumps(report.to_json()).strip()}")
        opset = opset_from_json(load_json(args.opset)) if args.opset else build_S(ts)
        if opset.dims != ts.dims:
            raise InputError(f"product set dims {opset.dims} differ from tile dims {ts.dims}")
        desc = SDescription(ts, opset, Path(args.tiles).stem)
    if args.extra:
        extra = states_from_json(load_json(args.extra))
        desc = SDescription(desc.ts, desc.opset + OPSet(desc.ts.dims, tuple(extra)), desc.name)
    return desc, desc.name


def _inconclusive(*certs) -> bool:
    return any(c.verdict == INCONCLUSIVE and not c.exact for c in certs)


def cmd_instances(args) -> int:
    _emit({"instances": [{"name": name, "dims": list(builtin(name).ts.dims), "size": len(builtin(name).opset),
                          "metadata": builtin(name).metadata} for name in NAMES]}, args.out)
    return 0


def cmd_construct(args) -> int:
    if args.builtin:
        ts = builtin(args.builtin).ts
    else:
        ts = ts_from_json(load_json(args.tiles))
    report = validate(ts)
    if not report.ok:
        sys.stderr.write(dumps({"validation": report.to_json()}))
        return 1
    opb = build_opb(ts)
    S = build_S(ts)
    stop = stopper(ts.dims, S.states[-1].order)
    bundle = {"tiles": ts_to_json(ts), "opb": opb.to_json(), "S": S.to_json(), "stopper": stop.to_json()}
    if args.out_dir:
        folder = Path(args.out_dir)
        folder.mkdir(parents=True, exist_ok=True)
        for key, value in bundle.items():
            (folder / f"{key}.json").write_text(dumps(value))
        _emit({"written": sorted(f"{k}.json" for k in bundle), "opb_size": len(opb), "S_size": len(S)}, None)
    else:
        _emit(bundle, args.out)
    return 0


def cmd_verify(args) -> int:
    desc, name = _load_description(args)
    if not verify_orthogonality(desc.opset):
        raise InputError("the product set is not orthogonal")
    model = complement_model(desc)
    an = analyse(desc, MULTIPARTITE, model)
    upb, suc = upb_certificate(an), sucpb_certificate(an)
    certs = [upb, suc]
    out = {
        "dims": list(desc.ts.dims),
        "size": len(desc.opset),
        "complement_dim": model.dim,
        "multipartite": {"upb": upb.to_json(), "sucpb": suc.to_json()},
    }
    if args.bipartition:
        bp = parse_bipartition(args.bipartition, desc.ts.n)
        ban = analyse(desc, bp, model)
        bu, bs = upb_certificate(ban), sucpb_certificate(ban)
        certs += [bu, bs]
        out["bipartition"] = {"bipartition": bp.to_json(), "label": bp.label, "upb": bu.to_json(), "sucpb": bs.to_json()}
    if args.every_bipartition:
        if desc.ts.n < 3:
            raise InputError("--every-bipartition needs at least three parties")
        rep = check_every_bipartition(desc, model)
        for v in rep.per_bipartition.values():
            certs += [v["upb"], v["sucpb"]]
        body = rep.to_json()
        out["bipartitions"] = body["bipartitions"]
        out["headline"] = body["headline"]
    if args.ppt:
        rho = rho_bar(desc.opset)
        reports = ppt_report(rho, args.tol)
        out["ppt"] = [r.to_json() for r in reports]
        out["ppt_ok"] = all(r.ok for r in reports)
        try:
            out["entangled_via_range"] = entangled_via_range(desc)
        except Inconclusive:
            out["entangled_via_range"] = None
    if args.w_completion:
        if name != "w-333":
            raise InputError("--w-completion applies to --builtin w-333 only")
        wc = w_completion()
        out["w_completion"] = {"ok": wc.ok, "states": wc.size, "orthogonal": wc.orthogonal,
                               "product_across": "AB|C", "all_product": wc.product_across,
                               "multipartite_upb": wc.multipartite_upb}
    _emit(out, args.out)
    return 2 if _inconclusive(*certs) else 0


def _checkpoint_path(args, cfg_dims) -> str | None:
    if args.checkpoint:
        return args.checkpoint
    folder = os.environ.get(CHECKPOINT_ENV)
    if folder:
        return str(Path(folder) / f"search-{'x'.join(map(str, cfg_dims))}.json")
    return None


def cmd_search(args) -> int:
    dims = parse_dims(args.dims)
    try:
        cfg = SearchConfig(dims, min_tiles=args.min_tiles, max_tiles=args.max_tiles,
                           symmetry_reduction=args.symmetry == "on",
                           checkpoint=_checkpoint_path(args, dims), workers=args.threads)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    res = search(cfg)
    out = res.to_json()
    out["config"] = {"dims": list(cfg.dims), "min_tiles": cfg.min_tiles, "max_tiles": cfg.max_tiles,
                     "symmetry": args.symmetry, "threads": cfg.workers}
    if not args.timing:
        out.pop("wall_time")
    _emit(out, args.out)
    return 0


def cmd_report(args) -> int:
    rows = []
    code = 0
    for name in args.builtin or NAMES:
        inst = builtin(name)
        desc = SDescription(inst.ts, inst.opset, name)
        model = complement_model(desc)
        an = analyse(desc, MULTIPARTITE, model)
        upb, suc = upb_certificate(an), sucpb_certificate(an)
        row = {"name": name, "dims": list(inst.ts.dims), "size": len(inst.opset), "complement_dim": model.dim,
               "multipartite": upb.verdict, "product_span_dim": suc.product_span_dim, "range_criterion": suc.verdict}
        if inst.ts.n >= 3:
            rep = check_every_bipartition(desc, model)
            row["bipartitions"] = {bp.label: {"upb": v["upb"].verdict, "sucpb": v["sucpb"].verdict,
                                              "families": len(v["upb"].families),
                                              "product_span_dim": v["sucpb"].product_span_dim}
                                   for bp, v in rep.per_bipartition.items()}
            row["headline"] = rep.headline
            if any(_inconclusive(v["upb"], v["sucpb"]) for v in rep.per_bipartition.values()):
                code = 2
        if _inconclusive(upb, suc):
            code = 2
        if args.ppt:
            try:
                row["ppt_min_eigenvalue"] = min(r.min_eigenvalue for r in ppt_report(rho_bar(inst.opset)))
            except EmptyComplement:
                row["ppt_min_eigenvalue"] = None
        rows.append(row)
    if args.format == "text":
        for row in rows:
            line = (f"{row['name']:<10} dims={'x'.join(map(str, row['dims']))} |S|={row['size']} "
                    f"complement={row['complement_dim']} multipartite={row['multipartite']} "
                    f"range={row['range_criterion']}")
            sys.stdout.write(line + "\n")
            for label, v in row.get("bipartitions", {}).items():
                sys.stdout.write(f"    {label:<6} {v['upb']:<12} {v['sucpb']:<12} families={v['families']}\n")
    else:
        _emit({"instances": rows}, args.out)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tileupb", description="Product sets from tile structures: construction, certificates, search.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("instances", help="list compiled-in instances")
    q.add_argument("--out")
    q.set_defaults(func=cmd_instances)

    q = sub.add_parser("construct", help="emit the full basis, the reduced set and the stopper")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=NAMES)
    src.add_argument("--tiles", metavar="FILE")
    q.add_argument("--out-dir")
    q.add_argument("--out")
    q.set_defaults(func=cmd_construct)

    q = sub.add_parser("verify", help="certify UPB / SUCPB status")
    _add_input(q)
    q.add_argument("--every-bipartition", action="store_true")
    q.add_argument("--bipartition", metavar="CUT", help="a single cut such as AB|C")
    q.add_argument("--ppt", action="store_true")
    q.add_argument("--tol", type=float, default=1e-9)
    q.add_argument("--w-completion", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("search", help="search for tile structures meeting the rectangle condition in every cut")
    q.add_argument("--dims", required=True, help="e.g. 3,3,3")
    q.add_argument("--min-tiles", type=int, default=5)
    q.add_argument("--max-tiles", type=int, default=24)
    q.add_argument("--checkpoint", help=f"checkpoint file (default under ${CHECKPOINT_ENV} when set)")
    q.add_argument("--threads", type=int, default=1)
    q.add_argument("--symmetry", choices=("on", "off"), default="on")
    q.add_argument("--timing", action="store_true", help="include wall time in the output")
    q.add_argument("--out")
    q.set_defaults(func=cmd_search)

    q = sub.add_parser("report", help="summary of the compiled-in instances")
    q.add_argument("--builtin", action="append", choices=NAMES)
    q.add_argument("--ppt", action="store_true")
    q.add_argument("--format", choices=("json", "text"), default="json")
    q.add_argument("--out")
    q.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, ModelError, CheckpointError, EmptyComplement, ValueError, OSError) as exc:
        sys.stderr.write(f"tileupb: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
