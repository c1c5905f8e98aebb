"""Command line interface: construct, optimize, lift, cycles, threshold, simulate, pipeline.

Each subcommand writes its files into ``--out-dir`` together with a
``manifest-<command>.json``; every written file carries the manifest hash.
A result summary goes to stdout in the ``--format`` of choice.

Exit status: 0 on success, 2 on invalid input, 3 on a runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .cycles import SCOPES, count_coupled_cycles, enumerate_cycles
from .exit import DEFAULT_TOL, J_MODELS, run_exit, threshold
from .lifting import LiftedCode, ab_lift, build_coupled
from .partition import (
    cutting_vector_candidate,
    optimize_locality_aware,
    optimize_locality_blind,
)
from .pipeline import preset_cycles, table_row
from .presets import PRESETS, get_preset
from .protograph import (
    PartitionMatrix,
    Protograph,
    build_balanced,
    build_regular,
    build_unbalanced,
    couple_protograph,
    partition_from_local,
    split_by_partition,
)
from .simulate import SNR_CONVENTIONS, SimConfig, run_metadata, simulate_ber

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3


class _Run:
    """Output directory plus the manifest every file refers to."""

    def __init__(self, args, command: str, params: dict, inputs=()):
        self.out = Path(args.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        params = dict(params, seed=args.seed, threads=args.threads)
        self.manifest = fio.RunManifest(command, params, [str(p) for p in inputs if p],
                                        version=__version__)
        self.hash = self.manifest.digest

    def path(self, name: str) -> Path:
        p = self.out / name
        self.manifest.outputs.append(str(p))
        return p

    def close(self) -> dict:
        fio.write_json(self.out / f"manifest-{self.manifest.command}.json", self.manifest.as_dict())
        return {"manifest": self.hash, "outputs": self.manifest.outputs}


def _emit(result: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(result, indent=2, default=fio._json_default))
        return
    flat = {k: (json.dumps(v, default=fio._json_default) if isinstance(v, (list, dict)) else v)
            for k, v in result.items()}
    if fmt == "csv":
        buf = _stdio.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(flat))
        w.writeheader()
        w.writerow(flat)
        sys.stdout.write(buf.getvalue())
    else:
        for k, v in flat.items():
            print(f"{k}: {v}")


# ---------------------------------------------------------------- construct


def cmd_construct(args) -> dict:
    if args.scheme == "regular":
        if args.nu:
            raise ValueError("the regular scheme takes no nu")
        local = build_regular(args.gamma_l, args.kappa)
    elif args.scheme == "balanced":
        local = build_balanced(args.gamma_l, args.kappa, args.nu)
    else:
        local = build_unbalanced(args.gamma_l, args.kappa, args.nu)
    if args.gamma_c < 0:
        raise ValueError("gamma_c must be nonnegative")
    top = np.ones((args.gamma_c, args.kappa), dtype=np.int8)
    proto = Protograph(np.vstack([top, local.entries]), gamma_c=args.gamma_c)
    p_l = PartitionMatrix(partition_from_local(local), gamma_c=0)
    params = {"scheme": args.scheme, "gamma_c": args.gamma_c, "gamma_l": args.gamma_l,
              "kappa": args.kappa, "nu": args.nu}
    run = _Run(args, "construct", params)
    ext = ".json" if args.matrix_format == "json" else ".txt"
    fio.save_matrix(run.path("protograph" + ext), proto, run.hash)
    fio.save_matrix(run.path("partition_local" + ext), p_l, run.hash)
    res = {"rows": proto.rows, "cols": proto.cols, "edges": proto.edges,
           "design_rate": proto.design_rate}
    res.update(run.close())
    return res


# ---------------------------------------------------------------- optimize


def cmd_optimize(args) -> dict:
    p_l = None
    if args.local_partition:
        p_l = fio.load_partition(args.local_partition).entries
        if p_l.shape != (args.gamma_l, args.kappa):
            raise ValueError(f"local partition has shape {p_l.shape}, expected ({args.gamma_l}, {args.kappa})")
    if args.method == "cv":
        cand = cutting_vector_candidate(args.gamma_c, args.gamma_l, args.kappa, args.L)
    elif args.method == "lbo":
        cand = optimize_locality_blind(args.gamma_c, args.kappa, args.L, gamma_l=args.gamma_l)
    else:
        cand = optimize_locality_aware(args.gamma_c, args.gamma_l, args.kappa, args.L)
    params = {"method": args.method, "gamma_c": args.gamma_c, "gamma_l": args.gamma_l,
              "kappa": args.kappa, "L": args.L, "m": 1}
    run = _Run(args, "optimize", params, [args.local_partition])
    part = cand.partition
    report = cand.report()
    if p_l is not None:
        # irregular local rows are applied after the optimization
        part = PartitionMatrix.stack(cand.p_c, p_l)
        b0, b1 = split_by_partition((part.entries != -1).astype(np.int8), part)
        report["objective_f_with_local"] = count_coupled_cycles(b0, b1, args.L).total
    ext = ".json" if args.matrix_format == "json" else ".txt"
    fio.save_matrix(run.path("partition" + ext), part, run.hash)
    report["manifest"] = run.hash
    fio.write_json(run.path("optimize_report.json"), report)
    report.update(run.close())
    return report


# ---------------------------------------------------------------- lift


def _lift_inputs(args):
    if args.preset:
        pre = get_preset(args.preset)
        return pre.lifted(), pre.params(), []
    if not args.protograph:
        raise ValueError("give --preset or --protograph")
    proto = fio.load_protograph(args.protograph)
    if args.partition:
        part = fio.load_partition(args.partition)
        code = build_coupled(proto, part, args.p, args.L)
    else:
        code = ab_lift(proto, args.p)
    params = {"p": args.p, "L": args.L if args.partition else 1,
              "gamma_c": proto.gamma_c, "gamma_l": proto.gamma_l, "kappa": proto.cols}
    return code, params, [args.protograph, args.partition]


def cmd_lift(args) -> dict:
    code, params, inputs = _lift_inputs(args)
    run = _Run(args, "lift", params, inputs)
    fio.write_alist(run.path("code.alist"), code.h)
    geo = code.geometry()
    geo["manifest"] = run.hash
    geo["code_id"] = code.code_id
    fio.write_json(run.path("code.geometry.json"), geo)
    res = {"rows": code.shape[0], "cols": code.shape[1], "edges": int(code.h.nnz),
           "design_rate": code.design_rate}
    res.update(run.close())
    return res


def _load_lifted(alist, geometry=None) -> LiftedCode:
    h = fio.read_alist(alist)
    if geometry is None:
        return LiftedCode(h, p=1, gamma_c=0, gamma_l=0, kappa=h.shape[1])
    g = json.loads(Path(geometry).read_text())
    return LiftedCode(h, g["p"], g["gamma_c"], g["gamma_l"], g["kappa"], g["L"], g["m"],
                      tuple(tuple(r) for r in g["lcn_row_ranges"]), g.get("code_id", ""))


# ---------------------------------------------------------------- cycles


def cmd_cycles(args) -> dict:
    f1 = f2 = f3 = None
    if args.preset:
        pre = get_preset(args.preset)
        scope = args.scope or ("local-protograph" if pre.kind == "lc" else "coupled-protograph")
        count, dec = preset_cycles(pre, scope, args.length)
        params = pre.params()
        inputs = []
    elif args.alist:
        scope = args.scope or "lifted-coupled"
        if not scope.startswith("lifted"):
            raise ValueError("an alist file is a lifted code; use a lifted scope")
        count, dec = enumerate_cycles(fio.read_alist(args.alist), args.length), None
        params, inputs = {}, [args.alist]
    elif args.protograph:
        proto = fio.load_protograph(args.protograph)
        inputs = [args.protograph, args.partition]
        params = {"L": args.L}
        if args.partition:
            scope = "coupled-protograph"
            b0, b1 = split_by_partition(proto, fio.load_partition(args.partition))
            dec = count_coupled_cycles(b0, b1, args.L, length=args.length)
            count = dec.total
        else:
            scope = "local-protograph"
            count, dec = enumerate_cycles(proto, args.length), None
    else:
        raise ValueError("give --preset, --protograph or --alist")
    if dec is not None:
        f1, f2, f3 = dec.f1, dec.f2, dec.f3
    res = {"scope": scope, "length": args.length, "count": int(count), "f1": f1, "f2": f2}
    if args.length == 8 and f3 is not None:
        res["f3"] = f3
    run = _Run(args, "cycles", dict(params, scope=scope, length=args.length), inputs)
    res["manifest"] = run.hash
    fio.write_json(run.path("cycles.json"), res)
    run.close()
    return res


# ---------------------------------------------------------------- threshold


def cmd_threshold(args) -> dict:
    if args.preset:
        pre = get_preset(args.preset)
        mat = pre.analysis_matrix()
        params, inputs = pre.params(), []
    elif args.protograph:
        proto = fio.load_protograph(args.protograph)
        if args.partition:
            b0, b1 = split_by_partition(proto, fio.load_partition(args.partition))
            mat = couple_protograph(b0, b1, args.L)
        else:
            mat = proto.entries
        params, inputs = {"L": args.L}, [args.protograph, args.partition]
    else:
        raise ValueError("give --preset or --protograph")
    params = dict(params, tol=args.tol, j_model=args.j_model, lo=args.lo, hi=args.hi)
    res_t = threshold(mat, tol=args.tol, lo=args.lo, hi=args.hi, model=args.j_model)
    run = _Run(args, "threshold", params, inputs)
    res = {"sigma_star": res_t.sigma_star, "tol": res_t.tolerance, "iterations": res_t.iterations}
    if args.trajectory:
        sig = res_t.bracket[0]
        traj = run_exit(mat, sig, model=args.j_model, record=True).trajectory
        rows = [{"iteration": i, "sigma": sig, "app_min": a, "app_mean": b}
                for i, (a, b) in enumerate(traj)]
        fio.write_rows_csv(run.path("exit_trajectory.csv"), rows,
                           ("iteration", "sigma", "app_min", "app_mean"), run.hash)
    res["manifest"] = run.hash
    fio.write_json(run.path("threshold.json"), dict(res, probes=[list(p) for p in res_t.converged_at]))
    run.close()
    return res


# ---------------------------------------------------------------- simulate


def _snr_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}") from None


def cmd_simulate(args) -> dict:
    if args.preset:
        code = get_preset(args.preset).lifted()
        inputs = []
    elif args.alist:
        code = _load_lifted(args.alist, args.geometry)
        inputs = [args.alist, args.geometry]
    else:
        raise ValueError("give --preset or --alist")
    cfg = SimConfig(tuple(args.snr), max_frames=args.max_frames,
                    min_frame_errors=args.min_frame_errors, max_bp_iters=args.max_iters,
                    decoder_mode=args.mode, rng_seed=args.seed, snr_convention=args.snr_convention,
                    workers=args.threads, chunk_frames=args.chunk, subblock_index=args.subblock)
    meta = run_metadata(cfg, code)
    run = _Run(args, "simulate", {"config": meta["config"], "code_id": code.code_id}, inputs)
    pts = simulate_ber(code, cfg, code_id=code.code_id or (args.preset or ""))
    fio.write_ber_csv(run.path("ber.csv"), pts, run.hash)
    meta["manifest"] = run.hash
    fio.write_json(run.path("run_metadata.json"), meta)
    res = {"points": [dict(p.as_row(), ber_stderr=p.ber_stderr) for p in pts]}
    res.update(run.close())
    return res


# ---------------------------------------------------------------- pipeline


def cmd_pipeline(args) -> dict:
    pre = get_preset(args.preset)
    run = _Run(args, "pipeline", dict(pre.params(), tol=args.tol, j_model=args.j_model))
    row = table_row(pre, tol=args.tol, model=args.j_model, with_c8=not args.no_c8)
    row["manifest"] = run.hash
    fio.write_json(run.path(f"table_{pre.name}.json"), row)
    run.close()
    return row


# ---------------------------------------------------------------- parser


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
    g.add_argument("--threads", type=int, default=d(1), help="worker cap (default 1)")
    g.add_argument("--out-dir", default=d("."), help="directory for output files")
    g.add_argument("--format", choices=("json", "csv", "text"), default=d("json"),
                   help="stdout summary format")
    return g


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sclocality", parents=[_global_flags(True)],
                                 description="SC-LDPC codes with sub-block locality")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    common = [_global_flags(False)]
    presets = sorted(PRESETS)

    p = sub.add_parser("construct", parents=common, help="build a local protograph and its P_L")
    p.add_argument("--scheme", choices=("regular", "balanced", "unbalanced"), required=True)
    p.add_argument("--gamma-l", type=int, required=True)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--nu", type=int, default=0)
    p.add_argument("--gamma-c", type=int, default=0, help="prepend this many all-ones coupling rows")
    p.add_argument("--matrix-format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("optimize", parents=common, help="choose the coupling partition P_C")
    p.add_argument("--method", choices=("cv", "lbo", "lao"), required=True)
    p.add_argument("--gamma-c", type=int, default=3)
    p.add_argument("--gamma-l", type=int, default=3)
    p.add_argument("--kappa", type=int, default=13)
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--local-partition", help="P_L file stacked under the optimized P_C")
    p.add_argument("--matrix-format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("lift", parents=common, help="AB-lift and couple into a parity-check matrix")
    p.add_argument("--preset", choices=presets)
    p.add_argument("--protograph")
    p.add_argument("--partition")
    p.add_argument("--p", type=int, default=13)
    p.add_argument("--L", type=int, default=10)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("cycles", parents=common, help="count 4-, 6- or 8-cycles")
    p.add_argument("--preset", choices=presets)
    p.add_argument("--protograph")
    p.add_argument("--partition")
    p.add_argument("--alist")
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--length", type=int, choices=(4, 6, 8), default=6)
    p.add_argument("--scope", choices=SCOPES)
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("threshold", parents=common, help="EXIT threshold by bisection")
    p.add_argument("--preset", choices=presets)
    p.add_argument("--protograph")
    p.add_argument("--partition")
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--lo", type=float, default=0.01)
    p.add_argument("--hi", type=float, default=3.0)
    p.add_argument("--j-model", choices=J_MODELS, default="exact")
    p.add_argument("--trajectory", action="store_true", help="also write the EXIT trajectory CSV")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", parents=common, help="BER Monte Carlo over AWGN")
    p.add_argument("--preset", choices=presets)
    p.add_argument("--alist")
    p.add_argument("--geometry", help="geometry sidecar JSON (needed for local mode)")
    p.add_argument("--snr", type=_snr_list, required=True, help="SNR points in dB, e.g. '4,4.5,5'")
    p.add_argument("--max-frames", type=int, default=10_000)
    p.add_argument("--min-frame-errors", type=int, default=50)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--mode", choices=("global", "local"), default="global")
    p.add_argument("--snr-convention", choices=SNR_CONVENTIONS, default="es")
    p.add_argument("--chunk", type=int, default=256)
    p.add_argument("--subblock", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", parents=common, help="cycle counts and threshold for a preset")
    p.add_argument("--preset", choices=presets, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--j-model", choices=J_MODELS, default="exact")
    p.add_argument("--no-c8", action="store_true", help="skip the 8-cycle counts")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (ValueError, IndexError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - surfaced as a runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _emit(result, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
