"""``edgeocc`` command line: detect, oracle, eval, fuse, bench, synth."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as eio
from .bench import bench_csv, bench_scene, edge_fraction, run_bench
from .core import DirectionSpec, DisparityError, fuse_median, synth_scene
from .detector import DetectorConfig, detect_array_stats
from .evaluation import confusion, csv_rows, macro_average, render_confusion
from .oracle import OracleConfig, oracle_array

DEFAULT_ANGLES = "0,45,90,135,180,225,270,315"


class CliError(Exception):
    pass


def parse_angles(text: str) -> list[DirectionSpec]:
    try:
        degs = [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise CliError(f"bad --angles value {text!r}") from None
    if not degs:
        raise CliError("--angles is empty")
    return [DirectionSpec.from_degrees(a) for a in degs]


def mask_name(prefix: str, direction: DirectionSpec) -> str:
    deg = round(direction.degrees, 6)
    tag = f"{int(deg):03d}" if deg == int(deg) else f"{deg:g}".replace(".", "p")
    return f"{prefix}_{tag}.pgm"


def detector_config(args) -> DetectorConfig:
    defaults = DetectorConfig()
    kw = {}
    for flag, field in (("t_edge", "t_edge"), ("t_dist", "t_dist"), ("t_disp", "t_disp"),
                        ("neighbors", "neighbors"), ("max_scan", "max_scan_length")):
        val = getattr(args, flag, None)
        if val is not None:
            kw[field] = val
    try:
        return DetectorConfig(**{**defaults.__dict__, **kw})
    except ValueError as exc:
        raise CliError(str(exc)) from None


def oracle_config(args) -> OracleConfig:
    kw = {}
    if getattr(args, "t_disp", None) is not None:
        kw["t_disp"] = args.t_disp
    if getattr(args, "overlap_radius", None) is not None:
        kw["overlap_radius"] = args.overlap_radius
    try:
        return OracleConfig(**kw)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _load(path, sanitize: bool):
    try:
        return eio.load_pfm(path, sanitize=sanitize)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}") from None


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_detect(args) -> int:
    d = _load(args.disparity, args.sanitize)
    out = _out_dir(args.out_dir)
    dirs = parse_angles(args.angles)
    for mask, st in detect_array_stats(d, dirs, detector_config(args), threads=args.threads):
        eio.save_mask(out / mask_name("mask", DirectionSpec.from_degrees(st.baseline_degrees)), mask)
        print(f"angle={st.baseline_degrees:g} candidates={st.candidates} "
              f"scan_length={st.scan_length} occluded={st.occluded}")
    return 0


def cmd_oracle(args) -> int:
    d = _load(args.disparity, args.sanitize)
    out = _out_dir(args.out_dir)
    dirs = parse_angles(args.angles)
    for direction, mask in zip(dirs, oracle_array(d, dirs, oracle_config(args))):
        eio.save_mask(out / mask_name("oracle", direction), mask)
        print(f"angle={direction.degrees:g} occluded={mask.count()}")
    return 0


def cmd_eval(args) -> int:
    gts = args.gt
    if args.disparity:
        # predictions computed on the fly, one detector run per disparity file
        if len(args.disparity) != len(gts):
            raise CliError(f"{len(args.disparity)} disparity files but {len(gts)} ground-truth masks")
        direction = parse_angles(args.angles)
        if len(direction) != 1:
            raise CliError("eval from disparity takes exactly one angle")
        cfg = detector_config(args)
        preds = [detect_array_stats(_load(p, args.sanitize), direction, cfg, args.threads)[0][0]
                 for p in args.disparity]
        names = [Path(p).stem for p in args.disparity]
    elif args.pred:
        if len(args.pred) != len(gts):
            raise CliError(f"{len(args.pred)} predictions but {len(gts)} ground-truth masks")
        preds = [eio.load_mask(p, args.threshold) for p in args.pred]
        names = [Path(p).stem for p in args.pred]
    else:
        raise CliError("eval needs --pred or --disparity")

    rows = []
    for name, pred, gt_path in zip(names, preds, gts):
        gt = eio.load_mask(gt_path, args.threshold)
        try:
            rows.append((name, confusion(pred, gt)))
        except ValueError as exc:
            raise CliError(f"{name}: {exc}") from None
        if args.confusion_out and len(gts) == 1:
            eio.save_confusion(args.confusion_out, render_confusion(pred, gt))
    text = csv_rows(rows)
    if len(rows) > 1:
        total = rows[0][1]
        for _, s in rows[1:]:
            total = total + s
        text += csv_rows([("micro", total)]).split("\n", 1)[1]
        mac = macro_average([s for _, s in rows])
        text += (f"macro,{total.tp},{total.fp},{total.fn},{total.tn},"
                 f"{mac.precision:.6f},{mac.recall:.6f},{mac.f1:.6f}\n")
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8", newline="\n")
    sys.stdout.write(text)
    return 0


def cmd_fuse(args) -> int:
    maps = [_load(p, args.sanitize) for p in args.disparity]
    try:
        fused = fuse_median(maps)
    except DisparityError as exc:
        raise CliError(str(exc)) from None
    eio.save_pfm(args.out, fused)
    print(f"fused {len(maps)} maps into {args.out}")
    return 0


def cmd_bench(args) -> int:
    d = _load(args.disparity, args.sanitize) if args.disparity else bench_scene(seed=args.seed)
    dirs = parse_angles(args.angles)
    timings = run_bench(d, dirs, args.repeat, detector_config(args), oracle=args.oracle,
                        threads=args.threads, oracle_cfg=oracle_config(args))
    text = bench_csv(timings, d.width, d.height, len(dirs))
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8", newline="\n")
    sys.stdout.write(text)
    print(f"# edge_fraction={edge_fraction(d):.4f}", file=sys.stderr)
    return 0


def _rect(text: str) -> tuple[int, ...]:
    parts = tuple(int(p) for p in text.split(","))
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("rect is x0,y0,x1,y1")
    return parts


def cmd_synth(args) -> int:
    params = {k: v for k, v in (("width", args.width), ("height", args.height)) if v is not None}
    if args.kind in ("step", "square"):
        for k in ("bg", "fg"):
            if getattr(args, k) is not None:
                params[k] = getattr(args, k)
    if args.kind == "step" and args.col is not None:
        params["col"] = args.col
    if args.kind == "square" and args.rect is not None:
        params["rect"] = args.rect
    if args.kind == "random_rects":
        for k in ("n_rects", "min_jump", "max_disparity"):
            if getattr(args, k) is not None:
                params[k] = getattr(args, k)
    d = synth_scene(args.kind, params, seed=args.seed)
    eio.save_pfm(args.out, d)
    print(f"wrote {args.kind} {d.width}x{d.height} to {args.out}")
    if args.gt_dir:
        out = _out_dir(args.gt_dir)
        dirs = parse_angles(args.angles)
        for direction, mask in zip(dirs, oracle_array(d, dirs, oracle_config(args))):
            eio.save_mask(out / mask_name("gt", direction), mask)
    return 0


def _thresholds(p):
    p.add_argument("--t-edge", type=float, help="edge threshold (default 1.0)")
    p.add_argument("--t-dist", type=float, help="warped distance threshold (default 2.0)")
    p.add_argument("--t-disp", type=float, help="disparity margin (default 0.5)")
    p.add_argument("--neighbors", type=int, help="sorted neighbours compared (default 8)")
    p.add_argument("--max-scan", type=int, help="scan length cap (default 4096)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edgeocc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="scan-line occlusion masks for each angle")
    p.add_argument("--disparity", required=True)
    p.add_argument("--angles", default=DEFAULT_ANGLES, help="baseline angles in degrees, comma separated")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--sanitize", action="store_true", help="repair inf/NaN from nearest finite pixel")
    _thresholds(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("oracle", help="dense brute-force occlusion masks")
    p.add_argument("--disparity", required=True)
    p.add_argument("--angles", default=DEFAULT_ANGLES)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--t-disp", type=float)
    p.add_argument("--overlap-radius", type=float)
    p.add_argument("--threads", type=int, default=1, help="accepted for symmetry; the oracle is vectorised")
    p.add_argument("--sanitize", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", help="precision/recall/F1 of masks against ground truth")
    p.add_argument("--pred", nargs="+")
    p.add_argument("--disparity", nargs="+", help="run the detector on these instead of reading --pred")
    p.add_argument("--gt", nargs="+", required=True)
    p.add_argument("--angles", default="0", help="single baseline angle when evaluating from --disparity")
    p.add_argument("--csv")
    p.add_argument("--confusion-out", help="colour confusion image (single pair only)")
    p.add_argument("--threshold", type=int, help="binarise non 0/255 masks at value > threshold")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--sanitize", action="store_true")
    _thresholds(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fuse", help="pixel-wise median of disparity maps")
    p.add_argument("--disparity", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sanitize", action="store_true")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("bench", help="time detector (and oracle) over all angles")
    p.add_argument("--disparity", help="PFM input; default is a synthetic 1600x1200 scene")
    p.add_argument("--angles", default=DEFAULT_ANGLES)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--oracle", action="store_true", help="also time the dense oracle")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--sanitize", action="store_true")
    _thresholds(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a synthetic disparity map")
    p.add_argument("--kind", choices=("step", "square", "random_rects"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--bg", type=float)
    p.add_argument("--fg", type=float)
    p.add_argument("--col", type=int)
    p.add_argument("--rect", type=_rect)
    p.add_argument("--n-rects", type=int)
    p.add_argument("--min-jump", type=int)
    p.add_argument("--max-disparity", type=int)
    p.add_argument("--gt-dir", help="also write oracle masks for --angles here")
    p.add_argument("--angles", default=DEFAULT_ANGLES)
    p.add_argument("--t-disp", type=float)
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "threads", 1) < 1:
            raise CliError("--threads must be >= 1")
        return args.func(args)
    except (CliError, DisparityError, eio.FormatError, ValueError, OSError) as exc:
        print(f"edgeocc {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
