"""Command-line interface: ``run``, ``batch``, ``eval`` and ``sweep``."""
import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import evaluation, imaging
from .composer import PipelineParams, analyze, refine, run_pipeline
from .errors import PipelineError, SaliencyError

K_FRAC_GRID = [round(0.1 * i, 1) for i in range(1, 11)]
GAMMA_GRID = [1.0, 2.0, 3.0, 4.0, 5.0]


class CommandError(Exception):
    pass


def _params(args):
    return PipelineParams(
        superpixels=args.superpixels,
        k_frac=args.k_frac,
        gamma=args.gamma,
        seed=args.seed,
        slic_m=args.slic_m,
    )


def _add_pipeline_flags(p):
    p.add_argument("--superpixels", type=int, default=250, help="target superpixel count")
    p.add_argument("--k-frac", type=float, default=0.8, help="dense subgraph size as a fraction of regions")
    p.add_argument("--gamma", type=float, default=3.0, help="map enhancement exponent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slic-m", type=float, default=10.0, help="SLIC compactness weight")


def _add_workers_flag(p):
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="parallel worker processes (default: CPU count)")


def _fmt_stage_error(path, exc):
    if isinstance(exc, PipelineError):
        return f"{path}: stage '{exc.stage}': {exc.cause}"
    return f"{path}: {exc}"


def _dump_intermediates(result, out_path):
    base = os.path.splitext(out_path)[0]
    a = result.analysis
    imaging.save_map_png(a.gbvs_map, base + "_gbvs.png")
    imaging.save_map_png(a.compactness, base + "_compactness.png")
    imaging.save_labels_png(a.labels, base + "_labels.png")
    with open(base + "_entropy.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["fraction", "threshold", "entropy"])
        if len(a.sparse.thresholds):
            wmax = a.gbvs_weights.max()
            for t, en in zip(a.sparse.thresholds, a.sparse.entropies):
                w.writerow([f"{t / wmax:.2f}", f"{t:.8f}", f"{en:.8f}"])
    with open(base + "_dks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vertex", "induced_degree"])
        for v, d in zip(result.dks.vertices, result.dks.induced_degrees):
            w.writerow([int(v), int(d)])
    with open(base + "_stats.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_regions", "n_edges", "threshold", "entropy", "k", "density", "procedure"])
        w.writerow([a.n_regions, a.sparse.n_edges, f"{a.sparse.threshold:.8f}",
                    f"{a.sparse.entropy:.8f}", result.k, f"{result.dks.density:.6f}",
                    result.dks.procedure])


def _process_one(job):
    """Run one image and write its outputs; returns ``(in_path, error or None, timings)``."""
    in_path, out_path, params, dump = job
    try:
        img = imaging.load_image(in_path)
        result = run_pipeline(img, params)
        imaging.save_map_png(result.saliency, out_path)
        if dump:
            _dump_intermediates(result, out_path)
    except (SaliencyError, OSError) as exc:
        return in_path, _fmt_stage_error(in_path, exc), {}
    return in_path, None, result.timings


def _map_jobs(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def cmd_run(args):
    if not os.path.exists(args.input):
        raise CommandError(f"input not found: {args.input}")
    out_dir = os.path.dirname(os.path.abspath(args.out))
    if not os.path.isdir(out_dir):
        raise CommandError(f"output directory does not exist: {out_dir}")
    _, err, timings = _process_one((args.input, args.out, _params(args), args.dump_intermediates))
    if err:
        raise CommandError(err)
    for stage, t in timings.items():
        print(f"{stage:12s} {t * 1000:9.1f} ms")
    print(f"{'total':12s} {sum(timings.values()) * 1000:9.1f} ms")
    return 0


def _list_images(d):
    if not os.path.isdir(d):
        raise CommandError(f"not a directory: {d}")
    return [os.path.join(d, fn) for fn in sorted(os.listdir(d))
            if os.path.splitext(fn)[1].lower() in evaluation.IMAGE_EXTENSIONS]


def cmd_batch(args):
    images = _list_images(args.in_dir)
    if not images:
        raise CommandError(f"no images in {args.in_dir}")
    os.makedirs(args.out_dir, exist_ok=True)
    params = _params(args)
    jobs = [(p, os.path.join(args.out_dir, os.path.splitext(os.path.basename(p))[0] + ".png"),
             params, args.dump_intermediates) for p in images]
    failures = 0
    for path, err, _ in _map_jobs(_process_one, jobs, args.workers):
        if err:
            failures += 1
            print(f"error: {err}", file=sys.stderr)
    print(f"processed {len(jobs) - failures}/{len(jobs)} images into {args.out_dir}")
    return 1 if failures else 0


def cmd_eval(args):
    try:
        report = evaluation.dataset_eval(args.maps, args.gt)
    except SaliencyError as exc:
        raise CommandError(str(exc)) from exc
    report.write_csv(args.out)
    for name in report.skipped:
        print(f"skipped: {name}", file=sys.stderr)
    print(f"images {report.n_images}  precision {report.precision:.4f}  recall {report.recall:.4f}  "
          f"F {report.f_measure:.4f}  MAE {report.mae:.4f}")
    return 0


def _sweep_one(job):
    """Scores for one image across the whole grid."""
    name, img_path, gt_path, params, param, values = job
    img = imaging.load_image(img_path)
    gt = evaluation.load_truth(gt_path)
    front = analyze(img, params)
    rows = []
    for v in values:
        k_frac = v if param == "k_frac" else params.k_frac
        gamma = v if param == "gamma" else params.gamma
        res = refine(front, k_frac, gamma, params.seed)
        s = evaluation.score_map(imaging.to_uint8(res.saliency), gt, name)
        rows.append((s.adaptive_f, s.mae))
    return rows


def cmd_sweep(args):
    pairs, unpaired = evaluation.pair_directories(args.images, args.gt)
    if not pairs:
        raise CommandError(f"no image/ground-truth pairs in {args.images} and {args.gt}")
    for name in unpaired:
        print(f"skipped: {name}", file=sys.stderr)
    values = args.values or (K_FRAC_GRID if args.param == "k_frac" else GAMMA_GRID)
    params = _params(args)
    for v in values:
        # validate every grid point before spending time on the images
        PipelineParams(params.superpixels, v if args.param == "k_frac" else params.k_frac,
                       v if args.param == "gamma" else params.gamma, params.seed, params.slic_m)
    jobs = [(name, ip, gp, params, args.param, values) for name, ip, gp in pairs]
    try:
        per_image = np.array(_map_jobs(_sweep_one, jobs, args.workers))
    except PipelineError as exc:
        raise CommandError(f"sweep: stage '{exc.stage}': {exc.cause}") from exc
    except SaliencyError as exc:
        raise CommandError(f"sweep: {exc}") from exc
    means = per_image.mean(axis=0)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["param", "value", "f_measure", "mae", "n_images"])
        for v, (f, m) in zip(values, means):
            w.writerow([args.param, f"{v:g}", f"{f:.6f}", f"{m:.6f}", len(pairs)])
    print(f"wrote {len(values)} grid points over {len(pairs)} images to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dksaliency",
        description="Salient region detection with dense k-subgraph refinement.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="compute the saliency map for one image")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.add_argument("--dump-intermediates", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="compute saliency maps for a directory of images")
    p.add_argument("--in-dir", required=True)
    p.add_argument("--out-dir", required=True)
    _add_pipeline_flags(p)
    _add_workers_flag(p)
    p.add_argument("--dump-intermediates", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval", help="score saliency maps against ground truth")
    p.add_argument("--maps", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True, help="directory for pr_curve.csv and summary.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="mean F-measure and MAE over a parameter grid")
    p.add_argument("--images", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--param", choices=["k_frac", "gamma"], default="k_frac")
    p.add_argument("--values", type=float, nargs="+", help="grid values (default: the standard grid)")
    _add_pipeline_flags(p)
    _add_workers_flag(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: invalid parameter: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
