"""Command-line front end.

Every command writes a CSV (fixed header, 17 significant digits) and a JSON
manifest next to it (``<out>.json``).  ``rerun`` replays a manifest, optionally
with a different ``--workers`` value or output path.

Exit codes: 0 success, 2 invalid arguments, 3 tolerance or convergence
failure, 4 comparison failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, exact, pfaffian
from .errors import InvalidArgumentError, NumericalFailure
from .estimators import (McConfig, estimate_charpoly_pair, estimate_fixed_time_kpoint, estimate_modified_density_two_time,
                         estimate_pair_profile, estimate_real_count, estimate_spin_corr_fixed_time,
                         estimate_spin_corr_two_time, zscores)
from .quadrature import QuadratureConfig
from .rng import SeedSpec

EXIT_OK, EXIT_ARGS, EXIT_TOLERANCE, EXIT_COMPARE = 0, 2, 3, 4
SEED_ENV = "GINIBRE_SEED"
WORKERS_ENV = "GINIBRE_WORKERS"
MANIFEST_SCHEMA = 1
KEY_EXCLUDE = {"value", "stderr", "quad_err", "samples"}


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


# --- parsing helpers ----------------------------------------------------------------------

def parse_grid(text: str, flag: str = "--grid") -> np.ndarray:
    """``start:stop:step`` -> points ``start + k*step`` below ``stop`` (stop excluded up to 1e-9 steps).

    A single number gives a one-point grid.
    """
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(flag, f"cannot parse grid {text!r}") from None
    if len(nums) == 1:
        return np.array(nums)
    if len(nums) != 3:
        raise UsageError(flag, f"grid must be start:stop:step, got {text!r}")
    start, stop, step = nums
    if not step > 0 or not stop > start:
        raise UsageError(flag, "grid needs step > 0 and stop > start")
    count = int(math.ceil((stop - start) / step - 1e-9))
    return start + step * np.arange(count)


def parse_bins(text: str, flag: str) -> np.ndarray:
    """Bin spec ``start:stop:step`` -> edges ``start, start+step, ..., stop``."""
    left = parse_grid(text, flag)
    if left.size < 1 or ":" not in text:
        raise UsageError(flag, "bins must be start:stop:step")
    return np.append(left, left[-1] + float(text.split(":")[2]))


def parse_list(text: str, flag: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(flag, f"cannot parse number list {text!r}") from None


def parse_points(text: str, flag: str) -> pfaffian.OrderedPoints:
    xs = parse_list(text, flag)
    if len(xs) % 2:
        raise UsageError(flag, f"need an even number of points, got {len(xs)}")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise UsageError(flag, "points must be strictly increasing")
    return pfaffian.OrderedPoints(tuple(xs))


def parse_windows(text: str, flag: str) -> list:
    wins = []
    for item in text.split(","):
        bits = item.split(":")
        if len(bits) != 2:
            raise UsageError(flag, f"window must be a:b, got {item!r}")
        try:
            a, b = float(bits[0]), float(bits[1])
        except ValueError:
            raise UsageError(flag, f"cannot parse window {item!r}") from None
        if not a < b:
            raise UsageError(flag, f"window {item!r} needs a < b")
        wins.append((a, b))
    if len(wins) % 2:
        raise UsageError(flag, f"need an even number of windows, got {len(wins)}")
    if any(w1[0] < w0[1] for w0, w1 in zip(wins, wins[1:])):
        raise UsageError(flag, "windows must be sorted and disjoint")
    return wins


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "%.17g" % float(v)


# --- output ----------------------------------------------------------------------------

def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([fmt(v) for v in r])
    return buf.getvalue()


def summarize_csv(text: str) -> dict:
    """Row count plus fsum / min / max of every numeric column, computed from the CSV text."""
    reader = csv.DictReader(io.StringIO(text))
    cols = {name: [] for name in reader.fieldnames}
    for row in reader:
        for k, v in row.items():
            cols[k].append(v)
    out = {"rows": len(next(iter(cols.values()), []))}
    for k, vals in cols.items():
        try:
            nums = [float(v) for v in vals]
        except ValueError:
            continue
        finite = [v for v in nums if math.isfinite(v)]
        out[k] = {"sum": math.fsum(finite), "min": min(nums) if nums else None, "max": max(nums) if nums else None}
    return out


def write_outputs(args, header, rows, extra=None) -> dict:
    text = render_csv(header, rows)
    with open(args.out, "w", newline="") as fh:
        fh.write(text)
    if args.plot:
        with open(args.out + ".dat", "w") as fh:
            fh.write("# " + " ".join(header) + "\n")
            for r in rows:
                fh.write(" ".join(fmt(v) for v in r) + "\n")
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "command": args.command,
        "argv": args.argv,
        "params": {k: v for k, v in vars(args).items()
                   if k not in {"argv", "func", "out", "plot", "workers", "seed", "command", "started", "started_utc"}},
        "seed": {"master_seed": args.seed, "stream_index": 0} if getattr(args, "seed", None) is not None else None,
        "workers": getattr(args, "workers", None),
        "output": args.out,
        "version": __version__,
        "started_utc": args.started_utc,
        "wall_seconds": time.time() - args.started,
        "summary": summarize_csv(text),
    }
    if extra:
        manifest.update(extra)
    with open(args.out + ".json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
    return manifest


# --- commands --------------------------------------------------------------------------

def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(args.rel_tol, args.abs_tol, args.max_subdivisions)


def cmd_exact_two_time(args):
    _positive(args, "--n", args.n >= 4, "n must be >= 4")
    _positive(args, "--t", args.t > 0, "t must be positive")
    _positive(args, "--tau", args.tau > 0, "tau must be positive")
    q = _quad(args)
    rows = []
    if args.bin_average:
        x_edges = parse_bins(args.x_grid, "--x-grid")
        y_edges = parse_bins(args.y_grid or args.x_grid, "--y-grid")
        vals = exact.modified_density_bin_averages(args.n, args.t, args.tau, y_edges, x_edges, q=q)
        xc = 0.5 * (x_edges[1:] + x_edges[:-1])
        yc = 0.5 * (y_edges[1:] + y_edges[:-1])
        for i, yy in enumerate(yc):
            for j, xx in enumerate(xc):
                rows.append((xx, yy, args.t, args.tau, args.n, vals[i, j], float("nan")))
    else:
        xs = parse_grid(args.x_grid, "--x-grid")
        ys = parse_grid(args.y_grid, "--y-grid") if args.y_grid else np.array([args.y])
        for yy in ys:
            for xx in xs:
                res = exact.modified_density_finite_n(
                    exact.TwoTimeParams(args.n, args.t, args.tau, float(yy), float(xx)), q, full_output=True)
                rows.append((xx, yy, args.t, args.tau, args.n, res.value, res.error))
    write_outputs(args, ["x", "y", "t", "tau", "n", "value", "quad_err"], rows)


def cmd_limit_two_time(args):
    _positive(args, "--t", args.t > 0, "t must be positive")
    _positive(args, "--T", args.T > 0, "T must be positive")
    ds = parse_grid(args.d_grid, "--d-grid")
    rows = [(d, args.t, args.T, exact.modified_density_limit(args.t, args.T, float(d))) for d in ds]
    write_outputs(args, ["x_minus_y", "t", "T", "value"], rows)


def cmd_spin_corr(args):
    _positive(args, "--t", args.t > 0, "t must be positive")
    _positive(args, "--T", args.T >= 0, "T must be nonnegative")
    q = _quad(args)
    rows = []
    for d in parse_grid(args.d_grid, "--d-grid"):
        lim = exact.spin_corr_limit(args.t, args.T, float(d), 0.0)
        if args.T > 0:
            res = exact.spin_corr_from_density(args.t, args.T, float(d), q, full_output=True)
            rows.append((d, args.t, args.T, lim, res.value, res.error))
        else:
            rows.append((d, args.t, args.T, lim, float("nan"), float("nan")))
    write_outputs(args, ["x_minus_y", "t", "T", "value", "from_density", "quad_err"], rows)


def cmd_fixed_time_pfaffian(args):
    _positive(args, "--t", args.t > 0, "t must be positive")
    rows = []
    if args.points:
        pts = parse_points(args.points, "--points")
        rows.append((" ".join(fmt(x) for x in pts.xs), len(pts),
                     pfaffian.fixed_time_modified_density(pts, args.normalization, args.t),
                     pfaffian.fixed_time_spin_correlation(pts, args.normalization, args.t)))
    else:
        for r in parse_grid(args.r_grid, "--r-grid"):
            pts = [0.0, float(r)]
            rows.append((f"0 {fmt(r)}", 2,
                         pfaffian.fixed_time_modified_density(pts, args.normalization, args.t),
                         pfaffian.fixed_time_spin_correlation(pts, args.normalization, args.t)))
    write_outputs(args, ["points", "k", "density", "spin_corr"], rows)


def _mc_config(args, times) -> McConfig:
    _positive(args, "--n", args.n >= 2, "n must be >= 2")
    _positive(args, "--samples", args.samples >= 2, "samples must be >= 2")
    _positive(args, "--workers", args.workers >= 1, "workers must be >= 1")
    _positive(args, "--seed", 0 <= args.seed < 2**64, "seed must fit in 64 unsigned bits")
    return McConfig(args.n, args.samples, SeedSpec(args.seed), times, args.workers)


def cmd_mc_two_time(args):
    _positive(args, "--t", args.t > 0, "t must be positive")
    _positive(args, "--tau", args.tau > 0, "tau must be positive")
    cfg = _mc_config(args, (args.t, args.t + args.tau))
    header = ["x", "y", "t", "tau", "n", "value", "stderr", "samples"]
    rows = []
    if args.statistic == "density":
        x_edges = parse_bins(args.x_grid, "--x-grid")
        y_edges = parse_bins(args.y_grid or args.x_grid, "--y-grid")
        est = estimate_modified_density_two_time(cfg, y_edges, x_edges)
        yc, xc = est.centers
        for i, yy in enumerate(yc):
            for j, xx in enumerate(xc):
                rows.append((xx, yy, args.t, args.tau, args.n, est.values[i, j], est.stderrs[i, j], args.samples))
    else:
        xs = parse_grid(args.x_grid, "--x-grid")
        ys = parse_grid(args.y_grid, "--y-grid") if args.y_grid else np.array([args.y])
        xx, yy = (a.ravel() for a in np.meshgrid(xs, ys))
        est = estimate_spin_corr_two_time(cfg, xx, yy)
        for k in range(xx.size):
            rows.append((xx[k], yy[k], args.t, args.tau, args.n, est.value[k], est.stderr[k], args.samples))
    write_outputs(args, header, rows)


def cmd_mc_fixed_time(args):
    _positive(args, "--t", args.t > 0, "t must be positive")
    cfg = _mc_config(args, (args.t,))
    if args.statistic == "pair":
        if args.r_edges:
            edges = np.array(parse_list(args.r_edges, "--r-edges"))
            if edges.size < 2 or np.any(np.diff(edges) <= 0):
                raise UsageError("--r-edges", "need at least two strictly increasing edges")
            flag = "--r-edges"
        else:
            edges, flag = parse_bins(args.r_grid, "--r-grid"), "--r-grid"
        if edges[0] <= 0:
            raise UsageError(flag, "separations must be positive")
        est = estimate_pair_profile(cfg, edges, args.half_width)
        (rc,) = est.centers
        rows = [(rc[k], args.t, args.n, est.values[k], est.stderrs[k], args.samples) for k in range(rc.size)]
        write_outputs(args, ["r", "t", "n", "value", "stderr", "samples"], rows)
    elif args.statistic == "kpoint":
        if not args.windows:
            raise UsageError("--windows", "required for --statistic kpoint")
        wins = parse_windows(args.windows, "--windows")
        est = estimate_fixed_time_kpoint(cfg, wins)
        label = " ".join(f"{fmt(a)}:{fmt(b)}" for a, b in wins)
        write_outputs(args, ["windows", "t", "n", "value", "stderr", "samples"],
                      [(label, args.t, args.n, est.value, est.stderr, args.samples)])
    elif args.statistic == "charpoly":
        if not args.pairs:
            raise UsageError("--pairs", "required for --statistic charpoly")
        rows = []
        for item in args.pairs.split(";"):
            xy = parse_list(item, "--pairs")
            if len(xy) != 2:
                raise UsageError("--pairs", f"each pair needs two numbers, got {item!r}")
            est = estimate_charpoly_pair(cfg, xy[0], xy[1])
            rows.append((xy[0], xy[1], args.t, args.n, est.value, est.stderr, est.scaled_mean, est.scaled_stderr,
                         est.log_scale, args.samples))
        write_outputs(args, ["x", "y", "t", "n", "value", "stderr", "scaled_value", "scaled_stderr", "log_scale",
                             "samples"], rows)
    else:
        rows = []
        for r in parse_grid(args.r_grid, "--r-grid"):
            est = estimate_spin_corr_fixed_time(cfg, [0.0, float(r)])
            rows.append((r, args.t, args.n, est.value, est.stderr, args.samples))
        write_outputs(args, ["r", "t", "n", "value", "stderr", "samples"], rows)


def cmd_mc_counts(args):
    _positive(args, "--t", args.t > 0, "t must be positive")
    cfg = _mc_config(args, (args.t,))
    wins = args.window.split(":")
    try:
        window = (float(wins[0]), float(wins[1]))
    except (ValueError, IndexError):
        raise UsageError("--window", f"window must be a:b, got {args.window!r}") from None
    if not window[0] < window[1]:
        raise UsageError("--window", "window needs a < b")
    est = estimate_real_count(cfg, window)
    write_outputs(args, ["n", "t", "mean", "stderr", "density", "density_stderr", "samples", "parity_ok"],
                  [(args.n, args.t, est.mean, est.stderr, est.density, est.density_stderr, args.samples,
                    est.parity_ok)])


def cmd_haar_check(args):
    _positive(args, "--samples", args.samples >= 1, "samples must be positive")
    _positive(args, "--seed", 0 <= args.seed < 2**64, "seed must fit in 64 unsigned bits")
    rows = []
    for k, item in enumerate(args.configs.split(";")):
        pts = parse_points(item, "--configs")
        seed = SeedSpec(args.seed, k * args.samples)
        mean, err = pfaffian.mc_group_integral(pts, args.samples, seed)
        ratio, rerr = pfaffian.localization_ratio(pts, args.samples, seed, args.width)
        u = pfaffian.haar_unitary_block(len(pts), args.seed, k * args.samples, min(args.samples, 1000))
        unit_err = float(np.max(np.abs(np.conj(np.swapaxes(u, -1, -2)) @ u - np.eye(len(pts)))))
        rows.append((" ".join(fmt(x) for x in pts.xs), mean, err, ratio, rerr, args.width, unit_err, args.samples))
    write_outputs(args, ["points", "integral", "stderr", "ratio", "ratio_stderr", "width", "unitarity_err",
                         "samples"], rows)


def _read_csv(path, flag):
    try:
        with open(path, newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(flag, f"cannot read {path!r}: {exc.strerror}") from None


def cmd_compare(args):
    ex = _read_csv(args.exact, "--exact")
    mc = _read_csv(args.mc, "--mc")
    if not ex or not mc:
        raise UsageError("--exact" if not ex else "--mc", "input has no rows")
    if "stderr" not in mc[0]:
        raise UsageError("--mc", "MC input has no stderr column")
    keys = [k for k in ex[0] if k in mc[0] and k not in KEY_EXCLUDE]
    if not keys:
        raise UsageError("--mc", "no common key columns to join on")
    index = {tuple(r[k] for k in keys): r for r in ex}
    rows = []
    for r in mc:
        key = tuple(r[k] for k in keys)
        if key not in index:
            raise UsageError("--mc", f"grid point {dict(zip(keys, key))} missing from --exact")
        ev = float(index[key]["value"])
        mv, se = float(r["value"]), float(r["stderr"])
        z = float(zscores(mv, se, ev))
        rows.append((*key, ev, mv, se, z))
    zs = np.array([row[-1] for row in rows])
    bad = int(np.count_nonzero(np.abs(zs) > args.sigma))
    frac = bad / len(rows)
    write_outputs(args, [*keys, "exact", "mc", "stderr", "z"], rows,
                  {"violations": bad, "violation_fraction": frac, "points": len(rows)})
    print(f"{len(rows)} points, {bad} beyond {args.sigma} sigma ({100 * frac:.2f}%)")
    return EXIT_COMPARE if frac > args.max_fraction else EXIT_OK


def cmd_rerun(args):
    try:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise UsageError("--manifest", f"cannot read {args.manifest!r}: {exc.strerror}") from None
    except json.JSONDecodeError:
        raise UsageError("--manifest", "not a JSON manifest") from None
    if manifest.get("schema") != MANIFEST_SCHEMA:
        raise UsageError("--manifest", f"unsupported schema {manifest.get('schema')!r}")
    argv = list(manifest["argv"])
    argv = _override(argv, "--out", args.out)
    if args.workers is not None and manifest.get("workers") is not None:
        # single-process commands record no worker count; their replay ignores --workers
        argv = _override(argv, "--workers", str(args.workers))
    return main(argv)


def _override(argv, flag, value):
    if value is None:
        return argv
    out = list(argv)
    for i, a in enumerate(out):
        if a == flag and i + 1 < len(out):
            out[i + 1] = value
            return out
        if a.startswith(flag + "="):
            out[i] = f"{flag}={value}"
            return out
    return out + [flag, value]


def _positive(args, flag, ok, message):
    if not ok:
        raise UsageError(flag, message)


# --- parser ----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(self.prog.split()[-1], message)


def _env_int(name, default):
    v = os.environ.get(name)
    if v is None:
        return default
    try:
        return int(v)
    except ValueError:
        raise UsageError(name, f"environment value {v!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ginibre-evolution", description="Real-eigenvalue statistics of matrix Brownian motion.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, mc=False):
        sp.add_argument("--out", required=True, help="CSV output path; the manifest goes to <out>.json")
        sp.add_argument("--plot", action="store_true", help="also write <out>.dat for external plotting")
        if mc:
            sp.add_argument("--seed", type=int, default=_env_int(SEED_ENV, 0))
            sp.add_argument("--workers", type=int, default=_env_int(WORKERS_ENV, 1))

    def quad(sp):
        sp.add_argument("--rel-tol", type=float, default=1e-10)
        sp.add_argument("--abs-tol", type=float, default=1e-14)
        sp.add_argument("--max-subdivisions", type=int, default=10_000)

    sp = sub.add_parser("exact-two-time", help="finite-N modified two-time density by quadrature")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--y", type=float, default=0.0)
    sp.add_argument("--y-grid")
    sp.add_argument("--x-grid", required=True)
    sp.add_argument("--bin-average", action="store_true",
                    help="treat the grids as bins start:stop:step and output bin averages at bin centers")
    quad(sp)
    common(sp)
    sp.set_defaults(func=cmd_exact_two_time)

    sp = sub.add_parser("limit-two-time", help="large-N modified density versus separation")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--d-grid", required=True)
    common(sp)
    sp.set_defaults(func=cmd_limit_two_time)

    sp = sub.add_parser("spin-corr", help="large-N spin correlation, closed form and from the density")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--d-grid", required=True)
    quad(sp)
    common(sp)
    sp.set_defaults(func=cmd_spin_corr)

    sp = sub.add_parser("fixed-time-pfaffian", help="fixed-time K-point density and spin correlation")
    sp.add_argument("--points")
    sp.add_argument("--r-grid", default="0.25:1.5:0.25")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--normalization", choices=pfaffian.NORMALIZATIONS, default="evolution")
    common(sp)
    sp.set_defaults(func=cmd_fixed_time_pfaffian)

    sp = sub.add_parser("mc-two-time", help="Monte Carlo two-time density or spin correlation")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--statistic", choices=("density", "spin"), default="density")
    sp.add_argument("--x-grid", default="-2:2:0.25")
    sp.add_argument("--y-grid")
    sp.add_argument("--y", type=float, default=0.0)
    common(sp, mc=True)
    sp.set_defaults(func=cmd_mc_two_time)

    sp = sub.add_parser("mc-fixed-time", help="Monte Carlo fixed-time statistics at a single time")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--statistic", choices=("pair", "kpoint", "spin", "charpoly"), default="pair")
    sp.add_argument("--r-grid", default="0.2:1.6:0.1")
    sp.add_argument("--r-edges", help="explicit comma-separated separation bin edges (overrides --r-grid)")
    sp.add_argument("--pairs", help="charpoly arguments as 'x,y;x,y'")
    sp.add_argument("--half-width", type=float, default=5.0)
    sp.add_argument("--windows")
    common(sp, mc=True)
    sp.set_defaults(func=cmd_mc_fixed_time)

    sp = sub.add_parser("mc-counts", help="Monte Carlo real-eigenvalue count and local density")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--window", default="-0.5:0.5")
    common(sp, mc=True)
    sp.set_defaults(func=cmd_mc_counts)

    sp = sub.add_parser("haar-check", help="Haar group integral and its localization ratio")
    sp.add_argument("--configs", required=True, help="point sets separated by ';', e.g. '0,0.5;0,1'")
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=_env_int(SEED_ENV, 0))
    common(sp)
    sp.set_defaults(func=cmd_haar_check)

    sp = sub.add_parser("compare", help="join exact and MC outputs and gate on z-scores")
    sp.add_argument("--exact", required=True)
    sp.add_argument("--mc", required=True)
    sp.add_argument("--sigma", type=float, default=3.0)
    sp.add_argument("--max-fraction", type=float, default=0.0,
                    help="largest tolerated fraction of points beyond --sigma")
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("rerun", help="replay a manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_rerun)
    return p


def _attach_negative_values(argv):
    # "--x-grid -3:3:0.1" would otherwise be read as an unknown option
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1] and len(tok) > 1
                and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_attach_negative_values(argv))
        args.argv = argv
        args.started = time.time()
        args.started_utc = datetime.now(timezone.utc).isoformat()
        code = args.func(args)
        return EXIT_OK if code is None else code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


def run(argv=None) -> int:
    return main(argv)


def entry() -> None:
    sys.exit(main())
