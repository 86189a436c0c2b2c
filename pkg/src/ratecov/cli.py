"""Command-line front end: coverage curves, rate gains, correlation
deviations and Monte Carlo validation, written as CSV plus a JSON manifest.

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 Monte Carlo validation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    CoverageMethod,
    MethodError,
    UnreachableTargetError,
    rate_at_coverage,
    rate_coverage,
)
from .model import ValidationError, load_scenario, split_from_eta
from .montecarlo import DEFAULT_REGION_RADIUS_M, simulate_rates
from .quadrature import BracketError, QuadratureError

_METHOD_FLAGS = {
    "exact": CoverageMethod.EXACT,
    "indep": CoverageMethod.INDEPENDENT,
    "coherent": CoverageMethod.COHERENT,
}


@dataclass
class RunManifest:
    """Sidecar record of one command invocation, enough to replay it."""

    command: str
    params: dict
    version: str = __version__
    seeds: list[int] = field(default_factory=list)
    duration_s: float = 0.0
    outputs: list[str] = field(default_factory=list)
    checksum_sha256: dict[str, str] = field(default_factory=dict)

    def write(self, out_csv: Path) -> None:
        path = Path(str(out_csv) + ".manifest.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write("\n")


def _fmt_prob(x: float) -> str:
    return f"{x:.6f}"


def _fmt_rate(x: float) -> str:
    return str(int(round(x)))


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> str:
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    data = text.encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)
    return hashlib.sha256(data).hexdigest()


def _finish(manifest: RunManifest, out: Path, checksum: str, t0: float) -> None:
    manifest.outputs.append(str(out))
    manifest.checksum_sha256[str(out)] = checksum
    manifest.duration_s = round(time.monotonic() - t0, 3)
    manifest.write(out)


def _tau_grid(args) -> list[float]:
    if args.points < 2:
        raise ValidationError("--points must be at least 2")
    if not args.tau_max > args.tau_min >= 0.0:
        raise ValidationError("need 0 <= --tau-min < --tau-max")
    step = (args.tau_max - args.tau_min) / (args.points - 1)
    return [args.tau_min + i * step for i in range(args.points)]


def _load(args):
    scenario, split = load_scenario(args.config)
    if getattr(args, "eta", None) is not None:
        split = split_from_eta(split.total, args.eta)
    return scenario, split


def cmd_coverage(args) -> int:
    t0 = time.monotonic()
    scenario, split = _load(args)
    methods = []
    for name in args.methods.split(","):
        if name not in _METHOD_FLAGS:
            raise ValidationError(f"unknown method {name!r}; choose from exact,indep,coherent")
        methods.append(name)
    grid = _tau_grid(args)

    header = ["tau_bps"] + [f"pc_{m}" for m in methods]
    rows = []
    coherent_split = split_from_eta(split.total, 0.0)
    for tau in grid:
        row = [_fmt_rate(tau)]
        for name in methods:
            msplit = coherent_split if name == "coherent" else split
            row.append(_fmt_prob(rate_coverage(scenario, msplit, tau, _METHOD_FLAGS[name])))
        rows.append(row)

    out = Path(args.out)
    checksum = _write_csv(out, header, rows)
    manifest = RunManifest("coverage", {
        "config": str(args.config), "eta": split.eta, "tau_min": args.tau_min,
        "tau_max": args.tau_max, "points": args.points, "methods": methods,
    })
    _finish(manifest, out, checksum, t0)
    return 0


def _parse_list(text: str, name: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise ValidationError(f"--{name} must be a comma-separated list of numbers") from exc


def cmd_gain(args) -> int:
    t0 = time.monotonic()
    scenario, split = _load(args)
    n = split.total
    pcs = _parse_list(args.pc, "pc")
    etas = _parse_list(args.eta_list, "eta")

    header = ["pc", "eta", "tau_eta_bps", "tau0_bps", "gain"]
    rows = []
    for pc in pcs:
        tau0 = rate_at_coverage(scenario, split_from_eta(n, 0.0), pc, CoverageMethod.COHERENT)
        for eta in etas:
            if eta == 0.0:
                tau_eta = tau0
            else:
                tau_eta = rate_at_coverage(scenario, split_from_eta(n, eta), pc,
                                           CoverageMethod.EXACT)
            rows.append([_fmt_prob(pc), _fmt_prob(eta), _fmt_rate(tau_eta),
                         _fmt_rate(tau0), _fmt_prob((tau_eta - tau0) / tau0)])

    out = Path(args.out)
    checksum = _write_csv(out, header, rows)
    manifest = RunManifest("gain", {"config": str(args.config), "pc": pcs, "eta": etas,
                                    "bandwidth_hz": n})
    _finish(manifest, out, checksum, t0)
    return 0


def cmd_deviation(args) -> int:
    t0 = time.monotonic()
    scenario, split = _load(args)
    n = split.total
    pcs = _parse_list(args.pc, "pc")
    etas = _parse_list(args.eta_list, "eta")

    header = ["pc", "eta", "tau_exact_bps", "tau_indep_bps", "deviation", "abs_diff_bps"]
    rows = []
    for pc in pcs:
        for eta in etas:
            s = split_from_eta(n, eta)
            tau_exact = rate_at_coverage(scenario, s, pc, CoverageMethod.EXACT)
            tau_indep = rate_at_coverage(scenario, s, pc, CoverageMethod.INDEPENDENT)
            rows.append([
                _fmt_prob(pc), _fmt_prob(eta), _fmt_rate(tau_exact), _fmt_rate(tau_indep),
                _fmt_prob((tau_indep - tau_exact) / tau_exact),
                _fmt_rate(tau_indep - tau_exact),
            ])

    out = Path(args.out)
    checksum = _write_csv(out, header, rows)
    manifest = RunManifest("deviation", {"config": str(args.config), "pc": pcs, "eta": etas,
                                         "bandwidth_hz": n})
    _finish(manifest, out, checksum, t0)
    return 0


def cmd_validate(args) -> int:
    t0 = time.monotonic()
    scenario, split = _load(args)
    if args.trials < 1:
        raise ValidationError("--trials must be at least 1")
    grid = _tau_grid(args)

    rates = simulate_rates(scenario, split, args.trials, args.seed,
                           region_radius=args.region_radius_m, n_jobs=args.jobs)
    header = ["tau_bps", "pc_exact", "pc_mc", "mc_stderr", "z_score"]
    rows = []
    worst = 0.0
    for tau in grid:
        pc_th = rate_coverage(scenario, split, tau, CoverageMethod.EXACT)
        p_hat = float(np.count_nonzero(rates >= tau)) / args.trials
        se = (p_hat * (1.0 - p_hat) / args.trials) ** 0.5
        diff = pc_th - p_hat
        z = 0.0 if diff == 0.0 else (diff / se if se > 0.0 else float("inf"))
        worst = max(worst, abs(z))
        rows.append([_fmt_rate(tau), _fmt_prob(pc_th), _fmt_prob(p_hat),
                     _fmt_prob(se), _fmt_prob(z) if z != float("inf") else "inf"])

    out = Path(args.out)
    checksum = _write_csv(out, header, rows)
    manifest = RunManifest("validate", {
        "config": str(args.config), "eta": split.eta, "trials": args.trials,
        "tau_min": args.tau_min, "tau_max": args.tau_max, "points": args.points,
        "region_radius_m": args.region_radius_m,
    }, seeds=[args.seed])
    _finish(manifest, out, checksum, t0)

    ok = worst <= 3.0
    print(f"{'PASS' if ok else 'FAIL'}: max |z| = {worst:.3f} over {len(grid)} points")
    return 0 if ok else 4


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ratecov",
                                description="Rate coverage of K-tier downlink networks "
                                            "under two-block frequency diversity.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eta=True):
        sp.add_argument("--config", required=True, help="scenario JSON file")
        sp.add_argument("--out", required=True, help="output CSV path")
        if eta:
            sp.add_argument("--eta", type=float, default=None,
                            help="override the config's block-1 bandwidth fraction")

    def taugrid(sp):
        sp.add_argument("--tau-min", type=float, required=True, help="lowest rate threshold, bit/s")
        sp.add_argument("--tau-max", type=float, required=True, help="highest rate threshold, bit/s")
        sp.add_argument("--points", type=int, default=25, help="grid size")

    sp = sub.add_parser("coverage", help="coverage probability over a rate grid")
    common(sp)
    taugrid(sp)
    sp.add_argument("--methods", default="exact", help="comma list: exact,indep,coherent")
    sp.set_defaults(func=cmd_coverage)

    sp = sub.add_parser("gain", help="rate gain of diversity splits over the coherent baseline")
    common(sp, eta=False)
    sp.add_argument("--pc", required=True, help="comma list of coverage targets")
    sp.add_argument("--eta", dest="eta_list", required=True, help="comma list of splits")
    sp.set_defaults(func=cmd_gain)

    sp = sub.add_parser("deviation", help="rate overestimate when interference correlation is ignored")
    common(sp, eta=False)
    sp.add_argument("--pc", required=True, help="comma list of coverage targets")
    sp.add_argument("--eta", dest="eta_list", required=True, help="comma list of splits")
    sp.set_defaults(func=cmd_deviation)

    sp = sub.add_parser("validate", help="compare analytic coverage against Monte Carlo")
    common(sp)
    taugrid(sp)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--region-radius-m", type=float, default=DEFAULT_REGION_RADIUS_M)
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers for trials")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, MethodError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, BracketError, UnreachableTargetError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
