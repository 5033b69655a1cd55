"""Command-line interface: ``verify``, ``detect``, ``selftest`` and ``sweep``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .detection import build_test_bank, run_tests
from .guarantees import verify
from .io import detection_svg, export_mesh, load_measurements, margins_svg, save_measurements
from .scenario import (
    SWEEP_HEADER,
    PhantomSpec,
    ScenarioError,
    describe,
    load_scenario,
    make_phantom,
    simulate_measurement,
)
from .setting import MODES, POLARITIES, SettingError

log = logging.getLogger("eitguard")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eitguard", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, measurements=False):
        sp.add_argument("--scenario", type=Path, help="YAML scenario file")
        sp.add_argument("--preset", choices=("fig3", "fig4", "fig5", "fig6"))
        sp.add_argument("--mode", choices=MODES)
        sp.add_argument("--polarity", choices=POLARITIES)
        sp.add_argument("--seed", type=_u64)
        sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
        sp.add_argument("--mesh-size", type=float, help="override the target edge length")
        sp.add_argument("--noise", type=float, help="override the noise level delta")
        sp.add_argument("--export-mesh", action="store_true", help="also write mesh.txt")
        sp.add_argument("-v", "--verbose", action="store_true")
        if measurements:
            sp.add_argument("--measurements", type=Path, help="measurement CSV (L-1)x(L-1)")

    common(sub.add_parser("verify", help="check the resolution guarantee"))
    common(sub.add_parser("detect", help="mark elements from measurements"), measurements=True)
    sp = sub.add_parser("sweep", help="delta_star over the scenario's error grid")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1, help="rows computed concurrently")
    st = sub.add_parser("selftest", help="run the forward-model consistency checks")
    st.add_argument("--out", type=Path, default=Path("."))
    st.add_argument("--seed", type=_u64, default=0)
    st.add_argument("--trials", type=int, default=20)
    st.add_argument("-v", "--verbose", action="store_true")
    return p


def _scenario(args):
    if args.scenario is None and args.preset is None:
        raise ScenarioError(["give --scenario or --preset"])
    sc = load_scenario(args.scenario, preset=args.preset)
    return sc.with_overrides(
        mode=args.mode,
        polarity=args.polarity,
        seed=args.seed,
        mesh__target_edge_length=args.mesh_size,
        setting__noise=args.noise,
    )


def _out(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    log.info("wrote %s", path)


def cmd_verify(args) -> int:
    sc = _scenario(args)
    out = _out(args)
    if args.export_mesh:
        export_mesh(sc.mesh, out / "mesh.txt")
    setting = sc.setting()
    report = verify(setting, sc.partition, sc.mesh, sc.mode)
    with open(out / "report.csv", "w", newline="") as fh:
        fh.write(f"# {SWEEP_HEADER}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["element", "margin"])
        for s, m in enumerate(report.margins):
            w.writerow([s, f"{m:.17g}"])
    text = describe(sc) + "\n" + report.summary() + "\n"
    _write(out / "summary.txt", text)
    extra = {"#9e9e9e": setting.roi.triangles} if setting.roi is not None else None
    _write(out / "margins.svg",
           margins_svg(sc.mesh, sc.partition, report.margins,
                       title=f"{sc.name}: margins, delta_star = {report.delta_star:.4g}",
                       extra_triangles=extra))
    print(text, end="")
    return 0 if report.holds else 1


def cmd_detect(args) -> int:
    sc = _scenario(args)
    out = _out(args)
    setting = sc.setting()
    if args.measurements is not None:
        R = load_measurements(args.measurements)
    else:
        sigma = make_phantom(sc, sc.phantom_spec(), seed=sc.seed)
        R = simulate_measurement(sc, sigma, seed=sc.seed)
        save_measurements(out / "measurements.csv", R)
    bank = build_test_bank(setting, sc.partition, sc.mesh, sc.mode)
    res = run_tests(bank, R, setting.noise)
    with open(out / "detection.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["element", "statistic", "marked"])
        for s, (stat, flag) in enumerate(zip(res.statistics, res.flags)):
            w.writerow([s, f"{stat:.17g}", int(flag)])
    _write(out / "detection.svg",
           detection_svg(sc.mesh, sc.partition, res.flags,
                         title=f"{sc.name}: marked elements ({sc.polarity}, {sc.mode})"))
    print(f"marked elements: {res.marked.tolist()}")
    return 0


def _sweep_row(sc, eps_rel, gam_rel):
    eps, gam = sc.relative_errors(eps_rel, gam_rel)
    st = sc.setting(background_error=eps, impedance_error=gam)
    rep = verify(st, sc.partition, sc.mesh, sc.mode)
    return eps_rel, gam_rel, rep.mu, rep.delta_star


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    out = _out(args)
    eps_grid, gam_grid = sc.sweep_grid
    grid = [(e, g) for e in eps_grid for g in gam_grid]
    sc.partition  # build shared objects before any worker starts
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda eg: _sweep_row(sc, *eg), grid))
    with open(out / "sweep.csv", "w", newline="") as fh:
        fh.write(f"# scenario {sc.name}, {sc.polarity}, {sc.mode}, seed {sc.seed}\n")
        fh.write(f"# {SWEEP_HEADER}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["background_error", "impedance_error", "mu", "delta_star"])
        for e, g, mu, ds in rows:
            w.writerow([f"{e:.6g}", f"{g:.6g}", f"{mu:.17g}", f"{ds:.17g}"])
    lines = [f"{'eps':>8} {'gamma':>8} {'delta_star':>14}"]
    lines += [f"{100 * e:7.3g}% {100 * g:7.3g}% {ds:14.6g}" for e, g, _, ds in rows]
    print("\n".join(lines))
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    out = _out(args)
    rows = run_selftest(seed=args.seed, trials=args.trials)
    lines = [f"{'check':<28} {'result':<6} detail"]
    lines += [f"{name:<28} {'PASS' if ok else 'FAIL':<6} {detail}" for name, ok, detail in rows]
    text = "\n".join(lines) + "\n"
    _write(out / "selftest.txt", text)
    print(text, end="")
    return 0 if all(ok for _, ok, _ in rows) else 1


COMMANDS = {"verify": cmd_verify, "detect": cmd_detect, "sweep": cmd_sweep, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, SettingError, ValueError, OSError) as exc:
        print(f"eitguard {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
