"""Command-line interface: spectrum / sweep / band / mie / validate.

All subcommands take a scene from ``--preset NAME`` or ``--config PATH``
(plus optional overrides) and write CSV/SVG artifacts into ``--out DIR``.
CSV output is byte-stable for identical inputs regardless of --threads.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import band as bd
from . import scenes as sc
from .emissivity import PLANCK_PEAK_X, angular_map, planck_b, planck_weight
from .errors import PcfilmError
from .layer import Plate
from .mie import Material, SphereScatterer, mie_cross_sections, mie_t
from .onedim import OneDimLayer, solve_onedim
from .output import fmt9, write_band_svg, write_csv, write_heatmap_svg
from .stack import Repeat, slice_smatrix, solve_stack, solve_stack_points


def _load_scene(args) -> sc.Scene:
    if (args.preset is None) == (args.config is None):
        raise PcfilmError("exactly one of --preset / --config is required")
    if args.preset is not None:
        scene = sc.preset(args.preset)
    else:
        scene = sc.parse_config(Path(args.config).read_text(encoding="utf-8"))
    overrides = {}
    if args.lmax is not None:
        overrides["lmax"] = args.lmax
    if args.cutoff is not None:
        overrides["cutoff"] = args.cutoff
    if args.units is not None:
        overrides["units"] = args.units
    return dataclasses.replace(scene, **overrides) if overrides else scene


def _freq_header(scene: sc.Scene) -> str:
    return "omega(c/a,angular)" if scene.units == "angular" else "omega(c/a,ordinary)"


def _grid_points(scene: sc.Scene):
    om_disp = scene.omega_display_grid()
    om_int = scene.omega_internal(om_disp)
    th = scene.theta_grid()
    th_deg = np.degrees(th)
    return om_disp, om_int, th, th_deg


def cmd_spectrum(scene: sc.Scene, out: Path, threads: int) -> list[Path]:
    desc = scene.build_stack()
    controls = scene.controls()
    om_disp, om_int, th, th_deg = _grid_points(scene)
    phi = math.radians(scene.phi_deg)
    tasks = [(i, j) for i in range(om_int.size) for j in range(th.size)]

    def work(task):
        i, j = task
        try:
            return solve_stack_points(desc, om_int[i], th[j], phi, ("s", "p"), controls)
        except PcfilmError as exc:
            raise PcfilmError(
                f"spectrum failed at omega={om_disp[i]}, theta={th_deg[j]} deg: {exc}"
            ) from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pts = list(pool.map(work, tasks))
    else:
        pts = [work(t) for t in tasks]
    rows = [
        [fmt9(om_disp[i]), fmt9(th_deg[j]), p.pol, fmt9(p.R), fmt9(p.T), fmt9(p.A), fmt9(p.E)]
        for (i, j), pair in zip(tasks, pts)
        for p in pair
    ]
    path = out / "spectrum.csv"
    write_csv(path, [_freq_header(scene), "theta(deg)", "pol", "R", "T", "A", "E"], rows)
    return [path]


def cmd_sweep(scene: sc.Scene, out: Path, threads: int) -> list[Path]:
    desc = scene.build_stack()
    controls = scene.controls()
    om_disp, om_int, th, th_deg = _grid_points(scene)
    emap = angular_map(desc, om_int, th, controls, math.radians(scene.phi_deg), threads)
    rows = []
    for pol, mat in (("s", emap.e_s), ("p", emap.e_p), ("avg", emap.e_avg)):
        for i in range(om_disp.size):
            for j in range(th_deg.size):
                rows.append([fmt9(om_disp[i]), fmt9(th_deg[j]), pol, fmt9(mat[i, j])])
    paths = [out / "sweep.csv"]
    write_csv(paths[0], [_freq_header(scene), "theta(deg)", "pol", "E"], rows)
    for pol, mat in (("s", emap.e_s), ("p", emap.e_p), ("avg", emap.e_avg)):
        p = out / f"sweep_{pol}.svg"
        write_heatmap_svg(
            p, th_deg, om_disp, mat.T, f"emissivity E ({pol})",
            "theta (deg)", _freq_header(scene),
        )
        paths.append(p)
    return paths


def cmd_band(scene: sc.Scene, out: Path, threads: int) -> list[Path]:
    unit, ambient, period = scene.unit_slice()
    if period <= 0:
        raise PcfilmError("scene has no repeated unit with positive thickness")
    controls = scene.controls()
    om_disp, om_int, _, _ = _grid_points(scene)
    lat = scene.lattice()
    if controls.cutoff is None:
        # pin the beam cutoff at the scan maximum so the Bloch eigenvector
        # dimension is constant and branches can be continued by overlap
        eps_max = max([1.0] + [abs(eps) for _, eps in scene.materials])
        controls = dataclasses.replace(
            controls, cutoff=controls.resolved_cutoff(float(om_int[-1]), eps_max, 0.0)
        )

    def point(om):
        s = slice_smatrix(unit, ambient, om, (0.0, 0.0), controls, lat)
        return bd.complex_bands(s, period, om, (0.0, 0.0))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(point, om_int))
    else:
        points = [point(om) for om in om_int]
    # eigenvector-overlap continuation: label branches consistently along the scan
    rows = []
    prev = None
    for i, bp in enumerate(points):
        if (
            prev is not None
            and prev.kz_list.size
            and bp.kz_list.size
            and prev.vectors.shape[0] == bp.vectors.shape[0]
        ):
            perm = bd.overlap_permutation(prev, bp)
            bp = dataclasses.replace(bp, kz_list=bp.kz_list[perm], vectors=bp.vectors[:, perm])
        prev = bp
        for branch, kz in enumerate(bp.kz_list):
            rows.append([
                fmt9(om_disp[i]), str(branch),
                fmt9(kz.real * period / math.pi), fmt9(kz.imag * period),
            ])
    gaps_internal = bd.gap_edges(points)
    gaps_disp = [
        (float(scene.omega_displayed(lo)), float(scene.omega_displayed(hi)))
        for lo, hi in gaps_internal
    ]
    paths = [out / "band.csv", out / "band.svg"]
    write_csv(paths[0], [_freq_header(scene), "branch", "re_kz_d_over_pi", "im_kz_d"], rows)
    write_band_svg(
        paths[1], om_disp, [bp.kz_list for bp in points], period,
        gaps_disp, "complex band structure (normal incidence)",
        y_label=_freq_header(scene),
    )
    return paths


def _first_scatterer(scene: sc.Scene) -> SphereScatterer:
    desc = scene.build_stack()

    def scan(elements):
        for el in elements:
            if isinstance(el, Repeat):
                found = scan(el.elements)
                if found is not None:
                    return found
            elif hasattr(el, "scatterer"):
                return el.scatterer
        return None

    found = scan(desc.elements)
    if found is None:
        raise PcfilmError("scene contains no sphere plane; nothing for 'mie' to compute")
    return found


def cmd_mie(scene: sc.Scene, out: Path, threads: int) -> list[Path]:
    sphere = _first_scatterer(scene)
    om_disp, om_int, _, _ = _grid_points(scene)
    rows = []
    for od, oi in zip(om_disp, om_int):
        cs = mie_cross_sections(sphere, oi)
        rows.append([
            fmt9(od), fmt9(cs.q_ext), fmt9(cs.q_sca), fmt9(cs.q_abs),
            "true" if cs.applicable else "false",
        ])
    path = out / "mie.csv"
    write_csv(path, [_freq_header(scene), "q_ext", "q_sca", "q_abs", "applicable"], rows)
    return [path]


def _lossless_variant(scene: sc.Scene) -> sc.Scene:
    mats = tuple((name, complex(eps.real, 0.0)) for name, eps in scene.materials)
    return dataclasses.replace(scene, materials=mats, exit="vacuum", opaque="false")


def _plate_layers(scene: sc.Scene):
    desc = scene.build_stack()
    layers = []

    def scan(elements):
        for el in elements:
            if isinstance(el, Repeat):
                for _ in range(el.count):
                    if not scan(el.elements):
                        return False
            elif isinstance(el, Plate):
                layers.append(OneDimLayer(el.material.eps, el.thickness))
            else:
                return False
        return True

    return layers if scan(desc.elements) else None


def run_validate(scene: sc.Scene):
    """Invariant checks with measured residuals: [(name, residual, threshold)]."""
    checks = []
    rt = sc.parse_config(sc.serialize_scene(scene))
    checks.append(("config-round-trip", 0.0 if rt == scene else 1.0, 0.5))

    xs = np.linspace(2.0, 3.6, 20001)
    x_peak = xs[np.argmax(planck_b(xs))]
    checks.append(("planck-peak", abs(x_peak - PLANCK_PEAK_X), 1e-3))
    grid = np.linspace(1e-3, 40.0, 4000)
    pw = planck_weight(grid, np.ones_like(grid), 1.0)
    checks.append(("planck-normalization", abs(np.trapezoid(pw.weighted, grid) - 1.0), 1e-6))

    ll = _lossless_variant(scene)
    desc = ll.build_stack()
    controls = ll.controls()
    om_int = ll.omega_internal(ll.omega_display_grid())
    om_pts = om_int[[0, om_int.size // 2, -1]]
    th_pts = (0.0, math.radians(40.0))
    resid = 0.0
    for om in om_pts:
        for th in th_pts:
            for pol in ("s", "p"):
                p = solve_stack(desc, float(om), th, 0.0, pol, controls)
                resid = max(resid, abs(p.R + p.T - 1.0))
    layers = _plate_layers(scene)
    checks.append(("energy-conservation", resid, 1e-10 if layers is not None else 1e-6))

    if layers is not None:
        desc_l = scene.build_stack()
        resid = 0.0
        for om in om_pts:
            for th in th_pts:
                for pol in ("s", "p"):
                    p = solve_stack(desc_l, float(om), th, 0.0, pol, scene.controls())
                    R1, T1, A1 = solve_onedim(
                        layers, float(om), th, pol,
                        desc_l.incident, desc_l.exit, desc_l.exit_is_opaque,
                    )
                    resid = max(resid, abs(p.R - R1), abs(p.T - T1), abs(p.A - A1))
        checks.append(("dual-engine", resid, 1e-10))
    else:
        sphere = _first_scatterer(scene)
        host = Material(complex(sphere.host.eps).real)
        inner = Material(complex(sphere.inside.eps).real)
        resid = 0.0
        for om in om_pts:
            t_e, t_m = mie_t(SphereScatterer(sphere.radius, inner, host), float(om), 7)
            resid = max(
                resid,
                float(np.max(np.abs(np.abs(1 + 2 * t_e) - 1))),
                float(np.max(np.abs(np.abs(1 + 2 * t_m) - 1))),
            )
        checks.append(("mie-unitarity", resid, 1e-10))
    return checks


def cmd_validate(args, out: Path) -> int:
    names = [args.preset] if args.preset else sorted(sc.PRESET_TEXT)
    if args.config:
        scene = sc.parse_config(Path(args.config).read_text(encoding="utf-8"))
        targets = [("config", scene)]
    else:
        targets = [(n, sc.preset(n)) for n in names]
    lines = []
    ok = True
    for name, scene in targets:
        for check, resid, thr in run_validate(scene):
            passed = resid < thr
            ok = ok and passed
            lines.append(
                f"{'PASS' if passed else 'FAIL'} {name}/{check}: "
                f"residual={fmt9(resid)} threshold={fmt9(thr)}"
            )
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    (out / "validate.txt").write_text(report, encoding="utf-8")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcfilm", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("spectrum", "R/T/A/E long CSV over the sweep grid"),
        ("sweep", "emissivity map CSV + SVG heatmaps per polarization"),
        ("band", "complex band structure CSV + SVG at normal incidence"),
        ("mie", "single-sphere cross sections over the frequency grid"),
        ("validate", "run invariant suites, report residuals (exit 0 = pass)"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="scene config file path")
        p.add_argument("--preset", help="built-in scene name (paper-fig2/3/4)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--lmax", type=int, default=None)
        p.add_argument("--cutoff", type=float, default=None)
        p.add_argument("--units", choices=("angular", "ordinary"), default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "validate":
            return cmd_validate(args, out)
        scene = _load_scene(args)
        runner = {
            "spectrum": cmd_spectrum,
            "sweep": cmd_sweep,
            "band": cmd_band,
            "mie": cmd_mie,
        }[args.command]
        paths = runner(scene, out, max(1, args.threads))
        for p in paths:
            sys.stdout.write(f"wrote {p}\n")
        return 0
    except PcfilmError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
