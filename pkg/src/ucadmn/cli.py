"""Command-line entry point ``ucadmn``.

Numbers go to stdout as CSV or to files; log messages go to stderr. Exit
codes: 0 success, 1 other library errors, 2 infeasible synthesis, 3
unreadable input files, 64 bad command-line usage.

Complex values are written ``RE+IMj`` (``36.5+21.3j``). A value starting
with a minus sign must be attached with ``=``, e.g. ``--zc=-1.2+3j``.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import beamform, dmnsynth, io, tuner
from .errors import ParseError, SynthesisError, UcaDmnError
from .netcore import FrequencySweep, band_below_threshold
from .netlist import Netlist
from .ucamodel import CmsArray, SymmetricArrayModel, UcaGeometry, overlap_matrix

log = logging.getLogger("ucadmn")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r} (use RE+IMj)") from None


def _root_policy(text: str):
    if text == "min-bc":
        return text
    if text.startswith("index="):
        try:
            return int(text[6:])
        except ValueError:
            pass
    raise argparse.ArgumentTypeError("root policy must be 'min-bc' or 'index=K'")


def _emit_csv(header: list[str], rows, out=None) -> None:
    text = io._csv_text(header, rows)
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        io.atomic_write_text(out, text)


def _array_model(zin: complex, zc: complex) -> SymmetricArrayModel:
    return SymmetricArrayModel.from_impedances(zin, zc, 3)


# --------------------------------------------------------------------------
# subcommands


def cmd_synth_two_stage(args) -> int:
    model = _array_model(args.zin, args.zc)
    design = dmnsynth.synth_two_stage(model, args.z0, args.branch, args.f0)
    if design.degenerate:
        log.warning("uncoupled array: the limiting design is returned")
    _emit_csv(
        ["b1_s", "b2_s", "b3_s", "b4_s", "b5_s", "branch"],
        [[*map(float, design.susceptances), design.branch]],
    )
    if args.emit_netlist:
        dmnsynth.two_stage_tl_realization(design, args.f0, args.z_line).write(args.emit_netlist)
        log.info("wrote %s", args.emit_netlist)
    return EXIT_OK


def cmd_synth_star_triangle(args) -> int:
    model = _array_model(args.zin, args.zc)
    design = dmnsynth.synth_star_triangle(model, args.z0, args.root_policy, args.f0)
    b_c = float("nan") if design.b_c is None else design.b_c
    _emit_csv(
        ["ba_s", "bb_s", "bc_s", "bs_s", "bt_s", "root_re", "root_im"],
        [[design.b_a, design.b_b, float(b_c), design.b_s, design.b_t, design.chosen_root.real, design.chosen_root.imag]],
    )
    if args.emit_netlist:
        dmnsynth.star_triangle_tl_realization(design, args.f0, z_line=args.z_line).write(args.emit_netlist)
        log.info("wrote %s", args.emit_netlist)
    return EXIT_OK


def _freqs(args) -> np.ndarray:
    if args.points < 1:
        raise ValueError("--points must be positive")
    if args.points == 1:
        return np.array([args.freq_from])
    if not args.freq_from < args.freq_to:
        raise ValueError("--from must be below --to")
    return np.linspace(args.freq_from, args.freq_to, args.points)


def cmd_model_uca(args) -> int:
    geom = UcaGeometry(args.n, args.radius_wl)
    arr = CmsArray(geom, args.f0, args.height_wl, args.wire_radius_wl)
    if args.freq_from is None:
        freqs = np.array([args.f0])
    else:
        args.freq_to = args.f0 if args.freq_to is None else args.freq_to
        freqs = _freqs(args)
    zs = np.stack([arr.z_matrix(f) for f in freqs])
    rows = []
    for f, z in zip(freqs, zs):
        row = [float(f)]
        for k in range(args.n):
            row += [float(z[0, k].real), float(z[0, k].imag)]
        rows.append(row)
    header = ["freq_hz"]
    for k in range(args.n):
        header += [f"re_z1{k + 1}_ohm", f"im_z1{k + 1}_ohm"]
    _emit_csv(header, rows)
    if args.emit_z:
        comments = [f"CMS monopole ring: N={args.n} radius={args.radius_wl:g} wavelengths at {args.f0:g} Hz"]
        io.write_touchstone(FrequencySweep(freqs, zs, "Z", args.z0, comments), args.emit_z, args.format)
        log.info("wrote %s", args.emit_z)
    return EXIT_OK


def cmd_sweep(args) -> int:
    net = Netlist.read(args.dmn)
    antenna = io.read_touchstone(args.antenna)
    freqs = _freqs(args)
    sweep = tuner.s_sweep(net, antenna, freqs, args.z0)
    if args.out:
        if str(args.out).lower().endswith(".csv"):
            io.write_csv(sweep, args.out)
        else:
            io.write_touchstone(sweep, args.out, args.format)
        log.info("wrote %s", args.out)
    bands = band_below_threshold(sweep, args.threshold_db)
    _emit_csv(["band_lo_hz", "band_hi_hz", "rel_width"], [[lo, hi, (hi - lo) / net.f0] for lo, hi in bands])
    return EXIT_OK


def cmd_scan_gain(args) -> int:
    geom = UcaGeometry(args.n, args.radius_wl)
    overlap = overlap_matrix(geom)
    model = None if args.engine == "ideal" else SymmetricArrayModel.cms(geom)
    dmn = None
    if args.engine == "network":
        if args.dmn == "two-stage":
            dmn = dmnsynth.two_stage_six_port(dmnsynth.synth_two_stage(model, args.z0))
        elif args.dmn == "star-triangle":
            dmn = dmnsynth.star_triangle_six_port(dmnsynth.synth_star_triangle(model, args.z0))
        else:
            net = Netlist.read(args.dmn)
            dmn = net.y_network(net.f0, args.z0)
    curve = beamform.scan_gain_curve(args.engine, overlap, np.deg2rad(args.theta_deg), args.n_phi, model, dmn, args.z0)
    text = io.gain_curve_csv(curve)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        io.atomic_write_text(args.out, text)
        log.info("wrote %s", args.out)
    log.info("gain %.3f to %.3f dBi, ripple %.3f dB", curve.min_dbi, curve.max_dbi, curve.ripple_db)
    return EXIT_OK


def cmd_optimize_neutralization(args) -> int:
    geom = UcaGeometry(args.n, args.radius_wl)
    antenna = CmsArray(geom, args.f0, args.height_wl, args.wire_radius_wl)
    spec = tuner.ObjectiveSpec.around(
        args.f0, args.rel_bandwidth, target_db=args.target_db, w_match=args.w_match, w_coupling=args.w_coupling
    )
    res = tuner.optimize_neutralization(geom, antenna, spec, args.seed, args.budget, args.z0)
    if not res.feasible:
        log.warning("budget exhausted before the goal was met; best design returned")
    names = ["z_ant_ohm", "theta_ant_rad", "z_dec_ohm", "theta_dec_rad", "z_port_ohm", "theta_port_rad"]
    _emit_csv(names + ["objective_db", "worst_db", "evaluations"], [[*map(float, res.design.params()), res.objective, res.worst_db, res.n_evals]])
    if args.out:
        res.design.netlist().write(args.out)
        log.info("wrote %s", args.out)
    if args.log:
        io.write_csv(res.log, args.log, param_names=names)
        log.info("wrote %s", args.log)
    return EXIT_OK


def cmd_convert(args) -> int:
    sweep = io.read_touchstone(args.input)
    out = sweep.to(args.to.upper(), args.z0)
    out.comments = sweep.comments
    io.write_touchstone(out, args.out, args.format)
    log.info("wrote %s", args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ucadmn", description="Decoupling and matching networks for circular monopole arrays.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def synth_common(sp):
        sp.add_argument("--zin", type=_complex, required=True, help="self impedance, RE+IMj ohms")
        sp.add_argument("--zc", type=_complex, required=True, help="coupling impedance, RE+IMj ohms")
        sp.add_argument("--z0", type=float, default=50.0)
        sp.add_argument("--f0", type=float, default=3.6e9)
        sp.add_argument("--z-line", type=float, default=50.0, help="impedance of the realizing lines")
        sp.add_argument("--emit-netlist", metavar="PATH")

    synth = sub.add_parser("synth", help="closed-form network synthesis")
    ssub = synth.add_subparsers(dest="topology", required=True, parser_class=_Parser)
    ts = ssub.add_parser("two-stage")
    synth_common(ts)
    ts.add_argument("--branch", choices=dmnsynth.BRANCHES)
    ts.set_defaults(func=cmd_synth_two_stage)
    st = ssub.add_parser("star-triangle")
    synth_common(st)
    st.add_argument("--root-policy", type=_root_policy, default="min-bc", help="min-bc or index=K")
    st.set_defaults(func=cmd_synth_star_triangle)

    def array_common(sp):
        sp.add_argument("--n", type=int, default=3, help="number of elements")
        sp.add_argument("--radius-wl", type=float, default=0.1, help="ring radius in wavelengths at f0")
        sp.add_argument("--f0", type=float, default=3.6e9)
        sp.add_argument("--height-wl", type=float, default=0.25)
        sp.add_argument("--wire-radius-wl", type=float, default=0.018)
        sp.add_argument("--z0", type=float, default=50.0)

    def sweep_common(sp, required):
        sp.add_argument("--from", dest="freq_from", type=float, required=required)
        sp.add_argument("--to", dest="freq_to", type=float, required=required)
        sp.add_argument("--points", type=int, default=401)
        sp.add_argument("--format", choices=("RI", "MA", "DB"), default="RI", type=str.upper)

    model = sub.add_parser("model", help="antenna array models")
    msub = model.add_subparsers(dest="model", required=True, parser_class=_Parser)
    uca = msub.add_parser("uca", help="CMS monopole ring impedances")
    array_common(uca)
    sweep_common(uca, required=False)
    uca.add_argument("--emit-z", metavar="PATH.sNp")
    uca.set_defaults(func=cmd_model_uca)

    sw = sub.add_parser("sweep", help="sweep a netlist loaded by a Touchstone antenna")
    sw.add_argument("--dmn", required=True, metavar="NETLIST")
    sw.add_argument("--antenna", required=True, metavar="PATH.sNp")
    sweep_common(sw, required=True)
    sw.add_argument("--z0", type=float, default=50.0)
    sw.add_argument("--threshold-db", type=float, default=-16.0)
    sw.add_argument("--out", metavar="PATH.sNp|PATH.csv")
    sw.set_defaults(func=cmd_sweep)

    sg = sub.add_parser("scan-gain", help="optimal gain against azimuth steering angle")
    sg.add_argument("--engine", choices=beamform.ENGINES, default="ideal")
    sg.add_argument("--n", type=int, default=3)
    sg.add_argument("--radius-wl", type=float, default=0.1)
    sg.add_argument("--theta-deg", type=float, default=70.0)
    sg.add_argument("--n-phi", type=int, default=360)
    sg.add_argument("--z0", type=float, default=50.0)
    sg.add_argument("--dmn", default="two-stage", help="two-stage, star-triangle or a netlist path")
    sg.add_argument("--out", default="-", metavar="PATH.csv")
    sg.set_defaults(func=cmd_scan_gain)

    opt = sub.add_parser("optimize", help="numerical network design")
    osub = opt.add_subparsers(dest="target", required=True, parser_class=_Parser)
    neu = osub.add_parser("neutralization")
    array_common(neu)
    neu.add_argument("--rel-bandwidth", type=float, default=0.01, help="half width of the band relative to f0")
    neu.add_argument("--target-db", type=float, default=-16.0)
    neu.add_argument("--w-match", type=float, default=1.0)
    neu.add_argument("--w-coupling", type=float, default=1.0)
    neu.add_argument("--budget", type=int, default=10_000)
    neu.add_argument("--seed", type=int, default=1)
    neu.add_argument("--out", metavar="NETLIST")
    neu.add_argument("--log", metavar="PATH.csv")
    neu.set_defaults(func=cmd_optimize_neutralization)

    cv = sub.add_parser("convert", help="change the representation of a Touchstone file")
    cv.add_argument("--in", dest="input", required=True, metavar="PATH.sNp")
    cv.add_argument("--to", required=True, choices=("s", "y", "z", "S", "Y", "Z"))
    cv.add_argument("--z0", type=float, default=None, help="reference impedance of the output")
    cv.add_argument("--out", required=True, metavar="PATH.sNp")
    cv.add_argument("--format", choices=("RI", "MA", "DB"), default="RI", type=str.upper)
    cv.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except SynthesisError as exc:
        log.error("synthesis infeasible: %s", exc)
        return EXIT_INFEASIBLE
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except (UcaDmnError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
