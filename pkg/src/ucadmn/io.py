"""Touchstone v1 and CSV files.

Touchstone rules implemented here: ``!`` starts a comment, the option line
``# <unit> <param> <format> R <ohms>`` may list its fields in any order
(defaults GHz, S, MA, R 50), Z and Y data are normalized to R, two-port
data are ordered N11 N21 N12 N22 and larger networks row by row, and a
frequency record may wrap over several lines. Version 2 keyword files are
rejected.
"""

from __future__ import annotations

import csv
import io as _io
import logging
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .errors import ArityError, IoError, ParseError, UnsupportedVersion
from .netcore import FrequencySweep

log = logging.getLogger(__name__)

UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
PARAMS = ("S", "Y", "Z")
FORMATS = ("RI", "MA", "DB")
DIGITS = 12
_EXT = re.compile(r"\.s(\d+)p$", re.IGNORECASE)


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and an atomic rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        if isinstance(exc, OSError):
            raise IoError(f"cannot write {path}: {exc.strerror}") from exc
        raise


def ports_from_extension(path) -> int:
    m = _EXT.search(str(path))
    if not m:
        raise ParseError(f"cannot infer the port count from file name {Path(path).name!r}", None, path)
    n = int(m.group(1))
    if n < 1:
        raise ParseError("port count must be positive", None, path)
    return n


def _parse_options(tokens: list[str], lineno: int, path) -> dict:
    opts = {"unit": "GHZ", "param": "S", "format": "MA", "r": 50.0}
    it = iter(range(len(tokens)))
    for i in it:
        t = tokens[i].upper()
        if t in UNITS:
            opts["unit"] = t
        elif t in PARAMS:
            opts["param"] = t
        elif t in FORMATS:
            opts["format"] = t
        elif t == "R":
            try:
                opts["r"] = float(tokens[i + 1])
            except (IndexError, ValueError):
                raise ParseError("option R needs a numeric reference resistance", lineno, path) from None
            if opts["r"] <= 0:
                raise ParseError("reference resistance must be positive", lineno, path)
            next(it, None)
        elif t in ("G", "H"):
            raise ParseError(f"parameter type {t} is not supported", lineno, path)
        else:
            raise ParseError(f"unknown option {tokens[i]!r}", lineno, path)
    return opts


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10 ** (a / 20)
    return mag * np.exp(1j * np.deg2rad(b))


def _from_complex(x: np.ndarray, fmt: str) -> tuple[np.ndarray, np.ndarray]:
    if fmt == "RI":
        return x.real, x.imag
    ang = np.rad2deg(np.angle(x))
    if fmt == "MA":
        return np.abs(x), ang
    with np.errstate(divide="ignore"):
        return np.maximum(20 * np.log10(np.abs(x)), -400.0), ang


def _order(n: int) -> list[tuple[int, int]]:
    """File order of matrix entries."""
    if n == 2:
        return [(0, 0), (1, 0), (0, 1), (1, 1)]
    return [(i, j) for i in range(n) for j in range(n)]


def parse_touchstone(text: str, n_ports: int, path=None) -> FrequencySweep:
    opts = None
    comments: list[str] = []
    values: list[float] = []
    value_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, bang, comment = raw.partition("!")
        stripped = body.strip()
        if bang and not stripped:
            comments.append(comment.strip())
            continue
        if not stripped:
            continue
        if stripped.startswith("["):
            raise UnsupportedVersion(f"Touchstone v2 keyword {stripped.split()[0]} is not supported", lineno, path)
        if stripped.startswith("#"):
            if opts is None:
                opts = _parse_options(stripped[1:].split(), lineno, path)
            continue
        for tok in stripped.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise ParseError(f"not a number: {tok!r}", lineno, path) from None
            value_lines.append(lineno)
    opts = opts or _parse_options([], 0, path)
    arity = 1 + 2 * n_ports * n_ports
    if not values:
        raise ParseError("no network data", None, path)
    n_rec = len(values) // arity
    rem = len(values) - n_rec * arity
    if n_ports == 2 and rem:
        # two-port files may append a noise block after the network data
        n_rec = _two_port_records(values, arity)
    elif rem:
        raise ArityError(
            f"{len(values)} numbers do not form records of {arity} values for a {n_ports}-port "
            f"({rem} left over)",
            value_lines[n_rec * arity],
            path,
        )
    data = np.array(values[: n_rec * arity]).reshape(n_rec, arity)
    freqs = data[:, 0] * UNITS[opts["unit"]]
    bad = np.nonzero(np.diff(freqs) <= 0)[0]
    if bad.size:
        first = (bad[0] + 1) * arity
        raise ParseError("frequencies must be strictly increasing", value_lines[first], path)
    pairs = data[:, 1:].reshape(n_rec, n_ports * n_ports, 2)
    vals = _to_complex(pairs[..., 0], pairs[..., 1], opts["format"])
    mats = np.empty((n_rec, n_ports, n_ports), dtype=complex)
    for k, (i, j) in enumerate(_order(n_ports)):
        mats[:, i, j] = vals[:, k]
    r = opts["r"]
    if opts["param"] == "Z":
        mats *= r
    elif opts["param"] == "Y":
        mats /= r
    return FrequencySweep(freqs, mats, opts["param"], r, comments)


def _two_port_records(values: list[float], arity: int) -> int:
    n = 0
    last = -np.inf
    while (n + 1) * arity <= len(values):
        f = values[n * arity]
        if f <= last:
            break
        last = f
        n += 1
    log.warning("ignoring %d trailing values (noise parameters) in a two-port file", len(values) - n * arity)
    return n


def read_touchstone(path, n_ports: int | None = None) -> FrequencySweep:
    """Read a Touchstone v1 file into a sweep in the file's own representation.

    Raises
    ------
    ParseError
        With the offending line number; :class:`ArityError` when the numbers
        do not split into whole frequency records and
        :class:`UnsupportedVersion` for version 2 files.
    """
    n = n_ports or ports_from_extension(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_touchstone(text, n, path)


def format_touchstone(sweep: FrequencySweep, fmt: str = "RI", unit: str = "GHz") -> str:
    fmt = fmt.upper()
    unit_key = unit.upper()
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if unit_key not in UNITS:
        raise ValueError(f"unit must be one of {tuple(UNITS)}")
    if len(sweep) == 0:
        raise ValueError("cannot write an empty sweep")
    r = sweep.ref_impedance
    mats = sweep.matrices
    if sweep.kind == "Z":
        mats = mats / r
    elif sweep.kind == "Y":
        mats = mats * r
    n = sweep.n_ports
    out = _io.StringIO()
    for c in sweep.comments:
        out.write(f"! {c}\n" if c else "!\n")
    unit_name = {"HZ": "Hz", "KHZ": "kHz", "MHZ": "MHz", "GHZ": "GHz"}[unit_key]
    out.write(f"# {unit_name} {sweep.kind} {fmt} R {r:.{DIGITS}g}\n")
    order = _order(n)
    for f, m in zip(sweep.freqs, mats):
        a, b = _from_complex(np.array([m[i, j] for i, j in order]), fmt)
        row = [f"{f / UNITS[unit_key]:.{DIGITS}g}"]
        for x, y in zip(a, b):
            row += [f"{x:.{DIGITS}g}", f"{y:.{DIGITS}g}"]
        out.write(" ".join(row) + "\n")
    return out.getvalue()


def write_touchstone(sweep: FrequencySweep, path, fmt: str = "RI", unit: str = "GHz") -> None:
    """Write ``sweep`` with 12 significant digits, one frequency per row, atomically."""
    n = ports_from_extension(path)
    if n != sweep.n_ports:
        raise ValueError(f"file extension says {n} ports but the sweep has {sweep.n_ports}")
    atomic_write_text(path, format_touchstone(sweep, fmt, unit))


def _csv_text(header: list[str], rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.{DIGITS}g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def sweep_csv(sweep: FrequencySweep) -> str:
    """``freq_hz,s11_db,s11_deg,s12_db,...`` with entries row by row."""
    s = sweep if sweep.kind == "S" else sweep.to("S")
    n = s.n_ports
    header = ["freq_hz"]
    for i in range(n):
        for j in range(n):
            header += [f"s{i + 1}{j + 1}_db", f"s{i + 1}{j + 1}_deg"]
    rows = []
    for f, m in zip(s.freqs, s.matrices):
        db, deg = _from_complex(m.ravel(), "DB")
        row = [float(f)]
        for x, y in zip(db, deg):
            row += [float(x), float(y)]
        rows.append(row)
    return _csv_text(header, rows)


def gain_curve_csv(curve) -> str:
    """``phi0_deg,gain_dbi,re_w1,im_w1,...``."""
    n = curve.weights.shape[1]
    header = ["phi0_deg", "gain_dbi"]
    for k in range(n):
        header += [f"re_w{k + 1}", f"im_w{k + 1}"]
    rows = []
    for phi, g, w in curve.samples:
        row = [float(np.rad2deg(phi)), float(g)]
        for x in w:
            row += [float(x.real), float(x.imag)]
        rows.append(row)
    return _csv_text(header, rows)


def optimization_log_csv(opt_log, param_names=None) -> str:
    """``iter,objective_db,<params>`` with one row per evaluation."""
    n = len(opt_log.params[0]) if len(opt_log) else 0
    names = list(param_names) if param_names else [f"p{k + 1}" for k in range(n)]
    rows = ([i, float(v)] + [float(x) for x in p] for i, v, p in opt_log.rows())
    return _csv_text(["iter", "objective_db"] + names, rows)


def write_csv(obj, path, **kw) -> None:
    """Write a sweep, gain curve or optimization log as CSV, atomically."""
    from .beamform import GainCurve
    from .tuner import OptimizationLog

    if isinstance(obj, FrequencySweep):
        text = sweep_csv(obj)
    elif isinstance(obj, GainCurve):
        text = gain_curve_csv(obj)
    elif isinstance(obj, OptimizationLog):
        text = optimization_log_csv(obj, **kw)
    else:
        raise TypeError(f"cannot write {type(obj).__name__} as CSV")
    atomic_write_text(path, text)
