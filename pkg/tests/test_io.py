import locale

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import F0
from ucadmn.beamform import scan_gain_curve
from ucadmn.errors import ArityError, IoError, ParseError, UnsupportedVersion
from ucadmn.io import (
    format_touchstone,
    gain_curve_csv,
    optimization_log_csv,
    parse_touchstone,
    read_touchstone,
    sweep_csv,
    write_csv,
    write_touchstone,
)
from ucadmn.netcore import FrequencySweep
from ucadmn.tuner import OptimizationLog


def _random_sweep(rng, n, kind="S", nf=5):
    freqs = np.sort(rng.uniform(1e9, 6e9, nf))
    mats = rng.normal(size=(nf, n, n)) + 1j * rng.normal(size=(nf, n, n))
    if kind == "Z":
        mats *= 50
    elif kind == "Y":
        mats /= 50
    return FrequencySweep(freqs, mats, kind, 50.0, ["measured", "second line"])


def test_minimal_s1p(tmp_path):
    p = tmp_path / "a.s1p"
    p.write_text("# GHz S RI R 50\n3.6 0.0 0.0\n")
    sw = read_touchstone(p)
    assert sw.freqs.tolist() == [3.6e9]
    assert sw.matrices.shape == (1, 1, 1) and sw.matrices[0, 0, 0] == 0
    assert sw.kind == "S" and sw.ref_impedance == 50


def test_ma_unit_magnitude():
    sw = parse_touchstone("# MHz S MA R 50\n3600 1 0\n", 1)
    assert sw.matrices[0, 0, 0] == 1 + 0j and sw.freqs[0] == 3.6e9


def test_default_options_and_any_order():
    sw = parse_touchstone("1 0.5 90\n", 1)
    assert sw.freqs[0] == 1e9 and np.isclose(sw.matrices[0, 0, 0], 0.5j)
    sw = parse_touchstone("# R 75 ri hz\n10 0.1 0.2\n", 1)
    assert sw.ref_impedance == 75 and sw.freqs[0] == 10 and sw.matrices[0, 0, 0] == 0.1 + 0.2j


def test_db_format():
    sw = parse_touchstone("# GHz S DB R 50\n1 -20 180\n", 1)
    assert np.isclose(sw.matrices[0, 0, 0], -0.1)


def test_two_port_column_order():
    sw = parse_touchstone("# GHz S RI R 50\n1 11 0 21 0 12 0 22 0\n", 2)
    assert sw.matrices[0].real.tolist() == [[11, 12], [21, 22]]


def test_three_port_row_order_wrapped_over_lines():
    text = "# GHz S RI R 50\n1 11 0 12 0 13 0\n  21 0 22 0 23 0\n  31 0 32 0 33 0\n"
    sw = parse_touchstone(text, 3)
    assert sw.matrices[0].real.tolist() == [[11, 12, 13], [21, 22, 23], [31, 32, 33]]


def test_z_and_y_are_denormalized():
    z = parse_touchstone("# GHz Z RI R 50\n1 2 0\n", 1)
    y = parse_touchstone("# GHz Y RI R 50\n1 2 0\n", 1)
    assert z.kind == "Z" and z.matrices[0, 0, 0] == 100
    assert y.kind == "Y" and y.matrices[0, 0, 0] == pytest.approx(0.04)


def test_inline_comments_and_noise_block():
    text = "! header\n# GHz S RI R 50\n1 0 0 0 0 0 0 0 0 ! data\n2 0 0 0 0 0 0 0 0\n1 2 3 4 5\n"
    sw = parse_touchstone(text, 2)
    assert len(sw) == 2 and sw.comments == ["header"]


@pytest.mark.parametrize("n,kind", [(1, "S"), (2, "Z"), (3, "S"), (3, "Y"), (4, "Z"), (6, "S")])
@pytest.mark.parametrize("fmt", ["RI", "MA", "DB"])
def test_round_trip(tmp_path, rng, n, kind, fmt):
    sw = _random_sweep(rng, n, kind)
    p = tmp_path / f"x.s{n}p"
    write_touchstone(sw, p, fmt)
    back = read_touchstone(p)
    assert back.kind == kind and back.comments == sw.comments
    assert np.allclose(back.freqs, sw.freqs, rtol=1e-11, atol=0)
    scale = np.max(np.abs(sw.matrices))
    assert np.max(np.abs(back.matrices - sw.matrices)) < 1e-9 * scale
    # a second pass through the file changes nothing
    p2 = tmp_path / f"y.s{n}p"
    write_touchstone(back, p2, fmt)
    assert np.max(np.abs(read_touchstone(p2).matrices - back.matrices)) < 1e-9 * scale


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
def test_round_trip_property(vals):
    sw = FrequencySweep([3.6e9], np.array(vals).reshape(1, 2, 2), "S")
    for fmt in ("RI", "MA"):
        back = parse_touchstone(format_touchstone(sw, fmt), 2)
        assert np.max(np.abs(back.matrices - sw.matrices)) <= 1e-9 * max(1.0, np.max(np.abs(sw.matrices)))


def test_three_port_db_rows_have_nineteen_fields(rng):
    text = format_touchstone(_random_sweep(rng, 3), "DB")
    rows = [l for l in text.splitlines() if l and l[0] not in "!#"]
    assert len(rows) == 5 and all(len(r.split()) == 19 for r in rows)
    assert "# GHz S DB R 50" in text


def test_writes_are_byte_identical(tmp_path, rng):
    sw = _random_sweep(rng, 3)
    a, b = tmp_path / "a.s3p", tmp_path / "b.s3p"
    write_touchstone(sw, a)
    write_touchstone(sw, b)
    assert a.read_bytes() == b.read_bytes()
    write_csv(sw, tmp_path / "a.csv")
    write_csv(sw, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_output_is_locale_independent(rng):
    sw = _random_sweep(rng, 2)
    before = format_touchstone(sw), sweep_csv(sw)
    for name in ("de_DE.UTF-8", "fr_FR.UTF-8"):
        try:
            old = locale.setlocale(locale.LC_ALL, name)
        except locale.Error:
            continue
        try:
            assert (format_touchstone(sw), sweep_csv(sw)) == before
        finally:
            locale.setlocale(locale.LC_ALL, "C")
    assert "," not in before[0]


def test_extension_must_match_port_count(tmp_path, rng):
    with pytest.raises(ValueError):
        write_touchstone(_random_sweep(rng, 3), tmp_path / "a.s2p")
    with pytest.raises(ParseError):
        write_touchstone(_random_sweep(rng, 3), tmp_path / "a.txt")


def test_unwritable_location_raises_ioerror(tmp_path, rng):
    with pytest.raises(IoError):
        write_touchstone(_random_sweep(rng, 1), tmp_path / "missing" / "a.s1p")
    assert not list(tmp_path.iterdir())


def test_arity_error_reports_line():
    text = "# GHz S RI R 50\n1 0 0 0 0 0 0\n0 0 0 0 0 0\n0 0 0 0 0 0\n2 0 0\n"
    with pytest.raises(ArityError) as exc:
        parse_touchstone(text, 3)
    assert exc.value.line == 5 and ":5:" not in str(exc.value) and "5:" in str(exc.value)


@pytest.mark.parametrize(
    "text,line",
    [
        ("# GHz S RI R 50\n2 0 0\n1 0 0\n", 3),
        ("# GHz S RI R 50\n1 0 abc\n", 2),
        ("! c\n# GHz S XX R 50\n1 0 0\n", 2),
        ("# GHz S RI R\n1 0 0\n", 1),
        ("# GHz S RI R -5\n1 0 0\n", 1),
        ("# GHz G RI R 50\n1 0 0\n", 1),
    ],
)
def test_malformed_files_report_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_touchstone(text, 1)
    assert exc.value.line == line


def test_version_two_rejected(tmp_path):
    p = tmp_path / "v2.s1p"
    p.write_text("[Version] 2.0\n# GHz S RI R 50\n[Number of Ports] 1\n")
    with pytest.raises(UnsupportedVersion) as exc:
        read_touchstone(p)
    assert exc.value.line == 1 and str(p) in str(exc.value)


def test_empty_file_rejected():
    with pytest.raises(ParseError):
        parse_touchstone("! only a comment\n# GHz S RI R 50\n", 1)


def test_sweep_csv_header_and_values():
    sw = FrequencySweep([1e9, 2e9], np.array([[[0.1, 0.5j], [0.5j, 0.1]]] * 2), "S")
    lines = sweep_csv(sw).splitlines()
    assert lines[0] == "freq_hz,s11_db,s11_deg,s12_db,s12_deg,s21_db,s21_deg,s22_db,s22_deg"
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == 1e9 and row[1] == pytest.approx(-20) and row[4] == pytest.approx(90)


def test_sweep_csv_converts_to_s():
    sw = FrequencySweep([1e9], np.array([[[50.0]]]), "Z")
    row = sweep_csv(sw).splitlines()[1].split(",")
    assert float(row[1]) == -400.0


def test_gain_curve_csv(cms3):
    geom, model, a = cms3
    curve = scan_gain_curve("ideal", a, np.deg2rad(70), 36)
    lines = gain_curve_csv(curve).splitlines()
    assert lines[0] == "phi0_deg,gain_dbi,re_w1,im_w1,re_w2,im_w2,re_w3,im_w3"
    assert len(lines) == 37
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == 0.0 and row[1] == pytest.approx(curve.samples[0][1], abs=1e-9)


def test_optimization_log_csv():
    log = OptimizationLog()
    log.record([1.0, 2.0], 0.5)
    log.record([1.5, 2.5], 0.25)
    lines = optimization_log_csv(log, ["z", "theta"]).splitlines()
    assert lines == ["iter,objective_db,z,theta", "0,0.5,1,2", "1,0.25,1.5,2.5"]


def test_write_csv_rejects_unknown(tmp_path):
    with pytest.raises(TypeError):
        write_csv(object(), tmp_path / "x.csv")
