import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ucadmn.errors import GeometryInvalid, StarResonance, StubResonance
from ucadmn.netcore import MultiportNetwork, convert, terminate
from ucadmn.rfelements import (
    Susceptance,
    TransmissionLine,
    abcd_input_impedance,
    coax_impedance,
    open_stub_admittance,
    quarter_wave_equivalent,
    series_abcd,
    star_three_port,
    stub_for_susceptance,
    susceptance_at,
    tl_abcd,
    tl_two_port,
    tl_y_matrix,
    triangle_three_port,
)

F0 = 3.6e9


def test_susceptance_laws():
    c = Susceptance(0.02, F0)
    ind = Susceptance(-0.02, F0)
    assert susceptance_at(c, F0) == 0.02
    assert susceptance_at(c, 2 * F0) == pytest.approx(0.04)
    assert susceptance_at(ind, 2 * F0) == pytest.approx(-0.01)
    assert c.realization == "capacitor" and ind.realization == "inductor"


@given(st.floats(-1, 1).filter(lambda b: abs(b) > 1e-6), st.floats(0.1, 10), st.floats(0.1, 10))
def test_susceptance_monotone_in_frequency(b0, x1, x2):
    s = Susceptance(b0, 1.0)
    lo, hi = sorted((x1, x2))
    assert s.at(lo) <= s.at(hi) + 1e-15


def test_open_stub_values():
    assert open_stub_admittance(TransmissionLine(50, np.pi / 4, F0), F0) == pytest.approx(0.02j)
    assert open_stub_admittance(TransmissionLine(50, 1e-12, F0), F0) == pytest.approx(0, abs=1e-13)
    y = open_stub_admittance(TransmissionLine(70, 1.0, F0), F0)
    assert y == pytest.approx(1j * np.tan(1.0) / 70, rel=1e-14)
    assert abs(y.imag - 0.02225) < 1e-5


def test_open_stub_matches_open_terminated_abcd():
    tl = TransmissionLine(70, 1.0, F0)
    abcd = tl_abcd(tl, F0)
    # input admittance with an open far end is C/A
    assert open_stub_admittance(tl, F0) == pytest.approx(abcd[1, 0] / abcd[0, 0], rel=1e-14)


def test_stub_resonance():
    with pytest.raises(StubResonance):
        open_stub_admittance(TransmissionLine(50, np.pi / 2, F0), F0)


def test_lossy_stub_tends_to_lossless():
    tl = TransmissionLine(50, 0.7, F0, 1e-9)
    assert open_stub_admittance(tl, F0) == pytest.approx(open_stub_admittance(TransmissionLine(50, 0.7, F0), F0))


def test_full_wave_line_is_identity_up_to_phase():
    s = tl_two_port(TransmissionLine(37.0, 2 * np.pi, F0), F0).matrix
    assert abs(s[1, 0]) == pytest.approx(1, abs=1e-12)
    assert abs(s[0, 0]) < 1e-12


def test_quarter_wave_inverter():
    abcd = tl_abcd(TransmissionLine(50, np.pi / 2, F0), F0)
    assert abcd_input_impedance(abcd, 100.0) == pytest.approx(25.0, rel=1e-12)


def test_input_impedance_two_ways():
    tl = TransmissionLine(60, np.pi / 3, F0)
    zl = 30 + 10j
    via_abcd = abcd_input_impedance(tl_abcd(tl, F0), zl)
    y2 = MultiportNetwork(tl_y_matrix(tl, F0), "Y")
    via_y = 1 / terminate(y2, MultiportNetwork([[1 / zl]], "Y"), [1]).matrix[0, 0]
    s2 = tl_two_port(tl, F0)
    gl = (zl - 50) / (zl + 50)
    s = s2.matrix
    gin = s[0, 0] + s[0, 1] * s[1, 0] * gl / (1 - s[1, 1] * gl)
    via_s = 50 * (1 + gin) / (1 - gin)
    assert abs(via_abcd - via_y) < 1e-12 * abs(via_abcd)
    assert abs(via_abcd - via_s) < 1e-12 * abs(via_abcd)


@given(st.floats(5, 250), st.floats(0.01, 6.2), st.floats(0.5, 2.0))
def test_lossless_line_unitary(z, theta, scale):
    tl = TransmissionLine(z, theta, F0)
    s = tl_two_port(tl, F0 * scale).matrix
    assert np.max(np.abs(s.conj().T @ s - np.eye(2))) < 1e-10
    assert abs(s[0, 1] - s[1, 0]) < 1e-12


@pytest.mark.parametrize("x", [50.0, -50.0, 3.3, -420.0])
def test_quarter_wave_equivalent_exact_at_f0(x):
    sec = quarter_wave_equivalent(x, F0)
    assert np.max(np.abs(sec.abcd(F0) - series_abcd(1j * x))) < 1e-9
    for f in (0.95 * F0, 1.05 * F0, 1.1 * F0):
        assert np.max(np.abs(sec.abcd(f) - series_abcd(1j * x * f / F0))) > 1e-4


def test_stub_for_susceptance():
    for b in (0.02, -0.013, 1e-5):
        tl = stub_for_susceptance(b, F0)
        assert open_stub_admittance(tl, F0) == pytest.approx(1j * b, rel=1e-12)
        assert 0 < tl.theta0 <= np.pi


def test_star_three_port_formula():
    y = star_three_port(50.0, np.pi / 4).matrix
    y_s, y_sp = -0.02j, -2j / 150
    assert y[0, 0] == pytest.approx(y_s - y_sp)
    assert y[0, 1] == pytest.approx(-y_sp)


def _nodal_star(z, theta):
    # brute force: three lines into a centre node, eliminate the centre
    y = np.zeros((4, 4), dtype=complex)
    for k in range(3):
        m = tl_y_matrix(TransmissionLine(z, theta, 1.0), 1.0)
        idx = [k, 3]
        y[np.ix_(idx, idx)] += m
    return y[:3, :3] - np.outer(y[:3, 3], y[3, :3]) / y[3, 3]


@given(st.floats(10, 200), st.floats(0.05, 3.0))
def test_star_three_port_vs_nodal(z, theta):
    if abs(np.sin(2 * theta)) < 1e-3:
        return
    assert np.max(np.abs(star_three_port(z, theta).matrix - _nodal_star(z, theta))) < 1e-10 / z


def test_triangle_three_port_vs_lines():
    z, th = 80.0, 1.2
    m = tl_y_matrix(TransmissionLine(z, th, 1.0), 1.0)
    y = np.zeros((3, 3), dtype=complex)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        y[np.ix_([i, j], [i, j])] += m
    assert np.max(np.abs(triangle_three_port(z, th).matrix - y)) < 1e-14


def test_star_resonance():
    with pytest.raises(StarResonance):
        star_three_port(50, np.pi / 2)
    with pytest.raises(StarResonance):
        triangle_three_port(50, np.pi)


def test_coax_impedance():
    assert coax_impedance(1.5e-3, 2.5e-3, 2.2) == pytest.approx(20.6, abs=0.05)
    assert coax_impedance(1.0, np.e, 1.0) == pytest.approx(59.9585, abs=1e-3)
    assert coax_impedance(1.0, 1.0 + 1e-12) < 1e-9
    with pytest.raises(GeometryInvalid):
        coax_impedance(2.0, 1.0)
    with pytest.raises(GeometryInvalid):
        coax_impedance(1.0, 2.0, 0.5)


def test_lossless_stub_network_unitary_over_sweep():
    tl = TransmissionLine(35.0, 0.9, F0)
    for f in np.linspace(0.5, 1.5, 21) * F0:
        y = MultiportNetwork([[open_stub_admittance(tl, f)]], "Y", f)
        s = convert(y, "S").matrix
        assert abs(abs(s[0, 0]) - 1) < 1e-10
