import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import F0
from ucadmn.beamform import (
    cms_rho,
    directivity_of,
    max_directivity,
    network_transfer,
    realized_gain_through_network,
    realized_gain_unmatched,
    scan_gain_curve,
    steering_vector,
    to_dbi,
)
from ucadmn.dmnsynth import star_triangle_six_port, synth_star_triangle, synth_two_stage, two_stage_six_port
from ucadmn.errors import CmsInconsistent, SingularOverlap
from ucadmn.netcore import MultiportNetwork
from ucadmn.ucamodel import OverlapMatrix, SymmetricArrayModel, UcaGeometry, monopole_pattern, overlap_matrix

TH70 = np.deg2rad(70.0)
Z0 = 50.0


def probe_gains(model, overlap, direction, transfer, n=100_000, seed=3):
    """Gain of random source voltages: 4 z0 rho |e^T T v|^2 / |v|^2."""
    rng = np.random.default_rng(seed)
    rho = cms_rho(model, overlap)
    e = steering_vector(overlap.geometry, *direction)
    k = transfer.shape[1]
    v = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    i = v @ transfer.T
    return to_dbi(4 * Z0 * rho * np.abs(i @ e) ** 2 / np.sum(np.abs(v) ** 2, axis=1))


def test_steering_vector_magnitude():
    g = UcaGeometry(5, 0.2)
    e = steering_vector(g, 1.1, 0.3)
    assert np.allclose(np.abs(e), monopole_pattern(1.1))


def test_single_element_directivity():
    g = UcaGeometry(1, 0.1)
    a = overlap_matrix(g, 256)
    d, _ = max_directivity(g, a, (np.pi / 2, 0.0))
    assert d == pytest.approx(10 * np.log10(1 / a.a_diag), abs=1e-12)
    assert d == pytest.approx(5.16, abs=0.01)


def test_three_element_level(cms3):
    g, _, a = cms3
    for phi in np.linspace(0, 2 * np.pi, 7):
        d, _ = max_directivity(g, a, (TH70, phi))
        assert 9.0 <= d <= 10.5


def test_directivity_weights_reach_optimum(cms3):
    g, _, a = cms3
    direction = (TH70, 0.4)
    d, w = max_directivity(g, a, direction)
    assert to_dbi(directivity_of(a, w, direction)) == pytest.approx(d, abs=1e-10)
    assert to_dbi(directivity_of(a, (2 - 3j) * w, direction)) == pytest.approx(d, abs=1e-10)


def test_directivity_monte_carlo(cms3):
    g, _, a = cms3
    direction = (TH70, 1.0)
    d, _ = max_directivity(g, a, direction)
    rng = np.random.default_rng(1)
    w = rng.normal(size=(100_000, 3)) + 1j * rng.normal(size=(100_000, 3))
    e = steering_vector(g, *direction)
    dir_ = np.abs(w @ e) ** 2 / np.real(np.einsum("ki,ij,kj->k", w.conj(), a.entries, w))
    assert np.max(to_dbi(dir_)) <= d + 1e-9


def test_singular_overlap():
    g = UcaGeometry(2, 0.1)
    bad = OverlapMatrix(np.ones((2, 2)), g, np.pi / 2, 64)
    with pytest.raises(SingularOverlap):
        max_directivity(g, bad, (TH70, 0.0))


def test_unmatched_single_element():
    g = UcaGeometry(1, 0.1)
    a = overlap_matrix(g)
    d, _ = max_directivity(g, a, (np.pi / 2, 0))
    gm, _ = realized_gain_unmatched(SymmetricArrayModel([[Z0]]), a, Z0, (np.pi / 2, 0))
    assert gm == pytest.approx(d, abs=1e-12)
    x = 30.0
    gx, _ = realized_gain_unmatched(SymmetricArrayModel([[Z0 + 1j * x]]), a, Z0, (np.pi / 2, 0))
    assert gx == pytest.approx(d + to_dbi(4 * Z0**2 / abs(2 * Z0 + 1j * x) ** 2), abs=1e-12)


def test_unmatched_three_elements(cms3):
    g, model, a = cms3
    gains = []
    for phi in np.linspace(0, 2 * np.pi / 3, 13):
        gu, _ = realized_gain_unmatched(model, a, Z0, (TH70, phi))
        d, _ = max_directivity(g, a, (TH70, phi))
        assert gu < d - 2.0
        gains.append(gu)
    assert np.ptp(gains) < 0.05


def test_unmatched_optimal_against_probes(cms3):
    g, model, a = cms3
    direction = (TH70, 0.3)
    gu, _ = realized_gain_unmatched(model, a, Z0, direction)
    t = np.linalg.inv(model.z_matrix + Z0 * np.eye(3))
    assert np.max(probe_gains(model, a, direction, t)) <= gu + 1e-9


def test_cms_inconsistent_model_rejected(cms3):
    _, _, a = cms3
    with pytest.raises(CmsInconsistent):
        realized_gain_unmatched(SymmetricArrayModel.from_impedances(36.5, 0), a, Z0, (TH70, 0))


@pytest.mark.parametrize("which", ["two-stage", "star-triangle"])
def test_network_reproduces_directivity(cms3, which):
    g, model, a = cms3
    if which == "two-stage":
        dmn = two_stage_six_port(synth_two_stage(model, Z0))
    else:
        dmn = star_triangle_six_port(synth_star_triangle(model, Z0))
    for phi in np.linspace(0, 2 * np.pi, 12, endpoint=False):
        gn, _ = realized_gain_through_network(dmn, model, a, Z0, (TH70, phi))
        d, _ = max_directivity(g, a, (TH70, phi))
        assert gn == pytest.approx(d, abs=1e-6)


def test_network_optimal_against_probes(cms3):
    g, model, a = cms3
    dmn = two_stage_six_port(synth_two_stage(model, Z0))
    direction = (TH70, 2.0)
    gn, _ = realized_gain_through_network(dmn, model, a, Z0, direction)
    t, _ = network_transfer(dmn, np.linalg.inv(model.z_matrix), Z0)
    assert np.max(probe_gains(model, a, direction, t)) <= gn + 1e-9


def test_through_connection_limit_equals_unmatched(cms3):
    g, model, a = cms3
    y = 1e7
    six = MultiportNetwork(np.block([[y * np.eye(3), -y * np.eye(3)], [-y * np.eye(3), y * np.eye(3)]]), "Y")
    direction = (TH70, 0.0)
    gn, _ = realized_gain_through_network(six, model, a, Z0, direction, check_tol=1e-6)
    gu, _ = realized_gain_unmatched(model, a, Z0, direction)
    assert gn == pytest.approx(gu, abs=1e-4)


def test_detuned_network_loses_gain(cms3):
    g, model, a = cms3
    design = synth_two_stage(model, Z0, f0=F0)
    direction = (TH70, 0.0)
    g0, _ = realized_gain_through_network(two_stage_six_port(design), model, a, Z0, direction)
    g1, _ = realized_gain_through_network(two_stage_six_port(design, 1.05 * F0), model, a, Z0, direction)
    assert g1 < g0 - 1e-3


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8])
def test_unmatched_below_directivity(n):
    g = UcaGeometry(n, 0.1)
    a = overlap_matrix(g)
    model = SymmetricArrayModel.cms(g)
    for phi in np.linspace(0, 2 * np.pi, 9):
        gu, _ = realized_gain_unmatched(model, a, Z0, (TH70, phi))
        d, _ = max_directivity(g, a, (TH70, phi))
        assert gu < d


@pytest.mark.parametrize("n", [3, 4, 5])
def test_scan_curve_rotation_symmetry(n):
    a = overlap_matrix(UcaGeometry(n, 0.1))
    curve = scan_gain_curve("ideal", a, TH70, 360)
    shift = 360 // n if 360 % n == 0 else None
    if shift:
        assert np.max(np.abs(curve.gain_dbi - np.roll(curve.gain_dbi, -shift))) < 1e-9


def test_scan_curve_mirror_symmetry_even():
    a = overlap_matrix(UcaGeometry(4, 0.1))
    gdb = scan_gain_curve("ideal", a, TH70, 360).gain_dbi
    k = np.arange(360)
    assert np.max(np.abs(gdb - gdb[(-k) % 360])) < 1e-9
    assert np.max(np.abs(gdb[(45 + k) % 360] - gdb[(45 - k) % 360])) < 1e-9


def test_scan_curve_single_element_flat():
    a = overlap_matrix(UcaGeometry(1, 0.1))
    curve = scan_gain_curve("ideal", a, TH70, 36)
    assert curve.ripple_db < 1e-12


def test_scan_curve_validation(cms3):
    _, model, a = cms3
    with pytest.raises(ValueError):
        scan_gain_curve("ideal", a, TH70, 10)
    with pytest.raises(ValueError):
        scan_gain_curve("unmatched", a, TH70, 36)
    with pytest.raises(ValueError):
        scan_gain_curve("network", a, TH70, 36, model)
    with pytest.raises(ValueError):
        scan_gain_curve("magic", a, TH70, 36)


def test_scan_curve_engines_agree_for_ideal_network(cms3):
    _, model, a = cms3
    dmn = two_stage_six_port(synth_two_stage(model, Z0))
    ideal = scan_gain_curve("ideal", a, TH70, 36)
    net = scan_gain_curve("network", a, TH70, 36, model, dmn)
    assert np.max(np.abs(ideal.gain_dbi - net.gain_dbi)) < 1e-6
    assert len(net.samples) == 36 and net.weights.shape == (36, 3)


@given(st.floats(0.01, 10), st.floats(0, 2 * np.pi))
def test_gain_invariant_under_voltage_scale(scale, phase):
    g = UcaGeometry(3, 0.1)
    a = overlap_matrix(g)
    w = np.array([1, -0.5 + 0.2j, 0.3j])
    c = scale * np.exp(1j * phase)
    assert directivity_of(a, c * w, (TH70, 0.2)) == pytest.approx(directivity_of(a, w, (TH70, 0.2)), rel=1e-12)
