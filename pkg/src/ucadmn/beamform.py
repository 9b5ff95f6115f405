"""Optimal beamforming gain of circular arrays with and without a matching network.

Three engines share one normalization. Under the canonical minimum-scattering
assumption ``Re Z_A = rho * A`` with ``rho = Re z_in / a11``, so radiated power
is ``rho/2 * i^H A i`` and the gain of port currents ``i`` driven by sources
of internal impedance ``z0`` and open-circuit voltages ``v`` is
``4 z0 rho |e^T i|^2 / |v|^2``. The ideal engine is the directivity
``e^H A^-1 e``, which every lossless matching network can at best reach.

Steering vectors use the phase convention of :func:`ucamodel.array_factor`:
the far field of excitations ``a`` towards ``u`` is ``e(u)^T a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CmsInconsistent, SingularComposition, SingularOverlap
from .netcore import COND_LIMIT, MultiportNetwork, convert, terminate
from .ucamodel import QUARTER_WAVE, OverlapMatrix, SymmetricArrayModel, UcaGeometry, monopole_pattern

ENGINES = ("ideal", "unmatched", "network")
CMS_TOL = 0.01


def to_dbi(g):
    return 10 * np.log10(g)


def steering_vector(geom: UcaGeometry, theta: float, phi: float, kh: float = QUARTER_WAVE) -> np.ndarray:
    """``e_n = C(theta) exp(j 2 pi r sin(theta) cos(phi - phi_n))``."""
    psi = 2 * np.pi * geom.radius_wavelengths * np.sin(theta) * np.cos(phi - geom.element_angles)
    return monopole_pattern(theta, kh) * np.exp(1j * psi)


def _steer(overlap: OverlapMatrix, direction) -> np.ndarray:
    theta, phi = direction
    return steering_vector(overlap.geometry, theta, phi, overlap.kh)


def _cholesky(a: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularOverlap(f"overlap matrix is singular (condition {cond:.3g})")
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise SingularOverlap("overlap matrix is not positive definite") from None


def max_directivity(geom: UcaGeometry, overlap: OverlapMatrix, direction) -> tuple[float, np.ndarray]:
    """Maximum directivity towards ``direction = (theta, phi)`` and the weights that reach it.

    Returns ``(dbi, a)`` with ``a = A^-1 conj(e)``, so that
    ``array_factor(geom, a, theta, phi) * C(theta)`` equals ``e^H A^-1 e``.
    """
    if overlap.geometry != geom:
        raise ValueError("overlap matrix was computed for a different geometry")
    e = _steer(overlap, direction)
    chol = _cholesky(overlap.entries)
    w = np.linalg.solve(chol.T, np.linalg.solve(chol, e.conj()))
    d = float(np.real(e @ w))
    return to_dbi(d), w


def directivity_of(overlap: OverlapMatrix, weights, direction) -> float:
    """Directivity (linear) of arbitrary excitations; never exceeds :func:`max_directivity`."""
    a = np.asarray(weights, dtype=complex)
    e = _steer(overlap, direction)
    return float(abs(e @ a) ** 2 / np.real(a.conj() @ overlap.entries @ a))


def cms_rho(model: SymmetricArrayModel, overlap: OverlapMatrix, tol: float = CMS_TOL) -> float:
    """Gain normalization ``rho = Re z_in / a11`` after checking ``Re Z_A = rho A``.

    The check is relative to the self term so that decorrelated, far-apart
    pairs with tiny entries do not dominate.
    """
    a = overlap.entries
    r = model.z_matrix.real
    if r.shape != a.shape:
        raise ValueError("impedance and overlap matrices have different sizes")
    rho = float(r[0, 0] / a[0, 0])
    err = np.max(np.abs(r - rho * a)) / (rho * a[0, 0])
    if not err <= tol:
        raise CmsInconsistent(f"Re Z_A differs from rho * A by {100 * err:.3g} % (limit {100 * tol:.3g} %)")
    return rho


def realized_gain_unmatched(
    model: SymmetricArrayModel, overlap: OverlapMatrix, z0: float, direction
) -> tuple[float, np.ndarray]:
    """Best gain when sources with internal impedance ``z0`` drive the antennas directly.

    ``i = (Z_A + z0 I)^-1 v`` and the optimum over ``v`` is
    ``G = 4 z0 rho ||(Z_A + z0 I)^-T e||^2`` at ``v = conj((Z_A + z0 I)^-T e)``.
    """
    rho = cms_rho(model, overlap)
    e = _steer(overlap, direction)
    m = model.z_matrix + z0 * np.eye(model.n_elements)
    h = np.linalg.solve(m.T, e)
    g = 4 * z0 * rho * float(np.real(h.conj() @ h))
    return to_dbi(g), h.conj()


def _as_y(net) -> MultiportNetwork:
    return net if net.kind == "Y" else convert(net, "Y")


def network_transfer(dmn: MultiportNetwork, y_antenna: np.ndarray, z0: float) -> tuple[np.ndarray, np.ndarray]:
    """Antenna-current transfer ``T`` (``i_A = T v``) and the feed input admittance.

    ``dmn`` has its antenna ports first and feeds last; sources with
    internal impedance ``z0`` sit at the feeds.
    """
    y = _as_y(dmn).matrix
    n = y_antenna.shape[0]
    if y.shape != (2 * n, 2 * n):
        raise ValueError(f"network must have {2 * n} ports for a {n}-element array")
    y_aa, y_ap = y[:n, :n], y[:n, n:]
    y_pa, y_pp = y[n:, :n], y[n:, n:]
    k = y_aa + y_antenna
    cond = np.linalg.cond(k)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularComposition(f"Y_AA + Y_A is singular (condition {cond:.3g})")
    # antenna-port voltages per unit feed voltage
    g_ap = -np.linalg.solve(k, y_ap)
    y_in = y_pp + y_pa @ g_ap
    src = np.eye(n) + z0 * y_in
    cond = np.linalg.cond(src)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularComposition(f"feed network is singular (condition {cond:.3g})")
    t = y_antenna @ g_ap @ np.linalg.inv(src)
    return t, y_in


def realized_gain_through_network(
    dmn: MultiportNetwork,
    model: SymmetricArrayModel,
    overlap: OverlapMatrix,
    z0: float,
    direction,
    check_tol: float = 1e-10,
) -> tuple[float, np.ndarray]:
    """Best gain with the array fed through a 2N-port network.

    Returns ``(dbi, v)`` where ``v`` are the optimal source voltages at the
    feeds; ``G = 4 z0 rho ||T^T e||^2``.
    """
    rho = cms_rho(model, overlap)
    y_ant = np.linalg.inv(model.z_matrix)
    t, y_in = network_transfer(dmn, y_ant, z0)
    n = model.n_elements
    ref = terminate(_as_y(dmn), MultiportNetwork(y_ant, "Y", dmn.freq), list(range(n))).matrix
    scale = max(np.max(np.abs(ref)), 1e-300)
    if np.max(np.abs(y_in - ref)) > check_tol * scale:
        raise SingularComposition("composed input admittance disagrees with terminate()")
    e = _steer(overlap, direction)
    h = t.T @ e
    g = 4 * z0 * rho * float(np.real(h.conj() @ h))
    return to_dbi(g), h.conj()


@dataclass
class GainCurve:
    """Optimal realized gain against azimuth steering angle at a fixed polar angle."""

    theta_cut: float
    phi0: np.ndarray
    gain_dbi: np.ndarray
    weights: np.ndarray
    engine: str = "ideal"

    def __post_init__(self):
        self.phi0 = np.asarray(self.phi0, dtype=float)
        self.gain_dbi = np.asarray(self.gain_dbi, dtype=float)
        self.weights = np.asarray(self.weights, dtype=complex)
        if np.any(np.diff(self.phi0) <= 0):
            raise ValueError("phi0 must be strictly increasing")
        if not np.all(np.isfinite(self.gain_dbi)):
            raise ValueError("gain must be finite")

    @property
    def samples(self) -> list[tuple[float, float, np.ndarray]]:
        return list(zip(self.phi0, self.gain_dbi, self.weights))

    @property
    def ripple_db(self) -> float:
        return float(self.gain_dbi.max() - self.gain_dbi.min())

    @property
    def min_dbi(self) -> float:
        return float(self.gain_dbi.min())

    @property
    def max_dbi(self) -> float:
        return float(self.gain_dbi.max())


def scan_gain_curve(
    engine: str,
    overlap: OverlapMatrix,
    theta_cut: float = np.deg2rad(70.0),
    n_phi: int = 360,
    model: SymmetricArrayModel | None = None,
    dmn: MultiportNetwork | None = None,
    z0: float = 50.0,
) -> GainCurve:
    """Gain against azimuth ``phi0 = 2 pi k / n_phi`` for one engine.

    ``engine`` is ``'ideal'`` (directivity, i.e. any perfect matching
    network), ``'unmatched'`` (needs ``model``) or ``'network'`` (needs
    ``model`` and ``dmn``).
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, not {engine!r}")
    if n_phi < 36:
        raise ValueError("n_phi must be at least 36")
    if engine != "ideal" and model is None:
        raise ValueError(f"the {engine!r} engine needs an antenna model")
    if engine == "network" and dmn is None:
        raise ValueError("the 'network' engine needs a network")
    phis = 2 * np.pi * np.arange(n_phi) / n_phi
    gains, weights = [], []
    for phi in phis:
        direction = (theta_cut, phi)
        if engine == "ideal":
            g, w = max_directivity(overlap.geometry, overlap, direction)
        elif engine == "unmatched":
            g, w = realized_gain_unmatched(model, overlap, z0, direction)
        else:
            g, w = realized_gain_through_network(dmn, model, overlap, z0, direction)
        gains.append(g)
        weights.append(w)
    return GainCurve(theta_cut, phis, np.array(gains), np.array(weights), engine)
