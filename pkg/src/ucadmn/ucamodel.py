"""Uniform circular array geometry, monopole patterns, pattern overlap and CMS impedances.

Distances are in free-space wavelengths throughout. The elements are thin
vertical monopoles over an infinite ground plane; the impedance model is the
induced-EMF result for sinusoidal currents, i.e. half the value of the
equivalent side-by-side dipoles. Under that model the resistive part of the
impedance matrix is proportional to the pattern-overlap matrix (the canonical
minimum-scattering assumption), which the gain engine relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import sici

from .errors import QuadratureNotConverged, SingularImpedance
from .netcore import COND_LIMIT, MultiportNetwork

QUARTER_WAVE = np.pi / 2
SERIES_BRANCH = 1e-3
# eta0 / (4 pi), the usual 30 ohm factor of the induced-EMF formulas
THIRTY = 29.9792458


@dataclass(frozen=True)
class UcaGeometry:
    """``n_elements`` monopoles on a ring of ``radius_wavelengths``; element n at 2 pi n / N."""

    n_elements: int
    radius_wavelengths: float

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("need at least one element")
        if not self.radius_wavelengths > 0:
            raise ValueError("radius must be positive")

    @property
    def element_angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_elements) / self.n_elements

    @property
    def positions(self) -> np.ndarray:
        a = self.element_angles
        return self.radius_wavelengths * np.column_stack([np.cos(a), np.sin(a)])

    @property
    def spacing(self) -> float:
        """Distance between neighbouring elements, ``r sqrt(2 - 2 cos(dphi))``."""
        if self.n_elements == 1:
            return 0.0
        return self.radius_wavelengths * np.sqrt(2 - 2 * np.cos(2 * np.pi / self.n_elements))

    def distances(self) -> np.ndarray:
        p = self.positions
        return np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)

    def scaled(self, factor: float) -> "UcaGeometry":
        return UcaGeometry(self.n_elements, self.radius_wavelengths * factor)


def monopole_pattern(theta, kh: float = QUARTER_WAVE):
    """Far-field pattern of a vertical monopole of electrical height ``kh``.

    Normalized to 1 at the horizon. For the quarter-wave case this is
    ``cos(pi/2 cos(theta)) / sin(theta)`` in the upper half space including
    the horizon itself, and zero below the ground plane. Near zenith a series expansion avoids the 0/0.
    """
    th = np.asarray(theta, dtype=float)
    out = np.zeros_like(th)
    norm = 1 - np.cos(kh)
    upper = th <= np.pi / 2
    small = upper & (th < SERIES_BRANCH)
    reg = upper & ~small
    t = th[reg]
    out[reg] = (np.cos(kh * np.cos(t)) - np.cos(kh)) / (np.sin(t) * norm)
    t = th[small]
    # Taylor expansion to third order in theta
    out[small] = t / 2 * (kh * np.sin(kh) * (1 + t**2 / 12) - kh**2 * np.cos(kh) * t**2 / 4) / norm
    return out if out.ndim else float(out)


def array_factor(geom: UcaGeometry, weights, theta: float, phi: float) -> complex:
    """``sum_n a_n exp(j 2 pi r sin(theta) cos(phi - phi_n))``."""
    w = np.asarray(weights, dtype=complex)
    if w.shape != (geom.n_elements,):
        raise ValueError(f"expected {geom.n_elements} weights, got shape {w.shape}")
    psi = 2 * np.pi * geom.radius_wavelengths * np.sin(theta) * np.cos(phi - geom.element_angles)
    return complex(np.sum(w * np.exp(1j * psi)))


@dataclass(frozen=True)
class OverlapMatrix:
    """Radiated-power Gram matrix of the element patterns.

    ``entries[m, n] = (1/4 pi) * integral of C^2 exp(j k (r_m - r_n).u) over the sphere``,
    real and symmetric. Directivity of weights ``a`` towards ``u`` is
    ``|e(u)^T a|^2 / (a^H A a)``.
    """

    entries: np.ndarray
    geometry: UcaGeometry
    kh: float = QUARTER_WAVE
    order: int = 128

    @property
    def a_diag(self) -> float:
        return float(self.entries[0, 0])


def _overlap_at_order(geom: UcaGeometry, n_theta: int, n_phi: int, kh: float) -> np.ndarray:
    # Gauss-Legendre in u = cos(theta) on [0, 1], trapezoid in phi
    x, w = np.polynomial.legendre.leggauss(n_theta)
    u = 0.5 * (x + 1)
    w = 0.5 * w
    sin_t = np.sqrt(1 - u**2)
    c2 = monopole_pattern(np.arccos(u), kh) ** 2
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    pos = geom.positions * 2 * np.pi
    n = geom.n_elements
    acc = np.zeros((n, n), dtype=complex)
    chunk = max(1, 2_000_000 // (n * n_phi))
    for s in range(0, n_theta, chunk):
        st = sin_t[s : s + chunk]
        # phase[n, t, p] = k r_n . u_hat
        proj = pos[:, 0, None] * np.cos(phi)[None, :] + pos[:, 1, None] * np.sin(phi)[None, :]
        e = np.exp(1j * proj[:, None, :] * st[None, :, None])
        acc += np.einsum("t,mtp,ntp->mn", w[s : s + chunk] * c2[s : s + chunk], e, e.conj())
    # (1/4pi) * (2pi/n_phi) sum_p -> 1/(2 n_phi)
    return acc / (2 * n_phi)


def overlap_matrix(
    geom: UcaGeometry,
    quadrature_order: int = 128,
    kh: float = QUARTER_WAVE,
    rtol: float = 1e-9,
    max_order: int = 4096,
) -> OverlapMatrix:
    """Pattern-overlap matrix by upper-hemisphere quadrature.

    The order is doubled until two successive results agree to ``rtol``
    (relative to the largest entry); the azimuthal rule is widened
    automatically for electrically large rings so that it resolves the
    phase variation.
    """
    if quadrature_order < 32:
        raise ValueError("quadrature_order must be at least 32")
    kd = 2 * np.pi * float(geom.distances().max()) if geom.n_elements > 1 else 0.0
    n_theta = max(quadrature_order, int(np.ceil(kd / 2)) + 32)

    def n_phi_for(nt):
        base = max(2 * nt, 2 * int(np.ceil(kd)) + 64)
        return base + base % 2

    prev = _overlap_at_order(geom, n_theta, n_phi_for(n_theta), kh)
    while True:
        n_theta *= 2
        cur = _overlap_at_order(geom, n_theta, n_phi_for(n_theta), kh)
        scale = np.max(np.abs(cur))
        if np.max(np.abs(cur - prev)) <= rtol * scale:
            break
        if n_theta >= max_order:
            raise QuadratureNotConverged(
                f"overlap quadrature still changing at order {n_theta}: "
                f"{np.max(np.abs(cur - prev)) / scale:.3g} relative"
            )
        prev = cur
    imag = np.max(np.abs(cur.imag))
    if imag > 1e-12 * scale:
        raise QuadratureNotConverged(f"overlap entries not real (imag part {imag:.3g})")
    a = cur.real
    a = 0.5 * (a + a.T)
    return OverlapMatrix(a, geom, kh, n_theta)


# --------------------------------------------------------------------------
# impedances


def cms_mutual_impedance(separation_wavelengths: float) -> complex:
    """Mutual impedance of two side-by-side quarter-wave monopoles (closed form).

    Cosine/sine-integral induced-EMF result for parallel half-wave dipoles,
    halved for the monopole-over-ground image configuration.
    """
    d = float(separation_wavelengths)
    if d <= 0:
        raise ValueError("separation must be positive")
    k = 2 * np.pi
    half = 0.5  # dipole length in wavelengths
    root = np.hypot(d, half)
    s0, c0 = sici(k * d)
    s1, c1 = sici(k * (root + half))
    s2, c2 = sici(k * (root - half))
    r = THIRTY * (2 * c0 - c1 - c2)
    x = -THIRTY * (2 * s0 - s1 - s2)
    return 0.5 * complex(r, x)


def cms_self_impedance() -> complex:
    """Thin-wire limit of the quarter-wave monopole input impedance (~36.5 + j21.3 ohm)."""
    s2pi, c2pi = sici(2 * np.pi)
    r = THIRTY * (np.euler_gamma + np.log(2 * np.pi) - c2pi)
    x = THIRTY * s2pi
    return 0.5 * complex(r, x)


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def monopole_mutual_impedance(separation_wavelengths: float, height_wavelengths: float, order: int = 24) -> complex:
    """Induced-EMF mutual impedance of two parallel monopoles of arbitrary height.

    Referred to the input (base) currents. The near field of one
    sinusoidal-current element is integrated along the other with a
    composite Gauss-Legendre rule whose panels shrink geometrically towards
    both wire ends, where the integrand varies on the scale of the
    separation. With the separation set to the wire radius it gives the
    self impedance.
    """
    d = float(separation_wavelengths)
    h = float(height_wavelengths)
    if d <= 0 or h <= 0:
        raise ValueError("separation and height must be positive")
    k = 2 * np.pi
    skh = np.sin(k * h)
    if abs(skh) < 1e-6:
        raise SingularImpedance("monopole height is a multiple of a half wavelength")
    edges = [0.0, h / 2, h]
    step = d / 4
    while step < h / 2:
        edges += [step, h - step]
        step *= 3
    pts = np.unique(edges)
    x, w = _gauss_legendre(order)
    a, b = pts[:-1, None], pts[1:, None]
    z = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    wz = (0.5 * (b - a) * w).ravel()
    r1 = np.hypot(d, z - h)
    r2 = np.hypot(d, z + h)
    r0 = np.hypot(d, z)
    g = np.exp(-1j * k * r1) / r1 + np.exp(-1j * k * r2) / r2 - 2 * np.cos(k * h) * np.exp(-1j * k * r0) / r0
    # both halves of the dipole, then halved for the monopole image pair
    return complex(1j * THIRTY * np.dot(wz, g * np.sin(k * (h - z))) / skh**2)


def monopole_self_impedance(height_wavelengths: float, wire_radius_wavelengths: float) -> complex:
    """Input impedance of a single monopole of finite wire radius.

    The reactance comes from the induced-EMF integral with the wire radius as
    separation. The resistance is the thin-wire radiation resistance so that
    it stays consistent with the far-field pattern of the same current.
    """
    x = monopole_mutual_impedance(wire_radius_wavelengths, height_wavelengths).imag
    r = monopole_mutual_impedance(1e-9 * height_wavelengths, height_wavelengths).real
    return complex(r, x)


@dataclass(frozen=True)
class SymmetricArrayModel:
    """Ring-symmetric antenna impedance matrix.

    For three elements a single self impedance ``z_in`` and mutual impedance
    ``z_c`` describe everything; larger rings keep the full circulant matrix.
    """

    z_matrix: np.ndarray

    def __post_init__(self):
        z = np.array(self.z_matrix, dtype=complex)
        if z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise ValueError("impedance matrix must be square")
        if np.max(np.abs(z - z.T)) > 1e-9 * np.max(np.abs(z)):
            raise ValueError("impedance matrix must be symmetric")
        z.setflags(write=False)
        object.__setattr__(self, "z_matrix", z)

    @classmethod
    def from_impedances(cls, z_in: complex, z_c: complex, n_elements: int = 3) -> "SymmetricArrayModel":
        z = np.full((n_elements, n_elements), complex(z_c))
        np.fill_diagonal(z, complex(z_in))
        return cls(z)

    @classmethod
    def cms(cls, geom: UcaGeometry) -> "SymmetricArrayModel":
        """Quarter-wave CMS model of ``geom`` from the closed-form impedances."""
        dist = geom.distances()
        z = np.empty(dist.shape, dtype=complex)
        cache: dict[float, complex] = {}
        for (m, n), dmn in np.ndenumerate(dist):
            if m == n:
                z[m, n] = cms_self_impedance()
                continue
            key = round(float(dmn), 12)
            if key not in cache:
                cache[key] = cms_mutual_impedance(dmn)
            z[m, n] = cache[key]
        return cls(0.5 * (z + z.T))

    @property
    def n_elements(self) -> int:
        return self.z_matrix.shape[0]

    @property
    def z_in(self) -> complex:
        return complex(self.z_matrix[0, 0])

    @property
    def z_c(self) -> complex:
        """Coupling impedance to the next element of the ring."""
        return complex(self.z_matrix[0, 1]) if self.n_elements > 1 else 0j

    def impedance(self, f: float = 0.0) -> MultiportNetwork:
        return MultiportNetwork(self.z_matrix, "Z", f)

    def admittance(self, f: float = 0.0) -> MultiportNetwork:
        return admittance_of(self, f)


def admittance_of(model: SymmetricArrayModel, f: float = 0.0) -> MultiportNetwork:
    """``Y_A = Z_A^-1`` by direct inversion; for a ring the result keeps alpha/beta structure."""
    z = model.z_matrix
    cond = np.linalg.cond(z)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularImpedance(f"antenna impedance matrix is singular (condition {cond:.3g})")
    y = np.linalg.inv(z)
    return MultiportNetwork(0.5 * (y + y.T), "Y", f)


def alpha_beta(y: np.ndarray) -> tuple[complex, complex]:
    """Diagonal and off-diagonal entry of a symmetric three-port admittance."""
    return complex(y[0, 0]), complex(y[0, 1])


class CmsArray:
    """Frequency-dependent CMS monopole ring with fixed physical dimensions.

    Dimensions are given in wavelengths at ``f0``: the ring radius, the
    element height (a quarter wave by default) and the wire radius, which
    sets the self impedance away from the thin-wire limit.
    """

    def __init__(
        self,
        geometry: UcaGeometry,
        f0: float,
        height_wavelengths: float = 0.25,
        wire_radius_wavelengths: float = 0.018,
    ):
        self.geometry = geometry
        self.f0 = float(f0)
        self.height = float(height_wavelengths)
        self.wire_radius = float(wire_radius_wavelengths)
        self._cache: dict[float, np.ndarray] = {}

    def geometry_at(self, f: float) -> UcaGeometry:
        return self.geometry.scaled(f / self.f0)

    def kh(self, f: float) -> float:
        return 2 * np.pi * self.height * f / self.f0

    def z_matrix(self, f: float) -> np.ndarray:
        f = float(f)
        if f not in self._cache:
            s = f / self.f0
            dist = self.geometry.distances() * s
            h = self.height * s
            z = np.empty(dist.shape, dtype=complex)
            vals: dict[float, complex] = {}
            for (m, n), dmn in np.ndenumerate(dist):
                if m == n:
                    key = -1.0
                    if key not in vals:
                        vals[key] = monopole_self_impedance(h, self.wire_radius * s)
                else:
                    key = round(float(dmn), 12)
                    if key not in vals:
                        vals[key] = monopole_mutual_impedance(dmn, h)
                z[m, n] = vals[key]
            self._cache[f] = 0.5 * (z + z.T)
        return self._cache[f]

    def model(self, f: float) -> SymmetricArrayModel:
        return SymmetricArrayModel(self.z_matrix(f))

    def overlap(self, f: float, quadrature_order: int = 128) -> OverlapMatrix:
        return overlap_matrix(self.geometry_at(f), quadrature_order, self.kh(f))
