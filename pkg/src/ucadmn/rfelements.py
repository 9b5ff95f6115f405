"""Ideal circuit primitives: lumped susceptances, TEM lines, stubs and the star three-port."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0, mu_0

from .errors import GeometryInvalid, StarResonance, StubResonance
from .netcore import MultiportNetwork

ETA0 = float(np.sqrt(mu_0 / epsilon_0))
NEPER_PER_DB = np.log(10) / 20
RESONANCE_TOL = 1e-9


@dataclass(frozen=True)
class Susceptance:
    """Lumped reactive element specified by its susceptance at the design frequency.

    Positive values are realized as capacitors (B grows with f), negative ones
    as inductors (B falls as 1/f).
    """

    b0: float
    f0: float

    @property
    def realization(self) -> str:
        return "capacitor" if self.b0 > 0 else "inductor"

    def at(self, f: float) -> float:
        return susceptance_at(self, f)


def susceptance_at(s: Susceptance, f: float) -> float:
    if f <= 0:
        raise ValueError("frequency must be positive")
    if f == s.f0:
        return s.b0
    if s.b0 > 0:
        return s.b0 * f / s.f0
    return s.b0 * s.f0 / f


@dataclass(frozen=True)
class TransmissionLine:
    """Non-dispersive TEM line.

    ``theta0`` is the electrical length in radians at ``f0``; it scales
    linearly with frequency. ``attenuation_db_per_wavelength`` adds a flat
    loss per guided wavelength.
    """

    z_c: float
    theta0: float
    f0: float
    attenuation_db_per_wavelength: float = 0.0

    def __post_init__(self):
        if not self.z_c > 0:
            raise ValueError(f"line impedance must be positive, got {self.z_c}")
        if self.attenuation_db_per_wavelength < 0:
            raise ValueError("attenuation must be non-negative")

    def theta(self, f: float) -> float:
        return self.theta0 * f / self.f0

    def gamma_l(self, f: float) -> complex:
        """Complex propagation exponent ``alpha*l + j*beta*l``."""
        th = self.theta(f)
        loss_db = self.attenuation_db_per_wavelength * th / (2 * np.pi)
        return complex(loss_db * NEPER_PER_DB, th)

    @property
    def lossless(self) -> bool:
        return self.attenuation_db_per_wavelength == 0


def open_stub_admittance(tl: TransmissionLine, f: float) -> complex:
    """Input admittance of ``tl`` with its far end open."""
    th = tl.theta(f)
    if abs(np.cos(th)) < RESONANCE_TOL:
        raise StubResonance(f"open stub of {th:.6g} rad is an odd multiple of pi/2")
    if tl.lossless:
        return 1j * np.tan(th) / tl.z_c
    return complex(np.tanh(tl.gamma_l(f)) / tl.z_c)


def tl_abcd(tl: TransmissionLine, f: float) -> np.ndarray:
    gl = tl.gamma_l(f)
    if tl.lossless:
        th = gl.imag
        c, s = np.cos(th), 1j * np.sin(th)
    else:
        c, s = np.cosh(gl), np.sinh(gl)
    return np.array([[c, tl.z_c * s], [s / tl.z_c, c]], dtype=complex)


def tl_y_matrix(tl: TransmissionLine, f: float) -> np.ndarray:
    """2x2 admittance matrix of a line; singular at multiples of a half wavelength."""
    gl = tl.gamma_l(f)
    sh = np.sinh(gl) if not tl.lossless else 1j * np.sin(gl.imag)
    if abs(sh) < RESONANCE_TOL:
        raise StubResonance(f"line of {gl.imag:.6g} rad has no admittance matrix")
    ch = np.cosh(gl) if not tl.lossless else np.cos(gl.imag)
    y11 = ch / sh / tl.z_c
    y12 = -1 / sh / tl.z_c
    return np.array([[y11, y12], [y12, y11]], dtype=complex)


def abcd_to_s(abcd: np.ndarray, z0: float = 50.0) -> np.ndarray:
    a, b, c, d = abcd[0, 0], abcd[0, 1], abcd[1, 0], abcd[1, 1]
    den = a + b / z0 + c * z0 + d
    return np.array(
        [
            [(a + b / z0 - c * z0 - d) / den, 2 * (a * d - b * c) / den],
            [2 / den, (-a + b / z0 - c * z0 + d) / den],
        ]
    )


def abcd_input_impedance(abcd: np.ndarray, z_load: complex) -> complex:
    a, b, c, d = abcd[0, 0], abcd[0, 1], abcd[1, 0], abcd[1, 1]
    return (a * z_load + b) / (c * z_load + d)


def tl_two_port(tl: TransmissionLine, f: float, z0: float = 50.0) -> MultiportNetwork:
    """S-parameter two-port of ``tl`` referenced to ``z0``."""
    return MultiportNetwork(abcd_to_s(tl_abcd(tl, f), z0), "S", f, z0)


def series_abcd(z: complex) -> np.ndarray:
    return np.array([[1, z], [0, 1]], dtype=complex)


def shunt_abcd(y: complex) -> np.ndarray:
    return np.array([[1, 0], [y, 1]], dtype=complex)


def stub_for_susceptance(b: float, f0: float, z_stub: float = 50.0) -> TransmissionLine:
    """Open stub whose input susceptance at ``f0`` equals ``b``.

    The length is taken in (0, pi]; a zero susceptance maps to a half-wave stub.
    """
    theta = float(np.mod(np.arctan(b * z_stub), np.pi))
    if theta <= 0:
        theta = np.pi
    return TransmissionLine(z_stub, theta, f0)


@dataclass(frozen=True)
class QuarterWaveSection:
    """Series reactance built from two series lines around a shunt open stub.

    The input line is a quarter wave, the output line three quarters, so the
    two inversions compose with a positive sign and the ABCD matrix at ``f0``
    equals that of the series element exactly.
    """

    line_in: TransmissionLine
    stub: TransmissionLine
    line_out: TransmissionLine

    @property
    def lines(self) -> tuple[TransmissionLine, TransmissionLine, TransmissionLine]:
        return self.line_in, self.stub, self.line_out

    def abcd(self, f: float) -> np.ndarray:
        return tl_abcd(self.line_in, f) @ shunt_abcd(open_stub_admittance(self.stub, f)) @ tl_abcd(
            self.line_out, f
        )


def quarter_wave_equivalent(
    x_series: float, f0: float, z_line: float = 50.0, z_stub: float = 50.0
) -> QuarterWaveSection:
    """Line-only equivalent of a series reactance ``j*x_series`` at ``f0``."""
    if x_series == 0 or not np.isfinite(x_series):
        raise StubResonance("series reactance must be finite and non-zero")
    # lambda/4 . shunt(jB) . 3lambda/4 == series(j z_line^2 B)
    b_stub = x_series / z_line**2
    return QuarterWaveSection(
        TransmissionLine(z_line, np.pi / 2, f0),
        stub_for_susceptance(b_stub, f0, z_stub),
        TransmissionLine(z_line, 3 * np.pi / 2, f0),
    )


def star_admittances(z_s: float, theta_s: float) -> tuple[complex, complex]:
    """``(Y_s, Y_s')`` of three identical lines joined at a floating centre node."""
    s2 = np.sin(2 * theta_s)
    if abs(s2) < RESONANCE_TOL or abs(np.cos(theta_s)) < RESONANCE_TOL:
        raise StarResonance(f"star line length {theta_s:.6g} rad is resonant")
    y_s = -1j / (z_s * np.tan(theta_s))
    y_sp = -2j / (3 * z_s * s2)
    return y_s, y_sp


def star_three_port(z_s: float, theta_s: float, f: float = 0.0) -> MultiportNetwork:
    """Admittance matrix of three lines meeting at an unconnected centre node.

    Diagonal ``Y_s - Y_s'``, off-diagonal ``-Y_s'``.
    """
    y_s, y_sp = star_admittances(z_s, theta_s)
    y = np.full((3, 3), -y_sp, dtype=complex)
    np.fill_diagonal(y, y_s - y_sp)
    return MultiportNetwork(y, "Y", f)


def triangle_three_port(z_t: float, theta_t: float, f: float = 0.0) -> MultiportNetwork:
    """Three identical lines joining each pair of ports (ring of three)."""
    if abs(np.sin(theta_t)) < RESONANCE_TOL:
        raise StarResonance(f"triangle line length {theta_t:.6g} rad is resonant")
    y11 = -1j / (z_t * np.tan(theta_t))
    y12 = 1j / (z_t * np.sin(theta_t))
    y = np.full((3, 3), y12, dtype=complex)
    np.fill_diagonal(y, 2 * y11)
    return MultiportNetwork(y, "Y", f)


def coax_impedance(r_inner: float, r_outer: float, eps_r: float = 1.0) -> float:
    """Characteristic impedance of a coaxial line in ohms."""
    if not (r_outer > r_inner > 0) or eps_r < 1:
        raise GeometryInvalid(
            f"need r_outer > r_inner > 0 and eps_r >= 1 (got {r_inner}, {r_outer}, {eps_r})"
        )
    return ETA0 / (2 * np.pi * np.sqrt(eps_r)) * np.log(r_outer / r_inner)
