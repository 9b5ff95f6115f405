"""Multiport network values, S/Z/Y conversions, port termination and band metrics.

All networks here are small (at most a handful of ports) so matrices are kept
dense and every operation returns a new value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import EmptySweep, SingularConversion, SingularTermination

KINDS = ("S", "Z", "Y")
COND_LIMIT = 1e12


def _checked_solve(a: np.ndarray, b: np.ndarray, exc=SingularConversion, what="matrix"):
    """Solve ``a x = b`` after rejecting an ill-conditioned ``a``."""
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise exc(f"{what} is numerically singular (condition number {cond:.3g})")
    return np.linalg.solve(a, b)


@dataclass(frozen=True)
class MultiportNetwork:
    """Complex n-port parameter matrix at one frequency.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix. Ohms for Z, siemens for Y, dimensionless for S.
    kind : {'S', 'Z', 'Y'}
        Representation of ``matrix``.
    freq : float
        Frequency in hertz.
    ref_impedance : float
        Reference impedance in ohms. Only meaningful for S parameters but kept
        on every representation so conversions back to S are unambiguous.
    """

    matrix: np.ndarray
    kind: str = "S"
    freq: float = 0.0
    ref_impedance: float = 50.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"network matrix must be square, got shape {m.shape}")
        kind = str(self.kind).upper()
        if kind not in KINDS:
            raise ValueError(f"unknown representation {self.kind!r}")
        if self.ref_impedance <= 0:
            raise ValueError("reference impedance must be positive")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "kind", kind)

    @property
    def n_ports(self) -> int:
        return self.matrix.shape[0]

    def to(self, kind: str, z0: float | None = None) -> "MultiportNetwork":
        return convert(self, kind, z0)


def convert(net: MultiportNetwork, target: str, z0: float | None = None) -> MultiportNetwork:
    """Return ``net`` expressed in the ``target`` representation.

    ``z0`` is the reference impedance of the result when ``target`` is S; it
    defaults to the reference impedance carried by ``net``. Raises
    :class:`SingularConversion` when the required inverse has a condition
    number above 1e12, which happens for ideal opens and shorts.
    """
    target = target.upper()
    if target not in KINDS:
        raise ValueError(f"unknown representation {target!r}")
    z_old = net.ref_impedance
    z_new = z_old if z0 is None else float(z0)
    m = net.matrix
    eye = np.eye(net.n_ports)

    if net.kind == target and (target != "S" or z_new == z_old):
        return MultiportNetwork(m, target, net.freq, z_new)

    if net.kind == "S" and target == "Y" and z_new == z_old:
        out = _checked_solve(eye + m, eye - m) / z_old
    elif net.kind == "Y" and target == "S":
        out = _checked_solve(eye + z_new * m, eye - z_new * m)
    else:
        # everything else routes through Z
        if net.kind == "Z":
            z = m
        elif net.kind == "Y":
            z = _checked_solve(m, eye)
        else:
            z = z_old * _checked_solve(eye - m, eye + m)
        if target == "Z":
            out = z
        elif target == "Y":
            out = _checked_solve(z, eye)
        else:
            out = _checked_solve(z + z_new * eye, z - z_new * eye)
    return MultiportNetwork(out, target, net.freq, z_new)


def terminate(
    net: MultiportNetwork,
    load: MultiportNetwork,
    load_port_indices: Sequence[int],
) -> MultiportNetwork:
    """Connect ``load`` to a subset of the ports of ``net`` and reduce.

    Uses the partitioned admittance form
    ``Y_red = Y_PP - Y_PA (Y_AA + Y_load)^-1 Y_AP`` where A are the loaded
    ports (in the order given) and P the remaining ones in ascending order.
    """
    y = net.matrix if net.kind == "Y" else convert(net, "Y").matrix
    yl = load.matrix if load.kind == "Y" else convert(load, "Y").matrix
    a_idx = [int(i) for i in load_port_indices]
    if len(a_idx) != load.n_ports:
        raise ValueError("load_port_indices must match the load port count")
    if len(set(a_idx)) != len(a_idx) or not all(0 <= i < net.n_ports for i in a_idx):
        raise ValueError("invalid load port indices")
    p_idx = [i for i in range(net.n_ports) if i not in a_idx]
    y_pp = y[np.ix_(p_idx, p_idx)]
    y_pa = y[np.ix_(p_idx, a_idx)]
    y_ap = y[np.ix_(a_idx, p_idx)]
    y_aa = y[np.ix_(a_idx, a_idx)]
    x = _checked_solve(y_aa + yl, y_ap, SingularTermination, "Y_AA + Y_load")
    return MultiportNetwork(y_pp - y_pa @ x, "Y", net.freq, net.ref_impedance)


def is_lossless(net: MultiportNetwork, tol: float = 1e-10) -> bool:
    """True iff ``max|S^H S - I| < tol``. ``net`` must be in S form."""
    if net.kind != "S":
        raise ValueError("is_lossless expects an S-parameter network")
    s = net.matrix
    return float(np.max(np.abs(s.conj().T @ s - np.eye(net.n_ports)))) < tol


def is_reciprocal(net: MultiportNetwork, tol: float = 1e-10) -> bool:
    return float(np.max(np.abs(net.matrix - net.matrix.T))) < tol


@dataclass
class FrequencySweep:
    """Networks of one representation sampled on strictly increasing frequencies.

    ``matrices`` has shape ``(n_freqs, n_ports, n_ports)``. ``comments`` holds
    free text lines carried through Touchstone round trips.
    """

    freqs: np.ndarray
    matrices: np.ndarray
    kind: str = "S"
    ref_impedance: float = 50.0
    comments: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.freqs = np.atleast_1d(np.asarray(self.freqs, dtype=float))
        mats = np.asarray(self.matrices, dtype=complex)
        if mats.ndim == 2 and len(self.freqs) == 1:
            mats = mats[None]
        if len(self.freqs) == 0:
            raise EmptySweep("frequency sweep has no points")
        if mats.ndim != 3 or mats.shape[0] != len(self.freqs) or mats.shape[1] != mats.shape[2]:
            raise ValueError(f"matrices shape {mats.shape} does not match {len(self.freqs)} frequencies")
        if np.any(np.diff(self.freqs) <= 0):
            raise ValueError("sweep frequencies must be strictly increasing")
        self.matrices = mats
        self.kind = self.kind.upper()

    @classmethod
    def from_networks(cls, networks: Sequence[MultiportNetwork]) -> "FrequencySweep":
        if not networks:
            raise EmptySweep("frequency sweep has no points")
        kinds = {n.kind for n in networks}
        if len(kinds) != 1:
            raise ValueError("all networks in a sweep must share one representation")
        return cls(
            np.array([n.freq for n in networks]),
            np.stack([n.matrix for n in networks]),
            networks[0].kind,
            networks[0].ref_impedance,
        )

    @property
    def n_ports(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return len(self.freqs)

    def __getitem__(self, i: int) -> MultiportNetwork:
        return MultiportNetwork(self.matrices[i], self.kind, self.freqs[i], self.ref_impedance)

    def __iter__(self) -> Iterator[MultiportNetwork]:
        for i in range(len(self)):
            yield self[i]

    def to(self, kind: str, z0: float | None = None) -> "FrequencySweep":
        nets = [convert(n, kind, z0) for n in self]
        out = FrequencySweep.from_networks(nets)
        out.comments = list(self.comments)
        return out

    def at(self, f: float, kind: str | None = None) -> MultiportNetwork:
        """Network at ``f`` by linear interpolation of the matrix entries.

        Interpolation happens in ``kind`` (default: the sweep's own
        representation). ``f`` must lie inside the sampled range.
        """
        src = self if kind is None or kind.upper() == self.kind else self.to(kind)
        fs = src.freqs
        if f < fs[0] * (1 - 1e-12) or f > fs[-1] * (1 + 1e-12):
            raise ValueError(f"frequency {f} outside sweep range [{fs[0]}, {fs[-1]}]")
        if len(fs) == 1:
            return src[0]
        i = int(np.clip(np.searchsorted(fs, f) - 1, 0, len(fs) - 2))
        t = (f - fs[i]) / (fs[i + 1] - fs[i])
        m = (1 - t) * src.matrices[i] + t * src.matrices[i + 1]
        return MultiportNetwork(m, src.kind, f, src.ref_impedance)

    def z_matrix(self, f: float) -> np.ndarray:
        """Impedance matrix at ``f``; lets a sweep stand in for an antenna model."""
        return self.at(f, "Z").matrix


def magnitude_db(s: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.maximum(20 * np.log10(np.abs(s)), -400.0)


def _entry_mask(n: int, which: str) -> np.ndarray:
    eye = np.eye(n, dtype=bool)
    if which == "matching":
        return eye
    if which == "coupling":
        return ~eye
    if which == "both":
        return np.ones((n, n), dtype=bool)
    raise ValueError(f"which must be 'matching', 'coupling' or 'both', not {which!r}")


def worst_db(sweep: FrequencySweep, which: str = "both") -> np.ndarray:
    """Per-frequency maximum of ``20 log10|S_ij|`` over the selected entries."""
    s = sweep if sweep.kind == "S" else sweep.to("S")
    mask = _entry_mask(s.n_ports, which)
    if not mask.any():
        raise ValueError(f"no {which} entries in a {s.n_ports}-port network")
    return magnitude_db(s.matrices[:, mask]).max(axis=1)


def band_below_threshold(
    sweep: FrequencySweep, threshold_db: float = -16.0, which: str = "both"
) -> list[tuple[float, float]]:
    """Maximal frequency intervals where all selected ``|S_ij|`` stay below a level.

    Interval edges are linearly interpolated in dB against linear frequency
    between the bracketing samples.
    """
    if len(sweep) == 0:
        raise EmptySweep("frequency sweep has no points")
    if threshold_db >= 0:
        raise ValueError("threshold_db must be negative")
    f = sweep.freqs
    m = worst_db(sweep, which)
    below = m < threshold_db

    def crossing(i: int, j: int) -> float:
        # linear dB(f) between samples i and j hits the threshold
        return f[i] + (threshold_db - m[i]) / (m[j] - m[i]) * (f[j] - f[i])

    bands = []
    i = 0
    n = len(f)
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        lo = f[i] if i == 0 else crossing(i - 1, i)
        hi = f[j] if j == n - 1 else crossing(j, j + 1)
        bands.append((float(lo), float(hi)))
        i = j + 1
    return bands


def band_containing(bands: Sequence[tuple[float, float]], f: float) -> tuple[float, float] | None:
    for lo, hi in bands:
        if lo <= f <= hi:
            return lo, hi
    return None
