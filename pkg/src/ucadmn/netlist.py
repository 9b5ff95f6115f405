"""Transmission-line netlists and their nodal (admittance) analysis.

Text format, one element per line::

    # comment
    F0 3.6e9
    PORTS A1 A2 A3 P1 P2 P3
    TL   50.0 1.5707963267949 A1 n1  # B1.in
    STUB 50.0 0.785398163397 n1 0   # B1.stub

``TL`` is a two-conductor line between two nodes (shared ground return); a
``TL`` whose second node is ``0`` is a short-circuited stub. ``STUB`` is an
open-circuited stub hanging off ``node_a`` (its ``node_b`` field is always
``0``). An optional sixth column gives the attenuation in dB per wavelength.
A single word in a trailing ``#`` comment on an element line is kept as the
element's role tag, which tuning uses to keep symmetric elements equal.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, SingularComposition, StubResonance
from .netcore import COND_LIMIT, MultiportNetwork, convert
from .rfelements import NEPER_PER_DB, RESONANCE_TOL, TransmissionLine

GROUND = "0"
ELEMENT_KINDS = ("TL", "STUB")


@dataclass(frozen=True)
class Element:
    kind: str
    z: float
    theta: float
    node_a: str
    node_b: str = GROUND
    attenuation_db_per_wavelength: float = 0.0
    role: str = ""

    def line(self, f0: float) -> TransmissionLine:
        return TransmissionLine(self.z, self.theta, f0, self.attenuation_db_per_wavelength)


@dataclass
class Netlist:
    """Line network with named ports, all lengths given at ``f0``."""

    ports: list[str]
    elements: list[Element] = field(default_factory=list)
    f0: float = 1.0

    def add(self, kind: str, z: float, theta: float, node_a: str, node_b: str = GROUND, role: str = ""):
        if kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {kind!r}")
        self.elements.append(Element(kind, float(z), float(theta), str(node_a), str(node_b), role=role))

    def add_line(self, tl: TransmissionLine, node_a: str, node_b: str = GROUND, kind="TL", role=""):
        self.elements.append(
            Element(kind, tl.z_c, tl.theta0, node_a, node_b, tl.attenuation_db_per_wavelength, role)
        )

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def nodes(self) -> list[str]:
        seen = list(self.ports)
        for e in self.elements:
            for n in (e.node_a, e.node_b):
                if n != GROUND and n not in seen:
                    seen.append(n)
        return seen

    def groups(self) -> list[list[int]]:
        """Element indices sharing a role tag; untagged elements stand alone."""
        out: dict[str, list[int]] = {}
        for i, e in enumerate(self.elements):
            out.setdefault(e.role or f"#{i}", []).append(i)
        return list(out.values())

    def params(self) -> np.ndarray:
        """Flat ``[z_0, theta_0, z_1, theta_1, ...]`` vector of all elements."""
        return np.array([v for e in self.elements for v in (e.z, e.theta)], dtype=float)

    def with_params(self, params: Sequence[float]) -> "Netlist":
        p = np.asarray(params, dtype=float).reshape(-1, 2)
        if len(p) != len(self.elements):
            raise ValueError("parameter vector does not match the element count")
        elems = [replace(e, z=float(z), theta=float(t)) for e, (z, t) in zip(self.elements, p)]
        return Netlist(list(self.ports), elems, self.f0)

    def nodal_matrices(self, freqs: Sequence[float]) -> tuple[list[str], np.ndarray]:
        """Nodal admittance matrices, shape ``(F, n_nodes, n_nodes)``, ground eliminated."""
        freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
        nodes = self.nodes
        index = {n: i for i, n in enumerate(nodes)}
        y = np.zeros((len(freqs), len(nodes), len(nodes)), dtype=complex)
        scale = freqs / self.f0
        for e in self.elements:
            theta = e.theta * scale
            gl = e.attenuation_db_per_wavelength * NEPER_PER_DB * theta / (2 * np.pi) + 1j * theta
            a = index[e.node_a] if e.node_a != GROUND else None
            if e.kind == "STUB":
                if np.any(np.abs(np.cos(theta)) < RESONANCE_TOL):
                    raise StubResonance(f"open stub of {e.theta:.6g} rad resonates inside the sweep")
                if a is not None:
                    y[:, a, a] += np.tanh(gl) / e.z
                continue
            sh = np.sinh(gl)
            if np.any(np.abs(sh) < RESONANCE_TOL):
                raise StubResonance(f"line of {e.theta:.6g} rad is a multiple of a half wavelength inside the sweep")
            y11 = np.cosh(gl) / sh / e.z
            y12 = -1 / sh / e.z
            b = index[e.node_b] if e.node_b != GROUND else None
            if a is not None:
                y[:, a, a] += y11
            if b is not None:
                y[:, b, b] += y11
            if a is not None and b is not None:
                y[:, a, b] += y12
                y[:, b, a] += y12
        return nodes, y

    def nodal_matrix(self, f: float) -> tuple[list[str], np.ndarray]:
        nodes, y = self.nodal_matrices([f])
        return nodes, y[0]

    def y_matrices(self, freqs: Sequence[float]) -> np.ndarray:
        """Port admittance matrices ``(F, n_ports, n_ports)`` with internal nodes eliminated."""
        _, y = self.nodal_matrices(freqs)
        return kron_reduce(y, len(self.ports))

    def y_network(self, f: float, z0: float = 50.0) -> MultiportNetwork:
        """Port admittance matrix at ``f`` after eliminating internal nodes."""
        nodes, y = self.nodal_matrix(f)
        return MultiportNetwork(kron_reduce(y, len(self.ports)), "Y", f, z0)

    def s_network(self, f: float, z0: float = 50.0) -> MultiportNetwork:
        return convert(self.y_network(f, z0), "S", z0)

    # text serialization -------------------------------------------------

    def to_text(self) -> str:
        lines = [f"F0 {self.f0:.12g}", "PORTS " + " ".join(self.ports)]
        for e in self.elements:
            row = f"{e.kind} {e.z:.12g} {e.theta:.12g} {e.node_a} {e.node_b}"
            if e.attenuation_db_per_wavelength:
                row += f" {e.attenuation_db_per_wavelength:.12g}"
            if e.role:
                row += f"  # {e.role}"
            lines.append(row)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, path=None) -> "Netlist":
        ports: list[str] | None = None
        f0 = None
        elems: list[Element] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line, _, comment = raw.partition("#")
            line = line.split("!", 1)[0].strip()
            if not line:
                continue
            tag = comment.split()
            role = tag[0] if len(tag) == 1 else ""
            tok = line.split()
            key = tok[0].upper()
            try:
                if key == "F0":
                    f0 = float(tok[1])
                elif key == "PORTS":
                    ports = tok[1:]
                elif key in ELEMENT_KINDS:
                    if len(tok) not in (5, 6):
                        raise ParseError(f"{key} needs 4 or 5 fields, got {len(tok) - 1}", lineno, path)
                    att = float(tok[5]) if len(tok) == 6 else 0.0
                    elems.append(Element(key, float(tok[1]), float(tok[2]), tok[3], tok[4], att, role))
                else:
                    raise ParseError(f"unknown netlist keyword {tok[0]!r}", lineno, path)
            except (ValueError, IndexError) as exc:
                raise ParseError(f"malformed netlist line: {raw.strip()!r} ({exc})", lineno, path) from None
        if ports is None:
            raise ParseError("netlist has no PORTS line", None, path)
        if f0 is None:
            raise ParseError("netlist has no F0 line", None, path)
        return cls(ports, elems, f0)

    def write(self, path: str | os.PathLike) -> None:
        from .io import atomic_write_text

        atomic_write_text(path, self.to_text())

    @classmethod
    def read(cls, path: str | os.PathLike) -> "Netlist":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), path)


def kron_reduce(y: np.ndarray, n_keep: int) -> np.ndarray:
    """Eliminate all nodes after the first ``n_keep`` from a nodal matrix (or a stack of them)."""
    if y.shape[-1] == n_keep:
        return y.copy()
    ykk = y[..., :n_keep, :n_keep]
    yki = y[..., :n_keep, n_keep:]
    yik = y[..., n_keep:, :n_keep]
    yii = y[..., n_keep:, n_keep:]
    cond = np.linalg.cond(yii)
    if not np.all(np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise SingularComposition(f"internal node block is singular (condition {np.max(cond):.3g})")
    return ykk - yki @ np.linalg.solve(yii, yik)


def merge(netlists: Iterable[Netlist], ports: list[str], f0: float) -> Netlist:
    out = Netlist(list(ports), [], f0)
    for n in netlists:
        out.elements.extend(n.elements)
    return out
