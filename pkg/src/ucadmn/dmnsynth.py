"""Closed-form synthesis of decoupling and matching networks for three-element rings.

Two topologies are supported. The two-stage network uses five susceptance
groups B1..B5 (fifteen elements); the star-triangle network first adds a
series element B_c in front of each antenna port so that the real part of the
augmented admittance matrix becomes diagonal, then decouples and matches with
B_a, B_b, B_s, B_t. Both synthesizers work at a single design frequency and
both can be turned into transmission-line netlists that are exact there.

Six-port convention: ports 0..2 face the antennas, ports 3..5 are the feeds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    AllRootsDegenerate,
    Infeasible,
    NoRealRoot,
    ResonantAngle,
    StubResonance,
    UnrealizableImpedance,
)
from .netcore import MultiportNetwork, convert
from .netlist import Netlist, kron_reduce
from .rfelements import (
    RESONANCE_TOL,
    Susceptance,
    susceptance_at,
    TransmissionLine,
    quarter_wave_equivalent,
    star_three_port,
    stub_for_susceptance,
    triangle_three_port,
)
from .ucamodel import SymmetricArrayModel, admittance_of, alpha_beta

BRANCHES = ("pp", "pm", "mp", "mm")
ROOT_TOL = 1e-9
Z_REALIZABLE = (5.0, 250.0)
INNER_MARGIN = 1e-6
DEGENERATE_GAP = 1e-6
DECOUPLED_TOL = 1e-13
ANTENNA_PORTS = ("A1", "A2", "A3")
FEED_PORTS = ("P1", "P2", "P3")


def _ring_admittance(y_a) -> tuple[complex, complex]:
    """Extract ``(alpha, beta)`` from any description of a symmetric three-port."""
    if isinstance(y_a, SymmetricArrayModel):
        y = admittance_of(y_a).matrix
    elif isinstance(y_a, MultiportNetwork):
        y = convert(y_a, "Y").matrix
    elif isinstance(y_a, tuple) and len(y_a) == 2:
        return complex(y_a[0]), complex(y_a[1])
    else:
        y = np.asarray(y_a, dtype=complex)
    if y.shape != (3, 3):
        raise ValueError(f"expected a three-port, got shape {y.shape}")
    alpha, beta = y[0, 0], y[0, 1]
    ref = ring_matrix(alpha, beta)
    if np.max(np.abs(y - ref)) > 1e-9 * np.max(np.abs(y)):
        raise ValueError("admittance matrix is not ring-symmetric")
    return complex(alpha), complex(beta)


def ring_matrix(diag, off, n: int = 3) -> np.ndarray:
    m = np.full((n, n), off, dtype=complex if np.iscomplexobj(np.asarray([diag, off])) else float)
    np.fill_diagonal(m, diag)
    return m


# --------------------------------------------------------------------------
# two-stage network


@dataclass(frozen=True)
class RealPartDecomposition:
    """Diagonal ``a`` and off-diagonal ``b`` of ``(Re Y_A)^-1`` in ohms."""

    a: float
    b: float

    @property
    def deficit(self) -> float:
        """``a^2 + 2ab - 3b^2``; the two-stage network exists iff this is >= 0."""
        return self.a**2 + 2 * self.a * self.b - 3 * self.b**2


def real_part_decomposition(y_a) -> RealPartDecomposition:
    alpha, beta = _ring_admittance(y_a)
    p, q = alpha.real, beta.real
    # (p - q) I + q J  has inverse  I/(p-q) - q J / ((p-q)(p+2q))
    if p - q <= 0 or p + 2 * q <= 0:
        raise ValueError("real part of the antenna admittance is not positive definite")
    den = (p - q) * (p + 2 * q)
    return RealPartDecomposition(a=(p + q) / den, b=-q / den)


@dataclass(frozen=True)
class TwoStageDesign:
    """Susceptances (siemens at ``f0``) of the two-stage network.

    ``branch_b2_sign`` and ``branch_sqrt_sign`` record which of the up to
    four solutions was taken; ``degenerate`` marks the uncoupled limit where
    the real part of the antenna admittance is already diagonal.
    """

    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    branch_b2_sign: int = 1
    branch_sqrt_sign: int = 1
    f0: float = 0.0
    degenerate: bool = False

    def __post_init__(self):
        for name in ("b1", "b2", "b3", "b4", "b5"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))

    @property
    def branch(self) -> str:
        return ("p" if self.branch_b2_sign > 0 else "m") + ("p" if self.branch_sqrt_sign > 0 else "m")

    @property
    def susceptances(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3, self.b4, self.b5])


def _parse_branch(branch: str) -> tuple[int, int]:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, not {branch!r}")
    return (1 if branch[0] == "p" else -1), (1 if branch[1] == "p" else -1)


def _b2_b3(dec: RealPartDecomposition, z0: float, s_b2: int, s_sqrt: int) -> tuple[float, float, bool]:
    a, b = dec.a, dec.b
    d = dec.deficit
    if d < 0:
        raise Infeasible(d)
    degenerate = abs(b) <= 1e-14 * abs(a)
    # B3 = t B2 with  b t^2 + (a + b) t + b = 0 ; the two roots multiply to 1
    q = -(a + b + np.sqrt(d)) / 2  # a + b > 0 whenever Re Y_A is positive definite
    if degenerate:
        # b -> 0+ : the '+' root runs off to -inf, the '-' root to 0
        t_inv = 0.0 if s_sqrt > 0 else None
        t = None if s_sqrt > 0 else 0.0
    elif s_sqrt > 0:
        t, t_inv = q / b, b / q
    else:
        t, t_inv = b / q, q / b
    if t is not None and abs(t) <= 1:
        # gamma = B2^2 (a (1 + t^2) + 2 b t) = 1/z0
        b2 = s_b2 / np.sqrt(z0 * (a * (1 + t * t) + 2 * b * t))
        return b2, t * b2, degenerate
    # large |t|: parametrize by u = 1/t to keep the b -> 0 limit finite
    u = t_inv
    sign_t = -1.0 if u == 0 else float(np.sign(u))
    root = np.sqrt(z0 * (a * (1 + u * u) + 2 * b * u))
    return s_b2 * abs(u) / root, s_b2 * sign_t / root, degenerate


def synth_two_stage(
    y_a,
    z0: float = 50.0,
    branch: str | None = None,
    f0: float = 0.0,
) -> TwoStageDesign:
    """Two-stage network that decouples and matches a symmetric three-element array.

    Parameters
    ----------
    y_a : SymmetricArrayModel, MultiportNetwork, 3x3 array or (alpha, beta)
        Antenna admittance description.
    z0 : float
        Port reference impedance the feeds are matched to.
    branch : {'pp', 'pm', 'mp', 'mm'}, optional
        Sign of B2 (first letter) and of the square root in the B3/B2 ratio
        (second letter). By default the branch with the smallest largest
        susceptance magnitude is returned.

    Raises
    ------
    Infeasible
        When ``a^2 + 2ab - 3b^2 < 0`` for ``(Re Y_A)^-1 = [[a, b, b], ...]``.
    """
    alpha, beta = _ring_admittance(y_a)
    dec = real_part_decomposition((alpha, beta))
    if dec.deficit < 0:
        raise Infeasible(dec.deficit)
    b1 = beta.imag
    b234 = -(alpha + 2 * beta).imag

    def build(br: str) -> TwoStageDesign:
        s_b2, s_sqrt = _parse_branch(br)
        b2, b3, degenerate = _b2_b3(dec, z0, s_b2, s_sqrt)
        return TwoStageDesign(b1, b2, b3, b234 - b2 - b3, -b2 - b3, s_b2, s_sqrt, f0, degenerate)

    if branch is not None:
        return build(branch)
    designs = [build(br) for br in BRANCHES]
    return min(designs, key=lambda d: np.max(np.abs(d.susceptances)))


def two_stage_branches(y_a, z0: float = 50.0, f0: float = 0.0) -> list[TwoStageDesign]:
    """All four sign combinations (two coincide when the deficit is exactly zero)."""
    return [synth_two_stage(y_a, z0, br, f0) for br in BRANCHES]


def two_stage_blocks(design: TwoStageDesign) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Real sub-blocks ``A, B, C`` with ``Y_DMN = j [[A, B^T], [B, C]]``."""
    d = design
    a = ring_matrix(2 * d.b1 + d.b2 + d.b3 + d.b4, -d.b1)
    b = -np.array(
        [
            [d.b2, 0.0, d.b3],
            [d.b3, d.b2, 0.0],
            [0.0, d.b3, d.b2],
        ]
    )
    c = (d.b2 + d.b3 + d.b5) * np.eye(3)
    return a, b, c


def _scaled(b: float, f0: float, f: float | None) -> float:
    if f is None or f == f0 or b == 0:
        return b
    if not f0:
        raise ValueError("design has no f0; cannot evaluate it off the design frequency")
    return susceptance_at(Susceptance(b, f0), f)


def two_stage_at(design: TwoStageDesign, f: float) -> TwoStageDesign:
    """Lumped design evaluated at ``f`` (capacitors scale with f, inductors with 1/f)."""
    vals = [_scaled(b, design.f0, f) for b in design.susceptances]
    return replace(design, b1=vals[0], b2=vals[1], b3=vals[2], b4=vals[3], b5=vals[4], f0=f)


def two_stage_six_port(design: TwoStageDesign, f: float | None = None) -> MultiportNetwork:
    """``j [[A, B^T], [B, C]]``; with ``f`` the lumped elements follow their L/C frequency laws."""
    if f is not None:
        design = two_stage_at(design, f)
    a, b, c = two_stage_blocks(design)
    y = 1j * np.block([[a, b.T], [b, c]])
    return MultiportNetwork(y, "Y", design.f0)


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of the decoupling (``xi = 0``) and matching (``gamma = 1/z0``) identities."""

    xi: float
    gamma: float
    z0: float
    xi_residual: float
    gamma_residual: float
    decoupled: bool
    matched: bool

    @property
    def ok(self) -> bool:
        return self.decoupled and self.matched


def verify_two_stage_identities(
    design: TwoStageDesign, a: float, b: float, z0: float = 50.0, tol: float = 1e-12
) -> IdentityReport:
    """Recompute the off-diagonal (``xi``) and diagonal (``gamma``) entries of ``B (Re Y_A)^-1 B^T``."""
    b2, b3 = design.b2, design.b3
    xi = b2 * b3 * a + (b2 * b2 + b2 * b3 + b3 * b3) * b
    gamma = (b2 * b2 + b3 * b3) * a + 2 * b2 * b3 * b
    xi_res = abs(xi)
    gamma_res = abs(gamma * z0 - 1)
    return IdentityReport(xi, gamma, z0, xi_res, gamma_res, xi_res <= tol / z0, gamma_res <= tol)


# --------------------------------------------------------------------------
# star-triangle network


@dataclass(frozen=True)
class StarTriangleDesign:
    """Susceptances of the star-triangle network.

    ``b_c`` is the series augmentation susceptance in front of each antenna
    port, or ``None`` when the array is uncoupled and no augmentation is
    needed. ``chosen_root`` is the root of the augmentation quartic (the
    imaginary part of the augmented self impedance) that fixed ``b_c``.
    """

    b_a: float
    b_b: float
    b_c: float | None
    b_s: float
    b_t: float
    chosen_root: complex = 0j
    f0: float = 0.0
    candidate_roots: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for name in ("b_a", "b_b", "b_s", "b_t"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.b_c is not None:
            object.__setattr__(self, "b_c", float(self.b_c))
        object.__setattr__(self, "chosen_root", complex(self.chosen_root))
        if abs(self.b_a + self.b_b) > 1e-12 * max(1.0, abs(self.b_b)):
            raise ValueError("star-triangle design requires b_a = -b_b")
        if abs(complex(self.chosen_root).imag) >= ROOT_TOL * (1 + abs(complex(self.chosen_root).real)):
            raise ValueError("chosen root is not real")


def augmentation_quartic(z_in: complex, z_c: complex) -> np.ndarray:
    """Coefficients (ascending powers of ``x``) of the augmentation condition.

    With ``e = Re(z_in) + j x`` and ``c = z_c`` the off-diagonal entry of
    ``inv((e - c) I + c J)`` is ``c (c - e) / (e^3 + 2c^3 - 3c^2 e)``; its real
    part vanishes iff ``Re{c (c - e) conj(e^3 + 2c^3 - 3c^2 e)} = 0``, which
    is a real quartic in ``x``.
    """
    P = np.polynomial.polynomial
    c = complex(z_c)
    e = np.array([complex(z_in).real, 1j])
    num = P.polymul([c], P.polysub([c], e))
    den = P.polyadd(P.polyadd(P.polypow(e, 3), [2 * c**3]), P.polymul([-3 * c * c], e))
    # conjugating the polynomial values for real x conjugates the coefficients
    return P.polymul(num, np.conj(den)).real


def quartic_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots via eigenvalues of the companion matrix (ascending coefficients)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    scale = np.max(np.abs(c)) if c.size else 0.0
    while c.size > 1 and abs(c[-1]) <= 1e-14 * scale:
        c = c[:-1]
    if c.size < 2:
        return np.array([], dtype=complex)
    comp = np.polynomial.polynomial.polycompanion(c)
    return np.linalg.eigvals(comp).astype(complex)


def is_real_root(r: complex, tol: float = ROOT_TOL) -> bool:
    return abs(r.imag) < tol * (1 + abs(r.real))


def augmented_impedances(model: SymmetricArrayModel, b_c: float | None) -> np.ndarray:
    z = np.array(model.z_matrix)
    if b_c is not None:
        z = z - 1j / b_c * np.eye(len(z))
    return z


def _star_candidates(z_in: complex, z_c: complex) -> tuple[np.ndarray, list[tuple[float, complex]]]:
    roots = quartic_roots(augmentation_quartic(z_in, z_c))
    admissible = []
    for r in roots:
        if not is_real_root(r):
            continue
        x = r.real
        gap = z_in.imag - x
        e = complex(z_in.real, x)
        # b_c -> infinity, or the augmented matrix itself singular
        if abs(gap) <= DEGENERATE_GAP * abs(z_in) or abs(e - z_c) <= 1e-9 * abs(z_in) or abs(e + 2 * z_c) <= 1e-9 * abs(z_in):
            continue
        admissible.append((1 / gap, r))
    admissible.sort(key=lambda item: item[1].real)
    return roots, admissible


def synth_star_triangle(
    model: SymmetricArrayModel,
    z0: float = 50.0,
    root_policy: str | int = "min-bc",
    f0: float = 0.0,
) -> StarTriangleDesign:
    """Star-triangle network for a three-element ring.

    ``root_policy`` is ``'min-bc'`` (admissible root with the smallest
    ``|B_c|``) or an index into the admissible roots sorted by value.

    Raises
    ------
    NoRealRoot
        The augmentation quartic has no real root.
    AllRootsDegenerate
        Every real root would need an infinite series susceptance or
        leaves the internal nodes of the network resonant.
    """
    if model.n_elements != 3:
        raise ValueError("star-triangle synthesis needs exactly three elements")
    z_in, z_c = model.z_in, model.z_c
    alpha, beta = alpha_beta(admittance_of(model).matrix)
    if z_c == 0 or abs(beta.real) <= DECOUPLED_TOL * abs(alpha):
        # already decoupled in the real part: no augmentation needed
        return _star_design(model, z0, None, 0j, f0, ())
    all_roots, admissible = _star_candidates(z_in, z_c)
    roots = tuple(all_roots)
    if not any(is_real_root(r) for r in all_roots):
        raise NoRealRoot(all_roots)
    designs = [_star_design(model, z0, b_c, r, f0, roots) for b_c, r in admissible]
    # a root can make the series element cancel the core at the internal
    # nodes; the six-port then has no admittance matrix
    designs = [d for d in designs if _inner_margin(d) > INNER_MARGIN]
    if not designs:
        raise AllRootsDegenerate(all_roots)
    if root_policy == "min-bc":
        return min(designs, key=lambda d: abs(d.b_c))
    idx = int(root_policy)
    if not -len(designs) <= idx < len(designs):
        raise ValueError(f"root index {idx} out of range for {len(designs)} admissible roots")
    return designs[idx]


def _star_design(model, z0, b_c, root, f0, roots) -> StarTriangleDesign:
    y_b = np.linalg.inv(augmented_impedances(model, b_c))
    alpha, beta = complex(y_b[0, 0]), complex(y_b[0, 1])
    if alpha.real <= 0:
        raise ValueError("augmented array is not passive")
    b_t = beta.imag
    b_b = np.sqrt(alpha.real / z0)
    b_s = -(alpha + 2 * beta).imag - b_b
    return StarTriangleDesign(-b_b, b_b, b_c, b_s, b_t, root, f0, roots)


def _inner_margin(d: StarTriangleDesign) -> float:
    """Smallest singular value of the internal-node block, relative to the element susceptances."""
    inner = star_triangle_core_matrix(d.b_t, d.b_s) + (d.b_b + d.b_c) * np.eye(3)
    scale = max(abs(d.b_t), abs(d.b_s), abs(d.b_b), abs(d.b_c))
    return float(np.linalg.svd(inner, compute_uv=False)[-1] / scale)


def star_triangle_core_matrix(b_t: float, b_s: float) -> np.ndarray:
    """Real matrix whose product with ``j`` is the star/triangle core admittance."""
    return ring_matrix(2 * b_t + b_s, -b_t)


def star_triangle_at(design: StarTriangleDesign, f: float) -> StarTriangleDesign:
    d = design
    b_c = None if d.b_c is None else _scaled(d.b_c, d.f0, f)
    return StarTriangleDesign(
        _scaled(d.b_a, d.f0, f),
        _scaled(d.b_b, d.f0, f),
        b_c,
        _scaled(d.b_s, d.f0, f),
        _scaled(d.b_t, d.f0, f),
        d.chosen_root,
        f,
        d.candidate_roots,
    )


def star_triangle_six_port(
    design: StarTriangleDesign, include_augmentation: bool = True, f: float | None = None
) -> MultiportNetwork:
    """Six-port admittance of the star-triangle network.

    Without augmentation the blocks are ``A`` (diagonal ``2B_t + B_s + B_b``,
    off-diagonal ``-B_t``), ``B = -B_b I`` and ``C = (B_a + B_b) I = 0``. With
    it, the series ``jB_c`` elements are folded in between the external
    antenna ports and the core.
    """
    d = design if f is None else star_triangle_at(design, f)
    a = star_triangle_core_matrix(d.b_t, d.b_s) + d.b_b * np.eye(3)
    b = -d.b_b * np.eye(3)
    c = (d.b_a + d.b_b) * np.eye(3)
    core = 1j * np.block([[a, b.T], [b, c]])
    if not include_augmentation or d.b_c is None:
        return MultiportNetwork(core, "Y", d.f0)
    # nodes: external antenna ports (3), feeds (3), internal core antenna nodes (3)
    y = np.zeros((9, 9), dtype=complex)
    ext, feed, inner = slice(0, 3), slice(3, 6), slice(6, 9)
    y[inner, inner] = core[:3, :3]
    y[inner, feed] = core[:3, 3:]
    y[feed, inner] = core[3:, :3]
    y[feed, feed] = core[3:, 3:]
    yc = 1j * d.b_c * np.eye(3)
    y[ext, ext] += yc
    y[inner, inner] += yc
    y[ext, inner] -= yc
    y[inner, ext] -= yc
    return MultiportNetwork(kron_reduce(y, 6), "Y", d.f0)


# --------------------------------------------------------------------------
# transmission-line realizations


@dataclass(frozen=True)
class StarTriangleCore:
    """Line impedances and electrical lengths that realize the star/triangle core."""

    z_t: float
    z_s: float
    theta_t: float
    theta_s: float

    def y_matrix(self) -> np.ndarray:
        return star_three_port(self.z_s, self.theta_s).matrix + triangle_three_port(self.z_t, self.theta_t).matrix


def _core_solve(b_t: float, b_s: float, theta_t: float, theta_s: float) -> tuple[float, float]:
    # unknowns u = 1/Z_t, w = 1/Z_s, linear in both core equations
    st, ct = np.sin(theta_t), np.cos(theta_t)
    s2s = np.sin(2 * theta_s)
    if abs(st) < RESONANCE_TOL or abs(s2s) < RESONANCE_TOL:
        raise ResonantAngle(f"line angles ({theta_t:.6g}, {theta_s:.6g}) rad are resonant")
    cot_s = np.cos(theta_s) / np.sin(theta_s)
    m = np.array(
        [
            [1 / st, 2 / (3 * s2s)],
            [-2 * ct / st, -cot_s + 2 / (3 * s2s)],
        ]
    )
    rhs = np.array([-b_t, 2 * b_t + b_s])
    if abs(np.linalg.det(m)) < 1e-12 * np.max(np.abs(m)) ** 2:
        raise ResonantAngle(f"core equations are singular at angles ({theta_t:.6g}, {theta_s:.6g})")
    u, w = np.linalg.solve(m, rhs)
    return u, w


def _realizable(u: float, w: float) -> bool:
    lo, hi = Z_REALIZABLE
    return u > 0 and w > 0 and lo <= 1 / u <= hi and lo <= 1 / w <= hi


def star_triangle_tl_core(
    b_t: float,
    b_s: float,
    theta_t: float | None = None,
    theta_s: float | None = None,
    z_target: float = 50.0,
) -> StarTriangleCore:
    """Line impedances for the star (three lines to a floating centre) and triangle lines.

    At fixed electrical lengths the two core conditions are linear in the
    line admittances. When lengths are not given, a grid of candidate
    lengths is searched for the realizable pair closest (in log ratio) to
    ``z_target``.

    Raises
    ------
    ResonantAngle
        The given angles make the core equations singular.
    UnrealizableImpedance
        The impedances fall outside 5..250 ohm (or no grid point is realizable).
    """
    if theta_t is not None and theta_s is not None:
        u, w = _core_solve(b_t, b_s, theta_t, theta_s)
        if not _realizable(u, w):
            z_t = 1 / u if u else np.inf
            z_s = 1 / w if w else np.inf
            raise UnrealizableImpedance(
                f"core needs Z_t = {z_t:.6g}, Z_s = {z_s:.6g} ohm at angles ({theta_t:.6g}, {theta_s:.6g})"
            )
        return StarTriangleCore(1 / u, 1 / w, float(theta_t), float(theta_s))
    grid = np.linspace(0.02, 0.98, 97) * np.pi
    tt = [theta_t] if theta_t is not None else grid
    ts = [theta_s] if theta_s is not None else grid
    best, best_cost = None, np.inf
    for a_t, a_s in itertools.product(tt, ts):
        try:
            u, w = _core_solve(b_t, b_s, a_t, a_s)
        except ResonantAngle:
            continue
        if not _realizable(u, w):
            continue
        cost = max(abs(np.log(z_target * u)), abs(np.log(z_target * w)))
        if cost < best_cost:
            best, best_cost = (a_t, a_s), cost
    if best is None:
        raise UnrealizableImpedance("no line lengths give a realizable star/triangle core")
    return star_triangle_tl_core(b_t, b_s, *best)


def _add_floating(net: Netlist, b: float, node_a: str, node_b: str, tag: str, z_line: float, role: str):
    if b == 0 or not np.isfinite(b):
        raise StubResonance(f"floating susceptance {role} = {b} has no line equivalent")
    sec = quarter_wave_equivalent(-1 / b, net.f0, z_line, z_line)
    mid = f"{tag}m"
    net.add_line(sec.line_in, node_a, mid, role=f"{role}.in")
    net.add_line(sec.stub, mid, kind="STUB", role=f"{role}.stub")
    net.add_line(sec.line_out, mid, node_b, role=f"{role}.out")


def _add_grounded(net: Netlist, b: float, node: str, z_stub: float, role: str):
    net.add_line(stub_for_susceptance(b, net.f0, z_stub), node, kind="STUB", role=role)


def two_stage_tl_realization(design: TwoStageDesign, f0: float | None = None, z_line: float = 50.0) -> Netlist:
    """Line-only netlist of the two-stage network, exact at ``f0``.

    Each of the nine floating susceptances becomes a quarter-wave section
    (three lines) and each of the six grounded ones an open stub, 33 lines
    in total.
    """
    f0 = design.f0 if f0 is None else f0
    if not f0 or f0 <= 0:
        raise ValueError("a positive design frequency is required")
    net = Netlist(list(ANTENNA_PORTS + FEED_PORTS), [], f0)
    a, p = ANTENNA_PORTS, FEED_PORTS
    for i in range(3):
        j = (i + 1) % 3
        _add_floating(net, design.b1, a[i], a[j], f"b1_{i}", z_line, "B1")
    for i in range(3):
        _add_floating(net, design.b2, p[i], a[i], f"b2_{i}", z_line, "B2")
        # feed i also couples to the previous antenna in the ring
        _add_floating(net, design.b3, p[i], a[(i - 1) % 3], f"b3_{i}", z_line, "B3")
    for i in range(3):
        _add_grounded(net, design.b4, a[i], z_line, "B4")
        _add_grounded(net, design.b5, p[i], z_line, "B5")
    return net


def star_triangle_tl_realization(
    design: StarTriangleDesign,
    f0: float | None = None,
    core: StarTriangleCore | None = None,
    z_line: float = 50.0,
) -> Netlist:
    """Line-only netlist of the star-triangle network, exact at ``f0``.

    The core is three lines to a floating centre plus three lines around the
    ring; ``B_b`` and ``B_c`` are series elements (quarter-wave sections) and
    ``B_a`` is an open stub at each feed.
    """
    f0 = design.f0 if f0 is None else f0
    if not f0 or f0 <= 0:
        raise ValueError("a positive design frequency is required")
    core = core or star_triangle_tl_core(design.b_t, design.b_s)
    net = Netlist(list(ANTENNA_PORTS + FEED_PORTS), [], f0)
    if design.b_c is None:
        inner = list(ANTENNA_PORTS)
    else:
        inner = [f"core{i + 1}" for i in range(3)]
        for i in range(3):
            _add_floating(net, design.b_c, ANTENNA_PORTS[i], inner[i], f"bc_{i}", z_line, "Bc")
    for i in range(3):
        net.add_line(TransmissionLine(core.z_s, core.theta_s, f0), inner[i], "star", role="star")
    for i in range(3):
        net.add_line(TransmissionLine(core.z_t, core.theta_t, f0), inner[i], inner[(i + 1) % 3], role="triangle")
    for i in range(3):
        _add_floating(net, design.b_b, inner[i], FEED_PORTS[i], f"bb_{i}", z_line, "Bb")
        _add_grounded(net, design.b_a, FEED_PORTS[i], z_line, "Ba")
    return net
