"""Derivative-free tuning of line-based decoupling and matching networks.

Two jobs live here: designing the neutralization-line network (antenna line,
ring of decoupling lines, port line; no closed form) and broadening the band
of the closed-form networks once they are realized with lines. Both minimize
a hinge penalty on the feed-port S-parameters over a band, using a restarted
Nelder-Mead simplex on a box folded by reflection at its faces.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import BudgetExhaustedNoFeasible, SingularTermination, StubResonance, UcaDmnError
from .netcore import COND_LIMIT, FrequencySweep, band_below_threshold, band_containing
from .netlist import Netlist
from .rfelements import TransmissionLine
from .ucamodel import UcaGeometry

log = logging.getLogger(__name__)

Z_BOUNDS = (5.0, 250.0)
THETA_BOUNDS = (0.05 * 2 * np.pi, 0.75 * 2 * np.pi)
INFEASIBLE = np.inf


# --------------------------------------------------------------------------
# objective


@dataclass(frozen=True)
class ObjectiveSpec:
    """Band goal for the feed-port S-parameters.

    ``guard_points`` are extra ``(freq, level_db)`` samples where every
    ``|S_ij|`` should stay below ``level_db``; their excess is added with the
    heavy weight ``w_guard``.
    """

    band: tuple[float, float]
    target_db: float = -16.0
    w_match: float = 1.0
    w_coupling: float = 1.0
    n_samples: int = 9
    guard_points: tuple = ()
    w_guard: float = 10.0

    def __post_init__(self):
        lo, hi = self.band
        if not (0 < lo <= hi):
            raise ValueError("band must satisfy 0 < f_lo <= f_hi")
        if self.target_db >= 0:
            raise ValueError("target_db must be negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")

    @classmethod
    def around(cls, f0: float, rel_half_width: float, **kw) -> "ObjectiveSpec":
        return cls((f0 * (1 - rel_half_width), f0 * (1 + rel_half_width)), **kw)

    @property
    def f0(self) -> float:
        return 0.5 * (self.band[0] + self.band[1])

    def freqs(self) -> np.ndarray:
        lo, hi = self.band
        if lo == hi:
            return np.array([lo])
        return np.linspace(lo, hi, self.n_samples)


def _db(s: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 20 * np.log10(np.abs(s))


def penalty_from_s(s: np.ndarray, spec: ObjectiveSpec) -> float:
    """Hinge penalty for S-matrices of shape ``(F, n, n)`` sampled on ``spec.freqs()``.

    Per frequency the worst matching and the worst coupling entry are
    compared with the target; positive excesses are weighted and summed
    over the frequencies.
    """
    m = _db(s)
    n = m.shape[-1]
    eye = np.eye(n, dtype=bool)
    match = m[:, eye].max(axis=1)
    pen = spec.w_match * np.maximum(match - spec.target_db, 0.0)
    if n > 1:
        coup = m[:, ~eye].max(axis=1)
        pen = pen + spec.w_coupling * np.maximum(coup - spec.target_db, 0.0)
    return float(pen.sum())


def antenna_admittances(antenna, freqs: Sequence[float]) -> np.ndarray:
    """``Y_A(f)`` stacked along the first axis.

    ``antenna`` is anything with ``z_matrix(f)`` (a CMS array model or a
    measured :class:`FrequencySweep`) or a frequency-independent object with
    a ``z_matrix`` array attribute.
    """
    zf = getattr(antenna, "z_matrix")
    if callable(zf):
        zs = [np.asarray(zf(f)) for f in freqs]
    else:
        zs = [np.asarray(zf)] * len(freqs)
    return np.stack([np.linalg.inv(z) for z in zs])


def loaded_s_matrices(y_dmn: np.ndarray, y_ant: np.ndarray, z0: float = 50.0) -> np.ndarray:
    """Feed-port S-matrices of 2n-port networks (antenna ports first) loaded by ``y_ant``.

    Batched partitioned-admittance reduction over the leading frequency axis.
    """
    n = y_ant.shape[-1]
    y_aa, y_ap = y_dmn[:, :n, :n], y_dmn[:, :n, n:]
    y_pa, y_pp = y_dmn[:, n:, :n], y_dmn[:, n:, n:]
    k = y_aa + y_ant
    cond = np.linalg.cond(k)
    if not np.all(np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise SingularTermination("Y_AA + Y_A is numerically singular")
    y_in = y_pp - y_pa @ np.linalg.solve(k, y_ap)
    eye = np.eye(n)
    return np.linalg.solve(eye + z0 * y_in, eye - z0 * y_in)


def netlist_s_matrices(netlist: Netlist, y_ant: np.ndarray, freqs: Sequence[float], z0: float = 50.0) -> np.ndarray:
    """Feed-port S-matrices of ``netlist`` (antenna ports first) loaded by ``y_ant``."""
    return loaded_s_matrices(netlist.y_matrices(freqs), y_ant, z0)


def evaluate_objective(design, antenna, spec: ObjectiveSpec, z0: float = 50.0) -> float:
    """Hinge penalty of a line network (netlist or neutralization design) on ``antenna``.

    Resonances and singular compositions count as an infinite penalty.
    """
    freqs = spec.freqs()
    guard_f = [f for f, _ in spec.guard_points]
    try:
        s = _s_of(design, antenna, np.concatenate([freqs, guard_f]), z0)
        pen = penalty_from_s(s[: len(freqs)], spec)
        for (_, level), sm in zip(spec.guard_points, s[len(freqs) :]):
            pen += spec.w_guard * max(float(_db(sm).max()) - level, 0.0)
        return pen
    except (UcaDmnError, np.linalg.LinAlgError):
        return INFEASIBLE


def worst_over_band(design, antenna, band: tuple[float, float], n: int = 101, z0: float = 50.0) -> float:
    """True minimax metric: largest ``|S_ij|`` in dB over a dense band grid."""
    freqs = np.linspace(band[0], band[1], n) if band[0] < band[1] else np.array([band[0]])
    return float(_db(_s_of(design, antenna, freqs, z0)).max())


def _s_of(design, antenna, freqs, z0):
    ya = antenna_admittances(antenna, freqs)
    if isinstance(design, NeutralizationDesign):
        return design.s_matrices(ya, freqs, z0)
    return netlist_s_matrices(design, ya, freqs, z0)


def s_sweep(design, antenna, freqs, z0: float = 50.0) -> FrequencySweep:
    freqs = np.asarray(freqs, dtype=float)
    return FrequencySweep(freqs, _s_of(design, antenna, freqs, z0), "S", z0)


# --------------------------------------------------------------------------
# neutralization network


def _line_y(z: float, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.sin(theta)
    if np.any(np.abs(s) < 1e-9):
        raise StubResonance(f"line of {np.ravel(theta)[0]:.6g} rad is a multiple of a half wavelength")
    return -1j / (z * np.tan(theta)), 1j / (z * s)


def _through(y_load: np.ndarray, z: float, theta: np.ndarray) -> np.ndarray:
    """Admittance seen through identical lines in front of every port of ``y_load``."""
    y11, y12 = _line_y(z, theta)
    n = y_load.shape[-1]
    eye = np.eye(n)
    k = y11[:, None, None] * eye + y_load
    return y11[:, None, None] * eye - (y12**2)[:, None, None] * np.linalg.inv(k)


def ring_pairs(n: int) -> list[tuple[int, int]]:
    if n < 2:
        return []
    if n == 2:
        return [(0, 1)]
    return [(i, (i + 1) % n) for i in range(n)]


@dataclass(frozen=True)
class NeutralizationDesign:
    """Antenna line, ring of decoupling lines and port line, identical per element.

    Each antenna port reaches an internal node through ``tl_ant``; adjacent
    internal nodes are bridged by ``tl_dec``; each feed port reaches its
    node through ``tl_port``.
    """

    n_elements: int
    tl_ant: TransmissionLine
    tl_dec: TransmissionLine
    tl_port: TransmissionLine

    def __post_init__(self):
        for tl in (self.tl_ant, self.tl_dec, self.tl_port):
            if not Z_BOUNDS[0] <= tl.z_c <= Z_BOUNDS[1]:
                raise ValueError(f"line impedance {tl.z_c} outside {Z_BOUNDS}")

    @property
    def f0(self) -> float:
        return self.tl_ant.f0

    @classmethod
    def from_params(cls, n_elements: int, params: Sequence[float], f0: float) -> "NeutralizationDesign":
        za, ta, zd, td, zp, tp = (float(v) for v in params)
        return cls(n_elements, TransmissionLine(za, ta, f0), TransmissionLine(zd, td, f0), TransmissionLine(zp, tp, f0))

    def params(self) -> np.ndarray:
        return np.array(
            [self.tl_ant.z_c, self.tl_ant.theta0, self.tl_dec.z_c, self.tl_dec.theta0, self.tl_port.z_c, self.tl_port.theta0]
        )

    def netlist(self) -> Netlist:
        n = self.n_elements
        net = Netlist([f"A{i + 1}" for i in range(n)] + [f"P{i + 1}" for i in range(n)], [], self.f0)
        for i in range(n):
            net.add_line(self.tl_ant, f"A{i + 1}", f"N{i + 1}", role="ant")
        for i, j in ring_pairs(n):
            net.add_line(self.tl_dec, f"N{i + 1}", f"N{j + 1}", role="dec")
        for i in range(n):
            net.add_line(self.tl_port, f"N{i + 1}", f"P{i + 1}", role="port")
        return net

    def s_matrices(self, y_ant: np.ndarray, freqs: Sequence[float], z0: float = 50.0) -> np.ndarray:
        """Feed-port S-matrices for antenna admittances ``y_ant`` of shape ``(F, n, n)``."""
        freqs = np.asarray(freqs, dtype=float)
        scale = freqs / self.f0
        n = self.n_elements
        y = _through(y_ant, self.tl_ant.z_c, self.tl_ant.theta0 * scale)
        pairs = ring_pairs(n)
        if pairs:
            d11, d12 = _line_y(self.tl_dec.z_c, self.tl_dec.theta0 * scale)
            ring = np.zeros((len(freqs), n, n), dtype=complex)
            for i, j in pairs:
                ring[:, i, i] += d11
                ring[:, j, j] += d11
                ring[:, i, j] += d12
                ring[:, j, i] += d12
            y = y + ring
        y = _through(y, self.tl_port.z_c, self.tl_port.theta0 * scale)
        eye = np.eye(n)
        return np.linalg.solve(eye + z0 * y, eye - z0 * y)


# --------------------------------------------------------------------------
# optimizer


@dataclass
class OptimizationLog:
    """Every evaluation in order, with the best value seen so far."""

    params: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    best: list = field(default_factory=list)

    def record(self, x: np.ndarray, value: float):
        prev = self.best[-1] if self.best else np.inf
        self.params.append(np.array(x, dtype=float))
        self.objective.append(float(value))
        self.best.append(min(prev, float(value)))

    def __len__(self) -> int:
        return len(self.objective)

    def rows(self):
        for i, (p, v) in enumerate(zip(self.params, self.objective)):
            yield i, v, p


@dataclass
class OptimizationResult:
    x: np.ndarray
    objective: float
    n_evals: int
    log: OptimizationLog
    feasible: bool
    initial_objective: float = np.inf


class _Budget(Exception):
    pass


def _fold(y: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Map any point into the box by reflecting at its faces (period-2 triangle wave)."""
    t = np.mod(y, 2.0)
    return lo + (hi - lo) * np.where(t <= 1.0, t, 2.0 - t)


def box_nelder_mead(
    fun: Callable[[np.ndarray], float],
    lo: Sequence[float],
    hi: Sequence[float],
    budget: int,
    rng: np.random.Generator,
    starts: Sequence[Sequence[float]] = (),
    local_evals: int = 1500,
    stop_at: float = 0.0,
    phase_fun: Callable[[np.ndarray], float] | None = None,
    phase_evals: int = 0,
) -> OptimizationResult:
    """Restarted Nelder-Mead in the box ``[lo, hi]``.

    The simplex runs in unit coordinates that are folded back into the box
    by reflection, so every evaluated point is feasible. Restarts begin at
    the given ``starts``, then alternate between a perturbation of the best
    point and a fresh uniform draw. With ``phase_fun`` each restart first
    spends up to ``phase_evals`` on that auxiliary objective (e.g. a single
    frequency) before refining on ``fun``. Every evaluation of either
    objective counts against ``budget``, but only evaluations of ``fun``
    are logged. Stops as soon as ``fun`` reaches ``stop_at``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    log_ = OptimizationLog()
    best = {"x": None, "f": np.inf}
    count = [0]

    def counted(f, record):
        def wrapped(y):
            if count[0] >= budget:
                raise _Budget
            count[0] += 1
            x = _fold(y, lo, hi)
            v = f(x)
            if record:
                log_.record(x, v)
                if v < best["f"]:
                    best["x"], best["f"] = x.copy(), v
                if v <= stop_at:
                    raise _Budget
            return v if np.isfinite(v) else 1e300

        return wrapped

    main = counted(fun, True)
    aux = counted(phase_fun, False) if phase_fun is not None else None
    queue = [(np.asarray(s, dtype=float) - lo) / (hi - lo) for s in starts]
    initial = np.inf
    k = 0
    try:
        while count[0] < budget and best["f"] > stop_at:
            if queue:
                y0 = queue.pop(0)
            elif best["x"] is not None and k % 2 == 1:
                y0 = (best["x"] - lo) / (hi - lo) + rng.normal(0.0, 0.05, lo.size)
            else:
                y0 = rng.uniform(0.0, 1.0, lo.size)
            k += 1
            if aux is not None and phase_evals > 0:
                r = minimize(aux, y0, method="Nelder-Mead", options=dict(maxfev=phase_evals, xatol=1e-7, fatol=1e-10))
                y0 = r.x
            if k == 1:
                initial = fun(_fold(y0, lo, hi))
            main(y0)
            minimize(
                main,
                y0,
                method="Nelder-Mead",
                options=dict(maxfev=local_evals, xatol=1e-7, fatol=1e-10, adaptive=True),
            )
    except _Budget:
        pass
    feasible = best["x"] is not None and np.isfinite(best["f"])
    x = best["x"] if best["x"] is not None else lo.copy()
    return OptimizationResult(x, best["f"], count[0], log_, feasible, initial)


def neutralization_bounds(n_params: int = 6) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([Z_BOUNDS[0], THETA_BOUNDS[0]] * (n_params // 2))
    hi = np.array([Z_BOUNDS[1], THETA_BOUNDS[1]] * (n_params // 2))
    return lo, hi


@dataclass
class NeutralizationResult:
    design: NeutralizationDesign
    objective: float
    worst_db: float
    n_evals: int
    log: OptimizationLog
    feasible: bool


def optimize_neutralization(
    geom: UcaGeometry,
    antenna,
    spec: ObjectiveSpec,
    seed: int = 1,
    budget: int = 10_000,
    z0: float = 50.0,
    start: NeutralizationDesign | None = None,
    raise_if_infeasible: bool = False,
) -> NeutralizationResult:
    """Neutralization-line network for ``antenna`` meeting ``spec`` if possible.

    Each restart first fits the centre frequency alone (deeper target)
    and then refines on the whole band. The returned objective never
    exceeds that of ``start`` when one is given. ``feasible`` is false when
    the budget ran out before the spec was met; with
    ``raise_if_infeasible`` that case raises
    :class:`BudgetExhaustedNoFeasible` carrying the result.
    """
    if budget < 1000:
        raise ValueError("budget must be at least 1000 evaluations")
    n = geom.n_elements
    f0 = spec.f0
    freqs = spec.freqs()
    y_band = antenna_admittances(antenna, freqs)
    y_f0 = antenna_admittances(antenna, [f0])
    centre = ObjectiveSpec((f0, f0), spec.target_db - 20.0, spec.w_match, spec.w_coupling)

    def make(x):
        return NeutralizationDesign.from_params(n, x, f0)

    def band_obj(x):
        try:
            return penalty_from_s(make(x).s_matrices(y_band, freqs, z0), spec)
        except (UcaDmnError, np.linalg.LinAlgError):
            return INFEASIBLE

    def centre_obj(x):
        try:
            return penalty_from_s(make(x).s_matrices(y_f0, [f0], z0), centre)
        except (UcaDmnError, np.linalg.LinAlgError):
            return INFEASIBLE

    lo, hi = neutralization_bounds()
    rng = np.random.default_rng(seed)
    starts = [start.params()] if start is not None else []
    res = box_nelder_mead(
        band_obj, lo, hi, budget, rng, starts, local_evals=1500, phase_fun=centre_obj, phase_evals=600
    )
    design = make(res.x)
    worst = worst_over_band(design, antenna, spec.band, z0=z0)
    met = res.objective == 0.0
    log.info("neutralization: objective %.4g after %d evaluations, worst %.2f dB", res.objective, res.n_evals, worst)
    out = NeutralizationResult(design, res.objective, worst, res.n_evals, res.log, met)
    if not met and raise_if_infeasible:
        err = BudgetExhaustedNoFeasible(f"spec not met after {res.n_evals} evaluations (objective {res.objective:.4g})")
        err.result = out
        raise err
    return out


# --------------------------------------------------------------------------
# broadbanding of realized closed-form networks


@dataclass
class TuneResult:
    netlist: Netlist
    objective_before: float
    objective_after: float
    band_before: tuple[float, float] | None
    band_after: tuple[float, float] | None
    n_evals: int
    log: OptimizationLog
    flag: str = ""


def _band_around(netlist, antenna, f0, threshold_db, rel_span, n_points, z0):
    freqs = f0 * np.linspace(1 - rel_span, 1 + rel_span, n_points)
    freqs = np.unique(np.append(freqs, f0))
    try:
        sweep = s_sweep(netlist, antenna, freqs, z0)
    except (UcaDmnError, np.linalg.LinAlgError):
        return None
    return band_containing(band_below_threshold(sweep, threshold_db), f0)


def broadband_tune(
    netlist: Netlist,
    antenna,
    spec: ObjectiveSpec,
    budget: int = 2000,
    seed: int = 1,
    z0: float = 50.0,
    rel_box: float = 0.2,
    tie_roles: bool = True,
    protect_band: bool = True,
    band_threshold_db: float = -16.0,
    band_span: float = 0.1,
    band_points: int = 401,
) -> TuneResult:
    """Scale line impedances and lengths within ``1 +- rel_box`` to better meet ``spec``.

    Topology is never changed. With ``tie_roles`` elements sharing a role
    tag share their scale factors, which keeps symmetric networks
    symmetric and shrinks the search space. With ``protect_band`` the
    pre-tuning ``band_threshold_db`` band around the design frequency is
    measured on a dense grid, samples across it are added as guard points,
    and a tuned result whose band does not contain the old one is
    discarded. The result is never worse than the start.
    """
    f0 = netlist.f0
    start = netlist.params().reshape(-1, 2)
    before = evaluate_objective(netlist, antenna, spec, z0)
    band0 = _band_around(netlist, antenna, f0, band_threshold_db, band_span, band_points, z0) if protect_band else None
    empty = OptimizationLog()
    if budget <= 0:
        return TuneResult(netlist, before, before, band0, band0, 0, empty, "budget exhausted")
    if before == 0.0:
        return TuneResult(netlist, before, before, band0, band0, 0, empty, "already optimal")

    guards = ()
    if band0 is not None:
        lo_b, hi_b = band0
        pts = np.linspace(lo_b, hi_b, 7)
        # keep the outermost guards strictly inside the old edges
        pts[0] += 1e-3 * (hi_b - lo_b)
        pts[-1] -= 1e-3 * (hi_b - lo_b)
        guards = tuple((float(f), band_threshold_db) for f in pts)
    tspec = ObjectiveSpec(spec.band, spec.target_db, spec.w_match, spec.w_coupling, spec.n_samples, guards)

    groups = netlist.groups() if tie_roles else [[i] for i in range(len(netlist))]
    lo = np.full(2 * len(groups), 1 - rel_box)
    hi = np.full(2 * len(groups), 1 + rel_box)

    def expand(x):
        p = start.copy()
        for g, idx in enumerate(groups):
            p[idx, 0] *= x[2 * g]
            p[idx, 1] *= x[2 * g + 1]
        return netlist.with_params(p.ravel())

    def obj(x):
        return evaluate_objective(expand(x), antenna, tspec, z0)

    rng = np.random.default_rng(seed)
    res = box_nelder_mead(obj, lo, hi, budget, rng, [np.ones(lo.size)], local_evals=max(200, budget // 2))
    tuned = expand(res.x)
    after = evaluate_objective(tuned, antenna, spec, z0)
    if not after < before:
        return TuneResult(netlist, before, before, band0, band0, res.n_evals, res.log, "no improvement")
    band1 = _band_around(tuned, antenna, f0, band_threshold_db, band_span, band_points, z0) if protect_band else None
    if band0 is not None and (band1 is None or band1[0] > band0[0] or band1[1] < band0[1]):
        return TuneResult(netlist, before, before, band0, band0, res.n_evals, res.log, "band would shrink")
    return TuneResult(tuned, before, after, band0, band1, res.n_evals, res.log)
