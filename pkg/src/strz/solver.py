"""Time evolution of i u_t - Lap(u) + V(t,x) u = F.

Two routes are implemented and cross-validated:

* Strang split-step: half-step potential phases around an exact free step,
  second order in dt, exactly norm-preserving for F = 0 and real V.
* Duhamel fixed point: the integral-equation map
      Phi(v) = exp(it Lap) u0 - i * integral_0^t exp(i(t-s) Lap) [F - V v](s) ds
  iterated to its fixed point on a time piece where the potential's mixed
  norm is small.  (The -i phase in front of the integral is irrelevant for
  norm estimates but required for the fixed point to solve the equation.)

The discrete Duhamel integral uses the trapezoid rule at the sampling dt and
is accumulated with the one-step propagator, so one sweep costs O(steps) FFTs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import CalibrationError, NonContractionError, PartitionError, PreconditionError
from .exponents import Exponent, ExponentLike, as_exponent, is_admissible
from .potentials import (
    Interval,
    PartitionResult,
    PatchedRescaledPotential,
    PotentialSpec,
    StaticPotential,
    ZeroPotential,
    evaluate,
    partition_interval,
    trajectory_mixed_norm,
)
from .spectral import ComplexField, Grid, Trajectory, _ksq, gaussian_field, lq_norm

SourceLike = Union[None, ComplexField, Callable[[float], ComplexField]]

DEFAULT_Q_FALLBACK = 8  # endpoint space exponent for n <= 2


def endpoint_q(n: int, q_fallback: int = DEFAULT_Q_FALLBACK) -> Exponent:
    """Spatial exponent of the endpoint slot of the Z-norm: 2n/(n-2) when
    n >= 3, a large configurable stand-in otherwise."""
    if n >= 3:
        return Exponent(Fraction(2 * n, n - 2))
    return Exponent(q_fallback)


@dataclass(frozen=True)
class ZNormValue:
    """max of the L^inf_t L^2 and L^2_t L^qe sample norms of a trajectory."""

    l_inf_l2: float
    l2_endpoint: float
    endpoint: Exponent

    @property
    def value(self) -> float:
        return max(self.l_inf_l2, self.l2_endpoint)


def _z_norm_arrays(times: np.ndarray, arrays: Sequence[np.ndarray], grid: Grid,
                   q_fallback: int = DEFAULT_Q_FALLBACK) -> ZNormValue:
    qe = endpoint_q(grid.n, q_fallback)
    qef = float(qe)
    vol = grid.cell_volume
    l2s = np.array([math.sqrt((np.abs(a) ** 2).sum() * vol) for a in arrays])
    qes = np.array([((np.abs(a) ** qef).sum() * vol) ** (1.0 / qef) for a in arrays])
    l2e = math.sqrt(float(np.trapezoid(qes**2, x=times))) if len(times) > 1 else 0.0
    return ZNormValue(l_inf_l2=float(l2s.max()), l2_endpoint=l2e, endpoint=qe)


def z_norm(traj: Trajectory, q_fallback: int = DEFAULT_Q_FALLBACK) -> ZNormValue:
    return _z_norm_arrays(traj.times, [s.values for s in traj.states], traj.grid, q_fallback)


class PotentialSampler:
    """Evaluates V(t) on a grid, caching arrays for piecewise-static specs."""

    def __init__(self, V: PotentialSpec, grid: Grid, mass_tol: Optional[float] = None):
        self.V, self.grid, self.mass_tol = V, grid, mass_tol
        self._static: Optional[np.ndarray] = None
        self._window_cache: Dict[Optional[int], np.ndarray] = {}
        if isinstance(V, ZeroPotential):
            self._static = np.zeros(grid.shape)
        elif isinstance(V, StaticPotential):
            self._static = evaluate(V, 0.0, grid).values.real

    def values_at(self, t: float) -> np.ndarray:
        if self._static is not None:
            return self._static
        if isinstance(self.V, PatchedRescaledPotential):
            w = self.V.schedule.window_at(t)
            key = None if w is None else w.k
            if key not in self._window_cache:
                self._window_cache[key] = evaluate(self.V, t, self.grid, self.mass_tol).values.real
            return self._window_cache[key]
        return evaluate(self.V, t, self.grid, self.mass_tol).values.real


def _source_at(F: SourceLike, t: float, grid: Grid) -> Optional[np.ndarray]:
    if F is None:
        return None
    if isinstance(F, ComplexField):
        if F.grid != grid:
            raise PreconditionError("source defined on a different grid")
        return F.values
    out = F(t)
    if out.grid != grid:
        raise PreconditionError("source defined on a different grid")
    return out.values


def default_pairs(n: int) -> List[Tuple[Exponent, Exponent]]:
    """Admissible pairs probed by default in solve reports."""
    if n == 2:
        raw = [("inf", 2), (4, 4), (3, 6)]
    elif n == 3:
        raw = [("inf", 2), (2, 6), (Fraction(8, 3), 4)]
    else:
        return []
    return [(as_exponent(p), as_exponent(q)) for p, q in raw]


@dataclass
class SolveReport:
    """Everything observable about one evolution run."""

    trajectory: Trajectory
    energy_drift: float
    contraction_factors: List[List[float]] = dataclass_field(default_factory=list)
    partition: Optional[PartitionResult] = None
    iterations: List[int] = dataclass_field(default_factory=list)
    residuals: List[float] = dataclass_field(default_factory=list)
    strichartz_ratios: Dict[Tuple[Exponent, Exponent], float] = dataclass_field(default_factory=dict)
    tau: Optional[float] = None
    c_hat: Optional[float] = None
    constant_bound: Optional[float] = None

    @property
    def pieces(self) -> int:
        return 1 if self.partition is None else len(self.partition)

    def to_json_dict(self) -> dict:
        d = {
            "samples": len(self.trajectory.times),
            "t_final": float(self.trajectory.times[-1]),
            "energy_drift": self.energy_drift,
            "pieces": self.pieces,
            "iterations": list(self.iterations),
            "residuals": [float(r) for r in self.residuals],
            "contraction_factors": [[float(f) for f in fs] for fs in self.contraction_factors],
            "strichartz_ratios": {f"{p},{q}": v for (p, q), v in self.strichartz_ratios.items()},
        }
        if self.partition is not None:
            d["partition"] = [
                {"start": a, "end": b, "norm": nrm}
                for (a, b), nrm in zip(self.partition.pieces, self.partition.piece_norms)
            ]
        for key in ("tau", "c_hat", "constant_bound"):
            val = getattr(self, key)
            if val is not None:
                d[key] = float(val)
        return d


def _sample_lattice(interval: Interval, dt: float) -> Tuple[np.ndarray, float, int]:
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise PreconditionError(f"interval must have positive length, got [{a}, {b}]")
    if not dt > 0:
        raise PreconditionError("dt must be positive")
    m = max(1, round((b - a) / dt))
    dt_eff = (b - a) / m
    return a + dt_eff * np.arange(m + 1), dt_eff, m


def split_step_evolve(
    u0: ComplexField,
    V: PotentialSpec,
    F: SourceLike = None,
    interval: Interval = (0.0, 1.0),
    dt: float = 1e-3,
    store_every: Optional[int] = None,
    pairs: Optional[Sequence[Tuple[ExponentLike, ExponentLike]]] = None,
    step_probe: Optional[Callable[[float, np.ndarray], None]] = None,
    mass_tol: Optional[float] = None,
) -> SolveReport:
    """Strang splitting: half potential phase exp(i V(t_mid) dt/2), exact
    free step, half phase again; sources enter through a midpoint Duhamel
    correction.  Second order in dt; exactly unitary for F = 0, real V.
    """
    grid = u0.grid
    times, dt_eff, m = _sample_lattice(interval, dt)
    sampler = PotentialSampler(V, grid, mass_tol)
    kin = np.exp(1j * dt_eff * _ksq(grid))
    kin_half = np.exp(1j * (dt_eff / 2.0) * _ksq(grid))

    if store_every is None:
        store_every = max(1, int(math.ceil(m / 256)))
    pair_list = [(as_exponent(p), as_exponent(q)) for p, q in (pairs or [])]
    for p, q in pair_list:
        if not is_admissible(p, q, grid.n):
            raise PreconditionError(f"pair ({p},{q}) is not admissible for n={grid.n}")
    acc = {pq: 0.0 for pq in pair_list}
    sup = {pq: 0.0 for pq in pair_list}

    u = u0.values.copy()
    vol = grid.cell_volume
    energies = np.empty(m + 1)
    stored_idx: List[int] = []
    stored: List[ComplexField] = []

    def record(j: int, uvals: np.ndarray):
        energies[j] = math.sqrt((np.abs(uvals) ** 2).sum() * vol)
        weight = dt_eff * (0.5 if j in (0, m) else 1.0)
        for (p, q) in pair_list:
            nq = _grid_lq(uvals, grid, q)
            if p.is_infinite:
                sup[(p, q)] = max(sup[(p, q)], nq)
            else:
                acc[(p, q)] += weight * nq ** float(p)
        if step_probe is not None:
            step_probe(float(times[j]), uvals)
        if j % store_every == 0 or j == m:
            stored_idx.append(j)
            stored.append(ComplexField(grid, uvals.copy()))

    record(0, u)
    for j in range(m):
        t_mid = float(times[j]) + dt_eff / 2.0
        phase_half = np.exp(1j * (dt_eff / 2.0) * sampler.values_at(t_mid))
        u = phase_half * np.fft.ifftn(kin * np.fft.fftn(phase_half * u))
        src = _source_at(F, t_mid, grid)
        if src is not None:
            quarter = np.exp(1j * (dt_eff / 4.0) * sampler.values_at(t_mid))
            half_evolved = quarter * np.fft.ifftn(kin_half * np.fft.fftn(quarter * src))
            u = u - 1j * dt_eff * half_evolved
        record(j + 1, u)

    e0 = energies[0]
    drift = float(np.abs(energies - e0).max() / e0) if e0 > 0 else 0.0
    ratios = {}
    u0_l2 = energies[0]
    for (p, q) in pair_list:
        total = sup[(p, q)] if p.is_infinite else acc[(p, q)] ** (1.0 / float(p))
        ratios[(p, q)] = total / u0_l2 if u0_l2 > 0 else math.inf
    traj = Trajectory(times=times[stored_idx], states=stored, energy_log=energies[stored_idx])
    return SolveReport(trajectory=traj, energy_drift=drift, strichartz_ratios=ratios)


def _grid_lq(vals: np.ndarray, grid: Grid, q: Exponent) -> float:
    mod = np.abs(vals)
    if q.is_infinite:
        return float(mod.max())
    qf = float(q)
    return float(((mod**qf).sum() * grid.cell_volume) ** (1.0 / qf))


@dataclass
class DuhamelResult:
    trajectory: Trajectory
    factors: List[float]
    iterations: int
    first_increment: float
    residual: float  # Z-norm of Phi(v) - v relative to Z-norm of v


def _duhamel_run(
    u0: ComplexField,
    F: SourceLike,
    V: PotentialSpec,
    piece: Interval,
    dt: float,
    tol: float,
    maxit: int,
    q_fallback: int,
    mass_tol: Optional[float],
    frozen: bool,
) -> DuhamelResult:
    grid = u0.grid
    times, dt_eff, m = _sample_lattice(piece, dt)
    sampler = PotentialSampler(V, grid, mass_tol)
    kin = np.exp(1j * dt_eff * _ksq(grid))
    vvals = [sampler.values_at(float(t)) for t in times]

    if frozen:
        v0 = vvals[0]
        phase_half = np.exp(1j * (dt_eff / 2.0) * v0)

        def prop(a: np.ndarray) -> np.ndarray:
            return phase_half * np.fft.ifftn(kin * np.fft.fftn(phase_half * a))

        eff = [v - v0 for v in vvals]  # W(t) = V(t) - V(t0)
    else:

        def prop(a: np.ndarray) -> np.ndarray:
            return np.fft.ifftn(kin * np.fft.fftn(a))

        eff = vvals

    fvals = [_source_at(F, float(t), grid) for t in times]
    base = np.empty((m + 1,) + grid.shape, dtype=np.complex128)
    base[0] = u0.values
    for j in range(m):
        base[j + 1] = prop(base[j])

    def apply_phi(v: np.ndarray) -> np.ndarray:
        out = np.empty_like(v)
        out[0] = base[0]
        integral = np.zeros(grid.shape, dtype=np.complex128)
        g_prev = _g(0, v)
        for j in range(m):
            g_next = _g(j + 1, v)
            integral = prop(integral + (dt_eff / 2.0) * g_prev) + (dt_eff / 2.0) * g_next
            out[j + 1] = base[j + 1] - 1j * integral
            g_prev = g_next
        return out

    def _g(j: int, v: np.ndarray) -> np.ndarray:
        g = -eff[j] * v[j]
        if fvals[j] is not None:
            g = g + fvals[j]
        return g

    def zdiff(a: np.ndarray, b: np.ndarray) -> float:
        return _z_norm_arrays(times, list(a - b), grid, q_fallback).value

    v = base.copy()
    scale = _z_norm_arrays(times, list(v), grid, q_fallback).value
    v_next = apply_phi(v)
    d_first = zdiff(v_next, v)
    factors: List[float] = []
    iterations = 1
    v, v_prev_diff = v_next, d_first
    if d_first > max(1e-14 * scale, 0.0):
        while True:
            v_next = apply_phi(v)
            d = zdiff(v_next, v)
            factors.append(d / v_prev_diff if v_prev_diff > 0 else 0.0)
            iterations += 1
            v, v_prev_diff = v_next, d
            if d <= tol * d_first:
                break
            if iterations >= maxit:
                raise NonContractionError(
                    f"no contraction after {maxit} iterations "
                    f"(last factor {factors[-1]:.3f}); piece too large"
                )

    res_abs = zdiff(apply_phi(v), v)
    vnorm = _z_norm_arrays(times, list(v), grid, q_fallback).value
    residual = res_abs / vnorm if vnorm > 0 else res_abs
    states = [ComplexField(grid, v[j]) for j in range(m + 1)]
    energies = np.array([lq_norm(s, 2) for s in states])
    traj = Trajectory(times=times, states=states, energy_log=energies)
    return DuhamelResult(trajectory=traj, factors=factors, iterations=iterations,
                         first_increment=d_first, residual=residual)


def duhamel_iterate(u0: ComplexField, F: SourceLike, V: PotentialSpec, piece: Interval,
                    dt: float, tol: float = 1e-8, maxit: int = 30,
                    q_fallback: int = DEFAULT_Q_FALLBACK,
                    mass_tol: Optional[float] = None) -> DuhamelResult:
    """Fixed point of Phi(v) = exp(it Lap) u0 - i Duhamel[F - V v] on a piece.

    Starts from the free evolution; stops when the Z-norm of successive
    differences falls below tol times the first increment.  Raises
    NonContractionError when maxit is hit, which signals the piece's mixed
    potential norm is too large.
    """
    return _duhamel_run(u0, F, V, piece, dt, tol, maxit, q_fallback, mass_tol, frozen=False)


def frozen_duhamel(u0: ComplexField, F: SourceLike, V: PotentialSpec, piece: Interval,
                   dt: float, tol: float = 1e-8, maxit: int = 30,
                   q_fallback: int = DEFAULT_Q_FALLBACK,
                   mass_tol: Optional[float] = None) -> DuhamelResult:
    """Duhamel iteration around the frozen-coefficient group exp(itH) with
    H = Lap - V(t0, .): the perturbation is W(t) = V(t) - V(t0), which is
    small on short pieces for potentials continuous in time.  The inner
    propagator is realized by split-stepping the static frozen potential."""
    return _duhamel_run(u0, F, V, piece, dt, tol, maxit, q_fallback, mass_tol, frozen=True)


def solve_global(
    u0: ComplexField,
    F: SourceLike,
    V: PotentialSpec,
    interval: Interval,
    r: ExponentLike,
    s: ExponentLike,
    tau: float,
    dt: float,
    tol: float = 1e-8,
    maxit: int = 30,
    pairs: Optional[Sequence[Tuple[ExponentLike, ExponentLike]]] = None,
    q_fallback: int = DEFAULT_Q_FALLBACK,
    store_every: Optional[int] = None,
    mass_tol: Optional[float] = None,
) -> SolveReport:
    """Partition-and-chain solve: split the interval into pieces whose mixed
    potential norm is below tau, run the Duhamel iteration piece by piece
    feeding terminal states forward, and report contraction data plus the
    chained constant bound k (1 + 2 c_hat)^k with c_hat = 1 / (2 tau)."""
    grid = u0.grid
    part = partition_interval(V, r, s, interval, tau, dt, grid=grid, mass_tol=mass_tol)
    all_times: List[np.ndarray] = []
    all_states: List[ComplexField] = []
    factors: List[List[float]] = []
    iterations: List[int] = []
    residuals: List[float] = []
    state = u0
    for idx, (a, b) in enumerate(part.pieces):
        result = duhamel_iterate(state, F, V, (a, b), part.dt, tol, maxit,
                                 q_fallback, mass_tol)
        factors.append(result.factors)
        iterations.append(result.iterations)
        residuals.append(result.residual)
        tr = result.trajectory
        skip = 1 if idx > 0 else 0  # piece start duplicates previous terminal state
        all_times.append(tr.times[skip:])
        all_states.extend(tr.states[skip:])
        state = tr.states[-1]
    times = np.concatenate(all_times)
    energies = np.array([lq_norm(st, 2) for st in all_states])
    full = Trajectory(times=times, states=all_states, energy_log=energies)

    pair_list = [(as_exponent(p), as_exponent(q)) for p, q in
                 (pairs if pairs is not None else default_pairs(grid.n))]
    u0_l2 = lq_norm(u0, 2)
    ratios = {}
    for p, q in pair_list:
        if not is_admissible(p, q, grid.n):
            raise PreconditionError(f"pair ({p},{q}) is not admissible for n={grid.n}")
        ratios[(p, q)] = trajectory_mixed_norm(full, p, q) / u0_l2

    if store_every is None:
        store_every = max(1, int(math.ceil(len(times) / 256)))
    keep = list(range(0, len(times), store_every))
    if keep[-1] != len(times) - 1:
        keep.append(len(times) - 1)
    stored = Trajectory(times=times[keep], states=[all_states[i] for i in keep],
                        energy_log=energies[keep])
    e0 = energies[0]
    drift = float(np.abs(energies - e0).max() / e0) if e0 > 0 else 0.0
    k = len(part.pieces)
    c_hat = 1.0 / (2.0 * tau)
    return SolveReport(
        trajectory=stored,
        energy_drift=drift,
        contraction_factors=factors,
        partition=part,
        iterations=iterations,
        residuals=residuals,
        strichartz_ratios=ratios,
        tau=tau,
        c_hat=c_hat,
        constant_bound=k * (1.0 + 2.0 * c_hat) ** k,
    )


def calibrate_tau(
    reference_potentials: Sequence[PotentialSpec],
    grid: Grid,
    dt: float,
    interval: Interval = (0.0, 1.0),
    r: ExponentLike = 2,
    s: Optional[ExponentLike] = None,
    cap: float = 8.0,
    rounds: int = 12,
    target: float = 0.5,
    tol: float = 1e-6,
    maxit: int = 12,
    q_fallback: int = DEFAULT_Q_FALLBACK,
    probe_state: Optional[ComplexField] = None,
) -> float:
    """Largest tau on a bisection grid such that every reference potential,
    partitioned at tau, yields Duhamel runs whose contraction factors stay
    at or below ``target`` on every piece.

    Stands in for the non-constructive smallness threshold (2 C0)^-1: the
    returned tau defines the calibrated constant c_hat = 1/(2 tau) used in
    reports.  An empty-factor run (converged in one application) passes.
    """
    if not reference_potentials:
        raise PreconditionError("calibration needs at least one reference potential")
    r = as_exponent(r)
    s = as_exponent(s) if s is not None else Exponent(grid.n if grid.n >= 2 else 2)
    if probe_state is None:
        g = gaussian_field(grid, sigma=1.0)
        probe_state = ComplexField(grid, g.values / lq_norm(g, 2))

    def passes(tau: float) -> bool:
        for V in reference_potentials:
            try:
                part = partition_interval(V, r, s, interval, tau, dt, grid=grid)
                for piece in part.pieces:
                    res = duhamel_iterate(probe_state, None, V, piece, dt,
                                          tol, maxit, q_fallback)
                    if res.factors and max(res.factors) > target:
                        return False
            except (NonContractionError, PartitionError, PreconditionError):
                return False
        return True

    if passes(cap):
        return cap
    lo, hi = 0.0, cap
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise CalibrationError("no tau in the search range produced contracting runs")
    return lo
