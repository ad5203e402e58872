"""Time integration of the second-order weak problem W1(w_tt, .) + W2(w, .) = l(.).

Two integrators over the same operator pair:

* :func:`picard_integrate` - the constructive fixed-point scheme.  On one
  subinterval the map sends a candidate trajectory to the solution of a
  stationary problem at each time node followed by a double time
  integration (composite trapezoid) from the initial data; the subinterval
  length delta = 1/(2 sqrt(c)) makes the map a contraction with measured
  per-sweep ratios bounded by delta^2 * c.  Consecutive subintervals are
  glued by reseeding with the terminal state.
* :func:`newmark_integrate` - average-acceleration stepping (beta = 1/4,
  gamma = 1/2), unconditionally stable and energy conserving on the same
  linear system; used for cross-validation.

Loads are callables t -> dual vector (or None); the rate-energy operator
must be positive definite for either integrator.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import BlockLayout, SparseSymOperator, combine_operators
from .errors import NonConvergenceError
from .linalg import cg_solve

__all__ = [
    "DynamicState",
    "Trajectory",
    "stationary_solve",
    "picard_interval",
    "picard_integrate",
    "newmark_integrate",
    "energy",
]

log = logging.getLogger(__name__)

DELTA_FLOOR_FRACTION = 1e-6  # shortest allowed subinterval, as a fraction of T


@dataclass(frozen=True)
class DynamicState:
    """Coefficient vectors of position and velocity at one time."""

    t: float
    u: np.ndarray
    p: np.ndarray
    ut: np.ndarray
    pt: np.ndarray

    @property
    def position(self) -> np.ndarray:
        return np.concatenate([self.u, self.p])

    @property
    def velocity(self) -> np.ndarray:
        return np.concatenate([self.ut, self.pt])

    @classmethod
    def from_vectors(
        cls, layout: BlockLayout, t: float, w: np.ndarray, wt: np.ndarray
    ) -> "DynamicState":
        nu = layout.u_size
        w = np.asarray(w, dtype=float)
        wt = np.asarray(wt, dtype=float)
        if w.size != layout.total or wt.size != layout.total:
            raise ValueError("state vectors do not match the layout")
        return cls(t=float(t), u=w[:nu], p=w[nu:], ut=wt[:nu], pt=wt[nu:])

    @classmethod
    def zero(cls, layout: BlockLayout, t: float = 0.0) -> "DynamicState":
        z = np.zeros(layout.total)
        return cls.from_vectors(layout, t, z, z.copy())


@dataclass(frozen=True)
class Trajectory:
    """States on a uniform time grid with per-node energies and diagnostics."""

    times: np.ndarray
    positions: np.ndarray       # (n_nodes, n_dofs)
    velocities: np.ndarray      # (n_nodes, n_dofs)
    kinetic: np.ndarray
    potential: np.ndarray
    layout: BlockLayout
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        dt = np.diff(self.times)
        if dt.size and (np.any(dt <= 0) or np.ptp(dt) > 1e-10 * dt[0]):
            raise ValueError("trajectory grid must be strictly increasing, uniform")

    @property
    def n_nodes(self) -> int:
        return self.times.size

    def state(self, i: int) -> DynamicState:
        return DynamicState.from_vectors(
            self.layout, self.times[i], self.positions[i], self.velocities[i]
        )

    @property
    def total_energy(self) -> np.ndarray:
        return self.kinetic + self.potential


def energy(
    state: DynamicState, w1: SparseSymOperator, w2: SparseSymOperator
) -> tuple[float, float]:
    """(kinetic, potential) = (W1(wt, wt), W2(w, w)) / 2."""
    return (
        0.5 * w1.quadratic(state.velocity),
        0.5 * w2.quadratic(state.position),
    )


def stationary_solve(
    w1: SparseSymOperator,
    w2: SparseSymOperator,
    w_prev: np.ndarray,
    load_vec: np.ndarray | None,
    tol: float = 1e-12,
) -> np.ndarray:
    """One Lax-Milgram step: solve W1(a, .) = -W2(w_prev, .) + l(.)."""
    rhs = -w2.matvec(w_prev)
    if load_vec is not None:
        rhs = rhs + load_vec
    return cg_solve(w1, rhs, tol=tol)


def _gram_norm(gram: SparseSymOperator | None, w: np.ndarray) -> float:
    if gram is None:
        return float(np.linalg.norm(w))
    return math.sqrt(max(gram.quadratic(w), 0.0))


def _double_trapezoid(
    times: np.ndarray, acc: np.ndarray, w0: np.ndarray, wt0: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Nested cumulative trapezoid: velocity then position from accelerations."""
    h = times[1] - times[0]
    vel = np.empty_like(acc)
    vel[0] = wt0
    np.cumsum(0.5 * h * (acc[:-1] + acc[1:]), axis=0, out=vel[1:])
    vel[1:] += wt0
    pos = np.empty_like(acc)
    pos[0] = w0
    np.cumsum(0.5 * h * (vel[:-1] + vel[1:]), axis=0, out=pos[1:])
    pos[1:] += w0
    return pos, vel


def _load_at(load, times: np.ndarray) -> list[np.ndarray | None]:
    if load is None:
        return [None] * times.size
    return [np.asarray(load(float(t)), dtype=float) for t in times]


def picard_interval(
    state0: DynamicState,
    w1: SparseSymOperator,
    w2: SparseSymOperator,
    load,
    delta: float,
    n_t: int = 17,
    fixed_tol: float = 1e-10,
    max_iterations: int = 60,
    gram: SparseSymOperator | None = None,
    cg_tol: float = 1e-13,
) -> tuple[Trajectory, list[float]]:
    """Fixed-point iteration on one subinterval [t0, t0 + delta].

    Returns the converged trajectory on n_t uniform nodes and the measured
    per-sweep contraction ratios (successive-difference quotients in the
    max-over-nodes Gram norm).  Non-convergence raises
    :class:`NonConvergenceError` carrying the ratio history, which signals
    that delta exceeds the contraction radius.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n_t < 3:
        raise ValueError("need at least three time nodes")
    times = state0.t + np.linspace(0.0, delta, n_t)
    loads = _load_at(load, times)
    w0 = state0.position
    wt0 = state0.velocity

    seed_scale = 1.0 + _gram_norm(gram, w0)
    positions = np.tile(w0, (n_t, 1))
    velocities = np.tile(wt0, (n_t, 1))
    acc = np.empty_like(positions)
    ratios: list[float] = []
    prev_diff = None
    iterations = 0

    for sweep in range(max_iterations):
        iterations = sweep + 1
        for j in range(n_t):
            acc[j] = stationary_solve(w1, w2, positions[j], loads[j], tol=cg_tol)
        new_pos, new_vel = _double_trapezoid(times, acc, w0, wt0)
        diff = max(
            _gram_norm(gram, new_pos[j] - positions[j]) for j in range(n_t)
        )
        if prev_diff is not None and prev_diff > 0:
            ratios.append(diff / prev_diff)
        positions, velocities = new_pos, new_vel
        if diff <= fixed_tol * seed_scale:
            break
        prev_diff = diff
    else:
        raise NonConvergenceError(
            f"fixed point not reached in {max_iterations} sweeps "
            f"(delta={delta!r} likely exceeds the contraction radius)",
            residual=prev_diff,
            history=ratios,
        )

    kinetic = np.array([0.5 * w1.quadratic(v) for v in velocities])
    potential = np.array([0.5 * w2.quadratic(w) for w in positions])
    traj = Trajectory(
        times=times,
        positions=positions,
        velocities=velocities,
        kinetic=kinetic,
        potential=potential,
        layout=w1.layout,
        diagnostics={
            "picard_iterations": [iterations],
            "contraction_ratios": [list(ratios)],
            "residuals": [diff],      # final successive-difference Gram norm
            "delta": delta,
        },
    )
    return traj, ratios


def picard_integrate(
    state0: DynamicState,
    w1: SparseSymOperator,
    w2: SparseSymOperator,
    load,
    t_final: float,
    c_est: float,
    n_t: int = 17,
    fixed_tol: float = 1e-10,
    max_iterations: int = 60,
    gram: SparseSymOperator | None = None,
    cg_tol: float = 1e-13,
) -> Trajectory:
    """Glue fixed-point subintervals of length 1/(2 sqrt(c_est)) over [0, T].

    The subinterval count is rounded up so the global grid stays uniform;
    each subinterval is seeded with the terminal state of the previous one,
    so glued states match bitwise at the seams.  c_est = 0 flags a constant
    map (unbounded contraction radius): a single subinterval is used.
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if c_est < 0:
        raise ValueError("c_est must be nonnegative")
    if c_est == 0.0:
        delta = t_final
        log.info("constant-map flag: zero contraction constant, one interval")
    else:
        delta = 1.0 / (2.0 * math.sqrt(c_est))
        if delta > t_final:
            log.info("contraction interval %.3g capped at t_final", delta)
            delta = t_final
        floor = t_final * DELTA_FLOOR_FRACTION
        if delta < floor:
            log.info("contraction interval %.3g floored at %.3g", delta, floor)
            delta = floor
    n_int = max(1, math.ceil(t_final / delta - 1e-12))
    delta_eff = t_final / n_int

    all_times = [np.array([state0.t])]
    all_pos = [state0.position[None, :]]
    all_vel = [state0.velocity[None, :]]
    iterations: list[int] = []
    all_ratios: list[list[float]] = []
    residuals: list[float] = []
    current = state0
    for _ in range(n_int):
        traj, ratios = picard_interval(
            current, w1, w2, load, delta_eff, n_t=n_t, fixed_tol=fixed_tol,
            max_iterations=max_iterations, gram=gram, cg_tol=cg_tol,
        )
        all_times.append(traj.times[1:])
        all_pos.append(traj.positions[1:])
        all_vel.append(traj.velocities[1:])
        iterations.extend(traj.diagnostics["picard_iterations"])
        all_ratios.extend(traj.diagnostics["contraction_ratios"])
        residuals.extend(traj.diagnostics["residuals"])
        current = traj.state(traj.n_nodes - 1)

    times = np.concatenate(all_times)
    # rebuild exactly uniform node times (concatenated linspaces drift in ulps)
    times = state0.t + np.linspace(0.0, t_final, n_int * (n_t - 1) + 1)
    positions = np.concatenate(all_pos, axis=0)
    velocities = np.concatenate(all_vel, axis=0)
    kinetic = np.array([0.5 * w1.quadratic(v) for v in velocities])
    potential = np.array([0.5 * w2.quadratic(w) for w in positions])
    return Trajectory(
        times=times,
        positions=positions,
        velocities=velocities,
        kinetic=kinetic,
        potential=potential,
        layout=w1.layout,
        diagnostics={
            "picard_iterations": iterations,
            "contraction_ratios": all_ratios,
            "residuals": residuals,
            "delta": delta_eff,
            "intervals": n_int,
            "c_est": c_est,
        },
    )


def newmark_integrate(
    state0: DynamicState,
    w1: SparseSymOperator,
    w2: SparseSymOperator,
    load,
    dt: float,
    n_steps: int,
    beta: float = 0.25,
    gamma: float = 0.5,
    cg_tol: float = 1e-13,
) -> Trajectory:
    """Newmark stepping of W1(w_tt, .) + W2(w, .) = l(.).

    The effective operator W1 + beta dt^2 W2 is solved with conjugate
    gradients each step, warm-started from the previous acceleration.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("need at least one step")
    eff = combine_operators(1.0, w1, beta * dt * dt, w2)
    times = state0.t + dt * np.arange(n_steps + 1)
    loads = _load_at(load, times)

    n = w1.dimension
    positions = np.empty((n_steps + 1, n))
    velocities = np.empty((n_steps + 1, n))
    positions[0] = state0.position
    velocities[0] = state0.velocity

    rhs0 = -w2.matvec(positions[0])
    if loads[0] is not None:
        rhs0 = rhs0 + loads[0]
    a = cg_solve(w1, rhs0, tol=cg_tol)
    for k in range(n_steps):
        u_pred = positions[k] + dt * velocities[k] + dt * dt * (0.5 - beta) * a
        v_pred = velocities[k] + dt * (1.0 - gamma) * a
        rhs = -w2.matvec(u_pred)
        if loads[k + 1] is not None:
            rhs = rhs + loads[k + 1]
        a = cg_solve(eff, rhs, tol=cg_tol, x0=a)
        positions[k + 1] = u_pred + beta * dt * dt * a
        velocities[k + 1] = v_pred + gamma * dt * a

    kinetic = np.array([0.5 * w1.quadratic(v) for v in velocities])
    potential = np.array([0.5 * w2.quadratic(w) for w in positions])
    return Trajectory(
        times=times,
        positions=positions,
        velocities=velocities,
        kinetic=kinetic,
        potential=potential,
        layout=w1.layout,
        diagnostics={"integrator": "newmark", "beta": beta, "gamma": gamma},
    )
