"""Model right-hand sides, the hyperbolicity guard, and time integrators.

Four model equations share one quasilinear form

    u_tt - c^2 Lap u - nu*eps Lap u_t = alpha*eps u_t u_tt + beta*eps grad u . grad u_t

solved pointwise for the acceleration

    u_tt = [c^2 Lap u + nu*eps Lap u_t + beta*eps grad u . grad u_t] / (1 - alpha*eps u_t).

The model kinds select effective coefficients: the wave equation zeroes
everything but c, the strongly damped wave keeps the viscosity, the Westervelt
model drops the gradient coupling and strengthens the cumulative coefficient
to (gamma+1)/c^2, and the full model keeps all terms.

Two integrators are provided: classic explicit RK4 under a CFL restriction,
and an exponential integrating-factor Heun scheme (IMEX) that advances the
stiff linear part c^2 Lap u + nu*eps Lap u_t with the exact per-mode 2x2
propagator and treats the quasilinear remainder explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import HyperbolicityBreakdown, StepRejected
from .fields import (
    Field,
    FloatArray,
    Grid,
    dealias_values,
    gradient_values,
    laplacian_values,
)

DEFAULT_CFL = 0.4
DEFAULT_HYP_FLOOR = 0.1


class ModelKind(Enum):
    """Which reduction of the quasilinear acoustic model to integrate."""

    WAVE = "wave"
    DAMPED_WAVE = "damped_wave"
    WESTERVELT = "westervelt"
    KUZNETSOV = "kuznetsov"


class Scheme(Enum):
    """Time integrator selector."""

    EXPLICIT_RK4 = "rk4"
    IMEX = "imex"


@dataclass(frozen=True)
class PhysicalParams:
    """Sound speed, viscosity, perturbation scale, and nonlinearity strengths.

    The physical regime has alpha = (gamma - 1)/c^2, beta = 2 and
    nu = delta/rho_0; use :meth:`from_gamma` for that preset.  hyp_floor is
    the breakdown threshold on the factor 1 - alpha*eps*u_t.
    """

    c: float = 1.0
    nu: float = 0.0
    eps: float = 0.1
    alpha: float = 1.0
    beta: float = 2.0
    hyp_floor: float = DEFAULT_HYP_FLOOR

    def __post_init__(self) -> None:
        for name in ("c", "nu", "eps", "alpha", "beta", "hyp_floor"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.c <= 0:
            raise ValueError("sound speed c must be positive")
        if self.nu < 0:
            raise ValueError("viscosity nu must be nonnegative")
        if not 0.0 < self.eps <= 1.0:
            raise ValueError("perturbation scale eps must lie in (0, 1]")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not 0.0 < self.hyp_floor < 1.0:
            raise ValueError("hyp_floor must lie in (0, 1)")

    @classmethod
    def from_gamma(
        cls,
        c: float = 1.0,
        nu: float = 0.0,
        eps: float = 0.1,
        gamma: float = 1.4,
        hyp_floor: float = DEFAULT_HYP_FLOOR,
    ) -> PhysicalParams:
        """Physical preset alpha = (gamma - 1)/c^2, beta = 2."""
        return cls(c=c, nu=nu, eps=eps, alpha=(gamma - 1.0) / c**2, beta=2.0, hyp_floor=hyp_floor)

    @property
    def gamma(self) -> float:
        """Adiabatic exponent implied by alpha = (gamma - 1)/c^2."""
        return 1.0 + self.alpha * self.c**2

    @property
    def hyperbolicity_guard(self) -> float:
        """Sup-norm bound 1/(2 alpha eps) keeping the factor in [1/2, 3/2]."""
        return 1.0 / (2.0 * self.alpha * self.eps)


def effective_coefficients(p: PhysicalParams, kind: ModelKind) -> tuple[float, float, float]:
    """(alpha_eff, beta_eff, nu_eff) entering the equation for the given kind.

    The Westervelt coefficient (gamma + 1)/c^2 equals alpha + 2/c^2 under the
    physical identification alpha = (gamma - 1)/c^2.
    """
    if kind is ModelKind.WAVE:
        return 0.0, 0.0, 0.0
    if kind is ModelKind.DAMPED_WAVE:
        return 0.0, 0.0, p.nu
    if kind is ModelKind.WESTERVELT:
        return p.alpha + 2.0 / p.c**2, 0.0, p.nu
    return p.alpha, p.beta, p.nu


@dataclass(frozen=True)
class SimState:
    """Solution pair (u, v = u_t) at time t plus running time integrals.

    fnu_accum carries beta*eps * int_0^t int u_tt |grad u|^2, the accumulated
    part of the F_nu functional; div_accum carries
    int_0^t (||u_tt||_inf + ||Lap u||_inf) d tau, the divergence-criterion
    integrand whose steep growth evidences breakdown.
    """

    u: Field
    v: Field
    t: float = 0.0
    fnu_accum: float = 0.0
    div_accum: float = 0.0

    def __post_init__(self) -> None:
        if self.u.grid != self.v.grid:
            raise ValueError("u and v must share one grid")
        if self.t < 0 or not math.isfinite(self.t):
            raise ValueError("time must be finite and nonnegative")

    @property
    def grid(self) -> Grid:
        return self.u.grid


def hyperbolicity_factor(
    v: Field, p: PhysicalParams, kind: ModelKind = ModelKind.KUZNETSOV
) -> tuple[Field, float]:
    """Pointwise factor 1 - alpha*eps*v and its grid minimum (reporting only)."""
    alpha_eff, _, _ = effective_coefficients(p, kind)
    values = 1.0 - alpha_eff * p.eps * v.values
    return Field(v.grid, values), float(values.min())


def _acceleration_full(
    grid: Grid,
    u: FloatArray,
    v: FloatArray,
    p: PhysicalParams,
    kind: ModelKind,
    t: float | None = None,
) -> tuple[FloatArray, FloatArray]:
    """Acceleration and Lap u (reused by monitors) at the array level."""
    alpha_eff, beta_eff, nu_eff = effective_coefficients(p, kind)
    lap_u = laplacian_values(grid, u)
    acc = p.c**2 * lap_u
    if nu_eff > 0.0:
        acc = acc + nu_eff * p.eps * laplacian_values(grid, v)
    if beta_eff != 0.0:
        grad_u = gradient_values(grid, u)
        grad_v = gradient_values(grid, v)
        prod = grad_u[0] * grad_v[0]
        for i in range(1, grid.n):
            prod += grad_u[i] * grad_v[i]
        acc = acc + beta_eff * p.eps * dealias_values(grid, prod)
    if alpha_eff != 0.0:
        factor = 1.0 - alpha_eff * p.eps * v
        fmin = float(factor.min())
        if fmin <= p.hyp_floor:
            raise HyperbolicityBreakdown(fmin, p.hyp_floor, t)
        acc = acc / factor
    return acc, lap_u


def acceleration_values(
    grid: Grid,
    u: FloatArray,
    v: FloatArray,
    p: PhysicalParams,
    kind: ModelKind,
    t: float | None = None,
) -> FloatArray:
    return _acceleration_full(grid, u, v, p, kind, t)[0]


def acceleration(state: SimState, p: PhysicalParams, kind: ModelKind) -> Field:
    """u_tt solved from the quasilinear form, quadratic products dealiased.

    Raises HyperbolicityBreakdown if the factor 1 - alpha*eps*v reaches the
    configured floor anywhere on the grid.
    """
    values = acceleration_values(state.grid, state.u.values, state.v.values, p, kind, state.t)
    return Field(state.grid, values)


def cfl_dt(grid: Grid, c: float, cfl: float = DEFAULT_CFL) -> float:
    """Largest admissible explicit time step cfl * min(dx_i) / c."""
    return cfl * min(grid.spacings) / c


def stiffness_ratio(grid: Grid, p: PhysicalParams, dt: float) -> float:
    """nu*eps*dt / min(dx)^2; above ~0.05 the explicit scheme is impractical."""
    return p.nu * p.eps * dt / min(grid.spacings) ** 2


def _fnu_integrand(
    grid: Grid, u: FloatArray, acc: FloatArray, beta_eff: float, eps: float
) -> float:
    if beta_eff == 0.0:
        return 0.0
    grad_u = gradient_values(grid, u)
    grad_sq = grad_u[0] ** 2
    for i in range(1, grid.n):
        grad_sq += grad_u[i] ** 2
    return beta_eff * eps * grid.cell_volume * float(np.sum(acc * grad_sq))


def _div_integrand(acc: FloatArray, lap_u: FloatArray) -> float:
    return float(np.max(np.abs(acc))) + float(np.max(np.abs(lap_u)))


# Exact per-mode propagators for the linear block d/dt (u, v) = A (u, v),
# A = [[0, 1], [-c^2 k^2, -nu*eps*k^2]], cached per (grid, dt, c, nu*eps).

_PROPAGATOR_CACHE: dict[tuple, tuple[FloatArray, FloatArray, FloatArray, FloatArray]] = {}


def _linear_propagator(
    grid: Grid, dt: float, c: float, nu_eps: float
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    key = (grid, dt, c, nu_eps)
    hit = _PROPAGATOR_CACHE.get(key)
    if hit is not None:
        return hit
    k2 = grid.k_squared
    a = nu_eps * k2
    b = c**2 * k2
    s = np.sqrt((a * a - 4.0 * b).astype(complex))
    h = 0.5 * dt * s
    cosh_h = np.cosh(h)
    # sinh(h)/h with a series fallback where h ~ 0 (k = 0 and critical modes).
    small = np.abs(h) < 1e-8
    h_safe = np.where(small, 1.0, h)
    sinhc = np.where(small, 1.0 + h * h / 6.0, np.sinh(h_safe) / h_safe)
    pref = np.exp(-0.5 * a * dt)
    e00 = (pref * (cosh_h + 0.5 * a * dt * sinhc)).real
    e01 = (pref * dt * sinhc).real
    e10 = (pref * (-b) * dt * sinhc).real
    e11 = (pref * (cosh_h - 0.5 * a * dt * sinhc)).real
    result = (e00, e01, e10, e11)
    if len(_PROPAGATOR_CACHE) > 64:
        _PROPAGATOR_CACHE.pop(next(iter(_PROPAGATOR_CACHE)))
    _PROPAGATOR_CACHE[key] = result
    return result


def _nonlinear_remainder(
    grid: Grid,
    u: FloatArray,
    v: FloatArray,
    p: PhysicalParams,
    kind: ModelKind,
    t: float | None,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """(acc_full, lap_u, remainder = acc_full - linear part)."""
    alpha_eff, beta_eff, nu_eff = effective_coefficients(p, kind)
    acc, lap_u = _acceleration_full(grid, u, v, p, kind, t)
    lin = p.c**2 * lap_u
    if nu_eff > 0.0:
        lin = lin + nu_eff * p.eps * laplacian_values(grid, v)
    if alpha_eff == 0.0 and beta_eff == 0.0:
        remainder = np.zeros_like(acc)
    else:
        remainder = acc - lin
    return acc, lap_u, remainder


def step(
    state: SimState,
    dt: float,
    p: PhysicalParams,
    kind: ModelKind = ModelKind.KUZNETSOV,
    scheme: Scheme = Scheme.EXPLICIT_RK4,
    cfl: float = DEFAULT_CFL,
) -> SimState:
    """Advance one time step; updates both running accumulators by trapezoid.

    For the explicit scheme the step is shrunk to the largest CFL-admissible
    value <= dt (never enlarged); the state's t advances by the step actually
    taken.  Raises StepRejected if the update produces non-finite values and
    propagates HyperbolicityBreakdown from acceleration evaluations.
    """
    if dt < 0 or not math.isfinite(dt):
        raise ValueError("dt must be finite and nonnegative")
    if dt == 0.0:
        return state
    grid = state.grid
    if scheme is Scheme.EXPLICIT_RK4:
        dt = min(dt, cfl_dt(grid, p.c, cfl))
    _, beta_eff, _ = effective_coefficients(p, kind)
    u0, v0, t0 = state.u.values, state.v.values, state.t

    if scheme is Scheme.EXPLICIT_RK4:
        a1, lap_u0 = _acceleration_full(grid, u0, v0, p, kind, t0)
        k1u, k1v = v0, a1
        k2u = v0 + 0.5 * dt * k1v
        k2v = acceleration_values(grid, u0 + 0.5 * dt * k1u, k2u, p, kind, t0)
        k3u = v0 + 0.5 * dt * k2v
        k3v = acceleration_values(grid, u0 + 0.5 * dt * k2u, k3u, p, kind, t0)
        k4u = v0 + dt * k3v
        k4v = acceleration_values(grid, u0 + dt * k3u, k4u, p, kind, t0)
        u1 = u0 + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v1 = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        acc_start = a1
    elif scheme is Scheme.IMEX:
        acc_start, lap_u0, n1 = _nonlinear_remainder(grid, u0, v0, p, kind, t0)
        e00, e01, e10, e11 = _linear_propagator(grid, dt, p.c, p.nu * p.eps)
        u_hat = np.fft.rfftn(u0)
        v_hat = np.fft.rfftn(v0)
        n1_hat = np.fft.rfftn(n1)
        up_hat = e00 * u_hat + e01 * (v_hat + dt * n1_hat)
        vp_hat = e10 * u_hat + e11 * (v_hat + dt * n1_hat)
        up = np.fft.irfftn(up_hat, s=grid.shape, axes=tuple(range(grid.n)))
        vp = np.fft.irfftn(vp_hat, s=grid.shape, axes=tuple(range(grid.n)))
        n2 = _nonlinear_remainder(grid, up, vp, p, kind, t0 + dt)[2]
        n2_hat = np.fft.rfftn(n2)
        half = 0.5 * dt
        u1_hat = e00 * u_hat + e01 * (v_hat + half * n1_hat)
        v1_hat = e10 * u_hat + e11 * (v_hat + half * n1_hat) + half * n2_hat
        u1 = np.fft.irfftn(u1_hat, s=grid.shape, axes=tuple(range(grid.n)))
        v1 = np.fft.irfftn(v1_hat, s=grid.shape, axes=tuple(range(grid.n)))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(v1))):
        raise StepRejected(f"non-finite fields after step from t = {t0:.6g}")

    # End-of-step acceleration both validates the accepted state and closes
    # the trapezoid rule for the two running integrals.
    acc_end, lap_u1 = _acceleration_full(grid, u1, v1, p, kind, t0 + dt)
    fnu_start = _fnu_integrand(grid, u0, acc_start, beta_eff, p.eps)
    fnu_end = _fnu_integrand(grid, u1, acc_end, beta_eff, p.eps)
    div_start = _div_integrand(acc_start, lap_u0)
    div_end = _div_integrand(acc_end, lap_u1)
    return SimState(
        u=Field(grid, u1),
        v=Field(grid, v1),
        t=t0 + dt,
        fnu_accum=state.fnu_accum + 0.5 * dt * (fnu_start + fnu_end),
        div_accum=state.div_accum + 0.5 * dt * (div_start + div_end),
    )


def spectral_tail_fraction(state: SimState, p: PhysicalParams) -> float:
    """Fraction of gradient-energy density in the top third of the resolved band.

    The monitored density is |k|^2 (c^2 |k|^2 |u_hat|^2 + |v_hat|^2), the
    wave-energy density of the differentiated pair (Lap u, grad u_t), with
    Hermitian multiplicities. Dealiasing confines the evolved state to
    |j_i| <= N_i/3, so under-resolution manifests as this density piling up
    against the band edge: for smooth states the outer-third fraction sits
    near roundoff, while a front reaching the grid scale sends it to O(0.1).
    Values above ~0.01 flag spectral under-resolution of the breakdown
    quantities.
    """
    grid = state.grid
    u_hat = np.fft.rfftn(state.u.values)
    v_hat = np.fft.rfftn(state.v.values)
    density = grid.hermitian_weight * grid.k_squared * (
        p.c**2 * grid.k_squared * np.abs(u_hat) ** 2 + np.abs(v_hat) ** 2
    )
    total = float(np.sum(density[grid.dealias_mask]))
    if total <= 0.0:
        return 0.0
    tail = float(np.sum(density[grid.resolved_tail_mask]))
    return tail / total


def support_radius(state: SimState, rel_tol: float = 1e-8) -> float:
    """Largest per-axis distance from the box center where (u, v) is active.

    A grid point is active when |u| or |v| exceeds rel_tol times the
    respective maximum; the radius is the max-norm distance so that values
    approach min(L_i)/2 as the support reaches the periodic wrap-around.
    """
    grid = state.grid
    active = np.zeros(grid.shape, dtype=bool)
    for values in (state.u.values, state.v.values):
        peak = float(np.max(np.abs(values)))
        if peak > 0.0:
            active |= np.abs(values) > rel_tol * peak
    if not active.any():
        return 0.0
    radius = 0.0
    for axis in range(grid.n):
        x = grid.coordinate_mesh(axis)
        center = 0.0 if grid.origin_centered else grid.lengths[axis] / 2.0
        dist = np.abs(x - center)
        radius = max(radius, float(np.max(dist[active])))
    return radius


@dataclass(frozen=True)
class LinearForcedResult:
    """Both sides of the linear maximal-regularity inequality along a run.

    lhs(t) = (1/2)(||grad u_t||^2 + c^2 ||Lap u||^2)
             + (nu*eps/2) int_0^t ||Lap u_tau||^2,
    rhs(t) = (1/2)||grad u_1||^2 + (1/2)||Lap u_0||^2
             + 1/(2 nu*eps) int_0^t ||f||^2.
    """

    times: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    final: SimState

    @property
    def margins(self) -> tuple[float, ...]:
        """Relative slack (rhs - lhs)/rhs per reported time (1.0 where both 0)."""
        return tuple(
            (r - l) / r if r > 0.0 else (1.0 if l <= 0.0 else -math.inf)
            for l, r in zip(self.lhs, self.rhs)
        )

    @property
    def worst_margin(self) -> float:
        return min(self.margins)


def solve_linear_forced(
    u0: Field,
    u1: Field,
    f: Callable[[float], Field],
    horizon: float,
    p: PhysicalParams,
    dt: float | None = None,
    report_every: int = 10,
    tol: float = 0.01,
) -> LinearForcedResult:
    """Integrate u_tt - c^2 Lap u - nu*eps Lap u_t = f and check the inequality.

    The source f is time-sampled: a callable returning the Field f(t).  The
    linear flow uses the exact per-mode propagator; the forcing enters by the
    exponential trapezoidal rule (the integrating-factor Heun update, which
    needs no predictor because the source does not depend on the state).
    Asserts lhs <= rhs * (1 + tol) at every reported time.  The right-hand
    side is taken as written, with a bare (1/2)||Lap u_0||^2 term, so the
    inequality is calibrated for unit sound speed c <= 1.

    Raises
    ------
    ValueError
        If nu == 0 (the inequality needs dissipation) or horizon <= 0.
    AssertionError
        If the inequality fails beyond the tolerance at a reported time.
    """
    if p.nu <= 0.0:
        raise ValueError("solve_linear_forced requires nu > 0")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    grid = u0.grid
    if u1.grid != grid:
        raise ValueError("u0 and u1 must share one grid")
    if dt is None:
        dt = cfl_dt(grid, p.c)
    steps = max(1, math.ceil(horizon / dt - 1e-12))
    dt = horizon / steps
    nu_eps = p.nu * p.eps
    e00, e01, e10, e11 = _linear_propagator(grid, dt, p.c, nu_eps)
    cell = grid.cell_volume

    def l2_sq(values: FloatArray) -> float:
        return cell * float(np.sum(values**2))

    def lhs_now(u_arr: FloatArray, v_arr: FloatArray, diss: float) -> float:
        grad_v = gradient_values(grid, v_arr)
        grad_sq = sum(l2_sq(g) for g in grad_v)
        lap_sq = l2_sq(laplacian_values(grid, u_arr))
        return 0.5 * (grad_sq + p.c**2 * lap_sq) + 0.5 * nu_eps * diss

    u = np.array(u0.values)
    v = np.array(u1.values)
    diss_int = 0.0
    force_int = 0.0
    lap_sq_prev = l2_sq(laplacian_values(grid, u))
    f_prev = f(0.0)
    f_sq_prev = l2_sq(f_prev.values)
    rhs0 = 0.5 * sum(l2_sq(g) for g in gradient_values(grid, u1.values)) + 0.5 * lap_sq_prev

    times = [0.0]
    lhs_series = [lhs_now(u, v, 0.0)]
    rhs_series = [rhs0]

    u_hat = np.fft.rfftn(u)
    v_hat = np.fft.rfftn(v)
    half = 0.5 * dt
    for i in range(steps):
        t_next = (i + 1) * dt
        f1_hat = np.fft.rfftn(f_prev.values)
        f_next = f(t_next)
        f2_hat = np.fft.rfftn(f_next.values)
        base_v = v_hat + half * f1_hat
        u_hat, v_hat = (
            e00 * u_hat + e01 * base_v,
            e10 * u_hat + e11 * base_v + half * f2_hat,
        )
        u = np.fft.irfftn(u_hat, s=grid.shape, axes=tuple(range(grid.n)))
        v = np.fft.irfftn(v_hat, s=grid.shape, axes=tuple(range(grid.n)))
        lap_sq_now = l2_sq(laplacian_values(grid, u))
        f_sq_now = l2_sq(f_next.values)
        diss_int += half * (lap_sq_prev + lap_sq_now)
        force_int += half * (f_sq_prev + f_sq_now)
        lap_sq_prev, f_sq_prev, f_prev = lap_sq_now, f_sq_now, f_next
        if (i + 1) % report_every == 0 or i == steps - 1:
            times.append(t_next)
            lhs_series.append(lhs_now(u, v, diss_int))
            rhs_series.append(rhs0 + force_int / (2.0 * nu_eps))

    for t_i, lhs_i, rhs_i in zip(times, lhs_series, rhs_series):
        if lhs_i > rhs_i * (1.0 + tol) + 1e-300:
            raise AssertionError(
                f"maximal-regularity inequality violated at t = {t_i:.6g}: "
                f"lhs {lhs_i:.12e} > rhs {rhs_i:.12e} * (1 + {tol})"
            )
    final = SimState(u=Field(grid, u), v=Field(grid, v), t=horizon)
    return LinearForcedResult(tuple(times), tuple(lhs_series), tuple(rhs_series), final)
