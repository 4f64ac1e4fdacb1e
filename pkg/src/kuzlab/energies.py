"""Energy functionals, envelopes, thresholds, and coefficient recursions.

Everything here is a pure evaluation on states or jets:

* quadratic energies E, E_nonl and the accumulated functional F_nu;
* Sobolev towers E_m, E_{m/2}, S_{m/2} built from jet layers;
* Klainerman energies E_{1,m}, E_{inf,m} and the decay ratio;
* the densities I[v], J[v] whose time identity underwrites the a priori
  estimates;
* the Gronwall envelope z(t), the lifespan floor T_0, the smallness
  thresholds of the inviscid and viscous theories, and the coefficient
  recursion a_k controlling the initial-data cascade.

Abstract constants of the estimates (C_m, C_m0, C_inf, ...) are never
derived; they enter through EnvelopeParams with documented defaults of 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .dynamics import (
    ModelKind,
    PhysicalParams,
    SimState,
    effective_coefficients,
    hyperbolicity_factor,
    support_radius,
)
from .fields import Field, Grid, gradient_values, laplacian_values, sobolev_norm_values
from .gamma import apply_gamma, gamma_words
from .jets import Jet, MultiIndex, apply_multi_derivative, build_jet


def _l2_sq(grid: Grid, values) -> float:
    return grid.cell_volume * float(np.sum(values**2))


def energy_wave(state: SimState, p: PhysicalParams) -> float:
    """E(t) = int (u_t)^2 + c^2 (grad u)^2, the linear wave energy."""
    grid = state.grid
    grad_sq = sum(_l2_sq(grid, g) for g in gradient_values(grid, state.u.values))
    return _l2_sq(grid, state.v.values) + p.c**2 * grad_sq


def nonlinear_energy_alpha(p: PhysicalParams, kind: ModelKind) -> float:
    """Coefficient of the cubic correction in E_nonl: 2/3 of the equation's.

    Only with the factor 2/3 is E_nonl exactly conserved for nu = 0; the
    equation coefficient itself multiplies u_t u_tt.
    """
    alpha_eff, _, _ = effective_coefficients(p, kind)
    return 2.0 / 3.0 * alpha_eff


def energy_nonl(
    state: SimState, p: PhysicalParams, kind: ModelKind = ModelKind.KUZNETSOV
) -> float:
    """E_nonl(t) = int (1 - alpha_E eps u_t) u_t^2 + c^2 (grad u)^2.

    Conserved for nu = 0, nonincreasing for nu > 0, and sandwiched between
    E/2 and 3E/2 while ||u_t||_inf <= 1/(2 alpha_E eps).
    """
    grid = state.grid
    alpha_e = nonlinear_energy_alpha(p, kind)
    v = state.v.values
    vt_term = _l2_sq(grid, v) - alpha_e * p.eps * grid.cell_volume * float(np.sum(v**3))
    grad_sq = sum(_l2_sq(grid, g) for g in gradient_values(grid, state.u.values))
    return vt_term + p.c**2 * grad_sq


def f_nu(state: SimState, p: PhysicalParams, kind: ModelKind = ModelKind.KUZNETSOV) -> float:
    """F_nu(t), constant for nu = 0 and strictly decreasing for nu > 0.

    F_nu = int (1 - alpha_E eps u_t) u_t^2 + (c^2 - beta eps u_t)(grad u)^2
    plus the running integral beta*eps int_0^t int u_tt |grad u|^2 carried by
    the state.
    """
    grid = state.grid
    alpha_e = nonlinear_energy_alpha(p, kind)
    _, beta_eff, _ = effective_coefficients(p, kind)
    v = state.v.values
    vt_term = _l2_sq(grid, v) - alpha_e * p.eps * grid.cell_volume * float(np.sum(v**3))
    grad_u = gradient_values(grid, state.u.values)
    grad_sq = grad_u[0] ** 2
    for i in range(1, grid.n):
        grad_sq = grad_sq + grad_u[i] ** 2
    grad_term = grid.cell_volume * float(np.sum((p.c**2 - beta_eff * p.eps * v) * grad_sq))
    return vt_term + grad_term + state.fnu_accum


def energy_m(jet: Jet, m: int) -> float:
    """E_m = ||grad u||_{H^m}^2 + sum_{i=1}^{m+1} ||d_t^i u||_{H^{m+1-i}}^2."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if jet.order < m + 1:
        raise ValueError(f"E_{m} needs jet order {m + 1}, jet has {jet.order}")
    grid = jet.grid
    total = sum(
        sobolev_norm_values(grid, g, float(m)) ** 2
        for g in gradient_values(grid, jet.layers[0].values)
    )
    for i in range(1, m + 2):
        total += sobolev_norm_values(grid, jet.layers[i].values, float(m + 1 - i)) ** 2
    return total


def energy_half_m(jet: Jet, m: int) -> float:
    """E_{m/2} = ||grad u||_{H^m}^2 + sum_{i=1}^{m/2+1} ||d_t^i u||_{H^{m-2(i-1)}}^2."""
    if m < 0 or m % 2 != 0:
        raise ValueError("m must be even and nonnegative")
    if jet.order < m // 2 + 1:
        raise ValueError(f"E_{{m/2}} at m = {m} needs jet order {m // 2 + 1}")
    grid = jet.grid
    total = sum(
        sobolev_norm_values(grid, g, float(m)) ** 2
        for g in gradient_values(grid, jet.layers[0].values)
    )
    for i in range(1, m // 2 + 2):
        total += sobolev_norm_values(grid, jet.layers[i].values, float(m - 2 * (i - 1))) ** 2
    return total


def s_half_m(jet: Jet, m: int) -> float:
    """S_{m/2} = sum_{i=1}^{m/2+1} ||grad d_t^i u||_{H^{m-2(i-1)}}^2."""
    if m < 0 or m % 2 != 0:
        raise ValueError("m must be even and nonnegative")
    if jet.order < m // 2 + 1:
        raise ValueError(f"S_{{m/2}} at m = {m} needs jet order {m // 2 + 1}")
    grid = jet.grid
    total = 0.0
    for i in range(1, m // 2 + 2):
        for g in gradient_values(grid, jet.layers[i].values):
            total += sobolev_norm_values(grid, g, float(m - 2 * (i - 1))) ** 2
    return total


def _klainerman_pass(jet: Jet, t: float, m_sum: int, m_sup: int) -> tuple[float, float]:
    """One sweep over words of length <= m_sum.

    Returns E_{1,m_sum} and E_{inf,m_sup}, the sup restricted to words of
    length <= m_sup; m_sup <= m_sum.  Mixed-derivative evaluations are
    memoized per shifted jet.
    """
    grid = jet.grid
    e_1 = 0.0
    density_sup = np.zeros(grid.shape)
    jet_t = jet.shift_time(1)
    jets_x = [jet.shift_space(axis) for axis in range(grid.n)]
    memo_t: dict[tuple[int, ...], np.ndarray] = {}
    memos_x: list[dict[tuple[int, ...], np.ndarray]] = [{} for _ in range(grid.n)]
    for word in gamma_words(grid.n, m_sum):
        gt = apply_gamma(jet_t, t, word, memo_t)
        density = gt.values**2
        for jx, memo in zip(jets_x, memos_x):
            gx = apply_gamma(jx, t, word, memo)
            density = density + gx.values**2
        e_1 += grid.cell_volume * float(np.sum(density))
        if len(word.word) <= m_sup:
            np.maximum(density_sup, density, out=density_sup)
    return e_1, float(np.max(density_sup))


def klainerman_energies(jet: Jet, t: float, m: int) -> tuple[float, float]:
    """(E_{1,m}, E_{inf,m}) summed over all words of length <= m.

    E_{1,m} sums ||Gamma^A u_t||^2 + ||Gamma^A grad u||^2; E_{inf,m} takes
    the grid sup of the pointwise sup over words of the same density.
    """
    if m < 0 or m > 2:
        raise ValueError("klainerman energies support m = 0, 1, 2")
    return _klainerman_pass(jet, t, m, m)


def klainerman_ratio(jet: Jet, t: float, m: int, n_star: int | None = None) -> float:
    """sqrt(E_{inf,m}) / [(1+t)^{(1-n)/2} sqrt(E_{1,m+n*})], n* = [n/2 + 1].

    Returns 0 for identically zero fields; raises on the ill-posed case of a
    vanishing right side with a nonvanishing left side.
    """
    n = jet.grid.n
    if n_star is None:
        n_star = n // 2 + 1
    if m + n_star > 2:
        raise ValueError(
            f"ratio at m = {m}, n* = {n_star} needs words of length {m + n_star} > 2"
        )
    e_1, e_inf = _klainerman_pass(jet, t, m + n_star, m)
    weight = (1.0 + t) ** ((1 - n) / 2.0)
    if e_1 <= 0.0:
        if e_inf <= 0.0:
            return 0.0
        raise ZeroDivisionError("E_{1,m+n*} vanished while E_{inf,m} did not")
    return math.sqrt(e_inf) / (weight * math.sqrt(e_1))


@dataclass(frozen=True)
class AppendixDensities:
    """Integrated densities for v = D^A u and the matching dissipation rate."""

    i_int: float
    j_int: float
    dissipation: float


def appendix_densities(
    jet: Jet,
    A: MultiIndex,
    p: PhysicalParams,
    kind: ModelKind = ModelKind.KUZNETSOV,
) -> AppendixDensities:
    """int I[D^A u], int J[D^A u], and 2 nu eps ||grad D^A u_t||^2.

    I[v] = v_t^2 + c^2 (grad v)^2 - alpha eps u_t v_t^2 and
    J[v] = 2 L_u v v_t - [alpha eps u_tt + beta eps Lap u] v_t^2 with
    L_u v = v_tt - c^2 Lap v - nu eps Lap v_t - alpha eps u_t v_tt
            - beta eps grad u . grad v_t,
    so that d/dt int I + dissipation = int J along exact solutions.
    """
    grid = jet.grid
    alpha_eff, beta_eff, nu_eff = effective_coefficients(p, kind)
    if jet.order < A.time_order + 2:
        raise ValueError(
            f"densities for A_0 = {A.time_order} need jet order {A.time_order + 2}"
        )
    v_f = apply_multi_derivative(jet, A)
    orders = A.orders
    vt_f = apply_multi_derivative(jet, MultiIndex((orders[0] + 1,) + orders[1:]))
    vtt_f = apply_multi_derivative(jet, MultiIndex((orders[0] + 2,) + orders[1:]))
    v, vt, vtt = v_f.values, vt_f.values, vtt_f.values
    u_t = jet.layers[1].values
    u_tt = jet.layers[2].values

    grad_v = gradient_values(grid, v)
    grad_vsq = sum(_l2_sq(grid, g) for g in grad_v)
    i_int = (
        _l2_sq(grid, vt)
        + p.c**2 * grad_vsq
        - alpha_eff * p.eps * grid.cell_volume * float(np.sum(u_t * vt**2))
    )

    lu_v = vtt - p.c**2 * laplacian_values(grid, v) - alpha_eff * p.eps * u_t * vtt
    grad_vt = gradient_values(grid, vt)
    if beta_eff != 0.0:
        grad_u = gradient_values(grid, jet.layers[0].values)
        coupling = grad_u[0] * grad_vt[0]
        for i in range(1, grid.n):
            coupling = coupling + grad_u[i] * grad_vt[i]
        lu_v = lu_v - beta_eff * p.eps * coupling
    if nu_eff > 0.0:
        lu_v = lu_v - nu_eff * p.eps * laplacian_values(grid, vt)

    lap_u = laplacian_values(grid, jet.layers[0].values)
    bracket = alpha_eff * p.eps * u_tt + beta_eff * p.eps * lap_u
    j_int = grid.cell_volume * float(np.sum(2.0 * lu_v * vt - bracket * vt**2))

    dissipation = 2.0 * nu_eff * p.eps * sum(_l2_sq(grid, g) for g in grad_vt)
    return AppendixDensities(i_int=i_int, j_int=j_int, dissipation=dissipation)


def proposition_b(c: float) -> float:
    """The closed-form constant B = (3 + 2c^2)/min(1/2, c^2)."""
    return (3.0 + 2.0 * c**2) / min(0.5, c**2)


@dataclass(frozen=True)
class EnvelopeParams:
    """Abstract constants of the a priori estimates, all configurable.

    B = None resolves to the closed form (3 + 2c^2)/min(1/2, c^2) at the
    sound speed in use.  c0 and c_embed feed the fixed-point radius r_* and
    gain w(r); the others scale the Gronwall, stability, and decay bounds.
    """

    B: float | None = None
    C_m: float = 1.0
    C_m0: float = 1.0
    D_m: float = 1.0
    C_inf: float = 1.0
    C1_stab: float = 1.0
    C2_stab: float = 1.0
    C_n_klainerman: float = 1.0
    c0: float = 1.0
    c_embed: float = 1.0

    def __post_init__(self) -> None:
        for name in (
            "C_m", "C_m0", "D_m", "C_inf", "C1_stab", "C2_stab",
            "C_n_klainerman", "c0", "c_embed",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.B is not None and self.B <= 0:
            raise ValueError("B must be positive when given")

    def resolve_b(self, p: PhysicalParams) -> float:
        return self.B if self.B is not None else proposition_b(p.c)


def gronwall_envelope(z0: float, C: float, p: PhysicalParams, t: float) -> float:
    """z(t) = z0 / (1 - (1/2) sqrt(z0) C max(alpha, beta) eps t)^2.

    The closed-form majorant of the cubic Gronwall comparison problem;
    raises once t reaches the envelope pole.
    """
    if z0 < 0:
        raise ValueError("z0 must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if z0 == 0.0:
        return 0.0
    denom = 1.0 - 0.5 * math.sqrt(z0) * C * max(p.alpha, p.beta) * p.eps * t
    if denom <= 0.0:
        raise ValueError(f"envelope pole reached at or before t = {t:.6g}")
    return z0 / denom**2


def lifespan_T0(E0: float, p: PhysicalParams, env: EnvelopeParams) -> float:
    """T_0 = 1 / (C_m0 max(alpha, beta) eps sqrt(B) E0), the lifespan floor."""
    if E0 <= 0.0:
        return math.inf
    b = env.resolve_b(p)
    return 1.0 / (env.C_m0 * max(p.alpha, p.beta) * p.eps * math.sqrt(b) * E0)


@dataclass(frozen=True)
class ThresholdRecord:
    """Closed-form smallness thresholds; zero viscosity zeroes the viscous ones.

    sqrt_e_m0_max bounds sqrt(E_{m0}(0)) for the inviscid envelope theory;
    sqrt_e_half_max bounds sqrt(E_{m/2}(0)) for the viscous decay theorem;
    e_theorem_max bounds the multi-index energy E(0); r_star is the
    fixed-point radius whose gain function is w(r).
    """

    b: float
    sqrt_e_m0_max: float
    sqrt_e_half_max: float
    e_theorem_max: float
    r_star: float
    _w_coeff: float = dataclass_field(repr=False, default=0.0)

    def w(self, r: float) -> float:
        """Gain w(r) = r - 2 (C_0/nu) C_embed (alpha + beta) r^2 (0 if nu = 0)."""
        return r - self._w_coeff * r**2


def thresholds(p: PhysicalParams, env: EnvelopeParams) -> ThresholdRecord:
    """Evaluate every closed-form smallness threshold for the given constants."""
    b = env.resolve_b(p)
    sqrt_e_m0_max = 1.0 / (4.0 * math.sqrt(b) * env.C_inf * p.alpha * p.eps)
    max_ab = max(p.alpha, p.beta)
    sqrt_e_half_max = math.sqrt(2.0) * p.nu / (math.sqrt(1.5 + p.c**2) * env.C_m * max_ab)
    e_theorem_max = 2.0 * (p.nu / (env.C_m * max_ab)) ** 2
    r_star = p.nu / (4.0 * env.c0 * (p.alpha + p.beta) * env.c_embed)
    w_coeff = (
        2.0 * (env.c0 / p.nu) * env.c_embed * (p.alpha + p.beta) if p.nu > 0.0 else 0.0
    )
    return ThresholdRecord(
        b=b,
        sqrt_e_m0_max=sqrt_e_m0_max,
        sqrt_e_half_max=sqrt_e_half_max,
        e_theorem_max=e_theorem_max,
        r_star=r_star,
        _w_coeff=w_coeff,
    )


def theorem_45_energy(
    jet: Jet, m: int, p: PhysicalParams, kind: ModelKind = ModelKind.KUZNETSOV
) -> float:
    """Multi-index energy E(t) = sum_{A in V} int (1-alpha eps u_t)(D^A u_t)^2
    + c^2 (grad D^A u)^2 over V = {A : |A| - A_0 <= m - 2 A_0}."""
    if m < 0 or m % 2 != 0:
        raise ValueError("m must be even and nonnegative")
    if jet.order < m // 2 + 1:
        raise ValueError(f"theorem energy at m = {m} needs jet order {m // 2 + 1}")
    grid = jet.grid
    alpha_eff, _, _ = effective_coefficients(p, kind)
    weight = 1.0 - alpha_eff * p.eps * jet.layers[1].values
    total = 0.0
    for A in _theorem_45_index_set(m, grid.n):
        da_u = apply_multi_derivative(jet, A)
        orders = A.orders
        da_ut = apply_multi_derivative(jet, MultiIndex((orders[0] + 1,) + orders[1:]))
        grad_sq = sum(_l2_sq(grid, g) for g in gradient_values(grid, da_u.values))
        total += (
            grid.cell_volume * float(np.sum(weight * da_ut.values**2))
            + p.c**2 * grad_sq
        )
    return total


def _theorem_45_index_set(m: int, n: int) -> list[MultiIndex]:
    """All A = (A_0, A_1..A_n) with |A| - A_0 <= m - 2 A_0 (and A_0 <= m/2)."""
    out: list[MultiIndex] = []
    for a0 in range(m // 2 + 1):
        budget = m - 2 * a0
        for spatial in _spatial_indices(n, budget):
            out.append(MultiIndex((a0, *spatial)))
    return out


def _spatial_indices(n: int, budget: int) -> list[tuple[int, ...]]:
    if n == 1:
        return [(a,) for a in range(budget + 1)]
    out = []
    for a in range(budget + 1):
        for rest in _spatial_indices(n - 1, budget - a):
            out.append((a, *rest))
    return out


def appendix_b_coefficients(K: int, c: float) -> list[float]:
    """a_0 = 1, a_1 = 2c^2 + 2, a_{k+1} = a_k + 2c^2 a_{k-1} + 2 sum_{i<=k} a_i + 1."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    c2 = c**2
    coeffs = [1.0]
    if K >= 1:
        coeffs.append(2.0 * c2 + 2.0)
    running_sum = sum(coeffs)
    for k in range(1, K):
        nxt = coeffs[k] + 2.0 * c2 * coeffs[k - 1] + 2.0 * running_sum + 1.0
        coeffs.append(nxt)
        running_sum += nxt
    return coeffs


@dataclass(frozen=True)
class InitialDataBoundReport:
    """Per-k margins of ||d_t^k u_t(0)||_{H^{m-2k}} <= a_k (||grad u0||_{H^m} + ||u1||_{H^m})."""

    m: int
    rhs_base: float
    lhs: tuple[float, ...]
    bounds: tuple[float, ...]

    @property
    def margins(self) -> tuple[float, ...]:
        return tuple(b - l for l, b in zip(self.lhs, self.bounds))

    @property
    def all_hold(self) -> bool:
        return all(m >= 0.0 for m in self.margins)


def initial_data_bound_check(
    u0: Field,
    u1: Field,
    p: PhysicalParams,
    m: int,
    kind: ModelKind = ModelKind.KUZNETSOV,
) -> InitialDataBoundReport:
    """Check the cascade bounds at t = 0 for k = 0..m/2.

    Precondition: ||1/(1 - alpha eps u_1)||_inf <= 2, i.e. the factor stays
    at or above 1/2; violating data is rejected.
    """
    if m < 0 or m % 2 != 0:
        raise ValueError("m must be even and nonnegative")
    alpha_eff, _, _ = effective_coefficients(p, kind)
    factor_min = float(np.min(1.0 - alpha_eff * p.eps * u1.values))
    if factor_min < 0.5:
        raise ValueError(
            f"initial data too large: min(1 - alpha eps u1) = {factor_min:.6g} < 1/2"
        )
    state = SimState(u=u0, v=u1)
    jet = build_jet(state, p, m // 2 + 1, kind)
    grid = u0.grid
    rhs_base = math.sqrt(
        sum(sobolev_norm_values(grid, g, float(m)) ** 2
            for g in gradient_values(grid, u0.values))
    ) + sobolev_norm_values(grid, u1.values, float(m))
    coeffs = appendix_b_coefficients(m // 2, p.c)
    lhs = []
    bounds = []
    for k in range(m // 2 + 1):
        lhs.append(
            sobolev_norm_values(grid, jet.layers[k + 1].values, float(m - 2 * k))
        )
        bounds.append(coeffs[k] * rhs_base)
    return InitialDataBoundReport(
        m=m, rhs_base=rhs_base, lhs=tuple(lhs), bounds=tuple(bounds)
    )


@dataclass(frozen=True)
class EnergyReport:
    """One timestamped row of every enabled functional.

    Disabled entries are NaN so that serialized rows keep one fixed column
    set per run configuration.
    """

    t: float
    e_wave: float
    e_nonl: float
    f_nu: float
    e_m: tuple[tuple[int, float], ...] = ()
    e_half_m: float = math.nan
    s_half_m: float = math.nan
    e_1m: float = math.nan
    e_inf_m: float = math.nan
    min_hyp: float = math.nan
    div_accum: float = math.nan
    support_radius: float = math.nan

    def e_m_value(self, m: int) -> float:
        for order, value in self.e_m:
            if order == m:
                return value
        raise KeyError(f"E_m order {m} not present in report")


def make_report(
    state: SimState,
    p: PhysicalParams,
    kind: ModelKind = ModelKind.KUZNETSOV,
    e_m_orders: tuple[int, ...] = (),
    half_m: int | None = None,
    klainerman_m: int | None = None,
    jet: Jet | None = None,
) -> EnergyReport:
    """Evaluate the enabled functionals on one state, building a jet if needed."""
    needed = 0
    if e_m_orders:
        needed = max(needed, max(e_m_orders) + 1)
    if half_m is not None:
        needed = max(needed, half_m // 2 + 1)
    if klainerman_m is not None:
        needed = max(needed, klainerman_m + 1)
    if jet is None and needed > 0:
        jet = build_jet(state, p, needed, kind)

    e_m_rows: list[tuple[int, float]] = []
    for order in e_m_orders:
        e_m_rows.append((order, energy_m(jet, order)))
    e_half = s_half = math.nan
    if half_m is not None:
        e_half = energy_half_m(jet, half_m)
        s_half = s_half_m(jet, half_m)
    e_1m = e_inf_m = math.nan
    if klainerman_m is not None:
        e_1m, e_inf_m = klainerman_energies(jet, state.t, klainerman_m)
    _, min_hyp = hyperbolicity_factor(state.v, p, kind)
    return EnergyReport(
        t=state.t,
        e_wave=energy_wave(state, p),
        e_nonl=energy_nonl(state, p, kind),
        f_nu=f_nu(state, p, kind),
        e_m=tuple(e_m_rows),
        e_half_m=e_half,
        s_half_m=s_half,
        e_1m=e_1m,
        e_inf_m=e_inf_m,
        min_hyp=min_hyp,
        div_accum=state.div_accum,
        support_radius=support_radius(state),
    )
