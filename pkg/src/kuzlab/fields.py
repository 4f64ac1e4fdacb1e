"""Periodic grids, real scalar fields, and discrete Fourier spectral calculus.

The spatial domain is a periodic box (R/L_1 Z) x ... x (R/L_n Z), n <= 3,
sampled on a uniform tensor grid with power-of-two point counts.  All
differential operators are exact spectral multipliers on the discrete Fourier
coefficients; Sobolev norms use the multiplier (1 + |k|^2)^(s/2) with the box
measure weight so that discrete and continuum norms agree on trigonometric
polynomials.

Functions
---------
spatial_derivative, laplacian, gradient
    Spectral differentiation (odd orders zero the Nyquist mode).
sobolev_norm, l2_norm, linf_norm, l2_inner
    Norms and pairings with box-measure weighting.
dealias
    2/3-rule truncation for quadratic nonlinearities.
mean_zero_project, poincare_check
    The mean-zero periodic class and its Poincare inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt

from .errors import NonFiniteFieldError

FloatArray = npt.NDArray[np.float64]

MAX_SOBOLEV_ORDER = 12.0
MAX_DERIVATIVE_ORDER = 4


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic box in n <= 3 dimensions.

    Parameters
    ----------
    lengths : tuple of float
        Per-axis box lengths L_i > 0.
    points : tuple of int
        Per-axis sample counts N_i; powers of two, N_i >= 8.
    origin_centered : bool
        If True, coordinates run over [-L_i/2, L_i/2); otherwise [0, L_i).
        Centered coordinates are required by the coordinate-weighted vector
        fields.
    """

    lengths: tuple[float, ...]
    points: tuple[int, ...]
    origin_centered: bool = False

    def __post_init__(self) -> None:
        if not 1 <= len(self.lengths) <= 3:
            raise ValueError(f"dimension must be 1..3, got {len(self.lengths)}")
        if len(self.points) != len(self.lengths):
            raise ValueError("lengths and points must have equal arity")
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        object.__setattr__(self, "points", tuple(int(N) for N in self.points))
        for L in self.lengths:
            if not (math.isfinite(L) and L > 0):
                raise ValueError(f"box length must be positive and finite, got {L}")
        for N in self.points:
            if N < 8 or not _is_power_of_two(N):
                raise ValueError(f"point count must be a power of two >= 8, got {N}")

    @classmethod
    def cube(
        cls, n: int, points: int, length: float = 2.0 * math.pi, origin_centered: bool = False
    ) -> Grid:
        """Isotropic box with identical length and resolution per axis."""
        return cls((length,) * n, (points,) * n, origin_centered)

    @property
    def n(self) -> int:
        """Spatial dimension."""
        return len(self.lengths)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        """Shape of the real-to-complex transform coefficient array."""
        return self.points[:-1] + (self.points[-1] // 2 + 1,)

    @property
    def total_points(self) -> int:
        return int(np.prod(self.points))

    @property
    def box_volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def cell_volume(self) -> float:
        return self.box_volume / self.total_points

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(L / N for L, N in zip(self.lengths, self.points))

    def axis_coordinates(self, axis: int) -> FloatArray:
        """Sample coordinates along one axis (1-D array of length N_axis)."""
        L, N = self.lengths[axis], self.points[axis]
        x = np.arange(N, dtype=np.float64) * (L / N)
        if self.origin_centered:
            x -= L / 2.0
        return x

    def coordinate_mesh(self, axis: int) -> FloatArray:
        """Coordinate x_axis broadcast over the full grid shape."""
        x = self.axis_coordinates(axis)
        shape = [1] * self.n
        shape[axis] = self.points[axis]
        return np.broadcast_to(x.reshape(shape), self.shape)

    def mode_indices(self, axis: int) -> npt.NDArray[np.int64]:
        """Integer mode indices j along one axis in the transform layout.

        Full axes use the signed fftfreq ordering; the last axis uses the
        half-spectrum ordering 0..N/2 of the real transform.
        """
        N = self.points[axis]
        if axis == self.n - 1:
            return np.arange(N // 2 + 1, dtype=np.int64)
        return (np.fft.fftfreq(N) * N).astype(np.int64)

    def wavenumbers(self, axis: int) -> FloatArray:
        """Physical wavenumbers 2*pi*j/L_axis in the transform layout."""
        return 2.0 * math.pi / self.lengths[axis] * self.mode_indices(axis).astype(np.float64)

    def _spectral_axis_view(self, arr_1d: FloatArray, axis: int) -> FloatArray:
        shape = [1] * self.n
        shape[axis] = arr_1d.shape[0]
        return arr_1d.reshape(shape)

    @cached_property
    def k_squared(self) -> FloatArray:
        """|k|^2 on the transform layout (broadcast to spectral_shape)."""
        total = np.zeros(self.spectral_shape, dtype=np.float64)
        for axis in range(self.n):
            k = self.wavenumbers(axis)
            total = total + self._spectral_axis_view(k, axis) ** 2
        return total

    @cached_property
    def hermitian_weight(self) -> FloatArray:
        """Multiplicity of each half-spectrum coefficient in the full spectrum.

        The last-axis modes j = 0 and j = N/2 are self-conjugate (weight 1);
        all other last-axis modes stand for a conjugate pair (weight 2).
        """
        N = self.points[-1]
        w = np.full(N // 2 + 1, 2.0)
        w[0] = 1.0
        w[N // 2] = 1.0
        return self._spectral_axis_view(w, self.n - 1)

    @cached_property
    def dealias_mask(self) -> npt.NDArray[np.bool_]:
        """True where all |mode index| <= N_i/3 (the 2/3 rule keeps these)."""
        keep = np.ones(self.spectral_shape, dtype=bool)
        for axis in range(self.n):
            j = np.abs(self.mode_indices(axis)).astype(np.float64)
            keep &= self._spectral_axis_view(j, axis) <= self.points[axis] / 3.0
        return keep

    @cached_property
    def resolved_tail_mask(self) -> npt.NDArray[np.bool_]:
        """Top third of the dealias-resolved band: kept modes past 2N_i/9.

        The evolved state lives inside the dealias band, so under-resolution
        shows up as energy accumulating against that band's outer edge; this
        mask selects the outer third of the band for the tail monitor.
        """
        inner = np.ones(self.spectral_shape, dtype=bool)
        for axis in range(self.n):
            j = np.abs(self.mode_indices(axis)).astype(np.float64)
            inner &= self._spectral_axis_view(j, axis) <= 2.0 * self.points[axis] / 9.0
        return self.dealias_mask & ~inner

    @cached_property
    def nyquist_masks(self) -> tuple[npt.NDArray[np.bool_], ...]:
        """Per-axis mask, True off the axis Nyquist mode j = -N/2 (or +N/2)."""
        masks = []
        for axis in range(self.n):
            j = self.mode_indices(axis)
            off = np.abs(j) != self.points[axis] // 2
            masks.append(self._spectral_axis_view(off, axis))
        return tuple(masks)


@dataclass(frozen=True)
class SobolevOrder:
    """Fractional Sobolev exponent s >= 0, capped at a configured maximum."""

    s: float
    maximum: float = MAX_SOBOLEV_ORDER

    def __post_init__(self) -> None:
        if not (math.isfinite(self.s) and 0.0 <= self.s <= self.maximum):
            raise ValueError(f"Sobolev order must lie in [0, {self.maximum}], got {self.s}")


@dataclass(frozen=True, eq=False)
class Field:
    """Real scalar sampled on a Grid; immutable after construction.

    Identity-based equality: fields wrap large arrays and are compared (and
    hashed, e.g. for evaluation caches) by instance.
    """

    grid: Grid
    values: FloatArray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteFieldError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> Field:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> Field:
        """Sample fn(x_1, ..., x_n) on the grid coordinates."""
        coords = [grid.coordinate_mesh(axis) for axis in range(grid.n)]
        return cls(grid, np.asarray(fn(*coords), dtype=np.float64))


def _check_finite(values: FloatArray) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteFieldError("non-finite input field")


# Array-level kernels.  Public Field operations and the time integrators share
# these so that cross-module consistency is exact, not merely approximate.


def derivative_values(grid: Grid, values: FloatArray, axis: int, order: int) -> FloatArray:
    if not 0 <= axis < grid.n:
        raise IndexError(f"axis {axis} out of range for dimension {grid.n}")
    if not 0 <= order <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order must be 0..{MAX_DERIVATIVE_ORDER}, got {order}")
    if order == 0:
        return np.array(values, dtype=np.float64)
    spec = np.fft.rfftn(values)
    k = grid.wavenumbers(axis)
    mult = (1j * k) ** order
    spec *= grid._spectral_axis_view(mult, axis)
    if order % 2 == 1:
        # The Nyquist mode carries no sign information for odd derivatives.
        spec *= grid.nyquist_masks[axis]
    return np.fft.irfftn(spec, s=grid.shape, axes=tuple(range(grid.n)))


def laplacian_values(grid: Grid, values: FloatArray) -> FloatArray:
    spec = np.fft.rfftn(values)
    spec *= -grid.k_squared
    return np.fft.irfftn(spec, s=grid.shape, axes=tuple(range(grid.n)))


def gradient_values(grid: Grid, values: FloatArray) -> list[FloatArray]:
    spec = np.fft.rfftn(values)
    out = []
    for axis in range(grid.n):
        k = grid.wavenumbers(axis)
        comp = spec * grid._spectral_axis_view(1j * k, axis)
        comp *= grid.nyquist_masks[axis]
        out.append(np.fft.irfftn(comp, s=grid.shape, axes=tuple(range(grid.n))))
    return out


def dealias_values(grid: Grid, values: FloatArray) -> FloatArray:
    spec = np.fft.rfftn(values)
    spec *= grid.dealias_mask
    return np.fft.irfftn(spec, s=grid.shape, axes=tuple(range(grid.n)))


def sobolev_norm_values(grid: Grid, values: FloatArray, s: float) -> float:
    coeffs = np.fft.rfftn(values) / grid.total_points
    density = grid.hermitian_weight * np.abs(coeffs) ** 2
    if s != 0.0:
        density = density * (1.0 + grid.k_squared) ** s
    return math.sqrt(grid.box_volume * float(np.sum(density)))


# Public Field-level operations.


def spatial_derivative(f: Field, axis: int, order: int = 1) -> Field:
    """Exact spectral derivative d^order/dx_axis^order of f.

    Fourier coefficients are multiplied by (i k_axis)^order; for odd orders
    the axis Nyquist mode is zeroed so the result is real.
    """
    _check_finite(f.values)
    return Field(f.grid, derivative_values(f.grid, f.values, axis, order))


def laplacian(f: Field) -> Field:
    """Spectral Laplacian: multiplier -|k|^2."""
    _check_finite(f.values)
    return Field(f.grid, laplacian_values(f.grid, f.values))


def gradient(f: Field) -> list[Field]:
    """All first spatial derivatives of f, one Field per axis."""
    _check_finite(f.values)
    return [Field(f.grid, g) for g in gradient_values(f.grid, f.values)]


def sobolev_norm(f: Field, s: float | SobolevOrder) -> float:
    """Discrete H^s norm with multiplier (1 + |k|^2)^(s/2) and box measure.

    Equals the quadrature L^2 norm at s = 0 (Parseval) and is monotone
    nondecreasing in s.
    """
    order = s if isinstance(s, SobolevOrder) else SobolevOrder(float(s))
    _check_finite(f.values)
    return sobolev_norm_values(f.grid, f.values, order.s)


def l2_inner(f: Field, g: Field) -> float:
    """Box-measure-weighted discrete L^2 inner product."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    _check_finite(f.values)
    _check_finite(g.values)
    return f.grid.cell_volume * float(np.sum(f.values * g.values))


def l2_norm(f: Field) -> float:
    """Quadrature L^2 norm, sqrt(l2_inner(f, f))."""
    _check_finite(f.values)
    return math.sqrt(f.grid.cell_volume * float(np.sum(f.values**2)))


def linf_norm(f: Field) -> float:
    """Grid maximum of |f|."""
    _check_finite(f.values)
    if f.values.size == 0:
        return 0.0
    return float(np.max(np.abs(f.values)))


def dealias(f: Field) -> Field:
    """2/3-rule truncation: zero all modes with any |index| > N_i/3.

    Idempotent and L^2-contractive.
    """
    _check_finite(f.values)
    return Field(f.grid, dealias_values(f.grid, f.values))


def mean_zero_project(f: Field, axis: int = 0) -> Field:
    """Remove the per-line mean along one axis.

    The output integrates to zero along every line in the given periodic
    direction, the class in which the Poincare inequality restores L^2
    control.
    """
    if not 0 <= axis < f.grid.n:
        raise IndexError(f"axis {axis} out of range for dimension {f.grid.n}")
    _check_finite(f.values)
    return Field(f.grid, f.values - f.values.mean(axis=axis, keepdims=True))


def poincare_check(
    f: Field, axis: int = 0, mean_tol: float = 1e-10
) -> tuple[float, float, float]:
    """Evaluate both sides of the Poincare inequality along one axis.

    Returns
    -------
    (lhs, rhs, constant) : tuple of float
        lhs = ||f||_{L^2}, rhs = ||d f/d x_axis||_{L^2}, and the sharp
        periodic constant L_axis/(2 pi); asserts lhs <= constant * rhs.

    Raises
    ------
    ValueError
        If f is not mean-zero along the axis (relative to its amplitude).
    """
    _check_finite(f.values)
    scale = float(np.max(np.abs(f.values), initial=0.0))
    mean = float(np.max(np.abs(f.values.mean(axis=axis))))
    if mean > mean_tol * max(scale, 1.0):
        raise ValueError(
            f"per-line mean {mean:.3e} along axis {axis} exceeds tolerance; "
            "apply mean_zero_project first"
        )
    lhs = l2_norm(f)
    rhs = l2_norm(spatial_derivative(f, axis, 1))
    constant = f.grid.lengths[axis] / (2.0 * math.pi)
    if lhs > constant * rhs * (1.0 + 1e-9) + 1e-300:
        raise AssertionError(
            f"Poincare inequality violated: {lhs:.12e} > {constant:.6g} * {rhs:.12e}"
        )
    return lhs, rhs, constant
