"""Sampled fields on the periodic n-torus (n = 1 or 2).

A :class:`Field` holds complex samples of a function on a uniform grid,
each sample being a vector in a finite-dimensional sequence space
(:class:`BanachSpec`).  :class:`Spectrum` holds its Fourier coefficients.
Everything here is immutable; operations return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError

TWO_PI = 2.0 * np.pi

__all__ = [
    "GridSpec",
    "BanachSpec",
    "Field",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "e0_project",
    "single_mode_field",
    "field_from_coefficients",
    "random_band_limited_field",
    "resample",
    "frequency_band",
    "write_field_csv",
    "read_field_csv",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: x_j = j * period / n per axis.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    n : int
        Points per axis; a power of two, at least 8.
    period : float
        Side length of the torus (default 2*pi).
    """

    dim: int
    n: int
    period: float = TWO_PI

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.period > 0):
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def cell_volume(self) -> float:
        return (self.period / self.n) ** self.dim

    def axis(self) -> np.ndarray:
        """Grid coordinates along one axis."""
        return np.arange(self.n) * self.spacing

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.axis()] * self.dim), indexing="ij")


@lru_cache(maxsize=32)
def _frequency_arrays(dim: int, n: int, period: float) -> tuple[np.ndarray, ...]:
    """Angular frequencies 2*pi*k/period per axis in numpy fft order."""
    xi1 = TWO_PI * np.fft.fftfreq(n, d=period / n)
    if dim == 1:
        out = (xi1,)
    else:
        out = tuple(np.meshgrid(xi1, xi1, indexing="ij"))
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _abs_frequencies(dim: int, n: int, period: float) -> np.ndarray:
    arrays = _frequency_arrays(dim, n, period)
    out = np.sqrt(sum(a**2 for a in arrays))
    out.setflags(write=False)
    return out


def abs_frequencies(grid: GridSpec) -> np.ndarray:
    """Euclidean magnitude |xi_k| on the fft-ordered frequency grid."""
    return _abs_frequencies(grid.dim, grid.n, grid.period)


@dataclass(frozen=True)
class BanachSpec:
    """Value space of a field: scalars or the sequence space l^r_m.

    ``kind`` is "scalar" or "sequence".  For sequences, ``m`` is the
    dimension and ``r`` in [1, inf] the norm exponent; the norm of v is
    (sum_j |v_j|^r)^(1/r), max_j |v_j| for r = inf.
    """

    kind: str = "scalar"
    m: int = 1
    r: float = 2.0

    def __post_init__(self) -> None:
        if self.kind not in ("scalar", "sequence"):
            raise ValueError(f"kind must be 'scalar' or 'sequence', got {self.kind!r}")
        if self.kind == "scalar" and self.m != 1:
            raise ValueError("scalar value space must have m == 1")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not (self.r >= 1):
            raise ValueError(f"r must be in [1, inf], got {self.r}")

    @staticmethod
    def scalar() -> "BanachSpec":
        return BanachSpec()

    @staticmethod
    def sequence(m: int, r: float) -> "BanachSpec":
        return BanachSpec(kind="sequence", m=m, r=r)

    def norm(self, values: np.ndarray) -> np.ndarray:
        """Pointwise value-space norm, reducing the trailing axis."""
        a = np.abs(values)
        if self.m == 1:
            return a[..., 0]
        if np.isinf(self.r):
            return a.max(axis=-1)
        if self.r == 2.0:
            return np.sqrt((a**2).sum(axis=-1))
        if self.r == 1.0:
            return a.sum(axis=-1)
        return ((a**self.r).sum(axis=-1)) ** (1.0 / self.r)


def _check_values(grid: GridSpec, banach: BanachSpec, values: np.ndarray) -> np.ndarray:
    expected = grid.shape + (banach.m,)
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != expected:
        raise ValueError(f"values shape {values.shape} does not match {expected}")
    if not np.all(np.isfinite(values.view(np.float64))):
        raise ValueError("values contain NaN or Inf")
    values = values.copy()
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class Field:
    """Complex samples on the grid, shape grid.shape + (m,). Immutable."""

    grid: GridSpec
    banach: BanachSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _check_values(self.grid, self.banach, self.values))

    @property
    def grid_axes(self) -> tuple[int, ...]:
        return tuple(range(self.grid.dim))

    def pointwise_norm(self) -> np.ndarray:
        """Real array of value-space norms at every grid point."""
        return self.banach.norm(self.values)

    def __add__(self, other: "Field") -> "Field":
        self._require_compatible(other)
        return Field(self.grid, self.banach, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._require_compatible(other)
        return Field(self.grid, self.banach, self.values - other.values)

    def __mul__(self, c: complex) -> "Field":
        return Field(self.grid, self.banach, self.values * c)

    __rmul__ = __mul__

    def _require_compatible(self, other: "Field") -> None:
        if self.grid != other.grid or self.banach != other.banach:
            raise ValueError("fields live on different grids or value spaces")


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients of a Field, indexed in numpy fft order.

    The coefficient at integer index k corresponds to frequency
    xi_k = 2*pi*k/period with k in {-n/2, ..., n/2 - 1} per axis.
    """

    grid: GridSpec
    banach: BanachSpec
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coefficients", _check_values(self.grid, self.banach, self.coefficients)
        )

    def abs_frequencies(self) -> np.ndarray:
        return abs_frequencies(self.grid)


def forward_transform(f: Field) -> Spectrum:
    """Fourier coefficients f_hat(k) = n^(-dim) * sum_j f(x_j) e^{-i<xi_k, x_j>}."""
    coeff = np.fft.fftn(f.values, axes=f.grid_axes) / f.grid.n**f.grid.dim
    return Spectrum(f.grid, f.banach, coeff)


def inverse_transform(s: Spectrum) -> Field:
    """Exact inverse of :func:`forward_transform`."""
    axes = tuple(range(s.grid.dim))
    values = np.fft.ifftn(s.coefficients, axes=axes) * s.grid.n**s.grid.dim
    return Field(s.grid, s.banach, values)


def lp_norm(f: Field, p: float) -> float:
    """Lebesgue norm ((period/n)^dim * sum_j ||f(x_j)||^p)^(1/p); sup for p = inf."""
    if not (p >= 1):
        raise ValueError(f"p must be in [1, inf], got {p}")
    pointwise = f.pointwise_norm()
    if np.isinf(p):
        return float(pointwise.max())
    return float((f.grid.cell_volume * (pointwise**p).sum()) ** (1.0 / p))


def e0_project(f: Field) -> Field:
    """Projection onto the fixed-point space of the Poisson semigroup: the mean."""
    mean = f.values.mean(axis=f.grid_axes)
    values = np.broadcast_to(mean, f.values.shape)
    return Field(f.grid, f.banach, values)


# ---------------------------------------------------------------------------
# synthesis helpers


def single_mode_field(
    grid: GridSpec,
    k,
    banach: BanachSpec | None = None,
    coord: int = 0,
    amplitude: complex = 1.0,
) -> Field:
    """Field amplitude * e^{i<xi_k, x>} in one value-space coordinate.

    ``k`` is an integer (1-d) or pair of integers (2-d) below the Nyquist
    limit n/2 in absolute value.
    """
    banach = banach or BanachSpec.scalar()
    ks = np.atleast_1d(np.asarray(k, dtype=int))
    if ks.shape != (grid.dim,):
        raise ValueError(f"k must have {grid.dim} component(s)")
    if np.any(np.abs(ks) > grid.n // 2 - 1):
        raise ValueError(f"mode {k} exceeds the Nyquist limit for n={grid.n}")
    if not (0 <= coord < banach.m):
        raise ValueError(f"coord {coord} out of range for m={banach.m}")
    xs = grid.meshgrid()
    phase = sum((TWO_PI * kk / grid.period) * x for kk, x in zip(ks, xs))
    values = np.zeros(grid.shape + (banach.m,), dtype=np.complex128)
    values[..., coord] = amplitude * np.exp(1j * phase)
    return Field(grid, banach, values)


def field_from_coefficients(grid: GridSpec, banach: BanachSpec, modes: dict) -> Field:
    """Build a field from a {k: coefficient vector} mapping (k integer or tuple)."""
    coeff = np.zeros(grid.shape + (banach.m,), dtype=np.complex128)
    for k, c in modes.items():
        idx = (k,) if np.isscalar(k) else tuple(int(kk) for kk in k)
        if len(idx) != grid.dim:
            raise ValueError(f"mode key {k} has wrong dimension")
        coeff[idx] = np.asarray(c, dtype=np.complex128)
    return inverse_transform(Spectrum(grid, banach, coeff))


def random_band_limited_field(
    grid: GridSpec,
    banach: BanachSpec,
    rng: np.random.Generator,
    k_min: int = 1,
    k_max: int = 8,
    real: bool = False,
) -> Field:
    """Random field whose spectrum lives on k_min <= |k| <= k_max.

    Coefficients are standard complex Gaussians; with ``real=True`` they are
    made Hermitian so the field is real-valued.
    """
    if k_max >= grid.n // 2:
        raise ValueError("k_max must stay below the Nyquist limit n/2")
    if not (1 <= k_min <= k_max):
        raise ValueError("need 1 <= k_min <= k_max")
    ints = np.fft.fftfreq(grid.n, d=1.0 / grid.n)
    if grid.dim == 1:
        kabs = np.abs(ints)
    else:
        kx, ky = np.meshgrid(ints, ints, indexing="ij")
        kabs = np.sqrt(kx**2 + ky**2)
    mask = (kabs >= k_min - 1e-9) & (kabs <= k_max + 1e-9)
    shape = grid.shape + (banach.m,)
    coeff = np.zeros(shape, dtype=np.complex128)
    coeff[mask, :] = rng.standard_normal((int(mask.sum()), banach.m)) + 1j * rng.standard_normal(
        (int(mask.sum()), banach.m)
    )
    if real:
        # Hermitian symmetrization: c(k) = conj(c(-k)).
        flip = tuple(slice(None, None, -1) for _ in range(grid.dim))
        rolled = np.roll(
            coeff[flip + (slice(None),)], shift=(1,) * grid.dim, axis=tuple(range(grid.dim))
        )
        coeff = 0.5 * (coeff + np.conj(rolled))
    return inverse_transform(Spectrum(grid, banach, coeff))


def frequency_band(f: Field, rel_threshold: float = 1e-13) -> tuple[float, float]:
    """Smallest and largest nonzero |xi| carrying spectral mass.

    Returns (xi_min, xi_max).  Raises ValueError for fields with no nonzero
    frequency content (constants and the zero field).
    """
    s = forward_transform(f)
    mag = np.abs(s.coefficients).max(axis=-1)
    xi = s.abs_frequencies()
    active = (mag > rel_threshold * max(mag.max(), 1e-300)) & (xi > 0)
    if not active.any():
        raise ValueError("field has no nonzero-frequency content")
    return float(xi[active].min()), float(xi[active].max())


def resample(f: Field, new_grid: GridSpec) -> Field:
    """Re-sample a band-limited field on a finer grid of the same period."""
    if new_grid.dim != f.grid.dim or new_grid.period != f.grid.period:
        raise ValueError("resample requires matching dim and period")
    if new_grid.n < f.grid.n:
        raise ValueError("resample only refines; new n must be >= old n")
    old = forward_transform(f).coefficients
    coeff = np.zeros(new_grid.shape + (f.banach.m,), dtype=np.complex128)
    half = f.grid.n // 2
    if f.grid.dim == 1:
        coeff[:half] = old[:half]
        coeff[-half:] = old[-half:]
    else:
        sl = (slice(None, half), slice(-half, None))
        for a in sl:
            for b in sl:
                coeff[a, b] = old[a, b]
    return inverse_transform(Spectrum(new_grid, f.banach, coeff))


# ---------------------------------------------------------------------------
# CSV serialization

_FMT = "{:.17g}"


def _field_header(dim: int, m: int) -> str:
    cols = ["x"] if dim == 1 else ["x", "y"]
    for j in range(m):
        cols += [f"re_{j}", f"im_{j}"]
    return ",".join(cols)


def write_field_csv(f: Field, path) -> None:
    """Write samples as CSV: coordinates then re/im per value coordinate.

    Rows follow row-major grid order; floats carry 17 significant digits.
    """
    xs = grid_coordinates(f.grid)
    flat = f.values.reshape(-1, f.banach.m)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(_field_header(f.grid.dim, f.banach.m) + "\n")
        for i in range(flat.shape[0]):
            parts = [_FMT.format(c) for c in xs[i]]
            for j in range(f.banach.m):
                parts.append(_FMT.format(flat[i, j].real))
                parts.append(_FMT.format(flat[i, j].imag))
            fh.write(",".join(parts) + "\n")


def grid_coordinates(grid: GridSpec) -> np.ndarray:
    """Row-major list of grid-point coordinates, shape (n^dim, dim)."""
    mesh = grid.meshgrid()
    return np.stack([m.ravel() for m in mesh], axis=-1)


def read_field_csv(path, banach: BanachSpec | None = None, period: float = TWO_PI) -> Field:
    """Parse a field CSV back into a :class:`Field`.

    The grid is reconstructed from the row count (and must be a supported
    shape); the value space defaults to l^2_m over the columns found.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header:
            raise InputError(f"{path}: empty file")
        cols = header.split(",")
        dim = 2 if cols[:2] == ["x", "y"] else 1
        value_cols = len(cols) - dim
        if value_cols <= 0 or value_cols % 2 != 0:
            raise InputError(f"{path}: malformed header {header!r}")
        m = value_cols // 2
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise InputError(f"{path}: line {lineno}: expected {len(cols)} fields, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from None
    count = len(rows)
    n = round(count ** (1.0 / dim))
    if n**dim != count or not _is_power_of_two(n) or n < 8:
        raise InputError(f"{path}: row count {count} is not a supported {dim}-d grid")
    grid = GridSpec(dim=dim, n=n, period=period)
    data = np.asarray(rows)
    values = data[:, dim::2] + 1j * data[:, dim + 1 :: 2]
    if banach is None:
        banach = BanachSpec.scalar() if m == 1 else BanachSpec.sequence(m, 2.0)
    if banach.m != m:
        raise InputError(f"{path}: file has m={m} value coordinates, expected {banach.m}")
    return Field(grid, banach, values.reshape(grid.shape + (m,)))
