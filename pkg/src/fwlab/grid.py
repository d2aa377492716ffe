"""Spatial domains, sampled grid functions, norms, quadrature, differentiation.

Everything downstream operates on cell-centered samples: a ``GridFn`` holds
``n`` values at ``x_i = a + (i + 1/2) h``.  The torus has period 1 by
convention; line domains are truncation windows on which fields are treated
as zero outside ``[a, b]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Domain",
    "GridFn",
    "ScalarSeries",
    "torus",
    "line",
    "sample",
    "norm",
    "derivative",
    "second_difference",
    "PROFILES",
    "write_snapshot_csv",
    "read_snapshot_csv",
]


@dataclass(frozen=True)
class Domain:
    """Periodic unit torus or a truncated line window ``[a, b]``."""

    kind: str  # "torus" | "line"
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("torus", "line"):
            raise ValueError(f"unknown domain kind: {self.kind!r}")
        if self.kind == "torus" and not (self.a == 0.0 and self.b == 1.0):
            raise ValueError("torus domain has fixed period 1 on [0, 1]")
        if not self.b > self.a:
            raise ValueError("line domain requires a < b")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def periodic(self) -> bool:
        return self.kind == "torus"

    def cell_centers(self, n: int) -> np.ndarray:
        h = self.length / n
        return self.a + (np.arange(n) + 0.5) * h


def torus() -> Domain:
    return Domain("torus", 0.0, 1.0)


def line(a: float = -20.0, b: float = 20.0) -> Domain:
    return Domain("line", float(a), float(b))


@dataclass(frozen=True)
class GridFn:
    """Immutable real-valued function sampled at cell centers."""

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 4:
            raise ValueError("GridFn needs a 1-d array with n >= 4")
        if not np.all(np.isfinite(vals)):
            raise ValueError("GridFn values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return self.domain.length / self.n

    @property
    def x(self) -> np.ndarray:
        return self.domain.cell_centers(self.n)

    def compatible(self, other: "GridFn") -> bool:
        return self.domain == other.domain and self.n == other.n

    def with_values(self, values: np.ndarray) -> "GridFn":
        return GridFn(self.domain, values)

    def __add__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.domain, self.values + other.values)
        return GridFn(self.domain, self.values + other)

    def __sub__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.domain, self.values - other.values)
        return GridFn(self.domain, self.values - other)

    def __mul__(self, alpha):
        if isinstance(alpha, GridFn):
            self._check(alpha)
            return GridFn(self.domain, self.values * alpha.values)
        return GridFn(self.domain, self.values * alpha)

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return GridFn(self.domain, self.values / alpha)

    def _check(self, other: "GridFn"):
        if not self.compatible(other):
            raise ValueError("incompatible grids: domain and n must match")


@dataclass
class ScalarSeries:
    """Time-stamped scalar diagnostic, times strictly increasing."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size


# ---------------------------------------------------------------------------
# analytic profiles

def _profile_zero(x):
    return np.zeros_like(x)


def _profile_constant(x, value=1.0):
    return np.full_like(x, float(value))


def _profile_sine(x, amplitude=0.2, offset=0.5, wavenumber=1):
    return offset + amplitude * np.sin(2.0 * np.pi * wavenumber * x)


def _profile_peakon(x, center=0.0):
    # traveling-wave crest 4/3 with a Lipschitz corner at the center
    return (4.0 / 3.0) * np.exp(-np.abs(x - center) / 2.0)


def _profile_gaussian(x, amplitude=1.0, width=1.0, center=0.0):
    z = (x - center) / width
    return amplitude * np.exp(-z * z)


def _profile_gaussian_derivative(x, beta=2.0, center=0.0):
    z = x - center
    return -beta * z * np.exp(-z * z / 2.0)


def _profile_step(x, left=1.0, right=-1.0, center=0.0, width=0.0):
    if width > 0.0:
        s = 1.0 / (1.0 + np.exp(-(x - center) / width))  # 0 -> 1 ramp
        return left + (right - left) * s
    return np.where(x < center, float(left), float(right))


def _profile_bump(x, amplitude=1.0, center=0.0, radius=1.0):
    z = (x - center) / radius
    out = np.zeros_like(x)
    m = np.abs(z) < 1.0
    out[m] = amplitude * np.exp(-1.0 / (1.0 - z[m] ** 2))
    return out


def _profile_kernel(x):
    return np.exp(-np.abs(x)) / 2.0


PROFILES = {
    "zero": _profile_zero,
    "constant": _profile_constant,
    "sine": _profile_sine,
    "peakon": _profile_peakon,
    "gaussian": _profile_gaussian,
    "gaussian_derivative": _profile_gaussian_derivative,
    "step": _profile_step,
    "bump": _profile_bump,
    "kernel": _profile_kernel,
}


def sample(profile: str, domain: Domain, n: int, **params) -> GridFn:
    """Sample a named closed-form profile at the cell centers.

    Raises ``ValueError`` for unknown names, non-finite parameters, or n < 4.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    try:
        fn = PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}; "
                         f"choices: {sorted(PROFILES)}") from None
    for key, val in params.items():
        if not math.isfinite(float(val)):
            raise ValueError(f"profile parameter {key}={val!r} is not finite")
    x = domain.cell_centers(n)
    return GridFn(domain, fn(x, **params))


# ---------------------------------------------------------------------------
# norms and quadrature (midpoint rule, weight h per cell)

def norm(g: GridFn, which: str) -> float:
    v = g.values
    h = g.h
    if which == "L1":
        return float(h * np.abs(v).sum())
    if which == "L2":
        return float(np.sqrt(h * (v * v).sum()))
    if which == "Linf":
        return float(np.abs(v).max())
    if which == "TV":
        d = np.abs(np.diff(v))
        if g.domain.periodic:
            return float(d.sum() + abs(v[0] - v[-1]))
        return float(d.sum())
    raise ValueError(f"unknown norm {which!r}; choices: L1, L2, Linf, TV")


def integrate(g: GridFn) -> float:
    """Midpoint quadrature of g over its domain."""
    return float(g.h * g.values.sum())


# ---------------------------------------------------------------------------
# differentiation

def _spectral_dx(values: np.ndarray) -> np.ndarray:
    n = values.size
    vh = np.fft.rfft(values)
    k = np.fft.rfftfreq(n, d=1.0 / n)
    vh *= 2j * np.pi * k
    if n % 2 == 0:
        vh[-1] = 0.0  # derivative of the unpaired Nyquist mode
    return np.fft.irfft(vh, n)


def _central_dx(values: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2.0 * h)
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    d[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)
    return d


def derivative(g: GridFn) -> GridFn:
    """Discrete d/dx: Fourier multiplier on the torus, second-order central
    differences (one-sided at the ends) on the line."""
    if g.domain.periodic:
        return g.with_values(_spectral_dx(g.values))
    return g.with_values(_central_dx(g.values, g.h))


def second_difference(values: np.ndarray, h: float, periodic: bool) -> np.ndarray:
    """Three-point second derivative; zero ghost cells on the line."""
    out = np.empty_like(values)
    if periodic:
        out[:] = np.roll(values, -1) - 2.0 * values + np.roll(values, 1)
    else:
        out[1:-1] = values[2:] - 2.0 * values[1:-1] + values[:-2]
        out[0] = values[1] - 2.0 * values[0]
        out[-1] = values[-2] - 2.0 * values[-1]
    return out / (h * h)


# ---------------------------------------------------------------------------
# snapshot CSV interface: header "x,u", >= 15 significant digits

def write_snapshot_csv(g: GridFn, path) -> None:
    with open(path, "w") as fh:
        fh.write("x,u\n")
        for xi, ui in zip(g.x, g.values):
            fh.write(f"{xi:.17g},{ui:.17g}\n")


def read_snapshot_csv(path, domain: Domain) -> GridFn:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return GridFn(domain, data[:, 1])
