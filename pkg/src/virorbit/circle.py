"""Periodic densities on the circle R/Z sampled on a uniform grid.

Densities are stored through their coefficient function on the grid
x_k = k/N.  Differentiation is spectral, full-period quadrature is the
equal-weight sum, and off-grid values come from the trigonometric interpolant.
"""
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import NotMonotone, WeightMismatch


def grid(n):
    return np.arange(n) / n


def _check_grid_size(n):
    if n < 16 or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= 16, got {n}")


def spectral_derivative(samples, p=1):
    """p-th derivative of the trigonometric interpolant, sampled on the grid."""
    n = len(samples)
    c = np.fft.rfft(samples)
    m = np.arange(len(c))
    c = c * (2j * np.pi * m) ** p
    if p % 2:
        c[-1] = 0.0
    return np.fft.irfft(c, n)


def fourier_coefficients(samples):
    """Coefficients c_m, m = 0..N/2, of p(x) = Re sum w_m c_m exp(2 pi i m x)."""
    n = len(samples)
    c = np.fft.rfft(samples) / n
    c[1:-1] *= 2.0
    return c


def spectral_clean(samples, floor=1e-14):
    """Zero the Fourier modes at roundoff level; high derivatives would amplify them."""
    samples = np.asarray(samples, dtype=float)
    c = np.fft.rfft(samples)
    scale = floor * max(1.0, np.abs(samples).max()) * len(samples)
    c[np.abs(c) < scale] = 0.0
    return np.fft.irfft(c, len(samples))


def interpolant_jet(samples, x, k=0):
    """Taylor jet (order k) of the trigonometric interpolant at arbitrary points x."""
    c = fourier_coefficients(np.asarray(samples, dtype=float))
    x = np.asarray(x, dtype=float)
    m = np.arange(len(c))
    phase = np.exp(2j * np.pi * np.multiply.outer(x, m))
    out = np.empty((k + 1,) + x.shape)
    fact = 1.0
    for p in range(k + 1):
        if p:
            fact *= p
        out[p] = (phase @ (c * (2j * np.pi * m) ** p)).real / fact
    return out


def interpolate(samples, x):
    return interpolant_jet(samples, x, 0)[0]


def resample_samples(samples, n):
    """Trigonometric resampling of a periodic sample array onto n points."""
    samples = np.asarray(samples, dtype=float)
    m = len(samples)
    if n == m:
        return samples.copy()
    c = np.fft.rfft(samples) / m
    out = np.zeros(n // 2 + 1, dtype=complex)
    if n > m:
        out[: m // 2 + 1] = c
        out[m // 2] *= 0.5  # old Nyquist mode becomes an ordinary pair
    else:
        out[:] = c[: n // 2 + 1]
        out[-1] = 2.0 * out[-1].real
    return np.fft.irfft(out * n, n)


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """A periodic density of weight r given by N samples of its coefficient."""
    weight: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        _check_grid_size(len(s))
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def grid_size(self):
        return len(self.samples)

    @classmethod
    def from_function(cls, f, weight, n=256):
        return cls(weight, f(grid(n)))

    @classmethod
    def constant(cls, value, weight, n=256):
        return cls(weight, np.full(n, float(value)))

    def __call__(self, x):
        return interpolate(self.samples, x)

    def jet(self, x, k):
        return interpolant_jet(self.samples, x, k)

    def _match(self, other):
        if not isinstance(other, SampledDensity):
            return self, other
        n = max(self.grid_size, other.grid_size)
        return self.resample(n), other.resample(n)

    def __add__(self, other):
        a, b = self._match(other)
        if not isinstance(b, SampledDensity):
            return SampledDensity(a.weight, a.samples + b)
        if a.weight != b.weight:
            raise WeightMismatch(f"cannot add weights {a.weight} and {b.weight}")
        return SampledDensity(a.weight, a.samples + b.samples)

    def __neg__(self):
        return SampledDensity(self.weight, -self.samples)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        a, b = self._match(other)
        if not isinstance(b, SampledDensity):
            return SampledDensity(a.weight, a.samples * b)
        return SampledDensity(a.weight + b.weight, a.samples * b.samples)

    __rmul__ = __mul__

    def with_weight(self, weight):
        return SampledDensity(weight, self.samples)

    def resample(self, n):
        if n == self.grid_size:
            return self
        _check_grid_size(n)
        return SampledDensity(self.weight, resample_samples(self.samples, n))

    def to_json(self):
        return {"weight": self.weight, "grid_size": self.grid_size,
                "samples": [float(v) for v in self.samples]}

    @classmethod
    def from_json(cls, data, n=None):
        weight = data["weight"]
        if "samples" in data:
            d = cls(weight, data["samples"])
            if "grid_size" in data and data["grid_size"] != d.grid_size:
                raise ValueError("grid_size does not match the sample count")
            return d.resample(n) if n else d
        if "fourier" in data:
            n = n or data.get("grid_size", 256)
            x = grid(n)
            cos = data["fourier"].get("cos", [])
            sin = data["fourier"].get("sin", [])
            vals = np.zeros(n)
            for k, a in enumerate(cos):
                vals += a * np.cos(2 * np.pi * k * x)
            for k, b in enumerate(sin):
                vals += b * np.sin(2 * np.pi * k * x)
            return cls(weight, vals)
        raise ValueError("density JSON needs 'samples' or 'fourier'")


def differentiate(f, p=1):
    """Spectral p-th derivative; the weight goes up by p."""
    return SampledDensity(f.weight + p, spectral_derivative(f.samples, p))


def integrate_period(f):
    if f.weight != 1:
        raise WeightMismatch(f"only 1-densities integrate, got weight {f.weight}")
    return float(np.mean(f.samples))


def antiderivative(samples, x):
    """Exact antiderivative of the trigonometric interpolant, zero at x = 0."""
    c = fourier_coefficients(np.asarray(samples, dtype=float))
    x = np.asarray(x, dtype=float)
    m = np.arange(1, len(c))
    phase = np.exp(2j * np.pi * np.multiply.outer(x, m)) - 1.0
    return c[0].real * x + (phase @ (c[1:] / (2j * np.pi * m))).real


def integrate_arc(f, i0, i1):
    """Integral over the arc from grid index i0 to i1 (on the universal cover).

    Uses the antiderivative of the trigonometric interpolant, so full periods
    reproduce integrate_period and partial arcs stay spectrally accurate.
    """
    if f.weight != 1:
        raise WeightMismatch(f"only 1-densities integrate, got weight {f.weight}")
    n = f.grid_size
    x0, x1 = i0 / n, i1 / n
    return float(antiderivative(f.samples, x1) - antiderivative(f.samples, x0))


@dataclass(frozen=True, eq=False)
class MonotoneGridFunction:
    """Strictly increasing g with g(x+1) = g(x) + increment, sampled at k/N."""
    samples: np.ndarray
    increment: float = 1.0

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        _check_grid_size(len(s))
        steps = np.diff(np.append(s, s[0] + self.increment))
        if not np.all(steps > 0):
            raise NotMonotone(f"minimum forward difference {steps.min():.3e}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        per = spectral_clean(s - self.increment * grid(len(s)))
        per.setflags(write=False)
        object.__setattr__(self, "_periodic", per)

    @property
    def grid_size(self):
        return len(self.samples)

    @property
    def periodic_part(self):
        return self._periodic

    @classmethod
    def from_function(cls, g, n=256, increment=1.0):
        return cls(g(grid(n)), increment)

    @classmethod
    def identity(cls, n=256):
        return cls(grid(n), 1.0)

    def jet(self, x, k=0):
        x = np.asarray(x, dtype=float)
        out = interpolant_jet(self.periodic_part, x, k)
        out[0] += self.increment * x
        if k >= 1:
            out[1] += self.increment
        return out

    def __call__(self, x):
        return self.jet(x, 0)[0]

    def derivative(self, p=1):
        """Samples of the p-th derivative (periodic)."""
        d = spectral_derivative(self.periodic_part, p)
        if p == 1:
            d = d + self.increment
        return d

    def compose(self, other):
        """self after other, as a grid function (increments multiply for seam 1)."""
        if abs(self.increment - 1.0) > 1e-14:
            raise ValueError("composition is defined for seam-1 outer maps")
        return MonotoneGridFunction(self(other.samples), other.increment)

    def inverse(self):
        if abs(self.increment - 1.0) > 1e-14:
            raise ValueError("inverse grid function needs seam increment 1")
        return MonotoneGridFunction(invert_monotone(self, grid(self.grid_size)), 1.0)

    def inverse_jet(self, y, k):
        """Jet of g^{-1} at the points y."""
        x = invert_monotone(self, y)
        j = jets.revert(self.jet(x, k))
        j[0] = x
        return j


def invert_monotone(g, y, tol=1e-13, maxiter=60):
    """Solve g(x) = y for x (vectorized); y may lie outside the base window."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    n = g.grid_size
    s = np.append(g.samples, g.samples[0] + g.increment)
    if not np.all(np.diff(s) > 0):
        raise NotMonotone("grid function is not strictly increasing")
    shift = np.floor((y - s[0]) / g.increment)
    yr = y - shift * g.increment
    idx = np.clip(np.searchsorted(s, yr, side="right") - 1, 0, n - 1)
    lo = idx / n
    hi = (idx + 1) / n
    x = lo + (yr - s[idx]) / (s[idx + 1] - s[idx]) / n
    for _ in range(maxiter):
        j = g.jet(x, 1)
        r = j[0] - yr
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        step = r / j[1]
        xn = x - step
        bad = (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = np.abs(xn - x) < tol
        x = xn
        if np.all(done):
            break
    out = x + shift
    return out[0] if scalar else out
