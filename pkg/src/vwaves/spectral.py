"""Periodic spectral core: Fourier fields, projections, dealiased products.

Conventions used throughout the package:

* functions live on the periodic interval [0, L), sampled at the N uniform
  nodes alpha_m = m L / N;
* a field is stored by its Fourier coefficients c[k] for integer wavenumbers
  k = -N/2, ..., N/2 - 1 (ascending order), with
      f(alpha) = sum_k c[k] exp(2 pi i k alpha / L);
* the physical wavenumber of mode k is xi = 2 pi k / L;
* "holomorphic" means the coefficients vanish for k > 0, i.e. the function
  extends holomorphically to the lower half plane;
* the Hilbert transform acts as (Hf)^(k) = -i sgn(k) f^(k), H(const) = 0;
* the holomorphic projection P = (I - iH)/2 keeps k < 0, halves k = 0 and
  kills k > 0, so that P + Pbar = I exactly;
* nonlinear operations are evaluated pointwise on a grid refined by an
  integer padding factor (default 2) and truncated back, which dealiases
  quadratic expressions of fields supported on |k| <= N/2;
* after differentiation the unpaired k = -N/2 mode is zeroed.

Fields are immutable; all operations return new fields.
"""

from dataclasses import dataclass

import numpy as np

TRUNC_TOL = 1e-12       # relative tolerance attributed to truncation effects
CUSP_FLOOR = 1e-8       # smallest allowed modulus of 1 + f in reciprocals
MEAN_TOL_FACTOR = 1e-12  # |f^(0)| <= factor * ||f|| required by antiderivative


class SpectralError(ValueError):
    """Base class for errors raised by the spectral core."""


class DomainMismatchError(SpectralError):
    """Two fields from different domains were combined."""


class MeanNotZeroError(SpectralError):
    """Antiderivative of a field whose mean is not negligible."""

    def __init__(self, mean_abs, tol):
        self.mean_abs = float(mean_abs)
        self.tol = float(tol)
        super().__init__(
            f"field has |zero mode| = {self.mean_abs:.3e} > {self.tol:.3e}; "
            "antiderivative is only defined for mean-zero fields"
        )


class CuspError(SpectralError):
    """1 + f came within cusp_floor of zero on the evaluation grid."""

    def __init__(self, min_modulus, location):
        self.min_modulus = float(min_modulus)
        self.location = float(location)
        super().__init__(
            f"min |1 + f| = {self.min_modulus:.3e} at alpha = {self.location:.6f}"
        )


@dataclass(frozen=True)
class Domain:
    """Periodic interval [0, L) discretized with N modes (N even, >= 8)."""

    L: float = 2.0 * np.pi
    N: int = 64

    def __post_init__(self):
        if not (self.L > 0.0):
            raise SpectralError(f"domain length must be positive, got {self.L}")
        if self.N < 8 or self.N % 2 != 0:
            raise SpectralError(f"N must be even and >= 8, got {self.N}")

    @property
    def k_int(self):
        return np.arange(-self.N // 2, self.N // 2)

    @property
    def k_phys(self):
        return 2.0 * np.pi * self.k_int / self.L

    def nodes(self, pad=1):
        M = pad * self.N
        return self.L * np.arange(M) / M

    def k_max_phys(self):
        # largest resolved physical wavenumber, pi N / L
        return np.pi * self.N / self.L


class SpectralField:
    """Immutable complex field identified by Fourier coefficients.

    Arithmetic: + and - combine fields on the same domain (or add a constant
    into the zero mode); * by a scalar scales, * by a field is the dealiased
    product; / by a scalar scales.
    """

    __slots__ = ("domain", "coeffs")

    def __init__(self, domain, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (domain.N,):
            raise SpectralError(
                f"expected {domain.N} coefficients, got shape {coeffs.shape}"
            )
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("SpectralField is immutable")

    # -- construction -----------------------------------------------------

    @staticmethod
    def zero(domain):
        return SpectralField(domain, np.zeros(domain.N, dtype=np.complex128))

    @staticmethod
    def from_modes(domain, modes):
        """Field from {k: amplitude}; f = sum amp * exp(2 pi i k alpha / L)."""
        c = np.zeros(domain.N, dtype=np.complex128)
        half = domain.N // 2
        for k, amp in modes.items():
            k = int(k)
            if not (-half <= k < half):
                raise SpectralError(f"mode {k} outside resolved range")
            c[k + half] = amp
        return SpectralField(domain, c)

    # -- basic accessors ---------------------------------------------------

    def coeff(self, k):
        """Coefficient of integer wavenumber k (0 outside the stored range)."""
        half = self.domain.N // 2
        if -half <= k < half:
            return complex(self.coeffs[k + half])
        return 0.0j

    def values(self, pad=1):
        """Samples on the pad-refined uniform grid (pad*N points)."""
        N, M = self.domain.N, pad * self.domain.N
        full = np.zeros(M, dtype=np.complex128)
        full[M // 2 - N // 2 : M // 2 + N // 2] = self.coeffs
        return np.fft.ifft(np.fft.ifftshift(full)) * M

    # -- algebra -----------------------------------------------------------

    def _check(self, other):
        if self.domain is not other.domain and self.domain != other.domain:
            raise DomainMismatchError("fields live on different domains")

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.domain, self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[self.domain.N // 2] += other
        return SpectralField(self.domain, c)

    __radd__ = __add__

    def __neg__(self):
        return SpectralField(self.domain, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, SpectralField) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SpectralField):
            return product(self, other)
        return SpectralField(self.domain, self.coeffs * other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        return SpectralField(self.domain, self.coeffs / other)

    def conj(self):
        """Complex conjugate field; coefficients map k -> -k conjugated."""
        c = np.zeros_like(self.coeffs)
        # k and -k swap; the unpaired k = -N/2 entry has no partner and is dropped
        c[1:] = np.conj(self.coeffs[1:][::-1])
        return SpectralField(self.domain, c)

    def re(self):
        return 0.5 * (self + self.conj())

    def im(self):
        return (self - self.conj()) * (-0.5j)

    # -- norms ------------------------------------------------------------

    def norm_l2(self):
        """L2 norm, ||f||^2 = L sum |c_k|^2 (Parseval)."""
        return float(np.sqrt(self.domain.L * np.sum(np.abs(self.coeffs) ** 2)))

    def norm_hhalf(self):
        """Homogeneous H^{1/2} seminorm, L sum |xi_k| |c_k|^2."""
        return float(
            np.sqrt(self.domain.L * np.sum(np.abs(self.domain.k_phys) * np.abs(self.coeffs) ** 2))
        )

    def norm_sup(self, pad=2):
        return float(np.max(np.abs(self.values(pad))))

    def __repr__(self):
        return f"SpectralField(N={self.domain.N}, L={self.domain.L:.6g}, |f|={self.norm_l2():.3e})"


@dataclass(frozen=True)
class HolomorphyReport:
    """Size of the positive-frequency content of a field."""

    defect: float
    relative_defect: float


# -- transforms -------------------------------------------------------------


def forward_transform(domain, samples):
    """Field from N uniform samples on [0, L)."""
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.shape != (domain.N,):
        raise SpectralError(
            f"expected {domain.N} samples, got shape {samples.shape}"
        )
    return SpectralField(domain, np.fft.fftshift(np.fft.fft(samples)) / domain.N)


def truncate_to(domain, padded_values):
    """Field from samples on a pad-refined grid, keeping the central N modes."""
    vals = np.asarray(padded_values, dtype=np.complex128)
    M = vals.shape[0]
    N = domain.N
    if M % N != 0:
        raise SpectralError(f"padded grid size {M} is not a multiple of N={N}")
    full = np.fft.fftshift(np.fft.fft(vals)) / M
    return SpectralField(domain, full[M // 2 - N // 2 : M // 2 + N // 2])


# -- linear operators --------------------------------------------------------


def hilbert(f):
    """Periodic Hilbert transform, (Hf)^(k) = -i sgn(k) f^(k)."""
    return SpectralField(f.domain, -1j * np.sign(f.domain.k_int) * f.coeffs)


def project_P(f):
    """Holomorphic projection: keep k < 0, halve k = 0, kill k > 0."""
    w = np.where(f.domain.k_int < 0, 1.0, np.where(f.domain.k_int == 0, 0.5, 0.0))
    return SpectralField(f.domain, w * f.coeffs)


def project_Pbar(f):
    """Antiholomorphic projection, Pbar = I - P."""
    w = np.where(f.domain.k_int > 0, 1.0, np.where(f.domain.k_int == 0, 0.5, 0.0))
    return SpectralField(f.domain, w * f.coeffs)


def derivative(f, order=1):
    """d/d alpha (applied `order` times); zeroes the unpaired k = -N/2 mode."""
    c = (1j * f.domain.k_phys) ** order * f.coeffs
    c[0] = 0.0
    return SpectralField(f.domain, c)


def half_derivative(f):
    """|D|^{1/2}: multiplier |xi|^{1/2}; zeroes the unpaired k = -N/2 mode."""
    c = np.sqrt(np.abs(f.domain.k_phys)) * f.coeffs
    c[0] = 0.0
    return SpectralField(f.domain, c)


def antiderivative(f):
    """Mean-zero primitive of a mean-zero field.

    Raises MeanNotZeroError when |f^(0)| exceeds MEAN_TOL_FACTOR * ||f||.
    """
    tol = MEAN_TOL_FACTOR * f.norm_l2()
    m = abs(f.coeff(0))
    if m > tol:
        raise MeanNotZeroError(m, tol)
    kp = f.domain.k_phys
    c = np.zeros_like(f.coeffs)
    nz = kp != 0.0
    c[nz] = f.coeffs[nz] / (1j * kp[nz])
    return SpectralField(f.domain, c)


# -- nonlinear operations ----------------------------------------------------


def product(f, g, pad=2):
    """Dealiased pointwise product, computed on the pad-refined grid."""
    f._check(g)
    return truncate_to(f.domain, f.values(pad) * g.values(pad))


def reciprocal_one_plus(f, pad=2, cusp_floor=CUSP_FLOOR):
    """1 / (1 + f) as a field, requiring min |1 + f| > cusp_floor on the grid."""
    vals = 1.0 + f.values(pad)
    mods = np.abs(vals)
    i = int(np.argmin(mods))
    if mods[i] <= cusp_floor:
        raise CuspError(mods[i], f.domain.nodes(pad)[i])
    return truncate_to(f.domain, 1.0 / vals)


def holomorphy_report(f):
    """Positive-frequency coefficient mass, absolute and relative."""
    pos = f.domain.k_int > 0
    defect = float(np.sqrt(np.sum(np.abs(f.coeffs[pos]) ** 2)))
    total = float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))
    return HolomorphyReport(defect, defect / max(total, 1e-300))


# -- quadrature --------------------------------------------------------------


def integral(f):
    """Integral over one period, L * f^(0)."""
    return f.domain.L * f.coeff(0)


def inner(f, g):
    """L2 pairing integral f conj(g) d alpha = L sum f^(k) conj(g^(k))."""
    f._check(g)
    return f.domain.L * complex(np.sum(f.coeffs * np.conj(g.coeffs)))


def grid_integral(domain, values):
    """Integral of grid samples over one period (trapezoid = exact spectrally)."""
    values = np.asarray(values)
    return domain.L * values.mean(axis=-1)
