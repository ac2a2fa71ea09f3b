"""State containers and auxiliary fields for the vorticity water wave system.

The evolution unknowns are the holomorphic pair (W, Q): W parametrizes the
free surface as alpha -> alpha + W(alpha) through a conformal map of the
lower half plane, Q is the trace of the holomorphic velocity potential.
Most of the analysis happens in the differentiated (diagonal) variables

    bW = W_alpha,   R = Q_alpha / (1 + W_alpha),

together with the rational combinations Y = bW/(1+bW) and J = |1+bW|^2.

Underlined quantities (vorticity-corrected combinations like bu = b - i(c/2)b1)
are spelled with a `u` suffix: Fu, bu, au, Mu, Au, Bu.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import (
    CUSP_FLOOR,
    TRUNC_TOL,
    CuspError,
    Domain,
    SpectralError,
    SpectralField,
    antiderivative,
    derivative,
    half_derivative,
    holomorphy_report,
    project_P,
    reciprocal_one_plus,
)


class ConstraintError(SpectralError):
    """A pointwise constraint (no-cusp, Taylor sign, realness...) failed."""

    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(message)


@dataclass(frozen=True)
class Params:
    """Physical and numerical parameters.

    g > 0 is gravity, c >= 0 the (constant) vorticity. The tolerances are
    package-wide defaults that individual calls may override.
    """

    g: float = 1.0
    c: float = 0.0
    domain: Domain = Domain()
    holo_tol: float = 1e-8
    cusp_floor: float = CUSP_FLOOR
    trunc_tol: float = TRUNC_TOL

    def __post_init__(self):
        if not (self.g > 0.0):
            raise SpectralError(f"g must be positive, got {self.g}")
        if self.c < 0.0:
            raise SpectralError(f"c must be nonnegative, got {self.c}")


@dataclass(frozen=True)
class WaveState:
    """Holomorphic pair (W, Q) at time t."""

    W: SpectralField
    Q: SpectralField
    t: float = 0.0

    @staticmethod
    def from_modes(p, W_modes, Q_modes, t=0.0):
        dom = p.domain
        return WaveState(
            SpectralField.from_modes(dom, W_modes),
            SpectralField.from_modes(dom, Q_modes),
            t,
        )


def validate_state(s, p):
    """Check holomorphy of (W, Q) and the no-cusp condition.

    Raises ConstraintError; returns (holo_defect, cusp_margin) on success.
    """
    hw, hq = holomorphy_report(s.W), holomorphy_report(s.Q)
    defect = max(hw.relative_defect, hq.relative_defect)
    if defect > p.holo_tol:
        raise ConstraintError(
            "holomorphy", f"relative holomorphy defect {defect:.3e} > {p.holo_tol:.1e}"
        )
    Wa = derivative(s.W)
    margin = float(np.min(np.abs(1.0 + Wa.values(2))))
    if margin <= p.cusp_floor:
        raise ConstraintError(
            "cusp", f"min |1 + W_alpha| = {margin:.3e} <= cusp_floor {p.cusp_floor:.1e}"
        )
    if not (np.all(np.isfinite(s.W.coeffs)) and np.all(np.isfinite(s.Q.coeffs))):
        raise ConstraintError("nan", "state contains non-finite coefficients")
    return defect, margin


@dataclass(frozen=True)
class DiagonalState:
    """Differentiated variables (bW, R) and the rational fields Y, J.

    The exact identity 1/(1+bW) = 1 - Y is used wherever the reciprocal is
    needed, so only one reciprocal is ever computed.
    """

    Wd: SpectralField
    R: SpectralField
    Y: SpectralField
    J: SpectralField

    @property
    def inv1pW(self):
        return 1.0 - self.Y


def to_diagonal(s, p):
    """Diagonal variables of a wave state; raises CuspError near a cusp."""
    Wd = derivative(s.W)
    recip = reciprocal_one_plus(Wd, cusp_floor=p.cusp_floor)
    R = derivative(s.Q) * recip
    Y = Wd * recip
    J = (1.0 + Wd) * (1.0 + Wd).conj()
    _check_real("J", J, scale=1.0 + Wd.norm_l2() ** 2)
    if float(np.min(J.values(2).real)) <= 0.0:
        raise ConstraintError("cusp", "J = |1 + W_alpha|^2 is not positive on the grid")
    return DiagonalState(Wd, R, Y, J)


def _check_real(name, f, scale=1.0, tol=1e-7):
    # Tolerance sits well above the roundoff that long runs accumulate at the
    # permitted holomorphy budget (1e-8), and far below any genuine
    # conjugation-algebra defect, which scales like a power of the amplitude.
    dev = f.im().norm_sup()
    if dev > tol * (1.0 + scale):
        raise ConstraintError(
            "realness", f"{name} has imaginary part of size {dev:.3e}"
        )


def _reconstruct_W(d, W0=0.0):
    """Primitive of bW; the zero mode is not determined by d and defaults to 0."""
    return antiderivative(d.Wd) + W0


@dataclass(frozen=True)
class AuxiliaryFields:
    """All auxiliary fields entering the equations at a given state."""

    F: SpectralField
    F1: SpectralField
    Fu: SpectralField
    T1: SpectralField
    b: SpectralField
    b1: SpectralField
    bu: SpectralField
    a: SpectralField
    a1: SpectralField
    au: SpectralField
    N: SpectralField
    M: SpectralField
    M1: SpectralField
    Mu: SpectralField


def auxiliary_transport(s, p, d=None):
    """Holomorphic transport fields (F, F1, Fu, T1).

    F  = P[R/(1+bW bar) - R bar/(1+bW)]
    F1 = P[W/(1+bW bar) + W bar/(1+bW)]
    T1 = P[W R bar - W bar R]
    Fu = F - i(c/2) F1
    """
    if d is None:
        d = to_diagonal(s, p)
    W = s.W
    recip = d.inv1pW
    F = project_P(d.R * recip.conj() - d.R.conj() * recip)
    F1 = project_P(W * recip.conj() + W.conj() * recip)
    T1 = project_P(W * d.R.conj() - W.conj() * d.R)
    Fu = F - 0.5j * p.c * F1
    return F, F1, Fu, T1


def transport_coefficients(d, p, W=None):
    """Advection velocities (b, b1, bu); b and bu are real, b1 imaginary.

    b  = P[R/(1+bW bar)] + conjugate
    b1 = P[W/(1+bW bar)] - conjugate
    """
    if W is None:
        W = _reconstruct_W(d)
    recip = d.inv1pW
    h = project_P(d.R * recip.conj())
    b = h + h.conj()
    h1 = project_P(W * recip.conj())
    b1 = h1 - h1.conj()
    bu = b - 0.5j * p.c * b1
    scale = d.R.norm_l2() + W.norm_l2()
    _check_real("b", b, scale)
    _check_real("bu", bu, scale)
    return b, b1, bu


def frequency_shift(d, p, W=None):
    """Taylor frequency-shift fields (a, a1, au, N); all real.

    a  = i(Pbar[R bar R_alpha] - P[R R bar_alpha])    (quadratic in R)
    N  = P[W R bar_alpha - bW bar R] + conjugate
    a1 = R + R bar - N
    au = a + (c/2) a1
    """
    if W is None:
        W = _reconstruct_W(d)
    z = project_P(d.R * derivative(d.R.conj()))
    a = 1j * (z.conj() - z)
    nz = project_P(W * derivative(d.R.conj()) - d.Wd.conj() * d.R)
    N = nz + nz.conj()
    a1 = d.R + d.R.conj() - N
    au = a + 0.5 * p.c * a1
    scale = 1.0 + d.R.norm_l2() ** 2 + W.norm_l2() ** 2
    _check_real("a", a, scale)
    _check_real("N", N, scale)
    _check_real("au", au, scale)
    a_min = float(np.min(a.values(2).real))
    a_tol = 1e-10 * (1.0 + d.R.norm_l2() ** 2)
    if a_min < -a_tol:
        raise ConstraintError(
            "taylor", f"frequency shift a has min {a_min:.3e} < -{a_tol:.1e}"
        )
    return a, a1, au, N


def m_fields(d, p, W=None):
    """Transport defect fields (M, M1, Mu); M, Mu real, M1 imaginary.

    M  = P[R Y bar_alpha - R bar_alpha Y] + conjugate
    M1 = d/dalpha ( P[W Y bar] - conjugate )
    """
    if W is None:
        W = _reconstruct_W(d)
    mz = project_P(d.R * derivative(d.Y.conj()) - derivative(d.R.conj()) * d.Y)
    M = mz + mz.conj()
    mw = project_P(W * d.Y.conj())
    M1 = derivative(mw - mw.conj())
    Mu = M - 0.5j * p.c * M1
    scale = d.R.norm_l2() + W.norm_l2()
    _check_real("M", M, scale)
    _check_real("Mu", Mu, scale)
    return M, M1, Mu


def auxiliary_fields(s, p, d=None):
    """Bundle of all auxiliary fields, using the exact W from the state."""
    if d is None:
        d = to_diagonal(s, p)
    F, F1, Fu, T1 = auxiliary_transport(s, p, d)
    b, b1, bu = transport_coefficients(d, p, W=s.W)
    a, a1, au, N = frequency_shift(d, p, W=s.W)
    M, M1, Mu = m_fields(d, p, W=s.W)
    return AuxiliaryFields(F, F1, Fu, T1, b, b1, bu, a, a1, au, N, M, M1, Mu)


# -- pointwise control norms --------------------------------------------------


@dataclass(frozen=True)
class ControlNorms:
    """Scale-invariant (A family) and balanced (B) pointwise norms."""

    A: float
    B: float
    A_half: float
    A_one: float
    Au: float
    Bu: float


def besov_sup(f):
    """B^0_{infty,2} surrogate: sup over dyadic blocks of the block's l2
    coefficient mass (no length normalization, so a single mode of amplitude
    eps contributes eps, matching the L_inf surrogate it is paired with).

    Blocks are {|k| <= 1}, {2 <= |k| <= 3}, {4 <= |k| <= 7}, ... with the
    low-frequency block merged into j = 0.
    """
    k = np.abs(f.domain.k_int)
    mass2 = np.abs(f.coeffs) ** 2
    out = 0.0
    j, lo = 0, 0
    while lo < f.domain.N // 2:
        hi = 2 ** (j + 1)  # block is [lo, hi)
        sel = (k >= lo) & (k < hi)
        out = max(out, float(np.sqrt(np.sum(mass2[sel]))))
        lo = hi
        j += 1
    return out


def control_norms(d, p, W=None):
    """Pointwise control norms of the state.

    A       = |bW|_inf + |Y|_inf + | |D|^{1/2} R |_{L_inf  and Besov}
    B       = | |D|^{1/2} bW |_inf + |R_alpha|_inf      (BMO -> L_inf surrogate)
    A_half  = | |D|^{1/2} W |_inf + |R|_inf
    A_one   = |W|_inf
    Au      = A + c A_half + c^2 A_one
    Bu      = B + c A + c^2 A_half
    """
    if W is None:
        W = _reconstruct_W(d)
    hR = half_derivative(d.R)
    A = d.Wd.norm_sup() + d.Y.norm_sup() + max(hR.norm_sup(), besov_sup(hR))
    B = half_derivative(d.Wd).norm_sup() + derivative(d.R).norm_sup()
    A_half = half_derivative(W).norm_sup() + d.R.norm_sup()
    A_one = W.norm_sup()
    c = p.c
    return ControlNorms(
        A=A,
        B=B,
        A_half=A_half,
        A_one=A_one,
        Au=A + c * A_half + c * c * A_one,
        Bu=B + c * A + c * c * A_half,
    )


def taylor_margin(au, p):
    """min over the padded grid of g + au (the Taylor sign quantity)."""
    return float(np.min(p.g + au.values(2).real))
