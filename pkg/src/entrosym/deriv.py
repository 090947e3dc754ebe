"""Derivative engines in elementary-symmetric coordinates.

Three independent routes to the same quantities:

* real-axis route: the first derivative of entropy with respect to e_k
  (k >= 2) equals the semi-infinite integral of t^{d-k} over the all-plus
  polynomial t^d + e_1 t^{d-1} + ... + e_d, evaluated by adaptive
  Gauss-Kronrod after splitting at t = 1 and inverting the tail;
* residue route: the same derivative as a signed divided difference of
  x^{d-k} ln x over the roots (confluent table for repeated roots);
* contour route: a trapezoid sum over a root-enclosing circle that avoids
  the origin and the negative real axis (principal log branch cut).

Mixed derivatives of any order reduce to first derivatives of the entropy of
an enlarged spectrum in which every root is repeated m times; the enlarged
coefficient vector is a pure coefficient convolution, so higher orders cost
the same as first orders.  First derivatives of subentropy follow from the
order-reduction identity -dQ/de_k = d^2 H / de_l de_m (k = l + m).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .entropy import Estimate, build_confluent_table, confluent_divided_difference
from .errors import DomainError, GeometryError, NumericalFailure
from .poly import (_as_elemsym, fannes_denominator_coeffs, roots_from_elemsym,
                   signed_charpoly_coeffs)


@dataclass(frozen=True)
class QuadratureSpec:
    """Method selection and tolerance/evaluation budget for the integral
    engines."""

    method: str = "semi-infinite-adaptive"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_evals: int = 1_000_000
    circle_margin: float = 0.5

    def __post_init__(self):
        if self.method not in ("semi-infinite-adaptive", "circle-trapezoid"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_evals < 30:
            raise ValueError("max_evals must allow at least one panel split")
        if not 0.0 < self.circle_margin < 1.0:
            raise ValueError("circle_margin must lie in (0, 1)")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class MultiIndex:
    """Derivative multi-index (i_1, ..., i_m), stored sorted nondecreasing."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(idx) == 0:
            raise ValueError("multi-index must have order >= 1")
        if any(i < 1 for i in idx):
            raise ValueError("multi-index entries must be >= 1")
        object.__setattr__(self, "indices", idx)

    @property
    def order(self):
        return len(self.indices)

    @property
    def index_sum(self):
        return sum(self.indices)


def as_multiindex(idx):
    if isinstance(idx, MultiIndex):
        return idx
    if isinstance(idx, (int, np.integer)):
        return MultiIndex((int(idx),))
    return MultiIndex(tuple(idx))


@dataclass(frozen=True)
class ContourIntegrand:
    """Monomial-times-log integrand sign * z^power (ln z)^log_power /
    p(z)^pole_multiplicity for the circle engine."""

    power: int
    log_power: int = 1
    pole_multiplicity: int = 1
    overall_sign: float = 1.0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be >= 0")
        if self.log_power not in (0, 1):
            raise ValueError("log_power must be 0 or 1")
        if self.pole_multiplicity < 1:
            raise ValueError("pole_multiplicity must be >= 1")
        if self.overall_sign not in (1, -1, 1.0, -1.0):
            raise ValueError("overall_sign must be +1 or -1")


def _check_positive_denominator(e, coeffs):
    """The all-plus denominator must be strictly positive on t > 0."""
    if np.all(e > 0):
        return
    if coeffs[-1] < 0 or np.polyval(coeffs, 1.0) <= 0:
        raise DomainError("denominator not strictly positive on t > 0")
    roots = np.roots(coeffs)
    bad = (roots.real > 1e-12) & (np.abs(roots.imag) <= 1e-10 * (1 + roots.real))
    if np.any(bad):
        raise DomainError("denominator vanishes on t > 0; real-axis "
                          "integral representation invalid here")


def _semiinf_power_rational(coeffs, apow, quad):
    """integral_0^inf t^apow / P(t) dt for descending-coefficient P.

    Split at t = 1; the tail maps by t -> 1/u onto u^{n-apow-2} / Q(u) with
    Q the coefficient-reversed polynomial, so both halves stay rational on
    (0, 1] and the adaptive panels never chase an endpoint derivative.
    """
    n = len(coeffs) - 1
    tail_pow = n - apow - 2
    if tail_pow < 0:
        raise ValueError("integrand decays too slowly: need deg P >= power + 2")
    if coeffs[-1] == 0 and apow == 0:
        raise DomainError("integral diverges at t = 0 (zero constant term)")
    budget = quad.max_evals // 2
    hv, he, hev, hst = _kernels.adaptive_power_rational(
        coeffs, apow, 0.0, 1.0, 0.5 * quad.abs_tol, 0.5 * quad.rel_tol, budget)
    rev = coeffs[::-1].copy()
    tv, te, tev, tst = _kernels.adaptive_power_rational(
        rev, tail_pow, 0.0, 1.0, 0.5 * quad.abs_tol, 0.5 * quad.rel_tol, budget)
    value = hv + tv
    error = he + te
    evals = int(hev + tev)
    if hst != 0 or tst != 0:
        raise NumericalFailure(
            f"quadrature tolerance not met within budget "
            f"(value {value!r}, estimate {error:.3e})",
            value=value, error=error)
    return Estimate(value, error, evals)


def dH_dek_fannes(e, k, quad=DEFAULT_QUAD):
    """dH/de_k (k >= 2) as the real-axis integral of t^{d-k} over the
    all-plus denominator; valid wherever that denominator is positive on
    t > 0, which covers the whole positive cone."""
    e = _as_elemsym(e)
    d = len(e)
    k = int(k)
    if k == 1:
        raise ValueError("k = 1 has an extra chain-rule term; use dH_de1")
    if not 2 <= k <= d:
        raise ValueError(f"k={k} outside 2..{d}")
    coeffs = fannes_denominator_coeffs(e)
    _check_positive_denominator(e, coeffs)
    return _semiinf_power_rational(coeffs, d - k, quad)


def _dd_over_roots(e, power):
    spectrum = roots_from_elemsym(e)
    if not spectrum.is_real:
        raise DomainError("residue route requires a real-positive spectrum; "
                          "use the quadrature engine on cone-complex points")
    table = build_confluent_table(spectrum.roots, power)
    value = confluent_divided_difference(table)
    return float(value.real)


def dH_de1(e, quad=DEFAULT_QUAD):
    """dH/de_1 = -[x_1, ..., x_d](x^{d-1} ln x) - 1 via the confluent
    divided-difference engine (repeated roots handled)."""
    e = _as_elemsym(e)
    return -_dd_over_roots(e, len(e) - 1) - 1.0


def dH_dek_residue(e, k):
    """dH/de_k (k >= 2) as (-1)^k [x_1, ..., x_d](x^{d-k} ln x)."""
    e = _as_elemsym(e)
    d = len(e)
    k = int(k)
    if k == 1:
        raise ValueError("k = 1 has an extra chain-rule term; use dH_de1")
    if not 2 <= k <= d:
        raise ValueError(f"k={k} outside 2..{d}")
    return (-1.0) ** k * _dd_over_roots(e, d - k)


def repeated_spectrum_coords(e, m):
    """Coefficient coordinates of the spectrum with every root repeated m
    times: the signed coefficient vector of p(z)^m, by m-1 convolutions.

    No root finding is involved, and for e in the positive cone every output
    coordinate is nonnegative.
    """
    e = _as_elemsym(e)
    m = int(m)
    if m < 1:
        raise ValueError("repetition count m must be >= 1")
    sc = signed_charpoly_coeffs(e)
    acc = sc
    for _ in range(m - 1):
        acc = np.convolve(acc, sc)
    signs = (-1.0) ** np.arange(1, len(acc))
    return signs * acc[1:]


def dH_multi(e, idx, quad=DEFAULT_QUAD):
    """Mixed derivative d^m H / de_{i_1} ... de_{i_m}.

    Order one dispatches to the first-derivative engines.  Higher orders use
    the repeated-spectrum reduction: the value is (-1)^{m-1} times the first
    derivative dH~/de~_K of the m-fold-repeated spectrum, where K is the
    index sum (the result depends on idx only through K).
    """
    e = _as_elemsym(e)
    idx = as_multiindex(idx)
    d = len(e)
    if idx.indices[-1] > d:
        raise ValueError(f"multi-index entry {idx.indices[-1]} exceeds d={d}")
    if idx.order == 1:
        k = idx.indices[0]
        if k == 1:
            return dH_de1(e, quad)
        return dH_dek_fannes(e, k, quad).value
    m = idx.order
    doubled = repeated_spectrum_coords(e, m)
    est = dH_dek_fannes(doubled, idx.index_sum, quad)
    return (-1.0) ** (m - 1) * est.value


def dQ_dek(e, k, quad=DEFAULT_QUAD, n_nodes=64):
    """dQ/de_k via the order-reduction identity.

    For k >= 2 this is +dH~/de~_k on the twice-repeated spectrum (strictly
    positive on the cone).  For k = 1 the identity extends to
    dQ/de_1 = dH~/de~_1 + 1, evaluated through the contour engine with a
    double pole; the extension is validated against finite differences in
    the test suite.
    """
    e = _as_elemsym(e)
    d = len(e)
    k = int(k)
    if not 1 <= k <= d:
        raise ValueError(f"k={k} outside 1..{d}")
    if k >= 2:
        doubled = repeated_spectrum_coords(e, 2)
        est = dH_dek_fannes(doubled, k, quad)
        return Estimate(est.value, est.error, est.evals)
    integrand = ContourIntegrand(power=2 * d - 1, log_power=1,
                                 pole_multiplicity=2, overall_sign=-1.0)
    return contour_residue_integral(e, integrand, n_nodes=n_nodes, quad=quad)


_MAX_CONTOUR_NODES = 1 << 16


def contour_residue_integral(e, integrand, n_nodes=32, quad=DEFAULT_QUAD):
    """(1/2*pi*i) times the contour integral of the requested integrand.

    The contour is the circle centered at (x_min + x_max)/2 with radius
    (x_max - x_min)/2 + circle_margin * x_min: it encloses every root while
    excluding the origin and the negative-axis branch cut.  Equispaced
    trapezoid sums converge geometrically for these analytic integrands; the
    node count doubles until two successive values agree to abs_tol.
    """
    e = _as_elemsym(e)
    if not isinstance(integrand, ContourIntegrand):
        raise ValueError("integrand must be a ContourIntegrand")
    if n_nodes < 16:
        raise ValueError("n_nodes must be >= 16")
    spectrum = roots_from_elemsym(e)
    roots = spectrum.roots
    x_min = float(np.min(roots.real))
    x_max = float(np.max(roots.real))
    if x_min <= 0:
        raise GeometryError(
            "contour cannot exclude origin/cut: a root has nonpositive "
            "real part")
    center = 0.5 * (x_min + x_max)
    radius = 0.5 * (x_max - x_min) + quad.circle_margin * x_min
    dist = np.abs(roots - center)
    if np.any(dist >= radius * (1 - 1e-12)):
        raise GeometryError(
            "contour cannot enclose all roots while excluding the cut "
            "(complex roots too wide or spectrum too spread)")
    coeffs = signed_charpoly_coeffs(e)
    n = int(n_nodes)
    prev = _kernels.contour_sum(coeffs, center, radius, n,
                                integrand.power, integrand.log_power,
                                integrand.pole_multiplicity,
                                float(integrand.overall_sign))
    while n <= _MAX_CONTOUR_NODES // 2:
        n *= 2
        cur = _kernels.contour_sum(coeffs, center, radius, n,
                                   integrand.power, integrand.log_power,
                                   integrand.pole_multiplicity,
                                   float(integrand.overall_sign))
        err = abs(cur - prev) + abs(cur.imag)
        if err < max(quad.abs_tol, quad.rel_tol * abs(cur)):
            return Estimate(float(cur.real), float(err), n)
        prev = cur
    raise NumericalFailure(
        f"contour trapezoid did not converge below tolerance by "
        f"{_MAX_CONTOUR_NODES} nodes", value=float(prev.real),
        error=float(abs(prev.imag)))


def dH_dek_contour(e, k, n_nodes=32, quad=DEFAULT_QUAD):
    """Contour cross-check of dH/de_k: sign (-1)^k, numerator z^{d-k} ln z,
    simple poles."""
    e = _as_elemsym(e)
    d = len(e)
    k = int(k)
    if not 2 <= k <= d:
        raise ValueError(f"k={k} outside 2..{d}")
    integrand = ContourIntegrand(power=d - k, log_power=1,
                                 pole_multiplicity=1,
                                 overall_sign=(-1.0) ** k)
    return contour_residue_integral(e, integrand, n_nodes=n_nodes, quad=quad)


def subentropy_contour(e, n_nodes=32, quad=DEFAULT_QUAD):
    """Contour evaluation of subentropy: -z^d ln z over simple poles."""
    e = _as_elemsym(e)
    d = len(e)
    integrand = ContourIntegrand(power=d, log_power=1, pole_multiplicity=1,
                                 overall_sign=-1.0)
    return contour_residue_integral(e, integrand, n_nodes=n_nodes, quad=quad)
