"""Conversions between root coordinates and elementary-symmetric coordinates.

A point in coefficient space is a vector ``e = (e_1, ..., e_d)`` interpreted
as the signed coefficients of the monic polynomial

    p(z) = z^d - e_1 z^{d-1} + e_2 z^{d-2} - ... + (-1)^d e_d,

so the roots of ``p`` are exactly the spectrum whose elementary symmetric
polynomials are the ``e_k``.  This module solves both directions, classifies
points relative to the positive cone (all ``e_k > 0``), and provides the
sensitivity of a simple root to a coefficient.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (DegenerateSpectrumError, DomainError,
                     MalformedSpectrumError, NumericalFailure)

# Roots closer than this (relative) gap are treated as confluent; residue
# denominators lose about half the working precision beyond it.
CLUSTER_RTOL = 1e-7

# A root is deemed real when |imag| <= tol * (1 + |real|); companion
# eigenvalues of real polynomials carry O(eps) imaginary noise.
IMAG_TRUNC_TOL = 1e-10

# Certified backward residual for the root solver (relative to the
# polynomial's magnitude at each root).
ROOT_RESIDUAL_TOL = 1e-10

KIND_REAL_POSITIVE = "real-positive"
KIND_COMPLEX_PAIRS = "complex-pairs"
KIND_BOUNDARY_CLUSTER = "boundary-cluster"


@dataclass(frozen=True)
class RootSpectrum:
    """Ordered root multiset of the characteristic polynomial.

    ``roots`` is sorted nondecreasing by (real, imag).  ``kind`` is one of
    ``real-positive`` (all real, strictly positive, well separated),
    ``boundary-cluster`` (real, nonnegative, with a confluent pair or a
    near-zero root), or ``complex-pairs`` (everything else; in particular any
    conjugation-closed spectrum that is not certified real-positive).
    """

    roots: np.ndarray
    kind: str
    d: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "roots", np.asarray(self.roots, dtype=complex))
        object.__setattr__(self, "d", len(self.roots))
        if self.d == 0:
            raise ValueError("spectrum must contain at least one root")
        if self.kind not in (KIND_REAL_POSITIVE, KIND_COMPLEX_PAIRS,
                             KIND_BOUNDARY_CLUSTER):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")

    @property
    def is_real(self):
        return self.kind in (KIND_REAL_POSITIVE, KIND_BOUNDARY_CLUSTER)

    def real_roots(self):
        """Real parts of a real-kind spectrum.

        Raises ``DomainError`` for complex-pair spectra.
        """
        if not self.is_real:
            raise DomainError("spectrum has complex conjugate pairs")
        return self.roots.real.copy()


def _as_elemsym(e):
    arr = np.atleast_1d(np.asarray(e, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("elementary-symmetric coordinates must be a "
                         "nonempty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("elementary-symmetric coordinates must be finite")
    return arr


def signed_charpoly_coeffs(e):
    """Monic signed coefficient vector (1, -e_1, +e_2, ...), degree first."""
    e = _as_elemsym(e)
    signs = (-1.0) ** np.arange(1, len(e) + 1)
    return np.concatenate([[1.0], signs * e])


def fannes_denominator_coeffs(e):
    """All-plus coefficient vector (1, e_1, ..., e_d) of t^d + e_1 t^{d-1} + ...

    This is ``(-1)^d p(-t)``, the strictly positive denominator appearing in
    the real-axis derivative integrals on the positive cone.
    """
    e = _as_elemsym(e)
    return np.concatenate([[1.0], e])


def classify_roots(roots, tol=IMAG_TRUNC_TOL):
    """Truncate imaginary noise, sort, and wrap roots in a RootSpectrum."""
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    if roots.size == 0:
        raise ValueError("empty root list")
    re, im = roots.real, roots.imag
    real_mask = np.abs(im) <= tol * (1.0 + np.abs(re))
    roots = np.where(real_mask, re + 0j, roots)
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]

    if np.all(real_mask):
        xs = roots.real
        gaps_scale = np.maximum(1.0, np.maximum(np.abs(xs[:-1]), np.abs(xs[1:])))
        clustered = xs.size > 1 and bool(
            np.any(np.diff(xs) <= CLUSTER_RTOL * gaps_scale))
        near_zero = bool(np.any(np.abs(xs) <= CLUSTER_RTOL))
        if np.all(xs > 0) and not clustered:
            kind = KIND_REAL_POSITIVE
        elif np.all(xs >= -tol) and (clustered or near_zero):
            kind = KIND_BOUNDARY_CLUSTER
        elif np.all(xs > 0):
            kind = KIND_REAL_POSITIVE
        else:
            kind = KIND_COMPLEX_PAIRS
    else:
        kind = KIND_COMPLEX_PAIRS
    return RootSpectrum(roots=roots, kind=kind)


def elemsym_from_roots(spectrum):
    """Elementary symmetric polynomials (e_1, ..., e_d) of a root multiset.

    Accepts a RootSpectrum or a plain sequence of (possibly complex) roots.
    A complex multiset must be closed under conjugation so the result is
    real; tiny imaginary residue is discarded, anything larger raises
    MalformedSpectrumError.
    """
    if isinstance(spectrum, RootSpectrum):
        roots = spectrum.roots
    else:
        roots = np.atleast_1d(np.asarray(spectrum, dtype=complex))
        if roots.size == 0:
            raise ValueError("empty root list")
    coeffs = np.ones(1, dtype=complex)
    for r in roots:
        coeffs = np.convolve(coeffs, np.array([1.0, -r], dtype=complex))
    scale = 1.0 + np.max(np.abs(coeffs))
    if np.max(np.abs(coeffs.imag)) > 1e-9 * scale:
        raise MalformedSpectrumError(
            "root multiset is not closed under conjugation")
    signs = (-1.0) ** np.arange(1, len(roots) + 1)
    return signs * coeffs.real[1:]


def roots_from_elemsym(e, tol=IMAG_TRUNC_TOL, polish=True):
    """Solve p(z) = 0 for all d roots of the coordinate vector ``e``.

    Companion-matrix eigenvalues provide the initial values; an
    Aberth-Ehrlich pass polishes them toward a 1e-12 backward residual.  The
    certified residual (max over roots of |p(x)| relative to the polynomial
    magnitude) must come out below ``ROOT_RESIDUAL_TOL`` or NumericalFailure
    is raised carrying it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    e = _as_elemsym(e)
    coeffs = signed_charpoly_coeffs(e)
    d = len(e)
    if d == 1:
        return classify_roots(np.array([e[0]], dtype=complex), tol)
    try:
        raw = np.roots(coeffs)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"companion eigenvalue solve failed: {exc}")
    raw = np.asarray(raw, dtype=complex)
    if raw.size < d:   # np.roots strips trailing zero coefficients
        raw = np.concatenate([raw, np.zeros(d - raw.size, dtype=complex)])
    if polish:
        polished, residual, _ = _kernels.aberth_polish(coeffs, raw, 1e-12, 20)
    else:
        polished, residual, _ = _kernels.aberth_polish(coeffs, raw, np.inf, 0)
    if residual > ROOT_RESIDUAL_TOL:
        raise NumericalFailure(
            f"root solve residual {residual:.3e} exceeds "
            f"{ROOT_RESIDUAL_TOL:.1e}", value=None, error=float(residual))
    return classify_roots(polished, tol)


def charpoly_eval(e, z):
    """Evaluate z^d - e_1 z^{d-1} + ... + (-1)^d e_d by Horner's scheme."""
    coeffs = signed_charpoly_coeffs(e)
    return np.polyval(coeffs, z)


def cone_membership(e, tol=1e-9):
    """Classify ``e`` relative to the positive cone.

    Returns one of ``outside-cone`` (some e_k <= -tol), ``boundary`` (some
    coordinate or root within tol of zero, or a root collision),
    ``probability-region`` (real-positive spectrum), or ``cone-complex``
    (inside the cone with conjugate-pair roots).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    e = _as_elemsym(e)
    if np.any(e < -tol):
        return "outside-cone"
    if np.any(np.abs(e) <= tol):
        return "boundary"
    spectrum = roots_from_elemsym(e)
    xs = spectrum.roots
    scale = 1.0 + np.max(np.abs(xs))
    if np.min(np.abs(xs)) <= tol * scale:
        return "boundary"
    if spectrum.d > 1:
        pair_gap = np.min(np.abs(xs[:, None] - xs[None, :])
                          + np.diag(np.full(spectrum.d, np.inf)))
        if pair_gap <= max(tol, CLUSTER_RTOL) * scale:
            return "boundary"
    if spectrum.kind == KIND_REAL_POSITIVE:
        return "probability-region"
    if spectrum.kind == KIND_BOUNDARY_CLUSTER:
        return "boundary"
    return "cone-complex"


def implicit_root_sensitivity(e, j, k):
    """Sensitivity dx_j/de_k = (-1)^{k+1} x_j^{d-k} / prod_{i!=j}(x_j - x_i).

    Indices are 1-based.  The spectrum must be real-positive with simple
    roots; confluent roots make the denominator vanish and raise
    DegenerateSpectrumError.
    """
    e = _as_elemsym(e)
    d = len(e)
    if not 1 <= j <= d:
        raise ValueError(f"root index j={j} outside 1..{d}")
    if not 1 <= k <= d:
        raise ValueError(f"coordinate index k={k} outside 1..{d}")
    spectrum = roots_from_elemsym(e)
    if spectrum.kind == KIND_BOUNDARY_CLUSTER:
        raise DegenerateSpectrumError(
            "repeated roots: implicit differentiation denominator vanishes")
    if spectrum.kind != KIND_REAL_POSITIVE:
        raise DomainError("sensitivity formula requires a real-positive "
                          f"spectrum, got {spectrum.kind}")
    xs = spectrum.roots.real
    xj = xs[j - 1]
    others = np.delete(xs, j - 1)
    gaps = np.abs(xj - others)
    if gaps.size and np.min(gaps) <= CLUSTER_RTOL * max(1.0, np.max(np.abs(xs))):
        raise DegenerateSpectrumError(
            "repeated roots: implicit differentiation denominator vanishes")
    denom = np.prod(xj - others) if others.size else 1.0
    return float((-1.0) ** (k + 1) * xj ** (d - k) / denom)
