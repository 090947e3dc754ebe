"""Entropy and subentropy of a spectrum, in root or coefficient coordinates.

Entropy is the plain weighted log-sum -sum x_i ln x_i.  Subentropy is minus
the (d-1)-st divided difference of f(x) = x^d ln x over the d roots; that
formulation extends to repeated roots through a confluent (Hermite) table
whose derivative entries come from a closed recurrence, and to conjugate-pair
spectra, where the result is real by symmetry.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NumericalFailure
from .poly import (CLUSTER_RTOL, RootSpectrum, _as_elemsym, classify_roots,
                   cone_membership, roots_from_elemsym,
                   signed_charpoly_coeffs)


class Estimate(NamedTuple):
    """A numeric result together with its error estimate.

    ``evals`` counts integrand evaluations or contour nodes where the
    producing engine tracks them (0 otherwise).
    """

    value: float
    error: float
    evals: int = 0


def _harmonic(n):
    return float(np.sum(1.0 / np.arange(1, n + 1))) if n > 0 else 0.0


def xlogx_scaled_derivatives(power, x, count):
    """Scaled derivatives f^{(j)}(x)/j! of f(x) = x^power ln x, j < count.

    For j <= power the closed form is C(power, j) x^{power-j}
    (ln x + H_power - H_{power-j}); past the polynomial degree the log
    survives alone and the scaled coefficient collapses to
    (-1)^{j-power-1} / (C(j, power) (j - power)).
    """
    x = complex(x)
    if x == 0:
        raise DomainError("derivative table of x^p ln x undefined at x = 0")
    lx = np.log(x)
    hp = _harmonic(power)
    out = np.empty(count, dtype=complex)
    for j in range(count):
        if j <= power:
            out[j] = math.comb(power, j) * x ** (power - j) * (
                lx + hp - _harmonic(power - j))
        else:
            m = j - power
            out[j] = (-1.0) ** (m - 1) / (math.comb(j, power) * m) * x ** (-m)
    return out


@dataclass(frozen=True)
class ConfluentNodeTable:
    """Distinct nodes with multiplicities and derivative values of
    f(x) = x^power ln x up to order mult-1 at each node."""

    nodes: np.ndarray
    multiplicities: np.ndarray
    power: int
    derivative_values: tuple   # unscaled f, f', ..., f^{(mult-1)} per node

    @property
    def total(self):
        return int(np.sum(self.multiplicities))


def group_confluent_nodes(roots, rtol=CLUSTER_RTOL):
    """Cluster near-coincident roots; returns (representatives, counts).

    Consecutive roots (after sorting by real then imaginary part) closer than
    the relative threshold are merged into one node at their mean.
    """
    roots = np.atleast_1d(np.asarray(roots, dtype=complex))
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    reps, counts = [], []
    start = 0
    for i in range(1, len(roots) + 1):
        if i < len(roots):
            a, b = roots[i - 1], roots[i]
            if abs(b - a) <= rtol * max(1.0, abs(a), abs(b)):
                continue
        reps.append(np.mean(roots[start:i]))
        counts.append(i - start)
        start = i
    return np.asarray(reps, dtype=complex), np.asarray(counts, dtype=int)


def build_confluent_table(roots, power, rtol=CLUSTER_RTOL):
    reps, counts = group_confluent_nodes(roots, rtol)
    scale = 1.0 + float(np.max(np.abs(reps)))
    if np.any(np.abs(reps) <= rtol * scale):
        raise DomainError("node at 0: branch point of the logarithm")
    derivs = tuple(
        xlogx_scaled_derivatives(power, z, m)
        * np.array([math.factorial(j) for j in range(m)])
        for z, m in zip(reps, counts))
    return ConfluentNodeTable(nodes=reps, multiplicities=counts, power=power,
                              derivative_values=derivs)


def confluent_divided_difference(table):
    """Top-order divided difference [z_1, ..., z_n] x^power ln x.

    Repeated nodes use Hermite entries f^{(j)}(z)/j!; distinct nodes use the
    ordinary difference quotient.  Complex conjugation-closed node sets give
    a real value up to rounding.
    """
    reps = table.nodes
    counts = table.multiplicities
    n = table.total
    zs = np.repeat(reps, counts)
    group = np.repeat(np.arange(len(reps)), counts)
    scaled = [dv / np.array([math.factorial(j) for j in range(len(dv))])
              for dv in table.derivative_values]
    col = np.array([scaled[group[i]][0] for i in range(n)], dtype=complex)
    for j in range(1, n):
        for i in range(n - j):
            if group[i + j] == group[i]:
                col[i] = scaled[group[i]][j]
            else:
                col[i] = (col[i + 1] - col[i]) / (zs[i + j] - zs[i])
    return col[0]


def _as_spectrum(spectrum):
    if isinstance(spectrum, RootSpectrum):
        return spectrum
    return classify_roots(spectrum)


def entropy_from_roots(spectrum):
    """Shannon entropy -sum x_i ln x_i in nats; x ln x -> 0 at x = 0.

    Defined for real nonnegative spectra only; conjugate-pair spectra raise
    DomainError (their entropy is reached through coefficient coordinates).
    """
    spectrum = _as_spectrum(spectrum)
    xs = spectrum.real_roots()
    xs = np.where(np.abs(xs) <= 1e-300, 0.0, xs)
    if np.any(xs < 0):
        raise DomainError("entropy requires nonnegative roots")
    pos = xs[xs > 0]
    return float(-np.sum(pos * np.log(pos)))


def subentropy_from_roots(spectrum):
    """Subentropy: minus the (d-1)-st divided difference of x^d ln x.

    Accepts real-positive, boundary-cluster, or conjugate-pair spectra; all
    nodes must be nonzero.  Conjugation-closed inputs give a real result;
    larger imaginary residue raises NumericalFailure.
    """
    spectrum = _as_spectrum(spectrum)
    table = build_confluent_table(spectrum.roots, spectrum.d)
    q = -confluent_divided_difference(table)
    if abs(q.imag) > 1e-9 * (1.0 + abs(q)):
        raise NumericalFailure(
            f"imaginary residue {q.imag:.3e} in subentropy value",
            value=float(q.real), error=abs(q.imag))
    return float(q.real)


def _root_error_estimate(e, spectrum, dfdx):
    """First-order error bound from the solver's per-root Newton steps."""
    coeffs = signed_charpoly_coeffs(e)
    dcoeffs = coeffs[:-1] * np.arange(len(e), 0, -1)
    p = np.abs(np.polyval(coeffs.astype(complex), spectrum.roots))
    dp = np.abs(np.polyval(dcoeffs.astype(complex), spectrum.roots))
    step = p / np.maximum(dp, 1e-30)
    return float(np.sum(np.abs(dfdx) * step)) + 1e-15 * len(e)


def entropy_from_elemsym(e):
    """Entropy at a coefficient-coordinate point, with an error estimate.

    The point must classify as probability-region or boundary; the estimate
    folds in the root-reconstruction residual through d(x ln x)/dx.
    """
    e = _as_elemsym(e)
    region = cone_membership(e)
    if region in ("cone-complex", "outside-cone"):
        raise DomainError(f"entropy undefined through roots at a {region} point")
    spectrum = roots_from_elemsym(e)
    value = entropy_from_roots(spectrum)
    xs = np.abs(spectrum.roots.real)
    dfdx = np.where(xs > 1e-300, np.log(np.maximum(xs, 1e-300)) + 1.0, 0.0)
    return Estimate(value, _root_error_estimate(e, spectrum, dfdx), evals=0)


def subentropy_from_elemsym(e):
    """Subentropy at a coefficient-coordinate point (conjugate pairs allowed)."""
    e = _as_elemsym(e)
    region = cone_membership(e)
    if region == "outside-cone":
        raise DomainError("subentropy undefined at an outside-cone point")
    spectrum = roots_from_elemsym(e)
    return subentropy_from_roots(spectrum)
