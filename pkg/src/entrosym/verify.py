"""Seeded property-verification harness for the derivative identities.

Checks covered: the order-reduction identity between subentropy and entropy
derivatives, the alternating-sign lattice of mixed derivatives, index-sum
invariance, discrete and analytic complete-monotonicity of dH/de_k, and
positivity of H and Q on the probability simplex.

Each check walks a deterministic sample stream (identical plans yield
byte-identical reports) and returns a VerificationReport.  Comparisons rely
on two independent oracles besides the production engines: a finite
difference stencil with one Richardson level, and a complex-step
differentiation of the root/residue route, in which the entries of a
multi-index enter separately rather than through their sum.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .deriv import (DEFAULT_QUAD, as_multiindex, dH_de1, dH_dek_fannes,
                    dH_multi, dQ_dek)
from .entropy import (build_confluent_table, confluent_divided_difference,
                      entropy_from_elemsym, subentropy_from_elemsym)
from .errors import DomainError, EntrosymError
from .poly import _as_elemsym, cone_membership, elemsym_from_roots

_PAYLOAD_CAP = 100


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic sampling plan for the verification checks."""

    seed: int
    d_range: tuple = (2, 4)
    n_points: int = 50
    strategy: str = "simplex"

    def __post_init__(self):
        lo, hi = self.d_range
        if not (1 <= lo <= hi):
            raise ValueError("d_range must satisfy 1 <= lo <= hi")
        if self.n_points < 0:
            raise ValueError("n_points must be >= 0")
        if self.strategy not in ("simplex", "cone", "boundary"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def iter_samples(plan):
    """Yield (index, e) pairs; identical plans yield identical streams."""
    rng = np.random.default_rng(plan.seed)
    lo, hi = plan.d_range
    for i in range(plan.n_points):
        d = int(rng.integers(lo, hi + 1))
        if plan.strategy == "simplex":
            w = rng.exponential(size=d)
            roots = np.sort(w / np.sum(w))
            e = elemsym_from_roots(roots)
        elif plan.strategy == "cone":
            e = 10.0 ** rng.uniform(-3.0, 1.0, size=d)
        else:   # boundary: real-positive roots with one near-confluent pair
            roots = np.sort(rng.uniform(0.05, 1.0, size=d))
            if d >= 2:
                j = int(rng.integers(0, d - 1))
                delta = 10.0 ** rng.uniform(-7.0, -2.0)
                roots[j + 1] = roots[j] + delta
                roots = np.sort(roots)
            e = elemsym_from_roots(roots)
        yield i, e


@dataclass
class VerificationReport:
    """Per-property pass/fail statistics with worst deviations.

    ``violations == 0`` holds exactly when ``max_abs_deviation`` stayed at
    or below ``tolerance`` over all comparisons (engine failures count as
    infinite deviation).  ``max_engine_error`` records the largest summed
    error estimate the engines reported, which the tolerance must exceed
    for the check to be meaningful.
    """

    prop: str
    tolerance: float
    samples: int = 0
    comparisons: int = 0
    violations: int = 0
    max_abs_deviation: float = 0.0
    max_engine_error: float = 0.0
    payloads: list = field(default_factory=list)

    def record(self, deviation, engine_error, payload):
        self.comparisons += 1
        self.max_abs_deviation = max(self.max_abs_deviation, deviation)
        self.max_engine_error = max(self.max_engine_error, engine_error)
        if deviation > self.tolerance:
            self.violations += 1
            if len(self.payloads) < _PAYLOAD_CAP:
                self.payloads.append(payload)

    def record_failure(self, payload):
        self.record(float("inf"), 0.0, payload)

    @property
    def passed(self):
        return self.violations == 0

    def to_dict(self):
        return {
            "property": self.prop,
            "samples": self.samples,
            "comparisons": self.comparisons,
            "violations": self.violations,
            "max_abs_deviation": self.max_abs_deviation,
            "tolerance": self.tolerance,
            "max_engine_error": self.max_engine_error,
            "payloads": self.payloads,
        }

    def to_text(self):
        lines = [
            f"property: {self.prop}",
            f"samples: {self.samples}",
            f"comparisons: {self.comparisons}",
            f"violations: {self.violations}",
            f"max_abs_deviation: {self.max_abs_deviation!r}",
            f"tolerance: {self.tolerance!r}",
            f"max_engine_error: {self.max_engine_error!r}",
        ]
        for p in self.payloads:
            lines.append("violation: " + repr(p))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------

def _target_fn(target):
    if target == "H":
        return lambda v: entropy_from_elemsym(v).value
    if target == "Q":
        return subentropy_from_elemsym
    raise ValueError("target must be 'H' or 'Q'")


def _central(f, e, axis, h):
    u = np.zeros_like(e)
    u[axis] = h
    return (f(e + u) - f(e - u)) / (2 * h)


def _one_sided(f, e, axis, h, sign):
    u = np.zeros_like(e)
    u[axis] = sign * h
    return sign * (-3 * f(e) + 4 * f(e + u) - f(e + 2 * u)) / (2 * h)


def finite_difference_derivative(e, idx, target, step=None):
    """Finite-difference oracle for first and mixed second derivatives.

    Central differences with one Richardson extrapolation level; mixed
    second derivatives use the 4-point cross stencil per axis pair.  A first
    derivative whose central stencil leaves the target's domain falls back
    to a second-order one-sided stencil pointing into the domain.
    """
    e = _as_elemsym(e)
    idx = as_multiindex(idx)
    f = _target_fn(target)
    d = len(e)
    if idx.indices[-1] > d:
        raise ValueError(f"multi-index entry {idx.indices[-1]} exceeds d={d}")

    if idx.order == 1:
        axis = idx.indices[0] - 1
        h = step if step is not None else 1e-6 * max(1.0, abs(e[axis]))
        try:
            d1, d2 = _central(f, e, axis, h), _central(f, e, axis, h / 2)
            return (4 * d2 - d1) / 3
        except DomainError:
            pass
        for sign in (-1.0, 1.0):
            try:
                d1 = _one_sided(f, e, axis, h, sign)
                d2 = _one_sided(f, e, axis, h / 2, sign)
                return (4 * d2 - d1) / 3
            except DomainError:
                continue
        raise DomainError(
            f"finite differences along e_{axis + 1} leave the domain of "
            f"{target} on both sides of {e.tolist()}")

    if idx.order == 2:
        a, b = idx.indices[0] - 1, idx.indices[1] - 1
        # eps**(1/4) step: second-difference roundoff ~ eps/h^2 balances
        # the Richardson-extrapolated truncation here, not at 1e-6.
        ha = step if step is not None else 1.2e-4 * max(1.0, abs(e[a]))
        hb = step if step is not None else 1.2e-4 * max(1.0, abs(e[b]))

        def stencil(ha, hb):
            ua = np.zeros_like(e)
            ub = np.zeros_like(e)
            ua[a], ub[b] = ha, hb
            if a == b:
                return (f(e + ua) - 2 * f(e) + f(e - ua)) / ha ** 2
            return (f(e + ua + ub) - f(e + ua - ub) - f(e - ua + ub)
                    + f(e - ua - ub)) / (4 * ha * hb)

        try:
            s1, s2 = stencil(ha, hb), stencil(ha / 2, hb / 2)
        except DomainError as exc:
            raise DomainError(
                f"second-derivative stencil leaves the domain of {target} "
                f"at {e.tolist()}: {exc}")
        return (4 * s2 - s1) / 3

    raise ValueError("finite-difference oracle supports orders 1 and 2")


_FD_ANCHORS = (
    ((1.0, 0.25), (2,), 2.0),
    ((1.0, 0.1875), (2,), 2.1972245773362196),    # 2 ln 3
    ((2.0, 1.0), (2,), 1.0),
    ((1.0, 0.1875), (1, 1), -0.7041631339956709),  # -(4 - 3 ln 3)
)
_fd_oracle_ok = None


def _ensure_fd_oracle():
    """Abort every check if the FD oracle drifts from its closed forms."""
    global _fd_oracle_ok
    if _fd_oracle_ok is None:
        worst = max(abs(finite_difference_derivative(np.array(e), idx, "H")
                        - expect)
                    for e, idx, expect in _FD_ANCHORS)
        _fd_oracle_ok = worst < 1e-6
        if not _fd_oracle_ok:
            raise RuntimeError(
                f"finite-difference oracle failed its anchor validation "
                f"(worst deviation {worst:.3e}); refusing to run checks")
    elif not _fd_oracle_ok:
        raise RuntimeError("finite-difference oracle previously failed "
                           "anchor validation")


# ---------------------------------------------------------------------------
# complex-step root-route oracle (indices enter separately, not via their sum)
# ---------------------------------------------------------------------------

_CSTEP = 1e-20


def _signed_coeffs_complex(e):
    e = np.asarray(e, dtype=complex)
    signs = (-1.0) ** np.arange(1, len(e) + 1)
    return np.concatenate([[1.0 + 0j], signs * e])


def _roots_analytic(coeffs):
    """Roots of a complex-coefficient polynomial through analytic
    operations only.

    Eigenvalue-based solvers are not complex-step safe (Householder steps
    conjugate away an O(1e-20) imaginary perturbation), so companion
    eigenvalues of the real part seed a Newton iteration carried out in
    plain complex arithmetic, which preserves the perturbation channel at
    full relative precision.
    """
    z = np.roots(coeffs.real).astype(complex)
    dcoeffs = coeffs[:-1] * np.arange(len(coeffs) - 1, 0, -1)
    for _ in range(4):
        z = z - np.polyval(coeffs, z) / np.polyval(dcoeffs, z)
    return z


def _residue_dHdk_complex(e, k, repeat=1):
    """dH/de_k of the ``repeat``-fold spectrum via the residue route with
    complex coefficient coordinates (analytic in e away from collisions)."""
    d = len(e) * repeat
    roots = _roots_analytic(_signed_coeffs_complex(e))
    nodes = np.repeat(roots, repeat)
    table = build_confluent_table(nodes, d - k)
    dd = confluent_divided_difference(table)
    if k == 1:
        return -dd - 1.0
    return (-1.0) ** k * dd


def mixed_derivative_root_route(e, idx, step_axis=None):
    """Mixed derivative of H via complex-step of the residue route.

    For order 2, differentiates dH/de_k along e_l by a complex step, so l
    and k play distinct roles.  For order 3, one index supplies the step
    direction and the remaining pair is evaluated on the doubled spectrum.
    The step is 1e-20: complex-step differentiation has no subtractive
    cancellation, so the result carries the residue engine's full accuracy.
    """
    e = np.asarray(e, dtype=float)
    idx = as_multiindex(idx)
    if idx.order not in (2, 3):
        raise ValueError("root-route oracle supports orders 2 and 3")
    entries = list(idx.indices)
    axis = entries[0] if step_axis is None else step_axis
    entries.remove(axis)
    ec = e.astype(complex)
    ec[axis - 1] += 1j * _CSTEP
    if idx.order == 2:
        g = _residue_dHdk_complex(ec, entries[0])
    else:
        inner_k = sum(entries)
        g = -_residue_dHdk_complex(ec, inner_k, repeat=2)
    return float(g.imag) / _CSTEP


# ---------------------------------------------------------------------------
# property checks
# ---------------------------------------------------------------------------

def _splits(k):
    return [(l, k - l) for l in range(1, k // 2 + 1)]


def check_prop1(plan, tol=1e-6, quad=DEFAULT_QUAD):
    """-dQ/de_k against d^2 H/de_l de_m for every split k = l + m.

    The subentropy side comes from the quadrature engine; each split is
    evaluated both through the convolution engine and through the
    complex-step root route, whose value genuinely depends on the split.
    """
    _ensure_fd_oracle()
    report = VerificationReport(prop="prop1", tolerance=tol)
    for i, e in iter_samples(plan):
        report.samples += 1
        d = len(e)
        for k in range(2, d + 1):
            try:
                q = dQ_dek(e, k, quad)
            except EntrosymError as exc:
                report.record_failure({"sample": i, "e": e.tolist(), "k": k,
                                       "cause": str(exc)})
                continue
            for l, m in _splits(k):
                try:
                    rhs_engine = dH_multi(e, (l, m), quad)
                    rhs_roots = mixed_derivative_root_route(e, (l, m))
                except EntrosymError as exc:
                    report.record_failure({"sample": i, "e": e.tolist(),
                                           "split": (l, m), "cause": str(exc)})
                    continue
                dev = max(abs(-q.value - rhs_engine),
                          abs(-q.value - rhs_roots))
                report.record(dev, q.error + quad.abs_tol, {
                    "sample": i, "e": e.tolist(), "k": k, "split": (l, m),
                    "lhs": -q.value, "rhs_engine": rhs_engine,
                    "rhs_roots": rhs_roots})
    return report


def _representative_index(m, total, d):
    """Lexicographically small sorted multi-index of order m summing to
    ``total`` with entries <= d."""
    idx = [1] * m
    excess = total - m
    for i in range(m - 1, -1, -1):
        add = min(d - 1, excess)
        idx[i] += add
        excess -= add
    assert excess == 0
    return tuple(sorted(idx))


def check_prop2_signs(plan, max_order=3, tol=1e-9, quad=DEFAULT_QUAD):
    """Alternating-sign lattice: dH/de_k >= 0 (k >= 2) and
    (-1)^{m-1} d^m H >= 0 for every order m <= max_order."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    _ensure_fd_oracle()
    report = VerificationReport(prop="prop2", tolerance=tol)
    for i, e in iter_samples(plan):
        report.samples += 1
        d = len(e)
        for k in range(2, d + 1):
            try:
                est = dH_dek_fannes(e, k, quad)
            except EntrosymError as exc:
                report.record_failure({"sample": i, "e": e.tolist(), "k": k,
                                       "cause": str(exc)})
                continue
            report.record(max(0.0, -est.value), est.error, {
                "sample": i, "e": e.tolist(), "idx": (k,), "value": est.value})
        for m in range(2, max_order + 1):
            for total in range(m, m * d + 1):
                idx = _representative_index(m, total, d)
                try:
                    val = dH_multi(e, idx, quad)
                except EntrosymError as exc:
                    report.record_failure({"sample": i, "e": e.tolist(),
                                           "idx": idx, "cause": str(exc)})
                    continue
                signed = (-1.0) ** (m - 1) * val
                report.record(max(0.0, -signed), quad.abs_tol, {
                    "sample": i, "e": e.tolist(), "idx": idx,
                    "signed_value": signed})
    return report


def check_prop3_index_sum(plan, m=2, tol=1e-8, quad=DEFAULT_QUAD):
    """Index-sum invariance via the complex-step root-route oracle.

    All order-m multi-indices are grouped by index sum; within each group
    the oracle values (which depend on the individual entries beforehand)
    must agree, and the group must match the convolution engine.  The
    subentropy analogue ties -dQ/de_k to every split of k.
    """
    if m not in (2, 3):
        raise ValueError("index-sum check implemented for orders 2 and 3")
    _ensure_fd_oracle()
    report = VerificationReport(prop="prop3", tolerance=tol)
    for i, e in iter_samples(plan):
        report.samples += 1
        d = len(e)
        groups = {}
        for idx in itertools.combinations_with_replacement(range(1, d + 1), m):
            groups.setdefault(sum(idx), []).append(idx)
        for total, idxs in sorted(groups.items()):
            values = []
            try:
                for idx in idxs:
                    for axis in sorted(set(idx)):
                        values.append(mixed_derivative_root_route(e, idx, axis))
                engine = dH_multi(e, _representative_index(m, total, d), quad)
            except EntrosymError as exc:
                report.record_failure({"sample": i, "e": e.tolist(),
                                       "K": total, "cause": str(exc)})
                continue
            spread = max(values) - min(values) if len(values) > 1 else 0.0
            dev = max(spread, abs(np.mean(values) - engine))
            report.record(dev, quad.abs_tol, {
                "sample": i, "e": e.tolist(), "K": total,
                "group": idxs, "spread": spread, "engine": engine})
        if m == 2:
            for k in range(2, d + 1):
                try:
                    lhs = -dQ_dek(e, k, quad).value
                    vals = [dH_multi(e, s, quad) for s in _splits(k)]
                except EntrosymError as exc:
                    report.record_failure({"sample": i, "e": e.tolist(),
                                           "k": k, "cause": str(exc)})
                    continue
                dev = max(abs(lhs - v) for v in vals)
                report.record(dev, quad.abs_tol, {
                    "sample": i, "e": e.tolist(), "k": k,
                    "subentropy_side": lhs})
    return report


def check_complete_monotonicity(plan, k=2, depth=3, tol=1e-8,
                                quad=DEFAULT_QUAD, grid_step=0.25):
    """Complete monotonicity of f = dH/de_k on the positive cone.

    Analytic side: signs of the mixed derivatives of f up to ``depth``
    follow the alternating pattern.  Discrete side: alternating forward
    differences of f along every coordinate axis are nonnegative
    (completely monotone functions have (-1)^j Delta^j f >= 0).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    _ensure_fd_oracle()
    report = VerificationReport(prop="cm", tolerance=tol)
    for i, e in iter_samples(plan):
        report.samples += 1
        d = len(e)
        if k < 2 or k > d:
            continue
        for extra_order in range(1, depth + 1):
            for extra_total in range(extra_order, extra_order * d + 1):
                extras = _representative_index(extra_order, extra_total, d)
                idx = tuple(sorted((k,) + extras))
                try:
                    val = dH_multi(e, idx, quad)
                except EntrosymError as exc:
                    report.record_failure({"sample": i, "e": e.tolist(),
                                           "idx": idx, "cause": str(exc)})
                    continue
                signed = (-1.0) ** extra_order * val
                report.record(max(0.0, -signed), quad.abs_tol, {
                    "sample": i, "e": e.tolist(), "idx": idx,
                    "signed_value": signed})
        for axis in range(d):
            h = grid_step * max(1.0, e[axis])
            try:
                vals = []
                for step_count in range(depth + 1):
                    shifted = e.copy()
                    shifted[axis] += step_count * h
                    vals.append(dH_dek_fannes(shifted, k, quad).value)
            except EntrosymError as exc:
                report.record_failure({"sample": i, "e": e.tolist(),
                                       "axis": axis + 1, "cause": str(exc)})
                continue
            diffs = np.asarray(vals)
            for j in range(1, depth + 1):
                diffs = np.diff(diffs)
                signed = (-1.0) ** j * diffs
                worst = float(np.min(signed))
                report.record(max(0.0, -worst),
                              quad.abs_tol * 2.0 ** j, {
                    "sample": i, "e": e.tolist(), "axis": axis + 1,
                    "difference_order": j, "worst": worst})
    return report


def check_positivity(plan, tol=1e-10):
    """H >= 0 and Q >= 0 on probability-region samples.

    Samples classifying outside the probability region (possible under the
    cone strategy) are skipped: positivity through the root formulas is
    only claimed on the e_1 = 1 slice.
    """
    report = VerificationReport(prop="positivity", tolerance=tol)
    for i, e in iter_samples(plan):
        report.samples += 1
        region = cone_membership(e)
        if region not in ("probability-region", "boundary"):
            continue
        try:
            h = entropy_from_elemsym(e)
            q = subentropy_from_elemsym(e)
        except EntrosymError as exc:
            report.record_failure({"sample": i, "e": e.tolist(),
                                   "cause": str(exc)})
            continue
        report.record(max(0.0, -h.value), h.error,
                      {"sample": i, "e": e.tolist(), "H": h.value})
        report.record(max(0.0, -q), 0.0,
                      {"sample": i, "e": e.tolist(), "Q": q})
    return report


ALL_CHECKS = {
    "prop1": check_prop1,
    "prop2": check_prop2_signs,
    "prop3": check_prop3_index_sum,
    "cm": check_complete_monotonicity,
    "positivity": check_positivity,
}
