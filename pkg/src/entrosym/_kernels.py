"""Low-level numeric kernels with a numba fast path and a numpy fallback.

The hot loops of the package live here: adaptive Gauss-Kronrod panels for
rational integrands, equispaced trapezoid sums on circular contours, and the
Aberth-Ehrlich simultaneous root polish.  When numba is importable the
scalar-loop variants are JIT compiled (cached to disk); setting the
environment variable ``ENTROSYM_DISABLE_NUMBA=1`` before import selects the
vectorized pure-numpy implementations instead.  Both paths compute identical
quantities; ``benchmarks/bench_kernels.py`` times them side by side.

Adaptive integrators return ``(value, error_sum, evals, status)`` with
status 0 = converged, 1 = evaluation budget exhausted, 2 = panel stack full.
Panel bookkeeping is kept in fixed insertion order so the final summation is
deterministic.
"""

import os

import numpy as np

_ENV_DISABLE = os.environ.get("ENTROSYM_DISABLE_NUMBA", "").strip().lower()
NUMBA_ENABLED = _ENV_DISABLE not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        import numba
    except ImportError:   # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

# Gauss-Kronrod (G7, K15) constants, QUADPACK values.  Full 15-node arrays in
# ascending order; _WG15 carries the embedded Gauss weights with zeros at the
# Kronrod-only nodes so one pass accumulates both rules.
_XGK_HALF = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK_HALF = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG_HALF = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

XGK15 = np.concatenate([-_XGK_HALF[:-1], _XGK_HALF[::-1]])
WGK15 = np.concatenate([_WGK_HALF[:-1], _WGK_HALF[::-1]])
WG15 = np.zeros(15)
WG15[1:14:2] = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])

_STACK_CAP = 2048


# ---------------------------------------------------------------------------
# scalar-loop implementations (numba targets; also runnable as plain python)
# ---------------------------------------------------------------------------

def _gk_panel_scalar(coeffs, apow, lo, hi):
    mid = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    acc_k = 0.0
    acc_g = 0.0
    for i in range(15):
        t = mid + h * XGK15[i]
        p = coeffs[0]
        for j in range(1, coeffs.shape[0]):
            p = p * t + coeffs[j]
        v = t ** apow / p
        acc_k += WGK15[i] * v
        acc_g += WG15[i] * v
    val = h * acc_k
    return val, abs(val - h * acc_g)


def _adaptive_gk_scalar(coeffs, apow, lo, hi, abs_tol, rel_tol, max_evals):
    los = np.empty(_STACK_CAP)
    his = np.empty(_STACK_CAP)
    vals = np.empty(_STACK_CAP)
    errs = np.empty(_STACK_CAP)
    los[0] = lo
    his[0] = hi
    v, e = _gk_panel_scalar(coeffs, apow, lo, hi)
    vals[0] = v
    errs[0] = e
    n = 1
    evals = 15
    while True:
        total = 0.0
        err_sum = 0.0
        worst = 0
        for i in range(n):
            total += vals[i]
            err_sum += errs[i]
            if errs[i] > errs[worst]:
                worst = i
        if err_sum <= max(abs_tol, rel_tol * abs(total)):
            return total, err_sum, evals, 0
        if evals + 30 > max_evals:
            return total, err_sum, evals, 1
        if n >= _STACK_CAP:
            return total, err_sum, evals, 2
        a = los[worst]
        b = his[worst]
        m = 0.5 * (a + b)
        v1, e1 = _gk_panel_scalar(coeffs, apow, a, m)
        v2, e2 = _gk_panel_scalar(coeffs, apow, m, b)
        los[worst] = a
        his[worst] = m
        vals[worst] = v1
        errs[worst] = e1
        los[n] = m
        his[n] = b
        vals[n] = v2
        errs[n] = e2
        n += 1
        evals += 30


def _contour_sum_scalar(coeffs, center, radius, n, apow, logpow, mult, sign):
    acc = 0.0 + 0.0j
    two_pi = 2.0 * np.pi
    for j in range(n):
        th = two_pi * j / n
        rot = np.exp(1j * th)
        z = center + radius * rot
        p = coeffs[0] + 0.0j
        for i in range(1, coeffs.shape[0]):
            p = p * z + coeffs[i]
        w = z ** apow
        if logpow == 1:
            w = w * np.log(z)
        pm = p
        for _ in range(1, mult):
            pm = pm * p
        acc += w / pm * rot
    return sign * radius * acc / n


def _aberth_scalar(coeffs, roots, rtol, max_iter):
    deg = coeffs.shape[0] - 1
    dcoeffs = np.empty(deg)
    for i in range(deg):
        dcoeffs[i] = coeffs[i] * (deg - i)
    cur = roots.copy()
    best = roots.copy()
    best_res = 1e300
    iters = 0
    for it in range(max_iter + 1):
        res = 0.0
        for i in range(deg):
            z = cur[i]
            p = coeffs[0] + 0.0j
            scale = abs(coeffs[0])
            az = abs(z)
            for j in range(1, deg + 1):
                p = p * z + coeffs[j]
                scale = scale * az + abs(coeffs[j])
            r = abs(p) / max(scale, 1e-300)
            if r > res:
                res = r
        if res < best_res:
            best_res = res
            for i in range(deg):
                best[i] = cur[i]
        iters = it
        if best_res <= rtol or it == max_iter:
            break
        for i in range(deg):
            z = cur[i]
            p = coeffs[0] + 0.0j
            for j in range(1, deg + 1):
                p = p * z + coeffs[j]
            dp = dcoeffs[0] + 0.0j
            for j in range(1, deg):
                dp = dp * z + dcoeffs[j]
            if abs(dp) < 1e-300:
                continue
            w = p / dp
            s = 0.0 + 0.0j
            ok = True
            for j in range(deg):
                if j != i:
                    dz = z - cur[j]
                    if abs(dz) < 1e-300:
                        ok = False
                        break
                    s += 1.0 / dz
            if not ok:
                continue
            den = 1.0 - w * s
            if abs(den) < 1e-300:
                continue
            cur[i] = z - w / den
    return best, best_res, iters


# ---------------------------------------------------------------------------
# vectorized numpy implementations (fallback path)
# ---------------------------------------------------------------------------

def _gk_panel_numpy(coeffs, apow, lo, hi):
    mid = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    t = mid + h * XGK15
    v = t ** apow / np.polyval(coeffs, t)
    val = h * float(WGK15 @ v)
    return val, abs(val - h * float(WG15 @ v))


def _adaptive_gk_numpy(coeffs, apow, lo, hi, abs_tol, rel_tol, max_evals):
    v, e = _gk_panel_numpy(coeffs, apow, lo, hi)
    los = [lo]
    his = [hi]
    vals = [v]
    errs = [e]
    evals = 15
    total = v
    err_sum = e
    while True:
        if err_sum <= max(abs_tol, rel_tol * abs(total)):
            total = float(np.sum(vals))
            err_sum = float(np.sum(errs))
            if err_sum <= max(abs_tol, rel_tol * abs(total)):
                return total, err_sum, evals, 0
        if evals + 30 > max_evals:
            return float(np.sum(vals)), float(np.sum(errs)), evals, 1
        if len(vals) >= _STACK_CAP:
            return float(np.sum(vals)), float(np.sum(errs)), evals, 2
        worst = int(np.argmax(errs))
        a, b = los[worst], his[worst]
        m = 0.5 * (a + b)
        v1, e1 = _gk_panel_numpy(coeffs, apow, a, m)
        v2, e2 = _gk_panel_numpy(coeffs, apow, m, b)
        total += v1 + v2 - vals[worst]
        err_sum += e1 + e2 - errs[worst]
        his[worst] = m
        vals[worst] = v1
        errs[worst] = e1
        los.append(m)
        his.append(b)
        vals.append(v2)
        errs.append(e2)
        evals += 30


def _contour_sum_numpy(coeffs, center, radius, n, apow, logpow, mult, sign):
    th = 2.0 * np.pi * np.arange(n) / n
    rot = np.exp(1j * th)
    z = center + radius * rot
    p = np.polyval(coeffs.astype(np.complex128), z)
    w = z ** apow
    if logpow == 1:
        w = w * np.log(z)
    return sign * radius * np.sum(w / p ** mult * rot) / n


def _aberth_numpy(coeffs, roots, rtol, max_iter):
    deg = len(coeffs) - 1
    dcoeffs = coeffs[:-1] * np.arange(deg, 0, -1)
    cur = roots.copy()
    best = roots.copy()
    best_res = np.inf
    iters = 0
    for it in range(max_iter + 1):
        p = np.polyval(coeffs.astype(np.complex128), cur)
        scale = np.polyval(np.abs(coeffs), np.abs(cur))
        res = float(np.max(np.abs(p) / np.maximum(scale, 1e-300)))
        if res < best_res:
            best_res = res
            best = cur.copy()
        iters = it
        if best_res <= rtol or it == max_iter:
            break
        dp = np.polyval(dcoeffs.astype(np.complex128), cur)
        w = np.where(np.abs(dp) > 1e-300, p / np.where(dp == 0, 1, dp), 0.0)
        diff = cur[:, None] - cur[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        den = 1.0 - w * s
        step = np.where(np.abs(den) > 1e-300, w / np.where(den == 0, 1, den), 0.0)
        cur = cur - step
    return best, best_res, iters


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    _gk_panel_scalar = numba.njit(cache=True)(_gk_panel_scalar)
    _adaptive_gk_numba = numba.njit(cache=True)(_adaptive_gk_scalar)
    _contour_sum_numba = numba.njit(cache=True)(_contour_sum_scalar)
    _aberth_numba = numba.njit(cache=True)(_aberth_scalar)

    adaptive_power_rational = _adaptive_gk_numba
    contour_sum = _contour_sum_numba
    aberth_polish = _aberth_numba
else:
    adaptive_power_rational = _adaptive_gk_numpy
    contour_sum = _contour_sum_numpy
    aberth_polish = _aberth_numpy


def warmup():
    """Trigger JIT compilation of every kernel (no-op on the numpy path)."""
    c = np.array([1.0, 1.0, 0.25])
    adaptive_power_rational(c, 0, 0.0, 1.0, 1e-8, 1e-8, 10_000)
    contour_sum(np.array([1.0, -1.0, 0.1875]), 0.5, 0.375, 16, 1, 1, 1, 1.0)
    aberth_polish(np.array([1.0, -1.0, 0.1875]),
                  np.array([0.26 + 0j, 0.74 + 0j]), 1e-12, 8)
