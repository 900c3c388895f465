"""Hot elementwise kernels, compiled with numba when available.

Every kernel exists twice: a pure-numpy implementation (suffix ``_numpy``)
and an ``@njit`` version compiled from a scalar loop. The active backend is
chosen once at import time: set ``LBCREG_BACKEND=numpy`` to force the
fallback, anything else (or unset) uses numba if it imports. Matrix products
are not handled here; they go through numpy's BLAS on either path.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

BACKEND_ENV_VAR = "LBCREG_BACKEND"


def _numba_requested() -> bool:
    return os.environ.get(BACKEND_ENV_VAR, "numba").strip().lower() != "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def sigmoid_numpy(x):
    """Numerically stable logistic function."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus_numpy(x):
    """log(1 + exp(x)) without overflow for large |x|."""
    return np.logaddexp(0.0, x)


def adam_update_numpy(p, g, m, v, t, lr, beta1, beta2, eps):
    """Bias-corrected adaptive-moment step, in place on flat float64 views."""
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * g * g
    p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


def cumulative_softplus_numpy(z):
    """Row-wise cumulative sum of softplus(z); positive and non-decreasing."""
    return np.cumsum(np.logaddexp(0.0, z), axis=1)


def cumulative_softplus_grad_numpy(z, upstream):
    """Backprop through cumulative softplus: dz = sigmoid(z) * revcumsum(upstream)."""
    rev = np.cumsum(upstream[:, ::-1], axis=1)[:, ::-1]
    return sigmoid_numpy(z) * rev


def smooth_coverage_numpy(y, y_hat, delta, k):
    """Product-of-sigmoids surrogate for the interval membership indicator."""
    lo = k * (y - (y_hat - delta))
    hi = k * ((y_hat + delta) - y)
    return sigmoid_numpy(lo) * sigmoid_numpy(hi)


def interval_loss_core_numpy(y, y_hat, delta, alpha, k, lam1, lam2):
    """Per-level width-estimator loss and its gradient w.r.t. the widths.

    loss = |alpha - mean(I~)| + mean(lam1*|y_hat+delta-y| + lam2*|y-(y_hat-delta)|)
    with I~ the smooth coverage surrogate. Returns (loss, grad_delta).
    """
    n = y.shape[0]
    lo = k * (y - (y_hat - delta))
    hi = k * ((y_hat + delta) - y)
    sa = sigmoid_numpy(lo)
    sb = sigmoid_numpy(hi)
    cov = float(np.mean(sa * sb))
    over = y_hat + delta - y
    under = y - (y_hat - delta)
    reg = lam1 * np.abs(over) + lam2 * np.abs(under)
    loss = abs(alpha - cov) + float(np.mean(reg))
    s = np.sign(alpha - cov)
    d_cov = k * (sa * (1.0 - sa) * sb + sa * sb * (1.0 - sb))
    d_reg = lam1 * np.sign(over) + lam2 * np.sign(under)
    grad = (-s * d_cov + d_reg) / n
    return loss, grad


def hinge_loss_core_numpy(y, y_hat, delta, tau, w_eps):
    """Width-weighted two-sided hinge loss and its gradient w.r.t. the means.

    Weights w_i = delta_i / sum(delta) push the mean hardest where intervals
    are widest. Returns (loss, grad_y_hat).
    """
    wsum = float(np.sum(delta))
    if wsum < w_eps:
        wsum = w_eps
    w = delta / wsum
    lo = (y_hat - delta) - y + tau
    hi = y - (y_hat + delta) + tau
    loss = float(np.sum(w * (np.maximum(0.0, lo) + np.maximum(0.0, hi))))
    grad = w * ((lo > 0.0).astype(np.float64) - (hi > 0.0).astype(np.float64))
    return loss, grad


def gaussian_nll_core_numpy(mu, raw_logvar, y, floor):
    """Mean Gaussian negative log-likelihood with a floored log-variance head.

    Returns (loss, grad_mu, grad_logvar); the floor zeroes the log-variance
    gradient where it binds.
    """
    n = y.shape[0]
    s = np.maximum(raw_logvar, floor)
    var = np.exp(s)
    r = mu - y
    loss = float(np.mean(0.5 * (r * r / var + s)))
    grad_mu = r / var / n
    grad_s = np.where(raw_logvar > floor, 0.5 * (1.0 - r * r / var) / n, 0.0)
    return loss, grad_mu, grad_s


_NUMPY_IMPLS = {
    "sigmoid": sigmoid_numpy,
    "softplus": softplus_numpy,
    "adam_update": adam_update_numpy,
    "cumulative_softplus": cumulative_softplus_numpy,
    "cumulative_softplus_grad": cumulative_softplus_grad_numpy,
    "smooth_coverage": smooth_coverage_numpy,
    "interval_loss_core": interval_loss_core_numpy,
    "hinge_loss_core": hinge_loss_core_numpy,
    "gaussian_nll_core": gaussian_nll_core_numpy,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _build_numba_impls():
    from numba import njit

    @njit(cache=True)
    def _sigmoid_scalar(x):
        if x >= 0.0:
            return 1.0 / (1.0 + math.exp(-x))
        ex = math.exp(x)
        return ex / (1.0 + ex)

    @njit(cache=True)
    def _softplus_scalar(x):
        # log1p(exp(x)) for x <= 0, x + log1p(exp(-x)) otherwise
        if x > 0.0:
            return x + math.log1p(math.exp(-x))
        return math.log1p(math.exp(x))

    @njit(cache=True)
    def _sigmoid_flat(x):
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            out[i] = _sigmoid_scalar(x[i])
        return out

    @njit(cache=True)
    def _softplus_flat(x):
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            out[i] = _softplus_scalar(x[i])
        return out

    # thin reshaping wrappers so the jitted loops only ever see 1-D input
    def sigmoid_nb(x):
        x = np.asarray(x, dtype=np.float64)
        return _sigmoid_flat(np.ascontiguousarray(x).reshape(-1)).reshape(x.shape)

    def softplus_nb(x):
        x = np.asarray(x, dtype=np.float64)
        return _softplus_flat(np.ascontiguousarray(x).reshape(-1)).reshape(x.shape)

    @njit(cache=True)
    def adam_update_nb(p, g, m, v, t, lr, beta1, beta2, eps):
        c1 = 1.0 - beta1 ** t
        c2 = 1.0 - beta2 ** t
        for i in range(p.shape[0]):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i]
            p[i] -= lr * (m[i] / c1) / (math.sqrt(v[i] / c2) + eps)

    @njit(cache=True)
    def cumulative_softplus_nb(z):
        n, L = z.shape
        out = np.empty((n, L))
        for i in range(n):
            acc = 0.0
            for j in range(L):
                acc += _softplus_scalar(z[i, j])
                out[i, j] = acc
        return out

    @njit(cache=True)
    def cumulative_softplus_grad_nb(z, upstream):
        n, L = z.shape
        out = np.empty((n, L))
        for i in range(n):
            acc = 0.0
            for j in range(L - 1, -1, -1):
                acc += upstream[i, j]
                out[i, j] = _sigmoid_scalar(z[i, j]) * acc
        return out

    @njit(cache=True)
    def smooth_coverage_nb(y, y_hat, delta, k):
        n = y.shape[0]
        out = np.empty(n)
        for i in range(n):
            lo = k * (y[i] - (y_hat[i] - delta[i]))
            hi = k * ((y_hat[i] + delta[i]) - y[i])
            out[i] = _sigmoid_scalar(lo) * _sigmoid_scalar(hi)
        return out

    @njit(cache=True)
    def interval_loss_core_nb(y, y_hat, delta, alpha, k, lam1, lam2):
        n = y.shape[0]
        sa = np.empty(n)
        sb = np.empty(n)
        cov = 0.0
        reg = 0.0
        for i in range(n):
            a = _sigmoid_scalar(k * (y[i] - (y_hat[i] - delta[i])))
            b = _sigmoid_scalar(k * ((y_hat[i] + delta[i]) - y[i]))
            sa[i] = a
            sb[i] = b
            cov += a * b
            reg += lam1 * abs(y_hat[i] + delta[i] - y[i]) + lam2 * abs(y[i] - (y_hat[i] - delta[i]))
        cov /= n
        loss = abs(alpha - cov) + reg / n
        s = np.sign(alpha - cov)
        grad = np.empty(n)
        for i in range(n):
            d_cov = k * (sa[i] * (1.0 - sa[i]) * sb[i] + sa[i] * sb[i] * (1.0 - sb[i]))
            d_reg = lam1 * np.sign(y_hat[i] + delta[i] - y[i]) + lam2 * np.sign(y[i] - (y_hat[i] - delta[i]))
            grad[i] = (-s * d_cov + d_reg) / n
        return loss, grad

    @njit(cache=True)
    def hinge_loss_core_nb(y, y_hat, delta, tau, w_eps):
        n = y.shape[0]
        wsum = 0.0
        for i in range(n):
            wsum += delta[i]
        if wsum < w_eps:
            wsum = w_eps
        loss = 0.0
        grad = np.empty(n)
        for i in range(n):
            w = delta[i] / wsum
            lo = (y_hat[i] - delta[i]) - y[i] + tau
            hi = y[i] - (y_hat[i] + delta[i]) + tau
            acc = 0.0
            g = 0.0
            if lo > 0.0:
                acc += lo
                g += 1.0
            if hi > 0.0:
                acc += hi
                g -= 1.0
            loss += w * acc
            grad[i] = w * g
        return loss, grad

    @njit(cache=True)
    def gaussian_nll_core_nb(mu, raw_logvar, y, floor):
        n = y.shape[0]
        loss = 0.0
        grad_mu = np.empty(n)
        grad_s = np.empty(n)
        for i in range(n):
            s = raw_logvar[i] if raw_logvar[i] > floor else floor
            var = math.exp(s)
            r = mu[i] - y[i]
            loss += 0.5 * (r * r / var + s)
            grad_mu[i] = r / var / n
            grad_s[i] = 0.5 * (1.0 - r * r / var) / n if raw_logvar[i] > floor else 0.0
        return loss / n, grad_mu, grad_s

    return {
        "sigmoid": sigmoid_nb,
        "softplus": softplus_nb,
        "adam_update": adam_update_nb,
        "cumulative_softplus": cumulative_softplus_nb,
        "cumulative_softplus_grad": cumulative_softplus_grad_nb,
        "smooth_coverage": smooth_coverage_nb,
        "interval_loss_core": interval_loss_core_nb,
        "hinge_loss_core": hinge_loss_core_nb,
        "gaussian_nll_core": gaussian_nll_core_nb,
    }


_NUMBA_IMPLS = None
if _numba_requested():
    try:
        _NUMBA_IMPLS = _build_numba_impls()
    except ImportError:
        _NUMBA_IMPLS = None

ACTIVE_BACKEND = "numba" if _NUMBA_IMPLS is not None else "numpy"
_ACTIVE = _NUMBA_IMPLS if _NUMBA_IMPLS is not None else _NUMPY_IMPLS

sigmoid = _ACTIVE["sigmoid"]
softplus = _ACTIVE["softplus"]
adam_update = _ACTIVE["adam_update"]
cumulative_softplus = _ACTIVE["cumulative_softplus"]
cumulative_softplus_grad = _ACTIVE["cumulative_softplus_grad"]
smooth_coverage = _ACTIVE["smooth_coverage"]
interval_loss_core = _ACTIVE["interval_loss_core"]
hinge_loss_core = _ACTIVE["hinge_loss_core"]
gaussian_nll_core = _ACTIVE["gaussian_nll_core"]


def backend_impls():
    """Both implementation tables, for tests and benchmarks.

    Returns (numpy_impls, numba_impls_or_None); the numba table is built on
    demand even when the numpy backend is active.
    """
    global _NUMBA_IMPLS
    if _NUMBA_IMPLS is None:
        try:
            _NUMBA_IMPLS = _build_numba_impls()
        except ImportError:
            pass
    return _NUMPY_IMPLS, _NUMBA_IMPLS
