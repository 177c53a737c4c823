"""Pure-numpy implementations of the hot kernels.

Same algorithms and update ordering as the numba backend, written with
vectorized row/column operations where possible.  Selected by setting
``DRSCREEN_NO_NUMBA=1`` (or used automatically when numba is absent).
"""

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_XSMULT = 0x2545F4914F6CDD1D

STATUS_OK = 0
STATUS_STAGNATED = 1
STATUS_CAP = 2

_POLISH_BUDGET = 50


def _xorshift(state):
    state ^= (state >> 12)
    state &= _MASK64
    state ^= (state << 25) & _MASK64
    state ^= (state >> 27)
    return state & _MASK64


def _shuffle(order, state):
    """Fisher-Yates driven by xorshift64*; matches the numba backend."""
    for i in range(len(order) - 1, 0, -1):
        state = _xorshift(state)
        j = ((state * _XSMULT) & _MASK64) % (i + 1)
        order[i], order[j] = order[j], order[i]
    return state


def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (eigvals, v, sweeps) with ``a ~ v @ diag(eigvals) @ v.T``;
    ``sweeps`` is -1 when the off-diagonal norm is still above ``tol``
    after ``max_sweeps`` sweeps.  ``a`` is not modified.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    offmask = ~np.eye(n, dtype=bool)
    if n == 1:
        return np.array([a[0, 0]]), v, 0
    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(a[offmask]))
        if off <= tol:
            return np.diag(a).copy(), v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                with np.errstate(over="ignore"):
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if float(np.linalg.norm(a[offmask])) <= tol:
        return np.diag(a).copy(), v, max_sweeps
    return np.diag(a).copy(), v, -1


def _hinge_gap(xck, w, lam, alpha, v):
    reg = 0.5 * float(v @ v) / lam
    m = (xck @ v) / lam
    p = reg + float(w @ np.maximum(0.0, 1.0 - m))
    d = float(w @ alpha) - reg
    return p - d


def hinge_l2_cd(xck, w, lam, alpha, v, seed, max_epochs, gap_tol):
    """Dual coordinate ascent for the hinge-loss, L2-regularized model.

    ``alpha`` (box-constrained dual variables) and ``v = (w * xck).T @ alpha``
    are updated in place.  Returns (gap, epochs, status).
    """
    n = xck.shape[0]
    rn2 = np.einsum("ij,ij->i", xck, xck)
    order = np.arange(n)
    state = (int(seed) * 2 + 1) & _MASK64
    budget = _POLISH_BUDGET
    gap = _hinge_gap(xck, w, lam, alpha, v)
    if gap <= gap_tol:
        return gap, 0, STATUS_OK
    epochs = 0
    while epochs < max_epochs:
        state = _shuffle(order, state)
        changed = False
        for t in range(n):
            i = order[t]
            wi = w[i]
            if wi == 0.0:
                continue
            g = 1.0 - float(xck[i] @ v) / lam
            if rn2[i] == 0.0:
                anew = 1.0
            else:
                anew = alpha[i] + lam * g / (wi * rn2[i])
                if anew < 0.0:
                    anew = 0.0
                elif anew > 1.0:
                    anew = 1.0
            delta = anew - alpha[i]
            if delta != 0.0:
                v += (wi * delta) * xck[i]
                alpha[i] = anew
                changed = True
        epochs += 1
        gap = _hinge_gap(xck, w, lam, alpha, v)
        if gap <= gap_tol:
            if not changed or budget <= 0:
                return gap, epochs, STATUS_OK
            budget -= 1
        elif not changed:
            return gap, epochs, STATUS_STAGNATED
    return gap, epochs, STATUS_CAP


def _intercept_min(xck, w, m, beta_d, col):
    """Exact 1-d minimization of sum_i w_i relu(1 - m_i)^2 along ``col``.

    Safeguarded Newton on the monotone piecewise-linear derivative.
    ``m`` is updated in place; returns the new intercept value.
    """
    lo = -np.inf
    hi = np.inf
    t = beta_d
    for _ in range(100):
        u = np.maximum(0.0, 1.0 - m)
        g = -2.0 * float((w * u) @ col)
        if g == 0.0:
            break
        active = (m < 1.0) & (w > 0.0)
        h = 2.0 * float((w[active] * col[active]) @ col[active])
        if h <= 0.0:
            break
        if g > 0.0:
            hi = t
        else:
            lo = t
        tn = t - g / h
        if not (lo < tn < hi):
            if np.isfinite(lo) and np.isfinite(hi):
                tn = 0.5 * (lo + hi)
            else:
                tn = t - g / h
        delta = tn - t
        if delta == 0.0:
            break
        m += delta * col
        t = tn
    return t


def _sqhinge_state(xck, w, lam, beta, m, d):
    u = np.maximum(0.0, 1.0 - m)
    p = float(w @ (u * u)) + lam * float(np.sum(np.abs(beta[: d - 1])))
    theta = (2.0 / lam) * u
    vj = xck[:, : d - 1].T @ (w * theta)
    e = float((w * theta) @ xck[:, d - 1])
    maxv = float(np.max(np.abs(vj))) if d > 1 else 0.0
    viol = max(maxv - 1.0, abs(e), 0.0)
    c = 1.0 / maxv if maxv > 1.0 else 1.0
    la = lam * c * theta
    dval = float(w @ (la - 0.25 * la * la))
    return p - dval, viol


def sqhinge_l1_cd(xck, w, lam, beta, m, max_epochs, gap_tol, feas_tol):
    """Cyclic proximal coordinate descent for the squared-hinge, L1 model.

    Soft-threshold steps on the penalized coordinates, exact Newton
    minimization of the unpenalized intercept (last coordinate).  ``beta``
    and the margins ``m = xck @ beta`` are updated in place.
    Returns (gap, epochs, status).
    """
    n, d = xck.shape
    colh = 2.0 * np.einsum("ij,ij->j", w[:, None] * xck, xck)
    icol = xck[:, d - 1].copy()
    gap, viol = _sqhinge_state(xck, w, lam, beta, m, d)
    if gap <= gap_tol and viol <= feas_tol:
        return gap, 0, STATUS_OK
    budget = _POLISH_BUDGET
    epochs = 0
    while epochs < max_epochs:
        changed = False
        for j in range(d - 1):
            bj = beta[j]
            if colh[j] == 0.0:
                bnew = 0.0
            else:
                u = np.maximum(0.0, 1.0 - m)
                g = -2.0 * float((w * u) @ xck[:, j])
                z = bj - g / colh[j]
                thr = lam / colh[j]
                if z > thr:
                    bnew = z - thr
                elif z < -thr:
                    bnew = z + thr
                else:
                    bnew = 0.0
            delta = bnew - bj
            if delta != 0.0:
                m += delta * xck[:, j]
                beta[j] = bnew
                changed = True
        bd = _intercept_min(xck, w, m, beta[d - 1], icol)
        if bd != beta[d - 1]:
            beta[d - 1] = bd
            changed = True
        epochs += 1
        gap, viol = _sqhinge_state(xck, w, lam, beta, m, d)
        if gap <= gap_tol and viol <= feas_tol:
            if not changed or budget <= 0:
                return gap, epochs, STATUS_OK
            budget -= 1
        elif not changed:
            return gap, epochs, STATUS_STAGNATED
    return gap, epochs, STATUS_CAP
