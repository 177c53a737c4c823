"""Numba-compiled hot kernels.

Mirrors numpy_backend function-for-function; scalar inner loops compiled
with ``@njit``.  Compilation results are cached on disk.
"""

import numpy as np
from numba import njit, uint64

STATUS_OK = 0
STATUS_STAGNATED = 1
STATUS_CAP = 2

_POLISH_BUDGET = 50

_XSMULT = uint64(0x2545F4914F6CDD1D)


@njit(cache=True)
def _xorshift(state):
    state ^= state >> uint64(12)
    state ^= state << uint64(25)
    state ^= state >> uint64(27)
    return state


@njit(cache=True)
def _shuffle(order, state):
    for i in range(order.shape[0] - 1, 0, -1):
        state = _xorshift(state)
        j = int((state * _XSMULT) % uint64(i + 1))
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp
    return state


@njit(cache=True)
def _offdiag_norm(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return np.sqrt(acc)


@njit(cache=True)
def jacobi_eigh(a_in, tol, max_sweeps):
    a = a_in.copy()
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), v, 0
    for sweep in range(max_sweeps):
        if _offdiag_norm(a) <= tol:
            d = np.empty(n)
            for i in range(n):
                d[i] = a[i, i]
            return d, v, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i]
    if _offdiag_norm(a) <= tol:
        return d, v, max_sweeps
    return d, v, -1


@njit(cache=True)
def _hinge_gap(xck, w, lam, alpha, v):
    n, d = xck.shape
    vv = 0.0
    for j in range(d):
        vv += v[j] * v[j]
    reg = 0.5 * vv / lam
    p = reg
    dv = -reg
    for i in range(n):
        m = 0.0
        for j in range(d):
            m += xck[i, j] * v[j]
        m /= lam
        u = 1.0 - m
        if u > 0.0:
            p += w[i] * u
        dv += w[i] * alpha[i]
    return p - dv


@njit(cache=True)
def hinge_l2_cd(xck, w, lam, alpha, v, seed, max_epochs, gap_tol):
    n, d = xck.shape
    rn2 = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += xck[i, j] * xck[i, j]
        rn2[i] = acc
    order = np.arange(n)
    state = uint64(seed) * uint64(2) + uint64(1)
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
            m = 0.0
            for j in range(d):
                m += xck[i, j] * v[j]
            g = 1.0 - m / lam
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
                wd = wi * delta
                for j in range(d):
                    v[j] += wd * xck[i, j]
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


@njit(cache=True)
def _intercept_min(w, m, beta_d, col):
    n = m.shape[0]
    lo = -np.inf
    hi = np.inf
    t = beta_d
    for _ in range(100):
        g = 0.0
        h = 0.0
        for i in range(n):
            u = 1.0 - m[i]
            if u > 0.0:
                g -= 2.0 * w[i] * u * col[i]
                h += 2.0 * w[i] * col[i] * col[i]
        if g == 0.0 or h <= 0.0:
            break
        if g > 0.0:
            hi = t
        else:
            lo = t
        tn = t - g / h
        if not (lo < tn < hi):
            if np.isfinite(lo) and np.isfinite(hi):
                tn = 0.5 * (lo + hi)
        delta = tn - t
        if delta == 0.0:
            break
        for i in range(n):
            m[i] += delta * col[i]
        t = tn
    return t


@njit(cache=True)
def _sqhinge_state(xck, w, lam, beta, m, d):
    n = m.shape[0]
    p = 0.0
    for i in range(n):
        u = 1.0 - m[i]
        if u > 0.0:
            p += w[i] * u * u
    for j in range(d - 1):
        p += lam * abs(beta[j])
    maxv = 0.0
    for j in range(d - 1):
        acc = 0.0
        for i in range(n):
            u = 1.0 - m[i]
            if u > 0.0:
                acc += w[i] * (2.0 / lam) * u * xck[i, j]
        if abs(acc) > maxv:
            maxv = abs(acc)
    e = 0.0
    for i in range(n):
        u = 1.0 - m[i]
        if u > 0.0:
            e += w[i] * (2.0 / lam) * u * xck[i, d - 1]
    viol = max(maxv - 1.0, abs(e))
    if viol < 0.0:
        viol = 0.0
    c = 1.0 / maxv if maxv > 1.0 else 1.0
    dval = 0.0
    for i in range(n):
        u = 1.0 - m[i]
        if u > 0.0:
            la = 2.0 * c * u
            dval += w[i] * (la - 0.25 * la * la)
    return p - dval, viol


@njit(cache=True)
def sqhinge_l1_cd(xck, w, lam, beta, m, max_epochs, gap_tol, feas_tol):
    n, d = xck.shape
    colh = np.empty(d)
    for j in range(d):
        acc = 0.0
        for i in range(n):
            acc += w[i] * xck[i, j] * xck[i, j]
        colh[j] = 2.0 * acc
    icol = np.empty(n)
    for i in range(n):
        icol[i] = xck[i, d - 1]
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
                g = 0.0
                for i in range(n):
                    u = 1.0 - m[i]
                    if u > 0.0:
                        g -= 2.0 * w[i] * u * xck[i, j]
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
                for i in range(n):
                    m[i] += delta * xck[i, j]
                beta[j] = bnew
                changed = True
        bd = _intercept_min(w, m, beta[d - 1], icol)
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
