"""Exact maximization of w.T A w + 2 b.T w over the ball |w - c|_2 <= S.

A is symmetric PSD.  The maximizer sits on the boundary sphere; Lagrange
stationarity reduces, in the eigenbasis of A, to the secular equation

    T(nu) = sum_i (xi_i / (nu - phi_i))^2 = S^2,

whose roots parameterize the nonsingular stationary points.  Eigenvalues
whose whole eigenspace has xi = 0 contribute singular candidates where the
leftover norm budget is spent along the eigenspace by the linear-over-ball
lemma.  The largest candidate wins.

A may be given dense, as a low-rank factor G (A = G G.T, eigenpairs taken
from the k x k Gram matrix, the zero eigenspace kept implicit), or as the
diagonal of a diagonal matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import sym_eigendecompose

_XI_CLIP = 1e-12
_CLUSTER_TOL = 1e-9
_GAP_EPS = 1e-10
_TANGENT_TOL = 1e-10
_WIDTH_TOL = 1e-14
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class BallmaxError(ValueError):
    pass


@dataclass(frozen=True)
class SecularProblem:
    """Coordinates of T(nu): eigenvalues, transformed offsets, radius.

    ``phi`` is sorted ascending; ``xi`` is aligned with it and holds exact
    zeros outside ``active`` (tiny entries are clipped at build time since
    they would create spurious near-poles).
    """

    phi: np.ndarray
    xi: np.ndarray
    radius: float
    active: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, phi, xi, radius):
        phi = np.asarray(phi, dtype=np.float64)
        xi = np.array(xi, dtype=np.float64, copy=True)
        if phi.shape != xi.shape or phi.ndim != 1:
            raise BallmaxError(
                f"phi and xi shapes differ: {phi.shape} vs {xi.shape}"
            )
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(xi))):
            raise BallmaxError("non-finite secular coordinates")
        if not (radius > 0.0 and math.isfinite(radius)):
            raise BallmaxError(f"radius must be positive, got {radius}")
        order = np.argsort(phi, kind="stable")
        phi = phi[order]
        xi = xi[order]
        if xi.size:
            thr = _XI_CLIP * (1.0 + float(np.max(np.abs(xi))))
            xi[np.abs(xi) <= thr] = 0.0
        active = np.flatnonzero(xi != 0.0)
        return cls(phi, xi, float(radius), active)


def secular_eval(problem, nu):
    """T(nu) over the active coordinates; errors at an active pole."""
    ph = problem.phi[problem.active]
    xs = problem.xi[problem.active]
    if np.any(ph == nu):
        raise BallmaxError(f"nu = {nu} coincides with an active pole")
    r = xs / (nu - ph)
    return float(r @ r)


def _t_batch(ph, xs, nus):
    """T evaluated at a vector of nu values, (B,) -> (B,)."""
    r = xs[None, :] / (nus[:, None] - ph[None, :])
    return np.einsum("ij,ij->i", r, r)


def _t_prime_batch(ph, xs, nus):
    diff = nus[:, None] - ph[None, :]
    return -2.0 * np.sum((xs[None, :] ** 2) / diff**3, axis=1)


def _shrink_edge(ph, xs, pole, edge, target):
    """Pull a bracket edge toward its pole until T(edge) >= target."""
    for _ in range(80):
        t = float(np.sum((xs / (edge - ph)) ** 2))
        if t >= target or edge == pole:
            return edge
        edge = pole + (edge - pole) / 16.0
    return edge


def _golden_scan(ph, xs, lo, hi, s2):
    """Classify every open inter-pole gap (lo_k, hi_k) of the convex T.

    Vectorized golden-section search for the interior minimizer of each
    gap, with an early exit as soon as any probe certifies T < s2 (two
    roots exist there regardless of where the exact minimum lies).
    Returns (kind, nu_split) arrays; kind is 0 none, 1 tangency, 2 split.
    """
    a = lo.copy()
    b = hi.copy()
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = _t_batch(ph, xs, x1)
    f2 = _t_batch(ph, xs, x2)
    kind = np.zeros(lo.shape[0], dtype=np.int64)
    split = np.zeros(lo.shape[0])
    open_mask = np.ones(lo.shape[0], dtype=bool)
    for _ in range(80):
        bingo = open_mask & (np.minimum(f1, f2) < s2 - _TANGENT_TOL)
        if np.any(bingo):
            kind[bingo] = 2
            split[bingo] = np.where(f1[bingo] <= f2[bingo], x1[bingo], x2[bingo])
            open_mask &= ~bingo
        scale = _WIDTH_TOL * (1.0 + np.maximum(np.abs(a), np.abs(b)))
        open_mask &= (b - a) > scale
        if not np.any(open_mask):
            break
        go_left = f1 < f2
        an = np.where(go_left, a, x1)
        bn = np.where(go_left, x2, b)
        newx = np.where(go_left, bn - _INVPHI * (bn - an), an + _INVPHI * (bn - an))
        newf = _t_batch(ph, xs, newx)
        x1n = np.where(go_left, newx, x2)
        f1n = np.where(go_left, newf, f2)
        x2n = np.where(go_left, x1, newx)
        f2n = np.where(go_left, f1, newf)
        a = np.where(open_mask, an, a)
        b = np.where(open_mask, bn, b)
        x1 = np.where(open_mask, x1n, x1)
        x2 = np.where(open_mask, x2n, x2)
        f1 = np.where(open_mask, f1n, f1)
        f2 = np.where(open_mask, f2n, f2)
    mid = 0.5 * (a + b)
    fm = _t_batch(ph, xs, mid)
    undecided = kind == 0
    tangent = undecided & (np.abs(fm - s2) <= _TANGENT_TOL)
    two = undecided & (fm < s2 - _TANGENT_TOL)
    kind[tangent] = 1
    kind[two] = 2
    split[tangent | two] = mid[tangent | two]
    return kind, split


def _refine(ph, xs, lo, hi, s2):
    """Vectorized bisection plus Newton polish inside sign-change brackets."""
    if lo.size == 0:
        return lo
    flo = _t_batch(ph, xs, lo) - s2
    a = lo.copy()
    b = hi.copy()
    for _ in range(90):
        mid = 0.5 * (a + b)
        fm = _t_batch(ph, xs, mid) - s2
        same = (fm > 0.0) == (flo > 0.0)
        a = np.where(same, mid, a)
        flo = np.where(same, fm, flo)
        b = np.where(same, b, mid)
        width = b - a
        if np.all(width <= _WIDTH_TOL * (1.0 + np.abs(mid))):
            break
    nu = 0.5 * (a + b)
    for _ in range(4):
        f = _t_batch(ph, xs, nu) - s2
        fp = _t_prime_batch(ph, xs, nu)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(fp != 0.0, f / fp, 0.0)
        cand = nu - step
        inside = (cand > a) & (cand < b)
        nu = np.where(inside & np.isfinite(cand), cand, nu)
    return nu


def secular_roots(problem):
    """All solutions of T(nu) = S^2, in ascending order.

    One root left of the smallest active pole, one right of the largest;
    every open gap between distinct active poles contributes two roots,
    one tangency root, or none according to the interior minimum of the
    convex T there.  Empty when no coordinate is active.
    """
    act = problem.active
    if act.size == 0:
        return np.empty(0)
    ph = problem.phi[act]
    xs = problem.xi[act]
    s = problem.radius
    s2 = s * s
    xnorm = float(np.linalg.norm(xs))

    lo_list = []
    hi_list = []
    left_hi = _shrink_edge(ph, xs, ph[0], ph[0] - abs(xs[0]) / s, s2)
    lo_list.append(ph[0] - xnorm / s)
    hi_list.append(left_hi)
    right_lo = _shrink_edge(ph, xs, ph[-1], ph[-1] + abs(xs[-1]) / s, s2)
    lo_list.append(right_lo)
    hi_list.append(ph[-1] + xnorm / s)

    exact = []
    gap_lo = []
    gap_hi = []
    gap_pole = []
    for k in range(ph.size - 1):
        if ph[k + 1] <= ph[k]:
            continue
        eps = _GAP_EPS * (1.0 + max(abs(ph[k]), abs(ph[k + 1])))
        width = ph[k + 1] - ph[k]
        if width <= 4.0 * eps:
            continue
        # the two adjacent pole terms alone lower-bound the convex T over
        # the gap by (|xi_k|^(2/3) + |xi_k+1|^(2/3))^3 / width^2; gaps whose
        # bound clears S^2 provably hold no roots
        lb = (abs(xs[k]) ** (2.0 / 3.0) + abs(xs[k + 1]) ** (2.0 / 3.0)) ** 3
        if lb / (width * width) > s2 + 2.0 * _TANGENT_TOL:
            continue
        gap_lo.append(ph[k] + eps)
        gap_hi.append(ph[k + 1] - eps)
        gap_pole.append((ph[k], ph[k + 1]))
    if gap_lo:
        glo = np.asarray(gap_lo)
        ghi = np.asarray(gap_hi)
        kind, split = _golden_scan(ph, xs, glo, ghi, s2)
        for i in range(glo.size):
            if kind[i] == 1:
                exact.append(split[i])
            elif kind[i] == 2:
                left = _shrink_edge(ph, xs, gap_pole[i][0], glo[i], s2)
                right = _shrink_edge(ph, xs, gap_pole[i][1], ghi[i], s2)
                lo_list.extend([left, split[i]])
                hi_list.extend([split[i], right])

    lo = np.asarray(lo_list)
    hi = np.asarray(hi_list)
    degenerate = lo >= hi
    roots = list(np.asarray(exact, dtype=np.float64))
    if np.any(degenerate):
        roots.extend(lo[degenerate])
    lo = lo[~degenerate]
    hi = hi[~degenerate]
    roots.extend(_refine(ph, xs, lo, hi, s2))
    out = np.sort(np.asarray(roots, dtype=np.float64))
    return out


@dataclass(frozen=True)
class QuadBallProblem:
    """Ball-constrained quadratic max; exactly one of a/factor/diagonal set.

    ``factor`` means A = factor @ factor.T with far fewer columns than
    rows; only the small Gram matrix is eigendecomposed and the zero
    eigenspace stays implicit.
    """

    b: np.ndarray
    center: np.ndarray
    radius: float
    a: np.ndarray = None
    factor: np.ndarray = None
    diagonal: np.ndarray = None

    def __post_init__(self):
        forms = sum(x is not None for x in (self.a, self.factor, self.diagonal))
        if forms != 1:
            raise BallmaxError("give exactly one of a, factor, diagonal")
        b = np.asarray(self.b, dtype=np.float64)
        center = np.asarray(self.center, dtype=np.float64)
        if b.shape != center.shape or b.ndim != 1:
            raise BallmaxError("b and center must be same-length vectors")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise BallmaxError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "center", center)

    @property
    def n(self):
        return self.b.shape[0]


class MaxQuadResult(tuple):
    """(value, argmax) tuple that also carries the multiplier and branch."""

    def __new__(cls, value, argmax, nu, branch):
        self = tuple.__new__(cls, (value, argmax))
        self.value = value
        self.argmax = argmax
        self.nu = nu
        self.branch = branch
        return self


def _explicit_spectrum(problem):
    """Eigen data as (phis, u, comp): explicit pairs plus implicit zero dim."""
    n = problem.n
    if problem.diagonal is not None:
        diag = np.asarray(problem.diagonal, dtype=np.float64)
        if diag.shape != (n,):
            raise BallmaxError(f"diagonal shape {diag.shape} != ({n},)")
        if np.any(diag < -1e-10):
            raise BallmaxError("diagonal matrix is not PSD")
        return np.maximum(diag, 0.0), np.eye(n), 0
    if problem.a is not None:
        a = np.asarray(problem.a, dtype=np.float64)
        if a.shape != (n, n):
            raise BallmaxError(f"matrix shape {a.shape} != ({n}, {n})")
        off = a - np.diag(np.diag(a))
        if not np.any(off):
            return (
                np.maximum(_psd_diag(np.diag(a)), 0.0),
                np.eye(n),
                0,
            )
        eig = sym_eigendecompose(a, check_psd=True)
        return eig.phi, eig.q.T.copy(), 0
    g = np.asarray(problem.factor, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != n:
        raise BallmaxError(f"factor shape {g.shape} incompatible with n={n}")
    gram = g.T @ g
    eig = sym_eigendecompose(gram, check_psd=True)
    phimax = float(np.max(eig.phi)) if eig.phi.size else 0.0
    keep = eig.phi > 1e-10 * phimax if phimax > 0.0 else np.zeros(0, dtype=bool)
    phis = eig.phi[keep]
    vk = eig.q.T[:, keep]
    if phis.size == 0:
        return phis, np.zeros((n, 0)), n
    order = np.argsort(phis)[::-1]
    phis = phis[order]
    u = (g @ vk[:, order]) / np.sqrt(phis)[None, :]
    # one modified Gram-Schmidt pass: the lift G v / sqrt(phi) loses
    # orthogonality for the smallest kept eigenvalues
    kept_phi = []
    cols = []
    for j in range(u.shape[1]):
        col = u[:, j].copy()
        for prev in cols:
            col -= (prev @ col) * prev
        nrm = float(np.linalg.norm(col))
        if nrm <= 1e-6:
            continue
        cols.append(col / nrm)
        kept_phi.append(phis[j])
    phis = np.asarray(kept_phi)
    u = np.column_stack(cols) if cols else np.zeros((n, 0))
    return phis, u, n - phis.size


def _psd_diag(diag):
    if np.any(diag < -1e-10):
        raise BallmaxError("matrix declared PSD has a negative diagonal entry")
    return diag


def max_quadratic_over_ball(problem):
    """Largest value of w.T A w + 2 b.T w on the ball, with its argmax.

    Nonsingular candidates come from the secular roots; singular ones from
    eigenvalue clusters whose xi vanish, spending the leftover radius along
    the eigenspace.  The returned point satisfies the boundary and
    stationarity identities to roundoff.
    """
    phis, u, comp = _explicit_spectrum(problem)
    if phis.size == 0 or float(np.max(phis)) <= 0.0:
        raise BallmaxError("A is the zero matrix; use the linear path instead")
    center = problem.center
    b = problem.b
    s = problem.radius
    s2 = s * s

    pw = u.T @ center
    pb = u.T @ b
    xi_r = -phis * pw - pb
    if comp > 0:
        cvec = -(b - u @ pb)
        xi_c = float(np.linalg.norm(cvec))
    else:
        cvec = None
        xi_c = 0.0

    joint_phi = np.append(phis, 0.0) if comp > 0 else phis
    joint_xi = np.append(xi_r, xi_c) if comp > 0 else xi_r
    thr = _XI_CLIP * (1.0 + (float(np.max(np.abs(joint_xi))) if joint_xi.size else 0.0))
    xi_r = np.where(np.abs(xi_r) <= thr, 0.0, xi_r)
    if abs(xi_c) <= thr:
        xi_c = 0.0
    dir_c = cvec / xi_c if (comp > 0 and xi_c != 0.0) else None

    sec = SecularProblem.build(joint_phi, joint_xi, s)
    roots = secular_roots(sec)

    candidates = []

    for nu in roots:
        tau_r = np.zeros(phis.shape[0])
        mask = xi_r != 0.0
        tau_r[mask] = xi_r[mask] / (phis[mask] - nu)
        tau_c = xi_c / (0.0 - nu) if xi_c != 0.0 else 0.0
        nrm = math.sqrt(float(tau_r @ tau_r) + tau_c * tau_c)
        if nrm == 0.0 or not math.isfinite(nrm):
            continue
        scale = s / nrm
        dw = u @ (tau_r * scale)
        if tau_c != 0.0:
            dw = dw + (tau_c * scale) * dir_c
        value = nu * s2 + float((nu * center + b) @ dw) + float(b @ center)
        candidates.append((value, problem.center + dw, float(nu), "secular"))

    # Singular branch: clusters of (numerically) equal eigenvalues with
    # xi = 0 across the whole cluster.
    events = [(float(phis[i]), i) for i in range(phis.shape[0])]
    if comp > 0:
        events.append((0.0, -1))
    events.sort(key=lambda t: t[0])
    ctol = _CLUSTER_TOL * (1.0 + float(np.max(np.abs(phis))))
    clusters = []
    for val, idx in events:
        if clusters and val - clusters[-1][-1][0] <= ctol:
            clusters[-1].append((val, idx))
        else:
            clusters.append([(val, idx)])

    for members in clusters:
        expl = [i for _, i in members if i >= 0]
        has_comp = any(i < 0 for _, i in members)
        bad = any(xi_r[i] != 0.0 for i in expl) or (has_comp and xi_c != 0.0)
        if bad:
            continue
        nu = sum(v for v, _ in members) / len(members)
        in_cluster = np.zeros(phis.shape[0], dtype=bool)
        in_cluster[expl] = True
        free = ~in_cluster
        tau_f = np.zeros(phis.shape[0])
        fmask = free & (xi_r != 0.0)
        tau_f[fmask] = xi_r[fmask] / (phis[fmask] - nu)
        tau_fc = 0.0
        if comp > 0 and not has_comp and xi_c != 0.0:
            tau_fc = xi_c / (0.0 - nu)
        used = float(tau_f @ tau_f) + tau_fc * tau_fc
        rem = s2 - used
        if rem < -1e-12 * max(1.0, s2):
            continue
        rem = max(rem, 0.0)
        dw = u @ tau_f
        if tau_fc != 0.0:
            dw = dw + tau_fc * dir_c
        g = nu * center + b
        g_u = u[:, in_cluster] @ (u[:, in_cluster].T @ g)
        if has_comp:
            g_u = g_u + (g - u @ (u.T @ g))
        gnorm = float(np.linalg.norm(g_u))
        if rem > 0.0:
            if gnorm > 1e-13 * (1.0 + float(np.linalg.norm(g))):
                dw = dw + math.sqrt(rem) * (g_u / gnorm)
            else:
                dw = dw + math.sqrt(rem) * _eigenspace_direction(
                    u, in_cluster, has_comp, problem.n
                )
        value = nu * s2 + float((nu * center + b) @ dw) + float(b @ center)
        candidates.append((value, center + dw, float(nu), "singular"))

    if not candidates:
        raise BallmaxError("no stationary candidates found; inconsistent input")
    best = max(candidates, key=lambda c: (c[0], -c[2]))
    return MaxQuadResult(best[0], best[1], best[2], best[3])


def _eigenspace_direction(u, in_cluster, has_comp, n):
    """Deterministic unit vector inside the cluster eigenspace."""
    idx = np.flatnonzero(in_cluster)
    if idx.size:
        return u[:, idx[0]].copy()
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        res = e - u @ (u.T @ e)
        nrm = float(np.linalg.norm(res))
        if nrm > 0.5 / math.sqrt(n):
            return res / nrm
    raise BallmaxError("could not build a null-space direction")


def min_weight_over_ball(center, gamma, radius):
    """Exact min over the ball of min_i w_i * gamma_i^2.

    Each coordinate independently reaches center_i - radius, so the value
    is min_i (center_i - radius) * gamma_i^2; requires radius < min(center).
    """
    center = np.asarray(center, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    if center.shape != gamma.shape or center.ndim != 1:
        raise BallmaxError("center and gamma must be same-length vectors")
    if radius < 0.0:
        raise BallmaxError(f"negative radius {radius}")
    if radius >= float(np.min(center)):
        raise BallmaxError(
            f"radius {radius} >= min weight {np.min(center)}: "
            "the ball leaves the positive orthant"
        )
    return float(np.min((center - radius) * gamma * gamma))
