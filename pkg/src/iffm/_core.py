"""Compiled inner loops: motif algebra, Dormand-Prince 5(4) integration of the
augmented state, and the backward kernel sweep.

State layout for a subsystem of dimension n::

    [x_0..x_{n-1}, p_0..p_{n-1}, y, q, int_y, G, int_q]
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

STATUS_OK = 0
STATUS_DOMAIN = 1
STATUS_STEP_FAILURE = 2

# systems whose output equation divides by K + c.x
GUARDED = (3, 4, 7, 8)


@nb.njit(cache=True)
def motif_terms(kind, z, y, u, d, beta, K):
    """Output right-hand side and partials as functions of z = c.x.

    Returns (F, dF/dz, dF/dy, dF/du); dF/dx is dF/dz times c.
    """
    if kind == 1:
        bu = beta * u
        return z / bu - d * y, 1.0 / bu, -d, -z / (bu * u)
    elif kind == 2:
        return z - d * u * y, 1.0, -d * u, -d * y
    elif kind == 3:
        w = K + z
        return beta * u / w - d * y, -beta * u / (w * w), -d, beta / w
    elif kind == 4:
        w = K + z
        bu = beta * u
        return 1.0 / w - d * y / bu, -1.0 / (w * w), -d / bu, d * y / (bu * u)
    elif kind == 5:
        return -z * y + d * u, -y, -z, d
    elif kind == 6:
        bu = beta * u
        return d - z * y / bu, -y / bu, -z / bu, z * y / (bu * u)
    elif kind == 7:
        w = K + z
        bu = beta * u
        return 1.0 / bu - d * y / w, d * y / (w * w), -d / w, -1.0 / (bu * u)
    else:
        w = K + z
        return d - beta * u * y / w, beta * u * y / (w * w), -beta * u / w, -beta * y / w


@nb.njit(cache=True)
def is_guarded(kind):
    return kind == 3 or kind == 4 or kind == 7 or kind == 8


@nb.njit(cache=True)
def _rhs(s, out, A, b, c, n, kind, d, beta, K, u, x_floor):
    """Fill ``out`` with the time derivative of ``s``; return False on a domain violation."""
    z = 0.0
    cp = 0.0
    for i in range(n):
        z += c[i] * s[i]
        cp += c[i] * s[n + i]
    if is_guarded(kind) and not (K + z > x_floor):
        return False
    for i in range(n):
        ax = 0.0
        ap = 0.0
        for j in range(n):
            ax += A[i, j] * s[j]
            ap += A[i, j] * s[n + j]
        out[i] = ax + b[i] * u
        out[n + i] = ap + b[i]
    y = s[2 * n]
    q = s[2 * n + 1]
    F, Fz, Fy, Fu = motif_terms(kind, z, y, u, d, beta, K)
    g = Fz * cp + Fu
    out[2 * n] = F
    out[2 * n + 1] = g + Fy * q
    out[2 * n + 2] = y
    out[2 * n + 3] = g
    out[2 * n + 4] = q
    return True


# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9
A21 = 1.0 / 5
A31, A32 = 3.0 / 40, 9.0 / 40
A41, A42, A43 = 44.0 / 45, -56.0 / 15, 32.0 / 9
A51, A52, A53, A54 = 19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729
A61, A62, A63, A64, A65 = 9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656
B1, B3, B4, B5, B6 = 35.0 / 384, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84
# difference between 5th order weights and embedded 4th order weights
E1 = 71.0 / 57600
E3 = -71.0 / 16695
E4 = 71.0 / 1920
E5 = -17253.0 / 339200
E6 = 22.0 / 525
E7 = -1.0 / 40
# continuous extension of order 4 (Hairer, Norsett & Wanner)
D1 = -12715105075.0 / 11282082432
D3 = 87487479700.0 / 32700410799
D4 = -10690763975.0 / 1880347072
D5 = 701980252875.0 / 199316789632
D6 = -1453857185.0 / 822651844
D7 = 69997945.0 / 29380423


@nb.njit(cache=True)
def _err_norm(s, s_new, err, rtol, atol):
    e = 0.0
    for i in range(s.shape[0]):
        sc = atol + rtol * max(abs(s[i]), abs(s_new[i]))
        r = abs(err[i]) / sc
        if r > e:
            e = r
    return e


@nb.njit(cache=True)
def _initial_step(s0, f0, A, b, c, n, kind, d, beta, K, u, x_floor, rtol, atol, T, work):
    m = s0.shape[0]
    d0 = 0.0
    d1 = 0.0
    for i in range(m):
        sc = atol + rtol * abs(s0[i])
        d0 += (s0[i] / sc) ** 2
        d1 += (f0[i] / sc) ** 2
    d0 = math.sqrt(d0 / m)
    d1 = math.sqrt(d1 / m)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, T)
    s1 = np.empty(m)
    for i in range(m):
        s1[i] = s0[i] + h0 * f0[i]
    if not _rhs(s1, work, A, b, c, n, kind, d, beta, K, u, x_floor):
        return h0 * 1e-3
    d2 = 0.0
    for i in range(m):
        sc = atol + rtol * abs(s0[i])
        d2 += ((work[i] - f0[i]) / sc) ** 2
    d2 = math.sqrt(d2 / m) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, T)


@nb.njit(cache=True)
def _dense(coef, theta, out):
    """Evaluate one step's continuous extension at fraction ``theta`` of the step."""
    th1 = 1.0 - theta
    for i in range(out.shape[0]):
        out[i] = coef[0, i] + theta * (coef[1, i] + th1 * (
            coef[2, i] + theta * (coef[3, i] + th1 * coef[4, i])))


@nb.njit(cache=True)
def integrate(A, b, c, kind, d, beta, K, u, s0, T, rtol, atol, dt_max, x_floor,
              t_grid, mesh, max_steps):
    """Integrate the augmented system on [0, T].

    If ``mesh`` is nonempty the step sequence is taken from it verbatim (no
    error control); otherwise steps are chosen adaptively.

    Returns (status, t_status, Y, mesh_out, coef) where Y holds the state on
    ``t_grid``, mesh_out the accepted step times and coef[k] the dense-output
    coefficients of step k (state over [mesh_out[k], mesh_out[k+1]]).
    """
    n = b.shape[0]
    m = s0.shape[0]
    ng = t_grid.shape[0]
    Y = np.zeros((ng, m))
    cap = 1024
    mesh_out = np.empty(cap + 1)
    coef = np.empty((cap, 5, m))
    mesh_out[0] = 0.0
    n_acc = 0

    k1 = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    k5 = np.empty(m)
    k6 = np.empty(m)
    k7 = np.empty(m)
    st = np.empty(m)
    s_new = np.empty(m)
    err = np.empty(m)
    tmp = np.empty(m)
    s = s0.copy()

    if not _rhs(s, k1, A, b, c, n, kind, d, beta, K, u, x_floor):
        return STATUS_DOMAIN, 0.0, Y, mesh_out[:1], coef[:0]

    Y[0, :] = s
    gi = 1

    replay = mesh.shape[0] > 1
    if replay:
        h = mesh[1] - mesh[0]
    else:
        h = _initial_step(s, k1, A, b, c, n, kind, d, beta, K, u, x_floor, rtol, atol, T, tmp)
        # the heuristic can undershoot the underflow floor when atol is tiny;
        # error control shrinks the step again if the guess is too large
        h = min(max(h, 1e-9 * T), dt_max)
    t = 0.0
    h_min = 1e-12 * T
    steps = 0
    mi = 1
    en = 0.0
    while t < T:
        if steps >= max_steps:
            return STATUS_STEP_FAILURE, t, Y, mesh_out[:n_acc + 1], coef[:n_acc]
        steps += 1
        if replay:
            t_next = mesh[mi] if mi < mesh.shape[0] else T
            h = t_next - t
            last = mi >= mesh.shape[0] - 1
        else:
            if h < h_min:
                return STATUS_STEP_FAILURE, t, Y, mesh_out[:n_acc + 1], coef[:n_acc]
            last = t + h >= T * (1 - 1e-14)
            if last:
                h = T - t

        ok = True
        for i in range(m):
            st[i] = s[i] + h * A21 * k1[i]
        ok = ok and _rhs(st, k2, A, b, c, n, kind, d, beta, K, u, x_floor)
        if ok:
            for i in range(m):
                st[i] = s[i] + h * (A31 * k1[i] + A32 * k2[i])
            ok = _rhs(st, k3, A, b, c, n, kind, d, beta, K, u, x_floor)
        if ok:
            for i in range(m):
                st[i] = s[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            ok = _rhs(st, k4, A, b, c, n, kind, d, beta, K, u, x_floor)
        if ok:
            for i in range(m):
                st[i] = s[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            ok = _rhs(st, k5, A, b, c, n, kind, d, beta, K, u, x_floor)
        if ok:
            for i in range(m):
                st[i] = s[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                                    + A65 * k5[i])
            ok = _rhs(st, k6, A, b, c, n, kind, d, beta, K, u, x_floor)
        if ok:
            for i in range(m):
                s_new[i] = s[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                                       + B6 * k6[i])
            ok = _rhs(s_new, k7, A, b, c, n, kind, d, beta, K, u, x_floor)

        if not ok:
            if replay:
                return STATUS_DOMAIN, t, Y, mesh_out[:n_acc + 1], coef[:n_acc]
            h *= 0.25
            continue

        if not replay:
            for i in range(m):
                err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                              + E6 * k6[i] + E7 * k7[i])
            en = _err_norm(s, s_new, err, rtol, atol)
            if en > 1.0:
                h *= max(0.2, 0.9 * en ** -0.2)
                continue

        if n_acc == cap:
            grown = np.empty(2 * cap + 1)
            grown[:cap + 1] = mesh_out
            mesh_out = grown
            gc = np.empty((2 * cap, 5, m))
            gc[:cap] = coef
            coef = gc
            cap *= 2
        for i in range(m):
            ydiff = s_new[i] - s[i]
            bspl = h * k1[i] - ydiff
            coef[n_acc, 0, i] = s[i]
            coef[n_acc, 1, i] = ydiff
            coef[n_acc, 2, i] = bspl
            coef[n_acc, 3, i] = ydiff - h * k7[i] - bspl
            coef[n_acc, 4, i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]
                                     + D6 * k6[i] + D7 * k7[i])

        t_new = T if last else t + h
        while gi < ng and t_grid[gi] <= t_new:
            if t_grid[gi] == t_new:
                Y[gi, :] = s_new
            else:
                _dense(coef[n_acc], (t_grid[gi] - t) / h, tmp)
                Y[gi, :] = tmp
            gi += 1

        n_acc += 1
        mesh_out[n_acc] = t_new
        if replay:
            mi += 1

        t = t_new
        for i in range(m):
            s[i] = s_new[i]
            k1[i] = k7[i]
        if last:
            break
        if not replay:
            if en == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * en ** -0.2))
            h = min(h * fac, dt_max)

    while gi < ng:
        Y[gi, :] = s
        gi += 1
    return STATUS_OK, T, Y, mesh_out[:n_acc + 1], coef[:n_acc]


@nb.njit(cache=True)
def _ag_at(coef, theta, buf, c, n, kind, u, d, beta, K):
    _dense(coef, theta, buf)
    z = 0.0
    cp = 0.0
    for i in range(n):
        z += c[i] * buf[i]
        cp += c[i] * buf[n + i]
    F, Fz, Fy, Fu = motif_terms(kind, z, buf[2 * n], u, d, beta, K)
    return -Fy, Fz * cp + Fu


@nb.njit(cache=True)
def backward_pass(pts, step_of, grid_of, mesh, coef, c, kind, u, d, beta, K, zmax, n_grid):
    """Solve lambda' = a(t) lambda - 1 backward from lambda(T) = 0.

    ``pts`` is the sorted union of step times and sample times; piece j spans
    [pts[j], pts[j+1]] inside step ``step_of[j]``; ``grid_of[j]`` is the sample
    index of pts[j] or -1. Classical RK4 in reversed time, each piece split so
    that a * substep <= zmax, with a and g taken from the forward dense
    output. The integral of lambda g is carried as a second component.
    Returns (lambda on the sample grid, int lambda g).
    """
    n = c.shape[0]
    buf = np.empty(coef.shape[2])
    lam = np.zeros(n_grid)
    L = 0.0
    J = 0.0
    for j in range(pts.shape[0] - 2, -1, -1):
        k = step_of[j]
        t0 = mesh[k]
        H = mesh[k + 1] - t0
        t_lo = pts[j]
        t_hi = pts[j + 1]
        a1, g1 = _ag_at(coef[k], (t_hi - t0) / H, buf, c, n, kind, u, d, beta, K)
        a_lo, _ = _ag_at(coef[k], (t_lo - t0) / H, buf, c, n, kind, u, d, beta, K)
        ns = max(1, int(math.ceil(max(abs(a1), abs(a_lo)) * (t_hi - t_lo) / zmax)))
        hs = (t_hi - t_lo) / ns
        tau = t_hi
        for i in range(ns):
            t_end = t_lo if i == ns - 1 else t_hi - (i + 1) * hs
            a2, g2 = _ag_at(coef[k], (0.5 * (tau + t_end) - t0) / H, buf, c, n, kind,
                            u, d, beta, K)
            a3, g3 = _ag_at(coef[k], (t_end - t0) / H, buf, c, n, kind, u, d, beta, K)
            # d(lambda)/d(-t) = 1 - a lambda
            r1 = 1.0 - a1 * L
            L2 = L + 0.5 * hs * r1
            r2 = 1.0 - a2 * L2
            L3 = L + 0.5 * hs * r2
            r3 = 1.0 - a2 * L3
            L4 = L + hs * r3
            r4 = 1.0 - a3 * L4
            J += hs * (L * g1 + 2 * L2 * g2 + 2 * L3 * g2 + L4 * g3) / 6.0
            L = L + hs * (r1 + 2 * r2 + 2 * r3 + r4) / 6.0
            tau = t_end
            a1 = a3
            g1 = g3
        if grid_of[j] >= 0:
            lam[grid_of[j]] = L
    return lam, J


@nb.njit(cache=True)
def terms_series(kind, z, cp, y, u, d, beta, K):
    """Vectorised (a, g, F) along a sampled trajectory."""
    N = z.shape[0]
    a = np.empty(N)
    g = np.empty(N)
    f = np.empty(N)
    for k in range(N):
        F, Fz, Fy, Fu = motif_terms(kind, z[k], y[k], u, d, beta, K)
        a[k] = -Fy
        g[k] = Fz * cp[k] + Fu
        f[k] = F
    return a, g, f
