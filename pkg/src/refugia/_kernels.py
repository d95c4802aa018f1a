"""numba kernels for the fixed-step delay integrator and tangent dynamics.

All loops work in step units (u = t/step), so a delay that is an exact
multiple of the step hits grid nodes exactly (no interpolation residue).
History lookups use cubic Hermite interpolation over one step interval with
the stored node derivatives; the step <= tau/4 rule enforced by the wrappers
guarantees every stage lookup lands in already-computed history.

Status codes: 0 ok, 1 non-finite state, 2 negative state.
"""
import math

import numpy as np
from numba import njit

OK = 0
NONFINITE = 1
NEGATIVE = 2


@njit(cache=True, nogil=True, inline="always")
def _hermite(y0, y1, d0, d1, th, step):
    # d0, d1 are time derivatives; interval rescaled to [0, 1]
    t2 = th * th
    t3 = t2 * th
    return ((2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (-2.0 * t3 + 3.0 * t2) * y1
            + ((t3 - 2.0 * t2 + th) * d0 + (t3 - t2) * d1) * step)


@njit(cache=True, nogil=True, inline="always")
def _ring_lookup(ring_v, ring_d, R, p, front, phi, step):
    # history value at grid position p (step units); constant phi before t = 0
    if p <= 0.0:
        return phi
    j = int(p)
    if j > front - 1:
        j = front - 1
    th = p - j
    s0 = j % R
    s1 = (j + 1) % R
    return _hermite(ring_v[s0], ring_v[s1], ring_d[s0], ring_d[s1], th, step)


@njit(cache=True, nogil=True, inline="always")
def _rhs(r, k, a, h, theta, d, x, y, xl1, xl2):
    g = a * x / (1.0 + a * h * x)
    g2 = a * xl2 / (1.0 + a * h * xl2)
    return r * x * (1.0 - xl1 / k) - g * y, y * (theta * g2 - d)


@njit(cache=True, nogil=True)
def integrate(r, k, a, h, theta, d, tau1, tau2, phi_x, phi_y,
              step, n_steps, k0, clamp_negative):
    """RK4 method-of-steps. Returns (status, fail_step, xs, ys, dxs, dys).

    Output arrays hold nodes k0..n_steps. A ring of the last max-delay span
    (plus margin) serves the delayed-prey lookups.
    """
    L1 = tau1 / step
    L2 = tau2 / step
    N = 0
    if tau1 > 0.0:
        N = int(math.ceil(L1))
    if tau2 > 0.0 and int(math.ceil(L2)) > N:
        N = int(math.ceil(L2))
    R = N + 8
    ring_x = np.empty(R)
    ring_dx = np.empty(R)
    n_keep = n_steps - k0 + 1
    xs = np.empty(n_keep)
    ys = np.empty(n_keep)
    dxs = np.empty(n_keep)
    dys = np.empty(n_keep)

    x = phi_x
    y = phi_y
    dx, dy = _rhs(r, k, a, h, theta, d, x, y, phi_x, phi_x)
    ring_x[0] = x
    ring_dx[0] = dx
    if k0 == 0:
        xs[0] = x
        ys[0] = y
        dxs[0] = dx
        dys[0] = dy

    for i in range(n_steps):
        u = float(i)
        # stage 1 derivative is the stored node derivative
        k1x, k1y = dx, dy

        sx = x + 0.5 * step * k1x
        sy = y + 0.5 * step * k1y
        um = u + 0.5
        xl1 = sx if L1 == 0.0 else _ring_lookup(ring_x, ring_dx, R, um - L1, i, phi_x, step)
        xl2 = sx if L2 == 0.0 else _ring_lookup(ring_x, ring_dx, R, um - L2, i, phi_x, step)
        k2x, k2y = _rhs(r, k, a, h, theta, d, sx, sy, xl1, xl2)

        sx = x + 0.5 * step * k2x
        sy = y + 0.5 * step * k2y
        xl1 = sx if L1 == 0.0 else xl1
        xl2 = sx if L2 == 0.0 else xl2
        k3x, k3y = _rhs(r, k, a, h, theta, d, sx, sy, xl1, xl2)

        sx = x + step * k3x
        sy = y + step * k3y
        up = u + 1.0
        xl1 = sx if L1 == 0.0 else _ring_lookup(ring_x, ring_dx, R, up - L1, i, phi_x, step)
        xl2 = sx if L2 == 0.0 else _ring_lookup(ring_x, ring_dx, R, up - L2, i, phi_x, step)
        k4x, k4y = _rhs(r, k, a, h, theta, d, sx, sy, xl1, xl2)

        x = x + step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        i1 = i + 1

        if not (math.isfinite(x) and math.isfinite(y)):
            return NONFINITE, i1, xs, ys, dxs, dys
        if x < 0.0 or y < 0.0:
            if clamp_negative:
                if x < 0.0:
                    x = 0.0
                if y < 0.0:
                    y = 0.0
            else:
                return NEGATIVE, i1, xs, ys, dxs, dys

        xl1 = x if L1 == 0.0 else _ring_lookup(ring_x, ring_dx, R, up - L1, i, phi_x, step)
        xl2 = x if L2 == 0.0 else _ring_lookup(ring_x, ring_dx, R, up - L2, i, phi_x, step)
        dx, dy = _rhs(r, k, a, h, theta, d, x, y, xl1, xl2)
        ring_x[i1 % R] = x
        ring_dx[i1 % R] = dx
        if i1 >= k0:
            xs[i1 - k0] = x
            ys[i1 - k0] = y
            dxs[i1 - k0] = dx
            dys[i1 - k0] = dy

    return OK, n_steps, xs, ys, dxs, dys


@njit(cache=True, nogil=True, inline="always")
def _grid_lookup(vals, ders, p, phi, step):
    # dense lookup in a fully stored trajectory starting at node 0
    if p <= 0.0:
        return phi
    n = vals.shape[0] - 1
    j = int(p)
    if j >= n:
        j = n - 1
    th = p - j
    return _hermite(vals[j], vals[j + 1], ders[j], ders[j + 1], th, step)


@njit(cache=True, nogil=True, inline="always")
def _jacobian(r, k, a, h, theta, d, x, y, xl1, xl2):
    """Partial derivatives of the rhs wrt (x, y, x_lag1, x_lag2) along the base."""
    G = 1.0 + a * h * x
    G2 = 1.0 + a * h * xl2
    j11 = r * (1.0 - xl1 / k) - a * y / (G * G)
    j12 = -a * x / G
    b1 = -r * x / k
    j22 = theta * a * xl2 / G2 - d
    b2 = theta * a * y / (G2 * G2)
    return j11, j12, b1, j22, b2


@njit(cache=True, nogil=True)
def linearized(r, k, a, h, theta, d, tau1, tau2, phi_x,
               bxs, bys, bdxs, bdys, v_x, v_y, step, n_steps):
    """Tangent dynamics along a stored base trajectory, constant perturbation history.

    Returns (status, fail_step, dxs_out, dys_out, ddx_out, ddy_out): the
    perturbation components and their time derivatives at every node.
    """
    L1 = tau1 / step
    L2 = tau2 / step
    N = 0
    if tau1 > 0.0:
        N = int(math.ceil(L1))
    if tau2 > 0.0 and int(math.ceil(L2)) > N:
        N = int(math.ceil(L2))
    R = N + 8
    ring_v = np.empty(R)
    ring_d = np.empty(R)
    out_x = np.empty(n_steps + 1)
    out_y = np.empty(n_steps + 1)
    out_dx = np.empty(n_steps + 1)
    out_dy = np.empty(n_steps + 1)

    vx = v_x
    vy = v_y
    j11, j12, b1, j22, b2 = _jacobian(r, k, a, h, theta, d, bxs[0], bys[0], phi_x, phi_x)
    dvx = j11 * vx + j12 * vy + b1 * v_x
    dvy = j22 * vy + b2 * v_x
    ring_v[0] = vx
    ring_d[0] = dvx
    out_x[0] = vx
    out_y[0] = vy
    out_dx[0] = dvx
    out_dy[0] = dvy

    for i in range(n_steps):
        u = float(i)
        k1x, k1y = dvx, dvy
        k2x = k2y = k3x = k3y = k4x = k4y = 0.0
        for stage in range(3):
            if stage == 0:
                us = u + 0.5
                sx = vx + 0.5 * step * k1x
                sy = vy + 0.5 * step * k1y
            elif stage == 1:
                us = u + 0.5
                sx = vx + 0.5 * step * k2x
                sy = vy + 0.5 * step * k2y
            else:
                us = u + 1.0
                sx = vx + step * k3x
                sy = vy + step * k3y
            bx = _grid_lookup(bxs, bdxs, us, bxs[0], step)
            by = _grid_lookup(bys, bdys, us, bys[0], step)
            bl1 = bx if L1 == 0.0 else _grid_lookup(bxs, bdxs, us - L1, bxs[0], step)
            bl2 = bx if L2 == 0.0 else _grid_lookup(bxs, bdxs, us - L2, bxs[0], step)
            j11, j12, b1, j22, b2 = _jacobian(r, k, a, h, theta, d, bx, by, bl1, bl2)
            vl1 = sx if L1 == 0.0 else _ring_lookup(ring_v, ring_d, R, us - L1, i, v_x, step)
            vl2 = sx if L2 == 0.0 else _ring_lookup(ring_v, ring_d, R, us - L2, i, v_x, step)
            kx = j11 * sx + j12 * sy + b1 * vl1
            ky = j22 * sy + b2 * vl2
            if stage == 0:
                k2x, k2y = kx, ky
            elif stage == 1:
                k3x, k3y = kx, ky
            else:
                k4x, k4y = kx, ky

        vx = vx + step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        vy = vy + step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        i1 = i + 1
        if not (math.isfinite(vx) and math.isfinite(vy)):
            return NONFINITE, i1, out_x, out_y, out_dx, out_dy

        up = u + 1.0
        bx = bxs[i1]
        by = bys[i1]
        bl1 = bx if L1 == 0.0 else _grid_lookup(bxs, bdxs, up - L1, bxs[0], step)
        bl2 = bx if L2 == 0.0 else _grid_lookup(bxs, bdxs, up - L2, bxs[0], step)
        j11, j12, b1, j22, b2 = _jacobian(r, k, a, h, theta, d, bx, by, bl1, bl2)
        vl1 = vx if L1 == 0.0 else _ring_lookup(ring_v, ring_d, R, up - L1, i, v_x, step)
        vl2 = vx if L2 == 0.0 else _ring_lookup(ring_v, ring_d, R, up - L2, i, v_x, step)
        dvx = j11 * vx + j12 * vy + b1 * vl1
        dvy = j22 * vy + b2 * vl2
        ring_v[i1 % R] = vx
        ring_d[i1 % R] = dvx
        out_x[i1] = vx
        out_y[i1] = vy
        out_dx[i1] = dvx
        out_dy[i1] = dvy

    return OK, n_steps, out_x, out_y, out_dx, out_dy


@njit(cache=True, nogil=True, inline="always")
def _pert_lookup(ring_v, ring_d, R, p, pmin, step, col):
    # perturbation history lookup; seeded profile occupies [-N, 0]
    if p < pmin:
        p = pmin
    j = int(math.floor(p))
    th = p - j
    s0 = j % R
    s1 = (j + 1) % R
    return _hermite(ring_v[s0, col], ring_v[s1, col], ring_d[s0, col], ring_d[s1, col],
                    th, step)


@njit(cache=True, nogil=True)
def _gram_schmidt(rx, ry, rdx, R, N, front, n_exp, logs, accumulate):
    """Orthonormalize the history segments [front-N, front] in place.

    The modified Gram-Schmidt coefficients computed on the segment vectors are
    applied to the whole rings (values and derivative samples), which is exact
    because the tangent flow is linear.
    """
    for jcol in range(n_exp):
        for icol in range(jcol):
            dot = 0.0
            for g in range(N + 1):
                s = (front - N + g) % R
                dot += rx[s, icol] * rx[s, jcol] + ry[s, icol] * ry[s, jcol]
            for s in range(R):
                rx[s, jcol] -= dot * rx[s, icol]
                ry[s, jcol] -= dot * ry[s, icol]
                rdx[s, jcol] -= dot * rdx[s, icol]
        nrm = 0.0
        for g in range(N + 1):
            s = (front - N + g) % R
            nrm += rx[s, jcol] ** 2 + ry[s, jcol] ** 2
        nrm = math.sqrt(nrm)
        inv = 1.0 / nrm
        for s in range(R):
            rx[s, jcol] *= inv
            ry[s, jcol] *= inv
            rdx[s, jcol] *= inv
        if accumulate:
            logs[jcol] += math.log(nrm)


@njit(cache=True, nogil=True)
def lyapunov(r, k, a, h, theta, d, tau1, tau2,
             bxs, bys, bdxs, bdys, step, n_steps,
             n_exp, transient_steps, ortho_every):
    """Tangent-space Lyapunov sums along a stored base trajectory.

    The tangent state is the discretized history segment over [t - tau_max, t]
    (all solver mesh points). n_exp segments evolve under the variational
    flow; every ortho_every steps they are re-orthonormalized and, past the
    transient, log norm gains accumulate into logs. Seed segments are
    independent mesh profiles: unit components modulated by cosine modes.

    Returns (status, fail_step, logs); exponents are logs / window_time.
    """
    L1 = tau1 / step
    L2 = tau2 / step
    N = 0
    if tau1 > 0.0:
        N = int(math.ceil(L1))
    if tau2 > 0.0 and int(math.ceil(L2)) > N:
        N = int(math.ceil(L2))
    R = N + 8
    rx = np.zeros((R, n_exp))
    ry = np.zeros((R, n_exp))
    rdx = np.zeros((R, n_exp))
    logs = np.zeros(n_exp)
    phi_x = bxs[0]

    # seed: component (j % 2) carries cos(mode * pi * g / N) over g in [-N, 0]
    for j in range(n_exp):
        mode = j // 2
        for g in range(-N, 1):
            s = g % R
            if N > 0:
                prof = math.cos(mode * math.pi * g / N)
                dprof = -mode * math.pi / (N * step) * math.sin(mode * math.pi * g / N)
            else:
                prof = 1.0
                dprof = 0.0
            if j % 2 == 0:
                rx[s, j] = prof
                rdx[s, j] = dprof
            else:
                ry[s, j] = prof

    _gram_schmidt(rx, ry, rdx, R, N, 0, n_exp, logs, False)
    pmin = -float(N)

    for i in range(n_steps):
        u = float(i)
        s_cur = i % R
        s_next = (i + 1) % R
        for j in range(n_exp):
            vx = rx[s_cur, j]
            vy = ry[s_cur, j]
            k1x = rdx[s_cur, j]
            # k1y recomputed from the node Jacobian (not stored per slot)
            bx = bxs[i]
            by = bys[i]
            bl1 = bx if L1 == 0.0 else _grid_lookup(bxs, bdxs, u - L1, phi_x, step)
            bl2 = bx if L2 == 0.0 else _grid_lookup(bxs, bdxs, u - L2, phi_x, step)
            j11, j12, b1, j22, b2 = _jacobian(r, k, a, h, theta, d, bx, by, bl1, bl2)
            vl2 = vx if L2 == 0.0 else _pert_lookup(rx, rdx, R, u - L2, pmin, step, j)
            k1y = j22 * vy + b2 * vl2

            k2x = 0.0
            k2y = 0.0
            k3x = 0.0
            k3y = 0.0
            k4x = 0.0
            k4y = 0.0
            for stage in range(3):
                if stage == 0:
                    us = u + 0.5
                    sx = vx + 0.5 * step * k1x
                    sy = vy + 0.5 * step * k1y
                elif stage == 1:
                    us = u + 0.5
                    sx = vx + 0.5 * step * k2x
                    sy = vy + 0.5 * step * k2y
                else:
                    us = u + 1.0
                    sx = vx + step * k3x
                    sy = vy + step * k3y
                bx = _grid_lookup(bxs, bdxs, us, phi_x, step)
                by = _grid_lookup(bys, bdys, us, bys[0], step)
                bl1 = bx if L1 == 0.0 else _grid_lookup(bxs, bdxs, us - L1, phi_x, step)
                bl2 = bx if L2 == 0.0 else _grid_lookup(bxs, bdxs, us - L2, phi_x, step)
                j11, j12, b1, j22, b2 = _jacobian(r, k, a, h, theta, d, bx, by, bl1, bl2)
                vl1 = sx if L1 == 0.0 else _pert_lookup(rx, rdx, R, us - L1, pmin, step, j)
                vl2 = sx if L2 == 0.0 else _pert_lookup(rx, rdx, R, us - L2, pmin, step, j)
                kx = j11 * sx + j12 * sy + b1 * vl1
                ky = j22 * sy + b2 * vl2
                if stage == 0:
                    k2x, k2y = kx, ky
                elif stage == 1:
                    k3x, k3y = kx, ky
                else:
                    k4x, k4y = kx, ky

            vx = vx + step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            vy = vy + step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            if not (math.isfinite(vx) and math.isfinite(vy)):
                return NONFINITE, i + 1, logs

            up = u + 1.0
            bx = bxs[i + 1]
            by = bys[i + 1]
            bl1 = bx if L1 == 0.0 else _grid_lookup(bxs, bdxs, up - L1, phi_x, step)
            bl2 = bx if L2 == 0.0 else _grid_lookup(bxs, bdxs, up - L2, phi_x, step)
            j11, j12, b1, j22, b2 = _jacobian(r, k, a, h, theta, d, bx, by, bl1, bl2)
            vl1 = vx if L1 == 0.0 else _pert_lookup(rx, rdx, R, up - L1, pmin, step, j)
            rx[s_next, j] = vx
            ry[s_next, j] = vy
            rdx[s_next, j] = j11 * vx + j12 * vy + b1 * vl1

        i1 = i + 1
        if i1 % ortho_every == 0:
            _gram_schmidt(rx, ry, rdx, R, N, i1, n_exp, logs, i1 > transient_steps)

    return OK, n_steps, logs
