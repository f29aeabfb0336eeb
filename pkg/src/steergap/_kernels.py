"""Compiled Metropolis kernels for the gap annealer.

Each kernel runs one full cooling trajectory in nopython mode, consuming a
numpy Generator whose draws match numpy's own streams bit for bit, so a
fixed seed reproduces a trajectory exactly. The four-outcome kernel caches
the node-by-component value matrix D[k, c] = <Z_c, P_k> (doubled, without
the 1/2 inner-product factor) and updates it incrementally on accepted
direction moves; measurement moves reuse the cached capacity term.
"""

from __future__ import annotations

import numpy as np
from numba import njit

COND_THRESHOLD = 1e10
ALPHA_SLACK = 1e-12

# status codes returned by trajectory kernels
OK = 0
NO_FEASIBLE_START = 1

TWO_PI = 2.0 * np.pi


@njit(cache=True)
def _alphas_from_dirs(dirs):
    """Householder-QR solve of sum_i alpha_i (1, n_i) = (2, 0, 0, 0).

    Returns (feasible, alphas). Infeasible when the column system is
    near-singular (R-diagonal ratio above the condition threshold) or any
    alpha leaves [0, 1].
    """
    a = np.empty((4, 4))
    bb = np.zeros(4)
    bb[0] = 2.0
    for i in range(4):
        a[0, i] = 1.0
        for m in range(3):
            a[m + 1, i] = dirs[i, m]
    v = np.empty(4)
    out = np.empty(4)
    diagmin = 1e300
    diagmax = 0.0
    for j in range(4):
        s2 = 0.0
        for m in range(j, 4):
            s2 += a[m, j] * a[m, j]
        s = np.sqrt(s2)
        if s == 0.0:
            return False, out
        sigma = s if a[j, j] >= 0.0 else -s
        v0 = a[j, j] + sigma
        denom = sigma * v0
        for m in range(j, 4):
            v[m] = a[m, j]
        v[j] = v0
        for l in range(j + 1, 4):
            c = 0.0
            for m in range(j, 4):
                c += v[m] * a[m, l]
            c /= denom
            for m in range(j, 4):
                a[m, l] -= c * v[m]
        cb = 0.0
        for m in range(j, 4):
            cb += v[m] * bb[m]
        cb /= denom
        for m in range(j, 4):
            bb[m] -= cb * v[m]
        a[j, j] = -sigma
        ad = abs(sigma)
        if ad < diagmin:
            diagmin = ad
        if ad > diagmax:
            diagmax = ad
    if diagmax / diagmin > COND_THRESHOLD:
        return False, out
    for j in range(3, -1, -1):
        acc = bb[j]
        for l in range(j + 1, 4):
            acc -= a[j, l] * out[l]
        out[j] = acc / a[j, j]
    for i in range(4):
        if out[i] < -ALPHA_SLACK or out[i] > 1.0 + ALPHA_SLACK:
            return False, out
    for i in range(4):
        if out[i] < 0.0:
            out[i] = 0.0
        elif out[i] > 1.0:
            out[i] = 1.0
    return True, out


@njit(cache=True)
def _zmat_from_x(x, r_mix, zmat):
    for m in range(4):
        for c in range(4):
            acc = 0.0
            for j in range(4):
                acc += x[m, j] * r_mix[j, c]
            zmat[m, c] = acc


@njit(cache=True)
def _capacity_full(p_aff, w, zmat, d):
    """Fill d[k, c] = sum_m p_aff[k, m] zmat[m, c]; return the capacity term."""
    n = p_aff.shape[0]
    tot = 0.0
    for k in range(n):
        mx = -1e300
        for c in range(4):
            acc = 0.0
            for m in range(4):
                acc += p_aff[k, m] * zmat[m, c]
            d[k, c] = acc
            if acc > mx:
                mx = acc
        tot += w[k] * mx
    return 0.5 * tot


@njit(cache=True)
def _capacity_after_shift(p_aff, w, d, r1, dz1, r2, dz2):
    n = p_aff.shape[0]
    tot = 0.0
    for k in range(n):
        p1 = p_aff[k, r1]
        p2 = p_aff[k, r2]
        mx = -1e300
        for c in range(4):
            vv = d[k, c] + p1 * dz1[c] + p2 * dz2[c]
            if vv > mx:
                mx = vv
        tot += w[k] * mx
    return 0.5 * tot


@njit(cache=True)
def _apply_shift(p_aff, d, r1, dz1, r2, dz2):
    n = p_aff.shape[0]
    for k in range(n):
        p1 = p_aff[k, r1]
        p2 = p_aff[k, r2]
        for c in range(4):
            d[k, c] += p1 * dz1[c] + p2 * dz2[c]


@njit(cache=True)
def _fill_sp(smat, dirs, sp):
    """sp[m, i] = (smat @ (1, n_i))[m], the steered image coordinates."""
    for i in range(4):
        for m in range(4):
            sp[m, i] = (
                smat[m, 0]
                + smat[m, 1] * dirs[i, 0]
                + smat[m, 2] * dirs[i, 1]
                + smat[m, 3] * dirs[i, 2]
            )


@njit(cache=True)
def _meas_value(zmat, sp, alphas):
    tot = 0.0
    for i in range(4):
        acc = 0.0
        for m in range(4):
            acc += zmat[m, i] * sp[m, i]
        tot += alphas[i] * acc
    return 0.5 * tot


@njit(cache=True)
def _draw_x(rng, x):
    nrm2 = 0.0
    for r in range(4):
        for c in range(3):
            g = rng.normal(0.0, 1.0)
            x[r, c] = g
            nrm2 += g * g
        x[r, 3] = 0.0
    scale = np.sqrt(2.0 / nrm2)
    for r in range(4):
        for c in range(3):
            x[r, c] *= scale


@njit(cache=True)
def _draw_dirs(rng, dirs):
    for i in range(4):
        nrm2 = 0.0
        while True:
            nrm2 = 0.0
            for m in range(3):
                g = rng.normal(0.0, 1.0)
                dirs[i, m] = g
                nrm2 += g * g
            if nrm2 > 1e-24:
                break
        scale = 1.0 / np.sqrt(nrm2)
        for m in range(3):
            dirs[i, m] *= scale


@njit(cache=True)
def _renorm_x(x):
    nrm2 = 0.0
    for r in range(4):
        for c in range(3):
            nrm2 += x[r, c] * x[r, c]
    scale = np.sqrt(2.0 / nrm2)
    for r in range(4):
        for c in range(3):
            x[r, c] *= scale


@njit(cache=True)
def _renorm_dirs(dirs):
    for i in range(4):
        nrm2 = 0.0
        for m in range(3):
            nrm2 += dirs[i, m] * dirs[i, m]
        scale = 1.0 / np.sqrt(nrm2)
        for m in range(3):
            dirs[i, m] *= scale


@njit(cache=True)
def anneal_povm4(p_aff, w, smat, r_mix, t_final, cool, steps_per_temp, n_t0, rng):
    """One four-outcome cooling trajectory.

    Returns (status, best_f, best_x, best_dirs, best_alphas, t0).
    """
    n_nodes = p_aff.shape[0]
    x = np.empty((4, 4))
    dirs = np.empty((4, 3))
    zmat = np.empty((4, 4))
    sp = np.empty((4, 4))
    d = np.empty((n_nodes, 4))
    alphas = np.empty(4)

    # initial temperature from the objective range over random feasible states
    fmin = 1e300
    fmax = -1e300
    feas_found = False
    for _ in range(n_t0):
        _draw_x(rng, x)
        _draw_dirs(rng, dirs)
        feasible, alphas_t = _alphas_from_dirs(dirs)
        if not feasible:
            continue
        _zmat_from_x(x, r_mix, zmat)
        cap = _capacity_full(p_aff, w, zmat, d)
        _fill_sp(smat, dirs, sp)
        f = cap - _meas_value(zmat, sp, alphas_t)
        if f < fmin:
            fmin = f
        if f > fmax:
            fmax = f
        feas_found = True
    best_x = np.empty((4, 4))
    best_dirs = np.empty((4, 3))
    best_alphas = np.empty(4)
    if not feas_found:
        return NO_FEASIBLE_START, 0.0, best_x, best_dirs, best_alphas, 0.0
    t0 = fmax - fmin

    # random feasible starting state
    while True:
        _draw_x(rng, x)
        _draw_dirs(rng, dirs)
        feasible, alphas_t = _alphas_from_dirs(dirs)
        if feasible:
            for i in range(4):
                alphas[i] = alphas_t[i]
            break
    _zmat_from_x(x, r_mix, zmat)
    cap = _capacity_full(p_aff, w, zmat, d)
    _fill_sp(smat, dirs, sp)
    meas = _meas_value(zmat, sp, alphas)
    f_cur = cap - meas
    best_f = f_cur
    for r in range(4):
        for c in range(4):
            best_x[r, c] = x[r, c]
        for c in range(3):
            best_dirs[r, c] = dirs[r, c]
        best_alphas[r] = alphas[r]

    dz1 = np.empty(4)
    dz2 = np.empty(4)
    nd = np.empty(3)
    spm = np.empty(4)
    temp = t0
    while temp > t_final:
        # kill float drift once per temperature level
        _renorm_x(x)
        _renorm_dirs(dirs)
        _zmat_from_x(x, r_mix, zmat)
        cap = _capacity_full(p_aff, w, zmat, d)
        _fill_sp(smat, dirs, sp)
        meas = _meas_value(zmat, sp, alphas)
        f_cur = cap - meas
        if f_cur < best_f:
            best_f = f_cur
            for r in range(4):
                for c in range(4):
                    best_x[r, c] = x[r, c]
                for c in range(3):
                    best_dirs[r, c] = dirs[r, c]
                best_alphas[r] = alphas[r]
        sigma_angle = TWO_PI * np.sqrt(temp)
        for _ in range(steps_per_temp):
            if rng.integers(0, 2) == 0:
                # direction move: SO(2) rotation of two distinct free X slots
                idx1 = rng.integers(0, 12)
                idx2 = rng.integers(0, 11)
                if idx2 >= idx1:
                    idx2 += 1
                r1 = idx1 // 3
                c1 = idx1 % 3
                r2 = idx2 // 3
                c2 = idx2 % 3
                phi = rng.normal(0.0, sigma_angle)
                co = np.cos(phi)
                si = np.sin(phi)
                v1 = x[r1, c1]
                v2 = x[r2, c2]
                nv1 = co * v1 - si * v2
                nv2 = si * v1 + co * v2
                d1 = nv1 - v1
                d2 = nv2 - v2
                for c in range(4):
                    dz1[c] = d1 * r_mix[c1, c]
                    dz2[c] = d2 * r_mix[c2, c]
                cap_new = _capacity_after_shift(p_aff, w, d, r1, dz1, r2, dz2)
                dm = 0.0
                for i in range(4):
                    dm += alphas[i] * (dz1[i] * sp[r1, i] + dz2[i] * sp[r2, i])
                meas_new = meas + 0.5 * dm
                f_new = cap_new - meas_new
                df = f_new - f_cur
                if df <= 0.0 or rng.random() < np.exp(-df / temp):
                    x[r1, c1] = nv1
                    x[r2, c2] = nv2
                    _apply_shift(p_aff, d, r1, dz1, r2, dz2)
                    for c in range(4):
                        zmat[r1, c] += dz1[c]
                        zmat[r2, c] += dz2[c]
                    cap = cap_new
                    meas = meas_new
                    f_cur = f_new
                    if f_cur < best_f:
                        best_f = f_cur
                        for r in range(4):
                            for c in range(4):
                                best_x[r, c] = x[r, c]
                            for c in range(3):
                                best_dirs[r, c] = dirs[r, c]
                            best_alphas[r] = alphas[r]
            else:
                # measurement move: rotate one direction about a coordinate axis
                m_i = rng.integers(0, 4)
                ax = rng.integers(0, 3)
                phi = rng.normal(0.0, sigma_angle)
                co = np.cos(phi)
                si = np.sin(phi)
                a1 = (ax + 1) % 3
                a2 = (ax + 2) % 3
                nd[ax] = dirs[m_i, ax]
                nd[a1] = co * dirs[m_i, a1] - si * dirs[m_i, a2]
                nd[a2] = si * dirs[m_i, a1] + co * dirs[m_i, a2]
                old0 = dirs[m_i, 0]
                old1 = dirs[m_i, 1]
                old2 = dirs[m_i, 2]
                dirs[m_i, 0] = nd[0]
                dirs[m_i, 1] = nd[1]
                dirs[m_i, 2] = nd[2]
                feasible, alphas_new = _alphas_from_dirs(dirs)
                if not feasible:
                    # infeasible proposals carry infinite energy: auto-reject
                    dirs[m_i, 0] = old0
                    dirs[m_i, 1] = old1
                    dirs[m_i, 2] = old2
                else:
                    for mm in range(4):
                        spm[mm] = (
                            smat[mm, 0]
                            + smat[mm, 1] * nd[0]
                            + smat[mm, 2] * nd[1]
                            + smat[mm, 3] * nd[2]
                        )
                    tot = 0.0
                    for i in range(4):
                        acc = 0.0
                        for mm in range(4):
                            if i == m_i:
                                acc += zmat[mm, i] * spm[mm]
                            else:
                                acc += zmat[mm, i] * sp[mm, i]
                        tot += alphas_new[i] * acc
                    meas_new = 0.5 * tot
                    f_new = cap - meas_new
                    df = f_new - f_cur
                    if df <= 0.0 or rng.random() < np.exp(-df / temp):
                        for mm in range(4):
                            sp[mm, m_i] = spm[mm]
                        for i in range(4):
                            alphas[i] = alphas_new[i]
                        meas = meas_new
                        f_cur = f_new
                        if f_cur < best_f:
                            best_f = f_cur
                            for r in range(4):
                                for c in range(4):
                                    best_x[r, c] = x[r, c]
                                for c in range(3):
                                    best_dirs[r, c] = dirs[r, c]
                                best_alphas[r] = alphas[r]
                    else:
                        dirs[m_i, 0] = old0
                        dirs[m_i, 1] = old1
                        dirs[m_i, 2] = old2
        temp *= cool
    return OK, best_f, best_x, best_dirs, best_alphas, t0


@njit(cache=True)
def _pvm2_objective(xv, theta, p_aff, w, closed_uniform):
    a = xv[0]
    if closed_uniform:
        b = np.sqrt(xv[1] * xv[1] + xv[2] * xv[2] + xv[3] * xv[3])
        if b <= abs(a):
            cap = 0.5 * abs(a)
        else:
            cap = 0.25 * (b + a * a / b)
    else:
        tot = 0.0
        for k in range(p_aff.shape[0]):
            acc = (
                p_aff[k, 0] * xv[0]
                + p_aff[k, 1] * xv[1]
                + p_aff[k, 2] * xv[2]
                + p_aff[k, 3] * xv[3]
            )
            tot += w[k] * (acc if acc >= 0.0 else -acc)
        cap = 0.5 * tot
    t1 = theta[1, 0] * xv[0] + theta[1, 1] * xv[1] + theta[1, 2] * xv[2] + theta[1, 3] * xv[3]
    t2 = theta[2, 0] * xv[0] + theta[2, 1] * xv[1] + theta[2, 2] * xv[2] + theta[2, 3] * xv[3]
    t3 = theta[3, 0] * xv[0] + theta[3, 1] * xv[1] + theta[3, 2] * xv[2] + theta[3, 3] * xv[3]
    return cap - 0.5 * np.sqrt(t1 * t1 + t2 * t2 + t3 * t3)


@njit(cache=True)
def anneal_pvm2(theta, p_aff, w, closed_uniform, t_final, cool, steps_per_temp, n_t0, rng):
    """One two-outcome cooling trajectory over the unit coordinate 4-vector.

    The antipodal partner and the optimal projective measurement are implicit
    (both closed form), so only the 4-vector moves.
    Returns (status, best_f, best_xv, t0).
    """
    xv = np.empty(4)
    fmin = 1e300
    fmax = -1e300
    for _ in range(n_t0):
        nrm2 = 0.0
        while True:
            nrm2 = 0.0
            for m in range(4):
                g = rng.normal(0.0, 1.0)
                xv[m] = g
                nrm2 += g * g
            if nrm2 > 1e-24:
                break
        scale = 1.0 / np.sqrt(nrm2)
        for m in range(4):
            xv[m] *= scale
        f = _pvm2_objective(xv, theta, p_aff, w, closed_uniform)
        if f < fmin:
            fmin = f
        if f > fmax:
            fmax = f
    t0 = fmax - fmin

    nrm2 = 0.0
    while True:
        nrm2 = 0.0
        for m in range(4):
            g = rng.normal(0.0, 1.0)
            xv[m] = g
            nrm2 += g * g
        if nrm2 > 1e-24:
            break
    scale = 1.0 / np.sqrt(nrm2)
    for m in range(4):
        xv[m] *= scale
    f_cur = _pvm2_objective(xv, theta, p_aff, w, closed_uniform)
    best_f = f_cur
    best_xv = xv.copy()

    temp = t0
    while temp > t_final:
        nrm2 = 0.0
        for m in range(4):
            nrm2 += xv[m] * xv[m]
        scale = 1.0 / np.sqrt(nrm2)
        for m in range(4):
            xv[m] *= scale
        f_cur = _pvm2_objective(xv, theta, p_aff, w, closed_uniform)
        if f_cur < best_f:
            best_f = f_cur
            for m in range(4):
                best_xv[m] = xv[m]
        sigma_angle = TWO_PI * np.sqrt(temp)
        for _ in range(steps_per_temp):
            i1 = rng.integers(0, 4)
            i2 = rng.integers(0, 3)
            if i2 >= i1:
                i2 += 1
            phi = rng.normal(0.0, sigma_angle)
            co = np.cos(phi)
            si = np.sin(phi)
            v1 = xv[i1]
            v2 = xv[i2]
            xv[i1] = co * v1 - si * v2
            xv[i2] = si * v1 + co * v2
            f_new = _pvm2_objective(xv, theta, p_aff, w, closed_uniform)
            df = f_new - f_cur
            if df <= 0.0 or rng.random() < np.exp(-df / temp):
                f_cur = f_new
                if f_cur < best_f:
                    best_f = f_cur
                    for m in range(4):
                        best_xv[m] = xv[m]
            else:
                xv[i1] = v1
                xv[i2] = v2
        temp *= cool
    return OK, best_f, best_xv, t0


@njit(cache=True)
def anneal_measurement_only(zmat, smat, t_final, cool, steps_per_temp, n_t0, rng):
    """Maximize the measurement support over four-outcome measurements at fixed Z.

    Returns (status, best_meas, best_dirs, best_alphas, t0). Energy is the
    negated support so the Metropolis bookkeeping matches the main kernels.
    """
    dirs = np.empty((4, 3))
    sp = np.empty((4, 4))
    alphas = np.empty(4)
    fmin = 1e300
    fmax = -1e300
    feas_found = False
    for _ in range(n_t0):
        _draw_dirs(rng, dirs)
        feasible, alphas_t = _alphas_from_dirs(dirs)
        if not feasible:
            continue
        _fill_sp(smat, dirs, sp)
        f = -_meas_value(zmat, sp, alphas_t)
        if f < fmin:
            fmin = f
        if f > fmax:
            fmax = f
        feas_found = True
    best_dirs = np.empty((4, 3))
    best_alphas = np.empty(4)
    if not feas_found:
        return NO_FEASIBLE_START, 0.0, best_dirs, best_alphas, 0.0
    t0 = fmax - fmin

    while True:
        _draw_dirs(rng, dirs)
        feasible, alphas_t = _alphas_from_dirs(dirs)
        if feasible:
            for i in range(4):
                alphas[i] = alphas_t[i]
            break
    _fill_sp(smat, dirs, sp)
    f_cur = -_meas_value(zmat, sp, alphas)
    best_f = f_cur
    for i in range(4):
        for m in range(3):
            best_dirs[i, m] = dirs[i, m]
        best_alphas[i] = alphas[i]

    nd = np.empty(3)
    spm = np.empty(4)
    temp = t0
    while temp > t_final:
        _renorm_dirs(dirs)
        _fill_sp(smat, dirs, sp)
        f_cur = -_meas_value(zmat, sp, alphas)
        if f_cur < best_f:
            best_f = f_cur
            for i in range(4):
                for m in range(3):
                    best_dirs[i, m] = dirs[i, m]
                best_alphas[i] = alphas[i]
        sigma_angle = TWO_PI * np.sqrt(temp)
        for _ in range(steps_per_temp):
            m_i = rng.integers(0, 4)
            ax = rng.integers(0, 3)
            phi = rng.normal(0.0, sigma_angle)
            co = np.cos(phi)
            si = np.sin(phi)
            a1 = (ax + 1) % 3
            a2 = (ax + 2) % 3
            nd[ax] = dirs[m_i, ax]
            nd[a1] = co * dirs[m_i, a1] - si * dirs[m_i, a2]
            nd[a2] = si * dirs[m_i, a1] + co * dirs[m_i, a2]
            old0 = dirs[m_i, 0]
            old1 = dirs[m_i, 1]
            old2 = dirs[m_i, 2]
            dirs[m_i, 0] = nd[0]
            dirs[m_i, 1] = nd[1]
            dirs[m_i, 2] = nd[2]
            feasible, alphas_new = _alphas_from_dirs(dirs)
            if not feasible:
                dirs[m_i, 0] = old0
                dirs[m_i, 1] = old1
                dirs[m_i, 2] = old2
                continue
            for mm in range(4):
                spm[mm] = (
                    smat[mm, 0]
                    + smat[mm, 1] * nd[0]
                    + smat[mm, 2] * nd[1]
                    + smat[mm, 3] * nd[2]
                )
            tot = 0.0
            for i in range(4):
                acc = 0.0
                for mm in range(4):
                    if i == m_i:
                        acc += zmat[mm, i] * spm[mm]
                    else:
                        acc += zmat[mm, i] * sp[mm, i]
                tot += alphas_new[i] * acc
            f_new = -0.5 * tot
            df = f_new - f_cur
            if df <= 0.0 or rng.random() < np.exp(-df / temp):
                for mm in range(4):
                    sp[mm, m_i] = spm[mm]
                for i in range(4):
                    alphas[i] = alphas_new[i]
                f_cur = f_new
                if f_cur < best_f:
                    best_f = f_cur
                    for i in range(4):
                        for m in range(3):
                            best_dirs[i, m] = dirs[i, m]
                        best_alphas[i] = alphas[i]
            else:
                dirs[m_i, 0] = old0
                dirs[m_i, 1] = old1
                dirs[m_i, 2] = old2
        temp *= cool
    return OK, -best_f, best_dirs, best_alphas, t0
