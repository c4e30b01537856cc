# cython: language_level=3
"""Compiled simulation kernel.

Line-for-line translation of etlqr._loop_py.simulate; the two must execute
the same IEEE operation sequence (build with -ffp-contract=off) so either
backend produces bit-identical trajectories. Keep them in sync.
"""

cimport cython
from libc.math cimport exp, sin, sqrt

KIND_TIME = 0
KIND_ETM = 1


cdef inline void eval_xi(double ts, bint has_dist, double decay,
                         const double* amp, const double* frq, const double* pha,
                         double* out) noexcept nogil:
    cdef double es
    cdef int j
    if has_dist:
        es = exp(-decay * ts)
        for j in range(4):
            out[j] = amp[j] * es * sin(frq[j] * ts + pha[j])
    else:
        for j in range(4):
            out[j] = 0.0


cdef inline void eval_rhs(const double* am, const double* bv, const double* gm,
                          bint has_dist, const double* xv, double u,
                          const double* xiv, double* out) noexcept nogil:
    cdef double acc
    cdef int r, c
    for r in range(4):
        acc = 0.0
        for c in range(4):
            acc += am[4 * r + c] * xv[c]
        acc += bv[r] * u
        if has_dist:
            for c in range(4):
                acc += gm[4 * r + c] * xiv[c]
        out[r] = acc


@cython.boundscheck(False)
@cython.wraparound(False)
def simulate(double[:, ::1] a, double[::1] bvec, double[::1] kvec,
             double[:, ::1] g, double[::1] x0, Py_ssize_t n, double dt,
             int kind, double period,
             double z_bar, double eps, double coef_quad, double coef_cross,
             double[::1] xi_amp, double xi_decay, double[::1] xi_freq,
             double[::1] xi_phase, bint has_dist,
             double[:, ::1] states, double[::1] inputs, double[::1] clock,
             unsigned char[::1] flags, double[:, ::1] dists,
             long long[::1] trig_steps):
    """Compiled counterpart of etlqr._loop_py.simulate (same contract)."""
    cdef double am[16]
    cdef double gm[16]
    cdef double bv[4]
    cdef double kv[4]
    cdef double amp[4]
    cdef double frq[4]
    cdef double pha[4]
    cdef double x[4]
    cdef double held[4]
    cdef double eta[4]
    cdef double xi[4]
    cdef double xs[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double xn[4]
    cdef double decay = xi_decay
    cdef double z, u, w, t, th, tf, tn, next_bnd
    cdef double ee, en, p0, p1, p2, p3, ratio, vp, ss
    cdef Py_ssize_t i, n_trig
    cdef int r, c, j, triggered

    for r in range(4):
        for c in range(4):
            am[4 * r + c] = a[r, c]
            gm[4 * r + c] = g[r, c]
        bv[r] = bvec[r]
        kv[r] = kvec[r]
        amp[r] = xi_amp[r]
        frq[r] = xi_freq[r]
        pha[r] = xi_phase[r]
        x[r] = x0[r]
        held[r] = x[r]
        eta[r] = 0.0

    z = z_bar if kind == KIND_ETM else 0.0
    next_bnd = period

    # row 0: state at t = 0, input held from the initial event
    for j in range(4):
        states[0, j] = x[j]
    eval_xi(0.0, has_dist, decay, amp, frq, pha, xi)
    for j in range(4):
        dists[0, j] = xi[j]
    u = -(kv[0] * held[0] + kv[1] * held[1] + kv[2] * held[2] + kv[3] * held[3])
    inputs[0] = u
    clock[0] = z
    flags[0] = 1
    trig_steps[0] = 0
    n_trig = 1

    for i in range(n):
        t = i * dt
        u = -(kv[0] * held[0] + kv[1] * held[1] + kv[2] * held[2] + kv[3] * held[3])
        inputs[i] = u

        if kind == KIND_ETM:
            # drain rate from the stored sample (left endpoint of the interval)
            ee = eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2] + eta[3] * eta[3]
            if ee == 0.0:
                w = -eps
            else:
                en = sqrt(ee)
                p0 = held[0] - eta[0]
                p1 = held[1] - eta[1]
                p2 = held[2] - eta[2]
                p3 = held[3] - eta[3]
                ratio = sqrt(p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3) / en
                vp = coef_quad * ratio * ratio - 2.0 * (1.0 + z) * coef_cross * ratio
                if vp > 0.0:
                    vp = 0.0
                w = vp - eps
        else:
            w = 0.0

        # classical RK4 with the held input and the disturbance at stage times
        th = t + 0.5 * dt
        tf = t + dt
        eval_xi(t, has_dist, decay, amp, frq, pha, xi)
        eval_rhs(am, bv, gm, has_dist, x, u, xi, k1)
        for j in range(4):
            xs[j] = x[j] + 0.5 * dt * k1[j]
        eval_xi(th, has_dist, decay, amp, frq, pha, xi)
        eval_rhs(am, bv, gm, has_dist, xs, u, xi, k2)
        for j in range(4):
            xs[j] = x[j] + 0.5 * dt * k2[j]
        eval_rhs(am, bv, gm, has_dist, xs, u, xi, k3)
        for j in range(4):
            xs[j] = x[j] + dt * k3[j]
        eval_xi(tf, has_dist, decay, amp, frq, pha, xi)
        eval_rhs(am, bv, gm, has_dist, xs, u, xi, k4)
        for j in range(4):
            xn[j] = x[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])

        ss = xn[0] * xn[0] + xn[1] * xn[1] + xn[2] * xn[2] + xn[3] * xn[3]
        if ss > 1e12 or ss != ss:
            for j in range(4):
                states[i + 1, j] = xn[j]
            return 1, n_trig, i + 1

        triggered = 0
        if kind == KIND_ETM:
            z = z + w * dt
            if z < 0.0:
                z = 0.0
            if z == 0.0:
                z = z_bar
                for j in range(4):
                    held[j] = xn[j]
                    eta[j] = 0.0
                triggered = 1
            else:
                for j in range(4):
                    eta[j] = held[j] - xn[j]
        else:
            # resample at period boundaries; the boundary coinciding with
            # the end time starts no hold interval, so it does not count
            tn = (i + 1) * dt
            if i + 1 < n and tn >= next_bnd - 1e-9:
                next_bnd = next_bnd + period
                for j in range(4):
                    held[j] = xn[j]
                triggered = 1

        if triggered:
            trig_steps[n_trig] = i + 1
            n_trig += 1
        for j in range(4):
            x[j] = xn[j]
            states[i + 1, j] = xn[j]
        clock[i + 1] = z
        flags[i + 1] = <unsigned char>triggered
        eval_xi((i + 1) * dt, has_dist, decay, amp, frq, pha, xi)
        for j in range(4):
            dists[i + 1, j] = xi[j]

    inputs[n] = -(kv[0] * held[0] + kv[1] * held[1] + kv[2] * held[2] + kv[3] * held[3])
    return 0, n_trig, -1
