"""Pure-Python simulation kernel.

Fallback used when the compiled extension is unavailable. The arithmetic
here is deliberately scalar (plain floats, explicit index loops) so that
the sequence of IEEE operations matches etlqr._loop_c exactly; keep the
two loops line-for-line in sync when changing either.
"""
from __future__ import annotations

from math import exp, sin, sqrt

KIND_TIME = 0
KIND_ETM = 1


def simulate(a, bvec, kvec, g, x0, n, dt,
             kind, period,
             z_bar, eps, coef_quad, coef_cross,
             xi_amp, xi_decay, xi_freq, xi_phase, has_dist,
             states, inputs, clock, flags, dists, trig_steps):
    """Run the closed loop for n fixed steps of size dt.

    Outputs are written into the preallocated arrays (n+1 rows each;
    trig_steps holds event step indices). Returns (status, n_trig,
    fail_step); status 1 means the state norm left the trust region at
    fail_step.
    """
    am = a.tolist()
    gm = g.tolist()
    bv = bvec.tolist()
    kv = kvec.tolist()
    amp = xi_amp.tolist()
    frq = xi_freq.tolist()
    pha = xi_phase.tolist()
    dt = float(dt)
    period = float(period)
    z_bar = float(z_bar)
    eps = float(eps)
    coef_quad = float(coef_quad)
    coef_cross = float(coef_cross)
    decay = float(xi_decay)

    x = x0.tolist()
    held = [x[0], x[1], x[2], x[3]]
    eta = [0.0, 0.0, 0.0, 0.0]
    z = z_bar if kind == KIND_ETM else 0.0
    next_bnd = period

    xi = [0.0, 0.0, 0.0, 0.0]
    xs = [0.0, 0.0, 0.0, 0.0]   # stage state
    k1 = [0.0, 0.0, 0.0, 0.0]
    k2 = [0.0, 0.0, 0.0, 0.0]
    k3 = [0.0, 0.0, 0.0, 0.0]
    k4 = [0.0, 0.0, 0.0, 0.0]
    xn = [0.0, 0.0, 0.0, 0.0]

    def eval_xi(ts, out):
        if has_dist:
            es = exp(-decay * ts)
            for j in range(4):
                out[j] = amp[j] * es * sin(frq[j] * ts + pha[j])
        else:
            for j in range(4):
                out[j] = 0.0

    def eval_rhs(xv, u, xiv, out):
        for r in range(4):
            acc = 0.0
            for c in range(4):
                acc += am[r][c] * xv[c]
            acc += bv[r] * u
            if has_dist:
                for c in range(4):
                    acc += gm[r][c] * xiv[c]
            out[r] = acc

    # row 0: state at t = 0, input held from the initial event
    for j in range(4):
        states[0, j] = x[j]
    eval_xi(0.0, xi)
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
        eval_xi(t, xi)
        eval_rhs(x, u, xi, k1)
        for j in range(4):
            xs[j] = x[j] + 0.5 * dt * k1[j]
        eval_xi(th, xi)
        eval_rhs(xs, u, xi, k2)
        for j in range(4):
            xs[j] = x[j] + 0.5 * dt * k2[j]
        eval_rhs(xs, u, xi, k3)
        for j in range(4):
            xs[j] = x[j] + dt * k3[j]
        eval_xi(tf, xi)
        eval_rhs(xs, u, xi, k4)
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
        flags[i + 1] = triggered
        eval_xi((i + 1) * dt, xi)
        for j in range(4):
            dists[i + 1, j] = xi[j]

    inputs[n] = -(kv[0] * held[0] + kv[1] * held[1] + kv[2] * held[2] + kv[3] * held[3])
    return 0, n_trig, -1
