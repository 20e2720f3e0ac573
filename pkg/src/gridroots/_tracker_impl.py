"""Numeric kernels for polynomial evaluation and homotopy path tracking.

Everything here is written in the numpy subset that numba can compile.
The functions are deliberately loop-heavy and allocation-light; the
backend selector in ``_kernels`` either leaves them as plain Python or
wraps them with ``numba.njit``.

Polynomial systems arrive in packed form: a flat coefficient vector, an
integer exponent matrix (one row per monomial), and CSR-style offsets
delimiting each polynomial's monomial run.  Jacobians are packed the
same way with ``npoly * nvars`` runs in row-major order.

The homotopy is parameterised internally by ``tau = 1 - t``:

    H(x, tau) = gamma * tau * G(x) + (1 - tau) * F(x)

so a path runs from tau = 1 (start system G) to tau = 0 (target F).
Working in tau keeps full floating-point resolution near the endpoint,
which matters for the geometric endgame below.
"""

import math

import numpy as np

# Path status codes shared with the Python layer.
FINITE = 0
AT_INFINITY = 1
SINGULAR = 2
FAILED = 3

# Newton outcome codes (internal to this module).
_CONVERGED = 0
_DIVERGED = 1
_NO_CONVERGE = 2
_BROKEN = 3

# Endgame constants.  TAU_FLOOR bounds the geometric shrink; JUMP_FRACTION
# times the divergence norm bounds the point norm above which we refuse to
# Newton-polish onto the target (a diverging iterate could otherwise land
# on an unrelated finite solution and corrupt the path accounting).
_TAU_FLOOR = 1e-24
_JUMP_FRACTION = 1e-4


def inf_norm(v):
    m = 0.0
    for i in range(v.shape[0]):
        a = abs(v[i])
        if a > m:
            m = a
    return m


def max_imag(v):
    m = 0.0
    for i in range(v.shape[0]):
        a = abs(v[i].imag)
        if a > m:
            m = a
    return m


def vec_is_finite(v):
    for i in range(v.shape[0]):
        if not (math.isfinite(v[i].real) and math.isfinite(v[i].imag)):
            return False
    return True


def power_table(x, maxdeg):
    """Table of x[v]**e for e in 0..maxdeg, one row per variable."""
    nv = x.shape[0]
    pows = np.empty((nv, maxdeg + 1), dtype=np.complex128)
    for v in range(nv):
        pows[v, 0] = 1.0 + 0.0j
        for e in range(1, maxdeg + 1):
            pows[v, e] = pows[v, e - 1] * x[v]
    return pows


def eval_packed(coeffs, expos, offsets, pows, out):
    """Evaluate a packed polynomial system given a precomputed power table."""
    npoly = offsets.shape[0] - 1
    nv = expos.shape[1]
    for p in range(npoly):
        acc = 0.0 + 0.0j
        for m in range(offsets[p], offsets[p + 1]):
            term = coeffs[m]
            for v in range(nv):
                e = expos[m, v]
                if e > 0:
                    term = term * pows[v, e]
            acc = acc + term
        out[p] = acc
    return out


def eval_jac_packed(coeffs, expos, offsets, pows, out):
    """Evaluate a packed Jacobian (npoly * nvars runs, row-major)."""
    npoly = out.shape[0]
    nv = out.shape[1]
    for p in range(npoly):
        for q in range(nv):
            k = p * nv + q
            acc = 0.0 + 0.0j
            for m in range(offsets[k], offsets[k + 1]):
                term = coeffs[m]
                for v in range(nv):
                    e = expos[m, v]
                    if e > 0:
                        term = term * pows[v, e]
                acc = acc + term
            out[p, q] = acc
    return out


def system_value(coeffs, expos, offsets, maxdeg, x):
    """Value of one packed system at x (fresh allocation)."""
    out = np.empty(offsets.shape[0] - 1, dtype=np.complex128)
    pows = power_table(x, maxdeg)
    eval_packed(coeffs, expos, offsets, pows, out)
    return out


def system_jac(coeffs, expos, offsets, maxdeg, nv, x):
    """Jacobian matrix of one packed system at x (fresh allocation)."""
    npoly = (offsets.shape[0] - 1) // nv
    out = np.empty((npoly, nv), dtype=np.complex128)
    pows = power_table(x, maxdeg)
    eval_jac_packed(coeffs, expos, offsets, pows, out)
    return out


def newton_homotopy(tc, te, to, tjc, tje, tjo,
                    sc, se, so, sjc, sje, sjo,
                    maxdeg, gamma, x, tau,
                    tol, max_iters, div_norm):
    """Newton-correct x onto H(., tau) = 0.

    Returns (code, x_new).  The step tolerance is relative once the
    iterate norm exceeds one, so correction remains meaningful on the
    large-norm points seen along diverging paths.
    """
    nv = x.shape[0]
    f = np.empty(nv, dtype=np.complex128)
    g = np.empty(nv, dtype=np.complex128)
    fj = np.empty((nv, nv), dtype=np.complex128)
    gj = np.empty((nv, nv), dtype=np.complex128)
    xk = x.copy()
    for _ in range(max_iters):
        pows = power_table(xk, maxdeg)
        eval_packed(tc, te, to, pows, f)
        eval_packed(sc, se, so, pows, g)
        h = gamma * tau * g + (1.0 - tau) * f
        if not vec_is_finite(h):
            if inf_norm(xk) > div_norm:
                return _DIVERGED, xk
            return _BROKEN, xk
        eval_jac_packed(tjc, tje, tjo, pows, fj)
        eval_jac_packed(sjc, sje, sjo, pows, gj)
        hx = gamma * tau * gj + (1.0 - tau) * fj
        ok = True
        dx = xk
        try:
            dx = np.linalg.solve(hx, -h)
        except Exception:
            ok = False
        if not ok or not vec_is_finite(dx):
            return _BROKEN, xk
        xk = xk + dx
        nx = inf_norm(xk)
        if nx > div_norm:
            return _DIVERGED, xk
        if inf_norm(dx) < tol * max(1.0, nx):
            return _CONVERGED, xk
    return _NO_CONVERGE, xk


def newton_target(tc, te, to, tjc, tje, tjo,
                  maxdeg, x, tol, max_iters, div_norm):
    """Newton iteration on the target system alone.

    Returns (code, x_new, residual_inf) with the residual evaluated at
    the returned point.  Convergence means the target residual dropped
    below tol (an absolute test: endpoints of interest are solutions).
    """
    nv = x.shape[0]
    f = np.empty(nv, dtype=np.complex128)
    fj = np.empty((nv, nv), dtype=np.complex128)
    xk = x.copy()
    code = _NO_CONVERGE
    for _ in range(max_iters):
        pows = power_table(xk, maxdeg)
        eval_packed(tc, te, to, pows, f)
        if not vec_is_finite(f):
            if inf_norm(xk) > div_norm:
                return _DIVERGED, xk, math.inf
            return _BROKEN, xk, math.inf
        res = inf_norm(f)
        if res < tol:
            return _CONVERGED, xk, res
        eval_jac_packed(tjc, tje, tjo, pows, fj)
        ok = True
        dx = xk
        try:
            dx = np.linalg.solve(fj, -f)
        except Exception:
            ok = False
        if not ok or not vec_is_finite(dx):
            return _BROKEN, xk, res
        xk = xk + dx
        if inf_norm(xk) > div_norm:
            return _DIVERGED, xk, res
    pows = power_table(xk, maxdeg)
    eval_packed(tc, te, to, pows, f)
    res = inf_norm(f)
    if res < tol:
        code = _CONVERGED
    return code, xk, res


def cond_estimate(a):
    """2-norm condition number via SVD; huge sentinel on breakdown."""
    n = a.shape[0]
    s = np.empty(n, dtype=np.float64)
    ok = True
    try:
        u, s2, vh = np.linalg.svd(a)
        s = s2
    except Exception:
        ok = False
    if not ok:
        return 1e300
    smax = s[0]
    smin = s[n - 1]
    if not (math.isfinite(smax) and math.isfinite(smin)):
        return 1e300
    if smin <= 0.0 or smin < smax * 1e-300:
        return 1e300
    return smax / smin


def classify_endpoint(tc, te, to, tjc, tje, tjo,
                      maxdeg, x, corr_tol, div_norm, cond_limit):
    """Decide the fate of a path whose tracking phase has finished.

    Polishes with Newton on the target, then applies the residual and
    Jacobian-condition tests.  Points whose norm is already a sizeable
    fraction of the divergence threshold are never polished: Newton from
    a far-out iterate can land on an arbitrary solution.
    """
    nv = x.shape[0]
    if inf_norm(x) > _JUMP_FRACTION * div_norm:
        res = inf_norm(system_value(tc, te, to, maxdeg, x))
        return FAILED, x, res
    code, xs, res = newton_target(tc, te, to, tjc, tje, tjo,
                                  maxdeg, x, corr_tol, 30, div_norm)
    if code == _DIVERGED or inf_norm(xs) > div_norm:
        return AT_INFINITY, xs, res
    if code == _CONVERGED:
        fj = system_jac(tjc, tje, tjo, maxdeg, nv, xs)
        if cond_estimate(fj) > cond_limit:
            return SINGULAR, xs, res
        return FINITE, xs, res
    fj = system_jac(tjc, tje, tjo, maxdeg, nv, xs)
    if cond_estimate(fj) > cond_limit:
        return SINGULAR, xs, res
    return FAILED, xs, res


def track_path(tc, te, to, tjc, tje, tjo,
               sc, se, so, sjc, sje, sjo,
               maxdeg, gamma, x0,
               initial_step, min_step, max_step,
               corr_tol, corr_iters, div_norm,
               endgame_start, cond_limit, max_steps):
    """Track one path of H(x, tau) from tau=1 to tau=0.

    Euler predictor on the Davidenko equation, Newton corrector, adaptive
    step control: halve on corrector failure, grow 1.5x after four
    consecutive accepted steps, max step cut 10x inside the endgame
    region.  A path whose nominal step underflows min_step inside the
    endgame region enters a geometric tau-shrink endgame, which either
    drives diverging iterates past div_norm or stabilises finite ones
    for endpoint classification.

    Returns (status, endpoint, target_residual_inf, steps).
    """
    nv = x0.shape[0]
    f = np.empty(nv, dtype=np.complex128)
    g = np.empty(nv, dtype=np.complex128)
    fj = np.empty((nv, nv), dtype=np.complex128)
    gj = np.empty((nv, nv), dtype=np.complex128)

    xk = x0.copy()
    tau = 1.0
    h = initial_step
    consec = 0
    steps = 0
    stuck = False
    endgame_tau = 1.0 - endgame_start

    while tau > 0.0:
        if steps >= max_steps:
            res = inf_norm(system_value(tc, te, to, maxdeg, xk))
            return FAILED, xk, res, steps
        hmax = max_step
        if tau <= endgame_tau:
            hmax = max_step * 0.1
        if h > hmax:
            h = hmax
        hs = h
        if hs > tau:
            hs = tau

        # Euler predictor: dx/dtau = -Hx^{-1} (gamma*G - F), step is -hs.
        pows = power_table(xk, maxdeg)
        eval_packed(tc, te, to, pows, f)
        eval_packed(sc, se, so, pows, g)
        eval_jac_packed(tjc, tje, tjo, pows, fj)
        eval_jac_packed(sjc, sje, sjo, pows, gj)
        hx = gamma * tau * gj + (1.0 - tau) * fj
        rhs = gamma * g - f
        pred_ok = True
        xp = xk
        try:
            delta = np.linalg.solve(hx, rhs)
            xp = xk + hs * delta
        except Exception:
            pred_ok = False

        steps += 1
        code = _NO_CONVERGE
        xc = xk
        if pred_ok and vec_is_finite(xp):
            if inf_norm(xp) > div_norm:
                res = inf_norm(system_value(tc, te, to, maxdeg, xp))
                return AT_INFINITY, xp, res, steps
            tau_new = tau - hs
            code, xc = newton_homotopy(tc, te, to, tjc, tje, tjo,
                                       sc, se, so, sjc, sje, sjo,
                                       maxdeg, gamma, xp, tau_new,
                                       corr_tol, corr_iters, div_norm)
            if code == _DIVERGED:
                res = inf_norm(system_value(tc, te, to, maxdeg, xc))
                return AT_INFINITY, xc, res, steps

        if code == _CONVERGED:
            xk = xc
            tau = tau - hs
            if inf_norm(xk) > div_norm:
                res = inf_norm(system_value(tc, te, to, maxdeg, xk))
                return AT_INFINITY, xk, res, steps
            consec += 1
            if consec >= 4:
                h = h * 1.5
                if h > max_step:
                    h = max_step
                consec = 0
        else:
            consec = 0
            h = hs * 0.5
            if h < min_step:
                stuck = True
                break

    if not stuck:
        status, xe, res = classify_endpoint(tc, te, to, tjc, tje, tjo,
                                            maxdeg, xk, corr_tol,
                                            div_norm, cond_limit)
        return status, xe, res, steps

    if tau > endgame_tau:
        # Mid-path breakdown, nowhere near the endpoint: report honestly.
        res = inf_norm(system_value(tc, te, to, maxdeg, xk))
        return FAILED, xk, res, steps

    # Geometric endgame: predictor-corrector with multiplicative tau
    # steps tau -> rho*tau, since the additive min_step floor cannot
    # resolve paths whose natural step scales with tau.  Diverging paths
    # gain a factor ~(1/rho)^w in norm per shrink, so they cross
    # div_norm well before TAU_FLOOR; finite endpoints stabilise and
    # drop out early.  rho backs off toward 1 when the corrector balks.
    gx = xk.copy()
    gtau = tau
    stable = False
    rho = 0.5
    budget = 400
    while gtau > _TAU_FLOOR and budget > 0:
        budget -= 1
        gtau_next = rho * gtau
        # Euler prediction for the shrink (same Davidenko slope as the
        # main loop, step gtau_next - gtau).
        pows = power_table(gx, maxdeg)
        eval_packed(tc, te, to, pows, f)
        eval_packed(sc, se, so, pows, g)
        eval_jac_packed(tjc, tje, tjo, pows, fj)
        eval_jac_packed(sjc, sje, sjo, pows, gj)
        hx = gamma * gtau * gj + (1.0 - gtau) * fj
        rhs = gamma * g - f
        xp = gx
        try:
            delta = np.linalg.solve(hx, rhs)
            xp = gx + (gtau - gtau_next) * delta
        except Exception:
            xp = gx
        if not vec_is_finite(xp):
            xp = gx
        if inf_norm(xp) > div_norm:
            res = inf_norm(system_value(tc, te, to, maxdeg, xp))
            return AT_INFINITY, xp, res, steps
        # Near the face at infinity hx is increasingly ill-conditioned
        # and Newton cannot do better than eps * cond(hx) relative, so
        # demand only what is attainable.  Finite endpoints are still
        # polished against the target system at full corr_tol when the
        # endgame settles.
        noise = 2.3e-16 * cond_estimate(hx)
        tol_eff = corr_tol
        if noise > tol_eff:
            tol_eff = noise
        if tol_eff > 1e-3:
            tol_eff = 1e-3
        code, gxn = newton_homotopy(tc, te, to, tjc, tje, tjo,
                                    sc, se, so, sjc, sje, sjo,
                                    maxdeg, gamma, xp, gtau_next,
                                    tol_eff, corr_iters + 5, div_norm)
        if code == _DIVERGED:
            res = inf_norm(system_value(tc, te, to, maxdeg, gxn))
            return AT_INFINITY, gxn, res, steps
        steps += 1
        if code != _CONVERGED:
            rho = math.sqrt(rho)
            if rho > 0.995:
                break
            continue
        moved = inf_norm(gxn - gx)
        gx = gxn
        gtau = gtau_next
        if rho > 0.5:
            rho = rho * rho
            if rho < 0.5:
                rho = 0.5
        nx = inf_norm(gx)
        if nx > div_norm:
            res = inf_norm(system_value(tc, te, to, maxdeg, gx))
            return AT_INFINITY, gx, res, steps
        if moved < 100.0 * corr_tol * max(1.0, nx):
            stable = True
            break

    if stable or gtau <= _TAU_FLOOR:
        status, xe, res = classify_endpoint(tc, te, to, tjc, tje, tjo,
                                            maxdeg, gx, corr_tol,
                                            div_norm, cond_limit)
        return status, xe, res, steps

    # Endgame wedged at positive tau without stabilising: singular if
    # the target Jacobian there is numerically rank-deficient.
    res = inf_norm(system_value(tc, te, to, maxdeg, gx))
    fjac = system_jac(tjc, tje, tjo, maxdeg, nv, gx)
    if cond_estimate(fjac) > cond_limit:
        return SINGULAR, gx, res, steps
    return FAILED, gx, res, steps
