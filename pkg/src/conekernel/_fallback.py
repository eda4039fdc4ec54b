"""Pure-Python versions of the hot kernels.

The path simulator here is the reference implementation: the compiled kernel
performs the same draws and the same floating-point operations in the same
order, so both produce identical bits.  It also provides the record mode that
keeps every jump, which the compiled kernel does not.
"""
from __future__ import annotations

import math

import numpy as np

from .rng import PathStream

COMPILED = False

MODE_ENDPOINT = 0
MODE_EXIT = 1
MODE_LEVYSYS = 2
MODE_JUMP = 3

STATUS_OK = 0
STATUS_CONTRACT = 1
STATUS_OVERFLOW = 2


def density_points(X, alpha, ang, rtab, t_coef, threads=1):
    from .density import density_point_numpy

    X = np.asarray(X, float)
    vals = np.empty(len(X))
    errs = np.empty(len(X))
    for i, x in enumerate(X):
        vals[i], errs[i] = density_point_numpy(x, alpha, ang, rtab, t_coef)
    return vals, errs


def _dot(a, b):
    s = 0.0
    for k in range(len(a)):
        s = s + a[k] * b[k]
    return s


def _normal(st: PathStream, lane: int) -> float:
    u1 = st.uniform(lane)
    u2 = st.uniform(lane)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def sample_direction(p: dict, st: PathStream) -> list:
    d = p["d"]
    axes, ap, cum = p["axes_list"], p["aperture_list"], p["cum_list"]
    n = len(ap)
    while True:
        U = st.uniform(0)
        i = 0
        while i < n - 1 and U >= cum[i]:
            i += 1
        lam = axes[i]
        nappe = 1.0 if st.uniform(0) < 0.5 else -1.0
        if d == 2:
            psi = ap[i] * st.uniform(0)
            side = 1.0 if st.uniform(0) < 0.5 else -1.0
            c = math.cos(psi)
            s = math.sin(psi) * side
            u = [nappe * (c * lam[0] - s * lam[1]), nappe * (c * lam[1] + s * lam[0])]
        else:
            while True:
                psi = ap[i] * st.uniform(0)
                acc = st.uniform(0)
                if acc * p["sinpow_list"][i] < math.pow(math.sin(psi), float(d - 2)):
                    break
            while True:
                e = [_normal(st, 0) for _ in range(d)]
                proj = _dot(e, lam)
                e = [e[k] - proj * lam[k] for k in range(d)]
                nrm = math.sqrt(_dot(e, e))
                if nrm > 1e-12:
                    break
            c = math.cos(psi)
            s = math.sin(psi) / nrm
            u = [nappe * (c * lam[k] + s * e[k]) for k in range(d)]
        if n == 1:
            return u
        cnt = 1
        for j in range(n):
            if j != i and abs(_dot(axes[j], u)) > p["cosap_list"][j]:
                cnt += 1
        if cnt == 1 or st.uniform(0) * cnt < 1.0:
            return u


def sample_jump(p: dict, st: PathStream) -> list:
    u = sample_direction(p, st)
    r = p["delta"] * math.pow(st.uniform(0), -1.0 / p["alpha"])
    return [r * c for c in u]


def _gauss_step(p, st, h, x):
    d = p["d"]
    L = p["chol_list"]
    nv = [_normal(st, 2) for _ in range(d)]
    sh = math.sqrt(h)
    for k in range(d):
        acc = 0.0
        for j in range(k + 1):
            acc = acc + L[k][j] * nv[j]
        x[k] = x[k] + sh * acc


def _outside(x, x0, r):
    s = 0.0
    for k in range(len(x)):
        dx = x[k] - x0[k]
        s = s + dx * dx
    return s >= r * r


def _in_set(p, z):
    r = math.sqrt(_dot(z, z))
    if not (r > p["rmin"] and r <= p["rmax"]):
        return False
    if not p["wcos_list"]:
        return True
    for ax, c in zip(p["waxes_list"], p["wcos_list"]):
        if abs(_dot(ax, z)) > r * c:
            return True
    return False


def run_path(p: dict, mode: int, path: int, record: dict | None = None):
    """Simulate one path; returns ``(out, njumps, status)``.

    With ``record`` given (a dict), jump times, increments and post-jump
    positions are appended to its ``times``, ``jumps`` and ``positions`` lists.
    """
    st = PathStream(p["seed"], p["stream"], path)
    if mode == MODE_JUMP:
        return sample_jump(p, st), 0, STATUS_OK
    d = p["d"]
    x0 = list(p["x0"])
    x = list(x0)
    t = 0.0
    rate, horizon = p["rate"], p["horizon"]
    gauss, modulated = p["gauss"], p["modulated"]
    count_a = 0.0
    s_int = 0.0
    nj = 0
    status = STATUS_OK
    exit_time = math.inf
    while True:
        try:
            tn = t - math.log(st.uniform(0)) / rate
        except OverflowError:
            status = STATUS_OVERFLOW
            break
        if tn > horizon:
            h = horizon - t
            if mode == MODE_LEVYSYS:
                s_int = s_int + h * math.sin(2.0 * p["freq"] * x[0])
            if gauss:
                _gauss_step(p, st, h, x)
                if mode == MODE_EXIT and _outside(x, x0, p["radius"]):
                    exit_time = horizon
            break
        h = tn - t
        if mode == MODE_LEVYSYS:
            s_int = s_int + h * math.sin(2.0 * p["freq"] * x[0])
        if gauss:
            _gauss_step(p, st, h, x)
            if mode == MODE_EXIT and _outside(x, x0, p["radius"]):
                exit_time = tn
                break
        t = tn
        z = sample_jump(p, st)
        if modulated:
            y1 = x[0] + z[0]
            mv = p["base"] + p["amp"] * math.sin(p["freq"] * (x[0] + y1))
            kap = p["kappa"]
            if mv < (1.0 / kap) * (1.0 - 1e-12) or mv > kap * (1.0 + 1e-12):
                status = STATUS_CONTRACT
                break
            if st.uniform(1) * kap >= mv:
                continue
        if mode == MODE_LEVYSYS and _in_set(p, z):
            count_a = count_a + 1.0
        for k in range(d):
            x[k] = x[k] + z[k]
        nj += 1
        if record is not None:
            record["times"].append(t)
            record["jumps"].append(list(z))
            record["positions"].append(list(x))
        if mode == MODE_EXIT and _outside(x, x0, p["radius"]):
            exit_time = t
            break
    if record is not None:
        record["final"] = list(x)
    if mode == MODE_ENDPOINT:
        out = x
    elif mode == MODE_EXIT:
        out = [exit_time]
    else:
        out = [count_a, s_int]
    return out, nj, status


def simulate_paths(p: dict, mode: int, first: int, count: int, threads: int = 1):
    width = p["d"] if mode in (MODE_ENDPOINT, MODE_JUMP) else (1 if mode == MODE_EXIT else 2)
    out = np.zeros((count, width))
    nj = np.zeros(count, dtype=np.int64)
    status = np.zeros(count, dtype=np.int32)
    for i in range(count):
        o, n, s = run_path(p, mode, first + i)
        out[i] = o
        nj[i] = n
        status[i] = s
        if s != STATUS_OK:
            break
    return out, nj, status
