# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the angular density quadrature and the path simulator.

Both mirror :mod:`conekernel._fallback` operation by operation; the path
kernel reproduces it bit for bit (same draw order, same libm calls, no
floating-point contraction).
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport (asinh, cos, exp, fabs, floor, fmod, log, pow, sin,
                        sinh, sqrt, INFINITY, M_PI)
from libc.stdint cimport uint32_t, uint64_t
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

COMPILED = True

DEF MAXD = 16

cdef enum:
    MODE_ENDPOINT = 0
    MODE_EXIT = 1
    MODE_LEVYSYS = 2
    MODE_JUMP = 3

cdef enum:
    STATUS_OK = 0
    STATUS_CONTRACT = 1
    STATUS_OVERFLOW = 2


# ---------------------------------------------------------------------------
# Threefry-2x32-20

cdef inline uint32_t _rotl(uint32_t x, int r) noexcept nogil:
    return (x << r) | (x >> (32 - r))


cdef inline void _threefry(uint32_t k0, uint32_t k1, uint32_t c0, uint32_t c1,
                           uint32_t *o0, uint32_t *o1) noexcept nogil:
    cdef uint32_t ks[3]
    cdef int rot[8]
    cdef int r, s
    cdef uint32_t x0, x1
    ks[0] = k0
    ks[1] = k1
    ks[2] = <uint32_t>0x1BD11BDA ^ k0 ^ k1
    rot[0] = 13; rot[1] = 15; rot[2] = 26; rot[3] = 6
    rot[4] = 17; rot[5] = 29; rot[6] = 16; rot[7] = 24
    x0 = c0 + k0
    x1 = c1 + k1
    for r in range(20):
        x0 = x0 + x1
        x1 = _rotl(x1, rot[r % 8])
        x1 = x1 ^ x0
        if r % 4 == 3:
            s = (r + 1) // 4
            x0 = x0 + ks[s % 3]
            x1 = x1 + ks[(s + 1) % 3] + <uint32_t>s
    o0[0] = x0
    o1[0] = x1


def threefry2x32(uint32_t k0, uint32_t k1, uint32_t c0, uint32_t c1):
    cdef uint32_t a, b
    _threefry(k0, k1, c0, c1, &a, &b)
    return a, b


cdef struct Stream:
    uint32_t k0
    uint32_t k1
    uint32_t path
    uint32_t count[3]
    int status


cdef inline double _uniform(Stream *st, int lane) noexcept nogil:
    cdef uint32_t w0, w1
    cdef uint32_t n = st.count[lane]
    if n >= (<uint32_t>1 << 28):
        st.status = STATUS_OVERFLOW
        return 0.5
    st.count[lane] = n + 1
    _threefry(st.k0, st.k1, st.path, (<uint32_t>lane << 28) | n, &w0, &w1)
    return ((<double>(w0 >> 6)) * 67108864.0 + <double>(w1 >> 6) + 0.5) * 2.220446049250313e-16


cdef inline double _normal(Stream *st, int lane) noexcept nogil:
    cdef double u1 = _uniform(st, lane)
    cdef double u2 = _uniform(st, lane)
    return sqrt(-2.0 * log(u1)) * cos(2.0 * M_PI * u2)


# ---------------------------------------------------------------------------
# path simulation

cdef struct Model:
    int d
    int ncones
    const double *axes
    const double *cosap
    const double *aperture
    const double *sinpow      # sin(aperture)^(d-2)
    const double *cum         # cumulative cone-selection probabilities
    double alpha
    double delta
    double rate
    double horizon
    int gauss
    const double *chol
    int modulated
    double base
    double amp
    double freq
    double kappa
    # exit mode
    double radius
    # Levy-system set A = {rmin < |z| <= rmax, z in W}
    double rmin
    double rmax
    int nw
    const double *waxes
    const double *wcos


cdef inline double _dot(const double *a, const double *b, int d) noexcept nogil:
    cdef double s = 0.0
    cdef int k
    for k in range(d):
        s = s + a[k] * b[k]
    return s


cdef void _direction(const Model *m, Stream *st, double *u) noexcept nogil:
    cdef int i, j, k, cnt, d = m.d
    cdef double U, nappe, psi, side, c, s, acc, nrm, proj
    cdef const double *lam
    cdef double e[MAXD]
    while True:
        U = _uniform(st, 0)
        i = 0
        while i < m.ncones - 1 and U >= m.cum[i]:
            i += 1
        lam = m.axes + i * d
        nappe = 1.0 if _uniform(st, 0) < 0.5 else -1.0
        if d == 2:
            psi = m.aperture[i] * _uniform(st, 0)
            side = 1.0 if _uniform(st, 0) < 0.5 else -1.0
            c = cos(psi)
            s = sin(psi) * side
            u[0] = nappe * (c * lam[0] - s * lam[1])
            u[1] = nappe * (c * lam[1] + s * lam[0])
        else:
            while True:
                psi = m.aperture[i] * _uniform(st, 0)
                acc = _uniform(st, 0)
                if acc * m.sinpow[i] < pow(sin(psi), <double>(d - 2)):
                    break
            while True:
                for k in range(d):
                    e[k] = _normal(st, 0)
                proj = _dot(e, lam, d)
                for k in range(d):
                    e[k] = e[k] - proj * lam[k]
                nrm = sqrt(_dot(e, e, d))
                if nrm > 1e-12:
                    break
            c = cos(psi)
            s = sin(psi) / nrm
            for k in range(d):
                u[k] = nappe * (c * lam[k] + s * e[k])
        if m.ncones == 1:
            return
        cnt = 1
        for j in range(m.ncones):
            if j != i and fabs(_dot(m.axes + j * d, u, d)) > m.cosap[j]:
                cnt += 1
        if cnt == 1 or _uniform(st, 0) * cnt < 1.0:
            return


cdef inline void _jump(const Model *m, Stream *st, double *z) noexcept nogil:
    cdef int k
    _direction(m, st, z)
    cdef double r = m.delta * pow(_uniform(st, 0), -1.0 / m.alpha)
    for k in range(m.d):
        z[k] = r * z[k]


cdef inline void _gauss_step(const Model *m, Stream *st, double h, double *x) noexcept nogil:
    cdef double nv[MAXD]
    cdef double sh = sqrt(h), acc
    cdef int k, j, d = m.d
    for k in range(d):
        nv[k] = _normal(st, 2)
    for k in range(d):
        acc = 0.0
        for j in range(k + 1):
            acc = acc + m.chol[k * d + j] * nv[j]
        x[k] = x[k] + sh * acc


cdef inline int _outside(const double *x, const double *x0, int d, double r) noexcept nogil:
    cdef double s = 0.0, dx
    cdef int k
    for k in range(d):
        dx = x[k] - x0[k]
        s = s + dx * dx
    return s >= r * r


cdef inline int _in_set(const Model *m, const double *z) noexcept nogil:
    cdef double r2 = _dot(z, z, m.d), r
    cdef int j
    r = sqrt(r2)
    if not (r > m.rmin and r <= m.rmax):
        return 0
    if m.nw == 0:
        return 1
    for j in range(m.nw):
        if fabs(_dot(m.waxes + j * m.d, z, m.d)) > r * m.wcos[j]:
            return 1
    return 0


cdef int _run_path(const Model *m, int mode, uint32_t k0, uint32_t k1, uint32_t path,
                   const double *x0, double *out, long *njumps) noexcept nogil:
    """Simulate one path; ``out`` receives d doubles (endpoint), 1 (exit time) or 2."""
    cdef Stream st
    cdef double x[MAXD]
    cdef double z[MAXD]
    cdef double t = 0.0, tn, h, mv, y1
    cdef double count_a = 0.0, s_int = 0.0
    cdef long nj = 0
    cdef int k, d = m.d
    st.k0 = k0
    st.k1 = k1
    st.path = path
    st.count[0] = 0
    st.count[1] = 0
    st.count[2] = 0
    st.status = STATUS_OK
    for k in range(d):
        x[k] = x0[k]
    if mode == MODE_EXIT:
        out[0] = INFINITY
    while True:
        tn = t - log(_uniform(&st, 0)) / m.rate
        if tn > m.horizon:
            h = m.horizon - t
            if mode == MODE_LEVYSYS:
                s_int = s_int + h * sin(2.0 * m.freq * x[0])
            if m.gauss:
                _gauss_step(m, &st, h, x)
                if mode == MODE_EXIT and _outside(x, x0, d, m.radius):
                    out[0] = m.horizon
            break
        h = tn - t
        if mode == MODE_LEVYSYS:
            s_int = s_int + h * sin(2.0 * m.freq * x[0])
        if m.gauss:
            _gauss_step(m, &st, h, x)
            if mode == MODE_EXIT and _outside(x, x0, d, m.radius):
                out[0] = tn
                break
        t = tn
        _jump(m, &st, z)
        if m.modulated:
            y1 = x[0] + z[0]
            mv = m.base + m.amp * sin(m.freq * (x[0] + y1))
            if mv < (1.0 / m.kappa) * (1.0 - 1e-12) or mv > m.kappa * (1.0 + 1e-12):
                st.status = STATUS_CONTRACT
                break
            if _uniform(&st, 1) * m.kappa >= mv:
                continue
        if mode == MODE_LEVYSYS and _in_set(m, z):
            count_a = count_a + 1.0
        for k in range(d):
            x[k] = x[k] + z[k]
        nj += 1
        if mode == MODE_EXIT and _outside(x, x0, d, m.radius):
            out[0] = t
            break
        if st.status != STATUS_OK:
            break
    if mode == MODE_ENDPOINT:
        for k in range(d):
            out[k] = x[k]
    elif mode == MODE_LEVYSYS:
        out[0] = count_a
        out[1] = s_int
    njumps[0] = nj
    return st.status


cdef int _first_jump(const Model *m, uint32_t k0, uint32_t k1, uint32_t path,
                     double *out) noexcept nogil:
    """The first jump drawn from a path's main lane."""
    cdef Stream st
    st.k0 = k0
    st.k1 = k1
    st.path = path
    st.count[0] = 0
    st.count[1] = 0
    st.count[2] = 0
    st.status = STATUS_OK
    _jump(m, &st, out)
    return st.status


def simulate_paths(dict p, int mode, long first, long count, int threads=1):
    """Run ``count`` paths starting at index ``first``.

    ``p`` carries the flattened model (see :func:`conekernel.simulate._kernel_params`).
    Returns ``(out, njumps, status)``.
    """
    cdef Model m
    cdef int d = p["d"]
    if d > MAXD:
        raise ValueError("dimension too large for the compiled kernel")
    cdef const double[::1] axes = np.ascontiguousarray(p["axes"], dtype=np.float64).ravel()
    cdef const double[::1] cosap = np.ascontiguousarray(p["cosap"], dtype=np.float64)
    cdef const double[::1] ap = np.ascontiguousarray(p["aperture"], dtype=np.float64)
    cdef const double[::1] sinpow = np.ascontiguousarray(p["sinpow"], dtype=np.float64)
    cdef const double[::1] cum = np.ascontiguousarray(p["cum"], dtype=np.float64)
    cdef const double[::1] chol = np.ascontiguousarray(p["chol"], dtype=np.float64).ravel()
    cdef const double[::1] waxes = np.ascontiguousarray(p["waxes"], dtype=np.float64).ravel()
    cdef const double[::1] wcos = np.ascontiguousarray(p["wcos"], dtype=np.float64)
    cdef const double[::1] x0 = np.ascontiguousarray(p["x0"], dtype=np.float64)
    m.d = d
    m.ncones = cosap.shape[0]
    m.axes = &axes[0]
    m.cosap = &cosap[0]
    m.aperture = &ap[0]
    m.sinpow = &sinpow[0]
    m.cum = &cum[0]
    m.alpha = p["alpha"]
    m.delta = p["delta"]
    m.rate = p["rate"]
    m.horizon = p["horizon"]
    m.gauss = p["gauss"]
    m.chol = &chol[0]
    m.modulated = p["modulated"]
    m.base = p["base"]
    m.amp = p["amp"]
    m.freq = p["freq"]
    m.kappa = p["kappa"]
    m.radius = p["radius"]
    m.rmin = p["rmin"]
    m.rmax = p["rmax"]
    m.nw = wcos.shape[0]
    m.waxes = &waxes[0] if m.nw > 0 else NULL
    m.wcos = &wcos[0] if m.nw > 0 else NULL
    cdef uint32_t k0 = p["k0"], k1 = p["k1"]
    cdef int width = d if mode in (MODE_ENDPOINT, MODE_JUMP) else (1 if mode == MODE_EXIT else 2)
    out_arr = np.zeros((count, width), dtype=np.float64)
    nj_arr = np.zeros(count, dtype=np.int64)
    st_arr = np.zeros(count, dtype=np.int32)
    cdef double[:, ::1] out = out_arr
    cdef long[::1] nj = nj_arr
    cdef int[::1] status = st_arr
    cdef long i
    cdef long chunk = max(1, (count + threads - 1) // threads)
    with nogil:
        for i in prange(count, num_threads=threads, schedule="static", chunksize=chunk):
            if mode == MODE_JUMP:
                status[i] = _first_jump(&m, k0, k1, <uint32_t>(first + i), &out[i, 0])
            else:
                status[i] = _run_path(&m, mode, k0, k1, <uint32_t>(first + i), &x0[0], &out[i, 0],
                                      &nj[i])
    return out_arr, nj_arr, st_arr


# ---------------------------------------------------------------------------
# angular density quadrature

cdef struct DensityModel:
    double alpha
    double t_coef
    # Phi table on [0, pi]
    const double *pv
    const double *pd
    long pn
    double ph
    const double *kinks
    int nk
    # radial table
    int closed_form
    const double *gv
    const double *gd
    long gn
    double gscale
    double gstep
    double gwmax
    const double *sex
    const double *ssign
    const double *slog
    int ns
    const double *xlo
    const double *wlo
    int nlo
    const double *xhi
    const double *whi
    int nhi
    double peak_ratio
    double kink_scale
    double kink_floor
    double kink_rel
    double kink_ratio


cdef inline double _phi_eval(const DensityModel *dm, double beta) noexcept nogil:
    cdef double b = fmod(beta, M_PI), h = dm.ph, s, s2, s3
    cdef long j
    if b < 0.0:
        b = b + M_PI
    j = <long>(b / h)
    if j > dm.pn - 2:
        j = dm.pn - 2
    s = b / h - j
    s2 = s * s
    s3 = s * s * s
    return ((2 * s3 - 3 * s2 + 1) * dm.pv[j] + (s3 - 2 * s2 + s) * h * dm.pd[j]
            + (-2 * s3 + 3 * s2) * dm.pv[j + 1] + (s3 - s2) * h * dm.pd[j + 1])


cdef inline double _g_eval(const DensityModel *dm, double w) noexcept nogil:
    cdef double w2, pos, w0, w1, hh, s, s2, s3, lw, lt, nxt, total
    cdef long j
    cdef int k
    w = fabs(w)
    if dm.closed_form:
        w2 = w * w
        return (1.0 - w2) / ((1.0 + w2) * (1.0 + w2))
    if w >= dm.gwmax:
        lw = log(w)
        total = 0.0
        for k in range(dm.ns):
            lt = dm.slog[k] - dm.sex[k] * lw
            if lt > -745.0:
                total = total + dm.ssign[k] * exp(lt)
            if k + 1 < dm.ns:
                nxt = dm.slog[k + 1] - dm.sex[k + 1] * lw
                if nxt > lt:
                    break
        return total
    pos = asinh(w / dm.gscale) / dm.gstep
    j = <long>pos
    if j > dm.gn - 2:
        j = dm.gn - 2
    w0 = dm.gscale * sinh(j * dm.gstep)
    w1 = dm.gscale * sinh((j + 1) * dm.gstep)
    hh = w1 - w0
    s = (w - w0) / hh
    s2 = s * s
    s3 = s2 * s
    return ((2 * s3 - 3 * s2 + 1) * dm.gv[j] + (s3 - 2 * s2 + s) * hh * dm.gd[j]
            + (-2 * s3 + 3 * s2) * dm.gv[j + 1] + (s3 - s2) * hh * dm.gd[j + 1])


cdef int _cmp_double(const void *a, const void *b) noexcept nogil:
    cdef double x = (<const double *>a)[0], y = (<const double *>b)[0]
    return (x > y) - (x < y)


cdef int _graded(double *pts, int n, double centre, double scale, double ratio,
                 double span) noexcept nogil:
    cdef double s = scale
    pts[n] = centre
    n += 1
    while s < span:
        pts[n] = centre - s
        pts[n + 1] = centre + s
        n += 2
        s = s * ratio
    return n


cdef double _integrate(const DensityModel *dm, const double *edges, int ne, double beta_p,
                       double x1, double x2, const double *xg, const double *wg, int ng) noexcept nogil:
    cdef double total = 0.0, a, b, half_w, mid, rel, beta, B, s, a0
    cdef int p, q
    for p in range(ne - 1):
        a = edges[p]
        b = edges[p + 1]
        half_w = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        for q in range(ng):
            rel = half_w * xg[q] + mid
            beta = beta_p + rel
            B = dm.t_coef * _phi_eval(dm, beta)
            s = pow(B, -1.0 / dm.alpha)
            a0 = (x1 * cos(beta) + x2 * sin(beta)) * s
            total = total + (half_w * wg[q]) * (s * s * _g_eval(dm, a0))
    return total


cdef extern from "math.h" nogil:
    double atan2_ "atan2"(double, double)


cdef inline double _pymod(double a, double b) noexcept nogil:
    # Python-style modulo for b > 0
    cdef double r = fmod(a, b)
    if r < 0.0:
        r = r + b
    return r


cdef void _density_point(const DensityModel *dm, double x1, double x2, double *pts,
                         double *val, double *err) noexcept nogil:
    cdef double half = 0.5 * M_PI, rho = sqrt(x1 * x1 + x2 * x2)
    cdef double beta_p = 0.0, width, rel, pref, hi, lo, kscale = dm.kink_scale
    cdef int n = 2, k, ne, i
    pts[0] = -half
    pts[1] = half
    if rho > 0.0:
        beta_p = atan2_(x2, x1) + half
        width = pow(dm.t_coef * _phi_eval(dm, beta_p), 1.0 / dm.alpha) / rho
        if width < half:
            n = _graded(pts, n, 0.0, width, dm.peak_ratio, M_PI)
        kscale = dm.kink_rel * width
        if kscale < dm.kink_floor:
            kscale = dm.kink_floor
        if kscale > dm.kink_scale:
            kscale = dm.kink_scale
    for k in range(dm.nk):
        rel = _pymod(dm.kinks[k] - beta_p + half, M_PI) - half
        n = _graded(pts, n, rel, kscale, dm.kink_ratio, M_PI)
    for i in range(n):
        if pts[i] < -half:
            pts[i] = -half
        elif pts[i] > half:
            pts[i] = half
    qsort(pts, n, sizeof(double), _cmp_double)
    ne = 1
    for i in range(1, n):
        if pts[i] - pts[ne - 1] > 1e-13:
            pts[ne] = pts[i]
            ne += 1
    pts[0] = -half
    pts[ne - 1] = half
    pref = 2.0 / (4.0 * M_PI * M_PI)
    hi = pref * _integrate(dm, pts, ne, beta_p, x1, x2, dm.xhi, dm.whi, dm.nhi)
    lo = pref * _integrate(dm, pts, ne, beta_p, x1, x2, dm.xlo, dm.wlo, dm.nlo)
    val[0] = hi
    err[0] = fabs(hi - lo)


def density_points(X, double alpha, ang, rtab, double t_coef, int threads=1):
    """Oracle values and error estimates at the rows of ``X`` (see the numpy twin)."""
    from .density import (GL_HI, GL_LO, KINK_FLOOR, KINK_RATIO, KINK_REL, KINK_SCALE,
                          PEAK_RATIO)
    from .radial import _series_coeffs

    cdef const double[:, ::1] P = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(ang.values)
    cdef const double[::1] pd = np.ascontiguousarray(ang.derivs)
    kk = np.ascontiguousarray(ang.kinks, dtype=np.float64)
    if kk.size == 0:
        kk = np.zeros(1)
    cdef const double[::1] kinks = kk
    cdef const double[::1] gv = np.ascontiguousarray(rtab.values)
    cdef const double[::1] gd = np.ascontiguousarray(rtab.derivs)
    sx, ss, sl = _series_coeffs(alpha)
    cdef const double[::1] sex = np.ascontiguousarray(sx, dtype=np.float64)
    cdef const double[::1] ssign = np.ascontiguousarray(ss, dtype=np.float64)
    cdef const double[::1] slog = np.ascontiguousarray(sl, dtype=np.float64)
    cdef const double[::1] xlo = np.ascontiguousarray(GL_LO[0])
    cdef const double[::1] wlo = np.ascontiguousarray(GL_LO[1])
    cdef const double[::1] xhi = np.ascontiguousarray(GL_HI[0])
    cdef const double[::1] whi = np.ascontiguousarray(GL_HI[1])
    cdef DensityModel dm
    dm.alpha = alpha
    dm.t_coef = t_coef
    dm.pv = &pv[0]
    dm.pd = &pd[0]
    dm.pn = pv.shape[0]
    dm.ph = M_PI / (pv.shape[0] - 1)
    dm.kinks = &kinks[0]
    dm.nk = ang.kinks.size
    dm.closed_form = alpha == 1.0
    dm.gv = &gv[0]
    dm.gd = &gd[0]
    dm.gn = gv.shape[0]
    dm.gscale = rtab.scale
    dm.gstep = rtab.step
    dm.gwmax = rtab.w_max
    dm.sex = &sex[0]
    dm.ssign = &ssign[0]
    dm.slog = &slog[0]
    dm.ns = sex.shape[0]
    dm.xlo = &xlo[0]
    dm.wlo = &wlo[0]
    dm.nlo = xlo.shape[0]
    dm.xhi = &xhi[0]
    dm.whi = &whi[0]
    dm.nhi = xhi.shape[0]
    dm.peak_ratio = PEAK_RATIO
    dm.kink_scale = KINK_SCALE
    dm.kink_floor = KINK_FLOOR
    dm.kink_rel = KINK_REL
    dm.kink_ratio = KINK_RATIO

    cdef long n = P.shape[0], i
    vals_arr = np.empty(n)
    errs_arr = np.empty(n)
    cdef double[::1] vals = vals_arr
    cdef double[::1] errs = errs_arr
    # worst case: 2 ends + graded peak (~2 log2(pi/width)) + 2 log4(pi/kink_floor) per kink
    cdef int cap = 2 + 2 * 1100 + 1 + dm.nk * (2 + 2 * 40)
    cdef double *buf
    cdef long chunk = max(1, (n + threads - 1) // threads)
    with nogil:
        for i in prange(n, num_threads=threads, schedule="static", chunksize=chunk):
            buf = <double *>malloc(cap * sizeof(double))
            _density_point(&dm, P[i, 0], P[i, 1], buf, &vals[i], &errs[i])
            free(buf)
    return vals_arr, errs_arr
