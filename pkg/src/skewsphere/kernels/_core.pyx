# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: bivariate normal cdf, skew pair log likelihood and
the ordered composite-likelihood reduction.

Semantics match the pure-Python backend (`_ref`) including branch thresholds,
the eta floor, the cdf underflow floor and the chunked deterministic
reduction.  All inner routines are nogil so the chunk loop can run on
multiple threads without changing the result.
"""

import numpy as np

cimport cython
from cython.parallel cimport prange
from libc.math cimport asin, erfc, exp, fabs, log, log1p, sin, sqrt, NAN, isnan

BACKEND_TAG = "compiled"

ETA_FLOOR = 1e-8
CDF_FLOOR = 1e-320
RHO_DEGEN = 1e-12

cdef double _ETA_FLOOR = 1e-8
cdef double _CDF_FLOOR = 1e-320
cdef double _RHO_DEGEN = 1e-12

cdef double TWOPI = 6.283185307179586
cdef double SQRT_2PI = 2.5066282746310002
cdef double LOG_2PI = 1.8378770664093453
cdef double LOG_2 = 0.6931471805599453
cdef double INV_SQRT2 = 0.7071067811865476

# Gauss-Legendre half-rules (6-, 12- and 20-point rules folded to one sign).
cdef double[3] GL_X3
cdef double[3] GL_W3
cdef double[6] GL_X6
cdef double[6] GL_W6
cdef double[10] GL_X10
cdef double[10] GL_W10

GL_X3[0] = -0.9324695142031522; GL_X3[1] = -0.6612093864662647; GL_X3[2] = -0.2386191860831970
GL_W3[0] = 0.1713244923791705; GL_W3[1] = 0.3607615730481384; GL_W3[2] = 0.4679139345726904
GL_X6[0] = -0.9815606342467191; GL_X6[1] = -0.9041172563704750; GL_X6[2] = -0.7699026741943050
GL_X6[3] = -0.5873179542866171; GL_X6[4] = -0.3678314989981802; GL_X6[5] = -0.1252334085114692
GL_W6[0] = 0.04717533638651177; GL_W6[1] = 0.1069393259953183; GL_W6[2] = 0.1600783285433464
GL_W6[3] = 0.2031674267230659; GL_W6[4] = 0.2334925365383547; GL_W6[5] = 0.2491470458134029
GL_X10[0] = -0.9931285991850949; GL_X10[1] = -0.9639719272779138; GL_X10[2] = -0.9122344282513259
GL_X10[3] = -0.8391169718222188; GL_X10[4] = -0.7463319064601508; GL_X10[5] = -0.6360536807265150
GL_X10[6] = -0.5108670019508271; GL_X10[7] = -0.3737060887154196; GL_X10[8] = -0.2277858511416451
GL_X10[9] = -0.07652652113349733
GL_W10[0] = 0.01761400713915212; GL_W10[1] = 0.04060142980038694; GL_W10[2] = 0.06267204833410906
GL_W10[3] = 0.08327674157670475; GL_W10[4] = 0.1019301198172404; GL_W10[5] = 0.1181945319615184
GL_W10[6] = 0.1316886384491766; GL_W10[7] = 0.1420961093183821; GL_W10[8] = 0.1491729864726037
GL_W10[9] = 0.1527533871307259


cdef inline double _ncdf(double x) noexcept nogil:
    return 0.5 * erfc(-x * INV_SQRT2)


cdef inline double _fmax(double a, double b) noexcept nogil:
    return a if a > b else b


cdef inline double _fmin(double a, double b) noexcept nogil:
    return a if a < b else b


cdef double _bvn_cdf(double b1, double b2, double rho) noexcept nogil:
    """Standard bivariate normal cdf P(U1 <= b1, U2 <= b2)."""
    cdef double h, k, hk, hs, asr, sn, bvn, ar, swap
    cdef double a_sq, a, b_sq, b, c, d, xs, rs, half
    cdef const double* xg
    cdef const double* wg
    cdef int ng, i

    if rho >= 1.0 - _RHO_DEGEN:
        return _ncdf(_fmin(b1, b2))
    if rho <= -1.0 + _RHO_DEGEN:
        return _fmax(0.0, _ncdf(b1) + _ncdf(b2) - 1.0)

    # canonical argument order makes the value exactly exchange-symmetric
    if b1 > b2:
        swap = b1
        b1 = b2
        b2 = swap
    h = -b1
    k = -b2
    hk = h * k
    ar = fabs(rho)
    if ar < 0.3:
        xg = GL_X3; wg = GL_W3; ng = 3
    elif ar < 0.75:
        xg = GL_X6; wg = GL_W6; ng = 6
    else:
        xg = GL_X10; wg = GL_W10; ng = 10

    bvn = 0.0
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = asin(rho)
        for i in range(ng):
            sn = sin(asr * (xg[i] + 1.0) * 0.5)
            bvn += wg[i] * exp((sn * hk - hs) / (1.0 - sn * sn))
            sn = sin(asr * (-xg[i] + 1.0) * 0.5)
            bvn += wg[i] * exp((sn * hk - hs) / (1.0 - sn * sn))
        bvn = bvn * asr / (2.0 * TWOPI) + _ncdf(-h) * _ncdf(-k)
    else:
        if rho < 0.0:
            k = -k
            hk = -hk
        a_sq = (1.0 - rho) * (1.0 + rho)
        a = sqrt(a_sq)
        b_sq = (h - k) * (h - k)
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        bvn = a * exp(-(b_sq / a_sq + hk) * 0.5) * (
            1.0 - c * (b_sq - a_sq) * (1.0 - d * b_sq / 5.0) / 3.0
            + c * d * a_sq * a_sq / 5.0)
        if hk > -160.0:
            b = sqrt(b_sq)
            bvn -= exp(-hk * 0.5) * SQRT_2PI * _ncdf(-b / a) * b * (
                1.0 - c * b_sq * (1.0 - d * b_sq / 5.0) / 3.0)
        half = a * 0.5
        for i in range(10):
            xs = half * (GL_X10[i] + 1.0)
            xs = xs * xs
            rs = sqrt(1.0 - xs)
            bvn += half * GL_W10[i] * (
                exp(-b_sq / (2.0 * xs) - hk / (1.0 + rs)) / rs
                - exp(-(b_sq / xs + hk) * 0.5) * (1.0 + c * xs * (1.0 + d * xs)))
            xs = a_sq * (-GL_X10[i] + 1.0) * (-GL_X10[i] + 1.0) * 0.25
            rs = sqrt(1.0 - xs)
            bvn += half * GL_W10[i] * exp(-(b_sq / xs + hk) * 0.5) * (
                exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
                - (1.0 + c * xs * (1.0 + d * xs)))
        bvn = -bvn / TWOPI
        if rho > 0.0:
            bvn += _ncdf(-_fmax(h, k))
        else:
            bvn = -bvn + _fmax(0.0, _ncdf(-h) - _ncdf(-k))

    if bvn < 0.0:
        return 0.0
    if bvn > 1.0:
        return 1.0
    return bvn


cdef double _bvn_logpdf(double a1, double a2, double s11, double s12,
                        double s22) noexcept nogil:
    # Grouped so coordinate exchange reproduces the value bit for bit.
    cdef double det = s11 * s22 - s12 * s12
    cdef double diag, cross
    if det <= 0.0 or s11 <= 0.0:
        return NAN
    diag = (s22 * a1) * a1 + (s11 * a2) * a2
    cross = -2.0 * s12 * (a1 * a2)
    return -LOG_2PI - 0.5 * log(det) - 0.5 * (diag + cross) / det


cdef double _pair_loglik(double a1, double a2, double si2, double sj2,
                         double etai, double etaj, double rx,
                         double ry) noexcept nogil:
    """Centered skew pair log likelihood; NaN when the pair is invalid."""
    cdef double sij, o12, ei, ej
    cdef double m11, m22, m12, det_m, u1, u2
    cdef double q, c11, c22, c12, log_phi
    cdef double w11, w12, w22, det_w, l1, l2
    cdef double dq, p11, p22, p12, det_p, b11, b22, b12
    cdef double sb1, sb2, cdf, t1, t2, top, sign
    cdef int t

    if not (si2 > 0.0 and sj2 > 0.0):
        return NAN
    if not (fabs(rx) < 1.0 and fabs(ry) < 1.0):
        return NAN

    sij = sqrt(si2 * sj2)
    o12 = sij * ry
    if fabs(etai) <= _ETA_FLOOR and fabs(etaj) <= _ETA_FLOOR:
        return _bvn_logpdf(a1, a2, si2, o12, sj2)

    ei = _fmax(fabs(etai), _ETA_FLOOR)
    if etai < 0.0:
        ei = -ei
    ej = _fmax(fabs(etaj), _ETA_FLOOR)
    if etaj < 0.0:
        ej = -ej

    m11 = si2 / (ei * ei)
    m22 = sj2 / (ej * ej)
    m12 = o12 / (ei * ej)
    det_m = m11 * m22 - m12 * m12
    u1 = a1 / ei
    u2 = a2 / ej

    t1 = 0.0
    t2 = 0.0
    for t in range(2):
        sign = -1.0 if t == 0 else 1.0
        q = sign * rx
        c11 = si2 + ei * ei
        c22 = sj2 + ej * ej
        c12 = o12 + (ei * ej) * q
        log_phi = _bvn_logpdf(a1, a2, c11, c12, c22)

        w11 = m11 + 1.0
        w12 = m12 + q
        w22 = m22 + 1.0
        det_w = w11 * w22 - w12 * w12
        l1 = ((w22 - q * w12) * u1 + (q * w11 - w12) * u2) / det_w
        l2 = ((q * w22 - w12) * u1 + (w11 - q * w12) * u2) / det_w

        dq = 1.0 - q * q
        p11 = m22 / det_m + 1.0 / dq
        p22 = m11 / det_m + 1.0 / dq
        p12 = -(m12 / det_m + q / dq)
        det_p = p11 * p22 - p12 * p12
        b11 = p22 / det_p
        b22 = p11 / det_p
        b12 = -p12 / det_p

        sb1 = sqrt(b11)
        sb2 = sqrt(b22)
        cdf = _bvn_cdf(l1 / sb1, l2 / sb2, b12 / (sb1 * sb2))
        if cdf < _CDF_FLOOR:
            cdf = _CDF_FLOOR
        if t == 0:
            t1 = log_phi + log(cdf)
        else:
            t2 = log_phi + log(cdf)

    top = _fmax(t1, t2)
    return LOG_2 + top + log1p(exp(_fmin(t1, t2) - top))


cdef double _chunk_sum(const double[::1] a1, const double[::1] a2,
                       const double[::1] si2, const double[::1] sj2,
                       const double[::1] etai, const double[::1] etaj,
                       const double[::1] rx, const double[::1] ry,
                       Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    # Kahan compensated summation in index order.
    cdef double s = 0.0, comp = 0.0, y, t, v
    cdef Py_ssize_t i
    for i in range(lo, hi):
        v = _pair_loglik(a1[i], a2[i], si2[i], sj2[i], etai[i], etaj[i],
                         rx[i], ry[i])
        if isnan(v):
            return NAN
        y = v - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def bvn_cdf(double b1, double b2, double rho):
    """Scalar standard bivariate normal cdf."""
    return _bvn_cdf(b1, b2, rho)


def bvn_cdf_many(b1, b2, rho):
    """Vectorized standard bivariate normal cdf (broadcasts its inputs)."""
    b1a, b2a, ra = np.broadcast_arrays(
        np.asarray(b1, dtype=np.float64), np.asarray(b2, dtype=np.float64),
        np.asarray(rho, dtype=np.float64))
    out = np.empty(b1a.shape, dtype=np.float64)
    cdef double[::1] x = np.ascontiguousarray(b1a).ravel()
    cdef double[::1] y = np.ascontiguousarray(b2a).ravel()
    cdef double[::1] r = np.ascontiguousarray(ra).ravel()
    cdef double[::1] o = out.ravel()
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            o[i] = _bvn_cdf(x[i], y[i], r[i])
    return out


def bvn_logpdf(double a1, double a2, double s11, double s12, double s22):
    """Scalar zero-mean bivariate normal log density."""
    return _bvn_logpdf(a1, a2, s11, s12, s22)


def pair_loglik(double a1, double a2, double si2, double sj2, double etai,
                double etaj, double rx, double ry):
    """Scalar centered pair log likelihood; NaN for invalid inputs."""
    return _pair_loglik(a1, a2, si2, sj2, etai, etaj, rx, ry)


def pair_loglik_many(a1, a2, si2, sj2, etai, etaj, rx, ry):
    """Vectorized centered pair log likelihood (broadcasts its inputs)."""
    arrs = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64)
                                 for v in (a1, a2, si2, sj2, etai, etaj, rx, ry)))
    out = np.empty(arrs[0].shape, dtype=np.float64)
    flat = [np.ascontiguousarray(v).ravel() for v in arrs]
    cdef double[::1] v0 = flat[0]
    cdef double[::1] v1 = flat[1]
    cdef double[::1] v2 = flat[2]
    cdef double[::1] v3 = flat[3]
    cdef double[::1] v4 = flat[4]
    cdef double[::1] v5 = flat[5]
    cdef double[::1] v6 = flat[6]
    cdef double[::1] v7 = flat[7]
    cdef double[::1] o = out.ravel()
    cdef Py_ssize_t i, n = v0.shape[0]
    with nogil:
        for i in range(n):
            o[i] = _pair_loglik(v0[i], v1[i], v2[i], v3[i], v4[i], v5[i],
                                v6[i], v7[i])
    return out


def cl_accumulate(a1, a2, si2, sj2, etai, etaj, rx, ry, n_threads=1,
                  chunk=2048):
    """Ordered sum of pair log likelihoods over stored pairs.

    Partial sums are taken over fixed-size chunks in index order and combined
    in chunk order, so the value is identical for any thread count.  Returns
    NaN if any pair is invalid.
    """
    cdef double[::1] va1 = np.ascontiguousarray(a1, dtype=np.float64)
    cdef double[::1] va2 = np.ascontiguousarray(a2, dtype=np.float64)
    cdef double[::1] vsi = np.ascontiguousarray(si2, dtype=np.float64)
    cdef double[::1] vsj = np.ascontiguousarray(sj2, dtype=np.float64)
    cdef double[::1] vei = np.ascontiguousarray(etai, dtype=np.float64)
    cdef double[::1] vej = np.ascontiguousarray(etaj, dtype=np.float64)
    cdef double[::1] vrx = np.ascontiguousarray(rx, dtype=np.float64)
    cdef double[::1] vry = np.ascontiguousarray(ry, dtype=np.float64)
    cdef Py_ssize_t n = va1.shape[0]
    if n == 0:
        return 0.0
    cdef Py_ssize_t csize = max(1, int(chunk))
    cdef Py_ssize_t nchunks = (n + csize - 1) // csize
    cdef int nt = max(1, int(n_threads))
    partials = np.empty(nchunks, dtype=np.float64)
    cdef double[::1] pv = partials
    cdef Py_ssize_t c, lo, hi
    if nt > 1:
        for c in prange(nchunks, nogil=True, num_threads=nt, schedule="static"):
            lo = c * csize
            hi = lo + csize
            if hi > n:
                hi = n
            pv[c] = _chunk_sum(va1, va2, vsi, vsj, vei, vej, vrx, vry, lo, hi)
    else:
        with nogil:
            for c in range(nchunks):
                lo = c * csize
                hi = lo + csize
                if hi > n:
                    hi = n
                pv[c] = _chunk_sum(va1, va2, vsi, vsj, vei, vej, vrx, vry, lo, hi)
    # Combine chunk partials in order (Kahan again).
    cdef double s = 0.0, comp = 0.0, y, t
    for c in range(nchunks):
        if isnan(pv[c]):
            return NAN
        y = pv[c] - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s
