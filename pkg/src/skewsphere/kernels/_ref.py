"""Pure-Python / numpy reference implementation of the hot kernels.

Mirrors the compiled extension (`_core`) exactly in semantics:

* ``bvn_cdf``      standard bivariate normal cdf, Gauss-Legendre scheme on
                   the arcsin-transformed correlation integral, with the
                   tail-stable transformation for |rho| >= 0.925 and analytic
                   limits for |rho| within 1e-12 of 1.
* ``pair_loglik``  exact log density of a correlated skew-Gaussian pair,
                   written with closed 2x2 forms and a log-sum-exp over the
                   two sign terms.
* ``cl_accumulate`` ordered, exactly-rounded reduction of pair log
                   likelihoods; returns NaN when any pair is invalid.

This backend is selected when the compiled extension is unavailable or when
``SKEWSPHERE_BACKEND=python`` is set.  It is vectorized with numpy, so it
stays usable (if slower) at realistic problem sizes.
"""

import math

import numpy as np
from scipy.special import ndtr

BACKEND_TAG = "python"

# Shared numeric policy; keep in sync with _core.pyx.
ETA_FLOOR = 1e-8
CDF_FLOOR = 1e-320
RHO_DEGEN = 1e-12

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_2PI = math.log(2.0 * math.pi)

# Gauss-Legendre half-rules (6-, 12- and 20-point rules folded to one sign).
_GL_X3 = np.array([-0.9324695142031522, -0.6612093864662647, -0.2386191860831970])
_GL_W3 = np.array([0.1713244923791705, 0.3607615730481384, 0.4679139345726904])
_GL_X6 = np.array(
    [
        -0.9815606342467191,
        -0.9041172563704750,
        -0.7699026741943050,
        -0.5873179542866171,
        -0.3678314989981802,
        -0.1252334085114692,
    ]
)
_GL_W6 = np.array(
    [
        0.04717533638651177,
        0.1069393259953183,
        0.1600783285433464,
        0.2031674267230659,
        0.2334925365383547,
        0.2491470458134029,
    ]
)
_GL_X10 = np.array(
    [
        -0.9931285991850949,
        -0.9639719272779138,
        -0.9122344282513259,
        -0.8391169718222188,
        -0.7463319064601508,
        -0.6360536807265150,
        -0.5108670019508271,
        -0.3737060887154196,
        -0.2277858511416451,
        -0.07652652113349733,
    ]
)
_GL_W10 = np.array(
    [
        0.01761400713915212,
        0.04060142980038694,
        0.06267204833410906,
        0.08327674157670475,
        0.1019301198172404,
        0.1181945319615184,
        0.1316886384491766,
        0.1420961093183821,
        0.1491729864726037,
        0.1527533871307259,
    ]
)


def _bvn_mid(h, k, r, nodes, weights):
    """|r| < 0.925 branch: quadrature of the correlation integral."""
    hk = h * k
    hs = 0.5 * (h * h + k * k)
    asr = np.arcsin(r)
    acc = np.zeros_like(h)
    for x, w in zip(nodes, weights):
        for sgn in (1.0, -1.0):
            sn = np.sin(asr * (sgn * x + 1.0) * 0.5)
            acc += w * np.exp((sn * hk - hs) / (1.0 - sn * sn))
    return acc * asr / (4.0 * math.pi) + ndtr(-h) * ndtr(-k)


def _bvn_tail(h, k, r):
    """0.925 <= |r| < 1 branch: tail-stable transformation."""
    neg = r < 0.0
    k = np.where(neg, -k, k)
    hk = h * k
    a_sq = (1.0 - r) * (1.0 + r)
    a = np.sqrt(a_sq)
    b_sq = (h - k) ** 2
    c = (4.0 - hk) / 8.0
    d = (12.0 - hk) / 16.0
    with np.errstate(over="ignore", under="ignore"):
        bvn = a * np.exp(-(b_sq / a_sq + hk) * 0.5) * (
            1.0 - c * (b_sq - a_sq) * (1.0 - d * b_sq / 5.0) / 3.0
            + c * d * a_sq * a_sq / 5.0
        )
        guard = hk > -160.0
        hk_safe = np.where(guard, hk, 0.0)
        b = np.sqrt(b_sq)
        correction = (
            np.exp(-hk_safe * 0.5)
            * _SQRT_2PI
            * ndtr(-b / a)
            * b
            * (1.0 - c * b_sq * (1.0 - d * b_sq / 5.0) / 3.0)
        )
        bvn = bvn - np.where(guard, correction, 0.0)
        half = a * 0.5
        for x, w in zip(_GL_X10, _GL_W10):
            xs = (half * (x + 1.0)) ** 2
            rs = np.sqrt(1.0 - xs)
            bvn += half * w * (
                np.exp(-b_sq / (2.0 * xs) - hk / (1.0 + rs)) / rs
                - np.exp(-(b_sq / xs + hk) * 0.5) * (1.0 + c * xs * (1.0 + d * xs))
            )
            xs = a_sq * (-x + 1.0) ** 2 * 0.25
            rs = np.sqrt(1.0 - xs)
            bvn += half * w * np.exp(-(b_sq / xs + hk) * 0.5) * (
                np.exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
                - (1.0 + c * xs * (1.0 + d * xs))
            )
    bvn = -bvn / (2.0 * math.pi)
    pos_term = ndtr(-np.maximum(h, k))
    neg_term = np.maximum(0.0, ndtr(-h) - ndtr(-k))
    return np.where(neg, -bvn + neg_term, bvn + pos_term)


def bvn_cdf_many(b1, b2, rho):
    """P(U1 <= b1, U2 <= b2) for standard bivariate normal, vectorized."""
    b1, b2, rho = np.broadcast_arrays(
        np.asarray(b1, dtype=float), np.asarray(b2, dtype=float), np.asarray(rho, dtype=float)
    )
    out = np.empty(b1.shape, dtype=float)
    hi = rho >= 1.0 - RHO_DEGEN
    lo = rho <= -1.0 + RHO_DEGEN
    if hi.any():
        out[hi] = ndtr(np.minimum(b1[hi], b2[hi]))
    if lo.any():
        out[lo] = np.maximum(0.0, ndtr(b1[lo]) + ndtr(b2[lo]) - 1.0)
    rest = ~(hi | lo)
    if rest.any():
        # canonical argument order: exactly exchange-symmetric values
        lo_b = np.minimum(b1[rest], b2[rest])
        hi_b = np.maximum(b1[rest], b2[rest])
        h = -lo_b
        k = -hi_b
        r = rho[rest]
        ar = np.abs(r)
        sub = np.empty(h.shape, dtype=float)
        for low, high, nodes, weights in (
            (-1.0, 0.3, _GL_X3, _GL_W3),
            (0.3, 0.75, _GL_X6, _GL_W6),
            (0.75, 0.925, _GL_X10, _GL_W10),
        ):
            m = (ar >= low) & (ar < high)
            if m.any():
                sub[m] = _bvn_mid(h[m], k[m], r[m], nodes, weights)
        m = ar >= 0.925
        if m.any():
            sub[m] = _bvn_tail(h[m], k[m], r[m])
        out[rest] = sub
    return np.clip(out, 0.0, 1.0)


def bvn_cdf(b1, b2, rho):
    """Scalar standard bivariate normal cdf."""
    return float(bvn_cdf_many(np.array([b1]), np.array([b2]), np.array([rho]))[0])


def bvn_logpdf_many(a1, a2, s11, s12, s22):
    """Log density of a zero-mean bivariate normal, vectorized.

    The quadratic form is grouped so that swapping the two coordinates
    (a1<->a2 together with s11<->s22) reproduces the result bit for bit.
    """
    det = s11 * s22 - s12 * s12
    diag = (s22 * a1) * a1 + (s11 * a2) * a2
    cross = -2.0 * s12 * (a1 * a2)
    quad = (diag + cross) / det
    with np.errstate(invalid="ignore", divide="ignore"):
        out = -_LOG_2PI - 0.5 * np.log(det) - 0.5 * quad
    return np.where((det > 0.0) & (s11 > 0.0), out, np.nan)


def bvn_logpdf(a1, a2, s11, s12, s22):
    return float(bvn_logpdf_many(*(np.asarray(v, dtype=float) for v in (a1, a2, s11, s12, s22))))


def _clamp_eta(eta):
    mag = np.maximum(np.abs(eta), ETA_FLOOR)
    return np.where(eta < 0.0, -mag, mag)


def pair_loglik_many(a1, a2, si2, sj2, etai, etaj, rx, ry):
    """Log density of a centered skew-Gaussian pair, vectorized.

    ``a1``/``a2`` are the observations minus the location parameters.
    Invalid inputs (non-positive variances, |rx| >= 1 or |ry| >= 1) yield NaN.
    """
    a1, a2, si2, sj2, etai, etaj, rx, ry = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (a1, a2, si2, sj2, etai, etaj, rx, ry))
    )
    out = np.full(a1.shape, np.nan)
    valid = (si2 > 0.0) & (sj2 > 0.0) & (np.abs(rx) < 1.0) & (np.abs(ry) < 1.0)
    if not valid.any():
        return out

    a1 = a1[valid]
    a2 = a2[valid]
    si2 = si2[valid]
    sj2 = sj2[valid]
    etai = etai[valid]
    etaj = etaj[valid]
    rx = rx[valid]
    ry = ry[valid]
    sij = np.sqrt(si2 * sj2)
    o12 = sij * ry

    res = np.empty(a1.shape, dtype=float)
    gauss = (np.abs(etai) <= ETA_FLOOR) & (np.abs(etaj) <= ETA_FLOOR)
    if gauss.any():
        res[gauss] = bvn_logpdf_many(a1[gauss], a2[gauss], si2[gauss], o12[gauss], sj2[gauss])
    skew = ~gauss
    if skew.any():
        res[skew] = _pair_loglik_skew(
            a1[skew], a2[skew], si2[skew], sj2[skew],
            _clamp_eta(etai[skew]), _clamp_eta(etaj[skew]),
            rx[skew], o12[skew], sij[skew],
        )
    out[valid] = res
    return out


def _pair_loglik_skew(a1, a2, si2, sj2, ei, ej, rx, o12, sij):
    # Scaled latent quantities; all 2x2 algebra in closed form.
    m11 = si2 / (ei * ei)
    m22 = sj2 / (ej * ej)
    m12 = o12 / (ei * ej)
    det_m = m11 * m22 - m12 * m12
    u1 = a1 / ei
    u2 = a2 / ej

    terms = []
    for sign in (-1.0, 1.0):
        q = sign * rx
        c11 = si2 + ei * ei
        c22 = sj2 + ej * ej
        c12 = o12 + (ei * ej) * q
        log_phi = bvn_logpdf_many(a1, a2, c11, c12, c22)

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

        sb1 = np.sqrt(b11)
        sb2 = np.sqrt(b22)
        cdf = bvn_cdf_many(l1 / sb1, l2 / sb2, b12 / (sb1 * sb2))
        terms.append(log_phi + np.log(np.maximum(cdf, CDF_FLOOR)))

    t1, t2 = terms
    top = np.maximum(t1, t2)
    return math.log(2.0) + top + np.log1p(np.exp(np.minimum(t1, t2) - top))


def pair_loglik(a1, a2, si2, sj2, etai, etaj, rx, ry):
    """Scalar centered pair log likelihood; NaN for invalid inputs."""
    return float(
        pair_loglik_many(
            np.array([a1]), np.array([a2]), np.array([si2]), np.array([sj2]),
            np.array([etai]), np.array([etaj]), np.array([rx]), np.array([ry]),
        )[0]
    )


def cl_accumulate(a1, a2, si2, sj2, etai, etaj, rx, ry, n_threads=1, chunk=2048):
    """Ordered sum of pair log likelihoods over stored pairs.

    Partial sums are taken over fixed-size chunks in index order and combined
    in chunk order, so the value does not depend on any parallel schedule.
    (This backend always runs serially; ``n_threads`` is accepted for API
    compatibility with the compiled kernel.)  Returns NaN if any pair is
    invalid.
    """
    ll = pair_loglik_many(a1, a2, si2, sj2, etai, etaj, rx, ry)
    if np.isnan(ll).any():
        return float("nan")
    n = ll.shape[0]
    partials = [math.fsum(ll[lo:min(lo + chunk, n)]) for lo in range(0, n, chunk)]
    return math.fsum(partials)
