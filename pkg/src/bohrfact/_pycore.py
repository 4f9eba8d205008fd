"""Pure numpy implementations of the hot kernels.

Mirrors the compiled ``_core`` extension function for function; used when the
extension is not built or ``BOHRFACT_BACKEND=python`` is set.
"""
import numpy as np

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

MAX_INTERVALS = 1 << 20


def cauchy_product(ja, ka, ca, jb, kb, cb):
    """Sparse 2D Cauchy product; returns lexicographically sorted unique keys."""
    ja = np.asarray(ja, dtype=np.int64)
    ka = np.asarray(ka, dtype=np.int64)
    jb = np.asarray(jb, dtype=np.int64)
    kb = np.asarray(kb, dtype=np.int64)
    ca = np.asarray(ca, dtype=np.complex128)
    cb = np.asarray(cb, dtype=np.complex128)
    if ja.size == 0 or jb.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), np.zeros(0, dtype=np.complex128)
    j = (ja[:, None] + jb[None, :]).ravel()
    k = (ka[:, None] + kb[None, :]).ravel()
    c = (ca[:, None] * cb[None, :]).ravel()
    jmin, kmin = int(j.min()), int(k.min())
    kspan = int(k.max()) - kmin + 1
    if (int(j.max()) - jmin + 1) * kspan < 2**62:
        # pack (j, k) into one integer key; the packing preserves lex order
        key = (j - jmin) * kspan + (k - kmin)
        uniq, inverse = np.unique(key, return_inverse=True)
        uj, uk = uniq // kspan + jmin, uniq % kspan + kmin
    else:
        both = np.unique(np.stack([j, k], axis=1), axis=0, return_inverse=True)
        uniq, inverse = both
        uj, uk = uniq[:, 0].copy(), uniq[:, 1].copy()
    inverse = inverse.ravel()
    out = np.bincount(inverse, c.real, len(uj)) + 1j * np.bincount(inverse, c.imag, len(uj))
    return uj, uk, out


def kernel_modulus(kind, n, x):
    """|K(x)| for kernel code 0=Dirichlet, 1=Hilbert, 2=analytic, 3=half+analytic."""
    x = np.asarray(x, dtype=float)
    s = np.sin(np.pi * x)
    d = np.sin(np.pi * (2 * n + 1) * x) / s
    if kind == 0:
        return np.abs(d)
    h = 2.0 * np.sin(np.pi * n * x) * np.sin(np.pi * (n + 1) * x) / s
    if kind == 1:
        return np.abs(h)
    if kind == 2:
        return 0.5 * np.sqrt(d * d + h * h)
    if kind == 3:
        return np.abs(np.sin(np.pi * (n + 1) * x) / s)
    raise ValueError(f"unknown kernel code {kind}")


def _breakpoints(n):
    pts = [0.0, 0.5]
    for m in (2 * n + 1, n, n + 1):
        if m > 0:
            pts.extend(np.arange(1, m // 2 + 1) / m)
    pts = np.unique(np.clip(pts, 0.0, 0.5))
    return pts


def kernel_abs_integral(kind, n, tol):
    """Integral of |K| over the circle by adaptive Gauss-Kronrod on [0, 1/2].

    Returns (value, error_estimate).
    """
    if n == 0:
        return (1.0, 0.0) if kind in (0, 3) else ((0.0, 0.0) if kind == 1 else (0.5, 0.0))
    bp = _breakpoints(n)
    a, b = bp[:-1], bp[1:]
    total = 0.0
    err = 0.0
    # tolerance is split per unit length of [0, 1/2]; the factor 2 is the mirror half
    density = tol / 2.0 / 0.5
    while a.size:
        if a.size + 1 > MAX_INTERVALS:
            raise RuntimeError("quadrature interval cap reached")
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        f = kernel_modulus(kind, n, x)
        k15 = half * (f @ _KRONROD)
        g7 = half * (f @ _GAUSS)
        e = np.abs(k15 - g7)
        ok = e <= density * (b - a)
        total += k15[ok].sum()
        err += e[ok].sum()
        a, b = a[~ok], b[~ok]
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    return 2.0 * total, 2.0 * err
