# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: sparse 2D Cauchy product and kernel L1 quadrature."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, sqrt, fabs, M_PI
from libc.stdlib cimport malloc, free, realloc

cnp.import_array()

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

cdef enum:
    MAX_INTERVALS = 1048576

# dense accumulator is used when the product's bounding box is at most this many cells
cdef enum:
    DENSE_LIMIT = 4194304


def cauchy_product(ja, ka, ca, jb, kb, cb):
    cdef cnp.int64_t[::1] aj = np.ascontiguousarray(ja, dtype=np.int64)
    cdef cnp.int64_t[::1] ak = np.ascontiguousarray(ka, dtype=np.int64)
    cdef cnp.int64_t[::1] bj = np.ascontiguousarray(jb, dtype=np.int64)
    cdef cnp.int64_t[::1] bk = np.ascontiguousarray(kb, dtype=np.int64)
    cdef double complex[::1] ac = np.ascontiguousarray(ca, dtype=np.complex128)
    cdef double complex[::1] bc = np.ascontiguousarray(cb, dtype=np.complex128)
    cdef Py_ssize_t na = aj.shape[0], nb = bj.shape[0], p, q, n
    if na == 0 or nb == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), np.zeros(0, dtype=np.complex128)
    cdef cnp.int64_t j0 = aj[0] + bj[0], j1 = j0, k0 = ak[0] + bk[0], k1 = k0
    cdef cnp.int64_t amin_j = aj[0], amax_j = aj[0], amin_k = ak[0], amax_k = ak[0]
    cdef cnp.int64_t bmin_j = bj[0], bmax_j = bj[0], bmin_k = bk[0], bmax_k = bk[0]
    for p in range(na):
        amin_j = min(amin_j, aj[p]); amax_j = max(amax_j, aj[p])
        amin_k = min(amin_k, ak[p]); amax_k = max(amax_k, ak[p])
    for q in range(nb):
        bmin_j = min(bmin_j, bj[q]); bmax_j = max(bmax_j, bj[q])
        bmin_k = min(bmin_k, bk[q]); bmax_k = max(bmax_k, bk[q])
    j0 = amin_j + bmin_j
    j1 = amax_j + bmax_j
    k0 = amin_k + bmin_k
    k1 = amax_k + bmax_k
    cdef double wj = <double>(j1 - j0 + 1)
    cdef double wk = <double>(k1 - k0 + 1)
    cdef cnp.int64_t width, idx
    cdef double complex[::1] dense
    cdef unsigned char[::1] used
    if wj * wk <= DENSE_LIMIT:
        width = k1 - k0 + 1
        dense = np.zeros(<Py_ssize_t>(wj * wk), dtype=np.complex128)
        used = np.zeros(<Py_ssize_t>(wj * wk), dtype=np.uint8)
        for p in range(na):
            for q in range(nb):
                idx = (aj[p] + bj[q] - j0) * width + (ak[p] + bk[q] - k0)
                dense[idx] = dense[idx] + ac[p] * bc[q]
                used[idx] = 1
        flat = np.flatnonzero(np.asarray(used))
        out_j = flat // width + j0
        out_k = flat % width + k0
        return out_j.astype(np.int64), out_k.astype(np.int64), np.asarray(dense)[flat].copy()
    # sparse fallback: sort all products by key and reduce
    n = na * nb
    pj = np.empty(n, dtype=np.int64)
    pk = np.empty(n, dtype=np.int64)
    pc = np.empty(n, dtype=np.complex128)
    cdef cnp.int64_t[::1] vj = pj, vk = pk
    cdef double complex[::1] vc = pc
    for p in range(na):
        for q in range(nb):
            vj[p * nb + q] = aj[p] + bj[q]
            vk[p * nb + q] = ak[p] + bk[q]
            vc[p * nb + q] = ac[p] * bc[q]
    order = np.lexsort((pk, pj))
    pj, pk, pc = pj[order], pk[order], pc[order]
    vj = pj
    vk = pk
    vc = pc
    rj = np.empty(n, dtype=np.int64)
    rk = np.empty(n, dtype=np.int64)
    rc = np.empty(n, dtype=np.complex128)
    cdef cnp.int64_t[::1] wjv = rj, wkv = rk
    cdef double complex[::1] wcv = rc
    cdef Py_ssize_t m = 0
    wjv[0] = vj[0]; wkv[0] = vk[0]; wcv[0] = vc[0]
    for p in range(1, n):
        if vj[p] == wjv[m] and vk[p] == wkv[m]:
            wcv[m] = wcv[m] + vc[p]
        else:
            m += 1
            wjv[m] = vj[p]; wkv[m] = vk[p]; wcv[m] = vc[p]
    return rj[:m + 1].copy(), rk[:m + 1].copy(), rc[:m + 1].copy()


cdef inline double _modulus(int kind, long n, double x) nogil:
    cdef double s = sin(M_PI * x)
    cdef double d, h
    if kind == 0:
        return fabs(sin(M_PI * (2 * n + 1) * x) / s)
    if kind == 3:
        return fabs(sin(M_PI * (n + 1) * x) / s)
    h = 2.0 * sin(M_PI * n * x) * sin(M_PI * (n + 1) * x) / s
    if kind == 1:
        return fabs(h)
    d = sin(M_PI * (2 * n + 1) * x) / s
    return 0.5 * sqrt(d * d + h * h)


cdef void _gk15(int kind, long n, double a, double b, double* res, double* err) nogil:
    cdef double c = 0.5 * (a + b), hl = 0.5 * (b - a)
    cdef double fc = _modulus(kind, n, c)
    cdef double rk = WGK[7] * fc, rg = WG[3] * fc
    cdef double f1, f2
    cdef int i
    for i in range(7):
        f1 = _modulus(kind, n, c - hl * XGK[i])
        f2 = _modulus(kind, n, c + hl * XGK[i])
        rk += WGK[i] * (f1 + f2)
        if i % 2 == 1:
            rg += WG[i // 2] * (f1 + f2)
    res[0] = rk * hl
    err[0] = fabs((rk - rg) * hl)


def kernel_modulus(int kind, long n, x):
    xa = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(xa.ravel())
    out = np.empty_like(flat)
    cdef double[::1] xv = flat, ov = out
    cdef Py_ssize_t i
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown kernel code {kind}")
    for i in range(xv.shape[0]):
        ov[i] = _modulus(kind, n, xv[i])
    return out.reshape(xa.shape)


def kernel_abs_integral(int kind, long n, double tol):
    if n == 0:
        if kind == 0 or kind == 3:
            return 1.0, 0.0
        return (0.0, 0.0) if kind == 1 else (0.5, 0.0)
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown kernel code {kind}")
    from bohrfact._pycore import _breakpoints
    bp = _breakpoints(n)
    cdef double[::1] bpv = bp
    cdef Py_ssize_t cap = 2 * bpv.shape[0] + 64, top = 0, i
    cdef double* sa = <double*>malloc(cap * sizeof(double))
    cdef double* sb = <double*>malloc(cap * sizeof(double))
    cdef double total = 0.0, errsum = 0.0, r, e, a, b, m
    cdef double density = tol / 2.0 / 0.5
    cdef Py_ssize_t count = 0
    cdef double* sa2
    cdef double* sb2
    if sa == NULL or sb == NULL:
        free(sa); free(sb)
        raise MemoryError()
    try:
        for i in range(bpv.shape[0] - 1):
            sa[top] = bpv[i]; sb[top] = bpv[i + 1]; top += 1
        while top > 0:
            top -= 1
            a = sa[top]; b = sb[top]
            _gk15(kind, n, a, b, &r, &e)
            count += 1
            if e <= density * (b - a) or count > MAX_INTERVALS:
                total += r
                errsum += e
                continue
            if top + 2 > cap:
                cap *= 2
                sa2 = <double*>realloc(sa, cap * sizeof(double))
                if sa2 == NULL:
                    raise MemoryError()
                sa = sa2
                sb2 = <double*>realloc(sb, cap * sizeof(double))
                if sb2 == NULL:
                    raise MemoryError()
                sb = sb2
            m = 0.5 * (a + b)
            sa[top] = a; sb[top] = m; top += 1
            sa[top] = m; sb[top] = b; top += 1
        if count > MAX_INTERVALS:
            raise RuntimeError("quadrature interval cap reached")
    finally:
        free(sa); free(sb)
    return 2.0 * total, 2.0 * errsum
