# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same contracts and bit-identical results as ``pure.py``.  Integer-heavy paths
run on C ``long long`` buffers with overflow guards that fall back to the
object (or pure) implementation, so results never depend on which path ran.
"""

from fractions import Fraction
from math import gcd

from libc.stdlib cimport free, malloc

from . import pure

BACKEND = "fast"

# entries kept at or below this bound so that a*b - c*d fits in a long long
DEF LIMIT = 2147483647  # 2^31 - 1

_FRAC_ZERO = Fraction(0)
_FRAC_ONE = Fraction(1)
_FRAC_MINUS_ONE = Fraction(-1)


cdef inline object _frac_of(long long v):
    if v == 0:
        return _FRAC_ZERO
    if v == 1:
        return _FRAC_ONE
    if v == -1:
        return _FRAC_MINUS_ONE
    return Fraction(v)


cdef long long c_gcd(long long a, long long b):
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


def rref_frac(rows):
    """Reduced row echelon form over the rationals (see pure.rref_frac)."""
    cdef Py_ssize_t n = len(rows)
    cdef Py_ssize_t m = len(rows[0]) if n else 0
    cdef Py_ssize_t i, j, r, c, pr, idx
    cdef long long pv, x, g, v
    cdef bint fits = True

    int_rows = []
    for row in rows:
        lcm = 1
        for q in row:
            d = q.denominator
            lcm = lcm // gcd(lcm, d) * d
        ir = [q.numerator * (lcm // q.denominator) for q in row]
        gg = 0
        for w in ir:
            gg = gcd(gg, w)
        if gg > 1:
            ir = [w // gg for w in ir]
        int_rows.append(ir)
        if fits:
            for w in ir:
                if w > LIMIT or w < -LIMIT:
                    fits = False
                    break
    if not fits or n == 0 or m == 0:
        return pure.rref_frac(rows)

    cdef long long *mat = <long long *> malloc(n * m * sizeof(long long))
    if mat is NULL:
        return pure.rref_frac(rows)
    for i in range(n):
        ir = int_rows[i]
        for j in range(m):
            mat[i * m + j] = ir[j]

    pivots = []
    cdef list piv_list
    r = 0
    try:
        for c in range(m):
            pr = -1
            for i in range(r, n):
                if mat[i * m + c] != 0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(m):
                    v = mat[r * m + j]
                    mat[r * m + j] = mat[pr * m + j]
                    mat[pr * m + j] = v
            pv = mat[r * m + c]
            for i in range(r + 1, n):
                x = mat[i * m + c]
                if x != 0:
                    for j in range(c, m):
                        mat[i * m + j] = mat[i * m + j] * pv - mat[r * m + j] * x
                    g = 0
                    for j in range(c, m):
                        g = c_gcd(g, mat[i * m + j])
                    if g > 1:
                        for j in range(c, m):
                            mat[i * m + j] = mat[i * m + j] // g
                    for j in range(c, m):
                        if mat[i * m + j] > LIMIT or mat[i * m + j] < -LIMIT:
                            return pure.rref_frac(rows)
            pivots.append(c)
            r += 1
            if r == n:
                break

        for idx in range(r - 1, -1, -1):
            c = pivots[idx]
            pv = mat[idx * m + c]
            for i in range(idx):
                x = mat[i * m + c]
                if x != 0:
                    for j in range(m):
                        mat[i * m + j] = mat[i * m + j] * pv - mat[idx * m + j] * x
                    g = 0
                    for j in range(m):
                        g = c_gcd(g, mat[i * m + j])
                    if g > 1:
                        for j in range(m):
                            mat[i * m + j] = mat[i * m + j] // g
                    for j in range(m):
                        if mat[i * m + j] > LIMIT or mat[i * m + j] < -LIMIT:
                            return pure.rref_frac(rows)

        out = []
        for idx in range(r):
            pv = mat[idx * m + pivots[idx]]
            out.append([Fraction(mat[idx * m + j], pv) for j in range(m)])
        return out, pivots
    finally:
        free(mat)


def rref_modp(rows, p):
    """Reduced row echelon form over GF(p) (see pure.rref_modp)."""
    cdef Py_ssize_t n = len(rows)
    cdef Py_ssize_t m = len(rows[0]) if n else 0
    if p > LIMIT or n == 0 or m == 0:
        return pure.rref_modp(rows, p)
    cdef long long pp = p
    cdef Py_ssize_t i, j, r, c, pr, idx
    cdef long long x, inv, v
    cdef long long *mat = <long long *> malloc(n * m * sizeof(long long))
    if mat is NULL:
        return pure.rref_modp(rows, p)
    for i in range(n):
        row = rows[i]
        for j in range(m):
            mat[i * m + j] = row[j] % pp
    pivots = []
    r = 0
    try:
        for c in range(m):
            pr = -1
            for i in range(r, n):
                if mat[i * m + c] != 0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(m):
                    v = mat[r * m + j]
                    mat[r * m + j] = mat[pr * m + j]
                    mat[pr * m + j] = v
            inv = pow(mat[r * m + c], p - 2, p)
            for j in range(c, m):
                mat[r * m + j] = mat[r * m + j] * inv % pp
            for i in range(r + 1, n):
                x = mat[i * m + c]
                if x != 0:
                    for j in range(c, m):
                        mat[i * m + j] = (mat[i * m + j] - mat[r * m + j] * x) % pp
                        if mat[i * m + j] < 0:
                            mat[i * m + j] += pp
            pivots.append(c)
            r += 1
            if r == n:
                break
        for idx in range(r - 1, -1, -1):
            c = pivots[idx]
            for i in range(idx):
                x = mat[i * m + c]
                if x != 0:
                    for j in range(c, m):
                        mat[i * m + j] = (mat[i * m + j] - mat[idx * m + j] * x) % pp
                        if mat[i * m + j] < 0:
                            mat[i * m + j] += pp
        out = [[mat[idx * m + j] for j in range(m)] for idx in range(r)]
        return out, pivots
    finally:
        free(mat)


def rref_generic(rows, field):
    """Reduced row echelon form via field callbacks (see pure.rref_generic)."""
    cdef Py_ssize_t n = len(rows)
    cdef Py_ssize_t m = len(rows[0]) if n else 0
    cdef Py_ssize_t i, j, r, c, pr, idx
    mat = [list(row) for row in rows]
    is_zero = field.is_zero
    fmul = field.mul
    fsub = field.sub
    finv = field.inv
    pivots = []
    r = 0
    for c in range(m):
        pr = -1
        for i in range(r, n):
            if not is_zero(mat[i][c]):
                pr = i
                break
        if pr < 0:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pivrow = mat[r]
        pinv = finv(pivrow[c])
        for j in range(c, m):
            pivrow[j] = fmul(pivrow[j], pinv)
        for i in range(r + 1, n):
            rowi = mat[i]
            x = rowi[c]
            if not is_zero(x):
                for j in range(c, m):
                    rowi[j] = fsub(rowi[j], fmul(pivrow[j], x))
        pivots.append(c)
        r += 1
        if r == n:
            break
    for idx in range(r - 1, -1, -1):
        c = pivots[idx]
        pivrow = mat[idx]
        for i in range(idx):
            rowi = mat[i]
            x = rowi[c]
            if not is_zero(x):
                for j in range(c, m):
                    rowi[j] = fsub(rowi[j], fmul(pivrow[j], x))
    return mat[:r], pivots


def matmul_frac(a, b):
    """Product of Fraction matrices with an integer fast path."""
    cdef Py_ssize_t n = len(a)
    if n == 0:
        return []
    cdef Py_ssize_t k = len(b)
    cdef Py_ssize_t m = len(b[0]) if k else 0
    cdef Py_ssize_t i, j, t
    cdef bint ints = True
    cdef long long x, y
    for row in a:
        for q in row:
            if q.denominator != 1 or q.numerator > LIMIT or q.numerator < -LIMIT:
                ints = False
                break
        if not ints:
            break
    if ints:
        for row in b:
            for q in row:
                if q.denominator != 1 or q.numerator > LIMIT or q.numerator < -LIMIT:
                    ints = False
                    break
            if not ints:
                break
    # guard k <= 2^20 so accumulated dot products stay below 2^63
    if ints and k <= 1048576 and m > 0:
        av = <long long *> malloc(n * k * sizeof(long long))
        bv = <long long *> malloc(k * m * sizeof(long long))
        cv = <long long *> malloc(n * m * sizeof(long long))
        if av is NULL or bv is NULL or cv is NULL:
            if av is not NULL:
                free(av)
            if bv is not NULL:
                free(bv)
            if cv is not NULL:
                free(cv)
        else:
            try:
                for i in range(n):
                    row = a[i]
                    for t in range(k):
                        av[i * k + t] = row[t].numerator
                for t in range(k):
                    row = b[t]
                    for j in range(m):
                        bv[t * m + j] = row[j].numerator
                for i in range(n):
                    for j in range(m):
                        cv[i * m + j] = 0
                for i in range(n):
                    for t in range(k):
                        x = av[i * k + t]
                        if x != 0:
                            for j in range(m):
                                y = bv[t * m + j]
                                if y != 0:
                                    cv[i * m + j] += x * y
                return [[_frac_of(cv[i * m + j]) for j in range(m)] for i in range(n)]
            finally:
                free(av)
                free(bv)
                free(cv)
    return _matmul_frac_obj(a, b, n, k, m)


cdef _matmul_frac_obj(a, b, Py_ssize_t n, Py_ssize_t k, Py_ssize_t m):
    cdef Py_ssize_t i, j, t
    zero = Fraction(0)
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        rowa = a[i]
        rowo = out[i]
        for t in range(k):
            x = rowa[t]
            if x:
                rowb = b[t]
                for j in range(m):
                    y = rowb[j]
                    if y:
                        rowo[j] = rowo[j] + x * y
    return out


def matmul_modp(a, b, p):
    cdef Py_ssize_t n = len(a)
    if n == 0:
        return []
    cdef Py_ssize_t k = len(b)
    cdef Py_ssize_t m = len(b[0]) if k else 0
    if p > LIMIT or m == 0:
        return pure.matmul_modp(a, b, p)
    cdef long long pp = p
    cdef Py_ssize_t i, j, t
    cdef long long x
    cdef long long *av = <long long *> malloc(n * k * sizeof(long long))
    cdef long long *bv = <long long *> malloc(k * m * sizeof(long long))
    cdef long long *cv = <long long *> malloc(n * m * sizeof(long long))
    if av is NULL or bv is NULL or cv is NULL:
        if av is not NULL:
            free(av)
        if bv is not NULL:
            free(bv)
        if cv is not NULL:
            free(cv)
        return pure.matmul_modp(a, b, p)
    try:
        for i in range(n):
            row = a[i]
            for t in range(k):
                av[i * k + t] = row[t] % pp
        for t in range(k):
            row = b[t]
            for j in range(m):
                bv[t * m + j] = row[j] % pp
        for i in range(n):
            for j in range(m):
                cv[i * m + j] = 0
        for i in range(n):
            for t in range(k):
                x = av[i * k + t]
                if x != 0:
                    for j in range(m):
                        cv[i * m + j] = (cv[i * m + j] + x * bv[t * m + j]) % pp
        return [[cv[i * m + j] for j in range(m)] for i in range(n)]
    finally:
        free(av)
        free(bv)
        free(cv)


def matmul_generic(a, b, field):
    cdef Py_ssize_t n = len(a)
    if n == 0:
        return []
    cdef Py_ssize_t k = len(b)
    cdef Py_ssize_t m = len(b[0]) if k else 0
    cdef Py_ssize_t i, j, t
    zero = field.zero()
    is_zero = field.is_zero
    fmul = field.mul
    fadd = field.add
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        rowa = a[i]
        rowo = out[i]
        for t in range(k):
            x = rowa[t]
            if not is_zero(x):
                rowb = b[t]
                for j in range(m):
                    y = rowb[j]
                    if not is_zero(y):
                        rowo[j] = fadd(rowo[j], fmul(x, y))
    return out


def solvable_mod_prime_power(a, b, p, d):
    """Primitive solvability of a*X^2 + b*Y^2 = Z^2 mod p^d (see pure twin)."""
    cdef long long q = 1
    cdef int e
    for e in range(d):
        q *= p
        if q > 2097152:  # keep a*y*y below 2^63
            return pure.solvable_mod_prime_power(a, b, p, d)
    cdef long long aa = a % q
    cdef long long bb = b % q
    if aa < 0:
        aa += q
    if bb < 0:
        bb += q
    cdef long long y, x, t
    cdef char *is_sq = <char *> malloc(q)
    cdef char *b_sq = <char *> malloc(q)
    if is_sq is NULL or b_sq is NULL:
        if is_sq is not NULL:
            free(is_sq)
        if b_sq is not NULL:
            free(b_sq)
        return pure.solvable_mod_prime_power(a, b, p, d)
    try:
        for y in range(q):
            is_sq[y] = 0
            b_sq[y] = 0
        for y in range(q):
            is_sq[y * y % q] = 1
            b_sq[bb * y * y % q] = 1
        for y in range(q):
            if is_sq[(aa + bb * y * y) % q]:
                return True
        for x in range(q):
            if is_sq[(aa * x * x + bb) % q]:
                return True
        for x in range(q):
            t = (1 - aa * x * x) % q
            if t < 0:
                t += q
            if b_sq[t]:
                return True
        return False
    finally:
        free(is_sq)
        free(b_sq)
