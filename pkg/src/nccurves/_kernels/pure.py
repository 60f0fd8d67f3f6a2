"""Pure-Python kernel implementations.

These are the hot inner loops of the package: reduced row echelon forms over
the supported base fields, matrix products, and the p-adic solvability sweep.
A compiled twin with the same contracts lives in ``_fast.pyx``; the two must
produce bit-identical results.
"""

from fractions import Fraction
from math import gcd

BACKEND = "pure"


def rref_frac(rows):
    """Reduced row echelon form over the rationals.

    Input rows are lists of Fractions.  Returns ``(rows, pivots)`` where the
    returned rows are the nonzero rows of the unique RREF (pivot entries 1,
    pivot columns increasing and elsewhere zero).

    The elimination itself is fraction free: rows are scaled to integers and
    reduced by their gcd after every combination, so all O(n^3) work happens
    on machine-or-bignum ints and Fractions only appear at the final pivot
    normalization.
    """
    n = len(rows)
    m = len(rows[0]) if n else 0
    mat = []
    for row in rows:
        lcm = 1
        for x in row:
            d = x.denominator
            lcm = lcm // gcd(lcm, d) * d
        ir = [x.numerator * (lcm // x.denominator) for x in row]
        g = 0
        for v in ir:
            g = gcd(g, v)
        if g > 1:
            ir = [v // g for v in ir]
        mat.append(ir)

    pivots = []
    r = 0
    for c in range(m):
        pr = -1
        for i in range(r, n):
            if mat[i][c]:
                pr = i
                break
        if pr < 0:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pivrow = mat[r]
        pv = pivrow[c]
        for i in range(r + 1, n):
            rowi = mat[i]
            x = rowi[c]
            if x:
                for j in range(c, m):
                    rowi[j] = rowi[j] * pv - pivrow[j] * x
                g = 0
                for v in rowi:
                    g = gcd(g, v)
                if g > 1:
                    for j in range(c, m):
                        rowi[j] //= g
        pivots.append(c)
        r += 1
        if r == n:
            break

    for idx in range(r - 1, -1, -1):
        c = pivots[idx]
        pivrow = mat[idx]
        pv = pivrow[c]
        for i in range(idx):
            rowi = mat[i]
            x = rowi[c]
            if x:
                for j in range(m):
                    rowi[j] = rowi[j] * pv - pivrow[j] * x
                g = 0
                for v in rowi:
                    g = gcd(g, v)
                if g > 1:
                    for j in range(m):
                        rowi[j] //= g

    out = []
    for idx in range(r):
        pv = mat[idx][pivots[idx]]
        out.append([Fraction(v, pv) for v in mat[idx]])
    return out, pivots


def rref_modp(rows, p):
    """Reduced row echelon form over GF(p); rows are lists of residues."""
    n = len(rows)
    m = len(rows[0]) if n else 0
    mat = [[v % p for v in row] for row in rows]
    pivots = []
    r = 0
    for c in range(m):
        pr = -1
        for i in range(r, n):
            if mat[i][c]:
                pr = i
                break
        if pr < 0:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pivrow = mat[r]
        inv = pow(pivrow[c], p - 2, p)
        for j in range(c, m):
            pivrow[j] = pivrow[j] * inv % p
        for i in range(r + 1, n):
            rowi = mat[i]
            x = rowi[c]
            if x:
                for j in range(c, m):
                    rowi[j] = (rowi[j] - pivrow[j] * x) % p
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
            if x:
                for j in range(c, m):
                    rowi[j] = (rowi[j] - pivrow[j] * x) % p
    return mat[:r], pivots


def rref_generic(rows, field):
    """Reduced row echelon form via field callbacks (any supported field)."""
    n = len(rows)
    m = len(rows[0]) if n else 0
    mat = [list(row) for row in rows]
    is_zero = field.is_zero
    mul = field.mul
    sub = field.sub
    inv = field.inv
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
        pinv = inv(pivrow[c])
        for j in range(c, m):
            pivrow[j] = mul(pivrow[j], pinv)
        for i in range(r + 1, n):
            rowi = mat[i]
            x = rowi[c]
            if not is_zero(x):
                for j in range(c, m):
                    rowi[j] = sub(rowi[j], mul(pivrow[j], x))
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
                    rowi[j] = sub(rowi[j], mul(pivrow[j], x))
    return mat[:r], pivots


def matmul_frac(a, b):
    """Product of Fraction matrices (lists of rows); skips zero entries."""
    n = len(a)
    if n == 0:
        return []
    k = len(b)
    m = len(b[0]) if k else 0
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
                        rowo[j] += x * y
    return out


def matmul_modp(a, b, p):
    n = len(a)
    if n == 0:
        return []
    k = len(b)
    m = len(b[0]) if k else 0
    out = [[0] * m for _ in range(n)]
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
                        rowo[j] = (rowo[j] + x * y) % p
    return out


def matmul_generic(a, b, field):
    n = len(a)
    if n == 0:
        return []
    k = len(b)
    m = len(b[0]) if k else 0
    zero = field.zero()
    is_zero = field.is_zero
    mul = field.mul
    add = field.add
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
                        rowo[j] = add(rowo[j], mul(x, y))
    return out


def solvable_mod_prime_power(a, b, p, d):
    """Primitive solvability of a*X^2 + b*Y^2 = Z^2 modulo p^d.

    Any primitive solution has a unit coordinate, and scaling by that unit's
    inverse moves the solution onto one of three sweeps with the coordinate
    pinned to 1, so the three O(p^d) sweeps below are exhaustive.
    """
    q = p ** d
    a %= q
    b %= q
    is_sq = bytearray(q)
    for z in range(q):
        is_sq[z * z % q] = 1
    # X = 1: Z^2 = a + b*Y^2
    for y in range(q):
        if is_sq[(a + b * y * y) % q]:
            return True
    # Y = 1: Z^2 = a*X^2 + b
    for x in range(q):
        if is_sq[(a * x * x + b) % q]:
            return True
    # Z = 1: b*Y^2 = 1 - a*X^2
    b_sq = bytearray(q)
    for y in range(q):
        b_sq[b * y * y % q] = 1
    for x in range(q):
        if b_sq[(1 - a * x * x) % q]:
            return True
    return False
