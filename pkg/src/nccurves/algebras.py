"""Finite-dimensional unital associative algebras given by structure constants.

An algebra is the data c[i][j][k] with e_i e_j = sum_k c[i][j][k] e_k plus the
coordinates of 1.  Constructors validate associativity and the unit law
exhaustively over basis triples.  Quaternion and matrix constructors tag the
result so that downstream code can use certified arithmetic (ramification
sets, Morita corners) instead of generic searches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from . import witt
from .errors import NotInvertibleError, ValidationError
from .fields import Field, QuadraticExtension, rational_sqrt
from .linalg import Matrix, inverse, kernel, left_kernel


@dataclass(frozen=True)
class Algebra:
    field: Field
    dim: int
    structure: tuple  # c[i][j][k]
    unit: tuple
    label: str = dc_field(default="", compare=False)
    quaternion_params: Optional[tuple] = dc_field(default=None, compare=False)
    matrix_size: Optional[int] = dc_field(default=None, compare=False)

    def element(self, coords) -> "AlgebraElement":
        return AlgebraElement(self, tuple(coords))

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit)

    def basis_element(self, i: int) -> "AlgebraElement":
        z, o = self.field.zero(), self.field.one()
        return AlgebraElement(self, tuple(o if j == i else z for j in range(self.dim)))

    def __repr__(self):
        return self.label or f"Algebra(dim={self.dim} over {self.field!r})"


def multiply_coords(A: Algebra, x, y) -> tuple:
    f = A.field
    out = [f.zero()] * A.dim
    for i, xi in enumerate(x):
        if f.is_zero(xi):
            continue
        ci = A.structure[i]
        for j, yj in enumerate(y):
            if f.is_zero(yj):
                continue
            coef = f.mul(xi, yj)
            row = ci[j]
            for k in range(A.dim):
                if not f.is_zero(row[k]):
                    out[k] = f.add(out[k], f.mul(coef, row[k]))
    return tuple(out)


@dataclass(frozen=True)
class AlgebraElement:
    parent: Algebra
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.parent.dim:
            raise ValidationError("coordinate length does not match algebra dimension")

    def __add__(self, other):
        f = self.parent.field
        return AlgebraElement(self.parent, tuple(f.add(a, b) for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        f = self.parent.field
        return AlgebraElement(self.parent, tuple(f.neg(a) for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.parent != other.parent:
            raise ValidationError("elements of different algebras")
        return AlgebraElement(self.parent, multiply_coords(self.parent, self.coords, other.coords))

    def scale(self, c):
        f = self.parent.field
        return AlgebraElement(self.parent, tuple(f.mul(c, a) for a in self.coords))

    def is_zero(self) -> bool:
        f = self.parent.field
        return all(f.is_zero(a) for a in self.coords)


def left_mul_matrix(A: Algebra, x) -> Matrix:
    """Matrix of y |-> x*y in the row convention: coords(x*y) = y @ L."""
    f = A.field
    rows = []
    for w in range(A.dim):
        e = [f.zero()] * A.dim
        e[w] = f.one()
        rows.append(multiply_coords(A, x, e))
    return Matrix.from_rows(f, rows)


def right_mul_matrix(A: Algebra, x) -> Matrix:
    """Matrix of y |-> y*x in the row convention: coords(y*x) = y @ R."""
    f = A.field
    rows = []
    for w in range(A.dim):
        e = [f.zero()] * A.dim
        e[w] = f.one()
        rows.append(multiply_coords(A, e, x))
    return Matrix.from_rows(f, rows)


def regular_representation(A: Algebra) -> tuple:
    """Left and right multiplication matrix families over the basis."""
    lefts = tuple(left_mul_matrix(A, A.basis_element(i).coords) for i in range(A.dim))
    rights = tuple(right_mul_matrix(A, A.basis_element(i).coords) for i in range(A.dim))
    return lefts, rights


def validate_algebra(A: Algebra) -> None:
    """Exhaustive associativity and unit checks over basis triples."""
    f = A.field
    n = A.dim
    if len(A.structure) != n or any(len(ci) != n or any(len(row) != n for row in ci) for ci in A.structure):
        raise ValidationError("structure constant array has the wrong shape")
    basis = [A.basis_element(i).coords for i in range(n)]
    for i in range(n):
        if multiply_coords(A, A.unit, basis[i]) != basis[i]:
            raise ValidationError(f"unit law fails on the left at basis element {i}")
        if multiply_coords(A, basis[i], A.unit) != basis[i]:
            raise ValidationError(f"unit law fails on the right at basis element {i}")
    for i in range(n):
        for j in range(n):
            ij = multiply_coords(A, basis[i], basis[j])
            for k in range(n):
                left = multiply_coords(A, ij, basis[k])
                right = multiply_coords(A, basis[i], multiply_coords(A, basis[j], basis[k]))
                if left != right:
                    raise ValidationError(f"associativity fails at basis triple ({i}, {j}, {k})")


def _coerce(field: Field, v):
    if isinstance(v, bool):
        raise ValidationError("bad scalar")
    if isinstance(v, int):
        return field.from_int(v)
    if field.kind == "rationals" and isinstance(v, Fraction):
        return v
    if field.kind == "quadratic-extension":
        if isinstance(v, tuple) and len(v) == 2:
            return v
        if isinstance(v, Fraction):
            return field.embed(v)
    if field.kind == "prime-field" and isinstance(v, int):
        return field.from_int(v)
    return v


def field_algebra(field: Field, label: str = "") -> Algebra:
    o = field.one()
    A = Algebra(field, 1, (((o,),),), (o,), label=label or f"{field!r}")
    validate_algebra(A)
    return A


def make_quaternion(a, b, field: Field = None) -> Algebra:
    """The quaternion algebra (a, b): basis {1, i, j, ij}, i^2=a, j^2=b, ij=-ji."""
    from .fields import QQ

    field = field or QQ
    a = _coerce(field, a)
    b = _coerce(field, b)
    if field.is_zero(a) or field.is_zero(b):
        raise ValidationError("quaternion parameters must be nonzero")
    z, o = field.zero(), field.one()
    ab = field.mul(a, b)

    def vec(k, val):
        row = [z, z, z, z]
        row[k] = val
        return tuple(row)

    # products of basis elements 1, i, j, ij
    table = [[None] * 4 for _ in range(4)]
    table[0][0] = vec(0, o)
    table[0][1] = vec(1, o)
    table[0][2] = vec(2, o)
    table[0][3] = vec(3, o)
    table[1][0] = vec(1, o)
    table[1][1] = vec(0, a)
    table[1][2] = vec(3, o)
    table[1][3] = vec(2, a)
    table[2][0] = vec(2, o)
    table[2][1] = vec(3, field.neg(o))
    table[2][2] = vec(0, b)
    table[2][3] = vec(1, field.neg(b))
    table[3][0] = vec(3, o)
    table[3][1] = vec(2, field.neg(a))
    table[3][2] = vec(1, b)
    table[3][3] = vec(0, field.neg(ab))
    A = Algebra(
        field,
        4,
        tuple(tuple(table[i][j] for j in range(4)) for i in range(4)),
        (o, z, z, z),
        label=f"({field.format_scalar(a)},{field.format_scalar(b)})",
        quaternion_params=(a, b),
    )
    validate_algebra(A)
    return A


def make_matrix_algebra(field: Field, n: int) -> Algebra:
    """M_n over the field on the matrix-unit basis e_uv, row-major order."""
    if n < 1:
        raise ValidationError("matrix algebra needs n >= 1")
    z, o = field.zero(), field.one()
    dim = n * n

    def idx(u, v):
        return u * n + v

    structure = [[None] * dim for _ in range(dim)]
    for u in range(n):
        for v in range(n):
            for w in range(n):
                for x in range(n):
                    row = [z] * dim
                    if v == w:
                        row[idx(u, x)] = o
                    structure[idx(u, v)][idx(w, x)] = tuple(row)
    unit = [z] * dim
    for u in range(n):
        unit[idx(u, u)] = o
    A = Algebra(
        field,
        dim,
        tuple(tuple(r) for r in structure),
        tuple(unit),
        label=f"M{n}({field!r})",
        matrix_size=n,
    )
    validate_algebra(A)
    return A


def invert(x: AlgebraElement) -> AlgebraElement:
    """Two-sided inverse via the left-regular linear system."""
    A = x.parent
    if x.is_zero():
        raise NotInvertibleError("zero is not invertible")
    L = left_mul_matrix(A, x.coords)
    r, piv = L.rref()
    if r.nrows != A.dim:
        raise NotInvertibleError("element is a zero divisor")
    y = Matrix.from_rows(A.field, [A.unit]) @ inverse(L)
    out = AlgebraElement(A, tuple(y.row(0)))
    if (x * out).coords != A.unit or (out * x).coords != A.unit:
        raise ValidationError("inverse verification failed")  # unreachable for valid algebras
    return out


def low_height_values(field: Field, levels: int) -> list:
    """Deterministic (value, level) list ordered 0, 1, -1, 2, -2, ..."""
    if field.kind == "prime-field":
        return [(field.from_int(v), v) for v in range(min(levels, field.p - 1) + 1)]
    if field.kind == "rationals":
        vals = [(Fraction(0), 0)]
        for h in range(1, levels + 1):
            vals.append((Fraction(h), h))
            vals.append((Fraction(-h), h))
        return vals
    if field.kind == "quadratic-extension":
        base_vals = low_height_values(field.base, levels)
        order = {v: i for i, (v, _) in enumerate(base_vals)}
        pairs = [((x, y), max(lx, ly)) for x, lx in base_vals for y, ly in base_vals]
        return sorted(pairs, key=lambda vl: (vl[1], order[vl[0][0]], order[vl[0][1]]))
    raise ValidationError(f"unsupported field kind {field.kind!r}")


def enumerate_low_height(field: Field, dim: int, levels: int, budget: int):
    """Coordinate tuples by increasing height shell, lexicographic within a shell.

    Shell h consists of tuples whose coordinates all have level <= h with at
    least one coordinate at exactly h, so small witnesses are seen first.
    """
    vals = low_height_values(field, levels)
    count = 0
    max_level = max(l for _, l in vals) if vals else 0
    for h in range(max_level + 1):
        shell = [(v, l) for v, l in vals if l <= h]
        for combo in itertools.product(shell, repeat=dim):
            if max(l for _, l in combo) != h:
                continue
            if count >= budget:
                return
            count += 1
            yield tuple(v for v, _ in combo)


@dataclass(frozen=True)
class ZeroDivisorReport:
    element: Optional[AlgebraElement]
    certified: bool
    note: str


def find_zero_divisor(A: Algebra, budget: int = 4000, levels: int = 3) -> ZeroDivisorReport:
    """Searches for a nonzero non-invertible element.

    Quaternion algebras over the rationals are decided outright: the
    ramification set settles split versus division, and in the split case a
    zero divisor is produced from a rational point on the associated conic.
    Elsewhere the deterministic low-height search yields either a witness or
    an uncertified "not found".
    """
    f = A.field
    if A.quaternion_params is not None and f.kind == "rationals":
        a, b = A.quaternion_params
        ram = witt.ramification_set(a, b)
        if not ram.is_empty:
            return ZeroDivisorReport(None, True, f"division algebra: ramified at {ram!r}")
        x, y, z = witt.conic_point_for_rationals(a, b)
        el = A.element((Fraction(z), Fraction(x), Fraction(y), Fraction(0)))
        assert not el.is_zero() and left_mul_matrix(A, el.coords).rank() < A.dim
        return ZeroDivisorReport(el, True, f"split: conic point ({x}:{y}:{z})")
    for coords in enumerate_low_height(f, A.dim, levels, budget):
        if all(f.is_zero(c) for c in coords):
            continue
        if left_mul_matrix(A, coords).rank() < A.dim:
            return ZeroDivisorReport(A.element(coords), False, "found by low-height search")
    return ZeroDivisorReport(None, False, f"no zero divisor within budget {budget}")


def is_algebra_hom(A: Algebra, B: Algebra, phi: Matrix) -> bool:
    """Whether phi (A.dim x B.dim, acting on coordinate rows) is a unital homomorphism."""
    if phi.nrows != A.dim or phi.ncols != B.dim:
        return False
    unit_row = Matrix.from_rows(A.field, [A.unit])
    if (unit_row @ phi).row(0) != B.unit:
        return False
    images = [tuple((Matrix.from_rows(A.field, [A.basis_element(i).coords]) @ phi).row(0)) for i in range(A.dim)]
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = multiply_coords(B, images[i], images[j])
            prod = multiply_coords(A, A.basis_element(i).coords, A.basis_element(j).coords)
            rhs = (Matrix.from_rows(A.field, [prod]) @ phi).row(0)
            if lhs != tuple(rhs):
                return False
    return True


def _rational_values(height: int) -> list:
    vals = [Fraction(0)]
    for d in range(1, height + 1):
        for n in range(-height, height + 1):
            if n != 0 and Fraction(n, d).denominator == d:
                vals.append(Fraction(n, d))
    return vals


def _scalar_of_unit(A: Algebra, coords):
    """If coords == a * unit, return a, else None."""
    f = A.field
    t = next((i for i, u in enumerate(A.unit) if not f.is_zero(u)), None)
    a = f.div(coords[t], A.unit[t])
    if tuple(f.mul(a, u) for u in A.unit) == tuple(coords):
        return a
    return None


def find_quaternion_isomorphism(A: Algebra, B: Algebra, height: int = 6) -> Optional[Matrix]:
    """Explicit isomorphism between tagged quaternion algebras over Q, or None.

    Searches for pure quaternions I, J in B with I^2 = a1, J^2 = b1 and
    IJ = -JI; the basis map 1, i, j, ij -> 1, I, J, IJ is then verified as a
    unital isomorphism.  The search sweeps rational coordinate pairs of
    bounded height, so "None" only means "no witness within budget".
    """
    if A.quaternion_params is None or B.quaternion_params is None:
        return None
    if A.field != B.field or A.field.kind != "rationals":
        return None
    a1, b1 = A.quaternion_params
    a2, b2 = B.quaternion_params
    vals = _rational_values(height)
    f = B.field

    def pure_square(y, z, w):
        return a2 * y * y + b2 * z * z - a2 * b2 * w * w

    candidates = 0
    for y, z in itertools.product(vals, repeat=2):
        ww = (a2 * y * y + b2 * z * z - a1) / (a2 * b2)
        w = rational_sqrt(ww)
        if w is None:
            continue
        I = (Fraction(0), y, z, w)
        if all(v == 0 for v in I):
            continue
        candidates += 1
        if candidates > 40:
            return None
        # pure quaternions anticommuting with I: orthogonal complement for the
        # bilinear form of the pure norm, inside coordinates (y, z, w)
        gram_row = [2 * a2 * y, 2 * b2 * z, -2 * a2 * b2 * w]
        M = Matrix.from_rows(f, [gram_row])
        orth = kernel(M)
        if orth.dim != 2:
            continue
        v1, v2 = orth.basis.entries
        for s, t in itertools.product(vals, repeat=2):
            yz = tuple(s * v1[c] + t * v2[c] for c in range(3))
            if all(v == 0 for v in yz):
                continue
            if pure_square(*yz) != b1:
                continue
            J = (Fraction(0),) + yz
            K = multiply_coords(B, I, J)
            phi = Matrix.from_rows(f, [B.unit, I, J, K])
            try:
                inverse(phi)
            except ValidationError:
                continue
            if is_algebra_hom(A, B, phi):
                return phi
    return None


def recognize_quaternion(A: Algebra, levels: int = 3, budget: int = 4000):
    """Detect a quaternion presentation of an abstract 4-dimensional algebra.

    Returns (a, b, phi) where phi maps make_quaternion(a, b) coordinates onto
    A coordinates, or None if the bounded search fails.
    """
    f = A.field
    if A.dim != 4:
        return None
    if A.quaternion_params is not None:
        a, b = A.quaternion_params
        return a, b, Matrix.identity(f, 4)
    trace_row = []
    for w in range(A.dim):
        L = left_mul_matrix(A, A.basis_element(w).coords)
        tr = f.zero()
        for t in range(A.dim):
            tr = f.add(tr, L.entries[t][t])
        trace_row.append(tr)
    V = kernel(Matrix.from_rows(f, [trace_row]))
    if V.dim != 3:
        return None
    for c in enumerate_low_height(f, 3, levels, budget):
        if all(f.is_zero(v) for v in c):
            continue
        x = tuple((Matrix.from_rows(f, [c]) @ V.basis).row(0))
        sq = multiply_coords(A, x, x)
        a = _scalar_of_unit(A, sq)
        if a is None or f.is_zero(a):
            continue
        anti = left_mul_matrix(A, x) + right_mul_matrix(A, x)
        W = left_kernel(V.basis @ anti)
        if W.dim != 2:
            continue
        Wfull = W.basis @ V.basis
        for c2 in enumerate_low_height(f, 2, levels, budget):
            if all(f.is_zero(v) for v in c2):
                continue
            y = tuple((Matrix.from_rows(f, [c2]) @ Wfull).row(0))
            sq2 = multiply_coords(A, y, y)
            b = _scalar_of_unit(A, sq2)
            if b is None or f.is_zero(b):
                continue
            xy = multiply_coords(A, x, y)
            phi = Matrix.from_rows(f, [A.unit, x, y, xy])
            try:
                inverse(phi)
            except ValidationError:
                continue
            Q = make_quaternion(a, b, f)
            if is_algebra_hom(Q, A, phi):
                return a, b, phi
    return None


def base_change_algebra(A: Algebra, ext: QuadraticExtension) -> Algebra:
    """Scalar extension along base -> base(sqrt(d))."""
    if not isinstance(ext, QuadraticExtension) or ext.base != A.field:
        raise ValidationError("extension field does not extend the algebra's field")
    emb = ext.embed
    structure = tuple(
        tuple(tuple(emb(v) for v in row) for row in ci) for ci in A.structure
    )
    params = None
    if A.quaternion_params is not None:
        params = tuple(emb(v) for v in A.quaternion_params)
    B = Algebra(
        ext,
        A.dim,
        structure,
        tuple(emb(v) for v in A.unit),
        label=f"{A.label or 'A'}⊗{ext!r}",
        quaternion_params=params,
        matrix_size=A.matrix_size,
    )
    validate_algebra(B)
    return B
