"""Exact linear algebra over the supported fields.

Conventions used package-wide:

* vectors are coordinate rows; a linear map k^n -> k^q is an n x q matrix M
  acting by ``v @ M``;
* every subspace is stored by its unique reduced-row-echelon basis, so two
  equal subspaces are equal Python values;
* ``kernel`` is the classical right null space {x : M x^T = 0}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import _kernels
from .errors import ValidationError
from .fields import Field


def _check_same_field(a, b):
    if a.field != b.field:
        raise ValidationError("mixed field descriptors")


@dataclass(frozen=True)
class Matrix:
    field: Field
    nrows: int
    ncols: int
    entries: tuple  # tuple of row tuples of raw scalars

    @staticmethod
    def from_rows(field: Field, rows) -> "Matrix":
        rows = [tuple(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if n else 0
        for r in rows:
            if len(r) != m:
                raise ValidationError("ragged rows")
        return Matrix(field, n, m, tuple(rows))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return Matrix(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(field: Field, n: int, m: int) -> "Matrix":
        z = field.zero()
        return Matrix(field, n, m, tuple(tuple(z for _ in range(m)) for _ in range(n)))

    def row(self, i: int):
        return self.entries[i]

    def column(self, j: int):
        return tuple(r[j] for r in self.entries)

    def is_zero(self) -> bool:
        f = self.field
        return all(f.is_zero(x) for r in self.entries for x in r)

    def __add__(self, other: "Matrix") -> "Matrix":
        _check_same_field(self, other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValidationError("shape mismatch in matrix sum")
        add = self.field.add
        rows = tuple(
            tuple(add(x, y) for x, y in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)
        )
        return Matrix(self.field, self.nrows, self.ncols, rows)

    def __neg__(self) -> "Matrix":
        neg = self.field.neg
        return Matrix(self.field, self.nrows, self.ncols, tuple(tuple(neg(x) for x in r) for r in self.entries))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        mul = self.field.mul
        return Matrix(self.field, self.nrows, self.ncols, tuple(tuple(mul(c, x) for x in r) for r in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        _check_same_field(self, other)
        if self.ncols != other.nrows:
            raise ValidationError("shape mismatch in matrix product")
        f = self.field
        if f.kind == "rationals":
            out = _kernels.matmul_frac(self.entries, other.entries)
        elif f.kind == "prime-field":
            out = _kernels.matmul_modp(self.entries, other.entries, f.p)
        else:
            out = _kernels.matmul_generic(self.entries, other.entries, f)
        if self.nrows and other.ncols == 0:
            out = [[] for _ in range(self.nrows)]
        return Matrix(f, self.nrows, other.ncols, tuple(tuple(r) for r in out))

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field, self.ncols, self.nrows,
            tuple(tuple(self.entries[i][j] for i in range(self.nrows)) for j in range(self.ncols)),
        )

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product in row-major indexing: (i,u),(j,v) -> A[i][j]*B[u][v]."""
        _check_same_field(self, other)
        f = self.field
        mul = f.mul
        is_zero = f.is_zero
        zero_block = (f.zero(),) * other.ncols
        rows = []
        for i in range(self.nrows):
            arow = self.entries[i]
            for u in range(other.nrows):
                brow = other.entries[u]
                row = []
                for a in arow:
                    if is_zero(a):
                        row.extend(zero_block)
                    elif f.is_one(a):
                        row.extend(brow)
                    else:
                        row.extend(mul(a, b) for b in brow)
                rows.append(tuple(row))
        return Matrix(f, self.nrows * other.nrows, self.ncols * other.ncols, tuple(rows))

    def rref(self):
        """Returns (nonzero RREF rows as a Matrix, pivot column tuple)."""
        f = self.field
        rows = [list(r) for r in self.entries]
        if f.kind == "rationals":
            out, piv = _kernels.rref_frac(rows)
        elif f.kind == "prime-field":
            out, piv = _kernels.rref_modp(rows, f.p)
        else:
            out, piv = _kernels.rref_generic(rows, f)
        return Matrix(f, len(out), self.ncols, tuple(tuple(r) for r in out)), tuple(piv)

    def rank(self) -> int:
        return self.rref()[0].nrows


def vstack(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    if a.ncols != b.ncols:
        raise ValidationError("column mismatch in vstack")
    return Matrix(a.field, a.nrows + b.nrows, a.ncols, a.entries + b.entries)


def hstack(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    if a.nrows != b.nrows:
        raise ValidationError("row mismatch in hstack")
    return Matrix(a.field, a.nrows, a.ncols + b.ncols, tuple(r1 + r2 for r1, r2 in zip(a.entries, b.entries)))


@dataclass(frozen=True)
class Subspace:
    """Row space in canonical RREF; equal subspaces are equal values."""

    ambient: int
    basis: Matrix
    pivots: tuple

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def field(self) -> Field:
        return self.basis.field


def canonical_basis(m: Matrix) -> Subspace:
    """Canonical subspace spanned by the rows of m; idempotent."""
    r, piv = m.rref()
    return Subspace(m.ncols, r, piv)


def zero_subspace(field: Field, ambient: int) -> Subspace:
    return Subspace(ambient, Matrix(field, 0, ambient, ()), ())


def full_subspace(field: Field, ambient: int) -> Subspace:
    return Subspace(ambient, Matrix.identity(field, ambient), tuple(range(ambient)))


def subspace_coords(s: Subspace, vector) -> Optional[tuple]:
    """Coordinates of a row vector in the canonical basis, or None if outside.

    Because the basis is in RREF, candidate coordinates are just the entries
    at the pivot columns; membership is then an exact reconstruction check.
    """
    f = s.field
    coords = tuple(vector[c] for c in s.pivots)
    if s.dim == 0:
        return coords if all(f.is_zero(x) for x in vector) else None
    rec = Matrix.from_rows(f, [coords]) @ s.basis
    if tuple(rec.row(0)) == tuple(vector):
        return coords
    return None


def subspace_contains(a: Subspace, b: Subspace) -> bool:
    """Whether b is contained in a."""
    if a.ambient != b.ambient:
        raise ValidationError("ambient mismatch")
    return all(subspace_coords(a, row) is not None for row in b.basis.entries)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient != b.ambient:
        raise ValidationError("ambient mismatch")
    _check_same_field(a.basis, b.basis)
    return canonical_basis(vstack(a.basis, b.basis))


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    """Zassenhaus-style: left-kernel relations of the stacked bases."""
    if a.ambient != b.ambient:
        raise ValidationError("ambient mismatch")
    _check_same_field(a.basis, b.basis)
    if a.dim == 0 or b.dim == 0:
        return zero_subspace(a.field, a.ambient)
    stacked = vstack(a.basis, b.basis)
    rels = kernel(stacked.transpose())  # rows (u, v) with u @ A + v @ B = 0
    if rels.dim == 0:
        return zero_subspace(a.field, a.ambient)
    ucoef = Matrix.from_rows(a.field, [row[: a.dim] for row in rels.basis.entries])
    return canonical_basis(ucoef @ a.basis)


def subspace_ops(a: Subspace, b: Subspace) -> dict:
    return {
        "sum": subspace_sum(a, b),
        "intersection": subspace_intersection(a, b),
        "contains": subspace_contains(a, b),
    }


def kernel(m: Matrix) -> Subspace:
    """Canonical basis of the right null space {x : m @ x^T = 0}."""
    r, piv = m.rref()
    f = m.field
    free = [c for c in range(m.ncols) if c not in piv]
    gens = []
    for c in free:
        v = [f.zero()] * m.ncols
        v[c] = f.one()
        for i, pc in enumerate(piv):
            v[pc] = f.neg(r.entries[i][c])
        gens.append(v)
    if not gens:
        return zero_subspace(f, m.ncols)
    return canonical_basis(Matrix.from_rows(f, gens))


def left_kernel(m: Matrix) -> Subspace:
    """Canonical basis of {x : x @ m = 0}."""
    return kernel(m.transpose())


def inverse(m: Matrix) -> Matrix:
    """Inverse of a square matrix; raises ValidationError if singular."""
    if m.nrows != m.ncols:
        raise ValidationError("inverse of a non-square matrix")
    n = m.nrows
    aug = hstack(m, Matrix.identity(m.field, n))
    r, piv = aug.rref()
    if tuple(piv) != tuple(range(n)):
        raise ValidationError("matrix is singular")
    return Matrix.from_rows(m.field, [row[n:] for row in r.entries])


def solve_left(a: Matrix, b: Matrix) -> Matrix:
    """Some X with X @ a = b (free coordinates zero); raises if inconsistent."""
    f = a.field
    aug = hstack(a.transpose(), b.transpose())
    r, piv = aug.rref()
    n = a.nrows
    if any(pc >= n for pc in piv):
        raise ValidationError("inconsistent system in solve_left")
    sol = [[f.zero()] * n for _ in range(b.nrows)]
    for ridx, pc in enumerate(piv):
        for i in range(b.nrows):
            sol[i][pc] = r.entries[ridx][n + i]
    x = Matrix.from_rows(f, sol)
    if (x @ a).entries != b.entries:
        raise ValidationError("inconsistent system in solve_left")
    return x


def solve_right(a: Matrix, b: Matrix) -> Matrix:
    """Some X with a @ X = b; raises if inconsistent."""
    return solve_left(a.transpose(), b.transpose()).transpose()


def tensor_index(udim: int, vdim: int):
    """Row-major pairing of basis indices: (i, j) -> i*vdim + j."""

    def pair(i: int, j: int) -> int:
        if not (0 <= i < udim and 0 <= j < vdim):
            raise ValidationError("tensor index out of range")
        return i * vdim + j

    return pair


def tensor_vector(field: Field, u, v) -> tuple:
    """Row-major outer product of two coordinate rows."""
    mul = field.mul
    out = []
    for x in u:
        out.extend(mul(x, y) for y in v)
    return tuple(out)


@dataclass(frozen=True)
class QuotientSpace:
    """ambient / rels with the canonical complement of the pivot columns.

    ``project`` (ambient x dim) and ``section`` (dim x ambient) act on rows;
    section @ project is the identity and rels @ project = 0.
    """

    ambient: int
    rels: Subspace
    dim: int
    project: Matrix
    section: Matrix


def quotient_space(ambient: int, rels: Subspace) -> QuotientSpace:
    if rels.ambient != ambient:
        raise ValidationError("relations do not live in the ambient dimension")
    f = rels.field
    piv = rels.pivots
    nonpiv = [c for c in range(ambient) if c not in piv]
    q = len(nonpiv)
    z, o = f.zero(), f.one()
    sec = Matrix(f, q, ambient, tuple(
        tuple(o if c == nonpiv[a] else z for c in range(ambient)) for a in range(q)
    ))
    # reducing e_u by the RREF relation rows clears the pivot coordinates, so
    # the projection row of a pivot column u = piv[i] is -basis[i] restricted
    # to the non-pivot columns, and that of a non-pivot column is a unit row
    proj_rows = []
    pos = {c: i for i, c in enumerate(piv)}
    for u in range(ambient):
        if u in pos:
            base = rels.basis.entries[pos[u]]
            proj_rows.append(tuple(f.neg(base[c]) for c in nonpiv))
        else:
            proj_rows.append(tuple(o if c == u else z for c in nonpiv))
    proj = Matrix(f, ambient, q, tuple(proj_rows))
    return QuotientSpace(ambient, rels, q, proj, sec)
