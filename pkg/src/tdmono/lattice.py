"""Exact integer linear algebra.

Everything here works on Python ints, so intermediate growth during
elimination cannot overflow. The Smith form is the plain pivot-on-smallest
row/column reduction; cost is roughly cubic in the matrix size times the
bit growth of the entries, which is fine for the few-hundred-row matrices
produced by the Chow complexes. A modular or lattice-reduced variant could
replace ``_smith`` without touching any caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class LatticeError(ValueError):
    pass


class CompositionNotZero(LatticeError):
    pass


class NotChainCompatible(LatticeError):
    pass


class NotSquare(LatticeError):
    pass


class NotSymmetric(LatticeError):
    pass


class NotInKernel(LatticeError):
    pass


class IntMatrix:
    """Immutable dense integer matrix acting on column vectors."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]] = (), ncols: int | None = None):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise LatticeError(f"ragged row: expected {ncols} entries, got {len(r)}")
        object.__setattr__(self, "_rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(([0] * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        for c in columns:
            if len(c) != nrows:
                raise LatticeError("column length does not match nrows")
        return cls(([c[i] for c in columns] for i in range(nrows)), len(columns))

    @classmethod
    def diagonal(cls, entries: Sequence[int], nrows: int, ncols: int) -> "IntMatrix":
        m = [[0] * ncols for _ in range(nrows)]
        for k, e in enumerate(entries):
            m[k][k] = e
        return cls(m, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def __getitem__(self, key: tuple[int, int]) -> int:
        r, c = key
        return self._rows[r][c]

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(([r[j] for r in self._rows] for j in range(self.ncols)), self.nrows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise LatticeError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        out = []
        for r in self._rows:
            nz = [(k, x) for k, x in enumerate(r) if x]
            out.append([sum(x * c[k] for k, x in nz) for c in cols])
        return IntMatrix(out, other.ncols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ncols:
            raise LatticeError("vector length does not match ncols")
        return tuple(sum(a * b for a, b in zip(r, v) if a) for r in self._rows)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise LatticeError(f"shape mismatch {self.shape} + {other.shape}")
        return IntMatrix(([a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)), self.ncols)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(([c * a for a in r] for r in self._rows), self.ncols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r}, ncols={self.ncols})"

    def select_columns(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(([r[j] for j in idx] for r in self._rows), len(idx))

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix((self._rows[i] for i in idx), self.ncols)


def hstack(blocks: Sequence[IntMatrix], nrows: int) -> IntMatrix:
    rows = [[] for _ in range(nrows)]
    for b in blocks:
        if b.nrows != nrows:
            raise LatticeError("hstack row mismatch")
        for i in range(nrows):
            rows[i].extend(b.row(i))
    return IntMatrix(rows, sum(b.ncols for b in blocks))


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V`` equals the diagonal of ``diag`` padded with zeros."""

    U: IntMatrix
    V: IntMatrix
    diag: tuple[int, ...]
    U_inv: IntMatrix = field(repr=False, compare=False, default=None)
    V_inv: IntMatrix = field(repr=False, compare=False, default=None)

    @property
    def rank(self) -> int:
        return len(self.diag)

    def verify(self, A: IntMatrix) -> bool:
        D = IntMatrix.diagonal(self.diag, A.nrows, A.ncols)
        if self.U @ A @ self.V != D:
            return False
        if any(d <= 0 for d in self.diag):
            return False
        return all(self.diag[k + 1] % self.diag[k] == 0 for k in range(len(self.diag) - 1))


def _smith(A: IntMatrix, left: bool = True, right: bool = True):
    m, n = A.shape
    a = A.tolist()
    U = _identity(m) if left else None
    Ui = _identity(m) if left else None
    V = _identity(n) if right else None
    Vi = _identity(n) if right else None

    def row_add(i, t, q):  # row_i += q * row_t
        ai, at = a[i], a[t]
        for c in range(n):
            if at[c]:
                ai[c] += q * at[c]
        if left:
            ui, ut = U[i], U[t]
            for c in range(m):
                if ut[c]:
                    ui[c] += q * ut[c]
            for r in Ui:
                if r[i]:
                    r[t] -= q * r[i]

    def row_swap(i, t):
        a[i], a[t] = a[t], a[i]
        if left:
            U[i], U[t] = U[t], U[i]
            for r in Ui:
                r[i], r[t] = r[t], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        if left:
            U[i] = [-x for x in U[i]]
            for r in Ui:
                r[i] = -r[i]

    def col_add(j, t, q):  # col_j += q * col_t
        for r in a:
            if r[t]:
                r[j] += q * r[t]
        if right:
            for r in V:
                if r[t]:
                    r[j] += q * r[t]
            vt, vj = Vi[t], Vi[j]
            for c in range(n):
                if vj[c]:
                    vt[c] -= q * vj[c]

    def col_swap(j, t):
        for r in a:
            r[j], r[t] = r[t], r[j]
        if right:
            for r in V:
                r[j], r[t] = r[t], r[j]
            Vi[j], Vi[t] = Vi[t], Vi[j]

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            ai = a[i]
            for j in range(t, n):
                x = ai[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        clean = False
            if not clean:
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if a[i][t] and abs(a[i][t]) < best[0]:
                        best = (abs(a[i][t]), i, t)
                for j in range(t + 1, n):
                    if a[t][j] and abs(a[t][j]) < best[0]:
                        best = (abs(a[t][j]), t, j)
                _, i, j = best
                if i != t:
                    row_swap(i, t)
                if j != t:
                    col_swap(j, t)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if a[t][t] < 0:
            row_neg(t)
        diag.append(a[t][t])
        t += 1
    wrap = lambda x, k: IntMatrix(x, k) if x is not None else None
    return tuple(diag), wrap(U, m), wrap(Ui, m), wrap(V, n), wrap(Vi, n)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    diag, U, Ui, V, Vi = _smith(A)
    return SmithDecomposition(U=U, V=V, diag=diag, U_inv=Ui, V_inv=Vi)


def elementary_divisors(A: IntMatrix) -> tuple[int, ...]:
    return _smith(A, left=False, right=False)[0]


def rank(A: IntMatrix) -> int:
    return len(elementary_divisors(A))


def kernel_with_retraction(A: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Saturated kernel basis ``K`` and a left inverse ``R`` with ``R @ K = I``."""
    diag, _, _, V, Vi = _smith(A, left=False)
    r = len(diag)
    idx = list(range(r, A.ncols))
    return V.select_columns(idx), Vi.select_rows(idx)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    return kernel_with_retraction(A)[0]


def solve_integer(A: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """An integer solution of ``A x = b``, or None if there is none."""
    diag, U, _, V, _ = _smith(A)
    y = U.apply(b)
    x = [0] * A.ncols
    for k, d in enumerate(diag):
        if y[k] % d:
            return None
        x[k] = y[k] // d
    if any(y[len(diag):]):
        return None
    return V.apply(x)


def determinant(A: IntMatrix) -> int:
    """Fraction-free Bareiss elimination."""
    n = A.nrows
    if A.ncols != n:
        raise NotSquare(f"determinant of non-square {A.shape} matrix")
    if n == 0:
        return 1
    a = A.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class FgAbGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if any(t <= 1 for t in self.torsion):
            raise LatticeError("torsion invariants must exceed 1")
        if any(self.torsion[k + 1] % self.torsion[k] for k in range(len(self.torsion) - 1)):
            raise LatticeError("torsion invariants must form a divisibility chain")

    @classmethod
    def from_divisors(cls, rank: int, divisors: Iterable[int]) -> "FgAbGroup":
        return cls(rank, tuple(d for d in divisors if d > 1))

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class SubquotientPresentation:
    """``ker(outgoing) / im(incoming)`` with an adapted kernel basis.

    The columns of ``kernel_basis`` are ordered so that the first
    ``len(divisors)`` span the saturation of the image (column ``k`` times
    ``divisors[k]`` lies in the image) and the remaining ones project to a
    basis of the free quotient.
    """

    ambient_rank: int
    kernel_basis: IntMatrix
    image_gens: IntMatrix
    group: FgAbGroup
    divisors: tuple[int, ...] = field(repr=False)
    retraction: IntMatrix = field(repr=False)

    @property
    def image_rank(self) -> int:
        return len(self.divisors)

    @property
    def free_basis(self) -> IntMatrix:
        return self.kernel_basis.select_columns(range(self.image_rank, self.kernel_basis.ncols))

    @property
    def torsion_basis(self) -> IntMatrix:
        idx = [k for k, d in enumerate(self.divisors) if d > 1]
        return self.kernel_basis.select_columns(idx)

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a cycle ``x`` in the adapted kernel basis."""
        c = self.retraction.apply(x)
        if self.kernel_basis.apply(c) != tuple(x):
            raise NotInKernel("vector is not in the kernel lattice")
        return c

    def free_coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.coordinates(x)[self.image_rank:]

    def is_boundary(self, x: Sequence[int]) -> bool:
        c = self.coordinates(x)
        r = self.image_rank
        return not any(c[r:]) and all(c[k] % d == 0 for k, d in enumerate(self.divisors))


def homology(incoming: IntMatrix, outgoing: IntMatrix) -> SubquotientPresentation:
    """Homology at the middle of ``Z^p --incoming--> Z^n --outgoing--> Z^q``."""
    n = incoming.nrows
    if outgoing.ncols != n:
        raise LatticeError(f"incompatible shapes {incoming.shape} and {outgoing.shape}")
    if not (outgoing @ incoming).is_zero():
        raise CompositionNotZero("outgoing @ incoming is not zero")
    K, R = kernel_with_retraction(outgoing)
    # incoming columns in kernel coordinates; exact because K is saturated
    C = R @ incoming
    diag, U, Ui, _, _ = _smith(C, right=False)
    K2 = K @ Ui
    R2 = U @ R
    free = K.ncols - len(diag)
    return SubquotientPresentation(
        ambient_rank=n,
        kernel_basis=K2,
        image_gens=incoming,
        group=FgAbGroup.from_divisors(free, diag),
        divisors=diag,
        retraction=R2,
    )


def induced_map(src: SubquotientPresentation, dst: SubquotientPresentation, ambient_map: IntMatrix) -> IntMatrix:
    """Matrix of the map on free quotients induced by a chain-level map."""
    if ambient_map.shape != (dst.ambient_rank, src.ambient_rank):
        raise NotChainCompatible(f"ambient map has shape {ambient_map.shape}")
    for x in src.kernel_basis.columns():
        try:
            dst.coordinates(ambient_map.apply(x))
        except NotInKernel:
            raise NotChainCompatible("ambient map does not send cycles to cycles") from None
    for b in src.image_gens.columns():
        if not dst.is_boundary(ambient_map.apply(b)):
            raise NotChainCompatible("ambient map does not send boundaries to boundaries")
    cols = [dst.free_coordinates(ambient_map.apply(x)) for x in src.free_basis.columns()]
    return IntMatrix.from_columns(cols, dst.group.rank)


def induced_torsion_map(src: SubquotientPresentation, dst: SubquotientPresentation, ambient_map: IntMatrix) -> IntMatrix:
    """Images of the torsion generators of ``src`` in the torsion coordinates of ``dst``.

    Entry ``(s, t)`` is a residue modulo ``dst.group.torsion[s]``.
    """
    tors_idx = [k for k, d in enumerate(dst.divisors) if d > 1]
    cols = []
    for x in src.torsion_basis.columns():
        c = dst.coordinates(ambient_map.apply(x))
        cols.append([c[k] % dst.divisors[k] for k in tors_idx])
    return IntMatrix.from_columns(cols, len(tors_idx))


@dataclass(frozen=True)
class IsogenyVerdict:
    is_isogeny: bool
    cokernel_exponent: int | None
    cokernel_invariants: tuple[int, ...] = ()

    @property
    def cokernel_order(self) -> int | None:
        if not self.is_isogeny:
            return None
        out = 1
        for t in self.cokernel_invariants:
            out *= t
        return out

    def to_json(self) -> dict:
        return {
            "is_isogeny": self.is_isogeny,
            "cokernel_exponent": self.cokernel_exponent,
            "cokernel_order": self.cokernel_order,
            "cokernel_invariants": list(self.cokernel_invariants),
        }


def isogeny_verdict(f: IntMatrix) -> IsogenyVerdict:
    if f.nrows != f.ncols:
        return IsogenyVerdict(False, None)
    if f.nrows == 0:
        return IsogenyVerdict(True, 1)
    diag = elementary_divisors(f)
    if len(diag) < f.nrows:
        return IsogenyVerdict(False, None)
    return IsogenyVerdict(True, diag[-1], tuple(d for d in diag if d > 1))


@dataclass(frozen=True)
class GramVerdict:
    nondegenerate: bool
    discriminant: int


def gram_nondegenerate(P: IntMatrix) -> GramVerdict:
    if P.nrows != P.ncols:
        raise NotSquare(f"Gram matrix has shape {P.shape}")
    det = determinant(P)
    return GramVerdict(det != 0, abs(det))


def leading_minors(P: IntMatrix) -> list[int]:
    n = P.nrows
    return [determinant(P.select_rows(range(k)).select_columns(range(k))) for k in range(1, n + 1)]


def definiteness(P: IntMatrix) -> bool:
    """True iff the symmetric form ``P`` is positive definite (Sylvester)."""
    if P.nrows != P.ncols:
        raise NotSquare(f"form has shape {P.shape}")
    if P != P.T:
        raise NotSymmetric("form is not symmetric")
    return all(m > 0 for m in leading_minors(P))
