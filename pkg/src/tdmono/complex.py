"""Bigraded Chow complexes, their monodromy operator and pairings.

Cell ``(i, j)`` is the direct sum over ``k = max(0, i) .. i + j`` of
``CH^(i+j-k)`` of the disjoint union of the strata with ``2k - i + 1``
components. Inside a cell the summands are ordered by ``k``, then the
strata lexicographically, then the stratum's own basis; every matrix
below is written in that order.

Differential ``D = d' + d''``: ``d'`` is the alternating sum of
restrictions (summand ``k`` to summand ``k + 1`` of the next cell), ``d''``
the alternating sum of Gysin maps (summand ``k`` to summand ``k``). The
face sign is taken from the position ``r`` (1-based) of the inserted or
deleted label in the larger ascending index set: ``(-1)^(r-1)`` for
restrictions and ``(-1)^r`` for Gysin maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

from .checks import CheckReport
from .lattice import (
    FgAbGroup,
    GramVerdict,
    IntMatrix,
    IsogenyVerdict,
    SubquotientPresentation,
    gram_nondegenerate,
    homology,
    induced_map,
    isogeny_verdict,
)
from .model import DegenerationModel, Subset, fmt_subset

Cell = tuple[int, int]


class MissingIncidence(KeyError):
    pass


@dataclass(frozen=True)
class Summand:
    k: int
    stratum_size: int
    chow_degree: int
    offset: int
    width: int
    strata: tuple[tuple[Subset, int, int], ...]  # (I, offset inside summand, rank)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "stratum_size": self.stratum_size,
            "chow_degree": self.chow_degree,
            "offset": self.offset,
            "width": self.width,
        }


@dataclass(frozen=True)
class CellLayout:
    i: int
    j: int
    summands: tuple[Summand, ...]

    @property
    def rank(self) -> int:
        return sum(s.width for s in self.summands)

    def summand(self, k: int) -> Summand | None:
        for s in self.summands:
            if s.k == k:
                return s
        return None


def in_support(d: int, i: int, j: int) -> bool:
    return -d <= i <= d and -i <= j <= d - i


def support(d: int) -> list[Cell]:
    return [(i, j) for i in range(-d, d + 1) for j in range(-i, d - i + 1)]


def _space(m: DegenerationModel, size: int, a: int) -> tuple[tuple[tuple[Subset, int, int], ...], int]:
    out, off = [], 0
    for I in m.strata_of_size(size):
        r = m.rank(I, a)
        out.append((I, off, r))
        off += r
    return tuple(out), off


def _cell_layout(m: DegenerationModel, i: int, j: int) -> CellLayout:
    d = m.dimension
    summands, off = [], 0
    if in_support(d, i, j):
        for k in range(max(0, i), i + j + 1):
            size, a = 2 * k - i + 1, i + j - k
            if not 1 <= size <= d + 1 or not 0 <= a <= d - size + 1:
                continue
            strata, width = _space(m, size, a)
            summands.append(Summand(k, size, a, off, width, strata))
            off += width
    return CellLayout(i, j, tuple(summands))


class _Builder:
    def __init__(self, nrows: int, ncols: int):
        self.rows = [[0] * ncols for _ in range(nrows)]
        self.ncols = ncols

    def add(self, r0: int, c0: int, block: IntMatrix, sign: int = 1) -> None:
        for r, row in enumerate(block.rows):
            target = self.rows[r0 + r]
            for c, x in enumerate(row):
                if x:
                    target[c0 + c] += sign * x

    def build(self) -> IntMatrix:
        return IntMatrix(self.rows, self.ncols)


def theta(m: DegenerationModel, a: int, size: int) -> IntMatrix:
    """Signed restriction ``CH^a(Y^(size)) -> CH^a(Y^(size+1))``."""
    src, ns = _space(m, size, a)
    dst, nd = _space(m, size + 1, a)
    pos = {I: off for I, off, _ in src}
    b = _Builder(nd, ns)
    for J, roff, rk in dst:
        for r, label in enumerate(J, start=1):
            I = tuple(x for x in J if x != label)
            if I not in pos:
                continue
            key = (I, J, a)
            if key not in m.restrictions:
                if rk and m.rank(I, a):
                    raise MissingIncidence(f"restriction {fmt_subset(I)}->{fmt_subset(J)} deg {a}")
                continue
            b.add(roff, pos[I], m.restrictions[key], (-1) ** (r - 1))
    return b.build()


def delta(m: DegenerationModel, a: int, size: int) -> IntMatrix:
    """Signed Gysin map ``CH^a(Y^(size+1)) -> CH^(a+1)(Y^(size))``."""
    src, ns = _space(m, size + 1, a)
    dst, nd = _space(m, size, a + 1)
    pos = {I: off for I, off, _ in dst}
    b = _Builder(nd, ns)
    for J, coff, rk in src:
        for r, label in enumerate(J, start=1):
            I = tuple(x for x in J if x != label)
            if I not in pos:
                continue
            key = (J, I, a)
            if key not in m.gysins:
                if rk and m.rank(I, a + 1):
                    raise MissingIncidence(f"gysin {fmt_subset(J)}->{fmt_subset(I)} deg {a}")
                continue
            b.add(pos[I], coff, m.gysins[key], (-1) ** r)
    return b.build()


@dataclass(frozen=True)
class ChowComplex:
    model: DegenerationModel
    cells: dict[Cell, CellLayout]
    D: dict[Cell, IntMatrix] = field(default_factory=dict)
    N: dict[Cell, IntMatrix] = field(default_factory=dict)
    Q: dict[Cell, IntMatrix] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.model.dimension

    def layout(self, i: int, j: int) -> CellLayout:
        c = self.cells.get((i, j))
        return c if c is not None else CellLayout(i, j, ())

    def rank(self, i: int, j: int) -> int:
        return self.layout(i, j).rank

    def differential(self, i: int, j: int) -> IntMatrix:
        """``D^i_j : C^i_j -> C^(i+1)_j`` (zero outside the support)."""
        if (i, j) in self.D:
            return self.D[(i, j)]
        return IntMatrix.zeros(self.rank(i + 1, j), self.rank(i, j))

    def monodromy(self, i: int, j: int) -> IntMatrix:
        """``N : C^i_j -> C^(i+2)_(j-1)``."""
        if (i, j) in self.N:
            return self.N[(i, j)]
        return IntMatrix.zeros(self.rank(i + 2, j - 1), self.rank(i, j))

    def monodromy_power(self, i: int, j: int) -> IntMatrix:
        """Chain-level ``N^i : C^(-i)_(j+i) -> C^i_j`` for ``i >= 0``."""
        out = IntMatrix.identity(self.rank(-i, j + i))
        for t in range(i):
            out = self.monodromy(-i + 2 * t, j + i - t) @ out
        return out

    def pairing(self, i: int, j: int) -> IntMatrix:
        """``Q^i_j`` on ``C^i_j x C^(-i)_(d-j)``."""
        if (i, j) in self.Q:
            return self.Q[(i, j)]
        return IntMatrix.zeros(self.rank(i, j), self.rank(-i, self.dimension - j))


def build_cells(m: DegenerationModel) -> ChowComplex:
    cells = {(i, j): _cell_layout(m, i, j) for (i, j) in support(m.dimension)}
    return ChowComplex(m, cells)


def assemble_differential(m: DegenerationModel, cx: ChowComplex) -> ChowComplex:
    thetas: dict[tuple[int, int], IntMatrix] = {}
    deltas: dict[tuple[int, int], IntMatrix] = {}
    D = {}
    for (i, j), src in cx.cells.items():
        dst = cx.layout(i + 1, j)
        b = _Builder(dst.rank, src.rank)
        for s in src.summands:
            t = dst.summand(s.k + 1)
            if t is not None and t.stratum_size == s.stratum_size + 1:
                key = (s.chow_degree, s.stratum_size)
                if key not in thetas:
                    thetas[key] = theta(m, *key)
                b.add(t.offset, s.offset, thetas[key])
            t = dst.summand(s.k)
            if t is not None and t.stratum_size == s.stratum_size - 1:
                key = (s.chow_degree, s.stratum_size - 1)
                if key not in deltas:
                    deltas[key] = delta(m, *key)
                b.add(t.offset, s.offset, deltas[key])
        D[(i, j)] = b.build()
    return replace(cx, D=D)


def assemble_monodromy(m: DegenerationModel, cx: ChowComplex) -> ChowComplex:
    N = {}
    for (i, j), src in cx.cells.items():
        dst = cx.layout(i + 2, j - 1)
        b = _Builder(dst.rank, src.rank)
        for s in src.summands:
            t = dst.summand(s.k + 1)
            if t is not None:
                b.add(t.offset, s.offset, IntMatrix.identity(s.width))
        N[(i, j)] = b.build()
    return replace(cx, N=N)


def assemble_pairing(m: DegenerationModel, cx: ChowComplex) -> ChowComplex:
    d = m.dimension
    Q = {}
    for (i, j), src in cx.cells.items():
        dual = cx.layout(-i, d - j)
        b = _Builder(src.rank, dual.rank)
        sign = (-1) ** (i + j)
        for s in src.summands:
            t = dual.summand(s.k - i)
            if t is None:
                continue
            cols = {I: off for I, off, _ in t.strata}
            for I, off, _ in s.strata:
                b.add(s.offset + off, t.offset + cols[I], m.strata[I].pairings[s.chow_degree], sign)
        Q[(i, j)] = b.build()
    return replace(cx, Q=Q)


def chow_complex(m: DegenerationModel) -> ChowComplex:
    cx = build_cells(m)
    cx = assemble_differential(m, cx)
    cx = assemble_monodromy(m, cx)
    return assemble_pairing(m, cx)


def check_chain_identities(cx: ChowComplex) -> CheckReport:
    rep = CheckReport("chain-identities")
    m, d = cx.model, cx.dimension
    counts = dict.fromkeys(["dd", "theta-theta", "delta-delta", "anticommutator", "N-commutes", "adjoint", "N-power"], 0)

    for (i, j) in cx.cells:
        if not (cx.differential(i, j) @ cx.differential(i - 1, j)).is_zero():
            rep.fail("dd", f"C^{i}_{j}", "D^i_j D^(i-1)_j != 0")
        counts["dd"] += 1
        lhs = cx.monodromy(i + 1, j) @ cx.differential(i, j)
        rhs = cx.differential(i + 2, j - 1) @ cx.monodromy(i, j)
        if lhs != rhs:
            rep.fail("N-commutes", f"C^{i}_{j}", "N D != D N")
        counts["N-commutes"] += 1
        lhs = cx.differential(i, j).T @ cx.pairing(i + 1, j)
        rhs = cx.pairing(i, j) @ cx.differential(-i - 1, d - j)
        if lhs != rhs:
            rep.fail("adjoint", f"C^{i}_{j}", "(Dx, y) != (x, Dy)")
        counts["adjoint"] += 1
        if i >= 0 and in_support(d, -i, j + i):
            P = cx.monodromy_power(i, j)
            if P != IntMatrix.identity(cx.rank(i, j)) or P.shape != (cx.rank(i, j), cx.rank(-i, j + i)):
                rep.fail("N-power", f"C^{i}_{j}", "N^i : C^(-i)_(j+i) -> C^i_j is not the identity")
            counts["N-power"] += 1

    for size in range(1, d + 2):
        for a in range(0, d - size + 2):
            loc = f"CH^{a}(Y^({size}))"
            T1 = theta(m, a, size)
            if size + 1 <= d + 1:
                if not (theta(m, a, size + 1) @ T1).is_zero():
                    rep.fail("theta-theta", loc, "theta o theta != 0")
                counts["theta-theta"] += 1
            if size >= 2:
                # delta_{a+1,size-1} o delta_{a,size} on CH^a(Y^(size+1))
                if not (delta(m, a + 1, size - 1) @ delta(m, a, size)).is_zero():
                    rep.fail("delta-delta", f"CH^{a}(Y^({size + 1}))", "delta o delta != 0")
                counts["delta-delta"] += 1
            # theta_{a+1,size} delta_{a,size} + delta_{a,size+1} theta_{a,size+1} on CH^a(Y^(size+1))
            ac = theta(m, a + 1, size) @ delta(m, a, size) + delta(m, a, size + 1) @ theta(m, a, size + 1)
            if not ac.is_zero():
                rep.fail("anticommutator", f"CH^{a}(Y^({size + 1}))", "theta delta + delta theta != 0")
            counts["anticommutator"] += 1
    rep.details["identities_checked"] = counts
    return rep


@dataclass(frozen=True)
class HomologyTable:
    complex: ChowComplex
    groups: dict[Cell, SubquotientPresentation]

    @property
    def dimension(self) -> int:
        return self.complex.dimension

    def rank(self, i: int, j: int) -> int:
        g = self.groups.get((i, j))
        return g.group.rank if g is not None else 0

    def group(self, i: int, j: int) -> FgAbGroup:
        g = self.groups.get((i, j))
        return g.group if g is not None else FgAbGroup(0)

    def presentation(self, i: int, j: int) -> SubquotientPresentation:
        g = self.groups.get((i, j))
        if g is None:
            g = homology(IntMatrix.zeros(0, 0), IntMatrix.zeros(0, 0))
        return g

    def monodromy(self, i: int, j: int) -> IntMatrix:
        """Induced ``N : T^i_j -> T^(i+2)_(j-1)`` on free quotients."""
        return induced_map(self.presentation(i, j), self.presentation(i + 2, j - 1), self.complex.monodromy(i, j))

    def monodromy_power(self, i: int, j: int) -> IntMatrix:
        """Induced ``N^i : T^(-i)_(j+i) -> T^i_j`` on free quotients."""
        return induced_map(self.presentation(-i, j + i), self.presentation(i, j), self.complex.monodromy_power(i, j))

    def pairing(self, i: int, j: int) -> IntMatrix:
        """Gram matrix of the induced pairing ``T^i_j x T^(-i)_(d-j)``."""
        d = self.dimension
        A = self.presentation(i, j).free_basis
        B = self.presentation(-i, d - j).free_basis
        return A.T @ self.complex.pairing(i, j) @ B

    @cached_property
    def cells(self) -> list[Cell]:
        return sorted(self.groups)


def homology_table(cx: ChowComplex) -> HomologyTable:
    groups = {}
    for (i, j) in sorted(cx.cells):
        groups[(i, j)] = homology(cx.differential(i - 1, j), cx.differential(i, j))
    return HomologyTable(cx, groups)


@dataclass(frozen=True)
class IsogenyCertificate:
    i: int
    j: int
    matrix: IntMatrix
    verdict: IsogenyVerdict

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "source": [-self.i, self.j + self.i], "target": [self.i, self.j],
                "matrix": self.matrix.tolist(), **self.verdict.to_json()}


@dataclass(frozen=True)
class PairingCertificate:
    i: int
    j: int
    gram: IntMatrix
    verdict: GramVerdict

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "gram": self.gram.tolist(),
                "nondegenerate": self.verdict.nondegenerate, "discriminant": self.verdict.discriminant}


@dataclass(frozen=True)
class Prop1Report:
    isogenies: tuple[IsogenyCertificate, ...]
    pairings: tuple[PairingCertificate, ...]

    @property
    def passed(self) -> bool:
        return all(c.verdict.is_isogeny for c in self.isogenies) and all(
            c.verdict.nondegenerate for c in self.pairings
        )

    def isogeny(self, i: int, j: int) -> IsogenyCertificate:
        for c in self.isogenies:
            if (c.i, c.j) == (i, j):
                return c
        raise KeyError((i, j))

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "isogenies": [c.to_json() for c in self.isogenies],
            "pairings": [c.to_json() for c in self.pairings],
        }


def verify_proposition1(ht: HomologyTable) -> Prop1Report:
    d = ht.dimension
    isos, pairs = [], []
    for i in range(0, d + 1):
        for j in range(-i, d - i + 1):
            if not in_support(d, i, j) or not in_support(d, -i, j + i):
                continue
            f = ht.monodromy_power(i, j)
            isos.append(IsogenyCertificate(i, j, f, isogeny_verdict(f)))
    for (i, j) in ht.cells:
        G = ht.pairing(i, j)
        if G.nrows != G.ncols:
            verdict = GramVerdict(False, 0)
        else:
            verdict = gram_nondegenerate(G)
        pairs.append(PairingCertificate(i, j, G, verdict))
    return Prop1Report(tuple(isos), tuple(pairs))
