"""Combinatorial model of a strictly semi-stable special fibre.

A model lists the nonempty strata ``Y_I`` (``I`` a sorted tuple of 1-based
component labels), the free Chow lattices of each stratum together with the
hyperplane-class operator and the intersection pairings, and the unsigned
restriction and Gysin maps between strata that differ by one component.
Signs are applied later, when the complexes are assembled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from . import jsonfmt
from .checks import CheckReport
from .lattice import (
    IntMatrix,
    NotSymmetric,
    definiteness,
    determinant,
    kernel_basis,
)

SCHEMA = "tdmono/model/v1"

Subset = tuple[int, ...]


class ModelError(ValueError):
    pass


class SchemaError(ModelError):
    pass


class StructureError(ModelError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def fmt_subset(I: Subset) -> str:
    return "{" + ",".join(map(str, I)) + "}"


@dataclass(frozen=True)
class StratumChowData:
    """Graded Chow lattice ``CH^0..CH^dim`` of one (possibly disconnected) stratum.

    ``lefschetz[a]`` maps ``CH^a -> CH^(a+1)``; ``pairings[a]`` is the
    ``ranks[a] x ranks[dim-a]`` matrix of ``(x, y) -> deg(x . y)``.
    """

    dim: int
    ranks: tuple[int, ...]
    lefschetz: tuple[IntMatrix, ...]
    pairings: tuple[IntMatrix, ...]

    def rank(self, a: int) -> int:
        return self.ranks[a] if 0 <= a <= self.dim else 0

    def xi_power(self, a: int, k: int) -> IntMatrix:
        """Matrix of the k-th power of the Lefschetz operator on ``CH^a``."""
        out = IntMatrix.identity(self.rank(a))
        for b in range(a, a + k):
            if b >= self.dim:
                return IntMatrix.zeros(0, self.rank(a))
            out = self.lefschetz[b] @ out
        return out

    def to_json(self, I: Subset) -> dict:
        return {
            "I": list(I),
            "dim": self.dim,
            "ranks": list(self.ranks),
            "lefschetz": [m.tolist() for m in self.lefschetz],
            "pairings": [m.tolist() for m in self.pairings],
        }


@dataclass(frozen=True)
class IncidenceMap:
    source: Subset
    target: Subset
    degree: int
    matrix: IntMatrix


@dataclass(frozen=True)
class Flags:
    claims_conditions_bc: bool = False
    claims_ordinary: bool = False


@dataclass(frozen=True)
class DegenerationModel:
    name: str
    dimension: int
    num_components: int
    strata: dict[Subset, StratumChowData]
    restrictions: dict[tuple[Subset, Subset, int], IntMatrix] = field(default_factory=dict)
    gysins: dict[tuple[Subset, Subset, int], IntMatrix] = field(default_factory=dict)
    flags: Flags = Flags()

    def strata_of_size(self, m: int) -> list[Subset]:
        return sorted(I for I in self.strata if len(I) == m)

    def stratum_dim(self, m: int) -> int:
        return self.dimension - m + 1

    def rank(self, I: Subset, a: int) -> int:
        s = self.strata.get(I)
        return s.rank(a) if s is not None else 0

    def faces(self) -> Iterator[tuple[Subset, Subset, int]]:
        """Triples ``(I, J, s)`` with ``J = I + {s}`` both present, sorted."""
        for J in sorted(self.strata, key=lambda x: (len(x), x)):
            if len(J) < 2:
                continue
            for s in J:
                I = tuple(x for x in J if x != s)
                yield I, J, s

    def restriction(self, I: Subset, J: Subset, a: int) -> IntMatrix:
        m = self.restrictions.get((I, J, a))
        return m if m is not None else IntMatrix.zeros(self.rank(J, a), self.rank(I, a))

    def gysin(self, J: Subset, I: Subset, a: int) -> IntMatrix:
        m = self.gysins.get((J, I, a))
        return m if m is not None else IntMatrix.zeros(self.rank(I, a + 1), self.rank(J, a))

    def to_json(self) -> dict:
        order = lambda I: (len(I), I)
        return {
            "schema": SCHEMA,
            "name": self.name,
            "dimension": self.dimension,
            "num_components": self.num_components,
            "strata": [self.strata[I].to_json(I) for I in sorted(self.strata, key=order)],
            "restrictions": [
                {"from": list(I), "to": list(J), "deg": a, "matrix": m.tolist()}
                for (I, J, a), m in sorted(self.restrictions.items(), key=lambda kv: (order(kv[0][0]), kv[0][1], kv[0][2]))
            ],
            "gysin": [
                {"from": list(J), "to": list(I), "deg": a, "matrix": m.tolist()}
                for (J, I, a), m in sorted(self.gysins.items(), key=lambda kv: (order(kv[0][0]), kv[0][1], kv[0][2]))
            ],
            "flags": {
                "claims_conditions_bc": self.flags.claims_conditions_bc,
                "claims_ordinary": self.flags.claims_ordinary,
            },
        }


def serialize_model(m: DegenerationModel) -> str:
    return jsonfmt.dumps(m.to_json())


# -- parsing ---------------------------------------------------------------


def _need(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise SchemaError(f"{where}: missing field {key!r}")
    v = obj[key]
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise SchemaError(f"{where}: field {key!r} must be an integer")
    if kind is not int and not isinstance(v, kind):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}")
    return v


def _int_list(v, where: str) -> tuple[int, ...]:
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
        raise SchemaError(f"{where}: expected a list of integers")
    return tuple(v)


def _matrix(v, nrows: int, ncols: int, where: str, structural: bool = False) -> IntMatrix:
    def bad(msg: str):
        return StructureError(where, msg) if structural else SchemaError(f"{where}: {msg}")

    if not isinstance(v, list):
        raise bad("matrix must be a list of rows")
    if nrows == 0 and v == []:
        return IntMatrix.zeros(0, ncols)
    if len(v) != nrows:
        raise bad(f"matrix has {len(v)} rows, expected {nrows}")
    rows = [_int_list(r, where) for r in v]
    for r in rows:
        if len(r) != ncols:
            raise bad(f"matrix row has {len(r)} entries, expected {ncols}")
    return IntMatrix(rows, ncols)


def parse_model(text: bytes | str) -> DegenerationModel:
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object")
    if obj.get("schema") != SCHEMA:
        raise SchemaError(f"schema must be {SCHEMA!r}")
    name = _need(obj, "name", str, "model")
    d = _need(obj, "dimension", int, "model")
    n = _need(obj, "num_components", int, "model")
    if d < 0 or n < 1:
        raise SchemaError("model: dimension must be >= 0 and num_components >= 1")

    strata: dict[Subset, StratumChowData] = {}
    for k, s in enumerate(_need(obj, "strata", list, "model")):
        where = f"strata[{k}]"
        if not isinstance(s, dict):
            raise SchemaError(f"{where}: must be an object")
        I = _int_list(_need(s, "I", list, where), where + ".I")
        where = f"stratum {fmt_subset(I)}"
        if list(I) != sorted(set(I)) or not I or I[0] < 1 or I[-1] > n:
            raise StructureError(where, "index set must be nonempty, strictly ascending, within 1..num_components")
        if I in strata:
            raise StructureError(where, "duplicate stratum")
        dim = _need(s, "dim", int, where)
        ranks = _int_list(_need(s, "ranks", list, where), where + ".ranks")
        if dim < 0 or len(ranks) != dim + 1 or any(r < 0 for r in ranks):
            raise SchemaError(f"{where}: ranks must list dim+1 nonnegative integers")
        lef = _need(s, "lefschetz", list, where)
        pai = _need(s, "pairings", list, where)
        if len(lef) != dim:
            raise SchemaError(f"{where}: expected {dim} Lefschetz matrices")
        if len(pai) != dim + 1:
            raise SchemaError(f"{where}: expected {dim + 1} pairing matrices")
        L = tuple(_matrix(lef[a], ranks[a + 1], ranks[a], f"{where}.lefschetz[{a}]") for a in range(dim))
        P = tuple(_matrix(pai[a], ranks[a], ranks[dim - a], f"{where}.pairings[{a}]") for a in range(dim + 1))
        strata[I] = StratumChowData(dim, ranks, L, P)

    for I, s in strata.items():
        where = f"stratum {fmt_subset(I)}"
        if not 1 <= len(I) <= d + 1:
            raise StructureError(where, f"at most {d + 1} components can meet")
        if s.dim != d - len(I) + 1:
            raise StructureError(where, f"dimension must be {d - len(I) + 1}")
        if s.ranks[0] < 1:
            raise StructureError(where, "CH^0 must have rank >= 1")
        for r in range(1, len(I)):
            for sub in combinations(I, r):
                if sub not in strata:
                    raise StructureError(where, f"face {fmt_subset(sub)} missing (downward closure)")
    for i in range(1, n + 1):
        if (i,) not in strata:
            raise StructureError(f"stratum {{{i}}}", "every component must be present")

    def incidence(kind: str, entries) -> dict:
        out = {}
        for k, e in enumerate(entries):
            where = f"{kind}[{k}]"
            if not isinstance(e, dict):
                raise SchemaError(f"{where}: must be an object")
            src = _int_list(_need(e, "from", list, where), where)
            dst = _int_list(_need(e, "to", list, where), where)
            a = _need(e, "deg", int, where)
            where = f"{kind} {fmt_subset(src)}->{fmt_subset(dst)} deg {a}"
            if src not in strata or dst not in strata:
                raise StructureError(where, "endpoint stratum not present")
            if kind == "restrictions":
                ok = len(dst) == len(src) + 1 and set(src) < set(dst)
                shape = (strata[dst].rank(a), strata[src].rank(a))
                valid_deg = 0 <= a <= strata[dst].dim
            else:
                ok = len(src) == len(dst) + 1 and set(dst) < set(src)
                shape = (strata[dst].rank(a + 1), strata[src].rank(a))
                valid_deg = 0 <= a <= strata[src].dim
            if not ok:
                raise StructureError(where, "strata must differ by exactly one component")
            if not valid_deg:
                raise StructureError(where, "degree out of range")
            key = (src, dst, a)
            if key in out:
                raise StructureError(where, "duplicate entry")
            out[key] = _matrix(_need(e, "matrix", list, where), *shape, where, structural=True)
        return out

    restrictions = incidence("restrictions", _need(obj, "restrictions", list, "model"))
    gysins = incidence("gysin", _need(obj, "gysin", list, "model"))
    fl = _need(obj, "flags", dict, "model")
    flags = Flags(
        claims_conditions_bc=bool(_need(fl, "claims_conditions_bc", bool, "flags")),
        claims_ordinary=bool(_need(fl, "claims_ordinary", bool, "flags")),
    )
    return DegenerationModel(name, d, n, strata, restrictions, gysins, flags)


# -- validators --------------------------------------------------------------


def validate_structure(m: DegenerationModel) -> CheckReport:
    rep = CheckReport("structure")
    d = m.dimension
    for I, s in sorted(m.strata.items()):
        loc = fmt_subset(I)
        if list(I) != sorted(set(I)) or not 1 <= len(I) <= d + 1:
            rep.fail("index-set", loc, "index set must be ascending with 1 <= |I| <= d+1")
            continue
        if s.dim != d - len(I) + 1:
            rep.fail("dimension-formula", loc, f"dimension {s.dim}, expected {d - len(I) + 1}")
            continue
        if len(s.ranks) != s.dim + 1 or s.ranks[0] < 1:
            rep.fail("ranks", loc, "ranks must have dim+1 entries with ranks[0] >= 1")
            continue
        for r in range(1, len(I)):
            for sub in combinations(I, r):
                if sub not in m.strata:
                    rep.fail("downward-closure", loc, f"face {fmt_subset(sub)} missing")
        shapes_ok = len(s.lefschetz) == s.dim and len(s.pairings) == s.dim + 1
        shapes_ok = shapes_ok and all(L.shape == (s.ranks[a + 1], s.ranks[a]) for a, L in enumerate(s.lefschetz))
        shapes_ok = shapes_ok and all(P.shape == (s.ranks[a], s.ranks[s.dim - a]) for a, P in enumerate(s.pairings))
        if not shapes_ok:
            rep.fail("shape", loc, "Lefschetz or pairing matrices have the wrong shape")
            continue
        for a in range(s.dim + 1):
            if s.pairings[a] != s.pairings[s.dim - a].T:
                rep.fail("pairing-asymmetry", loc, f"pairing P_{a} is not the transpose of P_{s.dim - a}")
        for a in range(s.dim):
            lhs = s.lefschetz[a].T @ s.pairings[a + 1]
            rhs = s.pairings[a] @ s.lefschetz[s.dim - a - 1]
            if lhs != rhs:
                rep.fail("lefschetz-not-self-adjoint", loc, f"(xi x, y) != (x, xi y) on CH^{a} x CH^{s.dim - a - 1}")
    for I, J, s in m.faces():
        if I not in m.strata:
            continue
        dJ = m.strata[J].dim
        for a in range(dJ + 1):
            loc = f"{fmt_subset(I)}->{fmt_subset(J)} deg {a}"
            shape = (m.rank(J, a), m.rank(I, a))
            R = m.restrictions.get((I, J, a))
            if R is None and 0 not in shape:
                rep.fail("missing-restriction", loc, "restriction map not supplied", [list(I), list(J), a])
            elif R is not None and R.shape != shape:
                rep.fail("shape", loc, f"restriction has shape {R.shape}, expected {shape}")
            loc = f"{fmt_subset(J)}->{fmt_subset(I)} deg {a}"
            shape = (m.rank(I, a + 1), m.rank(J, a))
            G = m.gysins.get((J, I, a))
            if G is None and 0 not in shape:
                rep.fail("missing-gysin", loc, "Gysin map not supplied", [list(J), list(I), a])
            elif G is not None and G.shape != shape:
                rep.fail("shape", loc, f"Gysin map has shape {G.shape}, expected {shape}")
    return rep


def check_hard_lefschetz(m: DegenerationModel) -> CheckReport:
    rep = CheckReport("hard-lefschetz")
    for I, s in sorted(m.strata.items()):
        loc = fmt_subset(I)
        dets = {}
        for i in range(s.dim // 2 + 1):
            if s.rank(i) != s.rank(s.dim - i):
                rep.fail("rank-mismatch", loc, f"rank CH^{i} = {s.rank(i)} but rank CH^{s.dim - i} = {s.rank(s.dim - i)}")
                continue
            det = determinant(s.xi_power(i, s.dim - 2 * i))
            dets[str(i)] = det
            if det == 0:
                rep.fail("lefschetz-degenerate", loc, f"xi^{s.dim - 2 * i}: CH^{i} -> CH^{s.dim - i} is not injective")
        rep.details[loc] = dets
    return rep


def hodge_index_gram(s: StratumChowData, i: int) -> IntMatrix:
    """Gram matrix of ``(-1)^i deg(x . xi^(d-2i) y)`` on primitive classes of ``CH^i``."""
    K = kernel_basis(s.xi_power(i, s.dim - 2 * i + 1))
    form = s.pairings[i] @ s.xi_power(i, s.dim - 2 * i)
    return (K.T @ form @ K).scale((-1) ** i)


def check_hodge_index(m: DegenerationModel) -> CheckReport:
    rep = CheckReport("hodge-index")
    lef = check_hard_lefschetz(m)
    bad = {f.location for f in lef.failures}
    for I, s in sorted(m.strata.items()):
        loc = fmt_subset(I)
        if loc in bad:
            rep.fail("hard-lefschetz-prerequisite", loc, "hard Lefschetz fails; index not evaluated")
            continue
        for i in range(s.dim // 2 + 1):
            G = hodge_index_gram(s, i)
            try:
                ok = definiteness(G)
            except NotSymmetric:
                rep.fail("gram-not-symmetric", loc, f"Gram matrix on primitive CH^{i} is not symmetric", G.tolist())
                continue
            if not ok:
                rep.fail("hodge-index", loc, f"form on primitive CH^{i} is not positive definite", G.tolist())
    return rep


def check_adjointness(m: DegenerationModel) -> CheckReport:
    """Projection formula ``(rho^* x, y)_J = (x, rho_* y)_I`` on every face."""
    rep = CheckReport("adjointness")
    for I, J, s in m.faces():
        if I not in m.strata:
            continue
        SI, SJ = m.strata[I], m.strata[J]
        for a in range(SJ.dim + 1):
            b = SJ.dim - a
            R = m.restriction(I, J, a)
            G = m.gysin(J, I, b)
            lhs = R.T @ SJ.pairings[a]
            rhs = SI.pairings[a] @ G
            if lhs != rhs:
                rep.fail(
                    "projection-formula",
                    f"{fmt_subset(I)}<->{fmt_subset(J)} deg {a}",
                    f"restriction on CH^{a} is not adjoint to Gysin on CH^{b}",
                )
    return rep


def validate_all(m: DegenerationModel) -> list[CheckReport]:
    """Structure first; the numerical checks only run on a structurally sound model."""
    st = validate_structure(m)
    if not st.passed:
        return [st]
    return [st, check_hard_lefschetz(m), check_hodge_index(m), check_adjointness(m)]
