"""Chow rings of smooth complete toric varieties.

``CH^k`` is generated by the orbit closures ``V(sigma)`` of the
``k``-dimensional cones, modulo the character relations
``sum_{sigma > tau} <u, v_(sigma - tau)> [V(sigma)] = 0`` for every cone
``tau`` of dimension ``k - 1`` and every ``u`` in ``tau^perp``. When the
orbit closures happen to contain a basis of the quotient it is used (in
cone order), which keeps the intersection forms readable; otherwise the
Smith-form basis is used.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

from .checks import CheckReport
from .lattice import IntMatrix, _smith, determinant, kernel_basis, rank, solve_integer
from .model import StratumChowData

FAN_SCHEMA = "tdmono/fan/v1"

Cone = tuple[int, ...]


class ToricError(ValueError):
    pass


class TorsionInToricChow(ToricError):
    pass


class NotAmple(ToricError):
    pass


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[Cone, ...]  # nonempty cones, each a sorted tuple of ray indices

    @classmethod
    def from_maximal(cls, rank: int, rays, maximal) -> "Fan":
        cones = set()
        for c in maximal:
            c = tuple(sorted(c))
            for r in range(1, len(c) + 1):
                cones.update(combinations(c, r))
        return cls(rank, tuple(tuple(r) for r in rays), tuple(sorted(cones, key=lambda c: (len(c), c))))

    @property
    def cone_set(self) -> frozenset[Cone]:
        return frozenset(self.cones) | {()}

    def cones_of_dim(self, k: int) -> list[Cone]:
        if k == 0:
            return [()]
        return sorted(c for c in self.cones if len(c) == k)

    def maximal_cones(self) -> list[Cone]:
        cs = set(self.cones)
        return sorted(
            (c for c in cs if not any(set(c) < set(o) for o in cs)), key=lambda c: (len(c), c)
        )

    def ray_matrix(self, cone: Cone) -> IntMatrix:
        return IntMatrix([self.rays[r] for r in cone], self.rank)

    def to_json(self) -> dict:
        return {"schema": FAN_SCHEMA, "rank": self.rank, "rays": [list(r) for r in self.rays],
                "cones": [list(c) for c in self.cones]}


def parse_fan(text: str | bytes) -> Fan:
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ToricError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict) or obj.get("schema", FAN_SCHEMA) != FAN_SCHEMA:
        raise ToricError(f"expected a {FAN_SCHEMA} object")
    try:
        n = int(obj["rank"])
        rays = tuple(tuple(int(x) for x in r) for r in obj["rays"])
        cones = tuple(sorted({tuple(sorted(int(x) for x in c)) for c in obj["cones"] if c}, key=lambda c: (len(c), c)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ToricError(f"bad fan description: {exc}") from None
    if any(len(r) != n for r in rays):
        raise ToricError("every ray must have `rank` coordinates")
    if any(x < 0 or x >= len(rays) for c in cones for x in c):
        raise ToricError("cone refers to an unknown ray")
    return Fan(n, rays, cones)


def _inside_count(fan: Fan, point: tuple[int, ...]) -> int:
    """Number of maximal cones containing ``point`` in their interior."""
    count = 0
    for c in fan.maximal_cones():
        if len(c) != fan.rank:
            continue
        B = fan.ray_matrix(c).T  # columns are rays
        det = determinant(B)
        if det == 0:
            continue
        # Cramer's rule
        lam = []
        for k in range(fan.rank):
            cols = [list(B.col(t)) if t != k else list(point) for t in range(fan.rank)]
            lam.append(Fraction(determinant(IntMatrix.from_columns(cols, fan.rank)), det))
        count += all(x > 0 for x in lam)
    return count


def validate_fan(fan: Fan) -> CheckReport:
    rep = CheckReport("fan")
    n = fan.rank
    for k, r in enumerate(fan.rays):
        g = 0
        for x in r:
            g = gcd(g, x)
        if g != 1:
            rep.fail("ray-not-primitive", f"ray {k}", f"{list(r)} is not a primitive nonzero vector")
    cs = fan.cone_set
    for c in fan.cones:
        if len(c) > n:
            rep.fail("cone-too-large", f"cone {list(c)}", "more rays than the lattice rank")
            continue
        for r in range(1, len(c)):
            for f in combinations(c, r):
                if f not in cs:
                    rep.fail("face-closure", f"cone {list(c)}", f"face {list(f)} missing")
        A = fan.ray_matrix(c)
        diag = _smith(A, left=False, right=False)[0]
        if len(diag) != len(c) or any(d != 1 for d in diag):
            rep.fail("not-smooth", f"cone {list(c)}", "rays are not part of a lattice basis")
    if not rep.passed:
        return rep
    maxi = fan.maximal_cones()
    for c in maxi:
        if len(c) != n:
            rep.fail("incomplete", f"cone {list(c)}", f"maximal cone of dimension {len(c)} < {n}")
    if n == 0:
        return rep
    for tau in fan.cones_of_dim(n - 1):
        around = [c for c in maxi if len(c) == n and set(tau) < set(c)]
        if len(around) != 2:
            rep.fail("incomplete", f"cone {list(tau)}", f"wall lies in {len(around)} maximal cones, expected 2")
            continue
        normal = kernel_basis(fan.ray_matrix(tau)).col(0) if n > 1 else (1,)
        sides = []
        for c in around:
            (extra,) = set(c) - set(tau)
            sides.append(sum(a * b for a, b in zip(normal, fan.rays[extra])))
        if sides[0] * sides[1] >= 0:
            rep.fail("overlap", f"cone {list(tau)}", "the two cones on this wall lie on the same side")
    if rep.passed:
        probe = tuple(1000003 ** k + 17 * k for k in range(n))
        hits = _inside_count(fan, probe)
        if hits != 1:
            rep.fail("incomplete", "fan", f"generic vector lies in {hits} maximal cones, expected 1")
    return rep


@dataclass(frozen=True)
class ToricChow:
    fan: Fan
    generators: tuple[tuple[Cone, ...], ...]
    projections: tuple[IntMatrix, ...]  # CH^k basis coordinates of each generator
    basis: tuple[tuple[tuple[int, ...], ...], ...]  # basis cycles as generator combinations

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(p.nrows for p in self.projections)

    def basis_cones(self, k: int) -> list[Cone] | None:
        """The orbit closures forming the basis of ``CH^k``, if the basis is of that form."""
        out = []
        for vec in self.basis[k]:
            nz = [t for t, x in enumerate(vec) if x]
            if len(nz) != 1 or vec[nz[0]] != 1:
                return None
            out.append(self.generators[k][nz[0]])
        return out


def _unimodular_inverse(M: IntMatrix) -> IntMatrix:
    diag, U, _, V, _ = _smith(M)
    if len(diag) != M.nrows or any(d != 1 for d in diag):
        raise ToricError("matrix is not unimodular")
    return V @ U


def chow_from_fan(fan: Fan) -> ToricChow:
    n = fan.rank
    gens, projs, bases = [], [], []
    for k in range(n + 1):
        g = fan.cones_of_dim(k)
        index = {c: t for t, c in enumerate(g)}
        rel = []
        for tau in fan.cones_of_dim(k - 1) if k else []:
            if tau:
                U = kernel_basis(fan.ray_matrix(tau))
                us = U.columns()
            else:
                us = [tuple(int(a == b) for b in range(n)) for a in range(n)]
            for u in us:
                row = [0] * len(g)
                for c in g:
                    if set(tau) < set(c):
                        (extra,) = set(c) - set(tau)
                        row[index[c]] = sum(a * b for a, b in zip(u, fan.rays[extra]))
                rel.append(row)
        R = IntMatrix(rel, len(g))
        diag, _, _, V, Vi = _smith(R, left=False)
        if any(d != 1 for d in diag):
            raise TorsionInToricChow(f"CH^{k} has torsion {[d for d in diag if d > 1]}")
        r = len(diag)
        # relations span the rows of D V^-1, so x -> (V^T x)[r:] is the quotient map
        pi = V.select_columns(range(r, len(g))).T
        section = [Vi.row(t) for t in range(r, len(g))]
        # prefer a basis of orbit closures, taken greedily in cone order
        chosen = []
        for t in range(len(g)):
            trial = chosen + [t]
            if rank(pi.select_columns(trial)) == len(trial):
                chosen = trial
        M = pi.select_columns(chosen)
        if len(chosen) == pi.nrows and abs(determinant(M)) == 1:
            pi = _unimodular_inverse(M) @ pi
            section = [tuple(int(s == t) for s in range(len(g))) for t in chosen]
        gens.append(tuple(g))
        projs.append(pi)
        bases.append(tuple(section))
    top = projs[n]
    if top.nrows != 1:
        raise ToricError(f"CH^{n} has rank {top.nrows}, expected 1")
    values = set(top.row(0))
    if len(values) != 1:
        raise ToricError("classes of the torus-fixed points are not all equal")
    if values == {-1}:
        projs[n] = -top
        bases[n] = tuple(tuple(-x for x in b) for b in bases[n])
    return ToricChow(fan, tuple(gens), tuple(projs), tuple(bases))


def class_of_cone(fan: Fan, tc: ToricChow, cone: Cone) -> tuple[int, ...]:
    cone = tuple(sorted(cone))
    k = len(cone)
    t = tc.generators[k].index(cone)
    return tc.projections[k].col(t)


def _divisor_times_orbit(fan: Fan, ray: int, cone: Cone) -> dict[Cone, int]:
    cs = fan.cone_set
    if ray not in cone:
        gamma = tuple(sorted(cone + (ray,)))
        return {gamma: 1} if gamma in cs else {}
    # move D_ray off the cone with a character u: <u, ray> = 1, <u, others in cone> = 0
    A = fan.ray_matrix(cone)
    u = solve_integer(A, [int(r == ray) for r in cone])
    if u is None:
        raise ToricError(f"cone {list(cone)} is not smooth")
    out: dict[Cone, int] = {}
    for tau, v in enumerate(fan.rays):
        if tau in cone:
            continue
        coef = -sum(a * b for a, b in zip(u, v))
        if coef:
            gamma = tuple(sorted(cone + (tau,)))
            if gamma in cs:
                out[gamma] = out.get(gamma, 0) + coef
    return out


def divisor_action(fan: Fan, tc: ToricChow, ray: int, c, k: int) -> tuple[int, ...]:
    """``[D_ray] . c`` for a class ``c`` of ``CH^k`` given in basis coordinates."""
    n = fan.rank
    if k + 1 > n:
        return ()
    cycle = [0] * len(tc.generators[k])
    for coef, vec in zip(c, tc.basis[k]):
        if coef:
            for t, x in enumerate(vec):
                cycle[t] += coef * x
    target = [0] * len(tc.generators[k + 1])
    index = {cone: t for t, cone in enumerate(tc.generators[k + 1])}
    for t, x in enumerate(cycle):
        if not x:
            continue
        for gamma, y in _divisor_times_orbit(fan, ray, tc.generators[k][t]).items():
            target[index[gamma]] += x * y
    return tc.projections[k + 1].apply(target)


def intersect(fan: Fan, tc: ToricChow, x, a: int, y, b: int) -> tuple[int, ...]:
    """Product of ``x`` in ``CH^a`` and ``y`` in ``CH^b`` (basis coordinates)."""
    n = fan.rank
    if a + b > n:
        return ()
    out = [0] * tc.ranks[a + b]
    for coef, vec in zip(x, tc.basis[a]):
        if not coef:
            continue
        for t, mult in enumerate(vec):
            if not mult:
                continue
            z, deg = tuple(y), b
            for ray in tc.generators[a][t]:
                z = divisor_action(fan, tc, ray, z, deg)
                deg += 1
            for s, val in enumerate(z):
                out[s] += coef * mult * val
    return tuple(out)


def is_ample(fan: Fan, coeffs) -> bool:
    """Strict convexity test for ``sum coeffs[r] D_r`` on a smooth complete fan."""
    if len(coeffs) != len(fan.rays):
        raise ToricError("one coefficient per ray is required")
    for sigma in fan.maximal_cones():
        m = solve_integer(fan.ray_matrix(sigma), [-coeffs[r] for r in sigma])
        if m is None:
            return False
        for r, v in enumerate(fan.rays):
            if r not in sigma and sum(a * b for a, b in zip(m, v)) + coeffs[r] <= 0:
                return False
    return True


def lefschetz_and_pairings(fan: Fan, tc: ToricChow, ample) -> StratumChowData:
    if not is_ample(fan, ample):
        raise NotAmple(f"divisor with coefficients {list(ample)} is not ample")
    n = fan.rank
    ranks = tc.ranks
    lef = []
    for k in range(n):
        cols = []
        for t in range(ranks[k]):
            e = tuple(int(s == t) for s in range(ranks[k]))
            acc = [0] * ranks[k + 1]
            for ray, c in enumerate(ample):
                if c:
                    for s, val in enumerate(divisor_action(fan, tc, ray, e, k)):
                        acc[s] += c * val
            cols.append(acc)
        lef.append(IntMatrix.from_columns(cols, ranks[k + 1]))
    pairings = []
    for a in range(n + 1):
        b = n - a
        rows = []
        for s in range(ranks[a]):
            x = tuple(int(u == s) for u in range(ranks[a]))
            row = []
            for t in range(ranks[b]):
                y = tuple(int(u == t) for u in range(ranks[b]))
                row.append(intersect(fan, tc, x, a, y, b)[0])
            rows.append(row)
        pairings.append(IntMatrix(rows, ranks[b]))
    return StratumChowData(n, ranks, tuple(lef), tuple(pairings))


def betti_from_cone_counts(fan: Fan) -> tuple[int, ...]:
    """``rank CH^(n-k) = sum_i (-1)^(i-k) C(i, k) d_i`` with ``d_i`` the number of (n-i)-cones."""
    from math import comb

    n = fan.rank
    d = [len(fan.cones_of_dim(n - i)) for i in range(n + 1)]
    by_dim_cycles = [sum((-1) ** (i - k) * comb(i, k) * d[i] for i in range(k, n + 1)) for k in range(n + 1)]
    return tuple(by_dim_cycles[n - k] for k in range(n + 1))


# standard fans used by the CLI and the tests

def projective_line() -> Fan:
    return Fan.from_maximal(1, [(1,), (-1,)], [(0,), (1,)])


def projective_plane() -> Fan:
    return Fan.from_maximal(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def p1_times_p1() -> Fan:
    return Fan.from_maximal(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (0, 3), (1, 2), (1, 3)])


def hirzebruch(a: int) -> Fan:
    return Fan.from_maximal(2, [(1, 0), (0, 1), (-1, a), (0, -1)], [(0, 1), (1, 2), (2, 3), (0, 3)])
