"""Cohomological readings of a homology table.

Everything here is integer bookkeeping over the bigraded table ``T^i_j``:
spectral-sequence pages, graded pieces of the monodromy filtration with
their twists, Betti and Hodge numbers, and the consistency checks that
follow from the isogeny and pairing verdicts.

Indexing: the piece ``T^i_j`` contributes to ``H^n`` with ``n = i + 2j``
at monodromy level ``-i``; its weight is ``2j`` and it carries the Tate
twist ``-j`` (equivalently, Frobenius slope ``j`` in the crystalline
reading). Odd rows of both pages vanish modulo torsion, so only even rows
``2j`` are ever emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import jsonfmt
from .checks import CheckReport
from .complex import ChowComplex, HomologyTable, Prop1Report, check_chain_identities, in_support, verify_proposition1
from .model import DegenerationModel, validate_all

REPORT_SCHEMA = "tdmono/report/v1"


class DegreeOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class PageEntry:
    i: int
    j: int
    rank: int
    torsion: tuple[int, ...] = ()

    @property
    def row(self) -> int:
        return 2 * self.j

    @property
    def twist(self) -> int:
        return -self.j

    def to_json(self) -> dict:
        return {"p": self.i, "q": self.row, "rank": self.rank, "torsion": list(self.torsion), "twist": self.twist}


def e1_page(cx: ChowComplex | HomologyTable) -> list[PageEntry]:
    """``E_1^{i,2j}``: the cell ``C^i_j`` (free), twisted by ``-j``."""
    if isinstance(cx, HomologyTable):
        cx = cx.complex
    return [PageEntry(i, j, cx.rank(i, j)) for (i, j) in sorted(cx.cells)]


def e2_page(ht: HomologyTable) -> list[PageEntry]:
    """``E_2^{i,2j} = T^i_j``; taken as the final page."""
    return [PageEntry(i, j, ht.rank(i, j), ht.group(i, j).torsion) for (i, j) in ht.cells]


@dataclass(frozen=True)
class GradedPiece:
    n: int
    i: int
    j: int
    rank: int
    torsion: tuple[int, ...]

    @property
    def level(self) -> int:
        return -self.i

    @property
    def tate_twist(self) -> int:
        return -self.j

    @property
    def weight(self) -> int:
        # absolute Frobenius weight; the centered value is the level
        return 2 * self.j

    @property
    def slope(self) -> int:
        return self.j

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cell": [self.i, self.j],
            "level": self.level,
            "rank": self.rank,
            "torsion": list(self.torsion),
            "tate_twist": self.tate_twist,
            "weight": self.weight,
            "slope": self.slope,
        }


def monodromy_graded(ht: HomologyTable, n: int) -> list[GradedPiece]:
    """Graded pieces of ``H^n`` for the monodromy filtration, by decreasing level."""
    d = ht.dimension
    if not 0 <= n <= 2 * d:
        raise DegreeOutOfRange(f"degree {n} outside 0..{2 * d}")
    out = []
    for i in range(-d, d + 1):
        if (n - i) % 2:
            continue
        j = (n - i) // 2
        if in_support(d, i, j):
            g = ht.group(i, j)
            out.append(GradedPiece(n, i, j, g.rank, g.torsion))
    return out


def betti_numbers(ht: HomologyTable) -> list[int]:
    d = ht.dimension
    return [sum(p.rank for p in monodromy_graded(ht, n)) for n in range(2 * d + 1)]


def hodge_numbers(ht: HomologyTable) -> list[list[int]]:
    """``H[p][q] = h^{p,q} = dim H^q(Omega^p) = rank T^{q-p}_p``."""
    d = ht.dimension
    return [[ht.rank(q - p, p) for q in range(d + 1)] for p in range(d + 1)]


def _h(hodge: list[list[int]], p: int, q: int) -> int:
    if 0 <= p < len(hodge) and 0 <= q < len(hodge[p]):
        return hodge[p][q]
    return 0


def hodge_chain(hodge: list[list[int]], n: int) -> list[tuple[int, int, int]]:
    """``(p, q, h^{p,q})`` along ``h^{n,0}, h^{n-1,1}, ...`` up to the middle."""
    return [(n - k, k, _h(hodge, n - k, k)) for k in range(n // 2 + 1)]


def check_hodge_inequalities(hodge: list[list[int]]) -> CheckReport:
    rep = CheckReport("hodge-inequalities")
    d = len(hodge) - 1
    for n in range(2 * d + 1):
        chain = hodge_chain(hodge, n)
        for (p0, q0, a), (p1, q1, b) in zip(chain, chain[1:]):
            if a > b:
                rep.fail("hodge-chain", f"n={n}", f"h^{{{p0},{q0}}}={a} > h^{{{p1},{q1}}}={b}",
                         [v for _, _, v in chain])
    for p in range(d + 1):
        for q in range(p + 1, d + 1):
            if _h(hodge, p, q) != _h(hodge, q, p):
                rep.fail("hodge-symmetry", f"h^{{{p},{q}}}", f"{_h(hodge, p, q)} != h^{{{q},{p}}}={_h(hodge, q, p)}")
    return rep


def check_weight_monodromy(ht: HomologyTable, prop1: Prop1Report | None = None) -> CheckReport:
    """``N^i`` between levels ``+i`` and ``-i`` of each ``H^n`` must be an isogeny."""
    prop1 = prop1 or verify_proposition1(ht)
    rep = CheckReport("weight-monodromy")
    discriminants = []
    d = ht.dimension
    for n in range(2 * d + 1):
        for i in range(0, d + 1):
            if (n - i) % 2:
                continue
            j = (n - i) // 2
            if not (in_support(d, i, j) and in_support(d, -i, j + i)):
                continue
            cert = prop1.isogeny(i, j)
            v = cert.verdict
            discriminants.append({"n": n, "level": i, "exponent": v.cokernel_exponent,
                                  "order": v.cokernel_order, "invariants": list(v.cokernel_invariants)})
            if not v.is_isogeny:
                rep.fail("not-isogeny", f"H^{n} level {i}", f"N^{i}: T^{-i}_{j + i} -> T^{i}_{j} is not an isogeny")
    rep.details["discriminants"] = discriminants
    return rep


def check_duality(ht: HomologyTable, betti: list[int] | None = None) -> CheckReport:
    rep = CheckReport("duality")
    d = ht.dimension
    for (i, j) in ht.cells:
        r = ht.rank(i, j)
        if r != ht.rank(-i, d - j):
            rep.fail("poincare", f"T^{i}_{j}", f"rank {r} != rank T^{-i}_{d - j} = {ht.rank(-i, d - j)}")
        if r != ht.rank(-i, j + i):
            rep.fail("monodromy-symmetry", f"T^{i}_{j}", f"rank {r} != rank T^{-i}_{j + i} = {ht.rank(-i, j + i)}")
    betti = betti if betti is not None else betti_numbers(ht)
    for n in range(2 * d + 1):
        if betti[n] != betti[2 * d - n]:
            rep.fail("betti-symmetry", f"b_{n}", f"{betti[n]} != b_{2 * d - n} = {betti[2 * d - n]}")
    return rep


def check_euler(ht: HomologyTable, betti: list[int], hodge: list[list[int]]) -> CheckReport:
    rep = CheckReport("euler")
    e1 = sum((-1) ** e.i * e.rank for e in e1_page(ht))
    e2 = sum((-1) ** e.i * e.rank for e in e2_page(ht))
    eb = sum((-1) ** n * b for n, b in enumerate(betti))
    rep.details.update({"e1": e1, "e2": e2, "betti": eb})
    if not e1 == e2 == eb:
        rep.fail("euler", "pages", f"E1 {e1}, E2 {e2}, Betti {eb} disagree")
    d = ht.dimension
    for n in range(2 * d + 1):
        s = sum(_h(hodge, p, n - p) for p in range(n + 1))
        if s != betti[n]:
            rep.fail("hodge-sum", f"n={n}", f"sum of h^(p,q) is {s}, b_{n} = {betti[n]}")
    return rep


KIJ_NOTE = (
    "other bigrading: K^{ij} = C^i_{(-i+j+d)/2}, equivalently C^i_j = K^{i,i+2j-d}"
)
READING_NOTE = (
    "l-adic reading: twist is the Tate twist of Z_l(-j); crystalline reading: "
    "the same integer is minus the Frobenius slope (pure slope j mod torsion)"
)


@dataclass
class CohomologyReport:
    model: DegenerationModel
    ht: HomologyTable
    validation: list[CheckReport]
    chain: CheckReport
    prop1: Prop1Report
    e1: list[PageEntry]
    e2: list[PageEntry]
    pieces: dict[int, list[GradedPiece]]
    betti: list[int]
    hodge: list[list[int]]
    verdicts: list[CheckReport] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(r.passed for r in self.validation)

    @property
    def passed(self) -> bool:
        return self.valid and self.chain.passed and self.prop1.passed and all(r.passed for r in self.verdicts)

    def to_json(self) -> dict:
        m = self.model
        return {
            "schema": REPORT_SCHEMA,
            "model": m.name,
            "dimension": m.dimension,
            "flags": {"claims_conditions_bc": m.flags.claims_conditions_bc, "claims_ordinary": m.flags.claims_ordinary},
            "passed": self.passed,
            "e1": [e.to_json() for e in self.e1],
            "e2": [e.to_json() for e in self.e2],
            "e2_final": "degeneration at E2 assumed, not verified",
            "graded": {str(n): [p.to_json() for p in ps] for n, ps in self.pieces.items()},
            "betti": self.betti,
            "hodge": self.hodge,
            "homology": {f"{i},{j}": str(self.ht.group(i, j)) for (i, j) in self.ht.cells},
            "isogenies_and_pairings": self.prop1.to_json(),
            "verdicts": {r.name: r.to_json() for r in [*self.validation, self.chain, *self.verdicts]},
            "notes": [KIJ_NOTE, READING_NOTE],
        }

    def to_text(self) -> str:
        m = self.model
        out = [f"model {m.name}  (dimension {m.dimension}, {m.num_components} components)"]
        out.append(f"flags: conditions b),c) claimed={m.flags.claims_conditions_bc}  ordinary claimed={m.flags.claims_ordinary}")
        out.append("")
        out.append("E1 page (p, q): rank, twist")
        out += [f"  E1^({e.i},{e.row}) rank {e.rank} twist {e.twist}" for e in self.e1]
        out.append("E2 page (p, q): group, twist  [final page; degeneration assumed]")
        out += [f"  E2^({e.i},{e.row}) {self.ht.group(e.i, e.j)} twist {e.twist}" for e in self.e2]
        out.append("")
        out.append("monodromy graded pieces")
        for n, ps in self.pieces.items():
            for p in ps:
                out.append(
                    f"  H^{n}: level {p.level:+d}  T^{p.i}_{p.j}  rank {p.rank}"
                    f"{'  torsion ' + str(list(p.torsion)) if p.torsion else ''}"
                    f"  tate_twist {p.tate_twist}  weight {p.weight}  slope {p.slope}"
                )
        out.append("")
        out.append("betti " + " ".join(str(b) for b in self.betti))
        out.append("hodge h^{p,q} (row p, column q)")
        out += ["  " + " ".join(f"{h:3d}" for h in row) for row in self.hodge]
        out.append("")
        out.append("isogenies N^i: T^-i_(j+i) -> T^i_j")
        for c in self.prop1.isogenies:
            v = c.verdict
            out.append(f"  i={c.i} j={c.j}: {'isogeny' if v.is_isogeny else 'NOT an isogeny'}"
                       f"  exponent {v.cokernel_exponent}  order {v.cokernel_order}")
        out.append("pairings T^i_j x T^-i_(d-j)")
        for c in self.prop1.pairings:
            out.append(f"  i={c.i} j={c.j}: {'nondegenerate' if c.verdict.nondegenerate else 'DEGENERATE'}"
                       f"  discriminant {c.verdict.discriminant}")
        out.append("")
        out.append("verdicts")
        for r in [*self.validation, self.chain, *self.verdicts]:
            out.append("  " + r.summary().replace("\n", "\n  "))
        out.append(f"  isogenies-and-pairings: {'PASS' if self.prop1.passed else 'FAIL'}")
        out.append("")
        out.append("notes")
        out += [f"  {KIJ_NOTE}", f"  {READING_NOTE}"]
        return "\n".join(out) + "\n"

    def render(self, fmt: str = "text") -> str:
        return jsonfmt.dumps(self.to_json()) if fmt == "json" else self.to_text()


def build_report(model: DegenerationModel, validation: list[CheckReport] | None = None) -> CohomologyReport:
    from .complex import chow_complex, homology_table

    validation = validation if validation is not None else validate_all(model)
    cx = chow_complex(model)
    ht = homology_table(cx)
    prop1 = verify_proposition1(ht)
    betti = betti_numbers(ht)
    hodge = hodge_numbers(ht)
    d = model.dimension
    pieces = {n: monodromy_graded(ht, n) for n in range(2 * d + 1)}
    verdicts = [
        check_weight_monodromy(ht, prop1),
        check_duality(ht, betti),
        check_hodge_inequalities(hodge),
        check_euler(ht, betti, hodge),
    ]
    return CohomologyReport(model, ht, validation, check_chain_identities(cx), prop1,
                            e1_page(cx), e2_page(ht), pieces, betti, hodge, verdicts)
