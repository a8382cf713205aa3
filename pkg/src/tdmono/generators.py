"""Ready-made degeneration models and independent oracles.

Curves: a connected loop-free multigraph ``G`` gives a configuration of
projective lines, one per vertex, meeting transversally in one point per
edge. Parallel edges between two vertices live in one stratum (a
disjoint union of points). The generic fibre is a Mumford curve of genus
``b_1(G)``; the cycle graph gives the Tate curve.

Surfaces: the shipped abelian-surface model comes from the 7-vertex
triangulation of the torus ``R^2 / L`` with ``L`` the kernel of
``(a, b) -> a + 2b mod 7``, triangulated by the lines ``x``, ``y`` and
``x + y`` constant. Each vertex gives a toric component whose fan is the
star of the vertex (a hexagon: the degree 6 del Pezzo surface), each edge
a projective line and each triangle a point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations

from .lattice import IntMatrix
from .model import DegenerationModel, Flags, StratumChowData, Subset, parse_model, serialize_model
from .toric import Fan, chow_from_fan, lefschetz_and_pairings, class_of_cone


class GeneratorError(ValueError):
    pass


class NTooSmall(GeneratorError):
    pass


class LoopRejected(GeneratorError):
    pass


class Disconnected(GeneratorError):
    pass


@dataclass(frozen=True)
class DualGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]  # 1-based, u < v, file order

    @classmethod
    def from_edges(cls, edges, num_vertices: int | None = None) -> "DualGraph":
        norm = []
        for u, v in edges:
            if u == v:
                raise LoopRejected(f"loop at vertex {u}")
            norm.append((min(u, v), max(u, v)))
        if num_vertices is None:
            num_vertices = max((v for e in norm for v in e), default=0)
        if any(u < 1 or v > num_vertices for u, v in norm):
            raise GeneratorError("vertex index out of range")
        return cls(num_vertices, tuple(norm))

    @property
    def betti1(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    def is_connected(self) -> bool:
        if self.num_vertices == 0:
            return False
        parent = list(range(self.num_vertices + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        return len({find(v) for v in range(1, self.num_vertices + 1)}) == 1


def parse_graph(text: str) -> DualGraph:
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GeneratorError(f"line {lineno}: expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GeneratorError(f"line {lineno}: vertex labels must be integers") from None
    return DualGraph.from_edges(edges)


def cycle_graph(n: int) -> DualGraph:
    return DualGraph.from_edges([(k, k % n + 1) for k in range(1, n + 1)], n)


def _line() -> StratumChowData:
    one = IntMatrix([[1]])
    return StratumChowData(1, (1, 1), (one,), (one, one))


def _points(count: int) -> StratumChowData:
    return StratumChowData(0, (count,), (), (IntMatrix.identity(count),))


def gen_mumford(g: DualGraph, name: str | None = None) -> DegenerationModel:
    if not g.is_connected():
        raise Disconnected("dual graph must be connected")
    mult: dict[Subset, int] = {}
    for u, v in g.edges:
        if u == v:
            raise LoopRejected(f"loop at vertex {u}")
        mult[(u, v)] = mult.get((u, v), 0) + 1
    strata: dict[Subset, StratumChowData] = {(v,): _line() for v in range(1, g.num_vertices + 1)}
    restrictions, gysins = {}, {}
    for I, c in mult.items():
        strata[I] = _points(c)
        for v in I:
            restrictions[((v,), I, 0)] = IntMatrix([[1]] * c, 1)
            gysins[(I, (v,), 0)] = IntMatrix([[1] * c], c)
    if name is None:
        name = f"mumford-v{g.num_vertices}-e{len(g.edges)}"
    return DegenerationModel(name, 1, g.num_vertices, strata, restrictions, gysins, Flags(True, True))


def gen_ngon(n: int) -> DegenerationModel:
    if n < 3:
        raise NTooSmall("n-gon needs n >= 3")
    return gen_mumford(cycle_graph(n), name=f"ngon-{n}")


def spanning_tree_count_brute(g: DualGraph) -> int:
    n = g.num_vertices
    count = 0
    for subset in combinations(range(len(g.edges)), n - 1):
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for e in subset:
            u, v = g.edges[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        count += ok
    return count


def spanning_tree_count_matrix_tree(g: DualGraph) -> int:
    """Determinant of the reduced Laplacian, by exact rational elimination."""
    n = g.num_vertices
    if n <= 1:
        return 1
    L = [[Fraction(0)] * n for _ in range(n)]
    for u, v in g.edges:
        u, v = u - 1, v - 1
        L[u][u] += 1
        L[v][v] += 1
        L[u][v] -= 1
        L[v][u] -= 1
    a = [row[1:] for row in L[1:]]
    size = n - 1
    det = Fraction(1)
    for c in range(size):
        p = next((r for r in range(c, size) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, size):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, size):
                    a[r][k] -= f * a[c][k]
    return int(det)


def spanning_tree_count(g: DualGraph) -> int:
    if len(g.edges) <= 12:
        return spanning_tree_count_brute(g)
    return spanning_tree_count_matrix_tree(g)


# -- abelian surface ---------------------------------------------------------

# hexagonal star of a vertex in the (x, y, x+y) triangulation of Z^2
_HEX_RAYS = ((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1))


def _torus_label(ray: tuple[int, int], modulus: int, weight: int) -> int:
    return (ray[0] + weight * ray[1]) % modulus


def build_abelian_surface(modulus: int = 7, weight: int = 2) -> DegenerationModel:
    """Special fibre of a totally degenerate abelian surface from a torus triangulation.

    Vertices are ``Z / modulus``; the ray ``(a, b)`` from vertex ``v``
    reaches ``v + a + weight * b``. The labels of the six rays must be
    distinct and nonzero, and the resulting triangles must have distinct
    vertex sets, so that every stratum is connected.
    """
    labels = [_torus_label(r, modulus, weight) for r in _HEX_RAYS]
    if 0 in labels or len(set(labels)) != 6:
        raise GeneratorError("ray labels must be distinct and nonzero")
    fan = Fan.from_maximal(2, _HEX_RAYS, [(k, (k + 1) % 6) for k in range(6)])
    tc = chow_from_fan(fan)
    component = lefschetz_and_pairings(fan, tc, [1] * 6)
    line_classes = [class_of_cone(fan, tc, (k,)) for k in range(6)]

    comp = lambda v: v % modulus + 1
    triangles = set()
    for v in range(modulus):
        for k in range(6):
            a, b = _HEX_RAYS[k], _HEX_RAYS[(k + 1) % 6]
            tri = tuple(sorted({comp(v), comp(v + _torus_label(a, modulus, weight)), comp(v + _torus_label(b, modulus, weight))}))
            if len(tri) != 3:
                raise GeneratorError("degenerate triangle")
            triangles.add(tri)
    if len(triangles) != 2 * modulus:
        raise GeneratorError("triangles are not distinct as vertex sets")

    strata: dict[Subset, StratumChowData] = {(comp(v),): component for v in range(modulus)}
    restrictions, gysins = {}, {}
    P1 = component.pairings[1]
    point_class = IntMatrix([[1]])
    for v in range(modulus):
        for k, ray in enumerate(_HEX_RAYS):
            w = (v + labels[k]) % modulus
            I, J = (comp(v),), tuple(sorted((comp(v), comp(w))))
            strata.setdefault(J, _line())
            cls = line_classes[k]
            # CH^0 restriction, CH^1 restriction = degree on the curve
            restrictions[(I, J, 0)] = IntMatrix([[1] + [0] * (component.ranks[0] - 1)])
            restrictions[(I, J, 1)] = IntMatrix([list(P1.apply(cls))])
            gysins[(J, I, 0)] = IntMatrix.from_columns([cls], component.ranks[1])
            gysins[(J, I, 1)] = point_class
    for T in sorted(triangles):
        strata[T] = _points(1)
        for s in T:
            J = tuple(x for x in T if x != s)
            restrictions[(J, T, 0)] = IntMatrix([[1]])
            gysins[(T, J, 0)] = IntMatrix([[1]])
    return DegenerationModel(
        f"abelian-surface-torus{modulus}", 2, modulus, strata, restrictions, gysins, Flags(True, True)
    )


def gen_abelian_surface() -> DegenerationModel:
    text = resources.files("tdmono.data").joinpath("abelian_surface.json").read_text(encoding="utf-8")
    return parse_model(text)


def write_abelian_surface_data(path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(build_abelian_surface()))
