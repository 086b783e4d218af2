"""Finite representations of double graphs over exact rationals.

A finite representation assigns a dimension to every vertex, a matrix to
every real edge (mapping the source space to the range space) and a
matrix to every ghost edge (the other way round).  Entries are exact
`fractions.Fraction` values, so checking the Cuntz-Krieger relations is
a decision, not an approximation.

Paths compose in diagram order while matrices compose in operator order,
so the matrix of the path e1 e2 ... en is M(en) @ ... @ M(e1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .covering import GHOST_SUFFIX, DoubleGraph
from .graphs import Graph, GraphError, Path, PreconditionError, maximal_cycles


class MatrixError(ValueError):
    """Shape mismatch or otherwise malformed exact matrix data."""


class Matrix:
    """Immutable exact rational matrix; zero-dimensional shapes are fine."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: tuple[tuple[Fraction, ...], ...]):
        self.rows = rows
        self.cols = cols
        self.data = data

    @staticmethod
    def from_rows(rows: Sequence[Sequence[object]], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(Fraction(x) for x in row) for row in rows)
        r = len(data)
        if r:
            c = len(data[0])
            if any(len(row) != c for row in data):
                raise MatrixError("ragged rows")
        else:
            c = 0 if cols is None else cols
        return Matrix(r, c, data)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, tuple(
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, tuple(
            tuple(Fraction(0) for _ in range(cols)) for _ in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise MatrixError(f"cannot add shapes {self.shape} and {other.shape}")
        return Matrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise MatrixError(f"cannot subtract shapes {self.shape} and {other.shape}")
        return Matrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.data, other.data)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise MatrixError(f"cannot multiply shapes {self.shape} and {other.shape}")
        cols = tuple(zip(*other.data)) if other.data else ()
        return Matrix(self.rows, other.cols, tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols)
            for row in self.data))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        return hash((self.shape, self.data))

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    @property
    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            x == (1 if i == j else 0)
            for i, row in enumerate(self.data) for j, x in enumerate(row))

    def inverse(self) -> "Matrix | None":
        """Exact inverse by Gauss-Jordan elimination; None when singular."""
        if self.rows != self.cols:
            return None
        n = self.rows
        m = [list(row) for row in self.data]
        aug = [list(Matrix.identity(n).data[i]) for i in range(n)]
        for i in range(n):
            pivot = next((k for k in range(i, n) if m[k][i] != 0), None)
            if pivot is None:
                return None
            if pivot != i:
                m[i], m[pivot] = m[pivot], m[i]
                aug[i], aug[pivot] = aug[pivot], aug[i]
            inv = Fraction(1) / m[i][i]
            m[i] = [x * inv for x in m[i]]
            aug[i] = [x * inv for x in aug[i]]
            for k in range(n):
                if k == i or m[k][i] == 0:
                    continue
                f = m[k][i]
                m[k] = [x - f * y for x, y in zip(m[k], m[i])]
                aug[k] = [x - f * y for x, y in zip(aug[k], aug[i])]
        return Matrix(n, n, tuple(tuple(row) for row in aug))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.data) + "]"


class FiniteRep:
    """A representation of a double graph on exact rational matrices.

    `dims[v]` is the dimension at vertex v, `real[e]` the matrix of the
    real edge e with shape dims[r(e)] x dims[s(e)], and `ghost[e]` the
    matrix of e* with shape dims[s(e)] x dims[r(e)].
    """

    __slots__ = ("base", "double", "dims", "real", "ghost")

    def __init__(self, base: Graph, dims: dict[str, int],
                 real: dict[str, Matrix], ghost: dict[str, Matrix]):
        base.check_vertices(dims)
        self.base = base
        self.double = DoubleGraph(base)
        self.dims = {v: int(dims.get(v, 0)) for v in base.vertices}
        if any(n < 0 for n in self.dims.values()):
            raise MatrixError("dimensions must be natural numbers")
        self.real = {}
        self.ghost = {}
        for e in base.edges:
            m = real.get(e.id, Matrix.zeros(self.dims[e.dst], self.dims[e.src]))
            if m.shape != (self.dims[e.dst], self.dims[e.src]):
                raise MatrixError(
                    f"edge {e.id!r} needs shape {(self.dims[e.dst], self.dims[e.src])}, "
                    f"got {m.shape}")
            self.real[e.id] = m
            gm = ghost.get(e.id, Matrix.zeros(self.dims[e.src], self.dims[e.dst]))
            if gm.shape != (self.dims[e.src], self.dims[e.dst]):
                raise MatrixError(
                    f"ghost of {e.id!r} needs shape {(self.dims[e.src], self.dims[e.dst])}, "
                    f"got {gm.shape}")
            self.ghost[e.id] = gm

    def matrix(self, eid: str) -> Matrix:
        """Matrix of a double-graph edge id, ghost ids included."""
        if eid.endswith(GHOST_SUFFIX) and eid[:-len(GHOST_SUFFIX)] in self.real:
            return self.ghost[eid[:-len(GHOST_SUFFIX)]]
        if eid in self.real:
            return self.real[eid]
        raise GraphError(f"unknown edge id {eid!r}")


@dataclass(frozen=True)
class CKCheck:
    """First Cuntz-Krieger violation, if any, in declaration order.

    Pair relations of a vertex are checked before its sum relation;
    `residual` is the difference between the two sides.
    """

    ok: bool
    relation: str | None = None
    residual: Matrix | None = None


def validate_ck(rep: FiniteRep) -> CKCheck:
    """Exact check of both Cuntz-Krieger relation families.

    The path e* f carries the matrix M(f) @ M(e*); it must equal the
    identity at r(e) when e == f and vanish otherwise.  At every regular
    vertex the matrices M(e*) @ M(e) must sum to the identity.
    """
    g = rep.base
    for v in g.vertices:
        out = g.out_edges(v)
        for e in out:
            for f in out:
                got = rep.real[f.id] @ rep.ghost[e.id]
                want = (Matrix.identity(rep.dims[e.dst]) if e.id == f.id
                        else Matrix.zeros(rep.dims[f.dst], rep.dims[e.dst]))
                if got != want:
                    return CKCheck(False, f"{e.id}*.{f.id}", got - want)
        if out:
            total = Matrix.zeros(rep.dims[v], rep.dims[v])
            for e in out:
                total = total + (rep.ghost[e.id] @ rep.real[e.id])
            if not (total - Matrix.identity(rep.dims[v])).is_zero:
                return CKCheck(False, f"sum@{v}", total - Matrix.identity(rep.dims[v]))
    return CKCheck(True)


def dim_vector(rep: FiniteRep) -> dict[str, int]:
    return dict(rep.dims)


@dataclass(frozen=True)
class ShapeReport:
    """Conformance of a dimension vector to the rigid finite shape:
    constant on each maximal cycle and zero off cycles and isolated
    vertices."""

    conformant: bool
    witness: str | None = None


def shape_check(rep: FiniteRep) -> ShapeReport:
    g = rep.base
    bad = [v for v in g.vertices if g.is_source(v) and not g.is_isolated(v)]
    if bad:
        raise PreconditionError(f"graph has a non-isolated source: {bad[0]!r}")
    allowed = set()
    for c in maximal_cycles(g):
        vals = {rep.dims[v] for v in c.vertex_set}
        if len(vals) > 1:
            return ShapeReport(False, f"cycle {c.id} carries dimensions {sorted(vals)}")
        allowed |= c.vertex_set
    allowed |= {v for v in g.vertices if g.is_isolated(v)}
    for v in g.vertices:
        if v not in allowed and rep.dims[v] != 0:
            return ShapeReport(False, f"vertex {v!r} off the maximal cycles has dimension {rep.dims[v]}")
    return ShapeReport(True)


def rep_to_module_action(rep: FiniteRep, p: Path | str) -> Matrix:
    """Matrix of a double-graph path, vertex ids standing for trivial paths.

    Matrices compose in reverse path order; a vertex acts as the identity
    on its block.
    """
    if isinstance(p, str):
        rep.base.check_vertices((p,))
        return Matrix.identity(rep.dims[p])
    out = None
    for e in p.edges:
        if not rep.double.graph.has_edge(e.id):
            raise GraphError(f"path edge {e.id!r} is not in the double graph")
        m = rep.matrix(e.id)
        out = m if out is None else m @ out
    assert out is not None
    return out
