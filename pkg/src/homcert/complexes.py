"""Bounded complexes of finitely generated free modules, and chain maps.

Degrees run over a finite window [min_degree, top_degree]; everything
outside the window is the zero module, and accessors hand back correctly
shaped zero matrices so that degreewise formulas never special-case the
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exactalg import (
    Matrix, QQ, Ring, SmithSolver, ZZ, ModularRing, elementary_divisors,
    rank as matrix_rank, solve_right,
)


@dataclass(frozen=True)
class GradedFreeComplex:
    """Free modules R^{ranks[i]} in degrees min_degree + i, with differentials.

    ``diffs[j]`` is the differential out of degree ``min_degree + j + 1``
    into degree ``min_degree + j`` (shape ranks[j] x ranks[j+1]); there are
    ``len(ranks) - 1`` of them.
    """

    ring: Ring
    min_degree: int
    ranks: tuple
    diffs: tuple

    def __post_init__(self):
        if len(self.ranks) == 0:
            raise ValueError("a complex needs at least one degree slot")
        if len(self.diffs) != len(self.ranks) - 1:
            raise ValueError("need exactly len(ranks) - 1 differentials")
        for j, d in enumerate(self.diffs):
            if d.ring != self.ring:
                raise ValueError("differential over the wrong ring")
            if (d.rows, d.cols) != (self.ranks[j], self.ranks[j + 1]):
                raise ValueError(
                    f"differential {j} has shape {d.rows}x{d.cols}, "
                    f"expected {self.ranks[j]}x{self.ranks[j + 1]}")

    @property
    def top_degree(self) -> int:
        return self.min_degree + len(self.ranks) - 1

    def degrees(self) -> range:
        return range(self.min_degree, self.top_degree + 1)

    def rank(self, i: int) -> int:
        if self.min_degree <= i <= self.top_degree:
            return self.ranks[i - self.min_degree]
        return 0

    def diff(self, i: int) -> Matrix:
        """The differential d_i : degree i -> degree i - 1 (zero off-window)."""
        j = i - self.min_degree - 1
        if 0 <= j < len(self.diffs):
            return self.diffs[j]
        return Matrix.zeros(self.ring, self.rank(i - 1), self.rank(i))

    def total_rank(self) -> int:
        return sum(self.ranks)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * self.rank(i) for i in self.degrees())

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.ranks)


def zero_complex(ring: Ring, degree: int = 0) -> GradedFreeComplex:
    return GradedFreeComplex(ring, degree, (0,), ())


def concentrated(ring: Ring, degree: int, rank: int) -> GradedFreeComplex:
    """R^rank sitting in a single degree with no differential."""
    return GradedFreeComplex(ring, degree, (rank,), ())


def validate_complex(x: GradedFreeComplex, allow_negative: bool = False) -> list[str]:
    """Diagnostics for the complex laws; empty list means valid.

    ``allow_negative`` permits nonzero modules in negative degrees, which
    internal desuspensions need; external inputs keep the default.
    """
    report = []
    if not allow_negative and x.min_degree < 0:
        if any(x.rank(i) > 0 for i in range(x.min_degree, 0)):
            report.append("nonzero module in negative degree")
    for i in x.degrees():
        prod = x.diff(i) * x.diff(i + 1)
        if not prod.is_zero():
            report.append(f"d_{i} * d_{i + 1} != 0")
    return report


def trim(x: GradedFreeComplex) -> GradedFreeComplex:
    """Drop zero-rank slots at both ends of the window (zero complex stays one slot)."""
    lo, hi = 0, len(x.ranks) - 1
    while lo < hi and x.ranks[lo] == 0:
        lo += 1
    while hi > lo and x.ranks[hi] == 0:
        hi -= 1
    if x.ranks[lo] == 0:
        return zero_complex(x.ring, x.min_degree)
    return GradedFreeComplex(x.ring, x.min_degree + lo, x.ranks[lo:hi + 1], x.diffs[lo:hi])


@dataclass(frozen=True)
class HomologySummary:
    free_rank: int
    torsion: tuple

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion


def homology_invariants(x: GradedFreeComplex) -> dict:
    """Homology in each window degree.

    Over Z the summary at degree i is (free rank, invariant factors > 1);
    over Q and Z/p torsion is empty and free_rank is the dimension.
    Composite Z/m is not supported here.
    """
    ring = x.ring
    if isinstance(ring, ModularRing) and not ring.is_field:
        raise ValueError("homology over composite Z/m is not supported")
    out = {}
    for i in x.degrees():
        r_in = matrix_rank(x.diff(i + 1))
        r_out = matrix_rank(x.diff(i))
        free = x.rank(i) - r_in - r_out
        torsion = tuple(elementary_divisors(x.diff(i + 1))) if ring == ZZ else ()
        out[i] = HomologySummary(free, torsion)
    return out


def is_exact(x: GradedFreeComplex) -> bool:
    return all(h.is_trivial() for h in homology_invariants(x).values())


@dataclass(frozen=True)
class ChainMap:
    """A degree-homogeneous map of complexes; ``mats[j]`` acts on source
    degree ``source.min_degree + j`` and lands in degree + shift of the target.
    """

    source: GradedFreeComplex
    target: GradedFreeComplex
    shift: int
    mats: tuple

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise ValueError("chain map between complexes over different rings")
        if len(self.mats) != len(self.source.ranks):
            raise ValueError("need one matrix per source degree")
        for j, m in enumerate(self.mats):
            i = self.source.min_degree + j
            want = (self.target.rank(i + self.shift), self.source.rank(i))
            if (m.rows, m.cols) != want:
                raise ValueError(f"component at degree {i} has shape "
                                 f"{m.rows}x{m.cols}, expected {want[0]}x{want[1]}")

    def mat(self, i: int) -> Matrix:
        j = i - self.source.min_degree
        if 0 <= j < len(self.mats):
            return self.mats[j]
        return Matrix.zeros(self.source.ring, self.target.rank(i + self.shift), self.source.rank(i))

    def is_chain_map(self) -> bool:
        """d_target o f = (-1)^shift f o d_source in every degree."""
        sgn = (-1) ** self.shift
        for i in range(min(self.source.min_degree, self.target.min_degree - self.shift) - 1,
                       max(self.source.top_degree, self.target.top_degree - self.shift) + 2):
            lhs = self.target.diff(i + self.shift) * self.mat(i)
            rhs = (self.mat(i - 1) * self.source.diff(i)).scale(sgn)
            if lhs != rhs:
                return False
        return True

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other (apply ``other`` first)."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition mismatch")
        mats = tuple(self.mat(other.source.min_degree + j + other.shift) * other.mats[j]
                     for j in range(len(other.mats)))
        return ChainMap(other.source, self.target, self.shift + other.shift, mats)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        if (other.source != self.source or other.target != self.target
                or other.shift != self.shift):
            raise ValueError("chain map addition mismatch")
        return ChainMap(self.source, self.target, self.shift,
                        tuple(a + b for a, b in zip(self.mats, other.mats)))

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, self.shift,
                        tuple(m.scale(c) for m in self.mats))

    def is_degreewise_invertible(self) -> bool:
        from .exactalg import is_invertible
        if self.shift != 0:
            return False
        lo = min(self.source.min_degree, self.target.min_degree)
        hi = max(self.source.top_degree, self.target.top_degree)
        for i in range(lo, hi + 1):
            if self.source.rank(i) != self.target.rank(i):
                return False
            if not is_invertible(self.mat(i)):
                return False
        return True


def identity_map(x: GradedFreeComplex) -> ChainMap:
    return ChainMap(x, x, 0, tuple(Matrix.identity(x.ring, r) for r in x.ranks))


def zero_map(x: GradedFreeComplex, y: GradedFreeComplex, shift: int = 0) -> ChainMap:
    return ChainMap(x, y, shift,
                    tuple(Matrix.zeros(x.ring, y.rank(x.min_degree + j + shift), x.ranks[j])
                          for j in range(len(x.ranks))))


def boundary_map(x: GradedFreeComplex) -> ChainMap:
    """The differential packaged as a degree -1 map of the complex."""
    return ChainMap(x, x, -1, tuple(x.diff(i) for i in x.degrees()))


# ---------------------------------------------------------------------
# Contractions: solve d*h + h*d = id as one linear system
# ---------------------------------------------------------------------


class HomotopySystem:
    """The linear system d*h + h*d = c * id on a fixed complex.

    Unknowns are the entries of the degree +1 operator h (one block per
    degree below the top, vectorized row-major); the right-hand side scalar
    c varies, so over Z the Smith factorization of the system matrix is
    computed once and reused for every c.
    """

    def __init__(self, x: GradedFreeComplex):
        self.x = x
        ring = x.ring
        degs = list(x.degrees())
        self.blocks = [(i, x.rank(i + 1) * x.rank(i)) for i in degs[:-1]] if len(degs) > 1 else []
        cols = sum(b[1] for b in self.blocks)
        rows_list = []
        self.eq_degrees = [(i, x.rank(i) ** 2) for i in degs]
        for i, _ in self.eq_degrees:
            n_i = x.rank(i)
            row_blocks = []
            for k, (j, width) in enumerate(self.blocks):
                if j == i:
                    blk = x.diff(i + 1).kron(Matrix.identity(ring, n_i))
                elif j == i - 1:
                    blk = Matrix.identity(ring, n_i).kron(x.diff(i).transpose())
                else:
                    blk = Matrix.zeros(ring, n_i * n_i, width)
                row_blocks.append(blk)
            if row_blocks:
                rows_list.append(Matrix.block([row_blocks]))
            else:
                rows_list.append(Matrix.zeros(ring, n_i * n_i, 0))
        if rows_list:
            self.system = Matrix.block([[m] for m in rows_list])
        else:
            self.system = Matrix.zeros(ring, 0, cols)
        self._solver = SmithSolver(self.system) if ring == ZZ else None

    def rhs(self, c) -> Matrix:
        ring = self.x.ring
        cells = []
        for i, _ in self.eq_degrees:
            ident = Matrix.scalar(ring, self.x.rank(i), c)
            cells.extend(ident.entries[r][s] for r in range(ident.rows) for s in range(ident.cols))
        return Matrix.from_rows(ring, [[v] for v in cells]) if cells else Matrix(ring, 0, 1, ())

    def solve(self, c, kernel_offset: Optional[Matrix] = None) -> Optional[ChainMap]:
        if self._solver is not None:
            vec = self._solver.solve(self.rhs(c))
        else:
            vec = solve_right(self.system, self.rhs(c))
        if vec is None:
            return None
        if kernel_offset is not None:
            vec = vec + kernel_offset
        return self.unflatten(vec)

    def kernel_basis(self) -> list[Matrix]:
        if self._solver is not None:
            return self._solver.kernel_basis()
        raise ValueError("kernel basis only available over Z")

    def unflatten(self, vec: Matrix) -> ChainMap:
        x, ring = self.x, self.x.ring
        mats = []
        pos = 0
        by_degree = {}
        for i, width in self.blocks:
            r, c_ = x.rank(i + 1), x.rank(i)
            ents = [vec.entries[pos + t][0] for t in range(width)]
            pos += width
            by_degree[i] = Matrix(ring, r, c_, tuple(tuple(ents[a * c_:(a + 1) * c_]) for a in range(r)))
        for j in range(len(x.ranks)):
            i = x.min_degree + j
            mats.append(by_degree.get(i, Matrix.zeros(ring, x.rank(i + 1), x.rank(i))))
        return ChainMap(x, x, 1, tuple(mats))


def is_contraction(h: ChainMap) -> bool:
    x = h.source
    for i in x.degrees():
        lhs = x.diff(i + 1) * h.mat(i) + h.mat(i - 1) * x.diff(i)
        if lhs != Matrix.identity(x.ring, x.rank(i)):
            return False
    return True


def find_contraction(x: GradedFreeComplex) -> Optional[ChainMap]:
    """A degree +1 operator h with d*h + h*d = id, or None.

    Decided by solving the coupled linear system directly, so None is a
    complete verdict over Z, Q and Z/m.
    """
    h = HomotopySystem(x).solve(x.ring.one())
    if h is not None:
        assert is_contraction(h)
    return h


# ---------------------------------------------------------------------
# Short exact sequences
# ---------------------------------------------------------------------


def check_ses(f: ChainMap, g: ChainMap) -> list[str]:
    """Diagnostics for 0 -> A -f-> B -g-> C -> 0; empty list means exact.

    Exactness in each degree is homology of the three-term complex
    C <- B <- A, which covers injectivity, surjectivity and ker g = im f
    (including torsion) uniformly over Z and over fields.
    """
    report = []
    if f.shift != 0 or g.shift != 0:
        report.append("arrows must have shift 0")
        return report
    if f.target != g.source:
        report.append("middle complexes disagree")
        return report
    if not f.is_chain_map():
        report.append("inclusion is not a chain map")
    if not g.is_chain_map():
        report.append("projection is not a chain map")
    if report:
        return report
    a, b, c = f.source, f.target, g.target
    lo = min(a.min_degree, b.min_degree, c.min_degree)
    hi = max(a.top_degree, b.top_degree, c.top_degree)
    for i in range(lo, hi + 1):
        gf = g.mat(i) * f.mat(i)
        if not gf.is_zero():
            report.append(f"g o f != 0 in degree {i}")
            continue
        three = GradedFreeComplex(a.ring, 0, (c.rank(i), b.rank(i), a.rank(i)),
                                  (g.mat(i), f.mat(i)))
        hom = homology_invariants(three)
        if not hom[2].is_trivial():
            report.append(f"inclusion not injective in degree {i}")
        if not hom[1].is_trivial():
            report.append(f"not exact at the middle in degree {i}")
        if not hom[0].is_trivial():
            report.append(f"projection not surjective in degree {i}")
    return report
