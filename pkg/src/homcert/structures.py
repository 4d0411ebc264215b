"""Scalar null-homotopy structures on bounded free complexes.

A structure fixes, for each generator g with scalar s_g, a degree +1
operator e_g satisfying d e_g + e_g d = s_g * id in every degree.  The
generators are independent: no relation between the e_g is imposed or
assumed.  An operator out of the top degree lands in the zero module, so
only degrees strictly below the top carry data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .complexes import (
    ChainMap, GradedFreeComplex, HomotopySystem, homology_invariants,
    validate_complex,
)
from .exactalg import Matrix, QQ, ZZ


@dataclass(frozen=True)
class HomotopyStructure:
    """A complex together with one null-homotopy operator per generator.

    ``ops[g][j]`` maps degree ``min_degree + j`` to ``min_degree + j + 1``
    (shape ranks[j+1] x ranks[j]); each generator grid has
    ``len(ranks) - 1`` matrices.
    """

    complex: GradedFreeComplex
    scalars: tuple
    ops: tuple

    def __post_init__(self):
        x = self.complex
        if len(self.scalars) != len(self.ops):
            raise ValueError("one scalar per operator grid")
        object.__setattr__(self, "scalars",
                           tuple(x.ring.normalize(s) for s in self.scalars))
        want = max(len(x.ranks) - 1, 0)
        for g, grid in enumerate(self.ops):
            if len(grid) != want:
                raise ValueError(f"generator {g}: expected {want} operator matrices")
            for j, e in enumerate(grid):
                if e.ring != x.ring:
                    raise ValueError(f"generator {g}: ring mismatch in degree slot {j}")
                if (e.rows, e.cols) != (x.ranks[j + 1], x.ranks[j]):
                    raise ValueError(
                        f"generator {g}: operator out of degree {x.min_degree + j} "
                        f"has shape {e.rows}x{e.cols}, expected "
                        f"{x.ranks[j + 1]}x{x.ranks[j]}")

    @property
    def ngens(self) -> int:
        return len(self.scalars)

    def op(self, g: int, i: int) -> Matrix:
        """Operator of generator ``g`` out of degree ``i`` (zero off window)."""
        x = self.complex
        j = i - x.min_degree
        if 0 <= j < len(self.ops[g]):
            return self.ops[g][j]
        return Matrix.zeros(x.ring, x.rank(i + 1), x.rank(i))

    def op_map(self, g: int) -> ChainMap:
        """The full operator of generator ``g`` as a degree +1 map."""
        x = self.complex
        mats = tuple(self.op(g, i) for i in x.degrees())
        return ChainMap(x, x, 1, mats)


def check_structure(m: HomotopyStructure, check_complex: bool = True) -> list[str]:
    """Report every violated axiom; an empty list means the structure is valid."""
    problems = []
    x = m.complex
    if check_complex:
        problems.extend(validate_complex(x, allow_negative=True))
    for g in range(m.ngens):
        s = m.scalars[g]
        for i in x.degrees():
            lhs = x.diff(i + 1) * m.op(g, i) + m.op(g, i - 1) * x.diff(i)
            if lhs != Matrix.scalar(x.ring, x.rank(i), s):
                problems.append(
                    f"generator {g}: d e + e d != {s} * id in degree {i}")
    return problems


def restrict(m: HomotopyStructure, factors: Sequence) -> HomotopyStructure:
    """Rescale each generator: operator f_g * e_g has scalar f_g * s_g.

    This is the structure transport along a change of scalars; the
    underlying complex is untouched.
    """
    ring = m.complex.ring
    fs = tuple(ring.normalize(f) for f in factors)
    if len(fs) != m.ngens:
        raise ValueError("one factor per generator")
    return HomotopyStructure(
        m.complex,
        tuple(ring.mul(f, s) for f, s in zip(fs, m.scalars)),
        tuple(tuple(e.scale(f) for e in grid) for f, grid in zip(fs, m.ops)))


def structure_from_contraction(x: GradedFreeComplex, h: ChainMap,
                               scalars: Sequence) -> HomotopyStructure:
    """Turn a contraction d h + h d = id into the structure with e_g = s_g h."""
    ring = x.ring
    grids = []
    for s in scalars:
        c = ring.normalize(s)
        grids.append(tuple(h.mat(i).scale(c) for i in list(x.degrees())[:-1]))
    return HomotopyStructure(x, tuple(scalars), tuple(grids))


def is_equivariant(f: ChainMap, mx: HomotopyStructure, my: HomotopyStructure) -> bool:
    """True when the chain map intertwines every generator's operator."""
    if f.shift != 0:
        raise ValueError("equivariance is only defined for degree 0 maps")
    if f.source != mx.complex or f.target != my.complex:
        raise ValueError("structures must live on the map's source and target")
    if mx.ngens != my.ngens:
        return False
    lo = min(f.source.min_degree, f.target.min_degree)
    hi = max(f.source.top_degree, f.target.top_degree)
    for g in range(mx.ngens):
        for i in range(lo, hi + 1):
            if f.mat(i + 1) * mx.op(g, i) != my.op(g, i) * f.mat(i):
                return False
    return True


@dataclass(frozen=True)
class StructureSearch:
    """Outcome of a per-generator least-exponent search.

    ``exponents[g]`` is the least k with d e + e d = t_g^k * id solvable,
    or None when nothing was found up to the bound; ``obstructed[g]`` marks
    generators ruled out for every exponent by nonzero rational homology.
    """

    structure: Optional[HomotopyStructure]
    exponents: tuple
    obstructed: tuple


def _rational_homology_nonzero(x: GradedFreeComplex) -> bool:
    ring = x.ring
    if ring == ZZ:
        lifted = GradedFreeComplex(
            QQ, x.min_degree, x.ranks,
            tuple(Matrix.build(QQ, d.rows, d.cols,
                               lambda r, c, d=d: QQ.from_int(d.entries[r][c]))
                  for d in x.diffs))
        summary = homology_invariants(lifted)
    elif ring.is_field:
        summary = homology_invariants(x)
    else:
        return False  # no usable obstruction over a non-field quotient ring
    return any(not s.is_trivial() for s in summary.values())


def find_structure(x: GradedFreeComplex, gens: Sequence, k_max: int = 16,
                   rng: Optional[random.Random] = None) -> StructureSearch:
    """Search, per generator, for the least exponent of a null-homotopy.

    The coupled linear system for d e + e d = c * id is factored once and
    re-solved for c = t^1, t^2, ... up to ``k_max``.  With an ``rng`` a
    random kernel element is added to each solution, exhibiting different
    operator lifts for the same exponent.  Absence of a solution below the
    bound is inconclusive unless the rational homology obstruction applies.
    """
    ring = x.ring
    ts = tuple(ring.normalize(t) for t in gens)
    blocked = _rational_homology_nonzero(x)
    system = None if blocked else HomotopySystem(x)
    exponents: list = []
    grids: list = []
    obstructed = []
    for t in ts:
        obstructed.append(blocked and t != ring.zero())
        if obstructed[-1] or blocked:
            exponents.append(None)
            continue
        found = None
        power = ring.one()
        for k in range(1, k_max + 1):
            power = ring.mul(power, t)
            offset = None
            if rng is not None and ring == ZZ:
                basis = system.kernel_basis()
                if basis:
                    acc = None
                    for b in basis:
                        c = rng.randint(-2, 2)
                        if c:
                            term = b.scale(ring.from_int(c))
                            acc = term if acc is None else acc + term
                    offset = acc
            sol = system.solve(power, kernel_offset=offset)
            if sol is not None:
                found = (k, sol)
                break
        if found is None:
            exponents.append(None)
        else:
            k, sol = found
            exponents.append(k)
            grids.append(tuple(sol.mat(i) for i in list(x.degrees())[:-1]))
    if all(e is not None for e in exponents) and len(x.ranks) >= 1:
        powers = []
        for t, k in zip(ts, exponents):
            p = ring.one()
            for _ in range(k):
                p = ring.mul(p, t)
            powers.append(p)
        structure = HomotopyStructure(x, tuple(powers), tuple(grids))
    else:
        structure = None
    return StructureSearch(structure, tuple(exponents), tuple(obstructed))
