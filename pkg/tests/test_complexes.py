"""Complex validation, homology, contractions, short exact sequences."""

import random

import pytest
import sympy

from homcert.complexes import (
    ChainMap, GradedFreeComplex, HomotopySystem, check_ses, concentrated,
    find_contraction, homology_invariants, identity_map, is_contraction,
    is_exact, trim, validate_complex, zero_complex, zero_map,
)
from homcert.exactalg import Matrix, QQ, ZZ, Zmod


def cx(ranks, diffs, ring=ZZ, min_degree=0):
    return GradedFreeComplex(ring, min_degree, tuple(ranks),
                             tuple(Matrix.from_rows(ring, d) if d or True else d for d in diffs))


def two_term(entry, ring=ZZ):
    """0 -> R --entry--> R -> 0 in degrees 1, 0."""
    return GradedFreeComplex(ring, 0, (1, 1), (Matrix.from_rows(ring, [[entry]]),))


def random_complex(rng, ring=ZZ, max_rank=3, length=3):
    """Random valid complex built as a cone-like staircase (d^2 = 0 by design)."""
    # pick ranks, then write each differential as [A 0; 0 0]-conjugated data:
    # easiest valid family: d_{j+1} = P_j * E_j where E_j * P_{j-1} = 0 via
    # alternating [I 0] / [0; I] shapes.
    n = rng.randint(2, max_rank)
    m = rng.randint(0, n)
    d1 = Matrix.build(ring, n, m, lambda i, j: ring.from_int(rng.randint(-3, 3) if i < m else 0))
    # two-step complex X_1 -> X_0 always valid; extend by zero top
    return GradedFreeComplex(ring, 0, (n, m), (d1,))


def test_validate_examples():
    assert validate_complex(zero_complex(ZZ)) == []
    assert validate_complex(two_term(2)) == []
    bad = cx([1, 1, 1], [[[1]], [[1]]])
    rep = validate_complex(bad)
    assert rep and "d_1 * d_2" in rep[0]


def test_validate_negative_degrees():
    x = GradedFreeComplex(ZZ, -1, (1, 1), (Matrix.from_rows(ZZ, [[3]]),))
    assert validate_complex(x) != []
    assert validate_complex(x, allow_negative=True) == []


def test_rank_and_diff_accessors_off_window():
    x = two_term(5)
    assert x.rank(7) == 0 and x.rank(-3) == 0
    assert x.diff(0).rows == 0 and x.diff(2).cols == 0
    assert x.diff(1).entry(0, 0) == 5
    assert x.euler_characteristic() == 0


def test_trim():
    x = GradedFreeComplex(ZZ, 0, (0, 1, 1, 0),
                          (Matrix.zeros(ZZ, 0, 1), Matrix.from_rows(ZZ, [[4]]), Matrix.zeros(ZZ, 1, 0)))
    t = trim(x)
    assert t.min_degree == 1 and t.ranks == (1, 1)
    assert trim(zero_complex(ZZ)).is_zero()


# -- homology ---------------------------------------------------------


def test_homology_frozen_two_term():
    h1 = homology_invariants(two_term(1))
    assert all(s.is_trivial() for s in h1.values())
    assert is_exact(two_term(1))

    h2 = homology_invariants(two_term(2))
    assert h2[0].free_rank == 0 and h2[0].torsion == (2,)
    assert h2[1].is_trivial()

    h0 = homology_invariants(two_term(0))
    assert h0[0].free_rank == 1 and h0[0].torsion == ()
    assert h0[1].free_rank == 1


def test_homology_fields():
    assert is_exact(two_term(2, ring=QQ))
    h = homology_invariants(two_term(2, ring=Zmod(5)))
    assert all(s.is_trivial() for s in h.values())
    h2 = homology_invariants(two_term(5, ring=Zmod(5)))
    assert h2[0].free_rank == 1 and h2[1].free_rank == 1
    with pytest.raises(ValueError):
        homology_invariants(two_term(2, ring=Zmod(12)))


def sympy_betti(x, i):
    """Independent homology oracle over Z: rank and torsion via sympy."""
    din = sympy.Matrix([[int(e) for e in row] for row in x.diff(i + 1).entries]) \
        if x.rank(i) and x.rank(i + 1) else sympy.zeros(x.rank(i), x.rank(i + 1))
    dout = sympy.Matrix([[int(e) for e in row] for row in x.diff(i).entries]) \
        if x.rank(i - 1) and x.rank(i) else sympy.zeros(x.rank(i - 1), x.rank(i))
    free = x.rank(i) - din.rank() - dout.rank()
    from sympy.matrices.normalforms import invariant_factors
    tors = tuple(int(t) for t in invariant_factors(din) if int(t) > 1)
    return free, tors


def test_homology_random_vs_sympy():
    rng = random.Random(41)
    for _ in range(25):
        x = random_complex(rng)
        for i in x.degrees():
            s = homology_invariants(x)[i]
            assert (s.free_rank, s.torsion) == sympy_betti(x, i)


# -- chain maps -------------------------------------------------------


def test_chain_map_basics():
    x = two_term(3)
    ident = identity_map(x)
    assert ident.is_chain_map()
    z = zero_map(x, x)
    assert z.is_chain_map()
    assert (ident.compose(ident)) == ident
    doubled = ident + ident
    assert doubled.mat(0).entry(0, 0) == 2
    assert ident.is_degreewise_invertible()
    assert not zero_map(x, x).is_degreewise_invertible()


def test_chain_map_shape_check():
    x = two_term(3)
    with pytest.raises(ValueError):
        ChainMap(x, x, 0, (Matrix.zeros(ZZ, 2, 1), Matrix.identity(ZZ, 1)))


def test_non_chain_map_detected():
    x = two_term(2)
    y = two_term(3)
    f = ChainMap(x, y, 0, (Matrix.identity(ZZ, 1), Matrix.identity(ZZ, 1)))
    assert not f.is_chain_map()  # 3*1 != 1*2


# -- contractions -----------------------------------------------------


def test_contraction_frozen():
    h = find_contraction(two_term(1))
    assert h is not None
    assert h.mat(0) == Matrix.identity(ZZ, 1)
    assert find_contraction(two_term(2)) is None
    assert find_contraction(two_term(2, ring=QQ)) is not None
    assert find_contraction(zero_complex(ZZ)) is not None


def test_contraction_zmod_composite():
    # over Z/12, multiplication by 5 is invertible, so the two-term complex splits
    assert find_contraction(two_term(5, ring=Zmod(12))) is not None
    assert find_contraction(two_term(4, ring=Zmod(12))) is None


def unimodular(rng, n, ring=ZZ):
    """Random product of elementary row operations applied to the identity."""
    m = Matrix.identity(ring, n)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        c = ring.from_int(rng.randint(-2, 2))
        add = Matrix.build(ring, n, n, lambda r, s:
                           ring.one() if r == s else (c if (r, s) == (i, j) else ring.zero()))
        m = add * m
    return m


def test_contraction_iff_exact():
    rng = random.Random(17)
    hits = 0
    for k in range(30):
        if k % 2:
            n = rng.randint(1, 3)
            x = GradedFreeComplex(ZZ, 0, (n, n), (unimodular(rng, n),))
        else:
            x = random_complex(rng)
        h = find_contraction(x)
        assert (h is not None) == is_exact(x)
        if h is not None:
            hits += 1
            assert is_contraction(h)
    assert 0 < hits  # the family does produce exact instances


def test_homotopy_system_scalar_rhs():
    # d*h + h*d = 4 on [Z --2--> Z] is solvable (h = [[2]]), = 3 is not
    sys = HomotopySystem(two_term(2))
    h4 = sys.solve(4)
    assert h4 is not None and h4.mat(0) == Matrix.from_rows(ZZ, [[2]])
    assert sys.solve(3) is None
    assert sys.solve(0) is not None  # h = 0


def test_homotopy_system_kernel_offsets():
    x = GradedFreeComplex(ZZ, 0, (2, 2), (Matrix.from_rows(ZZ, [[1, 0], [0, 1]]),))
    sys = HomotopySystem(x)
    basis = sys.kernel_basis()
    h = sys.solve(1)
    assert h is not None
    if basis:
        h2 = sys.solve(1, kernel_offset=basis[0])
        assert h2 is not None and is_contraction(h2) and h2 != h


# -- short exact sequences --------------------------------------------


def split_ses(a, c):
    """Canonical 0 -> A -> A (+) C -> C -> 0 in matching windows."""
    ring = a.ring
    lo = min(a.min_degree, c.min_degree)
    hi = max(a.top_degree, c.top_degree)
    ranks = tuple(a.rank(i) + c.rank(i) for i in range(lo, hi + 1))
    diffs = []
    for i in range(lo + 1, hi + 1):
        diffs.append(Matrix.block([
            [a.diff(i), Matrix.zeros(ring, a.rank(i - 1), c.rank(i))],
            [Matrix.zeros(ring, c.rank(i - 1), a.rank(i)), c.diff(i)]]))
    b = GradedFreeComplex(ring, lo, ranks, tuple(diffs))
    incl = ChainMap(a, b, 0, tuple(
        Matrix.block([[Matrix.identity(ring, a.rank(i))],
                      [Matrix.zeros(ring, c.rank(i), a.rank(i))]])
        for i in a.degrees()))
    proj = ChainMap(b, c, 0, tuple(
        Matrix.block([[Matrix.zeros(ring, c.rank(i), a.rank(i)),
                       Matrix.identity(ring, c.rank(i))]])
        for i in b.degrees()))
    return incl, proj


def test_check_ses_accepts_split():
    rng = random.Random(29)
    for _ in range(15):
        a = random_complex(rng)
        c = random_complex(rng)
        incl, proj = split_ses(a, c)
        assert check_ses(incl, proj) == []


def test_check_ses_zero_sub():
    c = two_term(3)
    incl, proj = split_ses(zero_complex(ZZ), c)
    assert check_ses(incl, proj) == []


def test_check_ses_rejects_non_exact():
    x = two_term(2)
    ident = identity_map(x)
    rep = check_ses(ident, ident)
    assert rep != []
    # inclusion with cokernel torsion must fail even though ranks add up
    a = concentrated(ZZ, 0, 1)
    b = concentrated(ZZ, 0, 1)
    f = ChainMap(a, b, 0, (Matrix.from_rows(ZZ, [[2]]),))
    g = zero_map(b, zero_complex(ZZ))
    assert any("middle" in r or "surjective" in r for r in check_ses(f, g))


def test_check_ses_euler_additivity():
    rng = random.Random(37)
    for _ in range(10):
        a = random_complex(rng)
        c = random_complex(rng)
        incl, proj = split_ses(a, c)
        b = incl.target
        assert b.euler_characteristic() == a.euler_characteristic() + c.euler_characteristic()
