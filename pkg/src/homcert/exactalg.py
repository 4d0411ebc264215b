"""Exact dense linear algebra over Z, Q and Z/m.

Everything downstream (homology, contraction search, homotopy-operator
search, gluing) reduces to right-solving A*X = B over one of these rings,
so this module concentrates all the number crunching: a small immutable
matrix type, Smith normal form with unimodular witnesses over Z, and a
complete solver for each supported ring (Z/m composite included, via
lifting through the integers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional


class Ring:
    """A commutative coefficient ring with exact element arithmetic.

    Elements are plain Python objects (int for Z and Z/m, Fraction for Q);
    the ring object supplies the operations and canonical forms.
    """

    tag: str = "?"

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def normalize(self, a):
        """Canonical representative of ``a`` (used when parsing raw input)."""
        raise NotImplementedError

    @property
    def is_field(self) -> bool:
        return False

    def __repr__(self):
        return self.tag


class IntegerRing(Ring):
    tag = "Z"

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_unit(self, a):
        return a in (1, -1)

    def normalize(self, a):
        if isinstance(a, Fraction):
            if a.denominator != 1:
                raise ValueError(f"not an integer: {a}")
            return int(a)
        return int(a)

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("Z")


class RationalRing(Ring):
    tag = "Q"

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_unit(self, a):
        return a != 0

    def normalize(self, a):
        return Fraction(a)

    @property
    def is_field(self):
        return True

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("Q")


class ModularRing(Ring):
    """Z/m with canonical representatives 0..m-1; m need not be prime."""

    def __init__(self, modulus: int):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        self.modulus = int(modulus)
        self.tag = f"Z/{self.modulus}"

    def from_int(self, n):
        return int(n) % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def is_unit(self, a):
        return math.gcd(int(a), self.modulus) == 1

    def normalize(self, a):
        if isinstance(a, Fraction):
            if a.denominator != 1:
                raise ValueError(f"not an integer: {a}")
            a = int(a)
        return int(a) % self.modulus

    @property
    def is_field(self):
        # Only prime moduli give a field; callers that need elimination
        # (rank, homology) must check this.
        m = self.modulus
        if m % 2 == 0:
            return m == 2
        f = 3
        while f * f <= m:
            if m % f == 0:
                return False
            f += 2
        return True

    def __eq__(self, other):
        return isinstance(other, ModularRing) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Zmod", self.modulus))


ZZ = IntegerRing()
QQ = RationalRing()

_zmod_cache: dict[int, ModularRing] = {}


def Zmod(m: int) -> ModularRing:
    if m not in _zmod_cache:
        _zmod_cache[m] = ModularRing(m)
    return _zmod_cache[m]


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix over an exact ring.

    Entries are stored row-major as nested tuples; zero-dimensional shapes
    (0 x c, r x 0) are legal and arise constantly from empty degrees of
    complexes.
    """

    ring: Ring
    rows: int
    cols: int
    entries: tuple

    # -- construction -------------------------------------------------

    @staticmethod
    def from_rows(ring: Ring, data) -> "Matrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ents = []
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged rows")
            ents.append(tuple(ring.normalize(x) for x in row))
        return Matrix(ring, rows, cols, tuple(ents))

    @staticmethod
    def zeros(ring: Ring, rows: int, cols: int) -> "Matrix":
        z = ring.zero()
        return Matrix(ring, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(ring: Ring, n: int) -> "Matrix":
        one, zero = ring.one(), ring.zero()
        return Matrix(ring, n, n, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @staticmethod
    def scalar(ring: Ring, n: int, c) -> "Matrix":
        c = ring.normalize(c)
        zero = ring.zero()
        return Matrix(ring, n, n, tuple(tuple(c if i == j else zero for j in range(n)) for i in range(n)))

    @staticmethod
    def build(ring: Ring, rows: int, cols: int, fn: Callable[[int, int], object]) -> "Matrix":
        return Matrix(ring, rows, cols,
                      tuple(tuple(ring.normalize(fn(i, j)) for j in range(cols)) for i in range(rows)))

    @staticmethod
    def block(grid) -> "Matrix":
        """Assemble a matrix from a 2-d grid of compatible blocks."""
        if not grid or not grid[0]:
            raise ValueError("empty block grid")
        ring = grid[0][0].ring
        for brow in grid:
            heights = {b.rows for b in brow}
            if len(heights) != 1:
                raise ValueError("inconsistent block heights")
        for j in range(len(grid[0])):
            widths = {brow[j].cols for brow in grid}
            if len(widths) != 1:
                raise ValueError("inconsistent block widths")
        out = []
        for brow in grid:
            for i in range(brow[0].rows):
                row: list = []
                for b in brow:
                    if b.ring != ring:
                        raise ValueError("mixed rings in block grid")
                    row.extend(b.entries[i])
                out.append(tuple(row))
        cols = len(out[0]) if out else sum(b.cols for b in grid[0])
        return Matrix(ring, len(out), cols, tuple(out))

    # -- arithmetic ----------------------------------------------------

    def _check_same_shape(self, other: "Matrix"):
        if self.ring != other.ring:
            raise ValueError(f"mixed rings: {self.ring} vs {other.ring}")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        add = self.ring.add
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(add(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(neg(a) for a in row) for row in self.entries))

    def __mul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.ring != other.ring:
            raise ValueError(f"mixed rings: {self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ring = self.ring
        add, mul, zero = ring.add, ring.mul, ring.zero()
        ot = other.transpose().entries
        out = []
        for row in self.entries:
            orow = []
            for j in range(other.cols):
                col = ot[j]
                acc = zero
                for a, b in zip(row, col):
                    acc = add(acc, mul(a, b))
                orow.append(acc)
            out.append(tuple(orow))
        return Matrix(ring, self.rows, other.cols, tuple(out))

    def scale(self, c) -> "Matrix":
        c = self.ring.normalize(c)
        mul = self.ring.mul
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(mul(c, a) for a in row) for row in self.entries))

    def transpose(self) -> "Matrix":
        if self.rows == 0:
            return Matrix(self.ring, self.cols, 0, tuple(() for _ in range(self.cols)))
        return Matrix(self.ring, self.cols, self.rows, tuple(zip(*self.entries)))

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product, row-major convention."""
        if self.ring != other.ring:
            raise ValueError("mixed rings")
        mul = self.ring.mul
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    a = self.entries[i][j]
                    row.extend(mul(a, b) for b in other.entries[k])
                out.append(tuple(row))
        return Matrix(self.ring, self.rows * other.rows, self.cols * other.cols, tuple(out))

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        z = self.ring.zero()
        return all(a == z for row in self.entries for a in row)

    def is_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        return self == Matrix.identity(self.ring, self.rows)

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def column(self, j: int) -> "Matrix":
        return Matrix(self.ring, self.rows, 1, tuple((row[j],) for row in self.entries))

    def hstack(self, other: "Matrix") -> "Matrix":
        return Matrix.block([[self, other]])

    def vstack(self, other: "Matrix") -> "Matrix":
        return Matrix.block([[self], [other]])

    def with_entry(self, i: int, j: int, value) -> "Matrix":
        value = self.ring.normalize(value)
        rows = [list(r) for r in self.entries]
        rows[i][j] = value
        return Matrix(self.ring, self.rows, self.cols, tuple(tuple(r) for r in rows))

    def __repr__(self):
        if self.rows == 0 or self.cols == 0:
            return f"Matrix({self.ring}, {self.rows}x{self.cols})"
        body = "; ".join(" ".join(str(a) for a in row) for row in self.entries)
        return f"Matrix({self.ring}, [{body}])"


# ---------------------------------------------------------------------
# Smith normal form over Z
# ---------------------------------------------------------------------


def smith_normal_form(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form with unimodular witnesses, U * A * V = D.

    D is diagonal with nonnegative entries d_1 | d_2 | ... and trailing
    zeros; U and V have determinant +-1.

    Example:
        >>> from homcert.exactalg import Matrix, ZZ, smith_normal_form
        >>> a = Matrix.from_rows(ZZ, [[2, 0], [0, 3]])
        >>> u, d, v = smith_normal_form(a)
        >>> d.entries
        ((1, 0), (0, 6))
        >>> (u * a * v) == d
        True
    """
    if a.ring != ZZ:
        raise ValueError("smith_normal_form requires the ring Z")
    r, c = a.rows, a.cols
    d = [list(row) for row in a.entries]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def row_sub(i, k, q):  # row i -= q * row k
        d[i] = [x - q * y for x, y in zip(d[i], d[k])]
        u[i] = [x - q * y for x, y in zip(u[i], u[k])]

    def col_sub(j, k, q):  # col j -= q * col k
        for row in d:
            row[j] -= q * row[k]
        for row in v:
            row[j] -= q * row[k]

    def row_swap(i, k):
        d[i], d[k] = d[k], d[i]
        u[i], u[k] = u[k], u[i]

    def col_swap(j, k):
        for row in d:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    def pivot_at(t):
        """Clear row t and column t except for the (t, t) entry."""
        while True:
            # smallest nonzero magnitude in the trailing block -> (t, t)
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    if d[i][j] != 0 and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return False
            if best != (t, t):
                if best[0] != t:
                    row_swap(t, best[0])
                if best[1] != t:
                    col_swap(t, best[1])
            dirty = False
            for i in range(t + 1, r):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    row_sub(i, t, q)
                    if d[i][t] != 0:
                        dirty = True
            for j in range(t + 1, c):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    col_sub(j, t, q)
                    if d[t][j] != 0:
                        dirty = True
            if not dirty:
                return True

    t = 0
    while t < min(r, c) and pivot_at(t):
        t += 1
    rank = t

    # Divisibility chain: repair adjacent pairs until stable.
    stable = False
    while not stable:
        stable = True
        for k in range(rank - 1):
            a_k, a_n = d[k][k], d[k + 1][k + 1]
            if a_n % a_k != 0:
                # fold column k+1 into column k and re-eliminate
                col_sub(k, k + 1, -1)
                pivot_at(k)
                pivot_at(k + 1)
                stable = False

    for k in range(rank):
        if d[k][k] < 0:
            d[k] = [-x for x in d[k]]
            u[k] = [-x for x in u[k]]

    U = Matrix.from_rows(ZZ, u)
    V = Matrix.from_rows(ZZ, v)
    D = Matrix.from_rows(ZZ, d)
    return U, D, V


def det(a: Matrix):
    """Determinant of a square matrix (exact, fraction-free over Z)."""
    if a.rows != a.cols:
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return a.ring.one()
    if a.ring == ZZ or isinstance(a.ring, ModularRing):
        m = [[int(x) for x in row] for row in a.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return a.ring.from_int(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return a.ring.from_int(sign * m[n - 1][n - 1])
    # field with fractions: plain elimination
    m = [[Fraction(x) for x in row] for row in a.entries]
    sign = 1
    acc = Fraction(1)
    for k in range(n):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return a.ring.from_int(0)
        acc *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return a.ring.normalize(sign * acc)


def is_invertible(a: Matrix) -> bool:
    if a.rows != a.cols:
        return False
    return a.ring.is_unit(det(a))


def inverse(a: Matrix) -> Matrix:
    inv = solve_right(a, Matrix.identity(a.ring, a.rows))
    if inv is None or not (inv * a).is_identity():
        raise ValueError("matrix is not invertible over its ring")
    return inv


# ---------------------------------------------------------------------
# Right-solving
# ---------------------------------------------------------------------


def _solve_field(a: Matrix, b: Matrix) -> Optional[Matrix]:
    ring = a.ring
    n, c = a.rows, a.cols
    k = b.cols
    aug = [[*map(ring.normalize, row_a), *map(ring.normalize, row_b)]
           for row_a, row_b in zip(a.entries, b.entries)]
    if isinstance(ring, ModularRing):
        inv_cache = {x: pow(x, -1, ring.modulus) for x in range(ring.modulus) if ring.is_unit(x)}
        def invert(x):
            return inv_cache[x]
    else:
        def invert(x):
            return 1 / x
    pivots = []
    row = 0
    for col in range(c):
        sel = None
        for i in range(row, n):
            if aug[i][col] != ring.zero():
                sel = i
                break
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        f = invert(aug[row][col])
        aug[row] = [ring.mul(f, x) for x in aug[row]]
        for i in range(n):
            if i != row and aug[i][col] != ring.zero():
                g = aug[i][col]
                aug[i] = [ring.sub(x, ring.mul(g, y)) for x, y in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    for i in range(row, n):
        if any(x != ring.zero() for x in aug[i][c:]):
            return None
    x = [[ring.zero()] * k for _ in range(c)]
    for r_i, col in enumerate(pivots):
        for j in range(k):
            x[col][j] = aug[r_i][c + j]
    return Matrix.from_rows(ring, x) if c else Matrix(ring, 0, k, ())


class SmithSolver:
    """Factor A over Z once; then solve A*X = B repeatedly.

    Also exposes an integer basis of ker(A), which downstream code uses to
    vary solutions (different homotopy lifts for the same scalar).
    """

    def __init__(self, a: Matrix):
        if a.ring != ZZ:
            raise ValueError("SmithSolver requires the ring Z")
        self.a = a
        self.u, self.d, self.v = smith_normal_form(a)
        self.diag = [self.d.entries[i][i] for i in range(min(a.rows, a.cols))]
        self.rank = sum(1 for x in self.diag if x != 0)

    def solve(self, b: Matrix) -> Optional[Matrix]:
        if b.rows != self.a.rows:
            raise ValueError("shape mismatch in solve")
        cb = self.u * b
        y_rows = []
        for i in range(self.a.cols):
            if i < len(self.diag) and self.diag[i] != 0:
                di = self.diag[i]
                row = []
                for j in range(b.cols):
                    q, rem = divmod(cb.entries[i][j], di)
                    if rem:
                        return None
                    row.append(q)
                y_rows.append(row)
            else:
                y_rows.append([0] * b.cols)
        for i in range(self.a.rows):
            if i >= len(self.diag) or self.diag[i] == 0:
                if any(cb.entries[i][j] != 0 for j in range(b.cols)):
                    return None
        y = Matrix.from_rows(ZZ, y_rows) if self.a.cols else Matrix(ZZ, 0, b.cols, ())
        return self.v * y

    def kernel_basis(self) -> list[Matrix]:
        basis = []
        for i in range(self.a.cols):
            if i >= len(self.diag) or self.diag[i] == 0:
                basis.append(self.v.column(i))
        return basis


def solve_right(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """One solution X of A*X = B, or None when no solution exists.

    Complete over Z (Smith form), over fields (elimination), and over any
    Z/m (lift to an augmented integer system A*X + m*W = B).

    Example:
        >>> from homcert.exactalg import Matrix, ZZ, solve_right
        >>> a = Matrix.from_rows(ZZ, [[2]])
        >>> solve_right(a, Matrix.from_rows(ZZ, [[4]])).entries
        ((2,),)
        >>> solve_right(a, Matrix.from_rows(ZZ, [[3]])) is None
        True
    """
    if a.ring != b.ring:
        raise ValueError("mixed rings in solve_right")
    if a.rows != b.rows:
        raise ValueError(f"shape mismatch: A has {a.rows} rows, B has {b.rows}")
    ring = a.ring
    if ring == ZZ:
        return SmithSolver(a).solve(b)
    if ring == QQ:
        return _solve_field(a, b)
    if isinstance(ring, ModularRing):
        m = ring.modulus
        lift_a = Matrix.from_rows(ZZ, [[int(x) for x in row] for row in a.entries]) \
            if a.rows else Matrix(ZZ, 0, a.cols, ())
        lift_b = Matrix.from_rows(ZZ, [[int(x) for x in row] for row in b.entries]) \
            if b.rows else Matrix(ZZ, 0, b.cols, ())
        aug = lift_a.hstack(Matrix.scalar(ZZ, a.rows, m)) if a.rows else Matrix(ZZ, 0, a.cols + a.rows, ())
        sol = solve_right(aug, lift_b)
        if sol is None:
            return None
        x = [[sol.entries[i][j] % m for j in range(b.cols)] for i in range(a.cols)]
        return Matrix.from_rows(ring, x) if a.cols else Matrix(ring, 0, b.cols, ())
    raise ValueError(f"unsupported ring: {ring}")


def rank(a: Matrix) -> int:
    """Rank over Z (via Smith form) or over a field (via elimination)."""
    ring = a.ring
    if ring == ZZ:
        _, d, _ = smith_normal_form(a)
        return sum(1 for i in range(min(a.rows, a.cols)) if d.entries[i][i] != 0)
    if ring.is_field:
        n, c = a.rows, a.cols
        m = [list(map(ring.normalize, row)) for row in a.entries]
        if isinstance(ring, ModularRing):
            def invert(x):
                return pow(x, -1, ring.modulus)
        else:
            def invert(x):
                return 1 / x
        rk = 0
        for col in range(c):
            sel = None
            for i in range(rk, n):
                if m[i][col] != ring.zero():
                    sel = i
                    break
            if sel is None:
                continue
            m[rk], m[sel] = m[sel], m[rk]
            f = invert(m[rk][col])
            m[rk] = [ring.mul(f, x) for x in m[rk]]
            for i in range(n):
                if i != rk and m[i][col] != ring.zero():
                    g = m[i][col]
                    m[i] = [ring.sub(x, ring.mul(g, y)) for x, y in zip(m[i], m[rk])]
            rk += 1
            if rk == n:
                break
        return rk
    raise ValueError(f"rank is not supported over {ring}")


def elementary_divisors(a: Matrix) -> list[int]:
    """Nontrivial invariant factors (> 1) of an integer matrix."""
    _, d, _ = smith_normal_form(a)
    out = []
    for i in range(min(a.rows, a.cols)):
        x = d.entries[i][i]
        if x > 1:
            out.append(x)
    return out
