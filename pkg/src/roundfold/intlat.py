"""Exact integer-matrix algebra for finitely generated abelian groups.

Everything here runs on Python's arbitrary-precision integers; there is no
floating point anywhere.  The central routine is :func:`snf`, which brings an
integer matrix to Smith normal form

    U * A * V = D

with U, V unimodular and D diagonal with a divisor chain d1 | d2 | ... on the
diagonal.  From it we derive cokernels (presentations of finitely generated
abelian groups), subgroup structure, and homology with changed coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


class IntMatrix:
    """A rows x cols matrix of Python ints, stored row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("entry count does not match shape")
        self.rows = rows
        self.cols = cols
        self.data = [list(map(int, r)) for r in data]

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def from_columns(cls, rows, columns):
        """Build a rows x len(columns) matrix from column vectors."""
        for c in columns:
            if len(c) != rows:
                raise ValueError("column length does not match row count")
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def copy(self):
        return IntMatrix(self.rows, self.cols, self.data)

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        out = [[0] * other.cols for _ in range(self.rows)]
        for i in range(self.rows):
            row = self.data[i]
            for k in range(self.cols):
                a = row[k]
                if a == 0:
                    continue
                orow = other.data[k]
                orow_out = out[i]
                for j in range(other.cols):
                    orow_out[j] += a * orow[j]
        return IntMatrix(self.rows, other.cols, out)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {self.data})"

    def diagonal(self):
        return [self.data[i][i] for i in range(min(self.rows, self.cols))]

    def is_diagonal(self):
        return all(self.data[i][j] == 0
                   for i in range(self.rows) for j in range(self.cols) if i != j)

    def det(self):
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [row[:] for row in self.data]
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
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    # Division is exact: Bareiss invariant.
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SNFDecomposition:
    """Witnessed Smith normal form: u @ a @ v == d."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self):
        return self.d.diagonal()


def _exgcd(a, b):
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def snf(a: IntMatrix) -> SNFDecomposition:
    """Smith normal form of an arbitrary integer matrix.

    Returns U, D, V with U*A*V = D, det(U) = +-1, det(V) = +-1, D diagonal
    with nonnegative entries forming a divisor chain.  Works for any shape,
    including 0 x n and n x 0.  Pivots are re-chosen each pass as the entry of
    smallest nonzero absolute value in the remaining submatrix, and clearing
    uses single-shot extended-gcd 2x2 transforms; both choices bound entry
    growth in practice, and D itself is unique whatever the strategy.
    """
    m, n = a.rows, a.cols
    d = [row[:] for row in a.data]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_swap(i, j):
        if i != j:
            d[i], d[j] = d[j], d[i]
            u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        if i != j:
            for r in d:
                r[i], r[j] = r[j], r[i]
            for r in v:
                r[i], r[j] = r[j], r[i]

    def row_addmul(i, j, q):
        # row_i += q * row_j
        di, dj = d[i], d[j]
        for k in range(n):
            di[k] += q * dj[k]
        ui, uj = u[i], u[j]
        for k in range(m):
            ui[k] += q * uj[k]

    def row_combine(i, j):
        # Unimodular transform putting gcd(d[i][*pivot col*], ...) in place:
        # rows (i, j) <- (x*row_i + y*row_j, -(b//g)*row_i + (a//g)*row_j)
        # where a, b are the pivot-column entries.  Determinant is 1.
        a_, b_ = d[i][i], d[j][i]
        g, x, y = _exgcd(a_, b_)
        p, q = -(b_ // g), a_ // g
        for mat, width in ((d, n), (u, m)):
            ri, rj = mat[i], mat[j]
            for k in range(width):
                ri[k], rj[k] = x * ri[k] + y * rj[k], p * ri[k] + q * rj[k]

    def col_combine(i, j):
        a_, b_ = d[i][i], d[i][j]
        g, x, y = _exgcd(a_, b_)
        p, q = -(b_ // g), a_ // g
        for mat in (d, v):
            for r in mat:
                r[i], r[j] = x * r[i] + y * r[j], p * r[i] + q * r[j]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    def find_pivot(t):
        best = None
        for i in range(t, m):
            row = d[i]
            for j in range(t, n):
                x = row[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        return best[1], best[2]
        return None if best is None else (best[1], best[2])

    t = 0
    while t < min(m, n):
        if find_pivot(t) is None:
            break
        while True:
            piv = find_pivot(t)
            row_swap(t, piv[0])
            col_swap(t, piv[1])
            for i in range(t + 1, m):
                b = d[i][t]
                if b != 0:
                    if b % d[t][t] == 0:
                        row_addmul(i, t, -(b // d[t][t]))
                    else:
                        row_combine(t, i)
            for j in range(t + 1, n):
                b = d[t][j]
                if b != 0:
                    if b % d[t][t] == 0:
                        # col_j += q * col_t touches only column j.
                        q = -(b // d[t][t])
                        for r in d:
                            r[j] += q * r[t]
                        for r in v:
                            r[j] += q * r[t]
                    else:
                        col_combine(t, j)
            if any(d[i][t] for i in range(t + 1, m)):
                continue
            if any(d[t][j] for j in range(t + 1, n)):
                continue
            # Divisor-chain repair: the pivot must divide the whole submatrix.
            dt = d[t][t]
            offender = None
            for i in range(t + 1, m):
                row = d[i]
                for j in range(t + 1, n):
                    if row[j] % dt != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(t, offender, 1)

        if d[t][t] < 0:
            row_negate(t)
        t += 1

    return SNFDecomposition(
        IntMatrix(m, m, u), IntMatrix(m, n, d), IntMatrix(n, n, v)
    )


def _invariant_factors(divisors):
    """Canonical divisor chain of ⊕ Z/d over the given divisors.

    Drops units, keeps entries >= 2, and merges until d_i | d_{i+1} holds
    throughout, using gcd/lcm exchanges (which preserve the group).
    """
    ds = sorted(abs(int(x)) for x in divisors if abs(int(x)) >= 2)
    changed = True
    while changed:
        changed = False
        for i in range(len(ds) - 1):
            a, b = ds[i], ds[i + 1]
            if b % a != 0:
                g = gcd(a, b)
                ds[i], ds[i + 1] = g, a * b // g
                changed = True
        if changed:
            ds = [x for x in sorted(ds) if x >= 2]
    return tuple(ds)


@dataclass(frozen=True)
class FGAbelianGroup:
    """A finitely generated abelian group in canonical form.

    ``rank`` free summands plus cyclic summands Z/d for the ``torsion``
    divisor chain (each entry >= 2, each dividing the next).  Units are never
    stored and zero divisors count toward the rank, so equality of values is
    isomorphism of groups.
    """

    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        prev = None
        for t in self.torsion:
            if t < 2:
                raise ValueError("torsion entries must be >= 2")
            if prev is not None and t % prev != 0:
                raise ValueError("torsion entries must form a divisor chain")
            prev = t

    @classmethod
    def from_divisors(cls, divisors, extra_rank=0):
        """Canonicalize an arbitrary divisor list; 0 entries add to the rank."""
        divisors = list(divisors)
        rank = extra_rank + sum(1 for d in divisors if d == 0)
        return cls(rank, _invariant_factors(d for d in divisors if d != 0))

    @classmethod
    def trivial(cls):
        return cls(0, ())

    @classmethod
    def free(cls, rank):
        return cls(rank, ())

    def direct_sum(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        return FGAbelianGroup(self.rank + other.rank,
                              _invariant_factors(self.torsion + other.torsion))

    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def cokernel(a: IntMatrix) -> FGAbelianGroup:
    """Z^rows modulo the column span of ``a``, in canonical form."""
    diag = snf(a).diagonal
    free = a.rows - sum(1 for d in diag if d != 0)
    return FGAbelianGroup.from_divisors((d for d in diag if d != 0), extra_rank=free)


def subgroup_structure(ambient: FGAbelianGroup, generators) -> FGAbelianGroup:
    """Isomorphism class of the subgroup generated by the given elements.

    Elements of ``ambient`` = Z^rank ⊕ Z/d1 ⊕ ... are coordinate vectors of
    length rank + len(torsion).  We lift to the free presentation Z^n with
    relation lattice R spanned by d_i * e_{rank+i}, form the lattice L spanned
    by the lifted generators together with R, and return L/R, computed through
    two Smith normal forms.
    """
    n = ambient.rank + len(ambient.torsion)
    gens = [list(map(int, g)) for g in generators]
    for g in gens:
        if len(g) != n:
            raise ValueError(
                f"generator has {len(g)} coordinates, ambient needs {n}")

    relations = []
    for i, d in enumerate(ambient.torsion):
        col = [0] * n
        col[ambient.rank + i] = d
        relations.append(col)

    span = IntMatrix.from_columns(n, gens + relations)
    dec = snf(span)
    diag = dec.diagonal
    lat_rank = sum(1 for d in diag if d != 0)

    # Coordinates of each relation in the lattice basis {U^-1 (d_i e_i)}:
    # solve diag(d) * x = U*w, exact because w lies in the lattice.
    rel_coords = []
    for col in relations:
        uw = [sum(dec.u.data[i][k] * col[k] for k in range(n)) for i in range(n)]
        coord = []
        for i in range(lat_rank):
            if uw[i] % diag[i] != 0:
                raise AssertionError("relation does not lie in the lattice")
            coord.append(uw[i] // diag[i])
        if any(uw[i] != 0 for i in range(lat_rank, n)):
            raise AssertionError("relation does not lie in the lattice")
        rel_coords.append(coord)

    return cokernel(IntMatrix.from_columns(lat_rank, rel_coords))


def is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def coefficients(groups, ring):
    """Homology of the same space with coefficients changed via universal
    coefficients.

    ``groups`` is integral homology indexed by degree.  ``ring`` is ``"z"``
    (returns the groups unchanged), ``"q"`` (returns Betti numbers), or
    ``"mod:p"`` for a prime p (returns dimensions over Z/p, picking up both
    the p-torsion of H_n and the Tor term from H_{n-1}).
    """
    groups = list(groups)
    if ring == "z":
        return groups
    if ring == "q":
        return [g.rank for g in groups]
    if isinstance(ring, str) and ring.startswith("mod:"):
        try:
            p = int(ring[4:])
        except ValueError:
            raise ValueError(f"malformed coefficient ring {ring!r}") from None
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        dims = []
        for idx, g in enumerate(groups):
            dim = g.rank + sum(1 for d in g.torsion if d % p == 0)
            if idx > 0:
                dim += sum(1 for d in groups[idx - 1].torsion if d % p == 0)
            dims.append(dim)
        return dims
    raise ValueError(f"unknown coefficient ring {ring!r}")
