"""Bilinear forms, twisted conjugacy classes and the odd orthogonal embedding.

All linear algebra is exact over the rationals: rank decisions transfer to
the p-adic field (rank of a rational matrix is the same over any field of
characteristic zero), and square-class decisions use the exact Hensel
criteria from ``field``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .field import SquareClass, square_class, valuation

Matrix = tuple  # tuple of tuples of Fraction


class NotInGroupError(ValueError):
    pass


class DegenerateFormError(ValueError):
    pass


class NotRegularError(ValueError):
    def __init__(self, msg, fixed_dim=None):
        super().__init__(msg)
        self.fixed_dim = fixed_dim


# -- exact matrix helpers ------------------------------------------------------

def mat(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n))
                 for i in range(n))


def zeros(n: int, m: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(map(tuple, zip(*a)))


def mat_add(a: Matrix, b: Matrix, sign: int = 1) -> Matrix:
    return tuple(tuple(x + sign * y for x, y in zip(ra, rb))
                 for ra, rb in zip(a, b))


def mat_scale(a: Matrix, c) -> Matrix:
    c = Fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
                 for row in a)


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _elimination(a: Matrix):
    """Fraction Gaussian elimination; returns (rank, det, row-echelon rows)."""
    rows = [list(r) for r in a]
    n, m = len(rows), len(rows[0]) if rows else 0
    det = Fraction(1)
    rank, pr = 0, 0
    for col in range(m):
        piv = next((r for r in range(pr, n) if rows[r][col] != 0), None)
        if piv is None:
            det = Fraction(0)
            continue
        if piv != pr:
            rows[pr], rows[piv] = rows[piv], rows[pr]
            det = -det
        det *= rows[pr][col]
        inv = Fraction(1) / rows[pr][col]
        rows[pr] = [x * inv for x in rows[pr]]
        for r in range(n):
            if r != pr and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[pr])]
        pr += 1
        rank += 1
    if rank < min(n, m) or n != m:
        det = Fraction(0)
    return rank, det, rows


def rank(a: Matrix) -> int:
    return _elimination(a)[0]


def det(a: Matrix) -> Fraction:
    if len(a) != len(a[0]):
        raise ValueError("determinant of a non-square matrix")
    return _elimination(a)[1]


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = tuple(tuple(list(row) + [Fraction(1 if i == j else 0) for j in range(n)])
                for i, row in enumerate(a))
    r, _, rows = _elimination(aug)
    if any(all(rows[i][j] == 0 for j in range(n)) for i in range(n)):
        raise DegenerateFormError("matrix is singular")
    return tuple(tuple(rows[i][n:]) for i in range(n))


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve a x = b for square invertible a."""
    return mat_mul(inverse(a), b)


def charpoly(a: Matrix) -> tuple:
    """Monic characteristic polynomial det(T I - a), coefficients from the
    constant term up (Faddeev-LeVerrier, exact)."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        tr = sum(m[i][i] for i in range(n))
        c = -tr / k
        coeffs[n - k] = c
        m = mat_add(m, mat_scale(identity(n), c))
    return tuple(coeffs)


def poly_mul(p: tuple, q: tuple) -> tuple:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return tuple(out)


def poly_is_squarefree(p: tuple) -> bool:
    """gcd(p, p') is constant; coefficients from the constant term up."""
    dp = tuple(i * c for i, c in enumerate(p))[1:]
    a, b = list(p), list(dp)
    while any(c != 0 for c in b):
        a, b = b, _poly_mod(a, b)
    return len([c for c in a if c != 0]) <= 1 and a[0] != 0 if a else False


def _poly_mod(a, b):
    a = list(a)
    while len(b) > 1 and b[-1] == 0:
        b = b[:-1]
    while len(a) >= len(b) and any(c != 0 for c in a):
        while len(a) > 1 and a[-1] == 0:
            a = a[:-1]
        if len(a) < len(b):
            break
        f = a[-1] / b[-1]
        k = len(a) - len(b)
        for i, c in enumerate(b):
            a[k + i] -= f * c
        a = a[:-1]
    return a


# -- bilinear forms -------------------------------------------------------------


@dataclass(frozen=True)
class BilForm:
    """B(x, y) = x^T gram y."""

    gram: Matrix

    def __post_init__(self):
        object.__setattr__(self, "gram", mat(self.gram))
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise ValueError("Gram matrix must be square")

    @property
    def d(self) -> int:
        return len(self.gram)

    def is_nondegenerate(self) -> bool:
        return det(self.gram) != 0

    def sym_part(self) -> Matrix:
        """B^s with Gram gamma + gamma^T (so 2B = B^s + B^a)."""
        return mat_add(self.gram, transpose(self.gram))

    def alt_part(self) -> Matrix:
        return mat_add(self.gram, transpose(self.gram), sign=-1)

    def to_dict(self) -> dict:
        return {"matrix": [[str(x) for x in row] for row in self.gram]}

    @classmethod
    def from_dict(cls, d: dict) -> "BilForm":
        return cls(mat([[Fraction(x) for x in row] for row in d["matrix"]]))


def split_sym_alt(b: BilForm) -> tuple[Matrix, Matrix]:
    return b.sym_part(), b.alt_part()


@dataclass(frozen=True)
class OrbitLabel:
    kind: str  # "gamma_t" | "gamma_0" | "outside_sharp"
    t: Optional[SquareClass] = None

    def __repr__(self):
        if self.kind == "gamma_t":
            return f"gamma_t({self.t.representative()})"
        return self.kind


def symmetric_diagonalize(s: Matrix) -> list[Fraction]:
    """Exact congruence diagonalization of a symmetric matrix; returns the
    diagonal entries (including zeros)."""
    a = [list(r) for r in s]
    n = len(a)
    for i in range(n):
        if a[i][i] == 0:
            # find j > i with a[j][j] != 0 or a[i][j] != 0 and fix the pivot
            piv = next((j for j in range(i, n) if a[j][j] != 0), None)
            if piv is not None and piv != i:
                _congr_swap(a, i, piv)
            elif piv is None:
                j = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if j is None:
                    continue  # whole row/col zero from here on this index
                _congr_add(a, i, j, Fraction(1))  # row/col_i += row/col_j
        if a[i][i] == 0:
            continue
        for j in range(i + 1, n):
            if a[i][j] != 0:
                _congr_add(a, j, i, -a[i][j] / a[i][i])
    return [a[i][i] for i in range(n)]


def _congr_swap(a, i, j):
    a[i], a[j] = a[j], a[i]
    for row in a:
        row[i], row[j] = row[j], row[i]


def _congr_add(a, i, j, c):
    """row_i += c * row_j, then col_i += c * col_j (congruence)."""
    n = len(a)
    for k in range(n):
        a[i][k] += c * a[j][k]
    for k in range(n):
        a[k][i] += c * a[k][j]


def classify_sharp(b: BilForm, p: int) -> OrbitLabel:
    """Orbit label of a nondegenerate form: gamma_t if the symmetric part has
    rank one of class t and the alternating part has maximal rank, gamma_0
    for alternating forms in even dimension, outside_sharp otherwise."""
    if not b.is_nondegenerate():
        raise DegenerateFormError("classify_sharp needs a nondegenerate form")
    d = b.d
    s, a = b.sym_part(), b.alt_part()
    rs = rank(s)
    if rs == 0:
        if d % 2 == 0:
            return OrbitLabel("gamma_0")
        raise AssertionError("odd-dimensional nondegenerate alternating form")
    if rs == 1:
        ra = rank(a)
        max_rank = d if d % 2 == 0 else d - 1
        if ra == max_rank:
            diag = [x for x in symmetric_diagonalize(s) if x != 0]
            assert len(diag) == 1
            return OrbitLabel("gamma_t", square_class(diag[0], p))
        return OrbitLabel("outside_sharp")
    return OrbitLabel("outside_sharp")


def gamma_t_representative(t: SquareClass, d: int) -> BilForm:
    """An explicit form with alternating part of maximal rank and symmetric
    part of rank one and class t."""
    if d < 1:
        raise ValueError("d must be >= 1")
    c = Fraction(t.representative(), 2)
    g = [[Fraction(0)] * d for _ in range(d)]
    g[0][0] = c  # B^s = 2c E_11, class(2c) = t
    start = 1 if d % 2 == 1 else 0
    if d % 2 == 0:
        # rank-1 correction sits on a symplectic pair to keep nondegeneracy
        g[0][1] += Fraction(1, 2)
        g[1][0] += Fraction(-1, 2)
        start = 2
    for i in range(start, d - 1, 2):
        g[i][i + 1] = Fraction(1, 2)
        g[i + 1][i] = Fraction(-1, 2)
    return BilForm(mat(g))


def disc_twisted(b: BilForm, p: int) -> SquareClass:
    """Square class of det(gram); invariant under the twisted conjugation."""
    dv = det(b.gram)
    if dv == 0:
        raise DegenerateFormError("discriminant of a degenerate form")
    return square_class(dv, p)


def twisted_conjugate(b: BilForm, m: Matrix) -> BilForm:
    """Ad(m) B: gram -> m^{-T} gram m^{-1}."""
    mi = inverse(m)
    return BilForm(mat_mul(transpose(mi), mat_mul(b.gram, mi)))


def scale_form(b: BilForm, a) -> BilForm:
    return BilForm(mat_scale(b.gram, a))


def char_poly_twisted(b: BilForm) -> tuple:
    """Characteristic polynomial of gram^{-T} gram, exact coefficients."""
    if not b.is_nondegenerate():
        raise DegenerateFormError("char_poly_twisted needs a nondegenerate form")
    m = mat_mul(inverse(transpose(b.gram)), b.gram)
    return charpoly(m)


def correspond_char_poly(coeffs: tuple, flavor: str) -> tuple:
    """Map a monic degree-2n characteristic polynomial to the twisted-space
    side: chi(-T) in the orthogonal-even flavor, chi(T)(T-1) in the
    symplectic-odd flavor."""
    coeffs = tuple(Fraction(c) for c in coeffs)
    deg = len(coeffs) - 1
    if coeffs[-1] != 1:
        raise ValueError("input polynomial must be monic")
    if deg % 2 != 0:
        raise ValueError("input polynomial must have even degree")
    if flavor == "orthogonal-even":
        return tuple(c * (-1) ** i for i, c in enumerate(coeffs))
    if flavor == "symplectic-odd":
        return poly_mul(coeffs, (Fraction(-1), Fraction(1)))
    raise ValueError(f"unknown flavor {flavor!r}")


# -- twisted Weyl discriminant ---------------------------------------------------


def _theta_matrix(gram: Matrix) -> Matrix:
    """Matrix of X -> -gram^{-1} X^T gram on gl_d, in the basis E_ij
    (row-major)."""
    d = len(gram)
    gi = inverse(gram)
    cols = []
    for i in range(d):
        for j in range(d):
            e = [[Fraction(0)] * d for _ in range(d)]
            e[i][j] = Fraction(1)
            th = mat_scale(mat_mul(gi, mat_mul(transpose(mat(e)), gram)), -1)
            cols.append([th[a][b] for a in range(d) for b in range(d)])
    return tuple(tuple(cols[c][r] for c in range(d * d)) for r in range(d * d))


def _kernel_basis(a: Matrix) -> list:
    """Basis of the kernel of a (list of coefficient vectors)."""
    n, m = len(a), len(a[0])
    _, _, rows = _elimination(a)
    pivots = {}
    for r in rows:
        lead = next((j for j, x in enumerate(r) if x != 0), None)
        if lead is not None:
            pivots[lead] = r
    free = [j for j in range(m) if j not in pivots]
    basis = []
    for j in free:
        v = [Fraction(0)] * m
        v[j] = Fraction(1)
        for lead, r in pivots.items():
            v[lead] = -r[j]
        basis.append(v)
    return basis


def twisted_fixed_space(b: BilForm) -> list:
    """Basis of the fixed Lie algebra of the twisted adjoint action."""
    d = b.d
    th = _theta_matrix(b.gram)
    one_minus = mat_add(identity(d * d), th, sign=-1)
    return _kernel_basis(one_minus)


def weyl_discriminant_twisted(b: BilForm, p: int, q: int) -> float:
    """|det(1 - Ad(gamma) on gl_d / fixed)| in the normalized absolute value
    q^{-v}.  Requires the form to be strongly regular: fixed space of the
    minimal dimension floor(d/2), abelian, and semisimple transverse part."""
    if not b.is_nondegenerate():
        raise DegenerateFormError("Weyl discriminant of a degenerate form")
    d = b.d
    # eigenvalue collisions of the twisted action enlarge the stabilizer
    # beyond a torus (every stabilizer element commutes with gram^{-T} gram)
    if not poly_is_squarefree(char_poly_twisted(b)):
        raise NotRegularError("eigenvalue collision in the twisted action",
                              fixed_dim=None)
    th = _theta_matrix(b.gram)
    n2 = d * d
    one_minus = mat_add(identity(n2), th, sign=-1)
    fix = _kernel_basis(one_minus)
    k = len(fix)
    if k != d // 2:
        raise NotRegularError(
            f"fixed space has dimension {k}, expected {d // 2}", fixed_dim=k)
    if rank(mat_mul(one_minus, one_minus)) != n2 - k:
        raise NotRegularError("transverse part of 1 - Ad(gamma) is not "
                              "semisimple", fixed_dim=k)
    # abelian check on the fixed algebra
    mats = [tuple(tuple(v[i * d + j] for j in range(d)) for i in range(d))
            for v in fix]
    for i in range(k):
        for j in range(i + 1, k):
            br = mat_add(mat_mul(mats[i], mats[j]), mat_mul(mats[j], mats[i]),
                         sign=-1)
            if any(x != 0 for row in br for x in row):
                raise NotRegularError("twisted centralizer is not abelian",
                                      fixed_dim=k)
    cp = charpoly(one_minus)
    lead = next(c for c in cp if c != 0)  # T^k g(T): +- product of nonzero eigenvalues
    if d == 1:
        assert k == 0
    return float(q) ** (-valuation(lead, p))


# -- odd special orthogonal embedding --------------------------------------------


@dataclass(frozen=True)
class OddSOEmbedding:
    """U = V + L + V* with Q((x,l,x*),(y,m,y*)) = <x,y*> + <y,x*> + l m."""

    d: int

    @property
    def dim(self) -> int:
        return 2 * self.d + 1

    def gram(self) -> Matrix:
        n, d = self.dim, self.d
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(d):
            g[i][d + 1 + i] = Fraction(1)
            g[d + 1 + i][i] = Fraction(1)
        g[d][d] = Fraction(1)
        return mat(g)

    def is_in_group(self, g: Matrix) -> tuple[bool, str]:
        j = self.gram()
        if not mat_eq(mat_mul(transpose(g), mat_mul(j, g)), j):
            return False, "g^T Q g != Q"
        if det(g) != 1:
            return False, "det(g) != 1"
        return True, ""

    def check_in_group(self, g: Matrix):
        ok, why = self.is_in_group(g)
        if not ok:
            raise NotInGroupError(why)

    def levi_element(self, a: Matrix) -> Matrix:
        """diag(A, 1, A^{-T}) in GL(V) = the common Levi."""
        d, n = self.d, self.dim
        ai = transpose(inverse(a))
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(d):
            for j in range(d):
                g[i][j] = a[i][j]
                g[d + 1 + i][d + 1 + j] = ai[i][j]
        g[d][d] = Fraction(1)
        return mat(g)

    def n_bar_element(self, ell: Sequence, s: Matrix) -> Matrix:
        """The element of the lower unipotent radical with linear form ell
        and V -> V* block S; requires S + S^T = -ell ell^T."""
        d, n = self.d, self.dim
        ell = [Fraction(x) for x in ell]
        s = mat(s)
        need = mat([[-ell[i] * ell[j] for j in range(d)] for i in range(d)])
        if not mat_eq(mat_add(s, transpose(s)), need):
            raise NotInGroupError("S + S^T != -ell ell^T")
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(d):
            g[i][i] = Fraction(1)
            g[d + 1 + i][d + 1 + i] = Fraction(1)
            g[d][i] = ell[i]
            g[d + 1 + i][d] = -ell[i]
            for j in range(d):
                g[d + 1 + i][j] = s[i][j]
        g[d][d] = Fraction(1)
        gm = mat(g)
        self.check_in_group(gm)
        return gm

    def n_element(self, w: Sequence, u: Matrix) -> Matrix:
        """Upper unipotent: V* -> V block U and column w with
        U + U^T = -w w^T."""
        d, n = self.d, self.dim
        w = [Fraction(x) for x in w]
        u = mat(u)
        need = mat([[-w[i] * w[j] for j in range(d)] for i in range(d)])
        if not mat_eq(mat_add(u, transpose(u)), need):
            raise NotInGroupError("U + U^T != -w w^T")
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(d):
            g[i][i] = Fraction(1)
            g[d + 1 + i][d + 1 + i] = Fraction(1)
            g[i][d] = w[i]
            g[d][d + 1 + i] = -w[i]
            for j in range(d):
                g[i][d + 1 + j] = u[i][j]
        g[d][d] = Fraction(1)
        gm = mat(g)
        self.check_in_group(gm)
        return gm

    def linear_form_of_nbar(self, g: Matrix) -> list:
        """The V -> L component of an element of the lower unipotent radical."""
        d = self.d
        return [g[d][i] for i in range(d)]


def build_odd_so(d: int) -> OddSOEmbedding:
    if d < 1:
        raise ValueError("d must be >= 1")
    return OddSOEmbedding(d)


def b_of_g(emb: OddSOEmbedding, g: Matrix) -> BilForm:
    """B_g(x, y) = Q(g x, y) restricted to V: the V x V block of g^T Q."""
    emb.check_in_group(g)
    d = emb.d
    tq = mat_mul(transpose(g), emb.gram())
    return BilForm(tuple(tuple(tq[i][j] for j in range(d)) for i in range(d)))


def in_g_prime(emb: OddSOEmbedding, g: Matrix) -> bool:
    return b_of_g(emb, g).is_nondegenerate()


def bruhat_factor(emb: OddSOEmbedding, g: Matrix):
    """Factor g in G' as u1 * mtilde * u2 with u1, u2 upper unipotent and
    mtilde in the twisted Levi component; returns (u1, mtilde, u2)."""
    emb.check_in_group(g)
    d, n = emb.d, emb.dim

    def blk(r0, c0, nr, nc):
        return tuple(tuple(g[r0 + i][c0 + j] for j in range(nc))
                     for i in range(nr))

    g11, g13 = blk(0, 0, d, d), blk(0, d + 1, d, d)
    g21, g22 = blk(d, 0, 1, d), g[d][d]
    g31, g32, g33 = blk(d + 1, 0, d, d), blk(d + 1, d, d, 1), blk(d + 1, d + 1, d, d)
    e = g31
    if det(e) == 0:
        raise DegenerateFormError("g is not in the open cell")
    ei = inverse(e)
    w2 = mat_mul(ei, g32)  # column
    u2m = mat_mul(ei, g33)
    w1row = mat_scale(mat_mul(g21, ei), -1)  # 1 x d
    a = g22 - mat_mul(g21, w2)[0][0]  # a = g22 + w1^T E w2 and w1^T E = -g21
    w1 = [w1row[0][i] for i in range(d)]
    u1m = mat_mul(g11, ei)
    c = mat_add(mat_add(g13, mat_mul(g11, mat_mul(ei, g33)), sign=-1),
                mat_scale(mat_mul(mat(tuple((x,) for x in w1)),
                                  transpose(w2)), a))
    u1 = emb.n_element(w1, u1m)
    u2 = emb.n_element([w2[i][0] for i in range(d)], u2m)
    mt = [[Fraction(0)] * n for _ in range(n)]
    for i in range(d):
        for j in range(d):
            mt[i][d + 1 + j] = c[i][j]
            mt[d + 1 + i][j] = e[i][j]
    mt[d][d] = Fraction(a)
    mt = mat(mt)
    emb.check_in_group(mt)
    if not mat_eq(mat_mul(u1, mat_mul(mt, u2)), g):
        raise AssertionError("Bruhat factorization failed to reconstruct g")
    return u1, mt, u2


def m_tilde_of(emb: OddSOEmbedding, ubar: Matrix) -> Optional[BilForm]:
    """The twisted-Levi component of an element of the lower unipotent
    radical, as a bilinear form on V; None when B_ubar is degenerate."""
    emb.check_in_group(ubar)
    if not in_g_prime(emb, ubar):
        return None
    _, mt, _ = bruhat_factor(emb, ubar)
    return b_of_g(emb, mt)


def closure_family_member(t: SquareClass, d: int, lam) -> BilForm:
    """Ad(a_lambda^{-1}) applied to gamma_t_representative(t, d): reciprocal
    scaling on a symplectic pair fixes the alternating part while the rank-one
    symmetric part dies like lambda^2, landing on gamma_0 at lambda = 0
    (even d)."""
    if d % 2 != 0:
        raise ValueError("the closure family needs even d")
    lam = Fraction(lam)
    base = gamma_t_representative(t, d)
    scale = [Fraction(1)] * d
    scale[0] = lam
    if lam != 0:
        scale[1] = Fraction(1) / lam
    out = [[base.gram[i][j] * scale[i] * scale[j] for j in range(d)]
           for i in range(d)]
    if lam == 0:  # the entrywise limit: the symmetric block vanishes
        out[0][1], out[1][0] = Fraction(1, 2), Fraction(-1, 2)
    return BilForm(mat(out))
