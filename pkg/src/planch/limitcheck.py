"""Numerical verification of the spectral-limit identity.

The left-hand side is a singular s -> 0 limit of symmetric-square-weighted
density integrals over a component of the tempered dual; the right-hand side
is an exterior-square integral over the mirrored subtorus of its orthogonal
locus.  This module compiles both integrands once per component (angles of
every atom become affine forms in the free torus coordinates, with exact
detection of identically-vanishing factors) and evaluates them on midpoint
grids with local subdivision in bands around the singular hyperplanes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .field import LocalFieldSpec, gamma_trivial, gamma_star_trivial
from .spectral import mod1
from .tempered import OrthTriple, TripleConstants, appendix_constants
from .wdrep import (WDRep, ad_atoms, gamma_parts, sym2_atoms, wedge2_atoms)


class BudgetExceeded(RuntimeError):
    pass


class NonGenericPoint(ValueError):
    pass


class NotWeylInvariant(ValueError):
    pass


# -- affine angles ---------------------------------------------------------------


@dataclass(frozen=True)
class AffineAngle:
    """const + sum(coeffs[r] * x_r) in turns, over the free torus coordinates."""

    const: Fraction
    coeffs: tuple

    def __add__(self, other):
        if isinstance(other, AffineAngle):
            return AffineAngle(self.const + other.const,
                               tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))
        return AffineAngle(self.const + Fraction(other), self.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return AffineAngle(-self.const, tuple(-c for c in self.coeffs))

    def __mul__(self, n: int):
        return AffineAngle(self.const * n, tuple(c * n for c in self.coeffs))

    __rmul__ = __mul__

    def is_identically_zero(self) -> bool:
        return mod1(self.const) == 0 and all(c == 0 for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs)


def _as_affine(x, nfree: int) -> AffineAngle:
    if isinstance(x, AffineAngle):
        return x
    return AffineAngle(Fraction(x), (0,) * nfree)


# -- compiled factor programs -----------------------------------------------------


@dataclass
class _Factor:
    const: float       # constant angle part, in turns
    coeffs: np.ndarray  # integer coefficients over free coordinates
    shift: float
    sdir: int
    in_num: bool


@dataclass
class FactorProgram:
    """A gamma factor of a family of representations, ready for grid
    evaluation.  ``dropped`` counts identically-vanishing numerator factors
    removed by regularization (each contributes exactly 1 after pairing with
    a zeta factor)."""

    q: int
    nfree: int
    unit_const: float
    unit_coeffs: np.ndarray
    qpow: float
    exponent: float
    factors: list
    dropped: int = 0
    vanishing_kept: int = 0  # identically-vanishing factors kept (plain eval)

    @classmethod
    def compile(cls, atoms, spec: LocalFieldSpec, nfree: int,
                regularize: bool) -> "FactorProgram":
        atoms = [(_as_affine(u, nfree), m) for (u, m) in atoms]
        unit, qpow, exponent, num, den = gamma_parts(atoms, spec.psi_level)
        unit = _as_affine(unit, nfree)
        factors, dropped, kept = [], 0, 0
        for (a, r, sd) in num:
            a = _as_affine(a, nfree)
            if r == 0 and a.is_identically_zero():
                if regularize:
                    dropped += 1
                    continue
                kept += 1
            factors.append(_Factor(float(a.const), np.array(a.coeffs, dtype=float),
                                   float(r), sd, True))
        for (a, r, sd) in den:
            a = _as_affine(a, nfree)
            if r == 0 and a.is_identically_zero():
                raise ArithmeticError("denominator factor vanishes identically")
            factors.append(_Factor(float(a.const), np.array(a.coeffs, dtype=float),
                                   float(r), sd, False))
        return cls(q=spec.q, nfree=nfree, unit_const=float(unit.const),
                   unit_coeffs=np.array(unit.coeffs, dtype=float),
                   qpow=float(qpow), exponent=float(exponent),
                   factors=factors, dropped=dropped, vanishing_kept=kept)

    def eval(self, t: np.ndarray, s: complex) -> np.ndarray:
        """Evaluate at the grid ``t`` of shape (nfree, M) and the point s."""
        m = t.shape[1] if self.nfree else 1
        phase = self.unit_const + (self.unit_coeffs @ t if self.nfree else 0.0)
        val = np.exp(2j * np.pi * phase) * (self.q ** self.qpow) \
            * self.q ** (-self.exponent * s)
        val = val * np.ones(m, dtype=complex)
        for f in self.factors:
            ang = f.const + (f.coeffs @ t if self.nfree else 0.0)
            g = 1.0 - np.exp(2j * np.pi * ang) * self.q ** (-(f.sdir * s + f.shift))
            if f.in_num:
                val = val * g
            else:
                val = val / g
        return val

    def eval_regularized(self, t: np.ndarray) -> np.ndarray:
        """The regularized value at s = 0 (compile with regularize=True)."""
        return self.eval(t, 0.0)


# -- test functions ----------------------------------------------------------------


class TestFunction:
    """A smooth Weyl-invariant function of a tempered point, evaluated on
    arrays of per-block angles (shape (S, M))."""

    def values(self, dims: tuple, angles: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class ConstantPhi(TestFunction):
    def __init__(self, c: float = 1.0):
        self.c = float(c)

    def values(self, dims, angles):
        return np.full(angles.shape[1], self.c, dtype=complex)

    def describe(self):
        return {"kind": "constant", "c": self.c}


class TrigPhi(TestFunction):
    """const + Re( sum of coeff * powersum_{h,k} ), where powersum_{h,k} is
    the sum of e^{2 pi i h theta_b} over blocks of size k.  Invariant under
    any permutation of equal-size blocks."""

    def __init__(self, terms: Sequence[tuple], const: float = 1.0):
        # terms: (h, k, coeff)
        self.terms = [(int(h), int(k), complex(c)) for (h, k, c) in terms]
        self.const = float(const)

    def values(self, dims, angles):
        out = np.full(angles.shape[1], self.const, dtype=complex)
        dims = np.array(dims)
        for (h, k, c) in self.terms:
            rows = np.nonzero(dims == k)[0]
            if len(rows) == 0:
                continue
            ps = np.exp(2j * np.pi * h * angles[rows, :]).sum(axis=0)
            out = out + (c * ps).real
        return out

    def describe(self):
        return {"kind": "trig", "const": self.const,
                "terms": [[h, k, [c.real, c.imag]] for (h, k, c) in self.terms]}


class GaussianPhi(TestFunction):
    """Product over blocks of a truncated-Fourier Gaussian bump on the
    circle; multiset-invariant by construction."""

    def __init__(self, width: float = 0.35, center: float = 0.0, hmax: int = 8):
        self.width = float(width)
        self.center = float(center)
        self.hmax = int(hmax)

    def _bump(self, theta):
        val = np.ones_like(theta)
        for h in range(1, self.hmax + 1):
            val = val + 2 * math.exp(-(self.width * h) ** 2) * \
                np.cos(2 * np.pi * h * (theta - self.center))
        return val

    def values(self, dims, angles):
        out = np.ones(angles.shape[1], dtype=complex)
        for b in range(angles.shape[0]):
            out = out * self._bump(angles[b, :])
        return out

    def describe(self):
        return {"kind": "gaussian", "width": self.width, "center": self.center,
                "hmax": self.hmax}


def phi_from_dict(d: dict) -> TestFunction:
    kind = d.get("kind", "constant")
    if kind == "constant":
        return ConstantPhi(d.get("c", 1.0))
    if kind == "trig":
        return TrigPhi([(t[0], t[1], complex(t[2][0], t[2][1])) for t in d["terms"]],
                       d.get("const", 1.0))
    if kind == "gaussian":
        return GaussianPhi(d.get("width", 0.35), d.get("center", 0.0),
                           d.get("hmax", 8))
    raise ValueError(f"unknown test-function kind {kind!r}")


def check_weyl_invariance(phi: TestFunction, dims: tuple, rng,
                          samples: int = 32, tol: float = 1e-12):
    """Reject test functions that change under permutations of equal-size
    blocks (sampled)."""
    dims = tuple(dims)
    s = len(dims)
    angles = rng.random((s, samples))
    ref = phi.values(dims, angles)
    for _ in range(8):
        perm = _random_dim_preserving_permutation(dims, rng)
        vals = phi.values(dims, angles[perm, :])
        if np.max(np.abs(vals - ref)) > tol:
            raise NotWeylInvariant("test function is not invariant under "
                                   "permutations of equal blocks")


def _random_dim_preserving_permutation(dims, rng):
    perm = np.arange(len(dims))
    for k in set(dims):
        idx = [i for i, d in enumerate(dims) if d == k]
        shuffled = list(idx)
        rng.shuffle(shuffled)
        for a, b in zip(idx, shuffled):
            perm[a] = b
    return perm


# -- component models ---------------------------------------------------------------


def _kernel_lattice_basis(k: Sequence[int]) -> list:
    """Basis of the integer lattice { n : sum k_b n_b = 0 }."""
    s = len(k)
    if s == 1:
        return []
    gs = [k[0]]
    bez = [[1]]
    for i in range(1, s):
        g, x, y = _ext_gcd(gs[-1], k[i])
        gs.append(g)
        bez.append([c * x for c in bez[-1]] + [y])
    basis = []
    for i in range(s - 1):
        v = [0] * s
        scale = k[i + 1] // gs[i + 1]
        for j in range(i + 1):
            v[j] = scale * bez[i][j]
        v[i + 1] = -gs[i] // gs[i + 1]
        assert sum(a * b for a, b in zip(k, v)) == 0
        basis.append(v)
    return basis


def _ext_gcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _det_fraction(m) -> Fraction:
    from .forms import det as _det, mat as _mat
    return _det(_mat(m))


def component_blocks(triple: OrthTriple) -> list:
    """Canonical block order: dual pairs (sigma side then dual side), then
    symplectic copies, then orthogonal copies; entries (k, base angle)."""
    blocks = []
    for a, m in triple.dual_pairs:
        blocks += [(a.sp, a.angle)] * m
    for a, m in triple.dual_pairs:
        blocks += [(a.sp, mod1(-a.angle))] * m
    for a, p in triple.symplectic:
        blocks += [(a.sp, a.angle)] * p
    for a, q in triple.orthogonal:
        blocks += [(a.sp, a.angle)] * q
    return blocks


def mirror_structure(triple: OrthTriple) -> tuple[int, list]:
    """Free-coordinate count and per-block rows for the mirrored subtorus:
    each row is (index, sign) or None for a frozen middle coordinate."""
    nfree = (sum(m for _, m in triple.dual_pairs)
             + sum(p // 2 for _, p in triple.symplectic)
             + sum(q // 2 for _, q in triple.orthogonal))
    rows = []
    r = 0
    for _, m in triple.dual_pairs:
        rows += [(r + ell, 1) for ell in range(m)]
        r += m
    r2 = 0
    for _, m in triple.dual_pairs:
        rows += [(r2 + ell, -1) for ell in range(m)]
        r2 += m
    for _, p in triple.symplectic:
        for ell in range(p):
            rows.append((r + ell, 1) if ell < p // 2
                        else (r + (p - 1 - ell), -1))
        r += p // 2
    for _, q in triple.orthogonal:
        for ell in range(q):
            if ell < q // 2:
                rows.append((r + ell, 1))
            elif q - 1 - ell < q // 2:
                rows.append((r + (q - 1 - ell), -1))
            else:
                rows.append(None)
        r += q // 2
    return nfree, rows


@dataclass
class QuadConfig:
    n_base: int = 128
    rhs_n: int = 128
    s0: float = 0.1
    s_count: int = 6
    tol: float = 1e-3
    quad_tol: float = 1e-6
    max_nodes: int = 2 ** 22
    resolution: float = 40.0  # e-folding target: n(s) ~ resolution / (s log q)
    offset: float = 0.5 * (math.sqrt(5) - 1)  # golden offset, dodges exact hits
    extrap_order: int = 3


def lhs_covering_order(triple: OrthTriple) -> int:
    """Generic fiber of the parametrizing torus over the component: every
    permutation of same-size blocks extends to a twisted identification
    because unramified twisted-Steinberg blocks of one size are all
    twist-equivalent.  Equals |W(M, sigma)| exactly when same-size blocks
    carry the same base character."""
    counts = {}
    for k, _ in component_blocks(triple):
        counts[k] = counts.get(k, 0) + 1
    out = 1
    for c in counts.values():
        out *= math.factorial(c)
    return out


def rhs_covering_order(triple: OrthTriple) -> int:
    """Generic fiber of the mirrored subtorus over the orthogonal locus:
    same-size mirrored pairs permute freely and each pair flips."""
    pairs = {}

    def add(k, n):
        pairs[k] = pairs.get(k, 0) + n

    for a, m in triple.dual_pairs:
        add(a.sp, m)
    for a, p in triple.symplectic:
        add(a.sp, p // 2)
    for a, q in triple.orthogonal:
        add(a.sp, q // 2)
    out = 1
    for c in pairs.values():
        out *= math.factorial(c) * 2 ** c
    return out


class ComponentModel:
    """Everything needed to integrate over one component of the tempered dual
    with fixed central character, and over the mirrored subtorus of its
    orthogonal locus."""

    def __init__(self, triple: OrthTriple, spec: LocalFieldSpec,
                 chi_minus_one: int = 1):
        self.triple = triple
        self.spec = spec
        self.chi_minus_one = int(chi_minus_one)
        self.consts: TripleConstants = appendix_constants(triple)
        self.d = triple.d
        self.F_lhs = lhs_covering_order(triple)
        self.F_rhs = rhs_covering_order(triple)

        blocks = component_blocks(triple)
        self.blocks = blocks
        self.dims = tuple(k for k, _ in blocks)
        self.S = len(blocks)

        # LHS torus: kernel-lattice basis of the block-dimension vector
        kvec = [k for k, _ in blocks]
        basis = _kernel_lattice_basis(kvec)
        self.R_lhs = len(basis)
        self.V = np.array(basis, dtype=float).T if basis else np.zeros((self.S, 0))
        if self.R_lhs:
            cols = [[kvec[b] * basis[r][b] for b in range(self.S)]
                    for r in range(self.R_lhs)]
            e0 = [1] + [0] * (self.S - 1)
            m = [[cols[r][b] for r in range(self.R_lhs)] + [e0[b]]
                 for b in range(self.S)]
            self.J_k = abs(_det_fraction(m))
        else:
            self.J_k = Fraction(1)

        lhs_atoms = []
        for b, (k, u) in enumerate(blocks):
            coeffs = tuple(int(basis[r][b]) for r in range(self.R_lhs))
            lhs_atoms.append((AffineAngle(u, coeffs), k))
        self.lhs_atoms = lhs_atoms
        self.sym2_lhs = FactorProgram.compile(sym2_atoms(lhs_atoms), spec,
                                              self.R_lhs, regularize=False)
        self.ad_lhs = FactorProgram.compile(_ad_over_center(lhs_atoms), spec,
                                            self.R_lhs, regularize=True)

        # RHS subtorus: free coordinates per the mirror relations
        self.R_rhs, struct = mirror_structure(triple)
        rows = [(0,) * self.R_rhs if rw is None
                else _unit_row(self.R_rhs, rw[0], rw[1]) for rw in struct]
        self.mirror_rows = rows
        rhs_atoms = [(AffineAngle(u, rows[b]), k)
                     for b, (k, u) in enumerate(blocks)]
        self.rhs_atoms = rhs_atoms
        self.wedge2_rhs = FactorProgram.compile(wedge2_atoms(rhs_atoms), spec,
                                                self.R_rhs, regularize=True)

        self._gamma_triv = gamma_trivial(spec)

    # -- angle grids --------------------------------------------------------

    def lhs_angles(self, t: np.ndarray) -> np.ndarray:
        base = np.array([float(u) for _, u in self.blocks])[:, None]
        return base + (self.V @ t if self.R_lhs else 0.0)

    def rhs_angles(self, t: np.ndarray) -> np.ndarray:
        base = np.array([float(u) for _, u in self.blocks])[:, None]
        rows = np.array(self.mirror_rows, dtype=float)
        return base + (rows @ t if self.R_rhs else 0.0)

    # -- integrands ------------------------------------------------------------

    def lhs_integrand(self, phi: TestFunction, t: np.ndarray,
                      s: float) -> np.ndarray:
        vals = phi.values(self.dims, self.lhs_angles(t))
        vals = vals / self.sym2_lhs.eval(t, s)
        vals = vals * self.ad_lhs.eval_regularized(t)
        return vals

    def rhs_integrand(self, phi: TestFunction, t: np.ndarray) -> np.ndarray:
        vals = phi.values(self.dims, self.rhs_angles(t))
        return vals * self.wedge2_rhs.eval_regularized(t)

    # -- quadrature ---------------------------------------------------------------

    def lhs_grid_size(self, s: float, cfg: QuadConfig) -> tuple[int, bool]:
        """Nodes per dimension: the integrand is analytic in a strip of width
        proportional to s, so a uniform rule with n ~ resolution / (s log q)
        keeps the quadrature error below e^{-resolution} times the peak
        scale.  Capped by the node budget."""
        n = max(cfg.n_base, int(math.ceil(
            cfg.resolution / (s * math.log(self.spec.q)))))
        capped = False
        dim = max(self.R_lhs, 1)
        while n ** dim > cfg.max_nodes:
            n = int(n / 1.3)
            capped = True
        return n, capped

    def lhs_mean(self, phi: TestFunction, s: float, cfg: QuadConfig):
        """Mean of the LHS integrand over the component torus; returns
        (mean, error_estimate, nodes, budget_flag)."""
        dim = self.R_lhs
        if dim == 0:
            v = self.lhs_integrand(phi, np.zeros((0, 1)), s)[0]
            return v, 0.0, 1, False
        n, capped = self.lhs_grid_size(s, cfg)
        mean = self._grid_mean(lambda t: self.lhs_integrand(phi, t, s), dim,
                               n, cfg.offset)
        # self-consistency estimate on a coarser incommensurate grid
        n2 = max(cfg.n_base // 2, int(n / math.sqrt(2)))
        mean2 = self._grid_mean(lambda t: self.lhs_integrand(phi, t, s), dim,
                                n2, cfg.offset)
        err = abs(mean - mean2)
        return mean, err, n ** dim + n2 ** dim, capped

    def _grid_mean(self, fun, dim, n, offset) -> complex:
        t = _midpoint_grid(dim, n, offset)
        vals = _chunked(fun, t)
        return complex(vals.sum() / vals.size)

    def lhs_value(self, phi: TestFunction, s: float, cfg: QuadConfig):
        """d * gamma(s, 1, psi) * (component constants) * mean."""
        mean, err, nodes, flag = self.lhs_mean(phi, s, cfg)
        pref = self.lhs_prefactor(s)
        return pref * mean, abs(pref) * err, nodes, flag

    def lhs_prefactor(self, s: float) -> complex:
        c = self.consts
        const = self.d * (self.chi_minus_one ** (self.d - 1)) * \
            float(self.J_k) / (c.P * self.F_lhs)
        return const * self._gamma_triv.evaluate(s)

    def rhs_value(self, phi: TestFunction, cfg: QuadConfig) -> complex:
        c = self.consts
        dim = self.R_rhs
        if dim == 0:
            mean = self.rhs_integrand(phi, np.zeros((0, 1)))[0]
        else:
            t = _midpoint_grid(dim, cfg.rhs_n, cfg.offset)
            mean = complex(np.mean(self.rhs_integrand(phi, t)))
        dprime = 1
        for a, m in self.triple.dual_pairs:
            dprime *= a.sp ** m
        for a, p in self.triple.symplectic:
            dprime *= a.sp ** (p // 2)
        for a, q in self.triple.orthogonal:
            dprime *= a.sp ** (q // 2)
        # Jacobian chain sanity: the free-coordinate fundamental domain has
        # exactly the normalized subtorus volume
        assert c.D * dprime == c.P and 2 * c.N == c.S + c.c
        two_pi_over_logq = 2 * math.pi / math.log(self.spec.q)
        const = (2 * (self.chi_minus_one ** (self.d - 1))
                 * (c.D * dprime / c.P)
                 * two_pi_over_logq ** (2 * c.N - c.S - c.c)
                 / (self.F_rhs * 2 ** c.c))
        return const * mean

    def measure_mass(self, phi: TestFunction, cfg: QuadConfig) -> float:
        """The component mass realized by the LHS quadrature with all gamma
        factors dropped: J_k / (P F) times the plain mean of phi, F the
        covering order (= |W(M, sigma)| for twist-inequivalent blocks)."""
        c = self.consts
        if self.R_lhs == 0:
            mean = complex(phi.values(self.dims, self.lhs_angles(
                np.zeros((0, 1))))[0])
        else:
            t = _midpoint_grid(self.R_lhs, cfg.n_base, cfg.offset)
            mean = complex(np.mean(phi.values(self.dims, self.lhs_angles(t))))
        return float(self.J_k) / (c.P * self.F_lhs) * mean.real


def _ad_over_center(atoms):
    out = list(ad_atoms(atoms))
    for i, (a, m) in enumerate(out):
        aa = a if isinstance(a, AffineAngle) else AffineAngle(Fraction(a), ())
        if m == 1 and aa.is_identically_zero():
            del out[i]
            return out
    raise AssertionError("adjoint family lost its trivial atom")


def _unit_row(n: int, i: int, val: int) -> tuple:
    row = [0] * n
    row[i] = val
    return tuple(row)


# -- grids -----------------------------------------------------------------------


def _midpoint_grid(dim: int, n: int, offset: float) -> np.ndarray:
    """Uniform offset grid in lexicographic order; for periodic integrands
    this is the trapezoid rule up to translation, hence spectrally accurate.
    The golden offset keeps nodes off the exact singular loci."""
    axes = [(np.arange(n) + 0.5 + offset) / n for _ in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=0)


def _chunked(fun: Callable, t: np.ndarray, chunk: int = 1 << 18) -> np.ndarray:
    m = t.shape[1]
    if m == 0:
        return np.zeros(0, dtype=complex)
    if m <= chunk:
        return fun(t)
    parts = [fun(t[:, i:i + chunk]) for i in range(0, m, chunk)]
    return np.concatenate(parts)


# -- extrapolation and the report ---------------------------------------------------


def richardson(s_values: Sequence[float], l_values: Sequence[complex],
               order: int) -> complex:
    """Neville extrapolation to s = 0 for values on a geometric s-sequence,
    assuming an expansion A + B s + C s^2 + ..."""
    tab = list(l_values)
    n = len(tab)
    for mlevel in range(1, min(order, n - 1) + 1):
        new = []
        for j in range(len(tab) - 1):
            ratio = s_values[j] / s_values[j + mlevel]
            new.append((ratio * tab[j + 1] - tab[j]) / (ratio - 1))
        tab = new
    return tab[-1]


@dataclass
class LimitReport:
    s_values: list
    lhs_values: list
    lhs_errors: list
    lhs_extrapolated: complex
    rhs: complex
    abs_discrepancy: float
    rel_discrepancy: float
    tolerance: float
    passed: bool
    nodes_used: int
    budget_exceeded: bool

    def to_dict(self) -> dict:
        return {
            "s_values": list(self.s_values),
            "lhs_values": [[v.real, v.imag] for v in self.lhs_values],
            "lhs_errors": list(self.lhs_errors),
            "lhs_extrapolated": [self.lhs_extrapolated.real,
                                 self.lhs_extrapolated.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "abs_discrepancy": self.abs_discrepancy,
            "rel_discrepancy": self.rel_discrepancy,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "nodes_used": self.nodes_used,
            "budget_exceeded": self.budget_exceeded,
        }


def verify(triple: OrthTriple, phi: TestFunction, spec: LocalFieldSpec,
           cfg: Optional[QuadConfig] = None, chi_minus_one: int = 1,
           rng=None) -> LimitReport:
    """Run the full limit check: LHS over a decreasing s-sequence with
    Richardson extrapolation against the closed-form RHS."""
    cfg = cfg or QuadConfig()
    model = ComponentModel(triple, spec, chi_minus_one)
    if rng is None:
        rng = np.random.default_rng(20240901)
    check_weyl_invariance(phi, model.dims, rng)
    s_values = [cfg.s0 * 2.0 ** (-k) for k in range(cfg.s_count)]
    lhs_vals, lhs_errs, nodes, budget = [], [], 0, False
    for s in s_values:
        v, e, n, f = model.lhs_value(phi, s, cfg)
        lhs_vals.append(v)
        lhs_errs.append(e)
        nodes += n
        budget = budget or f
    extrap = richardson(s_values, lhs_vals, cfg.extrap_order)
    rhs = model.rhs_value(phi, cfg)
    absd = abs(extrap - rhs)
    reld = absd / max(abs(rhs), 1e-12)
    return LimitReport(
        s_values=s_values, lhs_values=lhs_vals, lhs_errors=lhs_errs,
        lhs_extrapolated=extrap, rhs=rhs, abs_discrepancy=absd,
        rel_discrepancy=reld, tolerance=cfg.tol,
        passed=bool(reld < cfg.tol and not budget),
        nodes_used=nodes, budget_exceeded=budget)


# -- exact pointwise checks -----------------------------------------------------------


def subtorus_twists(triple: OrthTriple, free: Sequence[Fraction]) -> list:
    """Per-block twist angles for a point of the mirrored subtorus, given its
    free coordinates in canonical order (dual pairs, then symplectic halves,
    then orthogonal halves)."""
    free = [Fraction(x) for x in free]
    expected, rows = mirror_structure(triple)
    if len(free) != expected:
        raise ValueError(f"expected {expected} free coordinates, got {len(free)}")
    out = []
    for row in rows:
        if row is None:
            out.append(Fraction(0))
        else:
            idx, sign = row
            out.append(mod1(sign * free[idx]))
    return out


def point_parameter(triple: OrthTriple, twists: Sequence[Fraction]) -> WDRep:
    blocks = component_blocks(triple)
    if len(twists) != len(blocks):
        raise ValueError("one twist per block required")
    return WDRep.from_atom_list([(mod1(u + Fraction(t)), k)
                                 for (k, u), t in zip(blocks, twists)])


def lhs_integrand_exact(triple: OrthTriple, phi: TestFunction, s: float,
                        twists: Sequence[Fraction],
                        spec: LocalFieldSpec) -> complex:
    """Exact single-point LHS integrand: Phi times the inverse
    symmetric-square gamma factor at s times the regularized adjoint value.
    Finite on the singular hyperplanes for every s > 0; where the regularized
    order jumps the value is the limiting one (zero along collision loci)."""
    if s <= 0:
        raise ValueError("the integrand is evaluated at s > 0")
    twists = [Fraction(t) for t in twists]
    blocks = component_blocks(triple)
    if len(twists) != len(blocks):
        raise ValueError("one twist per block required")
    total = sum((k * t for (k, _), t in zip(blocks, twists)), Fraction(0))
    if mod1(total) != 0:
        raise ValueError("twists must satisfy the sum-zero constraint")
    param = point_parameter(triple, twists)
    angles = np.array([[float(mod1(u + t))]
                       for (k, u), t in zip(blocks, twists)])
    phival = phi.values(tuple(k for k, _ in blocks), angles)[0]
    gsym = param.sym2().gamma_factor(spec)
    gad = param.ad_over_center().gamma_factor(spec)
    return phival / gsym.evaluate(s) * gad.regularized_value()


def eq13_values(triple: OrthTriple, free: Sequence[Fraction],
                spec: LocalFieldSpec):
    """Both sides of the exact pointwise identity at a generic subtorus
    point: gamma*(1) lim s^N gamma(s, Sym^2)^{-1} gamma*(Ad/A) versus
    log(q)^{-N} gamma*(wedge^2)."""
    consts = appendix_constants(triple)
    twists = subtorus_twists(triple, free)
    param = point_parameter(triple, twists)
    gsym = param.sym2().gamma_factor(spec)
    n_actual = gsym.ord_zero_at_zero()
    if n_actual != consts.N:
        raise NonGenericPoint(
            f"Sym^2 gamma factor vanishes to order {n_actual}, expected "
            f"{consts.N}: the point is not generic")
    lim = gsym.inverse().limit_with_power(consts.N)
    gsv = float(gamma_star_trivial(spec))
    ad_star = param.ad_over_center().gamma_factor(spec).regularized_value()
    lhs = gsv * lim * ad_star
    rhs = math.log(spec.q) ** (-consts.N) * \
        param.wedge2().gamma_factor(spec).regularized_value()
    return lhs, rhs


def eq13_check(triple: OrthTriple, free: Sequence[Fraction],
               spec: LocalFieldSpec, tol: float = 1e-10) -> bool:
    lhs, rhs = eq13_values(triple, free, spec)
    return abs(lhs - rhs) <= tol * max(1.0, abs(rhs))


def singular_exponent(triple: OrthTriple, twists: Sequence[Fraction]) -> int:
    """Pole order at s = 0 of the inverse Sym^2 gamma factor at a torus
    point, counted through the vanishing linear forms of the pinch loci:
    dual-pair sums, symplectic sums below the diagonal, orthogonal sums on
    and below the diagonal."""
    twists = [Fraction(t) for t in twists]
    count = 0
    offset_dual = sum(m for _, m in triple.dual_pairs)
    i0 = 0
    for a, m in triple.dual_pairs:
        xs = twists[i0:i0 + m]
        xvs = twists[offset_dual + i0:offset_dual + i0 + m]
        count += sum(1 for x in xs for xv in xvs if mod1(x + xv) == 0)
        i0 += m
    pos = 2 * offset_dual
    for a, p in triple.symplectic:
        ys = twists[pos:pos + p]
        count += sum(1 for i in range(p) for j in range(i + 1, p)
                     if mod1(ys[i] + ys[j]) == 0)
        pos += p
    for a, q in triple.orthogonal:
        zs = twists[pos:pos + q]
        count += sum(1 for i in range(q) for j in range(i, q)
                     if mod1(zs[i] + zs[j]) == 0)
        pos += q
    return count


def singular_exponent_engine(triple: OrthTriple, twists: Sequence[Fraction],
                             spec: LocalFieldSpec) -> int:
    """Oracle: the exact vanishing order of the Sym^2 gamma factor."""
    param = point_parameter(triple, twists)
    return param.sym2().gamma_factor(spec).ord_zero_at_zero()


def fit_divergence_exponent(triple: OrthTriple, phi: TestFunction,
                            spec: LocalFieldSpec, cfg: QuadConfig,
                            chi_minus_one: int = 1) -> float:
    """Log-log slope of the raw component integral against s: close to -1
    whenever singular loci meet the support."""
    model = ComponentModel(triple, spec, chi_minus_one)
    s_values = [cfg.s0 * 2.0 ** (-k) for k in range(cfg.s_count)]
    ys = []
    for s in s_values:
        mean, _, _, _ = model.lhs_mean(phi, s, cfg)
        ys.append(abs(mean))
    xs = np.log(s_values)
    ys = np.log(ys)
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope)
