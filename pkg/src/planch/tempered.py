"""Bookkeeping for the tempered dual of GL_d.

Points are (Levi shape, per-block twisted-Steinberg data, imaginary twist),
densities come from regularized adjoint gamma factors, and the orthogonal
locus is described by triples grouping blocks into dual pairs (In),
symplectic self-dual atoms (Is) and orthogonal self-dual atoms (Io).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .field import LocalFieldSpec, QuadraticCharacter
from .spectral import mod1
from .wdrep import (SELF_DUAL_BOTH, SELF_DUAL_ORTHOGONAL, WDAtom, WDRep)


class CentralCharacterMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TempBlock:
    """One GL_k block carrying the twisted Steinberg St_k(u), twisted by an
    extra unitary unramified angle."""

    k: int
    angle: Fraction
    twist: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "angle", mod1(Fraction(self.angle)))
        object.__setattr__(self, "twist", mod1(Fraction(self.twist)))
        if self.k < 1:
            raise ValueError("block size must be >= 1")

    @property
    def effective_angle(self) -> Fraction:
        return mod1(self.angle + self.twist)


@dataclass(frozen=True)
class TempPoint:
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("a tempered point needs at least one block")

    @classmethod
    def of(cls, *blocks) -> "TempPoint":
        return cls(tuple(TempBlock(k, Fraction(u), Fraction(t))
                         for (k, u, t) in blocks))

    @property
    def d(self) -> int:
        return sum(b.k for b in self.blocks)

    def shape(self) -> tuple:
        return tuple(b.k for b in self.blocks)

    def central_angle(self) -> Fraction:
        return mod1(sum((b.k * b.effective_angle for b in self.blocks),
                        Fraction(0)))

    def parameter(self) -> WDRep:
        return WDRep(tuple(WDAtom(b.effective_angle, b.k) for b in self.blocks))

    def weyl_order(self) -> int:
        """|W(M, sigma)| = product of factorials of block multiplicities."""
        counts = {}
        for b in self.blocks:
            key = (b.k, b.effective_angle)
            counts[key] = counts.get(key, 0) + 1
        out = 1
        for c in counts.values():
            out *= math.factorial(c)
        return out

    def to_dict(self) -> dict:
        return {"blocks": [{"k": b.k, "angle": str(b.angle),
                            "twist": str(b.twist)} for b in self.blocks]}

    @classmethod
    def from_dict(cls, d: dict) -> "TempPoint":
        return cls(tuple(TempBlock(int(b["k"]), Fraction(b["angle"]),
                                   Fraction(b.get("twist", 0)))
                         for b in d["blocks"]))


def parameter_of(pt: TempPoint) -> WDRep:
    return pt.parameter()


def plancherel_density(pt: TempPoint, spec: LocalFieldSpec) -> complex:
    """omega(-1)^{d-1} gamma*(Ad) with omega(-1) = 1 for unramified points."""
    return pt.parameter().ad().gamma_factor(spec).regularized_value()


def plancherel_density_chi(pt: TempPoint, chi: QuadraticCharacter,
                           spec: LocalFieldSpec) -> complex:
    """chi(-1)^{d-1} gamma*(Ad on trace-zero) / d for a point of central
    character chi."""
    if pt.central_angle() != chi.unramified_angle():
        raise CentralCharacterMismatch(
            f"point has central angle {pt.central_angle()}, "
            f"character has angle {chi.unramified_angle()}")
    d = pt.d
    sign = chi.value_at_minus_one() ** (d - 1)
    g = pt.parameter().ad_over_center().gamma_factor(spec)
    return sign * g.regularized_value() / d


def central_quotient_relation_check(pt: TempPoint, chi: QuadraticCharacter,
                                    spec: LocalFieldSpec,
                                    tol: float = 1e-12) -> bool:
    """mu_chi = gamma*(1)^{-dim A} / [X*(A):X*(G)] * mu, for GL_d: divide by
    gamma*(1) and by d."""
    from .field import gamma_star_trivial

    lhs = plancherel_density_chi(pt, chi, spec)
    sign = chi.value_at_minus_one() ** (pt.d - 1)
    rhs = sign * plancherel_density(pt, spec) / \
        (float(gamma_star_trivial(spec)) * pt.d)
    return abs(lhs - rhs) <= tol * max(1.0, abs(rhs))


# -- the orthogonal locus ------------------------------------------------------


@dataclass(frozen=True)
class OrthTriple:
    """Block grouping of an orthogonal-locus component.

    dual_pairs:  (atom, m) for a dual pair sigma^m x (sigma dual)^m
    symplectic:  (atom, p) for a symplectic-type self-dual atom, p copies
    orthogonal:  (atom, q) for an orthogonal-type self-dual atom, q copies
    """

    dual_pairs: tuple = ()
    symplectic: tuple = ()
    orthogonal: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "dual_pairs", tuple(self.dual_pairs))
        object.__setattr__(self, "symplectic", tuple(self.symplectic))
        object.__setattr__(self, "orthogonal", tuple(self.orthogonal))
        seen = set()
        for atom, m in self.dual_pairs:
            if atom.is_self_dual():
                raise ValueError(f"dual-pair atom {atom} is self-dual")
            if m < 1:
                raise ValueError("multiplicities must be >= 1")
            if atom in seen or atom.dual() in seen:
                raise ValueError("dual-pair atoms must be distinct as unordered pairs")
            seen.add(atom)
            seen.add(atom.dual())
        for atom, p in self.symplectic:
            if atom.self_duality() != "symplectic":
                raise ValueError(f"atom {atom} is not of symplectic type")
            if atom in seen:
                raise ValueError("symplectic atoms must be pairwise distinct")
            seen.add(atom)
        for atom, q in self.orthogonal:
            if atom.self_duality() != "orthogonal":
                raise ValueError(f"atom {atom} is not of orthogonal type")
            if atom in seen:
                raise ValueError("orthogonal atoms must be pairwise distinct")
            seen.add(atom)
        if not (self.dual_pairs or self.symplectic or self.orthogonal):
            raise ValueError("empty triple")

    @property
    def d(self) -> int:
        return (sum(2 * m * a.sp for a, m in self.dual_pairs)
                + sum(p * a.sp for a, p in self.symplectic)
                + sum(q * a.sp for a, q in self.orthogonal))

    def base_point(self) -> TempPoint:
        blocks = []
        for a, m in self.dual_pairs:
            blocks += [TempBlock(a.sp, a.angle)] * m
            blocks += [TempBlock(a.sp, mod1(-a.angle))] * m
        for a, p in self.symplectic:
            blocks += [TempBlock(a.sp, a.angle)] * p
        for a, q in self.orthogonal:
            blocks += [TempBlock(a.sp, a.angle)] * q
        return TempPoint(tuple(blocks))

    def chi_angle(self) -> Fraction:
        """Determinant angle of the component: the unramified part of chi."""
        return self.base_point().parameter().determinant()

    def weyl_orders(self) -> tuple[int, int]:
        """(|W|, |W'|): the full stabilizer and the mirrored-twist subgroup."""
        w = 1
        for _, m in self.dual_pairs:
            w *= math.factorial(m) ** 2
        for _, p in self.symplectic:
            w *= math.factorial(p)
        for _, q in self.orthogonal:
            w *= math.factorial(q)
        wp = 1
        for _, m in self.dual_pairs:
            wp *= math.factorial(m)
        for _, p in self.symplectic:
            if p % 2 != 0:
                raise ValueError("symplectic multiplicities must be even "
                                 "on the orthogonal locus")
            wp *= math.factorial(p // 2) * 2 ** (p // 2)
        for _, q in self.orthogonal:
            wp *= math.factorial(q // 2) * 2 ** (q // 2)
        return w, wp

    def to_dict(self) -> dict:
        return {
            "In": [{"angle": str(a.angle), "sp": a.sp, "m": m}
                   for a, m in self.dual_pairs],
            "Is": [{"angle": str(a.angle), "sp": a.sp, "p": p}
                   for a, p in self.symplectic],
            "Io": [{"angle": str(a.angle), "sp": a.sp, "q": q}
                   for a, q in self.orthogonal],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OrthTriple":
        return cls(
            tuple((WDAtom(Fraction(e["angle"]), int(e.get("sp", 1))), int(e["m"]))
                  for e in d.get("In", [])),
            tuple((WDAtom(Fraction(e["angle"]), int(e.get("sp", 1))), int(e["p"]))
                  for e in d.get("Is", [])),
            tuple((WDAtom(Fraction(e["angle"]), int(e.get("sp", 1))), int(e["q"]))
                  for e in d.get("Io", [])),
        )


@dataclass(frozen=True)
class TripleConstants:
    P: int
    S: int
    D: int
    N: int
    c: int
    W: int
    Wprime: int


def appendix_constants(t: OrthTriple) -> TripleConstants:
    """The closed-form constants attached to an orthogonal-locus triple."""
    P = 1
    for a, m in t.dual_pairs:
        P *= a.sp ** (2 * m)
    for a, p in t.symplectic:
        P *= a.sp ** p
    for a, q in t.orthogonal:
        P *= a.sp ** q
    S = (sum(2 * m for _, m in t.dual_pairs)
         + sum(p for _, p in t.symplectic)
         + sum(q for _, q in t.orthogonal))
    for _, p in t.symplectic:
        if p % 2 != 0:
            raise ValueError("symplectic multiplicities must be even "
                             "on the orthogonal locus")
    D = 1
    for a, m in t.dual_pairs:
        D *= a.sp ** m
    for a, p in t.symplectic:
        D *= a.sp ** (p // 2)
    for a, q in t.orthogonal:
        D *= a.sp ** ((q + 1) // 2)
    N = (sum(m for _, m in t.dual_pairs)
         + sum(p // 2 for _, p in t.symplectic)
         + sum((q + 1) // 2 for _, q in t.orthogonal))
    c = sum(1 for _, q in t.orthogonal if q % 2 == 1)
    w, wp = t.weyl_orders()
    return TripleConstants(P=P, S=S, D=D, N=N, c=c, W=w, Wprime=wp)


def orth_triple_of(pt: TempPoint) -> Optional[OrthTriple]:
    """Group the blocks of an orthogonal point into a triple, or None."""
    param = pt.parameter()
    if param.self_duality() not in (SELF_DUAL_ORTHOGONAL, SELF_DUAL_BOTH):
        return None
    counts = {}
    for b in pt.blocks:
        atom = WDAtom(b.effective_angle, b.k)
        counts[atom] = counts.get(atom, 0) + 1
    pairs, symp, orth = [], [], []
    done = set()
    for atom in sorted(counts, key=lambda a: (a.sp, a.angle)):
        if atom in done:
            continue
        mult = counts[atom]
        if atom.is_self_dual():
            if atom.sp % 2 == 1:
                orth.append((atom, mult))
            else:
                symp.append((atom, mult))
            done.add(atom)
        else:
            dual = atom.dual()
            if counts.get(dual, 0) != mult:
                return None  # cannot happen for a self-dual parameter
            rep = atom if atom.angle < dual.angle else dual
            pairs.append((rep, mult))
            done.add(atom)
            done.add(dual)
    return OrthTriple(tuple(pairs), tuple(symp), tuple(orth))


# -- formal-degree style right-hand sides ---------------------------------------


def formal_degree_rhs(param: WDRep, spec: LocalFieldSpec) -> float:
    """|gamma*(0, wedge^2 param)| / |S|, the density predicted for the
    classical-group member with this orthogonal parameter."""
    if param.dim == 0:
        raise ValueError("zero-dimensional parameter")
    sd = param.self_duality()
    if sd not in (SELF_DUAL_ORTHOGONAL, SELF_DUAL_BOTH):
        raise ValueError("parameter is not orthogonal")
    if param.dim % 2 == 1 and param.determinant() != 0:
        raise ValueError("odd-dimensional parameter must have trivial determinant")
    _, s, _ = param.component_groups()
    val = param.wedge2().gamma_factor(spec).regularized_value()
    return abs(val) / s


def hii_rhs(param: WDRep, index_xstar: int, deg_rho: int,
            spec: LocalFieldSpec) -> float:
    """deg(rho) |gamma(0, adjoint)| / ([X*(A):X*(G)] |S|) for a discrete
    parameter (adjoint gamma factor regular and nonvanishing at 0)."""
    g = param.wedge2().gamma_factor(spec)
    if g.ord_zero_at_zero() != 0:
        raise ValueError("adjoint gamma factor is not regular-nonzero at 0; "
                         "parameter is not discrete")
    _, s, _ = param.component_groups()
    return deg_rho * abs(g.evaluate(0.0)) / (index_xstar * s)
