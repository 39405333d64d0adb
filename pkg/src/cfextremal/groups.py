"""Reduction of point-evaluation extremal problems on product groups.

A group is a finite product of factors: Integers, Reals, Torus (R/Z with
rational coordinates), Cyclic(m).  All coordinates are exact (int or
Fraction); irrational torus coordinates are rejected because membership of
k*z in an open set is not decidable from approximate data.

For a point z of order m the problem reduces to the cyclic support
{k in Z_m : k z in Omega}; for infinite order, to the integer support
{k in Z : k z in Omega}, enumerated exactly when the box description
certifies a bound on |k|.  On finite groups the extremal sequence lifts
back to an explicit positive definite witness supported on Omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .sequences import PdCertificate, SeqZm, SupportZ, SupportZm

KINDS = ("integers", "reals", "torus", "cyclic")


class TheoremViolationError(RuntimeError):
    """A verification that is guaranteed by theory failed numerically."""


@dataclass(frozen=True)
class Factor:
    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == "cyclic":
            if self.modulus is None or self.modulus < 2:
                raise ValueError("cyclic factor needs modulus >= 2")
        elif self.modulus is not None:
            raise ValueError(f"{self.kind} factor takes no modulus")

    def to_json(self) -> dict:
        if self.kind == "cyclic":
            return {"kind": "cyclic", "m": self.modulus}
        return {"kind": self.kind}


@dataclass(frozen=True)
class GroupDescriptor:
    factors: tuple[Factor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("group needs at least one factor")

    @property
    def is_finite(self) -> bool:
        return all(f.kind == "cyclic" for f in self.factors)

    @property
    def size(self) -> int:
        if not self.is_finite:
            raise ValueError("group is not finite")
        return math.prod(f.modulus for f in self.factors)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(f.modulus for f in self.factors)

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, doc: dict) -> "GroupDescriptor":
        factors = []
        for fd in doc["factors"]:
            kind = fd["kind"]
            factors.append(Factor(kind, int(fd["m"])) if kind == "cyclic"
                           else Factor(kind))
        return cls(tuple(factors))

    @classmethod
    def parse(cls, text: str) -> "GroupDescriptor":
        """Inline syntax: factors joined by 'x', e.g. 'Z4xZ2', 'RxT', 'Z'."""
        factors = []
        for tok in text.split("x"):
            tok = tok.strip()
            if tok == "Z":
                factors.append(Factor("integers"))
            elif tok == "R":
                factors.append(Factor("reals"))
            elif tok == "T":
                factors.append(Factor("torus"))
            elif tok.startswith("Z") and tok[1:].isdigit():
                factors.append(Factor("cyclic", int(tok[1:])))
            else:
                raise ValueError(f"cannot parse group factor {tok!r}")
        return cls(tuple(factors))


def _coerce_coord(factor: Factor, value):
    if factor.kind in ("integers", "cyclic"):
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"{factor.kind} coordinate must be an integer")
            value = value.numerator
        if not isinstance(value, (int, np.integer)):
            raise TypeError(f"{factor.kind} coordinate must be an integer, "
                            f"got {type(value).__name__}")
        v = int(value)
        return v % factor.modulus if factor.kind == "cyclic" else v
    if isinstance(value, float):
        raise TypeError("torus/reals coordinates must be exact rationals "
                        "(int or Fraction), not float")
    frac = Fraction(value)
    return frac % 1 if factor.kind == "torus" else frac


@dataclass(frozen=True)
class GroupElement:
    group: GroupDescriptor
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != len(self.group.factors):
            raise ValueError("coordinate count does not match factor count")
        coerced = tuple(_coerce_coord(f, c)
                        for f, c in zip(self.group.factors, self.coords))
        object.__setattr__(self, "coords", coerced)

    def scale(self, k: int) -> "GroupElement":
        return GroupElement(self.group, tuple(k * c for c in self.coords))

    def neg(self) -> "GroupElement":
        return self.scale(-1)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def to_json(self) -> list:
        out = []
        for f, c in zip(self.group.factors, self.coords):
            out.append(int(c) if f.kind in ("integers", "cyclic") else str(c))
        return out

    @classmethod
    def from_json(cls, group: GroupDescriptor, doc: Iterable) -> "GroupElement":
        coords = []
        for f, c in zip(group.factors, doc):
            if f.kind in ("integers", "cyclic"):
                coords.append(int(c))
            else:
                coords.append(Fraction(str(c)))
        return cls(group, tuple(coords))


def order(g: GroupDescriptor, z: GroupElement) -> int | None:
    """Least m >= 1 with m*z = 0; None when z is torsion-free."""
    m = 1
    for f, c in zip(g.factors, z.coords):
        if f.kind == "cyclic":
            o = f.modulus // math.gcd(int(c), f.modulus)
        elif f.kind == "torus":
            o = c.denominator  # reduced fraction in [0,1)
        else:
            if c != 0:
                return None
            o = 1
        m = m * o // math.gcd(m, o)
    return m


# ---------------------------------------------------------------------------
# Omega descriptors


_NEG_INF = Fraction(-10**30)  # sentinels only used internally for comparisons


def _parse_endpoint(text):
    if text in ("-inf", "inf"):
        return None if text == "inf" else None
    return Fraction(str(text))


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box; one (lo, hi) pair per factor, endpoints rational
    or None for an unbounded side.  Torus (and cyclic) intervals are read
    mod 1 (mod m)."""

    intervals: tuple[tuple[Fraction | None, Fraction | None], ...]

    def reflected(self) -> "Box":
        out = []
        for lo, hi in self.intervals:
            nlo = None if hi is None else -hi
            nhi = None if lo is None else -lo
            out.append((nlo, nhi))
        return Box(tuple(out))

    def normalized(self, group: GroupDescriptor) -> tuple:
        """Canonical key for symmetry comparison (wraps periodic factors)."""
        key = []
        for f, (lo, hi) in zip(group.factors, self.intervals):
            if f.kind in ("torus", "cyclic") and lo is not None and hi is not None:
                period = 1 if f.kind == "torus" else f.modulus
                if hi - lo >= period:
                    key.append(("full",))
                    continue
                shift = lo % period
                key.append((str(shift), str(shift + (hi - lo))))
            else:
                key.append((str(lo), str(hi)))
        return tuple(key)


def _interval_contains(lo, hi, x, period=None) -> bool:
    if period is not None and lo is not None and hi is not None:
        if hi - lo >= period:
            return True
        # x ~ x + j*period lands strictly inside (lo, hi) for some integer j
        j = (lo - x) // period + 1
        return lo < x + j * period < hi
    if lo is not None and not (x > lo):
        return False
    if hi is not None and not (x < hi):
        return False
    return True


@dataclass(frozen=True)
class OmegaDescriptor:
    """Symmetric open neighborhood of 0: an explicit element set on finite
    groups, a finite union of open boxes otherwise."""

    group: GroupDescriptor
    explicit: frozenset | None = None
    boxes: tuple[Box, ...] | None = None

    def __post_init__(self):
        if (self.explicit is None) == (self.boxes is None):
            raise ValueError("exactly one of explicit/boxes must be given")
        if self.explicit is not None:
            if not self.group.is_finite:
                raise ValueError("explicit Omega requires a finite group")
            elems = frozenset(e.coords if isinstance(e, GroupElement) else
                              GroupElement(self.group, tuple(e)).coords
                              for e in self.explicit)
            object.__setattr__(self, "explicit", elems)
            neg = {GroupElement(self.group, c).neg().coords for c in elems}
            if neg != elems:
                raise ValueError("Omega is not symmetric")
            if tuple(0 for _ in self.group.factors) not in elems:
                raise ValueError("Omega must contain 0")
        else:
            if self.group.is_finite:
                raise ValueError("box Omega is for groups with a non-finite "
                                 "factor; use an explicit set")
            for box in self.boxes:
                if len(box.intervals) != len(self.group.factors):
                    raise ValueError("box arity does not match factor count")
                for (lo, hi) in box.intervals:
                    if lo is not None and hi is not None and not (lo < hi):
                        raise ValueError("box interval must be nonempty open")
            mine = sorted(b.normalized(self.group) for b in self.boxes)
            theirs = sorted(b.reflected().normalized(self.group)
                            for b in self.boxes)
            if mine != theirs:
                raise ValueError("Omega is not symmetric (the reflected box "
                                 "list does not match; list boxes in +/- pairs)")
            if not self.contains(GroupElement(
                    self.group, tuple(0 for _ in self.group.factors))):
                raise ValueError("Omega must contain 0")

    def contains(self, x: GroupElement) -> bool:
        if self.explicit is not None:
            return x.coords in self.explicit
        for box in self.boxes:
            ok = True
            for f, (lo, hi), c in zip(self.group.factors, box.intervals, x.coords):
                period = {"torus": 1}.get(f.kind)
                if f.kind == "cyclic":
                    period = f.modulus
                if not _interval_contains(lo, hi, Fraction(c), period):
                    ok = False
                    break
            if ok:
                return True
        return False

    def to_json(self) -> dict:
        if self.explicit is not None:
            return {"explicit": sorted(
                GroupElement(self.group, c).to_json() for c in self.explicit)}
        return {"boxes": [[["-inf" if lo is None else str(lo),
                            "inf" if hi is None else str(hi)]
                           for lo, hi in b.intervals] for b in self.boxes]}

    @classmethod
    def from_json(cls, group: GroupDescriptor, doc: dict) -> "OmegaDescriptor":
        if "explicit" in doc:
            elems = frozenset(GroupElement.from_json(group, e)
                              for e in doc["explicit"])
            return cls(group, explicit=frozenset(e.coords for e in elems))
        boxes = []
        for b in doc["boxes"]:
            ivs = []
            for lo, hi in b:
                ivs.append((None if lo == "-inf" else Fraction(str(lo)),
                            None if hi == "inf" else Fraction(str(hi))))
            boxes.append(Box(tuple(ivs)))
        return cls(group, boxes=tuple(boxes))


# ---------------------------------------------------------------------------
# reduction


@dataclass
class ReducedProblem:
    order: int | None                  # None = infinite
    support: SupportZ | SupportZm
    provenance: dict[int, GroupElement]
    exhausted: bool                    # enumeration certified complete

    def to_json(self) -> dict:
        return {"order": self.order if self.order is not None else "infinite",
                "support": self.support.to_json(),
                "exhausted": self.exhausted}


def _k_range_from_boxes(omega: OmegaDescriptor, z: GroupElement):
    """Largest |k| that any box allows along a noncompact moving coordinate,
    or None when no box certifies a bound."""
    bound = None
    certified = True
    for box in omega.boxes:
        box_bound = None
        for f, (lo, hi), c in zip(omega.group.factors, box.intervals, z.coords):
            if f.kind not in ("integers", "reals") or c == 0:
                continue
            if lo is None or hi is None:
                continue
            cap = max(abs(lo), abs(hi)) / abs(Fraction(c))
            box_bound = cap if box_bound is None else min(box_bound, cap)
        if box_bound is None:
            certified = False  # this box does not bound k by itself
        else:
            bound = box_bound if bound is None else max(bound, box_bound)
    return (bound, certified)


def reduce_problem(group: GroupDescriptor, omega: OmegaDescriptor,
                   z: GroupElement, bound: int | None = None) -> ReducedProblem:
    """Build the trace support {k : k z in Omega} in Z_order(z) or Z."""
    if omega.group != group:
        raise ValueError("Omega belongs to a different group")
    if not omega.contains(z):
        raise ValueError("z must lie in Omega")
    o = order(group, z)
    if o is not None:
        residues = set()
        provenance = {}
        for k in range(o):
            kz = z.scale(k)
            if omega.contains(kz):
                residues.add(k)
                provenance[k] = kz
        support = SupportZm(o if o > 1 else 1, frozenset(residues))
        for k in residues:
            if (-k) % max(o, 1) not in residues:
                raise TheoremViolationError("asymmetric trace support from a "
                                            "symmetric Omega")
        return ReducedProblem(o, support, provenance, True)

    box_bound, certified = _k_range_from_boxes(omega, z)
    if box_bound is None and bound is None:
        raise ValueError("Omega is unbounded along the direction of z; "
                         "supply an explicit enumeration bound")
    if box_bound is not None:
        k_max = int(box_bound)
        exhausted = certified
        if bound is not None and bound < k_max:
            k_max = int(bound)
            exhausted = False
    else:
        k_max = int(bound)
        exhausted = False
    half = []
    provenance = {0: z.scale(0)}
    for k in range(1, k_max + 1):
        kz = z.scale(k)
        if omega.contains(kz):
            half.append(k)
            provenance[k] = kz
            provenance[-k] = kz.neg()
            if not omega.contains(kz.neg()):
                raise TheoremViolationError("asymmetric trace support from a "
                                            "symmetric Omega")
    return ReducedProblem(None, SupportZ(tuple(half)), provenance, exhausted)


# ---------------------------------------------------------------------------
# finite-group functions, witnesses


@dataclass
class GroupFunction:
    """Complex function on a finite product of cyclic groups."""

    group: GroupDescriptor
    values: np.ndarray   # shape = moduli

    def __post_init__(self):
        if not self.group.is_finite:
            raise ValueError("GroupFunction requires a finite group")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.group.moduli:
            raise ValueError(f"values shape {vals.shape} != {self.group.moduli}")
        self.values = vals

    def value_at(self, x: GroupElement) -> complex:
        return complex(self.values[tuple(int(c) for c in x.coords)])

    def dft(self) -> np.ndarray:
        return np.fft.fftn(self.values) / self.group.size

    def is_pd(self, tol: float = 1e-8) -> PdCertificate:
        hat = self.dft()
        flat = hat.reshape(-1)
        v = int(np.argmin(flat.real))
        m_val = float(flat.real[v])
        im_max = float(np.max(np.abs(flat.imag)))
        if im_max > tol:
            return PdCertificate(False, m_val, float(v), tol,
                                 reason="transform not real")
        return PdCertificate(m_val >= -tol, m_val, float(v), tol)

    def to_json(self) -> dict:
        idx = np.argwhere(self.values != 0)
        return {"domain": "group", "group": self.group.to_json(),
                "entries": [[[int(c) for c in i],
                             float(self.values[tuple(i)].real),
                             float(self.values[tuple(i)].imag)] for i in idx]}


def lift_witness(psi: SeqZm, group: GroupDescriptor, z: GroupElement,
                 omega: OmegaDescriptor, tol: float = 1e-8) -> GroupFunction:
    """Lift an extremal sequence on Z_m to F = sum_k psi(k) delta_{k z} on G.

    Verifies everything the construction guarantees: F is positive definite,
    F(0) = 1, F(z) = psi(1), and F vanishes outside Omega.  Any failure is a
    theorem violation and raises.
    """
    o = order(group, z)
    if o != psi.modulus:
        raise ValueError(f"order of z is {o}, sequence lives on Z_{psi.modulus}")
    vals = np.zeros(group.moduli, dtype=complex)
    for k in range(psi.modulus):
        kz = z.scale(k)
        v = psi[k]
        if v != 0:
            if not omega.contains(kz):
                raise TheoremViolationError(
                    f"witness support escapes Omega at k={k}")
            vals[tuple(int(c) for c in kz.coords)] += v
    fn = GroupFunction(group, vals)
    cert = fn.is_pd(tol)
    if not cert.is_pd:
        raise TheoremViolationError(
            f"lifted witness is not positive definite (min {cert.min_value:.3e})")
    if abs(fn.value_at(z.scale(0)) - 1.0) > 1e-9:
        raise TheoremViolationError("lifted witness has F(0) != 1")
    if abs(fn.value_at(z) - psi[1]) > 1e-12:
        raise TheoremViolationError("lifted witness has F(z) != psi(1)")
    return fn


def restrict(fn: GroupFunction, z: GroupElement, tol: float = 1e-8) -> SeqZm:
    """Restrict a PD function on finite G to the cyclic subgroup generated by z."""
    cert = fn.is_pd(tol)
    if not cert.is_pd:
        raise TheoremViolationError(
            f"restriction input is not positive definite (min {cert.min_value:.3e})")
    o = order(fn.group, z)
    vals = np.array([fn.value_at(z.scale(k)) for k in range(o)])
    out = SeqZm(o, vals)
    from .sequences import is_pd_zm  # local: keep module import cycle-free
    sub_cert = is_pd_zm(out, tol)
    if not sub_cert.is_pd:
        raise TheoremViolationError(
            f"restriction is not positive definite (min {sub_cert.min_value:.3e})")
    return out


def solve_group(group: GroupDescriptor, omega: OmegaDescriptor, z: GroupElement,
                mode: str = "complex", tol: float = 1e-8, bound: int | None = None):
    """Reduce to Z or Z_m and dispatch to the matching discrete solver.

    Finite order: complex mode gives CF_m(H_m), real mode K_m(H_m).  Infinite
    order: one value serves both modes.  The report's meta carries the reduced
    problem for audit.
    """
    from . import cyclic, integers  # local: solvers import this module's types

    if mode not in ("real", "complex"):
        raise ValueError("mode must be 'real' or 'complex'")
    red = reduce_problem(group, omega, z, bound=bound)
    if red.order is not None and red.order <= 2:
        # 2z = 0 (or z = 0): F(z) = F(0) = 1 is attained by f == 1 on <z>.
        m = red.order
        psi = SeqZm(m, np.ones(m))
        report = cyclic.SolveReport(
            value=1.0, extremal=psi, certificate=PdCertificate(True, 1.0 / m, 0.0, tol),
            enclosure=(1.0, 1.0),
            meta={"method": "order<=2", "order": m})
        report.meta["reduced"] = red.to_json()
        return report
    if red.order is not None:
        solver = cyclic.cf_m if mode == "complex" else cyclic.k_m
        report = solver(red.support, tol=tol)
    else:
        report = integers.cf_z(red.support, tol=tol)
        report.meta["modeNote"] = "infinite order: real and complex agree"
    report.meta["reduced"] = red.to_json()
    if not red.exhausted:
        report.meta["truncated"] = True
    return report
