"""Sequences on Z and Z_m, their transforms, and positive definiteness checks.

A finitely supported sequence psi on Z is positive definite exactly when its
trigonometric polynomial sum_n psi(n) e^{2 pi i n t} is nonnegative on the
circle; a sequence on Z_m is positive definite exactly when its discrete
Fourier transform is nonnegative.  Both checks are implemented here and
reported through PdCertificate.

DFT convention: forward transform carries the 1/m factor,
    psi_hat(v) = (1/m) sum_j psi(j) exp(-2 pi i j v / m),
so that psi(0) = 1 is equivalent to sum_v psi_hat(v) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

# Entries with modulus at or below this are dropped when building a SeqZ,
# keeping supports finite after floating-point convolutions.
DROP_TOL = 1e-14
# Default absolute tolerance on transform values for PD certification.
PD_TOL = 1e-8


# ---------------------------------------------------------------------------
# supports


@dataclass(frozen=True)
class SupportZ:
    """Symmetric finite subset of Z containing 0, stored by its positive half."""

    half: tuple[int, ...]

    def __post_init__(self):
        half = tuple(int(k) for k in self.half)
        if any(k <= 0 for k in half):
            raise ValueError("half set must contain strictly positive integers")
        if any(b <= a for a, b in zip(half, half[1:])):
            raise ValueError("half set must be strictly increasing")
        object.__setattr__(self, "half", half)

    @property
    def admissible(self) -> bool:
        return 1 in self.half

    def full(self) -> list[int]:
        return [-k for k in reversed(self.half)] + [0] + list(self.half)

    def contains(self, k: int) -> bool:
        return k == 0 or abs(k) in set(self.half)

    def max_element(self) -> int:
        return self.half[-1] if self.half else 0

    def to_json(self) -> dict:
        return {"half": list(self.half)}

    @classmethod
    def from_json(cls, doc: dict) -> "SupportZ":
        return cls(half=tuple(doc["half"]))


@dataclass(frozen=True)
class SupportZm:
    """Symmetric subset of Z_m containing 0."""

    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        m = int(self.modulus)
        if m < 1:
            raise ValueError("modulus must be positive")
        res = frozenset(int(r) % m for r in self.residues) | {0}
        if any((-r) % m not in res for r in res):
            raise ValueError("residue set must be closed under negation mod m")
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "residues", res)

    @property
    def admissible(self) -> bool:
        return self.modulus >= 2 and 1 % self.modulus in self.residues

    def half(self) -> list[int]:
        """Sorted representatives in [1, m/2]."""
        return sorted(r for r in self.residues if 1 <= r <= self.modulus // 2)

    def contains(self, k: int) -> bool:
        return k % self.modulus in self.residues

    def complement(self) -> frozenset[int]:
        return frozenset(range(self.modulus)) - self.residues

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "half": self.half()}

    @classmethod
    def from_json(cls, doc: dict) -> "SupportZm":
        m = int(doc["modulus"])
        half = [int(h) for h in doc["half"]]
        res = {0} | {h % m for h in half} | {(-h) % m for h in half}
        return cls(modulus=m, residues=frozenset(res))


# ---------------------------------------------------------------------------
# sequences


class SeqZ:
    """Finitely supported complex-valued function on Z."""

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[int, complex] | Iterable[tuple[int, complex]],
                 drop_tol: float = DROP_TOL):
        items = entries.items() if isinstance(entries, Mapping) else entries
        kept = {}
        for k, v in items:
            v = complex(v)
            if abs(v) > drop_tol:
                kept[int(k)] = kept.get(int(k), 0j) + v
        self.entries = {k: kept[k] for k in sorted(kept)}

    def support(self) -> list[int]:
        return list(self.entries)

    def __getitem__(self, k: int) -> complex:
        return self.entries.get(int(k), 0j)

    def __len__(self) -> int:
        return len(self.entries)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def band(self) -> int:
        """Smallest N with support inside [-N, N]."""
        return max((abs(k) for k in self.entries), default=0)

    def allclose(self, other: "SeqZ", tol: float = 1e-12) -> bool:
        keys = set(self.entries) | set(other.entries)
        return all(abs(self[k] - other[k]) <= tol for k in keys)

    def scaled(self, factor: complex) -> "SeqZ":
        return SeqZ({k: factor * v for k, v in self.entries.items()}, drop_tol=0.0)

    def __repr__(self) -> str:
        return f"SeqZ({self.entries!r})"

    def to_json(self) -> dict:
        return {"domain": "Z",
                "entries": [[k, v.real, v.imag] for k, v in self.entries.items()]}

    @classmethod
    def from_json(cls, doc: dict) -> "SeqZ":
        if doc.get("domain") != "Z":
            raise ValueError("expected a sequence document with domain 'Z'")
        return cls({int(k): complex(re, im) for k, re, im in doc["entries"]})


class SeqZm:
    """Complex-valued function on Z_m, stored as a length-m vector."""

    __slots__ = ("modulus", "values")

    def __init__(self, modulus: int, values):
        self.modulus = int(modulus)
        vals = np.asarray(values, dtype=complex)
        if vals.shape != (self.modulus,):
            raise ValueError(f"expected {self.modulus} values, got shape {vals.shape}")
        self.values = vals.copy()

    @classmethod
    def from_entries(cls, modulus: int, entries: Mapping[int, complex]) -> "SeqZm":
        vals = np.zeros(int(modulus), dtype=complex)
        for k, v in entries.items():
            vals[int(k) % int(modulus)] += complex(v)
        return cls(modulus, vals)

    def __getitem__(self, k: int) -> complex:
        return complex(self.values[int(k) % self.modulus])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.modulus else 0.0

    def allclose(self, other: "SeqZm", tol: float = 1e-12) -> bool:
        return (self.modulus == other.modulus
                and bool(np.all(np.abs(self.values - other.values) <= tol)))

    def __repr__(self) -> str:
        return f"SeqZm({self.modulus}, {np.round(self.values, 12)!r})"

    def to_json(self) -> dict:
        return {"domain": "Zm", "modulus": self.modulus,
                "entries": [[k, v.real, v.imag]
                            for k, v in enumerate(self.values) if v != 0]}

    @classmethod
    def from_json(cls, doc: dict) -> "SeqZm":
        if doc.get("domain") != "Zm":
            raise ValueError("expected a sequence document with domain 'Zm'")
        m = int(doc["modulus"])
        vals = np.zeros(m, dtype=complex)
        for k, re, im in doc["entries"]:
            vals[int(k) % m] = complex(re, im)
        return cls(m, vals)


def sequence_from_json(doc: dict):
    if doc.get("domain") == "Z":
        return SeqZ.from_json(doc)
    if doc.get("domain") == "Zm":
        return SeqZm.from_json(doc)
    raise ValueError("sequence document must have domain 'Z' or 'Zm'")


@dataclass(frozen=True)
class PdCertificate:
    """Outcome of a positive definiteness check.

    min_value is the minimum of the trigonometric polynomial on the circle
    (Z case) or the minimum of the real part of the DFT (Z_m case);
    min_location the point (t in [0,1), or residue) where it is attained.
    """

    is_pd: bool
    min_value: float
    min_location: float
    tolerance: float
    reason: str = ""

    def to_json(self) -> dict:
        return {"isPd": self.is_pd, "minValue": self.min_value,
                "minLocation": self.min_location, "tolerance": self.tolerance,
                "reason": self.reason}


# ---------------------------------------------------------------------------
# operations


def reverse_conjugate(s):
    """The converse sequence: x -> conj(s(-x)).  PD sequences are fixed points."""
    if isinstance(s, SeqZ):
        return SeqZ({-k: np.conj(v) for k, v in s.entries.items()}, drop_tol=0.0)
    if isinstance(s, SeqZm):
        m = s.modulus
        vals = np.conj(s.values[(-np.arange(m)) % m])
        return SeqZm(m, vals)
    raise TypeError(f"unsupported sequence type {type(s)!r}")


def convolve(a, b):
    """(a * b)(n) = sum_k a(k) b(n-k); indices mod m in the cyclic case."""
    if isinstance(a, SeqZ) and isinstance(b, SeqZ):
        out: dict[int, complex] = {}
        for k, va in a.entries.items():
            for j, vb in b.entries.items():
                out[k + j] = out.get(k + j, 0j) + va * vb
        return SeqZ(out)
    if isinstance(a, SeqZm) and isinstance(b, SeqZm):
        if a.modulus != b.modulus:
            raise ValueError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
        m = a.modulus
        if m <= 64:
            vals = np.array([np.sum(a.values * b.values[(n - np.arange(m)) % m])
                             for n in range(m)])
        else:
            vals = np.fft.ifft(np.fft.fft(a.values) * np.fft.fft(b.values))
        return SeqZm(m, vals)
    raise TypeError("convolve expects two SeqZ or two SeqZm")


def convolution_square(theta):
    """theta * reverse_conjugate(theta); always positive definite."""
    return convolve(theta, reverse_conjugate(theta))


def dft_zm(s: SeqZm) -> SeqZm:
    """Forward transform with the 1/m factor."""
    return SeqZm(s.modulus, np.fft.fft(s.values) / s.modulus)


def idft_zm(s: SeqZm) -> SeqZm:
    """Inverse of dft_zm: psi(n) = sum_v psi_hat(v) exp(2 pi i n v / m)."""
    return SeqZm(s.modulus, np.fft.ifft(s.values) * s.modulus)


def trig_eval(s: SeqZ, t: float) -> complex:
    """sum_n psi(n) exp(2 pi i n t)."""
    ks = np.fromiter(s.entries.keys(), dtype=float, count=len(s.entries))
    vs = np.fromiter(s.entries.values(), dtype=complex, count=len(s.entries))
    return complex(np.sum(vs * np.exp(2j * np.pi * ks * t)))


def _self_converse_deviation(s: SeqZ) -> float:
    return max((abs(s[k] - np.conj(s[-k])) for k in s.entries), default=0.0)


def _trig_values(s: SeqZ, ts: np.ndarray) -> np.ndarray:
    """Real values of the trigonometric polynomial of a self-converse s."""
    out = np.full(ts.shape, float(s[0].real))
    for k in s.entries:
        if k > 0:
            v = s[k]
            out += 2.0 * (v.real * np.cos(2 * np.pi * k * ts)
                          - v.imag * np.sin(2 * np.pi * k * ts))
    return out


def _trig_deriv12(s: SeqZ, t: float) -> tuple[float, float]:
    d1 = 0.0
    d2 = 0.0
    for k in s.entries:
        if k > 0:
            v = s[k]
            w = 2 * np.pi * k
            c, sn = np.cos(w * t), np.sin(w * t)
            d1 += 2.0 * w * (-v.real * sn - v.imag * c)
            d2 += 2.0 * w * w * (-v.real * c + v.imag * sn)
    return d1, d2


def min_trig(s: SeqZ) -> tuple[float, float]:
    """Global minimizer and minimum of the trigonometric polynomial on [0,1).

    Requires a self-converse sequence (so the polynomial is real-valued).
    Stationary points come from the unit-circle roots of the derivative
    polynomial; a coarse grid with Newton polish guards against missed or
    ill-conditioned root clusters.
    """
    dev = _self_converse_deviation(s)
    if dev > 1e-9 * (1.0 + s.max_abs()):
        raise ValueError(f"sequence is not self-converse (deviation {dev:.3e})")
    n = s.band()
    if n == 0:
        return 0.0, float(s[0].real)

    candidates = list(np.arange(8 * (2 * n + 1)) / (8 * (2 * n + 1)))

    # Unit-circle roots of q(w) = sum_k k psi(k) w^(k+N), i.e. T'(t) = 0.
    coeffs = np.array([ (j - n) * s[j - n] for j in range(2 * n + 1) ], dtype=complex)
    if np.max(np.abs(coeffs)) > 0:
        from .rootfind import poly_roots, RootConvergenceError  # local: avoids cycle
        try:
            roots = poly_roots(coeffs, tol=1e-8)
            on_circle = roots[np.abs(np.abs(roots) - 1.0) <= 1e-6]
            candidates.extend((np.angle(on_circle) / (2 * np.pi)) % 1.0)
        except RootConvergenceError:
            pass  # grid + Newton fallback still bounds the answer

    # Newton polish toward stationary points, steps clamped to a grid cell.
    cap = 1.0 / (8 * (2 * n + 1))
    polished = []
    for t0 in candidates:
        t = float(t0)
        for _ in range(30):
            d1, d2 = _trig_deriv12(s, t)
            if abs(d2) < 1e-30:
                break
            step = d1 / d2
            step = max(-cap, min(cap, step))
            t = (t - step) % 1.0
            if abs(step) < 1e-16:
                break
        polished.append(t)

    ts = np.array(candidates + polished)
    vals = _trig_values(s, ts)
    i = int(np.argmin(vals))
    return float(ts[i] % 1.0), float(vals[i])


def is_pd_z(s: SeqZ, tol: float = PD_TOL) -> PdCertificate:
    """Herglotz criterion for finitely supported sequences on Z.

    Non-self-converse input is reported not PD rather than symmetrized;
    the certificate still carries the minimum of the self-converse part.
    """
    dev = _self_converse_deviation(s)
    symmetric = dev <= tol * (1.0 + s.max_abs())
    sym = SeqZ({k: 0.5 * (s[k] + np.conj(s[-k]))
                for k in set(s.entries) | {-k for k in s.entries}}, drop_tol=0.0)
    t_min, m_val = min_trig(sym)
    if not symmetric:
        return PdCertificate(False, m_val, t_min, tol, reason="not self-converse")
    return PdCertificate(m_val >= -tol, m_val, t_min, tol)


def is_pd_zm(s: SeqZm, tol: float = PD_TOL) -> PdCertificate:
    """Bochner criterion on Z_m: the DFT must be (real and) nonnegative."""
    hat = dft_zm(s).values
    v = int(np.argmin(hat.real))
    m_val = float(hat.real[v])
    im_max = float(np.max(np.abs(hat.imag)))
    if im_max > tol:
        return PdCertificate(False, m_val, float(v), tol,
                             reason="transform not real")
    return PdCertificate(m_val >= -tol, m_val, float(v), tol)


def triangle_sequence(n: int) -> SeqZ:
    """The triangle (1 - |k|/(2n+1))_+ on [-2n, 2n]; positive definite."""
    width = 2 * n + 1
    return SeqZ({k: 1.0 - abs(k) / width
                 for k in range(-2 * n, 2 * n + 1)}, drop_tol=0.0)
