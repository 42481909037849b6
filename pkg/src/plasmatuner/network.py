"""Two-port network algebra: ABCD/S representations, cascading, derived metrics.

ABCD is the canonical representation for composition (cascading is a plain
matrix product); S-parameters are the external/reporting representation.
All entries may be complex scalars or equal-length numpy arrays (one entry
per frequency), so a whole sweep can be composed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

ComplexLike = Union[complex, np.ndarray]


class DegenerateNetworkError(ValueError):
    """ABCD matrix has no S-parameter image at the given reference impedance."""


class NonInvertibleNetworkError(ValueError):
    """S-matrix with s21 = 0 (isolated ports) has no ABCD representation."""


class ResonantTerminationError(ValueError):
    """1 - s22*gamma_load vanished; the termination resonates with the network."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, positive frequency points in Hz."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-d array")
        if np.any(pts <= 0.0):
            raise ValueError("frequencies must be positive")
        if np.any(np.diff(pts) <= 0.0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def linspace(cls, start: float, stop: float, count: int) -> "FrequencyGrid":
        if count < 1:
            raise ValueError("count must be >= 1")
        if count == 1:
            if stop != start:
                raise ValueError("single-point grid requires start == stop")
            return cls(np.array([float(start)]))
        return cls(np.linspace(start, stop, count))

    @property
    def omega(self) -> np.ndarray:
        """Angular frequency 2*pi*f in rad/s."""
        return 2.0 * np.pi * self.points

    def __len__(self) -> int:
        return self.points.size

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class AbcdMatrix:
    """Transmission (chain) matrix of a two-port.

    a, d are dimensionless, b is in ohms, c in siemens.  Reciprocal
    elements satisfy a*d - b*c = 1.
    """

    a: ComplexLike
    b: ComplexLike
    c: ComplexLike
    d: ComplexLike

    def __matmul__(self, other: "AbcdMatrix") -> "AbcdMatrix":
        return cascade(self, other)

    @property
    def det(self) -> ComplexLike:
        return self.a * self.d - self.b * self.c

    def is_reciprocal(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.det - 1.0) <= tol))

    def inv(self) -> "AbcdMatrix":
        """Matrix inverse (general 2x2; reduces to (d,-b,-c,a) when det=1)."""
        det = self.det
        return AbcdMatrix(self.d / det, -self.b / det, -self.c / det, self.a / det)


IDENTITY = AbcdMatrix(1.0 + 0j, 0.0 + 0j, 0.0 + 0j, 1.0 + 0j)


@dataclass(frozen=True)
class SMatrix2:
    """Scattering parameters of a two-port at reference impedance z0 (real, ohms)."""

    s11: ComplexLike
    s12: ComplexLike
    s21: ComplexLike
    s22: ComplexLike
    z0: float = 50.0

    def __post_init__(self):
        if not (self.z0 > 0):
            raise ValueError("reference impedance must be positive")

    def is_passive(self, tol: float = 1e-9) -> bool:
        """Both column norms |s11|^2+|s21|^2 and |s12|^2+|s22|^2 within 1+tol."""
        c1 = np.abs(self.s11) ** 2 + np.abs(self.s21) ** 2
        c2 = np.abs(self.s12) ** 2 + np.abs(self.s22) ** 2
        return bool(np.all(c1 <= 1.0 + tol) and np.all(c2 <= 1.0 + tol))

    def is_reciprocal(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.s12 - self.s21) <= tol))


TwoPortParams = Union[SMatrix2, AbcdMatrix]


@dataclass(frozen=True)
class NetworkSweep:
    """One TwoPortParams per frequency grid point."""

    grid: FrequencyGrid
    params: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) != len(self.grid):
            raise ValueError("params length must equal grid length")

    def s_matrices(self, z0: float = 50.0) -> list:
        """Parameters as SMatrix2, converting ABCD entries as needed."""
        out = []
        for p in self.params:
            if isinstance(p, AbcdMatrix):
                out.append(abcd_to_s(p, z0))
            else:
                out.append(p)
        return out

    def s_array(self) -> np.ndarray:
        """Stack S-parameters into an (n, 2, 2) complex array."""
        mats = self.s_matrices()
        arr = np.empty((len(mats), 2, 2), dtype=complex)
        for i, s in enumerate(mats):
            arr[i, 0, 0] = s.s11
            arr[i, 0, 1] = s.s12
            arr[i, 1, 0] = s.s21
            arr[i, 1, 1] = s.s22
        return arr


def cascade(left: AbcdMatrix, right: AbcdMatrix) -> AbcdMatrix:
    """Chain two two-ports: matrix product left @ right."""
    return AbcdMatrix(
        a=left.a * right.a + left.b * right.c,
        b=left.a * right.b + left.b * right.d,
        c=left.c * right.a + left.d * right.c,
        d=left.c * right.b + left.d * right.d,
    )


def cascade_all(matrices) -> AbcdMatrix:
    """Cascade a sequence of ABCD matrices in order, port 1 first."""
    total = IDENTITY
    for m in matrices:
        total = cascade(total, m)
    return total


def series_element(z: ComplexLike) -> AbcdMatrix:
    """Series impedance z on the main line."""
    zero = np.zeros_like(np.asarray(z)) if isinstance(z, np.ndarray) else 0.0 + 0j
    one = zero + 1.0
    return AbcdMatrix(a=one, b=z + zero, c=zero, d=one)


def shunt_branch_y(y: ComplexLike) -> AbcdMatrix:
    """Shunt admittance y from the main line to ground."""
    zero = np.zeros_like(np.asarray(y)) if isinstance(y, np.ndarray) else 0.0 + 0j
    one = zero + 1.0
    return AbcdMatrix(a=one, b=zero, c=y + zero, d=one)


def shunt_branch(z_in: ComplexLike) -> AbcdMatrix:
    """Shunt branch of input impedance z_in hung on the main line.

    A short-on-line (z_in = 0) has no finite admittance entry; pass the
    branch admittance to shunt_branch_y instead.
    """
    if np.any(np.asarray(z_in) == 0):
        raise ValueError("z_in = 0: short on line, use shunt_branch_y(y)")
    return shunt_branch_y(1.0 / np.asarray(z_in) if isinstance(z_in, np.ndarray) else 1.0 / z_in)


def abcd_to_s(m: AbcdMatrix, z0: float) -> SMatrix2:
    """Exact standard ABCD -> S conversion at real reference impedance z0."""
    if not (z0 > 0):
        raise ValueError("reference impedance must be positive")
    denom = m.a + m.b / z0 + m.c * z0 + m.d
    if np.any(np.abs(denom) == 0.0):
        raise DegenerateNetworkError("a + b/z0 + c*z0 + d = 0: degenerate network")
    return SMatrix2(
        s11=(m.a + m.b / z0 - m.c * z0 - m.d) / denom,
        s12=2.0 * (m.a * m.d - m.b * m.c) / denom,
        s21=2.0 / denom,
        s22=(-m.a + m.b / z0 - m.c * z0 + m.d) / denom,
        z0=z0,
    )


def s_to_abcd(s: SMatrix2) -> AbcdMatrix:
    """Inverse of abcd_to_s; requires s21 != 0."""
    if np.any(np.abs(np.asarray(s.s21)) == 0.0):
        raise NonInvertibleNetworkError("s21 = 0: isolated ports have no ABCD form")
    z0 = s.z0
    two_s21 = 2.0 * s.s21
    return AbcdMatrix(
        a=((1.0 + s.s11) * (1.0 - s.s22) + s.s12 * s.s21) / two_s21,
        b=z0 * ((1.0 + s.s11) * (1.0 + s.s22) - s.s12 * s.s21) / two_s21,
        c=((1.0 - s.s11) * (1.0 - s.s22) - s.s12 * s.s21) / (z0 * two_s21),
        d=((1.0 - s.s11) * (1.0 + s.s22) + s.s12 * s.s21) / two_s21,
    )


def input_reflection(s: SMatrix2, gamma_load: ComplexLike) -> ComplexLike:
    """Reflection looking into port 1 with port 2 terminated in gamma_load.

    Gamma_in = s11 + s12*s21*gamma_load / (1 - s22*gamma_load); equals s11
    for a matched load.
    """
    if np.any(np.abs(np.asarray(gamma_load)) > 1.0 + 1e-12):
        raise ValueError("|gamma_load| must be <= 1")
    denom = 1.0 - s.s22 * gamma_load
    if np.any(np.abs(np.asarray(denom)) == 0.0):
        raise ResonantTerminationError("1 - s22*gamma_load = 0")
    return s.s11 + s.s12 * s.s21 * gamma_load / denom
