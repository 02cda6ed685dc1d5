"""Probability measures on the positive half-line and on the unit circle.

A measure is a finite list of atoms plus an optional sampled density:
Lebesgue density on R+, or density with respect to dtheta/(2 pi) on the
circle. Measures are immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DeltaZeroHalfLine,
    MalformedDocument,
    MassNotNormalizable,
    WrongSpace,
    ZeroFirstMomentCircle,
)

TWO_PI = 2.0 * math.pi

MASS_TOL = 1e-9          # accepted deviation of total mass from 1
RENORM_WINDOW = 1e-2     # deviations up to this are silently repaired
ATOM_MERGE_TOL = 1e-12   # atoms closer than this are merged
FIRST_MOMENT_TOL = 1e-10


class Space(Enum):
    HALF_LINE = "r_plus"
    CIRCLE = "circle"


@dataclass(frozen=True)
class PointMass:
    location: float
    mass: float


@dataclass(frozen=True, eq=False)
class DensityPart:
    """Sampled density on a strictly increasing grid (trapezoid quadrature)."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or values.shape != grid.shape or grid.size < 2:
            raise MalformedDocument("density grid/values must be 1-d, equal length >= 2")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise MalformedDocument("density grid/values must be finite")
        if np.any(np.diff(grid) <= 0):
            raise MalformedDocument("density grid must be strictly increasing")
        if np.any(values < -1e-12):
            raise MalformedDocument("density values must be nonnegative")
        values = np.maximum(values, 0.0)
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class Measure:
    """Validated probability measure; construct via build_measure/load_measure."""

    space: Space
    atoms: tuple[PointMass, ...]
    density: DensityPart | None

    @property
    def atom_locations(self) -> np.ndarray:
        return np.array([a.location for a in self.atoms], dtype=float)

    @property
    def atom_masses(self) -> np.ndarray:
        return np.array([a.mass for a in self.atoms], dtype=float)


def _density_integral(space: Space, density: DensityPart | None) -> float:
    if density is None:
        return 0.0
    raw = float(np.trapezoid(density.values, density.grid))
    return raw / TWO_PI if space is Space.CIRCLE else raw


def _merge_atoms(pairs: list[tuple[float, float]]) -> list[tuple[float, float]]:
    pairs = sorted(pairs)
    merged: list[tuple[float, float]] = []
    for loc, mass in pairs:
        if merged and abs(loc - merged[-1][0]) < ATOM_MERGE_TOL:
            prev_loc, prev_mass = merged[-1]
            total = prev_mass + mass
            merged[-1] = ((prev_loc * prev_mass + loc * mass) / total, total)
        else:
            merged.append((loc, mass))
    return merged


def build_measure(
    space: Space,
    atoms: Iterable[tuple[float, float]] = (),
    density: DensityPart | None = None,
) -> Measure:
    """Validate, normalize, and freeze a measure.

    Atom locations are merged below ATOM_MERGE_TOL; circle angles are reduced
    mod 2 pi (density grids keep their chart but are shifted so the start lies
    in [0, 2 pi)). Total mass within RENORM_WINDOW of 1 is silently repaired,
    preferring the density part; larger deviations raise MassNotNormalizable.
    """
    pairs = []
    for loc, mass in atoms:
        loc = float(loc)
        mass = float(mass)
        if not (math.isfinite(loc) and math.isfinite(mass)):
            raise MalformedDocument("atom location/mass must be finite")
        if mass <= 0:
            raise MalformedDocument(f"atom mass must be positive, got {mass}")
        if space is Space.HALF_LINE:
            if loc < 0:
                raise MalformedDocument(f"half-line atom location must be >= 0, got {loc}")
        else:
            loc = loc % TWO_PI
        pairs.append((loc, mass))
    pairs = _merge_atoms(pairs)

    if density is not None:
        if space is Space.HALF_LINE:
            if density.grid[0] < 0:
                raise MalformedDocument("half-line density grid must start at >= 0")
        else:
            span = density.grid[-1] - density.grid[0]
            if span > TWO_PI + 1e-12:
                raise MalformedDocument("circle density grid spans more than 2 pi")
            shift = TWO_PI * math.floor(density.grid[0] / TWO_PI)
            if shift != 0.0:
                density = DensityPart(density.grid - shift, density.values)

    atom_sum = sum(m for _, m in pairs)
    dens_int = _density_integral(space, density)
    total = atom_sum + dens_int
    if abs(total - 1.0) > MASS_TOL:
        if abs(total - 1.0) > RENORM_WINDOW:
            raise MassNotNormalizable(f"total mass {total:.6g} is off by more than 1%")
        if density is not None and dens_int > 0 and atom_sum < 1.0 - 1e-15:
            density = DensityPart(density.grid, density.values * ((1.0 - atom_sum) / dens_int))
        elif atom_sum > 0:
            pairs = [(loc, m / total) for loc, m in pairs]
        else:
            raise MassNotNormalizable(f"cannot renormalize measure with total mass {total:.6g}")

    measure = Measure(space, tuple(PointMass(loc, m) for loc, m in pairs), density)

    if space is Space.HALF_LINE:
        if (
            density is None
            and len(measure.atoms) == 1
            and measure.atoms[0].location < ATOM_MERGE_TOL
        ):
            raise DeltaZeroHalfLine("measure equals the point mass at zero")
    else:
        m1 = moments(measure, 1)[0]
        if abs(m1) < FIRST_MOMENT_TOL:
            raise ZeroFirstMomentCircle(f"first moment {m1:.3g} vanishes")
    return measure


def from_atoms(space: Space, pairs: Iterable[tuple[float, float]]) -> Measure:
    return build_measure(space, atoms=pairs)


def load_measure(text: str) -> Measure:
    """Parse and validate a measure document (JSON, see README schema)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("document root must be an object")
    try:
        space = Space(doc.get("space"))
    except ValueError:
        raise MalformedDocument(f"space must be 'r_plus' or 'circle', got {doc.get('space')!r}")
    raw_atoms = doc.get("atoms", [])
    if not isinstance(raw_atoms, list):
        raise MalformedDocument("atoms must be an array")
    atoms = []
    for entry in raw_atoms:
        if not isinstance(entry, dict) or "location" not in entry or "mass" not in entry:
            raise MalformedDocument("each atom needs 'location' and 'mass'")
        atoms.append((entry["location"], entry["mass"]))
    density = None
    if doc.get("density") is not None:
        dens = doc["density"]
        if not isinstance(dens, dict) or "grid" not in dens or "values" not in dens:
            raise MalformedDocument("density needs 'grid' and 'values' arrays")
        density = DensityPart(np.asarray(dens["grid"], dtype=float),
                              np.asarray(dens["values"], dtype=float))
    return build_measure(space, atoms, density)


def dump_measure(m: Measure) -> str:
    doc: dict = {
        "space": m.space.value,
        "atoms": [{"location": a.location, "mass": a.mass} for a in m.atoms],
    }
    if m.density is not None:
        doc["density"] = {
            "grid": [float(x) for x in m.density.grid],
            "values": [float(v) for v in m.density.values],
        }
    return json.dumps(doc, sort_keys=True, indent=2)


def total_mass(m: Measure) -> float:
    return float(sum(a.mass for a in m.atoms)) + _density_integral(m.space, m.density)


def moments(m: Measure, order: int) -> np.ndarray:
    """Moments m_k = integral of zeta^k, k = 1..order, as a complex array.

    Atoms are summed exactly; the density is integrated by composite
    trapezoid on its grid.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    k = np.arange(1, order + 1)
    out = np.zeros(order, dtype=complex)
    if m.atoms:
        locs = m.atom_locations
        masses = m.atom_masses
        if m.space is Space.HALF_LINE:
            powers = locs[None, :] ** k[:, None]
        else:
            powers = np.exp(1j * k[:, None] * locs[None, :])
        out += (powers * masses[None, :]).sum(axis=1)
    if m.density is not None:
        grid, vals = m.density.grid, m.density.values
        if m.space is Space.HALF_LINE:
            integrand = (grid[None, :] ** k[:, None]) * vals[None, :]
            out += np.trapezoid(integrand, grid, axis=1)
        else:
            integrand = np.exp(1j * k[:, None] * grid[None, :]) * vals[None, :]
            out += np.trapezoid(integrand, grid, axis=1) / TWO_PI
    return out


def rotate(m: Measure, angle: float) -> Measure:
    """Rotate a circle measure by `angle` radians (convolution with a point mass)."""
    if m.space is not Space.CIRCLE:
        raise WrongSpace("rotate requires a circle measure")
    atoms = [((a.location + angle) % TWO_PI, a.mass) for a in m.atoms]
    density = None
    if m.density is not None:
        grid = m.density.grid + angle
        grid = grid - TWO_PI * math.floor(grid[0] / TWO_PI)
        density = DensityPart(grid, m.density.values)
    return build_measure(m.space, atoms, density)


def support_bounds(m: Measure) -> tuple[float, float]:
    """Extremes of the strictly positive part of a half-line support."""
    if m.space is not Space.HALF_LINE:
        raise WrongSpace("support_bounds is a half-line helper")
    lo = math.inf
    hi = 0.0
    for a in m.atoms:
        if a.location > ATOM_MERGE_TOL:
            lo = min(lo, a.location)
            hi = max(hi, a.location)
    if m.density is not None:
        positive = np.nonzero(m.density.values > 0)[0]
        if positive.size:
            glo = m.density.grid[max(positive[0] - 1, 0)]
            ghi = m.density.grid[min(positive[-1] + 1, m.density.grid.size - 1)]
            if glo > ATOM_MERGE_TOL:
                lo = min(lo, glo)
            else:
                lo = min(lo, max(ghi * 1e-3, ATOM_MERGE_TOL))
            hi = max(hi, ghi)
    if not math.isfinite(lo) or hi <= 0:
        raise DeltaZeroHalfLine("measure has no strictly positive support")
    return lo, hi
