"""Moment transforms psi, eta, G and their boundary behavior.

psi is the moment generating integral, eta = psi/(1+psi) its Pick/Schur-class
companion, G the Cauchy transform on the half-line. Boundary values and
Julia-Caratheodory derivatives are extracted along radial sequences with
Richardson extrapolation; radial approach is the numerically stablest
representative of nontangential convergence.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, EtaPole, NoConvergence, PoleHit, WrongSpace
from .measure import Measure, Space

POLE_TOL = 1e-14
TOL_BOUNDARY = 1e-8
K_START = 4
K_MAX = 40
JC_INFINITE = complex(math.inf, 0.0)

_KERNELS: "weakref.WeakKeyDictionary[Measure, dict]" = weakref.WeakKeyDictionary()


def _kernel(m: Measure) -> dict:
    """Per-measure cached support arrays for vectorized evaluation."""
    cached = _KERNELS.get(m)
    if cached is not None:
        return cached
    k: dict = {"space": m.space}
    locs = m.atom_locations
    k["masses"] = m.atom_masses
    if m.space is Space.HALF_LINE:
        k["points"] = locs.astype(complex)
    else:
        # Herglotz kernel against d mu(e^{-it}): atom at angle s contributes at e^{-is}
        k["points"] = np.exp(-1j * locs)
    if m.density is not None:
        k["grid"] = m.density.grid
        k["values"] = m.density.values
        if m.space is Space.CIRCLE:
            k["gpoints"] = np.exp(-1j * m.density.grid)
        else:
            k["gpoints"] = m.density.grid.astype(complex)
    _KERNELS[m] = k
    return k


def _in_gap(m: Measure, x: float) -> bool:
    """True when x > 0 carries no mass nearby (spectral gap of a half-line measure)."""
    if x <= 0:
        return False
    for a in m.atoms:
        if abs(x - a.location) < 1e-12 * max(1.0, x):
            return False
    if m.density is not None:
        grid, vals = m.density.grid, m.density.values
        if grid[0] <= x <= grid[-1]:
            i = int(np.searchsorted(grid, x))
            lo, hi = max(i - 1, 0), min(i + 1, vals.size)
            if np.any(vals[lo:hi] > 0):
                return False
    return True


def check_domain(m: Measure, z) -> None:
    """Raise DomainError unless every point is interior (or in a gap, half-line)."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if m.space is Space.CIRCLE:
        if np.any(np.abs(zs) >= 1.0):
            raise DomainError("circle-case evaluation requires |z| < 1")
        return
    on_axis = (zs.imag == 0) & (zs.real >= 0)
    for w in zs[on_axis]:
        x = w.real
        if x == 0.0 or not _in_gap(m, 1.0 / x):
            raise DomainError(f"z = {w} lies on [0, inf) outside any spectral gap")


def psi_eta_raw(m: Measure, z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized psi and eta with a finite/ok mask instead of exceptions.

    Intended for solver inner loops; no domain checks, poles come back as
    non-finite values with ok = False.
    """
    k = _kernel(m)
    zs = np.asarray(z, dtype=complex)
    zv = np.atleast_1d(zs)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if m.space is Space.HALF_LINE:
            acc = np.zeros(zv.shape, dtype=complex)
            if k["points"].size:
                zt = zv[..., None] * k["points"]
                acc = (k["masses"] * zt / (1.0 - zt)).sum(axis=-1)
            if "grid" in k:
                zt = zv[..., None] * k["gpoints"]
                integrand = (zt / (1.0 - zt)) * k["values"]
                acc = acc + np.trapezoid(integrand, k["grid"], axis=-1)
            psi = acc
        else:
            acc = np.zeros(zv.shape, dtype=complex)
            if k["points"].size:
                a = k["points"]
                acc = (k["masses"] * (a + zv[..., None]) / (a - zv[..., None])).sum(axis=-1)
            if "grid" in k:
                b = k["gpoints"]
                integrand = ((b + zv[..., None]) / (b - zv[..., None])) * k["values"]
                acc = acc + np.trapezoid(integrand, k["grid"], axis=-1) / (2.0 * math.pi)
            psi = -0.5 + 0.5 * acc
        denom = 1.0 + psi
        eta = psi / denom
    ok = np.isfinite(psi) & np.isfinite(eta) & (np.abs(denom) >= POLE_TOL)
    if zs.ndim == 0:
        return psi.reshape(()), eta.reshape(()), ok.reshape(())
    return psi, eta, ok


def _check_poles(m: Measure, z) -> None:
    k = _kernel(m)
    if not k["points"].size:
        return
    zv = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(1.0 - zv[..., None] * _atom_points_direct(m)) < POLE_TOL):
        raise PoleHit("evaluation point collides with an atom pole")


def _atom_points_direct(m: Measure) -> np.ndarray:
    locs = m.atom_locations
    if m.space is Space.HALF_LINE:
        return locs.astype(complex)
    return np.exp(1j * locs)


def psi(m: Measure, z):
    """psi at interior points (or half-line gap points); scalar in, scalar out."""
    check_domain(m, z)
    _check_poles(m, z)
    val, _, ok = psi_eta_raw(m, z)
    if not np.all(np.atleast_1d(ok) | np.isfinite(np.atleast_1d(val))):
        raise PoleHit("psi evaluation hit a pole")
    return complex(val) if np.asarray(z).ndim == 0 else val


def eta(m: Measure, z):
    """eta = psi/(1+psi); conjugate-symmetric on the half-line case."""
    check_domain(m, z)
    _check_poles(m, z)
    pval, eval_, ok = psi_eta_raw(m, z)
    if not np.all(np.atleast_1d(ok)):
        raise EtaPole("1 + psi vanishes at an evaluation point")
    return complex(eval_) if np.asarray(z).ndim == 0 else eval_


def eta_prime_raw(m: Measure, z) -> np.ndarray:
    """Derivative of eta, vectorized, no checks (solver fallback use)."""
    k = _kernel(m)
    zv = np.atleast_1d(np.asarray(z, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if m.space is Space.HALF_LINE:
            dpsi = np.zeros(zv.shape, dtype=complex)
            if k["points"].size:
                dpsi = (k["masses"] * k["points"] / (1.0 - zv[..., None] * k["points"]) ** 2).sum(axis=-1)
            if "grid" in k:
                integrand = (k["gpoints"] / (1.0 - zv[..., None] * k["gpoints"]) ** 2) * k["values"]
                dpsi = dpsi + np.trapezoid(integrand, k["grid"], axis=-1)
        else:
            dpsi = np.zeros(zv.shape, dtype=complex)
            if k["points"].size:
                a = k["points"]
                dpsi = (k["masses"] * a / (a - zv[..., None]) ** 2).sum(axis=-1)
            if "grid" in k:
                b = k["gpoints"]
                integrand = (b / (b - zv[..., None]) ** 2) * k["values"]
                dpsi = dpsi + np.trapezoid(integrand, k["grid"], axis=-1) / (2.0 * math.pi)
        pval, _, _ = psi_eta_raw(m, zv)
        out = dpsi / (1.0 + pval) ** 2
    if np.asarray(z).ndim == 0:
        return out.reshape(())
    return out


def eta_prime(m: Measure, z):
    check_domain(m, z)
    _check_poles(m, z)
    out = eta_prime_raw(m, z)
    return complex(out) if np.asarray(z).ndim == 0 else out


def cauchy(m: Measure, w):
    """Cauchy transform G(w) of a half-line measure, w off the closed support."""
    if m.space is not Space.HALF_LINE:
        raise WrongSpace("cauchy requires a half-line measure")
    ws = np.asarray(w, dtype=complex)
    wv = np.atleast_1d(ws)
    locs = m.atom_locations
    if locs.size and np.any(np.abs(wv[..., None] - locs) < POLE_TOL * np.maximum(1.0, np.abs(wv[..., None]))):
        raise PoleHit("Cauchy transform pole at an atom")
    on_axis = (wv.imag == 0) & (wv.real >= 0)
    for x in wv[on_axis]:
        if not _in_gap(m, float(x.real)):
            raise DomainError(f"w = {x} lies in the closed support")
    acc = np.zeros(wv.shape, dtype=complex)
    if locs.size:
        acc = (m.atom_masses / (wv[..., None] - locs)).sum(axis=-1)
    if m.density is not None:
        grid, vals = m.density.grid, m.density.values
        acc = acc + np.trapezoid(vals / (wv[..., None] - grid), grid, axis=-1)
    return complex(acc.reshape(())) if ws.ndim == 0 else acc


@dataclass(frozen=True)
class PickViolation:
    z: complex
    kind: str
    magnitude: float


def pick_violations(f: Callable, samples) -> list[PickViolation]:
    """Check arg f(z) in [arg z, pi) at upper-half-plane samples."""
    out = []
    for z in np.asarray(samples, dtype=complex).reshape(-1):
        v = f(z)
        az, av = np.angle(z), np.angle(v)
        if av < az - 1e-12:
            out.append(PickViolation(complex(z), "arg_below_arg_z", float(az - av)))
        if not (0 <= av < math.pi) and v.imag < -1e-13 * abs(v):
            out.append(PickViolation(complex(z), "left_upper_half_plane", float(-v.imag)))
    return out


def schur_violations(f: Callable, samples) -> list[PickViolation]:
    """Check |f(z)| <= |z| at disk samples."""
    out = []
    for z in np.asarray(samples, dtype=complex).reshape(-1):
        v = f(z)
        excess = abs(v) - abs(z)
        if excess > 1e-12:
            out.append(PickViolation(complex(z), "modulus_exceeds_z", float(excess)))
    return out


def validate_pick_class(m: Measure, samples) -> list[PickViolation]:
    """Class membership checks for eta of a measure; empty list = pass.

    Half-line: the argument condition at upper-half-plane samples and the
    eta(0-) = 0 limit along a negative ray. Circle: the Schur bound, eta(0) = 0,
    and Re psi >= -1/2.
    """
    check_domain(m, samples)
    violations: list[PickViolation] = []
    if m.space is Space.HALF_LINE:
        ups = [z for z in np.asarray(samples, dtype=complex).reshape(-1) if z.imag > 0]
        violations += pick_violations(lambda z: eta(m, z), ups)
        tail = eta(m, -(2.0 ** -30))
        if abs(tail) > 1e-6:
            violations.append(PickViolation(-(2.0 ** -30), "eta_zero_minus_limit", abs(tail)))
    else:
        violations += schur_violations(lambda z: eta(m, z), samples)
        origin = eta(m, 0.0)
        if abs(origin) > 1e-13:
            violations.append(PickViolation(0.0, "eta_origin_nonzero", abs(origin)))
        for z in np.asarray(samples, dtype=complex).reshape(-1):
            p = psi(m, z)
            if p.real < -0.5 - 1e-12:
                violations.append(PickViolation(complex(z), "herglotz_real_part", float(-0.5 - p.real)))
    return violations


@dataclass(frozen=True)
class BoundaryValue:
    limit: complex
    derivative: complex | None
    converged: bool
    residual_estimate: float


def radial_points(zeta: complex, space: Space, ks) -> np.ndarray:
    """Radial approach sequence toward a boundary point."""
    ks = np.asarray(ks)
    if space is Space.CIRCLE:
        return zeta * (1.0 - 2.0 ** (-ks.astype(float)))
    return zeta + 1j * 2.0 ** (-ks.astype(float))


class _RichardsonTable:
    """Incremental Richardson extrapolation for step halving (integer powers)."""

    def __init__(self):
        self._row: list = []
        self.diag_history: list = []

    def push(self, value):
        new_row = [value]
        for j, prev in enumerate(self._row, start=1):
            cur = new_row[j - 1]
            new_row.append(cur + (cur - prev) / (2.0 ** j - 1.0))
        self._row = new_row
        self.diag_history.append(new_row[-1])
        return new_row[-1]

    def diag_delta(self):
        if len(self.diag_history) < 2:
            return math.inf
        return np.abs(self.diag_history[-1] - self.diag_history[-2])


def boundary_value(
    f: Callable,
    zeta: complex,
    space: Space,
    *,
    tol: float = TOL_BOUNDARY,
    k_start: int = K_START,
    k_max: int = K_MAX,
) -> BoundaryValue:
    """Nontangential boundary limit of f at zeta via radial Richardson extrapolation.

    Raises NoConvergence when the values blow up or the extrapolants are still
    oscillating at k_max.
    """
    table = _RichardsonTable()
    best = None
    best_delta = math.inf
    for k in range(k_start, k_max + 1):
        z = complex(radial_points(zeta, space, k))
        v = complex(f(z))
        if not (math.isfinite(v.real) and math.isfinite(v.imag)) or abs(v) > 1e10:
            raise NoConvergence(f"boundary values of f near {zeta} diverge")
        est = table.push(v)
        delta = table.diag_delta()
        if delta < best_delta:
            best, best_delta = est, delta
        if delta < tol:
            return BoundaryValue(complex(est), None, True, float(delta))
    if best is None or not np.isfinite(best_delta):
        raise NoConvergence(f"no boundary limit estimate at {zeta}")
    return BoundaryValue(complex(best), None, False, float(best_delta))


def jc_derivative(
    f: Callable,
    zeta: complex,
    limit: complex,
    space: Space,
    *,
    tol: float = TOL_BOUNDARY,
    k_start: int = K_START,
    k_max: int = K_MAX,
) -> complex:
    """Julia-Caratheodory derivative of f at zeta given its boundary limit.

    Returns JC_INFINITE (inf real part) when the difference quotients diverge
    monotonically, which is exactly the no-atom signal of the boundary
    criterion.
    """
    table = _RichardsonTable()
    mags: list[float] = []
    best = None
    best_delta = math.inf
    for k in range(k_start, k_max + 1):
        z = complex(radial_points(zeta, space, k))
        q = (complex(f(z)) - limit) / (z - zeta)
        mags.append(abs(q))
        if len(mags) >= 6:
            window = mags[-6:]
            growing = all(b > a * 1.4 for a, b in zip(window, window[1:]))
            if growing and window[-1] > 50.0 * window[0]:
                return JC_INFINITE
        if not (math.isfinite(q.real) and math.isfinite(q.imag)):
            return JC_INFINITE
        est = table.push(q)
        delta = table.diag_delta()
        if delta < best_delta:
            best, best_delta = est, delta
        if delta < tol * max(1.0, abs(est)):
            return complex(est)
    if best is not None and best_delta < 1e-3 * max(1.0, abs(best)):
        return complex(best)
    raise NoConvergence(f"difference quotients at {zeta} neither settle nor diverge")
