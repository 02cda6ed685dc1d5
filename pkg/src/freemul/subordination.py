"""Pointwise solution of the subordination equation Phi_t(omega_t(z)) = z.

The solver iterates the algebraic rearrangement omega = z^{1/t} *
eta(omega)^{(t-1)/t}, a self-map of {|omega| <= |z|} in the disk case, with
damped Newton on the log residual as the fallback. Powers are evaluated
through running logarithms unwrapped against the previous iterate along a
continuation path from a base point near zero, where the branch is anchored:

* half-line: the power is positive on the negative axis; the Pick-class
  argument inequality makes principal logs valid on all of Omega;
* circle: the t-power at z = 0 equals the principal power of Sigma_mu(0),
  which pins the same rotation representative the series pipeline selects.

Batches are vectorized over target points; each point owns its path and
branch state, so grids parallelize trivially.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import transform
from .errors import (
    BranchLost,
    DomainError,
    DomainEscape,
    EtaVanishes,
    MaxIterExceeded,
)
from .measure import Measure, Space, moments

TWO_PI = 2.0 * math.pi

# per-point status codes used by batch solves
OK = 0
STATUS_MAX_ITER = 1
STATUS_BRANCH = 2
STATUS_ESCAPE = 3
STATUS_ETA_ZERO = 4
STATUS_DOMAIN = 5

_STATUS_ERRORS = {
    STATUS_MAX_ITER: MaxIterExceeded,
    STATUS_BRANCH: BranchLost,
    STATUS_ESCAPE: DomainEscape,
    STATUS_ETA_ZERO: EtaVanishes,
    STATUS_DOMAIN: DomainError,
}

_ETA_FLOOR = 1e-280
_FP_BUDGET = 60          # fixed-point iterations per path step before Newton
_JUMP_GUARD = 0.95 * math.pi


@dataclass
class SolverConfig:
    """Iteration controls; max_iter caps the per-step Newton budget."""

    tol: float = 1e-13
    max_iter: int = 500
    damping: float = 1.0
    path_steps: int = 32
    tol_residual: float = 1e-10
    base_radius: float = 1e-3


@dataclass(frozen=True)
class OmegaResult:
    z: complex
    omega: complex
    eta_t: complex
    residual: float
    iterations: int
    branch_winding: int


@dataclass
class BatchResult:
    z: np.ndarray
    omega: np.ndarray
    eta_t: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    winding: np.ndarray
    status: np.ndarray

    def record(self, i: int) -> OmegaResult:
        return OmegaResult(
            complex(self.z[i]),
            complex(self.omega[i]),
            complex(self.eta_t[i]),
            float(self.residual[i]),
            int(self.iterations[i]),
            int(self.winding[i]),
        )

    def raise_any(self) -> None:
        bad = np.nonzero(self.status != OK)[0]
        if bad.size:
            i = int(bad[0])
            exc = _STATUS_ERRORS[int(self.status[i])]
            raise exc(f"solve failed at z = {self.z[i]} ({bad.size} of {self.z.size} points)")


def _unwrap(values: np.ndarray, ref_im) -> tuple[np.ndarray, np.ndarray]:
    """Log with imaginary part unwrapped to within pi of ref_im."""
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log(values)
    k = np.round((lg.imag - ref_im) / TWO_PI)
    lg = lg - 1j * (TWO_PI * k)
    return lg, np.abs(lg.imag - ref_im)


class _Batch:
    """Mutable per-point continuation state."""

    __slots__ = ("z", "log_z", "omega", "log_eta", "eta", "iterations", "status", "neg")

    def __init__(self, n: int):
        self.z = np.zeros(n, dtype=complex)
        self.log_z = np.zeros(n, dtype=complex)
        self.omega = np.zeros(n, dtype=complex)
        self.log_eta = np.zeros(n, dtype=complex)
        self.eta = np.zeros(n, dtype=complex)
        self.iterations = np.zeros(n, dtype=np.int64)
        self.status = np.zeros(n, dtype=np.int8)
        self.neg = np.zeros(n, dtype=bool)


class SemigroupMap:
    """eta_{mu_t} and omega_t evaluator for one (measure, t) pair."""

    def __init__(self, m: Measure, t: float, config: SolverConfig | None = None):
        if t < 1:
            raise ValueError("t must be >= 1")
        self.measure = m
        self.t = float(t)
        self.config = config or SolverConfig()
        m1 = complex(moments(m, 1)[0])
        self.sigma0 = cmath.log(1.0 / m1)
        self.min_abs_eta = math.inf

    # -- batch internals -----------------------------------------------------

    def _eta_at(self, omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        _, ev, ok = transform.psi_eta_raw(self.measure, omega)
        ev = np.atleast_1d(ev)
        ok = np.atleast_1d(ok).copy()
        mag = np.abs(ev)
        finite = ok & np.isfinite(mag)
        if np.any(finite):
            self.min_abs_eta = min(self.min_abs_eta, float(np.min(mag[finite])))
        ok &= mag > _ETA_FLOOR
        return ev, ok

    def _target_logs(self, zw: np.ndarray) -> np.ndarray:
        arg = np.angle(zw)
        if self.measure.space is Space.HALF_LINE:
            arg = np.where((zw.imag == 0) & (zw.real < 0), math.pi, arg)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(zw)) + 1j * arg

    def _start(self, zw: np.ndarray) -> tuple[_Batch, np.ndarray]:
        """Fresh batch converged at the per-point base points."""
        n = zw.size
        b = _Batch(n)
        log_target = self._target_logs(zw)
        if self.measure.space is Space.HALF_LINE:
            b.log_z = np.full(n, math.log(self.config.base_radius) + 1j * math.pi)
            b.neg = log_target.imag == math.pi
        else:
            b.log_z = math.log(self.config.base_radius) + 1j * log_target.imag
            b.neg = np.zeros(n, dtype=bool)
        self._refresh_z(b)
        scale = cmath.exp(-(self.t - 1.0) * self.sigma0)
        b.omega = scale * b.z
        b.log_eta = -self.t * self.sigma0 + b.log_z
        b.eta = np.exp(b.log_eta)
        self._relax(b)
        return b, log_target

    def _refresh_z(self, b: _Batch) -> None:
        b.z = np.exp(b.log_z)
        if np.any(b.neg):
            b.z[b.neg] = -np.exp(b.log_z[b.neg].real)

    def _relax(self, b: _Batch, final: bool = False) -> None:
        """Fixed-point iterations at the current targets, then Newton if needed."""
        t = self.t
        cfg = self.config
        # interior path steps only feed warm starts; final step gets full tolerance
        tol_step = cfg.tol if final else max(cfg.tol, 1e-9)
        converged = b.status != OK
        first_eval = True
        for _ in range(_FP_BUDGET):
            idx = np.nonzero(~converged & (b.status == OK))[0]
            if idx.size == 0:
                break
            ev, ok = self._eta_at(b.omega[idx])
            if np.any(~ok):
                b.status[idx[~ok]] = STATUS_ETA_ZERO
                idx, ev = idx[ok], ev[ok]
                if idx.size == 0:
                    break
            log_eta_new, jump = _unwrap(ev, b.log_eta[idx].imag)
            neg = b.neg[idx]
            if np.any(neg):
                vals = ev[neg].real
                esc = vals >= 0
                if np.any(esc):
                    b.status[idx[neg][esc]] = STATUS_ESCAPE
                with np.errstate(divide="ignore"):
                    log_eta_new[neg] = np.log(np.abs(vals)) + 1j * math.pi
                jump[neg] = 0.0
            if first_eval:
                risky = jump > _JUMP_GUARD
                if np.any(risky):
                    b.status[idx[risky]] = STATUS_BRANCH
                first_eval = False
            live = b.status[idx] == OK
            idx, ev, log_eta_new = idx[live], ev[live], log_eta_new[live]
            if idx.size == 0:
                continue
            log_omega = b.log_z[idx] / t + (1.0 - 1.0 / t) * log_eta_new
            omega_new = np.exp(log_omega)
            negk = b.neg[idx]
            omega_new[negk] = -np.exp(log_omega[negk].real)
            step = np.abs(omega_new - b.omega[idx])
            b.omega[idx] = omega_new
            b.log_eta[idx] = log_eta_new
            b.eta[idx] = ev
            b.iterations[idx] += 1
            converged[idx[step <= tol_step * np.maximum(1.0, np.abs(omega_new))]] = True
        if final:
            self._newton_polish(b)

    def _newton_polish(self, b: _Batch) -> None:
        """Drive the log residual below tolerance where fixed point stalled."""
        t = self.t
        cfg = self.config
        rows = np.nonzero(b.status == OK)[0]
        if rows.size == 0:
            return
        ev, ok = self._eta_at(b.omega[rows])
        if np.any(~ok):
            b.status[rows[~ok]] = STATUS_ETA_ZERO
            rows, ev = rows[ok], ev[ok]
            if rows.size == 0:
                return
        log_eta, _ = _unwrap(ev, b.log_eta[rows].imag)
        neg = b.neg[rows]
        log_eta[neg] = np.log(np.abs(ev[neg].real)) + 1j * math.pi
        b.log_eta[rows] = log_eta
        b.eta[rows] = ev
        h = self._log_residual(b, rows)
        tol_h = self._tol_h(b, rows)
        active = np.abs(h) > tol_h
        rows, h, tol_h = rows[active], h[active], tol_h[active]
        damp = np.full(rows.size, cfg.damping)
        step_budget = cfg.max_iter
        for _ in range(step_budget):
            if rows.size == 0:
                return
            eta_p = transform.eta_prime_raw(self.measure, b.omega[rows])
            eta_p = np.atleast_1d(eta_p)
            with np.errstate(divide="ignore", invalid="ignore"):
                hp = t / b.omega[rows] - (t - 1.0) * eta_p / b.eta[rows]
                delta = h / hp
            sane = np.isfinite(delta)
            b.status[rows[~sane]] = STATUS_MAX_ITER
            rows, h, tol_h, damp, delta = rows[sane], h[sane], tol_h[sane], damp[sane], delta[sane]
            if rows.size == 0:
                return
            cand = b.omega[rows] - damp * delta
            neg = b.neg[rows]
            cand[neg] = cand[neg].real
            ev_c, ok_c = self._eta_at(cand)
            log_eta_c, jump = _unwrap(np.where(ok_c, ev_c, 1.0), b.log_eta[rows].imag)
            if np.any(neg):
                negvals = ev_c[neg].real
                ok_c[neg] &= (negvals < 0) & (cand[neg].real < 0)
                with np.errstate(divide="ignore"):
                    log_eta_c[neg] = np.log(np.abs(negvals)) + 1j * math.pi
                jump[neg] = 0.0
            ref_lw = (b.log_z[rows] / t + (1.0 - 1.0 / t) * b.log_eta[rows]).imag
            lw_c, _ = _unwrap(np.where(ok_c & (np.abs(cand) > 0), cand, 1.0), ref_lw)
            lw_c[neg] = np.log(np.abs(cand[neg].real)) + 1j * math.pi
            h_c = t * lw_c - (t - 1.0) * log_eta_c - b.log_z[rows]
            improve = ok_c & np.isfinite(h_c) & (np.abs(h_c) <= np.abs(h)) & (jump < _JUMP_GUARD)
            upd = rows[improve]
            b.omega[upd] = cand[improve]
            b.eta[upd] = ev_c[improve]
            b.log_eta[upd] = log_eta_c[improve]
            h = np.where(improve, h_c, h)
            damp = np.where(improve, np.minimum(damp * 1.6, cfg.damping), damp * 0.5)
            b.iterations[rows] += 1
            done = np.abs(h) <= tol_h
            dead = (damp < 1e-8) | (b.iterations[rows] >= 4 * cfg.max_iter)
            b.status[rows[dead & ~done]] = STATUS_MAX_ITER
            keep = ~done & ~dead
            rows, h, tol_h, damp = rows[keep], h[keep], tol_h[keep], damp[keep]
        if rows.size:
            b.status[rows] = STATUS_MAX_ITER

    def _tol_h(self, b: _Batch, idx: np.ndarray) -> np.ndarray:
        az = np.abs(b.z[idx])
        return self.config.tol_residual * np.maximum(1.0, az) / np.maximum(az, 1e-300)

    def _log_residual(self, b: _Batch, idx: np.ndarray) -> np.ndarray:
        t = self.t
        log_omega_ref = b.log_z[idx] / t + (1.0 - 1.0 / t) * b.log_eta[idx]
        lw, _ = _unwrap(b.omega[idx], log_omega_ref.imag)
        neg = b.neg[idx]
        if np.any(neg):
            lw[neg] = np.log(np.abs(b.omega[idx][neg].real)) + 1j * math.pi
        return t * lw - (t - 1.0) * b.log_eta[idx] - b.log_z[idx]

    def residuals(self, b: _Batch, idx=None) -> np.ndarray:
        """|Phi_t(omega) - z| evaluated through the batch branch state."""
        if idx is None:
            idx = np.arange(b.z.size)
        h = self._log_residual(b, idx)
        return np.abs(b.z[idx]) * np.abs(np.exp(h) - 1.0)

    def _drive(self, b: _Batch, log_target: np.ndarray, steps: int) -> None:
        log_start = b.log_z.copy()
        delta = log_target - log_start
        for j in range(1, steps + 1):
            b.log_z = log_start + (j / steps) * delta
            self._refresh_z(b)
            self._relax(b, final=(j == steps))
            if not np.any(b.status == OK):
                break

    def _escape_check(self, b: _Batch) -> None:
        okm = b.status == OK
        if not np.any(okm):
            return
        if self.measure.space is Space.CIRCLE:
            esc = okm & (np.abs(b.omega) > np.abs(b.z) * (1 + 1e-9) + 1e-14)
        else:
            upper = okm & ~b.neg
            esc = upper & (b.omega.imag < -1e-10 * np.maximum(1.0, np.abs(b.omega)))
            esc |= upper & (np.angle(b.omega) < np.angle(b.z) - 1e-9)
            esc |= okm & b.neg & (b.omega.real >= 0)
        b.status[esc] = STATUS_ESCAPE

    def _finalize(self, b: _Batch, z_orig: np.ndarray, conj_mask: np.ndarray) -> BatchResult:
        resid = np.full(b.z.size, math.inf)
        okm = b.status == OK
        if np.any(okm):
            rows = np.nonzero(okm)[0]
            resid[rows] = self.residuals(b, rows)
            over = resid[rows] > self.config.tol_residual * np.maximum(1.0, np.abs(b.z[rows]))
            b.status[rows[over]] = STATUS_MAX_ITER
        self._escape_check(b)
        omega = b.omega.copy()
        eta_t = b.eta.copy()
        winding = np.round((b.log_z.imag - np.angle(b.z)) / TWO_PI).astype(np.int64)
        if np.any(conj_mask):
            omega[conj_mask] = np.conj(omega[conj_mask])
            eta_t[conj_mask] = np.conj(eta_t[conj_mask])
            winding[conj_mask] = -winding[conj_mask]
        return BatchResult(z_orig.copy(), omega, eta_t, resid,
                           b.iterations.copy(), winding, b.status.copy())

    def _invalid_targets(self, zw: np.ndarray) -> np.ndarray:
        if self.measure.space is Space.CIRCLE:
            return ~np.isfinite(zw) | (np.abs(zw) >= 1.0)
        return ~np.isfinite(zw) | ((zw.imag == 0) & (zw.real >= 0))

    # -- public API ------------------------------------------------------------

    def solve_batch(self, z, *, path_steps: int | None = None) -> BatchResult:
        """Continuation solve at each target; per-point status, never raises."""
        z_orig = np.asarray(z, dtype=complex).reshape(-1)
        conj_mask = np.zeros(z_orig.shape, dtype=bool)
        zw = z_orig.copy()
        if self.measure.space is Space.HALF_LINE:
            conj_mask = z_orig.imag < 0
            zw[conj_mask] = np.conj(zw[conj_mask])
        invalid = self._invalid_targets(zw)
        steps = path_steps or self.config.path_steps
        b, log_target = self._start(np.where(invalid, -1.0 + 0j if self.measure.space is Space.HALF_LINE else 0.5 + 0j, zw))
        b.status[invalid] = STATUS_DOMAIN
        self._drive(b, log_target, steps)
        result = self._finalize(b, z_orig, conj_mask)
        for mult in (4, 16):
            retry = np.nonzero(np.isin(result.status, (STATUS_BRANCH, STATUS_MAX_ITER, STATUS_ESCAPE)))[0]
            if retry.size == 0:
                break
            b2, lt2 = self._start(zw[retry])
            self._drive(b2, lt2, steps * mult)
            sub = self._finalize(b2, z_orig[retry], conj_mask[retry])
            good = sub.status == OK
            rows = retry[good]
            for name in ("omega", "eta_t", "residual", "iterations", "winding", "status"):
                getattr(result, name)[rows] = getattr(sub, name)[good]
        return result

    def solve(self, z: complex, *, path_steps: int | None = None) -> OmegaResult:
        res = self.solve_batch(np.array([z]), path_steps=path_steps)
        res.raise_any()
        return res.record(0)

    def eta_t(self, z):
        """eta_{mu_t} on interior points; raises on any per-point failure."""
        res = self.solve_batch(z)
        res.raise_any()
        if np.ndim(z) == 0:
            return complex(res.eta_t[0])
        return res.eta_t.reshape(np.shape(z))


class Sweep:
    """Warm-started continuation across a caller-driven sequence of targets.

    Branch state persists between calls; moves larger than a half-turn in
    argument are subdivided automatically.
    """

    def __init__(self, smap: SemigroupMap, z0, *, path_steps: int | None = None):
        self.smap = smap
        z0 = np.asarray(z0, dtype=complex).reshape(-1)
        if smap.measure.space is Space.HALF_LINE and np.any(z0.imag < 0):
            raise DomainError("sweeps operate in the closed upper half-plane")
        bad = smap._invalid_targets(z0)
        if np.any(bad):
            raise DomainError("sweep start contains non-interior points")
        self._batch, log_target = smap._start(z0)
        smap._drive(self._batch, log_target, path_steps or smap.config.path_steps)

    @property
    def z(self) -> np.ndarray:
        return self._batch.z.copy()

    @property
    def omega(self) -> np.ndarray:
        return self._batch.omega.copy()

    @property
    def eta(self) -> np.ndarray:
        return self._batch.eta.copy()

    @property
    def status(self) -> np.ndarray:
        return self._batch.status.copy()

    @property
    def winding(self) -> np.ndarray:
        return np.round((self._batch.log_z.imag - np.angle(self._batch.z)) / TWO_PI).astype(np.int64)

    def advance(self, z_new) -> None:
        b = self._batch
        smap = self.smap
        zn = np.asarray(z_new, dtype=complex).reshape(-1)
        if zn.size != b.z.size:
            raise ValueError("sweep size is fixed at construction")
        neg_new = np.zeros(zn.shape, dtype=bool)
        if smap.measure.space is Space.HALF_LINE:
            neg_new = (zn.imag == 0) & (zn.real < 0)
        with np.errstate(divide="ignore"):
            raw = np.log(np.abs(zn)) + 1j * np.angle(zn)
        k = np.round((raw.imag - b.log_z.imag) / TWO_PI)
        log_new = raw - 1j * TWO_PI * k
        log_new = np.where(neg_new, raw.real + 1j * math.pi, log_new)
        delta = log_new - b.log_z
        nsub = int(min(64, max(1,
                               math.ceil(float(np.max(np.abs(delta.imag))) / 0.5),
                               math.ceil(float(np.max(np.abs(delta))) / 0.75))))
        start = b.log_z.copy()
        b.neg = neg_new
        for j in range(1, nsub + 1):
            b.log_z = start + (j / nsub) * delta
            smap._refresh_z(b)
            smap._relax(b, final=(j == nsub))

    def residuals(self) -> np.ndarray:
        return self.smap.residuals(self._batch)


# -- spec-surface operations -----------------------------------------------------


def solve_omega(m: Measure, t: float, z: complex, cfg: SolverConfig | None = None) -> OmegaResult:
    """Solve Phi_t(omega) = z at one point; raises on failure."""
    return SemigroupMap(m, t, cfg).solve(z)


def eta_t_grid(m: Measure, t: float, points, cfg: SolverConfig | None = None) -> list[tuple[complex, OmegaResult | None, str | None]]:
    """Batch evaluation of eta_{mu_t}; per-point error records, never aborts."""
    smap = SemigroupMap(m, t, cfg)
    res = smap.solve_batch(np.asarray(points, dtype=complex).reshape(-1))
    out: list[tuple[complex, OmegaResult | None, str | None]] = []
    for i in range(res.z.size):
        if res.status[i] == OK:
            out.append((complex(res.z[i]), res.record(i), None))
        else:
            out.append((complex(res.z[i]), None, _STATUS_ERRORS[int(res.status[i])].__name__))
    return out


def continuation_path(m: Measure, t: float, z: complex, cfg: SolverConfig | None = None) -> list[OmegaResult]:
    """Solve along the base-to-target path, returning every path-step result."""
    smap = SemigroupMap(m, t, cfg)
    c = smap.config
    zt = complex(z)
    conj = m.space is Space.HALF_LINE and zt.imag < 0
    zw = zt.conjugate() if conj else zt
    if bool(smap._invalid_targets(np.array([zw]))[0]):
        raise DomainError(f"target {z} is not interior")
    log_target = complex(smap._target_logs(np.array([zw]))[0])
    if m.space is Space.HALF_LINE:
        log_base = math.log(c.base_radius) + 1j * math.pi
    else:
        log_base = math.log(c.base_radius) + 1j * log_target.imag
    steps = c.path_steps
    on_axis = m.space is Space.HALF_LINE and log_target.imag == math.pi
    waypoints = []
    for j in range(1, steps + 1):
        lw = log_base + (j / steps) * (log_target - log_base)
        waypoints.append(-math.exp(lw.real) if on_axis else cmath.exp(lw))
    sweep = Sweep(smap, np.array([waypoints[0]]))
    out = []

    def snapshot() -> OmegaResult:
        b = sweep._batch
        ok = b.status[0] == OK
        resid = float(smap.residuals(b, np.array([0]))[0]) if ok else math.inf
        r = OmegaResult(complex(b.z[0]), complex(b.omega[0]), complex(b.eta[0]),
                        resid, int(b.iterations[0]), int(sweep.winding[0]))
        if conj:
            r = OmegaResult(r.z.conjugate(), r.omega.conjugate(), r.eta_t.conjugate(),
                            r.residual, r.iterations, -r.branch_winding)
        return r

    out.append(snapshot())
    for w in waypoints[1:]:
        sweep.advance(np.array([w]))
        out.append(snapshot())
    status = int(sweep.status[0])
    if status != OK:
        raise _STATUS_ERRORS[status](f"continuation to {z} failed")
    return out


def phi_t(m: Measure, t: float, w, *, ratio_log_im=None, steps: int = 48):
    """Phi_t(w) = w [w / eta_mu(w)]^{t-1} with the solver's branch conventions.

    Half-line: principal power (positive for w < 0). Circle: the ratio log is
    continued radially outward from Sigma_mu(0) at the origin, unless a
    reference imaginary part is supplied. Vectorized over w.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    ws = np.asarray(w, dtype=complex)
    wv = np.atleast_1d(ws).astype(complex)
    if m.space is Space.HALF_LINE:
        ev = transform.eta(m, wv)
        out = wv * np.exp((t - 1.0) * np.log(wv / np.atleast_1d(ev)))
        neg = (wv.imag == 0) & (wv.real < 0)
        out[neg] = -np.abs(out[neg])
    else:
        sigma0 = cmath.log(1.0 / complex(moments(m, 1)[0]))
        if ratio_log_im is not None:
            ev = np.atleast_1d(transform.eta(m, wv))
            lg, _ = _unwrap(wv / ev, np.broadcast_to(np.asarray(ratio_log_im, dtype=float), wv.shape))
        else:
            radii = np.geomspace(1e-3, 1.0, steps)
            ref = np.full(wv.shape, sigma0.imag)
            lg = None
            for r in radii:
                pts = wv * r
                ev = np.atleast_1d(transform.eta(m, pts))
                lg, _ = _unwrap(pts / ev, ref)
                ref = lg.imag
        out = wv * np.exp((t - 1.0) * lg)
    return out.reshape(ws.shape) if ws.ndim else complex(out[0])


def omega_via_formula(eta_t_value, z, t: float, *, ratio_log_im=None):
    """omega = eta_{mu_t}(z) [z / eta_{mu_t}(z)]^{1/t}, independent of the fixed point.

    The 1/t power: principal log of the ratio on the half-line (valid on all
    of Omega); on the circle pass the continued imaginary part of
    log(z/eta_t), e.g. from ratio_log_path.
    """
    ev = np.asarray(eta_t_value, dtype=complex)
    zs = np.asarray(z, dtype=complex)
    scalar = ev.ndim == 0 and zs.ndim == 0
    evv, zv = np.atleast_1d(ev).astype(complex), np.atleast_1d(zs).astype(complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = zv / evv
        if ratio_log_im is None:
            lg = np.log(ratio)
        else:
            lg, _ = _unwrap(ratio, np.broadcast_to(np.asarray(ratio_log_im, dtype=float), ratio.shape))
        out = evv * np.exp(lg / t)
    neg = (zv.imag == 0) & (zv.real < 0) & (np.abs(evv.imag) == 0)
    out[neg] = -np.abs(out[neg])
    if scalar:
        return complex(out[0])
    return out.reshape(ev.shape if ev.ndim else zs.shape)


def ratio_log_path(m: Measure, t: float, z, cfg: SolverConfig | None = None, *, steps: int = 48):
    """Continued Im log(z/eta_{mu_t}(z)) along the radius, anchored at t*sigma0.

    Branch reference for omega_via_formula on the circle; consumes solver
    values of eta_{mu_t} only.
    """
    smap = SemigroupMap(m, t, cfg)
    zv = np.atleast_1d(np.asarray(z, dtype=complex))
    radii = np.geomspace(smap.config.base_radius, 1.0, steps)
    sweep = Sweep(smap, zv * radii[0])
    ref = np.full(zv.shape, (t * smap.sigma0).imag)
    lg, _ = _unwrap(sweep.z / sweep.eta, ref)
    for r in radii[1:]:
        sweep.advance(zv * r)
        lg, _ = _unwrap(sweep.z / sweep.eta, lg.imag)
    return lg.imag if np.ndim(z) else float(lg.imag[0])
