"""Critical points of the log-likelihood and Grothendieck-residue sums.

``L = sum_i u_i log x_i - sum_j v_j log q_j(x)`` on the torus. In logarithmic
coordinates ``t = log x`` the gradient of L is ``theta L`` and its Jacobian
is the toric Hessian ``theta_i theta_k L``, so Newton's method in ``t``
evaluates the Hessian needed for the residue weights for free.

Root sets are found numerically (polynomial roots for n = 1, multistart
damped Newton otherwise). Completeness is certified by the caller handing
in the exact amplitude as ``target``: the stationary-phase sum over a
complete root set must reproduce it.
"""
from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DegenerateCritical, IncompleteRootSet, InputError, NonRealResult, PoleAtCritical
from .laurent import LaurentPoly, NumericPoly

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
HESSIAN_TOL = 1e-12
DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class LogLikelihood:
    qs: tuple[LaurentPoly, ...]
    u: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "qs", tuple(self.qs))
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        if len(self.u) != self.n or len(self.v) != len(self.qs):
            raise InputError("u must have one entry per variable and v one per polynomial")
        object.__setattr__(self, "_numeric", tuple(NumericPoly.from_poly(q) for q in self.qs))

    @property
    def n(self) -> int:
        return self.qs[0].dim

    @property
    def scale(self) -> float:
        return 1.0 + sum(abs(float(x)) for x in self.u) + sum(abs(float(x)) for x in self.v)

    def grad_hess(self, t: np.ndarray):
        """``theta L`` and the toric Hessian at ``x = exp(t)``, batched over rows of t."""
        t = np.atleast_2d(np.asarray(t, dtype=complex))
        g = np.tile(np.array([complex(float(x)) for x in self.u]), (t.shape[0], 1))
        h = np.zeros((t.shape[0], self.n, self.n), dtype=complex)
        qmin = np.full(t.shape[0], np.inf)
        # diverging starts overflow harmlessly; they are filtered by residual
        with np.errstate(all="ignore"):
            for poly, vj in zip(self._numeric, self.v):
                q, dq, ddq = poly.derivatives_log(t)
                qmin = np.minimum(qmin, np.abs(q))
                r = dq / q[:, None]
                g -= float(vj) * r
                h -= float(vj) * (ddq / q[:, None, None] - r[:, :, None] * r[:, None, :])
        return g, h, qmin


@dataclass(frozen=True)
class CriticalPoint:
    coords: tuple[complex, ...]
    hessian_det: complex
    newton_residual: float

    @property
    def log_coords(self) -> np.ndarray:
        return np.array([cmath.log(x) for x in self.coords])

    def to_json(self) -> dict:
        return {
            "x": [[z.real, z.imag] for z in self.coords],
            "hessian": [self.hessian_det.real, self.hessian_det.imag],
            "residual": self.newton_residual,
        }


def build_system(L: LogLikelihood) -> list[LaurentPoly]:
    """Cleared-denominator critical equations ``u_i prod q - sum_j v_j theta_i q_j prod_{k!=j} q_k``."""
    prod = LaurentPoly.constant(L.n, 1)
    for q in L.qs:
        prod = prod * q
    system = []
    for i in range(L.n):
        eq = prod * L.u[i]
        for j, (qj, vj) in enumerate(zip(L.qs, L.v)):
            others = LaurentPoly.constant(L.n, 1)
            for k, qk in enumerate(L.qs):
                if k != j:
                    others = others * qk
            eq = eq - qj.theta(i) * others * vj
        system.append(eq)
    return system


def _wrap(t: np.ndarray) -> np.ndarray:
    return t.real + 1j * (np.angle(np.exp(1j * t.imag)))


def _newton(L: LogLikelihood, t: np.ndarray, iterations: int = 80, polish: int = 2):
    """Damped Newton on a batch of log-coordinate starts; returns (t, residual)."""
    g, h, _ = L.grad_hess(t)
    res = np.max(np.abs(g), axis=1)
    tol = RESIDUAL_TOL * L.scale * 1e-2
    for _ in range(iterations):
        active = np.isfinite(res) & (res > tol)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        hh = h[idx]
        with np.errstate(all="ignore"):
            bad = ~np.isfinite(hh).all(axis=(1, 2))
            hh[bad] = np.eye(L.n)
            bad = np.abs(np.linalg.det(hh)) < 1e-300
        hh[bad] = np.eye(L.n)
        try:
            step = np.linalg.solve(hh, g[idx][:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.einsum("sij,sj->si", np.linalg.pinv(hh), g[idx])
        lam = np.ones(len(idx))
        accepted = np.zeros(len(idx), dtype=bool)
        new_t = t[idx].copy()
        for _ in range(12):
            trial = t[idx] - lam[:, None] * step
            gt, _, _ = L.grad_hess(trial)
            rt = np.max(np.abs(gt), axis=1)
            ok = ~accepted & np.isfinite(rt) & (rt < res[idx])
            new_t[ok] = trial[ok]
            accepted |= ok
            if accepted.all():
                break
            lam = np.where(accepted, lam, lam / 2)
        stuck = ~accepted
        new_t[stuck] = (t[idx] - lam[:, None] * step)[stuck]
        t[idx] = new_t
        g_i, h_i, _ = L.grad_hess(t[idx])
        g[idx], h[idx] = g_i, h_i
        res[idx] = np.max(np.abs(g_i), axis=1)
        res[~np.isfinite(res)] = np.inf
    for _ in range(polish):
        ok = np.isfinite(res) & (res <= RESIDUAL_TOL * L.scale) & np.isfinite(h).all(axis=(1, 2))
        if ok.any():
            idx = np.flatnonzero(ok)
            try:
                step = np.linalg.solve(h[idx], g[idx][:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                break
            t[idx] = t[idx] - step
            g[idx], h[idx], _ = L.grad_hess(t[idx])
            res[idx] = np.max(np.abs(g[idx]), axis=1)
    return _wrap(t), res


def _merge(found: list[np.ndarray], candidates: np.ndarray) -> int:
    added = 0
    for t in candidates:
        duplicate = False
        for s in found:
            d = t - s
            d = d.real + 1j * np.angle(np.exp(1j * d.imag))
            if np.max(np.abs(d)) <= DEDUP_TOL * max(1.0, float(np.max(np.abs(s)))):
                duplicate = True
                break
        if not duplicate:
            found.append(t)
            added += 1
    return added


def _finish(L: LogLikelihood, ts: Sequence[np.ndarray]) -> list[CriticalPoint]:
    points = []
    for t in sorted(ts, key=lambda z: tuple(np.round(np.concatenate([z.real, z.imag]), 9))):
        g, h, qmin = L.grad_hess(t[None, :])
        det = complex(np.linalg.det(h[0]))
        if abs(det) < HESSIAN_TOL:
            raise DegenerateCritical(f"toric Hessian {det:.3e} at a critical point: parameters not generic")
        points.append(CriticalPoint(tuple(complex(x) for x in np.exp(t)), det, float(np.max(np.abs(g[0])))))
    return points


def _accept(L: LogLikelihood, t: np.ndarray, res: np.ndarray) -> np.ndarray:
    ok = np.isfinite(res) & (res <= RESIDUAL_TOL * L.scale) & np.isfinite(t).all(axis=1)
    if not ok.any():
        return t[:0]
    _, _, qmin = L.grad_hess(t[ok])
    keep = qmin > 1e-10
    return t[ok][keep]


def _univariate_roots(L: LogLikelihood) -> list[np.ndarray]:
    (eq,) = build_system(L)
    low = min(e[0] for e in eq.terms)
    high = max(e[0] for e in eq.terms)
    coefs = [complex(eq.terms.get((k,), 0)) for k in range(high, low - 1, -1)]
    roots = np.roots(coefs) if len(coefs) > 1 else np.array([])
    roots = roots[np.abs(roots) > 1e-300]
    if not len(roots):
        return []
    # a double root splits into a pair about sqrt(machine epsilon) apart
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < 1e-6 * max(1.0, abs(roots[i])):
                raise DegenerateCritical(f"repeated critical point near x = {roots[i]:.6g}: parameters not generic")
    t0 = np.log(roots.astype(complex))[:, None]
    t, res = _newton(L, t0, iterations=10)
    found: list[np.ndarray] = []
    _merge(found, _accept(L, t, res))
    return found


def _track(L: LogLikelihood, t: np.ndarray, u_from: np.ndarray, u_to: np.ndarray, max_steps: int = 2000):
    """Follow roots of ``grad L = 0`` as u moves linearly from u_from to u_to.

    The gradient depends on u only through the additive term u, so the
    predictor is ``dt = -H^{-1} du``. Returns the end points and a mask of
    paths that reached the end.
    """
    u0 = np.array([complex(float(x)) for x in L.u])
    t = t.copy()
    s = np.zeros(len(t))
    ds = np.full(len(t), 0.05)
    alive = np.ones(len(t), dtype=bool)
    tol = 1e-9 * L.scale
    for _ in range(max_steps):
        live = alive & (s < 1.0)
        if not live.any():
            break
        idx = np.flatnonzero(live)
        s_new = np.minimum(s[idx] + ds[idx], 1.0)
        u_old = u_from + s[idx, None] * (u_to - u_from)
        u_new = u_from + s_new[:, None] * (u_to - u_from)
        with np.errstate(all="ignore"):
            _, h, _ = L.grad_hess(t[idx])
            try:
                trial = t[idx] - np.linalg.solve(h, (u_new - u_old)[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                trial = t[idx] - np.einsum("sij,sj->si", np.linalg.pinv(h), u_new - u_old)
            moved = np.zeros(len(idx))
            for _ in range(3):
                g, h, _ = L.grad_hess(trial)
                g = g - u0 + u_new
                try:
                    step = np.linalg.solve(h, g[:, :, None])[:, :, 0]
                except np.linalg.LinAlgError:
                    step = np.einsum("sij,sj->si", np.linalg.pinv(h), g)
                moved = np.max(np.abs(step), axis=1)
                trial = trial - step
            g, _, _ = L.grad_hess(trial)
            res = np.max(np.abs(g - u0 + u_new), axis=1)
        ok = np.isfinite(res) & (res < tol) & (moved < 1e-6)
        t[idx[ok]] = trial[ok]
        s[idx[ok]] = s_new[ok]
        ds[idx] = np.where(ok, np.minimum(ds[idx] * 1.5, 0.1), ds[idx] / 2)
        alive[idx[~ok & (ds[idx] < 1e-7)]] = False
    return t, alive & (s >= 1.0)


def _monodromy_loop(L: LogLikelihood, found: list[np.ndarray], rng: np.random.Generator) -> int:
    """Carry the known roots around a random triangle in complex u-space and merge what comes back."""
    if not found:
        return 0
    u0 = np.array([complex(float(x)) for x in L.u])
    radius = float(np.max(np.abs(u0))) or 1.0
    corners = [u0 + radius * (rng.normal(size=L.n) + 1j * rng.normal(size=L.n)) for _ in range(2)]
    t = np.array(found)
    path = [u0, *corners, u0]
    for a, b in zip(path, path[1:]):
        t, reached = _track(L, t, a, b)
        t = t[reached]
        if not len(t):
            return 0
    t, res = _newton(L, t, iterations=5)
    return _merge(found, _accept(L, t, res))


def stationary_sum(L: LogLikelihood, pts: Sequence[CriticalPoint], check_real: bool = True) -> complex:
    """``sum_p (-1)^n / det H^toric(p)``."""
    sign = (-1) ** L.n
    total = complex(np.sum([sign / p.hessian_det for p in pts])) if pts else 0j
    if check_real and abs(total.imag) > 1e-8 * abs(total):
        raise NonRealResult(f"stationary sum has imaginary part {total.imag:.3e}")
    return total


def solve_critical(
    L: LogLikelihood,
    seed=0,
    target=None,
    batch: int = 64,
    max_batches: int = 64,
    rel_tol: float = 1e-9,
) -> list[CriticalPoint]:
    """Deduplicated critical points of L on the torus, off ``{prod q_j = 0}``.

    With ``target`` (the exact amplitude) the search continues until the
    stationary sum matches it, raising IncompleteRootSet when the start
    budget runs out. Without it, the search stops once several consecutive
    batches find nothing new.
    """
    if L.n == 1:
        found = _univariate_roots(L)
        points = _finish(L, found)
        if target is not None and not _matches(L, points, target, rel_tol):
            raise IncompleteRootSet("univariate root set does not reproduce the exact amplitude")
        return points

    found: list[np.ndarray] = []
    quiet = 0
    for b in range(max_batches):
        rng = np.random.default_rng([int(seed), b])
        spread = 1.0 + (b % 4)
        t0 = rng.normal(0.0, spread, (batch, L.n)) + 1j * rng.uniform(-np.pi, np.pi, (batch, L.n))
        t, res = _newton(L, t0)
        added = _merge(found, _accept(L, t, res))
        added += _monodromy_loop(L, found, rng)
        quiet = 0 if added else quiet + 1
        if target is not None:
            if quiet >= 1 and _matches(L, _finish(L, found), target, rel_tol):
                return _finish(L, found)
        elif quiet >= 4:
            return _finish(L, found)
    if target is not None:
        raise IncompleteRootSet(
            f"{len(found)} critical points after {max_batches * batch} starts do not reproduce the exact amplitude"
        )
    return _finish(L, found)


def _matches(L, points, target, rel_tol) -> bool:
    if not points:
        return False
    value = stationary_sum(L, points, check_real=False)
    target = float(target)
    return abs(value - target) <= rel_tol * abs(target)


def toric_hessian(L: LogLikelihood, p) -> complex:
    """``det(theta_i theta_j L)`` at a point given as a CriticalPoint or coordinates."""
    coords = p.coords if isinstance(p, CriticalPoint) else tuple(p)
    t = np.array([cmath.log(complex(x)) for x in coords])
    _, h, _ = L.grad_hess(t[None, :])
    return complex(np.linalg.det(h[0]))


RationalFunction = Union[int, float, complex, Fraction, LaurentPoly, tuple, Callable]


def _evaluate(form: RationalFunction, x: Sequence[complex]) -> complex:
    if isinstance(form, (int, float, complex, Fraction)):
        return complex(form)
    if isinstance(form, LaurentPoly):
        return form.evaluate(x)
    if isinstance(form, tuple):
        num, den = form
        d = _evaluate(den, x)
        if abs(d) < 1e-12:
            raise PoleAtCritical("form has a pole at a critical point")
        return _evaluate(num, x) / d
    return complex(form(x))


def k0_pairing(L: LogLikelihood, pts: Sequence[CriticalPoint], a: RationalFunction, b: RationalFunction) -> complex:
    """``sum_p a(p) b(p) / H^toric(p)`` for ``a = omega_+/omega_0``, ``b = omega_-/omega_0``.

    No ``(-1)^n`` here: the normalized intersection number of the canonical
    form pair in the amplitude ordering is ``(-1)^n k0_pairing(L, pts, 1, 1)``.
    """
    return complex(sum(_evaluate(a, p.coords) * _evaluate(b, p.coords) / p.hessian_det for p in pts))


def gram_basis_check(L: LogLikelihood, pts: Sequence[CriticalPoint], forms: Sequence[RationalFunction]):
    """Gram matrix of ``k0_pairing`` on ``forms`` and whether it is nonsingular."""
    gram = np.array([[k0_pairing(L, pts, a, b) for b in forms] for a in forms], dtype=complex)
    scale = float(np.prod(np.linalg.norm(gram, axis=1))) if len(forms) else 1.0
    det = abs(np.linalg.det(gram)) if len(forms) else 1.0
    return gram, bool(scale > 0 and det > 1e-8 * scale)
