"""From-scratch minimizers behind one evaluation-budgeted interface.

Every objective call costs one unit of budget; a gradient call costs its true
circuit-evaluation count (the callable's `cost_per_call` attribute, defaulting
to 2 * dimension, the central-difference cost).  Methods stop when the budget
runs out or their own convergence test fires; the returned trace carries the
best parameters seen, not the last iterate.

Gradient-free: spsa, nelder-mead, powell.
Gradient-based: adam, amsgrad, cg, bfgs, lbfgs (a gradient callable is
required for these and rejected for the others).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation

GRADIENT_BASED = ("adam", "amsgrad", "bfgs", "cg", "lbfgs")
GRADIENT_FREE = ("nelder-mead", "powell", "spsa")
METHODS = tuple(sorted(GRADIENT_BASED + GRADIENT_FREE))

DEFAULT_OPTIONS: dict[str, dict] = {
    "spsa": {"a": 0.2, "c": 0.1, "alpha": 0.602, "gamma": 0.101, "stability_frac": 0.1},
    "adam": {"lr": 0.05, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8},
    "amsgrad": {"lr": 0.05, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8},
    "nelder-mead": {"reflect": 1.0, "expand": 2.0, "contract": 0.5, "shrink": 0.5,
                    "init_step": 0.25, "spread_tol": 1e-8, "x_tol": 1e-6},
    "powell": {"line_tol": 1e-6, "init_step": 1.0},
    "cg": {"c1": 1e-4, "init_step": 1.0, "shrink": 0.5, "max_backtracks": 30},
    "bfgs": {"c1": 1e-4, "c2": 0.9, "max_line_iters": 10},
    "lbfgs": {"c1": 1e-4, "c2": 0.9, "max_line_iters": 10, "memory": 10},
}


def normalize_method(name: str) -> str:
    return name.strip().lower().replace("_", "-")


@dataclass
class OptimizerConfig:
    """Method selection, evaluation budget, seed, and hyperparameter overrides.

    gtol/ftol are the convergence tolerances; pass 0 to disable convergence
    checks so the method spends its whole budget (used on shot backends where
    noise would otherwise trip them).
    """

    method: str
    eval_budget: int
    seed: int = 0
    gtol: float = 1e-8
    ftol: float = 1e-10
    options: dict = field(default_factory=dict)


@dataclass
class OptimizationTrace:
    best_params: np.ndarray
    best_value: float
    history: list[tuple[int, float]]
    evaluations_used: int
    aborted: bool = False


class _BudgetExhausted(Exception):
    pass


class _NonFiniteValue(Exception):
    pass


class _Recorder:
    """Counting/best-tracking proxy around the raw objective."""

    def __init__(self, fn, budget: int):
        self.fn = fn
        self.budget = budget
        self.used = 0
        self.best_x = None
        self.best_f = math.inf
        self.history: list[tuple[int, float]] = []
        self.aborted = False

    def charge(self, k: int) -> None:
        if self.used + k > self.budget:
            raise _BudgetExhausted
        self.used += k

    def __call__(self, x) -> float:
        self.charge(1)
        value = float(self.fn(np.asarray(x, dtype=float)))
        if not math.isfinite(value):
            self.aborted = True
            raise _NonFiniteValue
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float, copy=True)
            self.history.append((self.used, value))
        return value


class _GradProxy:
    def __init__(self, recorder: _Recorder, grad_fn, dim: int):
        self.recorder = recorder
        self.grad_fn = grad_fn
        self.cost = max(1, int(getattr(grad_fn, "cost_per_call", 2 * dim)))

    def __call__(self, x) -> np.ndarray:
        self.recorder.charge(self.cost)
        g = np.asarray(self.grad_fn(np.asarray(x, dtype=float)), dtype=float)
        if not np.all(np.isfinite(g)):
            self.recorder.aborted = True
            raise _NonFiniteValue
        return g


def minimize(obj, x0, cfg: OptimizerConfig, grad=None) -> OptimizationTrace:
    """Run the configured method until budget or convergence; deterministic per seed."""
    method = normalize_method(cfg.method)
    if method not in METHODS:
        raise ContractViolation(
            f"unknown optimizer {cfg.method!r}; valid methods: {', '.join(METHODS)}"
        )
    x0 = np.asarray(x0, dtype=float).ravel()
    if not np.all(np.isfinite(x0)):
        raise ContractViolation("initial point must be finite")
    dim = x0.size
    if cfg.eval_budget < 2 * dim + 1:
        raise ContractViolation(
            f"eval_budget must be at least 2*dim+1 = {2 * dim + 1}, got {cfg.eval_budget}"
        )
    gradient_based = method in GRADIENT_BASED
    if gradient_based and grad is None:
        raise ContractViolation(f"{method} requires a gradient callable")
    if not gradient_based and grad is not None:
        raise ContractViolation(f"{method} is gradient-free; no gradient callable allowed")
    opts = dict(DEFAULT_OPTIONS[method])
    for key, value in cfg.options.items():
        if key not in opts:
            raise ContractViolation(f"unknown {method} option {key!r}")
        opts[key] = value

    recorder = _Recorder(obj, cfg.eval_budget)
    grad_proxy = _GradProxy(recorder, grad, dim) if gradient_based else None
    runner = _RUNNERS[method]
    try:
        runner(recorder, grad_proxy, x0, opts, cfg)
    except _BudgetExhausted:
        pass
    except _NonFiniteValue:
        pass
    best_x = recorder.best_x if recorder.best_x is not None else x0.copy()
    best_f = recorder.best_f if recorder.best_x is not None else math.nan
    return OptimizationTrace(best_x, best_f, recorder.history, recorder.used, recorder.aborted)


# ---------------------------------------------------------------------------
# SPSA
# ---------------------------------------------------------------------------


def spsa_gradient_estimate(obj, x, c_k: float, seed: int) -> np.ndarray:
    """Two-sided simultaneous-perturbation estimate; exactly 2 objective calls."""
    if c_k <= 0:
        raise ContractViolation("perturbation size c_k must be positive")
    x = np.asarray(x, dtype=float)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    delta = rng.integers(0, 2, size=x.size).astype(float) * 2.0 - 1.0
    f_plus = obj(x + c_k * delta)
    f_minus = obj(x - c_k * delta)
    # delta entries are +-1, so elementwise 1/delta equals delta
    return (f_plus - f_minus) / (2.0 * c_k) * delta


def _run_spsa(f, grad, x0, opts, cfg):
    f(x0)
    max_iter = max(1, (cfg.eval_budget - 1) // 2)
    stability = opts["stability_frac"] * max_iter
    seeds = np.random.SeedSequence(cfg.seed).generate_state(max_iter, dtype=np.uint64)
    x = x0.copy()
    for k in range(max_iter):
        c_k = opts["c"] / (k + 1) ** opts["gamma"]
        a_k = opts["a"] / (k + 1 + stability) ** opts["alpha"]
        g = spsa_gradient_estimate(f, x, c_k, int(seeds[k]))
        x = x - a_k * g


# ---------------------------------------------------------------------------
# ADAM / AMSGrad
# ---------------------------------------------------------------------------


def _run_adam(f, grad, x0, opts, cfg, use_amsgrad=False):
    x = x0.copy()
    f(x)
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    v_max = np.zeros_like(x)
    b1, b2, lr, eps = opts["beta1"], opts["beta2"], opts["lr"], opts["eps"]
    t = 0
    while True:
        t += 1
        g = grad(x)
        if cfg.gtol > 0 and np.max(np.abs(g)) < cfg.gtol:
            break
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        if use_amsgrad:
            v_max = np.maximum(v_max, v)
            denom = np.sqrt(v_max) + eps
        else:
            denom = np.sqrt(v / (1 - b2 ** t)) + eps
        x = x - lr * m_hat / denom
        f(x)


def _run_amsgrad(f, grad, x0, opts, cfg):
    _run_adam(f, grad, x0, opts, cfg, use_amsgrad=True)


# ---------------------------------------------------------------------------
# Nelder-Mead
# ---------------------------------------------------------------------------


def _run_nelder_mead(f, grad, x0, opts, cfg):
    dim = x0.size
    points = [x0.copy()]
    for i in range(dim):
        p = x0.copy()
        p[i] += opts["init_step"]
        points.append(p)
    values = [f(p) for p in points]
    alpha, gamma_, rho, sigma = opts["reflect"], opts["expand"], opts["contract"], opts["shrink"]
    while True:
        order = np.argsort(values, kind="stable")
        points = [points[i] for i in order]
        values = [values[i] for i in order]
        # value spread alone can vanish on symmetric simplexes far from the
        # optimum, so also require the simplex itself to have collapsed
        diameter = max(float(np.max(np.abs(p - points[0]))) for p in points[1:])
        if opts["spread_tol"] > 0 and values[-1] - values[0] < opts["spread_tol"] \
                and diameter < opts["x_tol"]:
            break
        centroid = np.mean(points[:-1], axis=0)
        reflected = centroid + alpha * (centroid - points[-1])
        f_r = f(reflected)
        if f_r < values[0]:
            expanded = centroid + gamma_ * (reflected - centroid)
            f_e = f(expanded)
            if f_e < f_r:
                points[-1], values[-1] = expanded, f_e
            else:
                points[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            points[-1], values[-1] = reflected, f_r
        else:
            if f_r < values[-1]:
                contracted = centroid + rho * (reflected - centroid)
            else:
                contracted = centroid + rho * (points[-1] - centroid)
            f_c = f(contracted)
            if f_c < min(f_r, values[-1]):
                points[-1], values[-1] = contracted, f_c
            else:
                for i in range(1, dim + 1):
                    points[i] = points[0] + sigma * (points[i] - points[0])
                    values[i] = f(points[i])


# ---------------------------------------------------------------------------
# Line minimization shared by Powell (bracketing + parabolic interpolation)
# ---------------------------------------------------------------------------

_GOLD = 1.618033988749895
_CGOLD = 0.3819660112501051


def _bracket(g, t0, f0, step):
    a, fa = t0, f0
    b = t0 + step
    fb = g(b)
    if fb > fa:
        a, b = b, a
        fa, fb = fb, fa
    c = b + _GOLD * (b - a)
    fc = g(c)
    for _ in range(40):
        if fc >= fb:
            break
        a, b = b, c
        fa, fb = fb, fc
        c = b + _GOLD * (b - a)
        fc = g(c)
    return (a, b, c), (fa, fb, fc)


def _brent_1d(g, bracket, fvals, tol, max_iter=40):
    """Parabolic interpolation with golden-section safeguard inside a bracket."""
    a, b, c = bracket
    fa, fb, fc = fvals
    lo, hi = (a, c) if a < c else (c, a)
    x = w = v = b
    fx = fw = fv = fb
    d = e = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        tol1 = tol * abs(x) + 1e-12
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (hi - lo):
            break
        use_golden = True
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            e_prev = e
            e = d
            if abs(p) < abs(0.5 * q * e_prev) and q != 0 and lo * q < p + x * q < hi * q:
                d = p / q
                u = x + d
                if u - lo < tol2 or hi - u < tol2:
                    d = tol1 if mid > x else -tol1
                use_golden = False
        if use_golden:
            e = (hi if x < mid else lo) - x
            d = _CGOLD * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = g(u)
        if fu <= fx:
            if u >= x:
                lo = x
            else:
                hi = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                lo = u
            else:
                hi = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def _line_minimize(f, x, direction, fx, tol, step=1.0):
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        return x, fx
    unit = direction / norm

    def g(t):
        return f(x + t * unit)

    bracket, fvals = _bracket(g, 0.0, fx, step)
    t_best, f_best = _brent_1d(g, bracket, fvals, tol)
    if f_best < fx:
        return x + t_best * unit, f_best
    return x, fx


# ---------------------------------------------------------------------------
# Powell's direction-set method
# ---------------------------------------------------------------------------


def _run_powell(f, grad, x0, opts, cfg):
    dim = x0.size
    directions = [np.eye(dim)[i] for i in range(dim)]
    x = x0.copy()
    fx = f(x)
    iteration = 0
    while True:
        iteration += 1
        x_start = x.copy()
        f_start = fx
        biggest_drop = 0.0
        biggest_index = 0
        for i, direction in enumerate(directions):
            x, f_new = _line_minimize(f, x, direction, fx, opts["line_tol"], opts["init_step"])
            if fx - f_new > biggest_drop:
                biggest_drop = fx - f_new
                biggest_index = i
            fx = f_new
        if cfg.ftol > 0 and 2.0 * (f_start - fx) <= cfg.ftol * (abs(f_start) + abs(fx)) + 1e-30:
            break
        new_direction = x - x_start
        if np.linalg.norm(new_direction) > 0:
            f_ext = f(2.0 * x - x_start)
            if f_ext < f_start:
                t = (
                    2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - biggest_drop) ** 2
                    - biggest_drop * (f_start - f_ext) ** 2
                )
                if t < 0.0:
                    x, fx = _line_minimize(f, x, new_direction, fx, opts["line_tol"], opts["init_step"])
                    directions[biggest_index] = directions[-1]
                    directions[-1] = new_direction / np.linalg.norm(new_direction)
        # periodic reset keeps the direction set from collapsing
        if iteration % dim == 0:
            directions = [np.eye(dim)[i] for i in range(dim)]


# ---------------------------------------------------------------------------
# Conjugate gradient (Polak-Ribiere+ with Armijo backtracking)
# ---------------------------------------------------------------------------


def _run_cg(f, grad, x0, opts, cfg):
    x = x0.copy()
    fx = f(x)
    g = grad(x)
    d = -g
    stall = 0
    while True:
        if cfg.gtol > 0 and np.max(np.abs(g)) < cfg.gtol:
            break
        slope = float(g @ d)
        if slope >= 0:
            d = -g
            slope = -float(g @ g)
            if slope == 0:
                break
        t = opts["init_step"]
        f_new = None
        for _ in range(opts["max_backtracks"]):
            candidate = f(x + t * d)
            if candidate <= fx + opts["c1"] * t * slope:
                f_new = candidate
                break
            t *= opts["shrink"]
        if f_new is None:
            if np.array_equal(d, -g):
                break
            d = -g
            continue
        x_new = x + t * d
        g_new = grad(x_new)
        beta = max(0.0, float(g_new @ (g_new - g)) / float(g @ g))
        d = -g_new + beta * d
        if cfg.ftol > 0 and abs(fx - f_new) <= cfg.ftol * (1.0 + abs(f_new)):
            stall += 1
            if stall >= 3:
                x, fx, g = x_new, f_new, g_new
                break
        else:
            stall = 0
        x, fx, g = x_new, f_new, g_new


# ---------------------------------------------------------------------------
# BFGS / L-BFGS with a Wolfe line search
# ---------------------------------------------------------------------------


def _wolfe_search(f, grad, x, d, fx, gx, c1, c2, max_iters):
    """Bracketing Wolfe search; falls back to the best point evaluated.

    Returns (alpha, f_new, g_new) or None when nothing evaluated improved.
    """
    phi0 = fx
    dphi0 = float(gx @ d)
    if dphi0 >= 0:
        return None
    best = None  # (alpha, phi, gnew or None)

    def note(alpha, phi, gnew):
        nonlocal best
        if best is None or phi < best[1]:
            best = (alpha, phi, gnew)

    alpha_prev, phi_prev = 0.0, phi0
    alpha = 1.0
    lo = hi = None
    for i in range(max_iters):
        phi = f(x + alpha * d)
        if phi > phi0 + c1 * alpha * dphi0 or (i > 0 and phi >= phi_prev):
            lo, hi = (alpha_prev, phi_prev), (alpha, phi)
            break
        gnew = grad(x + alpha * d)
        dphi = float(gnew @ d)
        note(alpha, phi, gnew)
        if abs(dphi) <= -c2 * dphi0:
            return alpha, phi, gnew
        if dphi >= 0:
            lo, hi = (alpha, phi), (alpha_prev, phi_prev)
            break
        alpha_prev, phi_prev = alpha, phi
        alpha *= 2.0
    else:
        lo = None
    if lo is not None:
        a_lo, phi_lo = lo
        a_hi, _ = hi
        for _ in range(max_iters):
            a_mid = 0.5 * (a_lo + a_hi)
            phi_mid = f(x + a_mid * d)
            if phi_mid > phi0 + c1 * a_mid * dphi0 or phi_mid >= phi_lo:
                a_hi = a_mid
            else:
                g_mid = grad(x + a_mid * d)
                dphi_mid = float(g_mid @ d)
                note(a_mid, phi_mid, g_mid)
                if abs(dphi_mid) <= -c2 * dphi0:
                    return a_mid, phi_mid, g_mid
                if dphi_mid * (a_hi - a_lo) >= 0:
                    a_hi = a_lo
                a_lo, phi_lo = a_mid, phi_mid
    if best is not None and best[1] < phi0:
        alpha, phi, gnew = best
        if gnew is None:
            gnew = grad(x + alpha * d)
        return alpha, phi, gnew
    return None


def _run_bfgs(f, grad, x0, opts, cfg):
    dim = x0.size
    x = x0.copy()
    fx = f(x)
    g = grad(x)
    h_inv = np.eye(dim)
    identity = np.eye(dim)
    while True:
        if cfg.gtol > 0 and np.max(np.abs(g)) < cfg.gtol:
            break
        d = -h_inv @ g
        if float(d @ g) >= 0:
            h_inv = np.eye(dim)
            d = -g
        result = _wolfe_search(f, grad, x, d, fx, g, opts["c1"], opts["c2"], opts["max_line_iters"])
        if result is None:
            if np.allclose(h_inv, identity):
                break
            h_inv = np.eye(dim)
            continue
        alpha, f_new, g_new = result
        s = alpha * d
        y = g_new - g
        sy = float(y @ s)
        if sy > 1e-10 * np.linalg.norm(y) * np.linalg.norm(s):
            rho = 1.0 / sy
            left = identity - rho * np.outer(s, y)
            h_inv = left @ h_inv @ left.T + rho * np.outer(s, s)
        if cfg.ftol > 0 and abs(fx - f_new) <= cfg.ftol * (1.0 + abs(f_new)):
            x, fx, g = x + s, f_new, g_new
            break
        x, fx, g = x + s, f_new, g_new


def _run_lbfgs(f, grad, x0, opts, cfg):
    x = x0.copy()
    fx = f(x)
    g = grad(x)
    memory: list[tuple[np.ndarray, np.ndarray, float]] = []
    while True:
        if cfg.gtol > 0 and np.max(np.abs(g)) < cfg.gtol:
            break
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(memory):
            a = rho * float(s @ q)
            alphas.append(a)
            q -= a * y
        if memory:
            s_last, y_last, _ = memory[-1]
            q *= float(s_last @ y_last) / float(y_last @ y_last)
        for (s, y, rho), a in zip(memory, reversed(alphas)):
            b = rho * float(y @ q)
            q += (a - b) * s
        d = -q
        if float(d @ g) >= 0:
            memory.clear()
            d = -g
        result = _wolfe_search(f, grad, x, d, fx, g, opts["c1"], opts["c2"], opts["max_line_iters"])
        if result is None:
            if not memory:
                break
            memory.clear()
            continue
        alpha, f_new, g_new = result
        s = alpha * d
        y = g_new - g
        sy = float(y @ s)
        if sy > 1e-10 * np.linalg.norm(y) * np.linalg.norm(s):
            memory.append((s, y, 1.0 / sy))
            if len(memory) > opts["memory"]:
                memory.pop(0)
        if cfg.ftol > 0 and abs(fx - f_new) <= cfg.ftol * (1.0 + abs(f_new)):
            x, fx, g = x + s, f_new, g_new
            break
        x, fx, g = x + s, f_new, g_new


_RUNNERS = {
    "spsa": _run_spsa,
    "adam": _run_adam,
    "amsgrad": _run_amsgrad,
    "nelder-mead": _run_nelder_mead,
    "powell": _run_powell,
    "cg": _run_cg,
    "bfgs": _run_bfgs,
    "lbfgs": _run_lbfgs,
}
