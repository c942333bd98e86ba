"""Small root finders: closed-form real cubic roots and dense Newton-Raphson."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_TWO_PI_3 = 2.0 * math.pi / 3.0


def _polish(coeffs, x: float) -> float:
    # Newton steps clean up cancellation in the trig/Cardano branch; a step is
    # kept only if it shrinks the residual (near double roots f' ~ 0)
    c3, c2, c1, c0 = coeffs
    f = ((c3 * x + c2) * x + c1) * x + c0
    for _ in range(2):
        df = (3.0 * c3 * x + 2.0 * c2) * x + c1
        if df == 0.0 or f == 0.0:
            break
        trial = x - f / df
        f_trial = ((c3 * trial + c2) * trial + c1) * trial + c0
        if not math.isfinite(trial) or abs(f_trial) >= abs(f):
            break
        x, f = trial, f_trial
    return x


def _quadratic(a: float, b: float, c: float) -> list[float]:
    if a == 0.0:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    if disc == 0.0:
        return [-b / (2.0 * a)]
    # numerically stable pairing
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    return sorted([q / a, c / q])


def solve_cubic_real(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """Real roots of ``c3 x^3 + c2 x^2 + c1 x + c0`` by Cardano's method.

    Degrades to the quadratic/linear formula when leading coefficients vanish.
    Roots are returned sorted; repeated roots appear once.
    """
    if c3 == 0.0:
        return _quadratic(c2, c1, c0)
    a, b, c = c2 / c3, c1 / c3, c0 / c3
    # depressed cubic t^3 + p t + q with x = t - a/3
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c
    if p == 0.0 and q == 0.0:
        roots = [-shift]
    else:
        # rescale t = k y so p and q are O(1): keeps the discriminant from
        # under- or overflowing
        k = max(math.sqrt(abs(p)), abs(q) ** (1.0 / 3.0))
        p, q = p / (k * k), q / (k * k * k)
        disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
        # relative cancellation test: the two discriminant terms nearly cancel
        magnitude = (q / 2.0) ** 2 + abs(p / 3.0) ** 3
        if abs(disc) <= 1e-13 * magnitude:
            if p == 0.0:
                ys = [0.0]
            else:
                ys = [3.0 * q / p, -1.5 * q / p]
        elif disc > 0.0:
            sq = math.sqrt(disc)
            u = math.copysign(abs(-q / 2.0 + sq) ** (1.0 / 3.0), -q / 2.0 + sq)
            v = math.copysign(abs(-q / 2.0 - sq) ** (1.0 / 3.0), -q / 2.0 - sq)
            ys = [u + v]
        else:
            r = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * r)
            phi = math.acos(max(-1.0, min(1.0, arg))) / 3.0
            ys = [r * math.cos(phi - i * _TWO_PI_3) for i in range(3)]
        roots = [k * y - shift for y in ys]
    coeffs = (c3, c2, c1, c0)
    polished = sorted(_polish(coeffs, x) for x in roots)
    out: list[float] = []
    for x in polished:
        if not out or abs(x - out[-1]) > 1e-12 * max(1.0, abs(x)):
            out.append(x)
    return out


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    converged: bool
    residual: float
    iterations: int


def newton_raphson(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    guess,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> NewtonResult:
    """Solve ``residual(x) = 0`` with step halving when a full step does not help.

    Convergence is judged on the infinity norm of the residual. On failure the
    best iterate seen is returned with ``converged=False``.
    """
    x = np.atleast_1d(np.asarray(guess, dtype=float)).copy()
    f = np.atleast_1d(residual(x))
    norm = float(np.max(np.abs(f)))
    best_x, best_norm = x.copy(), norm
    for it in range(1, max_iter + 1):
        if norm <= tol:
            return NewtonResult(x, True, norm, it - 1)
        jac = np.atleast_2d(jacobian(x))
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, f, rcond=None)[0]
        lam = 1.0
        for _ in range(30):
            trial = x - lam * step
            f_trial = np.atleast_1d(residual(trial))
            n_trial = float(np.max(np.abs(f_trial)))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            lam *= 0.5
        else:
            # no descent after 30 halvings: stalled
            break
        x, f, norm = trial, f_trial, n_trial
        if norm < best_norm:
            best_x, best_norm = x.copy(), norm
    if best_norm <= tol:
        return NewtonResult(best_x, True, best_norm, max_iter)
    return NewtonResult(best_x, False, best_norm, max_iter)
