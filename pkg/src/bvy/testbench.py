"""Smooth test functions with exact gradients and support metadata.

Every experiment in this package drives a :class:`ScalarField`: a smooth
function on R^n carrying a closed-form gradient, an exact bound on |f|, and
the radius of a ball (centred at the origin) outside of which the gradient
vanishes identically.  The metadata is what the level-set evaluators rely on
to choose scan ranges soundly, so the factories here compute it exactly
rather than estimating it numerically.

Factories
---------
``make_bump``
    A C^infinity bump supported on a ball.
``make_smooth_step``
    A C^2 monotone ramp from 0 to 1 (one dimensional).
``make_tensor_bump``
    A product of one-dimensional C^infinity bump profiles.

``dilate`` and ``scale`` build new fields from old ones with the metadata
transformed exactly; they are the workhorses of the homogeneity and
dilation-covariance checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ScalarField",
    "make_bump",
    "make_smooth_step",
    "make_tensor_bump",
    "dilate",
    "scale",
    "finite_difference_gradient",
]


def _normalize_points(x: object, dim: int) -> tuple[np.ndarray, str]:
    """Coerce ``x`` into an ``(m, dim)`` float array.

    Returns the array together with a shape token describing how the result
    should be handed back to the caller: ``"scalar"`` for a single point,
    ``"batch"`` for a batch of points.
    """
    a = np.asarray(x, dtype=float)
    if dim == 1:
        if a.ndim == 0:
            return a.reshape(1, 1), "scalar"
        if a.ndim == 1:
            return a.reshape(-1, 1), "batch"
        if a.ndim == 2 and a.shape[1] == 1:
            return a, "batch"
    else:
        if a.ndim == 1 and a.shape[0] == dim:
            return a.reshape(1, dim), "scalar"
        if a.ndim == 2 and a.shape[1] == dim:
            return a, "batch"
    raise ValueError(
        f"cannot interpret array of shape {a.shape} as points in dimension {dim}"
    )


@dataclass(frozen=True)
class ScalarField:
    """A smooth scalar function on R^n with exact analytic metadata.

    Attributes
    ----------
    dim:
        Ambient dimension n >= 1.
    eval_fn, grad_fn:
        Vectorized callables taking an ``(m, dim)`` array of points and
        returning values of shape ``(m,)`` and gradients of shape
        ``(m, dim)`` respectively.
    sup_abs:
        Exact value of sup |f|.
    grad_support_radius:
        Radius R such that the gradient vanishes identically outside the
        closed ball B(0, R); the function is constant on each connected
        component of the exterior.
    smoothness_class:
        Human-readable tag such as ``"smooth_compact"`` or
        ``"smooth_grad_compact"``.
    """

    dim: int
    eval_fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    sup_abs: float
    grad_support_radius: float
    smoothness_class: str = "smooth"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if not np.isfinite(self.sup_abs) or self.sup_abs < 0:
            raise ValueError("sup_abs must be finite and nonnegative")
        if not np.isfinite(self.grad_support_radius) or self.grad_support_radius <= 0:
            raise ValueError("grad_support_radius must be finite and positive")

    def eval(self, x: object) -> float | np.ndarray:
        """Evaluate f at a point (returns float) or at a batch (returns (m,))."""
        pts, token = _normalize_points(x, self.dim)
        out = np.asarray(self.eval_fn(pts), dtype=float).reshape(-1)
        if out.shape[0] != pts.shape[0]:
            raise ValueError("eval_fn returned wrong number of values")
        if token == "scalar":
            return float(out[0])
        return out

    def grad(self, x: object) -> float | np.ndarray:
        """Evaluate the gradient.

        One-dimensional fields mirror ``eval``: float in, float out; array
        in, ``(m,)`` out.  Higher dimensions return ``(dim,)`` for a point
        and ``(m, dim)`` for a batch.
        """
        pts, token = _normalize_points(x, self.dim)
        out = np.asarray(self.grad_fn(pts), dtype=float).reshape(pts.shape[0], self.dim)
        if token == "scalar":
            return float(out[0, 0]) if self.dim == 1 else out[0]
        if self.dim == 1:
            return out[:, 0]
        return out

    def grad_magnitude(self, x: object) -> float | np.ndarray:
        """Euclidean length of the gradient, same batching convention as eval."""
        pts, token = _normalize_points(x, self.dim)
        g = np.asarray(self.grad_fn(pts), dtype=float).reshape(pts.shape[0], self.dim)
        out = np.linalg.norm(g, axis=1)
        if token == "scalar":
            return float(out[0])
        return out


def make_bump(
    center: Sequence[float] | float = 0.0,
    radius: float = 1.0,
    amplitude: float = 1.0,
    dim: int = 1,
) -> ScalarField:
    """C^infinity bump ``A * exp(-1/(1 - |x-c|^2/R^2))`` on the ball B(c, R).

    The function and all derivatives vanish on the boundary, so the field is
    globally smooth and identically zero outside the ball.  The peak value is
    ``A * exp(-1)`` at the centre.
    """
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.shape != (dim,):
        if c.shape == (1,) and dim >= 1:
            c = np.full(dim, float(c[0]))
        else:
            raise ValueError(f"center of shape {c.shape} does not match dim={dim}")
    if radius <= 0:
        raise ValueError("radius must be positive")
    radius = float(radius)
    amplitude = float(amplitude)

    def eval_fn(pts: np.ndarray) -> np.ndarray:
        u = np.sum((pts - c) ** 2, axis=1) / radius**2
        out = np.zeros(pts.shape[0])
        inside = u < 1.0
        if np.any(inside):
            with np.errstate(divide="ignore", over="ignore"):
                out[inside] = amplitude * np.exp(-1.0 / (1.0 - u[inside]))
        return out

    def grad_fn(pts: np.ndarray) -> np.ndarray:
        d = pts - c
        u = np.sum(d**2, axis=1) / radius**2
        out = np.zeros_like(pts)
        inside = u < 1.0
        if np.any(inside):
            with np.errstate(divide="ignore", over="ignore"):
                vals = amplitude * np.exp(-1.0 / (1.0 - u[inside]))
            coef = -2.0 * vals / (radius**2 * (1.0 - u[inside]) ** 2)
            out[inside] = coef[:, None] * d[inside]
        return out

    return ScalarField(
        dim=dim,
        eval_fn=eval_fn,
        grad_fn=grad_fn,
        sup_abs=abs(amplitude) * float(np.exp(-1.0)),
        grad_support_radius=float(np.linalg.norm(c)) + radius,
        smoothness_class="smooth_compact",
    )


def make_smooth_step(a: float = -1.0, b: float = 1.0, plateau_gap: float = 0.2) -> ScalarField:
    """Monotone C^2 ramp on R: 0 for x <= a, 1 for x >= b (one dimensional).

    The transition uses the quintic polynomial ``u^3 (10 - 15 u + 6 u^2)`` on
    the interior window ``[a + plateau_gap, b - plateau_gap]``, which has
    vanishing first and second derivatives at both ends; the extra plateau
    margin keeps the derivative support strictly inside ``(a, b)``.
    """
    a = float(a)
    b = float(b)
    gap = float(plateau_gap)
    if gap < 0:
        raise ValueError("plateau_gap must be nonnegative")
    lo = a + gap
    hi = b - gap
    if not lo < hi:
        raise ValueError("need a + plateau_gap < b - plateau_gap")
    width = hi - lo

    def eval_fn(pts: np.ndarray) -> np.ndarray:
        u = np.clip((pts[:, 0] - lo) / width, 0.0, 1.0)
        return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)

    def grad_fn(pts: np.ndarray) -> np.ndarray:
        u = (pts[:, 0] - lo) / width
        inside = (u > 0.0) & (u < 1.0)
        g = np.zeros(pts.shape[0])
        ui = u[inside]
        g[inside] = 30.0 * ui**2 * (1.0 - ui) ** 2 / width
        return g.reshape(-1, 1)

    return ScalarField(
        dim=1,
        eval_fn=eval_fn,
        grad_fn=grad_fn,
        sup_abs=1.0,
        grad_support_radius=max(abs(a), abs(b)),
        smoothness_class="smooth_grad_compact",
    )


def make_tensor_bump(
    centers: Sequence[float],
    radii: Sequence[float] | float,
    amplitude: float = 1.0,
) -> ScalarField:
    """Product of one-dimensional bump profiles, one per coordinate axis.

    ``f(x) = A * prod_i exp(-1/(1 - t_i^2))`` with ``t_i = (x_i - c_i)/R_i``,
    supported on the box ``prod [c_i - R_i, c_i + R_i]``.  The peak value is
    ``A * exp(-n)``.
    """
    c = np.asarray(centers, dtype=float).reshape(-1)
    n = c.shape[0]
    r = np.broadcast_to(np.asarray(radii, dtype=float), (n,)).astype(float).copy()
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    amplitude = float(amplitude)

    def eval_fn(pts: np.ndarray) -> np.ndarray:
        t = (pts - c) / r
        inside = np.all(np.abs(t) < 1.0, axis=1)
        out = np.zeros(pts.shape[0])
        if np.any(inside):
            ti = t[inside]
            with np.errstate(divide="ignore", over="ignore"):
                expo = -np.sum(1.0 / (1.0 - ti**2), axis=1)
            out[inside] = amplitude * np.exp(expo)
        return out

    def grad_fn(pts: np.ndarray) -> np.ndarray:
        t = (pts - c) / r
        inside = np.all(np.abs(t) < 1.0, axis=1)
        out = np.zeros_like(pts)
        if np.any(inside):
            ti = t[inside]
            with np.errstate(divide="ignore", over="ignore"):
                expo = -np.sum(1.0 / (1.0 - ti**2), axis=1)
            vals = amplitude * np.exp(expo)
            # d/dx_j log f = -2 t_j / (1 - t_j^2)^2 / R_j
            logd = -2.0 * ti / (1.0 - ti**2) ** 2 / r
            out[inside] = vals[:, None] * logd
        return out

    corner = np.abs(c) + r
    return ScalarField(
        dim=n,
        eval_fn=eval_fn,
        grad_fn=grad_fn,
        sup_abs=abs(amplitude) * float(np.exp(-n)),
        grad_support_radius=float(np.linalg.norm(corner)),
        smoothness_class="smooth_compact",
    )


def dilate(f: ScalarField, delta: float) -> ScalarField:
    """The field ``x -> f(x / delta)`` with metadata transformed exactly."""
    delta = float(delta)
    if delta <= 0:
        raise ValueError("dilation factor must be positive")

    def eval_fn(pts: np.ndarray) -> np.ndarray:
        return np.asarray(f.eval_fn(pts / delta), dtype=float)

    def grad_fn(pts: np.ndarray) -> np.ndarray:
        return np.asarray(f.grad_fn(pts / delta), dtype=float) / delta

    return ScalarField(
        dim=f.dim,
        eval_fn=eval_fn,
        grad_fn=grad_fn,
        sup_abs=f.sup_abs,
        grad_support_radius=f.grad_support_radius * delta,
        smoothness_class=f.smoothness_class,
    )


def scale(f: ScalarField, c: float) -> ScalarField:
    """The field ``x -> c * f(x)`` with metadata transformed exactly."""
    c = float(c)

    def eval_fn(pts: np.ndarray) -> np.ndarray:
        return c * np.asarray(f.eval_fn(pts), dtype=float)

    def grad_fn(pts: np.ndarray) -> np.ndarray:
        return c * np.asarray(f.grad_fn(pts), dtype=float)

    return ScalarField(
        dim=f.dim,
        eval_fn=eval_fn,
        grad_fn=grad_fn,
        sup_abs=abs(c) * f.sup_abs,
        grad_support_radius=f.grad_support_radius,
        smoothness_class=f.smoothness_class,
    )


def finite_difference_gradient(f: ScalarField, x: object, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient, for validating ``grad_fn`` in tests."""
    pts, token = _normalize_points(x, f.dim)
    out = np.zeros_like(pts)
    for j in range(f.dim):
        e = np.zeros(f.dim)
        e[j] = h
        out[:, j] = (np.asarray(f.eval(pts + e)) - np.asarray(f.eval(pts - e))) / (2 * h)
    if token == "scalar":
        return out[0]
    return out
