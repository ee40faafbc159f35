"""Muckenhoupt weights, maximal averages, and the geometric majorant series.

This module supplies the weight-side ingredients used by the weighted norms
and by the boundedness diagnostics:

* :class:`Weight` -- a positive weight function with the same point-batching
  conventions as the scalar test fields, constructible from registry names
  (``"const:c"``, ``"power:a"``);
* Muckenhoupt class membership for power weights (exact parameter ranges)
  and sampled estimation of the A_p characteristic over explicit cube
  families;
* an exact uncentered maximal operator for one-dimensional sampled fields
  (piecewise-constant interpretation), with an approximate ball-scan version
  in higher dimensions;
* :func:`majorant_series` -- the normalized geometric series
  ``sum_k M^k g / (2 B)^k`` over iterates of the maximal operator, which
  dominates ``|g|`` pointwise, has norm at most twice that of ``g`` whenever
  ``B`` bounds the maximal operator norm, and has A_1 characteristic
  controlled by ``2 B``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "Weight",
    "weight_from_name",
    "power_weight_in_ap",
    "a_p_constant",
    "a_p_constant_sampled",
    "maximal_sampled",
    "maximal_norm_bound_1d",
    "MajorantResult",
    "majorant_series",
]


def _normalize_points(x: object, dim: int) -> tuple[np.ndarray, str]:
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
    raise ValueError(f"cannot interpret shape {a.shape} as points in dimension {dim}")


@dataclass(frozen=True)
class Weight:
    """A positive locally integrable weight on R^n.

    ``eval_fn`` takes an ``(m, dim)`` array and returns positive values of
    shape ``(m,)``.  ``name`` is the registry handle the weight was built
    from (used in reports and for exact membership lookups).
    """

    dim: int
    eval_fn: Callable[[np.ndarray], np.ndarray]
    name: str

    def eval(self, x: object) -> float | np.ndarray:
        pts, token = _normalize_points(x, self.dim)
        out = np.asarray(self.eval_fn(pts), dtype=float).reshape(-1)
        if token == "scalar":
            return float(out[0])
        return out


def weight_from_name(name: str, dim: int) -> Weight:
    """Build a weight from a registry handle.

    ``"const:c"`` is the constant weight c > 0; ``"power:a"`` (alias
    ``"power_weight:a"``) is ``|x|^a``.
    """
    kind, _, arg = name.partition(":")
    kind = kind.strip()
    if kind == "const":
        c = float(arg) if arg else 1.0
        if c <= 0:
            raise ValueError("constant weight must be positive")

        def eval_const(pts: np.ndarray) -> np.ndarray:
            return np.full(pts.shape[0], c)

        return Weight(dim=dim, eval_fn=eval_const, name=f"const:{c:g}")
    if kind in ("power", "power_weight"):
        a = float(arg)

        def eval_power(pts: np.ndarray) -> np.ndarray:
            r = np.linalg.norm(pts, axis=1)
            with np.errstate(divide="ignore"):
                out = r**a
            # |0|^a: 0 for a > 0, 1 for a == 0; +inf for a < 0 is clipped to
            # a huge finite value so downstream averages stay finite-aware.
            if a < 0:
                out[r == 0] = np.inf
            return out

        return Weight(dim=dim, eval_fn=eval_power, name=f"power:{a:g}")
    raise ValueError(f"unknown weight handle {name!r}")


def power_weight_in_ap(a: float, dim: int, p: float) -> bool:
    """Exact Muckenhoupt membership of ``|x|^a`` on R^n.

    For p = 1 the range is ``-n < a <= 0``; for p > 1 it is
    ``-n < a < n (p - 1)``.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if p == 1:
        return -dim < a <= 0
    return -dim < a < dim * (p - 1)


def _cube_bounds(cube: object) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(cube, "lower") and hasattr(cube, "upper"):
        return np.atleast_1d(np.asarray(cube.lower, float)), np.atleast_1d(
            np.asarray(cube.upper, float)
        )
    lo, hi = cube
    return np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float))


def _midpoint_grid(lo: np.ndarray, hi: np.ndarray, samples: int) -> np.ndarray:
    axes = [lo[i] + (hi[i] - lo[i]) * (np.arange(samples) + 0.5) / samples for i in range(lo.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def a_p_constant(
    w: Weight,
    p: float,
    cubes: Sequence[object],
    samples_per_axis: int = 128,
) -> float:
    """Sampled estimate of the A_p characteristic over an explicit cube family.

    For p > 1 each cube contributes ``avg(w) * avg(w^(-1/(p-1)))^(p-1)``;
    for p = 1 it contributes ``avg(w) * max(1/w)`` over the sample points.
    Midpoint sampling keeps singular weights (``|x|^a`` with a < 0) finite.
    The estimate converges to the true characteristic restricted to the
    family as the sampling refines; it is a scan, not a certified bound.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    best = 0.0
    for cube in cubes:
        lo, hi = _cube_bounds(cube)
        pts = _midpoint_grid(lo, hi, samples_per_axis)
        vals = np.asarray(w.eval(pts), dtype=float).reshape(-1)
        vals = vals[np.isfinite(vals)]
        if vals.size == 0:
            continue
        avg = float(np.mean(vals))
        if p == 1:
            factor = float(np.max(1.0 / vals))
            best = max(best, avg * factor)
        else:
            dual = float(np.mean(vals ** (-1.0 / (p - 1.0))))
            best = max(best, avg * dual ** (p - 1.0))
    return best


def a_p_constant_sampled(
    nodes: np.ndarray,
    cell_measures: np.ndarray,
    values: np.ndarray,
    p: float,
    cubes: Sequence[object],
) -> float:
    """A_p characteristic estimate for a sampled weight (piecewise constant).

    Averages use the cell measures of the nodes falling inside each cube;
    cubes containing no node are skipped.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    nodes = np.asarray(nodes, dtype=float)
    mu = np.asarray(cell_measures, dtype=float)
    v = np.asarray(values, dtype=float)
    best = 0.0
    for cube in cubes:
        lo, hi = _cube_bounds(cube)
        mask = np.all((nodes > lo) & (nodes <= hi), axis=1)
        if not np.any(mask):
            continue
        mw = mu[mask]
        vw = v[mask]
        avg = float(np.sum(mw * vw) / np.sum(mw))
        if p == 1:
            best = max(best, avg * float(np.max(1.0 / vw)))
        else:
            dual = float(np.sum(mw * vw ** (-1.0 / (p - 1.0))) / np.sum(mw))
            best = max(best, avg * dual ** (p - 1.0))
    return best


# ---------------------------------------------------------------------------
# Maximal averages
# ---------------------------------------------------------------------------


def maximal_sampled(field, radii: Sequence[float] | None = None) -> np.ndarray:
    """Uncentered maximal averages of a nonnegative sampled field at its nodes.

    In dimension 1 the field is interpreted as piecewise constant on its
    uniform cells and the scan over all cell-aligned intervals is exact for
    that interpretation (partial cells never improve the average, and
    intervals reaching into the zero exterior only dilute it).  In higher
    dimensions the scan runs over balls centred at nodes with the given
    radius family and is a lower estimate of the true maximal function.
    """
    nodes = np.asarray(field.nodes, dtype=float)
    mu = np.asarray(field.cell_measures, dtype=float)
    v = np.asarray(field.values, dtype=float)
    if np.any(v < 0):
        raise ValueError("maximal averages expect nonnegative values")
    m = v.shape[0]
    if nodes.shape[1] == 1:
        if not np.allclose(mu, mu[0], rtol=1e-9):
            raise ValueError("one-dimensional exact scan requires a uniform grid")
        order = np.argsort(nodes[:, 0])
        vs = v[order]
        prefix = np.concatenate([[0.0], np.cumsum(vs)])
        out_sorted = np.empty(m)
        for k in range(m):
            left = prefix[: k + 1]  # P[i], i = 0..k
            right = prefix[k + 1 :]  # P[j+1], j = k..m-1
            # avg(i..j) = (P[j+1] - P[i]) / (j - i + 1)
            j_plus = np.arange(k + 1, m + 1)
            i_idx = np.arange(k + 1)
            sums = right[None, :] - left[:, None]
            counts = j_plus[None, :] - i_idx[:, None]
            out_sorted[k] = np.max(sums / counts)
        out = np.empty(m)
        out[order] = out_sorted
        return out
    # higher dimensions: centred-ball scan (lower estimate)
    if radii is None:
        h = float(np.min(mu)) ** (1.0 / nodes.shape[1])
        radii = np.geomspace(h, 2.0 * float(field.coverage_radius), 16)
    out = v.copy()
    d2 = np.sum((nodes[:, None, :] - nodes[None, :, :]) ** 2, axis=2)
    for rho in radii:
        mask = d2 <= rho**2
        sums = mask @ (mu * v)
        meas = mask @ mu
        avg = np.where(meas > 0, sums / meas, 0.0)
        # every node inside the ball sees this average as a candidate
        cand = np.where(mask, avg[None, :], 0.0).max(axis=1)
        out = np.maximum(out, cand)
    return out


def maximal_norm_bound_1d(p: float) -> float:
    """Operator norm of the uncentered maximal operator on L^p(R).

    The classical exact value is the unique positive root of
    ``(p-1) x^p - p x^(p-1) - 1 = 0`` (for p = 2 this is 1 + sqrt 2).
    Any upper bound works in the majorant series; using the exact constant
    keeps the series as tight as possible.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")

    def poly(x: float) -> float:
        return (p - 1.0) * x**p - p * x ** (p - 1.0) - 1.0

    return float(brentq(poly, 1.0 + 1e-12, 16.0))


@dataclass(frozen=True)
class MajorantResult:
    """Output of :func:`majorant_series`.

    ``field`` holds the series values at the nodes; ``terms`` is the number
    of summands (including the zeroth, which is ``|g|`` itself);
    ``remainder_fraction`` is the geometric bound ``2^-(terms-1)`` on the
    relative norm mass of the dropped tail.
    """

    field: object
    terms: int
    remainder_fraction: float


def majorant_series(field, m_norm_bound: float, terms: int = 14) -> MajorantResult:
    """Normalized geometric series over maximal iterates.

    Computes ``sum_{k=0}^{K} M^k g / (2 B)^k`` where ``M^0 g = |g|``, ``M``
    is the sampled maximal operator and ``B >= ||M||`` on the ambient space.
    The result dominates ``|g|`` pointwise (the k = 0 term), and since each
    summand has norm at most ``2^-k ||g||`` the truncated series has norm
    at most ``(2 - 2^(1-K)) ||g|| < 2 ||g||``.
    """
    if m_norm_bound <= 0:
        raise ValueError("m_norm_bound must be positive")
    if terms < 1:
        raise ValueError("need at least one term")
    g = np.abs(np.asarray(field.values, dtype=float))
    acc = g.copy()
    current = g
    denom = 1.0
    work = dataclasses.replace(field, values=g)
    for _ in range(1, terms):
        current = maximal_sampled(dataclasses.replace(work, values=current))
        denom *= 2.0 * m_norm_bound
        acc = acc + current / denom
    out = dataclasses.replace(field, values=acc)
    return MajorantResult(field=out, terms=terms, remainder_fraction=2.0 ** (-(terms - 1)))
