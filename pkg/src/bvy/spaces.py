"""Sampled fields and the eight function-space norms.

All norms operate on a :class:`SampledField`: values attached to the nodes
of a tensor midpoint grid, each node owning one cell of the covered box.
Integrals are cell-measure sums, which makes every norm here the exact norm
of the piecewise-constant interpretant (extended by zero outside the box) --
up to the explicitly documented exceptions:

* the Morrey norm scans a finite family of balls and is therefore a
  certified lower bound that converges as the family refines (it is exact
  for the reduction alpha = r, where one scanned ball covers every node);
* the Orlicz-slice norm truncates its outer integral to the covered box.

Supported space kinds and their parameters:

=============== =====================================================
``lebesgue``     exponent ``p``
``weighted``     exponent ``p`` and a Muckenhoupt :class:`~bvy.weights.Weight`
``lorentz``      primary ``r`` and secondary ``tau`` exponents
``orlicz``       an :class:`OrliczFunction` (Luxemburg norm)
``mixed``        per-axis exponent tuple ``rvec`` (iterated, axis 1 first)
``variable``     a :class:`VariableExponent` (Luxemburg-type modular)
``morrey``       local exponent ``r`` and scaling exponent ``alpha``
``orlicz_slice`` an Orlicz function, outer exponent ``r``, ball radius ``t``
=============== =====================================================

Norms are lattice norms: they depend on the values only through their
absolute value, which :func:`norm` applies up front.

:func:`convexify` returns the space whose norm is
``norm(spec, g**p) ** (1/p)``, realized by exact reparameterization, so
power-of-norm identities can be tested without new machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from bvy.geometry import unit_ball_volume
from bvy.weights import Weight, weight_from_name

__all__ = [
    "SampledField",
    "tensor_grid",
    "sample_function",
    "OrliczFunction",
    "orlicz_from_name",
    "orlicz_inverse",
    "VariableExponent",
    "exponent_from_name",
    "SpaceSpec",
    "lebesgue",
    "weighted_lebesgue",
    "lorentz",
    "orlicz_space",
    "mixed_lebesgue",
    "variable_lebesgue",
    "morrey",
    "orlicz_slice",
    "norm",
    "convexify",
]


# ---------------------------------------------------------------------------
# Sampled fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampledField:
    """Values on the nodes of a midpoint tensor grid.

    ``nodes`` is ``(m, dim)``; ``cell_measures`` the positive Lebesgue
    measure of each node's cell; ``values`` the attached data (finite).
    ``coverage_radius`` is the circumradius of the covered box around the
    origin.  ``axes`` keeps the per-axis coordinate arrays when the nodes
    form a full tensor product in row-major order (required by the mixed
    norm and by fast windowed scans); it is None for unstructured data.
    """

    dim: int
    nodes: np.ndarray
    cell_measures: np.ndarray
    values: np.ndarray
    coverage_radius: float
    axes: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        mu = np.asarray(self.cell_measures, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != self.dim:
            raise ValueError("nodes must be (m, dim)")
        m = nodes.shape[0]
        if mu.shape != (m,) or vals.shape != (m,):
            raise ValueError("cell_measures and values must be (m,)")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("nodes must be finite")
        if not (np.all(np.isfinite(mu)) and np.all(mu > 0)):
            raise ValueError("cell measures must be finite and positive")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if not (np.isfinite(self.coverage_radius) and self.coverage_radius > 0):
            raise ValueError("coverage_radius must be finite and positive")
        axes = self.axes
        if axes is not None:
            axes = tuple(np.asarray(a, dtype=float) for a in axes)
            if len(axes) != self.dim:
                raise ValueError("axes must have one array per dimension")
            count = 1
            for a in axes:
                if a.ndim != 1 or a.size < 2 or np.any(np.diff(a) <= 0):
                    raise ValueError("each axis must be strictly increasing with >= 2 points")
                count *= a.size
            if count != m:
                raise ValueError("axes sizes do not multiply to the node count")
            for a in axes:
                a.setflags(write=False)
        for arr in (nodes, mu, vals):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "cell_measures", mu)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "axes", axes)

    @property
    def count(self) -> int:
        return int(self.nodes.shape[0])

    def with_values(self, values: np.ndarray) -> "SampledField":
        return replace(self, values=np.asarray(values, dtype=float))

    def axis_steps(self) -> tuple[float, ...]:
        if self.axes is None:
            raise ValueError("field has no tensor structure")
        steps = []
        for a in self.axes:
            d = np.diff(a)
            if not np.allclose(d, d[0], rtol=1e-9):
                raise ValueError("axis is not uniform")
            steps.append(float(d[0]))
        return tuple(steps)


def tensor_grid(dim: int, half_width: float | Sequence[float], counts: int | Sequence[int]) -> SampledField:
    """Midpoint tensor grid on the box ``prod [-L_i, L_i]`` with zero values."""
    L = np.broadcast_to(np.asarray(half_width, dtype=float), (dim,)).astype(float)
    cnt = np.broadcast_to(np.asarray(counts, dtype=int), (dim,)).astype(int)
    if np.any(L <= 0) or np.any(cnt < 2):
        raise ValueError("half widths must be positive and counts at least 2")
    axes = tuple(
        -L[i] + (np.arange(cnt[i]) + 0.5) * (2.0 * L[i] / cnt[i]) for i in range(dim)
    )
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in mesh], axis=1)
    cell = float(np.prod(2.0 * L / cnt))
    m = nodes.shape[0]
    return SampledField(
        dim=dim,
        nodes=nodes,
        cell_measures=np.full(m, cell),
        values=np.zeros(m),
        coverage_radius=float(np.linalg.norm(L)),
        axes=axes,
    )


def sample_function(grid: SampledField, func) -> SampledField:
    """Attach ``func`` values at the grid nodes (ScalarField or raw callable)."""
    if hasattr(func, "eval"):
        vals = np.asarray(func.eval(grid.nodes), dtype=float)
    else:
        vals = np.asarray(func(grid.nodes), dtype=float)
    return grid.with_values(vals.reshape(-1))


# ---------------------------------------------------------------------------
# Young functions and variable exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrliczFunction:
    """A Young-type function with known global growth indices.

    ``fn`` maps nonnegative arrays elementwise, with ``fn(0) = 0``, strictly
    increasing where positive.  ``lower_index <= upper_index`` are the
    global power-growth indices (for ``t^p`` both equal p; for a sum of
    powers they are the min and max exponents).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    lower_index: float
    upper_index: float
    name: str

    def __post_init__(self) -> None:
        if not (0 < self.lower_index <= self.upper_index < math.inf):
            raise ValueError("growth indices must satisfy 0 < lower <= upper < inf")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)


def orlicz_from_name(name: str) -> OrliczFunction:
    """Registry handles: ``"power:p"`` for t^p, ``"sum_power:p1,p2"`` for t^p1 + t^p2."""
    kind, _, arg = name.partition(":")
    kind = kind.strip()
    if kind in ("power", "power_orlicz"):
        p = float(arg)
        if p <= 0:
            raise ValueError("power must be positive")
        return OrliczFunction(fn=lambda t: t**p, lower_index=p, upper_index=p, name=f"power:{p:g}")
    if kind in ("sum_power", "sum_power_orlicz"):
        parts = [float(v) for v in arg.split(",")]
        if len(parts) != 2 or min(parts) <= 0:
            raise ValueError("sum_power needs two positive exponents")
        p1, p2 = parts
        return OrliczFunction(
            fn=lambda t: t**p1 + t**p2,
            lower_index=min(p1, p2),
            upper_index=max(p1, p2),
            name=f"sum_power:{p1:g},{p2:g}",
        )
    raise ValueError(f"unknown Orlicz handle {name!r}")


def orlicz_inverse(phi: OrliczFunction, u: float) -> float:
    """Solve ``phi(s) = u`` for s >= 0 (u > 0) by bracketing and brentq."""
    if u <= 0:
        raise ValueError("u must be positive")
    hi = 1.0
    for _ in range(400):
        if float(phi(np.array([hi]))[0]) >= u:
            break
        hi *= 2.0
    else:
        raise RuntimeError("failed to bracket Orlicz inverse from above")
    lo = hi
    for _ in range(2000):
        if float(phi(np.array([lo]))[0]) <= u:
            break
        lo /= 2.0
    else:
        raise RuntimeError("failed to bracket Orlicz inverse from below")
    if lo == hi:
        return lo
    return float(brentq(lambda s: float(phi(np.array([s]))[0]) - u, lo, hi, xtol=1e-300, rtol=1e-14))


@dataclass(frozen=True)
class VariableExponent:
    """A spatially varying exponent with known bounds.

    ``fn`` maps an ``(m, dim)`` array of points to exponents in
    ``[lower, upper]``.  Registry construction provides log-Hoelder regular
    examples; arbitrary callables are accepted for experiments.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    lower: float
    upper: float
    name: str

    def __post_init__(self) -> None:
        if not (0 < self.lower <= self.upper < math.inf):
            raise ValueError("exponent bounds must satisfy 0 < lower <= upper < inf")

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        out = np.asarray(self.fn(np.asarray(pts, dtype=float)), dtype=float)
        return out


def exponent_from_name(name: str) -> VariableExponent:
    """Registry handles for variable exponents.

    ``"log_decay:rinf,c"`` is ``r(x) = rinf + c / log(e + |x|)`` (decaying
    from rinf + c at the origin to rinf at infinity, log-Hoelder regular);
    ``"const:p"`` is the constant exponent.
    """
    kind, _, arg = name.partition(":")
    kind = kind.strip()
    if kind in ("log_decay", "log_holder_exponent"):
        parts = [float(v) for v in arg.split(",")]
        if len(parts) != 2:
            raise ValueError("log_decay needs rinf,c")
        rinf, c = parts
        if rinf <= 0 or c < 0:
            raise ValueError("need rinf > 0 and c >= 0")

        def fn(pts: np.ndarray) -> np.ndarray:
            r = np.linalg.norm(pts, axis=1)
            return rinf + c / np.log(math.e + r)

        return VariableExponent(fn=fn, lower=rinf, upper=rinf + c, name=f"log_decay:{rinf:g},{c:g}")
    if kind == "const":
        p = float(arg)
        if p <= 0:
            raise ValueError("constant exponent must be positive")

        def fn_const(pts: np.ndarray) -> np.ndarray:
            return np.full(pts.shape[0], p)

        return VariableExponent(fn=fn_const, lower=p, upper=p, name=f"const:{p:g}")
    raise ValueError(f"unknown exponent handle {name!r}")


# ---------------------------------------------------------------------------
# Space specifications
# ---------------------------------------------------------------------------

_KINDS = (
    "lebesgue",
    "weighted",
    "lorentz",
    "orlicz",
    "mixed",
    "variable",
    "morrey",
    "orlicz_slice",
)


@dataclass(frozen=True)
class SpaceSpec:
    """Which norm to evaluate, with its parameters.

    Build through the factory functions (:func:`lebesgue`, :func:`lorentz`,
    ...), which validate the parameters each kind requires.  The evaluator
    accepts any parameters for which the defining formula makes sense
    (including quasi-norm ranges); theorem-level parameter restrictions are
    the hypothesis checker's job, not the evaluator's.
    """

    kind: str
    p: float | None = None
    weight: Weight | None = None
    r: float | None = None
    tau: float | None = None
    alpha: float | None = None
    rvec: tuple[float, ...] | None = None
    exponent: VariableExponent | None = None
    phi: OrliczFunction | None = None
    t: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")

    def label(self) -> str:
        k = self.kind
        if k == "lebesgue":
            return f"lebesgue(p={self.p:g})"
        if k == "weighted":
            return f"weighted(p={self.p:g},w={self.weight.name})"
        if k == "lorentz":
            return f"lorentz(r={self.r:g},tau={self.tau:g})"
        if k == "orlicz":
            return f"orlicz({self.phi.name})"
        if k == "mixed":
            return "mixed(r=(" + ",".join(f"{v:g}" for v in self.rvec) + "))"
        if k == "variable":
            return f"variable({self.exponent.name})"
        if k == "morrey":
            return f"morrey(r={self.r:g},alpha={self.alpha:g})"
        return f"orlicz_slice({self.phi.name},r={self.r:g},t={self.t:g})"


def lebesgue(p: float) -> SpaceSpec:
    if p <= 0:
        raise ValueError("p must be positive")
    return SpaceSpec(kind="lebesgue", p=float(p))


def weighted_lebesgue(p: float, weight: Weight | str, dim: int | None = None) -> SpaceSpec:
    if p <= 0 or not math.isfinite(p):
        raise ValueError("p must be positive and finite")
    if isinstance(weight, str):
        if dim is None:
            raise ValueError("dim is required when building the weight from a name")
        weight = weight_from_name(weight, dim)
    return SpaceSpec(kind="weighted", p=float(p), weight=weight)


def lorentz(r: float, tau: float) -> SpaceSpec:
    if r <= 0 or tau <= 0:
        raise ValueError("r and tau must be positive")
    return SpaceSpec(kind="lorentz", r=float(r), tau=float(tau))


def orlicz_space(phi: OrliczFunction | str) -> SpaceSpec:
    if isinstance(phi, str):
        phi = orlicz_from_name(phi)
    return SpaceSpec(kind="orlicz", phi=phi)


def mixed_lebesgue(rvec: Sequence[float]) -> SpaceSpec:
    rv = tuple(float(v) for v in rvec)
    if len(rv) < 1 or any(v <= 0 for v in rv):
        raise ValueError("rvec entries must be positive")
    return SpaceSpec(kind="mixed", rvec=rv)


def variable_lebesgue(exponent: VariableExponent | str) -> SpaceSpec:
    if isinstance(exponent, str):
        exponent = exponent_from_name(exponent)
    return SpaceSpec(kind="variable", exponent=exponent)


def morrey(r: float, alpha: float) -> SpaceSpec:
    if not 0 < r <= alpha:
        raise ValueError("need 0 < r <= alpha")
    return SpaceSpec(kind="morrey", r=float(r), alpha=float(alpha))


def orlicz_slice(phi: OrliczFunction | str, r: float, t: float) -> SpaceSpec:
    if isinstance(phi, str):
        phi = orlicz_from_name(phi)
    if r <= 0 or t <= 0:
        raise ValueError("r and t must be positive")
    return SpaceSpec(kind="orlicz_slice", phi=phi, r=float(r), t=float(t))


# ---------------------------------------------------------------------------
# Luxemburg solvers
# ---------------------------------------------------------------------------


def _luxemburg_rows(
    phi: Callable[[np.ndarray], np.ndarray],
    weights: np.ndarray,
    vals: np.ndarray,
) -> np.ndarray:
    """Row-wise Luxemburg norms: per row i solve sum_j w_ij phi(v_ij / lam) = 1.

    ``weights`` broadcasts against ``vals`` (both 2-D).  Rows whose values
    are all zero return 0.  Uses geometric bracketing followed by 60
    bisection steps (resolving far below 1e-12 relative).
    """
    vals = np.abs(np.asarray(vals, dtype=float))
    m = vals.shape[0]
    out = np.zeros(m)
    vmax = vals.max(axis=1)
    active = vmax > 0
    if not np.any(active):
        return out
    v = vals[active]
    w = np.broadcast_to(weights, vals.shape)[active]

    def modular(lams: np.ndarray) -> np.ndarray:
        return np.sum(w * phi(v / lams[:, None]), axis=1)

    hi = vmax[active].copy()
    for _ in range(200):
        need = modular(hi) > 1.0
        if not np.any(need):
            break
        hi[need] *= 2.0
    else:
        raise RuntimeError("Luxemburg bracketing failed to grow")
    lo = hi / 2.0
    for _ in range(4000):
        low_enough = modular(lo) > 1.0
        if np.all(low_enough):
            break
        shrink = ~low_enough
        hi[shrink] = lo[shrink]
        lo[shrink] /= 2.0
    else:
        raise RuntimeError("Luxemburg bracketing failed to shrink")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        high = modular(mid) > 1.0
        lo = np.where(high, mid, lo)
        hi = np.where(high, hi, mid)
    out[active] = 0.5 * (lo + hi)
    return out


def _modular_norm(modular: Callable[[float], float], vmax: float) -> float:
    """Scalar Luxemburg-type norm for a decreasing modular with mod(norm) = 1."""
    if vmax <= 0:
        return 0.0
    hi = vmax
    for _ in range(200):
        if modular(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise RuntimeError("modular bracketing failed to grow")
    lo = hi / 2.0
    for _ in range(4000):
        if modular(lo) > 1.0:
            break
        hi = lo
        lo /= 2.0
    else:
        raise RuntimeError("modular bracketing failed to shrink")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if modular(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Norm evaluation
# ---------------------------------------------------------------------------


def norm(spec: SpaceSpec, field: SampledField) -> float:
    """Evaluate the norm of ``field`` in the space described by ``spec``.

    Lattice convention: only ``|values|`` enters.  See the module docstring
    for the exactness status of each branch.
    """
    v = np.abs(field.values)
    mu = field.cell_measures
    kind = spec.kind
    if kind == "lebesgue":
        return _lebesgue_norm(v, mu, spec.p)
    if kind == "weighted":
        if spec.weight.dim != field.dim:
            raise ValueError("weight dimension does not match field")
        w = np.asarray(spec.weight.eval(field.nodes), dtype=float)
        mass = mu * v**spec.p * w
        if np.any(~np.isfinite(mass) & (v > 0)):
            return math.inf
        return float(np.sum(mass[np.isfinite(mass)]) ** (1.0 / spec.p))
    if kind == "lorentz":
        return _lorentz_norm(v, mu, spec.r, spec.tau)
    if kind == "orlicz":
        return float(_luxemburg_rows(spec.phi, mu[None, :], v[None, :])[0])
    if kind == "mixed":
        return _mixed_norm(field, v, spec.rvec)
    if kind == "variable":
        exps = np.asarray(spec.exponent(field.nodes), dtype=float)
        vmax = float(np.max(v)) if v.size else 0.0

        def modular(lam: float) -> float:
            return float(np.sum(mu * (v / lam) ** exps))

        return _modular_norm(modular, vmax)
    if kind == "morrey":
        return _morrey_norm(field, v, spec.r, spec.alpha)
    if kind == "orlicz_slice":
        return _orlicz_slice_norm(field, v, spec.phi, spec.r, spec.t)
    raise ValueError(f"unknown space kind {kind!r}")


def _lebesgue_norm(v: np.ndarray, mu: np.ndarray, p: float) -> float:
    if p == math.inf:
        return float(np.max(v)) if v.size else 0.0
    return float(np.sum(mu * v**p) ** (1.0 / p))


def _lorentz_norm(v: np.ndarray, mu: np.ndarray, r: float, tau: float) -> float:
    pos = v > 0
    if not np.any(pos):
        return 0.0
    vv = v[pos]
    mm = mu[pos]
    order = np.argsort(vv)[::-1]
    vv = vv[order]
    mm = mm[order]
    edges = np.concatenate([[0.0], np.cumsum(mm)])
    e = tau / r
    pieces = vv**tau * (edges[1:] ** e - edges[:-1] ** e) * (r / tau)
    return float(np.sum(pieces) ** (1.0 / tau))


def _mixed_norm(field: SampledField, v: np.ndarray, rvec: tuple[float, ...]) -> float:
    if field.axes is None:
        raise ValueError("mixed norm requires tensor-grid structure")
    if len(rvec) != field.dim:
        raise ValueError("rvec length must equal the field dimension")
    steps = field.axis_steps()
    shape = tuple(a.size for a in field.axes)
    cur = v.reshape(shape)
    for i, ri in enumerate(rvec):
        cur = (np.sum(cur**ri, axis=0) * steps[i]) ** (1.0 / ri)
    return float(cur)


def _morrey_norm(field: SampledField, v: np.ndarray, r: float, alpha: float) -> float:
    nodes = field.nodes
    mu = field.cell_measures
    dim = field.dim
    centers = _morrey_centers(field)
    h_min = float(np.min(mu)) ** (1.0 / dim)
    radii = np.geomspace(h_min, 2.0 * field.coverage_radius, 24)
    vball = unit_ball_volume(dim)
    best = 0.0
    vr = v**r
    for c in centers:
        d2 = np.sum((nodes - c) ** 2, axis=1)
        for rho in radii:
            mask = d2 <= rho * rho
            if not np.any(mask):
                continue
            local = float(np.sum(mu[mask] * vr[mask])) ** (1.0 / r)
            meas = vball * rho**dim
            best = max(best, meas ** (1.0 / alpha - 1.0 / r) * local)
    return best


def _morrey_centers(field: SampledField) -> np.ndarray:
    if field.axes is not None:
        per_axis = {1: 97, 2: 17, 3: 9}.get(field.dim, 7)
        picks = []
        for a in field.axes:
            if a.size <= per_axis:
                picks.append(a)
            else:
                idx = np.unique(np.linspace(0, a.size - 1, per_axis).round().astype(int))
                picks.append(a[idx])
        mesh = np.meshgrid(*picks, indexing="ij")
        return np.stack([g.reshape(-1) for g in mesh], axis=1)
    stride = max(1, field.count // 128)
    return field.nodes[::stride]


def _orlicz_slice_norm(
    field: SampledField, v: np.ndarray, phi: OrliczFunction, r: float, t: float
) -> float:
    nodes = field.nodes
    mu = field.cell_measures
    dim = field.dim
    vol = unit_ball_volume(dim) * t**dim
    denom = 1.0 / orlicz_inverse(phi, 1.0 / vol)
    if field.axes is not None and dim == 1:
        ratios = _slice_numerators_1d(field, v, phi, t) / denom
    else:
        ratios = np.empty(field.count)
        for i in range(field.count):
            mask = np.sum((nodes - nodes[i]) ** 2, axis=1) <= t * t
            if not np.any(mask):
                ratios[i] = 0.0
                continue
            local = _luxemburg_rows(phi, mu[mask][None, :], v[mask][None, :])[0]
            ratios[i] = local / denom
    return float(np.sum(mu * ratios**r) ** (1.0 / r))


def _slice_numerators_1d(field: SampledField, v: np.ndarray, phi: OrliczFunction, t: float) -> np.ndarray:
    (h,) = field.axis_steps()
    m = field.count
    w = int(math.floor(t / h + 1e-12))
    # window of node i: indices [i-w, i+w] clipped; zero padding outside
    padded = np.concatenate([np.zeros(w), v, np.zeros(w)])
    idx = np.arange(m)[:, None] + np.arange(2 * w + 1)[None, :]
    windows = padded[idx]
    return _luxemburg_rows(phi, np.full(2 * w + 1, h)[None, :], windows)


# ---------------------------------------------------------------------------
# Convexification
# ---------------------------------------------------------------------------


def convexify(spec: SpaceSpec, p: float) -> SpaceSpec:
    """The space with ``norm(convexify(spec, p), g) = norm(spec, g**p)**(1/p)``.

    Realized by exact parameter reparameterization: exponents multiply by p,
    a Young function phi becomes ``t -> phi(t**p)``, and weights are
    untouched.  The slice space is not closed under this operation and is
    rejected.
    """
    if p <= 0 or not math.isfinite(p):
        raise ValueError("power must be positive and finite")
    k = spec.kind
    if k == "lebesgue":
        return lebesgue(spec.p * p)
    if k == "weighted":
        return weighted_lebesgue(spec.p * p, spec.weight)
    if k == "lorentz":
        return lorentz(spec.r * p, spec.tau * p)
    if k == "orlicz":
        base = spec.phi
        new_phi = OrliczFunction(
            fn=lambda t, _f=base.fn, _p=p: _f(np.asarray(t, dtype=float) ** _p),
            lower_index=base.lower_index * p,
            upper_index=base.upper_index * p,
            name=f"{base.name}^(t**{p:g})",
        )
        return orlicz_space(new_phi)
    if k == "mixed":
        return mixed_lebesgue(tuple(v * p for v in spec.rvec))
    if k == "variable":
        base = spec.exponent
        new_exp = VariableExponent(
            fn=lambda pts, _f=base.fn, _p=p: _p * np.asarray(_f(pts), dtype=float),
            lower=base.lower * p,
            upper=base.upper * p,
            name=f"{p:g}*({base.name})",
        )
        return variable_lebesgue(new_exp)
    if k == "morrey":
        return morrey(spec.r * p, spec.alpha * p)
    raise ValueError(f"space kind {k!r} is not closed under convexification")
