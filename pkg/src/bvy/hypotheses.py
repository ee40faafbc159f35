"""Decision tables: when a numerical check is theorem-backed.

The two-sided equivalence, the limiting constants, and the interpolation
inequalities each hold under parameter hypotheses that depend on the space
family.  This module encodes those hypotheses as explicit predicates on the
:class:`~bvy.spaces.SpaceSpec` parameters, the ambient dimension, and the
functional parameters, so the harness can label every experiment as either
*theorem-backed* (a failed tolerance is a genuine failure) or *exploratory*
(outside the guaranteed regime; recorded but never a failure).

The key quantity is the *boundedness index* of a space: the exponent that
plays the role of the Lebesgue exponent in the hypotheses --

=============== ==========================================
``lebesgue``     p
``morrey``       local exponent r
``mixed``        min of the per-axis exponents
``variable``     the infimum of the exponent function
``lorentz``      min(r, tau)
``orlicz``       the lower growth index of the Young function
``orlicz_slice`` min(lower growth index, outer exponent)
``weighted``     an auxiliary exponent swept over the feasible
                 Muckenhoupt window (see :func:`weighted_exponent_window`)
=============== ==========================================

Case structure shared by all families (with per-family strictness quirks):

* (a) index above the dimension: every q > 0 works, either sign of the
  kernel exponent;
* (b) positive kernel exponent with the window ``n (1/index - 1/q) < 1``;
* (c) negative kernel exponent with q below the index (at most the index,
  for the families marked closed), index above 1;
* (d) the one-dimensional endpoint ``index = q = n = 1`` with kernel
  exponent below -1 (only for the families that admit it).

Limiting values add a window on q: for the upward limit (positive kernel
exponent) the equality holds as a limsup statement for every space in the
implemented family once q > 0, with the full limit guaranteed when a case
above also applies; the downward limit (negative kernel exponent) requires
a fired case plus ``q < (n - gamma) * index / n`` (dimension one instead:
``gamma < -1`` and ``q < -gamma * index``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from bvy.spaces import SpaceSpec

__all__ = [
    "HypothesisReport",
    "space_index",
    "weighted_exponent_window",
    "sup_equivalence_hypotheses",
    "upper_limit_hypotheses",
    "lower_limit_hypotheses",
    "gn_type1_hypotheses",
    "gn_type2_hypotheses",
]


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of a hypothesis check.

    ``applies`` -- the guarantee is in force; ``case`` -- which clause fired
    (None when none); ``conditions`` -- named predicate outcomes for
    reporting; ``notes`` -- free-form caveats (unknown weight classes,
    limsup-only guarantees, and similar).
    """

    applies: bool
    case: str | None
    conditions: tuple[tuple[str, bool], ...] = ()
    notes: tuple[str, ...] = ()


# family traits: admits the index-1 endpoint case; q-range in case (c)
# closed at the index; case (c) capped at the dimension
_TRAITS = {
    "lebesgue": dict(small=True, c_closed=True, c_capped=True),
    "morrey": dict(small=True, c_closed=False, c_capped=True),
    "mixed": dict(small=False, c_closed=False, c_capped=True),
    "variable": dict(small=True, c_closed=False, c_capped=True),
    "lorentz": dict(small=False, c_closed=False, c_capped=True),
    "orlicz": dict(small=True, c_closed=False, c_capped=True),
    "orlicz_slice": dict(small=True, c_closed=False, c_capped=False),
}


def space_index(spec: SpaceSpec) -> float:
    """The boundedness index of the space (see module docstring)."""
    k = spec.kind
    if k == "lebesgue":
        return float(spec.p)
    if k == "morrey":
        return float(spec.r)
    if k == "mixed":
        return float(min(spec.rvec))
    if k == "variable":
        return float(spec.exponent.lower)
    if k == "lorentz":
        return float(min(spec.r, spec.tau))
    if k == "orlicz":
        return float(spec.phi.lower_index)
    if k == "orlicz_slice":
        return float(min(spec.phi.lower_index, spec.r))
    if k == "weighted":
        window = weighted_exponent_window(spec, spec.weight.dim)
        if window is None:
            return float(spec.p)
        return float(window[0])
    raise ValueError(f"unknown space kind {k!r}")


def _base_valid(spec: SpaceSpec, n: int) -> tuple[bool, list[tuple[str, bool]]]:
    """Standing parameter-range assumptions of the family."""
    k = spec.kind
    conds: list[tuple[str, bool]] = []
    if k == "lebesgue":
        conds.append(("p >= 1", spec.p >= 1.0))
    elif k == "morrey":
        conds.append(("1 <= r <= alpha", 1.0 <= spec.r <= spec.alpha))
    elif k == "mixed":
        conds.append(("all exponents in (1, inf)", all(v > 1.0 for v in spec.rvec)))
        conds.append(("one exponent per axis", len(spec.rvec) == n))
    elif k == "variable":
        conds.append(("1 <= inf exponent", spec.exponent.lower >= 1.0))
    elif k == "lorentz":
        conds.append(("r in (1, inf)", spec.r > 1.0))
        conds.append(("tau in (1, inf)", spec.tau > 1.0))
    elif k == "orlicz":
        conds.append(("lower growth index >= 1", spec.phi.lower_index >= 1.0))
    elif k == "orlicz_slice":
        conds.append(("lower growth index >= 1", spec.phi.lower_index >= 1.0))
        conds.append(("outer exponent >= 1", spec.r >= 1.0))
        conds.append(("ball radius positive", spec.t > 0.0))
    elif k == "weighted":
        conds.append(("exponent >= 1", spec.p >= 1.0))
    return all(ok for _, ok in conds), conds


def weighted_exponent_window(spec: SpaceSpec, n: int) -> tuple[float, bool] | None:
    """Largest auxiliary exponent ``p`` with the weight in the class A_{r/p}.

    Returns ``(p_max, attained)`` where ``attained`` says whether p_max
    itself is feasible (or only values strictly below it), scanning
    ``p in [1, r]``.  Known weights: constants (feasible up to r) and power
    weights ``|x|^a`` (for a <= 0 feasible up to r via the A_1 endpoint;
    for a > 0 feasible strictly below ``r n / (n + a)``).  Returns None for
    weights whose Muckenhoupt classes this module cannot certify.
    """
    if spec.kind != "weighted":
        raise ValueError("weighted_exponent_window expects a weighted space")
    r = float(spec.p)
    name = spec.weight.name
    kind, _, arg = name.partition(":")
    if kind == "const":
        return (r, True)
    if kind == "power":
        a = float(arg)
        if a <= -n:
            return None  # not locally integrable
        if a <= 0:
            return (r, True)
        p_sup = r * n / (n + a)
        if p_sup <= 1.0:
            return None
        return (p_sup, False)
    return None


def _window_allows(q: float, bound: float, attained: bool, closed: bool) -> bool:
    """Is q within (0, bound] (closed & attained) or (0, bound) otherwise?"""
    if closed and attained:
        return 0 < q <= bound
    return 0 < q < bound


def sup_equivalence_hypotheses(
    spec: SpaceSpec, gamma: float, q: float, n: int
) -> HypothesisReport:
    """Does the two-sided sup equivalence hold for these parameters?"""
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    if q <= 0:
        raise ValueError("q must be positive")
    ok, conds = _base_valid(spec, n)
    if not ok:
        return HypothesisReport(False, None, tuple(conds), ("parameters outside the family's standing range",))

    if spec.kind == "weighted":
        return _weighted_sup_hypotheses(spec, gamma, q, n, conds)

    m = space_index(spec)
    traits = _TRAITS[spec.kind]

    # (a) large index: any q, either sign
    if m > n:
        conds.append((f"index {m:g} > dimension {n}", True))
        return HypothesisReport(True, "large-index", tuple(conds))
    conds.append((f"index {m:g} > dimension {n}", False))

    # (b) positive kernel exponent with the integrability window
    if gamma > 0:
        window = n * (1.0 / m - 1.0 / q) < 1.0
        conds.append((f"n(1/index - 1/q) < 1 with index {m:g}", window))
        if m >= 1 and window:
            return HypothesisReport(True, "positive-window", tuple(conds))
        return HypothesisReport(False, None, tuple(conds))

    # gamma < 0
    # (c) q below the index
    cap_ok = (m <= n) or not traits["c_capped"]
    q_ok = _window_allows(q, m, attained=True, closed=traits["c_closed"])
    conds.append(("index > 1", m > 1.0))
    conds.append(("q below index" + (" (closed)" if traits["c_closed"] else ""), q_ok))
    if m > 1.0 and cap_ok and q_ok:
        return HypothesisReport(True, "negative-window", tuple(conds))

    # (d) one-dimensional endpoint
    if traits["small"]:
        endpoint = m == 1.0 and n == 1 and q == 1.0 and gamma < -1.0
        conds.append(("endpoint index=q=n=1, gamma < -1", endpoint))
        if endpoint:
            return HypothesisReport(True, "endpoint", tuple(conds))
    return HypothesisReport(False, None, tuple(conds))


def _weighted_sup_hypotheses(
    spec: SpaceSpec, gamma: float, q: float, n: int, conds: list[tuple[str, bool]]
) -> HypothesisReport:
    r = float(spec.p)
    window = weighted_exponent_window(spec, n)
    if window is None:
        conds.append(("weight Muckenhoupt class certified", False))
        return HypothesisReport(
            False, None, tuple(conds), ("weight class unknown; use a registry weight",)
        )
    p_max, attained = window
    conds.append(("weight Muckenhoupt class certified", True))

    # (a): some auxiliary exponent in [n, r)
    open_sup = min(r, p_max) if not attained else r
    if gamma != 0 and r > n and open_sup > n:
        conds.append(("auxiliary exponent available in [n, r)", True))
        return HypothesisReport(True, "large-index", tuple(conds))
    conds.append(("auxiliary exponent available in [n, r)", r > n and open_sup > n))

    if gamma > 0:
        # (b): best (largest) auxiliary exponent, open condition in p
        ok = n * (1.0 / p_max - 1.0 / q) < 1.0 and p_max >= 1.0
        conds.append((f"n(1/p - 1/q) < 1 at auxiliary sup p = {p_max:g}", ok))
        if ok:
            return HypothesisReport(True, "positive-window", tuple(conds))
        return HypothesisReport(False, None, tuple(conds))

    # (c): q <= p for a feasible auxiliary p, with r > 1
    q_ok = _window_allows(q, p_max, attained=attained, closed=True)
    conds.append(("r > 1", r > 1.0))
    conds.append(("q within auxiliary window", q_ok))
    if r > 1.0 and q_ok:
        return HypothesisReport(True, "negative-window", tuple(conds))

    endpoint = r == 1.0 and n == 1 and q == 1.0 and gamma < -1.0 and p_max >= 1.0
    conds.append(("endpoint r=p=q=n=1, gamma < -1", endpoint))
    if endpoint:
        return HypothesisReport(True, "endpoint", tuple(conds))
    return HypothesisReport(False, None, tuple(conds))


def upper_limit_hypotheses(
    spec: SpaceSpec, gamma: float, q: float, n: int
) -> HypothesisReport:
    """Upward limiting value (threshold to infinity), positive kernel exponent.

    For every space in the implemented family the limiting value is attained
    as a limsup equality once gamma, q > 0 (for smooth fields with compactly
    supported gradient); when the sup-equivalence hypotheses also fire, the
    full limit is guaranteed.  The report always applies for gamma, q > 0
    and carries the distinction in its notes.
    """
    if gamma <= 0:
        return HypothesisReport(False, None, ((f"gamma {gamma:g} > 0", False),))
    if q <= 0:
        raise ValueError("q must be positive")
    base = sup_equivalence_hypotheses(spec, gamma, q, n)
    notes = ("limsup equality guaranteed for any space of the family",)
    if base.applies:
        notes = notes + ("full limit guaranteed (sup-equivalence case also fires)",)
    return HypothesisReport(True, "upward-limit", base.conditions, notes)


def lower_limit_hypotheses(
    spec: SpaceSpec, gamma: float, q: float, n: int
) -> HypothesisReport:
    """Downward limiting value (threshold to zero), negative kernel exponent."""
    if gamma >= 0:
        return HypothesisReport(False, None, ((f"gamma {gamma:g} < 0", False),))
    base = sup_equivalence_hypotheses(spec, gamma, q, n)
    conds = list(base.conditions)
    if not base.applies:
        return HypothesisReport(False, None, tuple(conds), ("sup-equivalence case required",))
    if spec.kind == "weighted":
        window = weighted_exponent_window(spec, n)
        p_max = window[0] if window else float(spec.p)
        m = p_max
    else:
        m = space_index(spec)
    if n >= 2:
        ok = q < (n - gamma) * m / n
        conds.append((f"q < (n - gamma) * index / n = {(n - gamma) * m / n:g}", ok))
    else:
        ok = gamma < -1.0 and q < -gamma * m
        conds.append((f"gamma < -1 and q < -gamma * index = {-gamma * m:g}", ok))
    if ok:
        return HypothesisReport(True, base.case, tuple(conds))
    return HypothesisReport(False, None, tuple(conds))


def _maximal_bounded(spec: SpaceSpec, n: int) -> tuple[bool, str]:
    """Proxy for maximal-operator boundedness on the space itself."""
    if spec.kind == "weighted":
        r = float(spec.p)
        name = spec.weight.name
        kind, _, arg = name.partition(":")
        if kind == "const":
            return r > 1.0, "constant weight, exponent > 1"
        if kind == "power":
            a = float(arg)
            ok = r > 1.0 and -n < a < n * (r - 1.0)
            return ok, f"power weight in the A_{r:g} range"
        return False, "weight class unknown"
    m = space_index(spec)
    return m > 1.0, f"boundedness index {m:g} > 1"


def _gn_base(spec: SpaceSpec, gamma: float, n: int) -> tuple[bool, list[tuple[str, bool]], list[str]]:
    ok, conds = _base_valid(spec, n)
    notes: list[str] = []
    conds.append(("gamma nonzero", gamma != 0))
    ok = ok and gamma != 0
    if gamma < 0:
        bounded, why = _maximal_bounded(spec, n)
        escape = n == 1 and gamma < -1.0
        conds.append((f"maximal operator bounded ({why})", bounded))
        conds.append(("or endpoint n = 1, gamma < -1", escape))
        if not (bounded or escape):
            ok = False
        elif not bounded:
            notes.append("negative kernel exponent admitted through the one-dimensional endpoint")
    return ok, conds, notes


def gn_type1_hypotheses(
    spec: SpaceSpec, gamma: float, s: float, p: float, n: int
) -> HypothesisReport:
    """Interpolation of the level-set functional against ``|f|`` and the gradient."""
    ok, conds, notes = _gn_base(spec, gamma, n)
    conds.append(("s in (0, 1)", 0.0 < s < 1.0))
    conds.append(("p in [1, inf]", p >= 1.0))
    ok = ok and 0.0 < s < 1.0 and p >= 1.0
    if ok:
        return HypothesisReport(True, "interpolation", tuple(conds), tuple(notes))
    return HypothesisReport(False, None, tuple(conds), tuple(notes))


def gn_type2_hypotheses(
    spec: SpaceSpec, gamma: float, s0: float, q0: float, eta: float, n: int
) -> HypothesisReport:
    """Interpolation between two level-set functionals (no ``|f|`` factor)."""
    ok, conds, notes = _gn_base(spec, gamma, n)
    conds.append(("s0 in [0, 1)", 0.0 <= s0 < 1.0))
    conds.append(("q0 in (1, inf)", q0 > 1.0))
    conds.append(("eta in (0, 1)", 0.0 < eta < 1.0))
    ok = ok and 0.0 <= s0 < 1.0 and q0 > 1.0 and 0.0 < eta < 1.0
    if ok:
        return HypothesisReport(True, "interpolation", tuple(conds), tuple(notes))
    return HypothesisReport(False, None, tuple(conds), tuple(notes))
