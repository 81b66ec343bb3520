"""Exact decision surfaces between a pair of classes.

Every extractor returns a surface whose value at an assignment equals
the log posterior odds of class ``a`` over class ``b``, so the zero set
of the surface is the decision boundary.  Four forms are supported:

* ``binary_hyperplane``   — parent-free binary models, weights on cube
  coordinates;
* ``ordinal_polynomial``  — parent-free m-ary models with states read as
  integers 1..k, one univariate polynomial per observation;
* ``simplex_hyperplane``  — parent-free m-ary models one-hot encoded,
  linear again with one weight per (observation, state);
* ``dependency_polynomial`` — binary models with observation-observation
  edges, a sparse multilinear polynomial whose degree is bounded by
  1 + the largest parent set.

Extraction works in log space, so it demands strictly positive CPT and
prior entries; models violating that raise :class:`SurfaceUnsafeError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dichotomy import Dichotomy
from .errors import HasParentsError, NotBinaryError, SurfaceUnsafeError
from .model import ClassifierModel, log_odds_table

MAX_EXPAND_DIM = 20


@dataclass(frozen=True, eq=False)
class LinearSurface:
    """Affine decision function ``bias + weights @ x``.

    ``space`` is ``"cube"`` when ``x`` is the raw 0/1 (or relaxed real)
    assignment vector and ``"simplex"`` when ``x`` is the one-hot
    encoding of an m-ary assignment; simplex surfaces carry the arities
    needed to build that encoding.
    """

    bias: float
    weights: np.ndarray
    space: str = "cube"
    arities: tuple[int, ...] | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.space not in ("cube", "simplex"):
            raise ValueError(f"unknown coordinate space {self.space!r}")
        if self.space == "simplex":
            if self.arities is None:
                raise ValueError("simplex surfaces need per-observation arities")
            object.__setattr__(self, "arities", tuple(int(k) for k in self.arities))
            if sum(self.arities) != w.shape[0]:
                raise ValueError(
                    f"{w.shape[0]} weights for arities {self.arities} "
                    f"(need {sum(self.arities)})"
                )


@dataclass(frozen=True, eq=False)
class OrdinalPolySurface:
    """Sum of univariate polynomials over ordinal values 1..k_i.

    ``coeffs[i][j]`` multiplies ``value_i ** j`` where ``value_i`` is the
    1-based ordinal reading of observation ``i``'s state; ``bias`` is the
    shared constant (the log prior ratio).
    """

    bias: float
    coeffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for c in self.coeffs:
            arr = np.asarray(c, dtype=np.float64)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "coeffs", tuple(frozen))

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(c.shape[0] for c in self.coeffs)


@dataclass(frozen=True)
class MultilinearSurface:
    """Sparse multilinear polynomial: subset bitmask -> coefficient.

    Bit ``i`` of a key stands for observation ``i``; evaluation at a 0/1
    vertex sums the coefficients of the subsets it covers.
    """

    n: int
    coeffs: dict[int, float]

    def coefficient(self, mask: int) -> float:
        return self.coeffs.get(mask, 0.0)

    @property
    def degree(self) -> int:
        live = [m.bit_count() for m, c in self.coeffs.items() if c != 0.0]
        return max(live, default=0)


def _require_parent_free(model: ClassifierModel) -> None:
    if model.has_parents():
        raise HasParentsError("model has observation-observation edges")


def _require_binary(model: ClassifierModel) -> None:
    if not model.is_binary():
        raise NotBinaryError(f"observation arities {model.arities} are not all 2")


def _require_surface_safe(model: ClassifierModel) -> None:
    if np.any(model.priors <= 0):
        raise SurfaceUnsafeError("a prior is zero; log-space extraction undefined")
    for i, obs in enumerate(model.observations):
        if np.any(obs.cpt <= 0):
            raise SurfaceUnsafeError(
                f"observation {i} has a zero probability entry; "
                "log-space extraction undefined"
            )


def _check_pair(model: ClassifierModel, a: int, b: int) -> None:
    for c in (a, b):
        if not 0 <= c < model.class_count:
            raise IndexError(f"class index {c} outside [0, {model.class_count})")
    if a == b:
        raise ValueError("need two distinct classes")


def linear_class_scores(model: ClassifierModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-class affine scores for a parent-free binary model.

    Returns ``(biases, weights)`` with shapes (m,) and (m, n); class c's
    log joint at vertex v is ``biases[c] + weights[c] @ v`` up to the
    shared evidence term, so the argmax over classes is the MAP class.
    """
    _require_binary(model)
    _require_parent_free(model)
    _require_surface_safe(model)
    m, n = model.class_count, model.n_observations
    biases = np.log(model.priors).copy()
    weights = np.empty((m, n))
    for j, obs in enumerate(model.observations):
        p0 = obs.cpt[:, 0, 0]
        p1 = obs.cpt[:, 0, 1]
        biases += np.log(p0)
        weights[:, j] = np.log(p1) - np.log(p0)
    return biases, weights


def binary_hyperplane(model: ClassifierModel, a: int, b: int) -> LinearSurface:
    """Hyperplane whose value at each cube vertex is the log odds a:b."""
    _check_pair(model, a, b)
    biases, weights = linear_class_scores(model)
    return LinearSurface(bias=float(biases[a] - biases[b]), weights=weights[a] - weights[b])


def ordinal_polynomial(model: ClassifierModel, a: int, b: int) -> OrdinalPolySurface:
    """Per-observation polynomial interpolation of the log likelihood
    ratios at the ordinal points 1..k."""
    _check_pair(model, a, b)
    _require_parent_free(model)
    _require_surface_safe(model)
    coeffs = []
    for obs in model.observations:
        k = obs.arity
        points = np.arange(1, k + 1, dtype=np.float64)
        ratios = np.log(obs.cpt[a, 0, :]) - np.log(obs.cpt[b, 0, :])
        vander = np.vander(points, increasing=True)
        coeffs.append(np.linalg.solve(vander, ratios))
    bias = float(np.log(model.priors[a]) - np.log(model.priors[b]))
    return OrdinalPolySurface(bias=bias, coeffs=tuple(coeffs))


def simplex_hyperplane(model: ClassifierModel, a: int, b: int) -> LinearSurface:
    """One-hot linear surface: a log likelihood ratio per (obs, state)."""
    _check_pair(model, a, b)
    _require_parent_free(model)
    _require_surface_safe(model)
    parts = [
        np.log(obs.cpt[a, 0, :]) - np.log(obs.cpt[b, 0, :])
        for obs in model.observations
    ]
    bias = float(np.log(model.priors[a]) - np.log(model.priors[b]))
    return LinearSurface(
        bias=bias,
        weights=np.concatenate(parts) if parts else np.zeros(0),
        space="simplex",
        arities=model.arities,
    )


def _indicator_product(local_vertex: tuple[int, ...], global_vars: tuple[int, ...]) -> dict[int, float]:
    """Expand the vertex-indicator product into subset coefficients.

    The factor for variable g is ``Y_g`` when the vertex bit is 1 and
    ``1 - Y_g`` otherwise; the product is 1 exactly at that vertex.
    """
    poly = {0: 1.0}
    for bit_value, g in zip(local_vertex, global_vars):
        var_bit = 1 << g
        new: dict[int, float] = {}
        for mask, c in poly.items():
            if bit_value:
                new[mask | var_bit] = new.get(mask | var_bit, 0.0) + c
            else:
                new[mask] = new.get(mask, 0.0) + c
                new[mask | var_bit] = new.get(mask | var_bit, 0.0) - c
        poly = new
    return poly


def _poly_accumulate(dst: dict[int, float], src: dict[int, float], scale: float) -> None:
    for mask, c in src.items():
        dst[mask] = dst.get(mask, 0.0) + scale * c


def _class_log_polynomial(model: ClassifierModel, c: int) -> dict[int, float]:
    """Multilinear expansion of the log joint for one class.

    Each conditional table contributes its reference log probability
    (observation 0 given all-zero parents) plus one weighted indicator
    product per configuration of (observation, parents).
    """
    poly: dict[int, float] = {0: float(np.log(model.priors[c]))}
    for k, obs in enumerate(model.observations):
        local_vars = (k,) + obs.parents
        q = len(local_vars)
        ref = float(np.log(obs.cpt[c, 0, 0]))
        poly[0] = poly.get(0, 0.0) + ref
        for code in range(1 << q):
            vertex = tuple((code >> t) & 1 for t in range(q))
            cfg = 0
            for bit in vertex[1:]:
                cfg = cfg * 2 + bit
            w = float(np.log(obs.cpt[c, cfg, vertex[0]])) - ref
            if w == 0.0:
                continue
            _poly_accumulate(poly, _indicator_product(vertex, local_vars), w)
    return poly


def dependency_polynomial(model: ClassifierModel, a: int, b: int) -> MultilinearSurface:
    """Multilinear decision polynomial for binary models with parents.

    Degree never exceeds 1 + the largest parent set: every term involves
    one observation and a subset of its own parents.
    """
    _check_pair(model, a, b)
    _require_binary(model)
    _require_surface_safe(model)
    diff = _class_log_polynomial(model, a)
    for mask, c in _class_log_polynomial(model, b).items():
        diff[mask] = diff.get(mask, 0.0) - c
    cleaned = {mask: c for mask, c in diff.items() if c != 0.0}
    return MultilinearSurface(n=model.n_observations, coeffs=cleaned)


def multilinear_expand(values, n: int | None = None) -> MultilinearSurface:
    """Unique multilinear interpolant of a complete vertex-value map.

    ``values`` is either a flat sequence of length 2^n (index = vertex
    bitmask) or a dict keyed by vertex bitmask covering every vertex.
    """
    if isinstance(values, dict):
        if n is None:
            if not values:
                raise ValueError("empty value map")
            n = max(int(v).bit_length() for v in values)
            n = max(n, 1)
        expected = 1 << n
        if set(values) != set(range(expected)):
            raise ValueError(
                f"value map must cover all {expected} vertices of the {n}-cube"
            )
        flat = np.array([float(values[v]) for v in range(expected)])
    else:
        flat = np.asarray(values, dtype=np.float64).copy()
        if flat.ndim != 1 or flat.shape[0] < 2 or flat.shape[0] & (flat.shape[0] - 1):
            raise ValueError(f"need 2^n values, got {flat.shape}")
        inferred = flat.shape[0].bit_length() - 1
        if n is not None and n != inferred:
            raise ValueError(f"{flat.shape[0]} values but n={n}")
        n = inferred
    if n > MAX_EXPAND_DIM:
        raise ValueError(f"n={n} beyond the expansion cap {MAX_EXPAND_DIM}")
    kernels.mobius_transform(flat)
    coeffs = {int(mask): float(c) for mask, c in enumerate(flat) if c != 0.0}
    return MultilinearSurface(n=n, coeffs=coeffs)


def vertex_values(surface: MultilinearSurface) -> np.ndarray:
    """Evaluate a multilinear surface at every vertex (inverse transform)."""
    flat = np.zeros(1 << surface.n)
    for mask, c in surface.coeffs.items():
        flat[mask] = c
    kernels.zeta_transform(flat)
    return flat


def _one_hot(assignment, arities: tuple[int, ...]) -> np.ndarray:
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (len(arities),):
        raise ValueError(f"assignment shape {a.shape} does not match {len(arities)} observations")
    out = np.zeros(sum(arities))
    offset = 0
    for j, k in enumerate(arities):
        if not 0 <= a[j] < k:
            raise ValueError(f"observation {j}: state {a[j]} outside [0, {k})")
        out[offset + a[j]] = 1.0
        offset += k
    return out


def eval_surface(surface, assignment) -> float:
    """Value of any surface type at an assignment.

    Cube-space linear and multilinear surfaces also accept relaxed real
    coordinates; ordinal and simplex surfaces take state indices.
    """
    if isinstance(surface, LinearSurface):
        if surface.space == "simplex":
            x = _one_hot(assignment, surface.arities)
        else:
            x = np.asarray(assignment, dtype=np.float64)
            if x.shape != surface.weights.shape:
                raise ValueError(
                    f"assignment shape {x.shape} does not match "
                    f"{surface.weights.shape[0]} weights"
                )
        return float(surface.bias + surface.weights @ x)
    if isinstance(surface, OrdinalPolySurface):
        a = np.asarray(assignment, dtype=np.int64)
        if a.shape != (len(surface.coeffs),):
            raise ValueError(
                f"assignment shape {a.shape} does not match "
                f"{len(surface.coeffs)} observations"
            )
        total = surface.bias
        for j, c in enumerate(surface.coeffs):
            if not 0 <= a[j] < c.shape[0]:
                raise ValueError(f"observation {j}: state {a[j]} outside [0, {c.shape[0]})")
            total += float(np.polynomial.polynomial.polyval(float(a[j] + 1), c))
        return float(total)
    if isinstance(surface, MultilinearSurface):
        x = np.asarray(assignment, dtype=np.float64)
        if x.shape != (surface.n,):
            raise ValueError(f"assignment shape {x.shape} does not match n={surface.n}")
        total = 0.0
        for mask, c in surface.coeffs.items():
            term = c
            rest = mask
            while rest:
                i = (rest & -rest).bit_length() - 1
                term *= x[i]
                rest &= rest - 1
            total += term
        return float(total)
    raise TypeError(f"not a surface: {type(surface).__name__}")


def induced_dichotomy(model: ClassifierModel, a: int, b: int) -> Dichotomy:
    """Vertices where class ``a`` is at least as probable as class ``b``.

    Computed from the enumeration oracle, never from an extracted
    surface; ties (within 1e-12 log odds) side with ``a``.
    """
    _check_pair(model, a, b)
    _require_binary(model)
    odds = log_odds_table(model, a, b)
    mask = 0
    for v, value in enumerate(odds):
        if value >= -1e-12:
            mask |= 1 << v
    return Dichotomy(n=model.n_observations, mask=mask)


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------


def surface_to_dict(surface) -> dict:
    """Wire form: kind, space, bias, terms.

    Terms depend on the kind: flat weights for cube-linear, nested
    per-observation weight lists for simplex-linear and ordinal, and
    ``{"subset": [...], "coeff": ...}`` rows (1-based indices, sorted by
    subset bitmask) for multilinear.
    """
    if isinstance(surface, LinearSurface):
        if surface.space == "simplex":
            terms = []
            offset = 0
            for k in surface.arities:
                terms.append([float(w) for w in surface.weights[offset : offset + k]])
                offset += k
        else:
            terms = [float(w) for w in surface.weights]
        return {
            "kind": "linear",
            "space": surface.space,
            "bias": float(surface.bias),
            "terms": terms,
        }
    if isinstance(surface, OrdinalPolySurface):
        return {
            "kind": "ordinal",
            "space": "cube",
            "bias": float(surface.bias),
            "terms": [[float(c) for c in row] for row in surface.coeffs],
        }
    if isinstance(surface, MultilinearSurface):
        terms = []
        for mask in sorted(surface.coeffs):
            if mask == 0:
                continue
            subset = [i + 1 for i in range(surface.n) if (mask >> i) & 1]
            terms.append({"subset": subset, "coeff": float(surface.coeffs[mask])})
        return {
            "kind": "multilinear",
            "space": "cube",
            "bias": float(surface.coefficient(0)),
            "terms": terms,
        }
    raise TypeError(f"not a surface: {type(surface).__name__}")


def sign_agreement_report(model: ClassifierModel, surface, a: int, b: int, tie_tol: float = 1e-9) -> dict:
    """Exhaustively compare a surface against the oracle log odds.

    Returns max |surface - odds| over all assignments plus the count of
    near-tie assignments (|odds| <= ``tie_tol``) excluded from the sign
    comparison.
    """
    from .model import all_assignments  # local to keep module load light

    odds = log_odds_table(model, a, b)
    grid = all_assignments(model)
    max_residual = 0.0
    near_ties = 0
    sign_ok = True
    for idx in range(grid.shape[0]):
        value = eval_surface(surface, grid[idx])
        max_residual = max(max_residual, abs(value - odds[idx]))
        if abs(odds[idx]) <= tie_tol:
            near_ties += 1
            continue
        if math.copysign(1.0, value) != math.copysign(1.0, odds[idx]):
            sign_ok = False
    return {
        "pass": bool(sign_ok and max_residual <= tie_tol),
        "max_residual": float(max_residual),
        "near_ties": near_ties,
        "checked": int(grid.shape[0]),
    }
