"""Classifier models and the brute-force inference oracle.

A model is one discrete class variable plus discrete observations; each
observation may condition on earlier observations (the class is an
implicit parent of every observation).  Everything downstream — surface
extraction, separability, decision policies — is verified against the
exact enumeration oracle defined here.

Conventions fixed across the package:

* states are 0-based everywhere; ordinal encodings shift to 1..k only
  inside ordinal surface extraction;
* a full assignment maps to a flat index with observation 0 as the
  least-significant digit (for binary observations this is the vertex
  bitmask: observation ``i`` on bit ``i``);
* a parent configuration maps to a CPT row with the *last* listed parent
  as the least-significant digit (C-order raveling of the parent tuple).
"""

from __future__ import annotations

import graphlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZeroEvidenceError

PROB_SUM_TOL = 1e-12

# enumeration ops refuse state spaces larger than this
MAX_ENUMERATION = 1 << 20


@dataclass(frozen=True, eq=False)
class ObservationSpec:
    """One observation node: arity, conditioning parents, and its CPT.

    ``cpt`` has shape ``(class_count, n_parent_configs, arity)``; row
    ``cpt[c, g]`` is the distribution of this observation given class
    ``c`` and parent configuration ``g``.
    """

    arity: int
    parents: tuple[int, ...]
    cpt: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))
        cpt = np.asarray(self.cpt, dtype=np.float64)
        if cpt.ndim == 2:  # no parents: allow (classes, arity)
            cpt = cpt[:, np.newaxis, :]
        if cpt.ndim != 3:
            raise ValueError(f"cpt must be 3-dimensional, got shape {cpt.shape}")
        cpt.setflags(write=False)
        object.__setattr__(self, "cpt", cpt)


@dataclass(frozen=True, eq=False)
class ClassifierModel:
    """Class prior plus one :class:`ObservationSpec` per observation."""

    priors: np.ndarray
    observations: tuple[ObservationSpec, ...]

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=np.float64)
        priors.setflags(write=False)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "observations", tuple(self.observations))

    @property
    def class_count(self) -> int:
        return self.priors.shape[0]

    @property
    def n_observations(self) -> int:
        return len(self.observations)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(o.arity for o in self.observations)

    def assignment_count(self) -> int:
        return math.prod(self.arities)

    def is_binary(self) -> bool:
        return all(o.arity == 2 for o in self.observations)

    def has_parents(self) -> bool:
        return any(o.parents for o in self.observations)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_model`: never raises, only reports."""

    issues: list[str] = field(default_factory=list)
    surface_issues: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    @property
    def surface_safe(self) -> bool:
        return self.valid and not self.surface_issues


def parent_config_count(model: ClassifierModel, index: int) -> int:
    return math.prod(model.observations[p].arity for p in model.observations[index].parents)


def parent_config_index(model: ClassifierModel, index: int, assignment) -> int:
    """CPT row selected by ``assignment`` for observation ``index``."""
    cfg = 0
    for p in model.observations[index].parents:
        cfg = cfg * model.observations[p].arity + int(assignment[p])
    return cfg


def validate_model(model: ClassifierModel) -> ValidationReport:
    """Check every model invariant and report all violations found.

    Zero/one probability entries are legal but are flagged separately:
    log-space surface extraction needs strictly positive rows.
    """
    report = ValidationReport()
    issues = report.issues
    m = model.class_count
    n = model.n_observations

    if m < 2:
        issues.append(f"need at least 2 classes, got {m}")
    if model.priors.ndim != 1:
        issues.append("priors must be a vector")
        return report
    if np.any(model.priors < 0):
        issues.append("negative prior entry")
    if abs(float(model.priors.sum()) - 1.0) > PROB_SUM_TOL:
        issues.append(f"priors sum to {model.priors.sum()!r}, not 1")

    graph: dict[int, tuple[int, ...]] = {}
    for i, obs in enumerate(model.observations):
        if obs.arity < 2:
            issues.append(f"observation {i}: arity {obs.arity} < 2")
        for p in obs.parents:
            if not 0 <= p < n:
                issues.append(f"observation {i}: parent index {p} out of range")
            if p == i:
                issues.append(f"observation {i}: lists itself as a parent")
        if len(set(obs.parents)) != len(obs.parents):
            issues.append(f"observation {i}: duplicate parent")
        graph[i] = obs.parents

    if not issues:  # cycle check only meaningful on structurally sound graphs
        try:
            tuple(graphlib.TopologicalSorter(graph).static_order())
        except graphlib.CycleError:
            issues.append("observation parents contain a cycle")

    for i, obs in enumerate(model.observations):
        expected = (m, _config_count(model, obs), obs.arity)
        if obs.cpt.shape != expected:
            issues.append(
                f"observation {i}: cpt shape {obs.cpt.shape}, expected {expected}"
            )
            continue
        sums = obs.cpt.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > PROB_SUM_TOL)
        for c, g in bad:
            issues.append(
                f"observation {i}: row (class {c}, config {g}) sums to {sums[c, g]!r}"
            )
        if np.any(obs.cpt < 0):
            issues.append(f"observation {i}: negative probability entry")
        if np.any(obs.cpt <= 0) or np.any(obs.cpt >= 1):
            report.surface_issues.append(
                f"observation {i}: zero or one probability entry"
            )

    if np.any(model.priors <= 0) or np.any(model.priors >= 1):
        report.surface_issues.append("zero or one prior entry")
    return report


def _config_count(model: ClassifierModel, obs: ObservationSpec) -> int:
    total = 1
    for p in obs.parents:
        if 0 <= p < model.n_observations:
            total *= model.observations[p].arity
    return total


def _check_assignment(model: ClassifierModel, assignment) -> np.ndarray:
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (model.n_observations,):
        raise ValueError(
            f"assignment has shape {a.shape}, expected ({model.n_observations},)"
        )
    for j, obs in enumerate(model.observations):
        if not 0 <= a[j] < obs.arity:
            raise IndexError(f"observation {j}: state {a[j]} outside [0, {obs.arity})")
    return a


def joint_log_prob(model: ClassifierModel, class_index: int, assignment) -> float:
    """log P(class, assignment); ``-inf`` when any factor vanishes."""
    if not 0 <= class_index < model.class_count:
        raise IndexError(f"class index {class_index} outside [0, {model.class_count})")
    a = _check_assignment(model, assignment)
    p = float(model.priors[class_index])
    total = math.log(p) if p > 0 else -math.inf
    for j, obs in enumerate(model.observations):
        cfg = parent_config_index(model, j, a)
        q = float(obs.cpt[class_index, cfg, a[j]])
        total += math.log(q) if q > 0 else -math.inf
    return total


def posterior(model: ClassifierModel, assignment) -> np.ndarray:
    """Class distribution given the assignment, via Bayes' rule."""
    logs = np.array(
        [joint_log_prob(model, c, assignment) for c in range(model.class_count)]
    )
    top = logs.max()
    if top == -math.inf:
        raise AllZeroEvidenceError(
            f"assignment {list(np.asarray(assignment))} has probability 0 "
            "under every class"
        )
    probs = np.exp(logs - top)
    return probs / probs.sum()


def map_class(model: ClassifierModel, assignment) -> int:
    """Most probable class; ties break toward the lowest class index."""
    return int(np.argmax(posterior(model, assignment)))


def all_assignments(model: ClassifierModel) -> np.ndarray:
    """Every assignment as a row, ordered by flat index (obs 0 fastest)."""
    total = model.assignment_count()
    if total > MAX_ENUMERATION:
        raise ValueError(f"state space of size {total} is too large to enumerate")
    out = np.empty((total, model.n_observations), dtype=np.int64)
    idx = np.arange(total)
    stride = 1
    for j, obs in enumerate(model.observations):
        out[:, j] = (idx // stride) % obs.arity
        stride *= obs.arity
    return out


def assignment_index(model: ClassifierModel, assignment) -> int:
    a = _check_assignment(model, assignment)
    idx = 0
    stride = 1
    for j, obs in enumerate(model.observations):
        idx += int(a[j]) * stride
        stride *= obs.arity
    return idx


def joint_table(model: ClassifierModel) -> np.ndarray:
    """Exhaustive joint distribution, shape (classes, assignments).

    Plain probability products over the enumerated state space: this is
    the oracle the surface extractors are checked against, so it stays
    in probability space and never touches log-space weights.
    """
    grid = all_assignments(model)
    total = grid.shape[0]
    table = np.repeat(model.priors[:, np.newaxis], total, axis=1)
    for j, obs in enumerate(model.observations):
        cfg = np.zeros(total, dtype=np.int64)
        for p in obs.parents:
            cfg = cfg * model.observations[p].arity + grid[:, p]
        for c in range(model.class_count):
            table[c] *= obs.cpt[c, cfg, grid[:, j]]
    return table


def log_odds_table(model: ClassifierModel, class_a: int, class_b: int) -> np.ndarray:
    """Oracle log posterior odds of ``class_a`` over ``class_b`` at every
    assignment.  Entries may be ``±inf``; where both classes give zero
    probability the odds are reported as 0 (a tie)."""
    table = joint_table(model)
    ja, jb = table[class_a], table[class_b]
    with np.errstate(divide="ignore"):
        la = np.where(ja > 0, np.log(np.where(ja > 0, ja, 1.0)), -np.inf)
        lb = np.where(jb > 0, np.log(np.where(jb > 0, jb, 1.0)), -np.inf)
    odds = np.where((ja == 0) & (jb == 0), 0.0, la - lb)
    return odds


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

_MODEL_KEYS = {"class_count", "priors", "observations"}
_OBS_KEYS = {"arity", "parents", "cpt"}


def model_to_dict(model: ClassifierModel) -> dict:
    return {
        "class_count": model.class_count,
        "priors": [float(p) for p in model.priors],
        "observations": [
            {
                "arity": obs.arity,
                "parents": list(obs.parents),
                "cpt": obs.cpt.tolist(),
            }
            for obs in model.observations
        ],
    }


def model_from_dict(data: dict) -> ClassifierModel:
    if not isinstance(data, dict):
        raise ValueError("model document must be a JSON object")
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ValueError(f"unknown model keys: {sorted(unknown)}")
    missing = _MODEL_KEYS - set(data)
    if missing:
        raise ValueError(f"missing model keys: {sorted(missing)}")
    priors = np.asarray(data["priors"], dtype=np.float64)
    if priors.ndim != 1:
        raise ValueError("priors must be a flat array")
    if int(data["class_count"]) != priors.shape[0]:
        raise ValueError(
            f"class_count {data['class_count']} does not match "
            f"{priors.shape[0]} prior entries"
        )
    observations = []
    for i, entry in enumerate(data["observations"]):
        if not isinstance(entry, dict):
            raise ValueError(f"observation {i} must be an object")
        unknown = set(entry) - _OBS_KEYS
        if unknown:
            raise ValueError(f"observation {i}: unknown keys {sorted(unknown)}")
        missing = _OBS_KEYS - set(entry)
        if missing:
            raise ValueError(f"observation {i}: missing keys {sorted(missing)}")
        cpt = np.asarray(entry["cpt"], dtype=np.float64)
        if cpt.ndim != 3:
            raise ValueError(f"observation {i}: cpt must be [class][config][state]")
        spec = ObservationSpec(
            arity=int(entry["arity"]), parents=tuple(entry["parents"]), cpt=cpt
        )
        if spec.cpt.shape[2] != spec.arity:
            raise ValueError(
                f"observation {i}: cpt rows have length {spec.cpt.shape[2]}, "
                f"arity is {spec.arity}"
            )
        observations.append(spec)
    return ClassifierModel(priors=priors, observations=tuple(observations))


def load_model(path) -> ClassifierModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_model(model: ClassifierModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
