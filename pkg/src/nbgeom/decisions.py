"""Single-decision influence diagrams over a classifier model.

The shape is fixed: every observation is seen, then one decision is
taken, and the value depends on the decision and the true class only.
A policy therefore maps each full assignment to a decision, and the
optimal policy maximizes posterior expected value pointwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dichotomy import Dichotomy
from .errors import NotBinaryError
from .model import (
    ClassifierModel,
    ObservationSpec,
    all_assignments,
    joint_table,
    model_from_dict,
    model_to_dict,
)


@dataclass(frozen=True, eq=False)
class InfluenceDiagram:
    """Classifier model plus a decision node and its value table.

    ``value[d, c]`` is the payoff of decision ``d`` when the class is
    ``c``; labels are cosmetic and default to stringified indices.
    """

    model: ClassifierModel
    decision_arity: int
    value: np.ndarray
    decision_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        value = np.asarray(self.value, dtype=np.float64)
        if value.shape != (self.decision_arity, self.model.class_count):
            raise ValueError(
                f"value table shape {value.shape}, expected "
                f"({self.decision_arity}, {self.model.class_count})"
            )
        if not np.all(np.isfinite(value)):
            raise ValueError("value table entries must be finite")
        value.setflags(write=False)
        object.__setattr__(self, "value", value)
        if self.decision_labels is not None:
            labels = tuple(str(s) for s in self.decision_labels)
            if len(labels) != self.decision_arity:
                raise ValueError("one label per decision alternative required")
            object.__setattr__(self, "decision_labels", labels)

    def label(self, decision: int) -> str:
        if self.decision_labels is not None:
            return self.decision_labels[decision]
        return str(decision)


@dataclass(frozen=True, eq=False)
class Policy:
    """A decision per assignment, indexed like the model's flat order.

    ``zero_evidence`` lists assignment indices that are impossible under
    every class; they default to decision 0 and are flagged rather than
    dropped so the policy stays total.
    """

    decisions: np.ndarray
    zero_evidence: frozenset[int] = frozenset()

    def __post_init__(self):
        d = np.asarray(self.decisions, dtype=np.int64)
        d.setflags(write=False)
        object.__setattr__(self, "decisions", d)
        object.__setattr__(self, "zero_evidence", frozenset(self.zero_evidence))


def optimal_policy(diagram: InfluenceDiagram) -> Policy:
    """Pointwise expected-value maximizer; ties go to the lowest decision."""
    joint = joint_table(diagram.model)
    evidence = joint.sum(axis=0)
    utilities = diagram.value @ joint  # evidence scaling cannot move the argmax
    decisions = np.argmax(utilities, axis=0).astype(np.int64)
    dead = np.flatnonzero(evidence == 0.0)
    decisions[dead] = 0
    return Policy(decisions=decisions, zero_evidence=frozenset(int(i) for i in dead))


def expected_value(diagram: InfluenceDiagram, policy: Policy) -> float:
    """Expected payoff of following ``policy``: sum over assignments and
    classes of P(class, assignment) * value(policy(assignment), class)."""
    joint = joint_table(diagram.model)
    total = joint.shape[1]
    if policy.decisions.shape != (total,):
        raise ValueError(
            f"policy covers {policy.decisions.shape[0]} assignments, model has {total}"
        )
    chosen = diagram.value[policy.decisions]  # (assignments, classes)
    return float(np.sum(chosen * joint.T))


def policy_as_dichotomy(diagram: InfluenceDiagram, policy: Policy) -> Dichotomy:
    """Encode a binary-decision policy over binary observations as the
    set of vertices mapped to decision 0."""
    if diagram.decision_arity != 2:
        raise NotBinaryError("dichotomy encoding needs exactly 2 decisions")
    if not diagram.model.is_binary():
        raise NotBinaryError("dichotomy encoding needs all-binary observations")
    mask = 0
    for v, d in enumerate(policy.decisions):
        if d == 0:
            mask |= 1 << v
    return Dichotomy(n=diagram.model.n_observations, mask=mask)


def xor_example() -> InfluenceDiagram:
    """Four equiprobable classes, two deterministic binary observations,
    and a payoff that rewards decision "X" exactly when the observations
    disagree — the classic demonstration that an optimal policy need not
    be linearly separable."""
    o1 = ObservationSpec(
        arity=2,
        parents=(),
        cpt=[[[0.0, 1.0]], [[0.0, 1.0]], [[1.0, 0.0]], [[1.0, 0.0]]],
    )
    o2 = ObservationSpec(
        arity=2,
        parents=(),
        cpt=[[[0.0, 1.0]], [[1.0, 0.0]], [[0.0, 1.0]], [[1.0, 0.0]]],
    )
    model = ClassifierModel(priors=[0.25, 0.25, 0.25, 0.25], observations=(o1, o2))
    value = [[0.0, 1.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]]
    return InfluenceDiagram(
        model=model, decision_arity=2, value=value, decision_labels=("X", "not-X")
    )


def policy_rows(diagram: InfluenceDiagram, policy: Policy) -> list[dict]:
    """Human/JSON-friendly listing: one row per assignment in flat order."""
    grid = all_assignments(diagram.model)
    rows = []
    for idx in range(grid.shape[0]):
        d = int(policy.decisions[idx])
        rows.append(
            {
                "assignment": [int(s) for s in grid[idx]],
                "decision": d,
                "label": diagram.label(d),
                "zero_evidence": idx in policy.zero_evidence,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# JSON wire format: the model keys plus decision_arity and value
# ---------------------------------------------------------------------------


def diagram_to_dict(diagram: InfluenceDiagram) -> dict:
    data = model_to_dict(diagram.model)
    data["decision_arity"] = diagram.decision_arity
    data["value"] = [[float(v) for v in row] for row in diagram.value]
    if diagram.decision_labels is not None:
        data["decision_labels"] = list(diagram.decision_labels)
    return data


def diagram_from_dict(data: dict) -> InfluenceDiagram:
    if not isinstance(data, dict):
        raise ValueError("diagram document must be a JSON object")
    rest = dict(data)
    try:
        arity = int(rest.pop("decision_arity"))
        value = rest.pop("value")
    except KeyError as missing:
        raise ValueError(f"diagram is missing key {missing}") from None
    labels = rest.pop("decision_labels", None)
    model = model_from_dict(rest)
    return InfluenceDiagram(
        model=model,
        decision_arity=arity,
        value=np.asarray(value, dtype=np.float64),
        decision_labels=tuple(labels) if labels is not None else None,
    )


def load_diagram(path) -> InfluenceDiagram:
    with open(path, "r", encoding="utf-8") as fh:
        return diagram_from_dict(json.load(fh))
