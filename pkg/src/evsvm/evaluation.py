"""End-to-end evaluation: decide every pattern and tally a confusion matrix.

Report columns are the learned classes, then every union that occurred
(ordered by cardinality, then mask), then ``reject`` for rules that can
reject.  Rows are the true labels, learned classes first.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .belief import Frame, popcount
from .decision import (DEFAULT_R, ONETWO, REJECTED, TWOONE, Decision, build_appriou_weights,
                       decide_appriou, decide_maxbel_reject, decide_pignistic, decide_process)
from .multiclass import EvidentialModel, argmax_values, fuse_values, vote_values

RULES = ("pignistic", "maxbel-reject", "appriou", "process-12", "process-21", "vote", "argmax")
REJECTING_RULES = ("maxbel-reject", "process-12", "process-21")


@dataclass(frozen=True)
class RunConfig:
    rule: str = "process-12"
    r: float = DEFAULT_R

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}, got {self.rule!r}")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must be in [0, 1], got {self.r!r}")


def decide_values(values, model: EvidentialModel, cfg: RunConfig, weights=None):
    """Decision and conflict for one row of decision values.

    Conflict is NaN for the vote/argmax baselines, which skip fusion.
    """
    if cfg.rule == "vote":
        return Decision.of_class(vote_values(values, model)), float("nan")
    if cfg.rule == "argmax":
        return Decision.of_class(argmax_values(values, model)), float("nan")
    m, conflict = fuse_values(values, model)
    if weights is None:
        weights = build_appriou_weights(model.frame, cfg.r)
    if cfg.rule == "pignistic":
        d = Decision.of_class(decide_pignistic(m))
    elif cfg.rule == "maxbel-reject":
        d = decide_maxbel_reject(m)
    elif cfg.rule == "appriou":
        d = decide_appriou(m, weights)
    else:
        d = decide_process(m, weights, ONETWO if cfg.rule == "process-12" else TWOONE)
    return d, conflict


def predict(model: EvidentialModel, X, cfg: RunConfig):
    """Decisions and conflicts for every row of ``X``."""
    values = model.decision_values(X)
    weights = build_appriou_weights(model.frame, cfg.r)
    decisions, conflicts = [], np.empty(values.shape[0])
    for k, row in enumerate(values):
        d, conflicts[k] = decide_values(row, model, cfg, weights)
        decisions.append(d)
    return decisions, conflicts


def _column_key(d: Decision):
    return (1, 0, 0) if d.kind == REJECTED else (0, popcount(d.mask), d.mask)


@dataclass
class EvalReport:
    frame: Frame
    rule: str
    r: float
    rows: List[str]
    columns: List[Decision]
    counts: np.ndarray
    mean_conflict: float
    per_pattern: List[Decision] = field(default_factory=list, repr=False)

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def percentages(self) -> np.ndarray:
        tot = self.row_totals[:, None]
        return np.divide(100.0 * self.counts, tot, out=np.zeros(self.counts.shape), where=tot > 0)

    @property
    def column_labels(self) -> List[str]:
        return [d.label(self.frame) for d in self.columns]

    def cell(self, row: str, column: str) -> float:
        """Row percentage for a true label and a column label."""
        i = self.rows.index(row)
        j = self.column_labels.index(column)
        return float(self.percentages[i, j])

    def reject_rate(self, row: str) -> float:
        if "reject" not in self.column_labels:
            return 0.0
        return self.cell(row, "reject")

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["true", *self.column_labels, "count"])
        for lab, pct, n in zip(self.rows, self.percentages, self.row_totals):
            w.writerow([lab, *(f"{v:.2f}" for v in pct), int(n)])
        return out.getvalue()

    def to_text(self) -> str:
        labels = ["%"] + self.column_labels + ["n"]
        body = [[lab, *(f"{v:.2f}" for v in pct), str(int(n))]
                for lab, pct, n in zip(self.rows, self.percentages, self.row_totals)]
        widths = [max(len(r[k]) for r in [labels] + body) for k in range(len(labels))]
        lines = [f"rule: {self.rule}" + (f"  r = {self.r:g}" if self.rule in
                                          ("appriou", "process-12", "process-21") else "")]
        if not np.isnan(self.mean_conflict):
            lines.append(f"mean conflict: {self.mean_conflict:.4f}")
        fmt = lambda r: "  ".join(c.rjust(wd) for c, wd in zip(r, widths))
        lines.append(fmt(labels))
        lines += [fmt(r) for r in body]
        return "\n".join(lines) + "\n"


def evaluate(model: EvidentialModel, features, labels, cfg: RunConfig) -> EvalReport:
    """Confusion matrix of true labels against decisions, as row percentages."""
    labels = np.asarray(labels).astype(str)
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[0] != labels.size:
        raise ValueError(f"{features.shape[0]} samples but {labels.size} labels")
    decisions, conflicts = predict(model, features, cfg)
    frame = model.frame
    cols = {Decision.of_class(i) for i in range(frame.size)}
    cols |= set(decisions)
    if cfg.rule in REJECTING_RULES:
        cols.add(Decision.rejected())
    columns = sorted(cols, key=_column_key)
    col_index = {d: k for k, d in enumerate(columns)}
    present = dict.fromkeys(labels.tolist())
    rows = [lab for lab in frame.labels if lab in present]
    rows += sorted(lab for lab in present if lab not in frame)
    row_index = {lab: k for k, lab in enumerate(rows)}
    counts = np.zeros((len(rows), len(columns)), dtype=int)
    for lab, d in zip(labels, decisions):
        counts[row_index[lab], col_index[d]] += 1
    mean_conflict = float(np.mean(conflicts)) if conflicts.size else float("nan")
    return EvalReport(frame, cfg.rule, cfg.r, rows, columns, counts, mean_conflict, decisions)
