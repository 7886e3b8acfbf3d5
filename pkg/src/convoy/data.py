"""Ingest of crossing histories, link covariates, and regional incident data."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

RESPONSE_COLUMN = "attack"
LABEL_COLUMN = "bridge"
INTERCEPT_COLUMN = "intercept"
CONDITIONING_COLUMN = "preceded_by_incident"


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RegionalDataset:
    """Region-wide incident records: one binary response per labeled row.

    Covariate columns are ordered as named in `columns`; the target link's
    own crossing history must never appear among the rows (caller's duty,
    row-to-link provenance is not ingested).
    """

    labels: tuple
    responses: np.ndarray
    covariates: np.ndarray
    columns: tuple
    intercept: bool = False

    def __post_init__(self):
        object.__setattr__(self, "responses", _frozen(self.responses))
        object.__setattr__(self, "covariates", _frozen(self.covariates))

    @property
    def row_count(self) -> int:
        return len(self.labels)

    @property
    def dimension(self) -> int:
        return self.covariates.shape[1]


def parse_regional_csv(text: str) -> RegionalDataset:
    """Parse the regional incident CSV (UTF-8, header row, "." decimals).

    The response is read from the column named "attack"; the first column
    holds the row label; remaining columns are covariates in header order.
    No intercept column is added here.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty regional CSV: no header row") from None
    header = [h.strip() for h in header]
    if RESPONSE_COLUMN not in header:
        raise ValueError(f"regional CSV header lacks a {RESPONSE_COLUMN!r} column")
    response_idx = header.index(RESPONSE_COLUMN)
    label_idx = 0
    cov_idx = [
        i for i in range(len(header)) if i not in (label_idx, response_idx)
    ]
    columns = tuple(header[i] for i in cov_idx)

    labels, ys, zs = [], [], []
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ValueError(
                f"regional CSV row {row_no}: expected {len(header)} fields, got {len(row)}"
            )
        labels.append(row[label_idx].strip())
        y_raw = row[response_idx].strip()
        if y_raw not in ("0", "1"):
            raise ValueError(
                f"regional CSV row {row_no}, column {RESPONSE_COLUMN!r}: "
                f"response must be 0 or 1, got {y_raw!r}"
            )
        ys.append(int(y_raw))
        z_row = []
        for i in cov_idx:
            try:
                z_row.append(float(row[i]))
            except ValueError:
                raise ValueError(
                    f"regional CSV row {row_no}, column {header[i]!r}: "
                    f"non-numeric covariate {row[i]!r}"
                ) from None
        zs.append(z_row)

    k = len(columns)
    return RegionalDataset(
        labels=tuple(labels),
        responses=np.array(ys, dtype=int),
        covariates=np.array(zs, dtype=float).reshape(len(labels), k),
        columns=columns,
    )


def serialize_regional_csv(data: RegionalDataset) -> str:
    """Inverse of parse_regional_csv for intercept-free datasets.

    An intercept column serializes like any other column; reparsing then
    yields intercept=False with an explicit ones column.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([LABEL_COLUMN, RESPONSE_COLUMN] + list(data.columns))
    for label, y, z in zip(data.labels, data.responses, data.covariates):
        writer.writerow([label, int(y)] + [repr(float(v)) for v in z])
    return out.getvalue()


def with_intercept(data: RegionalDataset) -> RegionalDataset:
    """Prepend a constant 1 covariate; refuses to apply twice."""
    if data.intercept:
        raise ValueError("intercept already present")
    ones = np.ones((data.row_count, 1))
    return RegionalDataset(
        labels=data.labels,
        responses=data.responses,
        covariates=np.hstack([ones, data.covariates]),
        columns=(INTERCEPT_COLUMN,) + data.columns,
        intercept=True,
    )


def expand_conditioning(data: RegionalDataset, preceded_by_incident) -> RegionalDataset:
    """Append the incident-on-a-preceding-link indicator as a covariate column."""
    ind = np.asarray(preceded_by_incident, dtype=float).ravel()
    if ind.shape[0] != data.row_count:
        raise ValueError(
            f"conditioning indicator has length {ind.shape[0]}, dataset has {data.row_count} rows"
        )
    if not np.isin(ind, (0.0, 1.0)).all():
        raise ValueError("conditioning indicator entries must be 0 or 1")
    return RegionalDataset(
        labels=data.labels,
        responses=data.responses,
        covariates=np.hstack([data.covariates, ind.reshape(-1, 1)]),
        columns=data.columns + (CONDITIONING_COLUMN,),
        intercept=data.intercept,
    )


def as_history(outcomes) -> np.ndarray:
    """Validate a crossing history: a 0/1 vector, oldest first, length >= 0."""
    arr = np.asarray(outcomes, dtype=float).ravel()
    if arr.size and not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError("crossing history entries must be 0 or 1")
    return _frozen(arr.astype(int))


def parse_link_profile(text: str) -> dict:
    """Parse a per-link profile document.

    Shape: {"link": "9", "history": [0,0,0,0],
            "covariates": {"park": 1, "old_city": 1, ...}}
    """
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("link profile must be a JSON object")
    for key in ("link", "history", "covariates"):
        if key not in doc:
            raise ValueError(f"link profile lacks the {key!r} field")
    if not isinstance(doc["covariates"], dict):
        raise ValueError("link profile covariates must be an object")
    return {
        "link": str(doc["link"]),
        "history": as_history(doc["history"]),
        "covariates": {str(k): float(v) for k, v in doc["covariates"].items()},
    }


def covariate_vector(covariates: dict, columns, intercept: bool = True) -> np.ndarray:
    """Order a covariate mapping to match dataset columns, intercept first.

    `columns` are the dataset's covariate names without the intercept.
    """
    missing = [c for c in columns if c not in covariates]
    if missing:
        raise ValueError(f"covariates missing values for {missing}")
    extra = [c for c in covariates if c not in columns]
    if extra:
        raise ValueError(f"covariates name unknown columns {extra}")
    vals = [float(covariates[c]) for c in columns]
    z = np.array(([1.0] if intercept else []) + vals)
    if not np.isfinite(z).all():
        raise ValueError("covariate values must be finite")
    return z
