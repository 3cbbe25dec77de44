"""Tensile specimen datasets: CSV ingestion, reversed-force augmentation,
group means and min-max scaling between physical and network units."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

CSV_HEADER = "layout,angle_deg,sigma_mpa,eps_pct"
CSV_HEADER_INPUTS = "layout,angle_deg"

DIMENSION_NAMES = ("layout", "angle_deg", "sigma_mpa", "eps_pct")


class DataError(ValueError):
    """Malformed dataset content or degenerate data."""


@dataclass(frozen=True)
class Specimen:
    """One tensile test record. Outputs are None for recall-input rows."""

    layout_code: int
    angle_deg: float
    sigma_m: float | None = None
    eps_m: float | None = None

    def __post_init__(self):
        if self.layout_code not in (1, 2):
            raise DataError(f"layout outside {{1,2}}: {self.layout_code!r}")
        if (self.sigma_m is None) != (self.eps_m is None):
            raise DataError("sigma_m and eps_m must be both present or both absent")
        if self.sigma_m is not None and (self.sigma_m <= 0 or self.eps_m <= 0):
            raise DataError(
                f"measured outputs must be positive: sigma={self.sigma_m}, eps={self.eps_m}"
            )

    @property
    def has_outputs(self) -> bool:
        return self.sigma_m is not None


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of specimens."""

    rows: tuple[Specimen, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def has_outputs(self) -> bool:
        return all(s.has_outputs for s in self.rows)

    def inputs(self) -> np.ndarray:
        """(N, 2) array of (layout_code, angle_deg)."""
        return np.array([[s.layout_code, s.angle_deg] for s in self.rows], dtype=float).reshape(-1, 2)

    def outputs(self) -> np.ndarray:
        """(N, 2) array of (sigma_m, eps_m); all rows must carry outputs."""
        if not self.has_outputs:
            raise DataError("dataset has rows without outputs")
        return np.array([[s.sigma_m, s.eps_m] for s in self.rows], dtype=float).reshape(-1, 2)


def _parse_float(token: str, lineno: int, col: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise DataError(f"line {lineno}: malformed number {token!r} in column {col}") from None


def parse_csv(text: str) -> Dataset:
    """Parse a dataset CSV. Lines starting with '#' are comments.

    The header must be ``layout,angle_deg,sigma_mpa,eps_pct`` for measured
    data or ``layout,angle_deg`` for recall-input files.
    """
    header = None
    want_outputs = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line
            if header == CSV_HEADER:
                want_outputs = True
            elif header == CSV_HEADER_INPUTS:
                want_outputs = False
            else:
                raise DataError(f"line {lineno}: unrecognized header {line!r}")
            continue
        parts = line.split(",")
        expected = 4 if want_outputs else 2
        if len(parts) != expected:
            raise DataError(
                f"line {lineno}: expected {expected} columns, got {len(parts)}"
            )
        layout_f = _parse_float(parts[0], lineno, "layout")
        if layout_f not in (1.0, 2.0):
            raise DataError(f"line {lineno}: layout outside {{1,2}}: {parts[0]!r}")
        angle = _parse_float(parts[1], lineno, "angle_deg")
        if want_outputs:
            sigma = _parse_float(parts[2], lineno, "sigma_mpa")
            eps = _parse_float(parts[3], lineno, "eps_pct")
            try:
                rows.append(Specimen(int(layout_f), angle, sigma, eps))
            except DataError as e:
                raise DataError(f"line {lineno}: {e}") from None
        else:
            rows.append(Specimen(int(layout_f), angle))
    if header is None:
        raise DataError("empty file: missing header")
    return Dataset(tuple(rows))


def serialize(d: Dataset) -> str:
    """Inverse of parse_csv; float fields use shortest round-trip repr."""
    with_outputs = d.has_outputs
    lines = [CSV_HEADER if with_outputs else CSV_HEADER_INPUTS]
    for s in d.rows:
        if with_outputs:
            lines.append(f"{s.layout_code},{s.angle_deg!r},{s.sigma_m!r},{s.eps_m!r}")
        else:
            lines.append(f"{s.layout_code},{s.angle_deg!r}")
    return "\n".join(lines) + "\n"


def augment_reversed(d: Dataset) -> Dataset:
    """Append a copy of every row with the tensile angle shifted by 180 degrees
    (reversed force direction) and unchanged outputs."""
    mirrored = tuple(replace(s, angle_deg=s.angle_deg + 180.0) for s in d.rows)
    return Dataset(d.rows + mirrored)


def group_means(d: Dataset) -> dict[tuple[int, float], tuple[float, float]]:
    """Arithmetic mean of (sigma_m, eps_m) per exact (layout, angle) group."""
    sums: dict[tuple[int, float], list[float]] = {}
    for s in d.rows:
        if not s.has_outputs:
            raise DataError("group_means requires outputs on every row")
        key = (s.layout_code, s.angle_deg)
        acc = sums.setdefault(key, [0.0, 0.0, 0])
        acc[0] += s.sigma_m
        acc[1] += s.eps_m
        acc[2] += 1
    return {k: (v[0] / v[2], v[1] / v[2]) for k, v in sums.items()}


@dataclass(frozen=True)
class Scaler:
    """Per-dimension min-max affine maps onto [-1, +1].

    Inputs are (layout, angle_deg); outputs are (sigma_mpa, eps_pct).
    Out-of-range values extrapolate linearly (no clamping).
    """

    x_min: np.ndarray
    x_max: np.ndarray
    y_min: np.ndarray
    y_max: np.ndarray

    def _fwd(self, v, lo, hi):
        v = np.asarray(v, dtype=float)
        return 2.0 * (v - lo) / (hi - lo) - 1.0

    def _inv(self, v, lo, hi):
        v = np.asarray(v, dtype=float)
        return (v + 1.0) / 2.0 * (hi - lo) + lo

    def scale_x(self, x):
        return self._fwd(x, self.x_min, self.x_max)

    def unscale_x(self, x):
        return self._inv(x, self.x_min, self.x_max)

    def scale_y(self, y):
        return self._fwd(y, self.y_min, self.y_max)

    def unscale_y(self, y):
        return self._inv(y, self.y_min, self.y_max)

    @property
    def y_half_range(self) -> np.ndarray:
        """Physical units per scaled unit for each output dimension."""
        return (self.y_max - self.y_min) / 2.0


def fit_scaler(d: Dataset) -> Scaler:
    """Fit min-max maps on a dataset with outputs; rejects constant dimensions."""
    if len(d) == 0:
        raise DataError("cannot fit scaler on empty dataset")
    x = d.inputs()
    y = d.outputs()
    cols = np.hstack([x, y])
    lo = cols.min(axis=0)
    hi = cols.max(axis=0)
    for name, a, b in zip(DIMENSION_NAMES, lo, hi):
        if not b > a:
            raise DataError(f"degenerate dimension {name!r}: min == max == {a}")
    return Scaler(x_min=lo[:2], x_max=hi[:2], y_min=lo[2:], y_max=hi[2:])
