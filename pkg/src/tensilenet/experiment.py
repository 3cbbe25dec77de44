"""Study reproduction: physical-unit MSE, validation report, hidden-size
search, recall phase and the recall group analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import network, trainer
from .data import DataError, Dataset, Scaler
from .network import MlpParams
from .trainer import LmConfig

# Recall fixture: the 36 (layout, angle) inputs, in report row order
# (1-based row ids below refer to positions in this list).
RECALL_FIXTURE_INPUTS: tuple[tuple[int, float], ...] = (
    (1, -10), (1, 0), (1, 1), (1, 10), (1, 22), (1, 35), (1, 45), (1, 46),
    (1, 55), (1, 67), (1, 80), (1, 90), (1, 91), (1, 100), (1, 112), (1, 170),
    (1, 181), (1, 202), (1, 225), (2, -10), (2, 0), (2, 1), (2, 10), (2, 22),
    (2, 35), (2, 45), (2, 46), (2, 55), (2, 67), (2, 80), (2, 90), (2, 91),
    (2, 100), (2, 112), (2, 260), (2, 290),
)

# Reversed-force pairs: same layout, angles differing by 180.
G1_PAIRS: tuple[tuple[int, int], ...] = ((1, 16), (3, 17), (5, 18), (30, 35))
# Inputs coinciding with training inputs.
G2_INPUTS: frozenset[tuple[int, float]] = frozenset(
    {(1, 0), (1, 45), (1, 90), (2, 0), (2, 45), (2, 90)}
)
# Symmetric-angle pairs: angles mirrored about a training angle.
G3_PAIRS: tuple[tuple[int, int], ...] = (
    (1, 4), (6, 9), (11, 14), (20, 23), (25, 28), (30, 33)
)

_G1_ROWS = frozenset(i for pair in G1_PAIRS for i in pair)
_G3_ROWS = frozenset(i for pair in G3_PAIRS for i in pair)


@dataclass(frozen=True)
class ValidationRow:
    layout_code: int
    angle_deg: float
    sigma_actual: float
    eps_actual: float
    sigma_sim: float
    eps_sim: float
    d_sigma: float
    d_eps: float
    d_sigma_rel: float  # percent of actual
    d_eps_rel: float

    @classmethod
    def build(cls, layout, angle, sigma_a, eps_a, sigma_s, eps_s):
        d_sigma = sigma_a - sigma_s
        d_eps = eps_a - eps_s
        return cls(layout, angle, sigma_a, eps_a, sigma_s, eps_s,
                   d_sigma, d_eps,
                   100.0 * d_sigma / sigma_a, 100.0 * d_eps / eps_a)


@dataclass(frozen=True)
class RecallRow:
    layout_code: int
    angle_deg: float
    sigma_sim: float
    eps_sim: float
    group: str  # G1 | G2 | G3 | G4


@dataclass(frozen=True)
class ScanRecord:
    h: int
    train_mse: float
    seed: int


@dataclass(frozen=True)
class SearchResult:
    records: tuple[ScanRecord, ...]
    selected_h: int

    @property
    def selected_mse(self) -> float:
        return min(r.train_mse for r in self.records if r.h == self.selected_h)

    def to_csv(self) -> str:
        lines = ["h,train_mse,seed"]
        for r in self.records:
            lines.append(f"{r.h},{r.train_mse!r},{r.seed}")
        return "\n".join(lines) + "\n"


def mse_pairs(actual: np.ndarray, simulated: np.ndarray) -> float:
    """Mean of squared (actual - simulated) over all 2N output components."""
    actual = np.asarray(actual, dtype=float).reshape(-1, 2)
    simulated = np.asarray(simulated, dtype=float).reshape(-1, 2)
    if actual.size == 0:
        raise DataError("empty dataset")
    if actual.shape != simulated.shape:
        raise DataError("actual/simulated shape mismatch")
    return float(np.mean((actual - simulated) ** 2))


def predict(p: MlpParams, scaler: Scaler, inputs: np.ndarray) -> np.ndarray:
    """Model predictions descaled to physical units; inputs in physical units."""
    xs = scaler.scale_x(np.asarray(inputs, dtype=float).reshape(-1, 2))
    return scaler.unscale_y(network.forward(p, xs))


def mse(p: MlpParams, scaler: Scaler, d: Dataset) -> float:
    """Physical-unit MSE of the model on a dataset with outputs."""
    if len(d) == 0:
        raise DataError("empty dataset")
    return mse_pairs(d.outputs(), predict(p, scaler, d.inputs()))


def validation_report(p: MlpParams, scaler: Scaler, d: Dataset) -> list[ValidationRow]:
    return validation_report_from_sim(d, predict(p, scaler, d.inputs()))


def validation_report_from_sim(d: Dataset, simulated: np.ndarray) -> list[ValidationRow]:
    """Validation rows from externally supplied simulated outputs."""
    simulated = np.asarray(simulated, dtype=float).reshape(-1, 2)
    if simulated.shape[0] != len(d):
        raise DataError("simulated row count does not match dataset")
    rows = []
    for s, (sig_s, eps_s) in zip(d.rows, simulated):
        rows.append(ValidationRow.build(s.layout_code, s.angle_deg,
                                        s.sigma_m, s.eps_m, float(sig_s), float(eps_s)))
    return rows


def validation_rows_to_csv(rows: list[ValidationRow]) -> str:
    """CSV mirroring the validation table layout (constant 4-layer column kept)."""
    lines = ["no,layers,layout,angle_deg,sigma_actual,eps_actual,"
             "sigma_sim,eps_sim,d_sigma,d_eps,d_sigma_rel_pct,d_eps_rel_pct"]
    for i, r in enumerate(rows, start=1):
        lines.append(
            f"{i},4,{r.layout_code},{r.angle_deg!r},{r.sigma_actual!r},{r.eps_actual!r},"
            f"{r.sigma_sim!r},{r.eps_sim!r},{r.d_sigma!r},{r.d_eps!r},"
            f"{r.d_sigma_rel!r},{r.d_eps_rel!r}"
        )
    return "\n".join(lines) + "\n"


def hidden_size_search(cfg: LmConfig, h_range: tuple[int, int],
                       x: np.ndarray, y: np.ndarray,
                       scaler: Scaler) -> tuple[SearchResult, MlpParams]:
    """Scan hidden sizes, training each with train_best; select the arg-min
    training MSE, ties toward the smaller h."""
    lo, hi = h_range
    if lo > hi or lo < 1:
        raise ValueError(f"invalid hidden-size range [{lo}, {hi}]")
    records = []
    best_params = None
    best_mse = np.inf
    selected_h = lo
    for h in range(lo, hi + 1):
        p, summary = trainer.train_best(cfg, h, x, y, scaler)
        h_mse = min(r.train_mse for r in summary)
        h_seed = min(r.seed for r in summary if r.train_mse == h_mse)
        records.append(ScanRecord(h, h_mse, h_seed))
        if h_mse < best_mse:
            best_params, best_mse, selected_h = p, h_mse, h
    return SearchResult(tuple(records), selected_h), best_params


def _group_label(row_id: int, key: tuple[int, float]) -> str:
    if key in G2_INPUTS:
        return "G2"
    if row_id in _G1_ROWS:
        return "G1"
    if row_id in _G3_ROWS:
        return "G3"
    return "G4"


def recall(p: MlpParams, scaler: Scaler,
           inputs: list[tuple[int, float]]) -> list[RecallRow]:
    """Simulated outputs per input, with group labels for inputs matching the
    36-input recall fixture (others fall into G4)."""
    fixture_ids = {key: i + 1 for i, key in enumerate(RECALL_FIXTURE_INPUTS)}
    preds = predict(p, scaler, np.array(inputs, dtype=float).reshape(-1, 2))
    rows = []
    for (layout, angle), (sig, eps) in zip(inputs, preds):
        key = (int(layout), float(angle))
        label = _group_label(fixture_ids.get(key, -1), key)
        rows.append(RecallRow(int(layout), float(angle), float(sig), float(eps), label))
    return rows


@dataclass(frozen=True)
class PairDistance:
    pair_id: str  # "a-b" with 1-based fixture row ids
    distance: float  # Euclidean distance between the two (sigma, eps) outputs


@dataclass(frozen=True)
class MeanDeviation:
    layout_code: int
    angle_deg: float
    d_sigma: float  # simulated minus training group mean
    d_eps: float


@dataclass(frozen=True)
class GroupReport:
    g1: tuple[PairDistance, ...]
    g2: tuple[MeanDeviation, ...]
    g3: tuple[PairDistance, ...]
    g4: tuple[RecallRow, ...]

    def to_csv(self) -> str:
        lines = ["group,pair_id,distance"]
        for d in self.g1:
            lines.append(f"G1,{d.pair_id},{d.distance!r}")
        for d in self.g2:
            dist = float(np.hypot(d.d_sigma, d.d_eps))
            lines.append(f"G2,{d.layout_code}:{d.angle_deg:g},{dist!r}")
        for d in self.g3:
            lines.append(f"G3,{d.pair_id},{d.distance!r}")
        for r in self.g4:
            lines.append(f"G4,{r.layout_code}:{r.angle_deg:g},")
        return "\n".join(lines) + "\n"


def group_analysis(rows: list[RecallRow],
                   training_means: dict[tuple[int, float], tuple[float, float]]) -> GroupReport:
    """Recall analysis over the 36 fixture inputs.

    G1/G3: Euclidean output distance per fixture pair. G2: per-input deviation
    of the simulated output from the training group mean. G4: remaining rows.
    """
    by_key = {(r.layout_code, r.angle_deg): r for r in rows}
    fixture_rows = []
    for key in RECALL_FIXTURE_INPUTS:
        if key not in by_key:
            raise DataError(f"recall rows missing fixture input {key}")
        fixture_rows.append(by_key[key])

    def pair_distances(pairs):
        out = []
        for a, b in pairs:
            ra, rb = fixture_rows[a - 1], fixture_rows[b - 1]
            dist = float(np.hypot(ra.sigma_sim - rb.sigma_sim, ra.eps_sim - rb.eps_sim))
            out.append(PairDistance(f"{a}-{b}", dist))
        return tuple(out)

    g2 = []
    for key in sorted(G2_INPUTS):
        r = by_key.get(key)
        if r is None:
            raise DataError(f"recall rows missing training-coincident input {key}")
        if key not in training_means:
            raise DataError(f"no training group mean for {key}")
        m_sig, m_eps = training_means[key]
        g2.append(MeanDeviation(key[0], key[1], r.sigma_sim - m_sig, r.eps_sim - m_eps))

    g4 = tuple(
        fixture_rows[i]
        for i in range(len(fixture_rows))
        if fixture_rows[i].group == "G4"
    )
    return GroupReport(pair_distances(G1_PAIRS), tuple(g2), pair_distances(G3_PAIRS), g4)
