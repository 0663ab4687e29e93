"""Loop-based Gaussian quantum reservoir computer.

One processing step (the loop architecture):

1. encode the scalar input ``s_k`` in the squeezing phase of an N-mode
   engineered pulse, ``phi_k = encoding(s_k)``;
2. couple the circulating loop pulse to that input pulse on a 50:50 beam
   splitter;
3. read the transmitted arm out by multimode x-homodyne detection -- its
   second- and fourth-order moments form the ideal observable vector;
4. send the reflected arm through the nonlinear crystal; it becomes the
   next loop pulse.

Detection is modeled unconditionally: the measured arm is traced out and
only ensemble expectation values are kept, so the loop state stays Gaussian
and zero-mean. Readout noise is additive Gaussian on the observable vector.
Only the linear output layer is trained (ridge regression with an
unregularized bias).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .dataio import Split, TimeSeries
from .errors import ConfigError
from .gaussian import (
    GaussianState,
    SqueezingSpec,
    Symplectic,
    VACUUM_VARIANCE,
    apply_symplectic,
    beam_splitter_5050,
    crystal_symplectic,
    homodyne_moments,
    moment_count,
    partial_trace,
    squeezed_input_state,
    tensor,
    vacuum,
)

#: Named input encodings s -> squeezing phase. The default spans [0, pi/4]
#: for s in [0, 1]; the alternatives change the nonlinear response.
ENCODINGS: dict[str, Callable[[float], float]] = {
    "quarter-pi": lambda s: 0.25 * np.pi * s,
    "half-pi": lambda s: 0.5 * np.pi * s,
    "pi": lambda s: np.pi * s,
    "two-pi": lambda s: 2.0 * np.pi * s,
}

#: Largest allowed spectral radius of the closed-loop map S/sqrt(2); at this
#: margin 300 washout steps contract any initial-condition mismatch below 1e-6.
DEFAULT_LOOP_CONTRACTION = 0.97


def relative_noise_intensity(noise_variance: float) -> float:
    """Noise intensity relative to the vacuum fluctuations (s2 / 0.5)."""
    return noise_variance / VACUUM_VARIANCE


def noise_variance_from_relative(relative: float) -> float:
    return relative * VACUUM_VARIANCE


@dataclass(frozen=True)
class ReservoirConfig:
    """Static description of one reservoir realization."""

    n_modes: int = 12
    input_squeezing: float = 0.75
    cavity_squeezing: float = 0.0
    encoding: str = "quarter-pi"
    network_seed: int = 42
    noise_variance: float = 0.0
    noise_seed: int = 0
    loop_contraction: float = DEFAULT_LOOP_CONTRACTION

    def __post_init__(self):
        if self.n_modes < 1:
            raise ConfigError(f"n_modes must be >= 1, got {self.n_modes}")
        if self.input_squeezing < 0 or self.cavity_squeezing < 0:
            raise ConfigError("squeezing strengths must be >= 0")
        if self.noise_variance < 0:
            raise ConfigError(f"noise variance must be >= 0, got {self.noise_variance}")
        if self.encoding not in ENCODINGS:
            raise ConfigError(
                f"unknown encoding {self.encoding!r}; choose from {sorted(ENCODINGS)}")

    @property
    def encoder(self) -> Callable[[float], float]:
        return ENCODINGS[self.encoding]

    @property
    def n_observables(self) -> int:
        return moment_count(self.n_modes)


def build_crystal(cfg: ReservoirConfig) -> Symplectic:
    """The fixed random network for this configuration (stable loop draw)."""
    return crystal_symplectic(cfg.n_modes, cfg.cavity_squeezing, cfg.network_seed,
                              min_loop_contraction=cfg.loop_contraction)


def step_reservoir(loop: GaussianState, s_k: float, cfg: ReservoirConfig,
                   crystal: Symplectic) -> tuple[GaussianState, np.ndarray]:
    """One round trip: inject input ``s_k``, read out, update the loop.

    Returns the next loop state and the ideal (noiseless) observable vector
    measured on the transmitted arm.
    """
    n = cfg.n_modes
    if loop.n_modes != n:
        raise ConfigError(f"loop state has {loop.n_modes} modes, config wants {n}")
    pulse = squeezed_input_state(n, SqueezingSpec(cfg.input_squeezing, cfg.encoder(s_k)))
    mixed = apply_symplectic(tensor(loop, pulse), beam_splitter_5050(n))
    measured_arm = partial_trace(mixed, range(n, 2 * n))
    ideal = homodyne_moments(measured_arm)
    reflected = partial_trace(mixed, range(n))
    return apply_symplectic(reflected, crystal), ideal


def add_readout_noise(ideal: np.ndarray, noise_variance: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Additive zero-mean Gaussian noise of the given variance per observable."""
    if noise_variance < 0:
        raise ConfigError(f"noise variance must be >= 0, got {noise_variance}")
    if noise_variance == 0.0:
        return ideal
    return ideal + rng.normal(0.0, np.sqrt(noise_variance), ideal.shape)


def run_sequence_ideal(cfg: ReservoirConfig, inputs,
                       crystal: Symplectic | None = None,
                       loop: GaussianState | None = None) -> np.ndarray:
    """Drive the reservoir over ``inputs`` from the vacuum loop; ideal rows."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.size == 0:
        raise ConfigError("input sequence must be nonempty")
    if crystal is None:
        crystal = build_crystal(cfg)
    if loop is None:
        loop = vacuum(cfg.n_modes)
    rows = np.empty((inputs.size, cfg.n_observables))
    for k, s_k in enumerate(inputs):
        loop, rows[k] = step_reservoir(loop, s_k, cfg, crystal)
    return rows


def run_sequence(cfg: ReservoirConfig, inputs,
                 crystal: Symplectic | None = None) -> np.ndarray:
    """Ideal rows plus seeded readout noise; bit-reproducible given the config."""
    rows = run_sequence_ideal(cfg, inputs, crystal=crystal)
    rng = np.random.default_rng(cfg.noise_seed)
    return add_readout_noise(rows, cfg.noise_variance, rng)


@dataclass
class TrainedReadout:
    """Linear output layer: ``prediction = rows @ weights + bias``."""

    weights: np.ndarray
    bias: float
    ridge_lambda: float

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return np.asarray(rows) @ self.weights + self.bias


def default_ridge_lambda(rows: np.ndarray) -> float:
    """Spec default: ``1e-9 tr(X^T X) / n_features``."""
    rows = np.asarray(rows)
    return 1e-9 * float(np.einsum("ij,ij->", rows, rows)) / rows.shape[1]


def train_readout(rows, targets, washout: int = 0,
                  ridge_lambda: float | None = None) -> TrainedReadout:
    """Ridge-regress targets on observable rows, past the washout.

    Minimizes ``||X w + b - y||^2 + lambda ||w||^2`` (bias unregularized).
    ``ridge_lambda=None`` selects the default trace-scaled value; an exactly
    singular system (e.g. constant rows with lambda = 0) raises LinAlgError.
    """
    rows = np.asarray(rows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if rows.shape[0] != targets.shape[0]:
        raise ConfigError("rows and targets must be aligned")
    if washout >= rows.shape[0]:
        raise ConfigError(f"washout {washout} >= training length {rows.shape[0]}")
    x = rows[washout:]
    y = targets[washout:]
    if ridge_lambda is None:
        ridge_lambda = default_ridge_lambda(x)
    design = np.hstack([x, np.ones((x.shape[0], 1))])
    gram = design.T @ design
    penalty = ridge_lambda * np.eye(gram.shape[0])
    penalty[-1, -1] = 0.0
    lhs = gram + penalty
    if ridge_lambda == 0.0 and np.linalg.matrix_rank(lhs) < lhs.shape[0]:
        raise np.linalg.LinAlgError(
            "normal equations are singular; use ridge_lambda > 0")
    solution = np.linalg.solve(lhs, design.T @ y)
    if not np.all(np.isfinite(solution)):
        raise np.linalg.LinAlgError("readout training produced non-finite weights")
    return TrainedReadout(weights=solution[:-1], bias=float(solution[-1]),
                          ridge_lambda=float(ridge_lambda))


def nmse(predictions, targets) -> float:
    """Normalized mean square error ``<(y - ybar)^2> / <ybar^2>``."""
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape:
        raise ConfigError("predictions and targets must have equal length")
    denom = float(np.mean(targets ** 2))
    if denom == 0.0:
        raise ConfigError("targets are identically zero; NMSE undefined")
    return float(np.mean((predictions - targets) ** 2)) / denom


@dataclass
class ForecastResult:
    """Outcome of one forecasting run."""

    train_nmse: float
    test_nmse: float
    predictions: np.ndarray
    targets: np.ndarray
    constant_nmse: float
    config: ReservoirConfig
    split: Split
    ridge_lambda: float


def _split_pairs(series: TimeSeries, split: Split):
    """Input/next-target pairs consumed as washout | train | test."""
    values = series.values
    if split.total > len(values) - 1:
        raise ConfigError(
            f"dataset too short: {len(values)} values give {len(values) - 1} "
            f"input/target pairs, split needs {split.total}")
    inputs = values[:split.total]
    targets = values[1:split.total + 1]
    return inputs, targets


def forecast_experiment(cfg: ReservoirConfig, series: TimeSeries,
                        split: Split = Split(),
                        ridge_lambda: float | None = None,
                        ideal_rows: np.ndarray | None = None) -> ForecastResult:
    """One-step-ahead forecasting of a series (the chaotic-laser protocol).

    The target for input ``s_k`` is ``s_{k+1}``. Training uses the noisy
    post-washout rows; the test block follows the training block. Passing
    precomputed ``ideal_rows`` lets sweeps reuse the deterministic part
    across noise realizations.
    """
    inputs, targets = _split_pairs(series, split)
    if ideal_rows is None:
        ideal_rows = run_sequence_ideal(cfg, inputs)
    rng = np.random.default_rng(cfg.noise_seed)
    rows = add_readout_noise(ideal_rows, cfg.noise_variance, rng)

    tr = slice(split.washout, split.washout + split.train)
    te = slice(split.washout + split.train, split.total)
    readout = train_readout(rows[tr], targets[tr], washout=0, ridge_lambda=ridge_lambda)
    predictions = readout.predict(rows[te])
    constant = nmse(np.full(split.test, targets[tr].mean()), targets[te])
    return ForecastResult(
        train_nmse=nmse(readout.predict(rows[tr]), targets[tr]),
        test_nmse=nmse(predictions, targets[te]),
        predictions=predictions,
        targets=targets[te],
        constant_nmse=constant,
        config=cfg,
        split=split,
        ridge_lambda=readout.ridge_lambda,
    )


@dataclass
class SweepPoint:
    cavity_squeezing: float
    relative_noise: float
    noise_seed: int
    train_nmse: float
    test_nmse: float


def noise_squeezing_sweep(base: ReservoirConfig, series: TimeSeries, split: Split,
                          cavity_squeezings, relative_noises, n_realizations: int = 20,
                          ridge_lambda: float | None = None,
                          first_noise_seed: int = 1000) -> list[SweepPoint]:
    """NMSE over the (cavity squeezing x noise intensity x seed) grid.

    Each grid cell reruns the readout on fresh noise; the deterministic
    reservoir rows are computed once per squeezing value. Results come back
    sorted by grid coordinates, independent of evaluation order.
    """
    points = []
    inputs, _ = _split_pairs(series, split)
    for xi_c in cavity_squeezings:
        cfg_xi = replace(base, cavity_squeezing=float(xi_c))
        ideal = run_sequence_ideal(cfg_xi, inputs)
        for rel in relative_noises:
            for k in range(n_realizations):
                cfg = replace(cfg_xi,
                              noise_variance=noise_variance_from_relative(float(rel)),
                              noise_seed=first_noise_seed + k)
                res = forecast_experiment(cfg, series, split, ridge_lambda=ridge_lambda,
                                          ideal_rows=ideal)
                points.append(SweepPoint(float(xi_c), float(rel), cfg.noise_seed,
                                         res.train_nmse, res.test_nmse))
    points.sort(key=lambda p: (p.cavity_squeezing, p.relative_noise, p.noise_seed))
    return points
