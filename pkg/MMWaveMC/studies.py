"""Monte-Carlo studies.

Each study sweeps one or more axes, runs independent trials at every axis
point and aggregates them in trial-index order. Every trial draws its
randomness from a :class:`numpy.random.SeedSequence` built from the master
seed, the study name, the axis coordinates that select the channel and the
trial index, so a point can be recomputed on its own and the sweep order or
process count never changes the output.

Channel draws do not depend on the step size, the phase-error bound or the
SNR axis; those axes see the same channels, schedules and noise, and the
zero phase-error point matches a run without mismatch bit for bit.
"""

import functools
import hashlib
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from MMWaveMC.config_models import ExperimentConfig
from MMWaveMC.constants import ESTIMATORS, MIN_ESTIMABLE_MISS_PROBABILITY, SE_SCHEMES
from MMWaveMC.helpers import hlogging
from MMWaveMC.models.channel import ArrayGeometry, ChannelInstance, generate_channel
from MMWaveMC.models.evaluation import (
    SelectionConstraint,
    SelectionSetting,
    greedy_selection,
    nmse,
    spectral_efficiency,
    svd_precoder,
)
from MMWaveMC.models.incoherence import IncoherenceReport, incoherence_mu
from MMWaveMC.models.omp import (
    Dictionary,
    default_iterations,
    omp_estimate,
    per_iteration_flops,
)
from MMWaveMC.models.sampling import (
    SampleSet,
    build_uss_schedule,
    empirical_miss_frequency,
    miss_probability,
    num_samples_for_density,
    observe,
    pnr_to_noise_variance,
)
from MMWaveMC.models.svp import SvpConfig, svp_estimate, svp_per_iteration_flops
from MMWaveMC.workers import run_trials

_log = hlogging.get_logger(__name__)

__all__ = [
    "ExperimentRecord",
    "StudyResult",
    "trial_seed",
    "records_table",
    "run_convergence_study",
    "run_stopping_study",
    "run_nmse_comparison",
    "run_se_study",
    "run_miss_prob",
    "run_incoherence_study",
]

NOT_ESTIMABLE = "not_estimable"

# Order of the child seeds spawned for every trial
_PATHS, _SCHEDULE, _NOISE, _PHASE_MS, _PHASE_BS, _SMALL_ARRAY = range(6)


@dataclass
class ExperimentRecord:
    """Per-trial outcome, reproducible from (master_seed, study, axis, trial).

    Attributes:
        study: Study name.
        trial: Trial index at this axis point.
        seed: 64-bit state drawn from the trial's seed sequence.
        axis: Axis coordinates of the trial.
    """

    study: str
    trial: int
    seed: int
    axis: Dict[str, Any] = field(default_factory=dict)
    nmse_svp: Optional[float] = None
    nmse_omp_unitary: Optional[float] = None
    nmse_omp_redundant: Optional[float] = None
    svp_iterations: Optional[int] = None
    svp_diverged: Optional[bool] = None
    se_perfect: Optional[float] = None
    se_svp: Optional[float] = None
    se_omp_unitary: Optional[float] = None
    se_omp_redundant: Optional[float] = None
    se_no_as: Optional[float] = None

    @staticmethod
    def value_fields() -> List[str]:
        return [f.name for f in fields(ExperimentRecord) if f.name not in _RECORD_KEYS]

    def as_row(self) -> List[Any]:
        values = asdict(self)
        return [self.study, self.trial, self.seed, *self.axis.values()] + [
            values[name] for name in self.value_fields()
        ]


_RECORD_KEYS = ("study", "trial", "seed", "axis")


@dataclass
class StudyResult:
    """Aggregated table of one study plus its per-trial records."""

    name: str
    header: List[str]
    rows: List[List[Any]]
    records: List[ExperimentRecord] = field(default_factory=list)
    summary_header: Optional[List[str]] = None
    summary_rows: Optional[List[List[Any]]] = None

    @property
    def summary(self) -> Tuple[List[str], List[List[Any]]]:
        """Short table for display; the full table when no summary was made."""
        if self.summary_header is None:
            return self.header, self.rows
        return self.summary_header, self.summary_rows or []


def records_table(records: Sequence[ExperimentRecord]) -> Tuple[List[str], List[List[Any]]]:
    """Header and rows of the per-trial record CSV."""
    axis_names = list(records[0].axis) if records else []
    header = ["study", "trial", "seed", *axis_names] + ExperimentRecord.value_fields()
    return header, [record.as_row() for record in records]


def trial_seed(master_seed: int, study: str, trial: int, **axis: Any) -> np.random.SeedSequence:
    """Seed sequence of one trial as a pure function of its coordinates.

    Arguments:
        master_seed: Experiment master seed.
        study: Study name.
        trial: Trial index.
        **axis: Axis coordinates that select the channel draw.

    Returns:
        A fresh :class:`numpy.random.SeedSequence`.
    """
    entropy = [int(master_seed), _tag(study)]
    entropy.extend(_tag(f"{name}={axis[name]!r}") for name in sorted(axis))
    entropy.append(int(trial))
    return np.random.SeedSequence(entropy)


def _tag(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "little")


def _seed_state(sequence: np.random.SeedSequence) -> int:
    return int(sequence.generate_state(1, np.uint64)[0])


@functools.lru_cache(maxsize=8)
def _dictionaries(
    n_ms: int, n_bs: int, grids: Tuple[Tuple[str, Tuple[int, int]], ...], spacing: float
) -> Dict[str, Dictionary]:
    return {
        name: Dictionary.build(n_ms, g_r, n_bs, g_t, spacing) for name, (g_r, g_t) in grids
    }


def _config_dictionaries(config: ExperimentConfig) -> Dict[str, Dictionary]:
    dims = config.dimensions
    grids = tuple(sorted(config.grid_sizes().items()))
    return _dictionaries(dims.n_ms, dims.n_bs, grids, config.channel.element_spacing)


def _draw_trial(
    config: ExperimentConfig,
    children: List[np.random.SeedSequence],
    density: float,
    pnr_db: float,
    gamma_max_ms: float,
    gamma_max_bs: float,
) -> Tuple[ChannelInstance, SampleSet, float]:
    """Draw the channel, training schedule and noisy samples of one trial.

    Phase-error bounds are in radians.
    """
    ms_ideal, bs_ideal = config.geometries()
    ms = ms_ideal.with_phase_errors(gamma_max_ms, children[_PHASE_MS])
    bs = bs_ideal.with_phase_errors(gamma_max_bs, children[_PHASE_BS])
    channel = generate_channel(
        ms, bs, config.channel.num_paths, config.channel.gain_variance, children[_PATHS]
    )

    num_samples = (
        config.num_samples
        if density == config.density
        else num_samples_for_density(ms.num_antennas, bs.num_antennas, density)
    )
    schedule = build_uss_schedule(ms_ideal, bs_ideal, num_samples, children[_SCHEDULE])
    noise_variance = pnr_to_noise_variance(pnr_db, config.pilot, config.channel.gain_variance)
    samples = observe(channel, schedule, config.pilot, noise_variance, children[_NOISE])
    return channel, samples, noise_variance


def _base_gammas(config: ExperimentConfig) -> Tuple[float, float]:
    return config.channel.gamma_max_ms * np.pi, config.channel.gamma_max_bs * np.pi


def _mean_and_stderr(values: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(values.size))


# Convergence


def _convergence_trial(task: Tuple[ExperimentConfig, float, float, int]) -> Dict[str, Any]:
    config, step_size, density, trial = task
    study = config.studies.convergence
    sequence = trial_seed(config.master_seed, "convergence", trial, density=density)
    seed = _seed_state(sequence)
    channel, samples, noise_variance = _draw_trial(
        config, sequence.spawn(6), density, study.pnr_db, *_base_gammas(config)
    )
    svp_config = SvpConfig(
        rank_budget=config.rank_budget,
        step_size=step_size,
        tolerance_floor=config.svp.tolerance_floor,
        noise_variance=noise_variance,
        max_iterations=study.max_iterations,
        projection_method=config.svp.projection_method,
        early_stopping=False,
    )
    result = svp_estimate(samples, svp_config, truth=channel.matrix)
    return {
        "seed": seed,
        "nmse_trace": result.nmse_trace,
        "diverged": result.diverged,
        "iterations": result.iterations_used,
    }


def run_convergence_study(config: ExperimentConfig) -> StudyResult:
    """Mean NMSE per SVP iteration for every (step size, density) pair.

    Runs a fixed number of iterations at the convergence PNR without the
    stopping rule. A trace cut short by divergence is padded with its last
    finite value, or with 1 (the NMSE of the zero start) when empty.

    Returns:
        Rows ``(step_size, density, iteration, mean_nmse, diverged_fraction)``.
    """
    log = hlogging.get_context_logger(__name__, study="convergence")
    study = config.studies.convergence
    trials = config.trials.convergence
    header = ["step_size", "density", "iteration", "mean_nmse", "diverged_fraction"]
    rows: List[List[Any]] = []
    summary: List[List[Any]] = []
    records: List[ExperimentRecord] = []

    for step_size in config.sweeps.step_sizes:
        for density in config.sweeps.densities:
            tasks = [(config, step_size, density, trial) for trial in range(trials)]
            outcomes = run_trials("convergence", _convergence_trial, tasks, config.processes)

            traces = np.full((trials, study.max_iterations), np.nan)
            for k, outcome in enumerate(outcomes):
                # zero start has NMSE 1
                trace = outcome["nmse_trace"] or [1.0]
                traces[k, : len(trace)] = trace
                traces[k, len(trace) :] = trace[-1]
            diverged = float(np.mean([outcome["diverged"] for outcome in outcomes]))
            mean_trace = traces.mean(axis=0)
            for iteration, value in enumerate(mean_trace, start=1):
                rows.append([step_size, density, iteration, float(value), diverged])
            summary.append([step_size, density, float(mean_trace[-1]), diverged])

            for trial, outcome in enumerate(outcomes):
                records.append(
                    ExperimentRecord(
                        study="convergence",
                        trial=trial,
                        seed=outcome["seed"],
                        axis={"step_size": step_size, "density": density},
                        nmse_svp=float((outcome["nmse_trace"] or [1.0])[-1]),
                        svp_iterations=outcome["iterations"],
                        svp_diverged=outcome["diverged"],
                    )
                )
            log.info(
                "convergence: eta=%s p=%s final mean NMSE %.4g, diverged %.0f%%",
                step_size,
                density,
                mean_trace[-1],
                100 * diverged,
            )

    return StudyResult(
        name="convergence",
        header=header,
        rows=rows,
        records=records,
        summary_header=["step_size", "density", "final_mean_nmse", "diverged_fraction"],
        summary_rows=summary,
    )


# Stopping rule


def _stopping_trial(task: Tuple[ExperimentConfig, float, int]) -> Dict[str, Any]:
    config, pnr_db, trial = task
    sequence = trial_seed(config.master_seed, "stopping", trial, pnr_db=pnr_db)
    seed = _seed_state(sequence)
    channel, samples, noise_variance = _draw_trial(
        config, sequence.spawn(6), config.density, pnr_db, *_base_gammas(config)
    )
    svp_config = SvpConfig(
        rank_budget=config.rank_budget,
        step_size=config.step_size(),
        tolerance_floor=config.svp.tolerance_floor,
        noise_variance=noise_variance,
        max_iterations=config.studies.stopping.max_iterations,
        projection_method=config.svp.projection_method,
        early_stopping=True,
    )
    result = svp_estimate(samples, svp_config)
    return {
        "seed": seed,
        "iterations": result.iterations_used,
        "converged": result.converged,
        "diverged": result.diverged,
        "nmse": nmse(channel.matrix, result.estimate),
    }


def run_stopping_study(config: ExperimentConfig) -> StudyResult:
    """Histogram and mean of SVP iterations-to-stop at every swept PNR.

    Returns:
        Rows ``(pnr_db, iterations, count, mean_iterations)`` with one row per
        iteration count from 1 to the largest count observed at any PNR.
    """
    log = hlogging.get_context_logger(__name__, study="stopping")
    trials = config.trials.stopping
    per_pnr: List[Tuple[float, List[Dict[str, Any]]]] = []
    records: List[ExperimentRecord] = []

    for pnr_db in config.sweeps.pnr_db:
        tasks = [(config, pnr_db, trial) for trial in range(trials)]
        outcomes = run_trials("stopping", _stopping_trial, tasks, config.processes)
        per_pnr.append((pnr_db, outcomes))
        for trial, outcome in enumerate(outcomes):
            records.append(
                ExperimentRecord(
                    study="stopping",
                    trial=trial,
                    seed=outcome["seed"],
                    axis={"pnr_db": pnr_db},
                    nmse_svp=outcome["nmse"],
                    svp_iterations=outcome["iterations"],
                    svp_diverged=outcome["diverged"],
                )
            )

    longest = max(o["iterations"] for _, outcomes in per_pnr for o in outcomes)
    header = ["pnr_db", "iterations", "count", "mean_iterations"]
    rows: List[List[Any]] = []
    summary: List[List[Any]] = []
    for pnr_db, outcomes in per_pnr:
        counts = np.bincount([o["iterations"] for o in outcomes], minlength=longest + 1)
        mean = float(np.mean([o["iterations"] for o in outcomes]))
        converged = float(np.mean([o["converged"] for o in outcomes]))
        for iterations in range(1, longest + 1):
            rows.append([pnr_db, iterations, int(counts[iterations]), mean])
        summary.append([pnr_db, mean, converged])
        log.info("stopping: PNR=%s dB mean iterations %.2f", pnr_db, mean)

    return StudyResult(
        name="stopping",
        header=header,
        rows=rows,
        records=records,
        summary_header=["pnr_db", "mean_iterations", "converged_fraction"],
        summary_rows=summary,
    )


# NMSE comparison


def _estimate_all(
    config: ExperimentConfig, samples: SampleSet, noise_variance: float, pnr_db: float
) -> Tuple[Dict[str, np.ndarray], int]:
    """SVP and both OMP estimates of one sample set with matched iteration counts."""
    iterations = config.omp.iterations or default_iterations(pnr_db)
    svp_config = SvpConfig(
        rank_budget=config.rank_budget,
        step_size=config.step_size(),
        tolerance_floor=config.svp.tolerance_floor,
        noise_variance=noise_variance,
        max_iterations=iterations,
        projection_method=config.svp.projection_method,
        early_stopping=config.svp.early_stopping,
    )
    svp_result = svp_estimate(samples, svp_config)
    estimates = {"svp": svp_result.estimate}
    for name, dictionary in _config_dictionaries(config).items():
        estimates[name] = omp_estimate(samples, dictionary, iterations).reconstructed
    return estimates, svp_result.iterations_used


def _nmse_trial(task: Tuple[ExperimentConfig, float, float, int]) -> Dict[str, Any]:
    config, pnr_db, gamma_max, trial = task
    sequence = trial_seed(config.master_seed, "nmse", trial, pnr_db=pnr_db)
    seed = _seed_state(sequence)
    gamma = gamma_max * np.pi
    channel, samples, noise_variance = _draw_trial(
        config, sequence.spawn(6), config.density, pnr_db, gamma, gamma
    )
    estimates, svp_iterations = _estimate_all(config, samples, noise_variance, pnr_db)
    return {
        "seed": seed,
        "nmse": {name: nmse(channel.matrix, est) for name, est in estimates.items()},
        "svp_iterations": svp_iterations,
    }


def run_nmse_comparison(config: ExperimentConfig) -> StudyResult:
    """Mean NMSE of SVP and both OMP dictionaries over PNR and phase mismatch.

    The swept phase-error bound applies to both arrays. All three
    estimators see the same samples in every trial, and the OMP
    dictionaries are built for ideal arrays.

    Returns:
        Rows ``(pnr_db, gamma_max_pi, estimator, mean_nmse, stderr, mean_nmse_db,
        flops_per_iteration)``.
    """
    log = hlogging.get_context_logger(__name__, study="nmse")
    dims = config.dimensions
    trials = config.trials.nmse
    grids = config.grid_sizes()
    flops = {
        "svp": svp_per_iteration_flops(dims.n_ms, dims.n_bs, config.rank_budget),
        **{
            name: per_iteration_flops(config.num_samples, g_t, g_r)
            for name, (g_r, g_t) in grids.items()
        },
    }
    header = [
        "pnr_db",
        "gamma_max_pi",
        "estimator",
        "mean_nmse",
        "stderr",
        "mean_nmse_db",
        "flops_per_iteration",
    ]
    rows: List[List[Any]] = []
    records: List[ExperimentRecord] = []

    for pnr_db in config.sweeps.pnr_db:
        for gamma_max in config.sweeps.gamma_max:
            tasks = [(config, pnr_db, gamma_max, trial) for trial in range(trials)]
            outcomes = run_trials("nmse", _nmse_trial, tasks, config.processes)
            for estimator in ESTIMATORS:
                mean, stderr = _mean_and_stderr([o["nmse"][estimator] for o in outcomes])
                mean_db = float(10 * np.log10(mean)) if mean > 0 else float("-inf")
                rows.append(
                    [pnr_db, gamma_max, estimator, mean, stderr, mean_db, flops[estimator]]
                )
            for trial, outcome in enumerate(outcomes):
                records.append(
                    ExperimentRecord(
                        study="nmse",
                        trial=trial,
                        seed=outcome["seed"],
                        axis={"pnr_db": pnr_db, "gamma_max_pi": gamma_max},
                        nmse_svp=outcome["nmse"]["svp"],
                        nmse_omp_unitary=outcome["nmse"]["omp_unitary"],
                        nmse_omp_redundant=outcome["nmse"]["omp_redundant"],
                        svp_iterations=outcome["svp_iterations"],
                    )
                )
            log.info("nmse: PNR=%s dB gamma_max=%s pi done", pnr_db, gamma_max)

    return StudyResult(name="nmse", header=header, rows=rows, records=records)


# Spectral efficiency


def _no_as_channel(
    config: ExperimentConfig,
    setting: SelectionSetting,
    channel: ChannelInstance,
    seed: np.random.SeedSequence,
) -> np.ndarray:
    """Channel of the fully digital small array without antenna selection.

    When the small array is as large as the full one the true channel is reused.
    """
    dims = config.dimensions
    spacing = config.channel.element_spacing
    n_bs = dims.n_bs if setting is SelectionSetting.A else dims.n_rf_bs
    if dims.n_rf_ms == dims.n_ms and n_bs == dims.n_bs:
        return channel.matrix
    ms = ArrayGeometry(dims.n_rf_ms, 1, element_spacing=spacing)
    bs = ArrayGeometry(n_bs, 1, element_spacing=spacing)
    return generate_channel(
        ms, bs, config.channel.num_paths, config.channel.gain_variance, seed
    ).matrix


def _se_trial(task: Tuple[ExperimentConfig, str, int]) -> Dict[str, Any]:
    config, setting_name, trial = task
    setting = SelectionSetting(setting_name)
    study = config.studies.se
    sequence = trial_seed(config.master_seed, "se", trial, pnr_db=study.pnr_db)
    seed = _seed_state(sequence)
    children = sequence.spawn(6)
    channel, samples, noise_variance = _draw_trial(
        config, children, config.density, study.pnr_db, *_base_gammas(config)
    )
    estimates, svp_iterations = _estimate_all(config, samples, noise_variance, study.pnr_db)
    estimates = {"perfect": channel.matrix, **estimates}

    ms, bs = config.geometries()
    if setting is SelectionSetting.A:
        constraint = SelectionConstraint.from_geometries(ms)
    else:
        constraint = SelectionConstraint.from_geometries(ms, bs)
    small = _no_as_channel(config, setting, channel, children[_SMALL_ARRAY])
    small_precoder = svd_precoder(small, min(config.num_streams, *small.shape))
    small_rows = range(small.shape[0])

    per_snr = []
    for snr_db in config.sweeps.snr_db:
        snr = 10 ** (snr_db / 10)
        values = {
            name: greedy_selection(
                estimate,
                constraint,
                snr,
                setting,
                config.num_streams,
                true_channel=channel.matrix,
                max_sweeps=study.max_sweeps,
            ).spectral_efficiency
            for name, estimate in estimates.items()
        }
        values["no_as"] = spectral_efficiency(small, small_precoder, small_rows, snr)
        per_snr.append(values)

    return {
        "seed": seed,
        "se": per_snr,
        "nmse": {
            name: nmse(channel.matrix, est) for name, est in estimates.items() if name != "perfect"
        },
        "svp_iterations": svp_iterations,
    }


def run_se_study(config: ExperimentConfig, setting: str = "A") -> StudyResult:
    """Mean SE per SNR point for perfect CSI, each estimator and the no-selection array.

    Channels are estimated at the SE-study PNR; antenna selection and the
    precoder use each estimate, and every SE is evaluated on the true channel.

    Arguments:
        config: Experiment configuration.
        setting: ``A`` (MS selection, full BS array) or ``B`` (joint selection).

    Returns:
        Rows ``(snr_db, scheme, mean_se, stderr)``.
    """
    setting = SelectionSetting(setting).value
    name = f"se_{setting}"
    log = hlogging.get_context_logger(__name__, study=name)
    trials = config.trials.se
    tasks = [(config, setting, trial) for trial in range(trials)]
    outcomes = run_trials(name, _se_trial, tasks, config.processes)

    header = ["snr_db", "scheme", "mean_se", "stderr"]
    rows: List[List[Any]] = []
    for k, snr_db in enumerate(config.sweeps.snr_db):
        for scheme in SE_SCHEMES:
            mean, stderr = _mean_and_stderr([o["se"][k][scheme] for o in outcomes])
            rows.append([snr_db, scheme, mean, stderr])
        log.info("%s: SNR=%s dB done", name, snr_db)

    records: List[ExperimentRecord] = []
    for trial, outcome in enumerate(outcomes):
        for k, snr_db in enumerate(config.sweeps.snr_db):
            se = outcome["se"][k]
            records.append(
                ExperimentRecord(
                    study=name,
                    trial=trial,
                    seed=outcome["seed"],
                    axis={"pnr_db": config.studies.se.pnr_db, "snr_db": snr_db},
                    nmse_svp=outcome["nmse"]["svp"],
                    nmse_omp_unitary=outcome["nmse"]["omp_unitary"],
                    nmse_omp_redundant=outcome["nmse"]["omp_redundant"],
                    svp_iterations=outcome["svp_iterations"],
                    se_perfect=se["perfect"],
                    se_svp=se["svp"],
                    se_omp_unitary=se["omp_unitary"],
                    se_omp_redundant=se["omp_redundant"],
                    se_no_as=se["no_as"],
                )
            )

    return StudyResult(name=name, header=header, rows=rows, records=records)


# Incoherence


def _incoherence_trial(task: Tuple[ExperimentConfig, float, int]) -> IncoherenceReport:
    config, gamma_max, trial = task
    children = trial_seed(config.master_seed, "incoherence", trial).spawn(6)
    ms_ideal, bs_ideal = config.geometries()
    ms = ms_ideal.with_phase_errors(gamma_max * np.pi, children[_PHASE_MS])
    bs = bs_ideal.with_phase_errors(gamma_max * np.pi, children[_PHASE_BS])
    channel = generate_channel(
        ms, bs, config.channel.num_paths, config.channel.gain_variance, children[_PATHS]
    )
    return incoherence_mu(channel.matrix, config.channel.num_paths)


def run_incoherence_study(config: ExperimentConfig) -> StudyResult:
    """Incoherence parameter of random channels at every phase-error bound.

    The same path draws are reused at every bound, so the rows also show
    that per-element phase errors leave mu unchanged.

    Returns:
        Rows ``(gamma_max_pi, num_paths, mean_mu, max_mu, sqrt_rank,
        degenerate_fraction, trials)``.
    """
    log = hlogging.get_context_logger(__name__, study="incoherence")
    trials = config.trials.incoherence
    rows: List[List[Any]] = []
    for gamma_max in config.sweeps.gamma_max:
        tasks = [(config, gamma_max, trial) for trial in range(trials)]
        reports = run_trials("incoherence", _incoherence_trial, tasks, config.processes)
        mus = np.array([report.mu for report in reports])
        degenerate = float(np.mean([report.degenerate for report in reports]))
        log.info(
            "incoherence: gamma_max=%gpi mean mu %.4f max %.4f", gamma_max, mus.mean(), mus.max()
        )
        rows.append(
            [
                gamma_max,
                config.channel.num_paths,
                float(mus.mean()),
                float(mus.max()),
                float(np.sqrt(config.channel.num_paths)),
                degenerate,
                trials,
            ]
        )

    header = [
        "gamma_max_pi",
        "num_paths",
        "mean_mu",
        "max_mu",
        "sqrt_rank",
        "degenerate_fraction",
        "trials",
    ]
    return StudyResult(name="incoherence", header=header, rows=rows)


# Miss probability


def _miss_prob_point(task: Tuple[int, int, Dict[str, int], int]) -> List[Any]:
    master_seed, index, point, trials = task
    analytic = miss_probability(
        point["n_ms"], point["n_bs"], point["num_samples"], point["n_rf_ms"]
    )
    row = [point["n_ms"], point["n_bs"], point["n_rf_ms"], point["num_samples"], analytic]
    if analytic < MIN_ESTIMABLE_MISS_PROBABILITY:
        return row + [NOT_ESTIMABLE, NOT_ESTIMABLE, "", 0]

    ms = ArrayGeometry(point["n_ms"], point["n_rf_ms"])
    bs = ArrayGeometry(point["n_bs"], 1)
    sequence = trial_seed(master_seed, "missprob", 0, point=index, **point)
    row_frequency, any_row_frequency = empirical_miss_frequency(
        ms, bs, point["num_samples"], trials, sequence
    )
    band = 3 * np.sqrt(analytic * (1 - analytic) / trials)
    within = bool(abs(row_frequency - analytic) <= band)
    return row + [row_frequency, any_row_frequency, within, trials]


def run_miss_prob(config: ExperimentConfig) -> StudyResult:
    """Analytic and empirical row-miss probability for every configured grid point.

    The empirical frequency is estimated only where the analytic value is at
    least the smallest probability the trial count can resolve; other rows
    are marked not estimable.

    Returns:
        Rows ``(n_ms, n_bs, n_rf_ms, num_samples, analytic, empirical,
        empirical_any_row, within_3sigma, trials)``.
    """
    log = hlogging.get_context_logger(__name__, study="missprob")
    trials = config.trials.missprob
    tasks = [
        (config.master_seed, index, point.model_dump(), trials)
        for index, point in enumerate(config.missprob)
    ]
    rows = run_trials("missprob", _miss_prob_point, tasks, config.processes)
    for row in rows:
        log.info("missprob: N_MS=%s N_BS=%s M=%s analytic %.4g", row[0], row[1], row[3], row[4])

    header = [
        "n_ms",
        "n_bs",
        "n_rf_ms",
        "num_samples",
        "analytic",
        "empirical",
        "empirical_any_row",
        "within_3sigma",
        "trials",
    ]
    return StudyResult(name="missprob", header=header, rows=rows)
