"""Associative-memory protocols on the driven-dissipative resonator.

The steady state of the resonator is a uniform mixture of n squeezed-coherent
"lobes" at phases ``(2j+1) pi / n`` and amplitude

    |beta| = (2 n eta / (m gamma_m))^(1/(2m - n)).

A spectral separation between the n slowest Liouvillian modes and the rest
opens a metastable window: a state dropped anywhere in phase space first
collapses onto the nearest lobe and freezes there, which is the retrieval
mechanism. Trajectories are unraveled with the Monte Carlo wavefunction
method (jump operators ``sqrt(gamma_1) a`` and ``sqrt(gamma_m) a^m``), using
exact matrix-exponential propagators on a dyadic time ladder, so stiffness
costs nothing and jump times are localized by bisection of the monotone
norm decay.

Deep metastability makes the window end ``0.2/|Re lambda_slow|``
astronomically late while jump rates stay at ``~gamma_m <n>^m`` per unit
time; protocols therefore observe the state on ``[t_start, t_start + span]``
(capped at the window end), where the frozen-lobe approximation holds by
construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, NumericsError, PhysicsError
from .fock import (
    DensityMatrix,
    FockSpace,
    PureState,
    ResonatorParams,
    choose_cutoff,
    coherent,
    destroy,
    evolve,
    hamiltonian,
    liouvillian,
    mandel_q,
    spectrum,
    squeezed_coherent,
)

log = logging.getLogger(__name__)

#: Default length (units of 1/gamma_1) of the observation slice of the window.
DEFAULT_OBSERVATION_SPAN = 5.0


@dataclass(frozen=True)
class MetastableWindow:
    """Time window in which the fast modes are dead and the slow modes still alive."""

    t_start: float
    t_end: float
    gap_ratio: float

    def observed_end(self, span: float = DEFAULT_OBSERVATION_SPAN) -> float:
        return min(self.t_end, self.t_start + span)


@dataclass
class LobeSet:
    """The n stored patterns.

    ``seed_states`` are the pure coherent patterns at the lobe phases (the
    references at t = 0); ``references`` are those seeds evolved to the start
    of the metastable window, whose squeezing character is measured, not
    assumed. A-priori similarity is judged against the seeds, convergence
    against the evolved references.
    """

    phases: np.ndarray
    amplitude: float
    seed_states: list[PureState]
    references: list[DensityMatrix]
    mandel_qs: list[float]

    @property
    def count(self) -> int:
        return len(self.references)


@dataclass
class TrajectoryRecord:
    """Observables of one Monte Carlo trajectory on a fixed time grid."""

    times: np.ndarray
    a_expect: np.ndarray
    n_expect: np.ndarray
    mandel_q: np.ndarray
    jumps: list[tuple[float, str]]
    lobe_fidelities: np.ndarray | None = None  # (n_lobes, n_times)
    apriori_lobe: int | None = None
    assigned_lobe: int | None = None


@dataclass
class SuccessResult:
    """Retrieval statistics for one (n, m, mean-photon) setting."""

    drive_order: int
    dissipation_order: int
    mean_photons: float
    trajectories: int
    p_hat: float
    stderr: float
    baseline: float


def lobe_amplitude(params: ResonatorParams) -> float:
    """``(2 n eta / (m gamma_m))^(1/(2m-n))``; zero drive gives zero amplitude."""
    n, m = params.drive_order, params.dissipation_order
    if 2 * m == n:
        raise ConfigError(f"lobe amplitude undefined for 2m == n (n={n}, m={m})")
    if params.gamma_m <= 0:
        raise ConfigError("lobe amplitude needs gamma_m > 0")
    if params.drive_strength == 0:
        return 0.0
    return float((2 * n * params.drive_strength / (m * params.gamma_m))
                 ** (1.0 / (2 * m - n)))


def drive_for_mean_photons(params: ResonatorParams, mean_photons: float) -> ResonatorParams:
    """Solve the lobe-amplitude relation for eta so that ``|beta|^2 = mean_photons``."""
    n, m = params.drive_order, params.dissipation_order
    if 2 * m == n:
        raise ConfigError(f"lobe amplitude undefined for 2m == n (n={n}, m={m})")
    amp = np.sqrt(mean_photons)
    eta = m * params.gamma_m * amp ** (2 * m - n) / (2 * n)
    return replace(params, drive_strength=float(eta))


def lobe_phases(order: int) -> np.ndarray:
    return np.array([(2 * j + 1) * np.pi / order for j in range(order)])


def metastable_window(params: ResonatorParams, space: FockSpace,
                      pairs=None) -> MetastableWindow:
    """Window from the spectral split: 5 e-foldings of the first fast mode
    have passed at ``t_start`` and the slowest metastable mode has decayed by
    at most 20% at ``t_end``."""
    n = params.drive_order
    if pairs is None:
        pairs = spectrum(liouvillian(params, space), count=n + 2, n_symmetry=n)
    values = np.array([p[0] for p in pairs])
    if len(values) < n + 1:
        raise ConfigError(f"need at least {n + 1} eigenvalues, got {len(values)}")
    slow = np.abs(values[1:n].real)
    fast = abs(values[n].real)
    slowest_metastable = slow.max() if slow.size else np.inf
    if fast <= 0 or slowest_metastable <= 0:
        raise PhysicsError("degenerate spectrum; no metastable window")
    t_start = 5.0 / fast
    t_end = 0.2 / slowest_metastable
    gap_ratio = fast / slowest_metastable
    if t_start >= t_end:
        raise PhysicsError(
            f"no metastable window: t_start {t_start:.3g} >= t_end {t_end:.3g} "
            f"(gap ratio {gap_ratio:.2f})")
    if gap_ratio <= 25:
        log.warning("weak metastable separation (gap ratio %.1f)", gap_ratio)
    return MetastableWindow(t_start=t_start, t_end=t_end, gap_ratio=gap_ratio)


def build_lobe_set(params: ResonatorParams, space: FockSpace,
                   window: MetastableWindow) -> LobeSet:
    """Reference lobe states: seed coherent states at the lobe phases, evolved
    to the start of the window so their squeezing character is measured, not
    assumed."""
    amp = lobe_amplitude(params)
    gen = liouvillian(params, space)
    phases = lobe_phases(params.drive_order)
    seeds = []
    references = []
    qs = []
    for theta in phases:
        seed_state = coherent(amp * np.exp(1j * theta), space)
        rho = evolve(seed_state.to_density(), gen, [window.t_start])[-1]
        seeds.append(seed_state)
        references.append(rho)
        qs.append(mandel_q(rho))
    return LobeSet(phases=phases, amplitude=amp, seed_states=seeds,
                   references=references, mandel_qs=qs)


class TrajectoryEngine:
    """Batched Monte Carlo wavefunction unraveling for one parameter set.

    Between jumps the state evolves under ``H - (i/2)(gamma_1 a^dag a +
    gamma_m (a^dag)^m a^m)`` via precomputed exact propagators for the grid
    step and its dyadic subdivisions; the squared norm decays monotonically,
    so its crossing of the jump threshold is found by bisection down to
    ``dt / 2^bits``.
    """

    def __init__(self, params: ResonatorParams, space: FockSpace, dt: float,
                 bits: int = 16):
        self.params = params
        self.space = space
        self.dt = float(dt)
        self.bits = bits
        a = destroy(space).toarray()
        self.a_op = a
        self.am_op = np.linalg.matrix_power(a, params.dissipation_order)
        h = hamiltonian(params, space).toarray()
        decay = (params.gamma_1 * (a.conj().T @ a)
                 + params.gamma_m * (self.am_op.conj().T @ self.am_op))
        h_eff = h - 0.5j * decay
        self.propagators = [sla.expm(-1j * h_eff * self.dt / 2 ** k)
                            for k in range(bits + 1)]
        self.m_tag = f"a^{params.dissipation_order}"

    def _jump(self, psi, rng):
        down_one = self.a_op @ psi
        down_m = self.am_op @ psi
        w1 = self.params.gamma_1 * np.vdot(down_one, down_one).real
        wm = self.params.gamma_m * np.vdot(down_m, down_m).real
        total = w1 + wm
        if total <= 0:
            raise NumericsError("jump triggered with zero jump rate")
        if rng.random() < w1 / total:
            out, tag = down_one, "a"
        else:
            out, tag = down_m, self.m_tag
        norm = np.sqrt(np.vdot(out, out).real)
        if norm < 1e-150:
            raise NumericsError("state norm underflow at a jump")
        return out / norm, tag

    def _advance_through_dt(self, psi, threshold, rng, jumps, t_base):
        """Carry one trajectory across a full grid step, resolving jumps."""
        remaining = 1.0
        while remaining > 2.0 ** -self.bits:
            k = 0
            while 2.0 ** -k > remaining + 1e-15:
                k += 1
            while True:
                candidate = self.propagators[k] @ psi
                if np.vdot(candidate, candidate).real >= threshold:
                    psi = candidate
                    remaining -= 2.0 ** -k
                    break
                if k == self.bits:
                    # crossing localized: jump at this instant
                    remaining -= 2.0 ** -k
                    norm = np.sqrt(np.vdot(candidate, candidate).real)
                    if norm < 1e-150:
                        raise NumericsError("state norm underflow between grid points")
                    psi, tag = self._jump(candidate / norm, rng)
                    jumps.append((t_base + (1.0 - remaining) * self.dt, tag))
                    threshold = rng.random()
                    break
                k += 1
        return psi, threshold

    def run(self, initial_states: np.ndarray, n_steps: int, seeds,
            lobes: LobeSet | None = None, record_every: int = 1):
        """Propagate a batch of kets over ``n_steps`` internal steps.

        ``initial_states`` has shape (dim, batch); trajectory ``b`` draws all
        its randomness from its own generator in ``seeds``, so results depend
        only on (seed, index), not on batch composition. Observables are
        recorded at step 0 and every ``record_every``-th step thereafter.
        """
        dim, batch = initial_states.shape
        psis = initial_states.astype(complex).copy()
        rngs = [s if isinstance(s, np.random.Generator) else np.random.default_rng(s)
                for s in seeds]
        thresholds = np.array([rng.random() for rng in rngs])
        jumps: list[list[tuple[float, str]]] = [[] for _ in range(batch)]
        n_records = n_steps // record_every + 1
        a_exp = np.empty((n_records, batch), dtype=complex)
        n_exp = np.empty((n_records, batch))
        q_par = np.empty((n_records, batch))
        fid = refs = None
        if lobes is not None:
            fid = np.empty((lobes.count, n_records, batch))
            refs = [ref.data for ref in lobes.references]
        number = np.arange(dim, dtype=float)

        def record(i):
            norm2 = np.sum(np.abs(psis) ** 2, axis=0)
            if np.any(norm2 < 1e-280):
                raise NumericsError("state norm underflow between grid points")
            pops = np.abs(psis) ** 2 / norm2
            nbar = number @ pops
            nsq = (number ** 2) @ pops
            n_exp[i] = nbar
            with np.errstate(divide="ignore", invalid="ignore"):
                q_par[i] = np.where(nbar > 1e-12,
                                    (nsq - nbar ** 2 - nbar) / nbar, np.nan)
            a_exp[i] = np.sum(np.conj(psis) * (self.a_op @ psis), axis=0) / norm2
            if fid is not None:
                for j, ref in enumerate(refs):
                    overlap = np.sum(np.conj(psis) * (ref @ psis), axis=0)
                    fid[j, i] = np.real(overlap) / norm2

        record(0)
        step_prop = self.propagators[0]
        for step in range(n_steps):
            candidates = step_prop @ psis
            norm2 = np.sum(np.abs(candidates) ** 2, axis=0)
            clean = norm2 >= thresholds
            psis[:, clean] = candidates[:, clean]
            for b in np.nonzero(~clean)[0]:
                psis[:, b], thresholds[b] = self._advance_through_dt(
                    psis[:, b], thresholds[b], rngs[b], jumps[b], step * self.dt)
            if (step + 1) % record_every == 0:
                record((step + 1) // record_every)
        return a_exp, n_exp, q_par, jumps, fid


def _grid_step_for(params: ResonatorParams, psi0: PureState, t_max: float,
                   n_times: int) -> tuple[float, int]:
    """Internal step: a few steps per expected jump, aligned with the grid."""
    a = destroy(FockSpace(psi0.dim)).toarray()
    am = np.linalg.matrix_power(a, params.dissipation_order)
    amp = psi0.amplitudes
    rate = (params.gamma_1 * float(np.sum(np.abs(a @ amp) ** 2))
            + params.gamma_m * float(np.sum(np.abs(am @ amp) ** 2)))
    grid_dt = t_max / (n_times - 1)
    substeps = max(1, int(np.ceil(grid_dt * max(rate, 1e-9) / 0.3)))
    return grid_dt / substeps, substeps


def mc_trajectory(psi0: PureState, params: ResonatorParams, space: FockSpace,
                  t_max: float, seed: int, n_times: int = 201,
                  lobes: LobeSet | None = None, index: int = 0) -> TrajectoryRecord:
    """One Monte Carlo trajectory, observables on ``n_times`` grid points."""
    if psi0.dim != space.cutoff:
        raise ConfigError("initial state dimension does not match the space")
    if t_max <= 0:
        raise ConfigError("t_max must be positive")
    dt, substeps = _grid_step_for(params, psi0, t_max, n_times)
    engine = TrajectoryEngine(params, space, dt)
    rng = np.random.default_rng([seed, index])
    a_e, n_e, q_e, jumps, fid = engine.run(psi0.amplitudes[:, None],
                                           (n_times - 1) * substeps, [rng],
                                           lobes=lobes, record_every=substeps)
    times = np.linspace(0.0, t_max, n_times)
    return TrajectoryRecord(
        times=times,
        a_expect=a_e[:, 0],
        n_expect=n_e[:, 0],
        mandel_q=q_e[:, 0],
        jumps=jumps[0],
        lobe_fidelities=fid[:, :, 0] if fid is not None else None,
    )


def _argmax_with_tie_log(scores: np.ndarray, context: str) -> int:
    top = np.max(scores)
    ties = np.nonzero(np.abs(scores - top) < 1e-12)[0]
    if ties.size > 1:
        log.info("%s: tie between lobes %s, keeping %d", context, list(ties),
                 int(ties[0]))
    return int(ties[0])


def assign_lobe(record, lobes: LobeSet, window: MetastableWindow,
                span: float = DEFAULT_OBSERVATION_SPAN) -> int:
    """Lobe with the largest time-averaged fidelity inside the window.

    Accepts a :class:`TrajectoryRecord` carrying lobe fidelities, or a single
    :class:`DensityMatrix` / :class:`PureState` (fidelity at that instant).
    """
    if isinstance(record, TrajectoryRecord):
        if record.lobe_fidelities is None:
            raise ConfigError("trajectory was recorded without lobe fidelities")
        t_end = window.observed_end(span)
        mask = (record.times >= window.t_start) & (record.times <= t_end + 1e-12)
        if not np.any(mask):
            raise ConfigError("trajectory grid does not cover the metastable window")
        scores = record.lobe_fidelities[:, mask].mean(axis=1)
        return _argmax_with_tie_log(scores, "assign_lobe")
    if isinstance(record, PureState):
        amp = record.amplitudes
        scores = np.array([np.real(np.vdot(amp, ref.data @ amp))
                           for ref in lobes.references])
        return _argmax_with_tie_log(scores, "assign_lobe")
    if isinstance(record, DensityMatrix):
        scores = np.array([np.real(np.trace(ref.data @ record.data))
                           for ref in lobes.references])
        return _argmax_with_tie_log(scores, "assign_lobe")
    raise ConfigError(f"cannot assign a lobe to {type(record).__name__}")


def apriori_lobe(psi0: PureState, lobes: LobeSet) -> int:
    """Most similar lobe at t = 0: fidelity against the seed patterns."""
    amp = psi0.amplitudes
    scores = np.array([np.abs(np.vdot(seed.amplitudes, amp)) ** 2
                       for seed in lobes.seed_states])
    return _argmax_with_tie_log(scores, "apriori_lobe")


def phase_lobe(a_value: complex, lobes: LobeSet) -> int:
    """Cheap cross-check classifier: nearest lobe phase to arg<a>."""
    diff = np.angle(np.exp(1j * (np.angle(a_value) - lobes.phases)))
    return int(np.argmin(np.abs(diff)))


def sample_initial_state(rng: np.random.Generator, amplitude: float,
                         space: FockSpace,
                         modulus_range=(0.5, 1.5), squeezing_max=0.5) -> PureState:
    """Random squeezed-coherent probe bracketing the lobe amplitude."""
    modulus = amplitude * rng.uniform(*modulus_range)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    sq_mod = rng.uniform(0.0, squeezing_max)
    sq_phase = rng.uniform(0.0, 2.0 * np.pi)
    return squeezed_coherent(modulus * np.exp(1j * phase),
                             sq_mod * np.exp(1j * sq_phase), space)


def _initial_state_headroom(amplitude: float, squeezing_max: float,
                            modulus_max: float = 1.5, start: int = 24) -> int:
    """Cutoff with 5-sigma headroom for the worst-case sampled probe."""
    cutoff = start
    while cutoff < 4096:
        try:
            for phase in np.linspace(0, np.pi, 5):
                squeezed_coherent(modulus_max * amplitude,
                                  squeezing_max * np.exp(2j * phase), FockSpace(cutoff))
            return cutoff
        except ConfigError:
            cutoff += 8
    raise ConfigError("no workable cutoff for the initial-state distribution")


def resolve_space(params: ResonatorParams, *, probe_modulus: float = 1.5,
                  squeezing_max: float = 0.5, cutoff: int | None = None,
                  max_cutoff: int = 256) -> FockSpace:
    """Cutoff covering both the converged steady state and the probe states."""
    if cutoff is not None:
        return FockSpace(cutoff)
    amp = lobe_amplitude(params)
    converged = choose_cutoff(params, mean_photons_estimate=amp ** 2,
                              max_cutoff=max_cutoff)
    headroom = _initial_state_headroom(amp, squeezing_max, probe_modulus)
    return FockSpace(max(converged, headroom))


def success_experiment(params: ResonatorParams, mean_photon_targets,
                       trajectories: int = 200, seed: int = 0,
                       span: float = DEFAULT_OBSERVATION_SPAN,
                       n_times: int = 161, cutoff: int | None = None,
                       max_cutoff: int = 256) -> list[SuccessResult]:
    """Retrieval protocol: random probes must relax onto their a-priori lobe.

    For every target mean photon number the drive is solved so the lobes sit
    at ``|beta|^2 = target``; ``trajectories`` random squeezed-coherent
    probes are unraveled to the observation end of the metastable window and
    the time-averaged lobe assignment is compared with the most similar lobe
    at t = 0. Settings without a metastable window are skipped with a
    diagnostic.
    """
    results = []
    for target in mean_photon_targets:
        params_t = drive_for_mean_photons(params, float(target))
        space = resolve_space(params_t, cutoff=cutoff, max_cutoff=max_cutoff)
        try:
            window = metastable_window(params_t, space)
        except PhysicsError as exc:
            log.warning("skipping <n>=%s for (n=%d, m=%d): %s", target,
                        params_t.drive_order, params_t.dissipation_order, exc)
            continue
        lobes = build_lobe_set(params_t, space, window)
        t_max = window.observed_end(span)

        rngs = [np.random.default_rng([seed, b]) for b in range(trajectories)]
        probes = [sample_initial_state(rngs[b], lobes.amplitude, space)
                  for b in range(trajectories)]
        apriori = [apriori_lobe(p, lobes) for p in probes]

        psi0s = np.stack([p.amplitudes for p in probes], axis=1)
        # the probe with the highest photon number sets the jump-rate budget
        heaviest = probes[int(np.argmax([p.mean_photons for p in probes]))]
        dt, substeps = _grid_step_for(params_t, heaviest, t_max, n_times)
        engine = TrajectoryEngine(params_t, space, dt)
        _, _, _, _, fid = engine.run(psi0s, (n_times - 1) * substeps, rngs,
                                     lobes=lobes, record_every=substeps)
        times = np.linspace(0.0, t_max, n_times)
        window_rows = np.nonzero(times >= window.t_start)[0]
        successes = 0
        for b in range(trajectories):
            mean_scores = fid[:, window_rows, b].mean(axis=1)
            assigned = _argmax_with_tie_log(mean_scores, f"trajectory {b}")
            successes += int(assigned == apriori[b])
        p_hat = successes / trajectories
        results.append(SuccessResult(
            drive_order=params_t.drive_order,
            dissipation_order=params_t.dissipation_order,
            mean_photons=float(target),
            trajectories=trajectories,
            p_hat=p_hat,
            stderr=float(np.sqrt(p_hat * (1 - p_hat) / trajectories)),
            baseline=1.0 / params_t.drive_order,
        ))
    return results


def basin_map(params: ResonatorParams, *, radius_factors=(0.8, 1.2), n_angles: int = 18,
              span: float = DEFAULT_OBSERVATION_SPAN, n_window_times: int = 5,
              cutoff: int | None = None, max_cutoff: int = 256):
    """Deterministic basins of attraction on a polar grid of coherent probes.

    Each probe is evolved with the master equation and assigned by its
    time-averaged fidelity over sample times inside the observation window.
    Returns rows ``(Re alpha, Im alpha, assigned lobe)``.
    """
    space = resolve_space(params, probe_modulus=max(radius_factors),
                          squeezing_max=0.0, cutoff=cutoff, max_cutoff=max_cutoff)
    window = metastable_window(params, space)
    lobes = build_lobe_set(params, space, window)
    gen = liouvillian(params, space)
    times = np.linspace(window.t_start, window.observed_end(span), n_window_times)
    rows = []
    for factor in radius_factors:
        for angle in np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False):
            alpha = factor * lobes.amplitude * np.exp(1j * angle)
            states = evolve(coherent(alpha, space).to_density(), gen, times)
            scores = np.zeros(lobes.count)
            for state in states:
                scores += np.array([np.real(np.trace(ref.data @ state.data))
                                    for ref in lobes.references])
            rows.append((alpha.real, alpha.imag,
                         _argmax_with_tie_log(scores, "basin_map")))
    return rows
