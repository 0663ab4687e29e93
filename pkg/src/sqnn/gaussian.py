"""Zero-mean multimode Gaussian states and symplectic optics.

Conventions used throughout the package:

* Quadrature ordering ``R = (x1, p1, ..., xN, pN)``; mode ``i`` owns the
  quadrature slots ``2i`` and ``2i + 1``.
* Vacuum variance is 1/2 per quadrature, so ``vacuum(N).cov == 0.5 * I``.
* The symplectic form is ``Omega = diag_blocks([[0, 1], [-1, 0]])`` and a
  transformation ``S`` is symplectic when ``S Omega S^T = Omega``.
* A squeezing strength ``xi`` scales the extremal quadrature variances by
  ``exp(+-xi)``; its decibel value is ``10 log10(exp(-xi))``, e.g.
  ``xi = 0.75`` is about -3.26 dB and ``xi = 1.5`` about -6.51 dB.

States are zero-mean: a state is fully described by its covariance matrix.
All operations are pure functions; states and transformations are immutable
after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

VACUUM_VARIANCE = 0.5

SYMMETRY_TOL = 1e-12
SYMPLECTIC_TOL = 1e-10
UNCERTAINTY_TOL = 1e-10


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return Omega for ``n_modes`` modes in xpxp ordering."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


def squeezing_db(strength: float) -> float:
    """Decibel value of a squeezing strength: ``10 log10(exp(-xi))``."""
    return 10.0 * np.log10(np.exp(-float(strength)))


@dataclass(frozen=True)
class SqueezingSpec:
    """Single-mode squeezing: strength ``xi`` >= 0 and phase ``phi`` (radians)."""

    strength: float
    phase: float = 0.0

    def __post_init__(self):
        if self.strength < 0:
            raise ConfigError(f"squeezing strength must be >= 0, got {self.strength}")

    @property
    def db(self) -> float:
        return squeezing_db(self.strength)


class GaussianState:
    """A zero-mean Gaussian state of ``n_modes`` modes.

    Parameters
    ----------
    cov : ndarray
        Real symmetric ``2N x 2N`` covariance matrix in xpxp ordering,
        vacuum = 1/2 per diagonal entry.
    mean : ndarray, optional
        Quadrature mean vector. Kept for generality; every state produced
        by this package is zero-mean.

    Construction validates symmetry, the uncertainty relation
    (eigenvalues of ``cov + i Omega / 2`` >= -1e-10) and physical purity.
    """

    __slots__ = ("_cov", "_mean")

    def __init__(self, cov, mean=None, validate: bool = True):
        cov = np.asarray(cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ConfigError(f"covariance must be square 2N x 2N, got {cov.shape}")
        if mean is None:
            mean = np.zeros(cov.shape[0])
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (cov.shape[0],):
            raise ConfigError("mean vector length must match covariance dimension")
        if validate:
            asym = np.max(np.abs(cov - cov.T))
            if asym > SYMMETRY_TOL:
                raise ConfigError(f"covariance asymmetric by {asym:.3e}")
            cov = 0.5 * (cov + cov.T)
            omega = symplectic_form(cov.shape[0] // 2)
            heisen = cov + 0.5j * omega
            min_eig = float(np.linalg.eigvalsh(heisen).min())
            if min_eig < -UNCERTAINTY_TOL:
                raise ConfigError(
                    f"covariance violates the uncertainty relation (min eig {min_eig:.3e})")
            purity = 1.0 / np.sqrt(np.linalg.det(2.0 * cov))
            if not 0.0 < purity <= 1.0 + 1e-10:
                raise ConfigError(f"unphysical purity {purity}")
        self._cov = cov
        self._cov.setflags(write=False)
        self._mean = mean
        self._mean.setflags(write=False)

    @property
    def cov(self) -> np.ndarray:
        return self._cov

    @property
    def mean(self) -> np.ndarray:
        return self._mean

    @property
    def n_modes(self) -> int:
        return self._cov.shape[0] // 2

    @property
    def purity(self) -> float:
        return float(1.0 / np.sqrt(np.linalg.det(2.0 * self._cov)))

    @property
    def mean_photons(self) -> float:
        """Total mean photon number, ``tr(cov)/2 - N/2`` for zero-mean states."""
        return float(np.trace(self._cov) / 2.0 - self.n_modes / 2.0)

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes}, purity={self.purity:.6f})"


class Symplectic:
    """A linear quadrature transformation with ``S Omega S^T = Omega``."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, validate: bool = True):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise ConfigError(f"symplectic must be square 2N x 2N, got {matrix.shape}")
        if validate:
            omega = symplectic_form(matrix.shape[0] // 2)
            dev = np.max(np.abs(matrix @ omega @ matrix.T - omega))
            if dev > SYMPLECTIC_TOL:
                raise ConfigError(f"matrix is not symplectic (deviation {dev:.3e})")
        self._matrix = matrix
        self._matrix.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_modes(self) -> int:
        return self._matrix.shape[0] // 2

    def inverse(self) -> "Symplectic":
        """Symplectic inverse, ``S^-1 = -Omega S^T Omega``."""
        omega = symplectic_form(self.n_modes)
        return Symplectic(-omega @ self._matrix.T @ omega, validate=False)

    def __matmul__(self, other: "Symplectic") -> "Symplectic":
        return Symplectic(self._matrix @ other._matrix, validate=False)

    def __repr__(self):
        return f"Symplectic(n_modes={self.n_modes})"


def vacuum(n_modes: int) -> GaussianState:
    """The N-mode vacuum, covariance ``(1/2) I``."""
    if n_modes < 1:
        raise ConfigError(f"mode count must be >= 1, got {n_modes}")
    return GaussianState(VACUUM_VARIANCE * np.eye(2 * n_modes), validate=False)


def squeezed_input_state(n_modes: int, spec: SqueezingSpec) -> GaussianState:
    """Product of identical single-mode squeezed vacua.

    Each 2x2 block of the covariance is

        (1/2) [[cosh xi + cos phi sinh xi,  sin phi sinh xi],
               [sin phi sinh xi,            cosh xi - cos phi sinh xi]]

    so the extremal variances are ``exp(+-xi)/2`` and ``xi = 0`` is vacuum.
    """
    if n_modes < 1:
        raise ConfigError(f"mode count must be >= 1, got {n_modes}")
    ch, sh = np.cosh(spec.strength), np.sinh(spec.strength)
    c, s = np.cos(spec.phase), np.sin(spec.phase)
    block = VACUUM_VARIANCE * np.array([[ch + c * sh, s * sh],
                                        [s * sh, ch - c * sh]])
    cov = np.kron(np.eye(n_modes), block)
    return GaussianState(cov, validate=False)


def beam_splitter_5050(n_pairs: int) -> Symplectic:
    """Balanced beam splitter coupling loop mode i with input mode i.

    Acts on ``2 * n_pairs`` modes ordered (loop 0..N-1, input N..2N-1);
    quadratures map as ``(r_loop, r_in) -> ((r_loop + r_in)/sqrt2,
    (r_loop - r_in)/sqrt2)``. Orthogonal, hence passive.
    """
    if n_pairs < 1:
        raise ConfigError(f"pair count must be >= 1, got {n_pairs}")
    n = n_pairs
    s = np.zeros((4 * n, 4 * n))
    r = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for q in range(2):  # x then p of the pair
            lo, hi = 2 * i + q, 2 * (n + i) + q
            s[lo, lo] = r
            s[lo, hi] = r
            s[hi, lo] = r
            s[hi, hi] = -r
    return Symplectic(s, validate=False)


def random_passive(n_modes: int, rng: np.random.Generator) -> Symplectic:
    """Random passive (orthogonal-symplectic) interferometer.

    Draws a Haar unitary on the modes via QR of a complex Ginibre matrix and
    maps ``U = A + iB`` to its quadrature representation.
    """
    z = rng.standard_normal((n_modes, n_modes)) + 1j * rng.standard_normal((n_modes, n_modes))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    a, b = q.real, q.imag
    s_xxpp = np.block([[a, -b], [b, a]])
    perm = np.empty(2 * n_modes, dtype=int)
    perm[0::2] = np.arange(n_modes)
    perm[1::2] = np.arange(n_modes, 2 * n_modes)
    return Symplectic(s_xxpp[np.ix_(perm, perm)], validate=False)


def crystal_symplectic(n_modes: int, cavity_squeezing: float, seed: int,
                       min_loop_contraction: float | None = None) -> Symplectic:
    """Nonlinear-crystal pass with identical squeezing on every mode.

    Synthesized directly in factored form ``S = O1 D O2`` with seeded random
    passive interferometers ``O1, O2`` and ``D = diag(e^{xi/2}, e^{-xi/2})``
    per mode, so the per-mode squeezing values are exactly equal.
    ``cavity_squeezing = 0`` yields a purely passive random interferometer.

    When ``min_loop_contraction`` is given, draws are repeated (still
    deterministically from ``seed``) until the closed-loop map ``S/sqrt(2)``
    behind a 50:50 output coupler has spectral radius at most that value,
    which guarantees a fading-memory reservoir. Strong squeezing makes
    stable draws rare (about 1% at xi = 1.5), hence the retry loop.
    """
    if cavity_squeezing < 0:
        raise ConfigError(f"cavity squeezing must be >= 0, got {cavity_squeezing}")
    d = np.empty(2 * n_modes)
    d[0::2] = np.exp(cavity_squeezing / 2.0)
    d[1::2] = np.exp(-cavity_squeezing / 2.0)
    rng = np.random.default_rng(seed)
    max_draws = 1 if min_loop_contraction is None else 100_000
    for _ in range(max_draws):
        o1 = random_passive(n_modes, rng)
        o2 = random_passive(n_modes, rng)
        s = o1.matrix @ (d[:, None] * o2.matrix)
        if min_loop_contraction is None:
            break
        radius = np.max(np.abs(np.linalg.eigvals(s / np.sqrt(2.0))))
        if radius <= min_loop_contraction:
            break
    else:
        raise ConfigError(
            f"no loop-stable network found for cavity squeezing {cavity_squeezing} "
            f"(contraction target {min_loop_contraction})")
    return Symplectic(s, validate=False)


def apply_symplectic(state: GaussianState, transform: Symplectic) -> GaussianState:
    """Return the state with covariance ``S cov S^T``."""
    if transform.n_modes != state.n_modes:
        raise ConfigError(
            f"dimension mismatch: state has {state.n_modes} modes, "
            f"transform acts on {transform.n_modes}")
    s = transform.matrix
    return GaussianState(s @ state.cov @ s.T, validate=False)


def tensor(*states: GaussianState) -> GaussianState:
    """Product state: block-diagonal covariance."""
    dim = sum(2 * st.n_modes for st in states)
    cov = np.zeros((dim, dim))
    at = 0
    for st in states:
        d = 2 * st.n_modes
        cov[at:at + d, at:at + d] = st.cov
        at += d
    return GaussianState(cov, validate=False)


def partial_trace(state: GaussianState, keep) -> GaussianState:
    """Discard all modes not in ``keep`` (an iterable of mode indices)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ConfigError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= state.n_modes:
        raise ConfigError(f"mode indices {keep} out of range for N={state.n_modes}")
    idx = np.array([2 * k + q for k in keep for q in (0, 1)])
    return GaussianState(state.cov[np.ix_(idx, idx)], validate=False)


def moment_count(n_modes: int) -> int:
    """Length of the homodyne moment vector: ``N(N+1) + N(N-1) = 2 N^2``."""
    return 2 * n_modes * n_modes


def moment_labels(n_modes: int) -> list[str]:
    """Labels in the fixed output order of :func:`homodyne_moments`.

    Three families, each in lexicographic (i, j):
    ``x{i}x{j}`` for i <= j, then ``x{i}^2x{j}^2`` for i <= j, then
    ``x{i}^3x{j}`` for i != j.
    """
    n = n_modes
    fam1 = [f"x{i}x{j}" for i in range(n) for j in range(i, n)]
    fam2 = [f"x{i}^2x{j}^2" for i in range(n) for j in range(i, n)]
    fam3 = [f"x{i}^3x{j}" for i in range(n) for j in range(n) if i != j]
    return fam1 + fam2 + fam3


def homodyne_moments(state: GaussianState) -> np.ndarray:
    """Second- and fourth-order x-quadrature moments of a zero-mean state.

    Returns, in the order documented by :func:`moment_labels`, all
    ``<x_i x_j>`` (i <= j), ``<x_i^2 x_j^2>`` (i <= j) and ``<x_i^3 x_j>``
    (i != j), computed from the x-x covariance block ``sigma`` through the
    zero-mean Gaussian identities

        <x_i^2 x_j^2> = s_ii s_jj + 2 s_ij^2
        <x_i^3 x_j>   = 3 s_ii s_ij
    """
    if np.any(state.mean != 0.0):
        raise ConfigError("homodyne moments require a zero-mean state")
    sigma = state.cov[0::2, 0::2]
    iu = np.triu_indices(state.n_modes)
    fam1 = sigma[iu]
    fam2 = (np.outer(np.diag(sigma), np.diag(sigma)) + 2.0 * sigma ** 2)[iu]
    off = ~np.eye(state.n_modes, dtype=bool)
    fam3 = (3.0 * np.diag(sigma)[:, None] * sigma)[off]
    return np.concatenate([fam1, fam2, fam3])


def squeezing_spectrum(transform: Symplectic) -> np.ndarray:
    """Per-mode squeezing strengths of a symplectic, via its singular values.

    The Bloch-Messiah theorem factors any symplectic as passive x squeezers
    x passive, so the singular values come in reciprocal pairs
    ``exp(+-xi_i / 2)``; the returned array holds the ``xi_i`` (descending).
    """
    sv = np.linalg.svd(transform.matrix, compute_uv=False)
    n = transform.n_modes
    top = np.sort(sv)[::-1][:n]
    return 2.0 * np.log(top)
