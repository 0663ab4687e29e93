"""Truncated-Fock-basis operators and open-system machinery for the resonator.

The resonator is a single driven-dissipative nonlinear oscillator:

    drho/dt = -i [H, rho] + gamma_1 D[a] rho + gamma_m D[a^m] rho
    H = Delta a^dag a + i eta (a^n - (a^dag)^n)

with ``D[L] rho = L rho L^dag - (L^dag L rho + rho L^dag L)/2``. Time is
measured in units of the single-photon rate gamma_1. Superoperators act on
row-major vectorized density matrices, ``vec(A rho B) = (A kron B^T) vec(rho)``.

The generator commutes with the phase rotation ``rho -> U rho U^dag``,
``U = exp(i 2 pi n_hat / n)``; the vectorized space therefore splits into
charge sectors ``(j - k) mod n``. The steady state lives in the charge-0
sector, where the spectral gap is O(gamma_1) even when the full spectrum has
metastable eigenvalues arbitrarily close to zero -- the solvers below exploit
this whenever the symmetry order is supplied.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import ConfigError, NumericsError

log = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8
#: |Re lambda_2| below this (gamma_1 units) is treated as a degenerate steady state.
DEGENERACY_TOL = 1e-11


@dataclass(frozen=True)
class FockSpace:
    """Number basis |0> ... |cutoff-1>."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 2:
            raise ConfigError(f"cutoff must be >= 2, got {self.cutoff}")


@dataclass(frozen=True)
class ResonatorParams:
    """Drive order n, dissipation order m, and rates in units of gamma_1."""

    drive_order: int
    dissipation_order: int
    detuning: float
    drive_strength: float
    gamma_m: float
    gamma_1: float = 1.0

    def __post_init__(self):
        if self.drive_order < 2 or self.dissipation_order < 2:
            raise ConfigError("drive and dissipation orders must be >= 2")
        if self.gamma_m < 0 or self.gamma_1 < 0:
            raise ConfigError("rates must be >= 0")
        if self.drive_strength < 0:
            raise ConfigError("drive strength must be >= 0")


def destroy(space: FockSpace) -> sp.csr_matrix:
    """Annihilation operator, ``a|k> = sqrt(k)|k-1>``."""
    return sp.diags(np.sqrt(np.arange(1, space.cutoff)), 1, format="csr")


def ladder_operators(space: FockSpace):
    """Return (a, a_dagger, n_hat) as sparse matrices."""
    a = destroy(space)
    return a, a.T.conj().tocsr(), (a.T.conj() @ a).tocsr()


def hamiltonian(params: ResonatorParams, space: FockSpace) -> sp.csr_matrix:
    """``H = Delta a^dag a + i eta (a^n - (a^dag)^n)``, Hermitian by construction."""
    n = params.drive_order
    if space.cutoff <= n:
        raise ConfigError(f"cutoff {space.cutoff} must exceed drive order {n}")
    a, ad, num = ladder_operators(space)
    an = (a ** n).tocsr()
    return (params.detuning * num + 1j * params.drive_strength * (an - an.T.conj())).tocsr()


def _dissipator(rate: float, lop: sp.spmatrix, identity: sp.spmatrix) -> sp.csr_matrix:
    ldl = (lop.T.conj() @ lop).tocsr()
    return rate * (sp.kron(lop, lop.conj())
                   - 0.5 * sp.kron(ldl, identity)
                   - 0.5 * sp.kron(identity, ldl.T)).tocsr()


def liouvillian(params: ResonatorParams, space: FockSpace) -> sp.csr_matrix:
    """Sparse generator acting on row-major vectorized density matrices."""
    if space.cutoff <= max(params.drive_order, params.dissipation_order):
        raise ConfigError(
            f"cutoff {space.cutoff} too small for orders "
            f"({params.drive_order}, {params.dissipation_order})")
    h = hamiltonian(params, space)
    a = destroy(space)
    identity = sp.identity(space.cutoff, format="csr")
    gen = -1j * (sp.kron(h, identity) - sp.kron(identity, h.T))
    gen = gen + _dissipator(params.gamma_1, a, identity)
    if params.gamma_m > 0:
        gen = gen + _dissipator(params.gamma_m, (a ** params.dissipation_order).tocsr(),
                                identity)
    return gen.tocsr()


class DensityMatrix:
    """Mixed state in the truncated number basis; validated on construction."""

    __slots__ = ("_data",)

    def __init__(self, data, validate: bool = True):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ConfigError(f"density matrix must be square, got {data.shape}")
        if validate:
            herm = np.max(np.abs(data - data.T.conj()))
            if herm > HERMITICITY_TOL:
                raise ConfigError(f"density matrix not Hermitian (deviation {herm:.2e})")
            data = 0.5 * (data + data.T.conj())
            tr = np.trace(data).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ConfigError(f"trace {tr} differs from 1 beyond tolerance")
            min_eig = float(np.linalg.eigvalsh(data).min())
            if min_eig < -POSITIVITY_TOL:
                raise ConfigError(f"density matrix not positive (min eig {min_eig:.2e})")
        self._data = data
        self._data.setflags(write=False)

    @classmethod
    def from_pure(cls, state: "PureState") -> "DensityMatrix":
        amp = state.amplitudes
        return cls(np.outer(amp, amp.conj()), validate=False)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def expectation(self, op) -> complex:
        if sp.issparse(op):
            return complex((op @ self._data).diagonal().sum())
        return complex(np.trace(op @ self._data))

    def fock_populations(self) -> np.ndarray:
        return np.real(np.diag(self._data))

    @property
    def mean_photons(self) -> float:
        return float(np.arange(self.dim) @ self.fock_populations())

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, <n>={self.mean_photons:.4f})"


class PureState:
    """Normalized ket in the truncated number basis."""

    __slots__ = ("_amplitudes",)

    def __init__(self, amplitudes, validate: bool = True):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.ndim != 1:
            raise ConfigError("pure state must be a vector")
        if validate:
            norm = np.linalg.norm(amplitudes)
            if abs(norm - 1.0) > 1e-10:
                raise ConfigError(f"state norm {norm} differs from 1")
        self._amplitudes = amplitudes
        self._amplitudes.setflags(write=False)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def dim(self) -> int:
        return self._amplitudes.size

    def expectation(self, op) -> complex:
        return complex(np.vdot(self._amplitudes, op @ self._amplitudes))

    def fock_populations(self) -> np.ndarray:
        return np.abs(self._amplitudes) ** 2

    @property
    def mean_photons(self) -> float:
        return float(np.arange(self.dim) @ self.fock_populations())

    def to_density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)


def charge_sector_indices(dim: int, order: int) -> list[np.ndarray]:
    """Row-major vec indices of |j><k| grouped by charge ``(j - k) mod order``."""
    j, k = np.divmod(np.arange(dim * dim), dim)
    charge = (j - k) % order
    return [np.nonzero(charge == c)[0] for c in range(order)]


def _arpack_v0(dim: int) -> np.ndarray:
    # fixed starting vector so repeated solves are bit-reproducible
    return np.full(dim, 1.0 / np.sqrt(dim))


def _eigs_near_zero(matrix: sp.spmatrix, k: int, sigma: float):
    """Eigenpairs nearest ``sigma`` (shift-invert), dense fallback for small systems."""
    dim = matrix.shape[0]
    if k >= dim - 1 or dim <= 600:
        vals, vecs = np.linalg.eig(matrix.toarray())
        idx = np.argsort(np.abs(vals - sigma))[:k]
        return vals[idx], vecs[:, idx]
    try:
        return spla.eigs(matrix.tocsc(), k=k, sigma=sigma, which="LM", v0=_arpack_v0(dim))
    except (spla.ArpackNoConvergence, RuntimeError) as exc:
        raise NumericsError(f"shift-invert eigensolver failed: {exc}") from exc


def steady_state(lindblad: sp.spmatrix, n_symmetry: int | None = None,
                 sigma: float = 0.05) -> DensityMatrix:
    """Unique null state of a trace-preserving generator.

    With ``n_symmetry`` given, the solve is restricted to the charge-0 sector
    where metastable modes are absent and shift-invert at ``sigma`` is well
    conditioned. Degenerate null spaces raise :class:`NumericsError`.
    """
    dim = int(round(np.sqrt(lindblad.shape[0])))
    if n_symmetry and n_symmetry > 1:
        idx = charge_sector_indices(dim, n_symmetry)[0]
        sub = lindblad.tocsr()[idx][:, idx]
        vals, vecs = _eigs_near_zero(sub, k=2, sigma=sigma)
        order = np.argsort(np.abs(vals))
        vals = vals[order]
        full = np.zeros(dim * dim, dtype=complex)
        full[idx] = vecs[:, order[0]]
    else:
        vals, vecs = _eigs_near_zero(lindblad, k=2, sigma=sigma)
        order = np.argsort(np.abs(vals))
        vals = vals[order]
        full = vecs[:, order[0]]
    if abs(vals[0]) > 1e-8:
        raise NumericsError(f"no null eigenvalue found (nearest {vals[0]:.3e})")
    if abs(vals[1].real) < DEGENERACY_TOL:
        raise NumericsError(
            f"steady state is not unique (second eigenvalue {vals[1]:.3e})")
    rho = full.reshape(dim, dim)
    rho = 0.5 * (rho + rho.T.conj())
    rho = rho / np.trace(rho).real
    residual = np.linalg.norm(lindblad @ rho.reshape(-1))
    scale = spla.norm(lindblad)
    if residual > 1e-8 * scale:
        raise NumericsError(f"steady-state residual {residual:.2e} exceeds 1e-8*||L||")
    return DensityMatrix(rho)


def spectrum(lindblad: sp.spmatrix, count: int, n_symmetry: int | None = None,
             sigma: float = 0.05) -> list[tuple[complex, np.ndarray]]:
    """The ``count`` eigenvalues of smallest |Re|, sorted ascending, with modes.

    Uses per-charge-sector shift-invert when the symmetry order is given,
    which resolves metastable rates far below the ARPACK resolution of the
    full problem. The leading eigenvalue must be 0 within 1e-8 and no real
    part may exceed 1e-8.
    """
    dim = int(round(np.sqrt(lindblad.shape[0])))
    pairs: list[tuple[complex, np.ndarray]] = []
    if n_symmetry and n_symmetry > 1:
        sectors = charge_sector_indices(dim, n_symmetry)
        per_sector = max(2, count)
        csr = lindblad.tocsr()
        for idx in sectors:
            sub = csr[idx][:, idx]
            k = min(per_sector, sub.shape[0] - 2)
            vals, vecs = _eigs_near_zero(sub, k=max(k, 1), sigma=sigma)
            for i, lam in enumerate(vals):
                full = np.zeros(dim * dim, dtype=complex)
                full[idx] = vecs[:, i]
                pairs.append((complex(lam), full.reshape(dim, dim)))
    else:
        k = min(max(count + 4, 2 * count), lindblad.shape[0] - 2)
        vals, vecs = _eigs_near_zero(lindblad, k=k, sigma=sigma)
        pairs = [(complex(vals[i]), vecs[:, i].reshape(dim, dim))
                 for i in range(len(vals))]
    pairs.sort(key=lambda p: abs(p[0].real))
    pairs = pairs[:count]
    values = np.array([p[0] for p in pairs])
    if abs(values[0]) > 1e-8:
        raise NumericsError(f"leading eigenvalue {values[0]:.3e} is not 0")
    if values.real.max() > 1e-8:
        raise NumericsError(f"positive real part in spectrum: {values.real.max():.3e}")
    # normalize the null mode to a unit-trace Hermitian matrix for convenience
    lam0, mode0 = pairs[0]
    mode0 = 0.5 * (mode0 + mode0.T.conj())
    pairs[0] = (lam0, mode0 / np.trace(mode0).real)
    return pairs


def _real_stacked(lindblad: sp.spmatrix) -> sp.csc_matrix:
    re, im = lindblad.real.tocsr(), lindblad.imag.tocsr()
    return sp.bmat([[re, -im], [im, re]], format="csc")


def evolve(rho0: DensityMatrix, lindblad: sp.spmatrix, times) -> list[DensityMatrix]:
    """Integrate the master equation; returns the state at each requested time.

    The multiphoton dissipator makes the generator stiff (fast rates scale
    like gamma_m cutoff^m), so integration uses the implicit adaptive BDF
    scheme with the sparse generator as Jacobian, on the real-stacked
    vectorized state. Trace drift is renormalized and logged if it exceeds
    1e-9 at any output time.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ConfigError("no output times requested")
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ConfigError("times must be ascending and >= 0")
    dim = rho0.dim
    if lindblad.shape[0] != dim * dim:
        raise ConfigError("generator dimension does not match the state")
    vec0 = rho0.data.reshape(-1)
    y0 = np.concatenate([vec0.real, vec0.imag])
    stacked = _real_stacked(lindblad)

    if times[-1] == 0.0:
        return [DensityMatrix(rho0.data, validate=False) for _ in times]
    sol = solve_ivp(lambda t, y: stacked @ y, (0.0, float(times[-1])), y0,
                    method="BDF", t_eval=times, jac=stacked,
                    rtol=1e-9, atol=1e-12)
    if not sol.success:
        raise NumericsError(f"master-equation integration failed: {sol.message}")
    out = []
    worst_drift = 0.0
    for col in sol.y.T:
        rho = (col[:dim * dim] + 1j * col[dim * dim:]).reshape(dim, dim)
        rho = 0.5 * (rho + rho.T.conj())
        tr = np.trace(rho).real
        worst_drift = max(worst_drift, abs(tr - 1.0))
        out.append(DensityMatrix(rho / tr))
    if worst_drift > 1e-9:
        log.warning("master-equation trace drift reached %.2e (renormalized)", worst_drift)
    return out


def coherent(beta: complex, space: FockSpace) -> PureState:
    """Coherent state |beta> by its exact number-basis expansion."""
    k = np.arange(space.cutoff)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, space.cutoff)))])
    with np.errstate(divide="ignore"):
        log_mag = k * np.log(np.abs(beta)) - 0.5 * log_fact - 0.5 * np.abs(beta) ** 2 \
            if beta != 0 else np.where(k == 0, 0.0, -np.inf)
    amp = np.exp(log_mag) * np.exp(1j * k * np.angle(beta))
    return _checked_ket(amp, space, f"coherent(|beta|={abs(beta):.3f})")


def squeezed_coherent(beta: complex, xi: complex, space: FockSpace) -> PureState:
    """Displaced squeezed vacuum ``D(beta) S(xi) |0>``.

    ``S(xi) = exp((conj(xi) a a - xi a^dag a^dag)/2)``, so squeezed vacuum has
    mean photon number ``sinh^2 |xi|``. Displacement is applied after
    squeezing. Raises when the truncated basis lacks five-sigma headroom for
    the photon distribution.
    """
    a = destroy(space).toarray()
    ad = a.T.conj()
    squeezer = sla.expm(0.5 * (np.conj(xi) * (a @ a) - xi * (ad @ ad)))
    displacer = sla.expm(beta * ad - np.conj(beta) * a)
    amp = (displacer @ squeezer)[:, 0]
    return _checked_ket(amp, space, f"squeezed_coherent(|beta|={abs(beta):.3f})")


def _checked_ket(amp: np.ndarray, space: FockSpace, label: str) -> PureState:
    norm2 = float(np.sum(np.abs(amp) ** 2))
    deficit = abs(1.0 - norm2)
    if deficit > 1e-3:
        raise ConfigError(f"{label}: cutoff {space.cutoff} too small "
                          f"(norm deficit {deficit:.2e})")
    if deficit > 1e-6:
        log.warning("%s: truncation removed %.2e of the norm; renormalizing",
                    label, deficit)
    amp = amp / np.sqrt(norm2)
    k = np.arange(space.cutoff)
    p = np.abs(amp) ** 2
    nbar = float(k @ p)
    sd = float(np.sqrt(max((k ** 2) @ p - nbar ** 2, 0.0)))
    if nbar + 5.0 * sd >= space.cutoff:
        raise ConfigError(f"{label}: needs cutoff > {nbar + 5 * sd:.1f} "
                          f"for 5-sigma headroom, have {space.cutoff}")
    return PureState(amp, validate=False)


def mandel_q(state: DensityMatrix | PureState) -> float:
    """``(⟨n^2⟩ - ⟨n⟩^2 - ⟨n⟩) / ⟨n⟩``; negative means sub-Poissonian."""
    p = state.fock_populations()
    k = np.arange(p.size)
    nbar = float(k @ p)
    if nbar < 1e-12:
        raise ConfigError("Mandel Q undefined for (near-)vacuum input")
    n2 = float((k ** 2) @ p)
    return (n2 - nbar ** 2 - nbar) / nbar


def wigner(state: DensityMatrix | PureState, xs, ps) -> np.ndarray:
    """Wigner function on a grid, normalized so that ``integral W dx dp = 1``.

    Quadrature convention ``alpha = (x + i p)/sqrt(2)`` with vacuum variance
    1/2, giving ``W(0,0) = 1/pi`` for vacuum and ``-1/pi`` for |1>. Evaluated
    through the generalized-Laguerre series over the density matrix.
    """
    from scipy.special import eval_genlaguerre, gammaln

    rho = state.to_density().data if isinstance(state, PureState) else state.data
    dim = rho.shape[0]
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    alpha = (xs[:, None] + 1j * ps[None, :]) / np.sqrt(2.0)
    u = 4.0 * np.abs(alpha) ** 2
    signs = (-1.0) ** np.arange(dim)
    out = np.zeros(alpha.shape)
    # diagonal: sum_k rho_kk (-1)^k L_k(u)
    for k in range(dim):
        out += np.real(rho[k, k]) * signs[k] * eval_genlaguerre(k, 0, u)
    # off-diagonals grouped by distance d = row - col > 0 (rho_{k+d, k})
    lg = gammaln(np.arange(dim) + 1.0)  # lg[k] = log k!
    for d in range(1, dim):
        coeffs = np.array([rho[k + d, k] * signs[k]
                           * np.exp(0.5 * (lg[k] - lg[k + d]))
                           for k in range(dim - d)])
        if not np.any(coeffs):
            continue
        basis = (2.0 * np.conj(alpha)) ** d
        acc = np.zeros(alpha.shape, dtype=complex)
        for k in range(dim - d):
            if coeffs[k] != 0:
                acc += coeffs[k] * eval_genlaguerre(k, d, u)
        out += 2.0 * np.real(basis * acc)
    return out * np.exp(-0.5 * u) / np.pi


def fock_populations_converged(params: ResonatorParams, cutoff: int,
                               tol: float = 1e-6) -> tuple[bool, float]:
    """Convergence invariant: doubling the cutoff moves no population by > tol."""
    rho_a = steady_state(liouvillian(params, FockSpace(cutoff)),
                         n_symmetry=params.drive_order)
    rho_b = steady_state(liouvillian(params, FockSpace(2 * cutoff)),
                         n_symmetry=params.drive_order)
    pa = np.zeros(2 * cutoff)
    pa[:cutoff] = rho_a.fock_populations()
    drift = float(np.max(np.abs(pa - rho_b.fock_populations())))
    return drift < tol, drift


def choose_cutoff(params: ResonatorParams, mean_photons_estimate: float,
                  max_cutoff: int = 256, tol: float = 1e-6) -> int:
    """Smallest cutoff on the 1.5x growth schedule passing the doubling check."""
    cutoff = max(32, int(np.ceil(4.0 * mean_photons_estimate)))
    while cutoff <= max_cutoff:
        ok, _ = fock_populations_converged(params, cutoff, tol=tol)
        if ok:
            return cutoff
        cutoff = int(np.ceil(1.5 * cutoff))
    from .errors import PhysicsError
    raise PhysicsError(
        f"steady state not converged at the maximum cutoff {max_cutoff}")
