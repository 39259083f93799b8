"""Sparse linear array model: geometry, manifolds, snapshots and datasets.

Conventions
-----------
* Sensor indices in ``ArrayGeometry.S`` are 1-based positions on a virtual
  M-element ULA with half-wavelength spacing centered at the origin.
* Angles are in radians in [0, pi]; ``pi/2`` is broadside.
* Circular complex Gaussian draws with covariance ``s2`` are generated as
  independent real and imaginary parts, each ``N(0, s2/2)``.
* SNR in dB is ``10*log10(mean(p)/eta)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError, DomainError
from .grassmann import SubspacePoint, sorted_eigh

HERMITIAN_TOL = 1e-10

NAMED_GEOMETRIES = {
    "mra4": (7, (1, 2, 5, 7)),
    "mra5": (10, (1, 2, 5, 8, 10)),
    "mra6": (14, (1, 2, 5, 6, 12, 14)),
}


def rng_for(seed, *keys):
    """Independent generator for the stream identified by ``(seed, *keys)``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys)))


def as_hermitian(A, tol=HERMITIAN_TOL):
    """Check the Hermitian invariant and return the symmetrized matrix."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ContractError(f"expected square matrix, got shape {A.shape}")
    AH = np.swapaxes(A.conj(), -1, -2)
    err = np.linalg.norm(A - AH, axis=(-2, -1))
    bound = tol * np.maximum(1.0, np.linalg.norm(A, axis=(-2, -1)))
    if np.any(err > bound):
        raise ContractError("matrix is not Hermitian")
    return 0.5 * (A + AH)


@dataclass(frozen=True)
class ArrayGeometry:
    """Physical sensors ``S`` selected from an M-element virtual ULA."""

    M: int
    S: tuple
    spacing_ratio: float = 0.5

    def __post_init__(self):
        S = tuple(int(s) for s in self.S)
        object.__setattr__(self, "S", S)
        if self.M < 2:
            raise ContractError("M must be at least 2")
        if not S or any(b <= a for a, b in zip(S, S[1:])):
            raise ContractError("S must be non-empty and strictly increasing")
        if S[0] < 1 or S[-1] > self.M:
            raise ContractError(f"sensor indices must lie in [1, {self.M}]")

    @classmethod
    def named(cls, name):
        try:
            M, S = NAMED_GEOMETRIES[name.lower()]
        except KeyError:
            raise ConfigError(f"unknown geometry {name!r}; known: {sorted(NAMED_GEOMETRIES)}") from None
        return cls(M, S)

    @classmethod
    def ula(cls, M):
        return cls(M, tuple(range(1, M + 1)))

    @property
    def N(self):
        return len(self.S)

    @property
    def indices(self):
        """0-based row indices into the virtual ULA."""
        return np.asarray(self.S, dtype=np.int64) - 1

    def coarray_lags(self):
        S = np.asarray(self.S)
        return np.unique(np.abs(S[:, None] - S[None, :]))

    @property
    def coarray_complete(self):
        lags = set(self.coarray_lags().tolist())
        return all(l in lags for l in range(self.M))


@dataclass(frozen=True)
class SourceScene:
    """Ground-truth angles, source powers and noise power."""

    theta: np.ndarray
    powers: np.ndarray
    noise_power: float

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=np.float64))
        powers = np.atleast_1d(np.asarray(self.powers, dtype=np.float64))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "powers", powers)
        if theta.shape != powers.shape:
            raise ContractError("theta and powers must have equal length")
        if np.any(np.diff(theta) <= 0):
            raise ContractError("angles must be strictly increasing")
        if np.any(theta < 0) or np.any(theta > np.pi):
            raise DomainError("angles must lie in [0, pi]")
        if np.any(powers <= 0) or not self.noise_power > 0:
            raise ContractError("powers and noise power must be positive")

    @classmethod
    def from_snr(cls, theta, snr_db, power=1.0):
        """Equal-power scene whose SNR is exactly ``snr_db``."""
        theta = np.sort(np.atleast_1d(np.asarray(theta, dtype=np.float64)))
        return cls(theta, np.full(theta.shape, float(power)), power / 10.0 ** (snr_db / 10.0))

    @property
    def k(self):
        return self.theta.shape[0]

    @property
    def snr_db(self):
        return 10.0 * np.log10(np.mean(self.powers) / self.noise_power)


def _default_pattern(M, first, low, high):
    # Index 1 gets `first`, the next floor(M/2) get `low`, the rest `high`.
    out = np.full(M, high, dtype=np.float64)
    out[1 : 1 + M // 2] = low
    out[0] = first
    return out


@dataclass(frozen=True)
class ImperfectionParams:
    """Gain, phase, position and mutual-coupling errors scaled by ``rho``."""

    rho: float
    e: np.ndarray
    g: np.ndarray
    h: np.ndarray
    gamma: complex = 0.3 * np.exp(1j * np.pi / 3)

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ContractError("rho must lie in [0, 1]")
        for name in ("e", "g", "h"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if not (self.e.shape == self.g.shape == self.h.shape):
            raise ContractError("e, g, h must have equal length")

    @classmethod
    def default(cls, M=10, rho=1.0, gamma=None):
        e = _default_pattern(M, 0.0, -0.2, 0.2)
        g = _default_pattern(M, 0.0, 0.2, -0.2)
        h = _default_pattern(M, 0.0, -np.pi / 6, np.pi / 6)
        if gamma is None:
            return cls(rho, e, g, h)
        return cls(rho, e, g, h, complex(gamma))

    def with_rho(self, rho):
        return ImperfectionParams(rho, self.e, self.g, self.h, self.gamma)

    def coupling_matrix(self):
        M = self.e.shape[0]
        row = self.gamma ** np.arange(M, dtype=np.float64)
        row[0] = 0.0
        off = np.arange(M)[None, :] - np.arange(M)[:, None]
        vals = row[np.abs(off)]
        T = np.where(off >= 0, vals, np.conj(vals))
        return np.eye(M) + self.rho * T


def _check_angles(theta):
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(~np.isfinite(theta)) or np.any(theta < 0.0) or np.any(theta > np.pi):
        raise DomainError(f"angle(s) outside [0, pi]: {theta}")
    return theta


def _phase_offsets(M):
    return np.arange(M, dtype=np.float64) - (M - 1) / 2.0


def manifold_matrix(geom, theta):
    """Columns ``a(theta_i)`` of the centered ULA manifold, shape (M, k)."""
    theta = np.atleast_1d(_check_angles(theta))
    phase = 2.0 * np.pi * geom.spacing_ratio * np.outer(_phase_offsets(geom.M), np.cos(theta))
    return np.exp(1j * phase)


def manifold(geom, theta):
    """ULA steering vector for a single angle, shape (M,)."""
    if np.ndim(theta) != 0:
        raise ContractError("manifold takes a scalar angle; use manifold_matrix")
    return manifold_matrix(geom, theta)[:, 0]


def imperfect_manifold_matrix(geom, params, theta):
    """Columns ``C G H a_rho(theta_i)`` of the perturbed manifold, shape (M, k)."""
    theta = np.atleast_1d(_check_angles(theta))
    if params.e.shape[0] != geom.M:
        raise ContractError("imperfection parameters do not match M")
    rho = params.rho
    pos = _phase_offsets(geom.M) + rho * params.e
    a = np.exp(1j * 2.0 * np.pi * geom.spacing_ratio * np.outer(pos, np.cos(theta)))
    gain = 1.0 + rho * params.g
    phase = np.exp(1j * rho * params.h)
    return params.coupling_matrix() @ ((gain * phase)[:, None] * a)


def imperfect_manifold(geom, params, theta):
    if np.ndim(theta) != 0:
        raise ContractError("imperfect_manifold takes a scalar angle")
    return imperfect_manifold_matrix(geom, params, theta)[:, 0]


def selection_matrix(geom):
    """Binary N x M row-selection matrix picking the physical sensors."""
    G = np.zeros((geom.N, geom.M))
    G[np.arange(geom.N), geom.indices] = 1.0
    return G


def _steering(geom, theta, imperfection):
    if imperfection is None:
        return manifold_matrix(geom, theta)
    return imperfect_manifold_matrix(geom, imperfection, theta)


def _check_k(geom, k):
    if not 1 <= k <= geom.M - 1:
        raise ContractError(f"source count {k} outside [1, {geom.M - 1}]")


def cn(rng, shape, var=1.0):
    """Circular complex Gaussian samples with per-entry variance ``var``."""
    var = np.asarray(var, dtype=np.float64)
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_snapshots(geom, scene, T, seed, imperfection=None):
    """Draw T snapshots on the physical sensors, shape (N, T).

    Each column is ``Gamma (A s(t) + n(t))`` with ``s ~ CN(0, diag(p))`` and
    ``n ~ CN(0, eta I)``. ``seed`` is an int or a ``numpy.random.Generator``.
    """
    if T < 1:
        raise ContractError("T must be at least 1")
    _check_k(geom, scene.k)
    rng = rng_for(seed)
    A = _steering(geom, scene.theta, imperfection)[geom.indices]
    s = cn(rng, (scene.k, T), scene.powers[:, None])
    n = cn(rng, (geom.N, T), scene.noise_power)
    return A @ s + n


def sample_scm(Y):
    """Sample covariance ``Y Y^H / T`` of an (N, T) snapshot matrix."""
    Y = np.asarray(Y, dtype=np.complex128)
    if Y.ndim != 2 or Y.shape[1] < 1:
        raise ContractError("snapshots must be an (N, T) matrix with T >= 1")
    R = Y @ Y.conj().T / Y.shape[1]
    return 0.5 * (R + R.conj().T)


def noiseless_scm(geom, scene, imperfection=None):
    """Noiseless ULA covariance ``R0 = A P A^H`` and its SLA restriction."""
    _check_k(geom, scene.k)
    A = _steering(geom, scene.theta, imperfection)
    R0 = (A * scene.powers) @ A.conj().T
    R0 = 0.5 * (R0 + R0.conj().T)
    idx = geom.indices
    return R0, R0[np.ix_(idx, idx)]


def target_subspace(geom, theta, powers=None):
    """Signal subspace of the perfect ULA for the given angles.

    Taken from the top-k eigenvectors of ``A P A^H`` (equal powers when
    ``powers`` is None).
    """
    theta = np.sort(np.atleast_1d(theta))
    k = theta.shape[0]
    _check_k(geom, k)
    A = manifold_matrix(geom, theta)
    p = np.ones(k) if powers is None else np.asarray(powers, dtype=np.float64)
    _, V = sorted_eigh((A * p) @ A.conj().T)
    return SubspacePoint(V[:, :k])


def sample_angles(rng, k, lo, hi, min_sep):
    """Uniform angles in [lo, hi] with pairwise separation >= min_sep.

    Sorted uniforms on the shrunken interval ``[lo, hi - (k-1) min_sep]`` are
    shifted by ``i * min_sep``. The map is a unit-Jacobian bijection onto the
    constrained set, so the result is exactly uniform there without any
    rejection loop.
    """
    if k * min_sep > hi - lo:
        raise ConfigError(f"cannot place {k} angles {min_sep:.4g} apart in width {hi - lo:.4g}")
    base = np.sort(rng.uniform(lo, hi - (k - 1) * min_sep, size=k))
    return base + min_sep * np.arange(k)


TRAIN_SNRS = tuple(range(-11, 22, 2))
EVAL_SNRS = tuple(range(-10, 21, 2))


@dataclass
class DatasetSpec:
    """What ``generate_dataset`` should draw.

    ``rho`` is either a fixed level or ``None`` for ``rho ~ U[0, 1]`` per
    record; it only matters when ``imperfection`` is set.
    """

    k_values: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9)
    n_per_k: int = 100
    snr_set: tuple = TRAIN_SNRS
    T: int = 50
    angle_range: tuple = (np.pi / 6, 5 * np.pi / 6)
    min_sep: float = np.pi / 60
    imperfection: ImperfectionParams = None
    rho: float = 0.0

    def __post_init__(self):
        if not self.k_values or not self.snr_set:
            raise ConfigError("k_values and snr_set must be non-empty")
        if self.n_per_k < 1 or self.T < 1:
            raise ConfigError("n_per_k and T must be positive")


@dataclass
class DatasetRecord:
    scm: np.ndarray
    theta: np.ndarray
    k: int
    target: np.ndarray
    snr_db: float
    rho: float = 0.0
    extra: dict = field(default_factory=dict, repr=False)


def make_record(geom, theta, snr_db, T, rng, imperfection=None):
    """Simulate one record: sample SCM of the SLA plus its target subspace."""
    scene = SourceScene.from_snr(theta, snr_db)
    Y = generate_snapshots(geom, scene, T, rng, imperfection)
    rho = 0.0 if imperfection is None else float(imperfection.rho)
    return DatasetRecord(
        scm=sample_scm(Y),
        theta=scene.theta,
        k=scene.k,
        target=target_subspace(geom, scene.theta).basis,
        snr_db=float(snr_db),
        rho=rho,
    )


def generate_dataset(geom, spec, seed):
    """Synthesize ``spec.n_per_k`` records for every k in ``spec.k_values``.

    Record ``j`` of source count ``k`` draws from its own stream keyed by
    ``(seed, k, j)``, so any subset can be regenerated independently.
    """
    lo, hi = spec.angle_range
    for k in spec.k_values:
        _check_k(geom, k)
        if k * spec.min_sep > hi - lo:
            raise ConfigError(f"k={k} infeasible with min separation {spec.min_sep}")
    records = []
    for k in spec.k_values:
        for j in range(spec.n_per_k):
            rng = rng_for(seed, k, j)
            theta = sample_angles(rng, k, lo, hi, spec.min_sep)
            snr = spec.snr_set[rng.integers(len(spec.snr_set))]
            imp = None
            if spec.imperfection is not None:
                rho = rng.uniform(0.0, 1.0) if spec.rho is None else spec.rho
                imp = spec.imperfection.with_rho(rho)
            records.append(make_record(geom, theta, snr, spec.T, rng, imp))
    return records
