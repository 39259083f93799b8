"""Monte Carlo evaluation over SNR / snapshots / source count / imperfection grids."""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..array_sim import (
    ArrayGeometry,
    ImperfectionParams,
    SourceScene,
    generate_snapshots,
    rng_for,
    sample_angles,
    sample_scm,
)
from ..coarray import da_ss_subspace
from ..errors import ConfigError, EstimationFailure
from ..learning.inference import raw_outputs, subspaces_from_raw
from ..learning.losses import head_projection
from ..rootmusic import root_music
from .metrics import trial_error

METHOD_MODES = {
    "da_ssm": None,
    "learned_subspace": "gram",
    "learned_e2e": "angles",
    "dcr_fro": "gram",
    "dcr_aff": "gram",
    "dcr_toeplitz": "toeplitz",
}


@dataclass
class SweepSpec:
    """Evaluation grid; every cell runs ``n_angles * n_noise`` trials."""

    geometry: ArrayGeometry
    methods: tuple = ("da_ssm",)
    snrs: tuple = (20.0,)
    snapshots: tuple = (50,)
    ks: tuple = (1,)
    rhos: tuple = (0.0,)
    n_angles: int = 20
    n_noise: int = 20
    seed: int = 0
    min_sep: float = math.pi / 45
    angle_range: tuple = (math.pi / 6, 5 * math.pi / 6)
    gamma: complex = None

    def __post_init__(self):
        for name in ("methods", "snrs", "snapshots", "ks", "rhos"):
            if not getattr(self, name):
                raise ConfigError(f"sweep list {name!r} is empty")
        unknown = set(self.methods) - set(METHOD_MODES)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}; expected {sorted(METHOD_MODES)}")
        if self.n_angles < 1 or self.n_noise < 1:
            raise ConfigError("trials per cell must be >= 1")

    @property
    def trials(self):
        return self.n_angles * self.n_noise


@dataclass
class EvalCell:
    method: str
    snr_db: float
    snapshots: int
    k: int
    rho: float
    trials: int
    failures: int
    mse: float
    errors: list = field(default_factory=list, repr=False, compare=False)

    @property
    def flagged(self):
        """More than half of the trials failed to produce k angles."""
        return self.failures * 2 > self.trials

    def sort_key(self):
        return (self.method, self.snr_db, self.snapshots, self.k, self.rho)


def _check_models(spec, models):
    models = dict(models or {})
    for method in spec.methods:
        mode = METHOD_MODES[method]
        if mode is None:
            continue
        if method not in models:
            raise ConfigError(f"method {method!r} needs a trained checkpoint")
        model = models[method]
        if model.spec.mode != mode:
            raise ConfigError(f"{method!r} needs a {mode!r} model, checkpoint is {model.spec.mode!r}")
        if (model.spec.N, model.spec.M) != (spec.geometry.N, spec.geometry.M):
            raise ConfigError(f"checkpoint for {method!r} was built for a different array")
    return models


def _cell_trials(spec, cell_index, snr, T, k, rho):
    geom = spec.geometry
    imp = None
    if rho > 0:
        imp = ImperfectionParams.default(geom.M, rho, spec.gamma)
    lo, hi = spec.angle_range
    thetas, scms = [], []
    for a in range(spec.n_angles):
        theta = sample_angles(rng_for(spec.seed, cell_index, a), k, lo, hi, spec.min_sep)
        scene = SourceScene.from_snr(theta, snr)
        for n in range(spec.n_noise):
            Y = generate_snapshots(geom, scene, T, rng_for(spec.seed, cell_index, a, n), imp)
            thetas.append(theta)
            scms.append(sample_scm(Y))
    return thetas, np.stack(scms)


def _estimate(method, models, geom, scms, k):
    """Angle estimates per trial, ``None`` where root-MUSIC failed."""
    if method == "da_ssm":
        subspaces = [da_ss_subspace(R, geom, k) for R in scms]
    else:
        model = models[method]
        raw = raw_outputs(model, scms)
        if model.spec.mode == "angles":
            theta = np.sort(np.clip(head_projection(model.decode(raw), k), 0.0, np.pi), axis=-1)
            return list(theta)
        subspaces = list(subspaces_from_raw(model, raw, k, geom))
    out = []
    for U in subspaces:
        try:
            out.append(root_music(U, k, geom).theta_hat)
        except EstimationFailure:
            out.append(None)
    return out


def run_sweep(spec, models=None):
    """Evaluate every method on every grid cell.

    Trials are seeded by ``(seed, cell index, angle index[, noise index])``
    where cells enumerate ``(snr, T, k, rho)``; all methods see the same
    trials. Failed trials are excluded from the MSE and counted.

    Returns:
        list of ``EvalCell`` sorted by method, snr, T, k, rho.
    """
    models = _check_models(spec, models)
    geom = spec.geometry
    cells = []
    grid = itertools.product(spec.snrs, spec.snapshots, spec.ks, spec.rhos)
    for cell_index, (snr, T, k, rho) in enumerate(grid):
        if not 1 <= k <= geom.M - 1:
            raise ConfigError(f"k={k} outside [1, {geom.M - 1}]")
        thetas, scms = _cell_trials(spec, cell_index, snr, T, k, rho)
        for method in spec.methods:
            estimates = _estimate(method, models, geom, scms, k)
            errs = [trial_error(e, t) for e, t in zip(estimates, thetas) if e is not None]
            failures = len(estimates) - len(errs)
            cells.append(
                EvalCell(
                    method=method,
                    snr_db=float(snr),
                    snapshots=int(T),
                    k=int(k),
                    rho=float(rho),
                    trials=spec.trials,
                    failures=failures,
                    mse=float(np.mean(errs)) if errs else float("nan"),
                    errors=errs,
                )
            )
    cells.sort(key=EvalCell.sort_key)
    return cells
