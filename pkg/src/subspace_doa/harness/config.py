"""TOML configuration for the command-line tools.

Sections and keys (all optional unless a subcommand needs them)::

    [geometry]
    name        str     "mra4" | "mra5" | "mra6" (default "mra5")
    M           int     virtual ULA size (with S, instead of name)
    S           [int]   1-based physical sensor indices
    gamma       [re, im]  mutual-coupling base (default 0.3 e^{j pi/3})

    [scene]                     -> ``simulate``
    k_values    [int]   source counts (default 1..M-1)
    n_per_k     int     records per source count (default 100)
    snr_db      [num]   SNR set drawn uniformly (default -11, -9, ..., 21)
    snapshots   int     T (default 50)
    min_sep     float   minimum angle separation, rad (default pi/60)
    angle_range [lo, hi]  rad (default [pi/6, 5 pi/6])
    rho         float | "uniform"   imperfection level (default 0.0)
    seed        int

    [train]                     -> ``train`` / ``evaluate``
    data, validation, checkpoint, metrics   str paths
    hidden      [int]   (default [256, 256, 256])
    batch_size, epochs, lr, momentum, nesterov, schedule, seed,
    loss, distance, delta, consistent_rank   see ``TrainingConfig``
    model_seed  int     parameter initialization seed (default 0)

    [sweep]                     -> ``sweep`` / ``report``
    methods     [str]
    snr_db, snapshots, k, rho   lists spanning the grid
    n_angles, n_noise           trials per cell = n_angles * n_noise
    min_sep     float   (default pi/45)
    seed        int
    results     str     output path (CSV or JSON by extension)
    checkpoints table   method -> checkpoint path

Unknown sections or keys raise ``ConfigError``.
"""

import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..array_sim import EVAL_SNRS, TRAIN_SNRS, ArrayGeometry, DatasetSpec, ImperfectionParams
from ..errors import ConfigError
from ..learning.train import LOSS_MODES, TrainingConfig
from .sweep import SweepSpec

_SCHEMA = {
    "geometry": {"name", "M", "S", "gamma"},
    "scene": {"k_values", "n_per_k", "snr_db", "snapshots", "min_sep", "angle_range", "rho", "seed"},
    "train": {
        "data", "validation", "checkpoint", "metrics", "hidden", "batch_size", "epochs", "lr",
        "momentum", "nesterov", "schedule", "seed", "loss", "distance", "delta", "consistent_rank",
        "model_seed",
    },
    "sweep": {
        "methods", "snr_db", "snapshots", "k", "rho", "n_angles", "n_noise", "min_sep", "seed",
        "results", "checkpoints",
    },
}


def load_config(path):
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return validate(cfg)


def validate(cfg):
    for section, body in cfg.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        extra = set(body) - _SCHEMA[section]
        if extra:
            raise ConfigError(f"unknown key(s) in [{section}]: {sorted(extra)}")
    return cfg


def _section(cfg, name):
    return cfg.get(name, {})


def geometry_from(cfg):
    g = _section(cfg, "geometry")
    try:
        if "M" in g or "S" in g:
            return ArrayGeometry(int(g["M"]), tuple(g["S"]))
        return ArrayGeometry.named(g.get("name", "mra5"))
    except KeyError as exc:
        raise ConfigError(f"[geometry] needs both M and S (missing {exc})") from None
    except ValueError as exc:
        raise ConfigError(f"[geometry] {exc}") from None


def gamma_from(cfg):
    gamma = _section(cfg, "geometry").get("gamma")
    if gamma is None:
        return None
    if len(gamma) != 2:
        raise ConfigError("[geometry] gamma must be [re, im]")
    return complex(gamma[0], gamma[1])


def dataset_spec_from(cfg, geom):
    s = _section(cfg, "scene")
    rho = s.get("rho", 0.0)
    imperfection = None
    if rho == "uniform" or (isinstance(rho, (int, float)) and rho > 0):
        imperfection = ImperfectionParams.default(geom.M, 0.0, gamma_from(cfg))
    elif not isinstance(rho, (int, float)):
        raise ConfigError('[scene] rho must be a number or "uniform"')
    try:
        return DatasetSpec(
            k_values=tuple(int(k) for k in s.get("k_values", range(1, geom.M))),
            n_per_k=int(s.get("n_per_k", 100)),
            snr_set=tuple(float(x) for x in s.get("snr_db", TRAIN_SNRS)),
            T=int(s.get("snapshots", 50)),
            angle_range=tuple(s.get("angle_range", (math.pi / 6, 5 * math.pi / 6))),
            min_sep=float(s.get("min_sep", math.pi / 60)),
            imperfection=imperfection,
            rho=None if rho == "uniform" else float(rho),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[scene] {exc}") from None


def training_config_from(cfg):
    t = _section(cfg, "train")
    keys = ("batch_size", "epochs", "lr", "momentum", "nesterov", "schedule", "seed", "loss",
            "distance", "delta", "consistent_rank")
    try:
        return TrainingConfig(**{k: t[k] for k in keys if k in t})
    except TypeError as exc:
        raise ConfigError(f"[train] {exc}") from None


def model_mode_for(loss):
    return LOSS_MODES[loss]


def sweep_spec_from(cfg, geom):
    s = _section(cfg, "sweep")
    try:
        return SweepSpec(
            geometry=geom,
            methods=tuple(s.get("methods", ("da_ssm",))),
            snrs=tuple(float(x) for x in s.get("snr_db", EVAL_SNRS)),
            snapshots=tuple(int(x) for x in s.get("snapshots", (50,))),
            ks=tuple(int(x) for x in s.get("k", range(1, geom.M))),
            rhos=tuple(float(x) for x in s.get("rho", (0.0,))),
            n_angles=int(s.get("n_angles", 20)),
            n_noise=int(s.get("n_noise", 20)),
            seed=int(s.get("seed", 0)),
            min_sep=float(s.get("min_sep", math.pi / 45)),
            gamma=gamma_from(cfg),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[sweep] {exc}") from None
