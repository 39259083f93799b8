"""Fully connected ReLU network mapping a sample SCM to one of three outputs.

Complex quantities travel as paired real numbers: the input is the real
plane of the N x N SCM followed by its imaginary plane (row-major), and
complex outputs are returned the same way. Gradients follow the same
convention, i.e. for a real loss L of complex Z the pair
``(dL/dRe Z, dL/dIm Z)`` is packed as ``dL/dRe Z + 1j * dL/dIm Z``.
"""

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigError, ContractError

MODES = ("gram", "toeplitz", "angles")


def r_index(i):
    """Number of angle outputs used by heads 1..i-1: ``i (i - 1) / 2``."""
    return i * (i - 1) // 2


@dataclass(frozen=True)
class NetworkSpec:
    N: int
    M: int
    hidden: tuple = (256, 256, 256)
    mode: str = "gram"
    seed: int = 0
    activation: str = "relu"

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if not self.hidden or any(h <= 0 for h in self.hidden):
            raise ConfigError("need at least one hidden layer with positive width")
        if self.mode not in MODES:
            raise ConfigError(f"unknown output mode {self.mode!r}; expected one of {MODES}")
        if self.activation != "relu":
            raise ConfigError("only the 'relu' activation is supported")

    @property
    def input_dim(self):
        return 2 * self.N * self.N

    @property
    def output_dim(self):
        if self.mode == "gram":
            return 2 * self.M * self.M
        if self.mode == "toeplitz":
            return 2 * self.M
        return r_index(self.M)

    def digest(self):
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ModelOutput:
    """Exactly one of the three fields is set, according to the mode."""

    X: np.ndarray = None
    first_row: np.ndarray = None
    angle_block: np.ndarray = None


def scm_features(scm):
    """Stack of SCMs (..., N, N) -> real features (..., 2 N^2)."""
    scm = np.asarray(scm, dtype=np.complex128)
    lead = scm.shape[:-2]
    return np.concatenate([scm.real.reshape(*lead, -1), scm.imag.reshape(*lead, -1)], axis=-1)


class Network:
    """Multilayer perceptron with He-normal initialization."""

    def __init__(self, spec, params=None):
        self.spec = spec
        if params is None:
            params = self._init_params()
        self.params = [np.asarray(p, dtype=np.float64) for p in params]

    def _init_params(self):
        rng = np.random.default_rng(self.spec.seed)
        dims = (self.spec.input_dim, *self.spec.hidden, self.spec.output_dim)
        params = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            params.append(rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in))
            params.append(np.zeros(fan_out))
        return params

    @property
    def n_layers(self):
        return len(self.params) // 2

    def flat_params(self):
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat_params(self, flat):
        flat = np.asarray(flat, dtype=np.float64)
        sizes = [p.size for p in self.params]
        if flat.size != sum(sizes):
            raise ContractError(f"expected {sum(sizes)} parameters, got {flat.size}")
        out, off = [], 0
        for p, n in zip(self.params, sizes):
            out.append(flat[off : off + n].reshape(p.shape).copy())
            off += n
        self.params = out

    def forward_batch(self, x):
        """Raw outputs (B, output_dim) and the activations needed by backward."""
        h = np.asarray(x, dtype=np.float64)
        cache = [h]
        L = self.n_layers
        for layer in range(L):
            W, b = self.params[2 * layer], self.params[2 * layer + 1]
            h = h @ W + b
            if layer < L - 1:
                h = np.maximum(h, 0.0)
            cache.append(h)
        return h, cache

    def backward(self, cache, grad_out):
        """Parameter gradients given dLoss/d(raw output)."""
        grads = [None] * len(self.params)
        g = np.asarray(grad_out, dtype=np.float64)
        for layer in reversed(range(self.n_layers)):
            h_in = cache[layer]
            grads[2 * layer] = h_in.T @ g
            grads[2 * layer + 1] = g.sum(axis=0)
            if layer > 0:
                g = (g @ self.params[2 * layer].T) * (cache[layer] > 0.0)
        return grads

    def jvp(self, x, direction):
        """Directional derivative of the raw output w.r.t. the parameters."""
        h = np.asarray(x, dtype=np.float64)
        dh = np.zeros_like(h)
        L = self.n_layers
        for layer in range(L):
            W, b = self.params[2 * layer], self.params[2 * layer + 1]
            dW, db = direction[2 * layer], direction[2 * layer + 1]
            z = h @ W + b
            dz = dh @ W + h @ dW + db
            if layer < L - 1:
                mask = z > 0.0
                h, dh = np.where(mask, z, 0.0), np.where(mask, dz, 0.0)
            else:
                h, dh = z, dz
        return dh

    def decode(self, raw):
        """Split raw outputs into complex X (B, M, M), u (B, M) or angles."""
        M = self.spec.M
        raw = np.atleast_2d(raw)
        if self.spec.mode == "gram":
            return (raw[:, : M * M] + 1j * raw[:, M * M :]).reshape(-1, M, M)
        if self.spec.mode == "toeplitz":
            return raw[:, :M] + 1j * raw[:, M:]
        return raw

    def encode_grad(self, grad):
        """Inverse of ``decode`` for gradients packed as complex numbers."""
        M = self.spec.M
        if self.spec.mode == "gram":
            g = grad.reshape(-1, M * M)
            return np.concatenate([g.real, g.imag], axis=1)
        if self.spec.mode == "toeplitz":
            return np.concatenate([grad.real, grad.imag], axis=1)
        return np.asarray(grad, dtype=np.float64)


def forward(model, scm):
    """Evaluate the model on one N x N SCM."""
    raw, _ = model.forward_batch(scm_features(scm)[None, :])
    out = model.decode(raw)[0]
    if model.spec.mode == "gram":
        return ModelOutput(X=out)
    if model.spec.mode == "toeplitz":
        return ModelOutput(first_row=out)
    return ModelOutput(angle_block=out)
