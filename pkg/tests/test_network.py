import numpy as np
import pytest

from subspace_doa.errors import ConfigError, ContractError
from subspace_doa.learning.network import (
    ModelOutput,
    Network,
    NetworkSpec,
    forward,
    r_index,
    scm_features,
)

from conftest import crandn


@pytest.mark.parametrize("mode,dim", [("gram", 200), ("toeplitz", 20), ("angles", 45)])
def test_output_dims(mode, dim):
    spec = NetworkSpec(N=5, M=10, hidden=(8,), mode=mode)
    assert spec.input_dim == 50
    assert spec.output_dim == dim


def test_r_index():
    assert [r_index(i) for i in range(1, 6)] == [0, 1, 3, 6, 10]


def test_spec_validation():
    with pytest.raises(ConfigError):
        NetworkSpec(5, 10, hidden=())
    with pytest.raises(ConfigError):
        NetworkSpec(5, 10, hidden=(0,))
    with pytest.raises(ConfigError):
        NetworkSpec(5, 10, mode="cov")
    with pytest.raises(ConfigError):
        NetworkSpec(5, 10, activation="tanh")


def test_digest_depends_on_spec():
    a = NetworkSpec(5, 10, hidden=(8, 8))
    assert a.digest() == NetworkSpec(5, 10, hidden=[8, 8]).digest()
    assert a.digest() != NetworkSpec(5, 10, hidden=(8, 9)).digest()
    assert a.digest() != NetworkSpec(5, 10, hidden=(8, 8), seed=1).digest()


def test_features_layout(rng):
    R = crandn(rng, 2, 3, 3)
    f = scm_features(R)
    assert f.shape == (2, 18)
    np.testing.assert_array_equal(f[1, :9], R[1].real.ravel())
    np.testing.assert_array_equal(f[1, 9:], R[1].imag.ravel())


def test_he_initialization_scale():
    net = Network(NetworkSpec(5, 10, hidden=(2000,), seed=3))
    W = net.params[0]
    assert abs(W.var() - 2.0 / 50) < 0.003
    np.testing.assert_array_equal(net.params[1], 0.0)


def test_initialization_is_seeded():
    a = Network(NetworkSpec(5, 10, hidden=(16,), seed=4)).flat_params()
    b = Network(NetworkSpec(5, 10, hidden=(16,), seed=4)).flat_params()
    np.testing.assert_array_equal(a, b)


def test_flat_params_roundtrip():
    net = Network(NetworkSpec(5, 10, hidden=(7, 3)))
    flat = net.flat_params() * 2
    net.set_flat_params(flat)
    np.testing.assert_array_equal(net.flat_params(), flat)
    with pytest.raises(ContractError):
        net.set_flat_params(flat[:-1])


def test_backward_matches_jvp_and_finite_differences(rng):
    net = Network(NetworkSpec(3, 6, hidden=(12, 10), mode="toeplitz", seed=1))
    x = rng.standard_normal((4, net.spec.input_dim))
    g_out = rng.standard_normal((4, net.spec.output_dim))
    _, cache = net.forward_batch(x)
    grads = net.backward(cache, g_out)
    direction = [rng.standard_normal(p.shape) for p in net.params]
    jvp = net.jvp(x, direction)
    # <dL/dparams, direction> == <dL/dout, J direction>
    lhs = sum(np.sum(g * d) for g, d in zip(grads, direction))
    assert abs(lhs - np.sum(g_out * jvp)) < 1e-9 * max(1.0, abs(lhs))
    # J direction by central differences
    h = 1e-6
    base = net.flat_params()
    flat_dir = np.concatenate([d.ravel() for d in direction])
    net.set_flat_params(base + h * flat_dir)
    plus, _ = net.forward_batch(x)
    net.set_flat_params(base - h * flat_dir)
    minus, _ = net.forward_batch(x)
    np.testing.assert_allclose((plus - minus) / (2 * h), jvp, atol=1e-6)


def test_decode_encode_roundtrip(rng):
    net = Network(NetworkSpec(5, 10, hidden=(4,)))
    raw = rng.standard_normal((3, 200))
    X = net.decode(raw)
    assert X.shape == (3, 10, 10)
    np.testing.assert_array_equal(net.encode_grad(X), raw)
    tnet = Network(NetworkSpec(5, 10, hidden=(4,), mode="toeplitz"))
    raw = rng.standard_normal((3, 20))
    np.testing.assert_array_equal(tnet.encode_grad(tnet.decode(raw)), raw)


@pytest.mark.parametrize("mode,field", [("gram", "X"), ("toeplitz", "first_row"), ("angles", "angle_block")])
def test_forward_populates_one_variant(mode, field, rng):
    net = Network(NetworkSpec(5, 10, hidden=(4,), mode=mode))
    A = crandn(rng, 5, 5)
    out = forward(net, A @ A.conj().T)
    assert isinstance(out, ModelOutput)
    populated = [f for f in ("X", "first_row", "angle_block") if getattr(out, f) is not None]
    assert populated == [field]
