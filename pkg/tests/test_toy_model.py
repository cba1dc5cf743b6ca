import numpy as np
import pytest

from helpers import random_triplet

from richspace import (
    AttentionWeights,
    ConvKernelBank,
    PromptEmbedding,
    ShapeError,
    ShapeMismatch,
    SingularRowSum,
    ToyModelConfig,
    attention,
    attn3d,
    conv2d,
    forward,
    generate,
    initial_noise,
    layer_params,
    linear,
)


def small_cfg(**over):
    base = dict(k_3d=2, d=8, c=4, c_patch=8, n_f=2, h=8, w=8, seed=7, T=4)
    base.update(over)
    return ToyModelConfig(**base)


def test_attention_single_token_is_wv_projection():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(1, 3))
    wts = AttentionWeights(
        w_q=rng.normal(size=(3, 3)),
        w_k=rng.normal(size=(3, 3)),
        w_v=rng.normal(size=(3, 3)),
    )
    assert np.array_equal(attention(x, wts), x @ wts.w_v)


def test_attention_hand_oracle():
    wts = AttentionWeights(w_q=[[1.0]], w_k=[[1.0]], w_v=[[1.0]])
    out = attention(np.array([[1.0], [2.0]]), wts)
    assert out == pytest.approx(np.array([[5.0 / 3.0], [5.0 / 3.0]]), abs=1e-15)


def test_attention_singular_row_sum():
    wts = AttentionWeights(
        w_q=np.eye(2), w_k=np.array([[1.0, 1.0], [-1.0, -1.0]]), w_v=np.eye(2)
    )
    with pytest.raises(SingularRowSum) as exc:
        attention(np.eye(2), wts)
    assert exc.value.row == 0


def test_attention_row_normalization():
    log = []
    for seed in range(30):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(5, 4))
        wts = AttentionWeights(
            w_q=rng.normal(size=(4, 4)),
            w_k=rng.normal(size=(4, 4)),
            w_v=rng.normal(size=(4, 4)),
        )
        attention(x, wts, row_sum_log=log)
    assert log
    for sums in log:
        assert np.max(np.abs(sums - 1.0)) <= 1e-10


def test_attention_weight_validation():
    with pytest.raises(ShapeMismatch):
        AttentionWeights(w_q=np.ones((2, 3)), w_k=np.eye(2), w_v=np.eye(2))
    with pytest.raises(ShapeMismatch):
        AttentionWeights(w_q=np.eye(2), w_k=np.eye(3), w_v=np.eye(2))
    with pytest.raises(ValueError):
        AttentionWeights(w_q=np.full((2, 2), np.nan), w_k=np.eye(2), w_v=np.eye(2))
    wts = AttentionWeights(w_q=np.eye(2), w_k=np.eye(2), w_v=np.eye(2))
    with pytest.raises(ShapeMismatch):
        attention(np.ones((2, 3)), wts)


def test_conv2d_zero_and_identity():
    rng = np.random.default_rng(1)
    bank = ConvKernelBank(rng.normal(size=(3, 3, 3, 2)), padding=1, stride=1)
    assert np.array_equal(conv2d(np.zeros((5, 5, 2)), bank), np.zeros((5, 5, 3)))
    ident = np.zeros((1, 3, 3, 1))
    ident[0, 1, 1, 0] = 1.0
    bank_id = ConvKernelBank(ident, padding=1, stride=1)
    x = np.arange(16.0).reshape(4, 4, 1)
    assert np.array_equal(conv2d(x, bank_id), x)


def test_conv2d_output_shape_formula():
    bank = ConvKernelBank(np.zeros((6, 3, 3, 2)), padding=2, stride=2)
    assert conv2d(np.zeros((8, 8, 2)), bank).shape == (5, 5, 6)
    bank2 = ConvKernelBank(np.zeros((1, 3, 3, 1)), padding=0, stride=1)
    assert conv2d(np.zeros((3, 7, 1)), bank2).shape == (1, 5, 1)


def test_conv2d_too_small_raises():
    bank = ConvKernelBank(np.zeros((1, 3, 3, 1)), padding=0, stride=1)
    with pytest.raises(ShapeError):
        conv2d(np.zeros((2, 5, 1)), bank)


def test_conv2d_channel_mismatch():
    bank = ConvKernelBank(np.zeros((1, 3, 3, 2)), padding=1, stride=1)
    with pytest.raises(ShapeMismatch):
        conv2d(np.zeros((4, 4, 3)), bank)


def test_conv2d_linearity():
    rng = np.random.default_rng(2)
    bank = ConvKernelBank(rng.normal(size=(4, 3, 3, 3)), padding=2, stride=2)
    for seed in range(10):
        g = np.random.default_rng(seed)
        x = g.normal(size=(6, 7, 3))
        y = g.normal(size=(6, 7, 3))
        a, b = g.normal(), g.normal()
        lhs = conv2d(a * x + b * y, bank)
        rhs = a * conv2d(x, bank) + b * conv2d(y, bank)
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_kernel_bank_validation():
    with pytest.raises(ShapeMismatch):
        ConvKernelBank(np.zeros((1, 2, 3, 1)), padding=0, stride=1)
    with pytest.raises(ValueError):
        ConvKernelBank(np.zeros((1, 3, 3, 1)), padding=-1, stride=1)
    with pytest.raises(ValueError):
        ConvKernelBank(np.zeros((1, 3, 3, 1)), padding=0, stride=0)


def test_linear_values_and_errors():
    x = np.array([[1.0, 2.0]])
    assert np.array_equal(linear(x, np.eye(2)), x)
    assert np.array_equal(linear(np.zeros((2, 2)), np.ones((2, 3))), np.zeros((2, 3)))
    assert np.array_equal(linear(x, np.array([[1.0, 0.0], [0.0, 2.0]])), [[1.0, 4.0]])
    with pytest.raises(ShapeMismatch):
        linear(x, np.ones((3, 2)))


def test_config_validation():
    with pytest.raises(ShapeMismatch):
        small_cfg(c_patch=4)
    with pytest.raises(ValueError):
        small_cfg(T=-1)
    with pytest.raises(ValueError):
        small_cfg(k_3d=0)
    assert small_cfg(T=0).T == 0


def test_layer_params_deterministic_and_scaled():
    cfg = small_cfg(d=64, c_patch=64)
    p1 = layer_params(cfg, 0)
    p2 = layer_params(cfg, 0)
    assert np.array_equal(p1.attn.w_q, p2.attn.w_q)
    assert np.array_equal(p1.conv.kernels, p2.conv.kernels)
    assert np.array_equal(p1.w_out, p2.w_out)
    p3 = layer_params(cfg, 1)
    assert not np.array_equal(p1.attn.w_q, p3.attn.w_q)
    # weights drawn with standard deviation 1/sqrt(d)
    assert p1.w_out.std() == pytest.approx(64.0 ** -0.5, rel=0.05)
    assert abs(p1.w_out.mean()) <= 3.0 * 64.0 ** -0.5 / np.sqrt(p1.w_out.size)


def test_initial_noise_seeded_standard_normal():
    cfg = small_cfg(n_f=4, h=16, w=16, c=4)
    z1 = initial_noise(cfg)
    z2 = initial_noise(cfg)
    assert np.array_equal(z1, z2)
    assert z1.shape == (4, 16, 16, 4)
    assert abs(z1.mean()) <= 0.1
    assert z1.std() == pytest.approx(1.0, rel=0.05)
    z3 = initial_noise(small_cfg(n_f=4, h=16, w=16, c=4, seed=8))
    assert not np.array_equal(z1, z3)


def test_attn3d_shape_roundtrip_and_determinism():
    cfg = small_cfg()
    rng = np.random.default_rng(3)
    e_t = rng.normal(size=(16, 8))
    e_v = rng.normal(size=(2, 8, 8, 4))
    params = layer_params(cfg, 0)
    out1 = attn3d(e_t, e_v, params)
    out2 = attn3d(e_t, e_v, params)
    assert out1.shape == e_v.shape
    assert np.array_equal(out1, out2)


def test_attn3d_zero_inputs_singular():
    cfg = small_cfg()
    params = layer_params(cfg, 0)
    with pytest.raises(SingularRowSum):
        attn3d(np.zeros((16, 8)), np.zeros((2, 8, 8, 4)), params)


def test_forward_composition_base_case():
    cfg = small_cfg(k_3d=1)
    rng = np.random.default_rng(4)
    e_t = rng.normal(size=(16, 8))
    z = rng.normal(size=(2, 8, 8, 4))
    assert np.array_equal(
        forward(e_t, z, cfg), attn3d(e_t, z, layer_params(cfg, 0))
    )


def test_forward_shape_and_seed_sensitivity():
    cfg = small_cfg(k_3d=3)
    rng = np.random.default_rng(5)
    e_t = rng.normal(size=(16, 8))
    z = rng.normal(size=(2, 8, 8, 4))
    out = forward(e_t, z, cfg)
    assert out.shape == z.shape
    other = forward(e_t, z, small_cfg(k_3d=3, seed=99))
    assert np.any(np.abs(out - other) > 0.0)


def test_forward_shape_conservation_random_configs():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 6))
        cfg = ToyModelConfig(
            k_3d=int(rng.integers(1, 3)),
            d=d,
            c=int(rng.integers(1, 4)),
            c_patch=d,
            n_f=int(rng.integers(1, 4)),
            h=int(rng.integers(4, 10)),
            w=int(rng.integers(4, 10)),
            seed=seed,
            T=0,
        )
        e_t = rng.normal(size=(int(rng.integers(1, 7)), d))
        z = rng.normal(size=(cfg.n_f, cfg.h, cfg.w, cfg.c))
        assert forward(e_t, z, cfg).shape == z.shape


def test_generate_loop_boundary_t0():
    cfg = small_cfg(T=0)
    a, b, c = random_triplet(6, n=16, d=8)
    pa, pb, pc = (
        PromptEmbedding(a, 10),
        PromptEmbedding(b, 12),
        PromptEmbedding(c, 14),
    )
    from richspace import find_optimal

    e_opt = find_optimal(pa, pb, pc, k=10).embedding
    one_step = forward(e_opt, initial_noise(cfg), cfg)
    assert np.array_equal(generate(pa, pb, pc, 10, 0, cfg), one_step)


def test_generate_deterministic_and_shaped():
    cfg = small_cfg()
    a, b, c = random_triplet(7, n=16, d=8)
    pa, pb, pc = (
        PromptEmbedding(a, 10),
        PromptEmbedding(b, 12),
        PromptEmbedding(c, 14),
    )
    v1 = generate(pa, pb, pc, 10, 4, cfg)
    v2 = generate(pa, pb, pc, 10, 4, cfg)
    assert v1.shape == (2, 8, 8, 4)
    assert np.array_equal(v1, v2)


def test_generate_applies_t_plus_one_steps():
    cfg = small_cfg(T=2)
    a, b, c = random_triplet(8, n=16, d=8)
    pa, pb, pc = (
        PromptEmbedding(a, 10),
        PromptEmbedding(b, 12),
        PromptEmbedding(c, 14),
    )
    from richspace import find_optimal

    e_opt = find_optimal(pa, pb, pc, k=10).embedding
    z = initial_noise(cfg)
    for _ in range(3):
        z = forward(e_opt, z, cfg)
    assert np.array_equal(generate(pa, pb, pc, 10, 2, cfg), z)
