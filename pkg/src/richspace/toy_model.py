"""A desk-scale text-to-video denoiser built from first principles.

The model is a stack of 3D-attention layers: each layer patchifies every
video frame with a strided 3x3 convolution, runs joint attention over the
text tokens and the patch tokens, and linearly un-patchifies back to video
shape.  Attention is the literal normalized bilinear form D^-1 A X W_V with
A = Q K^T and D = diag(A 1); there is NO softmax, so near-zero row sums are
a hard error rather than a silently stabilized case.

Weights are never trained.  They are drawn from N(0, 1/sqrt(d)) using a
counter-based Philox stream keyed by (seed, layer, component), with
Gaussian variates produced by Box-Muller, so every build of this module
regenerates bit-identical parameters from a config seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ShapeMismatch, SingularRowSum
from .interp_finder import PromptEmbedding, find_optimal
from .parallel import ordered_map
from .tensor_core import as_video

__all__ = [
    "ROW_SUM_THRESHOLD",
    "PATCH_PADDING",
    "PATCH_STRIDE",
    "AttentionWeights",
    "ConvKernelBank",
    "ToyModelConfig",
    "Attn3dParams",
    "conv_output_len",
    "attention",
    "conv2d",
    "linear",
    "attn3d",
    "layer_params",
    "initial_noise",
    "forward",
    "generate",
]

# Attention row sums below this are treated as singular.
ROW_SUM_THRESHOLD = 1e-10

# Patchification convolution geometry used by every 3D-attention layer.
PATCH_PADDING = 2
PATCH_STRIDE = 2

# Component tags for the per-layer weight streams.
_CONV, _WQ, _WK, _WV, _WOUT = range(5)
# The noise stream must never collide with (layer << 3) | component.
_NOISE_TAG = 1 << 62
_MASK64 = (1 << 64) - 1


def _stream(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, tag]))


def _gaussian(seed: int, tag: int, shape: tuple, std: float) -> np.ndarray:
    """Box-Muller normals from the (seed, tag) Philox stream."""
    gen = _stream(seed, tag)
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # in (0, 1], keeps the log finite
    u2 = gen.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2.0 * np.pi * u2), radius * np.sin(2.0 * np.pi * u2)])
    return std * z[:count].reshape(shape)


@dataclass(frozen=True)
class AttentionWeights:
    """Square projection matrices for one attention block."""

    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray

    def __post_init__(self):
        for name in ("w_q", "w_k", "w_v"):
            m = np.asarray(getattr(self, name), dtype=np.float64)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ShapeMismatch(f"{name} must be square, got shape {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, m)
        if not (self.w_q.shape == self.w_k.shape == self.w_v.shape):
            raise ShapeMismatch("w_q, w_k, w_v must share one shape")

    @property
    def dim(self) -> int:
        return self.w_q.shape[0]


@dataclass(frozen=True)
class ConvKernelBank:
    """c_out kernels of extent 3x3xc_in plus padding and stride."""

    kernels: np.ndarray
    padding: int
    stride: int

    def __post_init__(self):
        k = np.asarray(self.kernels, dtype=np.float64)
        if k.ndim != 4 or k.shape[1] != 3 or k.shape[2] != 3:
            raise ShapeMismatch(f"kernels must be c_out x 3 x 3 x c_in, got {k.shape}")
        if k.shape[0] < 1 or k.shape[3] < 1:
            raise ShapeMismatch("kernel bank needs c_out >= 1 and c_in >= 1")
        if not np.all(np.isfinite(k)):
            raise ValueError("kernels contain non-finite values")
        if self.padding < 0:
            raise ValueError(f"padding must be >= 0, got {self.padding}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        object.__setattr__(self, "kernels", k)

    @property
    def c_out(self) -> int:
        return self.kernels.shape[0]

    @property
    def c_in(self) -> int:
        return self.kernels.shape[3]


@dataclass(frozen=True)
class ToyModelConfig:
    """Dimensions, seed, and step count for the toy denoiser."""

    k_3d: int
    d: int
    c: int
    c_patch: int
    n_f: int
    h: int
    w: int
    seed: int
    T: int

    def __post_init__(self):
        for name in ("k_3d", "d", "c", "c_patch", "n_f", "h", "w"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got {self.T}")
        if self.c_patch != self.d:
            # Text tokens and patch tokens share one attention width.
            raise ShapeMismatch(
                f"c_patch must equal d so token rows concatenate: {self.c_patch} != {self.d}"
            )


@dataclass(frozen=True)
class Attn3dParams:
    """All weights of one 3D-attention layer."""

    conv: ConvKernelBank
    attn: AttentionWeights
    w_out: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w_out, dtype=np.float64)
        if w.ndim != 2:
            raise ShapeMismatch(f"w_out must be 2-D, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("w_out contains non-finite values")
        object.__setattr__(self, "w_out", w)


def conv_output_len(extent: int, padding: int, stride: int) -> int:
    return (extent + 2 * padding - 3) // stride + 1


def attention(x, wts: AttentionWeights, row_sum_log: list | None = None) -> np.ndarray:
    """Normalized bilinear attention D^-1 A X W_V with A = (X W_Q)(X W_K)^T.

    No exponential is applied, so A's row sums can vanish; any row sum with
    magnitude below ROW_SUM_THRESHOLD raises SingularRowSum instead of being
    stabilized.  When row_sum_log is a list, the row sums of the normalized
    matrix D^-1 A (all 1 up to rounding) are appended to it for inspection.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != wts.dim:
        raise ShapeMismatch(f"input shape {x.shape} does not match weight dim {wts.dim}")
    a = (x @ wts.w_q) @ (x @ wts.w_k).T
    row_sums = a.sum(axis=1)
    small = np.abs(row_sums) < ROW_SUM_THRESHOLD
    if small.any():
        raise SingularRowSum(int(np.argmax(small)))
    normalized = a / row_sums[:, None]
    if row_sum_log is not None:
        row_sum_log.append(normalized.sum(axis=1))
    return normalized @ (x @ wts.w_v)


def conv2d(x, bank: ConvKernelBank) -> np.ndarray:
    """Strided 3x3 convolution of an h x w x c_in map over zero padding.

    Output extent is floor((extent + 2p - 3)/s) + 1 per spatial axis.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ShapeMismatch(f"feature map must be h x w x c_in, got shape {x.shape}")
    if x.shape[2] != bank.c_in:
        raise ShapeMismatch(f"map has {x.shape[2]} channels, bank expects {bank.c_in}")
    p, s = bank.padding, bank.stride
    h_out = conv_output_len(x.shape[0], p, s)
    w_out = conv_output_len(x.shape[1], p, s)
    if h_out < 1 or w_out < 1:
        raise ShapeError(
            f"kernel extent exceeds padded input: output would be {h_out} x {w_out}"
        )
    padded = np.pad(x, ((p, p), (p, p), (0, 0)))
    windows = np.lib.stride_tricks.sliding_window_view(padded, (3, 3), axis=(0, 1))
    windows = windows[::s, ::s]
    return np.einsum("ijcmn,lmnc->ijl", windows, bank.kernels)


def linear(x, w) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[0]:
        raise ShapeMismatch(f"cannot multiply {x.shape} by {w.shape}")
    return x @ w


def attn3d(
    e_t, e_v, params: Attn3dParams, row_sum_log: list | None = None
) -> np.ndarray:
    """One 3D-attention layer: patchify, joint attention, un-patchify.

    Every frame is patchified by the same kernel bank; the patch tokens are
    flattened in frame-major order, appended after the text rows, attended
    jointly, then each frame's attended patches are projected back to
    h * w * c values and reshaped to the input video shape.
    """
    e_t = np.asarray(e_t, dtype=np.float64)
    e_v = as_video(e_v)
    if e_t.ndim != 2:
        raise ShapeMismatch(f"text embedding must be 2-D, got shape {e_t.shape}")
    n, d = e_t.shape
    n_f, h, w, c = e_v.shape
    if params.conv.c_out != d:
        raise ShapeMismatch(
            f"patch channels {params.conv.c_out} must equal text dim {d}"
        )
    frames = ordered_map(lambda frame: conv2d(frame, params.conv), list(e_v))
    patches = np.stack(frames)  # n_f x h' x w' x c_patch
    _, h_p, w_p, _ = patches.shape
    tokens = patches.reshape(n_f * h_p * w_p, d)
    hidden = np.concatenate([e_t, tokens], axis=0)
    hidden = attention(hidden, params.attn, row_sum_log)
    patch_out = hidden[n:, :].reshape(n_f, h_p * w_p * d)
    if params.w_out.shape != (h_p * w_p * d, h * w * c):
        raise ShapeMismatch(
            f"w_out shape {params.w_out.shape} does not map "
            f"{h_p * w_p * d} patch values to {h * w * c} video values"
        )
    video = linear(patch_out, params.w_out)
    return video.reshape(n_f, h, w, c)


def layer_params(cfg: ToyModelConfig, layer: int) -> Attn3dParams:
    """Deterministic weights for one layer, drawn from N(0, 1/sqrt(d))."""
    std = cfg.d ** -0.5
    base = layer << 3
    kernels = _gaussian(cfg.seed, base | _CONV, (cfg.c_patch, 3, 3, cfg.c), std)
    conv = ConvKernelBank(kernels, padding=PATCH_PADDING, stride=PATCH_STRIDE)
    attn = AttentionWeights(
        w_q=_gaussian(cfg.seed, base | _WQ, (cfg.d, cfg.d), std),
        w_k=_gaussian(cfg.seed, base | _WK, (cfg.d, cfg.d), std),
        w_v=_gaussian(cfg.seed, base | _WV, (cfg.d, cfg.d), std),
    )
    h_p = conv_output_len(cfg.h, PATCH_PADDING, PATCH_STRIDE)
    w_p = conv_output_len(cfg.w, PATCH_PADDING, PATCH_STRIDE)
    w_out = _gaussian(
        cfg.seed,
        base | _WOUT,
        (h_p * w_p * cfg.c_patch, cfg.h * cfg.w * cfg.c),
        std,
    )
    return Attn3dParams(conv=conv, attn=attn, w_out=w_out)


def initial_noise(cfg: ToyModelConfig) -> np.ndarray:
    """The z ~ N(0, I) starting tensor, reproducible from cfg.seed."""
    return _gaussian(cfg.seed, _NOISE_TAG, (cfg.n_f, cfg.h, cfg.w, cfg.c), 1.0)


def forward(
    e_t,
    z,
    cfg: ToyModelConfig,
    t: int | None = None,
    row_sum_log: list | None = None,
) -> np.ndarray:
    """Apply the k_3d-layer stack once.

    The timestep t is accepted for callers that loop over steps but does not
    condition the model; the stack is time-independent.
    """
    del t
    out = as_video(z)
    for layer in range(cfg.k_3d):
        out = attn3d(e_t, out, layer_params(cfg, layer), row_sum_log)
    return out


def generate(
    a: PromptEmbedding,
    b: PromptEmbedding,
    c: PromptEmbedding,
    k: int,
    t_steps: int,
    cfg: ToyModelConfig,
    row_sum_log: list | None = None,
) -> np.ndarray:
    """Denoise seeded Gaussian noise under the optimal interpolation of A, B.

    Runs t_steps down to 0 inclusive, so t_steps + 1 denoise applications.
    """
    if t_steps < 0:
        raise ValueError(f"t_steps must be >= 0, got {t_steps}")
    e_opt = find_optimal(a, b, c, k).embedding
    z = initial_noise(cfg)
    for t in range(t_steps, -1, -1):
        z = forward(e_opt, z, cfg, t=t, row_sum_log=row_sum_log)
    return z
