"""richspace: interpolation-embedding search, a toy text-to-video denoiser,
and brute-force witness checks for embedding-coverage bounds.

The core operation takes two prompt embeddings A and B plus a guidance
embedding C, projects C onto the A-B line, scores every interpolation step
against that perpendicular foot (over both the padded matrices and their
non-padding leading rows), and returns the step with the highest summed
similarity.  Around it sit a seeded toy denoising pipeline that exercises
the embedding end to end, witness searches showing that a finite sentence
space cannot cover a continuous video annulus, and bit-exact tensor and
curve interchange formats.
"""

from .errors import (
    BadMagic,
    DegenerateDirection,
    DimError,
    DimensionMismatch,
    InvalidIndex,
    IoError,
    ManifestError,
    MissingContinuousMap,
    NonIntegerMap,
    NotBiLipschitz,
    RichSpaceError,
    ShapeError,
    ShapeMismatch,
    SingularRowSum,
    UnsupportedDtype,
    UnsupportedOrder,
    ZeroRow,
)
from .tensor_core import (
    as_matrix,
    as_video,
    frob_inner,
    lerp,
    row_cosine_mean,
    zero_row_threshold,
)
from .interp_finder import (
    DEFAULT_STEPS,
    CurveEntry,
    Mix3Selection,
    OptimalSelection,
    PromptEmbedding,
    SimilarityCurve,
    cosine_sim_curve,
    find_optimal,
    mix3,
    perpendicular_foot,
)
from .toy_model import (
    AttentionWeights,
    Attn3dParams,
    ConvKernelBank,
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
from .theory_verifier import (
    DiscreteVideoMap,
    WitnessReport,
    any_function_witness_1d,
    ball_volume,
    bilipschitz_witness,
    covering_witness,
    integer_witness,
    load_map_json,
    report_to_json_dict,
    save_map_json,
)
from .io_formats import (
    Manifest,
    load_manifest,
    load_prompt_embedding,
    read_curve_csv,
    read_curve_json,
    read_tensor,
    save_manifest,
    write_curve,
    write_tensor,
)

__version__ = "0.1.0"
