"""Numerical time-frequency norms: STFT, mixed quasi-norms, amalgams.

The package computes short-time Fourier transforms on explicit phase-space
grids and evaluates the families of (quasi-)norms built on top of them:
iterated mixed norms, Wiener amalgams with their two split variants,
modulation-type norms, coefficient-space norms of frequency combs, and the
finite cyclic Gabor model.  The point of the whole exercise is measuring
norm ratios that the corresponding function-space statements predict to be
bounded, at resolutions where the discretization error is under control.
"""

from .bases import (
    OrderedBasis,
    PhaseSplitBasis,
    dual_basis,
    phase_split,
    refine,
    scaled_basis,
    self_dual_scale,
    standard_basis,
)
from .corpus import CORPUS_SEED, CORPUS_VERSION, CorpusEntry, build_corpus, comb_entries, phase_fields
from .errors import (
    AliasingError,
    DefinitenessError,
    InvalidArgumentError,
    PreconditionError,
    RangeError,
    ResolutionError,
    SingularityError,
    TfnormsError,
    TruncationError,
    ValidationError,
)
from .exponents import ExponentVector, format_exponent, parse_exponent
from .fields import (
    GridSpec,
    SampledField,
    export_csv,
    load_binary,
    quadrature,
    restrict,
    sample,
    save_binary,
    weigh,
)
from .gabor import (
    GaborSystem,
    analysis,
    canonical_dual,
    discrete_stft,
    frame_bounds,
    frame_operator,
    frame_report,
    is_frame,
    min_frame_refinement,
    periodized_gaussian,
    semidiscrete_convolution,
    synthesis,
    window_change_domination,
    young_estimate_check,
)
from .mixed import (
    LatticeSeq,
    MixedNormSpec,
    discrete_mixed_norm,
    mixed_norm,
    quasi_triangle_check,
)
from .modulation import ModSpec, equivalence_study, mod_norm
from .periodic import (
    TrigPolynomial,
    coefficient_norm,
    distribution_action,
    fourier_coefficients,
    interleaved_permutation,
    periodic_equivalence_study,
    periodic_norm_triple,
)
from .stft import stft, stft_at, stft_trigpoly, subharmonic_check
from .weights import (
    Weight,
    certify_moderate,
    constant_weight,
    exponential_weight,
    polynomial_weight,
    product_weight,
    theta_rho,
)
from .wiener import (
    WienerSpec,
    embedding_check,
    local_control_sequence,
    script_norms,
    wiener_norm,
    wiener_var1,
    wiener_var2,
)
from .windows import Window, gaussian_window, hermite_window, sampled_window

__version__ = "0.1.0"
