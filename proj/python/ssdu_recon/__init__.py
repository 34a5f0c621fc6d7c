"""Multi-mask self-supervised MRI reconstruction (compiled core)."""

from ._ssdu import (  # noqa: F401
    ConfigError,
    DataError,
    DimensionError,
    FormatError,
    NumericalError,
    __version__,
    apply_adjoint,
    apply_encoding,
    cg_sense,
    fft2c,
    gen_cyclic_multi_mask,
    gen_multi_mask,
    gen_sheared_pattern,
    ifft2c,
    make_phantom,
    nmse,
    reconstruct,
    simulate_acquisition,
    simulate_coils,
    split_ssdu,
    ssim,
)
