//! Dixmier-trace numerics: block spectra of weighted operators, the partial
//! sums `σ_N^p` and `γ_N`, the Calderón norm, logarithmic extrapolation of
//! the Dixmier limit and the zeta-residue (Tauberian) criterion.
//!
//! Spectra of truncated operators carry a *certified prefix*: the leading
//! values that provably coincide with those of the untruncated operator.
//! Extrapolation only ever uses checkpoints inside it.

mod partial;
mod spectrum;

pub use partial::{
    calderon_norm, default_checkpoints, dixmier_estimate, gamma, is_tie_safe, sigma_p, tauberian_residue,
    tauberian_zeta, TauberianZeta,
};
pub use spectrum::{
    collect_spectrum, eigen_sequence, singular_spectrum, EigenSequence, Provenance, SingularSpectrum,
    SpectralSequence, Spectrum, SpectrumKind, SpectrumSource, TailModel, Truncation,
};
