//! Prime-side spectral scans for zeta and Dirichlet L-functions.
//!
//! The crate evaluates explicit-formula indicators built purely from
//! prime-power data: sums over p^n <= limit whose dips along the ordinate
//! axis mark nontrivial zeros, the character-table decomposition that splits
//! prime residue classes into per-character zero spectra, and zero-side
//! cross-checks (Landau sums, indicator kernels) against ingested zero
//! tables.

pub mod characters;
pub mod cli;
pub mod decomp;
pub mod digamma;
pub mod error;
pub mod figures;
pub mod indicator;
pub mod output;
pub mod primes;
pub mod sum;
pub mod validate;
pub mod zeros;

pub use characters::{
    character_group, conductor_and_parent, product_character, CharacterTable, DirichletCharacter,
    InductionRecord, Rotation, UnitGroup,
};
pub use decomp::{
    assemble_system, character_prime_sum, class_scan, class_sums, compensation_for,
    invert_to_class, mixed_subsystem, quadratic_split, quadratic_split_scan, twisted_class_sums,
    ClassSample, Compensation, DecompositionSystem, PoissonTerm, QsplitSample, SystemRow,
};
pub use digamma::{digamma, smooth_density, Parity, SmoothParity, SmoothTermSpec};
pub use error::{Error, Result};
pub use figures::{reproduce, FigureId, FigureRequest};
pub use indicator::{
    dirichlet_indicator, dirichlet_scan, exponential_noise, main_term, origin_identity,
    pointwise_trace, scan, zeta_indicator, zeta_scan, EpsilonMode, Grid, IndicatorSample,
    ScanRequest, Target,
};
pub use output::{fmt_f64, fmt_opt_f64, parse_scan_csv, read_scan_csv, to_json_text, TableDoc};
pub use primes::{chebyshev_psi, prime_powers, Cutoff, PrimePowerTerm, ResidueFilter};
pub use validate::{
    derive_zero_table, run_suite, segmented_scan, Criterion, SuiteMode, SuiteReport,
};
pub use zeros::{
    detect_spikes, indicator_kernel, landau_sum, load_zeros, load_zeros_auto, origin_zero_side,
    parse_zeros, prime_side_trace, von_mangoldt_real, zero_side_trace, LandauSum, PrimeSidePoint,
    SpikeMatch, ZeroFormat, ZeroSidePoint, ZeroTable,
};
