//! Certified upper bounds for the multilinear Bohnenblust-Hille constants.
//!
//! * [`precision`]: dyadic interval arithmetic, `exp`/`ln`/`pow`, and the
//!   constants `gamma`, `D` and `log2 D`.
//! * [`sequences`]: the recursively defined bounds `M_n` and `J_n`.
//! * [`bounds`]: claims `K_n < P (n-1)^E`, their certification, and the
//!   printed prefactor tables.
//! * [`forms`]: small n-linear forms and empirical checks of the inequality.
//! * [`report`]: structured and tabular reports.

pub mod bounds;
pub mod forms;
pub mod precision;
pub mod report;
pub mod sequences;

pub use bounds::{
    certify_envelope, crossover, base_upper_bound, envelope_claims, implied_base, printed_tables,
    prefactor, theorem_claim, BoundClaim, BoundsError, CertResult, CertStatus, Coefficient,
    Relation, TableRow,
};
pub use forms::{
    bh_ratio, mixed_norm_lhs, random_form, sup_norm_complex_ascent, sup_norm_real_exact,
    verify_batch, CoefficientTensor, FormsError, RatioSample,
};
pub use precision::{
    compare_strict, d_constant, euler_gamma, interval_from_decimal, log2_interval, pow_interval,
    CertifiedInterval, Comparison, Decimal, FieldTag, PrecisionError, DEFAULT_PRECISION,
    MAX_PRECISION,
};
pub use report::{Report, ReportRow, RowStatus};
pub use sequences::{
    block_of, closed_form_m, j_sequence, m_sequence, BaseConstants, BlockIndex, SequenceError,
    SequenceKind, SequenceSpec,
};
