//! Exact-arithmetic toolkit for unit-identity certificates over square-root
//! towers of number fields.
//!
//! Everything in this crate is exact: rationals everywhere, Sturm chains for
//! real-root questions, resultants for eliminations. No floating point sits
//! on any decision path.

pub mod census;
pub mod constructions;
pub mod cyclo;
pub mod cyclotomic;
pub mod embedding;
pub mod foursquares;
pub mod integrality;
pub mod par;
pub mod poly;
pub mod positivity;
pub mod rat;
pub mod sturm;
pub mod tower;
pub mod unitsearch;

pub use census::{
    census, census_with, jr_profile, kronecker_completeness, kronecker_entry,
    roots_strictly_inside, CensusEntry, CensusError, CensusParams, CensusTable,
    CompletenessReport, JrProfile, KroneckerEntry, DEFAULT_CELL_BUDGET,
};
pub use constructions::{
    build_sum32, build_unit_pair, build_x_witness, verify_sum32, verify_unit_pair,
    verify_x_witness, BuildError, ClauseResult, Sum32Cert, UnitPairCert, VerifyReport,
    XWitnessCert,
};
pub use cyclo::{
    cyclotomic_base_field, cyclotomic_cm_field, real_subfield_poly, CycloError,
    CyclotomicField,
};
pub use cyclotomic::{cyclotomic, divisors, euler_phi, inverse_phi};
pub use embedding::{
    embed, is_cm_tower, real_embeddings, signature, EmbedError, EmbeddingBox,
    EmbeddingEnclosure, RealEmbedding, Signature,
};
pub use foursquares::{
    search_four_squares, search_four_squares_with, verify_four_squares, FourSquaresCert,
    SearchError,
};
pub use par::Exec;
pub use integrality::{
    conj_ratio, expected_unit_rank, is_algebraic_integer, is_root_of_unity, is_unit,
    probe_mu_trivial, r_m_membership, IntegralityError, ProbeReport, ResidueWitness,
    RootOfUnityReport, UnitEvidence,
};
pub use poly::{interpolate, PolyError, RatPoly};
pub use positivity::{
    is_totally_nonnegative, is_totally_positive, is_totally_real, totally_avoids,
    totally_in, IntervalEnd, IntervalSpec, PositivityError,
};
pub use rat::Rat;
pub use sturm::{
    count_real_roots, isolate_real_roots, sturm_count, SturmChain, SturmError,
};
pub use tower::{sqrt_in_tower, AlgNum, Tower, TowerError};
pub use unitsearch::{
    search_antisymmetric_unit, verify_antisymmetric_unit, AntisymmetricUnit, SearchOutcome,
    UnitFamily, UnitSearchError,
};
