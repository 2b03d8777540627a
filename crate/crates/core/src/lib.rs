//! Exact computations for completed twisted K-theory of loop groups at the
//! Tate curve: the coefficient ring `Z((q))`, root data, affine Weyl orbit
//! bases at positive and negative level, theta functions on tori and
//! Weyl-Kac characters as weight-graded q-series.
//!
//! Everything is integral. Series are truncated explicitly per value and
//! every truncation order is tracked through arithmetic.

pub mod affine_weyl;
pub mod json;
pub mod kac_characters;
pub mod linalg;
pub mod oracle;
pub mod qseries;
pub mod root_data;
pub mod theta_torus;
pub mod verify;
pub mod weighted;

pub use affine_weyl::{
    affine_orbit_reps, check_star, check_tempered, kappa_tau, negative_level_basis, pi1_act,
    shift_by_sigma, AffineOrbitRep, AffineWeylError, Base, GrowthDescriptor, LambdaTauPoint, Sign,
    Twisting,
};
pub use kac_characters::{
    affine_numerator, duality_bijection, duality_pairing, kac_character, AffineNumerator,
    KacCharacter, KacError,
};
pub use linalg::IntMatrix;
pub use qseries::{QSeries, QSeriesError};
pub use root_data::{load_root_datum, weyl_dim, weyl_elements, Coweight, RootDatum, RootDataError, TorusDatum, Weight, WeylElement};
pub use theta_torus::{
    abelian_duality_ranks, check_theta_invariance, classify_line_bundle, theta_basis,
    theta_pairing_matrix, LineBundleClass, RigidLineBundle, SeriesMatrix, ThetaError,
};
pub use weighted::WeightedQSeries;

/// Arbitrary-precision integer used for every series coefficient.
pub type Int = num_bigint::BigInt;

/// Any domain error, tagged with the module it came from.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error(transparent)]
    RootData(#[from] RootDataError),
    #[error(transparent)]
    AffineWeyl(#[from] AffineWeylError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Kac(#[from] KacError),
}

impl Error {
    /// `module::Variant`, e.g. `affine_weyl::NotPositive`.
    pub fn qualified_name(&self) -> String {
        match self {
            Error::QSeries(e) => format!("qseries::{}", e.name()),
            Error::RootData(e) => format!("root_data::{}", e.name()),
            Error::AffineWeyl(AffineWeylError::RootData(e)) => format!("root_data::{}", e.name()),
            Error::AffineWeyl(e) => format!("affine_weyl::{}", e.name()),
            Error::Theta(e) => format!("theta_torus::{}", e.name()),
            Error::Kac(KacError::AffineWeyl(e)) => Error::AffineWeyl(e.clone()).qualified_name(),
            Error::Kac(e) => format!("kac_characters::{}", e.name()),
        }
    }
}
