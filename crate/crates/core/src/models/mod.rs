//! Built-in models with closed-form averaging maps.

pub mod jc;
pub mod product_basis;
pub mod two_band;

pub use jc::{Cutoff, JcParams};
pub use product_basis::ProductBasisModel;
pub use two_band::TwoBandParams;
