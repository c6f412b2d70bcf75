//! Calculators for J-invariants of semisimple groups and the motivic
//! decompositions of their projective homogeneous varieties.

pub mod error;
pub mod idempotent_lab;
pub mod jinvariant;
pub mod kac_table;
pub mod motive;
pub mod poly;
pub mod root_data;
pub mod truncated_ring;

pub use error::{Error, Result};
pub use idempotent_lab::{CrtSplit, GradedEndo, IntMatrix, ModMatrix};
pub use jinvariant::JInvariant;
pub use kac_table::{ConstraintRule, GroupForm, Isogeny, TableEntry, TorsionData};
pub use motive::{IntegralDecomposition, MotiveDecomposition, RationalCycleCounts};
pub use poly::Poly;
pub use root_data::{DynkinType, ParabolicSubset, Series, Splitting, TitsData};
pub use truncated_ring::{Monomial, RingElement, TruncatedRing};
