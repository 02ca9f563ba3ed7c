//! Minimum distance of elliptic-curve AG codes through exact subset-sum
//! counting on the rational point group.

pub mod binomial;
pub mod bound;
pub mod chars;
pub mod code;
pub mod ec;
pub mod error;
pub mod ff;
pub mod group;
pub mod scan;
pub mod sieve;
pub mod ssp;

pub use bound::BoundReport;
pub use chars::{CharIndex, CharSumProfile};
pub use code::{EcagCode, EvaluationSet};
pub use ec::{Curve, CurveSpec, GroupStructure, Point, StructureCase};
pub use error::{Error, Result};
pub use ff::{Field, FieldElement, FieldSpec};
pub use group::AbelianGroup;
pub use scan::{NPolicy, ScanConfig, ScanReport, ScanRow};
pub use ssp::CountTable;
