//! Explicit constructions: every function the experiments need, each returned
//! together with its certified good set and parameter record.

pub mod hilbert_example;
pub mod holder;
pub mod noncob;
pub mod plateau;
pub mod rademacher;
pub mod transfer;

pub use hilbert_example::hilbert_example_eval;
pub use holder::{build_holder, random_cusp_function, HolderCase, HolderParams, HolderSpec};
pub use noncob::{build_noncoboundary, NonCoboundarySpec, NoncobParams};
pub use plateau::{build_plateau, CoverClass, PlateauSpec};
pub use rademacher::{build_rademacher_step, smooth_step, RademacherStepSpec, StepFn};
pub use transfer::{trig_coboundary_transfer, TransferResult};
