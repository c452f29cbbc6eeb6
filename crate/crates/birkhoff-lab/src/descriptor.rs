//! On-disk function descriptors: everything the CLI can evaluate pointwise,
//! saved bit-exactly (fixed-point values as hex strings).

use crate::error::{Error, Result};
use crate::fixed::{Frac, Precision};
use crate::piecewise::PiecewiseFn;
use crate::zoo::hilbert_example::hilbert_example_eval;
use crate::zoo::transfer::TransferResult;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FunctionDescriptor {
    Piecewise {
        function: PiecewiseFn,
    },
    /// closed-form counterexample function with geometric Fourier decay
    HilbertExample {
        a: f64,
    },
    /// trig polynomial given as a coboundary-transfer record (h side)
    TrigPolynomial {
        transfer: TransferResult,
    },
    /// rebuildable analytic non-coboundary function
    Noncoboundary {
        alpha: String,
        xi: f64,
        depth: usize,
        sep_inv: u64,
        measure_base: f64,
    },
}

pub enum Evaluator {
    Piecewise(PiecewiseFn),
    Hilbert(f64),
    Trig(TransferResult),
    Noncob(crate::zoo::noncob::NoncobFn),
}

impl Evaluator {
    pub fn eval(&self, x: Frac) -> f64 {
        match self {
            Evaluator::Piecewise(f) => f.eval(x),
            Evaluator::Hilbert(a) => hilbert_example_eval(*a, x),
            Evaluator::Trig(t) => t.eval_h(x),
            Evaluator::Noncob(f) => f.eval(x),
        }
    }
}

impl FunctionDescriptor {
    pub fn load(path: &std::path::Path) -> Result<FunctionDescriptor> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn into_evaluator(self, precision: Precision) -> Result<Evaluator> {
        match self {
            FunctionDescriptor::Piecewise { function } => {
                function.validate(precision)?;
                Ok(Evaluator::Piecewise(function))
            }
            FunctionDescriptor::HilbertExample { a } => {
                crate::zoo::hilbert_example::check_param(a)?;
                Ok(Evaluator::Hilbert(a))
            }
            FunctionDescriptor::TrigPolynomial { transfer } => Ok(Evaluator::Trig(transfer)),
            FunctionDescriptor::Noncoboundary {
                alpha,
                xi,
                depth,
                sep_inv,
                measure_base,
            } => {
                let rot = crate::cf::RotationNumber::parse(&alpha, precision)?;
                let params = crate::zoo::noncob::NoncobParams {
                    xi,
                    depth,
                    sep_inv,
                    measure_base,
                    ..Default::default()
                };
                let (f, _) = crate::zoo::noncob::build_noncoboundary(&rot, &params)?;
                Ok(Evaluator::Noncob(f))
            }
        }
    }
}

/// Spec records the cover auditor can read (written by `zoo`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum AuditableSpec {
    Plateau(crate::zoo::plateau::PlateauSpec),
    Holder(crate::zoo::holder::HolderSpec),
}

impl AuditableSpec {
    pub fn load(path: &std::path::Path) -> Result<AuditableSpec> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn good_set(&self) -> crate::arcs::ArcSet {
        match self {
            AuditableSpec::Plateau(p) => p.good_set.clone(),
            AuditableSpec::Holder(h) => h.good_set(),
        }
    }

    pub fn cover(&self) -> &[crate::zoo::plateau::CoverClass] {
        match self {
            AuditableSpec::Plateau(p) => &p.cover,
            AuditableSpec::Holder(h) => &h.cover,
        }
    }
}

pub fn parse_hex_point(s: &str) -> Result<Frac> {
    Frac::from_hex(s)
        .ok_or_else(|| Error::InvalidInput(format!("'{s}' is not a 32-nibble hex point")))
}
