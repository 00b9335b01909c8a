//! Refinement probe certifying the grid and mode truncation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::potential::PotentialSpec;
use crate::resolvent::bmatrix::{EngineOptions, ResolventContext};
use crate::sheet::SheetLabel;
use crate::transverse::ModeBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// Twice the nodes on every panel.
    DoubleNodes,
    /// One more coupling step and `extra_modes` more transverse modes.
    Depth { extra_modes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub k: Complex64,
    pub base: Complex64,
    pub refined: Complex64,
    /// |refined − base| / max(|base|, 1).
    pub change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub refinement: Refinement,
    pub samples: Vec<ProbeSample>,
}

impl ProbeReport {
    pub fn max_change(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.change))
    }
}

/// Relative change of det(I + B) at `samples` when the discretization of
/// `ctx` is refined.
pub fn convergence_probe(
    spec: &PotentialSpec,
    ctx: &ResolventContext,
    samples: &[Complex64],
    refinement: Refinement,
) -> Result<ProbeReport> {
    let fine = refined_context(spec, ctx, refinement)?;
    let samples = samples
        .par_iter()
        .map(|&k| {
            let base = ctx.det_fn(k)?;
            let refined = fine.det_fn(k)?;
            let change = (refined - base).norm() / base.norm().max(1.0);
            Ok(ProbeSample { k, base, refined, change })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport { refinement, samples })
}

pub fn refined_context(spec: &PotentialSpec, ctx: &ResolventContext, refinement: Refinement) -> Result<ResolventContext> {
    let sheet: &SheetLabel = ctx.sheet();
    match refinement {
        Refinement::DoubleNodes => {
            ResolventContext::with_grid(spec, ctx.basis(), sheet, ctx.grid().refined(2), ctx.options())
        }
        Refinement::Depth { extra_modes } => {
            let basis = ModeBasis::build(ctx.basis().cross_section(), ctx.basis().len() + extra_modes)?;
            let opts = EngineOptions { depth: ctx.options().depth + 1, ..ctx.options() };
            ResolventContext::with_grid(spec, &basis, sheet, ctx.grid().clone(), opts)
        }
    }
}
