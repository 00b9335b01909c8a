//! One-dimensional resonances of piecewise-constant potentials from 2×2
//! transfer matrices. Independent of the resolvent engine.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::finder::locate::{locate, LocateOptions, Region, ResonanceList};
use crate::transverse::BoundaryCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OracleDomain {
    Line,
    HalfLine { bc: BoundaryCondition },
}

/// Potential equal to `values[m]` on [breakpoints[m], breakpoints[m+1]) and
/// zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleProfile {
    pub domain: OracleDomain,
    pub breakpoints: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl OracleProfile {
    pub fn new(domain: OracleDomain, breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let p = OracleProfile { domain, breakpoints, values };
        p.validate()?;
        Ok(p)
    }

    pub fn zero(domain: OracleDomain) -> Self {
        OracleProfile { domain, breakpoints: Vec::new(), values: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.is_empty() && self.values.is_empty() {
            return Ok(());
        }
        if self.breakpoints.len() != self.values.len() + 1 {
            return Err(ScatterError::InvalidPotential(format!(
                "{} breakpoints for {} values",
                self.breakpoints.len(),
                self.values.len()
            )));
        }
        if self.breakpoints.iter().any(|x| !x.is_finite()) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(ScatterError::InvalidPotential("non-finite profile entry".into()));
        }
        if self.breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ScatterError::InvalidPotential("breakpoints must increase strictly".into()));
        }
        if matches!(self.domain, OracleDomain::HalfLine { .. }) && self.breakpoints[0] < 0.0 {
            return Err(ScatterError::InvalidPotential("half-line profile must lie in [0, ∞)".into()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// Width of the support: its diameter on the line, its right end on the
    /// half-line.
    pub fn width(&self) -> f64 {
        match (self.breakpoints.first(), self.breakpoints.last()) {
            (Some(a), Some(b)) => match self.domain {
                OracleDomain::Line => b - a,
                OracleDomain::HalfLine { .. } => *b,
            },
            _ => 0.0,
        }
    }

    /// Layers (width, value) including the free gap [0, a] on the half-line.
    fn layers(&self) -> Vec<(f64, Complex64)> {
        let mut out = Vec::new();
        if let (OracleDomain::HalfLine { .. }, Some(&a)) = (self.domain, self.breakpoints.first()) {
            if a > 0.0 {
                out.push((a, Complex64::new(0.0, 0.0)));
            }
        }
        for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
            out.push((w[1] - w[0], *v));
        }
        out
    }
}

/// Propagates (u, u′) across one layer where u″ = (c − ζ²) u.
fn propagate(state: [Complex64; 2], width: f64, kappa_sq: Complex64) -> [Complex64; 2] {
    let kappa = kappa_sq.sqrt();
    let t = kappa * width;
    let (c, sinc) = if t.norm() < 1e-8 {
        (Complex64::new(1.0, 0.0) - 0.5 * t * t, Complex64::new(width, 0.0) * (1.0 - t * t / 6.0))
    } else {
        (t.cos(), t.sin() / kappa)
    };
    let [u, du] = state;
    [c * u + sinc * du, -kappa_sq * sinc * u + c * du]
}

/// Outgoing-condition function: entire in ζ away from ζ = 0, equal to 1
/// for the zero profile, vanishing exactly at resonances.
pub fn outgoing_defect(profile: &OracleProfile, zeta: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if profile.breakpoints.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let (mut state, end, norm) = match profile.domain {
        OracleDomain::Line => {
            let x0 = profile.breakpoints[0];
            let u = (-i * zeta * x0).exp();
            ([u, -i * zeta * u], *profile.breakpoints.last().unwrap(), None)
        }
        OracleDomain::HalfLine { bc } => {
            let start = match bc {
                BoundaryCondition::Dirichlet => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                BoundaryCondition::Neumann => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            };
            (start, *profile.breakpoints.last().unwrap(), Some(bc))
        }
    };
    for (w, c) in profile.layers() {
        state = propagate(state, w, zeta * zeta - c);
    }
    let f = state[1] - i * zeta * state[0];
    let phase = (i * zeta * end).exp();
    match norm {
        None => f * phase / (-2.0 * i * zeta),
        Some(BoundaryCondition::Dirichlet) => f * phase,
        Some(BoundaryCondition::Neumann) => f * phase / (-i * zeta),
    }
}

/// Resonances of the profile in `region` with multiplicities.
pub fn oracle_1d(profile: &OracleProfile, region: &Region) -> Result<Vec<(Complex64, u32)>> {
    Ok(oracle_list(profile, region)?.zeros.iter().map(|z| (z.k, z.multiplicity)).collect())
}

/// Full search output for the profile in `region`.
pub fn oracle_list(profile: &OracleProfile, region: &Region) -> Result<ResonanceList> {
    profile.validate()?;
    if profile.is_zero() {
        return Ok(ResonanceList::empty());
    }
    let f = |z: Complex64| Ok(outgoing_defect(profile, z));
    let opts = LocateOptions::for_phase_rate(profile.width(), 1);
    Ok(locate(region, &f, &opts))
}
