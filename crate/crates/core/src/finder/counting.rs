//! Counting functions, slope fits and the separable mode map.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::finder::locate::{Region, ResonanceList};
use crate::potential::{Geometry, SupportBox};
use crate::sheet::{tilde_set, SheetLabel};
use crate::transverse::ModeBasis;

/// Fewest zeros at the top of the window for which a slope is fitted.
pub const MIN_FIT_COUNT: u64 = 20;

/// N(r) on a grid of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingFunction {
    pub radii: Vec<f64>,
    pub counts: Vec<u64>,
}

impl CountingFunction {
    pub fn at(&self, r: f64) -> Option<u64> {
        self.radii.iter().position(|&x| x == r).map(|i| self.counts[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountingFit {
    pub radii: Vec<f64>,
    pub counts: Vec<u64>,
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    /// Root-mean-square deviation of the fit on the window.
    pub residual: f64,
}

/// N(r) = Σ multiplicities over located zeros and clusters with |k| < r.
pub fn counting_function(list: &ResonanceList, region: &Region, radii: &[f64]) -> CountingFunction {
    let mut radii: Vec<f64> = radii.iter().copied().filter(|&r| r > region.alpha && r <= region.r_max).collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weighted: Vec<(f64, u64)> = list.zeros.iter().map(|z| (z.k.norm(), z.multiplicity as u64)).collect();
    weighted.extend(list.clusters.iter().map(|c| (c.center.norm(), c.winding.max(0) as u64)));
    let counts = radii.iter().map(|&r| weighted.iter().filter(|(m, _)| *m < r).map(|(_, w)| w).sum()).collect();
    CountingFunction { radii, counts }
}

/// `n` equally spaced radii in (α, r_max], the last being r_max.
pub fn radii_grid(region: &Region, n: usize) -> Vec<f64> {
    let lo = region.alpha;
    (1..=n).map(|i| lo + (region.r_max - lo) * i as f64 / n as f64).collect()
}

/// Least-squares line through (r, N(r)) for r in `window`.
pub fn fit_slope(n: &CountingFunction, window: (f64, f64)) -> Result<CountingFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(ScatterError::FitRefused(format!("empty window [{lo}, {hi}]")));
    }
    let pts: Vec<(f64, f64)> = n
        .radii
        .iter()
        .zip(&n.counts)
        .filter(|(r, _)| **r >= lo && **r <= hi)
        .map(|(&r, &c)| (r, c as f64))
        .collect();
    if pts.len() < 2 {
        return Err(ScatterError::FitRefused(format!("{} sampled radii in [{lo}, {hi}]", pts.len())));
    }
    let top = pts.last().map(|p| p.1 as u64).unwrap_or(0);
    if top < MIN_FIT_COUNT {
        return Err(ScatterError::FitRefused(format!(
            "N({hi}) = {top} < {MIN_FIT_COUNT} zeros; enlarge r_max"
        )));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum::<f64>() / m).sqrt();
    Ok(CountingFit {
        radii: n.radii.clone(),
        counts: n.counts.clone(),
        slope,
        intercept,
        window,
        residual,
    })
}

/// Default window [r_max / 2, r_max].
pub fn default_window(region: &Region) -> (f64, f64) {
    (0.5 * region.r_max, region.r_max)
}

/// Largest slope allowed by the support width and card(Ẽ).
pub fn slope_bound(geometry: Geometry, support: &SupportBox, card_tilde: usize) -> f64 {
    let width = match geometry {
        Geometry::Full => support.diameter(),
        Geometry::Half { .. } => support.half_width,
    };
    2.0 / PI * width * card_tilde as f64
}

/// A cylinder resonance predicted from a one-dimensional one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedZero {
    pub k: Complex64,
    /// Mode l ∈ Ẽ through which ζ enters.
    pub mode: usize,
    pub zeta: Complex64,
    pub multiplicity: u32,
}

/// Lower root of k² = ζ² + σ_l² − ν_{j0}² for each l ∈ Ẽ; zeros outside
/// `region` are dropped.
pub fn mode_map(zeros: &[(Complex64, u32)], sheet: &SheetLabel, basis: &ModeBasis, region: Option<&Region>) -> Vec<MappedZero> {
    let nu0 = basis.nu_sq(sheet.anchor());
    let mut out = Vec::new();
    for l in tilde_set(sheet, basis).members {
        let shift = basis.sigma_sq(l) - nu0;
        for &(zeta, multiplicity) in zeros {
            if zeta.im >= 0.0 {
                continue;
            }
            let k = if shift == 0.0 {
                zeta
            } else {
                let k = (zeta * zeta + shift).sqrt();
                if k.im > 0.0 { -k } else { k }
            };
            if region.map_or(true, |r| r.contains(k)) {
                out.push(MappedZero { k, mode: l, zeta, multiplicity });
            }
        }
    }
    out
}
