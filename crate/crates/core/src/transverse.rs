//! Cross-sections of the cylinder, their transverse eigenpairs and the
//! transverse overlap integrals used to couple modes.
//!
//! Only one-dimensional cross-sections are supported: the circle and the
//! interval with Dirichlet or Neumann conditions. Both have closed-form
//! spectra, so no eigensolver is involved. Mode indices are 1-based and
//! follow the nondecreasing order of the eigenvalues.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::quadrature::gauss_legendre_on;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CrossSection {
    Circle { circumference: f64 },
    Interval { length: f64, bc: BoundaryCondition },
}

impl CrossSection {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CrossSection::Circle { circumference } if !(circumference > 0.0) || !circumference.is_finite() => {
                Err(ScatterError::InvalidCrossSection(format!(
                    "circle circumference must be positive, got {circumference}"
                )))
            }
            CrossSection::Interval { length, .. } if !(length > 0.0) || !length.is_finite() => {
                Err(ScatterError::InvalidCrossSection(format!(
                    "interval length must be positive, got {length}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Volume of Y.
    pub fn measure(&self) -> f64 {
        match *self {
            CrossSection::Circle { circumference } => circumference,
            CrossSection::Interval { length, .. } => length,
        }
    }

    /// Angular frequency ω such that every eigenfunction and every
    /// trigonometric profile is a combination of e^{i s ω y}, s ∈ ℤ.
    pub fn base_frequency(&self) -> f64 {
        match *self {
            CrossSection::Circle { circumference } => 2.0 * PI / circumference,
            CrossSection::Interval { length, .. } => PI / length,
        }
    }

    /// ∫_Y e^{i t ω y} dy.
    fn exp_integral(&self, t: i64) -> Complex64 {
        match *self {
            CrossSection::Circle { circumference } => {
                if t == 0 {
                    Complex64::new(circumference, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            CrossSection::Interval { length, .. } => {
                if t == 0 {
                    Complex64::new(length, 0.0)
                } else {
                    let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                    // (a/π)((-1)^t - 1)/(i t)
                    Complex64::new(0.0, -(length / PI) * (sign - 1.0) / t as f64)
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            CrossSection::Circle { circumference } => format!("circle({circumference})"),
            CrossSection::Interval { length, bc } => {
                format!("interval({length}, {})", bc_name(bc))
            }
        }
    }
}

pub(crate) fn bc_name(bc: BoundaryCondition) -> &'static str {
    match bc {
        BoundaryCondition::Dirichlet => "dirichlet",
        BoundaryCondition::Neumann => "neumann",
    }
}

/// Closed-form shape of a transverse eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeShape {
    /// e^{i n ω y} / sqrt(|Y|) on the circle.
    Fourier(i64),
    /// sqrt(2/a) sin(n π y / a) on the Dirichlet interval.
    Sine(u64),
    /// Cosine mode on the Neumann interval (n = 0 is the constant).
    Cosine(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransverseMode {
    pub index: usize,
    pub eigenvalue: f64,
    pub shape: ModeShape,
    omega: f64,
    norm: f64,
}

impl TransverseMode {
    pub fn eval(&self, y: f64) -> Complex64 {
        let th = self.omega * y;
        match self.shape {
            ModeShape::Fourier(n) => Complex64::from_polar(self.norm, n as f64 * th),
            ModeShape::Sine(n) => Complex64::new(self.norm * (n as f64 * th).sin(), 0.0),
            ModeShape::Cosine(n) => Complex64::new(self.norm * (n as f64 * th).cos(), 0.0),
        }
    }

    /// φ(y) = Σ c e^{i s ω y}.
    fn exponentials(&self) -> Vec<(i64, Complex64)> {
        let c = self.norm;
        match self.shape {
            ModeShape::Fourier(n) => vec![(n, Complex64::new(c, 0.0))],
            ModeShape::Sine(n) => {
                let n = n as i64;
                vec![
                    (n, Complex64::new(0.0, -0.5 * c)),
                    (-n, Complex64::new(0.0, 0.5 * c)),
                ]
            }
            ModeShape::Cosine(0) => vec![(0, Complex64::new(c, 0.0))],
            ModeShape::Cosine(n) => {
                let n = n as i64;
                vec![(n, Complex64::new(0.5 * c, 0.0)), (-n, Complex64::new(0.5 * c, 0.0))]
            }
        }
    }

    /// Largest |s| among the exponentials of this mode.
    pub fn harmonic(&self) -> i64 {
        match self.shape {
            ModeShape::Fourier(n) => n,
            ModeShape::Sine(n) | ModeShape::Cosine(n) => n as i64,
        }
    }
}

/// Transverse eigenpairs up to a cutoff together with the distinct
/// eigenvalues ν_j² and the map l ↦ j.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    cross_section: CrossSection,
    modes: Vec<TransverseMode>,
    distinct: Vec<f64>,
    mode_to_distinct: Vec<usize>,
    last_group_complete: bool,
}

impl ModeBasis {
    /// First `l_max` eigenpairs in nondecreasing order.
    pub fn build(cross_section: CrossSection, l_max: usize) -> Result<Self> {
        cross_section.validate()?;
        if l_max == 0 {
            return Err(ScatterError::InvalidCrossSection(
                "mode cutoff L_max must be at least 1".into(),
            ));
        }
        let omega = cross_section.base_frequency();
        let measure = cross_section.measure();
        let mut modes = Vec::with_capacity(l_max);
        match cross_section {
            CrossSection::Circle { .. } => {
                // n = 0, 1, -1, 2, -2, ...
                let norm = measure.sqrt().recip();
                let mut n: i64 = 0;
                while modes.len() < l_max {
                    let ev = (n as f64 * omega).powi(2);
                    modes.push((ModeShape::Fourier(n), ev, norm));
                    if n > 0 && modes.len() < l_max {
                        modes.push((ModeShape::Fourier(-n), ev, norm));
                    }
                    n += 1;
                }
            }
            CrossSection::Interval { bc, .. } => {
                let start = match bc {
                    BoundaryCondition::Dirichlet => 1,
                    BoundaryCondition::Neumann => 0,
                };
                for n in start..start + l_max as u64 {
                    let ev = (n as f64 * omega).powi(2);
                    let (shape, norm) = match bc {
                        BoundaryCondition::Dirichlet => (ModeShape::Sine(n), (2.0 / measure).sqrt()),
                        BoundaryCondition::Neumann if n == 0 => {
                            (ModeShape::Cosine(0), measure.sqrt().recip())
                        }
                        BoundaryCondition::Neumann => (ModeShape::Cosine(n), (2.0 / measure).sqrt()),
                    };
                    modes.push((shape, ev, norm));
                }
            }
        }
        let modes: Vec<TransverseMode> = modes
            .into_iter()
            .enumerate()
            .map(|(i, (shape, eigenvalue, norm))| TransverseMode {
                index: i + 1,
                eigenvalue,
                shape,
                omega,
                norm,
            })
            .collect();

        let mut distinct: Vec<f64> = Vec::new();
        let mut mode_to_distinct = Vec::with_capacity(modes.len());
        for m in &modes {
            if distinct.last() != Some(&m.eigenvalue) {
                distinct.push(m.eigenvalue);
            }
            mode_to_distinct.push(distinct.len());
        }
        let last_group_complete = match cross_section {
            CrossSection::Circle { .. } => {
                matches!(modes.last().map(|m| m.shape), Some(ModeShape::Fourier(n)) if n <= 0)
            }
            CrossSection::Interval { .. } => true,
        };
        Ok(ModeBasis {
            cross_section,
            modes,
            distinct,
            mode_to_distinct,
            last_group_complete,
        })
    }

    pub fn cross_section(&self) -> CrossSection {
        self.cross_section
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[TransverseMode] {
        &self.modes
    }

    /// Mode with 1-based index `l`.
    pub fn mode(&self, l: usize) -> Result<&TransverseMode> {
        self.check_index(l)?;
        Ok(&self.modes[l - 1])
    }

    pub fn check_index(&self, l: usize) -> Result<()> {
        if l == 0 || l > self.modes.len() {
            Err(ScatterError::ModeIndex {
                index: l,
                len: self.modes.len(),
            })
        } else {
            Ok(())
        }
    }

    /// σ_l².
    pub fn sigma_sq(&self, l: usize) -> f64 {
        self.modes[l - 1].eigenvalue
    }

    /// The distinct eigenvalues ν_1² < ν_2² < ….
    pub fn distinct(&self) -> &[f64] {
        &self.distinct
    }

    pub fn distinct_count(&self) -> usize {
        self.distinct.len()
    }

    /// ν_j² for 1-based `j`.
    pub fn nu_sq(&self, j: usize) -> f64 {
        self.distinct[j - 1]
    }

    /// j such that σ_l² = ν_j².
    pub fn distinct_index_of(&self, l: usize) -> usize {
        self.mode_to_distinct[l - 1]
    }

    pub fn mode_to_distinct(&self) -> &[usize] {
        &self.mode_to_distinct
    }

    /// Multiplicity of ν_j² within this basis.
    pub fn multiplicity(&self, j: usize) -> usize {
        self.mode_to_distinct.iter().filter(|&&d| d == j).count()
    }

    /// True when the basis holds every eigenfunction of ν_j².
    pub fn group_complete(&self, j: usize) -> bool {
        j < self.distinct.len() || (j == self.distinct.len() && self.last_group_complete)
    }

    /// Gram matrix of the basis from closed-form overlaps.
    pub fn gram_matrix(&self) -> Vec<Vec<Complex64>> {
        let one = YProfile::Constant(Complex64::new(1.0, 0.0));
        (1..=self.len())
            .map(|l| {
                (1..=self.len())
                    .map(|m| pair_integral(self, l, m, &one).expect("indices in range"))
                    .collect()
            })
            .collect()
    }
}

/// One term c·e^{i order ω y} of a trigonometric y-profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub order: i64,
    pub coeff: Complex64,
}

/// Transverse dependence of a separable potential term.
#[derive(Debug, Clone, PartialEq)]
pub enum YProfile {
    Constant(Complex64),
    /// Σ c_h e^{i h ω y} with ω the base frequency of the cross-section.
    Trig(Vec<Harmonic>),
    /// Values at y_i = i |Y| / M, i = 0..=M, linearly interpolated.
    Sampled(Vec<Complex64>),
}

impl YProfile {
    /// a·cos(m ω y)
    pub fn cosine(order: i64, amplitude: Complex64) -> Vec<Harmonic> {
        if order == 0 {
            return vec![Harmonic { order: 0, coeff: amplitude }];
        }
        vec![
            Harmonic { order, coeff: amplitude * 0.5 },
            Harmonic { order: -order, coeff: amplitude * 0.5 },
        ]
    }

    /// a·sin(m ω y)
    pub fn sine(order: i64, amplitude: Complex64) -> Vec<Harmonic> {
        let half = amplitude * Complex64::new(0.0, -0.5);
        vec![
            Harmonic { order, coeff: half },
            Harmonic { order: -order, coeff: -half },
        ]
    }

    pub fn eval(&self, cs: &CrossSection, y: f64) -> Complex64 {
        match self {
            YProfile::Constant(c) => *c,
            YProfile::Trig(hs) => {
                let w = cs.base_frequency();
                hs.iter()
                    .map(|h| h.coeff * Complex64::from_polar(1.0, h.order as f64 * w * y))
                    .sum()
            }
            YProfile::Sampled(v) => {
                if v.len() == 1 {
                    return v[0];
                }
                let pieces = (v.len() - 1) as f64;
                let s = (y / cs.measure()).clamp(0.0, 1.0) * pieces;
                let i = (s.floor() as usize).min(v.len() - 2);
                let t = s - i as f64;
                v[i] * (1.0 - t) + v[i + 1] * t
            }
        }
    }

    /// Upper bound on sup_y |profile(y)|; exact for constant and sampled
    /// profiles, the sum of coefficient magnitudes for trigonometric ones.
    pub fn sup_bound(&self) -> f64 {
        match self {
            YProfile::Constant(c) => c.norm(),
            YProfile::Trig(hs) => hs.iter().map(|h| h.coeff.norm()).sum(),
            YProfile::Sampled(v) => v.iter().fold(0.0, |m, c| m.max(c.norm())),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup_bound() == 0.0
    }

    pub fn is_real_valued(&self) -> bool {
        match self {
            YProfile::Constant(c) => c.im == 0.0,
            YProfile::Sampled(v) => v.iter().all(|c| c.im == 0.0),
            YProfile::Trig(_) => {
                let merged = self.merged_harmonics();
                merged.iter().all(|&(h, c)| {
                    let partner = merged
                        .iter()
                        .find(|&&(g, _)| g == -h)
                        .map(|&(_, d)| d)
                        .unwrap_or_default();
                    (c - partner.conj()).norm() == 0.0
                })
            }
        }
    }

    /// Value if the profile does not depend on y.
    pub fn constant_value(&self) -> Option<Complex64> {
        match self {
            YProfile::Constant(c) => Some(*c),
            YProfile::Trig(_) => {
                let merged = self.merged_harmonics();
                if merged.iter().all(|&(h, c)| h == 0 || c.norm() == 0.0) {
                    Some(merged.iter().filter(|(h, _)| *h == 0).map(|(_, c)| *c).sum())
                } else {
                    None
                }
            }
            YProfile::Sampled(v) => {
                if v.iter().all(|c| *c == v[0]) {
                    Some(v[0])
                } else {
                    None
                }
            }
        }
    }

    /// Largest |h| among nonzero harmonics; `None` for sampled profiles,
    /// whose coupling has unbounded bandwidth.
    pub fn bandwidth(&self) -> Option<i64> {
        match self {
            YProfile::Constant(_) => Some(0),
            YProfile::Trig(hs) => Some(
                hs.iter()
                    .filter(|h| h.coeff.norm() > 0.0)
                    .map(|h| h.order.abs())
                    .max()
                    .unwrap_or(0),
            ),
            YProfile::Sampled(_) => {
                if self.constant_value().is_some() {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    fn merged_harmonics(&self) -> Vec<(i64, Complex64)> {
        let mut out: Vec<(i64, Complex64)> = Vec::new();
        if let YProfile::Trig(hs) = self {
            for h in hs {
                match out.iter_mut().find(|(o, _)| *o == h.order) {
                    Some(entry) => entry.1 += h.coeff,
                    None => out.push((h.order, h.coeff)),
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> YProfile {
        match self {
            YProfile::Constant(v) => YProfile::Constant(v * c),
            YProfile::Trig(hs) => YProfile::Trig(
                hs.iter()
                    .map(|h| Harmonic { order: h.order, coeff: h.coeff * c })
                    .collect(),
            ),
            YProfile::Sampled(v) => YProfile::Sampled(v.iter().map(|x| x * c).collect()),
        }
    }

    pub fn conj(&self) -> YProfile {
        match self {
            YProfile::Constant(v) => YProfile::Constant(v.conj()),
            YProfile::Trig(hs) => YProfile::Trig(
                hs.iter()
                    .map(|h| Harmonic { order: -h.order, coeff: h.coeff.conj() })
                    .collect(),
            ),
            YProfile::Sampled(v) => YProfile::Sampled(v.iter().map(|x| x.conj()).collect()),
        }
    }
}

/// ∫_Y weight(y) φ_m(y) conj(φ_l(y)) dvol_Y.
///
/// Closed form for constant and trigonometric weights; composite
/// Gauss–Legendre on each linear piece for sampled weights.
pub fn pair_integral(basis: &ModeBasis, l: usize, m: usize, weight: &YProfile) -> Result<Complex64> {
    basis.check_index(l)?;
    basis.check_index(m)?;
    let cs = basis.cross_section();
    match weight {
        YProfile::Constant(c) => Ok(if l == m { *c } else { Complex64::new(0.0, 0.0) }),
        YProfile::Trig(hs) => {
            let pm = basis.modes[m - 1].exponentials();
            let pl = basis.modes[l - 1].exponentials();
            let mut acc = Complex64::new(0.0, 0.0);
            for h in hs {
                for &(sm, cm) in &pm {
                    for &(sl, cl) in &pl {
                        acc += h.coeff * cm * cl.conj() * cs.exp_integral(h.order + sm - sl);
                    }
                }
            }
            Ok(acc)
        }
        YProfile::Sampled(_) => Ok(pair_integral_quadrature(basis, l, m, weight, 1)),
    }
}

/// Quadrature evaluation of the overlap; `refine` multiplies the node count
/// per piece (used to check quadrature convergence).
pub fn pair_integral_quadrature(
    basis: &ModeBasis,
    l: usize,
    m: usize,
    weight: &YProfile,
    refine: usize,
) -> Complex64 {
    let cs = basis.cross_section();
    let pieces = match weight {
        YProfile::Sampled(v) if v.len() > 1 => v.len() - 1,
        _ => 8,
    };
    let width = cs.measure() / pieces as f64;
    let (ml, mm) = (&basis.modes[l - 1], &basis.modes[m - 1]);
    let freq = (ml.harmonic().abs() + mm.harmonic().abs()) as f64 * cs.base_frequency();
    let nodes = refine.max(1) * (16 + (freq * width).ceil() as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..pieces {
        let a = p as f64 * width;
        let (ys, ws) = gauss_legendre_on(nodes, a, a + width);
        for (y, w) in ys.into_iter().zip(ws) {
            acc += weight.eval(&cs, y) * mm.eval(y) * ml.eval(y).conj() * w;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> CrossSection {
        CrossSection::Circle { circumference: 2.0 * PI }
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn circle_spectrum_with_multiplicity() {
        let b = ModeBasis::build(circle(), 3).unwrap();
        let ev: Vec<f64> = b.modes().iter().map(|m| m.eigenvalue).collect();
        assert_eq!(ev, vec![0.0, 1.0, 1.0]);
        assert_eq!(b.distinct(), &[0.0, 1.0]);
        assert_eq!((b.multiplicity(1), b.multiplicity(2)), (1, 2));
        assert!(b.group_complete(2));
        let b2 = ModeBasis::build(circle(), 2).unwrap();
        assert!(!b2.group_complete(2));
    }

    #[test]
    fn dirichlet_interval_spectrum() {
        let b = ModeBasis::build(
            CrossSection::Interval { length: PI, bc: BoundaryCondition::Dirichlet },
            2,
        )
        .unwrap();
        let ev: Vec<f64> = b.modes().iter().map(|m| m.eigenvalue).collect();
        assert_eq!(ev, vec![1.0, 4.0]);
        assert_eq!(b.multiplicity(1), 1);
        assert_eq!(b.multiplicity(2), 1);
    }

    #[test]
    fn constant_mode_normalization() {
        let b = ModeBasis::build(circle(), 1).unwrap();
        let v = b.mode(1).unwrap().eval(0.7);
        assert!((v - c((2.0 * PI).powf(-0.5))).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_cross_sections() {
        assert!(ModeBasis::build(CrossSection::Circle { circumference: 0.0 }, 3).is_err());
        assert!(ModeBasis::build(
            CrossSection::Interval { length: -1.0, bc: BoundaryCondition::Neumann },
            3
        )
        .is_err());
        assert!(ModeBasis::build(circle(), 0).is_err());
    }

    #[test]
    fn gram_is_identity_for_all_cross_sections() {
        for cs in [
            circle(),
            CrossSection::Circle { circumference: 3.3 },
            CrossSection::Interval { length: PI, bc: BoundaryCondition::Dirichlet },
            CrossSection::Interval { length: 2.5, bc: BoundaryCondition::Neumann },
        ] {
            let b = ModeBasis::build(cs, 9).unwrap();
            let one = YProfile::Sampled(vec![c(1.0); 5]);
            for l in 1..=9 {
                for m in 1..=9 {
                    let want = if l == m { 1.0 } else { 0.0 };
                    let closed = pair_integral(&b, l, m, &YProfile::Constant(c(1.0))).unwrap();
                    let trig = pair_integral(&b, l, m, &YProfile::Trig(YProfile::cosine(0, c(1.0)))).unwrap();
                    let quad = pair_integral(&b, l, m, &one).unwrap();
                    assert!((closed - c(want)).norm() < 1e-12);
                    assert!((trig - c(want)).norm() < 1e-12, "{cs:?} {l} {m} {trig}");
                    assert!((quad - c(want)).norm() < 1e-12, "{cs:?} {l} {m} {quad}");
                }
            }
        }
    }

    #[test]
    fn counterexample_selection_rule() {
        let b = ModeBasis::build(circle(), 7).unwrap();
        let w = YProfile::Trig(vec![Harmonic { order: 1, coeff: c(1.0) }]);
        // constant mode against itself vanishes
        assert_eq!(pair_integral(&b, 1, 1, &w).unwrap().norm(), 0.0);
        for l in 1..=7 {
            for m in 1..=7 {
                let v = pair_integral(&b, l, m, &w).unwrap();
                let (nl, nm) = (b.mode(l).unwrap().harmonic(), b.mode(m).unwrap().harmonic());
                if nl == nm + 1 {
                    assert!((v - c(1.0)).norm() < 1e-14);
                } else {
                    assert_eq!(v.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature_for_trig_weights() {
        for cs in [
            circle(),
            CrossSection::Interval { length: PI, bc: BoundaryCondition::Dirichlet },
            CrossSection::Interval { length: 1.7, bc: BoundaryCondition::Neumann },
        ] {
            let b = ModeBasis::build(cs, 6).unwrap();
            let mut hs = YProfile::cosine(1, c(0.3));
            hs.extend(YProfile::sine(2, Complex64::new(0.2, -0.1)));
            hs.push(Harmonic { order: 0, coeff: c(1.0) });
            let w = YProfile::Trig(hs);
            for l in 1..=6 {
                for m in 1..=6 {
                    let closed = pair_integral(&b, l, m, &w).unwrap();
                    let quad = pair_integral_quadrature(&b, l, m, &w, 2);
                    assert!((closed - quad).norm() < 1e-12, "{cs:?} ({l},{m}) {closed} vs {quad}");
                }
            }
        }
    }

    #[test]
    fn cosine_coupling_factor() {
        // V = 1 + 0.3 cos y on circle(2π): diagonal 1, n ↔ n±1 with 0.15
        let b = ModeBasis::build(circle(), 5).unwrap();
        let mut hs = YProfile::cosine(1, c(0.3));
        hs.push(Harmonic { order: 0, coeff: c(1.0) });
        let w = YProfile::Trig(hs);
        for l in 1..=5 {
            for m in 1..=5 {
                let v = pair_integral(&b, l, m, &w).unwrap();
                let d = (b.mode(l).unwrap().harmonic() - b.mode(m).unwrap().harmonic()).abs();
                let want = match d {
                    0 => 1.0,
                    1 => 0.15,
                    _ => 0.0,
                };
                assert!((v - c(want)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sampled_quadrature_converges_under_doubling() {
        let cs = circle();
        let b = ModeBasis::build(cs, 7).unwrap();
        let samples: Vec<Complex64> = (0..=12)
            .map(|i| {
                let y = i as f64 * 2.0 * PI / 12.0;
                Complex64::new(1.0 + 0.5 * y.sin(), 0.2 * (2.0 * y).cos())
            })
            .collect();
        let w = YProfile::Sampled(samples);
        for l in 1..=7 {
            for m in 1..=7 {
                let a = pair_integral_quadrature(&b, l, m, &w, 1);
                let d = pair_integral_quadrature(&b, l, m, &w, 2);
                assert!((a - d).norm() < 1e-10 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn profile_queries() {
        let w = YProfile::Trig(YProfile::cosine(1, c(0.3)));
        assert!(w.is_real_valued());
        assert!((w.sup_bound() - 0.3).abs() < 1e-15);
        assert_eq!(w.bandwidth(), Some(1));
        let e = YProfile::Trig(vec![Harmonic { order: 1, coeff: c(1.0) }]);
        assert!(!e.is_real_valued());
        assert!(e.constant_value().is_none());
        assert_eq!(YProfile::Trig(YProfile::cosine(0, c(2.0))).constant_value(), Some(c(2.0)));
    }

    #[test]
    fn index_bounds_are_checked() {
        let b = ModeBasis::build(circle(), 3).unwrap();
        let one = YProfile::Constant(c(1.0));
        assert!(pair_integral(&b, 0, 1, &one).is_err());
        assert!(pair_integral(&b, 1, 4, &one).is_err());
    }
}
