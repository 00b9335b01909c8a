//! Separable potentials V(x, y) = Σ_t f_t(x) g_t(y), their support boxes,
//! transverse matrix elements V_{lm}(x) and the collar nondegeneracy test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::resolvent::grid::Grid;
use crate::transverse::{pair_integral, BoundaryCondition, ModeBasis, YProfile};

/// Full line or half line [0, ∞) with a boundary condition at x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Geometry {
    Full,
    Half { bc: BoundaryCondition },
}

impl Geometry {
    pub fn is_half(&self) -> bool {
        matches!(self, Geometry::Half { .. })
    }

    /// +1 for Neumann, −1 for Dirichlet; `None` on the full line.
    pub fn image_sign(&self) -> Option<f64> {
        match self {
            Geometry::Full => None,
            Geometry::Half { bc: BoundaryCondition::Neumann } => Some(1.0),
            Geometry::Half { bc: BoundaryCondition::Dirichlet } => Some(-1.0),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Geometry::Full => "full".into(),
            Geometry::Half { bc } => format!("half({})", crate::transverse::bc_name(*bc)),
        }
    }
}

/// x-dependence of a separable term; zero outside its stated interval.
#[derive(Debug, Clone, PartialEq)]
pub enum XProfile {
    /// Value `values[i]` on (breakpoints[i], breakpoints[i + 1]).
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<Complex64>,
    },
    /// Samples at the Chebyshev–Lobatto points of [a, b], interpolated
    /// by the barycentric formula.
    Smooth { a: f64, b: f64, samples: Vec<Complex64> },
}

impl XProfile {
    pub fn constant(a: f64, b: f64, value: Complex64) -> Self {
        XProfile::PiecewiseConstant {
            breakpoints: vec![a, b],
            values: vec![value],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            XProfile::PiecewiseConstant { breakpoints, values } => {
                if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
                    return Err(ScatterError::InvalidPotential(format!(
                        "piecewise-constant profile needs n + 1 breakpoints for n values (got {} and {})",
                        breakpoints.len(),
                        values.len()
                    )));
                }
                if breakpoints.iter().any(|x| !x.is_finite())
                    || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
                {
                    return Err(ScatterError::InvalidPotential(
                        "breakpoints must be finite and strictly increasing".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(ScatterError::InvalidPotential("non-finite profile value".into()));
                }
            }
            XProfile::Smooth { a, b, samples } => {
                if !(a < b) || !a.is_finite() || !b.is_finite() {
                    return Err(ScatterError::InvalidPotential(format!(
                        "smooth profile interval [{a}, {b}] is empty or unbounded"
                    )));
                }
                if samples.len() < 2 || samples.iter().any(|v| !v.is_finite()) {
                    return Err(ScatterError::InvalidPotential(
                        "smooth profile needs at least two finite samples".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Minimal closed interval outside which the profile vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            XProfile::PiecewiseConstant { breakpoints, values } => {
                let first = values.iter().position(|v| v.norm() > 0.0)?;
                let last = values.iter().rposition(|v| v.norm() > 0.0)?;
                Some((breakpoints[first], breakpoints[last + 1]))
            }
            XProfile::Smooth { a, b, samples } => {
                if samples.iter().all(|v| v.norm() == 0.0) {
                    None
                } else {
                    Some((*a, *b))
                }
            }
        }
    }

    /// Points where the profile may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            XProfile::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            XProfile::Smooth { a, b, .. } => vec![*a, *b],
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            XProfile::PiecewiseConstant { breakpoints, values } => {
                if x < breakpoints[0] || x > *breakpoints.last().unwrap() {
                    return Complex64::new(0.0, 0.0);
                }
                let i = breakpoints.partition_point(|&p| p <= x);
                values[i.saturating_sub(1).min(values.len() - 1)]
            }
            XProfile::Smooth { a, b, samples } => {
                if x < *a || x > *b {
                    return Complex64::new(0.0, 0.0);
                }
                chebyshev_lobatto_eval(*a, *b, samples, x)
            }
        }
    }

    /// sup |f| over [lo, hi].
    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            XProfile::PiecewiseConstant { breakpoints, values } => values
                .iter()
                .enumerate()
                .filter(|(i, _)| breakpoints[*i] < hi && breakpoints[*i + 1] > lo)
                .fold(0.0, |m, (_, v)| m.max(v.norm())),
            XProfile::Smooth { .. } => {
                let n = 512;
                (0..=n)
                    .map(|i| self.eval(lo + (hi - lo) * i as f64 / n as f64).norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match self.support() {
            Some((a, b)) => self.sup_on(a, b),
            None => 0.0,
        }
    }

    pub fn is_real_valued(&self) -> bool {
        match self {
            XProfile::PiecewiseConstant { values, .. } => values.iter().all(|v| v.im == 0.0),
            XProfile::Smooth { samples, .. } => samples.iter().all(|v| v.im == 0.0),
        }
    }

    fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        match self {
            XProfile::PiecewiseConstant { breakpoints, values } => XProfile::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|&v| f(v)).collect(),
            },
            XProfile::Smooth { a, b, samples } => XProfile::Smooth {
                a: *a,
                b: *b,
                samples: samples.iter().map(|&v| f(v)).collect(),
            },
        }
    }
}

/// Chebyshev–Lobatto node i of n + 1 on [a, b], i = 0 at b.
pub fn chebyshev_lobatto_node(a: f64, b: f64, n: usize, i: usize) -> f64 {
    let t = (std::f64::consts::PI * i as f64 / n as f64).cos();
    0.5 * (a + b) + 0.5 * (b - a) * t
}

fn chebyshev_lobatto_eval(a: f64, b: f64, samples: &[Complex64], x: f64) -> Complex64 {
    let n = samples.len() - 1;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (i, &s) in samples.iter().enumerate() {
        let xi = chebyshev_lobatto_node(a, b, n, i);
        let d = x - xi;
        if d == 0.0 {
            return s;
        }
        let mut w = if i % 2 == 0 { 1.0 } else { -1.0 };
        if i == 0 || i == n {
            w *= 0.5;
        }
        num += s * (w / d);
        den += w / d;
    }
    num / den
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub x: XProfile,
    pub y: YProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub geometry: Geometry,
    pub terms: Vec<SeparableTerm>,
}

/// Minimal x-interval of the support and the half-width b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub x_min: f64,
    pub x_max: f64,
    pub half_width: f64,
}

impl SupportBox {
    /// x-diameter of the support.
    pub fn diameter(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Whether [−b, b] (or [0, b]) cannot be shrunk, i.e. the support
    /// touches both ends of the box.
    pub fn is_minimal(&self, geometry: Geometry) -> bool {
        match geometry {
            Geometry::Full => {
                let b = self.half_width;
                (self.x_min + b).abs() <= 1e-12 * b && (self.x_max - b).abs() <= 1e-12 * b
            }
            Geometry::Half { .. } => true,
        }
    }
}

impl PotentialSpec {
    pub fn new(geometry: Geometry, terms: Vec<SeparableTerm>) -> Result<Self> {
        let spec = PotentialSpec { geometry, terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn zero(geometry: Geometry) -> Self {
        PotentialSpec { geometry, terms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            t.x.validate()
                .map_err(|e| ScatterError::InvalidPotential(format!("term {i}: {e}")))?;
            if let YProfile::Sampled(v) = &t.y {
                if v.is_empty() {
                    return Err(ScatterError::InvalidPotential(format!(
                        "term {i}: sampled y-profile is empty"
                    )));
                }
            }
            if self.geometry.is_half() {
                if let Some((a, _)) = t.x.support() {
                    if a < 0.0 {
                        return Err(ScatterError::InvalidPotential(format!(
                            "term {i}: half-cylinder support starts at {a} < 0"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn active_terms(&self) -> impl Iterator<Item = &SeparableTerm> {
        self.terms.iter().filter(|t| !t.y.is_zero() && t.x.support().is_some())
    }

    pub fn is_zero(&self) -> bool {
        self.active_terms().next().is_none()
    }

    /// True when no term depends on y.
    pub fn is_y_independent(&self) -> bool {
        self.active_terms().all(|t| t.y.constant_value().is_some())
    }

    pub fn is_real_valued(&self) -> bool {
        self.active_terms().all(|t| t.x.is_real_valued() && t.y.is_real_valued())
    }

    /// Upper bound on ‖Im V‖_∞; exactly zero for real-valued specs.
    pub fn im_sup_bound(&self) -> f64 {
        if self.is_real_valued() {
            return 0.0;
        }
        self.active_terms()
            .filter(|t| !(t.x.is_real_valued() && t.y.is_real_valued()))
            .map(|t| t.x.sup() * t.y.sup_bound())
            .sum()
    }

    /// All x-breakpoints of all terms, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.active_terms().flat_map(|t| t.x.breakpoints()).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        PotentialSpec {
            geometry: self.geometry,
            terms: self
                .terms
                .iter()
                .map(|t| SeparableTerm { x: t.x.map_values(|v| v * c), y: t.y.clone() })
                .collect(),
        }
    }

    /// Complex conjugate potential.
    pub fn conj(&self) -> Self {
        PotentialSpec {
            geometry: self.geometry,
            terms: self
                .terms
                .iter()
                .map(|t| SeparableTerm { x: t.x.map_values(|v| v.conj()), y: t.y.conj() })
                .collect(),
        }
    }

    pub fn eval(&self, cs: &crate::transverse::CrossSection, x: f64, y: f64) -> Complex64 {
        self.terms.iter().map(|t| t.x.eval(x) * t.y.eval(cs, y)).sum()
    }

    /// Bound on sup_y |V(x, y)| combining harmonics of equal order first.
    fn sup_y_bound(&self, x: f64) -> f64 {
        let mut harmonics: Vec<(i64, Complex64)> = Vec::new();
        let mut extra = 0.0;
        for t in self.active_terms() {
            let f = t.x.eval(x);
            if f.norm() == 0.0 {
                continue;
            }
            match &t.y {
                YProfile::Constant(c) => push_harmonic(&mut harmonics, 0, f * c),
                YProfile::Trig(hs) => {
                    for h in hs {
                        push_harmonic(&mut harmonics, h.order, f * h.coeff);
                    }
                }
                YProfile::Sampled(_) => extra += f.norm() * t.y.sup_bound(),
            }
        }
        harmonics.iter().map(|(_, c)| c.norm()).sum::<f64>() + extra
    }
}

fn push_harmonic(acc: &mut Vec<(i64, Complex64)>, order: i64, c: Complex64) {
    match acc.iter_mut().find(|(o, _)| *o == order) {
        Some(e) => e.1 += c,
        None => acc.push((order, c)),
    }
}

pub fn support_box(spec: &PotentialSpec) -> Result<SupportBox> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in spec.active_terms() {
        let (a, b) = t.x.support().expect("active terms have support");
        lo = lo.min(a);
        hi = hi.max(b);
    }
    if !(lo < hi) {
        return Err(ScatterError::ZeroPotential);
    }
    let half_width = match spec.geometry {
        Geometry::Full => lo.abs().max(hi.abs()),
        Geometry::Half { .. } => hi,
    };
    Ok(SupportBox { x_min: lo, x_max: hi, half_width })
}

/// Transverse Galerkin representation of multiplication by V on a grid.
#[derive(Debug, Clone)]
pub struct ModeCoupledPotential {
    l_max: usize,
    nodes: Vec<f64>,
    /// V_{lm}(x_q) at [((l-1) L + (m-1)) N + q].
    values: Vec<Complex64>,
    /// V_{lm} ≢ 0.
    pattern: Vec<bool>,
    pub im_sup: f64,
}

impl ModeCoupledPotential {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// V_{lm}(x_q), 1-based l, m and 0-based q.
    pub fn at(&self, l: usize, m: usize, q: usize) -> Complex64 {
        let n = self.nodes.len();
        self.values[((l - 1) * self.l_max + (m - 1)) * n + q]
    }

    /// V_{lm} on every node.
    pub fn column(&self, l: usize, m: usize) -> &[Complex64] {
        let n = self.nodes.len();
        let s = ((l - 1) * self.l_max + (m - 1)) * n;
        &self.values[s..s + n]
    }

    pub fn couples(&self, l: usize, m: usize) -> bool {
        self.pattern[(l - 1) * self.l_max + (m - 1)]
    }

    pub fn is_zero(&self) -> bool {
        !self.pattern.iter().any(|&p| p)
    }

    /// Modes l with V_{lm} ≢ 0.
    pub fn targets_of(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=self.l_max).filter(move |&l| self.couples(l, m))
    }
}

pub fn mode_couple(spec: &PotentialSpec, basis: &ModeBasis, grid: &Grid) -> Result<ModeCoupledPotential> {
    spec.validate()?;
    if let Ok(bx) = support_box(spec) {
        let tol = 1e-12 * (1.0 + bx.half_width);
        if grid.is_empty() || grid.x_min() > bx.x_min + tol || grid.x_max() < bx.x_max - tol {
            return Err(ScatterError::GridCoverage {
                grid_min: grid.x_min(),
                grid_max: grid.x_max(),
                x_min: bx.x_min,
                x_max: bx.x_max,
            });
        }
    }
    let l_max = basis.len();
    let nodes = grid.nodes().to_vec();
    let n = nodes.len();
    let mut values = vec![Complex64::new(0.0, 0.0); l_max * l_max * n];
    let mut pattern = vec![false; l_max * l_max];
    for t in spec.active_terms() {
        let fx: Vec<Complex64> = nodes.iter().map(|&x| t.x.eval(x)).collect();
        if fx.iter().all(|v| v.norm() == 0.0) {
            continue;
        }
        let scale = t.y.sup_bound();
        for l in 1..=l_max {
            for m in 1..=l_max {
                let g = pair_integral(basis, l, m, &t.y)?;
                if g.norm() <= 1e-15 * scale {
                    continue;
                }
                let idx = (l - 1) * l_max + (m - 1);
                pattern[idx] = true;
                for (q, f) in fx.iter().enumerate() {
                    values[idx * n + q] += f * g;
                }
            }
        }
    }
    Ok(ModeCoupledPotential {
        l_max,
        nodes,
        values,
        pattern,
        im_sup: spec.im_sup_bound(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondegeneracyReport {
    pub holds: bool,
    /// Minimal C over the sampled collar structure when `holds`.
    pub c: Option<f64>,
}

/// Checks C |V_{l0 l0}(x)| ≥ sup_y |V(x, y)| on the ε-collars at the ends of
/// the support box (only at x = b on half-cylinders).
pub fn nondegeneracy_check(spec: &PotentialSpec, basis: &ModeBasis, l0: usize, eps: f64) -> Result<NondegeneracyReport> {
    basis.check_index(l0)?;
    let bx = support_box(spec)?;
    let b = bx.half_width;
    let mut collars = vec![(b - eps, b)];
    if !spec.geometry.is_half() {
        collars.push((-b, -b + eps));
    }
    let breaks = spec.breakpoints();
    let smooth = spec.terms.iter().any(|t| matches!(t.x, XProfile::Smooth { .. }));
    let per_piece = if smooth { 64 } else { 1 };
    let diag_y: Vec<Complex64> = spec
        .terms
        .iter()
        .map(|t| pair_integral(basis, l0, l0, &t.y))
        .collect::<Result<_>>()?;
    let mut c_max: f64 = 0.0;
    for (lo, hi) in collars {
        let mut cuts: Vec<f64> = std::iter::once(lo)
            .chain(breaks.iter().copied().filter(|&p| p > lo && p < hi))
            .chain(std::iter::once(hi))
            .collect();
        cuts.dedup();
        for w in cuts.windows(2) {
            for s in 0..per_piece {
                let x = w[0] + (w[1] - w[0]) * (s as f64 + 0.5) / per_piece as f64;
                let sup = spec.sup_y_bound(x);
                if sup == 0.0 {
                    continue;
                }
                let diag: Complex64 = spec
                    .terms
                    .iter()
                    .zip(&diag_y)
                    .map(|(t, g)| t.x.eval(x) * g)
                    .sum();
                if diag.norm() <= 1e-14 * sup {
                    return Ok(NondegeneracyReport { holds: false, c: None });
                }
                c_max = c_max.max(sup / diag.norm());
            }
        }
    }
    Ok(NondegeneracyReport { holds: true, c: Some(c_max) })
}
