//! Quadtree search for the zeros of an analytic function in the counting
//! region {|k| < r_max, Im k < −α}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, ScatterError};
use crate::finder::contour::{
    cell_pieces, contour_winding, initial_points, Analytic, Cell, ContourTrace, Lattice, Piece, Rect, Sampler, Winding,
    DEFAULT_PHASE_STEP,
};

/// Counting region {|k| < r_max, Im k < −α}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub alpha: f64,
    pub r_max: f64,
}

impl Region {
    pub fn new(alpha: f64, r_max: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ScatterError::InvalidRegion(format!("alpha must be positive, got {alpha}")));
        }
        if !(r_max > alpha) || !r_max.is_finite() {
            return Err(ScatterError::InvalidRegion(format!("r_max = {r_max} must exceed alpha = {alpha}")));
        }
        Ok(Region { alpha, r_max })
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.norm() < self.r_max && k.im < -self.alpha
    }

    /// Bounding box [−R, R] × [−R, −α].
    pub fn bounding_box(&self) -> Rect {
        Rect::new(-self.r_max, self.r_max, -self.r_max, -self.alpha)
    }

    /// Positively oriented boundary: the lower arc, then the cut Im k = −α
    /// from right to left.
    pub fn boundary(&self) -> [Piece; 2] {
        let s = (self.alpha / self.r_max).asin();
        let left = Complex64::new(-(self.r_max.powi(2) - self.alpha.powi(2)).sqrt(), -self.alpha);
        [
            Piece::Arc { c: Complex64::new(0.0, 0.0), rho: self.r_max, theta0: -PI + s, theta1: -s },
            Piece::Segment { a: Complex64::new(-left.re, left.im), b: left },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocateOptions {
    pub phase_step_max: f64,
    /// Initial sample spacing along cell edges.
    pub h0: f64,
    /// Cells at most this wide are handed to the Newton refinement.
    pub d_newton: f64,
    /// Smallest cell diameter before a cluster is reported.
    pub delta_loc: f64,
    /// Radius of the Cauchy circle for derivatives.
    pub cauchy_radius: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for LocateOptions {
    fn default() -> Self {
        LocateOptions {
            phase_step_max: DEFAULT_PHASE_STEP,
            h0: 0.25,
            d_newton: 1.5,
            delta_loc: 1e-3,
            cauchy_radius: 1e-3,
            newton_tol: 1e-12,
            max_newton: 40,
        }
    }
}

impl LocateOptions {
    /// Spacing suited to det(I + B) for a support of x-diameter `diam` and
    /// card(Ẽ) = `card`: its phase turns at most about 2·diam·card per unit k.
    pub fn for_phase_rate(diam: f64, card: usize) -> Self {
        let rate = 2.0 * diam.max(0.1) * card.max(1) as f64;
        LocateOptions { h0: (DEFAULT_PHASE_STEP / rate).min(0.25), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocatedZero {
    pub k: Complex64,
    pub multiplicity: u32,
    /// |f(k)|.
    pub residual: f64,
    /// Largest |f| on the boundary of the cell the zero was refined in.
    pub cell_scale: f64,
}

/// Zeros too close to separate at the finest cell size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub center: Complex64,
    pub radius: f64,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceList {
    pub zeros: Vec<LocatedZero>,
    pub clusters: Vec<Cluster>,
    /// Cells whose winding could not be resolved.
    pub unresolved: Vec<Rect>,
    /// Cells with a flagged sample on their boundary, with the sample.
    pub excluded: Vec<(Rect, Complex64)>,
    /// Winding around the region boundary, when it could be resolved.
    pub total_winding: Option<i64>,
    pub evaluations: usize,
}

impl ResonanceList {
    pub fn empty() -> Self {
        ResonanceList {
            zeros: Vec::new(),
            clusters: Vec::new(),
            unresolved: Vec::new(),
            excluded: Vec::new(),
            total_winding: Some(0),
            evaluations: 0,
        }
    }

    /// Σ multiplicities of zeros and cluster windings.
    pub fn count(&self) -> i64 {
        self.zeros.iter().map(|z| z.multiplicity as i64).sum::<i64>() + self.clusters.iter().map(|c| c.winding).sum::<i64>()
    }

    pub fn is_clean(&self) -> bool {
        self.unresolved.is_empty() && self.excluded.is_empty()
    }
}

/// Split fractions for the successive passes, all off the centre. An
/// even-order zero hugging an edge can hide between two samples; a new
/// fraction moves every interior edge away from it.
const SPLIT_FRACTIONS: [f64; 3] = [0.509_345, 0.472_113, 0.537_791];

/// Counts and localizes the zeros of `f` in `region`. While the located
/// multiplicities disagree with the boundary winding the search repeats on
/// shifted cell edges at halved spacing, reusing cached samples.
pub fn locate(region: &Region, f: &Analytic, opts: &LocateOptions) -> ResonanceList {
    let mut sampler = Sampler::new(f);
    let mut o = *opts;
    let mut out = locate_pass(region, f, &o, SPLIT_FRACTIONS[0], &mut sampler);
    for &fraction in &SPLIT_FRACTIONS[1..] {
        if out.total_winding == Some(out.count()) {
            break;
        }
        o.h0 *= 0.5;
        out = locate_pass(region, f, &o, fraction, &mut sampler);
    }
    out.evaluations = sampler.evaluations;
    out
}

fn locate_pass(region: &Region, f: &Analytic, opts: &LocateOptions, fraction: f64, sampler: &mut Sampler) -> ResonanceList {
    let root = region.bounding_box();
    let lat = Lattice::for_root(root);

    let top = lat.snap_im(root.im_max);
    let right = lat.snap_re(root.re_max);
    let mid = split_index(0, right, fraction);
    let mut level: Vec<Cell> = vec![
        Cell { i0: 0, i1: mid, j0: 0, j1: top },
        Cell { i0: mid, i1: right, j0: 0, j1: top },
    ];

    let mut out = ResonanceList::empty();
    out.total_winding = None;
    let mut newton_cells: Vec<(Cell, i64, ContourTrace)> = Vec::new();

    while !level.is_empty() {
        level.retain(|c| c.rect(&lat).min_modulus() < region.r_max);
        let pts: Vec<Complex64> = level.iter().flat_map(|c| initial_points(&cell_pieces(c), &lat, opts.h0)).collect();
        sampler.prefetch(&pts);
        let mut next = Vec::new();
        for cell in level {
            let rect = cell.rect(&lat);
            match contour_winding(sampler, &lat, &cell_pieces(&cell), opts.h0, opts.phase_step_max) {
                (Winding::Value(0), _) => {}
                (Winding::Value(w), Some(trace)) => {
                    if rect.diameter() <= opts.d_newton {
                        newton_cells.push((cell, w, trace));
                    } else {
                        next.extend(split(&cell, fraction));
                    }
                }
                (Winding::Flagged(p), _) => out.excluded.push((rect, p)),
                _ => {
                    if rect.diameter() > opts.delta_loc && cell.splittable() {
                        next.extend(split(&cell, fraction));
                    } else {
                        out.unresolved.push(rect);
                    }
                }
            }
        }
        level = next;

        // refine candidate cells; failures come back subdivided
        let refined: Vec<(Cell, i64, Refined)> = newton_cells
            .par_iter()
            .map(|(cell, w, trace)| (*cell, *w, refine_cell(f, &lat, cell, *w, trace, opts)))
            .collect();
        newton_cells.clear();
        for (cell, w, z) in refined {
            let rect = cell.rect(&lat);
            match z {
                Refined::Zero(z) => out.zeros.push(z),
                Refined::Cluster(c) => out.clusters.push(c),
                Refined::Split if rect.diameter() > opts.delta_loc && cell.splittable() => level.extend(split(&cell, fraction)),
                Refined::Split => out.clusters.push(Cluster { center: rect.center(), radius: 0.5 * rect.diameter(), winding: w }),
            }
        }
    }

    out.zeros.retain(|z| region.contains(z.k));
    out.clusters.retain(|c| region.contains(c.center));
    out.zeros.sort_by(|a, b| a.k.re.partial_cmp(&b.k.re).unwrap().then(a.k.im.partial_cmp(&b.k.im).unwrap()));
    out.clusters.sort_by(|a, b| a.center.re.partial_cmp(&b.center.re).unwrap());

    let boundary = region.boundary();
    let h_arc = opts.h0;
    out.total_winding = match contour_winding(sampler, &lat, &boundary, h_arc, opts.phase_step_max).0 {
        Winding::Value(w) => Some(w),
        _ => None,
    };
    out
}

/// Split position as a fraction of the cell side; kept off the centre so
/// that zeros on symmetry lines such as Re k = 0 never land on an edge.
fn split_index(lo: i64, hi: i64, fraction: f64) -> i64 {
    (lo + ((hi - lo) as f64 * fraction) as i64).clamp(lo + 1, hi - 1)
}

fn split(cell: &Cell, fraction: f64) -> [Cell; 4] {
    cell.split_at(split_index(cell.i0, cell.i1, fraction), split_index(cell.j0, cell.j1, fraction))
}

enum Refined {
    Zero(LocatedZero),
    Cluster(Cluster),
    Split,
}

/// Refinement from the first-moment guess. Simple zeros use the secant
/// method and must stay in the cell; for m ≥ 2 a box of half-width δ_loc
/// around the guess must carry the whole winding, after which modified
/// Newton either converges inside it or the box is reported as a cluster.
fn refine_cell(f: &Analytic, lat: &Lattice, cell: &Cell, m: i64, trace: &ContourTrace, opts: &LocateOptions) -> Refined {
    let rect = cell.rect(lat);
    let guess = trace.first_moment() / m as f64;
    if !rect.contains(guess, 0.0) {
        return Refined::Split;
    }
    let scale = trace.max_abs();
    if m == 1 {
        let Some(k) = secant(f, guess, opts) else { return Refined::Split };
        if !rect.contains(k, 1e-9 * (1.0 + k.norm())) {
            return Refined::Split;
        }
        return match f(k) {
            Ok(v) => Refined::Zero(LocatedZero { k, multiplicity: 1, residual: v.norm(), cell_scale: scale }),
            Err(_) => Refined::Split,
        };
    }
    let r = opts.delta_loc;
    let small = Rect::new(guess.re - r, guess.re + r, guess.im - r, guess.im + r);
    let sl = Lattice::for_root(small);
    let c = Cell { i0: 0, i1: sl.snap_re(small.re_max), j0: 0, j1: sl.snap_im(small.im_max) };
    let mut s = Sampler::new(f);
    match contour_winding(&mut s, &sl, &cell_pieces(&c), r / 4.0, opts.phase_step_max).0 {
        Winding::Value(w) if w == m => {}
        _ => return Refined::Split,
    }
    if let Some(k) = newton_multiple(f, guess, m as f64, opts) {
        if small.contains(k, 0.0) {
            if let Ok(v) = f(k) {
                return Refined::Zero(LocatedZero { k, multiplicity: m as u32, residual: v.norm(), cell_scale: scale });
            }
        }
    }
    Refined::Cluster(Cluster { center: guess, radius: r, winding: m })
}

fn secant(f: &Analytic, k0: Complex64, opts: &LocateOptions) -> Option<Complex64> {
    let mut a = k0;
    let mut b = k0 + Complex64::new(opts.cauchy_radius, 0.0);
    let mut fa = f(a).ok()?;
    let mut fb = f(b).ok()?;
    for _ in 0..opts.max_newton {
        if fb.norm() == 0.0 {
            return Some(b);
        }
        let denom = fb - fa;
        if denom.norm() == 0.0 {
            return None;
        }
        let step = fb * (b - a) / denom;
        a = b;
        fa = fb;
        b -= step;
        fb = f(b).ok()?;
        if step.norm() <= opts.newton_tol * (1.0 + b.norm()) {
            return Some(b);
        }
    }
    None
}

/// Modified Newton k ← k − m f/f′ with f′ from a four-point Cauchy circle.
fn newton_multiple(f: &Analytic, k0: Complex64, m: f64, opts: &LocateOptions) -> Option<Complex64> {
    let mut k = k0;
    let rho = opts.cauchy_radius;
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_newton {
        let fk = f(k).ok()?;
        if fk.norm() == 0.0 {
            return Some(k);
        }
        let d = cauchy_derivative(f, k, rho)?;
        let step = m * fk / d;
        k -= step;
        let s = step.norm();
        if s <= opts.newton_tol.max(1e-10) * (1.0 + k.norm()) || (s < 1e-7 && s >= last) {
            return Some(k);
        }
        last = s;
    }
    None
}

/// f′(k) ≈ (1 / 4ρ) Σ_n f(k + ρ i^n) i^{−n}.
pub fn cauchy_derivative(f: &Analytic, k: Complex64, rho: f64) -> Option<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = Complex64::new(1.0, 0.0);
    for _ in 0..4 {
        acc += f(k + w * rho).ok()? / w;
        w *= Complex64::new(0.0, 1.0);
    }
    Some(acc / (4.0 * rho))
}
