//! Checks shared by the property tests and the acceptance binary.
#![allow(dead_code)]

use std::f64::consts::PI;

use cylscat::finder::contour::{cell_pieces, contour_winding, Cell, Lattice, Sampler};
use cylscat::finder::{Rect, Winding, DEFAULT_PHASE_STEP};
use cylscat::potential::{Geometry, PotentialSpec, SeparableTerm, XProfile};
use cylscat::quadrature::gauss_legendre_on;
use cylscat::resolvent::{EngineOptions, ResolventContext};
use cylscat::sheet::{lift, SheetLabel};
use cylscat::transverse::{BoundaryCondition, CrossSection, ModeBasis, YProfile};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn circle() -> CrossSection {
    CrossSection::Circle { circumference: 2.0 * PI }
}

/// Square barrier of height `c` on [-1, 1], constant in y.
pub fn barrier(c: Complex64) -> PotentialSpec {
    let x = XProfile::constant(-1.0, 1.0, c);
    PotentialSpec::new(Geometry::Full, vec![SeparableTerm { x, y: YProfile::Constant(cx(1.0, 0.0)) }]).unwrap()
}

#[derive(Debug, Default)]
pub struct AdditivityReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

/// Parent winding against the sum over a random four-way split, for random
/// polynomial-times-exponential functions on random rectangles.
pub fn winding_additivity(cases: usize, seed: u64) -> AdditivityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AdditivityReport::default();
    for case in 0..cases {
        let n = rng.gen_range(1..7);
        let zeros: Vec<Complex64> = (0..n).map(|_| cx(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..1.0))).collect();
        let c = cx(rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
        let f = move |k: Complex64| Ok(zeros.iter().map(|z| k - z).product::<Complex64>() * (c * k).exp());
        let x0 = rng.gen_range(-4.0..0.0);
        let y0 = rng.gen_range(-4.0..-1.0);
        let root = Rect::new(x0, x0 + rng.gen_range(1.0..6.0), y0, y0 + rng.gen_range(1.0..5.0));
        let lat = Lattice::for_root(root);
        let cell = Cell { i0: 0, i1: lat.snap_re(root.re_max), j0: 0, j1: lat.snap_im(root.im_max) };
        let is = cell.i0 + ((cell.i1 - cell.i0) as f64 * rng.gen_range(0.02..0.98)) as i64;
        let js = cell.j0 + ((cell.j1 - cell.j0) as f64 * rng.gen_range(0.02..0.98)) as i64;
        let h0 = root.diameter() / 64.0;
        let mut s = Sampler::new(&f);
        let (parent, _) = contour_winding(&mut s, &lat, &cell_pieces(&cell), h0, DEFAULT_PHASE_STEP);
        let mut sum = 0;
        let mut resolved = matches!(parent, Winding::Value(_));
        for child in cell.split_at(is, js) {
            match contour_winding(&mut s, &lat, &cell_pieces(&child), h0, DEFAULT_PHASE_STEP).0 {
                Winding::Value(w) => sum += w,
                _ => resolved = false,
            }
        }
        if !resolved {
            rep.skipped += 1;
            continue;
        }
        rep.checked += 1;
        if parent != Winding::Value(sum) {
            rep.failures.push(format!("case {case}: parent {parent:?}, children {sum}"));
        }
    }
    rep
}

#[derive(Debug, Default)]
pub struct LiftReport {
    pub lifted: usize,
    pub rejected: usize,
    pub sign_violations: usize,
    pub max_identity_residual: f64,
}

/// Sign pattern and square identity of the branches on random (k, ℰ).
pub fn lift_sign_pattern(samples: usize, seed: u64) -> LiftReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = ModeBasis::build(circle(), 11).unwrap();
    let jm = basis.distinct_count();
    let mut rep = LiftReport::default();
    for _ in 0..samples {
        let mask: u32 = rng.gen_range(1..(1u32 << jm));
        let members: Vec<usize> = (1..=jm).filter(|j| mask & (1 << (j - 1)) != 0).collect();
        let anchor = members[rng.gen_range(0..members.len())];
        let sheet = SheetLabel::new(&members, anchor).unwrap();
        let scale = 10f64.powf(rng.gen_range(-2.0..2.5));
        let k = cx(rng.gen_range(-1.0..1.0), -rng.gen_range(1e-6..1.0)) * scale;
        let p = match lift(k, &sheet, &basis) {
            Ok(p) => p,
            Err(_) => {
                rep.rejected += 1;
                continue;
            }
        };
        rep.lifted += 1;
        let base = k * k + basis.nu_sq(anchor);
        for j in 1..=jm {
            let r = p.r(j);
            if (r.im < 0.0) != sheet.contains(j) || r.im == 0.0 {
                rep.sign_violations += 1;
            }
            let res = (r * r - (base - basis.nu_sq(j))).norm() / (1.0 + k.norm_sqr());
            rep.max_identity_residual = rep.max_identity_residual.max(res);
        }
    }
    rep
}

/// Largest deviation of the quadrature Gram matrix from the identity over
/// the built-in cross-sections.
pub fn gram_deviation() -> f64 {
    let sections = [
        circle(),
        CrossSection::Circle { circumference: 3.0 },
        CrossSection::Interval { length: 1.0, bc: BoundaryCondition::Dirichlet },
        CrossSection::Interval { length: 2.5, bc: BoundaryCondition::Neumann },
    ];
    let mut worst: f64 = 0.0;
    for cs in sections {
        let basis = ModeBasis::build(cs, 12).unwrap();
        let (ys, ws) = gauss_legendre_on(64, 0.0, cs.measure());
        for l in 1..=basis.len() {
            for m in 1..=basis.len() {
                let (a, b) = (basis.mode(l).unwrap(), basis.mode(m).unwrap());
                let g: Complex64 = ys.iter().zip(&ws).map(|(&y, &w)| a.eval(y) * b.eval(y).conj() * w).sum();
                let want = if l == m { 1.0 } else { 0.0 };
                worst = worst.max((g - want).norm());
            }
        }
    }
    worst
}

/// Least-squares slope of ys against xs.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug)]
pub struct EntryFits {
    /// Exponents of |b_{+-}| and |b_{-+}| against |Re k| on Im k = -α.
    pub decay_exponents: [f64; 2],
    /// max/min of |b|·|k| over the horizontal samples, per block.
    pub scaled_spread: [f64; 2],
    /// Rate of log|b_{++}| against |Im k| along a ray.
    pub growth_rate: f64,
    /// Largest log|b_{++}| − 2|Im k| + log|k| along the ray.
    pub growth_excess: Vec<f64>,
}

/// Entry asymptotics of B for the barrier of height 10 on [-1, 1], ℰ = {1}.
pub fn entry_fits() -> EntryFits {
    let spec = barrier(cx(10.0, 0.0));
    let basis = ModeBasis::build(circle(), 3).unwrap();
    let sheet = SheetLabel::single(1).unwrap();
    let opts = EngineOptions { nodes_per_panel: 24, max_panel_width: 0.08, depth: 0, ..EngineOptions::default() };
    let ctx = ResolventContext::new(&spec, &basis, &sheet, opts).unwrap();
    let alpha = 0.3;
    let mut xs = Vec::new();
    let mut logs = [Vec::new(), Vec::new()];
    let mut scaled = [Vec::new(), Vec::new()];
    for r in [50.0, 100.0, 200.0] {
        for sign in [1.0, -1.0] {
            let k = cx(sign * r, -alpha);
            let b = ctx.assemble_B(k).unwrap();
            let c = b.dim() / 2;
            let pm = b.entries[(0, 0)].norm();
            let mp = b.entries[(c, c)].norm();
            xs.push(f64::ln(r));
            logs[0].push(pm.ln());
            logs[1].push(mp.ln());
            scaled[0].push(pm * k.norm());
            scaled[1].push(mp * k.norm());
        }
    }
    let spread = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut ts = Vec::new();
    let mut grow = Vec::new();
    let mut excess = Vec::new();
    let dir = cx(1.0, -1.0) / 2f64.sqrt();
    for t in [3.0, 4.0, 5.0, 6.0, 7.0, 8.0] {
        let k = dir * t;
        let b = ctx.assemble_B(k).unwrap();
        let c = b.dim() / 2;
        let pp = b.entries[(c, 0)].norm().ln();
        ts.push(-k.im);
        grow.push(pp);
        excess.push(pp - 2.0 * k.im.abs() + k.norm().ln());
    }
    EntryFits {
        decay_exponents: [slope(&xs, &logs[0]), slope(&xs, &logs[1])],
        scaled_spread: [spread(&scaled[0]), spread(&scaled[1])],
        growth_rate: slope(&ts, &grow),
        growth_excess: excess,
    }
}
