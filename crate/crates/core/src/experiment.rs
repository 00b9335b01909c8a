//! End-to-end experiments: lift, assemble, locate, count, fit and report.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Expectation, RunConfig, Validated};
use crate::error::{Result, ScatterError};
use crate::finder::counting::{counting_function, fit_slope, mode_map, radii_grid, slope_bound, CountingFit, CountingFunction, MappedZero};
use crate::finder::locate::{locate, LocateOptions, Region, ResonanceList};
use crate::oracle::{oracle_list, OracleDomain, OracleProfile};
use crate::potential::{nondegeneracy_check, support_box, Geometry, PotentialSpec, XProfile};
use crate::resolvent::{convergence_probe, ProbeReport, Refinement, ResolventContext};
use crate::sheet::tilde_set;

/// Extra transverse modes added by the depth refinement of the probe.
const PROBE_EXTRA_MODES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Ran to completion with nothing to compare against.
    Complete,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Complete => "COMPLETE",
        }
    }

    pub fn success(self) -> bool {
        self != Verdict::Fail
    }
}

/// One slope hypothesis evaluated on the configured potential.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub config: RunConfig,
    pub card_tilde: usize,
    pub list: ResonanceList,
    pub counting: CountingFunction,
    pub fit: std::result::Result<CountingFit, String>,
    pub slope_bound: Option<f64>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub probes: Vec<ProbeReport>,
    pub max_b_entry: f64,
    pub b_samples: usize,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Deterministic points of the region on a polar grid.
pub fn region_samples(region: &Region, n: usize) -> Vec<Complex64> {
    let rings = (n as f64).sqrt().ceil() as usize;
    let per = n.div_ceil(rings);
    let mut out = Vec::with_capacity(n);
    for a in 0..rings {
        let r = region.alpha + (region.r_max - region.alpha) * (a as f64 + 0.5) / rings as f64;
        let s = (region.alpha / r).min(1.0).asin();
        for b in 0..per {
            if out.len() == n {
                break;
            }
            let theta = -PI + s + (PI - 2.0 * s) * (b as f64 + 0.5) / per as f64;
            let k = Complex64::from_polar(r, theta);
            if region.contains(k) {
                out.push(k);
            } else {
                out.push(Complex64::new(k.re, -(region.alpha + 0.5 * (r - region.alpha))));
            }
        }
    }
    out
}

/// Probe points across the fit window, a unit below the cut.
pub fn probe_samples(region: &Region, window: (f64, f64), n: usize) -> Vec<Complex64> {
    let depth = region.alpha + 1.0;
    (0..n)
        .map(|i| {
            let r = window.0 + (window.1 - window.0) * (i as f64 + 0.5) / n as f64;
            let re = (r * r - depth * depth).max(0.0).sqrt();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * re, -depth)
        })
        .collect()
}

fn context(v: &Validated) -> Result<ResolventContext> {
    ResolventContext::new(&v.spec, &v.basis, &v.sheet, v.engine)
}

/// Finder options scaled to the phase rate of det(I + B).
pub fn finder_options(spec: &PotentialSpec, card_tilde: usize) -> LocateOptions {
    let width = match support_box(spec) {
        Ok(bx) => match spec.geometry {
            Geometry::Full => bx.diameter(),
            Geometry::Half { .. } => 2.0 * bx.half_width,
        },
        Err(_) => 1.0,
    };
    LocateOptions::for_phase_rate(width, card_tilde)
}

/// Runs the resonance finder on det(I + B) over the configured region.
pub fn locate_resonances(v: &Validated, ctx: &ResolventContext) -> ResonanceList {
    if v.spec.is_zero() {
        return ResonanceList::empty();
    }
    let f = |k: Complex64| ctx.det_fn(k);
    locate(&v.region, &f, &finder_options(&v.spec, ctx.tilde().card()))
}

fn hypotheses(cfg: &RunConfig, v: &Validated) -> Result<Vec<HypothesisCheck>> {
    let mut out = Vec::new();
    match cfg.expect {
        Expectation::ExactSlope { .. } => {
            let bx = support_box(&v.spec)?;
            let minimal = bx.is_minimal(v.spec.geometry);
            out.push(HypothesisCheck {
                name: "support_minimal",
                holds: minimal,
                detail: format!("support [{}, {}], b = {}", bx.x_min, bx.x_max, bx.half_width),
            });
            let j0 = v.sheet.anchor();
            let simple = v.basis.multiplicity(j0) == 1 && v.basis.group_complete(j0);
            out.push(HypothesisCheck {
                name: "simple_anchor",
                holds: simple,
                detail: format!("nu_{j0}^2 = {} with multiplicity {}", v.basis.nu_sq(j0), v.basis.multiplicity(j0)),
            });
            let l0 = (1..=v.basis.len()).find(|&l| v.basis.distinct_index_of(l) == j0).expect("anchor has a mode");
            let eps = cfg.nondegeneracy.collar * bx.half_width;
            let nd = nondegeneracy_check(&v.spec, &v.basis, l0, eps)?;
            let c_max = cfg.nondegeneracy.c_max;
            let holds = nd.holds && nd.c.is_some_and(|c| c <= c_max * (1.0 + 1e-12));
            out.push(HypothesisCheck {
                name: "nondegeneracy",
                holds,
                detail: match nd.c {
                    Some(c) => format!("C = {c:.6} (limit {c_max}) on collars of width {eps}"),
                    None => format!("diagonal coupling vanishes on a collar of width {eps}"),
                },
            });
        }
        Expectation::UpperBound { .. } => {
            let bx = support_box(&v.spec)?;
            out.push(HypothesisCheck {
                name: "compact_support",
                holds: bx.diameter().is_finite(),
                detail: format!("support [{}, {}]", bx.x_min, bx.x_max),
            });
        }
        Expectation::NoResonances { .. } | Expectation::None => {}
    }
    Ok(out)
}

/// lift → assemble → locate → count → fit, without writing files.
pub fn evaluate(cfg: &RunConfig) -> Result<ExperimentOutcome> {
    let v = cfg.validate()?;
    let ctx = context(&v)?;
    let card = ctx.tilde().card();
    let hyps = hypotheses(cfg, &v)?;

    let list = locate_resonances(&v, &ctx);
    let counting = counting_function(&list, &v.region, &radii_grid(&v.region, cfg.region.radii));
    let fit = fit_slope(&counting, v.window).map_err(|e| e.to_string());
    let bound = support_box(&v.spec).ok().map(|bx| slope_bound(v.spec.geometry, &bx, card));

    let probes = if v.spec.is_zero() {
        Vec::new()
    } else {
        let pts = probe_samples(&v.region, v.window, cfg.probe.samples);
        vec![
            convergence_probe(&v.spec, &ctx, &pts, Refinement::DoubleNodes)?,
            convergence_probe(&v.spec, &ctx, &pts, Refinement::Depth { extra_modes: PROBE_EXTRA_MODES })?,
        ]
    };

    let b_count = if matches!(cfg.expect, Expectation::NoResonances { .. }) { 100 } else { 16 };
    let b_pts = region_samples(&v.region, b_count);
    let max_b_entry = b_pts
        .par_iter()
        .map(|&k| ctx.assemble_B(k).map(|b| b.max_abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut reasons = Vec::new();
    for h in hyps.iter().filter(|h| !h.holds) {
        reasons.push(format!("hypothesis {} fails", h.name));
    }
    if !list.is_clean() {
        reasons.push(format!(
            "{} unresolved and {} excluded cells",
            list.unresolved.len(),
            list.excluded.len()
        ));
    }
    match list.total_winding {
        Some(w) if w == list.count() => {}
        Some(w) => reasons.push(format!("located {} zeros but boundary winding is {w}", list.count())),
        None => reasons.push("boundary winding unresolved".into()),
    }
    let probe_max = probes.iter().map(|p| p.max_change()).fold(0.0, f64::max);
    if probe_max > cfg.probe.tolerance {
        reasons.push(format!("convergence probe change {probe_max:.3e} exceeds {:.1e}", cfg.probe.tolerance));
    }
    let verdict = match cfg.expect {
        Expectation::ExactSlope { slope, tolerance } => {
            match &fit {
                Ok(f) if (f.slope - slope).abs() <= tolerance * slope => {}
                Ok(f) => reasons.push(format!("slope {:.6} outside {slope:.6} ± {:.0}%", f.slope, 100.0 * tolerance)),
                Err(e) => reasons.push(e.clone()),
            }
            if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail }
        }
        Expectation::UpperBound { tolerance } => {
            match (&fit, bound) {
                (Ok(f), Some(b)) if f.slope <= (1.0 + tolerance) * b => {}
                (Ok(f), Some(b)) => reasons.push(format!("slope {:.6} exceeds {:.6}", f.slope, (1.0 + tolerance) * b)),
                (Err(e), _) => reasons.push(e.clone()),
                (Ok(_), None) => reasons.push("no support, no bound".into()),
            }
            if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail }
        }
        Expectation::NoResonances { entry_tol } => {
            if list.count() != 0 {
                reasons.push(format!("{} resonances located", list.count()));
            }
            if max_b_entry >= entry_tol {
                reasons.push(format!("max |B| = {max_b_entry:.3e} not below {entry_tol:.1e}"));
            }
            if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail }
        }
        Expectation::None => {
            if reasons.is_empty() { Verdict::Complete } else { Verdict::Fail }
        }
    };

    Ok(ExperimentOutcome {
        config: cfg.clone(),
        card_tilde: card,
        list,
        counting,
        fit,
        slope_bound: bound,
        hypotheses: hyps,
        probes,
        max_b_entry,
        b_samples: b_pts.len(),
        verdict,
        reasons,
    })
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12e},{:.12e}", z.re, z.im)
}

pub fn resonances_csv(list: &ResonanceList) -> String {
    let mut s = String::from("re_k,im_k,multiplicity,residual,kind\n");
    for z in &list.zeros {
        let _ = writeln!(s, "{},{},{:.6e},zero", fmt_c(z.k), z.multiplicity, z.residual);
    }
    for c in &list.clusters {
        let _ = writeln!(s, "{},{},NaN,cluster", fmt_c(c.center), c.winding);
    }
    s
}

pub fn counting_csv(n: &CountingFunction) -> String {
    let mut s = String::from("r,n\n");
    for (r, c) in n.radii.iter().zip(&n.counts) {
        let _ = writeln!(s, "{r:.12e},{c}");
    }
    s
}

fn probe_name(r: Refinement) -> &'static str {
    match r {
        Refinement::DoubleNodes => "double_nodes",
        Refinement::Depth { .. } => "depth",
    }
}

/// Stable `key: value` report.
pub fn report_text(o: &ExperimentOutcome) -> String {
    let c = &o.config;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}: {v}");
    };
    kv("preset", c.preset.clone());
    kv("cross_section", c.cross_section.describe());
    kv("geometry", c.geometry.describe());
    kv("sheet", format!("{:?} anchor {}", c.sheet.members, c.sheet.anchor));
    kv("card_tilde", o.card_tilde.to_string());
    kv("region.alpha", c.validate().map(|v| v.region.alpha.to_string()).unwrap_or_default());
    kv("region.r_max", c.region.r_max.to_string());
    kv("discretization", format!(
        "l_max = {}, nodes_per_panel = {}, max_panel_width = {}, depth = {}",
        c.discretization.l_max, c.discretization.nodes_per_panel, c.discretization.max_panel_width, c.discretization.depth
    ));
    kv("zeros", o.list.zeros.len().to_string());
    kv("clusters", o.list.clusters.len().to_string());
    kv("count", o.list.count().to_string());
    kv("total_winding", o.list.total_winding.map_or("unresolved".into(), |w| w.to_string()));
    kv("unresolved_cells", o.list.unresolved.len().to_string());
    kv("excluded_cells", o.list.excluded.len().to_string());
    kv("evaluations", o.list.evaluations.to_string());
    match &o.fit {
        Ok(f) => {
            kv("fit.window", format!("[{}, {}]", f.window.0, f.window.1));
            kv("fit.slope", format!("{:.6}", f.slope));
            kv("fit.intercept", format!("{:.6}", f.intercept));
            kv("fit.residual", format!("{:.6}", f.residual));
        }
        Err(e) => kv("fit", format!("refused ({e})")),
    }
    kv("slope_bound", o.slope_bound.map_or("none".into(), |b| format!("{b:.6}")));
    match c.expect {
        Expectation::ExactSlope { slope, tolerance } => kv("expected", format!("exact slope {slope:.6} within {:.0}%", 100.0 * tolerance)),
        Expectation::UpperBound { tolerance } => kv("expected", format!("slope at most slope_bound x {:.2}", 1.0 + tolerance)),
        Expectation::NoResonances { entry_tol } => kv("expected", format!("no resonances, max |B| below {entry_tol:.1e}")),
        Expectation::None => kv("expected", "none".into()),
    }
    for h in &o.hypotheses {
        kv(&format!("hypothesis.{}", h.name), format!("{} ({})", if h.holds { "holds" } else { "fails" }, h.detail));
    }
    for p in &o.probes {
        kv(&format!("probe.{}.max_change", probe_name(p.refinement)), format!("{:.3e}", p.max_change()));
    }
    kv("probe.tolerance", format!("{:.1e}", c.probe.tolerance));
    kv("max_b_entry", format!("{:.3e} over {} samples", o.max_b_entry, o.b_samples));
    for (i, cl) in o.list.clusters.iter().enumerate() {
        kv(&format!("cluster[{i}]"), format!("center {} radius {:.1e} winding {}", cl.center, cl.radius, cl.winding));
    }
    for (i, (r, p)) in o.list.excluded.iter().enumerate() {
        kv(&format!("flagged[{i}]"), format!("[{}, {}] x [{}, {}] at k = {p}", r.re_min, r.re_max, r.im_min, r.im_max));
    }
    for (i, r) in o.list.unresolved.iter().enumerate() {
        kv(&format!("unresolved[{i}]"), format!("[{}, {}] x [{}, {}]", r.re_min, r.re_max, r.im_min, r.im_max));
    }
    for (i, r) in o.reasons.iter().enumerate() {
        kv(&format!("verdict.reason[{i}]"), r.clone());
    }
    kv("verdict", o.verdict.label().into());
    s
}

fn fit_csv(o: &ExperimentOutcome) -> String {
    let mut s = String::from("r,n,fit\n");
    for (r, n) in o.counting.radii.iter().zip(&o.counting.counts) {
        let line = o.fit.as_ref().map_or(f64::NAN, |f| f.slope * r + f.intercept);
        let _ = writeln!(s, "{r:.12e},{n},{line:.12e}");
    }
    s
}

const GNUPLOT: &str = "\
# resonances.csv: re_k,im_k,multiplicity,residual,kind
# counting_fit.csv: r,n,fit
set datafile separator ','
set key autotitle columnhead
set multiplot layout 1,2
set title 'resonances'
set xlabel 'Re k'
set ylabel 'Im k'
plot 'resonances.csv' using 1:2 with points pt 7 ps 0.6 title 'k'
set title 'counting function'
set xlabel 'r'
set ylabel 'N(r)'
plot 'counting_fit.csv' using 1:2 with steps title 'N(r)', '' using 1:3 with lines title 'fit'
unset multiplot
";

/// Writes resonances.csv, counting.csv, report.txt, counting_fit.csv and
/// plot.gp into `dir`.
pub fn write_outputs(o: &ExperimentOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("resonances.csv"), resonances_csv(&o.list))?;
    fs::write(dir.join("counting.csv"), counting_csv(&o.counting))?;
    fs::write(dir.join("counting_fit.csv"), fit_csv(o))?;
    fs::write(dir.join("report.txt"), report_text(o))?;
    fs::write(dir.join("plot.gp"), GNUPLOT)?;
    Ok(())
}

/// Evaluates the configuration and writes its outputs.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutcome> {
    let o = evaluate(cfg)?;
    write_outputs(&o, &cfg.output)?;
    Ok(o)
}

/// Convergence probe alone, at the configured probe points.
pub fn run_probe(cfg: &RunConfig) -> Result<Vec<ProbeReport>> {
    let v = cfg.validate()?;
    if v.spec.is_zero() {
        return Ok(Vec::new());
    }
    let ctx = context(&v)?;
    let pts = probe_samples(&v.region, v.window, cfg.probe.samples);
    Ok(vec![
        convergence_probe(&v.spec, &ctx, &pts, Refinement::DoubleNodes)?,
        convergence_probe(&v.spec, &ctx, &pts, Refinement::Depth { extra_modes: PROBE_EXTRA_MODES })?,
    ])
}

/// One-dimensional profile of a y-independent piecewise-constant potential.
pub fn oracle_profile(spec: &PotentialSpec) -> Result<OracleProfile> {
    let domain = match spec.geometry {
        Geometry::Full => OracleDomain::Line,
        Geometry::Half { bc } => OracleDomain::HalfLine { bc },
    };
    if spec.is_zero() {
        return Ok(OracleProfile::zero(domain));
    }
    if !spec.is_y_independent() {
        return Err(ScatterError::InvalidPotential("the oracle needs a y-independent potential".into()));
    }
    let mut weights = Vec::with_capacity(spec.terms.len());
    for t in &spec.terms {
        if !matches!(t.x, XProfile::PiecewiseConstant { .. }) {
            return Err(ScatterError::InvalidPotential("the oracle needs piecewise-constant x-profiles".into()));
        }
        let w = t.y.constant_value();
        weights.push(w.ok_or_else(|| ScatterError::InvalidPotential("y-profile is not constant".into()))?);
    }
    let mut breaks = spec.breakpoints();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let values = breaks
        .windows(2)
        .map(|w| {
            let x = 0.5 * (w[0] + w[1]);
            spec.terms.iter().zip(&weights).map(|(t, c)| t.x.eval(x) * c).sum()
        })
        .collect();
    OracleProfile::new(domain, breaks, values)
}

/// A cylinder zero paired with its predicted counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedZero {
    pub located: Complex64,
    pub predicted: Complex64,
    pub mode: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub matched: Vec<MatchedZero>,
    /// Cylinder zeros with no prediction, each repeated by multiplicity.
    pub unmatched_located: Vec<Complex64>,
    pub unmatched_predicted: Vec<MappedZero>,
    /// Largest deviation over matched pairs; infinite when anything is
    /// unmatched away from the region boundary.
    pub hausdorff: f64,
    pub located: ResonanceList,
    pub predicted: Vec<MappedZero>,
    pub probes: Vec<ProbeReport>,
}

impl CompareReport {
    pub fn max_deviation(&self) -> f64 {
        self.matched.iter().fold(0.0, |m, z| m.max(z.deviation))
    }

    pub fn bijective(&self) -> bool {
        self.unmatched_located.is_empty() && self.unmatched_predicted.is_empty()
    }
}

/// Region for the one-dimensional search whose image under the mode map
/// covers `region` for every shift in `shifts`.
pub fn oracle_region(region: &Region, shifts: &[f64]) -> Region {
    let s_max = shifts.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    // a nonnegative shift can only push ζ further below the real axis
    let alpha = if shifts.iter().all(|&s| s >= 0.0) { region.alpha } else { 0.25 * region.alpha };
    Region { alpha, r_max: (region.r_max.powi(2) + s_max).sqrt() + 0.5 }
}

/// Oracle resonances pushed through the mode map into the region.
pub fn oracle_predictions(v: &Validated) -> Result<Vec<MappedZero>> {
    let profile = oracle_profile(&v.spec)?;
    let tilde = tilde_set(&v.sheet, &v.basis);
    let nu0 = v.basis.nu_sq(v.sheet.anchor());
    let shifts: Vec<f64> = tilde.members.iter().map(|&l| v.basis.sigma_sq(l) - nu0).collect();
    let zeros = oracle_list(&profile, &oracle_region(&v.region, &shifts))?;
    let pairs: Vec<(Complex64, u32)> = zeros.zeros.iter().map(|z| (z.k, z.multiplicity)).collect();
    let mut out = mode_map(&pairs, &v.sheet, &v.basis, Some(&v.region));
    out.sort_by(|a, b| a.k.re.partial_cmp(&b.k.re).unwrap().then(a.mode.cmp(&b.mode)));
    Ok(out)
}

/// Runs the cylinder pipeline and the oracle and pairs their zeros.
pub fn compare_separable(cfg: &RunConfig, tol: f64) -> Result<CompareReport> {
    let v = cfg.validate()?;
    let predicted = oracle_predictions(&v)?;
    let ctx = context(&v)?;
    let located = locate_resonances(&v, &ctx);
    let probes = if v.spec.is_zero() {
        Vec::new()
    } else {
        let pts = probe_samples(&v.region, v.window, cfg.probe.samples);
        vec![
            convergence_probe(&v.spec, &ctx, &pts, Refinement::DoubleNodes)?,
            convergence_probe(&v.spec, &ctx, &pts, Refinement::Depth { extra_modes: PROBE_EXTRA_MODES })?,
        ]
    };

    let mut pool: Vec<Complex64> = Vec::new();
    for z in &located.zeros {
        pool.extend(std::iter::repeat(z.k).take(z.multiplicity as usize));
    }
    let mut taken = vec![false; pool.len()];
    let mut matched = Vec::new();
    let mut unmatched_predicted = Vec::new();
    for p in &predicted {
        for _ in 0..p.multiplicity {
            let best = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .map(|(i, k)| (i, (k - p.k).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            match best {
                Some((i, d)) if d <= tol => {
                    taken[i] = true;
                    matched.push(MatchedZero { located: pool[i], predicted: p.k, mode: p.mode, deviation: d });
                }
                _ => unmatched_predicted.push(*p),
            }
        }
    }
    let unmatched_located: Vec<Complex64> = pool.iter().zip(&taken).filter(|(_, t)| !**t).map(|(k, _)| *k).collect();
    let near_edge = |k: Complex64| (v.region.r_max - k.norm()).abs() <= tol || (k.im + v.region.alpha).abs() <= tol;
    let strays = unmatched_located.iter().any(|k| !near_edge(*k)) || unmatched_predicted.iter().any(|p| !near_edge(p.k));
    let hausdorff = if strays { f64::INFINITY } else { matched.iter().fold(0.0f64, |m, z| m.max(z.deviation)) };
    Ok(CompareReport { matched, unmatched_located, unmatched_predicted, hausdorff, located, predicted, probes })
}

pub fn compare_text(r: &CompareReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "located: {}", r.located.count());
    let _ = writeln!(s, "predicted: {}", r.predicted.iter().map(|p| p.multiplicity as usize).sum::<usize>());
    let _ = writeln!(s, "matched: {}", r.matched.len());
    let _ = writeln!(s, "bijective: {}", r.bijective());
    let _ = writeln!(s, "hausdorff: {:.3e}", r.hausdorff);
    let _ = writeln!(s, "max_deviation: {:.3e}", r.max_deviation());
    for p in &r.probes {
        let _ = writeln!(s, "probe.{}.max_change: {:.3e}", probe_name(p.refinement), p.max_change());
    }
    for (i, m) in r.matched.iter().enumerate() {
        let _ = writeln!(s, "pair[{i}]: k = {} mode {} deviation {:.3e}", m.located, m.mode, m.deviation);
    }
    for (i, k) in r.unmatched_located.iter().enumerate() {
        let _ = writeln!(s, "unmatched_located[{i}]: {k}");
    }
    for (i, p) in r.unmatched_predicted.iter().enumerate() {
        let _ = writeln!(s, "unmatched_predicted[{i}]: {} (mode {}, zeta {})", p.k, p.mode, p.zeta);
    }
    s
}

/// Oracle zeros mapped into the region, as CSV.
pub fn oracle_csv(pred: &[MappedZero]) -> String {
    let mut s = String::from("re_k,im_k,multiplicity,mode,re_zeta,im_zeta\n");
    for p in pred {
        let _ = writeln!(s, "{},{},{},{}", fmt_c(p.k), p.multiplicity, p.mode, fmt_c(p.zeta));
    }
    s
}
