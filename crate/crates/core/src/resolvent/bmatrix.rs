//! The finite matrix B(z) whose determinant det(I + B) vanishes exactly at
//! resonances on the chosen sheet, and the context that evaluates it.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::potential::{mode_couple, support_box, Geometry, ModeCoupledPotential, PotentialSpec};
use crate::resolvent::grid::Grid;
use crate::resolvent::operator::{assemble_VR0, incoming, FactoredOperator, ModeVector, NystromRule, Wave, DEFAULT_POLE_MARGIN};
use crate::sheet::{flip_to_physical, lift_with_guard, tilde_set, SheetLabel, SheetPoint, TildeSet, DEFAULT_RAMIFICATION_GUARD};
use crate::transverse::ModeBasis;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Discretization and guard parameters of the resolvent engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    pub nodes_per_panel: usize,
    pub max_panel_width: f64,
    /// Coupling-graph depth retained beyond Ẽ.
    pub depth: usize,
    pub pole_margin: f64,
    pub ramification_guard: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            nodes_per_panel: 24,
            max_panel_width: 0.5,
            depth: 4,
            pole_margin: DEFAULT_POLE_MARGIN,
            ramification_guard: DEFAULT_RAMIFICATION_GUARD,
        }
    }
}

/// B(z) with its determinant and the smallest singular margin met while
/// solving for the scattered waves.
#[derive(Debug, Clone)]
pub struct BMatrix {
    pub k: Complex64,
    pub entries: DMatrix<Complex64>,
    pub det: Complex64,
    pub singular_margin: f64,
}

impl BMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Sources j ∈ Ẽ whose scattered waves live on the same forward-closed set
/// of modes and so share one factorization.
#[derive(Debug, Clone)]
struct SolveGroup {
    modes: Vec<usize>,
    sources: Vec<usize>,
}

/// Everything needed to evaluate det(I + B(z)) at many points k.
#[derive(Debug, Clone)]
pub struct ResolventContext {
    geometry: Geometry,
    basis: ModeBasis,
    sheet: SheetLabel,
    tilde: TildeSet,
    rule: NystromRule,
    v: ModeCoupledPotential,
    active: Vec<usize>,
    groups: Vec<SolveGroup>,
    opts: EngineOptions,
}

impl ResolventContext {
    pub fn new(spec: &PotentialSpec, basis: &ModeBasis, sheet: &SheetLabel, opts: EngineOptions) -> Result<Self> {
        let grid = match support_box(spec) {
            Ok(bx) => Grid::build(bx.x_min, bx.x_max, &spec.breakpoints(), opts.nodes_per_panel, opts.max_panel_width),
            Err(ScatterError::ZeroPotential) => Grid::empty(),
            Err(e) => return Err(e),
        };
        Self::with_grid(spec, basis, sheet, grid, opts)
    }

    pub fn with_grid(spec: &PotentialSpec, basis: &ModeBasis, sheet: &SheetLabel, grid: Grid, opts: EngineOptions) -> Result<Self> {
        sheet.validate_for(basis)?;
        let tilde = tilde_set(sheet, basis);
        let v = mode_couple(spec, basis, &grid)?;
        let active = active_modes(&v, &tilde, opts.depth);
        let groups = solve_groups(&v, &tilde, &active);
        Ok(ResolventContext {
            geometry: spec.geometry,
            basis: basis.clone(),
            sheet: sheet.clone(),
            tilde,
            rule: NystromRule::new(grid),
            v,
            active,
            groups,
            opts,
        })
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn sheet(&self) -> &SheetLabel {
        &self.sheet
    }

    pub fn tilde(&self) -> &TildeSet {
        &self.tilde
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn grid(&self) -> &Grid {
        self.rule.grid()
    }

    pub fn potential(&self) -> &ModeCoupledPotential {
        &self.v
    }

    pub fn options(&self) -> EngineOptions {
        self.opts
    }

    /// Modes retained by the coupling-depth truncation.
    pub fn active_modes(&self) -> &[usize] {
        &self.active
    }

    /// Largest linear system solved per evaluation.
    pub fn largest_system(&self) -> usize {
        self.groups.iter().map(|g| g.modes.len()).max().unwrap_or(0) * self.grid().len()
    }

    pub fn lift(&self, k: Complex64) -> Result<SheetPoint> {
        lift_with_guard(k, &self.sheet, &self.basis, self.opts.ramification_guard)
    }

    /// Scattered waves φ_{j, wave} for every source of every group.
    fn scattered(&self, p: &SheetPoint, waves: &[Wave]) -> Result<(HashMap<(usize, usize), ModeVector>, f64)> {
        let phys = flip_to_physical(p);
        let n = self.grid().len();
        let mut out = HashMap::new();
        let mut margin = f64::INFINITY;
        for g in &self.groups {
            let op = assemble_VR0(&self.v, &phys, &self.rule, &g.modes, self.geometry)?;
            let f = FactoredOperator::new(op, self.opts.pole_margin)?;
            margin = margin.min(f.singular_margin);
            let cols = g.sources.len() * waves.len();
            let dim = g.modes.len() * n;
            let mut rhs = DMatrix::<Complex64>::zeros(dim, cols);
            for (s, &j) in g.sources.iter().enumerate() {
                for (w, &wave) in waves.iter().enumerate() {
                    let col = incoming(&self.v, &g.modes, j, wave, p);
                    rhs.column_mut(s * waves.len() + w).copy_from_slice(&col);
                }
            }
            let sol = f.solve(&rhs);
            for (s, &j) in g.sources.iter().enumerate() {
                for w in 0..waves.len() {
                    let values = sol.column(s * waves.len() + w).iter().copied().collect();
                    out.insert((j, w), ModeVector { modes: g.modes.clone(), n_nodes: n, values });
                }
            }
        }
        Ok((out, if margin.is_finite() { margin } else { 1.0 }))
    }

    #[allow(non_snake_case)]
    pub fn assemble_B(&self, k: Complex64) -> Result<BMatrix> {
        let p = self.lift(k)?;
        self.assemble_B_at(&p)
    }

    #[allow(non_snake_case)]
    pub fn assemble_B_at(&self, p: &SheetPoint) -> Result<BMatrix> {
        let tl = &self.tilde.members;
        let c = tl.len();
        let grid = self.grid();
        let zero = ModeVector::zero(grid.len());
        let (entries, margin) = match self.geometry.image_sign() {
            None => {
                let (phi, margin) = self.scattered(p, &[Wave::Plus, Wave::Minus])?;
                let mut b = DMatrix::<Complex64>::zeros(2 * c, 2 * c);
                for (row, &l) in tl.iter().enumerate() {
                    for (col, &j) in tl.iter().enumerate() {
                        let plus = phi.get(&(j, 0)).unwrap_or(&zero);
                        let minus = phi.get(&(j, 1)).unwrap_or(&zero);
                        b[(row, col)] = b_entry(l, plus, Wave::Minus, p, grid);
                        b[(row, c + col)] = b_entry(l, minus, Wave::Minus, p, grid);
                        b[(c + row, col)] = b_entry(l, plus, Wave::Plus, p, grid);
                        b[(c + row, c + col)] = b_entry(l, minus, Wave::Plus, p, grid);
                    }
                }
                (b, margin)
            }
            Some(sigma) => {
                let (phi, margin) = self.scattered(p, &[Wave::Standing(sigma)])?;
                let mut b = DMatrix::<Complex64>::zeros(c, c);
                for (row, &l) in tl.iter().enumerate() {
                    for (col, &j) in tl.iter().enumerate() {
                        let u = phi.get(&(j, 0)).unwrap_or(&zero);
                        b[(row, col)] = b_entry(l, u, Wave::Standing(sigma), p, grid);
                    }
                }
                (b, margin)
            }
        };
        let mut ib = entries.clone();
        for i in 0..ib.nrows() {
            ib[(i, i)] += Complex64::new(1.0, 0.0);
        }
        let det = if ib.nrows() == 0 { Complex64::new(1.0, 0.0) } else { ib.determinant() };
        Ok(BMatrix { k: p.k, entries, det, singular_margin: margin })
    }

    /// det(I + B(z)) at the sheet point with coordinate k.
    pub fn det_fn(&self, k: Complex64) -> Result<Complex64> {
        Ok(self.assemble_B(k)?.det)
    }
}

/// One entry of B: (i / 2 r̃_l) ∫ (φ)_l(x) ψ(x) dx with the test wave
/// ψ = e^{∓ i r̃_l x} on the full line and e^{−i r̃_l x} + σ e^{i r̃_l x} on
/// the half line (pass `Wave::Standing(σ)`).
pub fn b_entry(l: usize, phi: &ModeVector, test: Wave, p: &SheetPoint, grid: &Grid) -> Complex64 {
    let Some(u) = phi.component(l) else {
        return Complex64::new(0.0, 0.0);
    };
    let r = p.r_tilde(l);
    let (x, w) = (grid.nodes(), grid.weights());
    let integral: Complex64 = match test {
        Wave::Standing(s) => (0..x.len()).map(|q| u[q] * Wave::Standing(s).eval(-r, x[q]) * w[q]).sum(),
        _ => (0..x.len()).map(|q| u[q] * test.eval(r, x[q]) * w[q]).sum(),
    };
    I / (2.0 * r) * integral
}

/// Ẽ together with every mode reachable from it in at most `depth` steps of
/// the directed coupling graph (edge m → l when V_{lm} ≢ 0).
fn active_modes(v: &ModeCoupledPotential, tilde: &TildeSet, depth: usize) -> Vec<usize> {
    let mut seen: BTreeSet<usize> = tilde.members.iter().copied().collect();
    let mut frontier: Vec<usize> = tilde.members.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for &m in &frontier {
            for l in v.targets_of(m) {
                if seen.insert(l) {
                    next.push(l);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

/// The scattered wave of source j lives on the forward closure (within the
/// active set) of the modes j couples into; sources with equal closures are
/// solved together.
fn solve_groups(v: &ModeCoupledPotential, tilde: &TildeSet, active: &[usize]) -> Vec<SolveGroup> {
    let is_active = |l: usize| active.binary_search(&l).is_ok();
    let mut groups: Vec<SolveGroup> = Vec::new();
    for &j in &tilde.members {
        let mut closure: BTreeSet<usize> = v.targets_of(j).filter(|&l| is_active(l)).collect();
        let mut stack: Vec<usize> = closure.iter().copied().collect();
        while let Some(m) = stack.pop() {
            for l in v.targets_of(m) {
                if is_active(l) && closure.insert(l) {
                    stack.push(l);
                }
            }
        }
        if closure.is_empty() {
            continue;
        }
        let modes: Vec<usize> = closure.into_iter().collect();
        match groups.iter_mut().find(|g| g.modes == modes) {
            Some(g) => g.sources.push(j),
            None => groups.push(SolveGroup { modes, sources: vec![j] }),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{SeparableTerm, XProfile};
    use crate::transverse::{BoundaryCondition, CrossSection, Harmonic, YProfile};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn circle(l: usize) -> ModeBasis {
        ModeBasis::build(CrossSection::Circle { circumference: 2.0 * PI }, l).unwrap()
    }

    fn spec(geometry: Geometry, a: f64, b: f64, v: f64, y: YProfile) -> PotentialSpec {
        PotentialSpec::new(geometry, vec![SeparableTerm { x: XProfile::constant(a, b, c(v)), y }]).unwrap()
    }

    fn opts() -> EngineOptions {
        EngineOptions { nodes_per_panel: 16, depth: 2, ..EngineOptions::default() }
    }

    #[test]
    fn zero_potential_has_unit_determinant() {
        let basis = circle(5);
        let sheet = SheetLabel::new(&[1, 2], 1).unwrap();
        let ctx = ResolventContext::new(&PotentialSpec::zero(Geometry::Full), &basis, &sheet, opts()).unwrap();
        let b = ctx.assemble_B(Complex64::new(3.0, -1.0)).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(b.max_abs(), 0.0);
        assert_eq!(b.det, c(1.0));
    }

    #[test]
    fn half_cylinder_dimension() {
        let basis = circle(5);
        let sheet = SheetLabel::new(&[1, 2], 1).unwrap();
        let g = Geometry::Half { bc: BoundaryCondition::Dirichlet };
        let ctx = ResolventContext::new(&spec(g, 0.0, 1.0, 2.0, YProfile::Constant(c(1.0))), &basis, &sheet, opts()).unwrap();
        assert_eq!(ctx.assemble_B(Complex64::new(3.0, -1.0)).unwrap().dim(), 3);
    }

    #[test]
    fn counterexample_entries_vanish() {
        let basis = circle(7);
        let sheet = SheetLabel::single(1).unwrap();
        let y = YProfile::Trig(vec![Harmonic { order: 1, coeff: c(1.0) }]);
        let ctx = ResolventContext::new(&spec(Geometry::Full, -1.0, 1.0, 3.0, y), &basis, &sheet, opts()).unwrap();
        for k in [Complex64::new(5.0, -0.5), Complex64::new(-2.0, -3.0)] {
            let b = ctx.assemble_B(k).unwrap();
            assert_eq!(b.max_abs(), 0.0);
            assert_eq!(b.det, c(1.0));
        }
    }

    #[test]
    fn y_independent_potential_is_block_diagonal() {
        let basis = circle(5);
        let sheet = SheetLabel::new(&[1, 2], 1).unwrap();
        let ctx = ResolventContext::new(&spec(Geometry::Full, -1.0, 1.0, 4.0, YProfile::Constant(c(1.0))), &basis, &sheet, opts()).unwrap();
        let b = ctx.assemble_B(Complex64::new(2.0, -0.7)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i % 3 != j % 3 {
                    assert_eq!(b.entries[(i, j)].norm(), 0.0);
                }
            }
        }
        assert!(b.max_abs() > 0.0);
    }

    #[test]
    fn entries_decay_along_horizontal_line() {
        let basis = circle(3);
        let sheet = SheetLabel::single(1).unwrap();
        let ctx = ResolventContext::new(&spec(Geometry::Full, -1.0, 1.0, 10.0, YProfile::Constant(c(1.0))), &basis, &sheet, opts()).unwrap();
        let d20 = (ctx.det_fn(Complex64::new(20.0, -0.3)).unwrap() - 1.0).norm();
        let d40 = (ctx.det_fn(Complex64::new(40.0, -0.3)).unwrap() - 1.0).norm();
        assert!(d40 < d20);
    }

    #[test]
    fn upper_half_plane_is_rejected() {
        let basis = circle(3);
        let sheet = SheetLabel::single(1).unwrap();
        let ctx = ResolventContext::new(&spec(Geometry::Full, -1.0, 1.0, 1.0, YProfile::Constant(c(1.0))), &basis, &sheet, opts()).unwrap();
        assert!(matches!(ctx.det_fn(Complex64::new(1.0, 0.1)), Err(ScatterError::UpperHalfPlane { .. })));
    }

    #[test]
    fn active_set_follows_coupling_depth() {
        let basis = circle(11);
        let sheet = SheetLabel::single(1).unwrap();
        let mut hs = YProfile::cosine(1, c(0.3));
        hs.push(Harmonic { order: 0, coeff: c(1.0) });
        for (depth, want) in [(0, 1), (1, 3), (2, 5), (4, 9)] {
            let o = EngineOptions { depth, ..opts() };
            let ctx = ResolventContext::new(&spec(Geometry::Full, -1.0, 1.0, 1.0, YProfile::Trig(hs.clone())), &basis, &sheet, o).unwrap();
            assert_eq!(ctx.active_modes().len(), want);
        }
    }
}
