//! Nyström discretization of V R_0 on mode-vector functions and the
//! solves (I + V R_0) φ = V Φ.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::potential::{Geometry, ModeCoupledPotential};
use crate::quadrature::{barycentric_weights, gauss_legendre_on, lagrange_basis_at};
use crate::resolvent::grid::Grid;
use crate::sheet::{PhysicalPoint, SheetPoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default threshold on the singular margin below which a sample is flagged.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-10;

/// Same-panel product rule for one target node: the |x − x′| kink is
/// resolved by splitting the panel at the target and interpolating the
/// unknown from the panel nodes.
#[derive(Debug, Clone)]
struct TargetRule {
    /// |x_q − t_s| for every sub-node.
    dist: Vec<f64>,
    /// w_s · L_j(t_s), row-major over (s, j).
    lw: Vec<f64>,
}

/// Geometry-only part of the Nyström rule, shared by every k.
#[derive(Debug, Clone)]
pub struct NystromRule {
    grid: Grid,
    targets: Vec<TargetRule>,
}

impl NystromRule {
    pub fn new(grid: Grid) -> Self {
        let mut targets = Vec::with_capacity(grid.len());
        for q in 0..grid.len() {
            let p = grid.panels()[grid.panel_of(q)];
            let pnodes = &grid.nodes()[p.start..p.start + p.len];
            let bary = barycentric_weights(pnodes);
            let xq = grid.nodes()[q];
            let mut dist = Vec::with_capacity(2 * p.len);
            let mut lw = Vec::with_capacity(2 * p.len * p.len);
            for (lo, hi) in [(p.a, xq), (xq, p.b)] {
                let (ts, ws) = gauss_legendre_on(p.len, lo, hi);
                for (t, w) in ts.into_iter().zip(ws) {
                    dist.push((xq - t).abs());
                    lw.extend(lagrange_basis_at(pnodes, &bary, t).into_iter().map(|l| l * w));
                }
            }
            targets.push(TargetRule { dist, lw });
        }
        NystromRule { grid, targets }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Matrix K (row-major, N × N) with (R_0 f)(x_q) ≈ Σ_{q′} K[q, q′] f(x_{q′}).
    pub fn kernel_matrix(&self, r: Complex64, geometry: Geometry) -> Vec<Complex64> {
        let g = &self.grid;
        let n = g.len();
        let pre = I / (2.0 * r);
        let ir = I * r;
        let mut k = vec![Complex64::new(0.0, 0.0); n * n];
        let (x, w) = (g.nodes(), g.weights());
        for q in 0..n {
            let p = g.panels()[g.panel_of(q)];
            let row = &mut k[q * n..(q + 1) * n];
            for qp in (0..p.start).chain(p.start + p.len..n) {
                row[qp] = pre * (ir * (x[q] - x[qp]).abs()).exp() * w[qp];
            }
            let rule = &self.targets[q];
            for (s, &d) in rule.dist.iter().enumerate() {
                let e = pre * (ir * d).exp();
                let lw = &rule.lw[s * p.len..(s + 1) * p.len];
                for (j, &c) in lw.iter().enumerate() {
                    row[p.start + j] += e * c;
                }
            }
            if let Some(sigma) = geometry.image_sign() {
                for qp in 0..n {
                    row[qp] += sigma * pre * (ir * (x[q] + x[qp])).exp() * w[qp];
                }
            }
        }
        k
    }
}

/// Discretized V R_0(w_ℰ(z)) on the retained modes; unknown (a, q) sits at
/// row a·N + q where `modes[a]` is the mode index.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub matrix: DMatrix<Complex64>,
    pub modes: Vec<usize>,
    pub n_nodes: usize,
    pub k: Complex64,
}

impl DiscretizedOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Builds the Nyström matrix of V R_0 from physical-sheet branch values.
#[allow(non_snake_case)]
pub fn assemble_VR0(
    v: &ModeCoupledPotential,
    phys: &PhysicalPoint,
    rule: &NystromRule,
    modes: &[usize],
    geometry: Geometry,
) -> Result<DiscretizedOperator> {
    let n = rule.grid().len();
    let dim = modes.len() * n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for (b, &m) in modes.iter().enumerate() {
        if !modes.iter().any(|&l| v.couples(l, m)) {
            continue;
        }
        let r = phys.r_tilde(m);
        if !(r.im > 0.0) {
            return Err(ScatterError::NonPhysicalBranch(r));
        }
        let km = rule.kernel_matrix(r, geometry);
        for (a, &l) in modes.iter().enumerate() {
            if !v.couples(l, m) {
                continue;
            }
            let vlm = v.column(l, m);
            for q in 0..n {
                if vlm[q].norm() == 0.0 {
                    continue;
                }
                let row = a * n + q;
                for qp in 0..n {
                    matrix[(row, b * n + qp)] = vlm[q] * km[q * n + qp];
                }
            }
        }
    }
    Ok(DiscretizedOperator { matrix, modes: modes.to_vec(), n_nodes: n, k: phys.k })
}

/// LU of I + op with its singular margin.
pub struct FactoredOperator {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    pub singular_margin: f64,
    pub modes: Vec<usize>,
    pub n_nodes: usize,
}

impl FactoredOperator {
    /// Factor I + op; flags the sample when the margin is at most `threshold`.
    pub fn new(op: DiscretizedOperator, threshold: f64) -> Result<Self> {
        let dim = op.dim();
        let k = op.k;
        let mut a = op.matrix;
        for i in 0..dim {
            a[(i, i)] += Complex64::new(1.0, 0.0);
        }
        let lu = a.lu();
        let margin = singular_margin(&lu, dim);
        if !(margin > threshold) {
            return Err(ScatterError::PoleProximity { k, margin });
        }
        Ok(FactoredOperator { lu, singular_margin: margin, modes: op.modes, n_nodes: op.n_nodes })
    }

    /// Solves for several right-hand sides at once (columns).
    pub fn solve(&self, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.lu.solve(rhs).expect("factor checked for singularity")
    }
}

/// Estimate of σ_min(A) from one inverse power step on A^H A.
fn singular_margin(lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let u = lu.u();
    if (0..n).any(|i| u[(i, i)].norm() == 0.0) {
        return 0.0;
    }
    let v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.5 * (i as f64).sin(), 0.25 * (1.7 * i as f64).cos()));
    // A^{-H} v = P^{-1} L^{-H} U^{-H} v
    let Some(w) = u.ad_solve_upper_triangular(&v) else { return 0.0 };
    let Some(mut y) = lu.l().ad_solve_lower_triangular(&w) else { return 0.0 };
    lu.p().inv_permute_rows(&mut y);
    let Some(x) = lu.solve(&y) else { return 0.0 };
    let (ny, nx) = (y.norm(), x.norm());
    if !nx.is_finite() || !ny.is_finite() || nx == 0.0 {
        return 0.0;
    }
    ny / nx
}

/// x-dependence of an incoming or test wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    /// e^{i r x}
    Plus,
    /// e^{−i r x}
    Minus,
    /// e^{i r x} + σ e^{−i r x}
    Standing(f64),
}

impl Wave {
    pub fn eval(self, r: Complex64, x: f64) -> Complex64 {
        match self {
            Wave::Plus => (I * r * x).exp(),
            Wave::Minus => (-I * r * x).exp(),
            Wave::Standing(s) => (I * r * x).exp() + s * (-I * r * x).exp(),
        }
    }
}

/// Mode-vector function on the grid; modes outside `modes` vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    pub modes: Vec<usize>,
    pub n_nodes: usize,
    pub values: Vec<Complex64>,
}

impl ModeVector {
    pub fn zero(n_nodes: usize) -> Self {
        ModeVector { modes: Vec::new(), n_nodes, values: Vec::new() }
    }

    /// Component l on the grid, `None` when it vanishes identically.
    pub fn component(&self, l: usize) -> Option<&[Complex64]> {
        let a = self.modes.iter().position(|&m| m == l)?;
        Some(&self.values[a * self.n_nodes..(a + 1) * self.n_nodes])
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Right-hand side V Φ_j restricted to the retained modes, with
/// Φ_j = wave(r̃_j x) φ_j(y) evaluated on the sheet point.
pub fn incoming(v: &ModeCoupledPotential, modes: &[usize], j: usize, wave: Wave, p: &SheetPoint) -> Vec<Complex64> {
    let x = v.nodes();
    let n = x.len();
    let r = p.r_tilde(j);
    let e: Vec<Complex64> = x.iter().map(|&x| wave.eval(r, x)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); modes.len() * n];
    for (a, &l) in modes.iter().enumerate() {
        if v.couples(l, j) {
            for (q, vq) in v.column(l, j).iter().enumerate() {
                out[a * n + q] = vq * e[q];
            }
        }
    }
    out
}

/// Solves (I + op) φ = V Φ_{j, wave}.
pub fn solve_phi(
    factored: &FactoredOperator,
    v: &ModeCoupledPotential,
    j: usize,
    wave: Wave,
    p: &SheetPoint,
) -> ModeVector {
    let rhs = incoming(v, &factored.modes, j, wave, p);
    if rhs.iter().all(|c| c.norm() == 0.0) {
        return ModeVector::zero(factored.n_nodes);
    }
    let sol = factored.solve(&DMatrix::from_column_slice(rhs.len(), 1, &rhs));
    ModeVector { modes: factored.modes.clone(), n_nodes: factored.n_nodes, values: sol.as_slice().to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{mode_couple, support_box, PotentialSpec, SeparableTerm, XProfile};
    use crate::sheet::{flip_to_physical, lift, SheetLabel};
    use crate::transverse::{BoundaryCondition, CrossSection, ModeBasis, YProfile};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kernel_matrix_integrates_smooth_functions() {
        // ∫_{-1}^{1} (i/2r) e^{i r |x − t|} dt in closed form at each node
        let grid = Grid::build(-1.0, 1.0, &[0.25], 24, 0.5);
        let rule = NystromRule::new(grid.clone());
        let r = Complex64::new(7.0, 0.8);
        let k = rule.kernel_matrix(r, Geometry::Full);
        let n = grid.len();
        for q in 0..n {
            let x = grid.nodes()[q];
            let got: Complex64 = (0..n).map(|j| k[q * n + j]).sum();
            // ∫ e^{i r |x−t|} dt = (e^{i r (x+1)} − 1)/(i r) + (e^{i r (1−x)} − 1)/(i r)
            let exact = (I / (2.0 * r))
                * (((I * r * (x + 1.0)).exp() - 1.0) / (I * r) + ((I * r * (1.0 - x)).exp() - 1.0) / (I * r));
            assert!((got - exact).norm() < 1e-12, "q = {q}: {got} vs {exact}");
        }
    }

    #[test]
    fn image_kernel_integrates_exactly() {
        let grid = Grid::build(0.0, 1.0, &[], 20, 0.5);
        let rule = NystromRule::new(grid.clone());
        let r = Complex64::new(3.0, 0.5);
        for sigma in [1.0, -1.0] {
            let bc = if sigma > 0.0 { BoundaryCondition::Neumann } else { BoundaryCondition::Dirichlet };
            let k = rule.kernel_matrix(r, Geometry::Half { bc });
            let n = grid.len();
            for q in [0, 7, n - 1] {
                let x = grid.nodes()[q];
                let got: Complex64 = (0..n).map(|j| k[q * n + j]).sum();
                let direct = (((I * r * x).exp() - 1.0) + ((I * r * (1.0 - x)).exp() - 1.0)) / (I * r);
                let image = ((I * r * (x + 1.0)).exp() - (I * r * x).exp()) / (I * r);
                let exact = (I / (2.0 * r)) * (direct + sigma * image);
                assert!((got - exact).norm() < 1e-12);
            }
        }
    }

    fn barrier_setup(basis_len: usize) -> (ModeBasis, PotentialSpec, Grid) {
        let basis = ModeBasis::build(CrossSection::Circle { circumference: 2.0 * PI }, basis_len).unwrap();
        let spec = PotentialSpec::new(
            Geometry::Full,
            vec![SeparableTerm { x: XProfile::constant(-1.0, 1.0, c(0.05)), y: YProfile::Constant(c(1.0)) }],
        )
        .unwrap();
        let bx = support_box(&spec).unwrap();
        let grid = Grid::build(bx.x_min, bx.x_max, &spec.breakpoints(), 16, 0.5);
        (basis, spec, grid)
    }

    #[test]
    fn zero_potential_gives_zero_operator_and_solution() {
        let (basis, spec, grid) = barrier_setup(3);
        let v = mode_couple(&spec.scaled(c(0.0)), &basis, &grid).unwrap();
        let p = lift(Complex64::new(1.0, -0.5), &SheetLabel::single(1).unwrap(), &basis).unwrap();
        let rule = NystromRule::new(grid);
        let op = assemble_VR0(&v, &flip_to_physical(&p), &rule, &[1, 2, 3], Geometry::Full).unwrap();
        assert!(op.matrix.iter().all(|z| z.norm() == 0.0));
        let f = FactoredOperator::new(op, DEFAULT_POLE_MARGIN).unwrap();
        assert!((f.singular_margin - 1.0).abs() < 1e-12);
        assert_eq!(solve_phi(&f, &v, 1, Wave::Plus, &p).norm(), 0.0);
    }

    #[test]
    fn diagonal_potential_gives_block_diagonal_operator() {
        let (basis, spec, grid) = barrier_setup(3);
        let v = mode_couple(&spec, &basis, &grid).unwrap();
        let p = lift(Complex64::new(2.0, -0.5), &SheetLabel::single(1).unwrap(), &basis).unwrap();
        let rule = NystromRule::new(grid.clone());
        let op = assemble_VR0(&v, &flip_to_physical(&p), &rule, &[1, 2, 3], Geometry::Full).unwrap();
        let n = grid.len();
        for i in 0..3 * n {
            for j in 0..3 * n {
                if i / n != j / n {
                    assert_eq!(op.matrix[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn solution_matches_neumann_series() {
        let (basis, spec, grid) = barrier_setup(1);
        let v = mode_couple(&spec, &basis, &grid).unwrap();
        let p = lift(Complex64::new(2.0, -0.3), &SheetLabel::single(1).unwrap(), &basis).unwrap();
        let rule = NystromRule::new(grid);
        let op = assemble_VR0(&v, &flip_to_physical(&p), &rule, &[1], Geometry::Full).unwrap();
        let a = op.matrix.clone();
        let norm_op = a.norm();
        let f = FactoredOperator::new(op, DEFAULT_POLE_MARGIN).unwrap();
        let phi = solve_phi(&f, &v, 1, Wave::Plus, &p);
        let g = DVector::from_vec(incoming(&v, &[1], 1, Wave::Plus, &p));
        let series = &g - &a * &g;
        let diff = (DVector::from_vec(phi.values.clone()) - series).norm();
        assert!(diff <= 2.0 * norm_op * norm_op * g.norm(), "{diff} vs {}", norm_op * norm_op * g.norm());
        // residual of the linear solve
        let mut full = a.clone();
        for i in 0..full.nrows() {
            full[(i, i)] += c(1.0);
        }
        let res = (&full * DVector::from_vec(phi.values.clone()) - &g).norm();
        assert!(res <= 1e-10 * g.norm());
    }

    #[test]
    fn solution_supported_on_potential() {
        // every unknown lives on nodes inside supp V; nodes where V vanishes give φ = 0
        let basis = ModeBasis::build(CrossSection::Circle { circumference: 2.0 * PI }, 1).unwrap();
        let spec = PotentialSpec::new(
            Geometry::Full,
            vec![SeparableTerm {
                x: XProfile::PiecewiseConstant { breakpoints: vec![-1.0, -0.2, 0.3, 1.0], values: vec![c(2.0), c(0.0), c(1.0)] },
                y: YProfile::Constant(c(1.0)),
            }],
        )
        .unwrap();
        let grid = Grid::build(-1.0, 1.0, &spec.breakpoints(), 12, 0.5);
        let v = mode_couple(&spec, &basis, &grid).unwrap();
        let p = lift(Complex64::new(1.0, -0.4), &SheetLabel::single(1).unwrap(), &basis).unwrap();
        let rule = NystromRule::new(grid.clone());
        let op = assemble_VR0(&v, &flip_to_physical(&p), &rule, &[1], Geometry::Full).unwrap();
        let f = FactoredOperator::new(op, DEFAULT_POLE_MARGIN).unwrap();
        let phi = solve_phi(&f, &v, 1, Wave::Minus, &p);
        for (q, &x) in grid.nodes().iter().enumerate() {
            if x > -0.2 && x < 0.3 {
                assert_eq!(phi.values[q].norm(), 0.0);
            } else {
                assert!(phi.values[q].norm() > 0.0);
            }
        }
    }

    #[test]
    fn margin_detects_singularity() {
        let grid = Grid::build(0.0, 1.0, &[], 4, 1.0);
        let op = DiscretizedOperator {
            matrix: DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0), c(0.0), c(1.0), c(2.0)])),
            modes: vec![1],
            n_nodes: grid.len(),
            k: Complex64::new(0.0, -1.0),
        };
        assert!(matches!(FactoredOperator::new(op, 1e-10), Err(ScatterError::PoleProximity { .. })));
        let op = DiscretizedOperator {
            matrix: DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0 + 1e-3), c(0.0), c(1.0), c(2.0)])),
            modes: vec![1],
            n_nodes: grid.len(),
            k: Complex64::new(0.0, -1.0),
        };
        let f = FactoredOperator::new(op, 1e-10).unwrap();
        assert!(f.singular_margin < 2e-3 && f.singular_margin >= 1e-3 * 0.999);
    }
}
