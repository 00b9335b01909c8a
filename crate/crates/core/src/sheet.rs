//! Sheets of the square-root Riemann surface over the cylinder spectrum.
//!
//! A sheet is named by a labeling set ℰ of distinct-eigenvalue indices: on
//! it Im r_j < 0 exactly for j ∈ ℰ. Points are addressed by the coordinate
//! k = r_{j0} with Im k < 0, where j0 ∈ ℰ is the anchor.

use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::transverse::ModeBasis;

/// Default radius of the excluded neighbourhood around each ν_j².
pub const DEFAULT_RAMIFICATION_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SheetLabel {
    members: Vec<usize>,
    anchor: usize,
}

impl SheetLabel {
    /// Members are 1-based distinct-eigenvalue indices; duplicates are merged.
    pub fn new(members: &[usize], anchor: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(ScatterError::InvalidSheet("labeling set is empty".into()));
        }
        if members.contains(&0) {
            return Err(ScatterError::InvalidSheet("indices are 1-based; found 0".into()));
        }
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if !m.contains(&anchor) {
            return Err(ScatterError::InvalidSheet(format!(
                "anchor j0 = {anchor} is not a member of {m:?}"
            )));
        }
        Ok(SheetLabel { members: m, anchor })
    }

    /// ℰ = {j} anchored at j.
    pub fn single(j: usize) -> Result<Self> {
        Self::new(&[j], j)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    pub fn validate_for(&self, basis: &ModeBasis) -> Result<()> {
        let jmax = basis.distinct_count();
        match self.members.last() {
            Some(&j) if j > jmax => Err(ScatterError::InvalidSheet(format!(
                "index {j} exceeds the {jmax} distinct eigenvalues of the basis"
            ))),
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        let m: Vec<String> = self.members.iter().map(|j| j.to_string()).collect();
        format!("{{{}}} anchor {}", m.join(","), self.anchor)
    }
}

/// Ẽ: mode indices whose eigenvalue is ν_j² for some j ∈ ℰ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeSet {
    pub members: Vec<usize>,
}

impl TildeSet {
    pub fn card(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.members.binary_search(&l).is_ok()
    }
}

pub fn tilde_set(sheet: &SheetLabel, basis: &ModeBasis) -> TildeSet {
    let members = (1..=basis.len())
        .filter(|&l| sheet.contains(basis.distinct_index_of(l)))
        .collect();
    TildeSet { members }
}

/// True iff ℰ = {1, …, J} for some J.
pub fn meets_physical(sheet: &SheetLabel) -> bool {
    sheet.members.iter().enumerate().all(|(i, &j)| j == i + 1)
}

/// A point of the ℰ-sheet with every branch value resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetPoint {
    pub k: Complex64,
    pub sheet: SheetLabel,
    /// Π = k² + ν_{j0}².
    pub base: Complex64,
    /// r_j for j = 1..=J_max (stored at j - 1).
    pub branches: Vec<Complex64>,
    /// r̃_l for l = 1..=L_max (stored at l - 1).
    pub mode_branches: Vec<Complex64>,
}

impl SheetPoint {
    pub fn r(&self, j: usize) -> Complex64 {
        self.branches[j - 1]
    }

    pub fn r_tilde(&self, l: usize) -> Complex64 {
        self.mode_branches[l - 1]
    }
}

/// Branch values on the physical sheet (all Im r_j > 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalPoint {
    pub k: Complex64,
    pub sheet: SheetLabel,
    pub base: Complex64,
    pub branches: Vec<Complex64>,
    pub mode_branches: Vec<Complex64>,
}

impl PhysicalPoint {
    pub fn r(&self, j: usize) -> Complex64 {
        self.branches[j - 1]
    }

    pub fn r_tilde(&self, l: usize) -> Complex64 {
        self.mode_branches[l - 1]
    }

    pub fn min_im(&self) -> f64 {
        self.branches.iter().fold(f64::INFINITY, |m, r| m.min(r.im))
    }

    /// Inverse of [`flip_to_physical`].
    pub fn unflip(&self, basis: &ModeBasis) -> SheetPoint {
        let branches = flip_branches(&self.branches, &self.sheet);
        let mode_branches = mode_values(&branches, basis);
        SheetPoint {
            k: self.k,
            sheet: self.sheet.clone(),
            base: self.base,
            branches,
            mode_branches,
        }
    }
}

/// Square root with Im ≥ 0 (cut along [0, ∞)).
pub fn upper_sqrt(w: Complex64) -> Complex64 {
    let s = w.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

pub fn lift(k: Complex64, sheet: &SheetLabel, basis: &ModeBasis) -> Result<SheetPoint> {
    lift_with_guard(k, sheet, basis, DEFAULT_RAMIFICATION_GUARD)
}

pub fn lift_with_guard(
    k: Complex64,
    sheet: &SheetLabel,
    basis: &ModeBasis,
    guard: f64,
) -> Result<SheetPoint> {
    if !(k.im < 0.0) {
        return Err(ScatterError::UpperHalfPlane { k });
    }
    sheet.validate_for(basis)?;
    let j0 = sheet.anchor();
    let base = k * k + basis.nu_sq(j0);
    if let Some(&nu_sq) = basis.distinct().iter().find(|&&nu| (base - nu).norm() <= guard) {
        return Err(ScatterError::Ramification { k, nu_sq, guard });
    }
    let mut branches = Vec::with_capacity(basis.distinct_count());
    for (i, &nu_sq) in basis.distinct().iter().enumerate() {
        let j = i + 1;
        let w = base - nu_sq;
        let r = if j == j0 {
            k
        } else {
            let s = upper_sqrt(w);
            if s.im == 0.0 {
                return Err(ScatterError::BoundaryRay { k, j });
            }
            if sheet.contains(j) {
                -s
            } else {
                s
            }
        };
        branches.push(r);
    }
    let mode_branches = mode_values(&branches, basis);
    Ok(SheetPoint {
        k,
        sheet: sheet.clone(),
        base,
        branches,
        mode_branches,
    })
}

fn flip_branches(branches: &[Complex64], sheet: &SheetLabel) -> Vec<Complex64> {
    branches
        .iter()
        .enumerate()
        .map(|(i, &r)| if sheet.contains(i + 1) { -r } else { r })
        .collect()
}

fn mode_values(branches: &[Complex64], basis: &ModeBasis) -> Vec<Complex64> {
    basis
        .mode_to_distinct()
        .iter()
        .map(|&j| branches[j - 1])
        .collect()
}

/// w_ℰ: negate r_j for j ∈ ℰ.
pub fn flip_to_physical(p: &SheetPoint) -> PhysicalPoint {
    let branches = flip_branches(&p.branches, &p.sheet);
    // Im r̃_l < 0 exactly when l ∈ Ẽ, so flipping by sign matches w_ℰ.
    let mode_branches = p
        .mode_branches
        .iter()
        .map(|&r| if r.im < 0.0 { -r } else { r })
        .collect();
    PhysicalPoint {
        k: p.k,
        sheet: p.sheet.clone(),
        base: p.base,
        branches,
        mode_branches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transverse::{BoundaryCondition, CrossSection};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn circle_basis(l: usize) -> ModeBasis {
        ModeBasis::build(CrossSection::Circle { circumference: 2.0 * PI }, l).unwrap()
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lift_on_first_sheet() {
        let b = circle_basis(5);
        let s = SheetLabel::single(1).unwrap();
        let p = lift(cx(0.0, -2.0), &s, &b).unwrap();
        assert_eq!(p.base, cx(-4.0, 0.0));
        assert_eq!(p.r(1), cx(0.0, -2.0));
        assert!((p.r(2) - cx(0.0, 5f64.sqrt())).norm() < 1e-15);
        let q = lift(cx(3.0, -1.0), &s, &b).unwrap();
        assert_eq!(q.base, cx(8.0, -6.0));
    }

    #[test]
    fn lift_flips_members() {
        let b = circle_basis(5);
        let s = SheetLabel::new(&[1, 2], 1).unwrap();
        let p = lift(cx(0.0, -2.0), &s, &b).unwrap();
        assert!((p.r(2) - cx(0.0, -(5f64.sqrt()))).norm() < 1e-15);
        assert_eq!(p.r_tilde(2), p.r(2));
        assert_eq!(p.r_tilde(3), p.r(2));
    }

    #[test]
    fn flip_example_and_involution() {
        let b = circle_basis(5);
        let s = SheetLabel::single(1).unwrap();
        let p = lift(cx(0.0, -2.0), &s, &b).unwrap();
        let f = flip_to_physical(&p);
        assert_eq!(f.r(1), cx(0.0, 2.0));
        assert_eq!(f.r(2), p.r(2));
        assert!(f.min_im() > 0.0);
        assert_eq!(f.unflip(&b), p);
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = circle_basis(5);
        let s = SheetLabel::single(1).unwrap();
        assert!(matches!(lift(cx(1.0, 0.0), &s, &b), Err(ScatterError::UpperHalfPlane { .. })));
        assert!(matches!(lift(cx(1.0, 0.5), &s, &b), Err(ScatterError::UpperHalfPlane { .. })));
        // Π = ν_2² at k² = 1 - 0 with anchor 1 needs Im k = 0; use anchor 2 instead
        let s2 = SheetLabel::single(2).unwrap();
        let err = lift_with_guard(cx(0.0, -1e-5), &s2, &b, 1e-4).unwrap_err();
        assert!(matches!(err, ScatterError::Ramification { nu_sq, .. } if nu_sq == 1.0));
        assert!(SheetLabel::new(&[], 1).is_err());
        assert!(SheetLabel::new(&[1, 2], 3).is_err());
        assert!(SheetLabel::single(4).unwrap().validate_for(&b).is_err());
    }

    #[test]
    fn boundary_ray_is_rejected() {
        // anchor 2 on the imaginary axis: Π - ν_1² = 1 - t² > 0 for t < 1
        let b = circle_basis(5);
        let s = SheetLabel::single(2).unwrap();
        assert!(matches!(
            lift(cx(0.0, -0.5), &s, &b),
            Err(ScatterError::BoundaryRay { j: 1, .. })
        ));
        assert!(lift(cx(0.0, -1.5), &s, &b).is_ok());
    }

    #[test]
    fn tilde_sets() {
        let b = circle_basis(7);
        let t = |m: &[usize], a| tilde_set(&SheetLabel::new(m, a).unwrap(), &b);
        assert_eq!(t(&[1], 1).members, vec![1]);
        assert_eq!(t(&[2], 2).members, vec![2, 3]);
        assert_eq!(t(&[1, 2], 1).card(), 3);
    }

    #[test]
    fn physical_adjacency() {
        assert!(meets_physical(&SheetLabel::single(1).unwrap()));
        assert!(meets_physical(&SheetLabel::new(&[1, 2, 3], 2).unwrap()));
        assert!(!meets_physical(&SheetLabel::single(2).unwrap()));
        assert!(!meets_physical(&SheetLabel::new(&[1, 3], 1).unwrap()));
    }

    #[test]
    fn asymptotic_ratio_signs() {
        let b = circle_basis(9);
        let s = SheetLabel::new(&[1, 3], 1).unwrap();
        let t = tilde_set(&s, &b);
        for k in [cx(1000.0, -0.5), cx(-700.0, -714.0), cx(3.0, -1000.0)] {
            let p = lift(k, &s, &b).unwrap();
            for l in 1..=b.len() {
                let ratio = p.r_tilde(l) / k;
                let want = if t.contains(l) { 1.0 } else { -1.0 };
                assert!((ratio - cx(want, 0.0)).norm() < 0.05, "l = {l}: {ratio}");
            }
        }
    }

    #[test]
    fn lift_is_continuous_along_a_path() {
        let b = circle_basis(7);
        let s = SheetLabel::new(&[1, 2], 1).unwrap();
        let n = 2000;
        let mut prev: Option<SheetPoint> = None;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let k = cx(-6.0 + 12.0 * t, -0.3 - 2.0 * (PI * t).sin());
            let p = lift(k, &s, &b).unwrap();
            if let Some(q) = prev {
                for j in 1..=b.distinct_count() {
                    assert!((p.r(j) - q.r(j)).norm() < 0.1, "jump at t = {t}, j = {j}");
                }
            }
            prev = Some(p);
        }
    }

    proptest! {
        #[test]
        fn branch_identities(re in -50.0..50.0f64, im in -50.0..-1e-3f64, mask in 1u8..32, pick in 0usize..5) {
            let b = ModeBasis::build(
                CrossSection::Interval { length: 1.3, bc: BoundaryCondition::Neumann }, 5).unwrap();
            let members: Vec<usize> = (1..=5).filter(|j| mask & (1 << (j - 1)) != 0).collect();
            let anchor = members[pick % members.len()];
            let s = SheetLabel::new(&members, anchor).unwrap();
            let k = cx(re, im);
            if let Ok(p) = lift(k, &s, &b) {
                prop_assert_eq!(p.r(anchor), k);
                for j in 1..=5 {
                    let r = p.r(j);
                    let want = k * k + b.nu_sq(anchor) - b.nu_sq(j);
                    prop_assert!((r * r - want).norm() <= 1e-12 * (1.0 + k.norm_sqr()));
                    prop_assert_eq!(r.im < 0.0, s.contains(j));
                    prop_assert!(r.im != 0.0);
                }
                prop_assert!(flip_to_physical(&p).min_im() > 0.0);
            }
        }
    }
}
