//! Free outgoing resolvent kernels of −d²/dx² − r² on the line and half line.

use num_complex::Complex64;

use crate::error::{Result, ScatterError};
use crate::potential::Geometry;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// (i / 2r) e^{i r |x − x′|}, plus the image term σ e^{i r (x + x′)} on the
/// half line (σ = +1 Neumann, −1 Dirichlet).
pub fn free_kernel(r: Complex64, x: f64, xp: f64, geometry: Geometry) -> Result<Complex64> {
    if !(r.im > 0.0) {
        return Err(ScatterError::NonPhysicalBranch(r));
    }
    Ok(kernel_unchecked(r, x, xp, geometry))
}

pub(crate) fn kernel_unchecked(r: Complex64, x: f64, xp: f64, geometry: Geometry) -> Complex64 {
    let pre = I / (2.0 * r);
    let direct = (I * r * (x - xp).abs()).exp();
    match geometry.image_sign() {
        None => pre * direct,
        Some(s) => pre * (direct + s * (I * r * (x + xp)).exp()),
    }
}
