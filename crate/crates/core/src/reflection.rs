//! Folding maps: the Skorokhod reflection, `|U|`, and the Lévy transform.

use crate::error::{domain, Result};
use crate::path::{ito_sum, SamplePath};
use crate::scalar::{Real, SignConvention};

/// Skorokhod reflection `S = U + C` of a path started at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionResult<T> {
    /// The reflected path, `S ≥ 0`.
    pub reflected: SamplePath<T>,
    /// Pushing term `C[k] = max(0, max_{j≤k} −U[j])`, nondecreasing.
    pub pushing: SamplePath<T>,
}

pub fn skorokhod_reflect<T: Real>(path: &SamplePath<T>) -> Result<ReflectionResult<T>> {
    if path.first() != T::zero() {
        return Err(domain(format!("Skorokhod reflection needs U[0] = 0, got {}", path.first())));
    }
    let n = path.len();
    let mut pushing = Vec::with_capacity(n);
    let mut reflected = Vec::with_capacity(n);
    let mut c = T::zero();
    for &u in path.values() {
        c = c.max(-u);
        pushing.push(c);
        // At a new running max of -u, u + c is exactly 0.
        reflected.push(u + c);
    }
    let grid = *path.grid();
    Ok(ReflectionResult {
        reflected: SamplePath::from_parts(grid, reflected),
        pushing: SamplePath::from_parts(grid, pushing),
    })
}

/// `R = |U|`.
pub fn conventional_reflect<T: Real>(path: &SamplePath<T>) -> SamplePath<T> {
    path.abs()
}

/// `Û = ∫ sgn(U) dU` with the chosen value of `sgn(0)`.
pub fn levy_transform<T: Real>(path: &SamplePath<T>, convention: SignConvention) -> SamplePath<T> {
    let signs: Vec<T> = path.values().iter().map(|&u| convention.apply(u)).collect();
    ito_sum(&signs, path)
}

/// `sup_k |R[k] − (Û[k] + max_{j≤k} −Û[j])|`: how far the Skorokhod reflection
/// of the Lévy transform is from `|U|` on this grid.
pub fn levy_reflection_defect<T: Real>(path: &SamplePath<T>) -> T {
    let levy = levy_transform(path, SignConvention::Symmetric);
    let mut c = T::zero();
    let mut worst = T::zero();
    for (&u, &l) in path.values().iter().zip(levy.values()) {
        c = c.max(-l);
        worst = worst.max((u.abs() - (l + c)).abs());
    }
    worst
}
