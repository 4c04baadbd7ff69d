//! Skew Brownian motion, skew Bessel processes, the Ocone counterexample
//! and the Nakao construction of the perturbed skew-Tanaka equation.

mod bessel;
mod nakao;
mod ocone;

pub use bessel::{
    bessel_scale_maps, scale_local_time_ratio, skew_bessel, skew_bessel_with_tol, squared_bessel,
    squared_bessel_driven, SkewBesselParams,
};
pub use nakao::{nakao_solution, NakaoResult};
pub use ocone::{ocone_counterexample, OconeResult};

use crate::error::Result;
use crate::excursion::{assemble, check_alpha, decompose_excursions};
use crate::path::{sample_brownian, SamplePath, TimeGrid};
use crate::reflection::skorokhod_reflect;
use crate::rng::RngStream;
use crate::scalar::Real;

/// Skew Brownian motion with `P(excursion positive) = alpha`, started at `x0`.
///
/// The Brownian driver comes from `stream.substream(0)` and the excursion
/// signs from `stream.substream(1)`. For `x0 ≠ 0` the path is `x0 + B` up
/// to the first grid index where it reaches or crosses zero, and the
/// unfolded Skorokhod reflection of the remaining increments afterwards.
pub fn skew_brownian<T: Real>(alpha: T, x0: T, grid: &TimeGrid<T>, stream: RngStream) -> Result<SamplePath<T>> {
    check_alpha(alpha.to_f64_lossy())?;
    let b = sample_brownian(grid, stream.substream(0), T::one())?.total;
    let bv = b.values();
    let hit = if x0 == T::zero() {
        0
    } else {
        bv.iter()
            .position(|&v| (x0 + v) * x0.signum() <= T::zero())
            .unwrap_or(bv.len())
    };
    let mut out: Vec<T> = bv[..hit].iter().map(|&v| x0 + v).collect();
    if hit < bv.len() {
        let anchor = bv[hit];
        let shifted: Vec<T> = bv
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < hit { T::zero() } else { v - anchor })
            .collect();
        let shifted = SamplePath::from_parts(*grid, shifted);
        let folded = skorokhod_reflect(&shifted)?.reflected;
        let decomp = decompose_excursions(&folded, T::zero())?.draw_signs(alpha.to_f64_lossy(), stream.substream(1))?;
        let unfolded = assemble(&folded, decomp, alpha)?.unfolded;
        out.extend_from_slice(&unfolded.values()[hit..]);
    }
    SamplePath::new(*grid, out)
}
