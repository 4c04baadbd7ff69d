use crate::error::{config, Result};
use crate::excursion::Diagnostics;
use crate::path::{ito_sum, SamplePath, TimeGrid};
use crate::reflection::levy_transform;
use crate::rng::RngStream;
use crate::scalar::{sgn_left, Real, SignConvention};

/// Two solutions `X` and `Ξ = −X` of the Tanaka equation `X = ∫ sgn(X) dU`
/// driven by the same `U`, where `X = B(A(·))` runs at a clock whose speed
/// after time 1 depends on the sign of `B(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OconeResult<T> {
    pub x: SamplePath<T>,
    pub xi: SamplePath<T>,
    /// `U = ∫ sgn(X) dX`, the common driver.
    pub driver: SamplePath<T>,
    /// `A(t) = t` up to 1, then slope `u` if `B(1) > 0` and `v` otherwise.
    pub clock: SamplePath<T>,
    pub u: T,
    pub v: T,
    /// `tanaka_x`, `tanaka_xi`: sup-norm defects of `X = ∫sgn(X)dU` and `Ξ = ∫sgn(Ξ)dU`.
    pub diagnostics: Diagnostics<T>,
}

/// Simulates the pair on a grid with `t = 1` on it and horizon at least 2.
/// Increments after time 1 are drawn with the clock's conditional variance,
/// so `X` is exact in law at every grid point.
pub fn ocone_counterexample<T: Real>(u: T, v: T, grid: &TimeGrid<T>, stream: RngStream) -> Result<OconeResult<T>> {
    if !(u > T::zero() && v > T::zero()) {
        return Err(config(format!("clock slopes must be positive, got u = {u}, v = {v}")));
    }
    if grid.horizon() < T::of(2.0) {
        return Err(config("horizon must be at least 2"));
    }
    let one = grid
        .index_of(T::one())
        .ok_or_else(|| config("t = 1 must be a grid point"))?;

    let mut rng = stream.rng();
    let dt = grid.dt();
    let mut x = Vec::with_capacity(grid.len());
    let mut clock = Vec::with_capacity(grid.len());
    let mut acc = T::zero();
    x.push(acc);
    clock.push(T::zero());
    let mut slope = T::one();
    for i in 0..grid.n_steps() {
        if i == one {
            slope = if acc > T::zero() { u } else { v };
        }
        acc += (slope * dt).sqrt() * T::standard_normal(&mut rng);
        x.push(acc);
        let t = grid.time(i + 1);
        clock.push(if i < one { t } else { T::one() + slope * (t - T::one()) });
    }
    let x = SamplePath::new(*grid, x)?;
    let clock = SamplePath::new(*grid, clock)?;
    let xi = x.neg();
    let driver = levy_transform(&x, SignConvention::LeftContinuous);

    let mut diagnostics = Diagnostics::new();
    for (name, path) in [("tanaka_x", &x), ("tanaka_xi", &xi)] {
        let signs: Vec<T> = path.values().iter().map(|&v| sgn_left(v)).collect();
        let integral = ito_sum(&signs, &driver);
        diagnostics.insert(name, path.sub(&integral)?.sup_norm());
    }
    Ok(OconeResult {
        x,
        xi,
        driver,
        clock,
        u,
        v,
        diagnostics,
    })
}
