use crate::error::{config, Result};
use crate::excursion::{assemble, check_alpha, decompose_excursions, UnfoldResult};
use crate::local_time::{occupation_local_time, upcrossing_local_time, UpcrossingBand};
use crate::path::{sample_brownian, SamplePath, TimeGrid};
use crate::rng::RngStream;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewBesselParams<T> {
    /// Dimension, strictly between 1 and 2.
    pub delta: T,
    pub alpha: T,
    /// Initial value of the Bessel process `R`.
    pub x0: T,
}

impl<T: Real> SkewBesselParams<T> {
    pub fn new(delta: T, alpha: T, x0: T) -> Result<Self> {
        let p = Self { delta, alpha, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        check_alpha(self.alpha.to_f64_lossy())?;
        if !(self.x0 >= T::zero()) || !self.x0.is_finite() {
            return Err(config(format!("initial value must be nonnegative, got {}", self.x0)));
        }
        Ok(())
    }
}

fn check_delta<T: Real>(delta: T) -> Result<()> {
    if delta > T::one() && delta < T::of(2.0) {
        Ok(())
    } else {
        Err(config(format!("dimension must lie in (1, 2), got {delta}")))
    }
}

/// Squared Bessel process `dΥ = δ dt + 2√Υ dB`, Euler with the state clamped at 0.
pub fn squared_bessel<T: Real>(delta: T, x0: T, grid: &TimeGrid<T>, stream: RngStream) -> Result<SamplePath<T>> {
    let driver = sample_brownian(grid, stream, T::one())?.total;
    squared_bessel_driven(delta, x0, &driver)
}

/// [`squared_bessel`] against a given Brownian driver.
pub fn squared_bessel_driven<T: Real>(delta: T, x0: T, driver: &SamplePath<T>) -> Result<SamplePath<T>> {
    check_delta(delta)?;
    if !(x0 >= T::zero()) {
        return Err(config(format!("squared Bessel start must be nonnegative, got {x0}")));
    }
    let drift = delta * driver.grid().dt();
    let two = T::of(2.0);
    let mut y = x0;
    let mut out = Vec::with_capacity(driver.len());
    out.push(y);
    for db in driver.increments() {
        y = (y + drift + two * y.sqrt() * db).max(T::zero());
        out.push(y);
    }
    SamplePath::new(*driver.grid(), out)
}

/// `(g(x), G(x))` with `g(x) = |x|^{2−δ}/(2−δ)` and `G(x) = sgn(x)·g(x)`.
pub fn bessel_scale_maps<T: Real>(x: T, delta: T) -> (T, T) {
    let p = T::of(2.0) - delta;
    let g = x.abs().powf(p) / p;
    let sign = if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    };
    (g, sign * g)
}

/// Skew Bessel process with the default zero tolerance `√dt/4`.
pub fn skew_bessel<T: Real>(params: SkewBesselParams<T>, grid: &TimeGrid<T>, stream: RngStream) -> Result<UnfoldResult<T>> {
    skew_bessel_with_tol(params, grid, stream, grid.sqrt_dt() / T::of(4.0))
}

/// Unfolds the Bessel process `R = √Υ`: each excursion of `R` away from
/// `{R ≤ tol}` gets an independent sign, `+1` with probability `alpha`.
/// When `x0 > 0` the excursion in progress at time 0 keeps the sign `+1`.
///
/// The driver of `Υ` is `stream.substream(0)`; signs use `stream.substream(1)`.
/// Diagnostics: `bessel_local_time` is the occupation estimate of `L^R(T)`
/// with `ε = √dt`, and `zero_occupation` is the time spent in the zero set.
pub fn skew_bessel_with_tol<T: Real>(
    params: SkewBesselParams<T>,
    grid: &TimeGrid<T>,
    stream: RngStream,
    tol: T,
) -> Result<UnfoldResult<T>> {
    params.validate()?;
    let squared = squared_bessel(params.delta, params.x0 * params.x0, grid, stream.substream(0))?;
    let radial = squared.map(|v| v.sqrt());
    let decomp = decompose_excursions(&radial, tol)?.draw_signs(params.alpha.to_f64_lossy(), stream.substream(1))?;
    let decomp = if params.x0 > tol && decomp.intervals().first().is_some_and(|r| r.start == 0) {
        let mut signs = decomp.signs().map(<[i8]>::to_vec).unwrap_or_default();
        signs[0] = 1;
        decomp.with_signs(signs)?
    } else {
        decomp
    };
    let zero_time = T::of_usize(decomp.zero_mask()[..grid.n_steps()].iter().filter(|&&z| z).count()) * grid.dt();
    let mut result = assemble(&radial, decomp, params.alpha)?;
    let clock = SamplePath::from_parts(*grid, grid.times().collect());
    let lt = occupation_local_time(&radial, &clock, grid.sqrt_dt(), crate::local_time::Side::Right)?;
    result.diagnostics.insert("bessel_local_time", lt.terminal());
    result.diagnostics.insert("zero_occupation", zero_time);
    Ok(result)
}

/// Terminal local times `(L^{G(X)}(T), L^{−G(X)}(T))` of the scale-transformed
/// skew Bessel path, counted as upcrossings of the band `[g(tol), g(tol + √dt)]`
/// on `G(X)⁺` and `G(X)⁻`.
pub fn scale_local_time_ratio<T: Real>(unfolded: &SamplePath<T>, delta: T, tol: T) -> Result<(T, T)> {
    check_delta(delta)?;
    let grid = unfolded.grid();
    let (low, _) = bessel_scale_maps(tol, delta);
    let (high, _) = bessel_scale_maps(tol + grid.sqrt_dt(), delta);
    let band = UpcrossingBand {
        floor: low,
        epsilon: high - low,
        overshoot_step: T::zero(),
    };
    let up = unfolded.map(|x| bessel_scale_maps(x, delta).1.max(T::zero()));
    let down = unfolded.map(|x| (-bessel_scale_maps(x, delta).1).max(T::zero()));
    Ok((
        upcrossing_local_time(&up, band)?.terminal(),
        upcrossing_local_time(&down, band)?.terminal(),
    ))
}
