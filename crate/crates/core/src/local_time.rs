//! Local time at the origin, normalized as
//! `L(t) = lim_{ε↓0} (1/2ε) ∫_0^t 1{0 ≤ U(s) < ε} d⟨U⟩(s)`,
//! so that for a nonnegative reflected path `L` equals its pushing term and
//! for `|B|` the Tanaka identity reads `|B| = ∫ sgn(B) dB + L^{|B|}`.

use crate::error::{config, domain, Result};
use crate::path::{SamplePath, TimeGrid};
use crate::scalar::{sgn_sym, Real};

/// `-ζ(1/2)/√(2π)`: mean overshoot, in units of the step standard deviation,
/// of a Gaussian random walk over a level.
pub const OVERSHOOT_CONSTANT: f64 = 0.582_597_157_939_010_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Local time of `U` itself.
    Right,
    /// Average of the local times of `U` and `-U`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Occupation,
    Upcrossing,
    Tanaka,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Occupation => "occupation",
            Method::Upcrossing => "upcrossing",
            Method::Tanaka => "tanaka",
        }
    }
}

/// Nondecreasing local-time estimate starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeCurve<T> {
    pub values: SamplePath<T>,
    pub method: Method,
    /// Bandwidth, for the estimators that have one.
    pub epsilon: Option<T>,
    pub side: Side,
}

impl<T: Real> LocalTimeCurve<T> {
    pub fn terminal(&self) -> T {
        self.values.last()
    }
}

/// Band `[floor, floor + epsilon]` whose completed upcrossings are counted.
///
/// Each upcrossing contributes `epsilon + 2·OVERSHOOT_CONSTANT·overshoot_step`.
/// A discretely monitored path overshoots both levels by about
/// `OVERSHOOT_CONSTANT` step deviations, so it needs a wider effective band;
/// `overshoot_step = 0` gives the plain `ε·N` count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpcrossingBand<T> {
    pub floor: T,
    pub epsilon: T,
    pub overshoot_step: T,
}

impl<T: Real> UpcrossingBand<T> {
    /// `ε·N` with the lower level at 0.
    pub fn plain(epsilon: T) -> Self {
        Self {
            floor: T::zero(),
            epsilon,
            overshoot_step: T::zero(),
        }
    }

    /// Band `[0, √dt]` with the overshoot correction for unit volatility.
    /// Suited to paths with exact zeros, such as Skorokhod reflections.
    pub fn for_grid(grid: &TimeGrid<T>) -> Self {
        let s = grid.sqrt_dt();
        Self {
            floor: T::zero(),
            epsilon: s,
            overshoot_step: s,
        }
    }

    /// Band `[√dt, 2√dt]` with the overshoot correction, for paths that
    /// only approach zero, such as `|B|`.
    pub fn lifted(grid: &TimeGrid<T>) -> Self {
        let s = grid.sqrt_dt();
        Self {
            floor: s,
            epsilon: s,
            overshoot_step: s,
        }
    }

    fn weight(&self) -> T {
        self.epsilon + T::of(2.0 * OVERSHOOT_CONSTANT) * self.overshoot_step
    }
}

pub fn occupation_local_time<T: Real>(
    path: &SamplePath<T>,
    qv: &SamplePath<T>,
    epsilon: T,
    side: Side,
) -> Result<LocalTimeCurve<T>> {
    if !(epsilon > T::zero()) {
        return Err(config(format!("bandwidth must be positive, got {epsilon}")));
    }
    path.ensure_same_grid(qv)?;
    let u = path.values();
    let q = qv.values();
    let scale = T::one() / (T::of(2.0) * epsilon);
    let (right_w, left_w) = match side {
        Side::Right => (T::one(), T::zero()),
        Side::Symmetric => (T::of(0.5), T::of(0.5)),
    };
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(u.len());
    out.push(acc);
    for i in 0..u.len() - 1 {
        let x = u[i];
        let mut w = T::zero();
        if x >= T::zero() && x < epsilon {
            w += right_w;
        }
        if -x >= T::zero() && -x < epsilon {
            w += left_w;
        }
        if w > T::zero() {
            acc += w * scale * (q[i + 1] - q[i]);
        }
        out.push(acc);
    }
    Ok(LocalTimeCurve {
        values: SamplePath::from_parts(*path.grid(), out),
        method: Method::Occupation,
        epsilon: Some(epsilon),
        side,
    })
}

/// Upcrossing estimate for a nonnegative path.
pub fn upcrossing_local_time<T: Real>(path: &SamplePath<T>, band: UpcrossingBand<T>) -> Result<LocalTimeCurve<T>> {
    if let Some(i) = path.values().iter().position(|&v| v < T::zero()) {
        return Err(domain(format!("upcrossing estimator needs a nonnegative path; value {} at {i}", path.values()[i])));
    }
    upcrossings(path.values(), path.grid(), band).map(|values| LocalTimeCurve {
        values,
        method: Method::Upcrossing,
        epsilon: Some(band.epsilon),
        side: Side::Right,
    })
}

/// Upcrossing estimate for a signed path, counted on `x⁺` (right) or
/// averaged over `x⁺` and `x⁻` (symmetric).
pub fn upcrossing_signed<T: Real>(path: &SamplePath<T>, band: UpcrossingBand<T>, side: Side) -> Result<LocalTimeCurve<T>> {
    let pos: Vec<T> = path.values().iter().map(|&v| v.max(T::zero())).collect();
    let right = upcrossings(&pos, path.grid(), band)?;
    let values = match side {
        Side::Right => right,
        Side::Symmetric => {
            let neg: Vec<T> = path.values().iter().map(|&v| (-v).max(T::zero())).collect();
            let left = upcrossings(&neg, path.grid(), band)?;
            right.zip_with(&left, |a, b| T::of(0.5) * (a + b))?
        }
    };
    Ok(LocalTimeCurve {
        values,
        method: Method::Upcrossing,
        epsilon: Some(band.epsilon),
        side,
    })
}

fn upcrossings<T: Real>(v: &[T], grid: &TimeGrid<T>, band: UpcrossingBand<T>) -> Result<SamplePath<T>> {
    if !(band.epsilon > T::zero()) {
        return Err(config(format!("bandwidth must be positive, got {}", band.epsilon)));
    }
    if band.floor < T::zero() || band.overshoot_step < T::zero() {
        return Err(config("band floor and overshoot step must be nonnegative"));
    }
    let low = band.floor;
    let high = band.floor + band.epsilon;
    let weight = band.weight();
    // A crossing counts once the path has been at or below `low` and then
    // climbs strictly above `high`.
    let mut armed = v[0] <= low;
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(v.len());
    for &x in v {
        if armed && x > high {
            acc += weight;
            armed = false;
        } else if x <= low {
            armed = true;
        }
        out.push(acc);
    }
    Ok(SamplePath::from_parts(*grid, out))
}

/// Tanaka-formula estimate from the path's own increments:
/// right side `X⁺ − X⁺(0) − Σ 1{X_i > 0} ΔX_i`, symmetric side
/// `(|X| − |X(0)| − Σ sgn(X_i) ΔX_i)/2`, clipped to its running maximum.
pub fn tanaka_local_time<T: Real>(path: &SamplePath<T>, side: Side) -> LocalTimeCurve<T> {
    let x = path.values();
    type Map<T> = fn(T) -> T;
    let (fold, weight): (Map<T>, Map<T>) = match side {
        Side::Right => (|v: T| v.max(T::zero()), |v: T| if v > T::zero() { T::one() } else { T::zero() }),
        Side::Symmetric => (|v: T| T::of(0.5) * v.abs(), |v: T| T::of(0.5) * sgn_sym(v)),
    };
    let base = fold(x[0]);
    let mut integral = T::zero();
    let mut running = T::zero();
    let mut out = Vec::with_capacity(x.len());
    out.push(T::zero());
    for i in 0..x.len() - 1 {
        integral += weight(x[i]) * (x[i + 1] - x[i]);
        running = running.max(fold(x[i + 1]) - base - integral);
        out.push(running);
    }
    LocalTimeCurve {
        values: SamplePath::from_parts(*path.grid(), out),
        method: Method::Tanaka,
        epsilon: None,
        side,
    }
}

/// Local time of `|U|` from the signed path: `|U| − |U(0)| − Σ sgn(U_i) ΔU_i`,
/// clipped to its running maximum.
pub fn folded_tanaka_local_time<T: Real>(path: &SamplePath<T>) -> LocalTimeCurve<T> {
    let x = path.values();
    let base = x[0].abs();
    let mut integral = T::zero();
    let mut running = T::zero();
    let mut out = Vec::with_capacity(x.len());
    out.push(T::zero());
    for i in 0..x.len() - 1 {
        integral += sgn_sym(x[i]) * (x[i + 1] - x[i]);
        running = running.max(x[i + 1].abs() - base - integral);
        out.push(running);
    }
    LocalTimeCurve {
        values: SamplePath::from_parts(*path.grid(), out),
        method: Method::Tanaka,
        epsilon: None,
        side: Side::Right,
    }
}

/// Local time of a signed path with unit volatility using `method` at its
/// default bandwidth: occupation against `⟨X⟩(t) = t` with `ε = √dt`, the
/// corrected upcrossing band of [`UpcrossingBand::for_grid`], or Tanaka.
pub fn estimate_local_time<T: Real>(path: &SamplePath<T>, method: Method, side: Side) -> Result<LocalTimeCurve<T>> {
    let grid = *path.grid();
    match method {
        Method::Occupation => {
            let clock = SamplePath::from_parts(grid, grid.times().collect());
            occupation_local_time(path, &clock, grid.sqrt_dt(), side)
        }
        Method::Upcrossing => upcrossing_signed(path, UpcrossingBand::for_grid(&grid), side),
        Method::Tanaka => Ok(tanaka_local_time(path, side)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::make_grid;

    fn path(v: &[f64]) -> SamplePath<f64> {
        SamplePath::new(make_grid(1.0, v.len() - 1).unwrap(), v.to_vec()).unwrap()
    }

    #[test]
    fn occupation_examples() {
        let u = path(&[0.0, 0.5, 1.0]);
        let qv = path(&[0.0, 1.0, 2.0]);
        let l = occupation_local_time(&u, &qv, 1.0, Side::Right).unwrap();
        assert_eq!(l.values.values(), &[0.0, 0.5, 1.0]);
        let above = path(&[2.0, 3.0, 2.5]);
        let l = occupation_local_time(&above, &qv, 1.0, Side::Right).unwrap();
        assert_eq!(l.values.values(), &[0.0, 0.0, 0.0]);
        assert!(occupation_local_time(&u, &qv, 0.0, Side::Right).is_err());
    }

    #[test]
    fn occupation_symmetric_averages_both_sides() {
        let u = path(&[0.0, -0.5, 0.5, 3.0]);
        let qv = path(&[0.0, 1.0, 2.0, 3.0]);
        let r = occupation_local_time(&u, &qv, 1.0, Side::Right).unwrap();
        let l = occupation_local_time(&u.neg(), &qv, 1.0, Side::Right).unwrap();
        let s = occupation_local_time(&u, &qv, 1.0, Side::Symmetric).unwrap();
        for i in 0..4 {
            let avg = 0.5 * (r.values.values()[i] + l.values.values()[i]);
            assert!((s.values.values()[i] - avg).abs() < 1e-15);
        }
    }

    #[test]
    fn upcrossing_examples() {
        let s = path(&[0.0, 0.2, 0.0, 0.2, 0.0]);
        let l = upcrossing_local_time(&s, UpcrossingBand::plain(0.1)).unwrap();
        assert!((l.terminal() - 0.2).abs() < 1e-15);
        let mono = path(&[0.0, 0.1, 0.3, 0.6, 1.0]);
        let l = upcrossing_local_time(&mono, UpcrossingBand::plain(0.05)).unwrap();
        assert!(l.terminal() <= 0.05 + 1e-15);
        assert!(upcrossing_local_time(&path(&[0.0, -0.1]), UpcrossingBand::plain(0.1)).is_err());
    }

    #[test]
    fn upcrossing_overshoot_weight() {
        let s = path(&[0.0, 0.2, 0.0, 0.2, 0.0]);
        let band = UpcrossingBand {
            floor: 0.0,
            epsilon: 0.1,
            overshoot_step: 0.01,
        };
        let l = upcrossing_local_time(&s, band).unwrap();
        assert!((l.terminal() - 2.0 * (0.1 + 0.02 * OVERSHOOT_CONSTANT)).abs() < 1e-15);
    }

    #[test]
    fn upcrossing_signed_splits_sides() {
        let x = path(&[0.0, 0.2, 0.0, -0.2, 0.0, -0.3, 0.0]);
        let band = UpcrossingBand::plain(0.1);
        let r = upcrossing_signed(&x, band, Side::Right).unwrap();
        let s = upcrossing_signed(&x, band, Side::Symmetric).unwrap();
        assert!((r.terminal() - 0.1).abs() < 1e-15);
        assert!((s.terminal() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn tanaka_trivial_cases() {
        let z = path(&[0.0; 5]);
        assert!(tanaka_local_time(&z, Side::Symmetric).values.values().iter().all(|&v| v == 0.0));
        let pos = path(&[0.0, 0.3, 0.5, 0.2, 0.9]);
        let l = tanaka_local_time(&pos, Side::Right);
        // Only the first increment leaves from zero.
        assert!((l.terminal() - 0.3).abs() < 1e-15);
        assert!(folded_tanaka_local_time(&z).terminal() == 0.0);
    }

    #[test]
    fn tanaka_is_nondecreasing() {
        let x = path(&[0.0, 0.4, -0.2, 0.1, -0.5, 0.3]);
        for side in [Side::Right, Side::Symmetric] {
            let l = tanaka_local_time(&x, side);
            assert!(l.values.values().windows(2).all(|w| w[1] >= w[0]));
        }
        let l = folded_tanaka_local_time(&x);
        assert!(l.values.values().windows(2).all(|w| w[1] >= w[0]));
    }
}
