//! Two rank-based Brownian particles and their skew-elastic counterpart,
//! obtained by unfolding the gap and rewiring the drivers.

use crate::error::{config, Result};
use crate::excursion::{unfold_skorokhod, Diagnostics};
use crate::local_time::{estimate_local_time, upcrossing_signed, Method, Side, UpcrossingBand};
use crate::path::{quadratic_covariation, quadratic_variation, sample_brownian, SamplePath, SemimartingalePath, TimeGrid};
use crate::rng::RngStream;
use crate::scalar::{sgn_left, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams<T> {
    /// Dispersion of the leader's driver.
    pub rho: T,
    /// Dispersion of the laggard's driver.
    pub sigma: T,
    /// Drift of the laggard.
    pub g: T,
    /// Drift toward the laggard, subtracted from the leader.
    pub h: T,
    pub zeta1: T,
    pub zeta2: T,
    pub eta1: T,
    pub eta2: T,
}

impl<T: Real> ParticleParams<T> {
    /// Driftless parameters with `ρ = σ = 1/√2`.
    pub fn balanced(zeta1: T, zeta2: T, eta1: T, eta2: T) -> Self {
        let r = T::of(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            rho: r,
            sigma: r,
            g: T::zero(),
            h: T::zero(),
            zeta1,
            zeta2,
            eta1,
            eta2,
        }
    }

    pub fn validate(&self) -> Result<SkewParams<T>> {
        if !(self.rho > T::zero() && self.sigma > T::zero()) {
            return Err(config("rho and sigma must be positive"));
        }
        if (self.rho * self.rho + self.sigma * self.sigma - T::one()).abs() > T::of(1e-12).max(T::epsilon() * T::of(8.0)) {
            return Err(config(format!(
                "rho² + sigma² must equal 1, got {}",
                self.rho * self.rho + self.sigma * self.sigma
            )));
        }
        derive_skew_params(self.zeta1, self.zeta2, self.eta1, self.eta2)
    }

    pub fn is_driftless(&self) -> bool {
        self.g == T::zero() && self.h == T::zero()
    }
}

/// Collision parameters derived from `(ζ₁, ζ₂, η₁, η₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewParams<T> {
    pub alpha: T,
    pub beta: T,
    pub zeta: T,
    pub eta: T,
}

/// `ζ = 1 + (ζ₁−ζ₂)/2`, `η = 1 − (η₁−η₂)/2`, `α = η/(ζ+η)`,
/// `β = α(ζ₁+ζ₂)/2 + (1−α)(η₁+η₂)/2`.
pub fn derive_skew_params<T: Real>(zeta1: T, zeta2: T, eta1: T, eta2: T) -> Result<SkewParams<T>> {
    let half = T::of(0.5);
    let zeta = T::one() + (zeta1 - zeta2) * half;
    let eta = T::one() - (eta1 - eta2) * half;
    if zeta + eta == T::zero() {
        return Err(config("zeta + eta must be nonzero"));
    }
    let alpha = eta / (zeta + eta);
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(config(format!("derived alpha {alpha} lies outside [0, 1]")));
    }
    let beta = alpha * (zeta1 + zeta2) * half + (T::one() - alpha) * (eta1 + eta2) * half;
    Ok(SkewParams { alpha, beta, zeta, eta })
}

/// Rank-based pair started at `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseSystem<T> {
    pub x1: SamplePath<T>,
    pub x2: SamplePath<T>,
    pub b1: SamplePath<T>,
    pub b2: SamplePath<T>,
    /// Gap `X₁ − X₂`.
    pub y: SamplePath<T>,
    pub driftless: bool,
}

/// Euler scheme for the pair with ranks read at left endpoints; a tie counts
/// as particle 1 not leading. Drivers are `stream.substream(1)` and `stream.substream(2)`.
pub fn simulate_base<T: Real>(params: &ParticleParams<T>, grid: &TimeGrid<T>, stream: RngStream) -> Result<BaseSystem<T>> {
    params.validate()?;
    let b1 = sample_brownian(grid, stream.substream(1), T::one())?.total;
    let b2 = sample_brownian(grid, stream.substream(2), T::one())?.total;
    simulate_base_driven(params, b1, b2)
}

/// [`simulate_base`] against given drivers.
pub fn simulate_base_driven<T: Real>(params: &ParticleParams<T>, b1: SamplePath<T>, b2: SamplePath<T>) -> Result<BaseSystem<T>> {
    params.validate()?;
    b1.ensure_same_grid(&b2)?;
    let grid = *b1.grid();
    let dt = grid.dt();
    let ParticleParams { rho, sigma, g, h, .. } = *params;
    let (mut p1, mut p2) = (T::zero(), T::zero());
    let mut x1 = vec![p1];
    let mut x2 = vec![p2];
    let mut y = vec![T::zero()];
    for i in 0..grid.n_steps() {
        let (db1, db2) = (b1.increment(i), b2.increment(i));
        let (d1, d2) = if p1 > p2 {
            ((-h) * dt + rho * db1, g * dt + sigma * db2)
        } else {
            (g * dt + sigma * db1, (-h) * dt + rho * db2)
        };
        p1 += d1;
        p2 += d2;
        x1.push(p1);
        x2.push(p2);
        y.push(p1 - p2);
    }
    Ok(BaseSystem {
        x1: SamplePath::new(grid, x1)?,
        x2: SamplePath::new(grid, x2)?,
        y: SamplePath::new(grid, y)?,
        b1,
        b2,
        driftless: params.is_driftless(),
    })
}

/// Brownian motions spliced from the base drivers by the rank indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryBrownians<T> {
    /// `ρW₁ + σW₂`; equals the gap in the driftless case.
    pub w: SamplePath<T>,
    /// `ρV₁ + σV₂`.
    pub v: SamplePath<T>,
    pub w1: SamplePath<T>,
    pub w2: SamplePath<T>,
    pub v1: SamplePath<T>,
    pub v2: SamplePath<T>,
}

/// `W₁ = ∫1{Y>0}dB₁ − ∫1{Y≤0}dB₂`, `W₂ = ∫1{Y≤0}dB₁ − ∫1{Y>0}dB₂`,
/// `V₁ = ∫1{Y>0}dB₁ + ∫1{Y≤0}dB₂`, `V₂ = ∫1{Y≤0}dB₁ + ∫1{Y>0}dB₂`.
pub fn auxiliary_brownians<T: Real>(base: &BaseSystem<T>, params: &ParticleParams<T>) -> Result<AuxiliaryBrownians<T>> {
    base.y.ensure_same_grid(&base.b1)?;
    base.y.ensure_same_grid(&base.b2)?;
    let grid = *base.y.grid();
    let n = grid.n_steps();
    let mut cols: [Vec<T>; 6] = std::array::from_fn(|_| Vec::with_capacity(n + 1));
    let mut acc = [T::zero(); 6];
    for c in cols.iter_mut() {
        c.push(T::zero());
    }
    let (rho, sigma) = (params.rho, params.sigma);
    for i in 0..n {
        let (db1, db2) = (base.b1.increment(i), base.b2.increment(i));
        let (dw1, dw2, dv1, dv2) = if base.y.values()[i] > T::zero() {
            (db1, -db2, db1, db2)
        } else {
            (-db2, db1, db2, db1)
        };
        acc[0] += dw1;
        acc[1] += dw2;
        acc[2] += dv1;
        acc[3] += dv2;
        acc[4] += rho * dw1 + sigma * dw2;
        acc[5] += rho * dv1 + sigma * dv2;
        for (c, &a) in cols.iter_mut().zip(&acc) {
            c.push(a);
        }
    }
    let [w1, w2, v1, v2, w, v] = cols.map(|c| SamplePath::from_parts(grid, c));
    Ok(AuxiliaryBrownians { w, v, w1, w2, v1, v2 })
}

/// The skew-elastic collision system built from a driftless base system.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewSystemResult<T> {
    pub auxiliary: AuxiliaryBrownians<T>,
    /// Skew Brownian gap `Ỹ`, the unfolded Skorokhod reflection of `Y`.
    pub gap: SamplePath<T>,
    pub b1: SamplePath<T>,
    pub b2: SamplePath<T>,
    /// `Ξ̃ = Ṽ + 2(1−β)·L̂^Ỹ`.
    pub sum: SamplePath<T>,
    pub x1: SamplePath<T>,
    pub x2: SamplePath<T>,
    pub w: SamplePath<T>,
    pub v: SamplePath<T>,
    /// Estimated symmetric local time of the gap used to build `Ξ̃`.
    pub gap_local_time: SamplePath<T>,
    pub params: ParticleParams<T>,
    pub skew: SkewParams<T>,
    pub diagnostics: Diagnostics<T>,
}

/// [`build_skew_system_with`] using the upcrossing estimator for `L̂^Ỹ`.
pub fn build_skew_system<T: Real>(base: &BaseSystem<T>, params: &ParticleParams<T>, stream: RngStream) -> Result<SkewSystemResult<T>> {
    build_skew_system_with(base, params, stream, Method::Upcrossing)
}

/// Unfolds the gap with signs from `stream`, rewires `(B₁, B₂)` by the signs
/// of `(Y, Ỹ)` at left endpoints (ties count as `≤ 0`) and assembles
/// `X̃₁ = (Ξ̃ + Ỹ)/2`, `X̃₂ = (Ξ̃ − Ỹ)/2`.
///
/// Diagnostics (sup-norms): `gap_identity` for `Y + max(−Y)⁺ = |Ỹ|`,
/// `difference_identity`, `sum_identity`, `gap_equals_w` for `Y = W`,
/// `intertwine` for `W̃ = ∫sgn(Ỹ)dW`, and `component1_equation`,
/// `component2_equation` for the Euler defects of the two collision
/// equations. Also realized `qv_b1`, `qv_b2`, `covariation_b` of the rewired drivers.
pub fn build_skew_system_with<T: Real>(
    base: &BaseSystem<T>,
    params: &ParticleParams<T>,
    stream: RngStream,
    estimator: Method,
) -> Result<SkewSystemResult<T>> {
    let skew = params.validate()?;
    if !base.driftless || !params.is_driftless() {
        return Err(config("the skew system is only built from a driftless base system"));
    }
    if !(skew.alpha > T::zero() && skew.alpha < T::one()) {
        return Err(config(format!("derived alpha {} must lie in (0, 1)", skew.alpha)));
    }
    let grid = *base.y.grid();
    let n = grid.n_steps();
    let auxiliary = auxiliary_brownians(base, params)?;
    let driver = SemimartingalePath::from_martingale(base.y.clone())?;
    let unfolding = unfold_skorokhod(&driver, skew.alpha, stream, T::zero())?;
    let gap = unfolding.unfolded;
    let (yv, gv) = (base.y.values(), gap.values());

    let (rho, sigma) = (params.rho, params.sigma);
    let mut nb1 = vec![T::zero()];
    let mut nb2 = vec![T::zero()];
    let mut nv = vec![T::zero()];
    let mut nw = vec![T::zero()];
    let mut intertwined = vec![T::zero()];
    let (mut a1, mut a2, mut av, mut aw, mut ai) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let (db1, db2) = (base.b1.increment(i), base.b2.increment(i));
        let gap_up = gv[i] > T::zero();
        let (d1, d2) = match (yv[i] > T::zero(), gap_up) {
            (true, true) => (db1, db2),
            (false, true) => (-db2, -db1),
            (true, false) => (db2, db1),
            (false, false) => (-db1, -db2),
        };
        let (c1, c2) = if gap_up { (rho, sigma) } else { (sigma, rho) };
        a1 += d1;
        a2 += d2;
        av += c1 * d1 + c2 * d2;
        aw += c1 * d1 - c2 * d2;
        ai += sgn_left(gv[i]) * auxiliary.w.increment(i);
        nb1.push(a1);
        nb2.push(a2);
        nv.push(av);
        nw.push(aw);
        intertwined.push(ai);
    }
    let b1 = SamplePath::new(grid, nb1)?;
    let b2 = SamplePath::new(grid, nb2)?;
    let v = SamplePath::new(grid, nv)?;
    let w = SamplePath::new(grid, nw)?;

    let lt = estimate_local_time(&gap, estimator, Side::Symmetric)?.values;
    let two = T::of(2.0);
    let push = two * (T::one() - skew.beta);
    let sum = v.zip_with(&lt, |a, l| a + push * l)?;
    let half = T::of(0.5);
    let x1 = sum.zip_with(&gap, |s, g| (s + g) * half)?;
    let x2 = sum.zip_with(&gap, |s, g| (s - g) * half)?;

    let mut diagnostics = Diagnostics::new();
    let pushing = unfolding.pushing.as_ref().expect("Skorokhod unfolding carries its pushing term");
    let mut gap_identity = T::zero();
    for i in 0..=n {
        gap_identity = gap_identity.max((yv[i] + pushing.values()[i] - gv[i].abs()).abs());
    }
    diagnostics.insert("gap_identity", gap_identity);
    diagnostics.insert("difference_identity", x1.sub(&x2)?.sub(&gap)?.sup_norm());
    diagnostics.insert("sum_identity", x1.add(&x2)?.sub(&sum)?.sup_norm());
    diagnostics.insert("gap_equals_w", base.y.sub(&auxiliary.w)?.sup_norm());
    diagnostics.insert(
        "intertwine",
        w.sub(&SamplePath::from_parts(grid, intertwined))?.sup_norm(),
    );

    let c1 = two * skew.alpha - skew.beta;
    let c2 = two - two * skew.alpha - skew.beta;
    let (mut m1, mut m2) = (T::zero(), T::zero());
    let (mut e1, mut e2) = (T::zero(), T::zero());
    for i in 0..=n {
        let l = lt.values()[i];
        e1 = e1.max((x1.values()[i] - m1 - c1 * l).abs());
        e2 = e2.max((x2.values()[i] - m2 - c2 * l).abs());
        if i < n {
            let up = gv[i] > T::zero();
            m1 += if up { rho } else { sigma } * b1.increment(i);
            m2 += if up { sigma } else { rho } * b2.increment(i);
        }
    }
    diagnostics.insert("component1_equation", e1);
    diagnostics.insert("component2_equation", e2);
    diagnostics.insert("qv_b1", quadratic_variation(&b1).last());
    diagnostics.insert("qv_b2", quadratic_variation(&b2).last());
    diagnostics.insert("covariation_b", quadratic_covariation(&b1, &b2)?.last());

    Ok(SkewSystemResult {
        auxiliary,
        gap,
        b1,
        b2,
        sum,
        x1,
        x2,
        w,
        v,
        gap_local_time: lt,
        params: *params,
        skew,
        diagnostics,
    })
}

/// Terminal right local times `(L^Ỹ(T), L^{−Ỹ}(T))` of the gap by corrected upcrossings.
pub fn gap_local_times<T: Real>(result: &SkewSystemResult<T>) -> Result<(T, T)> {
    let band = UpcrossingBand::for_grid(result.gap.grid());
    let right = upcrossing_signed(&result.gap, band, Side::Right)?.terminal();
    let left = upcrossing_signed(&result.gap.neg(), band, Side::Right)?.terminal();
    Ok((right, left))
}
