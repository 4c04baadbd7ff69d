use crate::error::Result;
use crate::excursion::{check_alpha, Diagnostics};
use crate::local_time::{upcrossing_signed, Side, UpcrossingBand};
use crate::path::{euler_path, quadratic_covariation, quadratic_variation, sample_brownian, SamplePath, TimeGrid};
use crate::rng::RngStream;
use crate::scalar::{sgn_left, Real};

/// Strong solution of the perturbed skew-Tanaka equation
/// `X = x0 + ∫ sgn(X) dU + V + 2(2α−1)·L̂^X`.
#[derive(Debug, Clone, PartialEq)]
pub struct NakaoResult<T> {
    /// Solution of `dY = s(Y) d(B₁ + B₂)`.
    pub y: SamplePath<T>,
    pub x: SamplePath<T>,
    pub u: SamplePath<T>,
    pub v: SamplePath<T>,
    pub b1: SamplePath<T>,
    pub b2: SamplePath<T>,
    /// Sup-norm defect of the equation with `L̂^X` estimated by upcrossings.
    pub residual: T,
    /// Realized `qv_u`, `qv_v` and `covariation_uv` at the horizon.
    pub diagnostics: Diagnostics<T>,
}

/// `p(x) = (1−α)x` for `x > 0`, `αx` for `x ≤ 0`.
fn compress<T: Real>(x: T, alpha: T) -> T {
    if x > T::zero() {
        (T::one() - alpha) * x
    } else {
        alpha * x
    }
}

/// Inverse of [`compress`].
fn expand<T: Real>(y: T, alpha: T) -> T {
    if y > T::zero() {
        y / (T::one() - alpha)
    } else {
        y / alpha
    }
}

/// Builds `Y` from independent `B₁ = stream.substream(1)`, `B₂ = stream.substream(2)`,
/// unfolds it to `X = p⁻¹(Y)` and disentangles the drivers
/// `U = ∫1{X>0}dB₁ − ∫1{X≤0}dB₂`, `V = ∫1{X≤0}dB₁ + ∫1{X>0}dB₂`.
pub fn nakao_solution<T: Real>(alpha: T, x0: T, grid: &TimeGrid<T>, stream: RngStream) -> Result<NakaoResult<T>> {
    check_alpha(alpha.to_f64_lossy())?;
    let b1 = sample_brownian(grid, stream.substream(1), T::one())?.total;
    let b2 = sample_brownian(grid, stream.substream(2), T::one())?.total;
    let sum = b1.add(&b2)?;
    let y = euler_path(
        |_, _| T::zero(),
        |y, _| if y > T::zero() { T::one() - alpha } else { alpha },
        compress(x0, alpha),
        &sum,
    )?;
    let x = y.map(|v| expand(v, alpha));

    let n = grid.n_steps();
    let (xv, d1, d2) = (x.values(), b1.values(), b2.values());
    let mut u = Vec::with_capacity(n + 1);
    let mut v = Vec::with_capacity(n + 1);
    let (mut ua, mut va) = (T::zero(), T::zero());
    u.push(ua);
    v.push(va);
    for i in 0..n {
        let (db1, db2) = (d1[i + 1] - d1[i], d2[i + 1] - d2[i]);
        if xv[i] > T::zero() {
            ua += db1;
            va += db2;
        } else {
            ua -= db2;
            va += db1;
        }
        u.push(ua);
        v.push(va);
    }
    let u = SamplePath::new(*grid, u)?;
    let v = SamplePath::new(*grid, v)?;

    // X has volatility √2, so the band and overshoot scale with √(2·dt).
    let step = (T::of(2.0) * grid.dt()).sqrt();
    let band = UpcrossingBand {
        floor: step,
        epsilon: step,
        overshoot_step: step,
    };
    let lt = upcrossing_signed(&x, band, Side::Symmetric)?;
    let coef = T::of(2.0) * (T::of(2.0) * alpha - T::one());
    let mut integral = T::zero();
    let mut residual = T::zero();
    for i in 0..=n {
        let defect = xv[i] - x0 - integral - v.values()[i] - coef * lt.values.values()[i];
        residual = residual.max(defect.abs());
        if i < n {
            integral += sgn_left(xv[i]) * u.increment(i);
        }
    }

    let mut diagnostics = Diagnostics::new();
    diagnostics.insert("qv_u", quadratic_variation(&u).last());
    diagnostics.insert("qv_v", quadratic_variation(&v).last());
    diagnostics.insert("covariation_uv", quadratic_covariation(&u, &v)?.last());
    Ok(NakaoResult {
        y,
        x,
        u,
        v,
        b1,
        b2,
        residual,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::make_grid;

    #[test]
    fn maps_are_inverse() {
        for a in [0.2, 0.5, 0.9] {
            for x in [-3.0_f64, -0.1, 0.0, 0.4, 2.5] {
                assert!((expand(compress(x, a), a) - x).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetric_case_is_plain_brownian_sum() {
        let g = make_grid(1.0_f64, 1024).unwrap();
        let r = nakao_solution(0.5, 0.3, &g, RngStream::new(6, 1)).unwrap();
        for i in 0..=1024 {
            let expected = 0.3 + r.b1.values()[i] + r.b2.values()[i];
            assert!((r.x.values()[i] - expected).abs() < 1e-12);
        }
        // With α = 1/2 the local-time term drops out and the equation closes exactly.
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn shares_sign_with_y_and_is_deterministic() {
        let g = make_grid(1.0_f64, 1024).unwrap();
        let s = RngStream::new(6, 2);
        let r = nakao_solution(0.7, 0.0, &g, s).unwrap();
        for (x, y) in r.x.values().iter().zip(r.y.values()) {
            assert_eq!(*x > 0.0, *y > 0.0);
        }
        assert_eq!(r, nakao_solution(0.7, 0.0, &g, s).unwrap());
        assert!(nakao_solution(0.0, 0.0, &g, s).is_err());
    }
}
