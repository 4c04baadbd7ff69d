//! Uniform grids, sampled paths and the discrete stochastic calculus on them.

use crate::error::{config, Error, Result};
use crate::rng::RngStream;
use crate::scalar::Real;

/// Uniform grid `t_i = i·dt`, `i = 0..=n_steps`, on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    horizon: T,
    n_steps: usize,
    dt: T,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(horizon: T, n_steps: usize) -> Result<Self> {
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(config(format!("horizon must be positive and finite, got {horizon}")));
        }
        if n_steps == 0 {
            return Err(config("grid needs at least one step"));
        }
        Ok(Self {
            horizon,
            n_steps,
            dt: horizon / T::of_usize(n_steps),
        })
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> T {
        T::of_usize(i) * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(move |i| self.time(i))
    }

    /// Index of the grid point at time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let pos = t / self.dt;
        let i = pos.round();
        if i < T::zero() || (pos - i).abs() > T::of(1e-6) {
            return None;
        }
        let i = i.to_usize()?;
        (i <= self.n_steps).then_some(i)
    }

    /// `√dt`, the default local-time bandwidth.
    pub fn sqrt_dt(&self) -> T {
        self.dt.sqrt()
    }
}

/// Builds the uniform grid on `[0, horizon]` with `n` steps.
pub fn make_grid<T: Real>(horizon: T, n: usize) -> Result<TimeGrid<T>> {
    TimeGrid::new(horizon, n)
}

/// A scalar process evaluated on every point of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath<T> {
    grid: TimeGrid<T>,
    values: Vec<T>,
}

impl<T: Real> SamplePath<T> {
    pub fn new(grid: TimeGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Skips validation; callers guarantee length and finiteness.
    pub(crate) fn from_parts(grid: TimeGrid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: TimeGrid<T>) -> Self {
        Self::from_parts(grid, vec![T::zero(); grid.len()])
    }

    pub fn from_fn(grid: TimeGrid<T>, f: impl FnMut(usize) -> T) -> Result<Self> {
        Self::new(grid, (0..grid.len()).map(f).collect())
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> T {
        self.values[0]
    }

    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Value at a time on the grid.
    pub fn at(&self, t: T) -> Option<T> {
        self.grid.index_of(t).map(|i| self.values[i])
    }

    pub fn increment(&self, i: usize) -> T {
        self.values[i + 1] - self.values[i]
    }

    pub fn increments(&self) -> impl Iterator<Item = T> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(Self::from_parts(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `max_{j ≤ k} values[j]` for each `k`.
    pub fn running_max(&self) -> Self {
        let mut acc = T::neg_infinity();
        self.map_scan(|v| {
            acc = acc.max(v);
            acc
        })
    }

    /// Largest absolute value along the path.
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    pub(crate) fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.grid.horizon, self.grid.n_steps, other.grid.horizon, other.grid.n_steps
            )))
        }
    }

    fn map_scan(&self, mut f: impl FnMut(T) -> T) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Continuous semimartingale `U = M + A` with its quadratic variation `⟨U⟩ = ⟨M⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemimartingalePath<T> {
    pub total: SamplePath<T>,
    pub martingale: SamplePath<T>,
    pub finite_variation: SamplePath<T>,
    pub qv: SamplePath<T>,
}

impl<T: Real> SemimartingalePath<T> {
    /// Assembles `U = M + A` with `qv` the quadratic variation of `M`.
    pub fn new(martingale: SamplePath<T>, finite_variation: SamplePath<T>, qv: SamplePath<T>) -> Result<Self> {
        martingale.ensure_same_grid(&finite_variation)?;
        martingale.ensure_same_grid(&qv)?;
        if martingale.first() != T::zero() || finite_variation.first() != T::zero() {
            return Err(config("martingale and finite-variation parts must start at 0"));
        }
        if qv.first() != T::zero() || qv.values().windows(2).any(|w| w[1] < w[0]) {
            return Err(config("quadratic variation must start at 0 and be nondecreasing"));
        }
        let total = martingale.add(&finite_variation)?;
        Ok(Self {
            total,
            martingale,
            finite_variation,
            qv,
        })
    }

    /// Treats a sampled path as a local martingale, with realized quadratic variation.
    pub fn from_martingale(martingale: SamplePath<T>) -> Result<Self> {
        let qv = quadratic_variation(&martingale);
        let fv = SamplePath::zeros(*martingale.grid());
        Self::new(martingale, fv, qv)
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        self.total.grid()
    }
}

/// Brownian motion with variance `scale²` per unit time.
///
/// Equivalent to [`brownian_with_clock`] on the clock `scale²·t`, so both
/// produce the same path from the same stream.
pub fn sample_brownian<T: Real>(grid: &TimeGrid<T>, stream: RngStream, scale: T) -> Result<SemimartingalePath<T>> {
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(config(format!("Brownian scale must be positive, got {scale}")));
    }
    let var = scale * scale;
    let clock = SamplePath::from_parts(*grid, grid.times().map(|t| var * t).collect());
    let b = brownian_with_clock(&clock, stream)?;
    Ok(SemimartingalePath {
        total: b.clone(),
        martingale: b,
        finite_variation: SamplePath::zeros(*grid),
        qv: clock,
    })
}

/// Discrete Itô integral `I[k] = Σ_{i<k} H[i]·(U[i+1] − U[i])`.
pub fn ito_integral<T: Real>(integrand: &SamplePath<T>, integrator: &SamplePath<T>) -> Result<SamplePath<T>> {
    integrand.ensure_same_grid(integrator)?;
    Ok(ito_sum(integrand.values(), integrator))
}

/// Itô sum against `integrator` with the integrand given as a slice of
/// left-endpoint values (at least `n_steps` long).
pub(crate) fn ito_sum<T: Real>(integrand: &[T], integrator: &SamplePath<T>) -> SamplePath<T> {
    let u = integrator.values();
    let mut out = Vec::with_capacity(u.len());
    let mut acc = T::zero();
    out.push(acc);
    for i in 0..u.len() - 1 {
        acc += integrand[i] * (u[i + 1] - u[i]);
        out.push(acc);
    }
    SamplePath::from_parts(*integrator.grid(), out)
}

/// Realized quadratic variation `Q[k] = Σ_{i<k} (U[i+1] − U[i])²`.
pub fn quadratic_variation<T: Real>(path: &SamplePath<T>) -> SamplePath<T> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(path.len());
    out.push(acc);
    for d in path.increments() {
        acc += d * d;
        out.push(acc);
    }
    SamplePath::from_parts(*path.grid(), out)
}

/// Realized covariation `Σ_{i<k} ΔX_i·ΔY_i`.
pub fn quadratic_covariation<T: Real>(x: &SamplePath<T>, y: &SamplePath<T>) -> Result<SamplePath<T>> {
    x.ensure_same_grid(y)?;
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(x.len());
    out.push(acc);
    for (dx, dy) in x.increments().zip(y.increments()) {
        acc += dx * dy;
        out.push(acc);
    }
    Ok(SamplePath::from_parts(*x.grid(), out))
}

/// `B(clock(t_i))` for a standard Brownian motion `B`: increment `i` is a
/// centered Gaussian with variance `clock[i+1] − clock[i]`.
pub fn brownian_with_clock<T: Real>(clock: &SamplePath<T>, stream: RngStream) -> Result<SamplePath<T>> {
    if clock.first() != T::zero() {
        return Err(crate::error::domain("clock must start at 0"));
    }
    let mut rng = stream.rng();
    let c = clock.values();
    let mut out = Vec::with_capacity(c.len());
    let mut acc = T::zero();
    out.push(acc);
    for i in 0..c.len() - 1 {
        let dv = c[i + 1] - c[i];
        if dv < T::zero() {
            return Err(crate::error::domain(format!("clock decreases at index {i}")));
        }
        acc += dv.sqrt() * T::standard_normal(&mut rng);
        out.push(acc);
    }
    Ok(SamplePath::from_parts(*clock.grid(), out))
}

/// Euler scheme `X[i+1] = X[i] + b(X[i], t_i)·dt + σ(X[i], t_i)·(driver[i+1] − driver[i])`.
pub fn euler_path<T, B, S>(drift: B, dispersion: S, x0: T, driver: &SamplePath<T>) -> Result<SamplePath<T>>
where
    T: Real,
    B: Fn(T, T) -> T,
    S: Fn(T, T) -> T,
{
    let grid = *driver.grid();
    let dt = grid.dt();
    let mut out = Vec::with_capacity(grid.len());
    let mut x = x0;
    if !x.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    out.push(x);
    for (i, dw) in driver.increments().enumerate() {
        let t = grid.time(i);
        x = x + drift(x, t) * dt + dispersion(x, t) * dw;
        if !x.is_finite() {
            return Err(Error::NonFinite { index: i + 1 });
        }
        out.push(x);
    }
    Ok(SamplePath::from_parts(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(v: &[f64]) -> SamplePath<f64> {
        let g = make_grid(1.0, v.len() - 1).unwrap();
        SamplePath::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn grid_arithmetic() {
        let g = make_grid(1.0_f64, 4).unwrap();
        assert_eq!(g.dt(), 0.25);
        assert_eq!(g.times().collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(make_grid(2.0_f64, 1).unwrap().dt(), 2.0);
        assert!(matches!(make_grid(1.0_f64, 0), Err(Error::Config(_))));
        assert!(make_grid(0.0_f64, 3).is_err());
        assert!(make_grid(-1.0_f32, 3).is_err());
        assert_eq!(g.index_of(0.75), Some(3));
        assert_eq!(g.index_of(0.3), None);
        assert_eq!(g.index_of(1.5), None);
    }

    #[test]
    fn sample_path_validates() {
        let g = make_grid(1.0_f64, 2).unwrap();
        assert!(matches!(SamplePath::new(g, vec![0.0; 2]), Err(Error::GridMismatch(_))));
        assert_eq!(
            SamplePath::new(g, vec![0.0, f64::NAN, 1.0]),
            Err(Error::NonFinite { index: 1 })
        );
    }

    #[test]
    fn ito_integral_examples() {
        let u = path(&[0.0, 1.0, 3.0]);
        let ones = path(&[1.0, 1.0, 1.0]);
        assert_eq!(ito_integral(&ones, &u).unwrap().values(), &[0.0, 1.0, 3.0]);
        let zeros = path(&[0.0, 0.0, 0.0]);
        assert_eq!(ito_integral(&zeros, &u).unwrap().values(), &[0.0, 0.0, 0.0]);
        let h = path(&[1.0, -1.0, 7.0]);
        let u = path(&[0.0, 2.0, 5.0]);
        assert_eq!(ito_integral(&h, &u).unwrap().values(), &[0.0, 2.0, -1.0]);
        let other = SamplePath::zeros(make_grid(2.0, 2).unwrap());
        assert!(matches!(ito_integral(&other, &u), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn quadratic_variation_examples() {
        assert_eq!(quadratic_variation(&path(&[0.0, 1.0, 0.0])).values(), &[0.0, 1.0, 2.0]);
        assert_eq!(quadratic_variation(&path(&[3.0, 3.0, 3.0])).values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn brownian_determinism_and_clock_equivalence() {
        let g = make_grid(1.0_f64, 64).unwrap();
        let s = RngStream::new(11, 2);
        let a = sample_brownian(&g, s, 1.0).unwrap();
        let b = sample_brownian(&g, s, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.qv.values(), g.times().collect::<Vec<_>>().as_slice());
        assert!(a.finite_variation.values().iter().all(|&v| v == 0.0));
        let clock = SamplePath::new(g, g.times().collect()).unwrap();
        assert_eq!(brownian_with_clock(&clock, s).unwrap(), a.total);
        assert!(sample_brownian(&g, s, 0.0).is_err());
    }

    #[test]
    fn clock_edge_cases() {
        let g = make_grid(1.0_f64, 8).unwrap();
        let zero = SamplePath::zeros(g);
        let b = brownian_with_clock(&zero, RngStream::new(1, 1)).unwrap();
        assert!(b.values().iter().all(|&v| v == 0.0));
        let bad = path(&[0.0, 1.0, 0.5]);
        assert!(matches!(brownian_with_clock(&bad, RngStream::new(1, 1)), Err(Error::Domain(_))));
    }

    #[test]
    fn euler_trivial_cases() {
        let g = make_grid(1.0_f64, 16).unwrap();
        let w = sample_brownian(&g, RngStream::new(5, 0), 1.0).unwrap().total;
        let x = euler_path(|_, _| 0.0, |_, _| 1.0, 2.0, &w).unwrap();
        for (a, b) in x.values().iter().zip(w.values()) {
            assert!((a - (2.0 + b)).abs() < 1e-14);
        }
        let x = euler_path(|_, _| 1.0, |_, _| 0.0, 0.5, &w).unwrap();
        assert!((x.last() - 1.5).abs() < 1e-12);
        let blow = euler_path(|_, _| f64::INFINITY, |_, _| 0.0, 0.0, &w);
        assert_eq!(blow, Err(Error::NonFinite { index: 1 }));
    }

    #[test]
    fn euler_matches_hand_rolled_recursion() {
        let g = make_grid(1.0_f64, 256).unwrap();
        let w = sample_brownian(&g, RngStream::new(9, 4), 1.0).unwrap().total;
        let x = euler_path(|x, _| 0.1 * x, |x, _| 0.3 * x, 1.0, &w).unwrap();
        let mut y = 1.0;
        let mut ys = vec![y];
        for i in 0..256 {
            let dw = w.values()[i + 1] - w.values()[i];
            y += 0.1 * y * g.dt() + 0.3 * y * dw;
            ys.push(y);
        }
        for (a, b) in x.values().iter().zip(&ys) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn generic_over_f32() {
        let g = make_grid(1.0_f32, 32).unwrap();
        let b = sample_brownian(&g, RngStream::new(3, 3), 1.0).unwrap();
        assert_eq!(b.total.len(), 33);
        assert!(b.total.values().iter().all(|v| v.is_finite()));
    }
}
