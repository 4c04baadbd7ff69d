//! Excursion decomposition of a folded path and random-sign unfolding.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::Rng;

use crate::error::{config, domain, Error, Result};
use crate::local_time::{estimate_local_time, tanaka_local_time, Method, Side};
use crate::path::{ito_sum, SamplePath, SemimartingalePath, TimeGrid};
use crate::reflection::{levy_reflection_defect, levy_transform, skorokhod_reflect};
use crate::rng::RngStream;
use crate::scalar::{sgn_sym, Real, SignConvention};

/// Named residuals of the identities a construction should satisfy.
pub type Diagnostics<T> = BTreeMap<&'static str, T>;

/// Zero set and excursion intervals of a nonnegative path, plus one sign per
/// excursion once drawn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcursionDecomposition {
    zero_mask: Vec<bool>,
    intervals: Vec<Range<usize>>,
    signs: Option<Vec<i8>>,
}

impl ExcursionDecomposition {
    pub fn zero_mask(&self) -> &[bool] {
        &self.zero_mask
    }

    /// Maximal runs of indices where the path exceeds the tolerance, in time order.
    pub fn intervals(&self) -> &[Range<usize>] {
        &self.intervals
    }

    pub fn n_excursions(&self) -> usize {
        self.intervals.len()
    }

    pub fn signs(&self) -> Option<&[i8]> {
        self.signs.as_deref()
    }

    /// Attaches fixed signs, one per excursion.
    pub fn with_signs(mut self, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != self.intervals.len() {
            return Err(config(format!(
                "{} signs for {} excursions",
                signs.len(),
                self.intervals.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(config("signs must be +1 or -1"));
        }
        self.signs = Some(signs);
        Ok(self)
    }

    /// Draws independent signs, `+1` with probability `alpha`, one per
    /// excursion in time order.
    pub fn draw_signs(self, alpha: f64, stream: RngStream) -> Result<Self> {
        check_alpha(alpha)?;
        let mut rng = stream.rng();
        let signs = (0..self.intervals.len())
            .map(|_| if rng.random::<f64>() < alpha { 1 } else { -1 })
            .collect();
        self.with_signs(signs)
    }

    /// Sign process: the excursion's sign on each interval, 0 on the zero set.
    pub fn sign_path<T: Real>(&self, grid: &TimeGrid<T>) -> Result<SamplePath<T>> {
        let signs = self
            .signs
            .as_ref()
            .ok_or_else(|| config("excursion signs have not been drawn"))?;
        if grid.len() != self.zero_mask.len() {
            return Err(Error::GridMismatch("decomposition length differs from grid".into()));
        }
        let mut z = vec![T::zero(); grid.len()];
        for (range, &s) in self.intervals.iter().zip(signs) {
            let v = if s > 0 { T::one() } else { -T::one() };
            z[range.clone()].iter_mut().for_each(|x| *x = v);
        }
        Ok(SamplePath::from_parts(*grid, z))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(config(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Splits a nonnegative path into the zero set `{S ≤ tol}` and maximal runs above `tol`.
pub fn decompose_excursions<T: Real>(path: &SamplePath<T>, tol: T) -> Result<ExcursionDecomposition> {
    if tol < T::zero() {
        return Err(config("zero tolerance must be nonnegative"));
    }
    if let Some(i) = path.values().iter().position(|&v| v < -tol) {
        return Err(domain(format!("path value {} at index {i} is below -tol", path.values()[i])));
    }
    let zero_mask: Vec<bool> = path.values().iter().map(|&v| v <= tol).collect();
    let mut intervals = Vec::new();
    let mut start = None;
    for (i, &z) in zero_mask.iter().enumerate() {
        match (z, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                intervals.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push(s..zero_mask.len());
    }
    Ok(ExcursionDecomposition {
        zero_mask,
        intervals,
        signs: None,
    })
}

/// A folded path together with its signed unfolding `X = Z·S`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldResult<T> {
    /// The semimartingale that was folded, when there is one.
    pub driver: Option<SemimartingalePath<T>>,
    /// Nonnegative path `S` (or `R`).
    pub folded: SamplePath<T>,
    /// Pushing term of the Skorokhod reflection, when that map was used.
    pub pushing: Option<SamplePath<T>>,
    /// Lévy transform of the driver, for conventional unfolding.
    pub levy: Option<SamplePath<T>>,
    pub decomposition: ExcursionDecomposition,
    pub sign_path: SamplePath<T>,
    pub unfolded: SamplePath<T>,
    pub alpha: T,
    pub diagnostics: Diagnostics<T>,
}

/// Draws one sign per excursion and multiplies the folded path by the sign process.
pub fn unfold_with_signs<T: Real>(
    folded: &SamplePath<T>,
    decomposition: ExcursionDecomposition,
    alpha: T,
    stream: RngStream,
) -> Result<UnfoldResult<T>> {
    let decomposition = decomposition.draw_signs(alpha.to_f64_lossy(), stream)?;
    assemble(folded, decomposition, alpha)
}

/// Unfolds with the signs already attached to `decomposition`.
pub fn assemble<T: Real>(folded: &SamplePath<T>, decomposition: ExcursionDecomposition, alpha: T) -> Result<UnfoldResult<T>> {
    let sign_path = decomposition.sign_path(folded.grid())?;
    let unfolded = sign_path.zip_with(folded, |z, s| z * s)?;
    let mut diagnostics = Diagnostics::new();
    diagnostics.insert("abs_identity", abs_defect(&unfolded, folded));
    Ok(UnfoldResult {
        driver: None,
        folded: folded.clone(),
        pushing: None,
        levy: None,
        decomposition,
        sign_path,
        unfolded,
        alpha,
        diagnostics,
    })
}

fn abs_defect<T: Real>(x: &SamplePath<T>, s: &SamplePath<T>) -> T {
    x.values()
        .iter()
        .zip(s.values())
        .fold(T::zero(), |m, (&a, &b)| m.max((a.abs() - b).abs()))
}

/// Skew unfolding of the Skorokhod reflection of `U`.
pub fn unfold_skorokhod<T: Real>(
    driver: &SemimartingalePath<T>,
    alpha: T,
    stream: RngStream,
    tol: T,
) -> Result<UnfoldResult<T>> {
    check_alpha(alpha.to_f64_lossy())?;
    let reflection = skorokhod_reflect(&driver.total)?;
    let decomposition = decompose_excursions(&reflection.reflected, tol)?;
    let mut result = unfold_with_signs(&reflection.reflected, decomposition, alpha, stream)?;

    let s = reflection.reflected.values();
    let c = reflection.pushing.values();
    let u = driver.total.values();
    let mut decomposition_defect = T::zero();
    let mut flatness = T::zero();
    for i in 0..s.len() {
        decomposition_defect = decomposition_defect.max((s[i] - u[i] - c[i]).abs());
        if i > 0 && s[i] > T::zero() {
            flatness = flatness.max((c[i] - c[i - 1]).abs());
        }
    }
    result.diagnostics.insert("reflection_identity", decomposition_defect);
    result.diagnostics.insert("pushing_flatness", flatness);
    result.diagnostics.insert(
        "skew_tanaka",
        skew_tanaka_defect(&result.unfolded, &driver.total, alpha)?,
    );
    result.driver = Some(driver.clone());
    result.pushing = Some(reflection.pushing);
    Ok(result)
}

/// Skew unfolding of `|U|`; the matching driver is the Lévy transform of `U`.
pub fn unfold_conventional<T: Real>(
    driver: &SemimartingalePath<T>,
    alpha: T,
    stream: RngStream,
    tol: T,
) -> Result<UnfoldResult<T>> {
    check_alpha(alpha.to_f64_lossy())?;
    let folded = driver.total.abs();
    let decomposition = decompose_excursions(&folded, tol)?;
    let mut result = unfold_with_signs(&folded, decomposition, alpha, stream)?;
    let levy = levy_transform(&driver.total, SignConvention::Symmetric);
    result
        .diagnostics
        .insert("levy_reflection", levy_reflection_defect(&driver.total));
    result
        .diagnostics
        .insert("skew_tanaka", skew_tanaka_defect(&result.unfolded, &levy, alpha)?);
    result.driver = Some(driver.clone());
    result.levy = Some(levy);
    Ok(result)
}

/// `sup |X − X(0) − ∫ sgn(X) dU − ((2α−1)/α)·L^X|` with the right local time
/// of `X` estimated by corrected upcrossings.
pub fn skew_tanaka_defect<T: Real>(x: &SamplePath<T>, driver: &SamplePath<T>, alpha: T) -> Result<T> {
    let signs: Vec<T> = x.values().iter().map(|&v| sgn_sym(v)).collect();
    x.ensure_same_grid(driver)?;
    let integral = ito_sum(&signs, driver);
    let lt = estimate_local_time(x, Method::Upcrossing, Side::Right)?;
    let coef = (T::of(2.0) * alpha - T::one()) / alpha;
    let x0 = x.first();
    Ok(x.values()
        .iter()
        .zip(integral.values())
        .zip(lt.values.values())
        .fold(T::zero(), |m, ((&xv, &iv), &lv)| m.max((xv - x0 - iv - coef * lv).abs())))
}

/// `sup_k |Z·S − ∫ Z dS − (2α−1)·L^S|`, with `L^S` the Tanaka estimate from
/// the increments of `S`, for an unfolding of a Skorokhod reflection.
pub fn sign_product_residual<T: Real>(result: &UnfoldResult<T>) -> T {
    let s = &result.folded;
    let integral = ito_sum(result.sign_path.values(), s);
    let lt = tanaka_local_time(s, Side::Right);
    let coef = T::of(2.0) * result.alpha - T::one();
    result
        .unfolded
        .values()
        .iter()
        .zip(integral.values())
        .zip(lt.values.values())
        .fold(T::zero(), |m, ((&x, &i), &l)| m.max((x - i - coef * l).abs()))
}
