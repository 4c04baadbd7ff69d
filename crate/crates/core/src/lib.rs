//! Skew unfolding of reflected paths: Skorokhod and conventional reflections,
//! excursion-sign unfolding, local-time estimators, skew Brownian and Bessel
//! processes, Tanaka-equation counterexamples and a two-particle system with
//! skew-elastic collisions.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix `f64`.

pub mod error;
pub mod excursion;
pub mod local_time;
pub mod particles;
pub mod path;
pub mod reflection;
pub mod rng;
pub mod scalar;
pub mod skew;
pub mod stats;

pub use error::{Error, Result};
pub use excursion::{
    assemble, decompose_excursions, sign_product_residual, skew_tanaka_defect, unfold_conventional,
    unfold_skorokhod, unfold_with_signs, Diagnostics, ExcursionDecomposition, UnfoldResult,
};
pub use local_time::{
    estimate_local_time, folded_tanaka_local_time, occupation_local_time, tanaka_local_time,
    upcrossing_local_time, upcrossing_signed, LocalTimeCurve, Method, Side, UpcrossingBand,
};
pub use particles::{
    auxiliary_brownians, build_skew_system, build_skew_system_with, derive_skew_params, gap_local_times,
    simulate_base, simulate_base_driven, AuxiliaryBrownians, BaseSystem, ParticleParams, SkewParams,
    SkewSystemResult,
};
pub use path::{
    brownian_with_clock, euler_path, ito_integral, make_grid, quadratic_covariation, quadratic_variation,
    sample_brownian, SamplePath, SemimartingalePath, TimeGrid,
};
pub use reflection::{conventional_reflect, levy_reflection_defect, levy_transform, skorokhod_reflect, ReflectionResult};
pub use rng::RngStream;
pub use scalar::{sgn_left, sgn_sym, Real, SignConvention};
pub use skew::{
    bessel_scale_maps, nakao_solution, ocone_counterexample, scale_local_time_ratio, skew_bessel,
    skew_bessel_with_tol, skew_brownian, squared_bessel, squared_bessel_driven, NakaoResult, OconeResult,
    SkewBesselParams,
};
pub use stats::{identity_residual, mc_estimate, median, sign_occupation, BatchRunner, McSummary};

pub type TimeGrid64 = TimeGrid<f64>;
pub type SamplePath64 = SamplePath<f64>;
pub type SemimartingalePath64 = SemimartingalePath<f64>;
pub type UnfoldResult64 = UnfoldResult<f64>;
pub type LocalTimeCurve64 = LocalTimeCurve<f64>;
pub type ParticleParams64 = ParticleParams<f64>;
pub type SkewSystemResult64 = SkewSystemResult<f64>;

pub type TimeGrid32 = TimeGrid<f32>;
pub type SamplePath32 = SamplePath<f32>;
