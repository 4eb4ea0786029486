//! Certified brackets and optimizer budgets.

use crate::linalg::{DenseMatrix, PVec, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// How an upper bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Closed form.
    Exact,
    /// Riesz–Thorin type interpolation between closed-form endpoints.
    Interpolation,
    /// Cost of an explicit decomposition or factorization.
    Factorization,
    /// Product of other certified bounds.
    Submultiplicative,
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::Exact => "exact",
            Certificate::Interpolation => "interpolation",
            Certificate::Factorization => "factorization",
            Certificate::Submultiplicative => "submultiplicative",
        }
    }
}

/// The object realizing a lower bound.
#[derive(Clone, Debug)]
pub enum Witness {
    Vector(PVec),
    Matrix(DenseMatrix),
    Coefficients(Vec<C64>),
}

/// A bracket `lower ≤ true value ≤ upper`.
#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: Option<Witness>,
    pub upper_certificate: Certificate,
    pub method: String,
    pub budget_used: u64,
}

/// Writes non-finite values as the strings "inf", "-inf" and "nan".
pub fn serialize_real<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Vector(_) => "vector",
            Witness::Matrix(_) => "matrix",
            Witness::Coefficients(_) => "coefficients",
        }
    }
}

impl Serialize for NormEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Real(f64);
        impl Serialize for Real {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_real(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("NormEstimate", 6)?;
        st.serialize_field("lower", &Real(self.lower))?;
        st.serialize_field("upper", &Real(self.upper))?;
        st.serialize_field("certificate", &self.upper_certificate)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("witness", &self.lower_witness.as_ref().map(|w| w.kind()))?;
        st.serialize_field("budget_used", &self.budget_used)?;
        st.end()
    }
}

/// Slack allowed between `lower` and `upper` for floating point noise.
pub const BRACKET_SLACK: f64 = 1e-12;

impl NormEstimate {
    pub fn new(lower: f64, upper: f64, cert: Certificate, method: impl Into<String>) -> Self {
        Self {
            lower,
            upper,
            lower_witness: None,
            upper_certificate: cert,
            method: method.into(),
            budget_used: 0,
        }
    }

    pub fn exact(value: f64, method: impl Into<String>) -> Self {
        Self::new(value, value, Certificate::Exact, method)
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.lower_witness = Some(w);
        self
    }

    pub fn with_budget(mut self, b: u64) -> Self {
        self.budget_used = b;
        self
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        if self.upper.is_finite() {
            0.5 * (self.lower + self.upper)
        } else {
            self.lower
        }
    }

    /// Lower and upper are ordered up to the allowed slack, scaled by the magnitude.
    pub fn is_consistent(&self) -> bool {
        let scale = 1.0_f64.max(self.lower.abs());
        self.lower >= -BRACKET_SLACK
            && self.lower <= self.upper + BRACKET_SLACK * scale
            && (self.upper_certificate != Certificate::Exact || self.width() <= 1e-10 * scale)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower <= x + tol && x <= self.upper + tol
    }

    /// Brackets intersect once each is widened by `tol`.
    pub fn overlaps(&self, other: &NormEstimate, tol: f64) -> bool {
        self.lower <= other.upper + tol && other.lower <= self.upper + tol
    }

    /// Distance between the brackets; zero when they intersect.
    pub fn separation(&self, other: &NormEstimate) -> f64 {
        (self.lower - other.upper).max(other.lower - self.upper).max(0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut e = self.clone();
        e.lower *= s.abs();
        e.upper *= s.abs();
        e
    }

    /// Tightens with a second bracket for the same quantity.
    pub fn intersect(mut self, other: &NormEstimate) -> Self {
        if other.lower > self.lower {
            self.lower = other.lower;
            self.lower_witness = other.lower_witness.clone();
        }
        if other.upper < self.upper {
            self.upper = other.upper;
            self.upper_certificate = other.upper_certificate;
        }
        self.budget_used += other.budget_used;
        self
    }
}

/// Budgets and seeding for every optimizer in the crate.
#[derive(Clone, Debug, Serialize)]
pub struct OptimConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tolerance: f64,
    pub seed: u64,
    pub grid_density: usize,
    /// Run restarts and trials sequentially. Results are identical either
    /// way; this only controls thread usage.
    pub single_lane: bool,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 500,
            step_tolerance: 1e-13,
            seed: 0,
            grid_density: 60,
            single_lane: false,
        }
    }
}

impl OptimConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Same budgets with a seed derived from `stream`.
    pub fn fork(&self, stream: u64) -> Self {
        let mut c = self.clone();
        c.seed = mix(self.seed, stream);
        c
    }

    /// A smaller budget for estimates evaluated inside outer optimization loops.
    pub fn inner(&self) -> Self {
        let mut c = self.clone();
        c.restarts = (self.restarts / 8).clamp(2, 6);
        c.max_iters = self.max_iters.min(200);
        c.step_tolerance = self.step_tolerance.max(1e-10);
        c.single_lane = true;
        c
    }

    pub fn is_valid(&self) -> bool {
        self.restarts >= 1 && self.max_iters >= 1 && self.step_tolerance > 0.0
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        rng_for(self.seed, stream)
    }
}

/// Independent deterministic stream for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// SplitMix64 style mixing of a seed with a stream index.
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps `f` over `0..n`, in parallel unless `single_lane`. Output order is by index.
pub fn map_indexed<T, F>(n: usize, single_lane: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if single_lane {
        (0..n).map(f).collect()
    } else {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
}
