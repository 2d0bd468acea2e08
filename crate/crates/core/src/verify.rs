//! Randomized verification suites for the entropy inequalities.
//!
//! Each trial draws its instance from a ChaCha stream seeded with
//! `seed + trial` and reduces its checks to a single margin (`value - bound`
//! for inequalities, `-|difference|` for equalities). A trial fails when its
//! margin drops below `-tolerance` or when a numerical routine errors.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aep::{alpha_lower_bound, alpha_window, verify_finite_n_with, FiniteNConfig};
use crate::entropy::{h_alpha_rel, h_max, h_min, h_min_rel, h_vn_cond, h_vn_rel, EntropyValue};
use crate::error::{Error, Result};
use crate::functional::{jensen_gap, monotonicity_margin, operator_jensen_margin, ScalarFunction};
use crate::linops::{eigvals, identity_kron, HermitianMatrix};
use crate::scalar::C;
use crate::smooth::{
    alpha_smoothing_bound, constructive_hmin_lower, epsilon_of_lambda, lambda_for_epsilon,
    smooth_state,
};
use crate::state::{
    apply_channel, apply_isometry, random_channel, random_density_dims, random_isometry,
    random_pure, random_unitary, tensor_power, DensityOperator,
};

type State = DensityOperator<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `H_min <= H <= H_max`.
    Ordering,
    /// `H_α(ρ|σ)` non-increasing in α.
    AlphaMonotone,
    /// `H_α(ρ⊗ρ|σ⊗σ) = 2 H_α(ρ|σ)`.
    Additivity,
    /// Local isometries leave the entropies unchanged.
    Isometry,
    /// Channels on B cannot decrease `H_α(A|B)`; strong subadditivity.
    DataProcessing,
    /// `H_α(A|B) = -H_{2-α}(A|C)` on pure tripartite states.
    Duality,
    /// `H_max(A|B)_ρ >= H_{1/2}(A|B)_{ρ|σ}`.
    HalfBound,
    /// Scalar Jensen inequality for convex functions.
    Jensen,
    /// Operator Jensen inequality for operator convex/concave functions.
    OpJensen,
    /// `S_f` monotone under channels.
    SFMonotone,
    /// Invariants of the smoothed state.
    Smoothing,
    /// Constructive smooth min-entropy against `H_α - log(2/ε²)/(α-1)`.
    SmoothingBound,
    /// `H_α >= H - 4(α-1)(log η)²` inside the admissible window.
    AlphaBound,
    /// The finite-n chain on explicit tensor powers.
    FiniteN,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Ordering,
        Suite::AlphaMonotone,
        Suite::Additivity,
        Suite::Isometry,
        Suite::DataProcessing,
        Suite::Duality,
        Suite::HalfBound,
        Suite::Jensen,
        Suite::OpJensen,
        Suite::SFMonotone,
        Suite::Smoothing,
        Suite::SmoothingBound,
        Suite::AlphaBound,
        Suite::FiniteN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ordering => "ordering",
            Suite::AlphaMonotone => "alpha-monotone",
            Suite::Additivity => "additivity",
            Suite::Isometry => "isometry",
            Suite::DataProcessing => "data-processing",
            Suite::Duality => "duality",
            Suite::HalfBound => "half-bound",
            Suite::Jensen => "jensen",
            Suite::OpJensen => "op-jensen",
            Suite::SFMonotone => "s-f-monotone",
            Suite::Smoothing => "smoothing",
            Suite::SmoothingBound => "smoothing-bound",
            Suite::AlphaBound => "alpha-bound",
            Suite::FiniteN => "finite-n",
        }
    }

    /// Alternative names accepted by [`FromStr`].
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            Suite::SmoothingBound => &["theorem2"],
            Suite::AlphaBound => &["lemma-iv"],
            Suite::FiniteN => &["theorem3"],
            _ => &[],
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Ordering => "H_min <= H <= H_max (optimizer-backed)",
            Suite::AlphaMonotone => "H_alpha non-increasing in alpha",
            Suite::Additivity => "H_alpha additive under tensor products",
            Suite::Isometry => "entropies invariant under local isometries",
            Suite::DataProcessing => {
                "channels on B do not decrease H_alpha(A|B); strong subadditivity"
            }
            Suite::Duality => "H_alpha(A|B) = -H_{2-alpha}(A|C) for pure ABC",
            Suite::HalfBound => "H_max >= H_1/2 relative to any sigma (optimizer-backed)",
            Suite::Jensen => "scalar Jensen inequality",
            Suite::OpJensen => "operator Jensen inequality",
            Suite::SFMonotone => "S_f monotone under channels",
            Suite::Smoothing => "smoothed-state invariants and lambda/epsilon round trip",
            Suite::SmoothingBound => {
                "constructive smooth H_min >= H_alpha - log(2/eps^2)/(alpha-1)"
            }
            Suite::AlphaBound => "H_alpha >= H - 4(alpha-1)(log eta)^2 inside the window",
            Suite::FiniteN => "finite-n chain on tensor powers",
        }
    }

    /// 1e-7 for equalities, 1e-5 where an optimizer is involved, 1e-6 where
    /// smoothing slack is part of the statement.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Ordering | Suite::HalfBound => 1e-5,
            Suite::Smoothing | Suite::FiniteN => 1e-6,
            _ => 1e-7,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s || suite.aliases().contains(&s))
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    /// `(d_A, d_B)` pairs, cycled over the trials.
    pub dims: Vec<(usize, usize)>,
    pub tolerance: f64,
}

impl SuiteConfig {
    pub const DEFAULT_DIMS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            trials: 200,
            seed: 0,
            dims: Self::DEFAULT_DIMS.to_vec(),
            tolerance: suite.default_tolerance(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::Parameter(format!(
                "tolerance must be positive and finite, got {}; floating point never reproduces an equality exactly",
                self.tolerance
            )));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(Error::Parameter(format!("invalid dims {:?}", self.dims)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub seed: u64,
    pub dims: (usize, usize),
    /// `None` for a trial that errored.
    pub margin: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Smallest finite margin over all trials.
    pub worst_margin: Option<f64>,
    pub worst_seed: Option<u64>,
    pub worst_detail: Option<String>,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "suite {}: {verdict} ({} trials, seed {}, tolerance {:e})",
            self.suite, self.trials, self.seed, self.tolerance
        )?;
        match (self.worst_margin, self.worst_seed) {
            (Some(m), Some(s)) => writeln!(
                f,
                "worst margin {m:.6e} at seed {s}: {}",
                self.worst_detail.as_deref().unwrap_or("")
            )?,
            _ => writeln!(f, "worst margin: none finite")?,
        }
        writeln!(f, "violations: {}", self.violations.len())?;
        for v in &self.violations {
            let margin = v
                .margin
                .map_or_else(|| "error".to_string(), |m| format!("{m:.6e}"));
            writeln!(
                f,
                "  trial {} seed {} dims {:?}: margin {margin}: {}",
                v.trial, v.seed, v.dims, v.detail
            )?;
        }
        Ok(())
    }
}

/// Worst of the checks made within one trial.
#[derive(Clone, Debug, Default)]
struct Tally {
    margin: f64,
    detail: String,
    seen: bool,
}

impl Tally {
    fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            detail: String::new(),
            seen: false,
        }
    }

    fn check(&mut self, label: impl FnOnce() -> String, margin: f64) {
        if !self.seen || margin < self.margin || margin.is_nan() {
            self.margin = margin;
            self.detail = label();
            self.seen = true;
        }
    }

    fn equal(
        &mut self,
        label: impl FnOnce() -> String,
        a: EntropyValue<f64>,
        b: EntropyValue<f64>,
    ) {
        let m = match (a, b) {
            (EntropyValue::Finite(x), EntropyValue::Finite(y)) => -(x - y).abs(),
            (EntropyValue::NegInfinity(_), EntropyValue::NegInfinity(_))
            | (EntropyValue::PosInfinity(_), EntropyValue::PosInfinity(_)) => 0.0,
            _ => f64::NEG_INFINITY,
        };
        self.check(label, m);
    }

    /// `a >= b` in the extended reals.
    fn geq(&mut self, label: impl FnOnce() -> String, a: EntropyValue<f64>, b: EntropyValue<f64>) {
        self.check(label, ext_margin(a, b));
    }
}

/// `a - b` with the extended-real conventions of [`EntropyValue::ge_with_slack`].
pub fn ext_margin(a: EntropyValue<f64>, b: EntropyValue<f64>) -> f64 {
    match (a, b) {
        (_, EntropyValue::NegInfinity(_)) | (EntropyValue::PosInfinity(_), _) => f64::INFINITY,
        (EntropyValue::NegInfinity(_), _) | (_, EntropyValue::PosInfinity(_)) => f64::NEG_INFINITY,
        (EntropyValue::Finite(x), EntropyValue::Finite(y)) => x - y,
    }
}

fn fin(x: f64) -> EntropyValue<f64> {
    EntropyValue::Finite(x)
}

/// Per-trial randomness.
struct Draw {
    rng: ChaCha8Rng,
    da: usize,
    db: usize,
}

impl Draw {
    fn seed(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn rank(&mut self, dim: usize) -> usize {
        self.rng.random_range(1..=dim)
    }

    /// Random `ρ_AB` of random rank.
    fn rho(&mut self) -> Result<State> {
        let d = self.da * self.db;
        let r = self.rank(d);
        let s = self.seed();
        random_density_dims(vec![self.da, self.db], r, s)
    }

    fn full_rho(&mut self) -> Result<State> {
        let s = self.seed();
        random_density_dims(vec![self.da, self.db], self.da * self.db, s)
    }

    /// Full-rank `σ_B`.
    fn sigma(&mut self) -> Result<State> {
        let s = self.seed();
        random_density_dims(vec![self.db], self.db, s)?.resplit(0)
    }

    /// `σ_B` of random rank.
    fn any_sigma(&mut self) -> Result<State> {
        let r = self.rank(self.db);
        let s = self.seed();
        random_density_dims(vec![self.db], r, s)?.resplit(0)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    /// `U diag(v) U^dag` with eigenvalues uniform in `[lo, hi]`.
    fn hermitian_in(&mut self, dim: usize, lo: f64, hi: f64) -> Result<HermitianMatrix<f64>> {
        let v: Vec<f64> = (0..dim).map(|_| self.uniform(lo, hi)).collect();
        let s = self.seed();
        let u = random_unitary::<f64>(dim, s)?;
        Ok(HermitianMatrix::diag(&v).conjugate_by(u.matrix()))
    }

    fn unit_vector(&mut self, dim: usize) -> Result<Vec<C<f64>>> {
        let s = self.seed();
        let u = random_unitary::<f64>(dim, s)?;
        Ok(u.matrix().col(0))
    }

    /// Random PSD matrix with eigenvalues spread over `[0, scale]`, sometimes rank deficient.
    fn psd(&mut self, dim: usize, scale: f64) -> Result<HermitianMatrix<f64>> {
        let r = self.rank(dim);
        let s = self.seed();
        Ok(random_density_dims::<f64>(vec![dim], r, s)?
            .matrix()
            .scale(scale * dim as f64))
    }
}

type TrialFn = fn(&mut Draw, f64) -> Result<Tally>;

fn trial_fn(suite: Suite) -> TrialFn {
    match suite {
        Suite::Ordering => ordering,
        Suite::AlphaMonotone => alpha_monotone,
        Suite::Additivity => additivity,
        Suite::Isometry => isometry,
        Suite::DataProcessing => data_processing,
        Suite::Duality => duality,
        Suite::HalfBound => half_bound,
        Suite::Jensen => jensen,
        Suite::OpJensen => op_jensen,
        Suite::SFMonotone => sf_monotone,
        Suite::Smoothing => smoothing,
        Suite::SmoothingBound => smoothing_bound,
        Suite::AlphaBound => alpha_bound,
        Suite::FiniteN => finite_n,
    }
}

/// Runs `config.trials` trials in parallel; the report does not depend on
/// scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let f = trial_fn(config.suite);
    let results: Vec<(usize, u64, (usize, usize), Result<Tally>)> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let (da, db) = config.dims[i % config.dims.len()];
            let mut draw = Draw {
                rng: ChaCha8Rng::seed_from_u64(seed),
                da,
                db,
            };
            (i, seed, (da, db), f(&mut draw, config.tolerance))
        })
        .collect();

    let mut report = SuiteReport {
        suite: config.suite,
        trials: config.trials,
        seed: config.seed,
        tolerance: config.tolerance,
        worst_margin: None,
        worst_seed: None,
        worst_detail: None,
        violations: Vec::new(),
    };
    for (trial, seed, dims, outcome) in results {
        match outcome {
            Ok(t) => {
                if t.margin.is_finite() && report.worst_margin.is_none_or(|w| t.margin < w) {
                    report.worst_margin = Some(t.margin);
                    report.worst_seed = Some(seed);
                    report.worst_detail = Some(t.detail.clone());
                }
                if !(t.margin >= -config.tolerance) {
                    report.violations.push(Violation {
                        trial,
                        seed,
                        dims,
                        margin: Some(t.margin),
                        detail: t.detail,
                    });
                }
            }
            Err(e) => report.violations.push(Violation {
                trial,
                seed,
                dims,
                margin: None,
                detail: e.to_string(),
            }),
        }
    }
    Ok(report)
}

fn ordering(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let h = h_vn_cond(&rho)?;
    let lo = h_min(&rho)?;
    let hi = h_max(&rho)?;
    let mut t = Tally::new();
    t.check(
        || format!("H - H_min (H = {h:.9}, H_min = {lo:.9})"),
        h - lo,
    );
    t.check(
        || format!("H_max - H (H = {h:.9}, H_max = {hi:.9})"),
        hi - h,
    );
    Ok(t)
}

const ALPHA_GRID: [f64; 10] = [0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 3.0, 5.0];

fn alpha_value(rho: &State, sigma: &State, alpha: f64) -> Result<EntropyValue<f64>> {
    if alpha == 1.0 {
        h_vn_rel(rho, sigma)
    } else {
        h_alpha_rel(rho, sigma, alpha)
    }
}

fn alpha_monotone(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.any_sigma()?;
    let mut grid: Vec<f64> = ALPHA_GRID.to_vec();
    grid.insert(5, 1.0);
    let values: Vec<EntropyValue<f64>> = grid
        .iter()
        .map(|&a| alpha_value(&rho, &sigma, a))
        .collect::<Result<_>>()?;
    let mut t = Tally::new();
    for k in 0..grid.len() - 1 {
        let (a, b) = (grid[k], grid[k + 1]);
        let (va, vb) = (values[k], values[k + 1]);
        t.geq(|| format!("H_{a} - H_{b} ({va:.9} vs {vb:.9})"), va, vb);
    }
    Ok(t)
}

fn additivity(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.any_sigma()?;
    let rho2 = tensor_power(&rho, 2)?;
    let sigma2 = tensor_power(&sigma, 2)?;
    let mut t = Tally::new();
    for alpha in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let one = alpha_value(&rho, &sigma, alpha)?;
        let two = alpha_value(&rho2, &sigma2, alpha)?;
        t.equal(
            || format!("H_{alpha}(rho^2) - 2 H_{alpha}(rho) ({two:.9} vs 2 x {one:.9})"),
            two,
            one.scale(2.0),
        );
    }
    let one = h_min_rel(&rho, &sigma)?;
    let two = h_min_rel(&rho2, &sigma2)?;
    t.equal(
        || format!("H_min(rho^2) - 2 H_min(rho) ({two:.9} vs 2 x {one:.9})"),
        two,
        one.scale(2.0),
    );
    Ok(t)
}

fn isometry(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.any_sigma()?;
    let (da, db) = (d.da, d.db);
    let ea = da + d.rng.random_range(0..=2);
    let eb = db + d.rng.random_range(0..=2);
    let (sa, sb) = (d.seed(), d.seed());
    let va = random_isometry::<f64>(da, ea, sa)?;
    let vb = random_isometry::<f64>(db, eb, sb)?;
    let rho_v = apply_isometry(&apply_isometry(&rho, &va, 0)?, &vb, 1)?;
    let sigma_v = apply_isometry(&sigma, &vb, 0)?;
    let mut t = Tally::new();
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let a = alpha_value(&rho, &sigma, alpha)?;
        let b = alpha_value(&rho_v, &sigma_v, alpha)?;
        t.equal(
            || format!("H_{alpha} before/after ({a:.9} vs {b:.9})"),
            a,
            b,
        );
    }
    let a = h_min_rel(&rho, &sigma)?;
    let b = h_min_rel(&rho_v, &sigma_v)?;
    t.equal(|| format!("H_min before/after ({a:.9} vs {b:.9})"), a, b);
    Ok(t)
}

fn data_processing(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.any_sigma()?;
    let db = d.db;
    let dout = d.rng.random_range(1..=db + 1);
    let kmin = db.div_ceil(dout);
    let k = d.rng.random_range(kmin..=kmin + 2);
    let s = d.seed();
    let ch = random_channel::<f64>(db, dout, k, s)?;
    let rho_e = apply_channel(&rho, &ch, 1)?;
    let sigma_e = apply_channel(&sigma, &ch, 0)?;
    let mut t = Tally::new();
    for alpha in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let before = alpha_value(&rho, &sigma, alpha)?;
        let after = alpha_value(&rho_e, &sigma_e, alpha)?;
        t.geq(
            || format!("H_{alpha} after - before ({after:.9} vs {before:.9})"),
            after,
            before,
        );
    }
    // H(A|BC) <= H(A|B)
    let dc = d.rng.random_range(2..=3);
    let r = d.rank(d.da * db * dc);
    let s = d.seed();
    let abc = random_density_dims::<f64>(vec![d.da, db, dc], r, s)?;
    let h_bc = h_vn_cond(&abc)?;
    let h_b = h_vn_cond(&abc.marginal(&[0, 1])?)?;
    t.check(
        || format!("H(A|B) - H(A|BC) ({h_b:.9} vs {h_bc:.9})"),
        h_b - h_bc,
    );
    Ok(t)
}

fn duality(d: &mut Draw, _: f64) -> Result<Tally> {
    let dc = d.rng.random_range(2..=d.da * d.db);
    let s = d.seed();
    let abc = random_pure::<f64>(vec![d.da, d.db, dc], s)?;
    let ab = abc.marginal(&[0, 1])?;
    let ac = abc.marginal(&[0, 2])?;
    let (b, c) = (ab.marginal_b()?, ac.marginal_b()?);
    let mut t = Tally::new();
    for alpha in [0.25, 0.75, 1.0, 1.25, 1.75] {
        let x = alpha_value(&ab, &b, alpha)?;
        let y = alpha_value(&ac, &c, 2.0 - alpha)?;
        t.equal(
            || format!("H_{alpha}(A|B) + H_{}(A|C) ({x:.9} + {y:.9})", 2.0 - alpha),
            x,
            y.neg(),
        );
    }
    Ok(t)
}

fn half_bound(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let hm = h_max(&rho)?;
    let mut t = Tally::new();
    for j in 0..50 {
        let sigma = if j == 0 {
            rho.marginal_b()?
        } else {
            d.any_sigma()?
        };
        let half = h_alpha_rel(&rho, &sigma, 0.5)?;
        t.geq(
            || format!("H_max - H_1/2 (sigma {j}: {hm:.9} vs {half:.9})"),
            fin(hm),
            half,
        );
    }
    Ok(t)
}

fn jensen(d: &mut Draw, _: f64) -> Result<Tally> {
    let dim = d.rng.random_range(2..=4);
    let mut t = Tally::new();
    let x = d.hermitian_in(dim, -3.0, 3.0)?;
    let phi = d.unit_vector(dim)?;
    let g = jensen_gap(|v: f64| v * v, (-3.0, 3.0), &x, &phi)?;
    t.check(|| "t^2".into(), g);

    let beta = d.uniform(1.0, 2.0);
    let x = d.hermitian_in(dim, 0.05, 20.0)?;
    let phi = d.unit_vector(dim)?;
    let g = jensen_gap(
        move |v: f64| (beta * v.ln()).cosh() - 1.0,
        (0.05, 20.0),
        &x,
        &phi,
    )?;
    t.check(|| format!("cosh({beta:.4} ln t) - 1"), g);

    // -2(cosh(β ln t) - 1) is convex on [3, ∞) for β <= 1/2.
    let beta = d.uniform(0.01, 0.5);
    let x = d.hermitian_in(dim, 3.0, 50.0)?;
    let phi = d.unit_vector(dim)?;
    let g = jensen_gap(
        move |v: f64| -2.0 * ((beta * v.ln()).cosh() - 1.0),
        (3.0, 50.0),
        &x,
        &phi,
    )?;
    t.check(|| format!("-2(cosh({beta:.4} ln t) - 1) on [3, 50]"), g);
    Ok(t)
}

fn operator_functions() -> Vec<ScalarFunction<f64>> {
    vec![
        ScalarFunction::power(2.0).expect("valid power"),
        ScalarFunction::power(1.5).expect("valid power"),
        ScalarFunction::power(0.5).expect("valid power"),
        ScalarFunction::x_log_x(),
        ScalarFunction::neg_x_log_x(),
    ]
}

fn op_jensen(d: &mut Draw, _: f64) -> Result<Tally> {
    let din = d.rng.random_range(1..=3);
    let dout = din + d.rng.random_range(0..=2);
    let s = d.seed();
    let nu = random_isometry::<f64>(din, dout, s)?;
    let mut t = Tally::new();
    // Rank-deficient C for functions with bounded slope at 0, spectrum away from 0 for all.
    let singular = d.psd(dout, 2.0)?;
    let regular = d.hermitian_in(dout, 0.05, 2.0)?;
    for f in operator_functions() {
        let m = operator_jensen_margin(&f, &nu, &regular)?;
        t.check(|| format!("{} ({din} -> {dout})", f.name()), m);
        if f.name() == "t^2" || f.name() == "t^1.5" || f.name() == "t log t" {
            let m = operator_jensen_margin(&f, &nu, &singular)?;
            t.check(|| format!("{} ({din} -> {dout}, singular C)", f.name()), m);
        }
    }
    Ok(t)
}

fn sf_monotone(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.any_sigma()?;
    let a = rho.matrix().clone();
    let b = identity_kron(d.da, sigma.matrix());
    let dim = a.dim();
    let dout = d.rng.random_range(1..=dim + 1);
    let kmin = dim.div_ceil(dout);
    let k = d.rng.random_range(kmin..=kmin + 1);
    let s = d.seed();
    let ch = random_channel::<f64>(dim, dout, k, s)?;
    let mut t = Tally::new();
    for f in operator_functions() {
        let m = monotonicity_margin(&a, &b, &ch, &f)?;
        t.geq(
            || format!("{} ({dim} -> {dout}, {k} Kraus): {m:.9}", f.name()),
            m,
            fin(0.0),
        );
    }
    Ok(t)
}

fn smoothing(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.sigma()?;
    let top = 2f64.powf(-h_min_rel(&rho, &sigma)?.expect_finite("full-rank sigma"));
    let lambda = top * d.uniform(0.02, 1.0);
    let r = smooth_state(&rho, &sigma, lambda)?;
    let mut t = Tally::new();
    let eps = r.epsilon_achieved;
    let c = r.purified_distance;
    t.check(
        || format!("eps - C(rho, rho~) ({eps:.9} vs {c:.9})"),
        eps - c,
    );
    let hm = r.hmin_of_smoothed;
    t.geq(
        || format!("H_min(rho~) + log lambda ({hm:.9}, lambda {lambda:.9})"),
        hm,
        fin(-lambda.log2()),
    );
    let tr = r.smoothed_state.trace();
    t.check(|| format!("1 - tr rho~ ({tr:.12})"), 1.0 - tr);
    let g = r.g_norm;
    t.check(|| format!("1 - ||G|| ({g:.12})"), 1.0 - g);
    let gap = identity_kron(d.da, sigma.matrix())
        .scale(lambda)
        .sub(r.smoothed_state.matrix());
    let low = eigvals(&gap)?[0];
    t.check(|| format!("lambda_min(Lambda - rho~) = {low:.3e}"), low);
    if eps > 1e-6 {
        let back = lambda_for_epsilon(&rho, &sigma, eps)?;
        let rel = (back - lambda).abs() / lambda.max(1.0);
        t.check(
            || format!("lambda round trip ({lambda:.12} -> {back:.12})"),
            -rel,
        );
    }
    let e0 = epsilon_of_lambda(&rho, &sigma, 0.0)?;
    t.check(|| format!("eps(0) = {e0:.12}"), -(e0 - 2f64.sqrt()).abs());
    let e_top = epsilon_of_lambda(&rho, &sigma, top)?;
    t.check(|| format!("eps(2^-H_min) = {e_top:.3e}"), -e_top);
    Ok(t)
}

fn smoothing_bound(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.sigma()?;
    let mut t = Tally::new();
    for eps in [0.3, 0.7, 1.0] {
        let lower = constructive_hmin_lower(&rho, &sigma, eps)?;
        for alpha in [1.25, 1.5, 2.0] {
            let rhs = alpha_smoothing_bound(&rho, &sigma, eps, alpha)?;
            t.geq(
                || format!("eps {eps}, alpha {alpha}: {lower:.9} vs {rhs:.9}"),
                lower,
                rhs,
            );
        }
    }
    Ok(t)
}

fn alpha_bound(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.rho()?;
    let sigma = d.sigma()?;
    let eta = crate::entropy::upsilon(&rho, &sigma)?
        .eta
        .expect_finite("full-rank sigma");
    let (lo, hi) = alpha_window(eta)?;
    let alpha = lo + (hi - lo) * d.uniform(1e-6, 1.0 - 1e-6);
    let bound = alpha_lower_bound(&rho, &sigma, alpha)?.value;
    let h = h_alpha_rel(&rho, &sigma, alpha)?;
    let mut t = Tally::new();
    t.geq(
        || format!("alpha {alpha:.6} (window < {hi:.6}): {h:.9} vs {bound:.9}"),
        h,
        bound,
    );
    Ok(t)
}

const FINITE_N_EPS: [f64; 3] = [0.7, 0.9, 1.2];

fn finite_n(d: &mut Draw, _: f64) -> Result<Tally> {
    let rho = d.full_rho()?;
    let sigma = rho.marginal_b()?;
    let config = FiniteNConfig::default();
    let dim = d.da * d.db;
    let mut n_max = 1;
    while dim.pow(n_max as u32 + 1) <= config.witness_dim_cap {
        n_max += 1;
    }
    let n = d.rng.random_range(1..=n_max);
    let eps = FINITE_N_EPS[d.rng.random_range(0..FINITE_N_EPS.len())];
    let r = verify_finite_n_with(&rho, &sigma, eps, n, &config)?;
    let mut t = Tally::new();
    let tag = format!("n {n}, eps {eps}, alpha {:.6} ({:?})", r.alpha, r.branch);
    let add = r.additivity_error / n as f64;
    t.check(
        || format!("{tag}: additivity error per copy {add:.3e}"),
        -add,
    );
    let alpha_floor = r.row.h_vn - 4.0 * (r.alpha - 1.0) * r.row.eta.log2().powi(2);
    t.check(
        || {
            format!(
                "{tag}: single-copy H_alpha {:.9} vs {alpha_floor:.9}",
                r.h_alpha_single
            )
        },
        r.h_alpha_single - alpha_floor,
    );
    t.check(
        || {
            format!(
                "{tag}: per-copy constructive {:.9} vs {:.9}",
                r.per_copy_lower, r.per_copy_rhs
            )
        },
        r.per_copy_lower - r.per_copy_rhs,
    );
    if r.row.valid {
        t.check(
            || {
                format!(
                    "{tag}: per-copy constructive {:.9} vs bound {:.9}",
                    r.per_copy_lower, r.row.bound
                )
            },
            r.per_copy_lower - r.row.bound,
        );
    }
    if let Some(w) = r.witness {
        t.check(
            || format!("{tag}: witness eps - C {:.3e}", eps - w.purified_distance),
            eps - w.purified_distance,
        );
        t.check(
            || format!("{tag}: witness H_min margin {:.3e}", w.hmin_margin),
            w.hmin_margin,
        );
    }
    Ok(t)
}
