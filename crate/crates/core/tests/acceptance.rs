//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qaep::aep::{delta_error, qep_bound_rel, verify_finite_n_grid, FiniteNConfig};
use qaep::entropy::{h_alpha_rel, h_inf_rel, h_min_rel, h_zero_rel, solve_hmin};
use qaep::functional::{s_f, ScalarFunction};
use qaep::linops::identity_kron;
use qaep::smooth::{alpha_smoothing_bound, constructive_hmin_lower, epsilon_of_lambda};
use qaep::state::{embed_classical, random_density_dims, tensor_power};
use qaep::verify::{run_suite, Suite, SuiteConfig, SuiteReport};
use qaep::{DensityOperator, EntropyValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn suite(
    suite: Suite,
    trials: usize,
    seed: u64,
    dims: &[(usize, usize)],
    tolerance: f64,
) -> SuiteReport {
    let mut config = SuiteConfig::new(suite);
    config.trials = trials;
    config.seed = seed;
    config.dims = dims.to_vec();
    config.tolerance = tolerance;
    run_suite(&config).expect("valid suite configuration")
}

fn summary(r: &SuiteReport) -> String {
    let worst = r
        .worst_margin
        .map_or("n/a".to_string(), |m| format!("{m:.3e}"));
    format!(
        "{} x{}: {} violations, worst margin {worst}",
        r.suite.name(),
        r.trials,
        r.violations.len()
    )
}

const SMALL: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = suite(
        Suite::Ordering,
        200,
        1,
        &[(2, 2), (2, 3), (3, 2), (3, 3)],
        1e-5,
    );
    let elapsed = start.elapsed();
    Outcome::new(
        r.passed() && elapsed < Duration::from_secs(60),
        format!("{}, {:.1} s", summary(&r), elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let reports: Vec<SuiteReport> = [Suite::AlphaMonotone, Suite::Additivity, Suite::Isometry]
        .iter()
        .map(|&s| suite(s, 200, 2, &SMALL, 1e-8))
        .collect();
    let pass = reports.iter().all(SuiteReport::passed);
    Outcome::new(
        pass,
        reports.iter().map(summary).collect::<Vec<_>>().join("; "),
    )
}

fn criterion_3() -> Outcome {
    // Each data-processing trial also checks H(A|B) >= H(A|BC) on a fresh tripartite state.
    let r = suite(Suite::DataProcessing, 200, 3, &SMALL, 1e-8);
    Outcome::new(
        r.passed(),
        format!("{} (incl. 200 strong subadditivity checks)", summary(&r)),
    )
}

fn criterion_4() -> Outcome {
    let r = suite(Suite::Duality, 200, 4, &SMALL, 1e-8);
    Outcome::new(r.passed(), summary(&r))
}

fn bloch(v: [f64; 3]) -> DensityOperator {
    common::qubit_state(v[0], v[1], v[2])
}

fn clamp_ball(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let max = 1.0 - 1e-9;
    if r > max {
        v.map(|x| x * max / r)
    } else {
        v
    }
}

fn hmin_at(rho: &DensityOperator, v: [f64; 3]) -> f64 {
    match h_min_rel(rho, &bloch(v)) {
        Ok(EntropyValue::Finite(x)) => x,
        _ => f64::NEG_INFINITY,
    }
}

/// Best `H_min(A|B)_{ρ|σ}` over `samples` uniform Bloch-ball σ, then a
/// shrinking-step pattern search from the best sample.
fn random_search_oracle(rho: &DensityOperator, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for _ in 0..samples {
        let v = loop {
            let v = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0f64),
            ];
            if v.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                break v;
            }
        };
        let h = hmin_at(rho, v);
        if h > best.0 {
            best = (h, v);
        }
    }
    let sampled = best.0;
    let mut step = 0.05;
    while step > 1e-10 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut v = best.1;
                v[axis] += sign * step;
                let v = clamp_ball(v);
                let h = hmin_at(rho, v);
                if h > best.0 {
                    best = (h, v);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    // Independent evaluation at the refined optimum.
    let refined = common::h_min_rel(rho, &bloch(best.1));
    (sampled, refined)
}

fn criterion_5() -> Outcome {
    let rows: Vec<(f64, f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let rho = random_density_dims::<f64>(vec![2, 2], 1 + (k as usize % 4), 500 + k)
                .expect("state");
            let solver = solve_hmin(&rho).expect("solver").value;
            let (sampled, refined) = random_search_oracle(&rho, 100_000, 900 + k);
            (solver, sampled, refined)
        })
        .collect();
    let mut worst_below = f64::NEG_INFINITY;
    let mut worst_above = f64::NEG_INFINITY;
    for &(s, o, r) in &rows {
        worst_below = worst_below.max(o - s).max(r - s);
        worst_above = worst_above.max(s - r);
    }
    let pass = worst_below <= 1e-4 && worst_above <= 1e-4;
    Outcome::new(
        pass,
        format!("20 states: max(oracle - solver) {worst_below:.3e}, max(solver - refined oracle) {worst_above:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let r = suite(Suite::Smoothing, 200, 6, &SMALL, 1e-6);
    // Endpoints at 1e-9 on an independent set of states.
    let mut worst = 0.0f64;
    for k in 0..200u64 {
        let (da, db) = SMALL[k as usize % SMALL.len()];
        let rho = random_density_dims::<f64>(vec![da, db], 1 + (k as usize % (da * db)), 6000 + k)
            .expect("state");
        let sigma = random_density_dims::<f64>(vec![db], db, 7000 + k)
            .expect("state")
            .resplit(0)
            .expect("split");
        let top = 2f64.powf(
            -h_min_rel(&rho, &sigma)
                .expect("h_min")
                .expect_finite("full-rank sigma"),
        );
        let e0 = epsilon_of_lambda(&rho, &sigma, 0.0).expect("eps(0)");
        let e_top = epsilon_of_lambda(&rho, &sigma, top).expect("eps(top)");
        worst = worst.max((e0 - 2f64.sqrt()).abs()).max(e_top.abs());
    }
    Outcome::new(
        r.passed() && worst <= 1e-9,
        format!("{}; endpoint error {worst:.3e}", summary(&r)),
    )
}

fn criterion_7() -> Outcome {
    let r = suite(Suite::SmoothingBound, 200, 7, &SMALL, 1e-12);
    Outcome::new(r.passed(), summary(&r))
}

fn criterion_8() -> Outcome {
    let r = suite(Suite::AlphaBound, 200, 8, &SMALL, 1e-7);
    Outcome::new(r.passed(), summary(&r))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let config = FiniteNConfig::default();
    let mut failures = Vec::new();
    let mut cells = 0;
    let mut worst_add = 0.0f64;
    let mut worst_bound = f64::INFINITY;
    for seed in [91u64, 92] {
        let rho = random_density_dims::<f64>(vec![2, 2], 4, seed).expect("state");
        let sigma = rho.marginal_b().expect("marginal");
        let reports =
            verify_finite_n_grid(&rho, &sigma, &[0.7, 0.9, 1.2], &[1, 2, 3, 4, 5], &config)
                .expect("grid");
        for r in &reports {
            cells += 1;
            let n = r.n as f64;
            worst_add = worst_add.max(r.additivity_error / n);
            let add_ok = r.additivity_error <= 1e-7 * n;
            let bound_ok = if r.row.valid {
                worst_bound = worst_bound.min(r.per_copy_lower - r.row.bound);
                r.per_copy_lower >= r.row.bound
            } else {
                true
            };
            if !(add_ok && bound_ok && r.passed()) {
                failures.push(format!("seed {seed} n {} eps {}", r.n, r.epsilon));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(600);
    Outcome::new(
        pass,
        format!(
            "{cells} cells, additivity error per copy <= {worst_add:.3e}, min(lower - bound) {worst_bound:.3e}, {:.0} s{}",
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!(", failed: {}", failures.join(", ")) }
        ),
    )
}

fn criterion_10() -> Outcome {
    let eps_list = [1.2, 0.9, 0.7, 0.5];
    let mixed = DensityOperator::maximally_mixed(vec![2, 2]);
    let random = random_density_dims::<f64>(vec![2, 2], 4, 1010).expect("state");
    let mut pass = true;
    let mut lines = Vec::new();
    for (name, rho) in [("I/4", &mixed), ("random", &random)] {
        let sigma = rho.marginal_b().expect("marginal");
        let powers: Vec<(DensityOperator, DensityOperator)> = (1..=4)
            .map(|n| {
                (
                    tensor_power(rho, n).expect("power"),
                    tensor_power(&sigma, n).expect("power"),
                )
            })
            .collect();
        let mut excess = Vec::new();
        for &eps in &eps_list {
            let mut c: f64 = f64::NEG_INFINITY;
            let mut previous_bound = f64::NEG_INFINITY;
            for (k, (rn, sn)) in powers.iter().enumerate() {
                let n = k + 1;
                let row = qep_bound_rel(rho, &sigma, eps, n).expect("row");
                let eta = row.eta;
                let delta = 4.0 * eta.log2() * (2.0 / (eps * eps)).log2().sqrt();
                pass &= (row.gap - delta / (n as f64).sqrt()).abs() <= 1e-12;
                pass &= (row.bound - (row.h_vn - row.gap)).abs() <= 1e-12;
                pass &= row.bound > previous_bound && row.bound < row.h_vn;
                previous_bound = row.bound;
                let lower = constructive_hmin_lower(rn, sn, eps)
                    .expect("lower")
                    .expect_finite("full-rank")
                    / n as f64;
                if name == "I/4" {
                    let exact = 1.0 - (1.0 - eps * eps / 2.0).log2() / n as f64;
                    pass &= (lower - exact).abs() <= 1e-9;
                }
                c = c.max(lower - row.h_vn);
            }
            excess.push(c);
        }
        pass &= excess.windows(2).all(|w| w[1] < w[0]);
        let table: Vec<String> = eps_list
            .iter()
            .zip(&excess)
            .map(|(e, c)| format!("c({e}) = {c:.6}"))
            .collect();
        lines.push(format!("{name}: {}", table.join(", ")));
    }
    Outcome::new(pass, lines.join("; "))
}

fn criterion_11() -> Outcome {
    let op = suite(Suite::OpJensen, 500, 11, &SMALL, 1e-8);
    let sf = suite(Suite::SFMonotone, 200, 11, &SMALL, 1e-8);
    // S_f(ρ, 1 ⊗ σ) with f = t^α against tr(ρ^α (1 ⊗ σ)^{1-α}) from the Jacobi reference.
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let (da, db) = SMALL[k as usize % SMALL.len()];
        let rho = random_density_dims::<f64>(vec![da, db], 1 + (k as usize % (da * db)), 1100 + k)
            .expect("state");
        let sigma = random_density_dims::<f64>(vec![db], db, 1200 + k)
            .expect("state")
            .resplit(0)
            .expect("split");
        for alpha in [1.25, 1.5, 2.0] {
            let f = ScalarFunction::power(alpha).expect("power");
            let v = s_f(rho.matrix(), &identity_kron(da, sigma.matrix()), &f)
                .expect("s_f")
                .expect_finite("full rank");
            let h = common::h_alpha(&rho, &sigma, alpha);
            let oracle = 2f64.powf((1.0 - alpha) * h);
            worst = worst.max((v - oracle).abs());
        }
    }
    Outcome::new(
        op.passed() && sf.passed() && worst <= 1e-9,
        format!(
            "{}; {}; S_f trace error {worst:.3e}",
            summary(&op),
            summary(&sf)
        ),
    )
}

fn criterion_12() -> Outcome {
    let p = [0.5, 0.25, 0.25];
    let rho = embed_classical(&p).expect("embedding");
    let trivial = rho.marginal_b().expect("marginal");
    let h2 = h_alpha_rel(&rho, &trivial, 2.0)
        .expect("H_2")
        .expect_finite("classical");
    let half = h_alpha_rel(&rho, &trivial, 0.5)
        .expect("H_1/2")
        .expect_finite("classical");
    let hinf = h_inf_rel(&rho, &trivial)
        .expect("H_inf")
        .expect_finite("classical");
    let h0 = h_zero_rel(&rho, &trivial)
        .expect("H_0")
        .expect_finite("classical");
    let classical_half = 2.0 * p.iter().map(|x: &f64| x.sqrt()).sum::<f64>().log2();
    let mut pass = (h2 - (8.0f64 / 3.0).log2()).abs() <= 1e-10
        && (half - classical_half).abs() <= 1e-10
        && (hinf - 1.0).abs() <= 1e-10
        && (h0 - 3f64.log2()).abs() <= 1e-10;

    // Classical smoothing bound and the finite-n chain at n = 4.
    for eps in [0.3, 0.7, 1.0] {
        let lower = constructive_hmin_lower(&rho, &trivial, eps).expect("lower");
        for alpha in [1.25, 1.5, 2.0] {
            let rhs = alpha_smoothing_bound(&rho, &trivial, eps, alpha).expect("rhs");
            pass &= lower.ge_with_slack(&rhs, 0.0);
        }
    }
    let reports = verify_finite_n_grid(
        &rho,
        &trivial,
        &[0.9],
        &[1, 2, 3, 4],
        &FiniteNConfig::default(),
    )
    .expect("classical chain");
    let (delta, n_min) = delta_error(0.9, reports[0].row.eta).expect("delta");
    let mut previous = f64::NEG_INFINITY;
    for r in &reports {
        pass &= r.passed();
        pass &= (r.row.h_vn - 1.5).abs() <= 1e-12;
        pass &= r.row.bound < 1.5 && r.row.bound > previous;
        previous = r.row.bound;
    }
    let last = reports.last().expect("n = 4");
    pass &= last.row.valid && last.per_copy_lower >= last.row.bound;
    Outcome::new(
        pass,
        format!(
            "H_2 = {h2:.12} (log 8/3 = {:.12}), n = 4 bound {:.6} < 1.5 (delta {delta:.4}, n_min {n_min:.3}), certified {:.6}",
            (8.0f64 / 3.0).log2(),
            last.row.bound,
            last.per_copy_lower
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("ordering H_min <= H <= H_max", criterion_1),
        (
            "alpha monotonicity, additivity, isometry invariance",
            criterion_2,
        ),
        ("data processing and strong subadditivity", criterion_3),
        ("alpha duality on pure tripartite states", criterion_4),
        ("min-entropy solver vs random-search oracle", criterion_5),
        ("smoothing construction", criterion_6),
        ("smooth min-entropy vs alpha-entropy bound", criterion_7),
        ("alpha-entropy lower bound in the window", criterion_8),
        ("finite-n chain on qubit-qubit states", criterion_9),
        ("convergence toward H(A|B)", criterion_10),
        ("operator Jensen and S_f monotonicity", criterion_11),
        ("classical reduction", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "{tag} criterion {:>2} {name} [{:.1} s]: {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
