use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qaep::aep::{convergence_table, qep_bound_rel};
use qaep::entropy::{
    h_alpha_rel, h_inf_rel, h_max, h_max_direct, h_min_rel, h_vn_rel, h_zero_rel, solve_hmin,
    upsilon,
};
use qaep::io::{rows_to_csv, state_from_json, state_to_json};
use qaep::smooth::{lambda_for_epsilon, smooth_state};
use qaep::verify::{run_suite, Suite, SuiteConfig};
use qaep::{DensityOperator, EntropyValue};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Math(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            CliError::Input(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<qaep::Error> for CliError {
    fn from(e: qaep::Error) -> Self {
        use qaep::Error as E;
        match e {
            E::Parse(_)
            | E::NotAState(_)
            | E::Shape(_)
            | E::Parameter(_)
            | E::Window { .. }
            | E::SizeCap { .. }
            | E::NotIsometry(_)
            | E::NotTracePreserving(_) => CliError::Input(e.to_string()),
            E::NoConvergence { .. }
            | E::OptimizerNoConvergence { .. }
            | E::Domain { .. }
            | E::Contract(_)
            | E::SupportViolation => CliError::Math(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_state(path: &Path, split: Option<usize>) -> Result<DensityOperator, CliError> {
    let rho: DensityOperator = state_from_json(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    match split {
        Some(s) => Ok(rho.resplit(s)?),
        None => Ok(rho),
    }
}

/// `marginal` selects `ρ_B`; anything else is a state file.
fn load_sigma(source: &str, rho: &DensityOperator) -> Result<DensityOperator, CliError> {
    if source == "marginal" {
        return Ok(rho.marginal_b()?);
    }
    let sigma = load_state(Path::new(source), None)?;
    rho.check_conditioning(&sigma)?;
    Ok(sigma)
}

fn ev(v: EntropyValue) -> Value {
    serde_json::to_value(v).expect("entropy values serialize")
}

fn num(x: f64) -> Value {
    ev(EntropyValue::Finite(x))
}

pub fn entropy(
    state: &Path,
    sigma: &str,
    alphas: &[f64],
    split: Option<usize>,
    as_json: bool,
) -> Outcome {
    let rho = load_state(state, split)?;
    let sigma = load_sigma(sigma, &rho)?;
    if !rho.normalized() {
        return Err(CliError::Input("entropy needs a normalized state".into()));
    }
    let h = h_vn_rel(&rho, &sigma)?;
    let hmin = solve_hmin(&rho)?;
    let hmin_rel = h_min_rel(&rho, &sigma)?;
    let hmax = h_max(&rho)?;
    let direct = h_max_direct(&rho)?;
    let mut alpha_rows = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let v = if a == 1.0 {
            h
        } else {
            h_alpha_rel(&rho, &sigma, a)?
        };
        alpha_rows.push((a, v));
    }
    let h0 = h_zero_rel(&rho, &sigma)?;
    let hinf = h_inf_rel(&rho, &sigma)?;
    let ups = upsilon(&rho, &sigma)?;

    if as_json {
        let mut alpha_map = Map::new();
        for (a, v) in &alpha_rows {
            alpha_map.insert(a.to_string(), ev(*v));
        }
        let report = json!({
            "dims": rho.dims(),
            "split": rho.split(),
            "h_vn": ev(h),
            "h_min": num(hmin.value),
            "h_min_upper": num(hmin.upper),
            "h_min_rel": ev(hmin_rel),
            "h_max": num(hmax),
            "h_max_direct": num(direct.value),
            "h_alpha": alpha_map,
            "h_zero": ev(h0),
            "h_inf": ev(hinf),
            "eta": ev(ups.eta),
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        println!("dims {:?}, A = first {} factor(s)", rho.dims(), rho.split());
        println!("H(A|B)          {h:.12}");
        println!(
            "H_min(A|B)      {:.12}  (dual bound {:.12})",
            hmin.value, hmin.upper
        );
        println!("H_min(A|B|s)    {hmin_rel:.12}");
        println!("H_max(A|B)      {hmax:.12}");
        println!("H_max direct    {:.12}", direct.value);
        for (a, v) in &alpha_rows {
            println!("H_{a:<13} {v:.12}");
        }
        println!("H_0             {h0:.12}");
        println!("H_inf           {hinf:.12}");
        println!("eta             {:.12}", ups.eta);
    }
    Ok(ExitCode::SUCCESS)
}

/// Accepts `2x2,2x3`, `[(2,2),(3,2)]` or a flat list of integers taken pairwise.
pub fn parse_dims(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    let numbers: Vec<usize> = text
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| CliError::Input(format!("dims '{text}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    if numbers.is_empty() || !numbers.len().is_multiple_of(2) || numbers.contains(&0) {
        return Err(CliError::Input(format!(
            "dims '{text}' must list positive (dA,dB) pairs"
        )));
    }
    Ok(numbers.chunks(2).map(|p| (p[0], p[1])).collect())
}

pub fn verify(
    suite: Suite,
    trials: usize,
    seed: u64,
    dims: &str,
    tol: Option<f64>,
    out: Option<&Path>,
    as_json: bool,
) -> Outcome {
    let mut config = SuiteConfig::new(suite);
    config.trials = trials;
    config.seed = seed;
    config.dims = parse_dims(dims)?;
    if let Some(t) = tol {
        config.tolerance = t;
    }
    let report = run_suite(&config)?;
    let text = if as_json {
        let mut s = serde_json::to_string_pretty(&report).expect("json");
        s.push('\n');
        s
    } else {
        report.to_string()
    };
    print!("{text}");
    if let Some(path) = out {
        write(path, &text)?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn aep(
    state: &Path,
    eps: &[f64],
    ns: &[usize],
    sigma: &str,
    split: Option<usize>,
    out: Option<&Path>,
) -> Outcome {
    let rho = load_state(state, split)?;
    let rows = if sigma == "marginal" {
        convergence_table(&rho, eps, ns)?
    } else {
        let sigma = load_sigma(sigma, &rho)?;
        let mut e: Vec<f64> = eps.to_vec();
        e.sort_by(f64::total_cmp);
        e.dedup();
        let mut n: Vec<usize> = ns.to_vec();
        n.sort_unstable();
        n.dedup();
        let mut rows = Vec::with_capacity(e.len() * n.len());
        for &x in &e {
            for &k in &n {
                rows.push(qep_bound_rel(&rho, &sigma, x, k)?);
            }
        }
        rows
    };
    let csv = rows_to_csv(&rows);
    match out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn smooth(state: &Path, sigma: &str, eps: f64, split: Option<usize>, out: &Path) -> Outcome {
    let rho = load_state(state, split)?;
    let sigma = load_sigma(sigma, &rho)?;
    let lambda = lambda_for_epsilon(&rho, &sigma, eps).map_err(|e| match e {
        qaep::Error::SupportViolation => CliError::Math(
            "supp(rho_B) is not contained in supp(sigma): the smooth min-entropy relative to sigma is -inf".into(),
        ),
        other => other.into(),
    })?;
    let r = smooth_state(&rho, &sigma, lambda)?;
    let meta = json!({
        "lambda": num(lambda),
        "epsilon": num(eps),
        "epsilon_achieved": num(r.epsilon_achieved),
        "purified_distance": num(r.purified_distance),
        "hmin_lower_bound": num(-lambda.log2()),
        "hmin_of_smoothed": ev(r.hmin_of_smoothed),
        "trace": num(r.smoothed_state.trace()),
        "g_norm": num(r.g_norm),
    });
    write(out, &(state_to_json(&r.smoothed_state) + "\n"))?;
    let meta_text = serde_json::to_string_pretty(&meta).expect("json") + "\n";
    write(&sidecar_path(out), &meta_text)?;
    println!(
        "lambda {lambda:.12}, certified H_min^eps >= {:.12}",
        -lambda.log2()
    );
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_formats() {
        assert_eq!(parse_dims("2x2,2x3").unwrap(), vec![(2, 2), (2, 3)]);
        assert_eq!(parse_dims("[(2,2),(3,2)]").unwrap(), vec![(2, 2), (3, 2)]);
        assert!(parse_dims("2x").is_err());
        assert!(parse_dims("0x2").is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/s.json")),
            PathBuf::from("/tmp/s.json.meta.json")
        );
    }
}
