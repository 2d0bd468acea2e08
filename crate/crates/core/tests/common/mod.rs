//! Reference computations that share no code with the library: a cyclic
//! Jacobi eigensolver on the real embedding `[[Re H, -Im H], [Im H, Re H]]`
//! and index-loop partial traces.
#![allow(dead_code)]

use num_complex::Complex64;
use qaep::{DensityOperator, HermitianMatrix};

pub type Dense = Vec<Vec<Complex64>>;

pub fn dense(h: &HermitianMatrix) -> Dense {
    let n = h.dim();
    (0..n)
        .map(|i| (0..n).map(|j| h.get(i, j)).collect())
        .collect()
}

pub fn from_dense(d: &Dense) -> HermitianMatrix {
    let n = d.len();
    let m = qaep::Matrix::from_fn(n, n, |i, j| d[i][j]);
    HermitianMatrix::new(m).expect("square")
}

/// Cyclic Jacobi on a real symmetric matrix: `(values, columns of Q)`.
pub fn jacobi_real(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                if a[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akr) = (a[k][p], a[k][r]);
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let (apk, ark) = (a[p][k], a[r][k]);
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
                for row in q.iter_mut() {
                    let (qp, qr) = (row[p], row[r]);
                    row[p] = c * qp - s * qr;
                    row[r] = s * qp + c * qr;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), q)
}

fn embed(d: &Dense) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = d[i][j];
            m[i][j] = z.re;
            m[i][j + n] = -z.im;
            m[i + n][j] = z.im;
            m[i + n][j + n] = z.re;
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvals(d: &Dense) -> Vec<f64> {
    let (mut v, _) = jacobi_real(embed(d));
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}

/// `f(H)` from `f` of the real embedding.
pub fn func(d: &Dense, f: impl Fn(f64) -> f64) -> Dense {
    let n = d.len();
    let (v, q) = jacobi_real(embed(d));
    let fv: Vec<f64> = v.iter().map(|&x| f(x)).collect();
    let entry = |i: usize, j: usize| -> f64 { (0..2 * n).map(|k| q[i][k] * fv[k] * q[j][k]).sum() };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(entry(i, j), entry(i + n, j)))
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn trace(a: &Dense) -> Complex64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    (0..n * m)
        .map(|i| {
            (0..n * m)
                .map(|j| a[i / m][j / m] * b[i % m][j % m])
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// `tr_A` of an operator on `C^da ⊗ C^db`.
pub fn trace_a(d: &Dense, da: usize, db: usize) -> Dense {
    (0..db)
        .map(|i| {
            (0..db)
                .map(|j| (0..da).map(|a| d[a * db + i][a * db + j]).sum())
                .collect()
        })
        .collect()
}

/// `tr_B` of an operator on `C^da ⊗ C^db`.
pub fn trace_b(d: &Dense, da: usize, db: usize) -> Dense {
    (0..da)
        .map(|i| {
            (0..da)
                .map(|j| (0..db).map(|b| d[i * db + b][j * db + b]).sum())
                .collect()
        })
        .collect()
}

pub fn entropy(d: &Dense) -> f64 {
    eigvals(d)
        .into_iter()
        .filter(|&v| v > 1e-14)
        .map(|v| -v * v.log2())
        .sum()
}

/// `H(AB) - H(B)`.
pub fn cond_entropy(rho: &DensityOperator) -> f64 {
    let d = dense(rho.matrix());
    let (da, db) = (rho.dim_a(), rho.dim_b());
    entropy(&d) - entropy(&trace_a(&d, da, db))
}

/// `(1/(1-α)) log tr(ρ^α (1 ⊗ σ)^{1-α})` for full-rank `σ`.
pub fn h_alpha(rho: &DensityOperator, sigma: &DensityOperator, alpha: f64) -> f64 {
    let r = func(&dense(rho.matrix()), |v| {
        if v > 1e-15 {
            v.powf(alpha)
        } else {
            0.0
        }
    });
    let s = func(&dense(sigma.matrix()), |v| v.powf(1.0 - alpha));
    let big = kron(&identity(rho.dim_a()), &s);
    trace(&matmul(&r, &big)).re.log2() / (1.0 - alpha)
}

/// `-log λ_max((1 ⊗ σ)^{-1/2} ρ (1 ⊗ σ)^{-1/2})` for full-rank `σ`.
pub fn h_min_rel(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    let s = func(&dense(sigma.matrix()), |v| 1.0 / v.sqrt());
    let big = kron(&identity(rho.dim_a()), &s);
    let m = matmul(&matmul(&big, &dense(rho.matrix())), &big);
    -eigvals(&m).last().copied().expect("non-empty").log2()
}

/// `tr|√ρ √σ|` as `tr sqrt(√ρ σ √ρ)`.
pub fn fidelity(rho: &Dense, sigma: &Dense) -> f64 {
    let r = func(rho, |v| v.max(0.0).sqrt());
    let m = matmul(&matmul(&r, sigma), &r);
    eigvals(&m).into_iter().map(|v| v.max(0.0).sqrt()).sum()
}

pub fn qubit_state(x: f64, y: f64, z: f64) -> DensityOperator {
    let m = qaep::Matrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Complex64::new((1.0 + z) / 2.0, 0.0),
        (1, 1) => Complex64::new((1.0 - z) / 2.0, 0.0),
        (0, 1) => Complex64::new(x / 2.0, -y / 2.0),
        _ => Complex64::new(x / 2.0, y / 2.0),
    });
    DensityOperator::with_split(HermitianMatrix::new(m).unwrap(), vec![2], 0).unwrap()
}
