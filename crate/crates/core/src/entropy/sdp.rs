//! `H_min(A|B)_rho = -log min { tr X : 1_A ⊗ X >= rho }`, solved with a
//! log-det barrier method and certified by a rescaled dual point.

use crate::error::{Error, Result};
use crate::linops::chol::Cholesky;
use crate::linops::{eig, eigvals, sandwich_trailing, support_threshold, HermitianMatrix, Matrix};
use crate::scalar::{log2, Scalar, C};
use crate::state::DensityOperator;

const NEWTON_CAP: usize = 10_000;
const CENTERING_CAP: usize = 100;
const BARRIER_GROWTH: f64 = 8.0;
/// Target relative duality gap, and the loosest gap accepted if the Newton
/// system degenerates before the target is met.
const GAP_TARGET: f64 = 1e-9;
const GAP_ACCEPT: f64 = 1e-7;

/// Optimal conditioning state and the certified bracket around `H_min`.
#[derive(Clone, Debug)]
pub struct HminSolution<T: Scalar> {
    /// `-log tr X` for the final primal-feasible `X` (a certified lower bound).
    pub value: T,
    /// `-log` of the dual objective (a certified upper bound).
    pub upper: T,
    /// `X / tr X`, on the full B space.
    pub sigma: DensityOperator<T>,
    pub newton_steps: usize,
}

pub fn solve_hmin<T: Scalar>(rho: &DensityOperator<T>) -> Result<HminSolution<T>> {
    let da = rho.dim_a();
    let db = rho.dim_b();
    let rho_b = rho.marginal_b()?;
    let bs = eig(rho_b.matrix())?;
    let cut = support_threshold(&bs.values, T::lit(T::SUPPORT_CUTOFF));
    let basis: Vec<usize> = (0..db)
        .filter(|&j| bs.values[j] > cut && bs.values[j] > T::zero())
        .collect();
    let r = basis.len();
    if r == 0 {
        return Err(Error::NotAState(
            "zero operator has no finite min-entropy".into(),
        ));
    }
    // P: db x r basis of supp(rho_B); rho' = (1 ⊗ P^dag) rho (1 ⊗ P)
    let p = Matrix::from_fn(db, r, |i, k| bs.vectors[(i, basis[k])]);
    let lift = Matrix::identity(da).kron(&p.adjoint());
    let reduced = rho.matrix().conjugate_by(&lift);
    let scale = *eigvals(&reduced)?.last().expect("non-empty");
    let reduced = reduced.scale(T::one() / scale);

    let mut solver = Barrier::new(reduced, da, r);
    let out = solver.run()?;
    let (x, primal, dual) = out;
    let value = -log2(primal * scale);
    let upper = -log2(dual * scale);
    // sigma* = P X P^dag / tr X
    let full = HermitianMatrix::symmetrized(p.matmul(x.as_matrix()).matmul(&p.adjoint()));
    let sigma_m = full.scale(T::one() / full.trace());
    let dims_b = rho.dims()[rho.split()..].to_vec();
    let dims_b = if dims_b.is_empty() { vec![1] } else { dims_b };
    let sigma = DensityOperator::with_split(sigma_m, dims_b, 0)?;
    Ok(HminSolution {
        value,
        upper,
        sigma,
        newton_steps: solver.steps,
    })
}

struct Barrier<T: Scalar> {
    rho: HermitianMatrix<T>,
    da: usize,
    r: usize,
    steps: usize,
}

struct Point<T: Scalar> {
    x: HermitianMatrix<T>,
    s_inv: Matrix<T>,
    ln_det: T,
}

impl<T: Scalar> Barrier<T> {
    fn new(rho: HermitianMatrix<T>, da: usize, r: usize) -> Self {
        Self {
            rho,
            da,
            r,
            steps: 0,
        }
    }

    fn slack(&self, x: &HermitianMatrix<T>) -> Option<Point<T>> {
        let s = HermitianMatrix::<T>::identity(self.da)
            .kron(x)
            .sub(&self.rho);
        let ch = Cholesky::new(s.as_matrix())?;
        Some(Point {
            x: x.clone(),
            s_inv: ch.inverse(),
            ln_det: ch.ln_det(),
        })
    }

    fn objective(&self, t: T, pt: &Point<T>) -> T {
        t * pt.x.trace() - pt.ln_det
    }

    /// Block `(a, a')` of a `da r x da r` matrix, as an `r x r` slice view.
    fn block(&self, m: &Matrix<T>, a: usize, b: usize, i: usize, j: usize) -> C<T> {
        m[(a * self.r + i, b * self.r + j)]
    }

    /// `tr_A M`.
    fn trace_a(&self, m: &Matrix<T>) -> Matrix<T> {
        let r = self.r;
        Matrix::from_fn(r, r, |i, j| {
            (0..self.da).map(|a| self.block(m, a, a, i, j)).sum()
        })
    }

    /// Newton direction for `t tr X - log det(1 ⊗ X - rho)`; returns the
    /// step and the squared Newton decrement.
    fn newton(&self, t: T, pt: &Point<T>) -> Option<(HermitianMatrix<T>, T)> {
        let r = self.r;
        let da = self.da;
        let ta = self.trace_a(&pt.s_inv);
        let mut g = Matrix::<T>::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                g[(i, j)] = -ta[(i, j)];
            }
            g[(i, i)] += C::new(t, T::zero());
        }
        // H[(i,j),(p,q)] = sum_{a,a'} T_{aa'}[i,p] T_{a'a}[q,j]
        let n = r * r;
        let mut h = Matrix::<T>::zeros(n, n);
        for a in 0..da {
            for b in 0..da {
                for i in 0..r {
                    for pp in 0..r {
                        let tip = self.block(&pt.s_inv, a, b, i, pp);
                        if tip.re == T::zero() && tip.im == T::zero() {
                            continue;
                        }
                        for q in 0..r {
                            for j in 0..r {
                                let tqj = self.block(&pt.s_inv, b, a, q, j);
                                h[(i * r + j, pp * r + q)] += tip * tqj;
                            }
                        }
                    }
                }
            }
        }
        let ch = Cholesky::new(&h)?;
        let rhs: Vec<C<T>> = g.as_slice().iter().map(|z| -*z).collect();
        let step = ch.solve(&rhs);
        let step = HermitianMatrix::symmetrized(Matrix::from_vec(r, r, step).ok()?);
        let dec: T = -(0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| (g[(i, j)] * step.get(j, i)).re)
            .sum::<T>();
        if !dec.is_finite() {
            return None;
        }
        Some((step, dec))
    }

    /// Rescaled dual point `Y' = (1 ⊗ K) Y (1 ⊗ K)`, `Y = S^{-1}/t`,
    /// `K = (tr_A Y)^{-1/2}`; returns `tr(rho Y')`.
    fn dual_value(&self, t: T, pt: &Point<T>) -> Option<T> {
        let y = HermitianMatrix::symmetrized(pt.s_inv.scale_real(T::one() / t));
        let z = HermitianMatrix::symmetrized(self.trace_a(y.as_matrix()));
        let zs = eig(&z).ok()?;
        if !(zs.min_value() > T::zero()) {
            return None;
        }
        let k = zs.reconstruct_with(|v| T::one() / v.sqrt());
        let yk = sandwich_trailing(&y, &k).ok()?;
        Some(self.rho.trace_product(&yk))
    }

    fn run(&mut self) -> Result<(HermitianMatrix<T>, T, T)> {
        let r = self.r;
        let m = T::lit((self.da * r) as f64);
        // rho is scaled to unit spectral norm, so X = 1.5 I is strictly feasible.
        let mut pt = self
            .slack(&HermitianMatrix::identity(r).scale(T::lit(1.5)))
            .expect("1.5 I is strictly feasible");
        let mut t = m / pt.x.trace();
        let target = T::tol(GAP_TARGET);
        let accept = T::tol(GAP_ACCEPT);
        let growth = T::lit(BARRIER_GROWTH);
        let mut best: Option<(HermitianMatrix<T>, T, T)> = None;
        loop {
            let centered = self.center(t, &mut pt)?;
            let primal = pt.x.trace();
            if let Some(dual) = self.dual_value(t, &pt) {
                let gap = (primal - dual) / primal;
                let better = best
                    .as_ref()
                    .is_none_or(|(_, p, d)| primal - dual < *p - *d);
                if better && dual > T::zero() {
                    best = Some((pt.x.clone(), primal, dual));
                }
                if gap <= target {
                    break;
                }
            }
            if !centered {
                break;
            }
            t *= growth;
        }
        match best {
            Some((x, p, d)) if (p - d) / p <= accept => Ok((x, p, d)),
            Some((_, p, _)) => Err(Error::OptimizerNoConvergence {
                message: format!("duality gap stalled after {} Newton steps", self.steps),
                best_bound: -p.log2().to_f64_lossy(),
            }),
            None => Err(Error::OptimizerNoConvergence {
                message: "no dual certificate".into(),
                best_bound: f64::NEG_INFINITY,
            }),
        }
    }

    /// Newton centering at fixed `t`. Returns `false` if the Newton system
    /// became numerically singular (the caller then stops increasing `t`).
    fn center(&mut self, t: T, pt: &mut Point<T>) -> Result<bool> {
        let quarter = T::lit(0.25);
        let tiny = T::tol(1e-8);
        let mut local = 0usize;
        loop {
            self.steps += 1;
            local += 1;
            if local > CENTERING_CAP {
                return Ok(false);
            }
            if self.steps > NEWTON_CAP {
                return Err(Error::OptimizerNoConvergence {
                    message: format!("Newton step cap {NEWTON_CAP} reached"),
                    best_bound: -pt.x.trace().log2().to_f64_lossy(),
                });
            }
            let Some((dir, dec)) = self.newton(t, pt) else {
                return Ok(false);
            };
            if dec * T::lit(0.5) <= tiny {
                return Ok(true);
            }
            let f0 = self.objective(t, pt);
            let mut s = T::one();
            let mut moved = false;
            for _ in 0..80 {
                let cand = pt.x.add(&dir.scale(s));
                if let Some(next) = self.slack(&cand) {
                    if self.objective(t, &next) <= f0 - quarter * s * dec {
                        *pt = next;
                        moved = true;
                        break;
                    }
                }
                s *= T::lit(0.5);
            }
            if !moved {
                // Objective differences drowned in rounding: as centered as it gets.
                return Ok(dec <= T::lit(1e-4));
            }
        }
    }
}
