//! Logistic regression by iteratively reweighted least squares.

use serde::{Deserialize, Serialize};

use super::linalg::{cholesky, cholesky_inverse, cholesky_solve, symmetric_eigenvalues};
use crate::disruption::DisruptionScore;
use crate::error::{Error, Result};
use crate::ids::PaperId;
use crate::scalar::Scalar;
use crate::teams::{Composition, TeamRecord};

pub const COLUMNS: [&str; 5] = [
    "intercept",
    "is_generalist_team",
    "team_size",
    "year_of_publication",
    "average_career_age",
];

/// Row-major design with a leading intercept column and a binary outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix<T> {
    pub columns: Vec<String>,
    x: Vec<T>,
    pub y: Vec<bool>,
    /// Source paper per row, empty for designs not built from a corpus.
    pub papers: Vec<PaperId>,
}

impl<T: Scalar> DesignMatrix<T> {
    /// `rows` exclude the intercept, which is prepended.
    pub fn from_rows(covariates: &[&str], rows: &[Vec<T>], y: Vec<bool>) -> Self {
        assert_eq!(rows.len(), y.len());
        let p = covariates.len() + 1;
        let mut x = Vec::with_capacity(rows.len() * p);
        for r in rows {
            assert_eq!(r.len(), covariates.len());
            x.push(T::one());
            x.extend_from_slice(r);
        }
        let mut columns = vec!["intercept".to_string()];
        columns.extend(covariates.iter().map(|s| s.to_string()));
        Self {
            columns,
            x,
            y,
            papers: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let p = self.p();
        &self.x[i * p..(i + 1) * p]
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&v| v).count()
    }
}

/// One row per multi-author generalist or specialist paper with a defined
/// disruption score; the outcome is its top-percentile flag.
pub fn build_design_matrix<T: Scalar, D>(
    records: &[TeamRecord],
    disruption: &[DisruptionScore<D>],
    top_flags: &[bool],
) -> Result<DesignMatrix<T>> {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut papers = Vec::new();
    for r in records {
        let i = r.paper.index();
        if !r.is_team() || !r.composition.is_pure() || !disruption[i].defined {
            continue;
        }
        rows.push(vec![
            T::of(if r.composition == Composition::Generalist { 1.0 } else { 0.0 }),
            T::of_usize(r.team_size),
            T::of(r.year as f64),
            T::of(r.mean_career_age),
        ]);
        y.push(top_flags[i]);
        papers.push(r.paper);
    }
    if rows.is_empty() {
        return Err(Error::NoPureTeams);
    }
    let mut m = DesignMatrix::from_rows(&COLUMNS[1..], &rows, y);
    m.papers = papers;
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult<T> {
    pub columns: Vec<String>,
    pub coef: Vec<T>,
    pub se: Vec<T>,
    pub odds_ratio: Vec<T>,
    pub z_stat: Vec<T>,
    pub p_value: Vec<T>,
    pub covariance: Vec<T>,
    pub n: usize,
    pub n_positive: usize,
    pub converged: bool,
    pub n_iter: usize,
    pub log_likelihood: T,
    /// Euclidean norm of the score vector at `coef`.
    pub score_norm: T,
    /// Log-likelihood after each iteration, starting from the zero vector.
    pub ll_trace: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub tolerance: f64,
    pub max_iter: usize,
    /// Coefficient norm (on standardized covariates) treated as divergence.
    pub separation_norm: f64,
    pub max_condition: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 50,
            separation_norm: 30.0,
            max_condition: 1e10,
        }
    }
}

fn softplus<T: Scalar>(eta: T) -> T {
    if eta > T::zero() {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn sigmoid<T: Scalar>(eta: T) -> T {
    if eta >= T::zero() {
        T::one() / (T::one() + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (T::one() + e)
    }
}

fn linear<T: Scalar>(row: &[T], beta: &[T]) -> T {
    row.iter().zip(beta).map(|(&x, &b)| x * b).sum()
}

/// Log-likelihood of `beta` on the design.
pub fn log_likelihood<T: Scalar>(x: &DesignMatrix<T>, beta: &[T]) -> T {
    (0..x.n())
        .map(|i| {
            let eta = linear(x.row(i), beta);
            let yi = if x.y[i] { eta } else { T::zero() };
            yi - softplus(eta)
        })
        .sum()
}

/// Change in log-likelihood from moving `beta` by `dir`, summed per
/// observation so that steps far below the rounding level of the total
/// keep their sign.
fn ll_gain<T: Scalar>(x: &DesignMatrix<T>, beta: &[T], dir: &[T]) -> T {
    (0..x.n())
        .map(|i| {
            let row = x.row(i);
            let eta = linear(row, beta);
            let d = linear(row, dir);
            let dsoft = if d.abs() <= T::one() {
                (sigmoid(eta) * d.exp_m1()).ln_1p()
            } else {
                softplus(eta + d) - softplus(eta)
            };
            (if x.y[i] { d } else { T::zero() }) - dsoft
        })
        .sum()
}

/// Gradient of the log-likelihood, `X'(y - p)`.
pub fn score<T: Scalar>(x: &DesignMatrix<T>, beta: &[T]) -> Vec<T> {
    let p = x.p();
    let mut g = vec![T::zero(); p];
    for i in 0..x.n() {
        let row = x.row(i);
        let r = (if x.y[i] { T::one() } else { T::zero() }) - sigmoid(linear(row, beta));
        for j in 0..p {
            g[j] = g[j] + row[j] * r;
        }
    }
    g
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&a| a * a).sum::<T>().sqrt()
}

/// Maximum-likelihood fit.
///
/// Non-intercept columns are centred and scaled internally and the results
/// mapped back, so coefficients and standard errors refer to the covariates
/// as given. Each Newton step is halved until the log-likelihood does not
/// decrease.
pub fn fit_logistic<T: Scalar>(x: &DesignMatrix<T>, opts: &FitOptions) -> Result<RegressionResult<T>> {
    let n = x.n();
    let p = x.p();
    let positives = x.positives();
    if positives == 0 || positives == n {
        return Err(Error::DegenerateOutcome { positives, n });
    }

    // standardized copy
    let nt = T::of_usize(n);
    let mut centre = vec![T::zero(); p];
    let mut scale = vec![T::one(); p];
    for j in 1..p {
        let m = (0..n).map(|i| x.row(i)[j]).sum::<T>() / nt;
        let v = (0..n).map(|i| (x.row(i)[j] - m) * (x.row(i)[j] - m)).sum::<T>() / nt;
        if !(v > T::zero()) {
            return Err(Error::Collinear { condition: f64::INFINITY });
        }
        centre[j] = m;
        scale[j] = v.sqrt();
    }
    let mut z = x.clone();
    for i in 0..n {
        for j in 1..p {
            z.x[i * p + j] = (x.x[i * p + j] - centre[j]) / scale[j];
        }
    }

    let info = |beta: &[T]| {
        let mut h = vec![T::zero(); p * p];
        for i in 0..n {
            let row = z.row(i);
            let pi = sigmoid(linear(row, beta));
            let w = pi * (T::one() - pi);
            for a in 0..p {
                let wa = w * row[a];
                for b in 0..=a {
                    h[a * p + b] = h[a * p + b] + wa * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                h[b * p + a] = h[a * p + b];
            }
        }
        h
    };

    let condition = condition_number(&info(&vec![T::zero(); p]), p);
    if !(condition <= opts.max_condition) {
        return Err(Error::Collinear { condition });
    }

    let to_original = |gamma: &[T]| {
        let mut beta = vec![T::zero(); p];
        beta[0] = gamma[0];
        for j in 1..p {
            beta[j] = gamma[j] / scale[j];
            beta[0] = beta[0] - gamma[j] * centre[j] / scale[j];
        }
        beta
    };

    let tol = T::of(opts.tolerance);
    let max_abs = x.x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = T::of(1e-6).max(T::of(10.0) * T::epsilon() * nt * max_abs);
    let mut gamma = vec![T::zero(); p];
    let mut ll = log_likelihood(&z, &gamma);
    let mut ll_trace = vec![ll];
    let mut converged = false;
    let mut iter = 0;
    let mut beta = to_original(&gamma);
    let mut score_norm = norm(&score(x, &beta));
    while iter < opts.max_iter {
        if score_norm < tol {
            converged = true;
            break;
        }
        iter += 1;
        let g = score(&z, &gamma);
        let h = info(&gamma);
        let l = cholesky(&h, p).ok_or(Error::Collinear { condition: f64::INFINITY })?;
        let delta = cholesky_solve(&l, p, &g);
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let dir: Vec<T> = delta.iter().map(|&d| step * d).collect();
            let gain = ll_gain(&z, &gamma, &dir);
            if gain >= T::zero() {
                let cand: Vec<T> = gamma.iter().zip(&dir).map(|(&a, &d)| a + d).collect();
                accepted = gain > T::zero() || cand != gamma;
                gamma = cand;
                ll = ll + gain;
                break;
            }
            step = step * T::of(0.5);
        }
        ll_trace.push(ll);
        let gn = norm(&gamma).to_f64().unwrap_or(f64::INFINITY);
        if !(gn <= opts.separation_norm) {
            return Err(Error::Separation { norm: gn, iter });
        }
        beta = to_original(&gamma);
        score_norm = norm(&score(x, &beta));
        let step_size = norm(&delta) * step;
        let stalled = !accepted || step_size <= T::epsilon().sqrt() * (T::one() + norm(&gamma));
        if score_norm < tol || (stalled && score_norm < floor) {
            converged = true;
            break;
        }
    }

    // covariance on original scale: A (Z'WZ)^-1 A'
    let h = info(&gamma);
    let l = cholesky(&h, p).ok_or(Error::Collinear { condition: f64::INFINITY })?;
    let cov_z = cholesky_inverse(&l, p);
    let mut a = vec![T::zero(); p * p];
    a[0] = T::one();
    for j in 1..p {
        a[j] = -centre[j] / scale[j];
        a[j * p + j] = T::one() / scale[j];
    }
    let mut tmp = vec![T::zero(); p * p];
    for i in 0..p {
        for j in 0..p {
            tmp[i * p + j] = (0..p).map(|k| a[i * p + k] * cov_z[k * p + j]).sum();
        }
    }
    let mut cov = vec![T::zero(); p * p];
    for i in 0..p {
        for j in 0..p {
            cov[i * p + j] = (0..p).map(|k| tmp[i * p + k] * a[j * p + k]).sum();
        }
    }
    let se: Vec<T> = (0..p).map(|j| cov[j * p + j].sqrt()).collect();
    let z_stat: Vec<T> = beta.iter().zip(&se).map(|(&b, &s)| b / s).collect();
    let p_value = z_stat.iter().map(|&zv| T::of(two_sided_p(zv.to_f64_lossy()))).collect();
    Ok(RegressionResult {
        columns: x.columns.clone(),
        odds_ratio: odds_ratios(&beta),
        coef: beta,
        se,
        z_stat,
        p_value,
        covariance: cov,
        n,
        n_positive: positives,
        converged,
        n_iter: iter,
        log_likelihood: log_likelihood(x, &to_original(&gamma)),
        score_norm,
        ll_trace,
    })
}

fn condition_number<T: Scalar>(h: &[T], p: usize) -> f64 {
    let mut c = h.to_vec();
    let d: Vec<T> = (0..p).map(|i| h[i * p + i].sqrt()).collect();
    for i in 0..p {
        for j in 0..p {
            c[i * p + j] = h[i * p + j] / (d[i] * d[j]);
        }
    }
    let ev = symmetric_eigenvalues(&c, p);
    let lo = ev[0].to_f64_lossy();
    let hi = ev[p - 1].to_f64_lossy();
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

pub fn odds_ratios<T: Scalar>(coef: &[T]) -> Vec<T> {
    coef.iter().map(|c| c.exp()).collect()
}

pub fn two_sided_p(z: f64) -> f64 {
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else {
        ""
    }
}
