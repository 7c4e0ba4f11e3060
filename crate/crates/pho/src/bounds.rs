//! Both sides of every eigenvalue-sum inequality, reported with explicit
//! slack and a verdict that folds in the solver's demonstrated numerical
//! error.
//!
//! Check catalogue (ids are the wire vocabulary used in reports):
//!
//! * `thm31`  - regularized sum against `chi_n / pi * integral q`, for
//!   certified non-negative integrable `q`;
//! * `thm41`  - same left side against
//!   `chi_n / pi * integral q + epsilon_n q_m / sqrt(pi)` for perturbations
//!   admitting a finite Gaussian offset `q_m`;
//! * `thm51`  - plain eigenvalue sums against the Hermite-coefficient form
//!   `sum_k (2^k (2k)!/k!) C(n+1, k+1) v_{2k} + (n+1)^2 / 2`;
//! * `cor53`  - the regularized rearrangement of `thm51` in terms of the
//!   perturbation coefficients `q_{2k}`;
//! * `power1`, `power1a`, `powerzeromean` - negative-power generalizations;
//! * `prop34` - constructive spike potential driving the regularized sum
//!   below any prescribed `-N`.
//!
//! Ritz eigenvalues over-estimate the true ones, which is the conservative
//! direction for every check here: a pass with solver output implies a pass
//! with the true spectrum (up to the reported tolerance).

use crate::potentials::{self, PotentialSpec};
use crate::sequences::SequenceTable;
use crate::solver::{self, EigenResult, SolverOptions};
use crate::special::log_gamma;
use crate::util::KahanSum;
use crate::{Error, Result};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    Thm31,
    Thm41,
    Thm51,
    Cor53,
    Power1,
    Power1a,
    PowerZeroMean,
    Prop34,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Thm31 => "thm31",
            Self::Thm41 => "thm41",
            Self::Thm51 => "thm51",
            Self::Cor53 => "cor53",
            Self::Power1 => "power1",
            Self::Power1a => "power1a",
            Self::PowerZeroMean => "powerzeromean",
            Self::Prop34 => "prop34",
        }
    }
}

/// Record of what produced a report: enough to reproduce the run.
#[derive(Debug, Clone)]
pub struct InputsDigest {
    pub potential: String,
    pub basis_size: usize,
    pub convergence_sum: f64,
    pub tolerance_floor: f64,
}

/// One checked inequality. `slack` is oriented so that `slack >= 0` means
/// the inequality holds; the verdict allows the demonstrated numerical
/// error: `verdict = (slack >= -tolerance)`.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub theorem: TheoremId,
    pub n: usize,
    pub s: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub inputs: InputsDigest,
}

/// `sum_{k=0}^{n} [lambda_k - (2k+1) - q_integral / (pi sqrt(2k+1))]`.
pub fn regularized_sum(lambdas: &[f64], q_integral: f64, n: usize) -> f64 {
    assert!(lambdas.len() > n, "need at least n+1 eigenvalues");
    let mut sum = KahanSum::new();
    for (k, &lam) in lambdas.iter().enumerate().take(n + 1) {
        let lam0 = (2 * k + 1) as f64;
        sum.add(lam - lam0 - q_integral / (PI * lam0.sqrt()));
    }
    sum.value()
}

/// A perturbation paired with solved eigenvalues and the cached sequence
/// table; every theorem check is a method.
pub struct BoundChecker {
    q: PotentialSpec,
    pub eigs: EigenResult,
    q_integral: f64,
    table: SequenceTable,
    tolerance_floor: f64,
}

impl BoundChecker {
    /// Solves for the lowest `n_max + 1` eigenvalues and prepares every
    /// sequence the checks need.
    pub fn new(q: &PotentialSpec, n_max: usize, opts: &SolverOptions) -> Result<Self> {
        let eigs = solver::solve(q, n_max + 1, opts)?;
        Self::from_parts(q.clone(), eigs)
    }

    /// Wraps an existing eigenvalue list (solver output or synthetic data).
    pub fn from_parts(q: PotentialSpec, eigs: EigenResult) -> Result<Self> {
        let n_max = eigs.eigenvalues.len().saturating_sub(1);
        let table = SequenceTable::new(n_max + 1)?;
        let q_integral = q.integral()?;
        Ok(Self {
            q,
            eigs,
            q_integral,
            table,
            tolerance_floor: 1e-8,
        })
    }

    /// Replaces the default verdict tolerance floor (1e-8).
    pub fn with_tolerance_floor(mut self, floor: f64) -> Self {
        self.tolerance_floor = floor.abs().max(f64::MIN_POSITIVE);
        self
    }

    pub fn q(&self) -> &PotentialSpec {
        &self.q
    }

    pub fn q_integral(&self) -> f64 {
        self.q_integral
    }

    pub fn n_max(&self) -> usize {
        self.eigs.eigenvalues.len() - 1
    }

    fn digest(&self) -> InputsDigest {
        InputsDigest {
            potential: self.q.to_string(),
            basis_size: self.eigs.basis_size,
            convergence_sum: self.eigs.convergence_sum(self.n_max()),
            tolerance_floor: self.tolerance_floor,
        }
    }

    fn require_n(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::Domain(format!(
                "n = {n} exceeds the solved range {}",
                self.n_max()
            )));
        }
        Ok(())
    }

    /// Verdict tolerance: the floor plus twice the demonstrated solver
    /// movement on the eigenvalues entering the sum.
    fn sum_tolerance(&self, n: usize) -> f64 {
        self.tolerance_floor.max(2.0 * self.eigs.convergence_sum(n))
    }

    fn report(
        &self,
        theorem: TheoremId,
        n: usize,
        s: Option<f64>,
        lhs: f64,
        rhs: f64,
        slack: f64,
        tolerance: f64,
    ) -> BoundReport {
        BoundReport {
            theorem,
            n,
            s,
            lhs,
            rhs,
            slack,
            tolerance,
            verdict: slack >= -tolerance,
            inputs: self.digest(),
        }
    }

    /// Regularized-sum bound for certified non-negative `q`.
    pub fn thm31(&self, n: usize) -> Result<BoundReport> {
        self.require_n(n)?;
        if !self.q.is_nonnegative() {
            return Err(Error::Hypothesis(format!(
                "{} is not certified non-negative",
                self.q
            )));
        }
        let lhs = regularized_sum(&self.eigs.eigenvalues, self.q_integral, n);
        let rhs = self.table.chi[n] * self.q_integral / PI;
        Ok(self.report(TheoremId::Thm31, n, None, lhs, rhs, rhs - lhs, self.sum_tolerance(n)))
    }

    /// Regularized-sum bound for perturbations with a finite Gaussian
    /// offset `q_m`; reduces to `thm31` when `q >= 0` (then `q_m = 0`).
    pub fn thm41(&self, n: usize) -> Result<BoundReport> {
        self.require_n(n)?;
        let q_m = self.q.q_m()?;
        let lhs = regularized_sum(&self.eigs.eigenvalues, self.q_integral, n);
        let rhs = self.table.chi[n] * self.q_integral / PI
            + self.table.epsilon[n] * q_m / PI.sqrt();
        Ok(self.report(TheoremId::Thm41, n, None, lhs, rhs, rhs - lhs, self.sum_tolerance(n)))
    }

    /// Plain eigenvalue-sum bound from the Hermite coefficients of the full
    /// potential `V = x^2 + q`.
    pub fn thm51(&self, n: usize) -> Result<BoundReport> {
        self.require_n(n)?;
        let coeffs = potentials::hermite_coefficients_full(&self.q, 2 * n)?;
        let mut lhs = KahanSum::new();
        for &lam in self.eigs.eigenvalues.iter().take(n + 1) {
            lhs.add(lam);
        }
        let mut rhs = KahanSum::new();
        for k in 0..=n {
            rhs.add(coefficient_weight(n, k) * coeffs.values[2 * k]);
        }
        rhs.add(0.5 * ((n + 1) * (n + 1)) as f64);
        let lhs = lhs.value();
        let rhs = rhs.value();
        Ok(self.report(TheoremId::Thm51, n, None, lhs, rhs, rhs - lhs, self.sum_tolerance(n)))
    }

    /// Regularized form of [`Self::thm51`] in terms of the perturbation
    /// coefficients `q_{2k}`.
    pub fn cor53(&self, n: usize) -> Result<BoundReport> {
        self.require_n(n)?;
        let coeffs = potentials::hermite_coefficients(&self.q, 2 * n)?;
        let lhs = regularized_sum(&self.eigs.eigenvalues, self.q_integral, n);
        let mut rhs = KahanSum::new();
        for k in 0..=n {
            let lam0 = (2 * k + 1) as f64;
            rhs.add(coefficient_weight(n, k) * coeffs.values[2 * k]);
            rhs.add(-self.q_integral / (PI * lam0.sqrt()));
        }
        let rhs = rhs.value();
        Ok(self.report(TheoremId::Cor53, n, None, lhs, rhs, rhs - lhs, self.sum_tolerance(n)))
    }

    /// Mean negative power of the spectral gaps against the envelope value;
    /// the inequality direction is reversed (`lhs >= rhs`), so
    /// `slack = lhs - rhs`.
    pub fn power1(&self, n: usize, s: f64) -> Result<BoundReport> {
        self.require_n(n)?;
        if !(s > 0.0) {
            return Err(Error::Domain(format!("power1 requires s > 0, got {s}")));
        }
        if !self.q.is_nonnegative() {
            return Err(Error::Hypothesis(format!(
                "{} is not certified non-negative",
                self.q
            )));
        }
        if !(self.q_integral > 0.0) {
            return Err(Error::Hypothesis(
                "power1 needs a strictly positive perturbation integral".into(),
            ));
        }
        let mut lhs = KahanSum::new();
        let mut sensitivity = 0.0f64;
        for (k, &lam) in self.eigs.eigenvalues.iter().enumerate().take(n + 1) {
            let gap = lam - (2 * k + 1) as f64;
            if gap <= 0.0 {
                return Err(Error::Hypothesis(format!(
                    "degenerate spectral gap at k = {k} (lambda_k = lambda_k^0)"
                )));
            }
            lhs.add(gap.powf(-s));
            sensitivity += s * gap.powf(-s - 1.0) * self.eigs.convergence_estimate[k];
        }
        let lhs = lhs.value() / (n + 1) as f64;
        let base = self.table.omega[n] * self.q_integral / ((n + 1) as f64 * PI);
        let rhs = base.powf(-s);
        let tol = self.tolerance_floor.max(2.0 * sensitivity / (n + 1) as f64);
        Ok(self.report(TheoremId::Power1, n, Some(s), lhs, rhs, lhs - rhs, tol))
    }

    /// Negative-power sum against the increment-shifted comparison sequence
    /// `lambda_k^0 + tau_{k-1} integral q / pi`; requires the integral to be
    /// positive and below `32 sqrt(pi)` (with margin), which keeps the
    /// comparison sequence positive and non-decreasing.
    pub fn power1a(&self, n: usize, s: f64) -> Result<BoundReport> {
        self.require_n(n)?;
        if !(s > 0.0) {
            return Err(Error::Domain(format!("power1a requires s > 0, got {s}")));
        }
        if !self.q.is_nonnegative() {
            return Err(Error::Hypothesis(format!(
                "{} is not certified non-negative",
                self.q
            )));
        }
        let cap = 32.0 * PI.sqrt();
        if !(self.q_integral >= 0.0) || self.q_integral >= cap - 1e-8 {
            return Err(Error::Hypothesis(format!(
                "power1a needs 0 <= integral q < 32 sqrt(pi) - 1e-8, got {}",
                self.q_integral
            )));
        }
        // comparison sequence: increments of omega scaled by the integral
        let mut comparison = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let tau_prev = self.table.omega[k]
                - if k == 0 { 0.0 } else { self.table.omega[k - 1] };
            comparison.push((2 * k + 1) as f64 + tau_prev * self.q_integral / PI);
        }
        for k in 0..=n {
            if !(comparison[k] > 0.0) {
                return Err(Error::Validation(format!(
                    "comparison sequence not positive at k = {k}"
                )));
            }
            if k > 0 && comparison[k] < comparison[k - 1] - 1e-12 {
                return Err(Error::Validation(format!(
                    "comparison sequence decreases at k = {k}"
                )));
            }
        }
        let mut lhs = KahanSum::new();
        let mut rhs = KahanSum::new();
        let mut sensitivity = 0.0f64;
        for (k, &lam) in self.eigs.eigenvalues.iter().enumerate().take(n + 1) {
            if !(lam > 0.0) {
                return Err(Error::Domain(format!(
                    "negative eigenvalue lambda_{k} = {lam} under a negative power"
                )));
            }
            lhs.add(lam.powf(-s));
            rhs.add(comparison[k].powf(-s));
            sensitivity += s * lam.powf(-s - 1.0) * self.eigs.convergence_estimate[k];
        }
        let tol = self.tolerance_floor.max(2.0 * sensitivity);
        Ok(self.report(
            TheoremId::Power1a,
            n,
            Some(s),
            lhs.value(),
            rhs.value(),
            lhs.value() - rhs.value(),
            tol,
        ))
    }

    /// Negative-power sum for zero-mean perturbations with finite `q_m`.
    ///
    /// The comparison value is the generic transform evaluated at
    /// `b_k = lambda_k^0` and `c_k = lambda_k^0 + q_m (eps_k - eps_{k-1})`,
    /// i.e. `sum_k [(s+1) (l0)^{-s} - s (l0)^{-s-1} (l0 + q_m d_eps)]`; the
    /// `l0` part of `c_k` collapses the leading coefficient back to one, so
    /// the zero-perturbation case degenerates to equality.
    pub fn power_zero_mean(&self, n: usize, s: f64) -> Result<BoundReport> {
        self.require_n(n)?;
        if !(s > 0.0) {
            return Err(Error::Domain(format!(
                "powerzeromean requires s > 0, got {s}"
            )));
        }
        if self.q_integral.abs() >= 1e-10 {
            return Err(Error::Hypothesis(format!(
                "powerzeromean needs integral q = 0, got {}",
                self.q_integral
            )));
        }
        let q_m = self.q.q_m()?;
        let mut lhs = KahanSum::new();
        let mut rhs = KahanSum::new();
        let mut sensitivity = 0.0f64;
        for (k, &lam) in self.eigs.eigenvalues.iter().enumerate().take(n + 1) {
            if !(lam > 0.0) {
                return Err(Error::Domain(format!(
                    "negative eigenvalue lambda_{k} = {lam} under a negative power"
                )));
            }
            lhs.add(lam.powf(-s));
            let lam0 = (2 * k + 1) as f64;
            let eps_step = self.table.epsilon[k]
                - if k == 0 { 0.0 } else { self.table.epsilon[k - 1] };
            let comparison = lam0 + q_m * eps_step;
            rhs.add((s + 1.0) * lam0.powf(-s) - s * lam0.powf(-s - 1.0) * comparison);
            sensitivity += s * lam.powf(-s - 1.0) * self.eigs.convergence_estimate[k];
        }
        let tol = self.tolerance_floor.max(2.0 * sensitivity);
        Ok(self.report(
            TheoremId::PowerZeroMean,
            n,
            Some(s),
            lhs.value(),
            rhs.value(),
            lhs.value() - rhs.value(),
            tol,
        ))
    }
}

/// `(2^k (2k)! / k!) C(n+1, k+1)`, assembled in log space.
fn coefficient_weight(n: usize, k: usize) -> f64 {
    let lg = |z: f64| log_gamma(z).expect("positive argument");
    let nf = n as f64;
    let kf = k as f64;
    (kf * std::f64::consts::LN_2 + lg(2.0 * kf + 1.0) - lg(kf + 1.0)
        + lg(nf + 2.0)
        - lg(kf + 2.0)
        - lg(nf - kf + 1.0))
    .exp()
}

/// Result of the generic sequence transform underlying the power bounds.
#[derive(Debug, Clone, Copy)]
pub struct PowerTransform {
    /// `sum_k [(s+1) b_k^{-s} - s b_k^{-s-1} c_k]`.
    pub bound: f64,
    /// `sum_k a_k^{-s}` (always >= `bound` under the hypotheses).
    pub power_sum: f64,
    /// The bound at the maximizing choice `b = c`, i.e. `sum_k c_k^{-s}`.
    pub maximized_bound: f64,
}

/// Applies the transform `sum a_k^{-s} >= sum [(s+1) b_k^{-s} -
/// s b_k^{-s-1} c_k]` after validating its hypotheses: `a`, `b` positive,
/// `b` non-decreasing, and the partial sums of `a` dominated by those of
/// `c` for every index up to `n`. Violations are reported with the
/// offending index.
pub fn power_transform(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    n: usize,
    s: f64,
) -> Result<PowerTransform> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("power transform requires s > 0, got {s}")));
    }
    if a.len() <= n || b.len() <= n || c.len() <= n {
        return Err(Error::Domain("sequences shorter than n + 1".into()));
    }
    let mut partial_a = KahanSum::new();
    let mut partial_c = KahanSum::new();
    for k in 0..=n {
        if !(a[k] > 0.0) {
            return Err(Error::Hypothesis(format!("a[{k}] = {} not positive", a[k])));
        }
        if !(b[k] > 0.0) {
            return Err(Error::Hypothesis(format!("b[{k}] = {} not positive", b[k])));
        }
        if k > 0 && b[k] < b[k - 1] {
            return Err(Error::Hypothesis(format!("b decreases at index {k}")));
        }
        partial_a.add(a[k]);
        partial_c.add(c[k]);
        if partial_a.value() > partial_c.value() + 1e-12 * partial_c.value().abs().max(1.0) {
            return Err(Error::Hypothesis(format!(
                "partial sums of a exceed those of c at index {k}"
            )));
        }
    }
    let mut bound = KahanSum::new();
    let mut power_sum = KahanSum::new();
    let mut maximized = KahanSum::new();
    for k in 0..=n {
        bound.add((s + 1.0) * b[k].powf(-s) - s * b[k].powf(-s - 1.0) * c[k]);
        power_sum.add(a[k].powf(-s));
        if c[k] > 0.0 {
            maximized.add(c[k].powf(-s));
        }
    }
    let out = PowerTransform {
        bound: bound.value(),
        power_sum: power_sum.value(),
        maximized_bound: maximized.value(),
    };
    if out.power_sum < out.bound - 1e-9 * out.bound.abs().max(1.0) {
        return Err(Error::Validation(format!(
            "transform inequality violated: {} < {}",
            out.power_sum, out.bound
        )));
    }
    Ok(out)
}

/// Spike potential driving the regularized sum below `-severity` at index
/// `n`: a box of fixed mass `K` (twice the smallest amplitude satisfying
/// the selection inequality) and dyadically shrinking width. Returns the
/// found potential along with the solver-verified report.
///
/// The verification is one-sided exact: Ritz values over-estimate the true
/// eigenvalues, so a nonpositive verified slack certifies the true sum.
pub fn counterexample(n: usize, severity: f64) -> Result<(PotentialSpec, BoundReport)> {
    if !(severity > 0.0) {
        return Err(Error::Domain(format!(
            "counterexample severity must be > 0, got {severity}"
        )));
    }
    // sum of the odd-index shift (lambda_{2k+1}^0 - lambda_k^0) = 2k + 2
    let odd_shift: f64 = (0..=n).map(|k| (2 * k + 2) as f64).sum();
    let mut inv_sum = KahanSum::new();
    for k in 0..=n {
        inv_sum.add(1.0 / (PI * ((2 * k + 1) as f64).sqrt()));
    }
    let k_min = (odd_shift + 1.0 + severity) / inv_sum.value();
    let amplitude = 2.0 * k_min;

    let opts = SolverOptions {
        basis: Some((4 * (n + 1)).max(120)),
        ..Default::default()
    };
    let mut last_lhs = f64::INFINITY;
    let mut last_basis = 0usize;
    let mut last_peak = 0.0f64;
    for exponent in 1..=20u32 {
        let delta = 2.0f64.powi(-(exponent as i32));
        let q = PotentialSpec::box_bump(amplitude, delta)?;
        let checker = BoundChecker::new(&q, n, &opts)?;
        let lhs = regularized_sum(&checker.eigs.eigenvalues, amplitude, n);
        last_lhs = lhs;
        last_basis = checker.eigs.basis_size;
        let problem = solver::GalerkinProblem::assemble(&q, opts.basis.unwrap(), None)?;
        last_peak = problem.matrix.max_abs_entry();
        if lhs <= -severity {
            let report = BoundReport {
                theorem: TheoremId::Prop34,
                n,
                s: None,
                lhs,
                rhs: -severity,
                slack: -severity - lhs,
                tolerance: 0.0,
                verdict: lhs <= -severity,
                inputs: InputsDigest {
                    potential: q.to_string(),
                    basis_size: checker.eigs.basis_size,
                    convergence_sum: checker.eigs.convergence_sum(n),
                    tolerance_floor: 0.0,
                },
            };
            return Ok((q, report));
        }
    }
    Err(Error::NoConvergence(format!(
        "width floor 2^-20 reached without regularized sum <= -{severity}; \
         last sum {last_lhs:.6}, basis {last_basis}, peak matrix entry {last_peak:.3e}"
    )))
}
