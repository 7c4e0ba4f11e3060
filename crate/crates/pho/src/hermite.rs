//! Hermite polynomials (physicists' convention), normalized oscillator
//! eigenfunctions, Gauss-Hermite quadrature, and the closed-form moment
//! identities the Galerkin solver and the bound checks rely on.
//!
//! Two evaluation paths coexist on purpose. The raw polynomials `H_n` grow
//! like `2^n sqrt(n!)` and overflow doubles near degree 150, so they are
//! capped; all large-degree work routes through the normalized functions
//!
//! ```text
//!     psi_n(x) = e^{-x^2/2} H_n(x) / sqrt(2^n n! sqrt(pi)),
//! ```
//!
//! whose three-term recurrence stays O(1) for any degree.

use crate::eigen;
use crate::util::KahanSum;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Degree cap for raw polynomial evaluation (overflow guard).
pub const RAW_DEGREE_CAP: usize = 150;

fn lg(z: f64) -> f64 {
    crate::special::log_gamma(z).expect("positive argument")
}

/// Paired evaluation of the raw polynomial and the normalized eigenfunction
/// at one point.
#[derive(Debug, Clone, Copy)]
pub struct HermiteEval {
    pub degree: usize,
    pub point: f64,
    /// `H_n(x)`; only available up to [`RAW_DEGREE_CAP`].
    pub physicists_value: f64,
    /// `psi_n(x)`; finite for any degree.
    pub normalized_value: f64,
}

impl HermiteEval {
    pub fn at(degree: usize, point: f64) -> Result<Self> {
        Ok(Self {
            degree,
            point,
            physicists_value: hermite_physicists(degree, point)?,
            normalized_value: hermite_normalized(degree, point),
        })
    }
}

/// `H_n(x)` by the recurrence `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite_physicists(n: usize, x: f64) -> Result<f64> {
    if n > RAW_DEGREE_CAP {
        return Err(Error::DegreeTooLarge(format!(
            "raw Hermite evaluation capped at degree {RAW_DEGREE_CAP}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Normalized oscillator eigenfunction `psi_n(x)`, unit L2 norm.
///
/// Runs the recurrence with a carried base-2 exponent: the Gaussian seed
/// `e^{-x^2/2}` underflows past |x| ~ 38 while `psi_n(x)` itself can be
/// O(1) there for large `n`, so a plain recurrence would collapse to zero.
pub fn hermite_normalized(n: usize, x: f64) -> f64 {
    let (mant, exp) = psi_scaled(n, x);
    if exp < -1100 {
        return 0.0;
    }
    if exp > 1020 {
        return f64::INFINITY * mant.signum();
    }
    mant * (exp as f64).exp2()
}

/// `psi_n(x)` as `mantissa * 2^exponent`; the renormalizations are exact
/// powers of two, so no accuracy is spent keeping the pair representable.
pub(crate) fn psi_scaled(n: usize, x: f64) -> (f64, i64) {
    const UP: f64 = 8.98846567431158e307; // 2^1023
    const DOWN: f64 = 1.1125369292536007e-308; // 2^-1023
    let log2_seed = -0.25 * PI.log2() - x * x / (2.0 * std::f64::consts::LN_2);
    let mut exp = log2_seed.floor();
    let mut prev = (log2_seed - exp).exp2(); // in [1, 2)
    if n == 0 {
        return (prev, exp as i64);
    }
    let mut cur = std::f64::consts::SQRT_2 * x * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > UP * 1e-30 {
            cur *= DOWN;
            prev *= DOWN;
            exp += 1023.0;
        } else if mag < DOWN * 1e30 && mag > 0.0 {
            cur *= UP;
            prev *= UP;
            exp -= 1023.0;
        }
    }
    (cur, exp as i64)
}

/// `psi_0(x) .. psi_{n_max}(x)` in one recurrence pass.
pub(crate) fn psi_values(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for k in 1..n_max {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Weighted counterpart of [`psi_values`]: `H_n(x) / sqrt(2^n n! sqrt(pi))`,
/// i.e. the normalized functions without the Gaussian factor. Grows like
/// `e^{x^2/2}`, so callers keep `|x|` moderate.
pub(crate) fn weighted_hermite_values(x: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25));
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * out[0]);
    for k in 1..n_max {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `sqrt(pi) 2^n n!`, the squared weighted norm of `H_n`.
pub fn normalization_sq(n: usize) -> f64 {
    log_normalization_sq(n).exp()
}

pub(crate) fn log_normalization_sq(n: usize) -> f64 {
    0.5 * PI.ln() + (n as f64) * std::f64::consts::LN_2 + lg(n as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussHermite,
    CompositeGaussLegendre,
}

/// Quadrature rule: Gauss-Hermite over the whole line, or composite
/// Gauss-Legendre over a finite interval.
///
/// For a Gauss-Hermite rule `weights` integrate `e^{-x^2} f(x)` while the
/// scaled weights (`weights * e^{x^2}`, computed stably from the degree-m-1
/// normalized function) integrate plain `f`; for composite rules the two
/// coincide.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: Option<(f64, f64)>,
    scaled: Vec<f64>,
}

impl QuadratureRule {
    /// Gauss-Hermite rule with `m` nodes by the Golub-Welsch procedure:
    /// eigen-decomposition of the Jacobi matrix with zero diagonal and
    /// off-diagonals `sqrt(k/2)`. Exact for `e^{-x^2} p(x)` with
    /// `deg p <= 2m - 1`; low-order moments are verified at build time.
    pub fn gauss_hermite(m: usize) -> Result<Self> {
        if m == 0 || m > 10_000 {
            return Err(Error::Domain(format!(
                "gauss_hermite node count must be in 1..=10000, got {m}"
            )));
        }
        let mut d = vec![0.0f64; m];
        let mut e: Vec<f64> = (1..m).map(|k| (k as f64 / 2.0).sqrt()).collect();
        e.push(0.0);
        let mut z = vec![0.0f64; m];
        z[0] = 1.0;
        eigen::tridiag_ql(&mut d, &mut e, Some(&mut z))?;

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
        let nodes: Vec<f64> = order.iter().map(|&i| d[i]).collect();
        let weights: Vec<f64> = order.iter().map(|&i| PI.sqrt() * z[i] * z[i]).collect();

        // w_i e^{x_i^2} = 1 / (m psi_{m-1}(x_i)^2); representable even where
        // the raw weight underflows.
        let scaled: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                let p = hermite_normalized(m - 1, x);
                1.0 / (m as f64 * p * p)
            })
            .collect();

        let rule = Self {
            kind: RuleKind::GaussHermite,
            nodes,
            weights,
            interval: None,
            scaled,
        };
        rule.validate_hermite_moments()?;
        Ok(rule)
    }

    /// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels
    /// of `per_panel` points each.
    pub fn composite_gauss_legendre(
        a: f64,
        b: f64,
        panels: usize,
        per_panel: usize,
    ) -> Result<Self> {
        if !(b > a) || panels == 0 || per_panel == 0 {
            return Err(Error::Domain(format!(
                "bad composite rule: interval [{a}, {b}], {panels} panels x {per_panel}"
            )));
        }
        let (xs, ws) = gauss_legendre_unit(per_panel);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            for (x, w) in xs.iter().zip(ws.iter()) {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        let scaled = weights.clone();
        Ok(Self {
            kind: RuleKind::CompositeGaussLegendre,
            nodes,
            weights,
            interval: Some((a, b)),
            scaled,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weights for plain integrals of `f` (no implicit Gaussian factor).
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled
    }

    /// For Gauss-Hermite: integral of `e^{-x^2} f(x)` over the line.
    /// For composite rules: integral of `f` over the interval.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut sum = KahanSum::new();
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            sum.add(w * f(*x));
        }
        sum.value()
    }

    /// Plain integral of `f` (over the line for Gauss-Hermite rules).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut sum = KahanSum::new();
        for (x, w) in self.nodes.iter().zip(self.scaled.iter()) {
            sum.add(w * f(*x));
        }
        sum.value()
    }

    fn validate_hermite_moments(&self) -> Result<()> {
        let m = self.len();
        for i in 1..m {
            if !(self.nodes[i] > self.nodes[i - 1]) {
                return Err(Error::Validation(format!(
                    "quadrature nodes not strictly increasing at index {i}"
                )));
            }
        }
        if self.scaled.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Validation("nonpositive quadrature weight".into()));
        }
        // even moments: integral of e^{-x^2} x^{2j} = sqrt(pi) (2j-1)!!/2^j;
        // degrees capped so the monomials stay representable at the extreme
        // nodes.
        let mut moment = PI.sqrt();
        let top = ((2 * m - 1).min(30)) / 2;
        for j in 0..=top {
            if j > 0 {
                moment *= (2 * j - 1) as f64 / 2.0;
            }
            let got = self.integrate_weighted(|x| x.powi(2 * j as i32));
            if (got - moment).abs() > 1e-12 * moment {
                return Err(Error::Validation(format!(
                    "moment check failed at degree {}: {got} vs {moment}",
                    2 * j
                )));
            }
        }
        Ok(())
    }
}

/// Convenience constructor matching the operation name used elsewhere.
pub fn gauss_hermite_rule(m: usize) -> Result<QuadratureRule> {
    QuadratureRule::gauss_hermite(m)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre_unit(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0f64; p];
    let mut weights = vec![0.0f64; p];
    for i in 0..p.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (v, d) = legendre_with_derivative(p, x);
            dp = d;
            let dx = v / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_with_derivative(p, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[p - 1 - i] = x.abs();
        weights[i] = w;
        weights[p - 1 - i] = w;
    }
    if p % 2 == 1 {
        let (_, d) = legendre_with_derivative(p, 0.0);
        nodes[p / 2] = 0.0;
        weights[p / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(p: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    if p == 0 {
        return (1.0, 0.0);
    }
    for k in 1..p {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let d = p as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, d)
}

/// Running sum of squared normalized functions, `sum_{k<=n} psi_k(x)^2`.
pub(crate) fn normalized_sq_sum(n: usize, x: f64) -> f64 {
    let mut sum = KahanSum::new();
    for v in psi_values(x, n) {
        sum.add(v * v);
    }
    sum.value()
}

/// `sum_{k=0}^{n} H_k(x)^2 / (2^k k!)` in overflow-safe form
/// `sqrt(pi) e^{x^2} sum psi_k(x)^2`.
pub fn turan_sum(n: usize, x: f64) -> f64 {
    PI.sqrt() * (x * x).exp() * normalized_sq_sum(n, x)
}

/// `ln(sqrt(pi) 2^{n+1} n!)`, the log of the scale factor relating
/// [`h_n`] to the running normalized sum.
pub fn h_n_log_scale(n: usize) -> f64 {
    0.5 * PI.ln() + (n as f64 + 1.0) * std::f64::consts::LN_2 + lg(n as f64 + 1.0)
}

/// `h_n(x) = e^{-x^2} [H_{n+1}^2(x) - H_n(x) H_{n+2}(x)]`, evaluated stably
/// as `sqrt(pi) 2^{n+1} n! sum_{k<=n} psi_k(x)^2`. Errors if the scale
/// factor is not representable in doubles.
pub fn h_n(n: usize, x: f64) -> Result<f64> {
    let log_scale = h_n_log_scale(n);
    if log_scale > 709.0 {
        return Err(Error::Overflow(format!(
            "h_n scale 2^{{n+1}} n! not representable at n = {n}; use h_n_log"
        )));
    }
    Ok(log_scale.exp() * normalized_sq_sum(n, x))
}

/// `ln h_n(x)`, defined for every degree.
pub fn h_n_log(n: usize, x: f64) -> f64 {
    h_n_log_scale(n) + normalized_sq_sum(n, x).ln()
}

/// Envelope constant for `h_n`:
/// odd `n`:  `(4^{n+1} / 2pi) ((2n+3)/(n+1)) Gamma(n/2 + 1)^2`;
/// even `n`: `(4^{n+1} / 2pi) (n+1) Gamma((n+1)/2)^2`.
/// The even-degree bound is attained at `x = 0`.
pub fn h_n_bound(n: usize) -> f64 {
    h_n_bound_log(n).exp()
}

pub fn h_n_bound_log(n: usize) -> f64 {
    let nf = n as f64;
    let base = (nf + 1.0) * 4f64.ln() - (2.0 * PI).ln();
    if n % 2 == 1 {
        base + ((2.0 * nf + 3.0) / (nf + 1.0)).ln() + 2.0 * lg(nf / 2.0 + 1.0)
    } else {
        base + (nf + 1.0).ln() + 2.0 * lg((nf + 1.0) / 2.0)
    }
}

/// `integral e^{-x^2} H_n H_m = delta_{nm} sqrt(pi) 2^n n!` (degrees capped
/// so the value stays representable).
pub fn hermite_moment_double(n: usize, m: usize) -> f64 {
    assert!(
        n <= RAW_DEGREE_CAP && m <= RAW_DEGREE_CAP,
        "double moment degrees capped at {RAW_DEGREE_CAP}"
    );
    if n != m {
        0.0
    } else {
        log_normalization_sq(n).exp()
    }
}

/// `integral e^{-x^2} H_a H_b H_c`: zero unless `a + b + c = 2s` is even
/// with `s >= max(a, b, c)`, in which case it equals
/// `sqrt(pi) 2^s a! b! c! / ((s-a)! (s-b)! (s-c)!)`, evaluated through
/// log-factorials.
pub fn hermite_moment_triple(a: usize, b: usize, c: usize) -> f64 {
    assert!(
        a <= 100 && b <= 100 && c <= 100,
        "triple moment degrees capped at 100"
    );
    let total = a + b + c;
    if total % 2 == 1 {
        return 0.0;
    }
    let s = total / 2;
    if s < a.max(b).max(c) {
        return 0.0;
    }
    let logv = 0.5 * PI.ln()
        + s as f64 * std::f64::consts::LN_2
        + lg(a as f64 + 1.0)
        + lg(b as f64 + 1.0)
        + lg(c as f64 + 1.0)
        - lg((s - a) as f64 + 1.0)
        - lg((s - b) as f64 + 1.0)
        - lg((s - c) as f64 + 1.0);
    logv.exp()
}

/// `integral e^{-2x^2} H_k^2 = 2^{k - 1/2} Gamma(k + 1/2)`.
pub fn gaussian_squared_moment(k: usize) -> f64 {
    ((k as f64 - 0.5) * std::f64::consts::LN_2 + lg(k as f64 + 0.5)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_polynomial_values() {
        for x in [-2.0, 0.0, 0.3, 5.0] {
            assert_eq!(hermite_physicists(0, x).unwrap(), 1.0);
        }
        assert_eq!(hermite_physicists(2, 1.0).unwrap(), 2.0); // 4 - 2
        assert_eq!(hermite_physicists(3, 0.0).unwrap(), 0.0);
        assert!(hermite_physicists(151, 0.0).is_err());
        assert!(HermiteEval::at(10, 0.5).is_ok());
        assert!(HermiteEval::at(200, 0.5).is_err());
    }

    #[test]
    fn normalized_values() {
        assert!((hermite_normalized(0, 0.0) - PI.powf(-0.25)).abs() < 1e-15);
        assert!((hermite_normalized(0, 0.0) - 0.7511255445).abs() < 1e-10);
        assert_eq!(hermite_normalized(1, 0.0), 0.0);
        // stays finite at extreme degree and displacement
        assert!(hermite_normalized(100_000, 50.0).is_finite());
    }

    #[test]
    fn normalized_matches_raw_up_to_norm() {
        for n in [0usize, 1, 5, 17, 40] {
            for x in [-3.2, 0.4, 1.9] {
                let raw = hermite_physicists(n, x).unwrap();
                let scale = (0.5 * log_normalization_sq(n)).exp();
                let expect = (-0.5 * x * x).exp() * raw / scale;
                let got = hermite_normalized(n, x);
                assert!(
                    (got - expect).abs() < 1e-12 * expect.abs().max(1.0),
                    "n={n}, x={x}"
                );
            }
        }
    }

    #[test]
    fn normalized_is_unit_norm() {
        let rule = gauss_hermite_rule(60).unwrap();
        let norm = rule.integrate(|x| {
            let v = hermite_normalized(3, x);
            v * v
        });
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_hermite_small_rules() {
        let r1 = gauss_hermite_rule(1).unwrap();
        assert_eq!(r1.len(), 1);
        assert!(r1.nodes[0].abs() < 1e-15);
        assert!((r1.weights[0] - PI.sqrt()).abs() < 1e-14);

        let r2 = gauss_hermite_rule(2).unwrap();
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert!((r2.nodes[0] + inv_sqrt2).abs() < 1e-14);
        assert!((r2.nodes[1] - inv_sqrt2).abs() < 1e-14);
        assert!((r2.weights[0] - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((r2.weights[1] - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_hermite_high_moment() {
        // integral x^10 e^{-x^2} = (9!!/2^5) sqrt(pi)
        let rule = gauss_hermite_rule(40).unwrap();
        let got = rule.integrate_weighted(|x| x.powi(10));
        let want = 945.0 / 32.0 * PI.sqrt();
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn scaled_weights_match_raw_where_representable() {
        let rule = gauss_hermite_rule(40).unwrap();
        for (x, (w, s)) in rule
            .nodes
            .iter()
            .zip(rule.weights.iter().zip(rule.scaled_weights().iter()))
        {
            let direct = w * (x * x).exp();
            assert!(
                (direct - s).abs() < 1e-10 * s,
                "x={x}: {direct} vs {s}"
            );
        }
    }

    #[test]
    fn composite_legendre_basics() {
        let rule = QuadratureRule::composite_gauss_legendre(0.0, 1.0, 4, 8).unwrap();
        assert!((rule.integrate(|x| x * x * x) - 0.25).abs() < 1e-14);
        let wide = QuadratureRule::composite_gauss_legendre(-8.0, 8.0, 16, 16).unwrap();
        assert!((wide.integrate(|x| (-x * x).exp()) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn turan_sum_examples() {
        for x in [-1.5, 0.0, 2.0] {
            assert!((turan_sum(0, x) - 1.0).abs() < 1e-12);
        }
        assert!((turan_sum(1, 1.0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn turan_identity_against_raw_form() {
        // sum H_k^2/(2^k k!) = [H_{n+1}^2 - H_n H_{n+2}] / (2^{n+1} n!)
        for n in 0..=30usize {
            let scale = ((n as f64 + 1.0) * std::f64::consts::LN_2 + lg(n as f64 + 1.0)).exp();
            let mut x = -6.0;
            while x <= 6.0 {
                let lhs = turan_sum(n, x);
                let h1 = hermite_physicists(n + 1, x).unwrap();
                let rhs = (h1 * h1
                    - hermite_physicists(n, x).unwrap() * hermite_physicists(n + 2, x).unwrap())
                    / scale;
                assert!(
                    (lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0),
                    "n={n}, x={x}: {lhs} vs {rhs}"
                );
                x += 0.37;
            }
        }
    }

    #[test]
    fn h_n_known_values() {
        assert!((h_n(0, 0.0).unwrap() - 2.0).abs() < 1e-13);
        for x in [-1.0, 0.5, 2.5] {
            assert!((h_n(0, x).unwrap() - 2.0 * (-x * x).exp()).abs() < 1e-13);
        }
        assert!((h_n(1, 0.0).unwrap() - 4.0).abs() < 1e-13);
        assert!(h_n(200, 0.0).is_err());
        assert!(h_n_log(200, 0.0).is_finite());
    }

    #[test]
    fn h_n_bound_closed_forms() {
        assert!((h_n_bound(0) - 2.0).abs() < 1e-12);
        assert!((h_n_bound(1) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn h_n_positive_and_below_bound_on_grid() {
        // uniform 2001-point grid on [-10, 10] plus the quadrature nodes
        let mut grid: Vec<f64> = (0..=2000).map(|i| -10.0 + i as f64 * 0.01).collect();
        grid.extend(
            gauss_hermite_rule(60)
                .unwrap()
                .nodes
                .iter()
                .filter(|x| x.abs() <= 10.0),
        );
        for n in 0..=20usize {
            let bound = h_n_bound(n);
            for &x in &grid {
                let v = h_n(n, x).unwrap();
                assert!(v > 0.0, "h_{n}({x}) = {v} not positive");
                assert!(v <= bound * (1.0 + 1e-12), "h_{n}({x}) = {v} above {bound}");
            }
            if n % 2 == 0 {
                // even-degree bound is attained at the origin
                let at0 = h_n(n, 0.0).unwrap();
                assert!(
                    (at0 - bound).abs() < 1e-10 * bound,
                    "n={n}: h_n(0) = {at0}, bound {bound}"
                );
            }
        }
    }

    #[test]
    fn h_n_derivative_identity() {
        // h_n'(x) = -2 e^{-x^2} H_n(x) H_{n+1}(x), checked by central differences
        let step = 1e-5;
        for n in 0..=15usize {
            for x in [-2.3, -0.7, 0.1, 1.9] {
                let fd = (h_n(n, x + step).unwrap() - h_n(n, x - step).unwrap()) / (2.0 * step);
                let exact = -2.0
                    * (-x * x).exp()
                    * hermite_physicists(n, x).unwrap()
                    * hermite_physicists(n + 1, x).unwrap();
                let scale = fd.abs().max(exact.abs()).max(1.0);
                assert!(
                    (fd - exact).abs() < 1e-5 * scale,
                    "n={n}, x={x}: fd {fd} vs exact {exact}"
                );
            }
        }
    }

    #[test]
    fn recurrence_consistency() {
        for n in 1..=100usize {
            let mut x = -8.0;
            while x <= 8.0 {
                let hm = hermite_physicists(n - 1, x).unwrap();
                let h = hermite_physicists(n, x).unwrap();
                let hp = hermite_physicists(n + 1, x).unwrap();
                let residual = hp - 2.0 * x * h + 2.0 * n as f64 * hm;
                let scale = hp.abs().max((2.0 * x * h).abs()).max(1.0);
                assert!(residual.abs() < 1e-10 * scale, "n={n}, x={x}");
                x += 0.57;
            }
        }
    }

    #[test]
    fn derivative_recurrence() {
        // H_n' = 2n H_{n-1} against central differences
        let step = 1e-5;
        for n in 1..=30usize {
            for x in [-3.1, 0.45, 2.2] {
                let fd = (hermite_physicists(n, x + step).unwrap()
                    - hermite_physicists(n, x - step).unwrap())
                    / (2.0 * step);
                let exact = 2.0 * n as f64 * hermite_physicists(n - 1, x).unwrap();
                assert!(
                    (fd - exact).abs() < 1e-5 * exact.abs().max(1.0),
                    "n={n}, x={x}"
                );
            }
        }
    }

    #[test]
    fn orthonormality_gram() {
        let n = 60usize;
        let rule = gauss_hermite_rule(2 * n + 8).unwrap();
        let psis: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| psi_values(x, n)).collect();
        for j in 0..=n {
            for k in j..=n {
                let mut acc = KahanSum::new();
                for (i, w) in rule.scaled_weights().iter().enumerate() {
                    acc.add(w * psis[i][j] * psis[i][k]);
                }
                let want = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (acc.value() - want).abs() < 1e-10,
                    "gram[{j}][{k}] = {}",
                    acc.value()
                );
            }
        }
    }

    #[test]
    fn double_moment_closed_form() {
        assert!((hermite_moment_double(0, 0) - PI.sqrt()).abs() < 1e-14);
        assert_eq!(hermite_moment_double(0, 2), 0.0);
        assert!((hermite_moment_double(3, 3) - 48.0 * PI.sqrt()).abs() < 1e-10);
        let rule = gauss_hermite_rule(30).unwrap();
        for (n, m) in [(2usize, 2usize), (4, 4), (3, 5)] {
            let got = rule.integrate_weighted(|x| {
                hermite_physicists(n, x).unwrap() * hermite_physicists(m, x).unwrap()
            });
            let want = hermite_moment_double(n, m);
            assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "({n},{m})");
        }
    }

    #[test]
    fn triple_moment_closed_form() {
        assert!((hermite_moment_triple(0, 0, 0) - PI.sqrt()).abs() < 1e-14);
        assert!((hermite_moment_triple(1, 1, 2) - 8.0 * PI.sqrt()).abs() < 1e-12);
        assert_eq!(hermite_moment_triple(1, 1, 1), 0.0); // odd total
        assert_eq!(hermite_moment_triple(1, 2, 7), 0.0); // s < max degree
        let rule = gauss_hermite_rule(30).unwrap();
        let got = rule.integrate_weighted(|x| {
            let h1 = hermite_physicists(1, x).unwrap();
            h1 * h1 * hermite_physicists(2, x).unwrap()
        });
        assert!((got - 8.0 * PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_squared_moment_values() {
        let half_pi = (PI / 2.0).sqrt();
        assert!((gaussian_squared_moment(0) - half_pi).abs() < 1e-12);
        assert!((gaussian_squared_moment(0) - 1.2533141373).abs() < 1e-10);
        assert!((gaussian_squared_moment(1) - half_pi).abs() < 1e-12);
        let rule = gauss_hermite_rule(60).unwrap();
        let got = rule.integrate_weighted(|x| {
            let h5 = hermite_physicists(5, x).unwrap();
            (-x * x).exp() * h5 * h5
        });
        let want = gaussian_squared_moment(5);
        assert!((got - want).abs() < 1e-10 * want);
    }
}
