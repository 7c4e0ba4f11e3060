//! The explicit sequences controlling regularized eigenvalue sums.
//!
//! With `lambda_k^0 = 2k + 1` the unperturbed eigenvalues, the library works
//! with four derived sequences:
//!
//! * `omega_n` - gamma-ratio envelope constant (parity-split closed form),
//!   `omega_{-1} = 0`;
//! * `chi_n = omega_n - sum_{k<=n} (lambda_k^0)^{-1/2}`, converging to
//!   `-Z0(1/2)` at rate `O(1/sqrt(n))`;
//! * `epsilon_n = omega_n - sqrt(2) Gamma(n + 3/2) / Gamma(n + 1) >= 0`,
//!   the extra cost of indefinite perturbations, `epsilon_{-1} = 0`;
//! * `tau_n = omega_{n+1} - omega_n > 0`, non-increasing.
//!
//! `omega_n` is positive and strictly increasing; consecutive increments
//! around an even index are equal, which makes every even-index second
//! difference vanish and pins the most negative second difference at
//! `-sqrt(pi)/16`.

use crate::special::{gamma_half_ratio, z0};
use crate::util::KahanSum;
use crate::Result;

/// `omega_n` for `n >= -1` (`omega_{-1} = 0`).
///
/// Odd `n`: `((2n+3)/(n+1)) Gamma(n/2 + 1) / Gamma((n+1)/2)`;
/// even `n`: `(n+1) Gamma((n+1)/2) / Gamma(n/2 + 1)`.
/// Both gamma quotients are `Gamma(z + 1/2)/Gamma(z)` at `z = (n+1)/2`, so
/// they route through the dedicated ratio evaluation; anything less
/// accurate makes the increments `tau_n` noisy at large `n` (consecutive
/// increments around an even index are equal in exact arithmetic).
pub fn omega(n: i64) -> f64 {
    assert!(n >= -1, "omega defined for n >= -1");
    if n == -1 {
        return 0.0;
    }
    let nf = n as f64;
    let ratio = gamma_half_ratio((nf + 1.0) / 2.0).expect("positive argument");
    if n % 2 == 1 {
        (2.0 * nf + 3.0) / (nf + 1.0) * ratio
    } else {
        (nf + 1.0) / ratio
    }
}

/// `chi_n = omega_n - sum_{k=0}^{n} (2k+1)^{-1/2}` with compensated summation.
pub fn chi(n: usize) -> f64 {
    let mut sum = KahanSum::new();
    for k in 0..=n {
        sum.add(1.0 / (2.0 * k as f64 + 1.0).sqrt());
    }
    omega(n as i64) - sum.value()
}

/// `epsilon_n = omega_n - sqrt(2) Gamma(n + 3/2) / Gamma(n + 1)` for
/// `n >= -1` (`epsilon_{-1} = 0`).
pub fn epsilon(n: i64) -> f64 {
    assert!(n >= -1, "epsilon defined for n >= -1");
    if n == -1 {
        return 0.0;
    }
    let nf = n as f64;
    omega(n) - std::f64::consts::SQRT_2 * gamma_half_ratio(nf + 1.0).expect("positive argument")
}

/// `tau_n = omega_{n+1} - omega_n`.
pub fn tau(n: usize) -> f64 {
    omega(n as i64 + 1) - omega(n as i64)
}

/// Outcome of scanning the second differences of `omega`.
#[derive(Debug, Clone, Copy)]
pub struct SecondDifferenceCheck {
    /// Most negative value of `omega_{k+2} - 2 omega_{k+1} + omega_k`.
    pub min_value: f64,
    /// Index attaining it (directly indexed; the minimum sits at k = 1).
    pub argmin: usize,
    /// The closed-form extreme `-sqrt(pi)/16`.
    pub expected: f64,
    pub pass: bool,
}

/// Scans `k <= 1000`: even-index second differences vanish, odd-index ones
/// are negative and increasing, with minimum `-sqrt(pi)/16` at `k = 1`.
pub fn second_difference_bound_check() -> SecondDifferenceCheck {
    let expected = -std::f64::consts::PI.sqrt() / 16.0;
    let omegas: Vec<f64> = (0..=1002).map(|k| omega(k as i64)).collect();
    let mut min_value = f64::INFINITY;
    let mut argmin = 0usize;
    let mut all_above = true;
    for k in 0..=1000usize {
        let dd = omegas[k + 2] - 2.0 * omegas[k + 1] + omegas[k];
        if dd < min_value {
            min_value = dd;
            argmin = k;
        }
        if dd < expected - 1e-12 {
            all_above = false;
        }
    }
    let pass = all_above && (min_value - expected).abs() <= 1e-12;
    SecondDifferenceCheck {
        min_value,
        argmin,
        expected,
        pass,
    }
}

/// Tabulated sequences for `n = 0..=n_max`, built incrementally in one pass.
///
/// The increments of `omega` have a closed form around each even index
/// (`omega_{n+1} - omega_n = omega_n / (2(n+2))` for even `n`, and the same
/// increment repeats once); the table carries the direct gamma-ratio value
/// and records the worst relative deviation of the incremental recurrence
/// from it as a built-in consistency check.
#[derive(Debug, Clone)]
pub struct SequenceTable {
    pub n_values: Vec<i64>,
    pub omega: Vec<f64>,
    pub chi: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub tau: Vec<f64>,
    /// `chi_n + Z0(1/2)` (tends to zero like `1/sqrt(n)`).
    pub chi_residual: Vec<f64>,
    /// Unperturbed eigenvalues `2k + 1`.
    pub unperturbed_eigs: Vec<f64>,
    /// `-Z0(1/2)`, the limit of `chi_n`.
    pub neg_z0_half: f64,
    /// Worst relative deviation between the incremental recurrence for
    /// `omega` and the direct formula.
    pub recurrence_residual: f64,
}

impl SequenceTable {
    pub fn new(n_max: usize) -> Result<Self> {
        let z0_half = z0(0.5)?;
        let mut n_values = Vec::with_capacity(n_max + 1);
        let mut omegas = Vec::with_capacity(n_max + 1);
        let mut chis = Vec::with_capacity(n_max + 1);
        let mut epsilons = Vec::with_capacity(n_max + 1);
        let mut taus = Vec::with_capacity(n_max + 1);
        let mut residuals = Vec::with_capacity(n_max + 1);
        let mut unperturbed = Vec::with_capacity(n_max + 1);

        let mut inv_sqrt_sum = KahanSum::new();
        let mut worst = 0.0f64;
        let mut omega_next = omega(0); // direct value for the upcoming index
        for n in 0..=n_max {
            let om = omega_next;
            let direct_next = omega(n as i64 + 1);
            // incremental prediction of omega_{n+1} from the closed-form
            // increment at the enclosing even index
            let incremental_next = if n % 2 == 0 {
                om * (1.0 + 1.0 / (2.0 * (n as f64 + 2.0)))
            } else {
                // odd n sits one past the even base n-1, whose closed-form
                // increment omega_{n-1} / (2(n+1)) repeats once
                om + omegas[n - 1] / (2.0 * (n as f64 + 1.0))
            };
            worst = worst.max((incremental_next - direct_next).abs() / direct_next);

            inv_sqrt_sum.add(1.0 / (2.0 * n as f64 + 1.0).sqrt());
            n_values.push(n as i64);
            omegas.push(om);
            chis.push(om - inv_sqrt_sum.value());
            epsilons.push(epsilon(n as i64));
            taus.push(direct_next - om);
            residuals.push(om - inv_sqrt_sum.value() + z0_half);
            unperturbed.push(2.0 * n as f64 + 1.0);
            omega_next = direct_next;
        }
        Ok(Self {
            n_values,
            omega: omegas,
            chi: chis,
            epsilon: epsilons,
            tau: taus,
            chi_residual: residuals,
            unperturbed_eigs: unperturbed,
            neg_z0_half: -z0_half,
            recurrence_residual: worst,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_closed_forms() {
        assert_eq!(omega(-1), 0.0);
        assert!((omega(0) - PI.sqrt()).abs() < 1e-13);
        assert!((omega(1) - 5.0 * PI.sqrt() / 4.0).abs() < 1e-13);
        assert!((omega(2) - 3.0 * PI.sqrt() / 2.0).abs() < 1e-12);
        assert!((omega(3) - 27.0 * PI.sqrt() / 16.0).abs() < 1e-12);
    }

    #[test]
    fn omega_sqrt_asymptotics() {
        // omega_n = sqrt(2n) + O(1/sqrt(n)): the deviation decays and the
        // sqrt(n)-scaled deviation stays bounded (it climbs toward its
        // limit 3 sqrt(2) / 4 from below)
        let dev = |n: i64| (omega(n) - (2.0 * n as f64).sqrt()).abs();
        assert!(dev(10_000) < 0.02);
        assert!(dev(1_000) < dev(100));
        assert!(dev(10_000) < dev(1_000));
        for n in [100i64, 1_000, 10_000] {
            let scaled = (n as f64).sqrt() * dev(n);
            assert!(scaled < 1.1, "n={n}: scaled deviation {scaled}");
        }
    }

    #[test]
    fn chi_closed_forms_and_limit() {
        assert!((chi(0) - (PI.sqrt() - 1.0)).abs() < 1e-13);
        // chi_1 = 5 sqrt(pi)/4 - 1 - 1/sqrt(3), evaluated from exact gammas
        let chi1 = 5.0 * PI.sqrt() / 4.0 - 1.0 - 1.0 / 3.0f64.sqrt();
        assert!((chi(1) - chi1).abs() < 1e-13);
        assert!((chi(1) - 0.6382170444).abs() < 1e-10);
        assert!((chi(10_000) - 0.4277279327).abs() < 0.005);
    }

    #[test]
    fn epsilon_values_and_decay() {
        let e0 = PI.sqrt() * (1.0 - 1.0 / 2.0f64.sqrt());
        assert!((epsilon(0) - e0).abs() < 1e-13);
        assert!((epsilon(0) - 0.5191397136).abs() < 1e-10);
        assert_eq!(epsilon(-1), 0.0);
        assert!(epsilon(10_000) < 0.01);
        // epsilon_n decays like 1/sqrt(n): the plain values drop along a
        // dyadic grid while sqrt(n) epsilon_n stays bounded (it increases
        // toward its limit 3 sqrt(2) / 8)
        let mut n = 100i64;
        let mut prev = epsilon(n);
        while n < 10_000 {
            n *= 2;
            let cur = epsilon(n);
            assert!(cur < prev, "epsilon grew at n={n}");
            assert!((n as f64).sqrt() * cur < 0.54, "scaled epsilon too big at {n}");
            prev = cur;
        }
    }

    #[test]
    fn tau_values() {
        assert!((tau(0) - PI.sqrt() / 4.0).abs() < 1e-13);
        assert!((tau(0) - 0.4431134627).abs() < 1e-10);
        // increments repeat across each even index
        assert!((tau(0) - tau(1)).abs() < 1e-13);
        assert!((tau(4) - tau(5)).abs() < 1e-13);
    }

    #[test]
    fn monotonicity_to_ten_thousand() {
        let table = SequenceTable::new(10_001).unwrap();
        for n in 0..10_000 {
            assert!(table.omega[n] > 0.0);
            assert!(
                table.omega[n + 1] > table.omega[n],
                "omega not strictly increasing at {n}"
            );
            assert!(table.tau[n] > 0.0, "tau not positive at {n}");
            // consecutive increments are equal, not strictly decreasing, at
            // even indices; the slop covers rounding of the equal pair
            assert!(
                table.tau[n + 1] <= table.tau[n] + 5e-12,
                "tau increased at {n}: {} -> {}",
                table.tau[n],
                table.tau[n + 1]
            );
            assert!(table.epsilon[n] >= 0.0, "epsilon negative at {n}");
        }
    }

    #[test]
    fn second_differences() {
        // even-index second difference vanishes
        assert!((omega(2) - 2.0 * omega(1) + omega(0)).abs() < 1e-13);
        let check = second_difference_bound_check();
        assert!(check.pass, "{check:?}");
        assert_eq!(check.argmin, 1);
        assert!((check.min_value + PI.sqrt() / 16.0).abs() < 1e-12);
        assert!((check.min_value - (-0.1107783657)).abs() < 1e-10);
    }

    #[test]
    fn table_consistency() {
        let table = SequenceTable::new(1000).unwrap();
        assert!(table.recurrence_residual < 1e-11);
        assert!((table.neg_z0_half - 0.4277279327).abs() < 1e-9);
        for n in [0usize, 1, 7, 512] {
            assert!((table.omega[n] - omega(n as i64)).abs() < 1e-14);
            assert!((table.chi[n] - chi(n)).abs() < 1e-12);
            assert!((table.tau[n] - tau(n)).abs() < 1e-12);
            assert!((table.chi_residual[n] - (table.chi[n] - table.neg_z0_half)).abs() < 1e-14);
            assert_eq!(table.unperturbed_eigs[n], 2.0 * n as f64 + 1.0);
        }
    }

    #[test]
    fn harmonic_split_identity() {
        // chi_n = omega_n - (1 - 1/sqrt(2)) sum_{k<=n} k^{-1/2}
        //         - sum_{k=n+1}^{2n+1} k^{-1/2}
        for n in [1usize, 10, 100, 1000] {
            let mut head = KahanSum::new();
            for k in 1..=n {
                head.add(1.0 / (k as f64).sqrt());
            }
            let mut tail = KahanSum::new();
            for k in (n + 1)..=(2 * n + 1) {
                tail.add(1.0 / (k as f64).sqrt());
            }
            let split = omega(n as i64)
                - (1.0 - 1.0 / 2.0f64.sqrt()) * head.value()
                - tail.value();
            assert!(
                (split - chi(n)).abs() < 1e-10,
                "n={n}: split {split} vs chi {}",
                chi(n)
            );
        }
    }

    #[test]
    fn harmonic_tail_integral_bracket() {
        // integral_{n+1}^{2n+2} x^{-1/2} <= sum_{k=n+1}^{2n+1} k^{-1/2}
        //   <= integral_{n+1}^{2n+2} (x-1)^{-1/2}
        for n in [1usize, 5, 64, 1000] {
            let mut tail = KahanSum::new();
            for k in (n + 1)..=(2 * n + 1) {
                tail.add(1.0 / (k as f64).sqrt());
            }
            let t = tail.value();
            let nf = n as f64;
            let lo = 2.0 * ((2.0 * nf + 2.0).sqrt() - (nf + 1.0).sqrt());
            let hi = 2.0 * ((2.0 * nf + 1.0).sqrt() - nf.sqrt());
            assert!(lo <= t + 1e-13 && t <= hi + 1e-13, "n={n}: {lo} {t} {hi}");
        }
    }
}
