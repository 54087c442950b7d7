//! Small numerical building blocks: compensated and double-double
//! summation, and the signed binomial coefficients that appear in every
//! selection-combining formula.

/// Largest antenna count accepted anywhere in the crate.
pub const MAX_ANTENNAS: usize = 16;

/// Neumaier's variant of Kahan summation.
///
/// Keeps a running correction term so that alternating sums of large,
/// nearly cancelling terms lose far less precision than a naive fold.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of absolute values of every term added so far. Used as a
    /// condition measure for the rounding error of the total.
    pub fn magnitude(&self) -> f64 {
        self.abs_sum
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        s.extend(iter);
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().collect::<CompensatedSum>().value()
}

/// Unevaluated sum `hi + lo` carrying roughly 106 bits of precision.
///
/// Only the operations the alternating sums need are provided.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Self { hi, lo }
    }

    pub fn mul(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Self { hi, lo }
    }

    pub fn scale(self, c: f64) -> Self {
        self.mul(Self::from_f64(c))
    }
}

/// `Σ_k (-1)^(k-1) C(n,k) r^k` for `k = 1..=n`, evaluated in double-double.
///
/// Mathematically this is `1 - (1 - r)^n`. The powers and the sum are
/// carried to ~106 bits, so the result is exact for the given `r` up to a
/// final rounding, even though the terms reach `C(16, 8) ≈ 1.3e4`.
pub fn alternating_power_sum(n: usize, r: f64) -> f64 {
    let r = DoubleDouble::from_f64(r);
    let mut power = DoubleDouble::ONE;
    let mut sum = DoubleDouble::default();
    for c in alternating_coefficients(n) {
        power = power.mul(r);
        sum = sum.add(power.scale(c));
    }
    sum.to_f64()
}

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the
    // division is exact.
    (1..=k).fold(1u64, |acc, i| acc * (n - k + i) / i)
}

/// Signed coefficients `(-1)^(k-1) C(n, k)` for `k = 1..=n`, indexed from 0.
///
/// These are the weights of the max-of-n exponential survival expansion:
/// `1 - (1 - e^{-x})^n = Σ_k c_k e^{-kx}`. They always sum to 1.
pub fn alternating_coefficients(n: usize) -> Vec<f64> {
    (1..=n as u64)
        .map(|k| {
            let c = binomial(n as u64, k) as f64;
            if k % 2 == 1 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// Integer residual of the bracketed double-binomial identity
/// `1 - Σ_k (-1)^{k-1}C(nr,k) - Σ_j (-1)^{j-1}C(nd,j) + Σ_k Σ_j (-1)^{k+j}C(nr,k)C(nd,j)`.
///
/// Evaluated in exact integer arithmetic; zero for every `nr, nd >= 1`.
pub fn binomial_identity_residual(n_r: usize, n_d: usize) -> i128 {
    let signed = |n: usize| -> Vec<i128> {
        (1..=n as u64)
            .map(|k| {
                let c = binomial(n as u64, k) as i128;
                if k % 2 == 1 {
                    c
                } else {
                    -c
                }
            })
            .collect()
    };
    let ck = signed(n_r);
    let dj = signed(n_d);
    let single_r: i128 = ck.iter().sum();
    let single_d: i128 = dj.iter().sum();
    let double: i128 = ck
        .iter()
        .flat_map(|c| dj.iter().map(move |d| c * d))
        .sum();
    1 - single_r - single_d + double
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn alternating_coefficients_sum_to_one() {
        for n in 1..=MAX_ANTENNAS {
            let s = compensated_sum(alternating_coefficients(n));
            assert_eq!(s, 1.0, "n = {n}");
        }
    }

    #[test]
    fn identity_is_exactly_zero() {
        for nr in 1..=MAX_ANTENNAS {
            for nd in 1..=MAX_ANTENNAS {
                assert_eq!(binomial_identity_residual(nr, nd), 0);
            }
        }
    }

    #[test]
    fn alternating_power_sum_matches_closed_form() {
        for n in 1..=MAX_ANTENNAS {
            for &r in &[0.0, 0.1, 0.5, 0.9, 0.97, 0.999_999] {
                let expect = 1.0 - (1.0f64 - r).powi(n as i32);
                let got = alternating_power_sum(n, r);
                assert!((got - expect).abs() < 1e-15, "n = {n}, r = {r}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn compensated_sum_recovers_cancelled_term() {
        let terms = [1e16, 1.0, -1e16];
        assert_eq!(terms.iter().sum::<f64>(), 0.0);
        assert_eq!(compensated_sum(terms), 1.0);
    }
}
