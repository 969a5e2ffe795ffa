//! Exact arithmetic for the geometric bucketing machinery.
//!
//! Every quantity the approximation scheme compares is kept as an exact
//! rational: the slack `eps`, the bucket base `q = 1 + eps'`, and the
//! ceiling logarithm used to place values into buckets. No floating point
//! is involved anywhere.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;

pub type Rational = BigRational;

/// Level assigned to a zero value by the ceiling logarithm.
pub const LOG_OF_ZERO: i64 = -1;

/// Parses a rational from `"a/b"`, a decimal string like `"0.5"`, or a
/// plain integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::BadRational(text.to_string());
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let int_part = if int_part.is_empty() || int_part == "-" {
            format!("{}0", int_part)
        } else {
            int_part.to_string()
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let whole: BigInt = int_part.parse().map_err(|_| bad())?;
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mag = whole.abs() * &scale + frac;
        let mag = if negative { -mag } else { mag };
        return Ok(Rational::new(mag, scale));
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn rational_from_uint(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

/// q^k for any integer k, exact.
pub fn pow_rational(q: &Rational, k: i64) -> Rational {
    q.pow(i32::try_from(k).expect("exponent fits i32"))
}

/// The operator written `ceil-log_q` below: the smallest integer `k` with
/// `q^k >= alpha`, or `-1` when `alpha = 0`.
///
/// All comparisons are cross-multiplied integer comparisons; the exponent
/// is located by doubling followed by binary search.
///
/// ```
/// use ef_icfd::numerics::{ceil_log, parse_rational};
/// let q = parse_rational("2").unwrap();
/// assert_eq!(ceil_log(&q, &parse_rational("8").unwrap()).unwrap(), 3);
/// assert_eq!(ceil_log(&q, &parse_rational("0").unwrap()).unwrap(), -1);
/// ```
pub fn ceil_log(q: &Rational, alpha: &Rational) -> Result<i64> {
    if *q <= Rational::one() {
        return Err(Error::BadLogBase(q.to_string()));
    }
    if alpha.is_negative() {
        return Err(Error::NegativeLogArgument(alpha.to_string()));
    }
    if alpha.is_zero() {
        return Ok(LOG_OF_ZERO);
    }
    // Invariant for the search: q^lo < alpha <= q^hi.
    let one = Rational::one();
    let (mut lo, mut hi): (i64, i64);
    if *alpha > one {
        let mut e = 1i64;
        while pow_rational(q, e) < *alpha {
            e *= 2;
        }
        lo = e / 2;
        hi = e;
        if lo == 0 && pow_rational(q, 0) >= *alpha {
            return Ok(0);
        }
    } else {
        // alpha <= 1 = q^0, so the answer is <= 0.
        let mut e = -1i64;
        while pow_rational(q, e) >= *alpha {
            e *= 2;
        }
        lo = e;
        hi = e / 2;
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if pow_rational(q, mid) >= *alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Fractional bits kept when the positive root of `x^2 + 3x = eps` is
/// irrational and must be rounded down to a dyadic rational.
const EPS_PRIME_FRACTION_BITS: u32 = 64;

/// A positive rational lower bound on the positive root of
/// `x^2 + 3x = eps`, exact whenever the root is rational.
///
/// Rounding down is sound for the scheme: any positive `r` with
/// `r^2 + 3r <= eps` yields a bucket base whose envy chain still ends at
/// `(1 + eps)`; only the bucket count grows.
pub fn eps_prime_of(eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEps(eps.to_string()));
    }
    let a = eps.numer().to_biguint().expect("positive numerator");
    let b = eps.denom().to_biguint().expect("positive denominator");
    // root = (sqrt(D) - 3b) / (2b) with D = (9b + 4a) * b.
    let disc = (BigUint::from(9u32) * &b + BigUint::from(4u32) * &a) * &b;
    let s = disc.sqrt();
    if &s * &s == disc {
        // Rational root, return it exactly.
        let root = Rational::new(
            BigInt::from(s) - BigInt::from(3u32) * BigInt::from(b.clone()),
            BigInt::from(2u32) * BigInt::from(b),
        );
        debug_assert!(root.is_positive());
        return Ok(root);
    }
    // Largest k with (2bk + 3b*2^f)^2 <= D * 2^(2f), i.e. the largest
    // dyadic k/2^f not exceeding the root.
    let shift = EPS_PRIME_FRACTION_BITS;
    let s2 = (disc << (2 * shift)).sqrt();
    let offset = (BigUint::from(3u32) * &b) << shift;
    if s2 <= offset {
        return Err(Error::EpsTooSmall(eps.to_string()));
    }
    let k = (s2 - offset) / (BigUint::from(2u32) * &b);
    if k.is_zero() {
        return Err(Error::EpsTooSmall(eps.to_string()));
    }
    let r = Rational::new(BigInt::from(k), BigInt::one() << shift);
    debug_assert!(&r * &r + Rational::from_integer(3.into()) * &r <= *eps);
    Ok(r)
}

/// Bucket count: `max(1, 1 + ceil-log_q(p / eps'))`.
pub fn compute_t(q: &Rational, eps_prime: &Rational, p: usize) -> Result<i64> {
    debug_assert!(p >= 1);
    let ratio = Rational::from_integer(BigInt::from(p)) / eps_prime;
    let raw = 1 + ceil_log(q, &ratio)?;
    Ok(raw.max(1))
}

/// Parameters derived from the user's slack `eps` and the budget `p`.
#[derive(Debug, Clone)]
pub struct ApproxParams {
    pub eps: Rational,
    pub eps_prime: Rational,
    pub q: Rational,
    pub t: i64,
    /// q^0 .. q^(t+1), reduced; reused throughout a solve.
    pub powers: Vec<Rational>,
}

impl ApproxParams {
    /// Derives `eps'`, `q` and `t` for an instance with budget `p >= 1`.
    /// `eps_prime_override`, when given, must itself satisfy
    /// `x^2 + 3x <= eps`.
    pub fn new(eps: Rational, p: usize, eps_prime_override: Option<Rational>) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::NonPositiveEps(eps.to_string()));
        }
        let eps_prime = match eps_prime_override {
            Some(r) => {
                if !r.is_positive() || &r * &r + Rational::from_integer(3.into()) * &r > eps {
                    return Err(Error::BadRational(format!(
                        "epsilon-prime override {} violates x^2 + 3x <= eps",
                        r
                    )));
                }
                r
            }
            None => eps_prime_of(&eps)?,
        };
        let q = Rational::one() + &eps_prime;
        let t = compute_t(&q, &eps_prime, p.max(1))?;
        let powers = (0..=t + 1).map(|k| pow_rational(&q, k)).collect();
        let params = ApproxParams {
            eps,
            eps_prime,
            q,
            t,
            powers,
        };
        // q^(t-1) >= p / eps' must hold by construction.
        debug_assert!(
            p == 0
                || pow_rational(&params.q, params.t - 1)
                    >= Rational::from_integer(BigInt::from(p)) / &params.eps_prime
        );
        Ok(params)
    }

    pub fn ceil_log_uint(&self, value: &BigUint) -> i64 {
        if value.is_zero() {
            return LOG_OF_ZERO;
        }
        ceil_log(&self.q, &rational_from_uint(value)).expect("q > 1 by construction")
    }
}

/// Initial target exponent: `ceil-log_q(p * M)` with `M` the largest
/// valuation in the instance; `-1` when all valuations are zero.
pub fn mu_init(inst: &Instance, params: &ApproxParams) -> i64 {
    let m_max = inst.max_valuation();
    if m_max.is_zero() {
        return LOG_OF_ZERO;
    }
    params.ceil_log_uint(&(m_max * BigUint::from(inst.p())))
}
