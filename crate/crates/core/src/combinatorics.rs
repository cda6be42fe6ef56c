//! Arbitrary-precision counting: binomials, factorials, 2-associated Stirling
//! numbers of the second kind and the exact hypergeometric pmf.
//!
//! Nothing in here touches floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::format::{parse_rational, rational_to_f64, rational_to_string};
use crate::{Error, Result};

/// A non-negative count of arbitrary size.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for BigCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<BigUint>()
            .map(BigCount)
            .map_err(|_| Error::Parse(format!("not a non-negative integer: {s:?}")))
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

/// An exact probability in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(BigRational);

impl ExactProb {
    pub fn zero() -> Self {
        ExactProb(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactProb(BigRational::one())
    }

    /// Builds `num / den`, rejecting a zero denominator or a value outside `[0, 1]`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Self::from_ratio(BigRational::new(num.into(), den))
    }

    pub fn from_ratio(r: BigRational) -> Result<Self> {
        if r.is_negative() || r > BigRational::one() {
            return Err(Error::Parse(format!(
                "{} is not a probability",
                rational_to_string(&r)
            )));
        }
        Ok(ExactProb(r))
    }

    pub(crate) fn from_counts(num: BigUint, den: BigUint) -> Self {
        debug_assert!(!den.is_zero() && num <= den);
        ExactProb(BigRational::new(num.into(), den.into()))
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational_to_string(&self.0))
    }
}

impl FromStr for ExactProb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_ratio(parse_rational(s)?)
    }
}

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactProb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

/// `C(n, k)`, which is zero whenever `k < 0` or `k > n`.
pub fn binomial(n: u32, k: i64) -> BigCount {
    BigCount(binomial_u(n, k))
}

pub(crate) fn binomial_u(n: u32, k: i64) -> BigUint {
    if k < 0 || k > n as i64 {
        return BigUint::zero();
    }
    let k = (k as u32).min(n - k as u32);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc = C(n, i) here, so the division is exact
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u32) -> BigCount {
    BigCount(falling_u(n, n))
}

/// `t (t-1) ... (t-s+1)`; the empty product is 1 and the result is 0 once a
/// factor reaches zero (`s > t`).
pub fn falling_factorial(t: u32, s: u32) -> BigCount {
    BigCount(falling_u(t, s))
}

pub(crate) fn falling_u(t: u32, s: u32) -> BigUint {
    if s > t {
        return BigUint::zero();
    }
    (t - s + 1..=t).fold(BigUint::one(), |acc, f| acc * f)
}

/// `C(s,d) C(c,k-d) / C(s+c,k)`: the chance that `d` of `k` tokens drawn
/// without replacement from `s` singles and `c` collided tokens are singles.
pub fn hypergeometric_pmf(s: u32, c: u32, k: u32, d: i64) -> Result<ExactProb> {
    let population = s + c;
    if k > population {
        return Err(Error::TooManyDraws {
            draws: k,
            population,
        });
    }
    let num = binomial_u(s, d) * binomial_u(c, k as i64 - d);
    Ok(ExactProb::from_counts(
        num,
        binomial_u(population, k as i64),
    ))
}

/// Memoized `S₂(n, k)`: the number of partitions of an `n`-set into `k`
/// blocks of size at least two.
///
/// Rows are filled by `S₂(n+1,k) = k S₂(n,k) + n S₂(n-1,k-1)` from
/// `S₂(0,0) = 1`; every other entry with `n <= 0`, `k <= 0` or `k > n/2` is
/// zero. That base case reproduces `S₂(2,1) = 1` and keeps the all-singles
/// configuration in the success pmf.
///
/// The table only grows. Grow it to the largest `n` needed, then share it
/// by reference: [`StirlingTable::value`] never mutates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingTable {
    // rows[n][k] for 0 <= k <= n/2
    rows: Vec<Vec<BigUint>>,
}

impl Default for StirlingTable {
    fn default() -> Self {
        Self::new()
    }
}

impl StirlingTable {
    pub fn new() -> Self {
        StirlingTable {
            rows: vec![vec![BigUint::one()]],
        }
    }

    pub fn with_max_n(max_n: u32) -> Self {
        let mut table = Self::new();
        table.grow_to(max_n);
        table
    }

    pub fn max_n(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    pub fn grow_to(&mut self, max_n: u32) {
        while self.max_n() < max_n {
            let n = self.max_n() as usize;
            let next = (0..=n.div_ceil(2))
                .map(|k| {
                    let mut v = self.lookup(n, k) * k;
                    if k > 0 && n > 0 {
                        v += self.lookup(n - 1, k - 1) * n;
                    }
                    v
                })
                .collect();
            self.rows.push(next);
        }
    }

    fn lookup(&self, n: usize, k: usize) -> BigUint {
        self.rows[n].get(k).cloned().unwrap_or_default()
    }

    /// Reads `S₂(n, k)` without growing. Fails only if `n` lies beyond the
    /// table; every other out-of-range argument is a structural zero.
    pub fn value(&self, n: i64, k: i64) -> Result<BigCount> {
        if n < 0 || k < 0 {
            return Ok(BigCount::zero());
        }
        if n > self.max_n() as i64 {
            return Err(Error::TableTooSmall {
                max_n: self.max_n(),
                n: n.min(u32::MAX as i64) as u32,
            });
        }
        Ok(BigCount(self.lookup(n as usize, k as usize)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableDump::from(self)).expect("table serializes")
    }

    /// Loads a dump written by [`StirlingTable::to_json`], checking that the
    /// rows have the right shape and satisfy the recurrence.
    pub fn from_json(s: &str) -> Result<Self> {
        let dump: TableDump = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if dump.rows.len() != dump.max_n as usize + 1 {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                dump.max_n + 1,
                dump.rows.len()
            )));
        }
        let loaded = StirlingTable {
            rows: dump
                .rows
                .into_iter()
                .map(|row| row.into_iter().map(BigCount::into_inner).collect())
                .collect(),
        };
        let reference = StirlingTable::with_max_n(dump.max_n);
        if loaded != reference {
            return Err(Error::Parse(
                "stirling table violates S2(n+1,k) = k S2(n,k) + n S2(n-1,k-1)".into(),
            ));
        }
        Ok(loaded)
    }
}

#[derive(Serialize, Deserialize)]
struct TableDump {
    max_n: u32,
    rows: Vec<Vec<BigCount>>,
}

impl From<&StirlingTable> for TableDump {
    fn from(t: &StirlingTable) -> Self {
        TableDump {
            max_n: t.max_n(),
            rows: t
                .rows
                .iter()
                .map(|row| row.iter().cloned().map(BigCount).collect())
                .collect(),
        }
    }
}

/// `S₂(n, k)`, growing `table` on demand.
pub fn stirling2_assoc(n: i64, k: i64, table: &mut StirlingTable) -> BigCount {
    if n > 0 {
        table.grow_to(n.min(u32::MAX as i64) as u32);
    }
    table.value(n, k).expect("table grown to n")
}

pub(crate) fn pow_u(base: u32, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}
