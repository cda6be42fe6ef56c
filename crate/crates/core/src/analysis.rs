//! Closed-form distribution of `S_D`, the number of users whose data
//! transmission succeeds in one access frame.
//!
//! A frame splits the `T` users into `s` tokens with a single activator and
//! `c` tokens with two or more. The probability of a given split is
//!
//! ```text
//! C(M,s) · T(T-1)…(T-s+1) · C(M-s,c) · S₂(T-s,c) · c! / M^T
//! ```
//!
//! and, given the split, the base station's uniform choice of
//! `k = min(s+c, K)` active tokens yields `d` singles with hypergeometric
//! probability `C(s,d) C(c,k-d) / C(s+c,k)`. Summing over all splits with
//! `0 <= s <= min(M,T)` and `0 <= c <= min(M,T) - s` gives the pmf.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_u, falling_u, pow_u, ExactProb, StirlingTable};
use crate::config::SystemConfig;
use crate::format::decimal;
use crate::{Error, Result};

/// A realized contention phase: `s` single tokens and `c` collided tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ContentionOutcome {
    pub singles: u32,
    pub collisions: u32,
}

impl ContentionOutcome {
    pub fn new(singles: u32, collisions: u32) -> Self {
        ContentionOutcome {
            singles,
            collisions,
        }
    }

    pub fn active(&self) -> u32 {
        self.singles + self.collisions
    }

    /// `k = min(s + c, K)`: how many active tokens receive a data slot.
    pub fn granted(&self, cfg: &SystemConfig) -> u32 {
        self.active().min(cfg.data_slots)
    }

    /// Whether `T` users over `M` tokens can produce this split: it has to fit
    /// in the token set and each collided token needs at least two users.
    pub fn is_feasible(&self, cfg: &SystemConfig) -> bool {
        self.active() <= cfg.tokens
            && (self.singles as u64 + 2 * self.collisions as u64) <= cfg.users as u64
            && (self.collisions > 0 || self.singles == cfg.users)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PmfKind {
    Exact,
    Empirical,
}

/// Distribution of `S_D` over `d = 0 ..= min(M, K, T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessPmf {
    pub config: SystemConfig,
    pub kind: PmfKind,
    mass: Vec<ExactProb>,
}

impl SuccessPmf {
    /// Checks the support length and that the masses sum to exactly one.
    pub fn new(config: SystemConfig, kind: PmfKind, mass: Vec<ExactProb>) -> Result<Self> {
        let expected = config.max_successes() as usize + 1;
        if mass.len() != expected {
            return Err(Error::Parse(format!(
                "pmf for {config:?} needs {expected} masses, got {}",
                mass.len()
            )));
        }
        let total = mass
            .iter()
            .fold(num_rational::BigRational::zero(), |acc, p| acc + p.ratio());
        if !total.is_one() {
            return Err(Error::Parse(format!("pmf masses sum to {total}, not 1")));
        }
        Ok(SuccessPmf { config, kind, mass })
    }

    pub fn mass(&self) -> &[ExactProb] {
        &self.mass
    }

    /// `P(S_D = d)`, zero outside the support.
    pub fn at(&self, d: u32) -> ExactProb {
        self.mass
            .get(d as usize)
            .cloned()
            .unwrap_or_else(ExactProb::zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.mass.iter().map(ExactProb::to_f64).collect()
    }

    /// `E[S_D]` as an exact rational.
    pub fn mean(&self) -> num_rational::BigRational {
        self.mass
            .iter()
            .enumerate()
            .fold(num_rational::BigRational::zero(), |acc, (d, p)| {
                acc + p.ratio() * num_rational::BigRational::from_integer(d.into())
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PmfDoc::from(self)).expect("pmf serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PmfDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let config = SystemConfig::new(doc.tokens, doc.data_slots, doc.users)?;
        SuccessPmf::new(config, doc.kind, doc.mass)
    }

    /// `d,probability,exact` rows; `probability` carries 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,probability,exact\n");
        for (d, p) in self.mass.iter().enumerate() {
            out.push_str(&format!("{d},{},{p}\n", decimal(p.to_f64())));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct PmfDoc {
    #[serde(rename = "M")]
    tokens: u32,
    #[serde(rename = "K")]
    data_slots: u32,
    #[serde(rename = "T")]
    users: u32,
    kind: PmfKind,
    mass: Vec<ExactProb>,
}

impl From<&SuccessPmf> for PmfDoc {
    fn from(p: &SuccessPmf) -> Self {
        PmfDoc {
            tokens: p.config.tokens,
            data_slots: p.config.data_slots,
            users: p.config.users,
            kind: p.kind,
            mass: p.mass.clone(),
        }
    }
}

/// Number of the `M^T` equally likely token assignments that produce the
/// split `(s, c)`.
fn outcome_weight(cfg: &SystemConfig, s: u32, c: u32, table: &StirlingTable) -> Result<BigUint> {
    let (m, t) = (cfg.tokens, cfg.users);
    let stirling = table.value(t as i64 - s as i64, c as i64)?.into_inner();
    if stirling.is_zero() {
        return Ok(stirling);
    }
    Ok(binomial_u(m, s as i64)
        * falling_u(t, s)
        * binomial_u(m - s, c as i64)
        * stirling
        * falling_u(c, c))
}

/// Probability that the contention phase ends with exactly `s` singles and
/// `c` collided tokens. Infeasible splits have probability zero.
pub fn outcome_probability(cfg: &SystemConfig, s: u32, c: u32) -> Result<ExactProb> {
    cfg.validate()?;
    if s as u64 + c as u64 > cfg.tokens as u64 {
        return Err(Error::TooManyActiveTokens {
            singles: s,
            collisions: c,
            tokens: cfg.tokens,
        });
    }
    if s > cfg.users {
        return Ok(ExactProb::zero());
    }
    let table = StirlingTable::with_max_n(cfg.users);
    let weight = outcome_weight(cfg, s, c, &table)?;
    Ok(ExactProb::from_counts(weight, pow_u(cfg.tokens, cfg.users)))
}

/// Exact pmf of `S_D`.
pub fn success_pmf(cfg: &SystemConfig) -> Result<SuccessPmf> {
    let table = StirlingTable::with_max_n(cfg.users);
    success_pmf_with(cfg, &table)
}

/// [`success_pmf`] against a caller-owned table, which must cover `n = T`.
/// Lets several evaluations (possibly on different threads) share one table.
pub fn success_pmf_with(cfg: &SystemConfig, table: &StirlingTable) -> Result<SuccessPmf> {
    cfg.validate()?;
    if table.max_n() < cfg.users {
        return Err(Error::TableTooSmall {
            max_n: table.max_n(),
            n: cfg.users,
        });
    }
    let max_active = cfg.max_active();
    let d_max = cfg.max_successes() as usize;

    struct Term {
        singles: u32,
        collisions: u32,
        granted: u32,
        weight: BigUint,
        draws: BigUint,
    }

    let mut terms = Vec::new();
    let mut lcm = BigUint::one();
    for s in 0..=max_active {
        for c in 0..=max_active - s {
            let weight = outcome_weight(cfg, s, c, table)?;
            if weight.is_zero() {
                continue;
            }
            let outcome = ContentionOutcome::new(s, c);
            let granted = outcome.granted(cfg);
            let draws = binomial_u(s + c, granted as i64);
            lcm = lcm.lcm(&draws);
            terms.push(Term {
                singles: s,
                collisions: c,
                granted,
                weight,
                draws,
            });
        }
    }

    // Everything is put over the common denominator M^T · lcm(C(s+c, k)).
    let mut numerators = vec![BigUint::zero(); d_max + 1];
    for term in &terms {
        let scale = &term.weight * (&lcm / &term.draws);
        let lo = term.granted.saturating_sub(term.collisions);
        let hi = term.singles.min(term.granted);
        for d in lo..=hi {
            let ways = binomial_u(term.singles, d as i64)
                * binomial_u(term.collisions, (term.granted - d) as i64);
            numerators[d as usize] += &scale * ways;
        }
    }
    let denominator = pow_u(cfg.tokens, cfg.users) * lcm;
    let mass = numerators
        .into_iter()
        .map(|n| ExactProb::from_counts(n, denominator.clone()))
        .collect();
    Ok(SuccessPmf {
        config: *cfg,
        kind: PmfKind::Exact,
        mass,
    })
}

/// Floating-point pmf from [`success_pmf_float`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatPmf {
    #[serde(flatten)]
    pub config: SystemConfig,
    pub kind: String,
    pub mass: Vec<f64>,
}

impl FloatPmf {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,probability\n");
        for (d, p) in self.mass.iter().enumerate() {
            out.push_str(&format!("{d},{}\n", decimal(*p)));
        }
        out
    }
}

// ln(f64::MIN_POSITIVE); below this a mass can no longer be held as a normal f64
const LN_MIN_NORMAL: f64 = -708.3964185322641;

/// Log-domain evaluation of the same sum, for configurations where exact
/// rationals get slow (hundreds of users). Every term is carried as a
/// logarithm built from ln-factorials and a log-space Stirling table, and the
/// terms for each `d` are combined with log-sum-exp.
///
/// Fails with [`Error::PrecisionLoss`] when a nonzero mass would underflow a
/// normal `f64`.
pub fn success_pmf_float(cfg: &SystemConfig) -> Result<FloatPmf> {
    cfg.validate()?;
    let (m, t) = (cfg.tokens, cfg.users);
    let ln_fact = ln_factorials(m.max(t) as usize);
    let ln_binom =
        |n: u32, k: u32| ln_fact[n as usize] - ln_fact[k as usize] - ln_fact[(n - k) as usize];
    let ln_stirling = ln_stirling_table(t as usize);
    let ln_total = t as f64 * (m as f64).ln();

    let max_active = cfg.max_active();
    let d_max = cfg.max_successes() as usize;
    let mut log_terms: Vec<Vec<f64>> = vec![Vec::new(); d_max + 1];
    for s in 0..=max_active {
        for c in 0..=max_active - s {
            let ln_s2 = ln_stirling[(t - s) as usize]
                .get(c as usize)
                .copied()
                .unwrap_or(f64::NEG_INFINITY);
            if ln_s2 == f64::NEG_INFINITY {
                continue;
            }
            let ln_weight = ln_binom(m, s)
                + (ln_fact[t as usize] - ln_fact[(t - s) as usize])
                + ln_binom(m - s, c)
                + ln_s2
                + ln_fact[c as usize]
                - ln_total;
            let k = (s + c).min(cfg.data_slots);
            let ln_draws = ln_binom(s + c, k);
            for d in k.saturating_sub(c)..=s.min(k) {
                let ln_hyper = ln_binom(s, d) + ln_binom(c, k - d) - ln_draws;
                log_terms[d as usize].push(ln_weight + ln_hyper);
            }
        }
    }

    let mut mass = Vec::with_capacity(d_max + 1);
    for (d, terms) in log_terms.iter().enumerate() {
        if terms.is_empty() {
            mass.push(0.0);
            continue;
        }
        let log_mass = log_sum_exp(terms);
        if log_mass < LN_MIN_NORMAL {
            return Err(Error::PrecisionLoss {
                d: d as u32,
                log_mass,
            });
        }
        mass.push(log_mass.exp());
    }
    Ok(FloatPmf {
        config: *cfg,
        kind: "float".into(),
        mass,
    })
}

/// `ln n!` for `n = 0 ..= max`.
fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(acc);
    for i in 1..=max {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `ln S₂(n, k)` rows for `n = 0 ..= max_n`, via the same recurrence as
/// [`StirlingTable`]. Zero entries are `-inf`.
fn ln_stirling_table(max_n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0]];
    let get = |rows: &Vec<Vec<f64>>, n: usize, k: usize| -> f64 {
        rows[n].get(k).copied().unwrap_or(f64::NEG_INFINITY)
    };
    for n in 0..max_n {
        let row = (0..=n.div_ceil(2))
            .map(|k| {
                let a = if k > 0 {
                    (k as f64).ln() + get(&rows, n, k)
                } else {
                    f64::NEG_INFINITY
                };
                let b = if k > 0 && n > 0 {
                    (n as f64).ln() + get(&rows, n - 1, k - 1)
                } else {
                    f64::NEG_INFINITY
                };
                log_add(a, b)
            })
            .collect();
        rows.push(row);
    }
    rows
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
