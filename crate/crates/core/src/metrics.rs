//! Success rate `σ = E[S_D]/T`, efficiency `ρ = E[S_D]/(K+1)`, sweeps over
//! `T` or `K`, and the efficiency-maximizing number of data slots.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::analysis::success_pmf_with;
use crate::combinatorics::StirlingTable;
use crate::config::SystemConfig;
use crate::format::{decimal, opt_rational_str, rational_str, rational_to_f64};
use crate::simulator::DetectionMode;
use crate::{Error, Result};

/// Per-frame figures of merit for one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameMetrics {
    #[serde(flatten)]
    pub config: SystemConfig,
    /// `E[S_D]`, users per frame.
    #[serde(with = "rational_str")]
    pub expected_successes: BigRational,
    /// `σ`; `None` only for `T = 0`.
    #[serde(with = "opt_rational_str")]
    pub success_rate: Option<BigRational>,
    /// `ρ`, successes per access-frame slot.
    #[serde(with = "rational_str")]
    pub efficiency: BigRational,
}

pub const METRICS_CSV_HEADER: &str = "M,K,T,expected_successes,success_rate,efficiency";

impl FrameMetrics {
    /// Derives `σ` and `ρ` from a mean number of successes.
    pub fn from_mean(config: SystemConfig, expected_successes: BigRational) -> Self {
        let success_rate = (config.users > 0)
            .then(|| &expected_successes / BigRational::from_integer(config.users.into()));
        let efficiency = &expected_successes / BigRational::from_integer(config.frame_len().into());
        FrameMetrics {
            config,
            expected_successes,
            success_rate,
            efficiency,
        }
    }

    /// One CSV row matching [`METRICS_CSV_HEADER`]. An undefined `σ` is left empty.
    pub fn csv_row(&self) -> String {
        let c = &self.config;
        format!(
            "{},{},{},{},{},{}",
            c.tokens,
            c.data_slots,
            c.users,
            decimal(rational_to_f64(&self.expected_successes)),
            self.success_rate
                .as_ref()
                .map(|r| decimal(rational_to_f64(r)))
                .unwrap_or_default(),
            decimal(rational_to_f64(&self.efficiency)),
        )
    }
}

fn exact_metrics(cfg: &SystemConfig, table: &StirlingTable) -> Result<FrameMetrics> {
    let pmf = success_pmf_with(cfg, table)?;
    Ok(FrameMetrics::from_mean(*cfg, pmf.mean()))
}

pub fn frame_metrics(cfg: &SystemConfig) -> Result<FrameMetrics> {
    exact_metrics(cfg, &StirlingTable::with_max_n(cfg.users))
}

/// `σ = E[S_D | T] / T`. Undefined (an error) for `T = 0`.
pub fn success_rate(cfg: &SystemConfig) -> Result<BigRational> {
    if cfg.users == 0 {
        return Err(Error::NoUsers);
    }
    Ok(frame_metrics(cfg)?.success_rate.expect("T >= 1"))
}

/// `ρ = E[S_D | T] / (K + 1)`.
pub fn efficiency(cfg: &SystemConfig) -> Result<BigRational> {
    Ok(frame_metrics(cfg)?.efficiency)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Users,
    DataSlots,
}

impl SweepAxis {
    pub fn apply(self, base: SystemConfig, value: u32) -> Result<SystemConfig> {
        match self {
            SweepAxis::Users => base.with_users(value),
            SweepAxis::DataSlots => base.with_data_slots(value),
        }
    }
}

/// Where a sweep's numbers came from. Exact and simulated rows never share a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Simulated {
        rng: String,
        seed: u64,
        iterations: u64,
        mode: DetectionMode,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Parameters held fixed; the swept one carries the first axis value.
    pub base: SystemConfig,
    pub axis: SweepAxis,
    pub start: u32,
    pub end: u32,
    pub provenance: Provenance,
    pub rows: Vec<FrameMetrics>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(METRICS_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sweep serializes")
    }
}

pub(crate) fn check_range(start: u32, end: u32) -> Result<()> {
    if start > end {
        return Err(Error::EmptyRange { start, end });
    }
    Ok(())
}

/// Exact metrics for every value of `axis` in `start ..= end`, in axis order.
pub fn sweep(base: SystemConfig, axis: SweepAxis, start: u32, end: u32) -> Result<SweepReport> {
    check_range(start, end)?;
    let configs = (start..=end)
        .map(|v| axis.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let max_users = configs.iter().map(|c| c.users).max().unwrap_or(0);
    let table = StirlingTable::with_max_n(max_users);
    let rows = map_configs(&configs, |cfg| exact_metrics(cfg, &table))?;
    Ok(SweepReport {
        base: axis.apply(base, start)?,
        axis,
        start,
        end,
        provenance: Provenance::Exact,
        rows,
    })
}

#[cfg(feature = "parallel")]
pub(crate) fn map_configs<T: Send>(
    configs: &[SystemConfig],
    f: impl Fn(&SystemConfig) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    configs.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_configs<T: Send>(
    configs: &[SystemConfig],
    f: impl Fn(&SystemConfig) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    configs.iter().map(f).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalSlots {
    #[serde(rename = "M")]
    pub tokens: u32,
    #[serde(rename = "T")]
    pub users: u32,
    pub k_max: u32,
    /// `K*`
    pub data_slots: u32,
    /// `ρ(K*)`
    #[serde(with = "rational_str")]
    pub efficiency: BigRational,
}

impl OptimalSlots {
    pub fn csv(&self) -> String {
        format!(
            "M,T,k_max,optimal_K,efficiency\n{},{},{},{},{}\n",
            self.tokens,
            self.users,
            self.k_max,
            self.data_slots,
            decimal(rational_to_f64(&self.efficiency))
        )
    }
}

/// Exhaustive search for the `K` in `1 ..= k_max` maximizing `ρ`.
/// Ties go to the smaller `K`.
pub fn optimal_data_slots(tokens: u32, users: u32, k_max: u32) -> Result<OptimalSlots> {
    if users == 0 {
        return Err(Error::NoUsers);
    }
    if k_max == 0 {
        return Err(Error::NoDataSlots);
    }
    let report = sweep(
        SystemConfig::new(tokens, 1, users)?,
        SweepAxis::DataSlots,
        1,
        k_max,
    )?;
    let mut best = &report.rows[0];
    for row in &report.rows[1..] {
        if row.efficiency > best.efficiency {
            best = row;
        }
    }
    Ok(OptimalSlots {
        tokens,
        users,
        k_max,
        data_slots: best.config.data_slots,
        efficiency: best.efficiency.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::rational_to_string;

    fn cfg(m: u32, k: u32, t: u32) -> SystemConfig {
        SystemConfig::new(m, k, t).unwrap()
    }

    fn s(r: &BigRational) -> String {
        rational_to_string(r)
    }

    #[test]
    fn success_rate_examples() {
        assert_eq!(s(&success_rate(&cfg(2, 1, 2)).unwrap()), "1/4");
        assert_eq!(s(&success_rate(&cfg(2, 2, 2)).unwrap()), "1/2");
        assert_eq!(s(&success_rate(&cfg(8, 4, 1)).unwrap()), "1/1");
        assert_eq!(success_rate(&cfg(8, 4, 0)), Err(Error::NoUsers));
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(s(&efficiency(&cfg(2, 1, 2)).unwrap()), "1/4");
        assert_eq!(s(&efficiency(&cfg(8, 4, 1)).unwrap()), "1/5");
        assert_eq!(s(&efficiency(&cfg(2, 2, 2)).unwrap()), "1/3");
        assert_eq!(s(&efficiency(&cfg(8, 4, 0)).unwrap()), "0/1");
    }

    #[test]
    fn sweep_over_users_decreases_success_rate() {
        let report = sweep(cfg(8, 8, 1), SweepAxis::Users, 1, 30).unwrap();
        assert_eq!(report.rows.len(), 30);
        for pair in report.rows.windows(2) {
            assert!(pair[1].success_rate < pair[0].success_rate);
            assert_eq!(pair[1].config.users, pair[0].config.users + 1);
        }
    }

    #[test]
    fn sweep_over_slots_saturates_at_m() {
        let report = sweep(cfg(8, 8, 12), SweepAxis::DataSlots, 8, 16).unwrap();
        assert_eq!(report.rows.len(), 9);
        let first = &report.rows[0].success_rate;
        assert!(report.rows.iter().all(|r| &r.success_rate == first));
    }

    #[test]
    fn sweep_single_token_single_user() {
        let report = sweep(cfg(1, 1, 1), SweepAxis::DataSlots, 1, 3).unwrap();
        let rhos: Vec<_> = report.rows.iter().map(|r| s(&r.efficiency)).collect();
        assert_eq!(rhos, ["1/2", "1/3", "1/4"]);
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        assert_eq!(
            sweep(cfg(8, 8, 1), SweepAxis::Users, 5, 4),
            Err(Error::EmptyRange { start: 5, end: 4 })
        );
        assert_eq!(
            sweep(cfg(8, 8, 1), SweepAxis::DataSlots, 0, 4),
            Err(Error::NoDataSlots)
        );
    }

    #[test]
    fn optimal_slots_examples() {
        let o = optimal_data_slots(1, 1, 8).unwrap();
        assert_eq!((o.data_slots, s(&o.efficiency)), (1, "1/2".to_string()));
        // rho(1) = 1/4, rho(2) = 1/3, rho(3) = 1/4, rho(4) = 1/5
        let o = optimal_data_slots(2, 2, 4).unwrap();
        assert_eq!((o.data_slots, s(&o.efficiency)), (2, "1/3".to_string()));
        let o = optimal_data_slots(8, 12, 8).unwrap();
        assert!(o.data_slots < 8);
        assert_eq!(optimal_data_slots(8, 0, 8), Err(Error::NoUsers));
        assert_eq!(optimal_data_slots(8, 3, 0), Err(Error::NoDataSlots));
    }

    #[test]
    fn optimal_slots_tie_breaks_to_smaller_k() {
        // M = 1, T = 2: the lone token always collides, rho = 0 everywhere
        let o = optimal_data_slots(1, 2, 5).unwrap();
        assert_eq!(o.data_slots, 1);
        assert_eq!(s(&o.efficiency), "0/1");
    }

    #[test]
    fn rate_and_efficiency_agree_on_mean() {
        for t in 1..=10 {
            for k in 1..=6 {
                let m = frame_metrics(&cfg(5, k, t)).unwrap();
                let sigma_t = m.success_rate.clone().unwrap() * BigRational::from_integer(t.into());
                let rho_k = &m.efficiency * BigRational::from_integer((k + 1).into());
                assert_eq!(sigma_t, rho_k);
                assert_eq!(sigma_t, m.expected_successes);
            }
        }
    }

    #[test]
    fn sweep_csv_and_json() {
        let report = sweep(cfg(2, 1, 2), SweepAxis::DataSlots, 1, 2).unwrap();
        assert_eq!(
            report.to_csv(),
            "M,K,T,expected_successes,success_rate,efficiency\n2,1,2,0.5,0.25,0.25\n2,2,2,1,0.5,0.333333333333\n"
        );
        let json = report.to_json();
        let back: SweepReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains(r#""efficiency":"1/3""#));
    }
}
