//! Exit criteria. Prints one PASS/FAIL line per criterion and fails the run
//! if any criterion fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::process::Command;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rach_core::{
    compare_to_exact, estimate_pmf, optimal_data_slots, success_pmf, success_pmf_float,
    success_pmf_with, sweep, DetectionMode, SimParams, StirlingTable, SweepAxis, SystemConfig,
};

const TV_TOLERANCE: f64 = 0.01;
const FLOAT_REL_TOLERANCE: f64 = 1e-10;
const SIM_ITERATIONS: u64 = 100_000;
const SIM_SEEDS: [u64; 3] = [1, 2, 3];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg(m: u32, k: u32, t: u32) -> SystemConfig {
    SystemConfig::new(m, k, t).expect("valid config")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for m in 1..=5u32 {
        for t in 0..=5u32 {
            for k in 1..=6u32 {
                let exact: Vec<BigRational> = success_pmf(&cfg(m, k, t))
                    .map_err(|e| e.to_string())?
                    .mass()
                    .iter()
                    .map(|p| p.ratio().clone())
                    .collect();
                let brute = oracle::brute_force_pmf(m as usize, k as usize, t as usize);
                ensure(exact == brute, || format!("mismatch at M={m} K={k} T={t}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} configurations equal to enumeration"))
}

fn normalization() -> Outcome {
    let table = StirlingTable::with_max_n(14);
    let mut checked = 0;
    for m in 1..=12u32 {
        for k in 1..=12u32 {
            for t in 0..=14u32 {
                let pmf = success_pmf_with(&cfg(m, k, t), &table).map_err(|e| e.to_string())?;
                let total = pmf
                    .mass()
                    .iter()
                    .fold(BigRational::zero(), |acc, p| acc + p.ratio());
                ensure(total.is_one(), || {
                    format!("M={m} K={k} T={t} sums to {total}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pmfs sum to exactly 1"))
}

fn stirling_correctness() -> Outcome {
    let table = StirlingTable::with_max_n(12);
    for n in 0..=12usize {
        let counts = oracle::enumerate_stirling2_assoc(n);
        for k in 0..=n + 1 {
            let got = table.value(n as i64, k as i64).map_err(|e| e.to_string())?;
            let want = counts.get(k).copied().unwrap_or(0);
            ensure(got == want, || {
                format!("S2({n},{k}) = {got}, enumeration gives {want}")
            })?;
            if k > n / 2 {
                ensure(got.is_zero(), || format!("S2({n},{k}) should vanish"))?;
            }
        }
    }
    ensure(table.value(2, 1).map_err(|e| e.to_string())? == 1, || {
        "S2(2,1) != 1".into()
    })?;
    Ok("n <= 12 matches partition enumeration; S2(2,1) = 1".into())
}

fn simulated_pmf_tv() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [4, 8] {
        for seed in SIM_SEEDS {
            let params =
                SimParams::new(cfg(8, k, 12), SIM_ITERATIONS, seed, DetectionMode::Binary)
                    .map_err(|e| e.to_string())?;
            let report = estimate_pmf(&params).map_err(|e| e.to_string())?;
            let tv = compare_to_exact(&report)
                .map_err(|e| e.to_string())?
                .tv_distance;
            ensure(tv <= TV_TOLERANCE, || format!("K={k} seed={seed}: TV {tv}"))?;
            worst = worst.max(tv);
        }
    }
    Ok(format!("max TV distance {worst:.5} <= {TV_TOLERANCE}"))
}

fn success_rate_shape() -> Outcome {
    let mut curves = Vec::new();
    for k in [4u32, 8, 16] {
        let rows = sweep(cfg(8, k, 1), SweepAxis::Users, 1, 30)
            .map_err(|e| e.to_string())?
            .rows;
        let sigma: Vec<BigRational> = rows.into_iter().map(|r| r.success_rate.unwrap()).collect();
        for (i, w) in sigma.windows(2).enumerate() {
            ensure(w[1] <= w[0], || {
                format!("K={k}: sigma rises from T={} to T={}", i + 1, i + 2)
            })?;
        }
        curves.push(sigma);
    }
    for t in 0..30 {
        ensure(
            curves[0][t] <= curves[1][t] && curves[1][t] <= curves[2][t],
            || format!("sigma not non-decreasing in K at T={}", t + 1),
        )?;
    }
    ensure(curves[1] == curves[2], || "K=8 and K=16 differ".into())?;
    Ok("sigma non-increasing in T, non-decreasing in K, K=8 == K=16".into())
}

fn efficiency_optimum() -> Outcome {
    let mut witnesses = Vec::new();
    for t in 8..=30u32 {
        let best = optimal_data_slots(8, t, 8).map_err(|e| e.to_string())?;
        if best.data_slots < 8 {
            witnesses.push(format!("T={t}:K*={}", best.data_slots));
        }
    }
    ensure(!witnesses.is_empty(), || {
        "K* = 8 for every T in 8..=30".into()
    })?;
    Ok(format!(
        "K* < 8 at {} loads, e.g. {}",
        witnesses.len(),
        witnesses[0]
    ))
}

fn float_agreement() -> Outcome {
    let table = StirlingTable::with_max_n(24);
    let mut worst: f64 = 0.0;
    for m in 1..=16u32 {
        for k in 1..=16u32 {
            for t in 0..=24u32 {
                let c = cfg(m, k, t);
                let exact = success_pmf_with(&c, &table)
                    .map_err(|e| e.to_string())?
                    .to_f64();
                let float = success_pmf_float(&c).map_err(|e| e.to_string())?.mass;
                ensure(exact.len() == float.len(), || {
                    format!("{c:?}: support differs")
                })?;
                for (d, (e, f)) in exact.iter().zip(&float).enumerate() {
                    if *e == 0.0 {
                        ensure(*f == 0.0, || format!("{c:?} d={d}: exact 0, float {f}"))?;
                        continue;
                    }
                    let rel = ((e - f) / e).abs();
                    ensure(rel <= FLOAT_REL_TOLERANCE, || {
                        format!("{c:?} d={d}: rel err {rel:e}")
                    })?;
                    worst = worst.max(rel);
                }
            }
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &[
            "simulate",
            "--tokens",
            "8",
            "--slots",
            "4",
            "--users",
            "12",
            "--iterations",
            "20000",
            "--seed",
            "42",
            "--format",
            "json",
        ],
        &[
            "simulate",
            "--tokens",
            "8",
            "--slots",
            "4",
            "--users",
            "12",
            "--iterations",
            "20000",
            "--seed",
            "42",
            "--mode",
            "ternary",
            "--format",
            "csv",
        ],
        &[
            "compare",
            "--tokens",
            "8",
            "--slots",
            "8",
            "--users",
            "12",
            "--iterations",
            "20000",
            "--seed",
            "7",
            "--format",
            "json",
        ],
        &[
            "compare",
            "--tokens",
            "8",
            "--slots",
            "4",
            "--users",
            "12",
            "--iterations",
            "20000",
            "--seed",
            "7",
            "--format",
            "csv",
        ],
    ];
    for args in runs {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_rach"))
                .args(args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(a.status.success() && b.status.success(), || {
            format!("{args:?} failed")
        })?;
        ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
            format!("{args:?} not byte-identical")
        })?;
    }
    Ok(format!(
        "{} invocations byte-identical on rerun",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 oracle equivalence (M,T<=5, K<=6)", oracle_equivalence),
        ("2 normalization (M,K<=12, T<=14)", normalization),
        ("3 stirling correctness (n<=12)", stirling_correctness),
        (
            "4 simulated pmf TV<=0.01 (M=8,T=12,K=4/8, 3 seeds)",
            simulated_pmf_tv,
        ),
        ("5 success-rate shape (M=8, K=4/8/16, T=1..30)", success_rate_shape),
        ("6 efficiency optimum K*<8 (M=8)", efficiency_optimum),
        (
            "7 exact/float agreement 1e-10 (M,K<=16, T<=24)",
            float_agreement,
        ),
        ("8 simulate/compare determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
