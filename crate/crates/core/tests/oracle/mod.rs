//! Brute-force references, kept independent of the library's formulas.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn choose(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k]
}

/// Every `k`-element subset of `0..n`, as index lists.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// P(S_D = d) for d = 0..=min(M,K,T), by walking all M^T token assignments
/// and, for each, all equally likely data-slot selections of the active tokens.
pub fn brute_force_pmf(m: usize, k: usize, t: usize) -> Vec<BigRational> {
    let support = m.min(k).min(t);
    let mut mass = vec![BigRational::zero(); support + 1];
    let assignments = (m as u128).pow(t as u32);
    let mut choice = vec![0usize; t];
    for _ in 0..assignments {
        let mut counts = vec![0usize; m];
        for &c in &choice {
            counts[c] += 1;
        }
        let active: Vec<usize> = (0..m).filter(|&i| counts[i] > 0).collect();
        let granted = active.len().min(k);
        let picks = subsets(active.len(), granted);
        let weight = BigRational::new(
            BigInt::from(1),
            BigInt::from(assignments) * BigInt::from(picks.len()),
        );
        for pick in picks {
            let s = pick.iter().filter(|&&i| counts[active[i]] == 1).count();
            mass[s] += &weight;
        }
        // next assignment in base m
        for slot in choice.iter_mut() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    mass
}

/// Number of partitions of an n-set into blocks of size >= 2, by block
/// count, from restricted growth strings.
pub fn enumerate_stirling2_assoc(n: usize) -> Vec<u64> {
    fn walk(i: usize, n: usize, sizes: &mut Vec<usize>, out: &mut Vec<u64>) {
        let singletons = sizes.iter().filter(|&&s| s == 1).count();
        if singletons > n - i {
            return;
        }
        if i == n {
            out[sizes.len()] += 1;
            return;
        }
        for b in 0..sizes.len() {
            sizes[b] += 1;
            walk(i + 1, n, sizes, out);
            sizes[b] -= 1;
        }
        sizes.push(1);
        walk(i + 1, n, sizes, out);
        sizes.pop();
    }
    let mut out = vec![0u64; n + 1];
    walk(0, n, &mut Vec::new(), &mut out);
    out
}

pub fn binomial_oracle(n: usize, k: usize) -> u128 {
    choose(n, k)
}
