//! Ground truth computed without the library's own decision procedures.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigUint;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs the binary from the crate directory so relative paths in reports are stable.
pub fn thlim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thlim"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("THLIM_BUDGET")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// The first `n` primes by trial division against all smaller integers.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut c = 2u64;
    while primes.len() < n {
        if (2..c).all(|d| !c.is_multiple_of(d)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// Whether `m` divides `(p_1 ... p_k)^k`.
pub fn divides_denominator(m: u64, k: usize) -> bool {
    let product: BigUint = first_primes(k).into_iter().map(BigUint::from).product();
    (product.pow(k as u32) % BigUint::from(m)) == BigUint::from(0u32)
}

/// Truth of the divisibility sentence in `Z[1/(p_1 ... p_n)^n]`: the ring
/// inverts exactly the first `n` primes, so `m` divides everything iff each
/// prime dividing `m` is one of them.
pub fn divisibility_truth(m: u64, n: usize) -> bool {
    let primes = first_primes(n);
    let mut rest = m;
    for p in primes {
        while rest.is_multiple_of(p) {
            rest /= p;
        }
    }
    rest == 1
}

/// Exhaustive subset-sum check over vectors with entries in `-2..=2`.
/// A sum is in `2 Z^r` iff every coordinate is even.
pub fn subset_sum_truth(m: usize, r: usize) -> bool {
    let values: Vec<i64> = (-2..=2).collect();
    let slots = m * r;
    let total = values.len().pow(slots as u32);
    (0..total).all(|code| {
        let mut c = code;
        let mut xs = vec![vec![0i64; r]; m];
        for x in xs.iter_mut() {
            for coord in x.iter_mut() {
                *coord = values[c % values.len()];
                c /= values.len();
            }
        }
        (1u32..(1 << m)).any(|mask| {
            (0..r).all(|coord| {
                let sum: i64 = (0..m).filter(|&i| mask & (1 << i) != 0).map(|i| xs[i][coord]).sum();
                sum.rem_euclid(2) == 0
            })
        })
    })
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
