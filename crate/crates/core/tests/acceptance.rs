//! Acceptance suite. Prints one line per criterion with its time limit and
//! exits non-zero if any criterion fails or runs over.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thlim::automorphism::{enumerate_automorphisms, is_group, DEFAULT_BUDGET};
use thlim::ef::ef_equivalent;
use thlim::eval::{evaluate, tabulate, TruthMatrix, UnresolvedPolicy};
use thlim::families::{
    abelian_signature, build_chain, catalog_structures, family_catalog, gf2_signature, group_signature, late_changes,
    order_signature, FamilyKind, FamilySpec, WitnessSchema,
};
use thlim::homogeneity::{augmented_limit_check, check_condition1, verify_certificate, CheckConfig};
use thlim::limit::{check_section2_equivalences, default_window, extract_convergent_subchain, limit_report};
use thlim::oracle::{free_abelian_subset_sum_oracle, rational_subgroup_oracle, subset_sum_bound_report, OracleFamily};
use thlim::structure::{ChainFamily, FiniteStructure, Signature};
use thlim::syntax::pool::{generate_pool, random_structure, SentencePool, DEFAULT_SEED};
use thlim::syntax::{parse_formula, to_prenex, Formula};

use common::{divides_denominator, divisibility_truth, permutations, stdout, subset_sum_truth, thlim};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn chain(name: &str, horizon: usize) -> ChainFamily {
    build_chain(&FamilySpec::parse(name).unwrap(), horizon).unwrap()
}

fn matrix(chain: &ChainFamily, pool: &SentencePool) -> TruthMatrix {
    tabulate(chain, pool, UnresolvedPolicy::Error).unwrap()
}

fn parity_even_top() -> Outcome {
    let sig = order_signature();
    let target = parse_formula("exists x. forall y. E(x) & le(y, x)", &sig).unwrap();
    let pool = generate_pool(&sig, 2, 2).unwrap();
    let idx = pool.find_equivalent(&target).unwrap().ok_or("sentence missing from the rank-2 pool")?;
    let representative = &pool.sentences()[idx];

    // The top element n is even exactly when n is.
    let parity = chain("parity-order", 20);
    for (k, s) in parity.members().iter().enumerate() {
        let n = k + 1;
        ensure!(evaluate(s, &target).unwrap() == (n % 2 == 0), "target wrong at n={n}");
        ensure!(evaluate(s, representative).unwrap() == (n % 2 == 0), "pool representative differs at n={n}");
    }

    let out = thlim(&["limit", "--family", "parity-order", "--horizon", "20", "--pool", "rank2", "--window", "5"]);
    ensure!(out.status.success(), "limit exited with {:?}", out.status);
    let text = stdout(&out);
    ensure!(text.lines().any(|l| l == "limitExists=false"), "limitExists=false not reported");
    let label = format!(" {representative}");
    let line = text.lines().find(|l| l.ends_with(&label)).ok_or("sentence not in report")?;
    ensure!(line.starts_with("in-limsup-only "), "classified as `{line}`");
    Ok(format!("`{representative}` in-limsup-only, limitExists=false"))
}

fn section2() -> Outcome {
    let cases = [("parity-order", 20, false), ("finite-sets", 10, true), ("gf2-vector-space", 5, true)];
    let mut notes = Vec::new();
    for (name, horizon, expect) in cases {
        let c = chain(name, horizon);
        let pool = generate_pool(c.signature(), 2, 2).unwrap();
        let m = matrix(&c, &pool);
        let r = check_section2_equivalences(&m, default_window(horizon)).unwrap();
        ensure!(r.passes(), "{name}: relations violated: {r:?}");
        let together = [r.limsup_consistent.holds, r.liminf_complete.holds, r.limit_exists];
        ensure!(together == [expect; 3], "{name}: expected all {expect}, got {together:?}");
        notes.push(format!("{name}={expect}"));
    }
    Ok(notes.join(" "))
}

fn convergent_subchain() -> Outcome {
    let parity = chain("parity-order", 20);
    let pool = generate_pool(parity.signature(), 2, 2).unwrap();
    let m = matrix(&parity, &pool);
    ensure!(!limit_report(&m, 5).unwrap().limit_exists, "full chain already converges");
    let indices = extract_convergent_subchain(&m);
    ensure!(indices.len() >= 2, "subchain too short: {indices:?}");
    ensure!(indices.windows(2).all(|w| w[0] < w[1]), "indices not increasing: {indices:?}");
    let sub = parity.subchain(&indices).unwrap();
    let again = limit_report(&matrix(&sub, &pool), 1).unwrap();
    ensure!(again.limit_exists, "re-tabulated subchain has no limit");
    Ok(format!("indices {indices:?}"))
}

fn finite_sets_homogeneity() -> Outcome {
    let m = 2;
    let c = chain("finite-sets", 8);
    let report = check_condition1(&c, &CheckConfig::new(m, DEFAULT_BUDGET)).unwrap();
    ensure!(report.all_certified(), "uncertified constant choices");
    let i = report.uniform_index().unwrap();
    ensure!(c.member(i).size() == 2 * m, "chosen member S_{i} has size {}", c.member(i).size());
    for cert in &report.certificates {
        ensure!(
            verify_certificate(&c, None, &report, cert, 32, DEFAULT_SEED).unwrap(),
            "certificate {:?} does not verify",
            cert.a
        );
    }
    let aug = augmented_limit_check(&c, i, m, DEFAULT_SEED).unwrap();
    ensure!(aug.limsup_only.is_empty(), "in-limsup-only beyond {i}: {:?}", aug.limsup_only);
    Ok(format!("i={i}, {} augmented sentences, none in-limsup-only", aug.pool_size))
}

fn parity_rigid() -> Outcome {
    let c = chain("parity-order", 8);
    let mut choices = 0;
    // The default designated member has one element; a larger one gives more choices.
    for designated in [None, Some(4)] {
        let config = CheckConfig { designated, ..CheckConfig::new(1, DEFAULT_BUDGET) };
        let report = check_condition1(&c, &config).unwrap();
        ensure!(report.none_certified(), "some constant choice certified");
        for cert in &report.certificates {
            ensure!(!cert.failures.is_empty(), "no failure record for {:?}", cert.a);
            ensure!(!cert.is_indeterminate(), "budget exhausted for {:?}", cert.a);
        }
        choices += report.certificates.len();
    }
    Ok(format!("{choices} constant choices, all refuted"))
}

fn gf2_homogeneity() -> Outcome {
    let c = chain("gf2-vector-space", 4);
    let report = check_condition1(&c, &CheckConfig::new(1, DEFAULT_BUDGET)).unwrap();
    ensure!(report.all_certified(), "uncertified constant choices");
    for cert in &report.certificates {
        ensure!(
            verify_certificate(&c, None, &report, cert, 32, DEFAULT_SEED).unwrap(),
            "certificate {:?} does not verify",
            cert.a
        );
    }
    let found: Vec<String> = report.certificates.iter().map(|c| format!("{:?}->{}", c.a, c.i.unwrap())).collect();
    Ok(format!("{}; uniform i={}", found.join(" "), report.uniform_index().unwrap()))
}

fn ef_pool_agreement() -> Outcome {
    let signatures = [Signature::empty(), order_signature(), gf2_signature(), abelian_signature(), group_signature()];
    let (mut pairs, mut mismatches) = (0, Vec::new());
    for sig in &signatures {
        let structures = catalog_structures(sig, 4);
        for k in 1..=2 {
            let pool = generate_pool(sig, k, 2).unwrap();
            let profiles: Vec<Vec<bool>> = structures
                .iter()
                .map(|(_, s)| pool.sentences().iter().map(|f| evaluate(s, f).unwrap()).collect())
                .collect();
            for a in 0..structures.len() {
                for b in a + 1..structures.len() {
                    pairs += 1;
                    let ef = ef_equivalent(&structures[a].1, &structures[b].1, k).unwrap();
                    if ef != (profiles[a] == profiles[b]) {
                        mismatches.push(format!("{} vs {} k={k}: ef={ef}", structures[a].0, structures[b].0));
                    }
                }
            }
        }
    }
    ensure!(mismatches.is_empty(), "{} mismatches: {}", mismatches.len(), mismatches.join("; "));
    Ok(format!("{pairs} pairs, zero mismatches"))
}

fn oracles() -> Outcome {
    for m in 1..=30u64 {
        for n in 1..=10 {
            let got = rational_subgroup_oracle(m, n);
            ensure!(got == divisibility_truth(m, n), "div m={m} n={n}: oracle {got}");
            for k in 1..=n {
                ensure!(!divides_denominator(m, k) || got, "m={m} divides stage {k} but oracle false at {n}");
            }
            ensure!(OracleFamily::RationalCyclic.decide("div", m as usize, n).unwrap() == (m == 1), "cyclic m={m}");
        }
    }
    for m in 1..=3 {
        for r in 0..=3 {
            let truth = subset_sum_truth(m, r);
            ensure!(free_abelian_subset_sum_oracle(m, r) == truth, "subset-sum m={m} r={r}");
        }
    }
    let rows = subset_sum_bound_report(3, 3);
    let bad: Vec<_> =
        rows.iter().filter(|r| r.status() != "agree" && r.status() != "true-but-loose-bound-silent").collect();
    ensure!(bad.is_empty(), "bound report: {bad:?}");
    let out = thlim(&["oracle", "--family", "free-abelian", "--schema", "subset-sum", "--m", "3", "--rank", "2"]);
    ensure!(stdout(&out).contains("[bounds]"), "CLI did not emit the bound report");
    let silent = rows.iter().filter(|r| r.status() == "true-but-loose-bound-silent").count();
    Ok(format!("bound report emitted: rank < m-1 is silent on {silent} true cases, never wrong"))
}

fn non_stabilization() -> Outcome {
    let mut notes = Vec::new();
    for schema in WitnessSchema::ALL {
        let mut ms = Vec::new();
        for (i, change) in late_changes(schema, 10, 40) {
            let change = change.ok_or_else(|| format!("{schema:?}: no late instance for i={i}"))?;
            ensure!(change.first_change > i, "{schema:?} i={i}: changes at {}", change.first_change);
            for (k, &v) in change.values.iter().enumerate() {
                let n = k + 1;
                let truth = match schema {
                    WitnessSchema::DistinctElements => n >= change.m,
                    WitnessSchema::Divisibility => divisibility_truth(change.m as u64, n),
                    WitnessSchema::SubsetSum => change.m > n,
                };
                ensure!(v == truth, "{schema:?} m={} n={n}: reported {v}", change.m);
            }
            ms.push(change.m.to_string());
        }
        notes.push(format!("{}: m={}", schema.family(), ms.join(",")));
    }
    Ok(notes.join("; "))
}

fn probes(sig: &Signature, rng: &mut ChaCha8Rng) -> Vec<FiniteStructure> {
    let mut out: Vec<FiniteStructure> = catalog_structures(sig, 5).into_iter().map(|(_, s)| s).collect();
    out.extend((0..3).map(|_| random_structure(sig, rng)));
    out
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let signatures = [order_signature(), gf2_signature(), Signature::empty(), group_signature()];
    let cases: Vec<(Vec<FiniteStructure>, SentencePool)> =
        signatures.iter().map(|sig| (probes(sig, &mut rng), generate_pool(sig, 2, 2).unwrap())).collect();

    for t in 0..200 {
        let (structures, pool) = &cases[t % cases.len()];
        let s = structures.choose(&mut rng).unwrap();
        let f = pool.sentences().choose(&mut rng).unwrap();
        let mut perm: Vec<usize> = s.universe().collect();
        perm.shuffle(&mut rng);
        let (a, b) = (evaluate(s, f).unwrap(), evaluate(&s.permuted(&perm), f).unwrap());
        ensure!(a == b, "isomorphism changed the truth of `{f}` under {perm:?}");
    }

    let mut checked = 0;
    for (structures, pool) in &cases[..2] {
        let sentences = pool.sentences();
        for (k, f) in sentences.iter().enumerate() {
            let g = &sentences[(k + 1) % sentences.len()];
            let forms = [
                Formula::not(f.clone()),
                Formula::and(f.clone(), Formula::not(g.clone())),
                Formula::or(Formula::not(f.clone()), g.clone()),
            ];
            for h in forms {
                let p = to_prenex(&h);
                ensure!(p.is_prenex(), "`{p}` is not prenex");
                for s in structures {
                    ensure!(evaluate(s, &h).unwrap() == evaluate(s, &p).unwrap(), "prenex form of `{h}` disagrees");
                    checked += 1;
                }
            }
        }
    }

    let mut groups = 0;
    for info in family_catalog().iter().filter(|f| f.kind == FamilyKind::Concrete) {
        let spec = FamilySpec::new(info.name);
        for n in 1.. {
            let s = thlim::families::build_member(&spec, n).unwrap();
            if s.size() > 8 {
                break;
            }
            let auts = enumerate_automorphisms(&s, DEFAULT_BUDGET);
            ensure!(auts.complete, "{spec}#{n}: enumeration incomplete");
            ensure!(is_group(&auts.perms), "{spec}#{n}: not closed under composition");
            let mut brute: Vec<Vec<usize>> =
                permutations(s.size()).into_iter().filter(|p| s.is_automorphism(p)).collect();
            let mut found = auts.perms.clone();
            brute.sort();
            found.sort();
            ensure!(brute == found, "{spec}#{n}: {} found, {} by brute force", found.len(), brute.len());
            groups += 1;
        }
    }
    Ok(format!("200 isomorphism cases, {checked} prenex checks, {groups} automorphism groups"))
}

struct Criterion {
    name: &'static str,
    limit_secs: u64,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        name: "parity chain: even-top sentence in-limsup-only, no limit",
        limit_secs: 10,
        run: parity_even_top,
    },
    Criterion { name: "liminf/limsup consistency and completeness relations", limit_secs: 30, run: section2 },
    Criterion { name: "convergent subchain extraction", limit_secs: 5, run: convergent_subchain },
    Criterion {
        name: "finite sets: automorphism condition and augmented pool",
        limit_secs: 60,
        run: finite_sets_homogeneity,
    },
    Criterion { name: "parity chain rigidity refutes the automorphism condition", limit_secs: 10, run: parity_rigid },
    Criterion { name: "GF(2) spaces: automorphism condition certified", limit_secs: 120, run: gf2_homogeneity },
    Criterion { name: "EF games agree with rank-k pool agreement", limit_secs: 120, run: ef_pool_agreement },
    Criterion { name: "closed-form oracles against ground truth", limit_secs: 5, run: oracles },
    Criterion { name: "witness schemas never stabilize", limit_secs: 10, run: non_stabilization },
    Criterion { name: "isomorphism, prenex and automorphism-group properties", limit_secs: 120, run: properties },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for (k, c) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(c.limit_secs);
        let (status, detail) = match outcome {
            Ok(_) if over => ("FAIL", "time limit exceeded".to_string()),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status}  {} [{:.2}s / {}s]: {detail}",
            k + 1,
            c.name,
            elapsed.as_secs_f64(),
            c.limit_secs
        );
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
