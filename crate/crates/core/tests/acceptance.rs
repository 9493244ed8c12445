//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p bf-cert --test acceptance` runs everything;
//! `BF_CERT_ACCEPT=3,7` restricts the run to the listed criteria.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bf_cert::binom::binomial;
use bf_cert::bounds::capability::capability;
use bf_cert::bounds::{
    bsc_failure_bound, dfr_bound_girth6_for, dfr_bound_girth6_regular, dfr_bound_qc, qc_analyzer, DfrAnalyzer,
};
use bf_cert::code::gamma::all_row_profiles;
use bf_cert::code::search::{array_shifts, search_girth6_qc2};
use bf_cert::code::{
    build_monomial, build_qc2, distinct_row_profiles, girth, CodeSpecFile, Girth, ParityCheckMatrix,
    DEFAULT_GIRTH_CUTOFF,
};
use bf_cert::decoder::Thresholds;
use bf_cert::keysearch::{acceptance_rate_experiment, sample_circulant_support, KeygenPolicy};
use bf_cert::montecarlo::{estimate_bsc, estimate_dfr, exhaustive_dfr, TrialPlan, EXHAUSTIVE_MAX_PATTERNS};
use bf_cert::pipeline::{compare, table1_summary};
use bf_cert::subset::{compress, count_exceeding, count_exceeding_bruteforce, theta};

enum Verdict {
    Pass(String),
    Fail(String),
    /// A documented mismatch with the published table; does not fail the run.
    Known(String),
}

type Check = fn() -> Verdict;

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn main() -> ExitCode {
    let only: Option<Vec<usize>> = std::env::var("BF_CERT_ACCEPT")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let checks: [(usize, &str, Check); 11] = [
        (1, "subset counter equals brute force", c1_counter_oracle),
        (2, "theta closed form", c2_theta),
        (3, "guaranteed-correction zero region", c3_zero_region),
        (4, "bound dominates DFR", c4_dominance),
        (5, "identity triple on odd-v girth-6 codes", c5_identity),
        (6, "QC fast path equals generic bound", c6_qc_fast_path),
        (7, "radius comparison table", c7_table1),
        (8, "bundled code parameters", c8_builtins),
        (9, "key certification at p=194989", c9_keys),
        (10, "C1 bound curve vs simulation", c10_curve),
        (11, "BSC weighting", c11_bsc),
    ];
    let mut failed = false;
    for (id, name, check) in checks {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        match v {
            Verdict::Pass(d) => println!("PASS criterion {id}: {name} [{secs:.1}s] {d}"),
            Verdict::Fail(d) => {
                failed = true;
                println!("FAIL criterion {id}: {name} [{secs:.1}s] {d}");
            }
            Verdict::Known(d) => println!("FAIL (known discrepancy) criterion {id}: {name} [{secs:.1}s] {d}"),
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn c1_counter_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut checked = 0;
    for inst in 0..200 {
        let l = rng.gen_range(1..=18);
        let a: Vec<u64> = (0..l).map(|_| rng.gen_range(0..=6)).collect();
        let cv = compress(&a.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap();
        let total: u64 = a.iter().sum();
        for m in 0..=l {
            let alpha = rng.gen_range(0..=total + 1);
            let fast = count_exceeding(&cv, m as u64, alpha).unwrap();
            let slow = count_exceeding_bruteforce(&a, m, alpha).unwrap();
            if fast != slow {
                return Verdict::Fail(format!("instance {inst}: a={a:?} m={m} alpha={alpha}: {fast} != {slow}"));
            }
            checked += 1;
        }
    }
    Verdict::Pass(format!("{checked} (vector, m, alpha) cases"))
}

fn c2_theta() -> Verdict {
    let mut cases = 0;
    for l in 0..=15u64 {
        for m in 0..=l {
            let a: Vec<u64> = (0..l).map(|i| u64::from(i < m)).collect();
            for x in 0..=l {
                for alpha in 0..=l {
                    let closed = theta(l, x, m, alpha);
                    let brute = count_exceeding_bruteforce(&a, x as usize, alpha).unwrap();
                    if closed != brute {
                        return Verdict::Fail(format!("l={l} m={m} x={x} alpha={alpha}: {closed} != {brute}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Verdict::Pass(format!("{cases} (l, m, x, alpha) cases"))
}

const GIRTH6_P: usize = 541;

fn girth6_qc2(p: usize, v: usize, seed: u64) -> Option<ParityCheckMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s0, s1) = search_girth6_qc2(p, v, &mut rng, 20_000).unwrap()?;
    Some(build_qc2(p, &s0, &s1).unwrap())
}

fn c3_zero_region() -> Verdict {
    let Some(h) = girth6_qc2(GIRTH6_P, 13, 1) else {
        return Verdict::Fail(format!("no girth-6 (13,26) code found at p={GIRTH6_P}"));
    };
    if girth(&h, DEFAULT_GIRTH_CUTOFF).lower_bound() < 6 {
        return Verdict::Fail("constructed code has 4-cycles".into());
    }
    let th = Thresholds::Uniform(7);
    let generic = DfrAnalyzer::new(&all_row_profiles(&h), 6);
    for t in 1..=6u64 {
        let bounds = [
            ("th4", generic.th4(t, &th).unwrap()),
            ("th4bis", generic.th4bis(t).unwrap()),
            ("th5", dfr_bound_girth6_for(&h, t).unwrap()),
            ("qc", dfr_bound_qc(&h, t, 7).unwrap()),
        ];
        for (name, r) in &bounds {
            if !r.is_zero() {
                return Verdict::Fail(format!("t={t}: {name} bound is {} / C(n,t), not 0", r.numerator));
            }
        }
        let mut plan = TrialPlan::new(t as usize, 100_000, 300 + t);
        plan.stop_failures = 1;
        let est = estimate_dfr(&h, &plan, &th).unwrap();
        if est.failures > 0 || est.trials != 100_000 {
            return Verdict::Fail(format!("t={t}: {} failures in {} trials", est.failures, est.trials));
        }
    }
    Verdict::Pass(format!("p={GIRTH6_P}, t=1..6: 4 methods give 0, 1e5 patterns each decoded"))
}

fn c4_dominance() -> Verdict {
    let p = 499;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let s0 = sample_circulant_support(p, 9, &mut rng).unwrap();
    let s1 = sample_circulant_support(p, 9, &mut rng).unwrap();
    let h = build_qc2(p, &s0, &s1).unwrap();
    let th = Thresholds::Uniform(5);
    let ts = [2usize, 3, 4, 5, 6, 7, 8, 10, 12];
    let analyzer = qc_analyzer(&h, *ts.last().unwrap() as u64).unwrap();
    let mut simulated = Vec::new();
    for &t in &ts {
        let bound = analyzer.th4(t as u64, &th).unwrap().value();
        let mut plan = TrialPlan::new(t, 10_000_000, 400 + t as u64);
        plan.stop_failures = 100;
        let est = estimate_dfr(&h, &plan, &th).unwrap();
        if est.failures < 100 {
            continue;
        }
        if est.p_hat > bound + 3.0 * est.std_err {
            return Verdict::Fail(format!("t={t}: dfr {:.3e} > bound {bound:.3e} + 3 sigma", est.p_hat));
        }
        simulated.push(t);
    }
    if simulated.is_empty() {
        return Verdict::Fail("no weight reached 100 failures".into());
    }

    let tiny = tiny_codes();
    let mut exact_cases = 0;
    for (name, h) in &tiny {
        let n = h.n() as u64;
        let v_max = h.max_col_weight();
        let generic = DfrAnalyzer::new(&all_row_profiles(h), n);
        for t in 1..=n {
            if binomial(n, t) > BigUint::from(EXHAUSTIVE_MAX_PATTERNS) {
                continue;
            }
            for b in 1..=v_max {
                let th = Thresholds::Uniform(b);
                let exact = exhaustive_dfr(h, t as usize, &th).unwrap();
                let bound = generic.th4(t, &th).unwrap();
                if BigUint::from(exact.failures) > bound.numerator {
                    return Verdict::Fail(format!(
                        "{name} t={t} b={b}: {} failures > numerator {}",
                        exact.failures, bound.numerator
                    ));
                }
                exact_cases += 1;
            }
        }
    }
    Verdict::Pass(format!(
        "p={p} v=9 b=5 simulated t={simulated:?}; {exact_cases} exhaustive cases on {} tiny codes",
        tiny.len()
    ))
}

fn tiny_codes() -> Vec<(String, ParityCheckMatrix)> {
    let mut out = vec![
        ("qc2 p=7 v=2".to_string(), build_qc2(7, &[0, 1], &[0, 3]).unwrap()),
        ("qc2 p=7 v=3".to_string(), build_qc2(7, &[0, 1, 3], &[0, 3, 5]).unwrap()),
        ("qc2 p=10 v=3".to_string(), build_qc2(10, &[0, 1, 5], &[0, 2, 3]).unwrap()),
        ("qc2 p=9 v=4 girth 4".to_string(), build_qc2(9, &[0, 1, 2, 4], &[0, 1, 3, 7]).unwrap()),
        ("monomial p=5 v=3 w=4".to_string(), build_monomial(5, &array_shifts(5, 3, 4)).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x71);
    for k in 0..3 {
        let (r, n) = (10, 16 + k);
        let cols: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                let mut c = rand::seq::index::sample(&mut rng, r, 3).into_vec();
                c.sort_unstable();
                c
            })
            .collect();
        let h = ParityCheckMatrix::from_column_supports(r, &cols).unwrap();
        out.push((format!("random r={r} n={n}"), h));
    }
    out
}

fn c5_identity() -> Verdict {
    let mut codes: Vec<(String, ParityCheckMatrix)> = vec![
        ("array p=97 v=15 w=43".into(), build_monomial(97, &array_shifts(97, 15, 43)).unwrap()),
        ("array p=167 v=31 w=51".into(), build_monomial(167, &array_shifts(167, 31, 51)).unwrap()),
        ("array p=127 v=23 w=31".into(), build_monomial(127, &array_shifts(127, 23, 31)).unwrap()),
    ];
    for (p, v, seed) in [(GIRTH6_P, 13, 1), (101, 5, 2), (211, 7, 3)] {
        match girth6_qc2(p, v, seed) {
            Some(h) => codes.push((format!("qc2 p={p} v={v}"), h)),
            None => return Verdict::Fail(format!("no girth-6 QC2 code found at p={p}, v={v}")),
        }
    }
    let mut checked = 0;
    for (name, h) in &codes {
        let v = h.regular_col_weight().unwrap() as u64;
        let w = h.regular_row_weight().unwrap() as u64;
        if v % 2 == 0 || girth(h, DEFAULT_GIRTH_CUTOFF).lower_bound() < 6 {
            return Verdict::Fail(format!("{name}: not an odd-v girth-6 code"));
        }
        let analyzer = DfrAnalyzer::new(&distinct_row_profiles(h), 3 * v);
        let th = Thresholds::Uniform(v.div_ceil(2) as usize);
        for t in 1..=3 * v {
            let a = analyzer.th4(t, &th).unwrap().numerator;
            let b = analyzer.th4bis(t).unwrap().numerator;
            let c = dfr_bound_girth6_regular(h.n() as u64, v, w, t).unwrap().numerator;
            if a != b || b != c {
                return Verdict::Fail(format!("{name} t={t}: th4={a} th4bis={b} th5={c}"));
            }
            checked += 1;
        }
    }
    Verdict::Pass(format!("{} codes, {checked} weights, identical numerators", codes.len()))
}

fn c6_qc_fast_path() -> Verdict {
    let mut slowest_ratio = f64::INFINITY;
    let mut lines = Vec::new();
    for name in bf_cert::code::spec::builtin_names() {
        let h = CodeSpecFile::builtin(name).unwrap().build().unwrap();
        let p = h.block_size().unwrap_or(0);
        let v = h.regular_col_weight().unwrap();
        let th = Thresholds::Uniform(v / 2 + 1);
        let t_mu = capability(&h).t_mu;
        let ts = t_mu + 1..=t_mu + 20;

        let start = Instant::now();
        let qc = qc_analyzer(&h, t_mu + 20).unwrap();
        let fast: Vec<BigUint> = ts.clone().map(|t| qc.th4(t, &th).unwrap().numerator).collect();
        let fast_time = start.elapsed();

        let start = Instant::now();
        let generic = DfrAnalyzer::new(&all_row_profiles(&h), t_mu + 20);
        let slow: Vec<BigUint> = ts.map(|t| generic.th4(t, &th).unwrap().numerator).collect();
        let slow_time = start.elapsed();

        if fast != slow {
            return Verdict::Fail(format!("{name}: QC and generic numerators differ"));
        }
        let ratio = slow_time.as_secs_f64() / fast_time.max(Duration::from_micros(1)).as_secs_f64();
        if p >= 4801 {
            slowest_ratio = slowest_ratio.min(ratio);
        }
        lines.push(format!("{name}:{ratio:.0}x"));
    }
    verdict(
        slowest_ratio >= 10.0,
        format!("equal on C0-C8; speedup {} (min {slowest_ratio:.0}x at p>=4801)", lines.join(" ")),
    )
}

fn c7_table1() -> Verdict {
    let (_, summary) = table1_summary(1, 100);
    let set = |g: u64| summary.iter().find(|s| s.g == g).unwrap().improved.clone();
    let all: Vec<u64> = (1..=100).collect();
    let expected_g6: Vec<u64> = all.iter().copied().filter(|&v| v != 1 && v != 3).collect();
    let published_g8: Vec<u64> = all.iter().copied().filter(|&v| v > 2 && v % 2 == 0).collect();
    let computed_g8: Vec<u64> = all.iter().copied().filter(|&v| v % 2 == 0).collect();
    if set(4) != all || set(6) != expected_g6 || set(10) != vec![2] {
        return Verdict::Fail(format!("g=4 {:?} g=6 {:?} g=10 {:?}", set(4), set(6), set(10)));
    }
    if set(8) == published_g8 {
        return Verdict::Pass("g=4 all v, g=6 all v except 1,3, g=8 even v>2, g=10 v=2".into());
    }
    if set(8) == computed_g8 {
        // floor(2/2) = 1 > ceil(2/2) - 1 = 0, so v = 2 also improves at g = 8.
        return Verdict::Known("g=4,6,10 match; g=8 improvement set is every even v including v=2".into());
    }
    Verdict::Fail(format!("g=8 improvement set {:?}", set(8)))
}

fn c8_builtins() -> Verdict {
    let load = |n: &str| CodeSpecFile::load(&format!("builtin:{n}")).unwrap().build().unwrap();
    let c1 = load("C1");
    let c0 = load("C0");
    let c2 = load("C2");
    let c1_ok = c1.n() == 17558
        && c1.block_size() == Some(8779)
        && c1.regular_col_weight() == Some(13)
        && girth(&c1, DEFAULT_GIRTH_CUTOFF) == Girth::Exact(6);
    let c0_ok = girth(&c0, DEFAULT_GIRTH_CUTOFF) == Girth::Exact(4);
    let c2_ok = c2.n() == 9602 && c2.regular_col_weight() == Some(45);
    verdict(
        c1_ok && c0_ok && c2_ok,
        format!(
            "C1 n={} p={} v={:?} girth {}; C0 girth {}; C2 n={} v={:?}",
            c1.n(),
            c1.block_size().unwrap_or(0),
            c1.regular_col_weight(),
            girth(&c1, DEFAULT_GIRTH_CUTOFF),
            girth(&c0, DEFAULT_GIRTH_CUTOFF),
            c2.n(),
            c2.regular_col_weight()
        ),
    )
}

fn c9_keys() -> Verdict {
    let policy = KeygenPolicy::new(194_989, 65, 84, -80, 0xC9);
    let report = acceptance_rate_experiment(&policy, 20).unwrap();
    let bs: Vec<u64> = report.keys.iter().map(|k| k.b).collect();
    let worst = report.keys.iter().map(|k| k.log2_bound).fold(f64::NEG_INFINITY, f64::max);
    verdict(
        report.accepted >= 15,
        format!("{}/20 keys below 2^-80 (worst log2 {worst:.1}); optimized b {bs:?}", report.accepted),
    )
}

fn c10_curve() -> Verdict {
    let h = CodeSpecFile::builtin("C1").unwrap().build().unwrap();
    let b = 7u64;
    let th = Thresholds::Uniform(b as usize);
    let max_t = 400;
    let analyzer = qc_analyzer(&h, max_t).unwrap();
    let curve: Vec<f64> = (1..=max_t).map(|t| analyzer.th4(t, &th).unwrap().value()).collect();
    if let Some(t) = (1..=6).find(|&t| curve[t - 1] != 0.0) {
        return Verdict::Fail(format!("bound nonzero at t={t}"));
    }
    let clamp = curve.iter().position(|&x| x >= 1.0).map(|i| i + 1);
    let end = clamp.unwrap_or(max_t as usize);
    for t in 7..end {
        if curve[t] <= curve[t - 1] {
            return Verdict::Fail(format!("bound not strictly increasing at t={}", t + 1));
        }
    }

    let ts = [2usize, 4, 6, 10, 20, 30, 40, 50, 60, 80];
    let mut plan = TrialPlan::new(0, 200_000, 0xC10);
    plan.stop_failures = 100;
    let rows = compare(&h, &ts, b as usize, &plan).unwrap();
    for r in &rows {
        if r.t <= 6 && r.failures > 0 {
            return Verdict::Fail(format!("t={}: {} failures inside the zero region", r.t, r.failures));
        }
        if r.bound < r.dfr_hat {
            return Verdict::Fail(format!("t={}: bound {:.3e} < dfr {:.3e}", r.t, r.bound, r.dfr_hat));
        }
    }
    let first_nonzero = curve.iter().position(|&x| x > 0.0).map_or(0, |i| i + 1);
    Verdict::Pass(format!(
        "zero for t<=6, first nonzero t={first_nonzero}, strictly increasing until clamp at t={}; bound >= dfr at t={ts:?}",
        clamp.map_or("none".to_string(), |c| c.to_string())
    ))
}

fn c11_bsc() -> Verdict {
    let h = build_qc2(101, &[0, 1, 5], &[0, 12, 40]).unwrap();
    let profiles = distinct_row_profiles(&h);
    let th = Thresholds::Uniform(2);
    let small: Vec<f64> = [1e-3, 1e-5, 1e-7, 1e-9]
        .iter()
        .map(|&rho| bsc_failure_bound(&profiles, rho, &th).unwrap())
        .collect();
    let at_zero = bsc_failure_bound(&profiles, 0.0, &th).unwrap();
    if at_zero != 0.0 || small.windows(2).any(|w| w[1] > w[0]) || small[3] > 1e-6 {
        return Verdict::Fail(format!("bound near rho=0 does not vanish: {small:?}, at 0: {at_zero}"));
    }
    let mut details = Vec::new();
    for rho in [0.001, 0.005] {
        let bound = bsc_failure_bound(&profiles, rho, &th).unwrap();
        let est = estimate_bsc(&h, rho, 200_000, 0xB5C, &th, 0).unwrap();
        if est.p_hat > bound + 3.0 * est.std_err {
            return Verdict::Fail(format!("rho={rho}: fer {:.3e} > bound {bound:.3e} + 3 sigma", est.p_hat));
        }
        details.push(format!("rho={rho}: fer {:.2e} <= bound {bound:.2e}", est.p_hat));
    }
    Verdict::Pass(format!("bound(1e-9)={:.1e}; {}", small[3], details.join("; ")))
}
