//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout; exits nonzero if any fails.
//!
//! Oracles here are written independently of the library: progressions,
//! surjections, rainbow checks and aw are all recomputed from definitions.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rainbow_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Suite {
    failed: Vec<&'static str>,
    total: usize,
}

impl Suite {
    fn run(&mut self, name: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {:.2?}, limit {:.0?}", elapsed, limit))
            }
            (o, _) => o,
        };
        self.total += 1;
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                println!("FAIL  {name}: {why} [{elapsed:.2?}]");
                self.failed.push(name);
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

// ---- independent oracles ----

/// Element sets of k-APs inside `set` (values), straight from the definition.
fn oracle_aps(set: &[i64], k: usize) -> Vec<Vec<i64>> {
    let members: BTreeSet<i64> = set.iter().copied().collect();
    let (Some(&lo), Some(&hi)) = (members.first(), members.last()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &a in &members {
        for d in 1..=(hi - lo) {
            let ap: Vec<i64> = (0..k as i64).map(|i| a + i * d).collect();
            if ap.iter().all(|x| members.contains(x)) {
                out.push(ap);
            }
        }
    }
    out
}

/// Positions (indices into `set`) of each AP.
fn ap_positions(set: &[i64], k: usize) -> Vec<Vec<usize>> {
    oracle_aps(set, k)
        .into_iter()
        .map(|ap| ap.iter().map(|x| set.iter().position(|y| y == x).unwrap()).collect())
        .collect()
}

fn rainbow(edge: &[usize], colors: &[u32]) -> bool {
    let cs: BTreeSet<u32> = edge.iter().map(|&p| colors[p]).collect();
    cs.len() == edge.len()
}

/// Calls `f` on every map `[len] -> [r]` (colors 0-based).
fn for_each_coloring(len: usize, r: u32, mut f: impl FnMut(&[u32])) {
    let mut c = vec![0u32; len];
    loop {
        f(&c);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            c[i] += 1;
            if c[i] < r {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn surjections_oracle(t: u32, s: u32) -> u64 {
    let mut count = 0;
    for_each_coloring(s as usize, t, |c| {
        let seen = c.iter().fold(0u32, |m, &x| m | 1 << x);
        if seen.count_ones() == t {
            count += 1;
        }
    });
    count
}

/// aw by definition: least r such that no exact r-coloring avoids a rainbow AP.
fn aw_oracle(set: &[i64], k: usize) -> u32 {
    let edges = ap_positions(set, k);
    for r in 1..=set.len() as u32 + 1 {
        let mut some_free = false;
        for_each_coloring(set.len(), r, |c| {
            if !some_free
                && c.iter().collect::<BTreeSet<_>>().len() == r as usize
                && !edges.iter().any(|e| rainbow(e, c))
            {
                some_free = true;
            }
        });
        if !some_free {
            return r;
        }
    }
    unreachable!("injective colorings of a set containing an AP are rainbow")
}

fn falling(r: u64, k: u64) -> u64 {
    (0..k).map(|i| r - i).product()
}

fn subsets_of(n: u32) -> impl Iterator<Item = Vec<i64>> {
    (1u32..1 << n).map(move |mask| (1..=n as i64).filter(|x| mask >> (x - 1) & 1 == 1).collect())
}

fn ground_of(n: u32, s: &[i64]) -> GroundSet {
    if s.len() == n as usize {
        GroundSet::interval(n).unwrap()
    } else {
        GroundSet::subset(n, s).unwrap()
    }
}

// ---- criteria ----

fn closed_form() -> Check {
    let mut cases = 0;
    for k in 2..=8u64 {
        for n in k..=300 {
            let enumerated = gamma_k(&GroundSet::interval(n as u32).map_err(err)?, k as usize).map_err(err)?;
            let closed = gamma_closed_form(n, k).map_err(err)?;
            ensure(enumerated as u128 == closed, || format!("n={n} k={k}: {enumerated} vs {closed}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (n,k) pairs agree"))
}

fn formula_suite() -> Check {
    for s in 1..=8u32 {
        for t in 1..=s {
            let f: u64 = f_exact(t as u64, s as u64).map_err(err)?;
            let o = surjections_oracle(t, s);
            ensure(f == o, || format!("f({t},{s}) = {f}, enumeration {o}"))?;
        }
    }
    let mut pairs = 0;
    for r in 2..=8u64 {
        for k in 2..=r {
            for s in 1..=60u64 {
                let a: BigUint = f_below_k(r, k, s).map_err(err)?;
                let b: BigUint = f_below_k_by_exact(r, k, s).map_err(err)?;
                ensure(a == b, || format!("r={r} k={k} s={s}: {a} vs {b}"))?;
                pairs += 1;
            }
        }
    }
    ensure(f_below_k::<BigUint>(3, 3, 3).map_err(err)? == big(21), || "f<3(3,3) != 21".into())?;
    Ok(format!("surjections t<=s<=8 match enumeration; {pairs} few-colors cases agree"))
}

struct TriangleStats {
    cases: usize,
    ie_cases: usize,
    deterministic: bool,
    detail: String,
}

fn triangle_case(
    ground: &GroundSet,
    r: u32,
    k: usize,
    stats: &mut TriangleStats,
) -> Result<(), String> {
    let gamma = gamma_k(ground, k).map_err(err)?;
    let mut methods = vec![Method::Bruteforce, Method::Pruned, Method::Symmetry];
    if gamma <= 20 {
        methods.push(Method::InclusionExclusion);
        stats.ie_cases += 1;
    }
    let mut reference: Option<BigUint> = None;
    for method in methods {
        let mut per_worker = Vec::new();
        for workers in [1, 2, 8] {
            let opts = CountOptions::default().with_workers(workers);
            per_worker.push(count_with::<BigCount>(ground, r, k, method, &opts).map_err(err)?.count);
        }
        if per_worker.iter().any(|c| c != &per_worker[0]) {
            stats.deterministic = false;
            stats.detail = format!("{method} on {ground} r={r} k={k}: {per_worker:?}");
        }
        let c = per_worker.swap_remove(0);
        match &reference {
            None => reference = Some(c),
            Some(prev) => ensure(prev == &c, || format!("{ground} r={r} k={k}: {method} gave {c}, bruteforce {prev}"))?,
        }
    }
    stats.cases += 1;
    Ok(())
}

fn oracle_triangle(stats: &mut TriangleStats) -> Check {
    let pairs = [(3u32, 3usize), (4, 3), (4, 4), (5, 4)];
    for n in 1..=12u32 {
        let g = GroundSet::interval(n).map_err(err)?;
        for &(r, k) in &pairs {
            triangle_case(&g, r, k, stats)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random = 0;
    while random < 200 {
        let s: Vec<i64> = (1..=10).filter(|_| rng.gen_bool(0.5)).collect();
        if s.is_empty() {
            continue;
        }
        let g = ground_of(10, &s);
        for &(r, k) in &pairs {
            triangle_case(&g, r, k, stats)?;
        }
        random += 1;
    }
    for s in subsets_of(10).filter(|s| s.len() >= 8) {
        let g = ground_of(10, &s);
        for &(r, k) in &pairs {
            triangle_case(&g, r, k, stats)?;
        }
    }
    let opts = CountOptions::default();
    let g3 = count_bruteforce::<BigCount>(&GroundSet::interval(3).unwrap(), 3, 3, &opts).map_err(err)?.count;
    let g4 = count_bruteforce::<BigCount>(&GroundSet::interval(4).unwrap(), 3, 3, &opts).map_err(err)?.count;
    ensure(g3 == big(21) && g4 == big(51), || format!("anchors gave {g3}, {g4}"))?;
    // anchors once more against a from-scratch count
    for (n, want) in [(3usize, 21u64), (4, 51)] {
        let set: Vec<i64> = (1..=n as i64).collect();
        let edges = ap_positions(&set, 3);
        let mut free = 0;
        for_each_coloring(n, 3, |c| free += u64::from(!edges.iter().any(|e| rainbow(e, c))));
        ensure(free == want, || format!("oracle for [{n}] gave {free}"))?;
    }
    Ok(format!(
        "{} cases (inclusion-exclusion on {}), anchors 21 and 51 hold",
        stats.cases, stats.ie_cases
    ))
}

fn lower_bound() -> Check {
    let opts = CountOptions::default();
    let mut cases = 0;
    let mut check = |n: u32, r: u32, k: usize| -> Result<(), String> {
        for s in subsets_of(n) {
            let g = count_pruned::<BigCount>(&ground_of(n, &s), r, k, &opts).map_err(err)?.count;
            let f: BigUint = f_below_k(r as u64, k as u64, s.len() as u64).map_err(err)?;
            ensure(g >= f, || format!("S={s:?} r={r} k={k}: g={g} < {f}"))?;
            cases += 1;
        }
        Ok(())
    };
    check(8, 3, 3)?;
    check(8, 4, 3)?;
    check(9, 4, 4)?;
    Ok(format!("g >= f<k on {cases} (S, r, k) cases"))
}

fn ratio_check() -> Check {
    let opts = CountOptions::default();
    let mut lines = Vec::new();
    for n in 3..=14u32 {
        let rep = ratio_report(n, 3, 3, &opts).map_err(err)?;
        let two_n = BigInt::from(1u8) << n;
        let expect = BigRational::from_integer(3.into()) - BigRational::new(3.into(), two_n);
        ensure(rep.lower == expect, || format!("n={n}: lower {} != {expect}", rep.lower))?;
        ensure(rep.lower <= rep.ratio, || format!("n={n}: lower {} > ratio {}", rep.lower, rep.ratio))?;
        ensure(rep.target == big(3), || format!("target {}", rep.target))?;
        lines.push(format!("n={n} ratio={}", rep.ratio));
    }
    println!("      ratio g/2^n for r=k=3: {}; limit 3 (not asserted)", lines.join(", "));
    Ok("lower = 3 - 3/2^n and lower <= ratio for n = 3..14; target 3".into())
}

fn algorithm_one() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..10_000 {
        let n: i64 = rng.gen_range(1..=500);
        let k: usize = rng.gen_range(2..=8);
        let density = rng.gen_range(0.3..1.0);
        let base: BTreeSet<i64> = (1..=n).filter(|_| rng.gen_bool(density)).collect();
        let diffs: BTreeSet<i64> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
        let a = rng.gen_range(1..=n);
        let got = refine_difference_set(a, &diffs, &base, k);
        let want: BTreeSet<i64> = diffs
            .iter()
            .copied()
            .filter(|&d| (1..k as i64).all(|i| base.contains(&(a + i * d))))
            .collect();
        ensure(got == want, || format!("instance {case}: a={a} k={k} n={n}"))?;
    }
    Ok("10000 random instances match the set-builder definition".into())
}

fn template_identities() -> Check {
    let mut full = 0;
    for n in 1..=40u32 {
        let gamma_of = |k| gamma_k(&GroundSet::interval(n).unwrap(), k).unwrap();
        for r in 2..=6u32 {
            let t = Template::full(n, r).map_err(err)?;
            for k in 2..=r as usize {
                let got = count_rainbow_subtemplates(&t, k).map_err(err)?;
                let want = gamma_of(k) as u128 * falling(r as u64, k as u64) as u128;
                ensure(got == want, || format!("n={n} r={r} k={k}: {got} vs {want}"))?;
                full += 1;
            }
        }
    }
    let mut colorings = 0u64;
    for n in 1..=8u32 {
        let set: Vec<i64> = (1..=n as i64).collect();
        for r in 1..=4u32 {
            for k in 2..=4usize {
                let edges = ap_positions(&set, k);
                let mut bad = None;
                for_each_coloring(n as usize, r, |c| {
                    if bad.is_some() {
                        return;
                    }
                    let col = Coloring::new(GroundSet::interval(n).unwrap(), r, c.iter().map(|x| x + 1).collect())
                        .unwrap();
                    let tmpl = coloring_to_template(&col, n).unwrap();
                    let via_template = count_rainbow_subtemplates(&tmpl, k).unwrap();
                    let direct = count_rainbow_aps_of_coloring(&col, k).unwrap();
                    let oracle = edges.iter().filter(|e| rainbow(e, c)).count();
                    if via_template != oracle as u128 || direct != oracle as u64 {
                        bad = Some(format!("{col} k={k}: template {via_template}, coloring {direct}, oracle {oracle}"));
                    }
                    colorings += 1;
                });
                if let Some(b) = bad {
                    return Err(b);
                }
            }
        }
    }
    Ok(format!("{full} full-palette cases; {colorings} coloring templates"))
}

fn anti_vdw_check() -> Check {
    let opts = CountOptions::default();
    let mut grounds: Vec<(GroundSet, Vec<i64>)> = (3..=9u32)
        .map(|n| (GroundSet::interval(n).unwrap(), (1..=n as i64).collect()))
        .collect();
    // [7] itself is already in the interval list
    for s in subsets_of(7).filter(|s| s.len() < 7) {
        if !oracle_aps(&s, 3).is_empty() {
            grounds.push((ground_of(7, &s), s));
        }
    }
    let mut values = Vec::new();
    for (g, s) in &grounds {
        let res = anti_vdw(g, 3, &opts).map_err(err)?;
        let want = aw_oracle(s, 3);
        ensure(res.aw == want, || format!("{g}: aw {} vs oracle {want}", res.aw))?;
        ensure(res.merge_check, || format!("{g}: merge check failed on {}", res.witness))?;
        let colors: Vec<u32> = res.witness.colors().to_vec();
        let edges = ap_positions(s, 3);
        ensure(
            res.witness.is_exact() && res.witness.r() == res.aw - 1 && !edges.iter().any(|e| rainbow(e, &colors)),
            || format!("{g}: witness {} is not an exact rainbow-free coloring", res.witness),
        )?;
        ensure((3..=s.len() as u32).contains(&res.aw), || format!("{g}: aw {} out of [3, |S|]", res.aw))?;
        if g.kind() == GroundKind::Interval {
            values.push(format!("aw([{}])={}", g.n(), res.aw));
        }
    }
    let a3 = anti_vdw(&GroundSet::interval(3).unwrap(), 3, &opts).map_err(err)?.aw;
    let a4 = anti_vdw(&GroundSet::interval(4).unwrap(), 3, &opts).map_err(err)?.aw;
    ensure(a3 == 3 && a4 == 4, || format!("anchors aw([3])={a3}, aw([4])={a4}"))?;
    Ok(format!("{} ground sets match the oracle; {}", grounds.len(), values.join(" ")))
}

fn cyclic_check() -> Check {
    let opts = CountOptions::default();
    let mut cases = 0;
    for n in 1..=12u32 {
        for r in [3u32, 4] {
            let c = cyclic_compare(n, r, 3, &opts).map_err(err)?;
            ensure(c.g_cyclic <= c.g_interval, || format!("n={n} r={r}: {} > {}", c.g_cyclic, c.g_interval))?;
            cases += 1;
        }
    }
    Ok(format!("g(Z_n) <= g([n]) on {cases} cases"))
}

fn scan_check() -> Check {
    let opts = CountOptions::default();
    let res = scan_subsets(10, 3, 3, &ScanStrategy::AllSubsets, &opts).map_err(err)?;
    ensure(res.complete && res.entries.len() == 1022, || format!("{} subsets scanned", res.entries.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let seq = CountOptions::sequential();
    for _ in 0..50 {
        let e = &res.entries[rng.gen_range(0..res.entries.len())];
        let brute = count_bruteforce::<BigCount>(&GroundSet::subset(10, &e.subset).unwrap(), 3, 3, &seq)
            .map_err(err)?
            .count;
        ensure(brute == e.count, || format!("{:?}: scan {} vs brute force {brute}", e.subset, e.count))?;
    }
    Ok(format!(
        "g([10]) = {}; best proper subset {:?} with {}; {} violations (findings)",
        res.full_count,
        res.max_subset.clone().unwrap_or_default(),
        res.max_count,
        res.violations.len()
    ))
}

fn pattern_check() -> Check {
    let four = GroundSet::interval(4).unwrap();
    let sols = enumerate_pattern_solutions(&LinearPattern::sidon(), &four).map_err(err)?;
    let mut oracle = 0;
    for_each_coloring(4, 4, |x| {
        let x: Vec<i64> = x.iter().map(|&v| v as i64 + 1).collect();
        if x.iter().collect::<BTreeSet<_>>().len() == 4 && x[0] - x[1] + x[2] - x[3] == 0 {
            oracle += 1;
        }
    });
    ensure(sols.len() == 8 && oracle == 8, || format!("{} solutions, oracle {oracle}", sols.len()))?;

    let opts = CountOptions::default();
    let mut cases = 0;
    for k in [3usize, 4] {
        let m = LinearPattern::ap_matrix(k).map_err(err)?;
        for n in 1..=10u32 {
            let g = GroundSet::interval(n).unwrap();
            for r in 1..=4u32 {
                let p = count_pattern_free::<BigCount>(&g, r, &m, Method::Pruned, &opts).map_err(err)?.count;
                let a = count_pruned::<BigCount>(&g, r, k, &opts).map_err(err)?.count;
                ensure(p == a, || format!("n={n} k={k} r={r}: pattern {p} vs progressions {a}"))?;
                cases += 1;
            }
        }
    }
    let sidon = count_pattern_free::<BigCount>(&four, 4, &LinearPattern::sidon(), Method::Bruteforce, &opts)
        .map_err(err)?
        .count;
    ensure(sidon == big(232), || format!("Sidon g on [4] = {sidon}"))?;
    Ok(format!("8 Sidon solutions in [4]; AP matrix agrees on {cases} cases; Sidon g([4], 4) = 232"))
}

fn main() {
    let mut suite = Suite { failed: Vec::new(), total: 0 };
    let secs = Duration::from_secs;
    suite.run("closed form vs enumeration", Some(secs(5)), closed_form);
    suite.run("formula suite", Some(secs(1)), formula_suite);
    let mut stats = TriangleStats { cases: 0, ie_cases: 0, deterministic: true, detail: String::new() };
    suite.run("oracle triangle", Some(secs(600)), || oracle_triangle(&mut stats));
    suite.run("few-colors lower bound", Some(secs(300)), lower_bound);
    suite.run("ratio report", None, ratio_check);
    suite.run("difference refinement", Some(secs(5)), algorithm_one);
    suite.run("template identities", None, template_identities);
    suite.run("anti-van der Waerden", Some(secs(300)), anti_vdw_check);
    suite.run("cyclic comparison", Some(secs(300)), cyclic_check);
    suite.run("extremality scan", Some(secs(1800)), scan_check);
    suite.run("pattern generalization", None, pattern_check);
    suite.run("determinism across 1, 2, 8 workers", None, || {
        ensure(stats.cases > 0, || "oracle triangle did not run".into())?;
        ensure(stats.deterministic, || stats.detail.clone())?;
        Ok(format!("identical counts on all {} triangle cases", stats.cases))
    });
    println!("{} of {} criteria passed", suite.total - suite.failed.len(), suite.total);
    if !suite.failed.is_empty() {
        std::process::exit(1);
    }
}
