use std::fs;

use num_traits::ToPrimitive;
use rainbow_core::{
    anti_vdw, coloring_to_template, container_statistic, count_pattern_free, count_with, cyclic_compare,
    f_below_k, f_below_k_by_exact, gamma_k, ratio_report, scan_subsets, sidon_experiment, BigCount,
    BigCountReport, BigRatio, Coloring, CountOptions, GroundSet, LinearPattern, Method, ScanResult,
    ScanStrategy, Template,
};
use serde_json::{json, Value};

use crate::args::{Cli, Command, Common, GroundArgs, MethodArg, ScanArgs, StrategyArg};
use crate::cache::{cache_key, Cache, CacheRecord};
use crate::output::Output;
use crate::CliError;

const COUNT_HEADERS: &[&str] = &["ground", "r", "k_or_pattern", "method", "count", "elapsed_ms", "nodes"];
const SCAN_HEADERS: &[&str] = &["subset", "count", "is_max", "violation"];

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let common = &cli.common;
    let opts = options(common)?;
    let mut cache = common.cache.as_deref().map(Cache::open).transpose()?;
    let mut pending: Option<CliError> = None;

    let out = match &cli.command {
        Command::Gamma { ground, k } => {
            let g = ground_set(ground)?;
            let gamma = gamma_k(&g, *k)?;
            Output::single(
                &["ground", "k", "gamma"],
                vec![g.descriptor(), k.to_string(), gamma.to_string()],
                json!({ "ground": g.descriptor(), "k": k, "gamma": gamma }),
            )
        }
        Command::Count { ground, r, k, method } => {
            let g = ground_set(ground)?;
            let method = to_method(*method);
            counted(common, cache.as_mut(), "count", &g, *r, k.to_string(), method, || {
                count_with::<BigCount>(&g, *r, *k, method, &opts)
            })?
        }
        Command::Pattern { ground, r, pattern, method } => {
            let g = ground_set(ground)?;
            let text = fs::read_to_string(pattern)
                .map_err(|e| CliError::Usage(format!("cannot read pattern file {}: {e}", pattern.display())))?;
            let m = LinearPattern::parse(&text)?;
            let method = to_method(*method);
            counted(common, cache.as_mut(), "pattern", &g, *r, m.id(), method, || {
                count_pattern_free::<BigCount>(&g, *r, &m, method, &opts)
            })?
        }
        Command::Formula { r, k, s } => {
            let sum: BigCount = f_below_k(*r, *k, *s)?;
            let by_exact: BigCount = f_below_k_by_exact(*r, *k, *s)?;
            if sum != by_exact {
                return Err(rainbow_core::Error::Invariant(format!(
                    "few-colors forms disagree: {sum} vs {by_exact}"
                ))
                .into());
            }
            Output::single(
                &["r", "k", "s", "count", "count_by_exact"],
                vec![r.to_string(), k.to_string(), s.to_string(), sum.to_string(), by_exact.to_string()],
                json!({ "r": r, "k": k, "s": s, "count": sum.to_string(), "count_by_exact": by_exact.to_string() }),
            )
        }
        Command::Ratio { n, r, k } => {
            let rep = ratio_report(*n, *r, *k, &opts)?;
            let error_term = rep.error_term.map(|e| format!("{e:.6e}")).unwrap_or_default();
            let mut out = Output::single(
                &["n", "r", "k", "g", "ratio", "ratio_value", "lower", "lower_value", "target", "error_term"],
                vec![
                    n.to_string(),
                    r.to_string(),
                    k.to_string(),
                    rep.g.to_string(),
                    rep.ratio.to_string(),
                    decimal(&rep.ratio),
                    rep.lower.to_string(),
                    decimal(&rep.lower),
                    rep.target.to_string(),
                    error_term,
                ],
                json!({
                    "n": n, "r": r, "k": k,
                    "g": rep.g.to_string(),
                    "ratio": rep.ratio.to_string(),
                    "ratio_value": rep.ratio.to_f64(),
                    "lower": rep.lower.to_string(),
                    "lower_value": rep.lower.to_f64(),
                    "target": rep.target.to_string(),
                    "error_term": rep.error_term,
                }),
            );
            out.notes.push(format!("limit as n grows: {} (asymptotic, not checked)", rep.target));
            out
        }
        Command::Scan { n, r, k, scan } => {
            let res = scan_subsets(*n, *r, *k, &strategy(scan), &opts)?;
            if let Some(c) = cache.as_mut() {
                cache_scan(c, &res)?;
            }
            if !res.complete {
                pending = Some(incomplete(&res));
            }
            scan_output(&res, json!({}))
        }
        Command::Sidon { n, r, scan } => {
            let rep = sidon_experiment(*n, *r, &strategy(scan), &opts)?;
            if let Some(c) = cache.as_mut() {
                cache_scan(c, &rep.scan)?;
            }
            if !rep.scan.complete {
                pending = Some(incomplete(&rep.scan));
            }
            let extra = json!({
                "full_is_max": rep.full_is_max,
                "fraction_at_most_3": rep.fraction_at_most_3.to_string(),
                "fraction_at_most_3_value": rep.fraction_at_most_3.to_f64(),
            });
            let mut out = scan_output(&rep.scan, extra);
            out.notes.push(format!(
                "[n] beats every scanned subset: {}; share using at most 3 colors: {} ({})",
                rep.full_is_max,
                rep.fraction_at_most_3,
                decimal(&rep.fraction_at_most_3)
            ));
            out
        }
        Command::Aw { ground, k } => {
            let g = ground_set(ground)?;
            let res = anti_vdw(&g, *k, &opts)?;
            if let Some(c) = cache.as_mut() {
                c.append(CacheRecord {
                    nodes: res.nodes,
                    ..CacheRecord::new("aw", res.ground.clone(), 0, k.to_string(), "aw", res.aw.to_string())
                })?;
            }
            if !res.merge_check {
                pending = Some(
                    rainbow_core::Error::Invariant("merging two color classes of the witness made it rainbow".into())
                        .into(),
                );
            }
            let witness = res.witness.to_literal();
            Output::single(
                &["ground", "k", "aw", "witness", "merge_check", "nodes"],
                vec![
                    res.ground.clone(),
                    k.to_string(),
                    res.aw.to_string(),
                    witness.clone(),
                    res.merge_check.to_string(),
                    res.nodes.to_string(),
                ],
                json!({
                    "ground": res.ground, "k": k, "aw": res.aw, "witness": witness,
                    "merge_check": res.merge_check, "nodes": res.nodes,
                }),
            )
        }
        Command::Cyclic { n, r, k } => {
            let res = cyclic_compare(*n, *r, *k, &opts)?;
            if let Some(c) = cache.as_mut() {
                for (ground, count) in [
                    (GroundSet::interval(*n)?, &res.g_interval),
                    (GroundSet::cyclic(*n)?, &res.g_cyclic),
                ] {
                    c.append(CacheRecord::new(
                        "cyclic",
                        ground.descriptor(),
                        *r,
                        k.to_string(),
                        Method::Pruned.as_str(),
                        count.to_string(),
                    ))?;
                }
            }
            let mut out = Output::single(
                &["n", "r", "k", "g_interval", "g_cyclic", "cyclic_ratio", "target"],
                vec![
                    n.to_string(),
                    r.to_string(),
                    k.to_string(),
                    res.g_interval.to_string(),
                    res.g_cyclic.to_string(),
                    res.cyclic_ratio.to_string(),
                    res.target.to_string(),
                ],
                json!({
                    "n": n, "r": r, "k": k,
                    "g_interval": res.g_interval.to_string(),
                    "g_cyclic": res.g_cyclic.to_string(),
                    "cyclic_ratio": res.cyclic_ratio.to_string(),
                    "cyclic_ratio_value": res.cyclic_ratio.to_f64(),
                    "target": res.target.to_string(),
                }),
            );
            out.notes.push(format!("cyclic ratio {} against limit {}", decimal(&res.cyclic_ratio), res.target));
            out
        }
        Command::TemplateStat { n, r, k, template, coloring } => {
            let t = match (template, coloring) {
                (Some(path), None) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::Usage(format!("cannot read template file {}: {e}", path.display())))?;
                    Template::parse(&text, *n, *r)?
                }
                (None, Some(literal)) => {
                    let n = n.ok_or_else(|| CliError::Usage("--coloring needs --n".into()))?;
                    let pairs = Coloring::parse_pairs(literal)?;
                    let c = Coloring::from_pairs(GroundSet::interval(n)?, *r, &pairs)?;
                    coloring_to_template(&c, n)?
                }
                _ => return Err(CliError::Usage("give exactly one of --template or --coloring".into())),
            };
            let stat = container_statistic(&t, *k)?;
            Output::single(
                &["order", "r", "k", "rk", "bound", "satisfies"],
                vec![
                    t.order().to_string(),
                    r.to_string(),
                    k.to_string(),
                    stat.rk.to_string(),
                    format!("{:.6}", stat.bound),
                    stat.satisfies.to_string(),
                ],
                json!({
                    "order": t.order(), "r": r, "k": k, "rk": stat.rk.to_string(),
                    "bound": stat.bound, "satisfies": stat.satisfies,
                }),
            )
        }
    };

    let stdout = std::io::stdout();
    out.write(common.format, &mut stdout.lock())?;
    pending.map_or(Ok(()), Err)
}

fn options(common: &Common) -> Result<CountOptions, CliError> {
    let mut opts = CountOptions::default();
    if let Some(w) = common.workers {
        opts = opts.with_workers(w as usize);
    }
    opts.budget.max_nodes = common.budget_nodes;
    if let Some(s) = common.budget_seconds {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Usage(format!("--budget-seconds must be positive, got {s}")));
        }
        opts.budget.max_seconds = Some(s);
    }
    if let Some(c) = common.bruteforce_ceiling {
        opts.budget.bruteforce_ceiling = c as u128;
    }
    Ok(opts)
}

fn ground_set(args: &GroundArgs) -> Result<GroundSet, CliError> {
    match (&args.set, args.cyclic, args.n) {
        (Some(_), true, _) => Err(CliError::Usage("--set and --cyclic are mutually exclusive".into())),
        (None, true, Some(n)) => Ok(GroundSet::cyclic(n)?),
        (Some(set), false, n) => {
            let elements = GroundSet::parse_subset_literal(set)?;
            let n = match n {
                Some(n) => n,
                None => elements.iter().copied().max().unwrap_or(0).try_into().unwrap_or(0),
            };
            Ok(GroundSet::subset(n, &elements)?)
        }
        (None, false, Some(n)) => Ok(GroundSet::interval(n)?),
        (None, _, None) => Err(CliError::Usage("a ground set needs --n (with optional --set or --cyclic)".into())),
    }
}

fn to_method(m: MethodArg) -> Method {
    m.name().parse().expect("method names are known")
}

fn strategy(args: &ScanArgs) -> ScanStrategy {
    match args.strategy {
        StrategyArg::AllSubsets => ScanStrategy::AllSubsets,
        StrategyArg::Deletions => ScanStrategy::Deletions,
        StrategyArg::Random => ScanStrategy::Random { samples: args.samples, density: args.density, seed: args.seed },
    }
}

/// Count-style subcommands: answer from the cache when possible, otherwise
/// compute, check against any cached value, and record.
#[allow(clippy::too_many_arguments)]
fn counted(
    common: &Common,
    cache: Option<&mut Cache>,
    role: &str,
    ground: &GroundSet,
    r: u32,
    label: String,
    method: Method,
    compute: impl FnOnce() -> rainbow_core::Result<BigCountReport>,
) -> Result<Output, CliError> {
    let key = cache_key(&ground.descriptor(), r, &label, method.as_str());
    let cached = cache.as_ref().and_then(|c| c.lookup(&key)).cloned();
    let report = match (&cached, common.verify) {
        (Some(rec), false) => BigCountReport {
            ground: rec.ground.clone(),
            r,
            k_or_pattern: label,
            method,
            count: rec
                .count
                .parse()
                .map_err(|_| CliError::Conflict(format!("cached count {:?} is not a natural number", rec.count)))?,
            elapsed_ms: 0,
            nodes: 0,
        },
        _ => {
            let report = compute()?;
            if let Some(c) = cache {
                c.append(CacheRecord {
                    elapsed_ms: report.elapsed_ms,
                    nodes: report.nodes,
                    ..CacheRecord::new(
                        role,
                        report.ground.clone(),
                        r,
                        report.k_or_pattern.clone(),
                        method.as_str(),
                        report.count.to_string(),
                    )
                })?;
            }
            report
        }
    };
    Ok(count_output(&report, common.stable))
}

fn count_output(report: &BigCountReport, stable: bool) -> Output {
    let mut value: Value = serde_json::from_str(&report.to_json()).expect("report is json");
    if stable {
        value.as_object_mut().expect("object").remove("elapsed_ms");
    }
    let elapsed = if stable { String::new() } else { report.elapsed_ms.to_string() };
    Output::single(
        COUNT_HEADERS,
        vec![
            report.ground.clone(),
            report.r.to_string(),
            report.k_or_pattern.clone(),
            report.method.to_string(),
            report.count.to_string(),
            elapsed,
            report.nodes.to_string(),
        ],
        value,
    )
}

fn cache_scan(cache: &mut Cache, res: &ScanResult) -> Result<(), CliError> {
    let method = Method::Pruned.as_str();
    let full = GroundSet::interval(res.n)?.descriptor();
    cache.append(CacheRecord::new("scan", full, res.r, res.constraint.clone(), method, res.full_count.to_string()))?;
    for e in &res.entries {
        let ground = GroundSet::subset(res.n, &e.subset)?.descriptor();
        cache.append(CacheRecord::new("scan", ground, res.r, res.constraint.clone(), method, e.count.to_string()))?;
    }
    Ok(())
}

fn incomplete(res: &ScanResult) -> CliError {
    rainbow_core::Error::BudgetExceeded(format!(
        "scan stopped early after {} subsets; partial results above",
        res.entries.len()
    ))
    .into()
}

fn scan_output(res: &ScanResult, extra: Value) -> Output {
    let rows: Vec<Vec<String>> = res
        .rows()
        .into_iter()
        .map(|(s, c, m, v)| vec![s, c, m.to_string(), v.to_string()])
        .collect();
    let entries: Vec<Value> = res
        .rows()
        .into_iter()
        .map(|(s, c, m, v)| json!({ "subset": s, "count": c, "is_max": m, "violation": v }))
        .collect();
    let mut summary = json!({
        "n": res.n,
        "r": res.r,
        "constraint": res.constraint,
        "strategy": res.strategy,
        "full_count": res.full_count.to_string(),
        "max_subset": res.max_subset.as_ref().map(|s| join(s)),
        "max_count": res.max_count.to_string(),
        "violations": res.violations.iter().map(|s| join(s)).collect::<Vec<_>>(),
        "complete": res.complete,
        "nodes": res.nodes,
    });
    let obj = summary.as_object_mut().expect("object");
    if let Value::Object(extra) = extra {
        obj.extend(extra);
    }
    obj.insert("entries".into(), Value::Array(entries));
    let notes = vec![format!(
        "full [{}]: {}; best proper subset: {} ({}); violations: {}{}",
        res.n,
        res.full_count,
        res.max_subset.as_ref().map(|s| join(s)).unwrap_or_else(|| "-".into()),
        res.max_count,
        res.violations.len(),
        if res.complete { "" } else { "; incomplete" }
    )];
    Output { headers: SCAN_HEADERS, rows, json: vec![summary], notes }
}

fn join(s: &[i64]) -> String {
    s.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn decimal(q: &BigRatio) -> String {
    q.to_f64().map(|v| format!("{v:.6}")).unwrap_or_default()
}
