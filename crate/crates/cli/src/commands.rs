use std::io::Read;

use ecag_core::bound::eval_bound;
use ecag_core::chars::{char_sum_profile_points, count_chars_order_gt};
use ecag_core::code::{
    build_code, min_distance_bruteforce, min_distance_ssp, EcagCode, EvaluationSet, BRUTE_FORCE_MESSAGES,
};
use ecag_core::ff::is_prime_power;
use ecag_core::scan::{distinct_groups, exhaustive_mds_check, scan_region, NPolicy, ScanConfig};
use ecag_core::sieve::run_sieve_check;
use ecag_core::ssp::count_subset_sums;
use ecag_core::{Curve, CurveSpec, Field, GroupStructure, Point};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, Context};

/// What a command produced. `body` goes to `--out` or stdout; `summary`
/// goes to stdout when `--out` is set and to stderr otherwise. A `failure`
/// is reported after the body is written.
pub struct Output {
    pub body: String,
    pub summary: Option<String>,
    pub failure: Option<CliError>,
}

impl Output {
    fn json(v: &Value) -> Output {
        Output::text(serde_json::to_string_pretty(v).expect("JSON values serialize"))
    }

    fn text(body: String) -> Output {
        Output {
            body,
            summary: None,
            failure: None,
        }
    }
}

pub fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Curve(CurveCmd::Info(c)) => curve_info(&c),
        Command::Chars(CharsCmd::Phi { curve, subset, k }) => chars_phi(&curve, &subset, k),
        Command::Ssp(SspCmd::Count {
            curve,
            subset,
            k,
            targets,
        }) => ssp_count(&curve, &subset, k, &targets),
        Command::Bound(BoundCmd::Eval { curve, subset, k }) => bound_eval(&curve, &subset, k),
        Command::Code(CodeCmd::Build(args)) => code_build(&args),
        Command::Code(CodeCmd::Mindist { code, method }) => code_mindist(&code, method),
        Command::Scan(ScanCmd::Mds {
            q_range,
            n_policy,
            seed,
            k_min,
            k_max,
            curves_per_q,
            subsets_per_curve,
            jobs,
            format,
        }) => {
            let policy: NPolicy = n_policy
                .parse()
                .map_err(|e| CliError::Usage(format!("--n-policy: {e}")))?;
            let mut config = ScanConfig::new(parse_q_range(&q_range)?, policy, seed);
            config.k_min = k_min;
            config.k_max = k_max;
            config.curves_per_q = curves_per_q;
            config.subsets_per_curve = subsets_per_curve;
            scan_mds(&config, jobs, format)
        }
        Command::Scan(ScanCmd::Exhaustive {
            q_range,
            k_min,
            k_max,
            jobs,
        }) => scan_exhaustive(&parse_q_range(&q_range)?, k_min, k_max, jobs),
        Command::Sieve(SieveCmd::Check { k, trials, seed }) => sieve_check(k, trials, seed),
    }
}

fn load_curve(arg: &CurveArg) -> Result<GroupStructure, CliError> {
    let text = if arg.curve.trim_start().starts_with('{') {
        arg.curve.clone()
    } else if arg.curve == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&arg.curve).map_err(|e| CliError::Io(format!("{}: {e}", arg.curve)))?
    };
    let spec: CurveSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed curve JSON: {e}")))?;
    let curve = Curve::from_spec(&spec).ctx("ec")?;
    GroupStructure::new(&curve).ctx("ec")
}

fn parse_point(s: &str) -> Result<Point, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("{e}")))
}

/// `;`-separated points; `P` stands for `divisor` when one is given.
fn parse_points(list: &str, divisor: Option<&Point>) -> Result<Vec<Point>, CliError> {
    list.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match (t, divisor) {
            ("P", Some(p)) => Ok(*p),
            _ => parse_point(t),
        })
        .collect()
}

fn resolve_subset(gs: &GroupStructure, args: &SubsetArgs) -> Result<Vec<Point>, CliError> {
    match (&args.points, &args.exclude) {
        (Some(list), _) => parse_points(list, None),
        (None, Some(list)) => gs.complement(&parse_points(list, None)?).ctx("ec"),
        (None, None) => Ok(gs.sorted_points()),
    }
}

fn parse_q_range(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("--q-range {s:?}: expected A..B or a single value"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse::<u32>().map_err(|_| bad())?,
            b.trim().parse::<u32>().map_err(|_| bad())?,
        ),
        None => {
            let q = s.trim().parse::<u32>().map_err(|_| bad())?;
            (q, q)
        }
    };
    let qs: Vec<u32> = (lo..=hi).filter(|&q| is_prime_power(q as u64)).collect();
    if qs.is_empty() {
        return Err(CliError::Usage(format!("--q-range {s:?} contains no prime power")));
    }
    Ok(qs)
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))
}

fn curve_info(arg: &CurveArg) -> Result<Output, CliError> {
    let gs = load_curve(arg)?;
    let curve = gs.curve();
    let (g1, g2) = gs.generators();
    Ok(Output::json(&json!({
        "curve_id": curve.id(),
        "q": curve.field().order(),
        "N": gs.order(),
        "n1": gs.n1(),
        "n2": gs.n2(),
        "trace": gs.trace(),
        "case": gs.case().label(),
        "j": curve.j_invariant(),
        "generators": [g1, g2],
    })))
}

fn chars_phi(arg: &CurveArg, subset: &SubsetArgs, k: Option<usize>) -> Result<Output, CliError> {
    let gs = load_curve(arg)?;
    let pts = resolve_subset(&gs, subset)?;
    let profile = char_sum_profile_points(&gs, &pts).ctx("chars")?;
    let group = gs.group();
    let argmax = profile
        .argmax
        .map(|c| json!({ "u": c.u, "v": c.v, "order": c.order(group) }));
    let mut v = json!({
        "size": profile.size,
        "phi": profile.phi,
        "tolerance": profile.tolerance,
        "argmax": argmax,
    });
    if let Some(k) = k {
        v["k"] = json!(k);
        v["s_count"] = json!(count_chars_order_gt(group, k));
    }
    Ok(Output::json(&v))
}

fn ssp_count(arg: &CurveArg, subset: &SubsetArgs, k: usize, targets: &[String]) -> Result<Output, CliError> {
    let gs = load_curve(arg)?;
    let pts = resolve_subset(&gs, subset)?;
    let table = count_subset_sums(&gs, &pts, k).ctx("ssp")?;
    let targets: Vec<Point> = if targets.is_empty() {
        gs.sorted_points()
    } else {
        targets.iter().map(|t| parse_point(t)).collect::<Result<_, _>>()?
    };
    let counts = targets
        .iter()
        .map(|b| Ok(json!({ "b": b, "count": table.count_at(&gs, k, b).ctx("ssp")?.to_string() })))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Output::json(&json!({
        "n": pts.len(),
        "k": k,
        "group_order": gs.order(),
        "min_count": table.min_count(k).to_string(),
        "counts": counts,
    })))
}

fn bound_eval(arg: &CurveArg, subset: &SubsetArgs, k: usize) -> Result<Output, CliError> {
    let gs = load_curve(arg)?;
    let pts = resolve_subset(&gs, subset)?;
    let profile = char_sum_profile_points(&gs, &pts).ctx("chars")?;
    let report = eval_bound(&gs, &profile, pts.len(), k).ctx("bound")?;
    Ok(Output::json(&serde_json::to_value(report).expect("report serializes")))
}

fn construct(args: &CodeArgs) -> Result<(GroupStructure, EcagCode), CliError> {
    let gs = load_curve(&args.curve)?;
    let p = parse_point(&args.p)?;
    let extra = if args.exclude.trim() == "auto" {
        Vec::new()
    } else {
        parse_points(&args.exclude, Some(&p))?
    };
    let set = EvaluationSet::all_except(&gs, &p, &extra).ctx("code")?;
    let code = build_code(gs.curve(), &set, args.k, &p).ctx("code")?;
    Ok((gs, code))
}

fn code_build(args: &CodeArgs) -> Result<Output, CliError> {
    let (gs, code) = construct(args)?;
    let d = min_distance_ssp(&gs, &code).ctx("code")?;
    let (n, k) = (code.n(), code.k());
    let descriptor = json!({
        "n": n,
        "k": k,
        "d": d,
        "P": code.divisor_point(),
        "curve": gs.curve().spec(),
        "basis": code.basis().functions.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "eval_set": code.eval_set().points(),
        "gen_matrix": code.gen_matrix(),
    });
    let body = format!(
        "[{n}, {k}, {d}]\n{}",
        serde_json::to_string_pretty(&descriptor).expect("JSON values serialize")
    );
    Ok(Output::text(body))
}

fn code_mindist(args: &CodeArgs, method: Method) -> Result<Output, CliError> {
    let (gs, code) = construct(args)?;
    let q = gs.curve().field().order() as f64;
    let method = match method {
        Method::Auto if q.powi(code.k() as i32) <= BRUTE_FORCE_MESSAGES as f64 => Method::Both,
        Method::Auto => Method::Ssp,
        m => m,
    };
    let mut v = json!({ "n": code.n(), "k": code.k(), "P": code.divisor_point() });
    let mut failure = None;
    match method {
        Method::Ssp => {
            v["d"] = json!(min_distance_ssp(&gs, &code).ctx("code")?);
            v["path"] = json!("ssp");
        }
        Method::Brute => {
            v["d"] = json!(min_distance_bruteforce(&code).ctx("code")?);
            v["path"] = json!("brute");
        }
        Method::Both | Method::Auto => {
            let ssp = min_distance_ssp(&gs, &code).ctx("code")?;
            let brute = min_distance_bruteforce(&code).ctx("code")?;
            v["d"] = json!(ssp);
            v["path"] = json!("both");
            if ssp != brute {
                v["d_brute"] = json!(brute);
                failure = Some(CliError::Invariant(format!(
                    "ssp gives d = {ssp}, brute force gives {brute}"
                )));
            }
        }
    }
    let mut out = Output::json(&v);
    out.failure = failure;
    Ok(out)
}

fn scan_mds(config: &ScanConfig, jobs: Option<usize>, format: ScanFormat) -> Result<Output, CliError> {
    let report = thread_pool(jobs)?.install(|| scan_region(config)).ctx("scan")?;
    let body = match format {
        ScanFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.rows {
                w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            String::from_utf8(bytes).expect("CSV output is UTF-8")
        }
        ScanFormat::Json => serde_json::to_string_pretty(&report.rows).expect("rows serialize"),
    };
    let summary = json!({
        "curves_scanned": report.curves_scanned,
        "rows": report.rows.len(),
        "mds_rows": report.rows.iter().filter(|r| r.is_mds).count(),
        "thresholds": report.thresholds,
        "fit": report.fit,
    });
    Ok(Output {
        body,
        summary: Some(serde_json::to_string_pretty(&summary).expect("JSON values serialize")),
        failure: None,
    })
}

fn scan_exhaustive(qs: &[u32], k_min: usize, k_max: Option<usize>, jobs: Option<usize>) -> Result<Output, CliError> {
    let pool = thread_pool(jobs)?;
    let mut per_q = Vec::new();
    for &q in qs {
        let field = Field::of_order(q).ctx("ff")?;
        let n = q as usize + 2;
        let k_max = k_max.unwrap_or((q as usize).saturating_sub(2));
        if k_min > k_max {
            per_q.push(json!({ "q": q, "n": n, "skipped": "empty k range" }));
            continue;
        }
        let groups = distinct_groups(&field, n + 2).ctx("scan")?;
        let checks = pool
            .install(|| {
                groups
                    .iter()
                    .map(|g| exhaustive_mds_check(g, n, k_min, k_max))
                    .collect::<Result<Vec<_>, _>>()
            })
            .ctx("scan")?;
        per_q.push(json!({ "q": q, "n": n, "k_min": k_min, "k_max": k_max, "groups": checks }));
    }
    Ok(Output::json(&Value::Array(per_q)))
}

fn sieve_check(k: usize, trials: usize, seed: u64) -> Result<Output, CliError> {
    let report = run_sieve_check(k, trials, seed).ctx("sieve")?;
    let passed = report.passed();
    let mut v = serde_json::to_value(&report).expect("report serializes");
    v["status"] = json!(if passed { "pass" } else { "fail" });
    let mut out = Output::json(&v);
    if !passed {
        out.failure = Some(CliError::Invariant(format!(
            "{} sieve comparisons failed",
            report.failures.len()
        )));
    }
    Ok(out)
}
