use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ca_control::blocking::{
    certify_p_blocking, check_p_blocking_bounded, non_controllability_from_visibly_blocking,
    verify_visibly_blocking, BlockingEvidence, BlockingQuery, BlockingStatus,
};
use ca_control::graph::analyze_region;
use ca_control::trace::{
    approximation_equals_graph, k_approximation, sft_is_mixing, sft_is_transitive, trace_blocks,
};
use ca_control::{Error, Limits, RegionWord, Rule, TransitionGraph};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{AnalyzeArgs, BlockingArgs, RenderKind, SteerArgs, SurveyArgs, TraceArgs};
use crate::render::{render_pbm, render_text};
use crate::report::{
    AnalysisReport, BlockingRecord, RegionRecord, SteerRecord, SteerStep, SurveyRow, SurveyTable,
    TraceRecord,
};
use crate::CliError;

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn word(s: &str, n: usize, what: &str) -> Result<RegionWord, CliError> {
    let w: RegionWord = s.parse()?;
    if w.len() != n {
        return Err(Error::Input(format!("{what} word {s} has length {}, expected {n}", w.len())).into());
    }
    Ok(w)
}

pub(crate) fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    }
    Ok(())
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn trace_record(rule: &Rule, n: usize, k: usize, check_approx: bool, limits: &Limits) -> Result<TraceRecord, CliError> {
    let start = Instant::now();
    let lang = trace_blocks(rule, n, k, limits)?;
    let sft = k_approximation(&lang);
    let transitivity = sft_is_transitive(&sft);
    let mixing = sft_is_mixing(&sft);
    let approx = if check_approx {
        Some(approximation_equals_graph(rule, n, limits)?)
    } else {
        None
    };
    Ok(TraceRecord {
        n,
        k,
        block_count: lang.len(),
        strict_transitive: transitivity.strict,
        essential_transitive: transitivity.essential,
        mixing: mixing.mixing,
        essential_period: mixing.essential_period,
        approx_equals_graph: approx,
        elapsed_ms: ms(start),
    })
}

fn trace_line(t: &TraceRecord) -> String {
    format!(
        "trace n={} k={}: {} blocks, strict transitive={}, essential={}, mixing={}{}",
        t.n,
        t.k,
        t.block_count,
        t.strict_transitive,
        serde_json::to_value(t.essential_transitive).unwrap().as_str().unwrap_or_default(),
        t.mixing,
        t.approx_equals_graph
            .map(|a| format!(", A2 = G_n: {a}"))
            .unwrap_or_default()
    )
}

pub fn analyze(args: &AnalyzeArgs, limits: &Limits) -> Result<(AnalysisReport, String), CliError> {
    let start = Instant::now();
    let rule = Rule::parse(&args.rule)?;
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(Error::Input(format!("invalid region range {}..={}", args.n_min, args.n_max)).into());
    }
    if args.n_max > limits.max_region {
        return Err(Error::Resource(format!(
            "region length {} exceeds the cap of {}",
            args.n_max, limits.max_region
        ))
        .into());
    }
    let mut report = AnalysisReport::new("analyze", rule.name(), rule.radius());
    report.results = (args.n_min..=args.n_max)
        .into_par_iter()
        .map(|n| {
            let t0 = Instant::now();
            let row = analyze_region(&rule, n, args.index_cap, limits)?;
            Ok(RegionRecord {
                n,
                vertex_count: row.vertices,
                scc_count: row.scc_count,
                regionally_controllable: row.regionally_controllable,
                period: row.period,
                primitive: row.primitive,
                primitivity_index: row.primitivity_index,
                index_capped: row.index_capped,
                elapsed_ms: ms(t0),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if let Some(k) = args.trace_k {
        report.trace = (args.n_min..=args.n_max)
            .map(|n| trace_record(&rule, n, k, true, limits))
            .collect::<Result<Vec<_>, _>>()?;
    }
    report.all_n_status = Some(match report.results.iter().find(|r| !r.regionally_controllable) {
        Some(r) => format!("refuted at n={}", r.n),
        None => format!("supported up to n={}", args.n_max),
    });
    report.elapsed_ms = ms(start);

    let mut text = format!("rule {} (radius {})\n", rule.name(), rule.radius());
    text.push_str("   n  vertices  sccs  controllable  period  primitive  index\n");
    for r in &report.results {
        let index = match (r.primitivity_index, r.index_capped) {
            (_, true) => format!(">{}", args.index_cap),
            (i, false) => opt(i),
        };
        let _ = writeln!(
            text,
            "{:>4}  {:>8}  {:>4}  {:>12}  {:>6}  {:>9}  {:>5}",
            r.n,
            r.vertex_count,
            r.scc_count,
            r.regionally_controllable,
            opt(r.period),
            r.primitive,
            index
        );
    }
    for t in &report.trace {
        text.push_str(&trace_line(t));
        text.push('\n');
    }
    let _ = writeln!(
        text,
        "regional controllability for every n: {} (finite-level evidence only)",
        report.all_n_status.as_deref().unwrap_or_default()
    );
    write_json(args.json.as_deref(), &report)?;
    Ok((report, text))
}

fn parse_codes(spec: &str) -> Result<Vec<u8>, CliError> {
    if spec.trim() == "all" {
        return Ok((0..=255).collect());
    }
    let mut codes = spec
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<u8>()
                .map_err(|_| CliError::from(Error::Input(format!("\"{c}\" is not a Wolfram code 0..=255"))))
        })
        .collect::<Result<Vec<u8>, _>>()?;
    codes.sort_unstable();
    codes.dedup();
    Ok(codes)
}

pub fn survey(args: &SurveyArgs, limits: &Limits) -> Result<(SurveyTable, String), CliError> {
    let start = Instant::now();
    if args.radius != 1 {
        return Err(Error::Input(format!("survey supports radius 1 only, got {}", args.radius)).into());
    }
    let codes = parse_codes(&args.rules)?;
    let rows = codes
        .par_iter()
        .map(|&code| {
            let rule = Rule::wolfram(code);
            let row = analyze_region(&rule, args.n, args.index_cap, limits)?;
            Ok(SurveyRow {
                code,
                rule: rule.name().to_string(),
                scc_count: row.scc_count,
                regionally_controllable: row.regionally_controllable,
                period: row.period,
                primitive: row.primitive,
                primitivity_index: row.primitivity_index,
                index_capped: row.index_capped,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let family = if codes.len() == 256 {
        "elementary radius-1, all 256 rules".to_string()
    } else {
        format!("elementary radius-1, {} selected rules", codes.len())
    };
    let table = SurveyTable {
        schema_version: crate::report::SCHEMA_VERSION,
        tool_version: crate::report::TOOL_VERSION.to_string(),
        command: "survey".into(),
        family,
        radius: 1,
        n: args.n,
        rows,
        elapsed_ms: ms(start),
    };
    let mut text = format!("{} at n={}\n code  controllable  sccs  period  primitive  index\n", table.family, table.n);
    for r in &table.rows {
        let _ = writeln!(
            text,
            "{:>5}  {:>12}  {:>4}  {:>6}  {:>9}  {:>5}",
            r.code,
            r.regionally_controllable,
            r.scc_count,
            opt(r.period),
            r.primitive,
            opt(r.primitivity_index)
        );
    }
    let controllable = table.rows.iter().filter(|r| r.regionally_controllable).count();
    let _ = writeln!(text, "{controllable} of {} rules regionally controllable", table.rows.len());
    write_json(args.json.as_deref(), &table)?;
    Ok((table, text))
}

pub fn steer(args: &SteerArgs, limits: &Limits) -> Result<(AnalysisReport, String), CliError> {
    let start = Instant::now();
    let rule = Rule::parse(&args.rule)?;
    let from = word(&args.from, args.n, "--from")?;
    let to = word(&args.to, args.n, "--to")?;
    if args.render == Some(RenderKind::Image) && args.out.is_none() {
        return Err(Error::Input("--render image needs --out".into()).into());
    }
    let graph = TransitionGraph::build(&rule, args.n, limits)?;
    let plan = match args.exact_time {
        Some(t) => graph.synthesize_control_exact_time(&from, &to, t, limits)?,
        None => graph.synthesize_control(&from, &to)?,
    };
    let mut text = format!("rule {}, n={}: {} -> {}\n", rule.name(), args.n, from, to);
    let mut record = SteerRecord {
        n: args.n,
        from,
        to,
        exact_time: args.exact_time,
        result: "UNREACHABLE".into(),
        horizon: None,
        steps: Vec::new(),
        elapsed_ms: 0.0,
    };
    match plan {
        None => {
            text.push_str("UNREACHABLE\n");
        }
        Some(plan) => {
            let traj = plan.replay(&rule)?;
            record.result = "REACHED".into();
            record.horizon = Some(plan.horizon());
            record.steps = plan
                .steps
                .iter()
                .enumerate()
                .map(|(i, &control)| SteerStep {
                    t: i + 1,
                    control,
                    row: traj.rows[i + 1].word,
                })
                .collect();
            let _ = writeln!(text, "REACHED in T={}", plan.horizon());
            let _ = writeln!(text, "t=0 row={from}");
            for s in &record.steps {
                let _ = writeln!(
                    text,
                    "t={} left={} right={} row={}",
                    s.t, s.control.left, s.control.right, s.row
                );
            }
            let border = if args.no_borders { 0 } else { rule.radius() };
            match (args.render, args.out.as_deref()) {
                (Some(RenderKind::Text), None) => text.push_str(&render_text(&traj, border)),
                (Some(RenderKind::Text), Some(path)) => std::fs::write(path, render_text(&traj, border))
                    .map_err(|e| CliError::Io(path.display().to_string(), e))?,
                (Some(RenderKind::Image), Some(path)) => std::fs::write(path, render_pbm(&traj, border))
                    .map_err(|e| CliError::Io(path.display().to_string(), e))?,
                _ => {}
            }
        }
    }
    record.elapsed_ms = ms(start);
    let mut report = AnalysisReport::new("steer", rule.name(), rule.radius());
    report.steering = Some(record);
    report.elapsed_ms = ms(start);
    write_json(args.json.as_deref(), &report)?;
    Ok((report, text))
}

pub fn trace(args: &TraceArgs, limits: &Limits) -> Result<(AnalysisReport, String), CliError> {
    let start = Instant::now();
    let rule = Rule::parse(&args.rule)?;
    let record = trace_record(&rule, args.n, args.k, args.check_approx, limits)?;
    let mut text = format!("rule {}\n", rule.name());
    text.push_str(&trace_line(&record));
    text.push('\n');
    let mut report = AnalysisReport::new("trace", rule.name(), rule.radius());
    report.trace.push(record);
    report.elapsed_ms = ms(start);
    write_json(args.json.as_deref(), &report)?;
    Ok((report, text))
}

fn parse_set(spec: &str, l: usize) -> Result<Vec<RegionWord>, CliError> {
    if spec.trim() == "all" {
        if l > 20 {
            return Err(Error::Resource(format!("cannot list all words of length {l}")).into());
        }
        return Ok((0..1u64 << l).map(|b| RegionWord::from_bits(l, b)).collect::<Result<_, _>>()?);
    }
    spec.split(',').map(|w| word(w.trim(), l, "--set")).collect()
}

pub fn blocking(args: &BlockingArgs, limits: &Limits) -> Result<(AnalysisReport, String), CliError> {
    let start = Instant::now();
    let rule = Rule::parse(&args.rule)?;
    let t_max = args.t_max.unwrap_or((6 / rule.radius()).max(1));
    let mut report = AnalysisReport::new("blocking", rule.name(), rule.radius());
    let mut text = format!("rule {}\n", rule.name());

    if args.visibly {
        let (Some(l), Some(set)) = (args.l, args.set.as_deref()) else {
            return Err(Error::Input("--visibly needs --l and --set".into()).into());
        };
        if args.word.is_some() || args.p.is_some() || args.offset.is_some() {
            return Err(Error::Input("--visibly cannot be combined with --word/--p/--offset".into()).into());
        }
        let members = parse_set(set, l)?;
        let verification = verify_visibly_blocking(&rule, &members, l, t_max, limits)?;
        let _ = writeln!(
            text,
            "visibly blocking set of {} word(s) of length {l}",
            verification.members.len()
        );
        let _ = match &verification.closure.witness {
            None => writeln!(text, "closure under one step: pass (exact)"),
            Some(w) => writeln!(text, "closure under one step: FAIL, witness {w}"),
        };
        let _ = match &verification.propagation.witness {
            None => writeln!(text, "no propagation across the word: pass up to t={t_max}"),
            Some(w) => writeln!(
                text,
                "no propagation across the word: FAIL ({:?}) at t={}, cell {}",
                w.direction, w.time, w.position
            ),
        };
        let verdict = if verification.verified() {
            let n_max = args.n_max.unwrap_or((l + 4).min(limits.max_region));
            let v = non_controllability_from_visibly_blocking(&rule, &verification, n_max, limits)?;
            let _ = writeln!(text, "NOT CONTROLLABLE (propagation checked to t={t_max})");
            let _ = match &v.evidence {
                BlockingEvidence::AllWords { eventual_period: Some(p) } => writeln!(
                    text,
                    "evidence: all words blocking; eventually periodic (m,p')=({},{})",
                    p.preperiod, p.period
                ),
                BlockingEvidence::AllWords { eventual_period: None } => {
                    writeln!(text, "evidence: all words blocking; no eventual period found within bounds")
                }
                BlockingEvidence::Cylinder { inside, outside, unreachable_in_region } => writeln!(
                    text,
                    "evidence: {outside} unreachable from {inside} on {l} cells: {}",
                    opt(*unreachable_in_region)
                ),
            };
            if v.horizon_limited {
                let _ = writeln!(text, "no disconnected G_n found for n in {l}..={n_max} (horizon-limited)");
            } else {
                let ns: Vec<String> = v.graph_witnesses.iter().map(|g| g.n.to_string()).collect();
                let _ = writeln!(text, "G_n not strongly connected for n in {{{}}}", ns.join(","));
            }
            Some(v)
        } else {
            text.push_str("set not verified; no controllability verdict\n");
            None
        };
        report.blocking.push(BlockingRecord::Visibly {
            verification,
            verdict,
            elapsed_ms: ms(start),
        });
    } else {
        let (Some(w), Some(p), Some(offset)) = (args.word.as_deref(), args.p, args.offset) else {
            return Err(Error::Input("blocking needs --word, --p and --offset, or --visibly".into()).into());
        };
        if args.l.is_some() || args.set.is_some() {
            return Err(Error::Input("--l/--set require --visibly".into()).into());
        }
        let w: RegionWord = w.parse()?;
        let query = BlockingQuery::new(w, p, offset, t_max)?;
        let bounded = check_p_blocking_bounded(&rule, &query, limits)?;
        let certificate = certify_p_blocking(&rule, &query, limits)?;
        let status = if certificate.status == BlockingStatus::Certified {
            "certified"
        } else if bounded.status == BlockingStatus::Refuted {
            "refuted"
        } else {
            "not_refuted"
        };
        let _ = writeln!(text, "word {w}, window [{offset},{}), horizon {t_max}", offset + p);
        match (&bounded.refutation, &certificate.certificate) {
            (_, Some(c)) => {
                let _ = writeln!(text, "Certified: reachable strip sets cycle (tail {}, cycle {})", c.tail, c.cycle);
            }
            (Some(r), None) => {
                let _ = writeln!(
                    text,
                    "Refuted at t={}: contexts ({},{}) and ({},{}) give windows {} and {}",
                    r.time, r.first.0, r.first.1, r.second.0, r.second.1, r.first_window, r.second_window
                );
            }
            (None, None) => {
                let _ = writeln!(text, "NotRefuted up to t={t_max}; no certificate (Unknown beyond the horizon)");
            }
        }
        report.blocking.push(BlockingRecord::Word {
            word: w,
            p,
            offset,
            t_max,
            status: status.into(),
            bounded,
            certificate,
            elapsed_ms: ms(start),
        });
    }
    report.elapsed_ms = ms(start);
    write_json(args.json.as_deref(), &report)?;
    Ok((report, text))
}
