//! Acceptance suite. Each test checks one criterion against an oracle
//! written here from scratch and prints a single PASS/FAIL line.
//!
//! Run with `cargo test -p ca-control-cli --test acceptance -- --nocapture`.

use std::collections::{BTreeSet, VecDeque};
use std::process::Command;
use std::time::{Duration, Instant};

use ca_control::blocking::{
    certify_p_blocking, check_p_blocking_bounded, non_controllability_from_visibly_blocking,
    verify_visibly_blocking, BlockingEvidence, BlockingQuery, BlockingStatus,
};
use ca_control::trace::{approximation_equals_graph, replay_seed, trace_blocks};
use ca_control::{
    evolve_controlled, ControlPair, EventualPeriod, Limits, Nilpotency, RegionWord, Rule, TransitionGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, what: &str, started: Instant, budget: Option<Duration>, failures: &[String]) {
    let elapsed = started.elapsed();
    let in_time = budget.map_or(true, |b| elapsed <= b);
    let ok = failures.is_empty() && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(" (limit {:.0?})", b));
    println!(
        "[{}] criterion {id}: {what} | {} failures, {:.2?}{budget_note}",
        if ok { "PASS" } else { "FAIL" },
        failures.len(),
        elapsed,
    );
    for f in failures.iter().take(10) {
        println!("    {f}");
    }
    assert!(failures.is_empty(), "criterion {id}: {} failures", failures.len());
    assert!(in_time, "criterion {id}: took {elapsed:?}");
}

fn word(s: &str) -> RegionWord {
    s.parse().unwrap()
}

fn all_words(l: usize) -> Vec<RegionWord> {
    (0..1u64 << l).map(|b| RegionWord::from_bits(l, b).unwrap()).collect()
}

// Oracle dynamics on explicit cell vectors, straight from the rule number.

fn cells(bits: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect()
}

fn pack(cells: &[u8]) -> u64 {
    cells.iter().fold(0, |acc, &c| (acc << 1) | c as u64)
}

fn local(code: u8, a: u8, b: u8, c: u8) -> u8 {
    (code >> (4 * a + 2 * b + c)) & 1
}

fn free_step(code: u8, x: &[u8]) -> Vec<u8> {
    x.windows(3).map(|w| local(code, w[0], w[1], w[2])).collect()
}

fn controlled_step(code: u8, x: &[u8], left: u8, right: u8) -> Vec<u8> {
    let mut ext = Vec::with_capacity(x.len() + 2);
    ext.push(left);
    ext.extend_from_slice(x);
    ext.push(right);
    free_step(code, &ext)
}

fn oracle_successors(code: u8, n: usize) -> Vec<Vec<usize>> {
    (0..1u64 << n)
        .map(|v| {
            let x = cells(v, n);
            let mut out: Vec<usize> = (0..4)
                .map(|c| pack(&controlled_step(code, &x, (c >> 1) as u8, (c & 1) as u8)) as usize)
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}

type Matrix = Vec<Vec<u64>>;

fn adjacency(code: u8, n: usize) -> Matrix {
    let size = 1usize << n;
    let words = size.div_ceil(64);
    oracle_successors(code, n)
        .into_iter()
        .map(|succ| {
            let mut row = vec![0u64; words];
            for v in succ {
                row[v / 64] |= 1 << (v % 64);
            }
            row
        })
        .collect()
}

fn has(row: &[u64], v: usize) -> bool {
    (row[v / 64] >> (v % 64)) & 1 == 1
}

fn row_full(row: &[u64], size: usize) -> bool {
    (0..size).all(|v| has(row, v))
}

/// Warshall closure over paths of length >= 1.
fn closure(mut m: Matrix) -> Matrix {
    let size = m.len();
    for k in 0..size {
        let row_k = m[k].clone();
        for row in m.iter_mut() {
            if has(row, k) {
                for (a, b) in row.iter_mut().zip(&row_k) {
                    *a |= b;
                }
            }
        }
    }
    m
}

fn product(p: &Matrix, a: &Matrix) -> Matrix {
    p.iter()
        .map(|row| {
            let mut out = vec![0u64; row.len()];
            for v in 0..a.len() {
                if has(row, v) {
                    for (o, x) in out.iter_mut().zip(&a[v]) {
                        *o |= x;
                    }
                }
            }
            out
        })
        .collect()
}

/// Smallest `M <= (N-1)^2 + 1` with `A^M` all-positive.
fn positive_power(a: &Matrix) -> Option<u64> {
    let size = a.len();
    let bound = ((size as u64 - 1) * (size as u64 - 1)) + 1;
    let mut p = a.clone();
    for m in 1..=bound {
        if p.iter().all(|row| row_full(row, size)) {
            return Some(m);
        }
        p = product(&p, a);
    }
    None
}

fn bfs_distances(code: u8, n: usize, from: usize) -> Vec<Option<usize>> {
    let succ = oracle_successors(code, n);
    let mut dist = vec![None; succ.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in &succ[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn cactl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cactl")).args(args).output().unwrap()
}

#[test]
fn criterion_1_golden_rule_90_run() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("steer.json");
    let out = cactl(&[
        "steer", "--rule", "wolfram:90", "--n", "6", "--from", "011100", "--to", "000000",
        "--json", json.to_str().unwrap(),
    ]);
    if out.status.code() != Some(0) {
        failures.push(format!("steer exited with {:?}", out.status.code()));
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let steering = &report["steering"];
    let steps = steering["steps"].as_array().cloned().unwrap_or_default();
    if steering["result"] != "REACHED" || steps.is_empty() || steps.len() > 3 {
        failures.push(format!("plan of length {} ({})", steps.len(), steering["result"]));
    }
    // Replay the reported controls with the oracle.
    let mut x = cells(0b011100, 6);
    for step in &steps {
        let control: ControlPair = serde_json::from_value(step["control"].clone()).unwrap();
        x = controlled_step(90, &x, control.left.get(0), control.right.get(0));
        if pack(&x) != step["row"].as_str().unwrap().parse::<RegionWord>().unwrap().bits() {
            failures.push(format!("row mismatch at t={}", step["t"]));
        }
    }
    if pack(&x) != 0 {
        failures.push("replay does not end at 000000".into());
    }

    let controls: Vec<ControlPair> = ["0,1", "1,0", "1,0"].iter().map(|s| ControlPair::parse(s).unwrap()).collect();
    let traj = evolve_controlled(&Rule::wolfram(90), &word("011100"), &controls).unwrap();
    let rows: Vec<String> = traj.words().skip(1).map(|w| w.to_string()).collect();
    if rows != ["110111", "010101", "000000"] {
        failures.push(format!("evolution rows {rows:?}"));
    }
    // Hand oracle for the same run.
    let mut x = cells(0b011100, 6);
    let mut hand = Vec::new();
    for (l, r) in [(0, 1), (1, 0), (1, 0)] {
        x = controlled_step(90, &x, l, r);
        hand.push(x.iter().map(|c| char::from(b'0' + c)).collect::<String>());
    }
    if hand != rows {
        failures.push(format!("hand oracle rows {hand:?}"));
    }
    verdict(1, "rule 90 steering example", started, Some(Duration::from_secs(1)), &failures);
}

#[test]
fn criterion_2_controllability_matches_closure() {
    let started = Instant::now();
    let limits = Limits::default();
    let mut failures = Vec::new();
    for code in 0..=255u8 {
        let rule = Rule::wolfram(code);
        for n in 1..=6 {
            let reach = closure(adjacency(code, n));
            let size = 1usize << n;
            let expected = (0..size).all(|u| (0..size).all(|v| u == v || has(&reach[u], v)));
            let got = TransitionGraph::build(&rule, n, &limits).unwrap().regional_controllability().controllable;
            if got != expected {
                failures.push(format!("rule {code} n={n}: got {got}, closure says {expected}"));
            }
        }
    }
    verdict(2, "controllability vs transitive closure, 256 rules, n=1..6", started, Some(Duration::from_secs(60)), &failures);
}

#[test]
fn criterion_3_primitivity_matches_boolean_powers() {
    let started = Instant::now();
    let limits = Limits::default();
    let mut failures = Vec::new();
    for code in 0..=255u8 {
        let rule = Rule::wolfram(code);
        for n in 1..=4 {
            let oracle = positive_power(&adjacency(code, n));
            let graph = TransitionGraph::build(&rule, n, &limits).unwrap();
            let result = graph.primitivity_report(4096);
            let structural = result.strongly_connected && result.period == Some(1);
            if result.primitive != oracle.is_some() || structural != result.primitive {
                failures.push(format!("rule {code} n={n}: primitive {} vs power {:?}", result.primitive, oracle));
            }
            if result.primitive && result.index != oracle {
                failures.push(format!("rule {code} n={n}: index {:?} vs power {:?}", result.index, oracle));
            }
        }
    }
    verdict(3, "primitivity vs Boolean powers, 256 rules, n=1..4", started, Some(Duration::from_secs(60)), &failures);
}

#[test]
fn criterion_4_shift_index_is_n() {
    let started = Instant::now();
    let limits = Limits::default();
    let rule = Rule::wolfram(170);
    let mut failures = Vec::new();
    for n in 1..=8 {
        let graph = TransitionGraph::build(&rule, n, &limits).unwrap();
        let index = graph.primitivity_index(4096).unwrap();
        let oracle = positive_power(&adjacency(170, n));
        if index != Some(n as u64) || oracle != Some(n as u64) {
            failures.push(format!("n={n}: index {index:?}, oracle {oracle:?}"));
        }
    }
    verdict(4, "rule 170 index of primitivity equals n, n=1..8", started, Some(Duration::from_secs(30)), &failures);
}

#[test]
fn criterion_5_two_block_approximation_is_the_graph() {
    let started = Instant::now();
    let limits = Limits::default();
    let mut failures = Vec::new();
    for code in 0..=255u8 {
        for n in 1..=4 {
            match approximation_equals_graph(&Rule::wolfram(code), n, &limits) {
                Ok(true) => {}
                other => failures.push(format!("rule {code} n={n}: {other:?}")),
            }
        }
    }
    verdict(5, "2-block approximation equals transition graph, 256 rules, n=1..4", started, Some(Duration::from_secs(120)), &failures);
}

#[test]
fn criterion_6_synthesis_is_sound_and_minimal() {
    let started = Instant::now();
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut failures = Vec::new();
    let cases = 1200;
    let mut reached = 0;
    for _ in 0..cases {
        let code: u8 = rng.gen();
        let n = rng.gen_range(1..=8usize);
        let s0 = rng.gen_range(0..1u64 << n);
        let sd = rng.gen_range(0..1u64 << n);
        let rule = Rule::wolfram(code);
        let graph = TransitionGraph::build(&rule, n, &limits).unwrap();
        let from = RegionWord::from_bits(n, s0).unwrap();
        let to = RegionWord::from_bits(n, sd).unwrap();
        let oracle = bfs_distances(code, n, s0 as usize)[sd as usize];
        let tag = format!("rule {code} n={n} {from}->{to}");
        match (graph.synthesize_control(&from, &to).unwrap(), oracle) {
            (Some(plan), Some(d)) => {
                reached += 1;
                if plan.horizon() != d {
                    failures.push(format!("{tag}: T={} but distance {d}", plan.horizon()));
                }
                let mut x = cells(s0, n);
                for c in &plan.steps {
                    x = controlled_step(code, &x, c.left.get(0), c.right.get(0));
                }
                if pack(&x) != sd || plan.replay(&rule).unwrap().last() != to {
                    failures.push(format!("{tag}: plan does not replay"));
                }
            }
            (None, None) => {}
            (got, expected) => failures.push(format!("{tag}: plan {:?} vs distance {expected:?}", got.map(|p| p.horizon()))),
        }
    }
    println!("    {cases} cases, {reached} reachable");
    verdict(6, "synthesis replays and matches breadth-first distance", started, None, &failures);
}

#[test]
fn criterion_7_counterexamples() {
    let started = Instant::now();
    let limits = Limits::default();
    let mut failures = Vec::new();

    let identity = Rule::wolfram(204);
    for n in 1..=8 {
        if TransitionGraph::build(&identity, n, &limits).unwrap().regional_controllability().controllable {
            failures.push(format!("rule 204 controllable at n={n}"));
        }
    }
    let period = identity.check_eventually_periodic(4, 4, &limits).unwrap();
    if period != Some(EventualPeriod { preperiod: 0, period: 1 }) {
        failures.push(format!("rule 204 eventual period {period:?}"));
    }
    for l in 1..=4 {
        for w in all_words(l) {
            for p in 1..=l {
                for k in 0..=l - p {
                    let q = BlockingQuery::new(w, p, k, 4).unwrap();
                    let status = certify_p_blocking(&identity, &q, &limits).unwrap().status;
                    if status != BlockingStatus::Certified {
                        failures.push(format!("rule 204 word {w} p={p} k={k}: {status:?}"));
                    }
                }
            }
        }
    }
    let report = verify_visibly_blocking(&identity, &all_words(2), 2, 5, &limits).unwrap();
    if !report.verified() {
        failures.push("rule 204 A^2 not verified visibly blocking".into());
    } else {
        let verdict = non_controllability_from_visibly_blocking(&identity, &report, 6, &limits).unwrap();
        let expected = BlockingEvidence::AllWords { eventual_period: Some(EventualPeriod { preperiod: 0, period: 1 }) };
        if verdict.controllable || verdict.evidence != expected || verdict.graph_witnesses.is_empty() {
            failures.push(format!("rule 204 verdict {verdict:?}"));
        }
    }

    let zero = Rule::wolfram(0);
    for n in 1..=8 {
        if TransitionGraph::build(&zero, n, &limits).unwrap().regional_controllability().controllable {
            failures.push(format!("rule 0 controllable at n={n}"));
        }
    }
    let nil = zero.check_nilpotent_bounded(4, &limits).unwrap();
    if nil != Some(Nilpotency { symbol: 0, time: 1 }) {
        failures.push(format!("rule 0 nilpotency {nil:?}"));
    }

    let xor = Rule::wolfram(90);
    let q = BlockingQuery::new(word("000"), 1, 1, 4).unwrap();
    let v = check_p_blocking_bounded(&xor, &q, &limits).unwrap();
    match (&v.status, &v.refutation) {
        (BlockingStatus::Refuted, Some(r)) if r.time == 2 => {
            let (a, b) = r.replay(&xor, &q);
            if a == b || a != r.first_window || b != r.second_window {
                failures.push("rule 90 refutation does not replay".into());
            }
            // Independent replay of the two contexts with the oracle.
            let run = |(left, right): &(RegionWord, RegionWord)| {
                let mut x = cells(left.bits(), left.len());
                x.extend(cells(0, 3));
                x.extend(cells(right.bits(), right.len()));
                for _ in 0..r.time {
                    x = free_step(90, &x);
                }
                x[left.len() + 1 - r.time]
            };
            if run(&r.first) == run(&r.second) {
                failures.push("rule 90 contexts agree at the window".into());
            }
        }
        _ => failures.push(format!("rule 90 query: {v:?}")),
    }
    verdict(7, "counterexample suite (rules 204, 0, 90)", started, None, &failures);
}

#[test]
fn criterion_8_trace_blocks_are_exact() {
    let started = Instant::now();
    let limits = Limits::default();
    let mut failures = Vec::new();
    for code in 0..=255u8 {
        let rule = Rule::wolfram(code);
        for n in 1..=3 {
            let langs: Vec<_> = (1..=4).map(|k| trace_blocks(&rule, n, k, &limits).unwrap()).collect();
            for k in 1..=3 {
                let lang = &langs[k - 1];
                let mut seen = BTreeSet::new();
                for (rows, seed) in lang.blocks() {
                    match seed {
                        Some(s) if replay_seed(&rule, n, k, s) == rows => {}
                        _ => failures.push(format!("rule {code} n={n} k={k}: seed {seed:?} does not replay")),
                    }
                    seen.insert(rows.iter().map(|w| w.bits()).collect::<Vec<_>>());
                }
                // Oracle: every seed of the dependence cone, evolved cell by cell.
                let width = n + 2 * (k - 1);
                let mut expected = BTreeSet::new();
                for s in 0..1u64 << width {
                    let mut x = cells(s, width);
                    let mut rows = Vec::with_capacity(k);
                    for t in 0..k {
                        let off = k - 1 - t;
                        rows.push(pack(&x[off..off + n]));
                        if t + 1 < k {
                            x = free_step(code, &x);
                        }
                    }
                    expected.insert(rows);
                }
                if seen != expected {
                    failures.push(format!("rule {code} n={n} k={k}: {} blocks vs {} by enumeration", seen.len(), expected.len()));
                }
                let upper = &langs[k];
                let mut prefixes = BTreeSet::new();
                for (rows, _) in upper.blocks() {
                    if !lang.contains(&rows[..k]) || !lang.contains(&rows[1..]) {
                        failures.push(format!("rule {code} n={n} k={k}: projection of {rows:?} missing"));
                    }
                    prefixes.insert(rows[..k].iter().map(|w| w.bits()).collect::<Vec<_>>());
                }
                if prefixes != seen {
                    failures.push(format!("rule {code} n={n} k={k}: projection is not onto"));
                }
            }
        }
    }
    verdict(8, "trace blocks replay and project, 256 rules, n<=3, k<=3", started, Some(Duration::from_secs(120)), &failures);
}
