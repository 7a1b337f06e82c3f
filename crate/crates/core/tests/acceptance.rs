// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line for each, and exits non-zero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soctam::{
    brute_force_schedule, build_rectangles, design_wrapper, diagonal_length, order_initial,
    parse_soc, schedule, serialize_soc, tam_table, verify_schedule, CoreSpec, RectSet, Rectangle,
    ScheduleViolation, SocSpec,
};

use common::{fixtures, load, random_core, simulate_test_cycles};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(actual: f64, target: f64, tol: f64) -> bool {
    (actual - target).abs() <= tol * target
}

fn pct(actual: f64, target: f64) -> String {
    format!("{:+.1}%", 100.0 * (actual - target) / target)
}

fn formula_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut checked = 0;
    for n in 0..1000u32 {
        let core = random_core(&mut rng, 1, 12, 6, 24);
        let w = rng.gen_range(1..=10);
        let cfg = design_wrapper(&core, w).map_err(|e| e.to_string())?;
        let sim = simulate_test_cycles(&cfg, core.patterns);
        if sim != cfg.test_time {
            return Err(format!(
                "core #{n} {core:?} at w={w}: formula {} vs simulated {sim}",
                cfg.test_time
            ));
        }
        checked += 1;
    }
    let took = start.elapsed();
    if took > Duration::from_secs(5) {
        return Err(format!(
            "{checked} cores agree but took {took:.2?} (limit 5 s)"
        ));
    }
    Ok(format!("{checked} cores, exact agreement, {took:.2?}"))
}

fn wrapper_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for n in 0..200u32 {
        let core = random_core(&mut rng, 1, 40, 20, 80);
        let mut prev: Option<(u64, u32)> = None;
        for w in 1..=64 {
            let cfg = design_wrapper(&core, w).map_err(|e| e.to_string())?;
            let ctx = || format!("core #{n} {core:?} w={w}");
            if cfg.tam_u > w {
                return Err(format!("{}: tam_u {} > w", ctx(), cfg.tam_u));
            }
            if let Some((t, u)) = prev {
                if cfg.test_time > t {
                    return Err(format!("{}: time rose {t} -> {}", ctx(), cfg.test_time));
                }
                if cfg.tam_u < u {
                    return Err(format!("{}: tam_u fell {u} -> {}", ctx(), cfg.tam_u));
                }
            }
            prev = Some((cfg.test_time, cfg.tam_u));

            let scan: u64 = cfg.chains.iter().map(|c| c.scan_length).sum();
            let ins: u64 = cfg.chains.iter().map(|c| c.input_cells).sum();
            let outs: u64 = cfg.chains.iter().map(|c| c.output_cells).sum();
            let mut ids: Vec<usize> = cfg
                .chains
                .iter()
                .flat_map(|c| c.scan_chain_ids.clone())
                .collect();
            ids.sort_unstable();
            if scan != core.scan_flops()
                || ins != core.input_cells()
                || outs != core.output_cells()
                || ids != (0..core.scan_chain_lengths.len()).collect::<Vec<_>>()
            {
                return Err(format!("{}: cells not conserved", ctx()));
            }

            if let Some(ub) = cfg.upper_bound {
                for c in &cfg.chains {
                    let oversized = c.scan_chain_ids.len() == 1
                        && u64::from(core.scan_chain_lengths[c.scan_chain_ids[0]]) > ub;
                    if !oversized && c.scan_length > ub {
                        return Err(format!(
                            "{}: scan part {} over bound {ub}",
                            ctx(),
                            c.scan_length
                        ));
                    }
                }
            }
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(10) {
        return Err(format!("properties hold but took {took:.2?} (limit 10 s)"));
    }
    Ok(format!("200 cores x 64 widths, {took:.2?}"))
}

fn peak_only(core_id: u32, height: u32, time: u64) -> RectSet {
    RectSet {
        core_id,
        rects: vec![Rectangle {
            core_id,
            height,
            width_cycles: time,
            width_norm: None,
        }],
        peak_tam: height,
        peak_time_cycles: time,
        diagonal: None,
    }
}

fn diagonal_example() -> Outcome {
    let cases = [(32.0, 7.1, 32.78), (16.0, 13.8, 21.13), (32.0, 5.4, 32.45)];
    let mut got = Vec::new();
    for (h, w, dl) in cases {
        let v = diagonal_length(h, w);
        if (v - dl).abs() > 0.01 {
            return Err(format!("DL({h}, {w}) = {v:.4}, want {dl}"));
        }
        got.push(format!("{v:.2}"));
    }
    // Normalized widths 7.1, 13.8 and 5.4 with T_min = 10 cycles.
    let sets = [
        peak_only(1, 32, 71),
        peak_only(2, 16, 138),
        peak_only(3, 32, 54),
    ];
    let order = order_initial(&sets, 10);
    if order != [1, 3, 2] {
        return Err(format!("order {order:?}, want [1, 3, 2]"));
    }
    Ok(format!("DL {} and order R1, R3, R2", got.join(", ")))
}

// Widths covered, utilized wires and longest chain, one row per line.
const PUBLISHED_ROWS: [(u32, u32, u32, u64); 14] = [
    (50, 64, 47, 521),
    (48, 49, 39, 1021),
    (32, 47, 24, 1042),
    (24, 31, 16, 1563),
    (20, 23, 12, 2084),
    (16, 19, 10, 2605),
    (14, 15, 8, 3126),
    (12, 13, 7, 3647),
    (10, 11, 6, 4689),
    (8, 9, 5, 5729),
    (6, 7, 4, 7809),
    (4, 5, 3, 11969),
    (2, 3, 2, 23789),
    (1, 1, 1, 24278),
];

fn core6_wrapper_table() -> Outcome {
    let soc = load("p93791_core6.soc");
    let core = &soc.cores[0];
    let rows = tam_table(core, 64).map_err(|e| e.to_string())?;
    let at = |w: u32| {
        rows.iter()
            .find(|r| r.width_lo <= w && w <= r.width_hi)
            .unwrap()
    };

    let one = at(1);
    let mut bad = Vec::new();
    if one.tam_u != 1 || one.longest_chain != core.total_scan_elements() {
        bad.push(format!(
            "width 1: ({}, {}) want (1, {})",
            one.tam_u,
            one.longest_chain,
            core.total_scan_elements()
        ));
    }
    let mut matched = 0;
    for (lo, hi, tam_u, longest) in PUBLISHED_ROWS {
        let mut row_bad = Vec::new();
        for w in lo..=hi {
            let r = at(w);
            if !within(f64::from(r.tam_u), f64::from(tam_u), 0.10)
                || !within(r.longest_chain as f64, longest as f64, 0.10)
            {
                row_bad.push(format!("w={w} ({}, {})", r.tam_u, r.longest_chain));
            }
        }
        if row_bad.is_empty() {
            matched += 1;
        } else {
            bad.push(format!(
                "row {lo}-{hi} ({tam_u}, {longest}): {}",
                row_bad.join(" ")
            ));
        }
    }
    if bad.is_empty() {
        Ok(format!("{matched}/14 rows within 10%, width 1 exact"))
    } else {
        Err(format!("{matched}/14 rows within 10%; {}", bad.join("; ")))
    }
}

fn timed_schedule(
    soc: &SocSpec,
    w: u32,
    p: Option<f64>,
) -> Result<(u64, Duration, Vec<ScheduleViolation>), String> {
    let start = Instant::now();
    let plan = schedule(soc, w, p).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    Ok((plan.makespan, took, verify_schedule(&plan, soc)))
}

fn d695_unconstrained() -> Outcome {
    let soc = load("d695.soc");
    let targets = [
        (16, 39572),
        (24, 27829),
        (32, 20402),
        (40, 20254),
        (48, 15075),
        (64, 14914),
    ];
    let mut report = Vec::new();
    let mut ok = true;
    for (w, target) in targets {
        let (makespan, took, violations) = timed_schedule(&soc, w, None)?;
        let pass = within(makespan as f64, target as f64, 0.10)
            && took < Duration::from_secs(1)
            && violations.is_empty();
        ok &= pass;
        report.push(format!(
            "W={w} {makespan} vs {target} ({}){}",
            pct(makespan as f64, target as f64),
            if pass { "" } else { " x" }
        ));
    }
    let sets: Vec<RectSet> = soc
        .cores
        .iter()
        .map(|c| build_rectangles(c, 24))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let t_min = soctam::compute_tmin(&sets).map_err(|e| e.to_string())?;
    let t_ok = within(t_min as f64, 1109.0, 0.05);
    ok &= t_ok;
    report.push(format!(
        "T_min(24) {t_min} vs 1109 ({}){}",
        pct(t_min as f64, 1109.0),
        if t_ok { "" } else { " x" }
    ));
    if ok {
        Ok(report.join("; "))
    } else {
        Err(report.join("; "))
    }
}

fn d695_power() -> Outcome {
    let soc = load("d695.soc");
    let targets = [
        (1500.0, 16, 40855),
        (1800.0, 24, 33010),
        (2000.0, 32, 21004),
        (1500.0, 64, 18163),
    ];
    let mut report = Vec::new();
    let mut ok = true;
    for (p, w, target) in targets {
        let (makespan, _, violations) = timed_schedule(&soc, w, Some(p))?;
        let feasible = violations.is_empty();
        let pass = within(makespan as f64, target as f64, 0.10) && feasible;
        ok &= pass;
        report.push(format!(
            "P={p} W={w} {makespan} vs {target} ({}){}{}",
            pct(makespan as f64, target as f64),
            if feasible { "" } else { " infeasible" },
            if pass { "" } else { " x" }
        ));
    }
    if ok {
        Ok(report.join("; "))
    } else {
        Err(report.join("; "))
    }
}

fn oracle_dominance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut gaps = 0;
    let mut worst = 0.0f64;
    for n in 0..500u32 {
        let count = rng.gen_range(1..=3);
        let cores: Vec<CoreSpec> = (1..=count)
            .map(|id| {
                random_core(&mut rng, id, 8, 4, 20).with_power(f64::from(rng.gen_range(10..=100)))
            })
            .collect();
        let w = rng.gen_range(1..=6);
        let p = rng
            .gen_bool(0.4)
            .then(|| f64::from(rng.gen_range(100..=250)));
        let soc = SocSpec::new("rand", cores, None).map_err(|e| format!("{e:?}"))?;
        let plan = schedule(&soc, w, p).map_err(|e| format!("instance #{n}: {e}"))?;
        let violations = verify_schedule(&plan, &soc);
        if !violations.is_empty() {
            return Err(format!("instance #{n}: {violations:?}"));
        }
        let best = brute_force_schedule(&soc, w, p).map_err(|e| format!("instance #{n}: {e}"))?;
        if plan.makespan < best {
            return Err(format!(
                "instance #{n}: heuristic {} beats optimum {best}",
                plan.makespan
            ));
        }
        let sets: Vec<RectSet> = soc
            .cores
            .iter()
            .map(|c| build_rectangles(c, w).unwrap())
            .collect();
        let peak = sets.iter().map(|s| s.peak_time_cycles).max().unwrap();
        let area: u64 = sets.iter().map(RectSet::min_area).sum();
        if plan.makespan < peak || plan.makespan < area.div_ceil(u64::from(w)) || best < peak {
            return Err(format!("instance #{n}: lower bound broken"));
        }
        if plan.makespan > best {
            gaps += 1;
            worst = worst.max(plan.makespan as f64 / best as f64 - 1.0);
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(60) {
        return Err(format!("checks hold but took {took:.2?} (limit 60 s)"));
    }
    Ok(format!(
        "500 instances, {gaps} above optimum (worst +{:.1}%), {took:.2?}",
        100.0 * worst
    ))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_soctam"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for path in fixtures() {
        let soc_path = path.to_str().unwrap();
        let soc = load(path.file_name().unwrap().to_str().unwrap());
        let mut commands: Vec<Vec<String>> = Vec::new();
        for core in &soc.cores {
            for fmt in ["text", "json", "csv"] {
                commands.push(
                    [
                        "wrapper",
                        "--soc",
                        soc_path,
                        "--core",
                        &core.id.to_string(),
                        "--max-width",
                        "64",
                        "--format",
                        fmt,
                    ]
                    .map(String::from)
                    .to_vec(),
                );
            }
        }
        for w in ["16", "32"] {
            for fmt in ["text", "json", "csv"] {
                commands.push(
                    [
                        "rects",
                        "--soc",
                        soc_path,
                        "--tam-width",
                        w,
                        "--format",
                        fmt,
                    ]
                    .map(String::from)
                    .to_vec(),
                );
            }
            for fmt in ["text", "json", "csv", "svg"] {
                let mut c: Vec<String> = [
                    "schedule",
                    "--soc",
                    soc_path,
                    "--tam-width",
                    w,
                    "--format",
                    fmt,
                ]
                .map(String::from)
                .to_vec();
                commands.push(c.clone());
                c.push("--normalize".into());
                commands.push(c);
            }
        }
        let json = dir.path().join("plan.json");
        let json = json.to_str().unwrap();
        let (code, _) = run_cli(&[
            "schedule",
            "--soc",
            soc_path,
            "--tam-width",
            "24",
            "--format",
            "json",
            "--out",
            json,
        ]);
        if code != 0 {
            return Err(format!("{soc_path}: schedule exited {code}"));
        }
        commands.push(
            ["verify", "--soc", soc_path, "--schedule", json]
                .map(String::from)
                .to_vec(),
        );

        for args in &commands {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let a = run_cli(&args);
            let b = run_cli(&args);
            if a.0 != 0 {
                return Err(format!("`{}` exited {}", args.join(" "), a.0));
            }
            if a != b {
                return Err(format!("`{}` differs between runs", args.join(" ")));
            }
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} commands over {} fixtures, byte-identical",
        fixtures().len()
    ))
}

fn round_trip() -> Outcome {
    let mut names = Vec::new();
    for path in fixtures() {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let soc = parse_soc(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let again = parse_soc(&serialize_soc(&soc)).map_err(|e| e.to_string())?;
        if again != soc {
            return Err(format!("{} does not round-trip", path.display()));
        }
        names.push(soc.name.clone());
    }
    let d695 = load("d695.soc");
    let powers: Vec<f64> = d695.cores.iter().filter_map(|c| c.power).collect();
    let table2 = [
        660.0, 602.0, 823.0, 275.0, 690.0, 354.0, 530.0, 753.0, 641.0, 1144.0,
    ];
    if powers != table2 {
        return Err(format!("d695 powers {powers:?}"));
    }
    Ok(format!(
        "{} round-trip; d695 powers intact",
        names.join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 formula fidelity vs shift simulation", formula_fidelity),
        ("2 wrapper monotonicity and balance", wrapper_properties),
        ("3 diagonal-length example and order", diagonal_example),
        ("4 p93791 core 6 wrapper table", core6_wrapper_table),
        (
            "5 d695 unconstrained makespans and T_min",
            d695_unconstrained,
        ),
        ("6 d695 power-constrained makespans", d695_power),
        (
            "7 oracle dominance, feasibility, lower bounds",
            oracle_dominance,
        ),
        ("8 CLI determinism", determinism),
        ("9 parser round-trip", round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
