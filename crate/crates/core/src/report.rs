// SPDX-License-Identifier: Apache-2.0

//! Text, CSV, JSON and SVG renderings used by the command-line tool.

use std::fmt::Write as _;

use crate::rect::{diagonal_length, RectSet};
use crate::schedule::{Schedule, ScheduleEntry};
use crate::soc::{CoreSpec, SocSpec};
use crate::wrapper::TamTableEntry;

fn width_range(row: &TamTableEntry) -> String {
    if row.width_lo == row.width_hi {
        row.width_lo.to_string()
    } else {
        format!("{}-{}", row.width_lo, row.width_hi)
    }
}

pub fn wrapper_table_text(core: &CoreSpec, rows: &[TamTableEntry]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# wrapper table for core {} ({})",
        core.id,
        core.label()
    );
    let _ = writeln!(
        out,
        "{:<10} {:>6} {:>14} {:>12}",
        "TAM size", "TAM_u", "longest chain", "test time"
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{:<10} {:>6} {:>14} {:>12}",
            width_range(row),
            row.tam_u,
            row.longest_chain,
            row.test_time
        );
    }
    out
}

pub fn wrapper_table_json(core: &CoreSpec, rows: &[TamTableEntry]) -> String {
    let value = serde_json::json!({ "core": core.id, "rows": rows });
    serde_json::to_string_pretty(&value).expect("json") + "\n"
}

pub fn rects_text(sets: &[RectSet], t_min: u64, order: &[u32]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "T_min {t_min}");
    let order: Vec<String> = order.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "order {}", order.join(" "));
    for s in sets {
        let dl = diagonal_length(
            f64::from(s.peak_tam),
            s.peak_time_cycles as f64 / t_min as f64,
        );
        let _ = writeln!(
            out,
            "core {} peak_tam {} peak_time {} diagonal {:.4}",
            s.core_id, s.peak_tam, s.peak_time_cycles, dl
        );
        for r in &s.rects {
            let _ = writeln!(out, "  {:>4} x {}", r.height, r.width_cycles);
        }
    }
    out
}

pub fn rects_csv(sets: &[RectSet]) -> String {
    let mut out = String::from("core,height,width_cycles\n");
    for s in sets {
        for r in &s.rects {
            let _ = writeln!(out, "{},{},{}", s.core_id, r.height, r.width_cycles);
        }
    }
    out
}

pub fn rects_json(sets: &[RectSet], t_min: u64, order: &[u32]) -> String {
    let value = crate::rect::rect_sets_json(sets, t_min, order);
    serde_json::to_string_pretty(&value).expect("json") + "\n"
}

fn fmt_time(t: u64, t_min: Option<u64>) -> String {
    match t_min {
        Some(d) => format!("{:.3}", t as f64 / d as f64),
        None => t.to_string(),
    }
}

pub fn schedule_text(schedule: &Schedule, soc: &SocSpec, normalize: bool) -> String {
    let norm = normalize.then_some(schedule.t_min);
    let mut out = String::new();
    let _ = writeln!(out, "soc        {}", schedule.soc);
    let _ = writeln!(out, "TAM width  {}", schedule.w_max);
    match schedule.p_max {
        Some(p) => {
            let _ = writeln!(out, "power cap  {p} mW");
        }
        None => {
            let _ = writeln!(out, "power cap  none");
        }
    }
    let _ = writeln!(out, "T_min      {}", schedule.t_min);
    let _ = writeln!(out, "makespan   {}", schedule.makespan);
    if normalize {
        let _ = writeln!(out, "makespan/T_min {}", fmt_time(schedule.makespan, norm));
    }
    let bin = u64::from(schedule.w_max) * schedule.makespan;
    let _ = writeln!(
        out,
        "idle area  {} ({:.2}% of bin)",
        schedule.idle_area,
        if bin == 0 {
            0.0
        } else {
            100.0 * schedule.idle_area as f64 / bin as f64
        }
    );
    let _ = writeln!(
        out,
        "{:>4} {:<10} {:>10} {:>10} {:>6} {:>8}",
        "core", "name", "start", "finish", "width", "power"
    );
    let mut rows: Vec<&ScheduleEntry> = schedule.entries.iter().collect();
    rows.sort_by_key(|e| (e.start, e.core_id));
    for e in rows {
        let name = soc.core(e.core_id).map(CoreSpec::label).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:>4} {:<10} {:>10} {:>10} {:>6} {:>8}",
            e.core_id,
            name,
            fmt_time(e.start, norm),
            fmt_time(e.finish, norm),
            e.width,
            e.power
        );
    }
    out
}

pub fn schedule_csv(schedule: &Schedule) -> String {
    let mut out = String::from("core,start,finish,width,power\n");
    for e in &schedule.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.core_id, e.start, e.finish, e.width, e.power
        );
    }
    out
}

pub fn schedule_json(schedule: &Schedule) -> String {
    serde_json::to_string_pretty(schedule).expect("json") + "\n"
}

/// Wire lanes given to each entry (parallel to `schedule.entries`).
///
/// Entries are placed in start order; each takes the lowest-numbered lanes
/// free at its start. Returns `None` if some instant needs more lanes than
/// the bin has.
pub fn assign_lanes(schedule: &Schedule) -> Option<Vec<Vec<u32>>> {
    let mut free_at = vec![0u64; schedule.w_max as usize];
    let mut order: Vec<usize> = (0..schedule.entries.len()).collect();
    order.sort_by_key(|&k| (schedule.entries[k].start, schedule.entries[k].core_id));
    let mut lanes = vec![Vec::new(); schedule.entries.len()];
    for k in order {
        let e = &schedule.entries[k];
        let chosen: Vec<u32> = (0..schedule.w_max)
            .filter(|&l| free_at[l as usize] <= e.start)
            .take(e.width as usize)
            .collect();
        if chosen.len() < e.width as usize {
            return None;
        }
        for &l in &chosen {
            free_at[l as usize] = e.finish;
        }
        lanes[k] = chosen;
    }
    Some(lanes)
}

/// Consecutive runs of lanes, as `(first, count)`.
fn lane_runs(lanes: &[u32]) -> Vec<(u32, u32)> {
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for &l in lanes {
        match runs.last_mut() {
            Some((first, count)) if *first + *count == l => *count += 1,
            _ => runs.push((l, 1)),
        }
    }
    runs
}

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

/// Gantt chart: x is time, each TAM wire is a horizontal lane.
pub fn schedule_svg(schedule: &Schedule, soc: &SocSpec, normalize: bool) -> String {
    let lanes = assign_lanes(schedule).unwrap_or_default();
    let left = 70.0;
    let top = 40.0;
    let plot_w = 860.0;
    let lane_h = (480.0 / f64::from(schedule.w_max.max(1))).clamp(4.0, 24.0);
    let plot_h = lane_h * f64::from(schedule.w_max);
    let total_w = left + plot_w + 30.0;
    let total_h = top + plot_h + 50.0;
    let span = schedule.makespan.max(1) as f64;
    // Snapped to the printed precision so adjacent bars share an edge.
    let x = |t: u64| ((left + plot_w * t as f64 / span) * 100.0).round() / 100.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.0} {total_h:.0}" font-family="sans-serif" font-size="11">"#
    );
    let title = match schedule.p_max {
        Some(p) => format!(
            "{} W_max={} P_max={} T_min={}",
            schedule.soc, schedule.w_max, p, schedule.t_min
        ),
        None => format!(
            "{} W_max={} T_min={}",
            schedule.soc, schedule.w_max, schedule.t_min
        ),
    };
    let _ = writeln!(
        s,
        r#"<text x="{left:.0}" y="20" font-size="14">{title}</text>"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333"/>"##
    );

    let mut order: Vec<usize> = (0..schedule.entries.len()).collect();
    order.sort_by_key(|&k| schedule.entries[k].core_id);
    for k in order {
        let e = &schedule.entries[k];
        let idx = soc.index_of(e.core_id).unwrap_or(k);
        let color = PALETTE[idx % PALETTE.len()];
        let (x0, x1) = (x(e.start), x(e.finish));
        let runs = lanes.get(k).map(|l| lane_runs(l)).unwrap_or_default();
        for (n, (first, count)) in runs.iter().enumerate() {
            let y = top + plot_h - lane_h * f64::from(first + count);
            let h = lane_h * f64::from(*count);
            let _ = writeln!(
                s,
                r##"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="{color}" stroke="#222" stroke-width="0.5"><title>core {} [{}, {}) width {}</title></rect>"##,
                x1 - x0,
                e.core_id,
                e.start,
                e.finish,
                e.width
            );
            if n == 0 {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                    (x0 + x1) / 2.0,
                    y + h / 2.0,
                    e.core_id
                );
            }
        }
    }

    let axis_y = top + plot_h;
    for i in 0..=5u64 {
        let t = schedule.makespan * i / 5;
        let label = if normalize {
            format!("{:.2}", t as f64 / schedule.t_min.max(1) as f64)
        } else {
            t.to_string()
        };
        let tx = x(t);
        let _ = writeln!(
            s,
            r##"<line x1="{tx:.2}" y1="{axis_y:.2}" x2="{tx:.2}" y2="{:.2}" stroke="#333"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{label}</text>"##,
            axis_y + 5.0,
            axis_y + 18.0
        );
    }
    let unit = if normalize {
        "time / T_min"
    } else {
        "time (cycles)"
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{unit}</text>"#,
        left + plot_w / 2.0,
        axis_y + 38.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" transform="rotate(-90 20 {:.2})" text-anchor="middle">TAM wires</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );
    s.push_str("</svg>\n");
    s
}
