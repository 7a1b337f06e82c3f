// SPDX-License-Identifier: Apache-2.0

//! Exhaustive optimum for tiny instances, used to bound the heuristic.
//!
//! Any feasible non-preemptive packing can be slid left until every test
//! starts at time 0 or at the finish of a test that started no later. The
//! search therefore places tests in start order, trying each rectangle of
//! each remaining core at each such instant.

use crate::error::TamError;
use crate::rect::build_rectangles;
use crate::soc::SocSpec;

pub const MAX_CORES: usize = 4;
pub const MAX_RECTS: usize = 6;

#[derive(Debug, Clone, Copy)]
struct Placed {
    start: u64,
    finish: u64,
    width: u32,
    power: f64,
}

struct Search<'a> {
    options: &'a [Vec<(u32, u64)>],
    power: &'a [f64],
    w_max: u32,
    p_max: Option<f64>,
    best: u64,
}

impl Search<'_> {
    fn fits(&self, placed: &[Placed], t: u64, width: u32, power: f64) -> bool {
        let (w, p) = placed
            .iter()
            .filter(|q| q.start <= t && t < q.finish)
            .fold((width, power), |(w, p), q| (w + q.width, p + q.power));
        w <= self.w_max && self.p_max.is_none_or(|limit| p <= limit)
    }

    fn run(&mut self, placed: &mut Vec<Placed>, left: &mut Vec<usize>, last_start: u64) {
        if left.is_empty() {
            let makespan = placed.iter().map(|q| q.finish).max().unwrap_or(0);
            self.best = self.best.min(makespan);
            return;
        }
        let mut instants: Vec<u64> = std::iter::once(0)
            .chain(placed.iter().map(|q| q.finish))
            .filter(|&t| t >= last_start)
            .collect();
        instants.sort_unstable();
        instants.dedup();

        for slot in 0..left.len() {
            let core = left.swap_remove(slot);
            for &(width, time) in &self.options[core] {
                for &t in &instants {
                    if t + time >= self.best {
                        break;
                    }
                    if !self.fits(placed, t, width, self.power[core]) {
                        continue;
                    }
                    placed.push(Placed {
                        start: t,
                        finish: t + time,
                        width,
                        power: self.power[core],
                    });
                    self.run(placed, left, t);
                    placed.pop();
                }
            }
            left.push(core);
            let end = left.len() - 1;
            left.swap(slot, end);
        }
    }
}

/// Minimum makespan over every rectangle choice and every left-justified
/// packing. Limited to [`MAX_CORES`] cores with at most [`MAX_RECTS`]
/// rectangles each.
pub fn brute_force_schedule(
    soc: &SocSpec,
    w_max: u32,
    p_max: Option<f64>,
) -> Result<u64, TamError> {
    if w_max == 0 {
        return Err(TamError::ZeroWidth(0));
    }
    if soc.cores.len() > MAX_CORES {
        return Err(TamError::TooLarge(format!(
            "{} cores (limit {MAX_CORES})",
            soc.cores.len()
        )));
    }
    let mut options = Vec::with_capacity(soc.cores.len());
    let mut power = Vec::with_capacity(soc.cores.len());
    for core in &soc.cores {
        let set = build_rectangles(core, w_max)?;
        if set.rects.len() > MAX_RECTS {
            return Err(TamError::TooLarge(format!(
                "core {} has {} rectangles (limit {MAX_RECTS})",
                core.id,
                set.rects.len()
            )));
        }
        let p = match (core.power, p_max) {
            (None, Some(_)) => return Err(TamError::MissingPower(core.id)),
            (Some(p), Some(limit)) if p > limit => {
                return Err(TamError::Unschedulable {
                    core: core.id,
                    power: p,
                    limit,
                })
            }
            (p, _) => p.unwrap_or(0.0),
        };
        options.push(
            set.rects
                .iter()
                .map(|r| (r.height, r.width_cycles))
                .collect::<Vec<_>>(),
        );
        power.push(p);
    }

    // Running everything back to back at peak width is always feasible.
    let serial: u64 = options.iter().map(|o| o[0].1).sum();
    let mut search = Search {
        options: &options,
        power: &power,
        w_max,
        p_max,
        best: serial + 1,
    };
    let mut left: Vec<usize> = (0..options.len()).collect();
    search.run(&mut Vec::new(), &mut left, 0);
    Ok(search.best)
}
