// SPDX-License-Identifier: Apache-2.0

//! Event-driven rectangle packing under a TAM-width and a power budget.
//!
//! Cores are taken in descending diagonal order. A core gets its peak width
//! when that many wires are free, otherwise the widest option of at least
//! half its peak; failing both it waits in a FIFO that is only ever served
//! at the head and only at full peak width. When nothing can start, the
//! clock jumps to the next finish time and the finishing cores' wires are
//! returned.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TamError;
use crate::rect::{build_rectangles, compute_tmin, order_initial, RectSet};
use crate::soc::SocSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    #[serde(rename = "core")]
    pub core_id: u32,
    pub start: u64,
    pub finish: u64,
    pub width: u32,
    /// Milliwatts; 0 when the core has no power value.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub soc: String,
    pub w_max: u32,
    pub p_max: Option<f64>,
    pub t_min: u64,
    pub makespan: u64,
    /// Wire-cycles of the bin left unused up to the makespan.
    pub idle_area: u64,
    /// One entry per core, in core-id order.
    pub entries: Vec<ScheduleEntry>,
}

impl Schedule {
    /// Wire-cycles actually used by tests.
    pub fn busy_area(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| u64::from(e.width) * (e.finish - e.start))
            .sum()
    }
}

/// Rectangle sets, T_min and the initial order for one SOC at one width.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    /// Parallel to `soc.cores`.
    pub sets: Vec<RectSet>,
    pub t_min: u64,
    pub order: Vec<u32>,
}

pub fn prepare(soc: &SocSpec, w_max: u32) -> Result<Prepared, TamError> {
    if w_max == 0 {
        return Err(TamError::ZeroWidth(0));
    }
    let sets = soc
        .cores
        .iter()
        .map(|c| build_rectangles(c, w_max))
        .collect::<Result<Vec<_>, _>>()?;
    let t_min = compute_tmin(&sets)?;
    let order = order_initial(&sets, t_min);
    Ok(Prepared { sets, t_min, order })
}

/// Live bookkeeping of the packing loop. Per-core vectors are indexed by
/// position in `soc.cores`.
#[derive(Debug, Clone)]
pub struct SchedulerState {
    pub w_max: u32,
    pub current_time: u64,
    pub next_schedule_time: u64,
    pub wavail: u32,
    pub idle: bool,
    pub initial: VecDeque<usize>,
    pub pending: VecDeque<usize>,
    pub width: Vec<u32>,
    pub finish: Vec<u64>,
    pub start: Vec<u64>,
    pub scheduled: Vec<bool>,
    pub complete: Vec<bool>,
    pub peak_tam: Vec<u32>,
    pub power: Vec<f64>,
    pub sets: Vec<RectSet>,
}

impl SchedulerState {
    /// `order` lists positions into `sets`, highest priority first.
    pub fn new(
        sets: Vec<RectSet>,
        power: Vec<f64>,
        order: impl IntoIterator<Item = usize>,
        w_max: u32,
    ) -> Self {
        let n = sets.len();
        assert_eq!(power.len(), n);
        let peak_tam: Vec<u32> = sets.iter().map(|s| s.peak_tam).collect();
        assert!(
            peak_tam.iter().all(|&p| p <= w_max),
            "peak width above the bin height"
        );
        Self {
            w_max,
            current_time: 0,
            next_schedule_time: 0,
            wavail: w_max,
            idle: false,
            initial: order.into_iter().collect(),
            pending: VecDeque::new(),
            width: vec![0; n],
            finish: vec![0; n],
            start: vec![0; n],
            scheduled: vec![false; n],
            complete: vec![false; n],
            peak_tam,
            power,
            sets,
        }
    }

    /// Starts core `i` now on `w` wires.
    ///
    /// Panics if `w` exceeds the free wires or is not one of the core's
    /// rectangle heights.
    pub fn update(&mut self, i: usize, w: u32) {
        assert!(
            w <= self.wavail,
            "assigning {w} wires with only {} free",
            self.wavail
        );
        let t = self.sets[i]
            .time_at(w)
            .unwrap_or_else(|| panic!("width {w} is not a rectangle of core index {i}"));
        self.start[i] = self.current_time;
        self.scheduled[i] = true;
        self.finish[i] = self.current_time + t;
        self.width[i] = w;
        self.wavail -= w;
    }

    /// Power drawn right now by cores that have started and not finished.
    pub fn running_power(&self) -> f64 {
        (0..self.power.len())
            .filter(|&k| {
                self.scheduled[k] && !self.complete[k] && self.finish[k] > self.current_time
            })
            .map(|k| self.power[k])
            .sum()
    }

    /// Whether core `i` could start now without exceeding `p_max`.
    pub fn power_admissible(&self, i: usize, p_max: Option<f64>) -> bool {
        match p_max {
            None => true,
            Some(limit) => self.running_power() + self.power[i] <= limit,
        }
    }

    fn serve_pending_front(&mut self, p_max: Option<f64>) -> bool {
        let Some(&head) = self.pending.front() else {
            return false;
        };
        if self.peak_tam[head] <= self.wavail && self.power_admissible(head, p_max) {
            self.update(head, self.peak_tam[head]);
            self.pending.pop_front();
            true
        } else {
            false
        }
    }

    /// Widest option of core `i` that fits the free wires and is at least
    /// half its peak.
    fn possible_tam(&self, i: usize) -> Option<u32> {
        self.sets[i]
            .tallest_within(self.wavail)
            .map(|r| r.height)
            .filter(|&h| 2 * h >= self.peak_tam[i])
    }

    pub fn is_done(&self) -> bool {
        self.initial.is_empty() && self.pending.is_empty()
    }

    /// One pass of the main loop.
    pub fn step(&mut self, p_max: Option<f64>) -> Result<(), TamError> {
        if self.wavail > 0 && !self.idle {
            if let Some(c) = self.initial.pop_front() {
                if self.wavail >= self.peak_tam[c] && self.power_admissible(c, p_max) {
                    self.update(c, self.peak_tam[c]);
                } else if let Some(w) = self
                    .possible_tam(c)
                    .filter(|_| self.power_admissible(c, p_max))
                {
                    self.update(c, w);
                } else {
                    self.pending.push_back(c);
                }
                self.serve_pending_front(p_max);
            } else if !self.serve_pending_front(p_max) {
                self.idle = true;
            }
        } else {
            self.advance_clock()?;
        }
        Ok(())
    }

    /// Jumps to the earliest finish after now and frees every core that
    /// ends there.
    pub fn advance_clock(&mut self) -> Result<(), TamError> {
        let now = self.current_time;
        let next = (0..self.finish.len())
            .filter(|&k| self.scheduled[k] && self.finish[k] > now)
            .map(|k| self.finish[k])
            .min()
            .ok_or(TamError::Stalled(now))?;
        self.next_schedule_time = next;
        self.current_time = next;
        for k in 0..self.finish.len() {
            if self.scheduled[k] && !self.complete[k] && self.finish[k] == next {
                self.wavail += self.width[k];
                self.complete[k] = true;
            }
        }
        self.idle = false;
        Ok(())
    }
}

fn resolve_powers(soc: &SocSpec, p_max: Option<f64>) -> Result<Vec<f64>, TamError> {
    soc.cores
        .iter()
        .map(|c| match (c.power, p_max) {
            (None, Some(_)) => Err(TamError::MissingPower(c.id)),
            (Some(p), Some(limit)) if p > limit => Err(TamError::Unschedulable {
                core: c.id,
                power: p,
                limit,
            }),
            (p, _) => Ok(p.unwrap_or(0.0)),
        })
        .collect()
}

/// Packs every core of `soc` into a bin of `w_max` wires, never exceeding
/// `p_max` milliwatts when a limit is given.
pub fn schedule(soc: &SocSpec, w_max: u32, p_max: Option<f64>) -> Result<Schedule, TamError> {
    let violations = crate::soc::validate_soc(soc);
    if !violations.is_empty() {
        return Err(TamError::InvalidSoc(
            violations.iter().map(ToString::to_string).collect(),
        ));
    }
    let powers = resolve_powers(soc, p_max)?;
    let prepared = prepare(soc, w_max)?;
    let order: Vec<usize> = prepared
        .order
        .iter()
        .map(|&id| soc.index_of(id).expect("ordered id comes from the soc"))
        .collect();

    let mut state = SchedulerState::new(prepared.sets, powers, order, w_max);
    while !state.is_done() {
        state.step(p_max)?;
    }

    let entries: Vec<ScheduleEntry> = soc
        .cores
        .iter()
        .enumerate()
        .map(|(k, c)| ScheduleEntry {
            core_id: c.id,
            start: state.start[k],
            finish: state.finish[k],
            width: state.width[k],
            power: state.power[k],
        })
        .collect();
    let makespan = entries.iter().map(|e| e.finish).max().unwrap_or(0);
    let mut out = Schedule {
        soc: soc.name.clone(),
        w_max,
        p_max,
        t_min: prepared.t_min,
        makespan,
        idle_area: 0,
        entries,
    };
    out.idle_area = u64::from(w_max) * makespan - out.busy_area();
    Ok(out)
}

/// A constraint broken by a schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleViolation {
    MissingCore(u32),
    DuplicateCore(u32),
    UnknownCore(u32),
    EmptyInterval {
        core: u32,
        start: u64,
        finish: u64,
    },
    RectangleMismatch {
        core: u32,
        width: u32,
        duration: u64,
        expected: Option<u64>,
    },
    PowerFieldMismatch {
        core: u32,
        recorded: f64,
        expected: f64,
    },
    MissingPower(u32),
    WidthExceeded {
        time: u64,
        used: u32,
        limit: u32,
    },
    PowerExceeded {
        time: u64,
        used: f64,
        limit: f64,
    },
    MakespanMismatch {
        recorded: u64,
        actual: u64,
    },
    IdleAreaMismatch {
        recorded: u64,
        actual: i128,
    },
    BadWidth(u32),
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ScheduleViolation::*;
        match self {
            MissingCore(id) => write!(f, "core {id} is not scheduled"),
            DuplicateCore(id) => write!(f, "core {id} is scheduled more than once"),
            UnknownCore(id) => write!(f, "core {id} does not exist in the soc"),
            EmptyInterval {
                core,
                start,
                finish,
            } => {
                write!(f, "core {core}: finish {finish} is not after start {start}")
            }
            RectangleMismatch {
                core,
                width,
                duration,
                expected: Some(t),
            } => write!(
                f,
                "core {core}: width {width} runs {duration} cycles but its rectangle takes {t}"
            ),
            RectangleMismatch { core, width, .. } => {
                write!(f, "core {core}: width {width} is not one of its rectangles")
            }
            PowerFieldMismatch {
                core,
                recorded,
                expected,
            } => write!(
                f,
                "core {core}: recorded power {recorded} mW differs from {expected} mW"
            ),
            MissingPower(id) => write!(f, "core {id} has no power value but a limit is set"),
            WidthExceeded { time, used, limit } => {
                write!(f, "t={time}: {used} wires in use exceeds width {limit}")
            }
            PowerExceeded { time, used, limit } => {
                write!(
                    f,
                    "t={time}: {used} mW in use exceeds power limit {limit} mW"
                )
            }
            MakespanMismatch { recorded, actual } => {
                write!(f, "makespan {recorded} differs from last finish {actual}")
            }
            IdleAreaMismatch { recorded, actual } => {
                write!(f, "idle area {recorded} differs from computed {actual}")
            }
            BadWidth(w) => write!(f, "TAM width {w} is not positive"),
        }
    }
}

/// Checks a schedule against the SOC. Empty means sound.
pub fn verify_schedule(schedule: &Schedule, soc: &SocSpec) -> Vec<ScheduleViolation> {
    use ScheduleViolation::*;
    let mut out = Vec::new();
    if schedule.w_max == 0 {
        out.push(BadWidth(0));
        return out;
    }

    let mut seen = BTreeSet::new();
    for e in &schedule.entries {
        if !seen.insert(e.core_id) {
            out.push(DuplicateCore(e.core_id));
        }
    }
    for c in &soc.cores {
        if !seen.contains(&c.id) {
            out.push(MissingCore(c.id));
        }
    }

    for e in &schedule.entries {
        let Some(core) = soc.core(e.core_id) else {
            out.push(UnknownCore(e.core_id));
            continue;
        };
        if e.finish <= e.start {
            out.push(EmptyInterval {
                core: e.core_id,
                start: e.start,
                finish: e.finish,
            });
            continue;
        }
        let expected = build_rectangles(core, schedule.w_max)
            .ok()
            .and_then(|set| set.time_at(e.width));
        let duration = e.finish - e.start;
        if expected != Some(duration) {
            out.push(RectangleMismatch {
                core: e.core_id,
                width: e.width,
                duration,
                expected,
            });
        }
        let expected_power = core.power.unwrap_or(0.0);
        if e.power != expected_power {
            out.push(PowerFieldMismatch {
                core: e.core_id,
                recorded: e.power,
                expected: expected_power,
            });
        }
        if schedule.p_max.is_some() && core.power.is_none() {
            out.push(MissingPower(core.id));
        }
    }

    // Usage only rises at start instants, so checking those is enough.
    let instants: BTreeSet<u64> = schedule.entries.iter().map(|e| e.start).collect();
    for &t in &instants {
        let active = schedule
            .entries
            .iter()
            .filter(|e| e.start <= t && t < e.finish);
        let (used, power) = active.fold((0u64, 0.0f64), |(w, p), e| {
            let mw = soc.core(e.core_id).and_then(|c| c.power).unwrap_or(0.0);
            (w + u64::from(e.width), p + mw)
        });
        if used > u64::from(schedule.w_max) {
            out.push(WidthExceeded {
                time: t,
                used: used as u32,
                limit: schedule.w_max,
            });
        }
        if let Some(limit) = schedule.p_max {
            if power > limit {
                out.push(PowerExceeded {
                    time: t,
                    used: power,
                    limit,
                });
            }
        }
    }

    let actual = schedule.entries.iter().map(|e| e.finish).max().unwrap_or(0);
    if schedule.makespan != actual {
        out.push(MakespanMismatch {
            recorded: schedule.makespan,
            actual,
        });
    }
    let busy: i128 = schedule
        .entries
        .iter()
        .map(|e| i128::from(e.width) * (i128::from(e.finish) - i128::from(e.start)))
        .sum();
    let idle = i128::from(schedule.w_max) * i128::from(schedule.makespan) - busy;
    if idle != i128::from(schedule.idle_area) {
        out.push(IdleAreaMismatch {
            recorded: schedule.idle_area,
            actual: idle,
        });
    }
    out
}
