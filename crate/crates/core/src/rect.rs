// SPDX-License-Identifier: Apache-2.0

//! Per-core rectangle sets and the diagonal-length ordering that seeds the
//! scheduler.

use serde::{Deserialize, Serialize};

use crate::error::TamError;
use crate::soc::CoreSpec;
use crate::wrapper::tam_table;

/// One (TAM width, test time) option for a core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub core_id: u32,
    /// TAM wires used.
    pub height: u32,
    pub width_cycles: u64,
    /// `width_cycles / T_min`, filled in by [`normalize`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub width_norm: Option<f64>,
}

impl Rectangle {
    pub fn area(&self) -> u64 {
        u64::from(self.height) * self.width_cycles
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectSet {
    pub core_id: u32,
    /// Sorted by descending height, so `rects[0]` is the peak rectangle.
    pub rects: Vec<Rectangle>,
    pub peak_tam: u32,
    pub peak_time_cycles: u64,
    /// Diagonal of the normalized peak rectangle, filled in by [`normalize`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagonal: Option<f64>,
}

impl RectSet {
    /// Test time at exactly `height` wires, if the set has such a rectangle.
    pub fn time_at(&self, height: u32) -> Option<u64> {
        self.rects
            .iter()
            .find(|r| r.height == height)
            .map(|r| r.width_cycles)
    }

    /// Tallest rectangle that fits in `avail` wires.
    pub fn tallest_within(&self, avail: u32) -> Option<&Rectangle> {
        self.rects.iter().find(|r| r.height <= avail)
    }

    pub fn heights(&self) -> impl Iterator<Item = u32> + '_ {
        self.rects.iter().map(|r| r.height)
    }

    /// Smallest wire-cycle area over the set.
    pub fn min_area(&self) -> u64 {
        self.rects.iter().map(Rectangle::area).min().unwrap_or(0)
    }
}

/// One rectangle per distinct utilized width no larger than `w_max`,
/// keeping only rectangles that are strictly faster than every shorter one.
pub fn build_rectangles(core: &CoreSpec, w_max: u32) -> Result<RectSet, TamError> {
    let rows = tam_table(core, w_max)?;

    // Fastest time for each utilized width.
    let mut best: Vec<(u32, u64)> = Vec::new();
    for row in &rows {
        match best.iter_mut().find(|(h, _)| *h == row.tam_u) {
            Some(slot) => slot.1 = slot.1.min(row.test_time),
            None => best.push((row.tam_u, row.test_time)),
        }
    }
    best.sort_unstable();

    let mut kept: Vec<Rectangle> = Vec::new();
    for (height, time) in best {
        if kept.last().is_none_or(|r| time < r.width_cycles) {
            kept.push(Rectangle {
                core_id: core.id,
                height,
                width_cycles: time,
                width_norm: None,
            });
        }
    }
    kept.reverse();

    let peak = &kept[0];
    Ok(RectSet {
        core_id: core.id,
        peak_tam: peak.height,
        peak_time_cycles: peak.width_cycles,
        rects: kept,
        diagonal: None,
    })
}

/// Smallest peak-width test time over all cores.
pub fn compute_tmin(sets: &[RectSet]) -> Result<u64, TamError> {
    sets.iter()
        .map(|s| s.peak_time_cycles)
        .min()
        .ok_or(TamError::EmptyInput)
}

/// Euclidean diagonal of a `height` x `width_norm` rectangle.
pub fn diagonal_length(height: f64, width_norm: f64) -> f64 {
    height.hypot(width_norm)
}

/// Fills `width_norm` of every rectangle and each set's peak diagonal.
pub fn normalize(sets: &mut [RectSet], t_min: u64) {
    let t_min = t_min as f64;
    for set in sets {
        for r in &mut set.rects {
            r.width_norm = Some(r.width_cycles as f64 / t_min);
        }
        set.diagonal = Some(diagonal_length(
            f64::from(set.peak_tam),
            set.peak_time_cycles as f64 / t_min,
        ));
    }
}

/// Core ids by descending peak diagonal; ties go to the taller peak, then
/// the lower id.
pub fn order_initial(sets: &[RectSet], t_min: u64) -> Vec<u32> {
    let t_min = t_min as f64;
    let mut keyed: Vec<(f64, u32, u32)> = sets
        .iter()
        .map(|s| {
            let dl = diagonal_length(f64::from(s.peak_tam), s.peak_time_cycles as f64 / t_min);
            (dl, s.peak_tam, s.core_id)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    keyed.into_iter().map(|(_, _, id)| id).collect()
}

/// JSON-friendly view: per core, its rectangles as `{height, width_cycles}`.
pub fn rect_sets_json(sets: &[RectSet], t_min: u64, order: &[u32]) -> serde_json::Value {
    let cores: Vec<serde_json::Value> = sets
        .iter()
        .map(|s| {
            let rects: Vec<serde_json::Value> = s
                .rects
                .iter()
                .map(|r| serde_json::json!({ "height": r.height, "width_cycles": r.width_cycles }))
                .collect();
            let dl = diagonal_length(
                f64::from(s.peak_tam),
                s.peak_time_cycles as f64 / t_min as f64,
            );
            serde_json::json!({
                "core": s.core_id,
                "peak_tam": s.peak_tam,
                "peak_time_cycles": s.peak_time_cycles,
                "diagonal": dl,
                "rects": rects,
            })
        })
        .collect();
    serde_json::json!({ "t_min": t_min, "order": order, "cores": cores })
}
