// SPDX-License-Identifier: Apache-2.0

//! Wrapper scan-chain construction.
//!
//! Sequential cores get an upper bound on chain length derived from half the
//! offered width; internal scan chains are placed longest-first into the
//! chain whose new length is closest to that bound, and functional I/O cells
//! are then spread over the chains to even out the load and unload sides.
//! Combinational cores either get one TAM wire per I/O cell or, when the
//! width is too small, exactly `w_max` chains of I/O cells.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::TamError;
use crate::soc::CoreSpec;

/// One wrapper scan chain: input cells, then internal scan chains, then
/// output cells, all behind a single TAM wire.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WrapperChain {
    /// Indices into the core's `scan_chain_lengths`.
    pub scan_chain_ids: Vec<usize>,
    pub input_cells: u64,
    pub output_cells: u64,
    pub scan_length: u64,
}

impl WrapperChain {
    /// Shift cycles needed to load this chain.
    pub fn input_side(&self) -> u64 {
        self.scan_length + self.input_cells
    }

    /// Shift cycles needed to unload this chain.
    pub fn output_side(&self) -> u64 {
        self.scan_length + self.output_cells
    }

    /// Every element on the chain.
    pub fn len(&self) -> u64 {
        self.scan_length + self.input_cells + self.output_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Wrapper built for one core at one offered TAM width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrapperConfig {
    pub core_id: u32,
    pub w_max_given: u32,
    pub chains: Vec<WrapperChain>,
    pub s_i: u64,
    pub s_o: u64,
    pub tam_u: u32,
    pub test_time: u64,
    /// Chain-length bound used while placing scan chains; `None` for
    /// combinational cores.
    pub upper_bound: Option<u64>,
}

impl WrapperConfig {
    /// Length of the longest wrapper chain, counting every cell on it.
    pub fn longest_chain(&self) -> u64 {
        self.chains.iter().map(WrapperChain::len).max().unwrap_or(0)
    }
}

/// `p * (1 + max(s_i, s_o)) + min(s_i, s_o)`
pub fn core_test_time(patterns: u64, s_i: u64, s_o: u64) -> u64 {
    patterns * (1 + s_i.max(s_o)) + s_i.min(s_o)
}

/// Test time of `core` under `config`.
pub fn test_time(core: &CoreSpec, config: &WrapperConfig) -> u64 {
    debug_assert_eq!(core.id, config.core_id);
    core_test_time(u64::from(core.patterns), config.s_i, config.s_o)
}

/// Adds `count` cells one at a time to whichever chain has the smallest
/// `side` length, lowest index first on ties.
fn balance(
    chains: &mut [WrapperChain],
    count: u64,
    side: fn(&WrapperChain) -> u64,
    add: fn(&mut WrapperChain),
) {
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = chains
        .iter()
        .enumerate()
        .map(|(k, c)| Reverse((side(c), k)))
        .collect();
    for _ in 0..count {
        let Reverse((_, k)) = heap.pop().expect("at least one wrapper chain");
        add(&mut chains[k]);
        heap.push(Reverse((side(&chains[k]), k)));
    }
}

fn combinational_chains(core: &CoreSpec, w_max: u32) -> Vec<WrapperChain> {
    let ins = core.input_cells();
    let outs = core.output_cells();
    let total = ins + outs;
    if total == 0 {
        // Nothing to shift, but the core still occupies one wire.
        return vec![WrapperChain::default()];
    }
    if total <= u64::from(w_max) {
        let input = WrapperChain {
            input_cells: 1,
            ..Default::default()
        };
        let output = WrapperChain {
            output_cells: 1,
            ..Default::default()
        };
        return std::iter::repeat_n(input, ins as usize)
            .chain(std::iter::repeat_n(output, outs as usize))
            .collect();
    }
    // Round-robin inputs, then carry on round-robin with outputs.
    let w = u64::from(w_max);
    let mut chains = vec![WrapperChain::default(); w_max as usize];
    for k in 0..ins {
        chains[(k % w) as usize].input_cells += 1;
    }
    for k in ins..total {
        chains[(k % w) as usize].output_cells += 1;
    }
    chains
}

fn sequential_chains(core: &CoreSpec, w_max: u32) -> (Vec<WrapperChain>, u64) {
    let mid_lines = u64::from((w_max / 2).max(1));
    let upper_bound = core.total_scan_elements().div_ceil(mid_lines);

    let mut order: Vec<usize> = (0..core.scan_chain_lengths.len()).collect();
    order.sort_by_key(|&k| Reverse(core.scan_chain_lengths[k]));

    let mut chains: Vec<WrapperChain> = Vec::new();
    for k in order {
        let len = u64::from(core.scan_chain_lengths[k]);
        let mut best: Option<(usize, u64)> = None;
        for (idx, chain) in chains.iter().enumerate() {
            let after = chain.scan_length + len;
            if after <= upper_bound && best.is_none_or(|(_, b)| after > b) {
                best = Some((idx, after));
            }
        }
        match best {
            Some((idx, _)) => {
                chains[idx].scan_chain_ids.push(k);
                chains[idx].scan_length += len;
            }
            // Also covers a scan chain longer than the bound: it gets a
            // chain of its own that nothing else can join.
            None => chains.push(WrapperChain {
                scan_chain_ids: vec![k],
                scan_length: len,
                ..Default::default()
            }),
        }
    }

    balance(
        &mut chains,
        core.input_cells(),
        WrapperChain::input_side,
        |c| c.input_cells += 1,
    );
    balance(
        &mut chains,
        core.output_cells(),
        WrapperChain::output_side,
        |c| c.output_cells += 1,
    );
    (chains, upper_bound)
}

/// Builds the wrapper for `core` when `w_max` TAM wires are offered.
pub fn design_wrapper(core: &CoreSpec, w_max: u32) -> Result<WrapperConfig, TamError> {
    if w_max == 0 {
        return Err(TamError::ZeroWidth(w_max));
    }
    let (chains, upper_bound) = if core.is_combinational() {
        (combinational_chains(core, w_max), None)
    } else {
        let (chains, ub) = sequential_chains(core, w_max);
        (chains, Some(ub))
    };
    // Best-fit leaves at most one chain at or below half the bound, which
    // caps the count at 2 * (w_max / 2).
    assert!(
        chains.len() <= w_max as usize,
        "wrapper for core {} uses {} chains at width {}",
        core.id,
        chains.len(),
        w_max
    );
    let s_i = chains
        .iter()
        .map(WrapperChain::input_side)
        .max()
        .unwrap_or(0);
    let s_o = chains
        .iter()
        .map(WrapperChain::output_side)
        .max()
        .unwrap_or(0);
    Ok(WrapperConfig {
        core_id: core.id,
        w_max_given: w_max,
        tam_u: chains.len() as u32,
        test_time: core_test_time(u64::from(core.patterns), s_i, s_o),
        chains,
        s_i,
        s_o,
        upper_bound,
    })
}

/// A run of offered widths that all give the same wrapper outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamTableEntry {
    pub width_lo: u32,
    pub width_hi: u32,
    pub tam_u: u32,
    pub test_time: u64,
    pub longest_chain: u64,
}

/// Wrapper outcome for every width `1..=w_max_global`, with consecutive
/// widths of equal `(tam_u, test_time)` merged. Rows run from the widest
/// range down to width 1.
pub fn tam_table(core: &CoreSpec, w_max_global: u32) -> Result<Vec<TamTableEntry>, TamError> {
    if w_max_global == 0 {
        return Err(TamError::ZeroWidth(w_max_global));
    }
    let mut rows: Vec<TamTableEntry> = Vec::new();
    for w in 1..=w_max_global {
        let cfg = design_wrapper(core, w)?;
        match rows.last_mut() {
            Some(row) if row.tam_u == cfg.tam_u && row.test_time == cfg.test_time => {
                row.width_hi = w;
            }
            _ => rows.push(TamTableEntry {
                width_lo: w,
                width_hi: w,
                tam_u: cfg.tam_u,
                test_time: cfg.test_time,
                longest_chain: cfg.longest_chain(),
            }),
        }
    }
    rows.reverse();
    Ok(rows)
}

/// CSV with header `width_lo,width_hi,tam_u,test_time,longest_chain`.
pub fn tam_table_csv(rows: &[TamTableEntry]) -> String {
    let mut out = String::from("width_lo,width_hi,tam_u,test_time,longest_chain\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.width_lo, r.width_hi, r.tam_u, r.test_time, r.longest_chain
        ));
    }
    out
}
