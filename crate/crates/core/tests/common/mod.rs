// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the integration suites. Not every suite uses every item.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use soctam::{CoreSpec, SocSpec, WrapperConfig};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn fixtures() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(data_dir())
        .expect("data directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "soc"))
        .collect();
    out.sort();
    out
}

pub fn load(name: &str) -> SocSpec {
    let text = std::fs::read_to_string(data_dir().join(name)).expect("fixture");
    soctam::parse_soc(&text).expect("fixture parses")
}

/// Small random core. Roughly one in four is combinational.
pub fn random_core(
    rng: &mut ChaCha8Rng,
    id: u32,
    max_cells: u32,
    max_chains: usize,
    max_len: u32,
) -> CoreSpec {
    let inputs = rng.gen_range(0..=max_cells);
    let outputs = rng.gen_range(0..=max_cells);
    let bidirs = if rng.gen_bool(0.3) {
        rng.gen_range(0..=max_cells / 3)
    } else {
        0
    };
    let patterns = rng.gen_range(1..=40);
    let chains = if rng.gen_bool(0.25) {
        0
    } else {
        rng.gen_range(1..=max_chains)
    };
    let lengths: Vec<u32> = (0..chains).map(|_| rng.gen_range(1..=max_len)).collect();
    CoreSpec::new(id, inputs, outputs, bidirs, patterns).with_scan_chains(lengths)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bit {
    /// Stimulus of pattern `k` meant for cell `pos`.
    Stim { k: u32, pos: usize },
    /// Response of pattern `k` captured in cell `pos`.
    Resp { k: u32, pos: usize },
}

/// One wrapper chain as a shift register: input cells, then the internal
/// scan cells, then output cells. Bits enter at cell 0 and leave after the
/// last cell.
struct Register {
    cells: Vec<Option<Bit>>,
    /// Cells that need stimulus: the input cells and the scan cells.
    load: usize,
    /// First cell that captures a response.
    capture_from: usize,
}

impl Register {
    fn shift(&mut self, bit_in: Option<Bit>) -> Option<Bit> {
        if self.cells.is_empty() {
            return bit_in;
        }
        let out = self.cells.pop().unwrap();
        self.cells.insert(0, bit_in);
        out
    }

    fn loaded_with(&self, k: u32) -> bool {
        (0..self.load).all(|pos| self.cells[pos] == Some(Bit::Stim { k, pos }))
    }

    fn capture(&mut self, k: u32) {
        for pos in self.capture_from..self.cells.len() {
            self.cells[pos] = Some(Bit::Resp { k, pos });
        }
    }
}

/// Shifts every register together for `n` cycles, feeding pattern `k`'s
/// stimulus (if any) so that it settles exactly at the end of the window.
/// Returns how many response bits of pattern `k - 1` came out.
fn window(regs: &mut [Register], n: usize, k: Option<u32>) -> Option<Vec<usize>> {
    let mut unloaded = vec![0usize; regs.len()];
    for cycle in 0..n {
        for (r, reg) in regs.iter_mut().enumerate() {
            // The deepest stimulus bit goes in first.
            let bit = k.and_then(|k| {
                let lead = n.checked_sub(reg.load)?;
                (cycle >= lead).then(|| Bit::Stim {
                    k,
                    pos: reg.load - 1 - (cycle - lead),
                })
            });
            match reg.shift(bit) {
                Some(Bit::Resp { .. }) => unloaded[r] += 1,
                Some(Bit::Stim { .. }) | None => {}
            }
        }
    }
    if let Some(k) = k {
        if !regs.iter().all(|r| r.loaded_with(k)) {
            return None;
        }
    }
    Some(unloaded)
}

/// Clock cycles needed to apply `patterns` patterns through `config`,
/// found by shifting bits one cycle at a time. Every scan-in window is the
/// shortest one after which all stimulus sits in place and all earlier
/// responses have left the chains; each capture costs one cycle.
pub fn simulate_test_cycles(config: &WrapperConfig, patterns: u32) -> u64 {
    let mut regs: Vec<Register> = config
        .chains
        .iter()
        .map(|c| {
            let len = c.len() as usize;
            Register {
                cells: vec![None; len],
                load: (c.input_cells + c.scan_length) as usize,
                capture_from: c.input_cells as usize,
            }
        })
        .collect();
    let responses: Vec<usize> = regs
        .iter()
        .map(|r| r.cells.len() - r.capture_from)
        .collect();
    let longest = regs.iter().map(|r| r.cells.len()).max().unwrap_or(0);

    let mut cycles = 0u64;
    for k in 0..=patterns {
        let stim = (k < patterns).then_some(k);
        let need_unload = k > 0;
        let attempt = |n: usize| -> Option<Vec<Register>> {
            let mut trial: Vec<Register> = regs
                .iter()
                .map(|r| Register {
                    cells: r.cells.clone(),
                    load: r.load,
                    capture_from: r.capture_from,
                })
                .collect();
            let out = window(&mut trial, n, stim)?;
            let drained = !need_unload || out.iter().zip(&responses).all(|(got, want)| got == want);
            drained.then_some(trial)
        };
        // Any window that works stays working when lengthened, so search
        // for the shortest one.
        let (mut lo, mut hi) = (0usize, longest);
        assert!(attempt(hi).is_some(), "no shift window works");
        while lo < hi {
            let mid = (lo + hi) / 2;
            if attempt(mid).is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let n = lo;
        regs = attempt(n).unwrap();
        cycles += n as u64;
        if let Some(k) = stim {
            for reg in &mut regs {
                reg.capture(k);
            }
            cycles += 1;
        }
    }
    cycles
}
