// SPDX-License-Identifier: Apache-2.0

//! Test-access planning for core-based SOCs.
//!
//! The flow is: read a benchmark ([`soc`]), build a wrapper for every core
//! at every TAM width ([`wrapper`]), turn the resulting (width, time) pairs
//! into rectangles and rank cores by the diagonal of their widest rectangle
//! ([`rect`]), then pack one rectangle per core into a bin whose height is
//! the SOC TAM width, optionally under a power cap ([`schedule`]).
//!
//! ```
//! use soctam::{parse_soc, schedule, verify_schedule};
//!
//! let soc = parse_soc(
//!     "soc demo\n\
//!      core 1 inputs 2 outputs 2 bidirs 0 patterns 10 scanchains 3 lengths 4 3 3\n\
//!      core 2 inputs 8 outputs 4 bidirs 0 patterns 30 scanchains 0\n",
//! )
//! .unwrap();
//! let plan = schedule(&soc, 8, None).unwrap();
//! assert!(verify_schedule(&plan, &soc).is_empty());
//! ```

pub mod error;
pub mod oracle;
pub mod rect;
pub mod report;
pub mod schedule;
pub mod soc;
pub mod wrapper;

pub use error::{ParseError, TamError};
pub use oracle::brute_force_schedule;
pub use rect::{
    build_rectangles, compute_tmin, diagonal_length, normalize, order_initial, RectSet, Rectangle,
};
pub use schedule::{
    prepare, schedule, verify_schedule, Prepared, Schedule, ScheduleEntry, ScheduleViolation,
    SchedulerState,
};
pub use soc::{parse_soc, serialize_soc, validate_soc, CoreSpec, SocSpec, SocViolation};
pub use wrapper::{
    core_test_time, design_wrapper, tam_table, tam_table_csv, test_time, TamTableEntry,
    WrapperChain, WrapperConfig,
};
