//! Experiment runner: accuracy tables, singular-value plot data, the
//! expected-error bound check, and the file formats they read and write.

mod bound;
pub mod lrmat;
mod record;
mod study;

use std::time::Instant;

pub use bound::{bound_value, check_bound, BoundCheck, BOUND_SLACK};
pub use record::{
    median, projection_rel_err, rel_err, summarize, write_csv, BenchRecord, CellSummary, CSV_COLUMNS, CSV_VERSION_LINE,
};
pub use study::{
    reference_svd, run_sval_study, run_sval_study_on, run_table_study, SvalOptions, SvalPoint, SvalStudy, TableStudy,
    THREADS_ENV,
};

/// Median wall time in seconds of `reps` calls of `f`.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> T) -> f64 {
    let times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64()
        })
        .collect();
    median(&times).unwrap_or(0.0)
}
