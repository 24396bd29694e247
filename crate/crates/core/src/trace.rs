use std::time::{Duration, Instant};

use serde::Serialize;

/// One row of an [`IterationTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub residual: f64,
    #[serde(with = "duration_ms")]
    pub elapsed: Duration,
}

/// Per-iteration objective, stationarity residual and elapsed time.
///
/// Iteration indices start at 0 (the initial point) and increase by one per
/// record.
#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    records: Vec<IterationRecord>,
    #[serde(skip)]
    started: Instant,
}

impl Default for IterationTrace {
    fn default() -> Self {
        Self::new()
    }
}

impl IterationTrace {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Appends the next record, stamping it with the time since the trace was created.
    pub fn push(&mut self, objective: f64, residual: f64) {
        let iteration = self.records.len();
        self.records.push(IterationRecord {
            iteration,
            objective,
            residual: residual.max(0.0),
            elapsed: self.started.elapsed(),
        });
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// Number of completed iterations (records after the initial point).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_objective(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.objective)
    }

    pub fn final_residual(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.residual)
    }

    pub fn total_elapsed(&self) -> Duration {
        self.last().map_or(Duration::ZERO, |r| r.elapsed)
    }

    /// Mean wall time per completed iteration.
    pub fn time_per_iteration(&self) -> Duration {
        match self.iterations() {
            0 => Duration::ZERO,
            n => {
                let first = self.records[0].elapsed;
                (self.total_elapsed() - first) / n as u32
            }
        }
    }

    /// True if no objective decreases by more than `rel_tol * max(1, |f|)`.
    pub fn is_nondecreasing(&self, rel_tol: f64) -> bool {
        self.records.windows(2).all(|w| {
            let (a, b) = (w[0].objective, w[1].objective);
            b >= a - rel_tol * a.abs().max(1.0)
        })
    }
}

mod duration_ms {
    use serde::Serializer;
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }
}

/// Relative objective-change stopping rule: `|f_t - f_{t-1}| <= tol * (1 + |f_t|)`.
pub fn objective_settled(prev: f64, current: f64, tol: f64) -> bool {
    (current - prev).abs() <= tol * (1.0 + current.abs())
}
