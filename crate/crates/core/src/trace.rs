use std::time::Instant;

use crate::metrics::delta_k;
use crate::point::Point;

/// One line of a convergence trace. `f` is the best value found so far.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub elapsed: f64,
    pub f: f64,
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIter,
    TargetReached,
    /// The error factor fell to the tolerance; zero certifies optimality.
    EtaTolerance,
    TimeBudget,
    /// A zero subgradient was found.
    Stationary,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Point,
    pub f: f64,
    pub iterations: usize,
    pub stop: StopReason,
    pub trace: Vec<TraceRecord>,
    /// Final error factor (OSGA only).
    pub eta: Option<f64>,
}

/// Timestamps records, fills `delta` when the optimum is known, and feeds
/// both the caller's sink and the stored trace.
pub(crate) struct Recorder<'s> {
    start: Instant,
    f0: Option<f64>,
    f_hat: Option<f64>,
    sink: &'s mut dyn FnMut(&TraceRecord),
    trace: Vec<TraceRecord>,
}

impl<'s> Recorder<'s> {
    pub fn new(f_hat: Option<f64>, sink: &'s mut dyn FnMut(&TraceRecord)) -> Self {
        Recorder {
            start: Instant::now(),
            f0: None,
            f_hat,
            sink,
            trace: Vec::new(),
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn record(&mut self, iter: usize, f: f64, eta: Option<f64>, alpha: Option<f64>) {
        let f0 = *self.f0.get_or_insert(f);
        let delta = self.f_hat.and_then(|f_hat| delta_k(f, f_hat, f0).ok());
        let rec = TraceRecord {
            iter,
            elapsed: self.elapsed(),
            f,
            delta,
            eta,
            alpha,
        };
        (self.sink)(&rec);
        self.trace.push(rec);
    }

    pub fn finish(self, x: Point, f: f64, iterations: usize, stop: StopReason, eta: Option<f64>) -> SolveResult {
        SolveResult {
            x,
            f,
            iterations,
            stop,
            trace: self.trace,
            eta,
        }
    }
}
