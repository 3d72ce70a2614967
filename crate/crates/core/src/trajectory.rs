use crate::error::{Error, Result};

/// Snapshots stored every `stride` steps of a fixed-step integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    dt: f64,
    stride: usize,
    steps: Vec<usize>,
    snapshots: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn new(dt: f64, stride: usize) -> Self {
        Trajectory { dt, stride, steps: Vec::new(), snapshots: Vec::new() }
    }

    pub(crate) fn push(&mut self, step: usize, snapshot: S) {
        debug_assert!(self.steps.last().is_none_or(|&s| s < step));
        self.steps.push(step);
        self.snapshots.push(snapshot);
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn times(&self) -> Vec<f64> {
        self.steps.iter().map(|&s| s as f64 * self.dt).collect()
    }

    pub fn snapshots(&self) -> &[S] {
        &self.snapshots
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> + '_ {
        self.steps.iter().map(|&s| s as f64 * self.dt).zip(&self.snapshots)
    }

    pub fn last(&self) -> Option<(f64, &S)> {
        Some((*self.steps.last()? as f64 * self.dt, self.snapshots.last()?))
    }

    pub fn at_step(&self, step: usize) -> Option<&S> {
        self.steps.binary_search(&step).ok().map(|k| &self.snapshots[k])
    }

    /// Snapshot stored at time `t`, matched to within `1e-9 dt`.
    pub fn at(&self, t: f64) -> Result<&S> {
        let m = t / self.dt;
        let step = m.round();
        if step < 0.0 || (m - step).abs() > 1e-9 {
            return Err(Error::MissingSnapshot(t));
        }
        self.at_step(step as usize).ok_or(Error::MissingSnapshot(t))
    }

    pub fn map<T>(&self, f: impl FnMut(&S) -> T) -> Trajectory<T> {
        Trajectory {
            dt: self.dt,
            stride: self.stride,
            steps: self.steps.clone(),
            snapshots: self.snapshots.iter().map(f).collect(),
        }
    }
}
