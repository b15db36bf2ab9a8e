use crate::error::Diverged;

/// Dense record of a string simulation: `step_count` rows of `node_count`
/// transverse displacements, step-major, row `k` holding time `k·dt`.
///
/// Both solvers produce this shape, and the radiation stage consumes it,
/// so solver outputs stay interchangeable.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveHistory {
    node_count: usize,
    step_count: usize,
    dt_s: f64,
    dx_m: f64,
    data: Vec<f64>,
}

impl WaveHistory {
    pub fn zeroed(node_count: usize, step_count: usize, dt_s: f64, dx_m: f64) -> Self {
        Self {
            node_count,
            step_count,
            dt_s,
            dx_m,
            data: vec![0.0; node_count * step_count],
        }
    }

    /// Wraps an existing step-major buffer; `data.len()` must equal
    /// `node_count * step_count`.
    pub fn from_data(
        node_count: usize,
        step_count: usize,
        dt_s: f64,
        dx_m: f64,
        data: Vec<f64>,
    ) -> Self {
        assert_eq!(
            data.len(),
            node_count * step_count,
            "history buffer must hold step_count * node_count samples"
        );
        Self {
            node_count,
            step_count,
            dt_s,
            dx_m,
            data,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    pub fn dx_m(&self) -> f64 {
        self.dx_m
    }

    pub fn row(&self, step: usize) -> &[f64] {
        &self.data[step * self.node_count..(step + 1) * self.node_count]
    }

    pub fn row_mut(&mut self, step: usize) -> &mut [f64] {
        &mut self.data[step * self.node_count..(step + 1) * self.node_count]
    }

    pub fn value(&self, step: usize, node: usize) -> f64 {
        assert!(node < self.node_count);
        self.data[step * self.node_count + node]
    }

    /// Displacement of one node across all steps.
    pub fn node_series(&self, node: usize) -> Vec<f64> {
        assert!(node < self.node_count);
        (0..self.step_count).map(|k| self.value(k, node)).collect()
    }

    pub fn node_position(&self, node: usize) -> f64 {
        node as f64 * self.dx_m
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.node_count)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    /// Streaming view over the stored rows, for consumers written against
    /// [`DisplacementSource`].
    pub fn source(&self) -> HistoryRows<'_> {
        HistoryRows {
            history: self,
            next: 0,
        }
    }
}

/// Row-at-a-time producer of string displacements.
///
/// Solvers implement this so a run can feed the radiation stage without
/// materializing the full history (second-scale runs at audio rates are
/// hundreds of megabytes dense). A source yields exactly `step_count`
/// rows and reports divergence through the error channel the moment the
/// state stops being meaningful.
pub trait DisplacementSource {
    fn node_count(&self) -> usize;
    fn step_count(&self) -> usize;
    fn dt_s(&self) -> f64;
    fn dx_m(&self) -> f64;

    /// Next displacement row, or `None` once `step_count` rows were yielded.
    fn next_row(&mut self) -> Result<Option<&[f64]>, Diverged>;
}

/// [`DisplacementSource`] adapter over a dense [`WaveHistory`].
pub struct HistoryRows<'a> {
    history: &'a WaveHistory,
    next: usize,
}

impl DisplacementSource for HistoryRows<'_> {
    fn node_count(&self) -> usize {
        self.history.node_count()
    }

    fn step_count(&self) -> usize {
        self.history.step_count()
    }

    fn dt_s(&self) -> f64 {
        self.history.dt_s()
    }

    fn dx_m(&self) -> f64 {
        self.history.dx_m()
    }

    fn next_row(&mut self) -> Result<Option<&[f64]>, Diverged> {
        if self.next >= self.history.step_count() {
            return Ok(None);
        }
        let row = self.history.row(self.next);
        self.next += 1;
        Ok(Some(row))
    }
}
