use crate::engine::StepReport;

/// Trailing-window accuracy, one point per report once the window is full.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracySeries {
    pub window: usize,
    /// `(step_index, accuracy)` pairs.
    pub points: Vec<(usize, f64)>,
}

impl AccuracySeries {
    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|&(_, a)| a)
    }

    /// Accuracy of the window ending at `step_index`, if that window is full.
    pub fn at(&self, step_index: usize) -> Option<f64> {
        let first = self.points.first()?.0;
        let i = step_index.checked_sub(first)?;
        self.points.get(i).map(|&(_, a)| a)
    }
}

/// Mean of `correct` over each trailing window. A window of zero, or one
/// longer than the run, gives an empty series.
pub fn windowed_accuracy(reports: &[StepReport], window: usize) -> AccuracySeries {
    let mut points = Vec::new();
    if window > 0 && window <= reports.len() {
        let mut hits: usize = reports[..window - 1].iter().filter(|r| r.correct).count();
        for i in window - 1..reports.len() {
            hits += usize::from(reports[i].correct);
            points.push((reports[i].step_index, hits as f64 / window as f64));
            hits -= usize::from(reports[i + 1 - window].correct);
        }
    }
    AccuracySeries { window, points }
}

/// Mean accuracy over the last `count` reports (all of them if fewer).
pub fn tail_accuracy(reports: &[StepReport], count: usize) -> f64 {
    let tail = &reports[reports.len().saturating_sub(count)..];
    if tail.is_empty() {
        return 0.0;
    }
    tail.iter().filter(|r| r.correct).count() as f64 / tail.len() as f64
}

/// Mean accuracy over the final quarter of the run.
pub fn final_quarter_accuracy(reports: &[StepReport]) -> f64 {
    tail_accuracy(reports, reports.len().div_ceil(4))
}
