//! Smooth mean curvature flow of polylines, graphs and surfaces of
//! revolution by explicit Euler steps, and probes evaluated on the
//! resulting space-time tracks.

mod curve;
mod graph;
mod probes;
mod profile;

pub use curve::flow_polyline_csf;
pub use graph::flow_graph_mcf;
pub use probes::{
    clearing_out_floor, clearing_out_probe, curvature_at_samples, curvature_bound_probe, max_curvature_in_ball,
    monotonicity_probe, ClearingOut, CurvatureBound, MonotonicityReport,
};
pub use profile::flow_profile_mcf;

use crate::error::{Error, Result};
use crate::geom::{Dims, SampledSurface, Surface};
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Fraction of the explicit stability limit used as the time step.
    pub dt_safety: f64,
    /// Target edge length; edges are split above `2 h_min` and collapsed
    /// below `h_min / 2`. Defaults to the initial mean edge length (grid
    /// spacing for graphs).
    pub h_min: Option<f64>,
    pub end_time: f64,
    /// Recording cadence; states are stored at `k * record_every`.
    pub record_every: f64,
    /// Fixed time step; rejected when above the explicit bound.
    pub dt: Option<f64>,
}

impl FlowConfig {
    pub fn new(end_time: f64, record_every: f64) -> Self {
        FlowConfig { dt_safety: 0.25, h_min: None, end_time, record_every, dt: None }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.dt_safety > 0.0 && self.dt_safety < 1.0) {
            return Err(Error::InvalidArgument("dt_safety must lie in (0, 1)".into()));
        }
        if !(self.end_time > 0.0) || !(self.record_every > 0.0) {
            return Err(Error::InvalidArgument("end time and record cadence must be positive".into()));
        }
        if let Some(h) = self.h_min {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument("h_min must be positive".into()));
            }
        }
        Ok(())
    }

    /// Time step for an explicit bound `bound` (already including the
    /// safety factor).
    pub(crate) fn step(&self, bound: f64) -> Result<f64> {
        match self.dt {
            Some(dt) if dt > bound || !(dt > 0.0) => Err(Error::StepSize { dt, bound }),
            Some(dt) => Ok(dt),
            None => Ok(bound),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EndTime,
    Extinction,
    Singularity,
}

/// Events detected while stepping.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEvents {
    pub stop: StopReason,
    /// First recorded time at which a self-intersection was found.
    pub self_intersection: Option<f64>,
    pub singularity: Option<f64>,
    pub extinction: Option<f64>,
    pub steps: usize,
}

/// Recorded states of a flow; the class of the surface never changes.
#[derive(Debug, Clone)]
pub struct FlowTrack {
    dims: Dims,
    times: Vec<f64>,
    states: Vec<Surface>,
    sampled: Vec<OnceLock<SampledSurface>>,
    boundary: Option<Vec<f64>>,
    h_min: f64,
    events: FlowEvents,
}

impl FlowTrack {
    pub(crate) fn new(first: Surface, h_min: f64, boundary: Option<Vec<f64>>) -> Self {
        let dims = first.dims();
        FlowTrack {
            dims,
            times: Vec::new(),
            states: Vec::new(),
            sampled: Vec::new(),
            boundary,
            h_min,
            events: FlowEvents {
                stop: StopReason::EndTime,
                self_intersection: None,
                singularity: None,
                extinction: None,
                steps: 0,
            },
        }
    }

    pub(crate) fn record(&mut self, t: f64, state: Surface) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.sampled.push(OnceLock::new());
        self.times.push(t);
        self.states.push(state);
    }

    pub(crate) fn events_mut(&mut self) -> &mut FlowEvents {
        &mut self.events
    }

    /// A track that never moves: the same surface at every given time.
    pub fn stationary(surface: Surface, times: &[f64]) -> Result<Self> {
        if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("track times must be strictly increasing".into()));
        }
        let mut track = FlowTrack::new(surface.clone(), surface.to_sampled().spacing(), None);
        for &t in times {
            track.record(t, surface.clone());
        }
        Ok(track)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> &Surface {
        &self.states[i]
    }

    pub fn states(&self) -> &[Surface] {
        &self.states
    }

    /// Point samples of the `i`-th recorded state, built on first use.
    pub fn sampled(&self, i: usize) -> &SampledSurface {
        self.sampled[i].get_or_init(|| self.states[i].to_sampled())
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty track")
    }

    /// Coordinates of the fixed boundary samples, when the flow has them.
    pub fn boundary(&self) -> Option<&[f64]> {
        self.boundary.as_deref()
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn events(&self) -> &FlowEvents {
        &self.events
    }

    /// Index of the recorded time closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    /// Bracketing indices `(i, j)` and weight `theta` with
    /// `t = (1 - theta) t_i + theta t_j`; recorded times within `1e-9` snap.
    pub fn bracket(&self, t: f64) -> Result<(usize, usize, f64)> {
        let start = self.start_time();
        let end = self.end_time();
        let tol = 1e-9 * (1.0 + t.abs());
        if t < start - tol {
            return Err(Error::BeforeInitialTime { requested: t, start });
        }
        if t > end + tol {
            return Err(Error::AfterFinalTime(t));
        }
        let j = self.times.partition_point(|&s| s < t - tol);
        let j = j.min(self.len() - 1);
        if (self.times[j] - t).abs() <= tol {
            return Ok((j, j, 0.0));
        }
        if j > 0 && (self.times[j - 1] - t).abs() <= tol {
            return Ok((j - 1, j - 1, 0.0));
        }
        let i = j - 1;
        let theta = (t - self.times[i]) / (self.times[j] - self.times[i]);
        Ok((i, j, theta))
    }
}

/// Drives an explicit scheme: `step(dt)` advances the state by `dt` and
/// returns `Some(reason)` to stop; states are recorded at multiples of the
/// cadence, at the end time and at any stop.
pub(crate) fn drive<S>(
    state: &mut S,
    cfg: &FlowConfig,
    dt_max: f64,
    track: &mut FlowTrack,
    mut snapshot: impl FnMut(&S) -> Surface,
    mut step: impl FnMut(&mut S, f64) -> Result<Option<StopReason>>,
    mut on_record: impl FnMut(&S, f64, &mut FlowEvents),
) -> Result<()> {
    let mut t = 0.0;
    track.record(0.0, snapshot(state));
    on_record(state, 0.0, track.events_mut());
    let mut k = 1u64;
    let mut steps = 0usize;
    while t < cfg.end_time {
        let target = (k as f64 * cfg.record_every).min(cfg.end_time);
        let (dt, reached) = if target - t <= dt_max * (1.0 + 1e-12) { (target - t, true) } else { (dt_max, false) };
        let stop = step(state, dt)?;
        steps += 1;
        t = if reached { target } else { t + dt };
        if let Some(reason) = stop {
            let events = track.events_mut();
            events.stop = reason;
            match reason {
                StopReason::Extinction => events.extinction = Some(t),
                StopReason::Singularity => events.singularity = Some(t),
                StopReason::EndTime => {}
            }
            track.record(t, snapshot(state));
            on_record(state, t, track.events_mut());
            break;
        }
        if reached {
            track.record(t, snapshot(state));
            on_record(state, t, track.events_mut());
            k += 1;
        }
    }
    track.events_mut().steps = steps;
    Ok(())
}

/// Flows any flowable surface class.
pub fn flow(surface: &Surface, cfg: &FlowConfig) -> Result<FlowTrack> {
    match surface {
        Surface::Polyline(p) => flow_polyline_csf(p, cfg),
        Surface::Graph(g) => flow_graph_mcf(g, cfg),
        Surface::Profile(p) => flow_profile_mcf(p, cfg),
        Surface::Sampled(_) => Err(Error::InvalidArgument("sampled point sets cannot flow".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polyline;

    #[test]
    fn bracket_snaps_and_interpolates() {
        let s = Surface::Polyline(Polyline::circle(&[0.0, 0.0], 1.0, 16));
        let track = FlowTrack::stationary(s, &[0.0, 0.1, 0.2]).unwrap();
        assert_eq!(track.bracket(0.1 + 1e-12).unwrap(), (1, 1, 0.0));
        let (i, j, th) = track.bracket(0.15).unwrap();
        assert_eq!((i, j), (1, 2));
        assert!((th - 0.5).abs() < 1e-12);
        assert!(matches!(track.bracket(-0.1), Err(Error::BeforeInitialTime { .. })));
        assert!(matches!(track.bracket(0.3), Err(Error::AfterFinalTime(_))));
        assert_eq!(track.bracket(0.2).unwrap(), (2, 2, 0.0));
        assert_eq!(track.bracket(0.0).unwrap(), (0, 0, 0.0));
    }

    #[test]
    fn explicit_dt_is_checked() {
        let mut cfg = FlowConfig::new(1.0, 0.1);
        cfg.dt = Some(1.0);
        assert!(matches!(cfg.step(0.01), Err(Error::StepSize { .. })));
        cfg.dt = Some(0.001);
        assert_eq!(cfg.step(0.01).unwrap(), 0.001);
        cfg.dt_safety = 1.5;
        assert!(cfg.validate().is_err());
    }
}
