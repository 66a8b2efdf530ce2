//! Sampled paths and click bookkeeping.

use alloc::vec::Vec;

use crate::profile::Profile;

/// Whether the fittest class was lost along a path, and when.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClickTime {
    /// The fittest class hit zero at this time.
    Clicked(f64),
    /// Still alive when observation stopped at this horizon.
    Censored(f64),
}

impl ClickTime {
    #[inline]
    pub fn clicked(&self) -> bool {
        matches!(self, ClickTime::Clicked(_))
    }

    /// Click time if clicked, horizon otherwise.
    #[inline]
    pub fn time(&self) -> f64 {
        match *self {
            ClickTime::Clicked(t) | ClickTime::Censored(t) => t,
        }
    }
}

/// Integrator counters for one path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Steps taken.
    pub steps: u64,
    /// Steps on which at least one coordinate was clipped at 0 or 1.
    pub clipped_steps: u64,
    /// Steps with a negative excursion too large to be roundoff
    /// (below -1e-8), signalling the step size is straining the scheme.
    pub instability_events: u64,
}

impl StepStats {
    pub fn merge(&mut self, other: &StepStats) {
        self.steps += other.steps;
        self.clipped_steps += other.clipped_steps;
        self.instability_events += other.instability_events;
    }

    /// Fraction of steps with a beyond-roundoff clip.
    pub fn instability_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.instability_events as f64 / self.steps as f64
        }
    }
}

/// A path sampled on a grid of times, stopped at click or at the horizon.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample times, starting at the initial time.
    pub times: Vec<f64>,
    /// State at each sample time; same length as `times`.
    pub states: Vec<Profile>,
    /// Click status at the end of the path.
    pub click: ClickTime,
    /// Integrator counters over the whole path.
    pub stats: StepStats,
}

impl Trajectory {
    #[inline]
    pub fn last(&self) -> &Profile {
        self.states.last().expect("trajectory holds its initial state")
    }

    /// State at the largest sample time `<= t`, if any.
    pub fn state_at(&self, t: f64) -> Option<&Profile> {
        let idx = self.times.partition_point(|&s| s <= t);
        idx.checked_sub(1).map(|i| &self.states[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn click_accessors() {
        let c = ClickTime::Clicked(2.5);
        assert!(c.clicked());
        assert_eq!(c.time(), 2.5);
        let s = ClickTime::Censored(10.0);
        assert!(!s.clicked());
        assert_eq!(s.time(), 10.0);
    }

    #[test]
    fn state_lookup_uses_floor() {
        let traj = Trajectory {
            times: vec![0.0, 1.0, 2.0],
            states: vec![
                Profile::delta(0, 1),
                Profile::delta(1, 1),
                Profile::delta(0, 1),
            ],
            click: ClickTime::Censored(2.0),
            stats: StepStats::default(),
        };
        assert_eq!(traj.state_at(1.5).unwrap(), &Profile::delta(1, 1));
        assert_eq!(traj.state_at(2.0).unwrap(), &Profile::delta(0, 1));
        assert!(traj.state_at(-0.1).is_none());
    }
}
