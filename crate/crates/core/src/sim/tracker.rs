//! Bookkeeping shared by the path engines: Y(t), the running maximum on
//! [0, t], first passage over x and x + y, and the zero set of Y near t.

use super::{FunctionalSample, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Level {
    X,
    Target,
}

#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    t: f64,
    x: f64,
    target: f64,
    horizon: f64,
    straddle_cap: f64,
    y_t: Option<f64>,
    ymax: f64,
    tau_x: Option<f64>,
    tau: Option<f64>,
    z: Option<f64>,
    last_zero_le_t: f64,
    first_zero_ge_t: Option<f64>,
}

impl Tracker {
    pub(crate) fn new(cfg: &SimConfig) -> Self {
        Self {
            t: cfg.t,
            x: cfg.x,
            target: cfg.x + cfg.y_offset,
            horizon: cfg.horizon,
            straddle_cap: 2.0 * cfg.horizon + 100.0,
            y_t: None,
            ymax: 0.0,
            tau_x: None,
            tau: None,
            z: None,
            last_zero_le_t: 0.0,
            first_zero_ge_t: None,
        }
    }

    pub(crate) fn t(&self) -> f64 {
        self.t
    }

    pub(crate) fn t_recorded(&self) -> bool {
        self.y_t.is_some()
    }

    pub(crate) fn record_t(&mut self, y: f64) {
        if self.y_t.is_none() {
            self.y_t = Some(y);
            self.ymax = self.ymax.max(y);
        }
    }

    /// Value of Y at `time`; only values on [0, t] enter the maximum.
    #[inline]
    pub(crate) fn observe(&mut self, time: f64, y: f64) {
        if time <= self.t && y > self.ymax {
            self.ymax = y;
        }
    }

    /// Levels not yet crossed, as `(which, level)`.
    #[inline]
    pub(crate) fn open_levels(&self) -> impl Iterator<Item = (Level, f64)> {
        let x = self.tau_x.is_none().then_some((Level::X, self.x));
        let tg = self.tau.is_none().then_some((Level::Target, self.target));
        x.into_iter().chain(tg)
    }

    /// Continuous passage of `which` at `time` (overshoot 0).
    pub(crate) fn creep(&mut self, which: Level, time: f64) {
        self.set_passage(which, time, 0.0);
    }

    /// Y moved to `y` at `time` by a jump or a grid step that is not creeping.
    #[inline]
    pub(crate) fn land(&mut self, time: f64, y: f64) {
        if self.tau_x.is_none() && y > self.x {
            self.tau_x = Some(time);
        }
        if self.tau.is_none() && y > self.target {
            self.set_passage(Level::Target, time, y - self.target);
        }
    }

    fn set_passage(&mut self, which: Level, time: f64, overshoot: f64) {
        match which {
            Level::X => {
                if self.tau_x.is_none() {
                    self.tau_x = Some(time);
                }
            }
            Level::Target => {
                if self.tau.is_none() && time <= self.horizon {
                    self.tau = Some(time);
                    self.z = Some(overshoot);
                }
            }
        }
    }

    /// Y = 0 throughout `[z0, z1]`.
    #[inline]
    pub(crate) fn zero(&mut self, z0: f64, z1: f64) {
        if z0 <= self.t {
            self.last_zero_le_t = self.last_zero_le_t.max(z1.min(self.t));
        }
        if z1 >= self.t && self.first_zero_ge_t.is_none() {
            self.first_zero_ge_t = Some(z0.max(self.t));
        }
    }

    /// True once every functional is determined, given the path is known up to `now`.
    #[inline]
    pub(crate) fn done(&self, now: f64) -> bool {
        if self.y_t.is_none() {
            return false;
        }
        let z_done = self.tau.is_some() || now > self.horizon;
        let straddle_done =
            self.tau_x.is_some() || self.first_zero_ge_t.is_some() || now > self.straddle_cap;
        z_done && straddle_done
    }

    pub(crate) fn finish(&self, index: u64) -> FunctionalSample {
        let straddle = match self.tau_x {
            Some(tx) if tx <= self.t => self.last_zero_le_t < tx,
            Some(tx) => self.first_zero_ge_t.is_none_or(|z| z > tx),
            None => false,
        };
        FunctionalSample {
            index,
            y_t: self.y_t.expect("Y(t) recorded before finishing"),
            z: self.z,
            m: self.ymax - self.x,
            tau: self.tau,
            straddle,
            weight: 1.0,
        }
    }
}
