//! Weighted closed-walk counters.
//!
//! Each observation adds a product of interior-node degrees, which for the
//! largest permitted walk lengths can overflow double range on extreme
//! graphs (a product of up to K-2 degrees). Counters therefore start in
//! plain double precision and switch themselves to log-space accumulation
//! the moment a term or the running sum stops being finite.

/// ln(e^a + e^b) without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// A single non-decreasing weighted counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkCounter {
    Linear(f64),
    /// Natural log of the accumulated sum.
    LogSpace(f64),
}

impl Default for WalkCounter {
    fn default() -> Self {
        WalkCounter::Linear(0.0)
    }
}

impl WalkCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one observation. `linear_term` is the plain-double weight;
    /// `ln_term` is consulted only when the linear path stops being finite.
    pub fn add(&mut self, linear_term: f64, ln_term: impl FnOnce() -> f64) {
        debug_assert!(linear_term.is_nan() || linear_term >= 0.0);
        match *self {
            WalkCounter::Linear(sum) => {
                if linear_term.is_finite() {
                    let next = sum + linear_term;
                    if next.is_finite() {
                        *self = WalkCounter::Linear(next);
                        return;
                    }
                    *self = WalkCounter::LogSpace(log_add_exp(sum.ln(), linear_term.ln()));
                } else {
                    *self = WalkCounter::LogSpace(log_add_exp(sum.ln(), ln_term()));
                }
            }
            WalkCounter::LogSpace(ln_sum) => {
                let ln_t = if linear_term.is_finite() { linear_term.ln() } else { ln_term() };
                *self = WalkCounter::LogSpace(log_add_exp(ln_sum, ln_t));
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, WalkCounter::Linear(s) if *s == 0.0)
    }

    /// ln of the accumulated value; `None` when nothing was observed.
    pub fn ln_value(&self) -> Option<f64> {
        match *self {
            WalkCounter::Linear(s) if s == 0.0 => None,
            WalkCounter::Linear(s) => Some(s.ln()),
            WalkCounter::LogSpace(ls) => Some(ls),
        }
    }

    /// Linear value; infinite if the log-space sum exceeds double range.
    pub fn value(&self) -> f64 {
        match *self {
            WalkCounter::Linear(s) => s,
            WalkCounter::LogSpace(ls) => ls.exp(),
        }
    }
}

/// Counters c[k] for k in [k_min, k_max], with per-k observation tallies.
#[derive(Debug, Clone)]
pub struct ClosedWalkCounters {
    k_min: usize,
    counters: Vec<WalkCounter>,
    observations: Vec<u64>,
}

impl ClosedWalkCounters {
    pub fn new(k_min: usize, k_max: usize) -> Self {
        assert!(k_min >= 1 && k_min <= k_max);
        ClosedWalkCounters {
            k_min,
            counters: vec![WalkCounter::new(); k_max + 1],
            observations: vec![0; k_max + 1],
        }
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.counters.len() - 1
    }

    pub fn add(&mut self, k: usize, linear_term: f64, ln_term: impl FnOnce() -> f64) {
        debug_assert!(k >= self.k_min && k <= self.k_max());
        self.counters[k].add(linear_term, ln_term);
        self.observations[k] += 1;
    }

    pub fn counter(&self, k: usize) -> &WalkCounter {
        &self.counters[k]
    }

    pub fn observations(&self) -> &[u64] {
        &self.observations
    }

    /// k values in range that never observed a closed walk.
    pub fn missing_k(&self) -> Vec<usize> {
        (self.k_min..=self.k_max()).filter(|&k| self.counters[k].is_zero()).collect()
    }
}
