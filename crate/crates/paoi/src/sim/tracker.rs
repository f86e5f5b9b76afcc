//! Streaming extraction of peak ages from (generation time, delivery time)
//! pairs.
//!
//! The destination's age grows with slope 1 and drops only when an
//! *informative* packet arrives: one generated later than everything
//! delivered so far. The age immediately before such a drop is a peak, and
//! equals the delivery time minus the generation time of the previous
//! informative packet.

use crate::error::{Error, Result};

/// Outcome of recording one successful delivery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    /// Whether the delivered packet carried new information.
    pub informative: bool,
    /// The peak age ended by this delivery; `None` for the very first
    /// informative delivery (which seeds the tracker) and for stale ones.
    pub peak: Option<f64>,
}

/// Tracks the informative-delivery frontier and collects peak ages.
#[derive(Debug, Clone, Default)]
pub struct PeakTracker {
    last_informative_gen: Option<f64>,
    peaks: Vec<f64>,
    deliveries_total: u64,
    deliveries_informative: u64,
}

impl PeakTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record a successful delivery of a packet generated at `gen_time`,
    /// arriving at the destination at `deliver_time`.
    ///
    /// The first informative delivery only seeds the frontier, so no
    /// arbitrary initial-age convention leaks into the peak estimate. A
    /// delivery with `gen_time` at or behind the frontier is counted but
    /// changes nothing else: by the age definition it cannot reduce the age.
    pub fn record_delivery(&mut self, gen_time: f64, deliver_time: f64) -> Result<Delivery> {
        if deliver_time <= gen_time {
            return Err(Error::NonCausalDelivery {
                gen_time,
                deliver_time,
            });
        }
        self.deliveries_total += 1;
        match self.last_informative_gen {
            None => {
                self.last_informative_gen = Some(gen_time);
                self.deliveries_informative += 1;
                Ok(Delivery {
                    informative: true,
                    peak: None,
                })
            }
            Some(frontier) if gen_time > frontier => {
                let peak = deliver_time - frontier;
                self.peaks.push(peak);
                self.last_informative_gen = Some(gen_time);
                self.deliveries_informative += 1;
                Ok(Delivery {
                    informative: true,
                    peak: Some(peak),
                })
            }
            Some(_) => Ok(Delivery {
                informative: false,
                peak: None,
            }),
        }
    }

    pub fn peaks(&self) -> &[f64] {
        &self.peaks
    }

    pub fn into_peaks(self) -> Vec<f64> {
        self.peaks
    }

    pub fn deliveries_total(&self) -> u64 {
        self.deliveries_total
    }

    pub fn deliveries_informative(&self) -> u64 {
        self.deliveries_informative
    }

    pub fn last_informative_gen(&self) -> Option<f64> {
        self.last_informative_gen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_delivery_seeds_without_peak() {
        let mut tracker = PeakTracker::new();
        let d = tracker.record_delivery(1.0, 2.0).unwrap();
        assert!(d.informative);
        assert_eq!(d.peak, None);
        assert_eq!(tracker.last_informative_gen(), Some(1.0));
        assert_eq!(tracker.deliveries_total(), 1);
        assert_eq!(tracker.deliveries_informative(), 1);
        assert!(tracker.peaks().is_empty());
    }

    #[test]
    fn informative_delivery_records_peak() {
        let mut tracker = PeakTracker::new();
        tracker.record_delivery(1.0, 2.0).unwrap();
        let d = tracker.record_delivery(3.0, 4.5).unwrap();
        assert!(d.informative);
        assert_eq!(d.peak, Some(3.5));
        assert_eq!(tracker.peaks(), &[3.5]);
        assert_eq!(tracker.last_informative_gen(), Some(3.0));
    }

    #[test]
    fn stale_delivery_is_counted_but_silent() {
        let mut tracker = PeakTracker::new();
        tracker.record_delivery(3.0, 4.0).unwrap();
        let d = tracker.record_delivery(2.0, 5.0).unwrap();
        assert!(!d.informative);
        assert_eq!(d.peak, None);
        assert_eq!(tracker.deliveries_total(), 2);
        assert_eq!(tracker.deliveries_informative(), 1);
        assert_eq!(tracker.last_informative_gen(), Some(3.0));
        assert!(tracker.peaks().is_empty());
    }

    #[test]
    fn non_causal_delivery_rejected() {
        let mut tracker = PeakTracker::new();
        assert!(matches!(
            tracker.record_delivery(2.0, 2.0),
            Err(Error::NonCausalDelivery { .. })
        ));
        assert_eq!(tracker.deliveries_total(), 0);
    }

    #[test]
    fn peaks_positive_and_frontier_increases() {
        let mut tracker = PeakTracker::new();
        let gens = [0.5, 1.25, 1.0, 2.0, 3.5, 3.0, 5.0];
        let mut t = 1.0;
        let mut last = f64::NEG_INFINITY;
        for g in gens {
            t += 0.75;
            tracker.record_delivery(g, t).unwrap();
            if let Some(f) = tracker.last_informative_gen() {
                assert!(f >= last);
                last = f;
            }
        }
        assert!(tracker.peaks().iter().all(|&p| p > 0.0));
        assert!(tracker.deliveries_informative() <= tracker.deliveries_total());
    }
}
