//! The discrete-event core: one mutable world (server, waiting storage,
//! event calendar) advanced event by event under a scheduling policy.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Policy, SystemParams};

use super::rng::{sample_bernoulli, sample_exponential, SimRng};
use super::tracker::PeakTracker;
use super::SimConfig;

/// Lifecycle state of an update packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketState {
    Waiting,
    InService,
    Departed,
}

/// A live update packet. `gen_time` is the time stamp carried to the
/// destination; `first_service` is set once, the first time the packet
/// reaches the server, so the measured service span of a preempted packet
/// includes the work of the packets that displaced it.
#[derive(Debug, Clone, Copy)]
pub struct Packet {
    pub id: u64,
    pub gen_time: f64,
    pub state: PacketState,
    pub first_service: Option<f64>,
    delivered_before: bool,
}

impl Packet {
    fn new(id: u64, gen_time: f64) -> Self {
        Self {
            id,
            gen_time,
            state: PacketState::Waiting,
            first_service: None,
            delivered_before: false,
        }
    }
}

/// What the calendar schedules. A completion carries the serial token of the
/// service that scheduled it; a token mismatch on pop means that service was
/// aborted by a preemption and the entry is inert.
#[derive(Debug, Clone, Copy)]
pub enum EventKind {
    ServiceCompletion { packet_id: u64, token: u64 },
    Arrival,
}

impl EventKind {
    fn tie_key(&self) -> (u8, u64, u64) {
        match *self {
            // Completions sort ahead of arrivals at equal timestamps.
            EventKind::ServiceCompletion { packet_id, token } => (0, packet_id, token),
            EventKind::Arrival => (1, 0, 0),
        }
    }
}

/// A calendar entry. Ordered by time, with service completions popping ahead
/// of arrivals at equal timestamps; ties cannot occur under continuous
/// distributions but the order is fixed so runs are deterministic anyway.
#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| self.kind.tie_key().cmp(&other.kind.tie_key()))
    }
}

/// One line of the optional event-log dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub kind: LogKind,
    pub packet_id: u64,
    pub gen_time: f64,
    /// Packets in the system (including the one in service) after the event.
    pub queue_length_after: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogKind {
    Arrival,
    CompletionDelivered,
    CompletionLost,
}

impl LogKind {
    pub fn token(&self) -> &'static str {
        match self {
            LogKind::Arrival => "arrival",
            LogKind::CompletionDelivered => "completion_delivered",
            LogKind::CompletionLost => "completion_lost",
        }
    }
}

/// Accumulators, snapshotted once at the warm-up boundary so every reported
/// statistic covers only the post-warm-up window.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Counters {
    pub arrivals: u64,
    pub departures: u64,
    pub deliveries: u64,
    pub first_deliveries: u64,
    pub informative: u64,
    pub sum_wait_informative: f64,
    pub sum_service_informative: f64,
    pub sum_queue_seen: f64,
}

impl Counters {
    fn minus(&self, base: &Counters) -> Counters {
        Counters {
            arrivals: self.arrivals - base.arrivals,
            departures: self.departures - base.departures,
            deliveries: self.deliveries - base.deliveries,
            first_deliveries: self.first_deliveries - base.first_deliveries,
            informative: self.informative - base.informative,
            sum_wait_informative: self.sum_wait_informative - base.sum_wait_informative,
            sum_service_informative: self.sum_service_informative
                - base.sum_service_informative,
            sum_queue_seen: self.sum_queue_seen - base.sum_queue_seen,
        }
    }
}

pub(crate) struct EngineOutput {
    /// Every peak recorded, warm-up segment included.
    pub peaks: Vec<f64>,
    /// Post-warm-up accumulators.
    pub window: Counters,
    /// Whole-run accumulators.
    pub totals: Counters,
    pub events_processed: u64,
    pub in_system_at_end: u64,
    pub log: Option<Vec<EventRecord>>,
}

pub(crate) fn run(
    params: &SystemParams,
    policy: Policy,
    config: &SimConfig,
    mut rng: SimRng,
    keep_log: bool,
) -> Result<EngineOutput> {
    Engine {
        lambda: params.lambda(),
        mu: params.mu(),
        p: params.p(),
        policy,
        needed_peaks: config.warmup_peaks + config.target_peaks,
        warmup_peaks: config.warmup_peaks,
        max_events: config.max_events,
        rng: &mut rng,
        calendar: BinaryHeap::new(),
        server: None,
        service_token: 0,
        fifo: VecDeque::new(),
        stack: Vec::new(),
        slot: None,
        next_id: 0,
        tracker: PeakTracker::new(),
        counters: Counters::default(),
        snapshot: None,
        events_processed: 0,
        log: keep_log.then(Vec::new),
    }
    .run()
}

struct Engine<'a> {
    lambda: f64,
    mu: f64,
    p: f64,
    policy: Policy,
    needed_peaks: usize,
    warmup_peaks: usize,
    max_events: u64,
    rng: &'a mut SimRng,
    calendar: BinaryHeap<std::cmp::Reverse<Event>>,
    server: Option<Packet>,
    service_token: u64,
    fifo: VecDeque<Packet>,
    stack: Vec<Packet>,
    slot: Option<Packet>,
    next_id: u64,
    tracker: PeakTracker,
    counters: Counters,
    snapshot: Option<Counters>,
    events_processed: u64,
    log: Option<Vec<EventRecord>>,
}

impl Engine<'_> {
    fn run(mut self) -> Result<EngineOutput> {
        if self.warmup_peaks == 0 {
            self.snapshot = Some(self.counters);
        }
        let first = sample_exponential(self.lambda, self.rng);
        self.calendar.push(std::cmp::Reverse(Event {
            time: first,
            kind: EventKind::Arrival,
        }));

        while self.tracker.peaks().len() < self.needed_peaks {
            if self.events_processed >= self.max_events {
                return Err(Error::EventBudgetExceeded {
                    max_events: self.max_events,
                    peaks_collected: self.tracker.peaks().len(),
                });
            }
            let Event { time, kind } = self
                .calendar
                .pop()
                .expect("an arrival is always scheduled")
                .0;
            match kind {
                EventKind::Arrival => {
                    self.events_processed += 1;
                    self.handle_arrival(time)?;
                }
                EventKind::ServiceCompletion { packet_id, token } => {
                    if token != self.service_token {
                        // Aborted service; inert entry.
                        continue;
                    }
                    self.events_processed += 1;
                    self.handle_completion(time, packet_id)?;
                }
            }
        }

        let totals = self.counters;
        let snapshot = self.snapshot.expect("warm-up boundary always reached");
        Ok(EngineOutput {
            peaks: self.tracker.into_peaks(),
            window: totals.minus(&snapshot),
            totals,
            events_processed: self.events_processed,
            in_system_at_end: self.in_system(),
            log: self.log,
        })
    }

    fn in_system(&self) -> u64 {
        self.server.is_some() as u64
            + self.fifo.len() as u64
            + self.stack.len() as u64
            + self.slot.is_some() as u64
    }

    fn start_service(&mut self, mut pkt: Packet, now: f64) {
        if pkt.first_service.is_none() {
            pkt.first_service = Some(now);
        }
        pkt.state = PacketState::InService;
        self.service_token += 1;
        let mut done = now + sample_exponential(self.mu, self.rng);
        if done <= now {
            done = now.next_up();
        }
        self.calendar.push(std::cmp::Reverse(Event {
            time: done,
            kind: EventKind::ServiceCompletion {
                packet_id: pkt.id,
                token: self.service_token,
            },
        }));
        self.server = Some(pkt);
    }

    fn depart(&mut self, mut pkt: Packet) {
        pkt.state = PacketState::Departed;
        self.counters.departures += 1;
    }

    fn handle_arrival(&mut self, now: f64) -> Result<()> {
        self.counters.sum_queue_seen += self.in_system() as f64;
        self.counters.arrivals += 1;
        let pkt = Packet::new(self.next_id, now);
        self.next_id += 1;
        let id = pkt.id;

        match self.policy {
            Policy::Fcfs => {
                if self.server.is_none() {
                    self.start_service(pkt, now);
                } else {
                    self.fifo.push_back(pkt);
                }
            }
            Policy::LcfsPreemptive => {
                // The newcomer seizes the server; displaced work waits on the
                // stack and restarts with a fresh draw later, which is
                // distributionally identical for exponential services.
                if let Some(mut cur) = self.server.take() {
                    cur.state = PacketState::Waiting;
                    self.stack.push(cur);
                }
                self.start_service(pkt, now);
            }
            Policy::LcfsNonPreemptive => {
                if self.server.is_none() {
                    self.start_service(pkt, now);
                } else {
                    self.stack.push(pkt);
                }
            }
            Policy::RetxPreemptive => {
                if let Some(cur) = self.server.take() {
                    self.depart(cur);
                }
                self.start_service(pkt, now);
            }
            Policy::RetxNonPreemptive | Policy::PacketMgmtSimOnly => {
                if self.server.is_none() {
                    self.start_service(pkt, now);
                } else if let Some(old) = self.slot.replace(pkt) {
                    self.depart(old);
                }
            }
        }

        // Next arrival, nudged forward if rounding would collapse the gap:
        // generation stamps must be strictly increasing.
        let mut next = now + sample_exponential(self.lambda, self.rng);
        if next <= now {
            next = now.next_up();
        }
        self.calendar.push(std::cmp::Reverse(Event {
            time: next,
            kind: EventKind::Arrival,
        }));

        if self.log.is_some() {
            let queue_length_after = self.in_system();
            self.log.as_mut().unwrap().push(EventRecord {
                time: now,
                kind: LogKind::Arrival,
                packet_id: id,
                gen_time: now,
                queue_length_after,
            });
        }
        Ok(())
    }

    fn handle_completion(&mut self, now: f64, packet_id: u64) -> Result<()> {
        let mut cur = self.server.take().expect("live token implies a busy server");
        debug_assert_eq!(cur.id, packet_id);

        let delivered = sample_bernoulli(self.p, self.rng);
        if delivered {
            self.counters.deliveries += 1;
            if !cur.delivered_before {
                cur.delivered_before = true;
                self.counters.first_deliveries += 1;
            }
            let outcome = self.tracker.record_delivery(cur.gen_time, now)?;
            if outcome.informative {
                self.counters.informative += 1;
                let started = cur
                    .first_service
                    .expect("an informative packet has been served");
                self.counters.sum_wait_informative += started - cur.gen_time;
                self.counters.sum_service_informative += now - started;
            }
            if self.snapshot.is_none() && self.tracker.peaks().len() >= self.warmup_peaks {
                self.snapshot = Some(self.counters);
            }
        }

        match self.policy {
            Policy::Fcfs => {
                self.depart(cur);
                if let Some(next) = self.fifo.pop_front() {
                    self.start_service(next, now);
                }
            }
            Policy::LcfsPreemptive | Policy::LcfsNonPreemptive => {
                self.depart(cur);
                if let Some(next) = self.stack.pop() {
                    self.start_service(next, now);
                }
            }
            Policy::RetxPreemptive => {
                // No feedback: the same packet goes straight back into
                // service whether or not it just got through.
                self.start_service(cur, now);
            }
            Policy::RetxNonPreemptive => match self.slot.take() {
                Some(next) => {
                    self.depart(cur);
                    self.start_service(next, now);
                }
                None => self.start_service(cur, now),
            },
            Policy::PacketMgmtSimOnly => {
                self.depart(cur);
                if let Some(next) = self.slot.take() {
                    self.start_service(next, now);
                }
            }
        }

        if self.log.is_some() {
            let queue_length_after = self.in_system();
            self.log.as_mut().unwrap().push(EventRecord {
                time: now,
                kind: if delivered {
                    LogKind::CompletionDelivered
                } else {
                    LogKind::CompletionLost
                },
                packet_id: cur.id,
                gen_time: cur.gen_time,
                queue_length_after,
            });
        }
        Ok(())
    }
}
