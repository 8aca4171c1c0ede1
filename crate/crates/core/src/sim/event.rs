use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

/// Tick at which something that happens at `now` becomes visible after
/// `latency` seconds, rounded to the nearest tick.
pub fn inject_latency(now: u64, latency: f64, tick_rate: f64) -> u64 {
    now + libm::round(latency.max(0.0) * tick_rate) as u64
}

/// Control events. Within one tick they fire in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    /// Close the current measurement window.
    MeasurementTaken,
    /// A closed window reaches the reference scheduler.
    MeasurementArrival {
        /// Tick at which the window closed.
        taken_at: u64,
        /// `Σ (J* - J) dt` per module over the window.
        increments: Vec<f64>,
        /// Module voltages when the window closed.
        voltages: Vec<f64>,
    },
}

impl SimEvent {
    fn rank(&self) -> u8 {
        match self {
            SimEvent::MeasurementTaken => 0,
            SimEvent::MeasurementArrival { .. } => 1,
        }
    }
}

#[derive(Debug)]
struct Scheduled {
    tick: u64,
    rank: u8,
    seq: u64,
    event: SimEvent,
}

impl Scheduled {
    fn key(&self) -> (u64, u8, u64) {
        (self.tick, self.rank, self.seq)
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Min-queue with a total order on `(tick, kind, insertion sequence)`.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Scheduled>>,
    seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, tick: u64, event: SimEvent) {
        let rank = event.rank();
        self.heap.push(Reverse(Scheduled {
            tick,
            rank,
            seq: self.seq,
            event,
        }));
        self.seq += 1;
    }

    /// Next event due at or before `tick`.
    pub fn pop_due(&mut self, tick: u64) -> Option<(u64, SimEvent)> {
        if self.heap.peek()?.0.tick > tick {
            return None;
        }
        self.heap.pop().map(|Reverse(s)| (s.tick, s.event))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
