use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// A message travelling on one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Msg {
    pub face: usize,
    pub chunk: u64,
    /// Per-face send sequence number, used to check FIFO delivery.
    pub seq: u64,
    pub sent_at: f64,
    /// Loss-detection deadline offset chosen at send time (timeout mode).
    pub timeout: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum EventKind {
    InterestAtSource(Msg),
    ServiceDone { face: usize },
    DataAtReceiver(Msg),
    LossDetected(Msg),
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap, we pop the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Time-ordered event queue; equal times pop in insertion order.
#[derive(Debug, Default)]
pub(crate) struct EventQueue {
    heap: BinaryHeap<Entry>,
    next_seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, time: f64, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry { time, seq, kind });
    }

    pub fn pop(&mut self) -> Option<(f64, EventKind)> {
        self.heap.pop().map(|e| (e.time, e.kind))
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.time)
    }
}
