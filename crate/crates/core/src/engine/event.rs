use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use crate::pauli::SlotId;

/// Classical payloads exchanged between nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    /// Parity outcomes of a link-level purification round.
    PurifyResult { link: usize, success: bool },
    /// Ss-Dp outcome exchanged between the two end nodes.
    EndPurifyResult { success: bool },
    /// Bell-measurement outcome of the swap at `node`.
    SwapOutcome { node: usize },
    /// First-round outcomes of the teleported CNOTs on `link`.
    NcxForward { link: usize },
    /// Second-round outcomes of the teleported CNOTs on `link`.
    NcxBackward { link: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    AttemptLink { link: usize, left: SlotId, right: SlotId },
    Herald { link: usize, left: SlotId, right: SlotId, attempts: u64 },
    ClassicalMsg { from: usize, to: usize, msg: Message },
    LocalOp { node: usize, label: &'static str },
    Deliver { left: usize, right: usize },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::AttemptLink { .. } => "attempt-link",
            EventKind::Herald { .. } => "herald",
            EventKind::ClassicalMsg { .. } => "classical-msg",
            EventKind::LocalOp { .. } => "local-op",
            EventKind::Deliver { .. } => "deliver",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl Event {
    /// `time_s kind node detail`
    pub fn trace_line(&self) -> String {
        let (node, detail) = match &self.kind {
            EventKind::AttemptLink { link, left, right } => {
                (*link, format!("link={link} slots={left},{right}"))
            }
            EventKind::Herald {
                link,
                left,
                right,
                attempts,
            } => (*link, format!("link={link} slots={left},{right} attempts={attempts}")),
            EventKind::ClassicalMsg { from, to, msg } => (*to, format!("from={from} {msg:?}")),
            EventKind::LocalOp { node, label } => (*node, (*label).to_string()),
            EventKind::Deliver { left, right } => (*left, format!("pair={left}-{right}")),
        };
        format!("{:.9} {} {} {}", self.time, self.kind.name(), node, detail)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.trace_line())
    }
}

struct Entry(Event);

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
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

/// Min-heap of events ordered by time, ties broken by insertion order.
#[derive(Default)]
pub struct EventQueue {
    heap: BinaryHeap<Entry>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: EventKind) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry(Event { time, seq, kind }));
        seq
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|e| e.0)
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.0.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }
}
