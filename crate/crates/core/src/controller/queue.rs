use std::collections::VecDeque;

use crate::workload::OpKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub id: u64,
    pub kind: OpKind,
    pub bank: usize,
    pub row: u64,
    pub arrival_cycle: u64,
    pub issue_cycle: Option<u64>,
}

impl Request {
    pub fn is_write(&self) -> bool {
        self.kind.is_write()
    }

    pub fn waited(&self, now: u64) -> u64 {
        now - self.arrival_cycle
    }
}

/// Bounded read-write queue kept in arrival order.
#[derive(Debug, Clone)]
pub struct RequestQueue {
    capacity: usize,
    entries: VecDeque<Request>,
    per_bank: Vec<usize>,
}

impl RequestQueue {
    pub fn new(capacity: usize, banks: usize) -> Self {
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
            per_bank: vec![0; banks],
        }
    }

    /// Append `req`, or hand it back when the queue is full so the feeder
    /// can stall.
    pub fn enqueue(&mut self, req: Request) -> Result<(), Request> {
        if self.is_full() {
            return Err(req);
        }
        self.per_bank[req.bank] += 1;
        self.entries.push_back(req);
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Request {
        let req = self.entries.remove(index).expect("index in range");
        self.per_bank[req.bank] -= 1;
        req
    }

    pub fn get(&self, index: usize) -> &Request {
        &self.entries[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Request> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn pending_for(&self, bank: usize) -> usize {
        self.per_bank[bank]
    }
}
