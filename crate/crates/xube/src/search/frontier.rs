//! Priority queue for graph search, keyed by `f = weight * g + h` with
//! FIFO tie-breaking, plus uniform-random removal for epsilon-pops.
//!
//! Entries removed at random leave a stale item in the binary heap; stale
//! items are recognized by their emptied entry slot and skipped on later
//! min-pops.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, RngCore};

struct HeapItem {
    f: f64,
    seq: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap pops the greatest item; order so that the greatest is
        // the smallest f, earliest insertion.
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Entry<T> {
    payload: T,
    f: f64,
    live_idx: usize,
}

pub struct Frontier<T> {
    heap: BinaryHeap<HeapItem>,
    entries: Vec<Option<Entry<T>>>,
    live: Vec<usize>,
}

impl<T> Frontier<T> {
    pub fn new() -> Self {
        Frontier {
            heap: BinaryHeap::new(),
            entries: Vec::new(),
            live: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn push(&mut self, f: f64, payload: T) {
        let seq = self.entries.len();
        self.entries.push(Some(Entry {
            payload,
            f,
            live_idx: self.live.len(),
        }));
        self.live.push(seq);
        self.heap.push(HeapItem { f, seq });
    }

    /// Remove and return the entry with minimal f (FIFO on ties).
    pub fn pop_min(&mut self) -> Option<(T, f64)> {
        while let Some(item) = self.heap.pop() {
            if let Some(entry) = self.entries[item.seq].take() {
                self.remove_live(entry.live_idx);
                return Some((entry.payload, entry.f));
            }
        }
        None
    }

    /// Remove and return an entry chosen uniformly at random.
    pub fn pop_random(&mut self, rng: &mut dyn RngCore) -> Option<(T, f64)> {
        if self.live.is_empty() {
            return None;
        }
        let idx = rng.random_range(0..self.live.len());
        let seq = self.live[idx];
        let entry = self.entries[seq].take().expect("live entry is occupied");
        self.remove_live(idx);
        Some((entry.payload, entry.f))
    }

    fn remove_live(&mut self, idx: usize) {
        self.live.swap_remove(idx);
        if idx < self.live.len() {
            let moved = self.live[idx];
            self.entries[moved]
                .as_mut()
                .expect("live entry is occupied")
                .live_idx = idx;
        }
    }
}
