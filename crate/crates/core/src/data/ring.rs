//! Cyclic buffer between the online data source and the trainer.
//!
//! The producer never stalls: pushing into a full buffer overwrites the
//! oldest item and bumps a drop counter, making the lossy path observable.

#[derive(Debug, Clone)]
pub struct CyclicBuffer<T> {
    storage: Vec<Option<T>>,
    head: usize, // oldest retained item
    len: usize,
    dropped: u64,
}

impl<T> CyclicBuffer<T> {
    /// `capacity` must be at least 1.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "cyclic buffer capacity must be >= 1");
        CyclicBuffer {
            storage: (0..capacity).map(|_| None).collect(),
            head: 0,
            len: 0,
            dropped: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.storage.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Items overwritten before they were consumed.
    pub fn dropped_count(&self) -> u64 {
        self.dropped
    }

    pub fn push(&mut self, item: T) {
        let cap = self.capacity();
        let tail = (self.head + self.len) % cap;
        if self.len == cap {
            // Full: the slot at head holds the oldest item; overwrite it.
            self.storage[tail] = Some(item);
            self.head = (self.head + 1) % cap;
            self.dropped += 1;
        } else {
            self.storage[tail] = Some(item);
            self.len += 1;
        }
    }

    /// Oldest retained item, or `None` when empty.
    pub fn pop(&mut self) -> Option<T> {
        if self.len == 0 {
            return None;
        }
        let item = self.storage[self.head].take();
        self.head = (self.head + 1) % self.capacity();
        self.len -= 1;
        item
    }
}
