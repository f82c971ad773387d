//! Concurrent building blocks for the parallel construction phases.
//!
//! [`SlotMap`] is an open-addressing hash table with linear probing that maps
//! 64-bit keys to stable slot indices. [`ClaimVector`] is a fixed-capacity
//! vector where each writer claims its destination cell with a single
//! fetch-and-increment on a shared cursor.
//!
//! Both containers are phase-oriented: a parallel write phase followed, after
//! a caller-provided barrier (e.g. the end of a rayon scope), by a read phase.
//! Neither supports deletion or resizing while shared.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::atomic::{AtomicI64, AtomicU8, AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// 64-bit avalanche mix (the splitmix64 finalizer).
///
/// This is the fixed hash for every integer-keyed table in the crate. It is
/// a bijection on `u64`, so distinct keys never collide before masking.
#[inline]
pub fn mix64(key: i64) -> u64 {
    let mut z = (key as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hasher for integer keys backed by [`mix64`].
#[derive(Default, Clone, Copy)]
pub struct IdHasher(u64);

impl Hasher for IdHasher {
    #[inline]
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self.write_u64(u64::from_le_bytes(buf));
        }
    }

    #[inline]
    fn write_u64(&mut self, n: u64) {
        self.0 = mix64((self.0 ^ n) as i64);
    }

    #[inline]
    fn write_i64(&mut self, n: i64) {
        self.write_u64(n as u64);
    }

    #[inline]
    fn write_usize(&mut self, n: usize) {
        self.write_u64(n as u64);
    }
}

pub type IdBuildHasher = BuildHasherDefault<IdHasher>;
pub type IdHashMap<K, V> = HashMap<K, V, IdBuildHasher>;

const EMPTY: u8 = 0;
const WRITING: u8 = 1;
const READY: u8 = 2;

/// Open-addressing, linear-probing map from `i64` keys to slot indices.
///
/// The slot index returned by [`insert`](SlotMap::insert) is the payload: it
/// is stable for the lifetime of the map and can index side arrays of length
/// [`capacity`](SlotMap::capacity).
///
/// Occupancy never exceeds `capacity / 2`.
pub struct SlotMap {
    keys: Box<[AtomicI64]>,
    states: Box<[AtomicU8]>,
    occupancy: AtomicUsize,
    claimed: AtomicUsize,
    mask: usize,
    hash: fn(i64) -> u64,
}

impl SlotMap {
    /// Creates a map with `capacity` slots. `capacity` must be a power of two
    /// and at least 2.
    pub fn with_capacity(capacity: usize) -> Result<Self> {
        Self::with_hasher(capacity, mix64)
    }

    /// Creates a map large enough to hold `keys` distinct keys without
    /// exceeding the load bound.
    pub fn for_keys(keys: usize) -> Self {
        let capacity = keys.saturating_mul(2).max(2).next_power_of_two();
        Self::with_hasher(capacity, mix64).expect("power-of-two capacity")
    }

    pub(crate) fn with_hasher(capacity: usize, hash: fn(i64) -> u64) -> Result<Self> {
        if capacity < 2 || !capacity.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "slot map capacity must be a power of two >= 2, got {capacity}"
            )));
        }
        Ok(SlotMap {
            keys: (0..capacity).map(|_| AtomicI64::new(0)).collect(),
            states: (0..capacity).map(|_| AtomicU8::new(EMPTY)).collect(),
            occupancy: AtomicUsize::new(0),
            claimed: AtomicUsize::new(0),
            mask: capacity - 1,
            hash,
        })
    }

    pub fn capacity(&self) -> usize {
        self.mask + 1
    }

    pub fn len(&self) -> usize {
        self.claimed.load(Ordering::Acquire)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn limit(&self) -> usize {
        self.capacity() / 2
    }

    #[inline]
    fn home(&self, key: i64) -> usize {
        (self.hash)(key) as usize & self.mask
    }

    fn reserve(&self) -> Result<()> {
        let limit = self.limit();
        self.occupancy
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |n| (n < limit).then_some(n + 1))
            .map(|_| ())
            .map_err(|len| Error::CapacityExhausted {
                what: "slot map",
                len,
                limit,
            })
    }

    /// Waits for a slot that another writer is filling, then returns its key.
    #[inline]
    fn settled_key(&self, slot: usize) -> i64 {
        let mut spins = 0u32;
        while self.states[slot].load(Ordering::Acquire) != READY {
            spins += 1;
            if spins < 64 {
                std::hint::spin_loop();
            } else {
                std::thread::yield_now();
            }
        }
        self.keys[slot].load(Ordering::Relaxed)
    }

    /// Inserts `key` (idempotently) and returns its slot.
    ///
    /// Safe to call from many threads at once. Two writers racing on the same
    /// key both receive the slot of whichever claimed it first.
    pub fn insert(&self, key: i64) -> Result<usize> {
        let mut slot = self.home(key);
        let mut probes = 0;
        while probes < self.capacity() {
            if self.states[slot].load(Ordering::Acquire) == EMPTY {
                if let Err(err) = self.reserve() {
                    // A reservation still in flight may belong to a writer
                    // racing us for this very key; wait for it to settle.
                    if self.claimed.load(Ordering::Acquire) < self.occupancy.load(Ordering::Acquire) {
                        std::thread::yield_now();
                        continue;
                    }
                    return Err(err);
                }
                if self.states[slot]
                    .compare_exchange(EMPTY, WRITING, Ordering::AcqRel, Ordering::Acquire)
                    .is_ok()
                {
                    self.keys[slot].store(key, Ordering::Relaxed);
                    self.states[slot].store(READY, Ordering::Release);
                    self.claimed.fetch_add(1, Ordering::AcqRel);
                    return Ok(slot);
                }
                // Lost the claim; hand the reservation back.
                self.occupancy.fetch_sub(1, Ordering::AcqRel);
            }
            if self.settled_key(slot) == key {
                return Ok(slot);
            }
            slot = (slot + 1) & self.mask;
            probes += 1;
        }
        Err(Error::CapacityExhausted {
            what: "slot map",
            len: self.len(),
            limit: self.limit(),
        })
    }

    /// Returns the slot for `key`, if present. Must not race with inserts.
    pub fn get(&self, key: i64) -> Option<usize> {
        let mut slot = self.home(key);
        for _ in 0..self.capacity() {
            match self.states[slot].load(Ordering::Acquire) {
                EMPTY => return None,
                _ => {
                    if self.keys[slot].load(Ordering::Relaxed) == key {
                        return Some(slot);
                    }
                }
            }
            slot = (slot + 1) & self.mask;
        }
        None
    }

    /// Key stored at `slot`, if the slot is occupied.
    pub fn key_at(&self, slot: usize) -> Option<i64> {
        (self.states.get(slot)?.load(Ordering::Acquire) == READY).then(|| self.keys[slot].load(Ordering::Relaxed))
    }

    /// Occupied `(slot, key)` pairs in slot order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        (0..self.capacity()).filter_map(|slot| self.key_at(slot).map(|k| (slot, k)))
    }
}

impl std::fmt::Debug for SlotMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SlotMap")
            .field("capacity", &self.capacity())
            .field("len", &self.len())
            .finish()
    }
}

/// Fixed-capacity vector filled by concurrent claim-by-increment appends.
pub struct ClaimVector {
    cells: Box<[AtomicI64]>,
    cursor: AtomicUsize,
}

impl ClaimVector {
    pub fn with_capacity(capacity: usize) -> Self {
        ClaimVector {
            cells: (0..capacity).map(|_| AtomicI64::new(0)).collect(),
            cursor: AtomicUsize::new(0),
        }
    }

    pub fn capacity(&self) -> usize {
        self.cells.len()
    }

    /// Number of claimed cells.
    pub fn len(&self) -> usize {
        self.cursor.load(Ordering::Acquire)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity()
    }

    /// Claims the next free cell, stores `value` there and returns its index.
    pub fn claim_append(&self, value: i64) -> Result<usize> {
        let capacity = self.capacity();
        let index = self
            .cursor
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |n| (n < capacity).then_some(n + 1))
            .map_err(|len| Error::CapacityExhausted {
                what: "claim vector",
                len,
                limit: capacity,
            })?;
        self.cells[index].store(value, Ordering::Relaxed);
        Ok(index)
    }

    /// Value at `index`, if it has been claimed. Read phase only.
    pub fn get(&self, index: usize) -> Option<i64> {
        (index < self.len()).then(|| self.cells[index].load(Ordering::Relaxed))
    }

    /// Consumes the vector, returning the claimed prefix.
    pub fn into_vec(self) -> Vec<i64> {
        let len = self.cursor.into_inner();
        let mut out: Vec<i64> = self.cells.into_vec().into_iter().map(AtomicI64::into_inner).collect();
        out.truncate(len);
        out
    }
}

impl std::fmt::Debug for ClaimVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClaimVector")
            .field("capacity", &self.capacity())
            .field("len", &self.len())
            .finish()
    }
}
