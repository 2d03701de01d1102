use std::sync::atomic::{AtomicUsize, Ordering};

use parking_lot::Mutex;
use rustc_hash::{FxBuildHasher, FxHashMap};
use std::hash::BuildHasher;

const SHARDS: usize = 16;

/// Component counts keyed by canonical component encodings. Safe for
/// concurrent lookups and inserts; equal keys always map to equal values,
/// so racing inserts are harmless.
pub(crate) struct ComponentCache<T> {
    shards: Vec<Mutex<FxHashMap<Box<[u32]>, T>>>,
    words: AtomicUsize,
    budget: usize,
}

impl<T: Clone> ComponentCache<T> {
    pub fn new(budget_words: usize) -> Self {
        ComponentCache {
            shards: (0..SHARDS).map(|_| Mutex::new(FxHashMap::default())).collect(),
            words: AtomicUsize::new(0),
            budget: budget_words,
        }
    }

    fn shard(&self, key: &[u32]) -> &Mutex<FxHashMap<Box<[u32]>, T>> {
        let h = FxBuildHasher.hash_one(key);
        &self.shards[(h >> 58) as usize % SHARDS]
    }

    pub fn get(&self, key: &[u32]) -> Option<T> {
        self.shard(key).lock().get(key).cloned()
    }

    pub fn insert(&self, key: &[u32], value: T) {
        if self.words.fetch_add(key.len() + 8, Ordering::Relaxed) > self.budget {
            self.clear();
        }
        self.shard(key).lock().insert(key.into(), value);
    }

    pub fn clear(&self) {
        for s in &self.shards {
            s.lock().clear();
        }
        self.words.store(0, Ordering::Relaxed);
    }

    pub fn len(&self) -> usize {
        self.shards.iter().map(|s| s.lock().len()).sum()
    }
}
