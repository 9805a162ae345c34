use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};

use super::InvariantKey;
use crate::arith::{parse_rational_function, RationalFunction};
use crate::error::{Error, Result};

/// Bumped whenever the on-disk record layout changes.
pub const CACHE_FORMAT: u32 = 1;
/// Bumped whenever the engine could produce a different canonical value.
pub const ENGINE_VERSION: &str = concat!("ellchi-", env!("CARGO_PKG_VERSION"));

/// A memoized `P_{n,m}` together with its `q = 0` slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CachedGenfun {
    pub value: RationalFunction,
    pub at_q0: RationalFunction,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
    /// Records dropped while loading (bad checksum, unparsable, wrong key).
    pub rejected: usize,
}

/// Shared table `InvariantKey → P_{n,m}`, optionally backed by a file.
///
/// Readers never block each other. Inserting the same key twice is harmless
/// because every computation of a key yields the same canonical value.
#[derive(Debug)]
pub struct MemoCache {
    enabled: bool,
    path: Option<PathBuf>,
    map: RwLock<HashMap<InvariantKey, Arc<CachedGenfun>>>,
    hits: AtomicU64,
    misses: AtomicU64,
    rejected: usize,
}

impl Default for MemoCache {
    fn default() -> Self {
        MemoCache::in_memory()
    }
}

impl MemoCache {
    pub fn in_memory() -> Self {
        MemoCache {
            enabled: true,
            path: None,
            map: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            rejected: 0,
        }
    }

    /// A cache that stores nothing; every lookup misses.
    pub fn disabled() -> Self {
        MemoCache {
            enabled: false,
            ..MemoCache::in_memory()
        }
    }

    /// Opens (or prepares to create) a file-backed cache. A missing file is
    /// an empty cache; a file from another format or engine version is
    /// ignored as a whole.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut cache = MemoCache::in_memory();
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            let (records, rejected) = parse_cache_file(&text);
            cache.rejected = rejected;
            let map = cache.map.get_mut().expect("fresh lock");
            for (key, entry) in records {
                map.insert(key, Arc::new(entry));
            }
        }
        cache.path = Some(path);
        Ok(cache)
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: InvariantKey) -> Option<Arc<CachedGenfun>> {
        if !self.enabled {
            return None;
        }
        let found = self.map.read().expect("cache lock").get(&key).cloned();
        match found {
            Some(_) => self.hits.fetch_add(1, Ordering::Relaxed),
            None => self.misses.fetch_add(1, Ordering::Relaxed),
        };
        found
    }

    pub fn insert(&self, key: InvariantKey, entry: Arc<CachedGenfun>) {
        if self.enabled {
            self.map.write().expect("cache lock").insert(key, entry);
        }
    }

    pub fn keys(&self) -> Vec<InvariantKey> {
        let mut keys: Vec<_> = self
            .map
            .read()
            .expect("cache lock")
            .keys()
            .copied()
            .collect();
        keys.sort();
        keys
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.map.read().expect("cache lock").len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            rejected: self.rejected,
        }
    }

    /// Writes the table to its file, replacing the previous image atomically.
    /// A cache without a path is left alone.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !self.enabled {
            return Ok(());
        }
        let text = {
            let map = self.map.read().expect("cache lock");
            render_cache_file(&map)
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Removes a cache file; a missing file is not an error.
pub fn clear_cache_file(path: &Path) -> Result<bool> {
    match fs::remove_file(path) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
        Err(e) => Err(Error::from(e)),
    }
}

fn header() -> String {
    format!("ellchi-cache format={CACHE_FORMAT} engine={ENGINE_VERSION}")
}

fn checksum(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn record_body(key: InvariantKey, entry: &CachedGenfun) -> String {
    format!("{} {}\t{}\t{}", key.n, key.m, entry.value, entry.at_q0)
}

fn render_cache_file(map: &HashMap<InvariantKey, Arc<CachedGenfun>>) -> String {
    let mut keys: Vec<_> = map.keys().copied().collect();
    keys.sort();
    let mut out = header();
    out.push('\n');
    for key in keys {
        let body = record_body(key, &map[&key]);
        let sum = checksum(&body);
        out.push_str(&body);
        out.push('\t');
        out.push_str(&sum);
        out.push('\n');
    }
    out
}

fn parse_record(line: &str) -> Option<(InvariantKey, CachedGenfun)> {
    let (body, sum) = line.rsplit_once('\t')?;
    if checksum(body) != sum {
        return None;
    }
    let mut fields = body.split('\t');
    let (n, m) = fields.next()?.split_once(' ')?;
    let key = InvariantKey::new(n.parse().ok()?, m.parse().ok()?).ok()?;
    let arity = key.m + 1;
    let value = parse_rational_function(fields.next()?, arity).ok()?;
    let at_q0 = parse_rational_function(fields.next()?, arity).ok()?;
    if fields.next().is_some() || at_q0 != value.substitute_zero(0) {
        return None;
    }
    Some((key, CachedGenfun { value, at_q0 }))
}

/// Valid records and the number of rejected lines.
fn parse_cache_file(text: &str) -> (Vec<(InvariantKey, CachedGenfun)>, usize) {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header() => {}
        Some(_) => return (Vec::new(), text.lines().skip(1).count()),
        None => return (Vec::new(), 0),
    }
    let mut good = Vec::new();
    let mut bad = 0;
    for line in lines.filter(|l| !l.trim().is_empty()) {
        match parse_record(line) {
            Some(r) => good.push(r),
            None => bad += 1,
        }
    }
    (good, bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::one_point_mixed;

    fn entry() -> Arc<CachedGenfun> {
        let value = one_point_mixed();
        let at_q0 = value.substitute_zero(0);
        Arc::new(CachedGenfun { value, at_q0 })
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let key = InvariantKey::new(1, 1).unwrap();
        let cache = MemoCache::open(&path).unwrap();
        cache.insert(key, entry());
        cache.save().unwrap();

        let again = MemoCache::open(&path).unwrap();
        assert_eq!(again.get(key).as_deref(), Some(&*entry()));
        assert_eq!(again.stats().rejected, 0);

        let text = fs::read_to_string(&path).unwrap().replacen("q1", "q", 1);
        fs::write(&path, text).unwrap();
        let broken = MemoCache::open(&path).unwrap();
        assert!(broken.get(key).is_none());
        assert_eq!(broken.stats().rejected, 1);
    }

    #[test]
    fn foreign_header_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        fs::write(&path, "ellchi-cache format=0 engine=old\n1 1\tx\ty\tz\n").unwrap();
        let cache = MemoCache::open(&path).unwrap();
        assert_eq!(cache.stats().entries, 0);
        assert_eq!(cache.stats().rejected, 1);
    }

    #[test]
    fn disabled_cache_stores_nothing() {
        let cache = MemoCache::disabled();
        let key = InvariantKey::new(1, 1).unwrap();
        cache.insert(key, entry());
        assert!(cache.get(key).is_none());
        assert_eq!(cache.stats().entries, 0);
    }
}
