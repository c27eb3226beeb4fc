//! Persistent store of Schur-class pushforwards, plus a resumable log of
//! fixed-point sample values.
//!
//! One file per Grassmannian shape `(k, n)`. Each file starts with a magic
//! header and format version, followed by records `(partition, polynomial)`
//! where the polynomial is written in the abstract complete symmetric
//! functions `h_i` of the ambient bundle. Every record carries a checksum;
//! a damaged record ends parsing of that file and the missing entries are
//! simply recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::partition::Partition;

const MAGIC: &[u8; 8] = b"SPLPUSH\0";
const VERSION: u32 = 1;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "SPLITLOCI_CACHE";

/// A polynomial in the `h_i`: (sorted multiset of indices, coefficient).
pub type SegrePoly = Vec<(Vec<u16>, i64)>;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub loaded: u64,
    pub rejected_files: u64,
}

#[derive(Default)]
struct Shape {
    entries: FxHashMap<Partition, SegrePoly>,
    dirty: bool,
}

pub struct PushCache {
    dir: PathBuf,
    shapes: RwLock<FxHashMap<(u32, u32), Shape>>,
    writer: Mutex<()>,
    hits: AtomicU64,
    misses: AtomicU64,
    loaded: AtomicU64,
    rejected: AtomicU64,
}

fn checksum(bytes: &[u8]) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn encode_record(lambda: &Partition, poly: &SegrePoly) -> Vec<u8> {
    let mut body = Vec::new();
    put_u32(&mut body, lambda.len() as u32);
    for &p in lambda.parts() {
        put_u32(&mut body, p);
    }
    put_u32(&mut body, poly.len() as u32);
    for (idx, c) in poly {
        put_u32(&mut body, idx.len() as u32);
        for &i in idx {
            body.extend_from_slice(&i.to_le_bytes());
        }
        body.extend_from_slice(&c.to_le_bytes());
    }
    let mut rec = Vec::with_capacity(body.len() + 12);
    put_u32(&mut rec, body.len() as u32);
    rec.extend_from_slice(&body);
    rec.extend_from_slice(&checksum(&body).to_le_bytes());
    rec
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.buf.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }
    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }
    fn u16(&mut self) -> Option<u16> {
        Some(u16::from_le_bytes(self.take(2)?.try_into().ok()?))
    }
    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
}

fn decode_body(body: &[u8]) -> Option<(Partition, SegrePoly)> {
    let mut r = Reader { buf: body, pos: 0 };
    let len = r.u32()? as usize;
    let mut parts = Vec::with_capacity(len);
    for _ in 0..len {
        parts.push(r.u32()?);
    }
    let nterms = r.u32()? as usize;
    let mut poly = Vec::with_capacity(nterms);
    for _ in 0..nterms {
        let nf = r.u32()? as usize;
        let mut idx = Vec::with_capacity(nf);
        for _ in 0..nf {
            idx.push(r.u16()?);
        }
        poly.push((idx, r.u64()? as i64));
    }
    (r.pos == body.len()).then(|| (Partition::new(parts), poly))
}

/// Parses a cache file; returns the good records and whether damage was seen.
fn decode_file(bytes: &[u8]) -> (Vec<(Partition, SegrePoly)>, bool) {
    if bytes.len() < 12 || &bytes[..8] != MAGIC || u32::from_le_bytes(bytes[8..12].try_into().unwrap()) != VERSION {
        return (Vec::new(), true);
    }
    let mut r = Reader { buf: bytes, pos: 12 };
    let mut out = Vec::new();
    while r.pos < bytes.len() {
        let Some(len) = r.u32() else { return (out, true) };
        let Some(body) = r.take(len as usize) else { return (out, true) };
        let Some(sum) = r.u64() else { return (out, true) };
        if checksum(body) != sum {
            return (out, true);
        }
        match decode_body(body) {
            Some(rec) => out.push(rec),
            None => return (out, true),
        }
    }
    (out, false)
}

impl PushCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<PushCache> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(PushCache {
            dir: dir.as_ref().to_path_buf(),
            shapes: RwLock::new(FxHashMap::default()),
            writer: Mutex::new(()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            loaded: AtomicU64::new(0),
            rejected: AtomicU64::new(0),
        })
    }

    /// Opens the directory named by `SPLITLOCI_CACHE`, if set.
    pub fn from_env() -> Result<Option<PushCache>> {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Ok(Some(Self::open(d)?)),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file(&self, k: u32, n: u32) -> PathBuf {
        self.dir.join(format!("push_k{k}_n{n}.bin"))
    }

    fn ensure_loaded(&self, k: u32, n: u32) {
        if self.shapes.read().unwrap().contains_key(&(k, n)) {
            return;
        }
        let mut shape = Shape::default();
        if let Ok(bytes) = fs::read(self.file(k, n)) {
            let (recs, damaged) = decode_file(&bytes);
            if damaged {
                self.rejected.fetch_add(1, Ordering::Relaxed);
                shape.dirty = true;
            }
            self.loaded.fetch_add(recs.len() as u64, Ordering::Relaxed);
            shape.entries.extend(recs);
        }
        self.shapes.write().unwrap().entry((k, n)).or_insert(shape);
    }

    pub fn get(&self, k: u32, n: u32, lambda: &Partition) -> Option<SegrePoly> {
        self.ensure_loaded(k, n);
        let got = self.shapes.read().unwrap().get(&(k, n)).and_then(|s| s.entries.get(lambda).cloned());
        match got {
            Some(p) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(p)
            }
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn insert(&self, k: u32, n: u32, lambda: Partition, poly: SegrePoly) {
        self.ensure_loaded(k, n);
        let mut shapes = self.shapes.write().unwrap();
        let shape = shapes.entry((k, n)).or_default();
        if let std::collections::hash_map::Entry::Vacant(e) = shape.entries.entry(lambda) {
            e.insert(poly);
            shape.dirty = true;
        }
    }

    /// Writes every modified shape file atomically (temp file, then rename).
    pub fn flush(&self) -> Result<()> {
        let _guard = self.writer.lock().unwrap();
        let mut shapes = self.shapes.write().unwrap();
        for (&(k, n), shape) in shapes.iter_mut() {
            if !shape.dirty {
                continue;
            }
            let mut keys: Vec<&Partition> = shape.entries.keys().collect();
            keys.sort();
            let mut bytes = Vec::new();
            bytes.extend_from_slice(MAGIC);
            put_u32(&mut bytes, VERSION);
            for key in keys {
                bytes.extend_from_slice(&encode_record(key, &shape.entries[key]));
            }
            let path = self.file(k, n);
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &path)?;
            shape.dirty = false;
        }
        Ok(())
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            loaded: self.loaded.load(Ordering::Relaxed),
            rejected_files: self.rejected.load(Ordering::Relaxed),
        }
    }
}

impl Drop for PushCache {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

/// Append-only log of evaluated sample points, so an interrupted
/// fixed-point computation resumes where it stopped. One line per point:
/// `prime index attempt value checksum`; malformed lines are ignored.
pub struct PointLog {
    path: PathBuf,
    entries: Mutex<FxHashMap<(u64, u64), (u32, u64)>>,
}

fn line_sum(p: u64, idx: u64, attempt: u32, val: u64) -> u64 {
    checksum(format!("{p} {idx} {attempt} {val}").as_bytes())
}

impl PointLog {
    pub fn open(dir: impl AsRef<Path>, key: &str) -> Result<PointLog> {
        fs::create_dir_all(dir.as_ref())?;
        let path = dir.as_ref().join(format!("points_{key}.log"));
        let mut entries = FxHashMap::default();
        if let Ok(text) = fs::read_to_string(&path) {
            for line in text.lines() {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 5 {
                    continue;
                }
                let (Ok(p), Ok(idx), Ok(att), Ok(val), Ok(sum)) =
                    (f[0].parse(), f[1].parse(), f[2].parse(), f[3].parse(), f[4].parse::<u64>())
                else {
                    continue;
                };
                if line_sum(p, idx, att, val) == sum {
                    entries.insert((p, idx), (att, val));
                }
            }
        }
        Ok(PointLog { path, entries: Mutex::new(entries) })
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(attempt, value)` recorded for a point.
    pub fn get(&self, p: u64, idx: u64) -> Option<(u32, u64)> {
        self.entries.lock().unwrap().get(&(p, idx)).copied()
    }

    pub fn record(&self, p: u64, idx: u64, attempt: u32, val: u64) -> Result<()> {
        let mut entries = self.entries.lock().unwrap();
        if entries.insert((p, idx), (attempt, val)).is_some() {
            return Ok(());
        }
        let mut f = fs::OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{p} {idx} {attempt} {val} {}", line_sum(p, idx, attempt, val))?;
        Ok(())
    }
}
