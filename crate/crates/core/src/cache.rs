//! On-disk cache of graded pieces `I_d` and twisted-field bases.
//!
//! One JSON file per entry, keyed by `(s, l, degree, characteristic)`. Files are
//! written to a temporary name and renamed into place. The cache is advisory:
//! every entry is rebuilt through the same validating constructors as a fresh
//! computation, and an entry that fails to parse or validate is recomputed and
//! overwritten.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::forms::{theta_sections, TwistedFields};
use crate::grassmannian::{CoordRing, GradedPiece};
use crate::linalg::{SparseRow, Subspace};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "PJRING_CACHE_DIR";

/// Bumped whenever the file layout or the meaning of stored rows changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    kind: String,
    s: usize,
    l: usize,
    degree: i64,
    characteristic: u64,
    ambient: usize,
    rows: Vec<Vec<(usize, String)>>,
}

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    hits: AtomicUsize,
    misses: AtomicUsize,
    rejected: AtomicUsize,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into(), hits: AtomicUsize::new(0), misses: AtomicUsize::new(0), rejected: AtomicUsize::new(0) }
    }

    /// `explicit`, else the directory named by [`CACHE_DIR_ENV`], else none.
    pub fn resolve(explicit: Option<PathBuf>) -> Option<Self> {
        explicit
            .or_else(|| std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// `(hits, misses, rejected)`; a rejected entry also counts as a miss.
    pub fn stats(&self) -> (usize, usize, usize) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed), self.rejected.load(Ordering::Relaxed))
    }

    fn path(&self, kind: &str, s: usize, l: usize, degree: i64, ch: u64) -> PathBuf {
        self.dir.join(format!("{kind}_s{s}_l{l}_d{degree}_p{ch}.json"))
    }

    /// `S_d` of `ring`, from the cache when a valid entry exists.
    pub fn graded_piece<F: Field>(&self, ring: &CoordRing<F>, d: u32) -> Result<Arc<GradedPiece<F>>> {
        let ctx = ring.ctx();
        let path = self.path("piece", ctx.s(), ctx.l(), d as i64, ring.field().characteristic());
        if let Some(space) = self.load(&path, ring, "piece", d as i64) {
            match ring.insert_piece(space, d) {
                Ok(p) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(p);
                }
                Err(_) => {
                    self.rejected.fetch_add(1, Ordering::Relaxed);
                }
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let piece = ring.piece(d)?;
        self.store(&path, ring, "piece", d as i64, piece.ideal())?;
        Ok(piece)
    }

    /// Twisted fields of twist `e`, from the cache when a valid entry exists.
    pub fn theta<F: Field>(&self, ring: &CoordRing<F>, e: i32) -> Result<TwistedFields<F>> {
        let ctx = ring.ctx();
        let path = self.path("fields", ctx.s(), ctx.l(), e as i64, ring.field().characteristic());
        if let Some(space) = self.load(&path, ring, "fields", e as i64) {
            match TwistedFields::from_space(ring, e, space) {
                Ok(t) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(t);
                }
                Err(_) => {
                    self.rejected.fetch_add(1, Ordering::Relaxed);
                }
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let t = theta_sections(ring, e)?;
        self.store(&path, ring, "fields", e as i64, t.space())?;
        Ok(t)
    }

    fn load<F: Field>(&self, path: &Path, ring: &CoordRing<F>, kind: &str, degree: i64) -> Option<Subspace<F>> {
        let text = fs::read_to_string(path).ok()?;
        let parsed = serde_json::from_str::<Entry>(&text).ok().and_then(|e| {
            let ctx = ring.ctx();
            let f = ring.field();
            let matches = e.version == CACHE_VERSION
                && e.kind == kind
                && (e.s, e.l, e.degree, e.characteristic) == (ctx.s(), ctx.l(), degree, f.characteristic());
            if !matches {
                return None;
            }
            let rows = e
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|(c, x)| if *c < e.ambient { Ok((*c, f.decode(x)?)) } else { Err(Error::Cache("column out of range".into())) })
                        .collect::<Result<SparseRow<F::Elem>>>()
                })
                .collect::<Result<Vec<_>>>()
                .ok()?;
            Some(Subspace::span(f.clone(), e.ambient, rows))
        });
        if parsed.is_none() {
            self.rejected.fetch_add(1, Ordering::Relaxed);
        }
        parsed
    }

    fn store<F: Field>(&self, path: &Path, ring: &CoordRing<F>, kind: &str, degree: i64, space: &Subspace<F>) -> Result<()> {
        let ctx = ring.ctx();
        let f = ring.field();
        let entry = Entry {
            version: CACHE_VERSION,
            kind: kind.to_string(),
            s: ctx.s(),
            l: ctx.l(),
            degree,
            characteristic: f.characteristic(),
            ambient: space.ambient(),
            rows: space.basis().iter().map(|r| r.iter().map(|(c, x)| (*c, f.encode(x))).collect()).collect(),
        };
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmannian::GrassCtx;
    use crate::{PrimeField, Rationals};

    fn tempdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("pjring-cache-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn round_trip_and_reuse() {
        let dir = tempdir("rt");
        let ctx = GrassCtx::new(2, 3).unwrap();
        let cache = Cache::new(&dir);
        let ring = CoordRing::new(ctx.clone(), PrimeField::new(268_435_399).unwrap()).unwrap();
        let built = cache.graded_piece(&ring, 5).unwrap();
        let t0 = cache.theta(&ring, 0).unwrap();
        assert_eq!(cache.stats(), (0, 2, 0));

        let fresh = CoordRing::new(ctx.clone(), PrimeField::new(268_435_399).unwrap()).unwrap();
        let loaded = cache.graded_piece(&fresh, 5).unwrap();
        assert!(loaded.ideal().same_as(built.ideal()));
        assert!(cache.theta(&fresh, 0).unwrap().space().same_as(t0.space()));
        assert_eq!(cache.stats(), (2, 2, 0));

        // rationals are keyed separately
        let q = CoordRing::new(ctx, Rationals).unwrap();
        assert_eq!(cache.graded_piece(&q, 5).unwrap().dim(), 196);
        assert_eq!(cache.stats().1, 3);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corrupt_or_invalid_entries_are_recomputed() {
        let dir = tempdir("bad");
        let ctx = GrassCtx::new(2, 3).unwrap();
        let cache = Cache::new(&dir);
        let ring = CoordRing::new(ctx.clone(), PrimeField::new(268_435_399).unwrap()).unwrap();
        cache.graded_piece(&ring, 3).unwrap();
        let path = cache.path("piece", 2, 3, 3, 268_435_399);

        // drop a basis row: the weyl_dim check rejects it
        let mut entry: Entry = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        entry.rows.pop();
        fs::write(&path, serde_json::to_vec(&entry).unwrap()).unwrap();
        let fresh = CoordRing::new(ctx.clone(), PrimeField::new(268_435_399).unwrap()).unwrap();
        assert_eq!(cache.graded_piece(&fresh, 3).unwrap().dim(), 50);
        assert_eq!(cache.stats().2, 1);

        fs::write(&path, b"{not json").unwrap();
        let fresh = CoordRing::new(ctx, PrimeField::new(268_435_399).unwrap()).unwrap();
        assert_eq!(cache.graded_piece(&fresh, 3).unwrap().dim(), 50);
        assert_eq!(cache.stats().2, 2);
        // overwritten with a valid entry
        let entry: Entry = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(entry.version, CACHE_VERSION);
        fs::remove_dir_all(&dir).unwrap();
    }
}
