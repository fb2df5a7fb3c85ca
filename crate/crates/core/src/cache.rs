//! Versioned text serialization of the coefficient tables.
//!
//! A cache file is a short header followed by one line per coefficient,
//! `NAME LEVEL ELEMENT`, in a fixed order. The header records the sha256
//! of the body, so a tampered or truncated file is rejected on load.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pbw::{Algebra, RttSpec};
use crate::series::ElementSeries;
use crate::twisted::{DrinfeldTable, STable, Tables, INDICES};

pub const CACHE_VERSION: u32 = 1;
const MAGIC: &str = "ty3-tables";

/// `TY3_CACHE_DIR` if set, else `.ty3-cache` under the working directory.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os("TY3_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".ty3-cache"))
}

pub fn cache_path(dir: &Path, order: usize) -> PathBuf {
    dir.join(format!("tables-v{CACHE_VERSION}-n{order}.txt"))
}

fn named(tables: &Tables) -> Vec<(String, &Arc<ElementSeries>)> {
    let mut v = Vec::new();
    for i in INDICES {
        for j in INDICES {
            v.push((format!("S[{i},{j}]"), tables.s().series(i, j)));
        }
    }
    v.extend(tables.drinfeld().named_series());
    v
}

/// Canonical text of every table entry; equal tables give equal bytes.
pub fn canonical_body(tables: &Tables) -> String {
    let alg = tables.algebra();
    let mut out = String::new();
    for (name, series) in named(tables) {
        for (r, c) in series.coeffs().iter().enumerate() {
            out.push_str(&format!("{name} {r} {}\n", alg.format(c)));
        }
    }
    out
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// Content hash of the tables, as cited in reports.
pub fn table_hash(tables: &Tables) -> String {
    sha256_hex(&canonical_body(tables))
}

pub fn serialize(tables: &Tables) -> String {
    let body = canonical_body(tables);
    format!(
        "{MAGIC} v{CACHE_VERSION}\norder {}\nsha256 {}\n---\n{body}",
        tables.order(),
        sha256_hex(&body)
    )
}

fn header_field<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    line.and_then(|l| l.strip_prefix(key))
        .map(str::trim)
        .ok_or_else(|| Error::Cache(format!("missing `{key}` header")))
}

pub fn deserialize(text: &str) -> Result<Tables> {
    let (head, body) = text
        .split_once("---\n")
        .ok_or_else(|| Error::Cache("missing header separator".into()))?;
    let mut lines = head.lines();
    let version = header_field(lines.next(), MAGIC)?;
    if version != format!("v{CACHE_VERSION}") {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let order: usize = header_field(lines.next(), "order")?
        .parse()
        .map_err(|_| Error::Cache("bad order".into()))?;
    let stored = header_field(lines.next(), "sha256")?;
    let computed = sha256_hex(body);
    if stored != computed {
        return Err(Error::HashMismatch {
            stored: stored.into(),
            computed,
        });
    }
    let alg = Arc::new(Algebra::new(RttSpec::new(3)));
    let mut entries: std::collections::HashMap<&str, Vec<crate::pbw::Element>> =
        std::collections::HashMap::new();
    for line in body.lines() {
        let mut parts = line.splitn(3, ' ');
        let (Some(name), Some(r), Some(e)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Cache(format!("malformed line `{line}`")));
        };
        let v = entries.entry(name).or_default();
        if r.parse::<usize>().ok() != Some(v.len()) {
            return Err(Error::Cache(format!("out-of-order level in `{name}`")));
        }
        v.push(alg.parse(e)?);
    }
    let mut take = |name: &str| -> Result<ElementSeries> {
        let c = entries
            .remove(name)
            .ok_or_else(|| Error::Cache(format!("missing series {name}")))?;
        if c.len() != order + 1 {
            return Err(Error::Cache(format!("series {name} has the wrong length")));
        }
        Ok(ElementSeries::new(c))
    };
    let mut s = Vec::new();
    for i in INDICES {
        for j in INDICES {
            s.push(take(&format!("S[{i},{j}]"))?);
        }
    }
    let s = STable::from_series(s)?;
    let dr = DrinfeldTable::from_named(&mut take)?;
    Tables::from_parts(alg, s, dr)
}

/// Writes the tables to `dir` and returns the file path.
pub fn save(tables: &Tables, dir: &Path) -> Result<PathBuf> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = cache_path(dir, tables.order());
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serialize(tables)).map_err(io(&tmp))?;
    fs::rename(&tmp, &path).map_err(io(&path))?;
    Ok(path)
}

/// The smallest cached order `>= order` in `dir`, if any.
fn best_cached(dir: &Path, order: usize) -> Option<(usize, PathBuf)> {
    let prefix = format!("tables-v{CACHE_VERSION}-n");
    fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            let n: usize = name
                .strip_prefix(&prefix)?
                .strip_suffix(".txt")?
                .parse()
                .ok()?;
            (n >= order).then(|| (n, e.path()))
        })
        .min_by_key(|(n, _)| *n)
}

/// Loads tables of at least the requested order, truncated to it.
/// `Ok(None)` when nothing suitable is cached.
pub fn load(dir: &Path, order: usize) -> Result<Option<Tables>> {
    let Some((n, path)) = best_cached(dir, order) else {
        return Ok(None);
    };
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let t = deserialize(&text)?;
    Ok(Some(if n > order { t.truncate(order)? } else { t }))
}

/// Where the tables of a run came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Loaded,
    Built,
    /// Built after the cache was rejected, with the reason.
    Rebuilt(String),
}

/// Loads from the cache, or builds and stores the tables. A corrupt cache
/// is replaced, never trusted.
pub fn load_or_build(dir: &Path, order: usize) -> Result<(Tables, Provenance)> {
    let provenance = match load(dir, order) {
        Ok(Some(t)) => return Ok((t, Provenance::Loaded)),
        Ok(None) => Provenance::Built,
        Err(e) => Provenance::Rebuilt(e.to_string()),
    };
    let t = Tables::build(order)?;
    save(&t, dir)?;
    Ok((t, provenance))
}
