//! Class-number disk cache: plain text, one "D h" pair per line, sorted by
//! |D|. Loaded fully at startup, rewritten atomically (temp file + rename)
//! on clean exit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cmtorsion::quadorders::{class_number_cache_snapshot, preload_class_numbers};

pub const CACHE_ENV: &str = "CMTORSION_CACHE";

/// Effective cache path: the --cache flag, else $CMTORSION_CACHE.
pub fn resolve(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
}

/// Seed the in-process memo table from the file, if it exists. Malformed
/// lines are skipped.
pub fn load(path: &Path) {
    let Ok(text) = fs::read_to_string(path) else {
        return;
    };
    let entries = text.lines().filter_map(|line| {
        let mut it = line.split_whitespace();
        let d: i64 = it.next()?.parse().ok()?;
        let h: u64 = it.next()?.parse().ok()?;
        Some((d, h))
    });
    preload_class_numbers(entries);
}

/// Persist every known class number, sorted by |D|, via temp-then-rename.
pub fn save(path: &Path) -> std::io::Result<()> {
    let snapshot = class_number_cache_snapshot();
    let mut text = String::with_capacity(snapshot.len() * 12);
    for (d, h) in snapshot {
        text.push_str(&format!("{d} {h}\n"));
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
