//! Optional on-disk cache of reduced-word enumerations, enabled by setting
//! `CRYSTALKIT_CACHE_DIR`.

use std::fs;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, WeylWord};

pub const CACHE_ENV: &str = "CRYSTALKIT_CACHE_DIR";

fn cache_file(rs: &RootSystem) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let safe: String =
        rs.label().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    Some(PathBuf::from(dir).join(format!("words-{safe}.txt")))
}

fn header(rs: &RootSystem) -> String {
    format!("{:?} {}", rs.cartan().matrix(), rs.reference_word())
}

fn encode(w: &WeylWord) -> String {
    w.letters().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

/// Cached words for `rs`, or `None` when caching is off or no file exists.
pub(crate) fn load_words(rs: &RootSystem) -> Result<Option<Vec<WeylWord>>> {
    let Some(path) = cache_file(rs) else { return Ok(None) };
    let Ok(text) = fs::read_to_string(&path) else { return Ok(None) };
    let mut lines = text.lines();
    if lines.next() != Some(header(rs).as_str()) {
        return Ok(None);
    }
    let mut words = Vec::new();
    for line in lines {
        let w: WeylWord = line
            .parse()
            .map_err(|_| Error::Cache(format!("{}: bad line `{line}`", path.display())))?;
        if rs.check_longest(&w).is_err() {
            return Err(Error::Cache(format!("{}: {w} is not a word of w0", path.display())));
        }
        words.push(w);
    }
    Ok(Some(words))
}

pub(crate) fn store_words(rs: &RootSystem, words: &[WeylWord]) -> Result<()> {
    let Some(path) = cache_file(rs) else { return Ok(()) };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
    }
    let mut text = header(rs);
    for w in words {
        text.push('\n');
        text.push_str(&encode(w));
    }
    fs::write(&path, text).map_err(|e| Error::Cache(e.to_string()))
}
