//! On-disk JSON cache for eigenvalue scans.
//!
//! A cache file is keyed by level, class, scan window, and a stable hash
//! of the configuration, so a stale file can never be returned for a
//! different run. The directory is supplied by the caller (typically
//! from the `ORBISPEC_CACHE_DIR` environment variable).

use super::{scan, Eigenvalue, HejhalConfig, HejhalError};
use crate::groups::{OrbifoldGroup, SymmetryCharacter};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumCache {
    pub level: u64,
    pub class: String,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub config_key: String,
    pub eigenvalues: Vec<Eigenvalue>,
}

/// Stable FNV-1a hash of the serialized configuration; independent of
/// the process and the standard library's hasher seed.
pub fn config_key(cfg: &HejhalConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// File name for a scan, unique per (level, class, window, config).
pub fn cache_path(
    dir: &Path,
    level: u64,
    class: SymmetryCharacter,
    lambda_lo: f64,
    lambda_hi: f64,
    key: &str,
) -> PathBuf {
    let cls = class.label().trim_matches(|c| c == '(' || c == ')');
    let cls = cls.replace('+', "p").replace('-', "m");
    dir.join(format!(
        "spectrum-{level}-{cls}-{lambda_lo:.6}-{lambda_hi:.6}-{key}.json"
    ))
}

/// Loads a cache file if it exists and matches every key field.
pub fn load(
    path: &Path,
    level: u64,
    class: SymmetryCharacter,
    lambda_lo: f64,
    lambda_hi: f64,
    key: &str,
) -> Option<SpectrumCache> {
    let text = std::fs::read_to_string(path).ok()?;
    let cache: SpectrumCache = serde_json::from_str(&text).ok()?;
    let matches = cache.level == level
        && cache.class == class.label()
        && cache.lambda_lo == lambda_lo
        && cache.lambda_hi == lambda_hi
        && cache.config_key == key;
    matches.then_some(cache)
}

pub fn store(path: &Path, cache: &SpectrumCache) -> Result<(), HejhalError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HejhalError::Cache(e.to_string()))?;
    }
    let text =
        serde_json::to_string_pretty(cache).map_err(|e| HejhalError::Cache(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| HejhalError::Cache(e.to_string()))
}

/// Like [`scan`], but consults (and fills) the cache directory when one
/// is given.
pub fn scan_cached(
    group: &OrbifoldGroup,
    class: SymmetryCharacter,
    lambda_lo: f64,
    lambda_hi: f64,
    cfg: &HejhalConfig,
    cache_dir: Option<&Path>,
) -> Result<Vec<Eigenvalue>, HejhalError> {
    let key = config_key(cfg);
    let path = cache_dir
        .map(|d| cache_path(d, group.level, class, lambda_lo, lambda_hi, &key));
    if let Some(p) = &path {
        if let Some(cache) = load(p, group.level, class, lambda_lo, lambda_hi, &key) {
            return Ok(cache.eigenvalues);
        }
    }
    let eigenvalues = scan(group, class, lambda_lo, lambda_hi, cfg)?;
    if let Some(p) = &path {
        store(
            p,
            &SpectrumCache {
                level: group.level,
                class: class.label().to_string(),
                lambda_lo,
                lambda_hi,
                config_key: key,
                eigenvalues: eigenvalues.clone(),
            },
        )?;
    }
    Ok(eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specbessel::SpectralParam;

    #[test]
    fn config_key_is_stable_and_sensitive() {
        let a = HejhalConfig::default();
        let mut b = a.clone();
        assert_eq!(config_key(&a), config_key(&b));
        b.eps = 1e-9;
        assert_ne!(config_key(&a), config_key(&b));
    }

    #[test]
    fn cache_round_trip_and_key_mismatch() {
        let dir = std::env::temp_dir().join("orbispec-cache-test");
        let class = SymmetryCharacter::parse("+-").unwrap();
        let key = config_key(&HejhalConfig::default());
        let path = cache_path(&dir, 11, class, 0.0, 1.0, &key);
        let cache = SpectrumCache {
            level: 11,
            class: class.label().to_string(),
            lambda_lo: 0.0,
            lambda_hi: 1.0,
            config_key: key.clone(),
            eigenvalues: vec![Eigenvalue {
                lambda: 0.2445,
                param: SpectralParam::Imaginary(0.0737),
                coefficients: vec![0.0, 1.0],
                mismatch: 1e-8,
                renormalized: false,
            }],
        };
        store(&path, &cache).unwrap();
        let back = load(&path, 11, class, 0.0, 1.0, &key).unwrap();
        assert_eq!(back.eigenvalues.len(), 1);
        assert_eq!(back.eigenvalues[0].lambda, 0.2445);
        // wrong window must miss
        assert!(load(&path, 11, class, 0.0, 2.0, &key).is_none());
        std::fs::remove_file(&path).ok();
    }
}
