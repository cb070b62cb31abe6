//! Expansion-parameter resolution and the on-disk parameter cache.
//!
//! Commands that expand need an admissible `(B, eps^2)`. Resolution order:
//! explicit `--set`/`--eps-sq` flags, then the cache, then a fresh minimal
//! search whose result is written back to the cache.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use iqcf_core::covering::{
    check_admissible, find_minimal_admissible_set, AdmissibleParams, CandidateRule,
};
use iqcf_core::numerics::{parse_rational, Rational};
use iqcf_core::ring::{Ring, RingElement};

use crate::emit::rational_string;
use crate::CmdError;

#[derive(Serialize, Deserialize)]
struct CachedElement {
    x: i64,
    y: i64,
}

#[derive(Serialize, Deserialize)]
struct CachedParams {
    b_set: Vec<CachedElement>,
    eps_sq: String,
}

type CacheMap = BTreeMap<String, CachedParams>;

fn load_cache(path: &str) -> CacheMap {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text).unwrap_or_default(),
        Err(_) => CacheMap::new(),
    }
}

fn store_cache(path: &str, cache: &CacheMap) {
    // Cache writes are best effort; a read-only location only costs time.
    if let Ok(text) = serde_json::to_string_pretty(cache) {
        let _ = std::fs::write(path, text + "\n");
    }
}

fn cached_lookup(path: &str, ring: Ring) -> Option<AdmissibleParams> {
    let cache = load_cache(path);
    let entry = cache.get(&ring.discriminant().to_string())?;
    let eps_sq = parse_rational(&entry.eps_sq).ok()?;
    if entry.b_set.is_empty() {
        return None;
    }
    let b_set: Vec<RingElement> = entry
        .b_set
        .iter()
        .map(|e| ring.element(e.x, e.y))
        .collect();
    Some(AdmissibleParams::new(b_set, eps_sq))
}

fn cache_insert(path: &str, ring: Ring, params: &AdmissibleParams) {
    let mut cache = load_cache(path);
    let entry = CachedParams {
        b_set: params
            .b_set()
            .iter()
            .map(|b| CachedElement {
                x: b.x().try_into().unwrap_or(0),
                y: b.y().try_into().unwrap_or(0),
            })
            .collect(),
        eps_sq: rational_string(params.eps_sq()),
    };
    cache.insert(ring.discriminant().to_string(), entry);
    store_cache(path, &cache);
}

/// Store a freshly computed minimal set in the cache.
pub fn remember(cache_path: &str, ring: Ring, params: &AdmissibleParams) {
    cache_insert(cache_path, ring, params);
}

/// Resolve expansion parameters from flags, cache, or a fresh search.
pub fn resolve(
    cache_path: &str,
    ring: Ring,
    set: Option<&[RingElement]>,
    eps_sq: Option<&Rational>,
) -> Result<AdmissibleParams, CmdError> {
    match (set, eps_sq) {
        (Some(bs), Some(e)) => Ok(AdmissibleParams::new(bs.to_vec(), e.clone())),
        (Some(bs), None) => {
            let report = check_admissible(ring, bs)?;
            if !report.admissible() {
                return Err(CmdError::Validation(format!(
                    "set is not admissible for discriminant {} (eps^2 enclosure [{}, {}])",
                    ring.discriminant(),
                    report.eps_sq_lo(),
                    report.eps_sq_hi(),
                )));
            }
            Ok(AdmissibleParams::new(
                bs.to_vec(),
                report.eps_sq_hi().clone(),
            ))
        }
        (None, eps_override) => {
            let params = match cached_lookup(cache_path, ring) {
                Some(p) => p,
                None => {
                    let p = find_minimal_admissible_set(ring, &CandidateRule::default())?;
                    cache_insert(cache_path, ring, &p);
                    p
                }
            };
            match eps_override {
                Some(e) => Ok(AdmissibleParams::new(params.b_set().to_vec(), e.clone())),
                None => Ok(params),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use iqcf_core::numerics::ratio;

    #[test]
    fn cache_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let path = path.to_str().unwrap();
        let ring = Ring::from_discriminant(-23).unwrap();
        let params =
            AdmissibleParams::new(vec![ring.from_int(1), ring.from_int(2)], ratio(8, 9));
        remember(path, ring, &params);
        let back = cached_lookup(path, ring).unwrap();
        assert_eq!(back.b_set(), params.b_set());
        assert_eq!(back.eps_sq(), params.eps_sq());
        // A second ring gets its own slot without clobbering the first.
        let ring11 = Ring::from_discriminant(-11).unwrap();
        remember(path, ring11, &AdmissibleParams::new(vec![ring11.from_int(1)], ratio(9, 11)));
        assert!(cached_lookup(path, ring).is_some());
        assert!(cached_lookup(path, ring11).is_some());
    }

    #[test]
    fn resolve_uses_flags_before_cache() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let path = path.to_str().unwrap();
        let ring = Ring::from_discriminant(-23).unwrap();
        let set = vec![ring.from_int(1), ring.from_int(2)];
        let eps = ratio(8, 9);
        let p = resolve(path, ring, Some(&set), Some(&eps)).unwrap();
        assert_eq!(p.eps_sq(), &eps);
        // Nothing was cached by the explicit path.
        assert!(cached_lookup(path, ring).is_none());
    }
}
