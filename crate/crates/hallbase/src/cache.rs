//! Versioned JSON result cache.
//!
//! Expensive artifacts (transition matrices, verification reports) are keyed
//! by a schema version, a module name, and the exact configuration that
//! produced them.  The default cache lives in memory; pointing it at a
//! directory (the `--cache-dir` flag or the `HALLBASE_CACHE` variable)
//! persists one JSON file per entry.  Entries store their configuration
//! verbatim, so a filename hash collision is detected by comparison and
//! never trusted; stale or corrupt files are silently recomputed.

use crate::error::{HallError, Result};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::{env, fs, process};

/// Bump to orphan every existing cache file after a format change.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Cache {
    dir: Option<PathBuf>,
    mem: Mutex<HashMap<String, Value>>,
}

/// 64-bit FNV-1a; stable across platforms and releases, unlike the
/// standard library hasher.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl Cache {
    pub fn memory() -> Self {
        Cache { dir: None, mem: Mutex::new(HashMap::new()) }
    }

    pub fn disk(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: Some(dir.to_path_buf()), mem: Mutex::new(HashMap::new()) })
    }

    /// Cache for the CLI: an explicit directory wins, then `HALLBASE_CACHE`,
    /// then memory only.
    pub fn resolve(flag: Option<&Path>) -> Result<Self> {
        Cache::resolve_from(flag, env::var_os("HALLBASE_CACHE"))
    }

    fn resolve_from(flag: Option<&Path>, env_dir: Option<OsString>) -> Result<Self> {
        match flag.map(Path::to_path_buf).or(env_dir.map(PathBuf::from)) {
            Some(dir) => Cache::disk(&dir),
            None => Ok(Cache::memory()),
        }
    }

    pub fn is_persistent(&self) -> bool {
        self.dir.is_some()
    }

    /// Serialized objects sort map keys, so equal configurations print
    /// equally and the filename is stable across runs.
    fn key(module: &str, config: &Value) -> String {
        let payload = format!("{SCHEMA_VERSION}:{module}:{config}");
        format!("{module}-{:016x}", fnv1a(payload.as_bytes()))
    }

    /// Look the entry up in memory, then on disk, and only then compute it.
    /// A computed value is persisted before it is returned.
    pub fn get_or_compute(
        &self,
        module: &str,
        config: &Value,
        f: impl FnOnce() -> Result<Value>,
    ) -> Result<Value> {
        let key = Cache::key(module, config);
        if let Some(v) = self.mem.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        if let Some(v) = self.read_file(&key, module, config) {
            self.mem.lock().unwrap().insert(key, v.clone());
            return Ok(v);
        }
        let value = f()?;
        self.write_file(&key, module, config, &value)?;
        self.mem.lock().unwrap().insert(key, value.clone());
        Ok(value)
    }

    fn read_file(&self, key: &str, module: &str, config: &Value) -> Option<Value> {
        let path = self.dir.as_ref()?.join(format!("{key}.json"));
        let doc: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
        let fresh = doc.get("schema")? == &json!(SCHEMA_VERSION)
            && doc.get("module")? == &json!(module)
            && doc.get("config")? == config;
        if fresh {
            doc.get("value").cloned()
        } else {
            None
        }
    }

    /// Write through a temporary file so a concurrent reader never sees a
    /// half-written entry.
    fn write_file(&self, key: &str, module: &str, config: &Value, value: &Value) -> Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let doc = json!({
            "schema": SCHEMA_VERSION,
            "module": module,
            "config": config,
            "value": value,
        });
        let text = serde_json::to_string(&doc)
            .map_err(|e| HallError::Json(format!("serializing cache entry: {e}")))?;
        let tmp = dir.join(format!(".{key}.{}.tmp", process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, dir.join(format!("{key}.json")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    fn counted<'a>(calls: &'a Cell<u32>, value: i64) -> impl FnOnce() -> Result<Value> + 'a {
        move || {
            calls.set(calls.get() + 1);
            Ok(json!(value))
        }
    }

    #[test]
    fn memory_cache_computes_each_configuration_once() {
        let cache = Cache::memory();
        let calls = Cell::new(0);
        let a = json!({ "dim": [1, 1] });
        let b = json!({ "dim": [2, 1] });
        assert_eq!(cache.get_or_compute("block", &a, counted(&calls, 7)).unwrap(), json!(7));
        assert_eq!(cache.get_or_compute("block", &a, counted(&calls, 8)).unwrap(), json!(7));
        assert_eq!(cache.get_or_compute("block", &b, counted(&calls, 9)).unwrap(), json!(9));
        assert_eq!(calls.get(), 2);
    }

    #[test]
    fn disk_cache_survives_a_new_instance() {
        let dir = tempfile::tempdir().unwrap();
        let config = json!({ "dim": [3, 2] });
        let calls = Cell::new(0);
        {
            let cache = Cache::disk(dir.path()).unwrap();
            cache.get_or_compute("block", &config, counted(&calls, 42)).unwrap();
        }
        let cache = Cache::disk(dir.path()).unwrap();
        let v = cache.get_or_compute("block", &config, counted(&calls, 0)).unwrap();
        assert_eq!(v, json!(42));
        assert_eq!(calls.get(), 1);
    }

    #[test]
    fn stale_and_corrupt_entries_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let config = json!({ "n": 4 });
        let key = Cache::key("gram", &config);
        let path = dir.path().join(format!("{key}.json"));

        // wrong schema version
        fs::write(
            &path,
            serde_json::to_string(&json!({
                "schema": SCHEMA_VERSION + 1,
                "module": "gram",
                "config": config,
                "value": 1,
            }))
            .unwrap(),
        )
        .unwrap();
        let calls = Cell::new(0);
        let cache = Cache::disk(dir.path()).unwrap();
        assert_eq!(cache.get_or_compute("gram", &config, counted(&calls, 5)).unwrap(), json!(5));
        assert_eq!(calls.get(), 1);

        // a filename collision with a different configuration
        fs::write(
            &path,
            serde_json::to_string(&json!({
                "schema": SCHEMA_VERSION,
                "module": "gram",
                "config": { "n": 999 },
                "value": 1,
            }))
            .unwrap(),
        )
        .unwrap();
        let cache = Cache::disk(dir.path()).unwrap();
        assert_eq!(cache.get_or_compute("gram", &config, counted(&calls, 6)).unwrap(), json!(6));

        // not JSON at all
        fs::write(&path, "{{{").unwrap();
        let cache = Cache::disk(dir.path()).unwrap();
        assert_eq!(cache.get_or_compute("gram", &config, counted(&calls, 7)).unwrap(), json!(7));
        assert_eq!(calls.get(), 3);

        // the recompute repaired the file for the next instance
        let cache = Cache::disk(dir.path()).unwrap();
        assert_eq!(cache.get_or_compute("gram", &config, counted(&calls, 8)).unwrap(), json!(7));
        assert_eq!(calls.get(), 3);
    }

    #[test]
    fn resolution_order_is_flag_then_environment_then_memory() {
        let dir = tempfile::tempdir().unwrap();
        let flagged = dir.path().join("flagged");
        let from_env = dir.path().join("from-env");

        let cache = Cache::resolve_from(Some(&flagged), Some(from_env.clone().into())).unwrap();
        assert!(cache.is_persistent());
        assert!(flagged.is_dir());
        assert!(!from_env.exists());

        let cache = Cache::resolve_from(None, Some(from_env.clone().into())).unwrap();
        assert!(cache.is_persistent());
        assert!(from_env.is_dir());

        let cache = Cache::resolve_from(None, None).unwrap();
        assert!(!cache.is_persistent());
    }
}
