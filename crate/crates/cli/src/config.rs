//! Flat key=value configuration files with strict key checking.
//!
//! Values in the file are overridden by command-line flags. Every key must
//! be consumed by the subcommand that loaded the file; leftovers are
//! configuration errors naming the offending key.

use std::collections::BTreeMap;
use std::path::Path;

use risklab_core::{Error, Result};

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    /// Parses `key=value` lines; blank lines and `#` comments are ignored.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config file {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "config line {} is not key=value: {line:?}",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::config(format!("duplicate config key {key}")));
            }
        }
        Ok(FileConfig { values })
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str, kind: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::config(format!("config key {key}: expected {kind}, got {raw:?}"))
            }),
        }
    }

    pub fn take_u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take_parsed(key, "an unsigned integer")
    }

    pub fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.take_parsed(key, "an unsigned integer")
    }

    pub fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take_parsed(key, "a real number")
    }

    pub fn take_string(&mut self, key: &str) -> Result<Option<String>> {
        Ok(self.values.remove(key))
    }

    pub fn take_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|_| {
                        Error::config(format!(
                            "config key {key}: expected a comma-separated real list, got {raw:?}"
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    pub fn take_usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|_| {
                        Error::config(format!(
                            "config key {key}: expected a comma-separated integer list, got {raw:?}"
                        ))
                    })
                })
                .collect::<Result<Vec<usize>>>()
                .map(Some),
        }
    }

    /// Rejects any key no resolver consumed.
    pub fn finish(self) -> Result<()> {
        if let Some(key) = self.values.keys().next() {
            return Err(Error::config(format!("unknown config key {key}")));
        }
        Ok(())
    }
}

/// flag value, else file value, else default.
pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// flag value, else file value, else a computed default.
pub fn resolve_with<T>(flag: Option<T>, file: Option<T>, default: impl FnOnce() -> T) -> T {
    flag.or(file).unwrap_or_else(default)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(contents: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!(
            "risklab-config-test-{}.cfg",
            std::process::id() as u64 ^ contents.len() as u64
        ));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn parses_and_types_values() {
        let path = write_temp("m=5\nsigma2 = 2.5\n# comment\n\ngrid=0,1,2\n");
        let mut cfg = FileConfig::load(&path).unwrap();
        assert_eq!(cfg.take_usize("m").unwrap(), Some(5));
        assert_eq!(cfg.take_f64("sigma2").unwrap(), Some(2.5));
        assert_eq!(cfg.take_f64_list("grid").unwrap(), Some(vec![0.0, 1.0, 2.0]));
        cfg.finish().unwrap();
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn type_mismatch_names_the_key() {
        let path = write_temp("m=abc\n");
        let mut cfg = FileConfig::load(&path).unwrap();
        let err = cfg.take_usize("m").unwrap_err();
        assert!(err.to_string().contains('m'), "{err}");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn unknown_key_rejected() {
        let path = write_temp("mystery=1\n");
        let cfg = FileConfig::load(&path).unwrap();
        let err = cfg.finish().unwrap_err();
        assert!(err.to_string().contains("mystery"), "{err}");
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn flag_overrides_file() {
        assert_eq!(resolve(Some(7usize), Some(5), 1), 7);
        assert_eq!(resolve(None, Some(5usize), 1), 5);
        assert_eq!(resolve::<usize>(None, None, 1), 1);
    }
}
