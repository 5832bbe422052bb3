//! Minimal flag parser: `--key value` pairs plus one positional subcommand.

use std::collections::BTreeMap;

#[derive(Debug)]
pub struct Args {
    pub subcommand: String,
    flags: BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct ArgError(pub String);

impl std::fmt::Display for ArgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Args {
    pub fn parse(argv: &[String]) -> Result<Args, ArgError> {
        let mut it = argv.iter();
        let subcommand = it
            .next()
            .cloned()
            .ok_or_else(|| ArgError("missing subcommand; try `adsdeform help`".into()))?;
        let mut flags = BTreeMap::new();
        while let Some(k) = it.next() {
            let key = k
                .strip_prefix("--")
                .ok_or_else(|| ArgError(format!("expected --flag, got `{k}`")))?;
            let val = it
                .next()
                .ok_or_else(|| ArgError(format!("flag --{key} needs a value")))?;
            flags.insert(key.to_string(), val.clone());
        }
        Ok(Args { subcommand, flags })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.flags.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, ArgError> {
        match self.flags.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ArgError(format!("--{key}: cannot parse `{v}` as a number"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, ArgError> {
        match self.flags.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ArgError(format!("--{key}: cannot parse `{v}` as an integer"))),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, ArgError> {
        match self.flags.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ArgError(format!("--{key}: cannot parse `{v}` as an integer"))),
        }
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.flags
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }
}
