//! Flat `key = value` configuration text.
//!
//! One assignment per line; `#` starts a comment; lists are comma-separated;
//! nested fields use dotted keys (`continuation.lambda0`).

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Model, SolverConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Splits configuration text into `(key, value)` pairs in file order.
/// Duplicate keys are rejected.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Format(format!("line {}: empty key", lineno + 1)));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(Error::Format(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn scalar<T: Scalar>(key: &str, v: &str) -> Result<T> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Format(format!("`{key}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Format(format!("`{key}`: `{v}` is not finite")));
    }
    T::from_f64(x).ok_or_else(|| Error::Format(format!("`{key}`: `{v}` is not representable")))
}

fn integer(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Format(format!("`{key}`: `{v}` is not a nonnegative integer")))
}

/// Parses a comma-separated list with `item`.
pub(crate) fn list<U>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<U>) -> Result<Vec<U>> {
    let items: Vec<&str> = v.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(Error::Format(format!("`{key}`: malformed list `{v}`")));
    }
    items.into_iter().map(|s| item(key, s)).collect()
}

fn fmt_list<U: std::fmt::Display>(xs: &[U]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl<T: Scalar> SolverConfig<T> {
    /// Every key understood by [`set`](Self::set).
    pub const KEYS: [&'static str; 19] = [
        "model",
        "lambda1",
        "lambda_star",
        "mode_weights",
        "mu",
        "eta",
        "continuation.lambda0",
        "continuation.lambda_bar",
        "continuation.factor",
        "continuation.ratio",
        "continuation.alpha",
        "target_ranks",
        "mu_schedule.initial",
        "mu_schedule.factor",
        "mu_schedule.period",
        "mu_schedule.floor",
        "tol_adal",
        "tol_fista",
        "max_iters",
    ];

    /// Assigns one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "model" => self.model = Model::from_str(v).map_err(|e| Error::Format(e.to_string()))?,
            "lambda1" => self.lambda1 = scalar(key, v)?,
            "lambda_star" => self.lambda_star = scalar(key, v)?,
            "mode_weights" => self.mode_weights = Some(list(key, v, scalar)?),
            "mu" => self.mu = scalar(key, v)?,
            "eta" => self.eta = Some(scalar(key, v)?),
            "continuation.lambda0" => self.continuation.lambda0 = scalar(key, v)?,
            "continuation.lambda_bar" => self.continuation.lambda_bar = scalar(key, v)?,
            "continuation.factor" => self.continuation.factor = scalar(key, v)?,
            "continuation.ratio" => self.continuation.ratio = scalar(key, v)?,
            "continuation.alpha" => self.continuation.alpha = scalar(key, v)?,
            "target_ranks" => self.target_ranks = Some(list(key, v, integer)?),
            "mu_schedule.initial" => self.mu_schedule.initial = scalar(key, v)?,
            "mu_schedule.factor" => self.mu_schedule.factor = scalar(key, v)?,
            "mu_schedule.period" => self.mu_schedule.period = integer(key, v)?,
            "mu_schedule.floor" => self.mu_schedule.floor = scalar(key, v)?,
            "tol_adal" => self.tol_adal = scalar(key, v)?,
            "tol_fista" => self.tol_fista = scalar(key, v)?,
            "max_iters" => self.max_iters = integer(key, v)?,
            _ => return Err(Error::Format(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies parsed pairs in order.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<()> {
        pairs.iter().try_for_each(|(k, v)| self.set(k, v))
    }

    /// Renders every field in the configuration-file syntax.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let c = &self.continuation;
        let m = &self.mu_schedule;
        let _ = writeln!(s, "model = {}", self.model);
        let _ = writeln!(s, "lambda1 = {:e}", self.lambda1.to_f64_lossy());
        let _ = writeln!(s, "lambda_star = {:e}", self.lambda_star.to_f64_lossy());
        if let Some(w) = &self.mode_weights {
            let w: Vec<f64> = w.iter().map(|x| x.to_f64_lossy()).collect();
            let _ = writeln!(s, "mode_weights = {}", fmt_list(&w));
        }
        let _ = writeln!(s, "mu = {:e}", self.mu.to_f64_lossy());
        if let Some(eta) = self.eta {
            let _ = writeln!(s, "eta = {:e}", eta.to_f64_lossy());
        }
        let _ = writeln!(s, "continuation.lambda0 = {:e}", c.lambda0.to_f64_lossy());
        let _ = writeln!(s, "continuation.lambda_bar = {:e}", c.lambda_bar.to_f64_lossy());
        let _ = writeln!(s, "continuation.factor = {:e}", c.factor.to_f64_lossy());
        let _ = writeln!(s, "continuation.ratio = {:e}", c.ratio.to_f64_lossy());
        let _ = writeln!(s, "continuation.alpha = {:e}", c.alpha.to_f64_lossy());
        if let Some(r) = &self.target_ranks {
            let _ = writeln!(s, "target_ranks = {}", fmt_list(r));
        }
        let _ = writeln!(s, "mu_schedule.initial = {:e}", m.initial.to_f64_lossy());
        let _ = writeln!(s, "mu_schedule.factor = {:e}", m.factor.to_f64_lossy());
        let _ = writeln!(s, "mu_schedule.period = {}", m.period);
        let _ = writeln!(s, "mu_schedule.floor = {:e}", m.floor.to_f64_lossy());
        let _ = writeln!(s, "tol_adal = {:e}", self.tol_adal.to_f64_lossy());
        let _ = writeln!(s, "tol_fista = {:e}", self.tol_fista.to_f64_lossy());
        let _ = writeln!(s, "max_iters = {}", self.max_iters);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_lists_and_nested_keys() {
        let text = "# solver\nmodel = c\n\ntarget_ranks = 5, 5,5  # truth\ncontinuation.factor=0.9\n";
        let pairs = parse_key_values(text).unwrap();
        assert_eq!(pairs.len(), 3);
        let mut c = SolverConfig::<f64>::new(Model::Singleton);
        c.apply(&pairs).unwrap();
        assert_eq!(c.model, Model::Nonconvex);
        assert_eq!(c.target_ranks, Some(vec![5, 5, 5]));
        assert_eq!(c.continuation.factor, 0.9);
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(parse_key_values("model").is_err());
        assert!(parse_key_values("a = 1\na = 2").is_err());
        let mut c = SolverConfig::<f64>::new(Model::Singleton);
        assert!(c.set("lambda1", "abc").is_err());
        assert!(c.set("lambda1", "inf").is_err());
        assert!(c.set("target_ranks", "1,,2").is_err());
        assert!(c.set("nope", "1").is_err());
    }

    #[test]
    fn round_trip() {
        let mut c = SolverConfig::<f64>::new(Model::Mixture);
        c.mode_weights = Some(vec![0.1, 1.0, 0.25]);
        c.eta = Some(0.2);
        c.target_ranks = Some(vec![1, 2, 3]);
        c.lambda1 = 1.0 / 7.0;
        let text = c.to_config_string();
        let mut d = SolverConfig::<f64>::new(Model::Singleton);
        d.apply(&parse_key_values(&text).unwrap()).unwrap();
        assert_eq!(c, d);
        for key in SolverConfig::<f64>::KEYS {
            assert!(text.contains(&format!("{key} =")), "{key}");
        }
    }
}
