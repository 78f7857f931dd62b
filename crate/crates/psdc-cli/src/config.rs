//! Flat key=value run configuration: file parsing, per-command key
//! whitelists, and the merge order defaults < config file < CLI flags.

use std::collections::BTreeMap;
use std::str::FromStr;

use psdc::solvers::SolverConfig;

use crate::CliError;

/// Parsed config file; every key must be consumed or the run is rejected.
pub struct Flat {
    map: BTreeMap<String, String>,
}

pub fn parse_flat(text: &str) -> Result<Flat, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::validation(format!(
                "config line {}: expected key=value, got {line:?}",
                i + 1
            )));
        };
        let key = k.trim().to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::validation(format!(
                "config line {}: duplicate key {key}",
                i + 1
            )));
        }
    }
    Ok(Flat { map })
}

impl Flat {
    pub fn empty() -> Self {
        Flat {
            map: BTreeMap::new(),
        }
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    pub fn take_parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                CliError::validation(format!("config key {key}: cannot parse {v:?}"))
            }),
        }
    }

    /// Errors on any key no command consumed.
    pub fn finish(self) -> Result<(), CliError> {
        if let Some(key) = self.map.keys().next() {
            return Err(CliError::validation(format!("unknown config key: {key}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// plain DCA
    Dca,
    /// boosted DCA, Armijo backtracking
    Bdca,
    /// boosted DCA, exact line search
    Bdcae,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dca => "dca",
            Method::Bdca => "bdca",
            Method::Bdcae => "bdcae",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dca" => Ok(Method::Dca),
            "bdca" => Ok(Method::Bdca),
            "bdcae" => Ok(Method::Bdcae),
            _ => Err(format!("unknown method {s:?} (dca|bdca|bdcae)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Decomposition {
    /// split each homogeneous part separately
    Tpsdc,
    /// homogenize the whole polynomial first
    Hdpsdc,
}

impl Decomposition {
    pub fn name(self) -> &'static str {
        match self {
            Decomposition::Tpsdc => "tpsdc",
            Decomposition::Hdpsdc => "hdpsdc",
        }
    }
}

impl FromStr for Decomposition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tpsdc" => Ok(Decomposition::Tpsdc),
            "hdpsdc" => Ok(Decomposition::Hdpsdc),
            _ => Err(format!("unknown decomposition {s:?} (tpsdc|hdpsdc)")),
        }
    }
}

/// Strong-convexity modulus policy: fixed 1, the spectral norm of the
/// stacked convex rows, or an explicit positive value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    One,
    SpecNorm,
    Explicit(f64),
}

impl RhoPolicy {
    pub fn describe(self) -> String {
        match self {
            RhoPolicy::One => "one".into(),
            RhoPolicy::SpecNorm => "specnorm".into(),
            RhoPolicy::Explicit(v) => format!("{v}"),
        }
    }
}

impl FromStr for RhoPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "one" => Ok(RhoPolicy::One),
            "specnorm" => Ok(RhoPolicy::SpecNorm),
            other => match other.parse::<f64>() {
                Ok(v) if v > 0.0 => Ok(RhoPolicy::Explicit(v)),
                Ok(v) => Err(format!("rho must be positive, got {v}")),
                Err(_) => Err(format!("unknown rho policy {other:?} (one|specnorm|<float>)")),
            },
        }
    }
}

/// Fully resolved run settings shared by solve, mvsk, and bench.
#[derive(Debug, Clone)]
pub struct Settings {
    pub method: Method,
    pub decomposition: Decomposition,
    pub rho: RhoPolicy,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            method: Method::Bdcae,
            decomposition: Decomposition::Hdpsdc,
            rho: RhoPolicy::SpecNorm,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl Settings {
    /// Applies config-file keys, then explicit CLI overrides.
    pub fn resolve(
        flat: &mut Flat,
        method: Option<Method>,
        decomposition: Option<Decomposition>,
        rho: Option<RhoPolicy>,
        seed: Option<u64>,
    ) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(v) = flat.take("method") {
            s.method = v.parse().map_err(CliError::validation)?;
        }
        if let Some(v) = flat.take("decomposition") {
            s.decomposition = v.parse().map_err(CliError::validation)?;
        }
        if let Some(v) = flat.take("rho") {
            s.rho = v.parse().map_err(CliError::validation)?;
        }
        if let Some(v) = flat.take_parsed::<u64>("seed")? {
            s.seed = v;
        }
        if let Some(v) = flat.take_parsed::<f64>("epsilon")? {
            s.solver.epsilon = v;
        }
        if let Some(v) = flat.take_parsed::<usize>("max_outer")? {
            s.solver.max_outer = v;
        }
        if let Some(v) = flat.take_parsed::<f64>("inner_tol")? {
            s.solver.inner_tol = v;
        }
        if let Some(v) = flat.take_parsed::<usize>("inner_max_iter")? {
            s.solver.inner_max_iter = v;
        }
        if let Some(v) = flat.take_parsed::<f64>("armijo_sigma")? {
            s.solver.armijo_sigma = v;
        }
        if let Some(v) = flat.take_parsed::<f64>("armijo_beta")? {
            s.solver.armijo_beta = v;
        }
        if let Some(m) = method {
            s.method = m;
        }
        if let Some(d) = decomposition {
            s.decomposition = d;
        }
        if let Some(r) = rho {
            s.rho = r;
        }
        if let Some(v) = seed {
            s.seed = v;
        }
        Ok(s)
    }
}

/// Moment weights: a preset name or an explicit comma-separated 4-vector.
pub fn parse_omega(s: &str) -> Result<[f64; 4], CliError> {
    if let Some(w) = psdc::mvsk::omega_preset(s) {
        return Ok(w);
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::validation(format!(
            "omega must be seeking|averse|neutral or four comma-separated weights, got {s:?}"
        )));
    }
    let mut w = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        w[i] = p.trim().parse().map_err(|_| {
            CliError::validation(format!("omega component {}: bad number {p:?}", i + 1))
        })?;
    }
    Ok(w)
}
