//! Scenario parameters and the TOML experiment file.

use crate::error::{Error, Result};
use crate::{db_to_linear, linear_to_db};
use toml::{Table, Value};

/// One NOMA pair: the near UT has the stronger channel and the smaller
/// power-sharing coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub alpha_near: f64,
    pub alpha_far: f64,
    /// Large-scale gain of the near UT (inverse path loss).
    pub pathloss_near: f64,
    pub pathloss_far: f64,
    pub target_rate_near: f64,
    pub target_rate_far: f64,
    /// Uplink per-pair target rate.
    pub target_rate_pair: f64,
}

impl PairConfig {
    pub fn reference() -> Self {
        Self {
            alpha_near: 0.2,
            alpha_far: 0.8,
            pathloss_near: 1e-2,
            pathloss_far: 2.5e-3,
            target_rate_near: 1.0,
            target_rate_far: 1.0,
            target_rate_pair: 2.0,
        }
    }

    /// Uplink aggregate gain `α_near η_near + α_far η_far`.
    pub fn uplink_gain(&self) -> f64 {
        self.alpha_near * self.pathloss_near + self.alpha_far * self.pathloss_far
    }

    pub fn validate(&self, index: usize) -> Result<()> {
        let key = |k: &str| format!("pairs[{index}].{k}");
        if !(self.alpha_near > 0.0 && self.alpha_near < 0.5) {
            return Err(Error::param(key("alpha_near"), format!("must lie in (0, 0.5), got {}", self.alpha_near)));
        }
        if !(self.alpha_far > 0.5 && self.alpha_far < 1.0) {
            return Err(Error::param(key("alpha_far"), format!("must lie in (0.5, 1), got {}", self.alpha_far)));
        }
        if (self.alpha_near + self.alpha_far - 1.0).abs() > 1e-9 {
            return Err(Error::param(key("alpha_far"), "alpha_near + alpha_far must equal 1"));
        }
        if !(self.pathloss_far > 0.0) || !self.pathloss_far.is_finite() {
            return Err(Error::param(key("pathloss_far"), "must be positive"));
        }
        if !(self.pathloss_near > self.pathloss_far) || !self.pathloss_near.is_finite() {
            return Err(Error::param(key("pathloss_near"), "near UT must have the larger channel gain"));
        }
        for (name, v) in [
            ("target_rate_near", self.target_rate_near),
            ("target_rate_far", self.target_rate_far),
            ("target_rate_pair", self.target_rate_pair),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(key(name), "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// BS transmit (and receive) antennas; also the number of pairs.
    pub bs_antennas: usize,
    pub ut_antennas: usize,
    pub frame_len: usize,
    /// Downlink transmit power (linear).
    pub downlink_power: f64,
    /// Uplink per-UT communication power (linear).
    pub uplink_comm_power: f64,
    /// Uplink sensing power per slot (linear).
    pub uplink_sens_power: f64,
    pub pairs: Vec<PairConfig>,
    pub fdsac_bandwidth_frac: f64,
    pub fdsac_power_frac: f64,
}

impl SystemConfig {
    /// Four pairs, 4x4 antennas, L = 30, all powers at 25 dB, even FDSAC split.
    pub fn reference() -> Self {
        let p = db_to_linear(25.0);
        Self {
            bs_antennas: 4,
            ut_antennas: 4,
            frame_len: 30,
            downlink_power: p,
            uplink_comm_power: p,
            uplink_sens_power: p,
            pairs: vec![PairConfig::reference(); 4],
            fdsac_bandwidth_frac: 0.5,
            fdsac_power_frac: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bs_antennas == 0 {
            return Err(Error::param("system.M", "must be positive"));
        }
        if self.ut_antennas < self.bs_antennas {
            return Err(Error::param("system.N", "UT antennas must be at least the BS antennas"));
        }
        if self.frame_len == 0 {
            return Err(Error::param("system.L", "must be positive"));
        }
        for (name, v) in [
            ("power.p_db", self.downlink_power),
            ("power.pc_db", self.uplink_comm_power),
            ("power.ps_db", self.uplink_sens_power),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, "power must be finite and >= 0"));
            }
        }
        if self.pairs.len() != self.bs_antennas {
            return Err(Error::param(
                "pairs",
                format!("expected {} pairs (one per BS antenna), got {}", self.bs_antennas, self.pairs.len()),
            ));
        }
        for (i, pair) in self.pairs.iter().enumerate() {
            pair.validate(i)?;
        }
        for (name, v) in [("fdsac.kappa", self.fdsac_bandwidth_frac), ("fdsac.mu", self.fdsac_power_frac)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn with_downlink_power(&self, p: f64) -> Self {
        Self { downlink_power: p, ..self.clone() }
    }

    pub fn with_uplink_powers(&self, comm: f64, sens: f64) -> Self {
        Self { uplink_comm_power: comm, uplink_sens_power: sens, ..self.clone() }
    }
}

/// Everything an experiment run needs: the scenario, the sensing spectrum and
/// the Monte Carlo budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub eigenvalues: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

fn config_err(key: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Config { key: key.into(), detail: detail.into() }
}

fn section<'a>(root: &'a Table, name: &str) -> Result<&'a Table> {
    match root.get(name) {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => Err(config_err(name, "expected a table")),
        None => Err(config_err(name, "missing section")),
    }
}

fn float(table: &Table, path: &str, key: &str) -> Result<f64> {
    let full = format!("{path}.{key}");
    match table.get(key) {
        Some(Value::Float(f)) => Ok(*f),
        Some(Value::Integer(i)) => Ok(*i as f64),
        Some(_) => Err(config_err(full, "expected a number")),
        None => Err(config_err(full, "missing key")),
    }
}

fn integer(table: &Table, path: &str, key: &str) -> Result<i64> {
    let full = format!("{path}.{key}");
    match table.get(key) {
        Some(Value::Integer(i)) => Ok(*i),
        Some(_) => Err(config_err(full, "expected an integer")),
        None => Err(config_err(full, "missing key")),
    }
}

fn positive_count(table: &Table, path: &str, key: &str) -> Result<usize> {
    let v = integer(table, path, key)?;
    usize::try_from(v)
        .ok()
        .filter(|&v| v > 0)
        .ok_or_else(|| config_err(format!("{path}.{key}"), format!("must be a positive integer, got {v}")))
}

fn reject_unknown(table: &Table, path: &str, known: &[&str]) -> Result<()> {
    match table.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) if path.is_empty() => Err(config_err(k.as_str(), "unknown key")),
        Some(k) => Err(config_err(format!("{path}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn reference() -> Self {
        Self { system: SystemConfig::reference(), eigenvalues: vec![1.0, 0.1, 0.05, 0.01], trials: 100_000, seed: 7 }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate().map_err(|e| match e {
            Error::Parameter { name, detail } => config_err(name, detail),
            other => other,
        })?;
        if self.eigenvalues.len() != self.system.bs_antennas {
            return Err(config_err(
                "sensing.eigenvalues",
                format!("expected {} eigenvalues, got {}", self.system.bs_antennas, self.eigenvalues.len()),
            ));
        }
        if self.eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(config_err("sensing.eigenvalues", "eigenvalues must be positive"));
        }
        if self.trials == 0 {
            return Err(config_err("run.trials", "must be at least 1"));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| config_err("<file>", e.message().to_string()))?;
        reject_unknown(&root, "", &["system", "power", "pairs", "fdsac", "sensing", "run"])?;

        let system = section(&root, "system")?;
        reject_unknown(system, "system", &["M", "N", "L"])?;
        let power = section(&root, "power")?;
        reject_unknown(power, "power", &["p_db", "pc_db", "ps_db"])?;
        let fdsac = section(&root, "fdsac")?;
        reject_unknown(fdsac, "fdsac", &["kappa", "mu"])?;
        let sensing = section(&root, "sensing")?;
        reject_unknown(sensing, "sensing", &["eigenvalues"])?;
        let run = section(&root, "run")?;
        reject_unknown(run, "run", &["trials", "seed"])?;

        let pair_keys = [
            "alpha_near",
            "alpha_far",
            "pathloss_near",
            "pathloss_far",
            "target_rate_near",
            "target_rate_far",
            "target_rate_pair",
        ];
        let pairs = match root.get("pairs") {
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let path = format!("pairs[{i}]");
                    let t = item.as_table().ok_or_else(|| config_err(&path, "expected a table"))?;
                    reject_unknown(t, &path, &pair_keys)?;
                    Ok(PairConfig {
                        alpha_near: float(t, &path, "alpha_near")?,
                        alpha_far: float(t, &path, "alpha_far")?,
                        pathloss_near: float(t, &path, "pathloss_near")?,
                        pathloss_far: float(t, &path, "pathloss_far")?,
                        target_rate_near: float(t, &path, "target_rate_near")?,
                        target_rate_far: float(t, &path, "target_rate_far")?,
                        target_rate_pair: float(t, &path, "target_rate_pair")?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(config_err("pairs", "expected an array of tables")),
            None => return Err(config_err("pairs", "missing section")),
        };

        let eigenvalues = match sensing.get("eigenvalues") {
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(n) => Ok(*n as f64),
                    _ => Err(config_err(format!("sensing.eigenvalues[{i}]"), "expected a number")),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(config_err("sensing.eigenvalues", "expected an array")),
            None => return Err(config_err("sensing.eigenvalues", "missing key")),
        };

        let trials = integer(run, "run", "trials")?;
        let seed = integer(run, "run", "seed")?;
        let cfg = Self {
            system: SystemConfig {
                bs_antennas: positive_count(system, "system", "M")?,
                ut_antennas: positive_count(system, "system", "N")?,
                frame_len: positive_count(system, "system", "L")?,
                downlink_power: db_to_linear(float(power, "power", "p_db")?),
                uplink_comm_power: db_to_linear(float(power, "power", "pc_db")?),
                uplink_sens_power: db_to_linear(float(power, "power", "ps_db")?),
                pairs,
                fdsac_bandwidth_frac: float(fdsac, "fdsac", "kappa")?,
                fdsac_power_frac: float(fdsac, "fdsac", "mu")?,
            },
            eigenvalues,
            trials: u64::try_from(trials).map_err(|_| config_err("run.trials", "must be nonnegative"))?,
            seed: u64::try_from(seed).map_err(|_| config_err("run.seed", "must be nonnegative"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        let s = &self.system;
        let mut out = String::new();
        out.push_str(&format!("[system]\nM = {}\nN = {}\nL = {}\n\n", s.bs_antennas, s.ut_antennas, s.frame_len));
        out.push_str(&format!(
            "[power]\np_db = {:?}\npc_db = {:?}\nps_db = {:?}\n\n",
            linear_to_db(s.downlink_power),
            linear_to_db(s.uplink_comm_power),
            linear_to_db(s.uplink_sens_power)
        ));
        for p in &s.pairs {
            out.push_str(&format!(
                "[[pairs]]\nalpha_near = {:?}\nalpha_far = {:?}\npathloss_near = {:?}\npathloss_far = {:?}\n\
                 target_rate_near = {:?}\ntarget_rate_far = {:?}\ntarget_rate_pair = {:?}\n\n",
                p.alpha_near,
                p.alpha_far,
                p.pathloss_near,
                p.pathloss_far,
                p.target_rate_near,
                p.target_rate_far,
                p.target_rate_pair
            ));
        }
        out.push_str(&format!("[fdsac]\nkappa = {:?}\nmu = {:?}\n\n", s.fdsac_bandwidth_frac, s.fdsac_power_frac));
        let eig: Vec<String> = self.eigenvalues.iter().map(|l| format!("{l:?}")).collect();
        out.push_str(&format!("[sensing]\neigenvalues = [{}]\n\n", eig.join(", ")));
        out.push_str(&format!("[run]\ntrials = {}\nseed = {}\n", self.trials, self.seed));
        out
    }
}
