//! Experiment configuration: a flat TOML file, then command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prep::{Coefficients, Preset, DEFAULT_FLAT_WINDOW, DEFAULT_RESTARTS};
use crate::search::{SearchConfig, Strategy, DEFAULT_CUT_HALFWIDTH};
use crate::state::WalkParams;
use crate::{CALIBRATED_KICK_STRENGTH, DEFAULT_KICKS_PER_LEG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowSpec {
    /// Smallest window that holds the walk with margin.
    #[default]
    Auto,
    Fixed(usize),
}

impl WindowSpec {
    pub fn fixed(self) -> Option<usize> {
        match self {
            WindowSpec::Auto => None,
            WindowSpec::Fixed(m) => Some(m),
        }
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Auto => f.write_str("auto"),
            WindowSpec::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(WindowSpec::Auto);
        }
        s.parse::<usize>()
            .map(WindowSpec::Fixed)
            .map_err(|_| Error::invalid("window", format!("`{s}` is neither `auto` nor a non-negative integer")))
    }
}

impl Serialize for WindowSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WindowSpec::Auto => s.serialize_str("auto"),
            WindowSpec::Fixed(m) => s.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for WindowSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(m) if m >= 0 => Ok(WindowSpec::Fixed(m as usize)),
            Raw::Int(m) => Err(serde::de::Error::custom(format!("window {m} is negative"))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: f64,
    pub kicks: usize,
    pub window: WindowSpec,
    /// Named initial state; mutually exclusive with `coefficients`.
    pub preset: Option<Preset>,
    /// Real `(c_-1, c_0, c_+1)`, normalized on use.
    pub coefficients: Option<[f64; 3]>,
    pub oracle: bool,
    pub target: i64,
    /// Targets for `sweep`.
    pub targets: Vec<i64>,
    /// Kick strengths for `sweep`; empty means just `k`.
    pub ks: Vec<f64>,
    pub cut: bool,
    pub wcut: i64,
    pub strategy: Strategy,
    pub flat_window: usize,
    pub seed: u64,
    pub restarts: usize,
    /// `prepare` optimizes when set, otherwise evaluates the chosen state.
    pub optimize: bool,
    pub t_max: usize,
    pub hitting_threshold: f64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: CALIBRATED_KICK_STRENGTH,
            kicks: DEFAULT_KICKS_PER_LEG,
            window: WindowSpec::Auto,
            preset: None,
            coefficients: None,
            oracle: true,
            target: 5,
            targets: Vec::new(),
            ks: Vec::new(),
            cut: true,
            wcut: DEFAULT_CUT_HALFWIDTH as i64,
            strategy: Strategy::default(),
            flat_window: DEFAULT_FLAT_WINDOW,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            optimize: true,
            t_max: 128,
            hitting_threshold: 0.05,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML file with experiment keys
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Kick strength k
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Kicks per protocol leg
    #[arg(long)]
    pub kicks: Option<usize>,
    /// Momentum window half-width, or `auto`
    #[arg(long)]
    pub window: Option<String>,
    /// Marked momentum
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<i64>,
    /// Comma-separated targets for sweep
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub targets: Option<Vec<i64>>,
    /// Comma-separated kick strengths for sweep
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ks: Option<Vec<f64>>,
    /// Cut half-width
    #[arg(long, allow_hyphen_values = true)]
    pub wcut: Option<i64>,
    /// Skip the cut (no refocusing estimate)
    #[arg(long)]
    pub no_cut: bool,
    /// Flank suppression: cut or subtract
    #[arg(long)]
    pub strategy: Option<String>,
    /// Initial state: b, c or d
    #[arg(long)]
    pub preset: Option<String>,
    /// Flatness window N (even)
    #[arg(long)]
    pub flat_window: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Kicks for the scaling walk
    #[arg(long)]
    pub t_max: Option<usize>,
    /// Optimizer restarts
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Run without marking (reference walk)
    #[arg(long)]
    pub no_oracle: bool,
    /// Evaluate the chosen preset instead of optimizing
    #[arg(long)]
    pub no_optimize: bool,
}

fn config_error(e: toml::de::Error) -> Error {
    Error::Config {
        field: None,
        message: e.to_string(),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(config_error)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            field: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_toml_str(&text)
    }

    /// File (if given) then flags, validated.
    pub fn resolve(overrides: &Overrides) -> Result<Self> {
        let mut cfg = match &overrides.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(k) = o.k {
            self.k = k;
        }
        if let Some(t) = o.kicks {
            self.kicks = t;
        }
        if let Some(w) = &o.window {
            self.window = w.parse()?;
        }
        if let Some(n) = o.target {
            self.target = n;
        }
        if let Some(ts) = &o.targets {
            self.targets = ts.clone();
        }
        if let Some(ks) = &o.ks {
            self.ks = ks.clone();
        }
        if let Some(w) = o.wcut {
            self.wcut = w;
        }
        if o.no_cut {
            self.cut = false;
        }
        if let Some(s) = &o.strategy {
            self.strategy = s.parse()?;
        }
        if let Some(p) = &o.preset {
            // a preset on the command line wins over file coefficients
            self.preset = Some(p.parse()?);
            self.coefficients = None;
        }
        if let Some(n) = o.flat_window {
            self.flat_window = n;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.out {
            self.out = p.clone();
        }
        if let Some(t) = o.t_max {
            self.t_max = t;
        }
        if let Some(r) = o.restarts {
            self.restarts = r;
        }
        if o.no_oracle {
            self.oracle = false;
        }
        if o.no_optimize {
            self.optimize = false;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        check_kick_strength("k", self.k)?;
        for &k in &self.ks {
            check_kick_strength("ks", k)?;
        }
        if self.kicks == 0 {
            return Err(Error::invalid("kicks", "must be at least 1"));
        }
        if self.wcut < 0 {
            return Err(Error::invalid("wcut", format!("{} is negative", self.wcut)));
        }
        if self.flat_window % 2 != 0 {
            return Err(Error::invalid("flat_window", format!("{} is odd", self.flat_window)));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "must be at least 1"));
        }
        if self.t_max == 0 {
            return Err(Error::invalid("t_max", "must be at least 1"));
        }
        if !(self.hitting_threshold > 0.0 && self.hitting_threshold <= 1.0) {
            return Err(Error::invalid("hitting_threshold", "must lie in (0, 1]"));
        }
        if self.preset.is_some() && self.coefficients.is_some() {
            return Err(Error::Config {
                field: Some("coefficients".into()),
                message: "give either `preset` or `coefficients`, not both".into(),
            });
        }
        self.initial_coefficients()?;
        self.walk_params()?;
        Ok(())
    }

    pub fn initial_coefficients(&self) -> Result<Coefficients> {
        match (self.coefficients, self.preset) {
            (Some([m, z, p]), _) => Coefficients::real(m, z, p),
            (None, Some(preset)) => Ok(preset.coefficients()),
            (None, None) => Ok(Preset::B.coefficients()),
        }
    }

    pub fn initial_label(&self) -> String {
        match (self.coefficients, self.preset) {
            (Some(_), _) => "custom".into(),
            (None, Some(p)) => p.name().into(),
            (None, None) => Preset::B.name().into(),
        }
    }

    pub fn walk_params(&self) -> Result<WalkParams> {
        self.walk_params_for(self.k)
    }

    pub fn walk_params_for(&self, k: f64) -> Result<WalkParams> {
        WalkParams::new(k, self.kicks, self.window.fixed())
    }

    pub fn search_config(&self, params: WalkParams) -> Result<SearchConfig> {
        Ok(SearchConfig {
            params,
            initial: self.initial_coefficients()?,
            target: self.oracle.then_some(self.target),
            cut_halfwidth: self.cut.then_some(self.wcut as usize),
            strategy: self.strategy,
            flat_window: self.flat_window,
        })
    }
}

fn check_kick_strength(field: &'static str, k: f64) -> Result<()> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::invalid(field, format!("kick strength {k} must be finite and >= 0")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.walk_params().unwrap().kicks_per_leg, 15);
    }

    #[test]
    fn parses_flat_file() {
        let cfg = ExperimentConfig::from_toml_str(
            "k = 1.0\nkicks = 10\nwindow = 64\npreset = \"d\"\ntargets = [-3, 4]\nstrategy = \"cut\"\n",
        )
        .unwrap();
        assert_eq!(cfg.window, WindowSpec::Fixed(64));
        assert_eq!(cfg.preset, Some(Preset::D));
        assert_eq!(cfg.strategy, Strategy::Cut);
        assert_eq!(cfg.targets, vec![-3, 4]);
        let auto = ExperimentConfig::from_toml_str("window = \"auto\"").unwrap();
        assert_eq!(auto.window, WindowSpec::Auto);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["kk = 1", "k = \"x\"", "window = -4", "window = \"wide\"", "k = 1\nk = 2"] {
            assert!(
                matches!(ExperimentConfig::from_toml_str(bad), Err(Error::Config { .. })),
                "{bad}"
            );
        }
        let mut cfg = ExperimentConfig {
            k: -1.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameter { field: "k", .. })));
        cfg.k = 0.8;
        cfg.flat_window = 7;
        assert!(cfg.validate().is_err());
        cfg.flat_window = 20;
        cfg.window = WindowSpec::Fixed(5);
        assert!(cfg.validate().is_err());
        cfg.window = WindowSpec::Auto;
        cfg.preset = Some(Preset::C);
        cfg.coefficients = Some([1.0, 0.0, 0.0]);
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn flags_override_file() {
        let mut cfg = ExperimentConfig::from_toml_str("k = 1.0\ncoefficients = [1.0, 2.0, 1.0]").unwrap();
        let o = Overrides {
            k: Some(0.5),
            preset: Some("c".into()),
            window: Some("80".into()),
            no_cut: true,
            ..Default::default()
        };
        cfg.apply(&o).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.k, 0.5);
        assert_eq!(cfg.initial_label(), "c");
        assert_eq!(cfg.window, WindowSpec::Fixed(80));
        let sc = cfg.search_config(cfg.walk_params().unwrap()).unwrap();
        assert_eq!(sc.cut_halfwidth, None);
    }
}
