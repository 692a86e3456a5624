//! Scenario configuration: a flat `key = value` file with command-line
//! overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use heisenphase::twosided::DENSE_TWOSIDED_CAP;
use heisenphase::{GridSpec, Params};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Strict,
    Default,
    Loose,
}

impl Tier {
    /// Tolerance used for a check whose default tolerance is `base`.
    ///
    /// Strict pins every check to the lattice-exact level `1e-10`, so checks
    /// that involve fractional shifts, quadrature or truncation fail there;
    /// loose relaxes by a factor of 100.
    pub fn apply(self, base: f64) -> f64 {
        match self {
            Tier::Strict => base.min(STRICT_TOL),
            Tier::Default => base,
            Tier::Loose => crate::report::round_sig(base * 100.0),
        }
    }
}

pub const STRICT_TOL: f64 = 1e-10;

impl FromStr for Tier {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strict" => Ok(Tier::Strict),
            "default" => Ok(Tier::Default),
            "loose" => Ok(Tier::Loose),
            other => Err(format!("unknown tolerance tier `{other}` (strict, default, loose)")),
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Strict => "strict",
            Tier::Default => "default",
            Tier::Loose => "loose",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Groups,
    Sesqui,
    Reconstruction,
    Fourier,
    Projection,
    Ladders,
    Twisted,
    Guillemin,
    Moyal,
    Twosided,
    CrossToeplitz,
    Uncertainty,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Groups,
        Suite::Sesqui,
        Suite::Reconstruction,
        Suite::Fourier,
        Suite::Projection,
        Suite::Ladders,
        Suite::Twisted,
        Suite::Guillemin,
        Suite::Moyal,
        Suite::Twosided,
        Suite::CrossToeplitz,
        Suite::Uncertainty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Groups => "groups",
            Suite::Sesqui => "sesqui",
            Suite::Reconstruction => "reconstruction",
            Suite::Fourier => "fourier",
            Suite::Projection => "projection",
            Suite::Ladders => "ladders",
            Suite::Twisted => "twisted",
            Suite::Guillemin => "guillemin",
            Suite::Moyal => "moyal",
            Suite::Twosided => "twosided",
            Suite::CrossToeplitz => "cross_toeplitz",
            Suite::Uncertainty => "uncertainty",
        }
    }

    /// Suites that densify kernels on `R^4`.
    pub fn uses_r4(self) -> bool {
        matches!(self, Suite::Twosided | Suite::CrossToeplitz)
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated suite list. `all` selects every suite and an
/// empty string selects none.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    let s = s.trim();
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let suite = part.parse()?;
        if !out.contains(&suite) {
            out.push(suite);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub hbar: f64,
    pub tau: f64,
    pub sigma: f64,
    pub upsilon: f64,
    /// Points per axis of one-sided phase grids.
    pub grid_n: usize,
    /// Points per axis for objects on `R^4`.
    pub grid_n4: usize,
    /// Half-width of the phase grid; `None` selects the self-dual extent.
    pub extent: Option<f64>,
    pub tolerance_tier: Tier,
    pub suites: Vec<Suite>,
    /// Where reports go; not part of the serialized scenario.
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            hbar: 1.0,
            tau: 0.5,
            sigma: 1.0,
            upsilon: 1.0,
            grid_n: 64,
            grid_n4: 32,
            extent: None,
            tolerance_tier: Tier::Default,
            suites: Suite::ALL.to_vec(),
            output_dir: None,
            seed: 42,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| CliError::Parse { line, msg: format!("{key}: {e}") })
}

impl ScenarioConfig {
    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ScenarioConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::Parse { line, msg: format!("expected `key = value`, got `{content}`") })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "hbar" => cfg.hbar = parse_value(line, key, value)?,
                "tau" => cfg.tau = parse_value(line, key, value)?,
                "sigma" => cfg.sigma = parse_value(line, key, value)?,
                "upsilon" => cfg.upsilon = parse_value(line, key, value)?,
                "grid_n" => cfg.grid_n = parse_value(line, key, value)?,
                "grid_n4" => cfg.grid_n4 = parse_value(line, key, value)?,
                "extent" => cfg.extent = Some(parse_value(line, key, value)?),
                "tolerance_tier" => cfg.tolerance_tier = parse_value(line, key, value)?,
                "suites" => cfg.suites = parse_suites(value).map_err(|msg| CliError::Parse { line, msg })?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "seed" => cfg.seed = parse_value(line, key, value)?,
                other => return Err(CliError::Parse { line, msg: format!("unknown key `{other}`") }),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn params(&self) -> Result<Params, CliError> {
        Params::new(self.hbar, self.tau, self.sigma, self.upsilon).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The one-sided phase grid, which must be self-dual.
    pub fn phase_grid(&self) -> Result<GridSpec, CliError> {
        self.grid(self.grid_n)
    }

    /// The self-dual phase grid underlying `R^4` objects.
    pub fn r4_grid(&self) -> Result<GridSpec, CliError> {
        GridSpec::self_dual(2, self.grid_n4, self.hbar).map_err(|e| CliError::Config(e.to_string()))
    }

    fn grid(&self, n: usize) -> Result<GridSpec, CliError> {
        let spec = match self.extent {
            None => GridSpec::self_dual(2, n, self.hbar),
            Some(l) => GridSpec::new(2, l, n),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        if !spec.is_self_dual(self.hbar) {
            return Err(CliError::Config(format!(
                "extent {} is not self-dual for N = {n}, hbar = {} (need 2 L^2 |hbar| = N)",
                spec.extent, self.hbar
            )));
        }
        Ok(spec)
    }

    /// Checks parameters and grids. Returns the suites that exceed a size
    /// cap together with the reason; those are skipped, not rejected.
    pub fn validate(&self) -> Result<Vec<(Suite, String)>, CliError> {
        self.params()?;
        self.phase_grid()?;
        let mut skipped = Vec::new();
        for &s in self.suites.iter().filter(|s| s.uses_r4()) {
            if self.grid_n4 > DENSE_TWOSIDED_CAP {
                skipped.push((s, format!("grid_n4 = {} exceeds the dense R^4 cap {DENSE_TWOSIDED_CAP}", self.grid_n4)));
            } else {
                self.r4_grid()?;
            }
        }
        Ok(skipped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_lists() {
        let cfg = ScenarioConfig::parse(
            "# scenario\nhbar = 1.0\ntau=2 # squeeze\nsuites = groups, moyal,groups\ntolerance_tier = loose\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.tau, 2.0);
        assert_eq!(cfg.suites, vec![Suite::Groups, Suite::Moyal]);
        assert_eq!(cfg.tolerance_tier, Tier::Loose);
        assert_eq!(cfg.seed, 7);
        assert!(ScenarioConfig::parse("suites =").unwrap().suites.is_empty());
        assert_eq!(ScenarioConfig::parse("suites = all").unwrap().suites.len(), 12);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match ScenarioConfig::parse("hbar = 1\n\ntau = x\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ScenarioConfig::parse("colour = red"), Err(CliError::Parse { line: 1, .. })));
        assert!(matches!(ScenarioConfig::parse("just text"), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn validation() {
        assert!(ScenarioConfig::default().validate().unwrap().is_empty());
        let bad = ScenarioConfig { extent: Some(3.0), ..Default::default() };
        assert!(matches!(bad.validate(), Err(CliError::Config(_))));
        let big = ScenarioConfig { grid_n4: 64, ..Default::default() };
        let skipped = big.validate().unwrap();
        assert_eq!(skipped.iter().map(|s| s.0).collect::<Vec<_>>(), vec![Suite::Twosided, Suite::CrossToeplitz]);
        assert!(ScenarioConfig { tau: -1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn tiers() {
        assert_eq!(Tier::Strict.apply(1e-6), 1e-10);
        assert_eq!(Tier::Strict.apply(1e-12), 1e-12);
        assert_eq!(Tier::Loose.apply(1e-6), 1e-4);
    }
}
