use crate::CliError;
use cavity_solver::CavityGeometry;
use polariton_model::{ModelError, ModelParams, Polariton};
use serde::{Deserialize, Serialize};
use spectroscopy::{Pathway, ScanConfig};
use std::path::{Path, PathBuf};
use toml::{Table, Value};

/// Everything a run needs. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub geometry: CavityGeometry,
    pub model: ModelParams,
    pub scan: ScanConfig,
    pub modes: ModesBlock,
    pub calibrate: CalibrateBlock,
    pub spectrum2d: Spectrum2dBlock,
    pub coherence: CoherenceBlock,
    pub beats: BeatsBlock,
    pub image: ImageBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            geometry: CavityGeometry::default(),
            model: ModelParams::default(),
            scan: ScanConfig::default(),
            modes: ModesBlock::default(),
            calibrate: CalibrateBlock::default(),
            spectrum2d: Spectrum2dBlock::default(),
            coherence: CoherenceBlock::default(),
            beats: BeatsBlock::default(),
            image: ImageBlock::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModesBlock {
    /// Bright modes to report.
    pub count: usize,
    /// Also write every bright-mode field as a CSV matrix.
    pub fields: bool,
}

impl Default for ModesBlock {
    fn default() -> Self {
        Self { count: 2, fields: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrateBlock {
    /// Target bright-mode wavenumbers (A, B) in cm⁻¹.
    pub targets: [f64; 2],
}

impl Default for CalibrateBlock {
    fn default() -> Self {
        Self { targets: [1998.2, 1971.4] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Spectrum2dBlock {
    /// Waiting time in ps.
    pub t2: f64,
    pub pathway: Pathway,
}

impl Default for Spectrum2dBlock {
    fn default() -> Self {
        Self {
            t2: 0.5,
            pathway: Pathway::Rephasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectionKey {
    #[serde(rename = "full")]
    Full,
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoherenceBlock {
    /// `[ket, bra]` polariton labels, e.g. `["UP_A", "LP_A"]`.
    pub initial: [String; 2],
    pub detection: DetectionKey,
}

impl Default for CoherenceBlock {
    fn default() -> Self {
        Self {
            initial: ["UP_A".into(), "LP_A".into()],
            detection: DetectionKey::Full,
        }
    }
}

impl CoherenceBlock {
    pub fn labels(&self) -> Result<(Polariton, Polariton), CliError> {
        let parse = |s: &str| {
            s.parse::<Polariton>().map_err(|_| CliError::Config {
                key: "coherence.initial".into(),
                reason: format!("unknown polariton label {s:?} (expected UP_A, UP_B, LP_A or LP_B)"),
            })
        };
        Ok((parse(&self.initial[0])?, parse(&self.initial[1])?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeatsBlock {
    /// Detection wavenumbers in cm⁻¹; empty means the four polaritons.
    pub omega3: Vec<f64>,
    /// Lowest beat frequency considered when naming the dominant beat, cm⁻¹.
    pub min_beat: f64,
}

impl Default for BeatsBlock {
    fn default() -> Self {
        Self {
            omega3: Vec::new(),
            min_beat: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImageBlock {
    /// Position of the vertical cut in μm.
    pub x0: f64,
    /// Fit `c_eff` and `delta_d` to the model's cavity frequencies first.
    pub calibrate: bool,
    /// Write every n-th waiting time of the dynamics stack.
    pub frame_stride: usize,
}

impl Default for ImageBlock {
    fn default() -> Self {
        Self {
            x0: 25.0,
            calibrate: true,
            frame_stride: 10,
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

impl RunConfig {
    /// Range checks of every block.
    pub fn validate(&self) -> Result<(), CliError> {
        self.geometry.validate().map_err(|e| bad("geometry", e.to_string()))?;
        self.model.validate().map_err(|e| match e {
            ModelError::InvalidParam { key, reason } => bad(&format!("model.{key}"), reason),
            e => bad("model", e.to_string()),
        })?;
        self.scan.validate().map_err(|e| bad("scan", e.to_string()))?;
        if self.modes.count < 2 {
            return Err(bad("modes.count", "need at least 2 bright modes"));
        }
        let [a, b] = self.calibrate.targets;
        if !(a > 0.0 && b > 0.0 && a > b) {
            return Err(bad("calibrate.targets", "need [A, B] in cm^-1 with A > B > 0"));
        }
        if !(self.spectrum2d.t2.is_finite() && self.spectrum2d.t2 >= 0.0) {
            return Err(bad("spectrum2d.t2", "waiting time must be >= 0 ps"));
        }
        self.coherence.labels()?;
        if !(self.beats.min_beat >= 0.0) {
            return Err(bad("beats.min_beat", "must be >= 0 cm^-1"));
        }
        if !(self.image.x0 >= 0.0 && self.image.x0 < self.geometry.cell) {
            return Err(bad("image.x0", format!("cut must lie in [0, {}) um", self.geometry.cell)));
        }
        if self.image.frame_stride == 0 {
            return Err(bad("image.frame_stride", "must be >= 1"));
        }
        Ok(())
    }
}

/// Parses `text`, applies `key=value` overrides and validates.
pub fn parse_str(text: &str, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut table: Table = toml::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: RunConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Syntax(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a run file. `None` means all defaults.
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io {
            path: p.to_path_buf(),
            reason: e.to_string(),
        })?,
        None => String::new(),
    };
    parse_str(&text, overrides)
}

/// `a.b.c=value`; the value is read as TOML and falls back to a bare string.
fn apply_override(table: &mut Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| bad(item, "override must look like key=value"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad(key, "empty key segment"));
    }
    let value = match toml::from_str::<Table>(&format!("v = {}", raw.trim())) {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.to_string())),
        Err(_) => Value::String(raw.trim().to_string()),
    };
    let mut node = table;
    for p in &parts[..parts.len() - 1] {
        let entry = node.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        node = match entry {
            Value::Table(t) => t,
            _ => return Err(bad(key, format!("{p} is not a table"))),
        };
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_str("[model]\n", &[]).unwrap();
        assert_eq!(c.model.omega_a, 1998.2);
        assert_eq!(c.model.omega_b, 1971.4);
        assert_eq!(c.model.omega_0, 1983.0);
        assert_eq!(c.model.g, 18.7);
        assert_eq!(c.model.n_max, 2);
    }

    #[test]
    fn gamma_maps_positionally() {
        let c = parse_str("[model]\ngamma = [0.2, 0.2, 0.1, 0.1, 0.5]\n", &[]).unwrap();
        assert_eq!(c.model.gamma, [0.2, 0.2, 0.1, 0.1, 0.5]);
    }

    #[test]
    fn range_and_key_errors_name_the_key() {
        let e = parse_str("[model]\nn_max = 0\n", &[]).unwrap_err().to_string();
        assert!(e.contains("n_max"), "{e}");
        let e = parse_str("[model]\nomega_C = 3.0\n", &[]).unwrap_err().to_string();
        assert!(e.contains("omega_C"), "{e}");
        let e = parse_str("bogus = 1\n", &[]).unwrap_err().to_string();
        assert!(e.contains("bogus"), "{e}");
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = parse_str(
            "[model]\ng = 10.0\n",
            &["model.g=20".into(), "coherence.initial=[\"UP_B\", \"LP_B\"]".into(), "output_dir=res".into()],
        )
        .unwrap();
        assert_eq!(c.model.g, 20.0);
        assert_eq!(c.coherence.labels().unwrap(), (Polariton::UpB, Polariton::LpB));
        assert_eq!(c.output_dir, PathBuf::from("res"));
        assert!(parse_str("", &["model.nope=1".into()]).is_err());
        assert!(parse_str("", &["model.g".into()]).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(parse_str(&text, &[]).unwrap(), c);
    }
}
