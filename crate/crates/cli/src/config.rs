//! Run configurations: JSON documents with all physical units fixed by the
//! schema (eV, nm, keV, rad/fs) and carried in the field names.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qpinem_core::coupling::{SILVER_EPS_B, SILVER_PLASMA_EV};
use qpinem_core::Distribution64;

use crate::output::Format;
use crate::{Failure, RunArgs, RunResult};

/// Solver tolerance when neither the config nor --tol names one.
pub(crate) const DEFAULT_TOL: f64 = 1e-9;

/// Everything a runner needs besides its own config: where and how to
/// write, the resolved tolerance, and the reproducibility header fields.
pub(crate) struct Ctx {
    pub out_dir: PathBuf,
    pub format: Format,
    pub tol: f64,
    pub config_echo: String,
    pub config_sha256: String,
}

/// Distribution truncation tail derived from the solver tolerance.
pub(crate) fn tail_eps(tol: f64) -> f64 {
    (tol * 1e-3).clamp(1e-14, 1e-8)
}

/// Configs that carry a tolerance expose it for the --tol override; the
/// resolved value is written back so the echoed config reproduces the run.
pub(crate) trait Tolerated {
    fn tol_slot(&mut self) -> Option<&mut Option<f64>> {
        None
    }
}

pub(crate) fn load<C>(args: &RunArgs) -> RunResult<(Ctx, C)>
where
    C: DeserializeOwned + Serialize + Tolerated,
{
    let bytes = std::fs::read(&args.config).map_err(|e| {
        Failure::Validation(format!("cannot read config {}: {e}", args.config.display()))
    })?;
    let sha: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let mut cfg: C = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Validation(format!("config {}: {e}", args.config.display())))?;
    let mut tol = DEFAULT_TOL;
    if let Some(slot) = cfg.tol_slot() {
        if let Some(t) = args.tol.or(*slot) {
            tol = t;
        }
        *slot = Some(tol);
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Failure::Validation(format!("tol must lie in (0, 1), got {tol}")));
    }
    let echo = serde_json::to_string(&cfg)
        .map_err(|e| Failure::Validation(format!("cannot echo config: {e}")))?;
    std::fs::create_dir_all(&args.out).map_err(|e| {
        Failure::Validation(format!("cannot create output dir {}: {e}", args.out.display()))
    })?;
    Ok((
        Ctx {
            out_dir: args.out.clone(),
            format: args.format,
            tol,
            config_echo: echo,
            config_sha256: sha,
        },
        cfg,
    ))
}

/// Photon statistics selector.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub(crate) enum Statistics {
    Fock { n: u32 },
    Coherent { nbar: f64 },
    Thermal { nbar: f64 },
    Custom { probs: Vec<f64> },
}

impl Statistics {
    pub fn build(&self, tail_eps: f64) -> RunResult<Distribution64> {
        Ok(match self {
            Statistics::Fock { n } => Distribution64::fock(*n as usize)?,
            Statistics::Coherent { nbar } => Distribution64::coherent(*nbar, tail_eps)?,
            Statistics::Thermal { nbar } => Distribution64::thermal(*nbar, tail_eps)?,
            Statistics::Custom { probs } => Distribution64::custom(probs.clone())?,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Statistics::Fock { .. } => "fock",
            Statistics::Coherent { .. } => "coherent",
            Statistics::Thermal { .. } => "thermal",
            Statistics::Custom { .. } => "custom",
        }
    }
}

/// Grid axis: either an explicit list or an inclusive linear range.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub(crate) enum Axis {
    List(Vec<f64>),
    Linspace { min: f64, max: f64, count: usize },
}

impl Axis {
    pub fn values(&self, name: &str) -> RunResult<Vec<f64>> {
        let vals = match self {
            Axis::List(v) => v.clone(),
            Axis::Linspace { min, max, count } => {
                if *count < 2 {
                    return Err(Failure::Validation(format!(
                        "{name}: a linear range needs count >= 2, got {count}"
                    )));
                }
                if !(max > min) || !min.is_finite() || !max.is_finite() {
                    return Err(Failure::Validation(format!(
                        "{name}: need finite max > min, got [{min}, {max}]"
                    )));
                }
                let step = (max - min) / (*count as f64 - 1.0);
                (0..*count).map(|i| min + step * i as f64).collect()
            }
        };
        if vals.is_empty() {
            return Err(Failure::Validation(format!("{name}: axis is empty")));
        }
        if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Failure::Validation(format!("{name}: non-finite value {bad}")));
        }
        Ok(vals)
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SpectrumConfig {
    pub statistics: Statistics,
    /// |beta0| grid; sqrt(nbar)|beta0| instead when scaled_by_sqrt_nbar.
    pub beta0_abs: Axis,
    #[serde(default)]
    pub beta0_phase_rad: f64,
    #[serde(default)]
    pub scaled_by_sqrt_nbar: bool,
    pub l_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub broaden: Option<BroadenConfig>,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Tolerated for SpectrumConfig {
    fn tol_slot(&mut self) -> Option<&mut Option<f64>> {
        Some(&mut self.tol)
    }
}

fn default_fwhm() -> f64 {
    qpinem_core::spectra::DEFAULT_FWHM
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BroadenConfig {
    /// Lorentzian FWHM in units of the mode quantum.
    #[serde(default = "default_fwhm")]
    pub fwhm: f64,
    /// Energy axis in units of the mode quantum, loss positive.
    pub energy_min: f64,
    pub energy_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum KindName {
    Fock,
    Coherent,
    Thermal,
}

impl KindName {
    pub fn label(self) -> &'static str {
        match self {
            KindName::Fock => "fock",
            KindName::Coherent => "coherent",
            KindName::Thermal => "thermal",
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Fig1Config {
    pub kinds: Vec<KindName>,
    /// Integer mean-occupation axis 0..=nbar_max, capped at 50.
    pub nbar_max: u32,
    pub beta0_abs: Axis,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Tolerated for Fig1Config {
    fn tol_slot(&mut self) -> Option<&mut Option<f64>> {
        Some(&mut self.tol)
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SweepConfig {
    pub statistics: Vec<Statistics>,
    pub beta0_abs: Axis,
    pub l_max: usize,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Tolerated for SweepConfig {
    fn tol_slot(&mut self) -> Option<&mut Option<f64>> {
        Some(&mut self.tol)
    }
}

fn default_cavity_beta0() -> f64 {
    0.7
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CavityQeConfig {
    pub n_emitters: usize,
    /// Cavity decay over the collective pump rate, the figure-axis ratio
    /// kappa/(N g).
    pub kappa_over_ng: f64,
    #[serde(default = "default_cavity_beta0")]
    pub beta0_abs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    /// Dimensionless gt samples; a bracketing default is derived from N
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<Vec<f64>>,
    /// Emit an electron spectrum every this many trajectory samples.
    #[serde(default = "default_stride")]
    pub spectra_stride: usize,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Tolerated for CavityQeConfig {
    fn tol_slot(&mut self) -> Option<&mut Option<f64>> {
        Some(&mut self.tol)
    }
}

fn silver_plasma() -> f64 {
    SILVER_PLASMA_EV
}

fn silver_eps_b() -> f64 {
    SILVER_EPS_B
}

/// Electron-beam scan appended to a mode estimate.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct BetaScan {
    pub kinetic_kev: f64,
    pub b_nm: Axis,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub(crate) enum CouplingConfig {
    /// Coupling of a beam electron to a point dipole mode.
    Dipole {
        hbar_omega0_ev: f64,
        px_e_nm: f64,
        pz_e_nm: f64,
        kinetic_kev: f64,
        b_nm: Axis,
    },
    /// Loss probability to a triply degenerate dipole mode.
    Eels {
        hbar_omega0_ev: f64,
        p_e_nm: f64,
        kinetic_kev: f64,
        b_nm: Axis,
    },
    /// Quasistatic prolate-spheroid plasmon estimate.
    Ellipsoid {
        aspect_ratio: f64,
        long_axis_nm: f64,
        #[serde(default = "silver_plasma")]
        plasma_energy_ev: f64,
        #[serde(default = "silver_eps_b")]
        eps_b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scan: Option<BetaScan>,
    },
    /// Antisymmetric thin-shell plasmon estimate.
    Shell {
        thickness_nm: f64,
        radius_nm: f64,
        eps_core: f64,
        #[serde(default = "silver_plasma")]
        plasma_energy_ev: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scan: Option<BetaScan>,
    },
    /// Purcell enhancement and the resulting kappa/g.
    Purcell {
        q: f64,
        eps: f64,
        rho0: f64,
        hbar_omega0_ev: f64,
        hbar_g0_ev: f64,
    },
    /// Driven steady-state populations against intensity.
    Saturation {
        intensity_over_is: Axis,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hbar_kappa_ev: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p_e_nm: Option<f64>,
    },
}

impl Tolerated for CouplingConfig {}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RetrieveConfig {
    /// CSV whose final two columns are (l, P_l).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<PathBuf>,
    /// Inline [l, P_l] pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(i64, f64)>>,
    pub ells: Vec<usize>,
}

impl Tolerated for RetrieveConfig {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        let list: Axis = serde_json::from_str("[0.1, 0.2]").unwrap();
        assert_eq!(list.values("a").unwrap(), vec![0.1, 0.2]);
        let lin: Axis = serde_json::from_str(r#"{"min": 0.0, "max": 1.0, "count": 5}"#).unwrap();
        let v = lin.values("a").unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], 1.0);
        assert_eq!(v[2], 0.5);
        let empty: Axis = serde_json::from_str("[]").unwrap();
        assert!(empty.values("a").is_err());
        let bad: Axis = serde_json::from_str(r#"{"min": 1.0, "max": 0.0, "count": 3}"#).unwrap();
        assert!(bad.values("a").is_err());
    }

    #[test]
    fn statistics_build_and_labels() {
        let s: Statistics = serde_json::from_str(r#"{"kind": "fock", "n": 3}"#).unwrap();
        assert_eq!(s.label(), "fock");
        assert_eq!(s.build(1e-12).unwrap().mean(), 3.0);
        let s: Statistics = serde_json::from_str(r#"{"kind": "thermal", "nbar": 2.0}"#).unwrap();
        let d = s.build(1e-12).unwrap();
        assert!((d.mean() - 2.0).abs() < 1e-12);
        let bad = serde_json::from_str::<Statistics>(r#"{"kind": "squeezed", "nbar": 1.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let raw = r#"{"statistics": {"kind": "fock", "n": 1}, "beta0_abs": [0.1],
                      "l_max": 4, "phase": 0.0}"#;
        let parsed = serde_json::from_str::<SpectrumConfig>(raw);
        assert!(parsed.is_err());
    }

    #[test]
    fn coupling_tasks_parse() {
        let raw = r#"{"task": "purcell", "q": 1e4, "eps": 12.0, "rho0": 2.6775,
                      "hbar_omega0_ev": 1.0, "hbar_g0_ev": 1e-5}"#;
        let cfg: CouplingConfig = serde_json::from_str(raw).unwrap();
        assert!(matches!(cfg, CouplingConfig::Purcell { .. }));
        let raw = r#"{"task": "ellipsoid", "aspect_ratio": 5.0, "long_axis_nm": 20.0}"#;
        let cfg: CouplingConfig = serde_json::from_str(raw).unwrap();
        match cfg {
            CouplingConfig::Ellipsoid { plasma_energy_ev, eps_b, scan, .. } => {
                assert_eq!(plasma_energy_ev, SILVER_PLASMA_EV);
                assert_eq!(eps_b, SILVER_EPS_B);
                assert!(scan.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tail_eps_tracks_tol() {
        assert!((tail_eps(1e-9) - 1e-12).abs() < 1e-27);
        assert_eq!(tail_eps(1e-3), 1e-8);
        assert_eq!(tail_eps(1e-12), 1e-14);
    }
}
