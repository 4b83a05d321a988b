//! The IFM schemes, each behind the common [`Protocol`] trait.
//!
//! Every scheme is also available as a plain function (`ev_mz`,
//! `zeno_cavity`, ...). The [`Registry`] maps CLI-facing names to boxed
//! protocol objects and rejects parameters that a protocol does not use.

mod ev_mz;
mod fabry_perot;
mod hardy;
mod imaging;
mod penrose;
mod registry;
mod zeno;

use std::fmt;

use serde::Serialize;

use crate::circuits::{run_exact, Circuit, OutcomeDistribution, REPORT_FLOOR};
use crate::elements::{ObjectKind, ObjectSpec};
use crate::error::{IfmError, Result};
use crate::qcore::{Amplitude, ModeState};

pub use ev_mz::{ev_mz, ev_mz_setup, EvMz};
pub use fabry_perot::{
    cavity_response, fabry_perot, fabry_perot_setup, CavityResponse, FabryPerot,
};
pub use hardy::{hardy, hardy_setup, Hardy, HardyOutcome};
pub use imaging::{imaging_dose_sweep, Imaging, ImagingRow};
pub use penrose::{penrose_dud, penrose_setup, Penrose};
pub use registry::Registry;
pub use zeno::{zeno_cavity, zeno_setup, Zeno};

/// Summary of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub distribution: OutcomeDistribution,
    /// Probability of the click that announces the object.
    pub p_detect_object: f64,
    /// Total mass absorbed by the object.
    pub p_explosion: f64,
    pub p_inconclusive: f64,
    pub efficiency_eta: f64,
    /// Announcing-click probability with the object removed.
    pub false_positive: f64,
}

impl ProtocolResult {
    /// Classifies `distribution` by the announcing detector and the object's sink.
    pub fn classify(
        distribution: OutcomeDistribution,
        detector: &str,
        sink: &str,
        false_positive: f64,
    ) -> Self {
        let p_detect_object = distribution.detector(detector);
        let p_explosion = distribution.sink_total(sink);
        let p_inconclusive = distribution.total() - p_detect_object - p_explosion;
        ProtocolResult {
            efficiency_eta: eta(p_detect_object, p_explosion),
            distribution,
            p_detect_object,
            p_explosion,
            p_inconclusive,
            false_positive,
        }
    }
}

// Denominators below the report floor are rounding noise and count as zero.
fn eta(detect: f64, explode: f64) -> f64 {
    let denom = detect + explode;
    if denom >= REPORT_FLOOR {
        (detect / denom).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// `p_detect / (p_detect + p_explosion)`, zero when both vanish.
///
/// Only the detect/explode ratio matters, so re-running on inconclusive
/// outcomes leaves the figure unchanged.
pub fn efficiency(result: &ProtocolResult) -> f64 {
    eta(result.p_detect_object, result.p_explosion)
}

/// A circuit together with the state that enters it.
#[derive(Clone, Debug)]
pub struct Setup {
    pub circuit: Circuit,
    pub initial: ModeState,
}

impl Setup {
    pub fn run_exact(&self) -> Result<OutcomeDistribution> {
        run_exact(&self.circuit, &self.initial)
    }
}

/// Parameters a protocol may accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Object,
    Bounces,
    Reflectivity,
    Detuning,
    Transmittance,
}

impl ParamKind {
    pub const ALL: [ParamKind; 5] = [
        ParamKind::Object,
        ParamKind::Bounces,
        ParamKind::Reflectivity,
        ParamKind::Detuning,
        ParamKind::Transmittance,
    ];

    /// Name used in reports and sweep selectors.
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Object => "object",
            ParamKind::Bounces => "N",
            ParamKind::Reflectivity => "R",
            ParamKind::Detuning => "phi",
            ParamKind::Transmittance => "t",
        }
    }

    pub fn flag(self) -> String {
        format!("--{}", self.name())
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter values supplied by the caller; `None` means "use the default".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub object: Option<ObjectKind>,
    pub bounces: Option<usize>,
    pub reflectivity: Option<f64>,
    pub detuning: Option<f64>,
    pub transmittance: Option<Amplitude>,
}

impl Params {
    pub fn provided(&self) -> Vec<ParamKind> {
        let mut out = Vec::new();
        if self.object.is_some() {
            out.push(ParamKind::Object);
        }
        if self.bounces.is_some() {
            out.push(ParamKind::Bounces);
        }
        if self.reflectivity.is_some() {
            out.push(ParamKind::Reflectivity);
        }
        if self.detuning.is_some() {
            out.push(ParamKind::Detuning);
        }
        if self.transmittance.is_some() {
            out.push(ParamKind::Transmittance);
        }
        out
    }

    /// `self`, with every unset field taken from `defaults`.
    pub fn merged_over(&self, defaults: &Params) -> Params {
        Params {
            object: self.object.or(defaults.object),
            bounces: self.bounces.or(defaults.bounces),
            reflectivity: self.reflectivity.or(defaults.reflectivity),
            detuning: self.detuning.or(defaults.detuning),
            transmittance: self.transmittance.or(defaults.transmittance),
        }
    }

    /// Sets a numeric parameter from a sweep value.
    pub fn set_numeric(&mut self, kind: ParamKind, value: f64) -> Result<()> {
        match kind {
            ParamKind::Object => {
                return Err(IfmError::config("--object cannot be swept numerically"))
            }
            ParamKind::Bounces => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(IfmError::domain(format!(
                        "N = {value} is not a positive integer"
                    )));
                }
                self.bounces = Some(value as usize);
            }
            ParamKind::Reflectivity => self.reflectivity = Some(value),
            ParamKind::Detuning => self.detuning = Some(value),
            ParamKind::Transmittance => self.transmittance = Some(Amplitude::new(value, 0.0)),
        }
        Ok(())
    }

    /// Value of `kind` as a number, for report columns.
    pub fn numeric(&self, kind: ParamKind) -> Option<f64> {
        match kind {
            ParamKind::Object => None,
            ParamKind::Bounces => self.bounces.map(|n| n as f64),
            ParamKind::Reflectivity => self.reflectivity,
            ParamKind::Detuning => self.detuning,
            ParamKind::Transmittance => self.transmittance.map(|t| t.re),
        }
    }

    /// Resolves the object, pairing `--t` with semitransparent objects only.
    pub fn object_or(&self, default: ObjectKind) -> Result<ObjectSpec> {
        let kind = self.object.unwrap_or(default);
        match (kind, self.transmittance) {
            (ObjectKind::Semitransparent, Some(t)) => ObjectSpec::semitransparent(t),
            (ObjectKind::Semitransparent, None) => {
                Err(IfmError::config("--object semitransparent requires --t"))
            }
            (_, Some(_)) => Err(IfmError::config(
                "--t only applies to --object semitransparent",
            )),
            (kind, None) => Ok(ObjectSpec::of_kind(kind)),
        }
    }
}

/// Result of evaluating a protocol through the registry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub distribution: OutcomeDistribution,
    pub result: Option<ProtocolResult>,
    /// Protocol-specific figures (dose ratio, annihilation probability, ...).
    pub extras: Vec<(String, f64)>,
}

impl From<ProtocolResult> for Evaluation {
    fn from(result: ProtocolResult) -> Self {
        Evaluation {
            distribution: result.distribution.clone(),
            result: Some(result),
            extras: Vec::new(),
        }
    }
}

/// One interaction-free measurement scheme.
pub trait Protocol: Send + Sync {
    /// Registry key, e.g. `"ev-mz"`.
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Parameters this protocol reads; anything else is rejected.
    fn params(&self) -> &'static [ParamKind];

    /// The circuit and input state realizing the device for `params`.
    fn setup(&self, params: &Params) -> Result<Setup>;

    fn evaluate(&self, params: &Params) -> Result<Evaluation>;

    /// Values used for parameters the caller leaves unset.
    fn defaults(&self) -> Params {
        Params::default()
    }

    /// Parameters that can be swept numerically.
    fn sweepable(&self) -> Vec<ParamKind> {
        self.params()
            .iter()
            .copied()
            .filter(|k| *k != ParamKind::Object)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(detect: f64, explode: f64) -> ProtocolResult {
        ProtocolResult {
            distribution: OutcomeDistribution::default(),
            p_detect_object: detect,
            p_explosion: explode,
            p_inconclusive: 1.0 - detect - explode,
            efficiency_eta: eta(detect, explode),
            false_positive: 0.0,
        }
    }

    #[test]
    fn efficiency_edge_cases() {
        assert_eq!(efficiency(&result(0.0, 0.0)), 0.0);
        assert_eq!(efficiency(&result(0.3, 0.0)), 1.0);
        assert_eq!(efficiency(&result(0.25, 0.5)), 1.0 / 3.0);
    }

    #[test]
    fn efficiency_ignores_inconclusive_mass() {
        // Conditioning on a conclusive outcome rescales detect and explode alike.
        let full = result(0.25, 0.5);
        let scale = 1.0 / 0.75;
        let conditional = result(0.25 * scale, 0.5 * scale);
        assert!((efficiency(&full) - efficiency(&conditional)).abs() < 1e-15);
    }

    #[test]
    fn object_resolution() {
        let p = Params::default();
        assert_eq!(
            p.object_or(ObjectKind::Opaque).unwrap().kind,
            ObjectKind::Opaque
        );
        let semi = Params {
            object: Some(ObjectKind::Semitransparent),
            ..Params::default()
        };
        assert!(semi.object_or(ObjectKind::Opaque).is_err());
        let stray_t = Params {
            transmittance: Some(Amplitude::new(0.5, 0.0)),
            ..Params::default()
        };
        assert!(stray_t.object_or(ObjectKind::Opaque).is_err());
    }

    #[test]
    fn sweep_values_for_n_must_be_integers() {
        let mut p = Params::default();
        assert!(p.set_numeric(ParamKind::Bounces, 2.5).is_err());
        assert!(p.set_numeric(ParamKind::Bounces, 0.0).is_err());
        p.set_numeric(ParamKind::Bounces, 100.0).unwrap();
        assert_eq!(p.bounces, Some(100));
        assert_eq!(ParamKind::from_name("n"), Some(ParamKind::Bounces));
    }
}
