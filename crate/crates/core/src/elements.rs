//! Constructors for the optical elements shared by every protocol.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuits::Element;
use crate::error::{IfmError, Result};
use crate::qcore::{AbsorptionChannel, Amplitude, ModeLabel, Unitary, TOLERANCE};

/// Symmetric beam splitter `[[cos θ, i sin θ], [i sin θ, cos θ]]`.
///
/// θ = π/4 is the 50/50 splitter. With this convention two 50/50 splitters
/// in a row send an input on the first mode entirely to the second.
pub fn beam_splitter(theta: f64, modes: (ModeLabel, ModeLabel)) -> Result<Unitary> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(IfmError::domain(format!(
            "beam splitter angle {theta} outside [0, pi/2]"
        )));
    }
    let (t, r) = (theta.cos(), theta.sin());
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Amplitude::new(t, 0.0),
            Amplitude::new(0.0, r),
            Amplitude::new(0.0, r),
            Amplitude::new(t, 0.0),
        ],
    );
    Unitary::new(vec![modes.0, modes.1], m)
}

/// Multiplies one mode by `exp(i φ)`.
pub fn phase_shifter(phi: f64, mode: ModeLabel) -> Unitary {
    Unitary::new(
        vec![mode],
        DMatrix::from_element(1, 1, Amplitude::from_polar(1.0, phi)),
    )
    .expect("a unit-modulus phase is unitary")
}

/// Real rotation `[[cos θ, -sin θ], [sin θ, cos θ]]`.
pub fn rotation(theta: f64, modes: (ModeLabel, ModeLabel)) -> Unitary {
    let (c, s) = (theta.cos(), theta.sin());
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Amplitude::new(c, 0.0),
            Amplitude::new(-s, 0.0),
            Amplitude::new(s, 0.0),
            Amplitude::new(c, 0.0),
        ],
    );
    Unitary::new(vec![modes.0, modes.1], m).expect("a real rotation is unitary")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Absent,
    Opaque,
    Exploding,
    Semitransparent,
    Dud,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 5] = [
        ObjectKind::Absent,
        ObjectKind::Opaque,
        ObjectKind::Exploding,
        ObjectKind::Semitransparent,
        ObjectKind::Dud,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Absent => "absent",
            ObjectKind::Opaque => "opaque",
            ObjectKind::Exploding => "exploding",
            ObjectKind::Semitransparent => "semitransparent",
            ObjectKind::Dud => "dud",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectKind {
    type Err = IfmError;

    fn from_str(s: &str) -> Result<Self> {
        ObjectKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| IfmError::config(format!("unknown object kind `{s}`")))
    }
}

/// What sits in the interaction region.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectSpec {
    pub kind: ObjectKind,
    /// Amplitude transmittance; only read for semitransparent objects.
    pub transmittance: Amplitude,
    pub sink_label: String,
}

impl ObjectSpec {
    pub fn of_kind(kind: ObjectKind) -> Self {
        let sink = match kind {
            ObjectKind::Exploding => "explosion",
            _ => "absorbed_by_object",
        };
        let transmittance = match kind {
            ObjectKind::Absent | ObjectKind::Dud => Amplitude::new(1.0, 0.0),
            _ => Amplitude::new(0.0, 0.0),
        };
        ObjectSpec {
            kind,
            transmittance,
            sink_label: sink.to_string(),
        }
    }

    pub fn absent() -> Self {
        Self::of_kind(ObjectKind::Absent)
    }

    pub fn opaque() -> Self {
        Self::of_kind(ObjectKind::Opaque)
    }

    pub fn exploding() -> Self {
        Self::of_kind(ObjectKind::Exploding)
    }

    pub fn dud() -> Self {
        Self::of_kind(ObjectKind::Dud)
    }

    pub fn semitransparent(t: Amplitude) -> Result<Self> {
        check_transmittance(t)?;
        Ok(ObjectSpec {
            transmittance: t,
            ..Self::of_kind(ObjectKind::Semitransparent)
        })
    }

    pub fn with_sink_label(mut self, label: impl Into<String>) -> Self {
        self.sink_label = label.into();
        self
    }

    /// Amplitude that survives one pass through the object.
    pub fn pass_amplitude(&self) -> Result<Amplitude> {
        Ok(match self.kind {
            ObjectKind::Absent | ObjectKind::Dud => Amplitude::new(1.0, 0.0),
            ObjectKind::Opaque | ObjectKind::Exploding => Amplitude::new(0.0, 0.0),
            ObjectKind::Semitransparent => {
                check_transmittance(self.transmittance)?;
                self.transmittance
            }
        })
    }
}

fn check_transmittance(t: Amplitude) -> Result<()> {
    if !(t.re.is_finite() && t.im.is_finite()) || t.norm() > 1.0 + TOLERANCE {
        return Err(IfmError::domain(format!(
            "transmittance {t} has modulus above 1"
        )));
    }
    Ok(())
}

/// Element representing `spec` placed on `mode`.
///
/// Absent, opaque, exploding and semitransparent objects become absorption
/// channels; a dud is a perfect mirror, i.e. the identity on the arm.
pub fn object_channel(spec: &ObjectSpec, mode: ModeLabel) -> Result<Element> {
    let channel = match spec.kind {
        ObjectKind::Dud => return Ok(Element::Unitary(Unitary::identity(vec![mode])?)),
        ObjectKind::Absent => AbsorptionChannel::new(mode, 0.0, spec.sink_label.clone())?,
        ObjectKind::Opaque | ObjectKind::Exploding => {
            AbsorptionChannel::new(mode, 1.0, spec.sink_label.clone())?
        }
        ObjectKind::Semitransparent => {
            let t = spec.pass_amplitude()?;
            let absorb = (1.0 - t.norm_sqr()).clamp(0.0, 1.0);
            AbsorptionChannel::new(mode, absorb, spec.sink_label.clone())?.with_phase(t.arg())
        }
    };
    Ok(Element::Absorption(channel))
}

/// Per-bounce coupling between the two Zeno cavities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityCoupler {
    theta: f64,
}

impl CavityCoupler {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(IfmError::domain(format!(
                "coupler angle {theta} outside (0, pi/2]"
            )));
        }
        Ok(CavityCoupler { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn unitary(&self, a: ModeLabel, b: ModeLabel) -> Unitary {
        rotation(self.theta, (a, b))
    }
}

/// Coupler whose `n`-fold application moves cavity A completely into B.
pub fn zeno_coupler(n: usize) -> Result<CavityCoupler> {
    if n == 0 {
        return Err(IfmError::domain("number of bounces must be at least 1"));
    }
    CavityCoupler::new(PI / (2.0 * n as f64))
}

/// Two identical lossless Fabry-Perot mirrors and the cavity round-trip detuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorPair {
    reflectivity: f64,
    detuning: f64,
}

impl MirrorPair {
    pub fn new(reflectivity: f64, detuning: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&reflectivity) {
            return Err(IfmError::domain(format!(
                "mirror reflectivity {reflectivity} outside [0, 1)"
            )));
        }
        if !detuning.is_finite() {
            return Err(IfmError::domain("detuning must be finite"));
        }
        Ok(MirrorPair {
            reflectivity,
            detuning,
        })
    }

    /// Intensity reflectivity R.
    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    /// Round-trip phase away from resonance.
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// Amplitude reflection coefficient √R.
    pub fn r(&self) -> f64 {
        self.reflectivity.sqrt()
    }

    /// Amplitude transmission coefficient √(1 − R).
    pub fn tau(&self) -> f64 {
        (1.0 - self.reflectivity).sqrt()
    }
}
