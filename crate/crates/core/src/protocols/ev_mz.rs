use std::f64::consts::FRAC_PI_4;

use crate::circuits::Circuit;
use crate::elements::{beam_splitter, object_channel, phase_shifter, ObjectKind, ObjectSpec};
use crate::error::Result;
use crate::qcore::{ModeLabel, ModeState};

use super::{Evaluation, ParamKind, Params, Protocol, ProtocolResult, Setup};

pub(crate) const UPPER: &str = "arm_upper";
pub(crate) const LOWER: &str = "arm_lower";
pub(crate) const DARK: &str = "dark";
pub(crate) const BRIGHT: &str = "bright";

/// Mach-Zehnder wiring shared by the bomb tester and the dud test.
///
/// The photon enters on the upper arm; the object sits on the lower arm.
/// After the recombiner the upper mode is the dark port and the lower mode
/// the bright port.
pub(crate) fn mach_zehnder(object: &ObjectSpec) -> Result<Setup> {
    let modes = || vec![ModeLabel::new(UPPER), ModeLabel::new(LOWER)];
    let ports = || (ModeLabel::new(UPPER), ModeLabel::new(LOWER));
    let elements = vec![
        beam_splitter(FRAC_PI_4, ports())?.into(),
        object_channel(object, LOWER.into())?,
        // tuning plate; zero phase already gives a dark upper port in this convention
        phase_shifter(0.0, UPPER.into()).into(),
        beam_splitter(FRAC_PI_4, ports())?.into(),
    ];
    let circuit = Circuit::single(
        modes(),
        elements,
        [
            (UPPER.into(), DARK.to_string()),
            (LOWER.into(), BRIGHT.to_string()),
        ],
    )?;
    Ok(Setup {
        circuit,
        initial: ModeState::basis(modes(), &UPPER.into())?,
    })
}

pub fn ev_mz_setup(object: &ObjectSpec) -> Result<Setup> {
    mach_zehnder(object)
}

/// Elitzur-Vaidman bomb tester: a dark-port click announces the object.
pub fn ev_mz(object: &ObjectSpec) -> Result<ProtocolResult> {
    let dist = ev_mz_setup(object)?.run_exact()?;
    let empty = ev_mz_setup(&ObjectSpec::absent())?.run_exact()?;
    Ok(ProtocolResult::classify(
        dist,
        DARK,
        &object.sink_label,
        empty.detector(DARK),
    ))
}

pub struct EvMz;

impl Protocol for EvMz {
    fn name(&self) -> &'static str {
        "ev-mz"
    }

    fn description(&self) -> &'static str {
        "Mach-Zehnder bomb tester with the object on one arm"
    }

    fn params(&self) -> &'static [ParamKind] {
        &[ParamKind::Object, ParamKind::Transmittance]
    }

    fn defaults(&self) -> Params {
        Params {
            object: Some(ObjectKind::Opaque),
            ..Params::default()
        }
    }

    fn setup(&self, params: &Params) -> Result<Setup> {
        ev_mz_setup(&params.object_or(ObjectKind::Opaque)?)
    }

    fn evaluate(&self, params: &Params) -> Result<Evaluation> {
        Ok(ev_mz(&params.object_or(ObjectKind::Opaque)?)?.into())
    }
}
