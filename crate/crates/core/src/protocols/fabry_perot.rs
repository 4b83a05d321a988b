use crate::circuits::Circuit;
use crate::elements::{MirrorPair, ObjectKind, ObjectSpec};
use crate::error::{IfmError, Result};
use crate::qcore::{AbsorptionChannel, Amplitude, ModeLabel, ModeState, Unitary};

use super::{Evaluation, ParamKind, Params, Protocol, ProtocolResult, Setup};

pub const INPUT: &str = "input";
pub const REFLECTED: &str = "reflected";
pub const TRANSMITTED: &str = "transmitted";
pub const DEFAULT_REFLECTIVITY: f64 = 0.99;

/// Steady-state amplitude response of the cavity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityResponse {
    pub reflection: Amplitude,
    pub transmission: Amplitude,
}

impl CavityResponse {
    pub fn p_reflect(&self) -> f64 {
        self.reflection.norm_sqr()
    }

    pub fn p_transmit(&self) -> f64 {
        self.transmission.norm_sqr()
    }

    /// Probability lost inside the cavity.
    pub fn p_absorb(&self) -> f64 {
        (1.0 - self.p_reflect() - self.p_transmit()).max(0.0)
    }
}

/// Steady-state response of a cavity holding an object with single-pass
/// amplitude `pass`.
///
/// Mirror convention: reflection from outside is −√R, from inside +√R, and
/// transmission √(1−R). Each traversal of the cavity picks up `pass` and half
/// the round-trip detuning, so an empty cavity at zero detuning is resonant.
/// The bounce series is geometric with ratio of modulus at most R < 1, so it
/// is summed in closed form.
pub fn cavity_response(mirrors: &MirrorPair, pass: Amplitude) -> CavityResponse {
    let r = mirrors.r();
    let tau2 = 1.0 - mirrors.reflectivity();
    let one_way = pass * Amplitude::from_polar(1.0, mirrors.detuning() / 2.0);
    let round_trip = one_way * one_way * mirrors.reflectivity();
    let series = (Amplitude::new(1.0, 0.0) - round_trip).inv();
    CavityResponse {
        reflection: Amplitude::new(-r, 0.0) + one_way * one_way * tau2 * r * series,
        transmission: one_way * tau2 * series,
    }
}

/// Effective circuit reproducing the cavity's steady-state scattering.
///
/// A single unitary sends the input mode to `reflected`/`transmitted` with
/// the cavity's amplitudes; the leftover amplitude stays on `input` and is
/// absorbed by the object.
pub fn fabry_perot_setup(mirrors: &MirrorPair, object: &ObjectSpec) -> Result<Setup> {
    let response = cavity_response(mirrors, object.pass_amplitude()?);
    let modes = || {
        vec![
            ModeLabel::new(INPUT),
            ModeLabel::new(REFLECTED),
            ModeLabel::new(TRANSMITTED),
        ]
    };
    let loss = Amplitude::new(response.p_absorb().sqrt(), 0.0);
    let column = [loss, response.reflection, response.transmission];
    let norm = column.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let column = column.map(|a| a / norm);
    let scatter = Unitary::with_first_column(modes(), &column)?;
    let circuit = Circuit::single(
        modes(),
        vec![
            scatter.into(),
            AbsorptionChannel::new(INPUT.into(), 1.0, object.sink_label.clone())?.into(),
        ],
        [
            (REFLECTED.into(), REFLECTED.to_string()),
            (TRANSMITTED.into(), TRANSMITTED.to_string()),
        ],
    )?;
    Ok(Setup {
        circuit,
        initial: ModeState::basis(modes(), &INPUT.into())?,
    })
}

/// Cavity bomb tester: a reflected photon announces the object. The
/// false-positive rate is the empty cavity's reflection at the same detuning.
pub fn fabry_perot(mirrors: &MirrorPair, object: &ObjectSpec) -> Result<ProtocolResult> {
    if object.kind == ObjectKind::Dud {
        return Err(IfmError::domain("a dud has no meaning inside the cavity"));
    }
    let dist = fabry_perot_setup(mirrors, object)?.run_exact()?;
    let false_positive = cavity_response(mirrors, Amplitude::new(1.0, 0.0)).p_reflect();
    Ok(ProtocolResult::classify(
        dist,
        REFLECTED,
        &object.sink_label,
        false_positive,
    ))
}

fn mirrors(params: &Params) -> Result<MirrorPair> {
    MirrorPair::new(
        params.reflectivity.unwrap_or(DEFAULT_REFLECTIVITY),
        params.detuning.unwrap_or(0.0),
    )
}

pub struct FabryPerot;

impl Protocol for FabryPerot {
    fn name(&self) -> &'static str {
        "fabry-perot"
    }

    fn description(&self) -> &'static str {
        "Single high-finesse cavity, transparent when empty and on resonance"
    }

    fn params(&self) -> &'static [ParamKind] {
        &[
            ParamKind::Reflectivity,
            ParamKind::Detuning,
            ParamKind::Object,
            ParamKind::Transmittance,
        ]
    }

    fn defaults(&self) -> Params {
        Params {
            object: Some(ObjectKind::Opaque),
            reflectivity: Some(DEFAULT_REFLECTIVITY),
            detuning: Some(0.0),
            ..Params::default()
        }
    }

    fn setup(&self, params: &Params) -> Result<Setup> {
        fabry_perot_setup(&mirrors(params)?, &params.object_or(ObjectKind::Opaque)?)
    }

    fn evaluate(&self, params: &Params) -> Result<Evaluation> {
        Ok(fabry_perot(&mirrors(params)?, &params.object_or(ObjectKind::Opaque)?)?.into())
    }
}
