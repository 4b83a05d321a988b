use crate::circuits::{repeat_block, Circuit};
use crate::elements::{object_channel, zeno_coupler, ObjectKind, ObjectSpec};
use crate::error::Result;
use crate::qcore::{ModeLabel, ModeState};

use super::{Evaluation, ParamKind, Params, Protocol, ProtocolResult, Setup};

pub const CAVITY_A: &str = "cavity_A";
pub const CAVITY_B: &str = "cavity_B";
pub const DEFAULT_BOUNCES: usize = 10;

/// Two coupled cavities; the photon starts in A and the object sits in B.
///
/// Each of the `n` bounces rotates A into B by π/2n and then lets the object
/// act on B. The detector reads cavity A once, after the last bounce. Cavity
/// B also carries a detector label so the transferred mass shows up by name.
pub fn zeno_setup(n: usize, object: &ObjectSpec) -> Result<Setup> {
    let coupler = zeno_coupler(n)?;
    let modes = || vec![ModeLabel::new(CAVITY_A), ModeLabel::new(CAVITY_B)];
    let bounce = vec![
        coupler.unitary(CAVITY_A.into(), CAVITY_B.into()).into(),
        object_channel(object, CAVITY_B.into())?,
    ];
    let circuit = Circuit::single(
        modes(),
        vec![repeat_block(bounce, n)?],
        [
            (CAVITY_A.into(), CAVITY_A.to_string()),
            (CAVITY_B.into(), CAVITY_B.to_string()),
        ],
    )?;
    Ok(Setup {
        circuit,
        initial: ModeState::basis(modes(), &CAVITY_A.into())?,
    })
}

/// Zeno-enhanced bomb tester. With an opaque object the photon survives in
/// A with probability cos^2n(π/2n).
pub fn zeno_cavity(n: usize, object: &ObjectSpec) -> Result<ProtocolResult> {
    let dist = zeno_setup(n, object)?.run_exact()?;
    let empty = zeno_setup(n, &ObjectSpec::absent())?.run_exact()?;
    Ok(ProtocolResult::classify(
        dist,
        CAVITY_A,
        &object.sink_label,
        empty.detector(CAVITY_A),
    ))
}

pub struct Zeno;

impl Protocol for Zeno {
    fn name(&self) -> &'static str {
        "zeno"
    }

    fn description(&self) -> &'static str {
        "Two coupled cavities, N bounces, object in the second cavity"
    }

    fn params(&self) -> &'static [ParamKind] {
        &[
            ParamKind::Bounces,
            ParamKind::Object,
            ParamKind::Transmittance,
        ]
    }

    fn defaults(&self) -> Params {
        Params {
            object: Some(ObjectKind::Opaque),
            bounces: Some(DEFAULT_BOUNCES),
            ..Params::default()
        }
    }

    fn setup(&self, params: &Params) -> Result<Setup> {
        zeno_setup(
            params.bounces.unwrap_or(DEFAULT_BOUNCES),
            &params.object_or(ObjectKind::Opaque)?,
        )
    }

    fn evaluate(&self, params: &Params) -> Result<Evaluation> {
        let n = params.bounces.unwrap_or(DEFAULT_BOUNCES);
        Ok(zeno_cavity(n, &params.object_or(ObjectKind::Opaque)?)?.into())
    }
}
