use crate::elements::{ObjectKind, ObjectSpec};
use crate::error::{IfmError, Result};

use super::ev_mz::{mach_zehnder, DARK};
use super::{Evaluation, ParamKind, Params, Protocol, ProtocolResult, Setup};

/// Mach-Zehnder wiring in which the tested object is itself the lower arm
/// mirror. A dud reflects perfectly and restores the interference; a live
/// bomb cannot act as a mirror.
///
/// This differs from `ev_mz` with an absent object only in bookkeeping:
/// there the arm keeps its own mirror and nothing sits on it, here the
/// mirror *is* the object. Both give `{bright: 1}`.
pub fn penrose_setup(object: &ObjectSpec) -> Result<Setup> {
    match object.kind {
        ObjectKind::Exploding | ObjectKind::Dud => mach_zehnder(object),
        other => Err(IfmError::domain(format!(
            "dud test takes an exploding object or a dud, not `{other}`"
        ))),
    }
}

/// A dark-port click announces "not a dud".
pub fn penrose_dud(object: &ObjectSpec) -> Result<ProtocolResult> {
    let dist = penrose_setup(object)?.run_exact()?;
    let dud = penrose_setup(&ObjectSpec::dud())?.run_exact()?;
    Ok(ProtocolResult::classify(
        dist,
        DARK,
        &object.sink_label,
        dud.detector(DARK),
    ))
}

pub struct Penrose;

impl Protocol for Penrose {
    fn name(&self) -> &'static str {
        "penrose"
    }

    fn description(&self) -> &'static str {
        "Dud discrimination: the object is the arm mirror"
    }

    fn params(&self) -> &'static [ParamKind] {
        &[ParamKind::Object]
    }

    fn defaults(&self) -> Params {
        Params {
            object: Some(ObjectKind::Exploding),
            ..Params::default()
        }
    }

    fn setup(&self, params: &Params) -> Result<Setup> {
        penrose_setup(&params.object_or(ObjectKind::Exploding)?)
    }

    fn evaluate(&self, params: &Params) -> Result<Evaluation> {
        Ok(penrose_dud(&params.object_or(ObjectKind::Exploding)?)?.into())
    }
}
