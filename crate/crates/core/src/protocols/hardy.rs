use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::circuits::{detector_outcome, sink_outcome, Circuit, Element, OutcomeDistribution};
use crate::elements::beam_splitter;
use crate::error::Result;
use crate::qcore::{AbsorptionChannel, Amplitude, ModeLabel, ModeState};

use super::{Evaluation, ParamKind, Params, Protocol, Setup};

pub const ANNIHILATION: &str = "annihilation";

fn outer(p: u8) -> ModeLabel {
    ModeLabel::of_particle("outer", p)
}

fn inner(p: u8) -> ModeLabel {
    ModeLabel::of_particle("inner", p)
}

/// Two overlapping Mach-Zehnder interferometers, one per particle.
///
/// Each particle enters on its outer arm; the inner arms cross, and if both
/// particles take them the pair annihilates. Alone, each interferometer
/// sends everything to its bright port. `annihilate = false` removes the
/// crossing for the reference run.
pub fn hardy_setup(annihilate: bool) -> Result<Setup> {
    let registers: Vec<Vec<ModeLabel>> = [1, 2].iter().map(|&p| vec![outer(p), inner(p)]).collect();
    let splitters = |elements: &mut Vec<Element>| -> Result<()> {
        for p in [1, 2] {
            elements.push(beam_splitter(FRAC_PI_4, (outer(p), inner(p)))?.into());
        }
        Ok(())
    };
    let mut elements = Vec::new();
    splitters(&mut elements)?;
    if annihilate {
        elements
            .push(AbsorptionChannel::joint(vec![inner(1), inner(2)], 1.0, ANNIHILATION)?.into());
    }
    splitters(&mut elements)?;

    let detectors = [1u8, 2].into_iter().flat_map(|p| {
        [
            (outer(p), format!("dark{p}")),
            (inner(p), format!("bright{p}")),
        ]
    });
    let circuit = Circuit::new(registers.clone(), elements, detectors)?;
    let one = Amplitude::new(1.0, 0.0);
    let zero = Amplitude::new(0.0, 0.0);
    let initial = ModeState::product(
        registers
            .into_iter()
            .map(|r| (r, vec![one, zero]))
            .collect(),
    )?;
    Ok(Setup { circuit, initial })
}

/// Joint four-detector distribution of the Hardy setup.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyOutcome {
    pub distribution: OutcomeDistribution,
    pub p_annihilation: f64,
    pub p_dark_dark: f64,
}

pub fn hardy() -> Result<HardyOutcome> {
    let distribution = hardy_setup(true)?.run_exact()?;
    Ok(HardyOutcome {
        p_annihilation: distribution.get(&sink_outcome(ANNIHILATION, 0)),
        p_dark_dark: distribution.get(&detector_outcome("dark1&dark2")),
        distribution,
    })
}

pub struct Hardy;

impl Protocol for Hardy {
    fn name(&self) -> &'static str {
        "hardy"
    }

    fn description(&self) -> &'static str {
        "Hardy's paradox: two interferometers sharing an annihilation region"
    }

    fn params(&self) -> &'static [ParamKind] {
        &[]
    }

    fn setup(&self, _params: &Params) -> Result<Setup> {
        hardy_setup(true)
    }

    fn evaluate(&self, _params: &Params) -> Result<Evaluation> {
        let out = hardy()?;
        Ok(Evaluation {
            distribution: out.distribution,
            result: None,
            extras: vec![
                ("p_annihilation".to_string(), out.p_annihilation),
                ("p_dark_dark".to_string(), out.p_dark_dark),
            ],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::TOLERANCE;
    use approx::assert_abs_diff_eq;

    #[test]
    fn without_annihilation_dark_ports_are_silent() {
        let d = hardy_setup(false).unwrap().run_exact().unwrap();
        assert_abs_diff_eq!(d.get("det:bright1&bright2"), 1.0, epsilon = TOLERANCE);
        for label in ["det:dark1&dark2", "det:dark1&bright2", "det:bright1&dark2"] {
            assert_abs_diff_eq!(d.get(label), 0.0, epsilon = TOLERANCE);
        }
    }

    #[test]
    fn joint_dark_and_annihilation() {
        let out = hardy().unwrap();
        assert_abs_diff_eq!(out.p_dark_dark, 1.0 / 16.0, epsilon = TOLERANCE);
        assert_abs_diff_eq!(out.p_annihilation, 0.25, epsilon = TOLERANCE);
        assert_abs_diff_eq!(out.distribution.total(), 1.0, epsilon = TOLERANCE);
    }
}
