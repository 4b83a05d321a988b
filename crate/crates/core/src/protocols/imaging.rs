use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::REPORT_FLOOR;
use crate::elements::ObjectSpec;
use crate::error::{IfmError, Result};
use crate::qcore::Amplitude;

use super::ev_mz::{ev_mz, ev_mz_setup, BRIGHT};
use super::{Evaluation, ParamKind, Params, Protocol, Setup};

/// One row of the imaging dose table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImagingRow {
    pub t: Amplitude,
    pub p_dark: f64,
    pub p_bright: f64,
    pub p_absorbed: f64,
    /// Absorption when the photon is simply sent through the object, 1 − |t|².
    pub direct_absorption: f64,
    /// `p_absorbed / direct_absorption`; NaN when both vanish.
    pub dose_ratio: f64,
}

fn imaging_row(t: Amplitude) -> Result<ImagingRow> {
    let r = ev_mz(&ObjectSpec::semitransparent(t)?)?;
    let direct_absorption = 1.0 - t.norm_sqr();
    let dose_ratio = if direct_absorption.abs() < REPORT_FLOOR {
        f64::NAN
    } else {
        r.p_explosion / direct_absorption
    };
    Ok(ImagingRow {
        t,
        p_dark: r.p_detect_object,
        p_bright: r.distribution.detector(BRIGHT),
        p_absorbed: r.p_explosion,
        direct_absorption,
        dose_ratio,
    })
}

/// Runs the Mach-Zehnder imager for each transmittance; rows keep input order.
pub fn imaging_dose_sweep(t_values: &[Amplitude]) -> Result<Vec<ImagingRow>> {
    t_values.par_iter().map(|&t| imaging_row(t)).collect()
}

pub struct Imaging;

impl Protocol for Imaging {
    fn name(&self) -> &'static str {
        "imaging"
    }

    fn description(&self) -> &'static str {
        "Mach-Zehnder imaging of a semitransparent object and its absorbed dose"
    }

    fn params(&self) -> &'static [ParamKind] {
        &[ParamKind::Transmittance]
    }

    fn setup(&self, params: &Params) -> Result<Setup> {
        ev_mz_setup(&ObjectSpec::semitransparent(transmittance(params)?)?)
    }

    fn evaluate(&self, params: &Params) -> Result<Evaluation> {
        let t = transmittance(params)?;
        let row = imaging_row(t)?;
        let mut eval: Evaluation = ev_mz(&ObjectSpec::semitransparent(t)?)?.into();
        eval.extras = vec![
            ("direct_absorption".to_string(), row.direct_absorption),
            ("dose_ratio".to_string(), row.dose_ratio),
        ];
        Ok(eval)
    }
}

fn transmittance(params: &Params) -> Result<Amplitude> {
    params
        .transmittance
        .ok_or_else(|| IfmError::config("imaging requires --t"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::TOLERANCE;
    use approx::assert_abs_diff_eq;

    fn real(t: f64) -> Amplitude {
        Amplitude::new(t, 0.0)
    }

    #[test]
    fn transparent_object_is_invisible() {
        let row = imaging_dose_sweep(&[real(1.0)]).unwrap()[0];
        assert_abs_diff_eq!(row.p_absorbed, 0.0, epsilon = TOLERANCE);
        assert_abs_diff_eq!(row.p_dark, 0.0, epsilon = TOLERANCE);
        assert!(row.dose_ratio.is_nan());
    }

    #[test]
    fn opaque_limit_matches_bomb_tester() {
        let row = imaging_dose_sweep(&[real(0.0)]).unwrap()[0];
        assert_abs_diff_eq!(row.p_dark, 0.25, epsilon = TOLERANCE);
        assert_abs_diff_eq!(row.p_bright, 0.25, epsilon = TOLERANCE);
        assert_abs_diff_eq!(row.p_absorbed, 0.5, epsilon = TOLERANCE);
        assert_abs_diff_eq!(row.dose_ratio, 0.5, epsilon = TOLERANCE);
    }

    #[test]
    fn dose_is_halved() {
        let row = imaging_dose_sweep(&[real(0.6)]).unwrap()[0];
        assert_abs_diff_eq!(row.p_absorbed, 0.32, epsilon = TOLERANCE);
        assert_abs_diff_eq!(row.direct_absorption, 0.64, epsilon = TOLERANCE);
        assert_abs_diff_eq!(row.dose_ratio, 0.5, epsilon = TOLERANCE);
    }

    #[test]
    fn rows_keep_input_order_and_reject_gain() {
        let ts: Vec<_> = (0..=20).map(|i| real(i as f64 / 20.0)).collect();
        let rows = imaging_dose_sweep(&ts).unwrap();
        for (row, t) in rows.iter().zip(&ts) {
            assert_eq!(row.t, *t);
        }
        assert!(matches!(
            imaging_dose_sweep(&[real(0.5), real(1.2)]),
            Err(IfmError::Domain(_))
        ));
    }
}
