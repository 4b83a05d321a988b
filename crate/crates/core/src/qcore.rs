//! Amplitudes, mode-indexed state vectors and the two primitive evolutions.
//!
//! A [`ModeState`] is a tensor product of one or more *registers*, one per
//! particle, each register being an ordered list of [`ModeLabel`]s. The flat
//! amplitude vector is stored row-major with register 0 most significant.
//! Single-photon circuits use exactly one register.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{IfmError, Result};

/// A quantum amplitude.
pub type Amplitude = Complex64;

/// Absolute tolerance for every norm, unitarity and mass-conservation check.
pub const TOLERANCE: f64 = 1e-12;

/// Name of a photonic mode, optionally tagged with the particle it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    name: String,
    particle: Option<u8>,
}

impl ModeLabel {
    pub fn new(name: impl Into<String>) -> Self {
        ModeLabel {
            name: name.into(),
            particle: None,
        }
    }

    pub fn of_particle(name: impl Into<String>, particle: u8) -> Self {
        ModeLabel {
            name: name.into(),
            particle: Some(particle),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn particle(&self) -> Option<u8> {
        self.particle
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.particle {
            Some(p) => write!(f, "{}@{}", self.name, p),
            None => f.write_str(&self.name),
        }
    }
}

impl From<&str> for ModeLabel {
    fn from(name: &str) -> Self {
        ModeLabel::new(name)
    }
}

fn check_finite(amps: &[Amplitude]) -> Result<()> {
    if amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        Ok(())
    } else {
        Err(IfmError::domain("amplitude is not finite"))
    }
}

/// A (possibly subnormalized) pure state living on one classical branch.
///
/// `weight` is the classical probability of the branch; the probability mass
/// carried by the state is `weight * norm_sq()`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeState {
    registers: Vec<Vec<ModeLabel>>,
    amplitudes: Vec<Amplitude>,
    weight: f64,
}

impl ModeState {
    /// Single-register state with the given amplitudes.
    pub fn new(labels: Vec<ModeLabel>, amplitudes: Vec<Amplitude>) -> Result<Self> {
        if labels.len() != amplitudes.len() {
            return Err(IfmError::config(format!(
                "{} labels but {} amplitudes",
                labels.len(),
                amplitudes.len()
            )));
        }
        Self::from_parts(vec![labels], amplitudes, 1.0)
    }

    /// Single photon occupying `occupied`, all other modes empty.
    pub fn basis(labels: Vec<ModeLabel>, occupied: &ModeLabel) -> Result<Self> {
        let amplitudes = labels
            .iter()
            .map(|l| {
                if l == occupied {
                    Amplitude::new(1.0, 0.0)
                } else {
                    Amplitude::new(0.0, 0.0)
                }
            })
            .collect();
        if !labels.contains(occupied) {
            return Err(IfmError::config(format!("unknown mode label `{occupied}`")));
        }
        Self::new(labels, amplitudes)
    }

    /// Tensor product of one single-particle state per register.
    pub fn product(factors: Vec<(Vec<ModeLabel>, Vec<Amplitude>)>) -> Result<Self> {
        let mut registers = Vec::with_capacity(factors.len());
        let mut amplitudes = vec![Amplitude::new(1.0, 0.0)];
        for (labels, amps) in factors {
            if labels.len() != amps.len() {
                return Err(IfmError::config(
                    "register length does not match its amplitudes",
                ));
            }
            amplitudes = amplitudes
                .iter()
                .flat_map(|a| amps.iter().map(move |b| a * b))
                .collect();
            registers.push(labels);
        }
        Self::from_parts(registers, amplitudes, 1.0)
    }

    /// Builds a state from raw parts, validating every invariant.
    pub fn from_parts(
        registers: Vec<Vec<ModeLabel>>,
        amplitudes: Vec<Amplitude>,
        weight: f64,
    ) -> Result<Self> {
        if registers.is_empty() || registers.iter().any(Vec::is_empty) {
            return Err(IfmError::config(
                "state needs at least one non-empty register",
            ));
        }
        let mut seen = HashSet::new();
        for label in registers.iter().flatten() {
            if !seen.insert(label) {
                return Err(IfmError::config(format!("duplicate mode label `{label}`")));
            }
        }
        let dim: usize = registers.iter().map(Vec::len).product();
        if dim != amplitudes.len() {
            return Err(IfmError::config(format!(
                "state dimension {dim} but {} amplitudes",
                amplitudes.len()
            )));
        }
        check_finite(&amplitudes)?;
        if !(0.0..=1.0).contains(&weight) {
            return Err(IfmError::domain(format!(
                "branch weight {weight} outside [0, 1]"
            )));
        }
        let state = ModeState {
            registers,
            amplitudes,
            weight,
        };
        let n = state.norm_sq();
        if n > 1.0 + TOLERANCE {
            return Err(IfmError::domain(format!("state norm {n} exceeds 1")));
        }
        Ok(state)
    }

    pub fn registers(&self) -> &[Vec<ModeLabel>] {
        &self.registers
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Σ|amplitude|².
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Absolute probability mass carried by this branch.
    pub fn mass(&self) -> f64 {
        self.weight * self.norm_sq()
    }

    /// Same amplitudes on a branch of weight 1.
    pub fn with_unit_weight(&self) -> ModeState {
        ModeState {
            weight: 1.0,
            ..self.clone()
        }
    }

    /// Register index and position of `label`, if present.
    pub fn locate(&self, label: &ModeLabel) -> Option<(usize, usize)> {
        self.registers
            .iter()
            .enumerate()
            .find_map(|(r, modes)| modes.iter().position(|m| m == label).map(|i| (r, i)))
    }

    fn require(&self, label: &ModeLabel) -> Result<(usize, usize)> {
        self.locate(label)
            .ok_or_else(|| IfmError::config(format!("unknown mode label `{label}`")))
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.registers.len()];
        for r in (0..self.registers.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * self.registers[r + 1].len();
        }
        strides
    }

    /// Per-register mode indices of the flat basis index `flat`.
    pub fn digits(&self, flat: usize) -> Vec<usize> {
        self.strides()
            .iter()
            .zip(&self.registers)
            .map(|(s, modes)| (flat / s) % modes.len())
            .collect()
    }

    /// Amplitude of a single-register mode.
    pub fn amplitude(&self, label: &ModeLabel) -> Result<Amplitude> {
        if self.registers.len() != 1 {
            return Err(IfmError::config(
                "amplitude lookup by label needs a single register",
            ));
        }
        let (_, i) = self.require(label)?;
        Ok(self.amplitudes[i])
    }

    /// Marginal |amplitude|² of finding the particle owning `label` in that mode.
    pub fn occupation(&self, label: &ModeLabel) -> Result<f64> {
        let (r, i) = self.require(label)?;
        let stride = self.strides()[r];
        let dim = self.registers[r].len();
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(f, _)| (f / stride) % dim == i)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Applies `u` to the register holding its modes; everything else is untouched.
    pub fn apply_unitary(&self, u: &Unitary) -> Result<ModeState> {
        let mut positions = Vec::with_capacity(u.modes.len());
        let mut register = None;
        for label in &u.modes {
            let (r, i) = self.require(label)?;
            if *register.get_or_insert(r) != r {
                return Err(IfmError::config(
                    "unitary spans modes of different particles",
                ));
            }
            positions.push(i);
        }
        let r = register.expect("unitary has at least one mode");
        let stride = self.strides()[r];
        let dim = self.registers[r].len();

        let mut out = self.amplitudes.clone();
        for base in 0..self.amplitudes.len() {
            if !(base / stride).is_multiple_of(dim) {
                continue;
            }
            let x = DVector::from_iterator(
                positions.len(),
                positions.iter().map(|p| self.amplitudes[base + p * stride]),
            );
            let y = &u.matrix * x;
            for (k, p) in positions.iter().enumerate() {
                out[base + p * stride] = y[k];
            }
        }
        Ok(ModeState {
            registers: self.registers.clone(),
            amplitudes: out,
            weight: self.weight,
        })
    }

    /// Splits the branch at an absorbing object.
    ///
    /// Returns the surviving branch (amplitudes renormalized, weight carrying
    /// the unabsorbed mass) and the absolute probability of the absorption.
    pub fn apply_absorption(&self, ch: &AbsorptionChannel) -> Result<(ModeState, AbsorbedEvent)> {
        let mut targets = Vec::with_capacity(ch.modes.len());
        for label in &ch.modes {
            let (r, i) = self.require(label)?;
            if targets.iter().any(|&(tr, _)| tr == r) {
                return Err(IfmError::config(
                    "absorption channel targets one particle twice",
                ));
            }
            targets.push((r, i));
        }
        let strides = self.strides();
        let hit = |flat: usize| {
            targets
                .iter()
                .all(|&(r, i)| (flat / strides[r]) % self.registers[r].len() == i)
        };

        let factor = Amplitude::from_polar((1.0 - ch.absorb_prob).sqrt(), ch.phase);
        let mut hit_norm = 0.0;
        let mut survivor: Vec<Amplitude> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(f, &a)| {
                if hit(f) {
                    hit_norm += a.norm_sqr();
                    a * factor
                } else {
                    a
                }
            })
            .collect();
        let absorbed = self.weight * ch.absorb_prob * hit_norm;
        let remaining: f64 = survivor.iter().map(|a| a.norm_sqr()).sum();
        let weight = if remaining > 0.0 {
            let scale = remaining.sqrt().recip();
            survivor.iter_mut().for_each(|a| *a *= scale);
            (self.weight * remaining).min(1.0)
        } else {
            survivor
                .iter_mut()
                .for_each(|a| *a = Amplitude::new(0.0, 0.0));
            0.0
        };
        let event = AbsorbedEvent {
            sink_label: ch.sink_label.clone(),
            probability: absorbed,
        };
        Ok((
            ModeState {
                registers: self.registers.clone(),
                amplitudes: survivor,
                weight,
            },
            event,
        ))
    }
}

/// The absorbed leaf produced by [`ModeState::apply_absorption`].
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorbedEvent {
    pub sink_label: String,
    pub probability: f64,
}

/// A unitary acting on a subset of the modes of one register.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    modes: Vec<ModeLabel>,
    matrix: DMatrix<Amplitude>,
}

impl Unitary {
    /// Validates shape, label uniqueness and U†U = I to [`TOLERANCE`].
    pub fn new(modes: Vec<ModeLabel>, matrix: DMatrix<Amplitude>) -> Result<Self> {
        let k = modes.len();
        if k == 0 {
            return Err(IfmError::config("unitary needs at least one mode"));
        }
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(IfmError::config(format!(
                "{k} modes but a {}x{} matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if modes.iter().collect::<HashSet<_>>().len() != k {
            return Err(IfmError::config("unitary modes must be distinct"));
        }
        check_finite(matrix.as_slice())?;
        let gram = matrix.adjoint() * &matrix;
        for i in 0..k {
            for j in 0..k {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - Amplitude::new(expect, 0.0)).norm() > TOLERANCE {
                    return Err(IfmError::domain("matrix is not unitary"));
                }
            }
        }
        Ok(Unitary { modes, matrix })
    }

    pub fn identity(modes: Vec<ModeLabel>) -> Result<Self> {
        let k = modes.len();
        Self::new(modes, DMatrix::identity(k, k))
    }

    /// A unitary whose first column is the unit vector `column`; the other
    /// columns are completed with a Householder reflection.
    pub fn with_first_column(modes: Vec<ModeLabel>, column: &[Amplitude]) -> Result<Self> {
        let k = column.len();
        let norm = column.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if k == 0 || (norm - 1.0).abs() > TOLERANCE {
            return Err(IfmError::domain(format!("column norm {norm} is not 1")));
        }
        let v = DVector::from_iterator(k, column.iter().map(|a| a / norm));
        // alpha e1 and v have equal norm and a real overlap, so the
        // reflection across w = v - alpha e1 swaps them.
        let alpha = if v[0].norm() > 0.0 {
            -v[0] / v[0].norm()
        } else {
            Amplitude::new(-1.0, 0.0)
        };
        let mut w = v.clone();
        w[0] -= alpha;
        let ww = w.norm_squared();
        let mut h: DMatrix<Amplitude> = DMatrix::identity(k, k);
        if ww > 0.0 {
            h -= (&w * w.adjoint()) * Amplitude::new(2.0 / ww, 0.0);
        }
        let mut phases: DMatrix<Amplitude> = DMatrix::identity(k, k);
        phases[(0, 0)] = alpha;
        Self::new(modes, h * phases)
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<Amplitude> {
        &self.matrix
    }
}

/// Non-unitary element moving probability from one mode (or a joint
/// configuration of several particles' modes) into a classical sink.
///
/// The survivor amplitude on the targeted configuration is multiplied by
/// `sqrt(1 - absorb_prob) * exp(i * phase)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorptionChannel {
    modes: Vec<ModeLabel>,
    absorb_prob: f64,
    phase: f64,
    sink_label: String,
}

impl AbsorptionChannel {
    pub fn new(mode: ModeLabel, absorb_prob: f64, sink_label: impl Into<String>) -> Result<Self> {
        Self::joint(vec![mode], absorb_prob, sink_label)
    }

    /// Channel that fires only when every listed mode is occupied at once
    /// (each label must belong to a different particle).
    pub fn joint(
        modes: Vec<ModeLabel>,
        absorb_prob: f64,
        sink_label: impl Into<String>,
    ) -> Result<Self> {
        if modes.is_empty() {
            return Err(IfmError::config("absorption channel needs a target mode"));
        }
        if !(0.0..=1.0).contains(&absorb_prob) {
            return Err(IfmError::domain(format!(
                "absorption probability {absorb_prob} outside [0, 1]"
            )));
        }
        Ok(AbsorptionChannel {
            modes,
            absorb_prob,
            phase: 0.0,
            sink_label: sink_label.into(),
        })
    }

    /// Adds a phase factor picked up by the transmitted amplitude.
    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn absorb_prob(&self) -> f64 {
        self.absorb_prob
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn sink_label(&self) -> &str {
        &self.sink_label
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ab() -> Vec<ModeLabel> {
        vec![ModeLabel::new("A"), ModeLabel::new("B")]
    }

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    fn splitter() -> Unitary {
        let h = FRAC_1_SQRT_2;
        Unitary::new(
            ab(),
            DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, h), c(0.0, h), c(h, 0.0)]),
        )
        .unwrap()
    }

    fn equal_superposition() -> ModeState {
        ModeState::new(ab(), vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap()
    }

    #[test]
    fn splitter_on_basis_state() {
        let s = ModeState::basis(ab(), &"A".into()).unwrap();
        let out = s.apply_unitary(&splitter()).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].im, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.norm_sq(), 1.0, epsilon = TOLERANCE);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = equal_superposition();
        let out = s.apply_unitary(&Unitary::identity(ab()).unwrap()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn two_splitters_route_everything_to_b() {
        // [[h, ih],[ih, h]]^2 = [[0, i],[i, 0]] so (1, 0) -> (0, i)
        let s = ModeState::basis(ab(), &"A".into()).unwrap();
        let out = s
            .apply_unitary(&splitter())
            .unwrap()
            .apply_unitary(&splitter())
            .unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn unknown_mode_is_config_error() {
        let s = equal_superposition();
        let u = Unitary::identity(vec!["A".into(), "C".into()]).unwrap();
        assert!(matches!(s.apply_unitary(&u), Err(IfmError::Config(_))));
        let ch = AbsorptionChannel::new("Z".into(), 1.0, "explosion").unwrap();
        assert!(matches!(s.apply_absorption(&ch), Err(IfmError::Config(_))));
    }

    #[test]
    fn householder_completion_has_requested_column() {
        let labels: Vec<ModeLabel> = vec!["x".into(), "y".into(), "z".into()];
        for col in [
            vec![c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.5), c(-0.5, 0.5), c(0.5, 0.0)],
        ] {
            let u = Unitary::with_first_column(labels.clone(), &col).unwrap();
            for (i, a) in col.iter().enumerate() {
                assert_abs_diff_eq!((u.matrix()[(i, 0)] - a).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(Unitary::new(ab(), m), Err(IfmError::Domain(_))));
    }

    #[test]
    fn opaque_object_on_one_arm_explodes_half() {
        let ch = AbsorptionChannel::new("B".into(), 1.0, "explosion").unwrap();
        let (surv, ev) = equal_superposition().apply_absorption(&ch).unwrap();
        assert_abs_diff_eq!(ev.probability, 0.5, epsilon = TOLERANCE);
        assert_eq!(ev.sink_label, "explosion");
        assert_abs_diff_eq!(surv.amplitudes()[0].norm(), 1.0, epsilon = TOLERANCE);
        assert_eq!(surv.amplitudes()[1], c(0.0, 0.0));
        assert_abs_diff_eq!(surv.norm_sq(), 1.0, epsilon = TOLERANCE);
        assert_abs_diff_eq!(surv.weight(), 0.5, epsilon = TOLERANCE);
    }

    #[test]
    fn absent_object_is_identity() {
        let s = equal_superposition();
        let ch = AbsorptionChannel::new("B".into(), 0.0, "explosion").unwrap();
        let (surv, ev) = s.apply_absorption(&ch).unwrap();
        assert_eq!(ev.probability, 0.0);
        for (a, b) in surv.amplitudes().iter().zip(s.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(surv.weight(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_absorber_matches_two_outcome_enumeration() {
        // Enumerate the two outcomes directly: absorbed iff the photon is
        // on B (prob 1/2) and the object fires (prob 0.36).
        let absorbed_oracle = 0.5 * 0.36;
        let ch = AbsorptionChannel::new("B".into(), 0.36, "absorbed_by_object").unwrap();
        let (surv, ev) = equal_superposition().apply_absorption(&ch).unwrap();
        assert_abs_diff_eq!(ev.probability, 0.18, epsilon = TOLERANCE);
        assert_abs_diff_eq!(ev.probability, absorbed_oracle, epsilon = TOLERANCE);
        assert_abs_diff_eq!(surv.weight(), 0.82, epsilon = TOLERANCE);
        let scale = 0.82_f64.sqrt();
        assert_abs_diff_eq!(
            surv.amplitudes()[0].re * scale,
            FRAC_1_SQRT_2,
            epsilon = TOLERANCE
        );
        assert_abs_diff_eq!(
            surv.amplitudes()[1].im * scale,
            0.8 * FRAC_1_SQRT_2,
            epsilon = TOLERANCE
        );
        assert_abs_diff_eq!(surv.mass() + ev.probability, 1.0, epsilon = TOLERANCE);
    }

    #[test]
    fn norm_sq_queries() {
        assert_eq!(ModeState::basis(ab(), &"A".into()).unwrap().norm_sq(), 1.0);
        assert_abs_diff_eq!(equal_superposition().norm_sq(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_states_are_rejected() {
        assert!(ModeState::new(ab(), vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(
            ModeState::new(vec!["A".into(), "A".into()], vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err()
        );
        assert!(ModeState::new(ab(), vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
        assert!(AbsorptionChannel::new("A".into(), 1.5, "x").is_err());
    }

    #[test]
    fn unitary_acts_on_one_particle_of_a_product_state() {
        let p1 = vec![
            ModeLabel::of_particle("a", 1),
            ModeLabel::of_particle("b", 1),
        ];
        let p2 = vec![
            ModeLabel::of_particle("a", 2),
            ModeLabel::of_particle("b", 2),
        ];
        let s = ModeState::product(vec![
            (p1.clone(), vec![c(1.0, 0.0), c(0.0, 0.0)]),
            (p2.clone(), vec![c(0.0, 0.0), c(1.0, 0.0)]),
        ])
        .unwrap();
        let h = FRAC_1_SQRT_2;
        let u = Unitary::new(
            p1.clone(),
            DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, h), c(0.0, h), c(h, 0.0)]),
        )
        .unwrap();
        let out = s.apply_unitary(&u).unwrap();
        assert_abs_diff_eq!(out.occupation(&p1[0]).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out.occupation(&p2[1]).unwrap(), 1.0, epsilon = 1e-15);
        let joint =
            AbsorptionChannel::joint(vec![p1[1].clone(), p2[1].clone()], 1.0, "annihilation")
                .unwrap();
        let (_, ev) = out.apply_absorption(&joint).unwrap();
        assert_abs_diff_eq!(ev.probability, 0.5, epsilon = 1e-15);
    }
}
