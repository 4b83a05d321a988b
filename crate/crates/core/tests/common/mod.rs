//! Oracles and generators shared by the integration tests. Everything here
//! is coded against plain complex arithmetic, independently of the engine.

#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use ifm_core::circuits::{Circuit, Element};
use ifm_core::{AbsorptionChannel, Amplitude, ModeLabel, ModeState, Unitary};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

pub fn labels(n: usize) -> Vec<ModeLabel> {
    (0..n).map(|i| ModeLabel::new(format!("m{i}"))).collect()
}

/// Unitary from the QR factorization of a random complex matrix.
pub fn random_unitary_matrix(k: usize, rng: &mut impl Rng) -> DMatrix<Amplitude> {
    let m = DMatrix::from_fn(k, k, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    m.qr().q()
}

pub fn random_state_vector(n: usize, rng: &mut impl Rng) -> Vec<Amplitude> {
    let v: Vec<Amplitude> = (0..n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Distinct random subset of `0..n` of size `k`.
pub fn random_subset(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// A random single-register circuit with every mode detected.
pub struct RandomCircuit {
    pub circuit: Circuit,
    pub initial: ModeState,
    /// (mode indices, matrix) of each unitary, in order.
    pub unitaries: Vec<(Vec<usize>, DMatrix<Amplitude>)>,
    pub absorbers: usize,
}

pub fn random_circuit(rng: &mut impl Rng, allow_absorbers: bool) -> RandomCircuit {
    let n = rng.random_range(1..=6);
    let modes = labels(n);
    let count = rng.random_range(0..=20);
    let mut elements = Vec::new();
    let mut unitaries = Vec::new();
    let mut absorbers = 0;
    for _ in 0..count {
        if allow_absorbers && rng.random_bool(0.3) {
            let m = rng.random_range(0..n);
            let p = if rng.random_bool(0.2) {
                1.0
            } else {
                rng.random_range(0.0..=1.0)
            };
            let ch = AbsorptionChannel::new(modes[m].clone(), p, format!("obj{m}")).unwrap();
            elements.push(Element::Absorption(
                ch.with_phase(rng.random_range(0.0..2.0 * PI)),
            ));
            absorbers += 1;
        } else {
            let k = rng.random_range(1..=n.min(4));
            let idx = random_subset(n, k, rng);
            let mat = random_unitary_matrix(k, rng);
            let u =
                Unitary::new(idx.iter().map(|&i| modes[i].clone()).collect(), mat.clone()).unwrap();
            elements.push(Element::Unitary(u));
            unitaries.push((idx, mat));
        }
    }
    let detectors: Vec<_> = modes
        .iter()
        .map(|m| (m.clone(), m.name().to_string()))
        .collect();
    let circuit = Circuit::single(modes.clone(), elements, detectors).unwrap();
    let initial = ModeState::new(modes, random_state_vector(n, rng)).unwrap();
    RandomCircuit {
        circuit,
        initial,
        unitaries,
        absorbers,
    }
}

/// Embeds every unitary into the full space and multiplies them out.
pub fn single_matrix_product(
    n: usize,
    unitaries: &[(Vec<usize>, DMatrix<Amplitude>)],
) -> DMatrix<Amplitude> {
    let mut total = DMatrix::<Amplitude>::identity(n, n);
    for (idx, m) in unitaries {
        let mut full = DMatrix::<Amplitude>::identity(n, n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                full[(i, j)] = m[(a, b)];
            }
        }
        total = full * total;
    }
    total
}

pub fn matrix_oracle_probabilities(rc: &RandomCircuit) -> Vec<f64> {
    let n = rc.initial.amplitudes().len();
    let u = single_matrix_product(n, &rc.unitaries);
    let out = u * DVector::from_column_slice(rc.initial.amplitudes());
    out.iter().map(|a| a.norm_sqr()).collect()
}

/// Hardy setup by enumeration of the 16 two-particle paths.
///
/// Each particle enters on its outer arm, picks an arm at the first 50/50
/// splitter (amplitude 1/√2 to stay, i/√2 to cross) and an output at the
/// second one. Paths where both particles took the inner arm are removed
/// (annihilated). Returns `(P[out1][out2], P(annihilation))` with index 0 =
/// dark (outer output), 1 = bright (inner output).
#[allow(clippy::needless_range_loop)]
pub fn hardy_path_oracle() -> ([[f64; 2]; 2], f64) {
    let h = FRAC_1_SQRT_2;
    // splitter amplitude from input port to output port; port 0 outer, 1 inner
    let bs = |from: usize, to: usize| if from == to { c(h, 0.0) } else { c(0.0, h) };
    let mut amp = [[c(0.0, 0.0); 2]; 2];
    let mut annihilated = 0.0;
    for arm1 in 0..2 {
        for arm2 in 0..2 {
            let first = bs(0, arm1) * bs(0, arm2);
            if arm1 == 1 && arm2 == 1 {
                annihilated += first.norm_sqr();
                continue;
            }
            for out1 in 0..2 {
                for out2 in 0..2 {
                    amp[out1][out2] += first * bs(arm1, out1) * bs(arm2, out2);
                }
            }
        }
    }
    let mut p = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = amp[i][j].norm_sqr();
        }
    }
    (p, annihilated)
}

/// Time-resolved Fabry-Perot: explicit bounce-by-bounce propagation of the
/// intracavity field between two mirrors, returning (reflected, transmitted)
/// amplitudes summed over `bounces` round trips.
///
/// Mirror scattering: from outside, reflect −√R and transmit √(1−R); from
/// inside, reflect +√R and transmit √(1−R). `pass` is the single-pass
/// object amplitude; `phi` the round-trip detuning, split evenly over the
/// two traversals.
pub fn bounce_series(
    r_int: f64,
    phi: f64,
    pass: Amplitude,
    bounces: usize,
) -> (Amplitude, Amplitude) {
    let rm = r_int.sqrt();
    let tm = (1.0 - r_int).sqrt();
    let hop = pass * Amplitude::from_polar(1.0, phi / 2.0);
    let mut reflected = c(-rm, 0.0);
    let mut transmitted = c(0.0, 0.0);
    // wave just inside the front mirror, heading to the back mirror
    let mut forward = c(tm, 0.0);
    for _ in 0..bounces {
        let at_back = forward * hop;
        transmitted += at_back * tm;
        let backward = at_back * rm;
        let at_front = backward * hop;
        reflected += at_front * tm;
        forward = at_front * rm;
    }
    (reflected, transmitted)
}

/// Photon survival in cavity A after n rotate-then-absorb bounces.
pub fn zeno_survival_oracle(n: usize) -> f64 {
    let theta = PI / (2.0 * n as f64);
    let (mut a, mut b) = (1.0_f64, 0.0_f64);
    for _ in 0..n {
        let rotated_a = theta.cos() * a - theta.sin() * b;
        a = rotated_a;
        b = 0.0;
    }
    a * a
}
