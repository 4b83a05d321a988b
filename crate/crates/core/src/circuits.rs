//! Circuit composition and the exact event-tree engine.
//!
//! Absorption leaves are terminal, so the event tree of any circuit is a
//! single surviving branch with one absorbed leaf hanging off every channel
//! application. The surviving branch is read out by the detectors at the end.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{IfmError, Result};
use crate::qcore::{AbsorptionChannel, ModeLabel, ModeState, Unitary, TOLERANCE};

/// Outcome label for terminal mass on modes without a detector.
pub const UNDETECTED: &str = "undetected";

/// Values below this are printed as zero.
pub const REPORT_FLOOR: f64 = 1e-15;

pub fn detector_outcome(name: &str) -> String {
    format!("det:{name}")
}

pub fn sink_outcome(label: &str, repetition: usize) -> String {
    format!("sink:{label}#{repetition}")
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Unitary(Unitary),
    Absorption(AbsorptionChannel),
    Repeat(RepeatBlock),
}

/// A sequence of elements applied `count` times.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatBlock {
    body: Vec<Element>,
    count: usize,
}

impl RepeatBlock {
    pub fn body(&self) -> &[Element] {
        &self.body
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Composite element applying `body` `count` times. Absorbed leaves inside
/// are labelled with the 1-based repetition index.
pub fn repeat_block(body: Vec<Element>, count: usize) -> Result<Element> {
    if count == 0 {
        return Err(IfmError::domain("repeat count must be at least 1"));
    }
    Ok(Element::Repeat(RepeatBlock { body, count }))
}

impl From<Unitary> for Element {
    fn from(u: Unitary) -> Self {
        Element::Unitary(u)
    }
}

impl From<AbsorptionChannel> for Element {
    fn from(ch: AbsorptionChannel) -> Self {
        Element::Absorption(ch)
    }
}

/// One primitive step of a flattened circuit.
#[derive(Clone, Copy, Debug)]
pub enum Step<'a> {
    Unitary(&'a Unitary),
    Absorption {
        channel: &'a AbsorptionChannel,
        repetition: usize,
    },
}

/// A ready device: declared mode registers, elements and terminal detectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    registers: Vec<Vec<ModeLabel>>,
    elements: Vec<Element>,
    detectors: BTreeMap<ModeLabel, String>,
}

impl Circuit {
    pub fn new(
        registers: Vec<Vec<ModeLabel>>,
        elements: Vec<Element>,
        detectors: impl IntoIterator<Item = (ModeLabel, String)>,
    ) -> Result<Self> {
        let mut owner = BTreeMap::new();
        for (r, modes) in registers.iter().enumerate() {
            if modes.is_empty() {
                return Err(IfmError::config("empty mode register"));
            }
            for m in modes {
                if owner.insert(m.clone(), r).is_some() {
                    return Err(IfmError::config(format!("mode `{m}` declared twice")));
                }
            }
        }
        let lookup = |m: &ModeLabel| {
            owner.get(m).copied().ok_or_else(|| {
                IfmError::config(format!("element references undeclared mode `{m}`"))
            })
        };
        fn check(elements: &[Element], lookup: &dyn Fn(&ModeLabel) -> Result<usize>) -> Result<()> {
            for e in elements {
                match e {
                    Element::Unitary(u) => {
                        let regs = u
                            .modes()
                            .iter()
                            .map(lookup)
                            .collect::<Result<HashSet<_>>>()?;
                        if regs.len() > 1 {
                            return Err(IfmError::config(
                                "unitary spans modes of different particles",
                            ));
                        }
                    }
                    Element::Absorption(ch) => {
                        let regs = ch.modes().iter().map(lookup).collect::<Result<Vec<_>>>()?;
                        if regs.iter().collect::<HashSet<_>>().len() != regs.len() {
                            return Err(IfmError::config(
                                "absorption channel targets one particle twice",
                            ));
                        }
                    }
                    Element::Repeat(block) => check(&block.body, lookup)?,
                }
            }
            Ok(())
        }
        check(&elements, &lookup)?;

        let mut map = BTreeMap::new();
        for (mode, name) in detectors {
            lookup(&mode)?;
            if map.insert(mode.clone(), name).is_some() {
                return Err(IfmError::config(format!("two detectors on mode `{mode}`")));
            }
        }
        Ok(Circuit {
            registers,
            elements,
            detectors: map,
        })
    }

    /// Single-particle circuit.
    pub fn single(
        modes: Vec<ModeLabel>,
        elements: Vec<Element>,
        detectors: impl IntoIterator<Item = (ModeLabel, String)>,
    ) -> Result<Self> {
        Self::new(vec![modes], elements, detectors)
    }

    pub fn registers(&self) -> &[Vec<ModeLabel>] {
        &self.registers
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn detectors(&self) -> &BTreeMap<ModeLabel, String> {
        &self.detectors
    }

    /// Every primitive step in execution order, with repeats unrolled.
    pub fn steps(&self) -> Vec<Step<'_>> {
        fn walk<'a>(elements: &'a [Element], repetition: usize, out: &mut Vec<Step<'a>>) {
            for e in elements {
                match e {
                    Element::Unitary(u) => out.push(Step::Unitary(u)),
                    Element::Absorption(channel) => out.push(Step::Absorption {
                        channel,
                        repetition,
                    }),
                    Element::Repeat(block) => {
                        for i in 1..=block.count {
                            walk(&block.body, i, out);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.elements, 0, &mut out);
        out
    }

    /// Checks that `state` lives on this circuit's registers and is normalized.
    pub fn check_initial(&self, state: &ModeState) -> Result<()> {
        if state.registers() != self.registers.as_slice() {
            return Err(IfmError::config(
                "initial state registers do not match the circuit",
            ));
        }
        if (state.mass() - 1.0).abs() > TOLERANCE {
            return Err(IfmError::config(format!(
                "initial state carries mass {} instead of 1",
                state.mass()
            )));
        }
        Ok(())
    }

    /// Outcome label of every flat basis index at the end of the circuit.
    pub fn terminal_labels(&self) -> Vec<String> {
        let dims: Vec<usize> = self.registers.iter().map(Vec::len).collect();
        let total: usize = dims.iter().product();
        (0..total)
            .map(|flat| {
                let mut rest = flat;
                let mut names = vec![None; dims.len()];
                for r in (0..dims.len()).rev() {
                    let mode = &self.registers[r][rest % dims[r]];
                    rest /= dims[r];
                    names[r] = self.detectors.get(mode);
                }
                if names.iter().all(Option::is_none) {
                    UNDETECTED.to_string()
                } else {
                    let joined: Vec<&str> = names
                        .iter()
                        .map(|n| n.map_or("-", String::as_str))
                        .collect();
                    detector_outcome(&joined.join("&"))
                }
            })
            .collect()
    }
}

/// Absorbed leaves plus the surviving terminal branch of a circuit run.
#[derive(Clone, Debug)]
pub struct EventTree {
    pub absorbed: Vec<(String, f64)>,
    pub survivor: ModeState,
}

impl EventTree {
    /// Number of leaves: every absorbed leaf plus the surviving branch.
    pub fn branch_count(&self) -> usize {
        self.absorbed.len() + 1
    }
}

/// Propagates `initial` through `circuit`, splitting at every absorption.
pub fn run_event_tree(circuit: &Circuit, initial: &ModeState) -> Result<EventTree> {
    circuit.check_initial(initial)?;
    let mut state = initial.clone();
    let mut absorbed = Vec::new();
    for step in circuit.steps() {
        match step {
            Step::Unitary(u) => state = state.apply_unitary(u)?,
            Step::Absorption {
                channel,
                repetition,
            } => {
                let (survivor, event) = state.apply_absorption(channel)?;
                absorbed.push((
                    sink_outcome(&event.sink_label, repetition),
                    event.probability,
                ));
                state = survivor;
            }
        }
    }
    Ok(EventTree {
        absorbed,
        survivor: state,
    })
}

/// Exact outcome distribution of `circuit` acting on `initial`.
pub fn run_exact(circuit: &Circuit, initial: &ModeState) -> Result<OutcomeDistribution> {
    let tree = run_event_tree(circuit, initial)?;
    let mut dist = OutcomeDistribution::default();
    for (label, p) in tree.absorbed {
        dist.add(label, p);
    }
    let weight = tree.survivor.weight();
    for (label, a) in circuit
        .terminal_labels()
        .into_iter()
        .zip(tree.survivor.amplitudes())
    {
        dist.add(label, weight * a.norm_sqr());
    }
    Ok(dist)
}

/// Map from outcome label to probability.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    entries: BTreeMap<String, f64>,
}

impl OutcomeDistribution {
    pub fn from_entries(entries: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut d = OutcomeDistribution::default();
        for (k, v) in entries {
            d.add(k, v);
        }
        d
    }

    pub fn add(&mut self, label: impl Into<String>, p: f64) {
        *self.entries.entry(label.into()).or_insert(0.0) += p;
    }

    /// Probability of `label`; zero for labels never produced.
    pub fn get(&self, label: &str) -> f64 {
        self.entries.get(label).copied().unwrap_or(0.0)
    }

    pub fn detector(&self, name: &str) -> f64 {
        self.get(&detector_outcome(name))
    }

    /// Total probability absorbed into sinks named `label`, over all repetitions.
    pub fn sink_total(&self, label: &str) -> f64 {
        let prefix = format!("sink:{label}#");
        self.entries
            .iter()
            .filter(|(k, _)| k.starts_with(&prefix))
            .map(|(_, v)| v)
            .sum()
    }

    /// Total probability absorbed into any sink.
    pub fn absorbed_total(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(k, _)| k.starts_with("sink:"))
            .map(|(_, v)| v)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Entries with sub-[`REPORT_FLOOR`] values clamped to zero.
    pub fn reported(&self) -> impl Iterator<Item = (&str, f64)> {
        self.iter().map(|(k, v)| (k, clamp_report(v)))
    }

    /// Merges all sink labels with the same name, dropping repetition indices.
    pub fn collapse_repetitions(&self) -> OutcomeDistribution {
        OutcomeDistribution::from_entries(self.iter().map(|(k, v)| {
            let key = match k.strip_prefix("sink:").and_then(|s| s.rsplit_once('#')) {
                Some((name, _)) => format!("sink:{name}"),
                None => k.to_string(),
            };
            (key, v)
        }))
    }
}

pub fn clamp_report(p: f64) -> f64 {
    if p.abs() < REPORT_FLOOR {
        0.0
    } else {
        p
    }
}
