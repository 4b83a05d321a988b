use std::collections::BTreeMap;

use crate::error::{IfmError, Result};

use super::{
    EvMz, Evaluation, FabryPerot, Hardy, Imaging, ParamKind, Params, Penrose, Protocol, Setup, Zeno,
};

/// Name-keyed collection of protocols.
#[derive(Default)]
pub struct Registry {
    protocols: BTreeMap<&'static str, Box<dyn Protocol>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding every scheme shipped with the crate.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        r.register(Box::new(EvMz));
        r.register(Box::new(Zeno));
        r.register(Box::new(FabryPerot));
        r.register(Box::new(Penrose));
        r.register(Box::new(Hardy));
        r.register(Box::new(Imaging));
        r
    }

    /// Adds `protocol`, replacing any previous entry of the same name.
    pub fn register(&mut self, protocol: Box<dyn Protocol>) {
        self.protocols.insert(protocol.name(), protocol);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Protocol> {
        self.protocols.get(name).map(Box::as_ref)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.protocols.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Protocol> {
        self.protocols.values().map(Box::as_ref)
    }

    fn lookup(&self, name: &str) -> Result<&dyn Protocol> {
        self.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            IfmError::config(format!(
                "unknown protocol `{name}` (known: {})",
                known.join(", ")
            ))
        })
    }

    /// Rejects parameters the protocol does not read.
    pub fn check_params(&self, name: &str, params: &Params) -> Result<()> {
        let protocol = self.lookup(name)?;
        match params
            .provided()
            .into_iter()
            .find(|k| !protocol.params().contains(k))
        {
            Some(stray) => Err(IfmError::config(format!(
                "{} is not accepted by protocol `{name}`",
                stray.flag()
            ))),
            None => Ok(()),
        }
    }

    pub fn check_sweep(&self, name: &str, kind: ParamKind) -> Result<()> {
        if self.lookup(name)?.sweepable().contains(&kind) {
            Ok(())
        } else {
            Err(IfmError::config(format!(
                "{} cannot be swept for protocol `{name}`",
                kind.flag()
            )))
        }
    }

    pub fn evaluate(&self, name: &str, params: &Params) -> Result<Evaluation> {
        self.check_params(name, params)?;
        self.lookup(name)?.evaluate(params)
    }

    pub fn setup(&self, name: &str, params: &Params) -> Result<Setup> {
        self.check_params(name, params)?;
        self.lookup(name)?.setup(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::ObjectKind;

    #[test]
    fn builtin_names() {
        let names: Vec<_> = Registry::builtin().names().collect();
        assert_eq!(
            names,
            [
                "ev-mz",
                "fabry-perot",
                "hardy",
                "imaging",
                "penrose",
                "zeno"
            ]
        );
    }

    #[test]
    fn stray_flags_are_named() {
        let reg = Registry::builtin();
        let p = Params {
            bounces: Some(5),
            ..Params::default()
        };
        let err = reg.evaluate("ev-mz", &p).unwrap_err();
        assert!(matches!(&err, IfmError::Config(m) if m.contains("--N")));
        let err = reg
            .evaluate(
                "hardy",
                &Params {
                    object: Some(ObjectKind::Opaque),
                    ..Params::default()
                },
            )
            .unwrap_err();
        assert!(err.to_string().contains("--object"));
        assert!(reg.evaluate("nope", &Params::default()).is_err());
    }

    #[test]
    fn setup_and_evaluate_agree() {
        let reg = Registry::builtin();
        let p = Params {
            transmittance: Some(crate::qcore::Amplitude::new(0.3, 0.1)),
            ..Params::default()
        };
        let eval = reg.evaluate("imaging", &p).unwrap();
        let dist = reg.setup("imaging", &p).unwrap().run_exact().unwrap();
        assert_eq!(eval.distribution, dist);
    }

    #[test]
    fn sweepability() {
        let reg = Registry::builtin();
        assert!(reg.check_sweep("zeno", ParamKind::Bounces).is_ok());
        assert!(reg.check_sweep("zeno", ParamKind::Object).is_err());
        assert!(reg.check_sweep("hardy", ParamKind::Bounces).is_err());
    }
}
