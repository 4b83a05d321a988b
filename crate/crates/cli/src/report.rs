//! CSV and JSON rendering of run and sweep results.

use std::io::Write;

use chrono::{SecondsFormat, Utc};
use ifm_core::circuits::clamp_report;
use ifm_core::protocols::{Evaluation, ParamKind, Params};
use ifm_core::sampler::{SampleReport, RNG_ALGORITHM};
use ifm_core::Amplitude;
use serde_json::{json, Map, Value};

pub const DEFAULT_PRECISION: usize = 12;
pub const RUN_HEADER: [&str; 5] = [
    "protocol",
    "param_name",
    "param_value",
    "outcome_label",
    "probability",
];
pub const SWEEP_HEADER: [&str; 7] = [
    "protocol",
    "param_value",
    "p_detect",
    "p_explode",
    "p_inconclusive",
    "eta",
    "false_positive",
];

/// Formats numbers to a fixed count of significant digits, independent of locale.
#[derive(Clone, Copy, Debug)]
pub struct NumberFormat {
    pub digits: usize,
}

impl Default for NumberFormat {
    fn default() -> Self {
        NumberFormat {
            digits: DEFAULT_PRECISION,
        }
    }
}

impl NumberFormat {
    /// Rounded value with sub-floor magnitudes clamped to zero.
    pub fn round(&self, x: f64) -> f64 {
        let x = clamp_report(x);
        if !x.is_finite() || x == 0.0 {
            return x;
        }
        format!("{:.*e}", self.digits - 1, x)
            .parse()
            .expect("scientific notation round-trips")
    }

    pub fn text(&self, x: f64) -> String {
        let r = self.round(x);
        if r.is_nan() {
            "NaN".to_string()
        } else if r.is_infinite() {
            if r > 0.0 { "inf" } else { "-inf" }.to_string()
        } else if r == 0.0 {
            "0".to_string()
        } else if (1e-5..1e15).contains(&r.abs()) {
            format!("{r}")
        } else {
            format!("{r:e}")
        }
    }

    fn json(&self, x: f64) -> Value {
        let r = self.round(x);
        serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
    }

    fn complex_text(&self, z: Amplitude) -> String {
        if z.im == 0.0 {
            self.text(z.re)
        } else {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", self.text(z.re), self.text(z.im.abs()))
        }
    }

    fn param_text(&self, params: &Params, kind: ParamKind) -> Option<String> {
        match kind {
            ParamKind::Object => params.object.map(|o| o.as_str().to_string()),
            ParamKind::Transmittance => params.transmittance.map(|t| self.complex_text(t)),
            ParamKind::Bounces => params.bounces.map(|n| n.to_string()),
            _ => params.numeric(kind).map(|x| self.text(x)),
        }
    }
}

/// Everything printed for a single `run`.
pub struct RunReport<'a> {
    pub protocol: &'a str,
    pub params: &'a Params,
    pub accepted: &'a [ParamKind],
    pub evaluation: &'a Evaluation,
    pub sample: Option<&'a SampleReport>,
}

/// One sweep point.
pub struct SweepRow {
    pub value: f64,
    pub evaluation: Evaluation,
}

pub struct SweepReport<'a> {
    pub protocol: &'a str,
    pub param: ParamKind,
    pub rows: &'a [SweepRow],
}

fn summary(evaluation: &Evaluation) -> Vec<(&'static str, f64)> {
    match &evaluation.result {
        Some(r) => vec![
            ("p_detect_object", r.p_detect_object),
            ("p_explosion", r.p_explosion),
            ("p_inconclusive", r.p_inconclusive),
            ("eta", r.efficiency_eta),
            ("false_positive", r.false_positive),
        ],
        None => Vec::new(),
    }
}

fn metadata(seed: Option<u64>) -> Value {
    json!({
        "tool": "ifm",
        "version": env!("CARGO_PKG_VERSION"),
        "rng_algorithm": RNG_ALGORITHM,
        "seed": seed,
        "timestamp_utc": Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    })
}

impl RunReport<'_> {
    fn param_pairs(&self, nf: &NumberFormat) -> Vec<(&'static str, String)> {
        self.accepted
            .iter()
            .filter_map(|&k| nf.param_text(self.params, k).map(|v| (k.name(), v)))
            .collect()
    }

    pub fn write_csv(&self, out: impl Write, nf: &NumberFormat) -> csv::Result<()> {
        let pairs = self.param_pairs(nf);
        let names: Vec<_> = pairs.iter().map(|(n, _)| *n).collect();
        let values: Vec<_> = pairs.iter().map(|(_, v)| v.as_str()).collect();
        let (names, values) = (names.join(";"), values.join(";"));

        let mut w = csv::Writer::from_writer(out);
        w.write_record(RUN_HEADER)?;
        let mut row = |label: &str, value: String| {
            w.write_record([self.protocol, &names, &values, label, &value])
        };
        for (label, p) in self.evaluation.distribution.iter() {
            row(label, nf.text(p))?;
        }
        for (name, v) in summary(self.evaluation) {
            row(&format!("summary:{name}"), nf.text(v))?;
        }
        for (name, v) in &self.evaluation.extras {
            row(&format!("extra:{name}"), nf.text(*v))?;
        }
        if let Some(s) = self.sample {
            for (label, f) in &s.empirical {
                row(&format!("sample:{label}"), nf.text(*f))?;
            }
            for (label, c) in &s.counts {
                row(&format!("sample_count:{label}"), c.to_string())?;
            }
            row("sample:max_abs_dev", nf.text(s.max_abs_dev))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, nf: &NumberFormat) -> Value {
        let num_map = |it: &mut dyn Iterator<Item = (String, f64)>| {
            Value::Object(it.map(|(k, v)| (k, nf.json(v))).collect::<Map<_, _>>())
        };
        let params: Map<String, Value> = self
            .param_pairs(nf)
            .into_iter()
            .map(|(k, v)| {
                let value = match k {
                    "object" | "t" => Value::String(v),
                    _ => v.parse::<f64>().map_or(Value::String(v), |x| nf.json(x)),
                };
                (k.to_string(), value)
            })
            .collect();
        let summary = if self.evaluation.result.is_some() {
            num_map(
                &mut summary(self.evaluation)
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v)),
            )
        } else {
            Value::Null
        };
        let sample = self.sample.map_or(Value::Null, |s| {
            json!({
                "trials": s.trials,
                "seed": s.seed,
                "counts": s.counts,
                "empirical": num_map(&mut s.empirical.iter().map(|(k, v)| (k.clone(), *v))),
                "max_abs_dev": nf.json(s.max_abs_dev),
            })
        });
        json!({
            "metadata": metadata(self.sample.map(|s| s.seed)),
            "protocol": self.protocol,
            "params": params,
            "distribution": num_map(
                &mut self.evaluation.distribution.iter().map(|(k, v)| (k.to_string(), v))
            ),
            "summary": summary,
            "extras": num_map(&mut self.evaluation.extras.iter().cloned()),
            "sample": sample,
        })
    }
}

fn sweep_cells(evaluation: &Evaluation) -> [f64; 5] {
    match &evaluation.result {
        Some(r) => [
            r.p_detect_object,
            r.p_explosion,
            r.p_inconclusive,
            r.efficiency_eta,
            r.false_positive,
        ],
        None => [f64::NAN; 5],
    }
}

impl SweepReport<'_> {
    /// Protocol-specific columns appended after the fixed ones.
    fn extra_columns(&self) -> Vec<String> {
        self.rows
            .first()
            .map(|r| r.evaluation.extras.iter().map(|(k, _)| k.clone()).collect())
            .unwrap_or_default()
    }

    fn extra_values(row: &SweepRow) -> impl Iterator<Item = f64> + '_ {
        row.evaluation.extras.iter().map(|(_, v)| *v)
    }

    pub fn write_csv(&self, out: impl Write, nf: &NumberFormat) -> csv::Result<()> {
        let extras = self.extra_columns();
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = SWEEP_HEADER
            .iter()
            .copied()
            .chain(extras.iter().map(String::as_str))
            .collect();
        w.write_record(&header)?;
        for row in self.rows {
            let mut record = vec![self.protocol.to_string(), nf.text(row.value)];
            record.extend(sweep_cells(&row.evaluation).map(|x| nf.text(x)));
            record.extend(Self::extra_values(row).map(|x| nf.text(x)));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, nf: &NumberFormat) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                m.insert("param_value".into(), nf.json(row.value));
                for (name, v) in SWEEP_HEADER[2..].iter().zip(sweep_cells(&row.evaluation)) {
                    m.insert(name.to_string(), nf.json(v));
                }
                for (name, v) in &row.evaluation.extras {
                    m.insert(name.clone(), nf.json(*v));
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "metadata": metadata(None),
            "protocol": self.protocol,
            "param": self.param.name(),
            "rows": rows,
        })
    }
}
