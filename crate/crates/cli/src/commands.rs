use std::collections::BTreeSet;
use std::error::Error as StdError;
use std::fs;
use std::path::Path;

use causal_couplings::characterize::{
    equivalence_report, evaluate_causal_function, indicator, property_suite,
};
use causal_couplings::demo;
use causal_couplings::document::{
    distance_value, precedence_value, CertificateDocument, CouplingDocument, Instance,
};
use causal_couplings::generate::{generate_instance, ModelKind};
use causal_couplings::rational::format_rational;
use causal_couplings::spacetime::EventId;
use causal_couplings::transport::{check_precedence, lorentz_wasserstein, verify_coupling, Precedence};
use serde_json::{json, Value};

use crate::{Command, DemoName, Kind, Pair};

type Result<T> = std::result::Result<T, Box<dyn StdError>>;

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn json(value: &Value, code: u8) -> Output {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        Output { text, code }
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(Instance::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn exit_for(feasible: bool) -> u8 {
    if feasible {
        0
    } else {
        1
    }
}

pub fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Check(pair) => {
            let inst = load(&pair.instance)?;
            let result = check_precedence(&inst.model, inst.measure(&pair.mu)?, inst.measure(&pair.nu)?)?;
            Ok(Output::json(&precedence_value(&result), exit_for(result.is_feasible())))
        }
        Command::Coupling(pair) => {
            let inst = load(&pair.instance)?;
            let result = check_precedence(&inst.model, inst.measure(&pair.mu)?, inst.measure(&pair.nu)?)?;
            Ok(match result {
                Precedence::Feasible(c) => Output::json(&json!(CouplingDocument::from_coupling(&c)), 0),
                Precedence::Infeasible(_) => Output::json(&precedence_value(&result), 1),
            })
        }
        Command::Distance { pair, s, csv } => distance(pair, s, *csv),
        Command::Certify { pair, witness } => certify(pair, witness.as_deref()),
        Command::Equiv { pair, trials, seed } => {
            let inst = load(&pair.instance)?;
            let report = equivalence_report(
                &inst.model,
                inst.measure(&pair.mu)?,
                inst.measure(&pair.nu)?,
                *trials,
                *seed,
            )?;
            Ok(Output::json(&serde_json::to_value(&report)?, exit_for(report.agreement)))
        }
        Command::Ladder { instance } => {
            let inst = load(instance)?;
            let value = json!({
                "ladder": inst.model.classify_ladder(),
                "causal_loop": inst.model.causal_loop(),
                "topological_order": inst.model.topological_order().ok(),
            });
            Ok(Output::json(&value, 0))
        }
        Command::Demo {
            name,
            leak,
            n,
            s,
            count,
            seed,
        } => {
            let inst = match name {
                DemoName::Hegerfeldt => demo::hegerfeldt(&demo::parse_leak(leak)?)?,
                DemoName::Geometric => demo::geometric(*n, *s)?,
                DemoName::Diamond => demo::diamond(*count, *seed)?,
            };
            Ok(Output::json(&inst.to_value(), 0))
        }
        Command::Gen { kind, size, seed } => {
            let kind = match kind {
                Kind::Dag => ModelKind::Dag,
                Kind::Minkowski => ModelKind::Minkowski,
            };
            Ok(Output::json(&generate_instance(kind, *size, *seed)?.to_value(), 0))
        }
        Command::Props { instance, labels } => {
            let inst = load(instance)?;
            let chosen: Vec<(String, _)> = if labels.is_empty() {
                inst.measures.iter().map(|(k, m)| (k.clone(), m.clone())).collect()
            } else {
                labels
                    .iter()
                    .map(|l| Ok((l.clone(), inst.measure(l)?.clone())))
                    .collect::<Result<_>>()?
            };
            let report = property_suite(&inst.model, &chosen)?;
            Ok(Output::json(&serde_json::to_value(&report)?, exit_for(report.all_passed())))
        }
    }
}

fn distance(pair: &Pair, exponents: &[f64], csv: bool) -> Result<Output> {
    let inst = load(&pair.instance)?;
    let (mu, nu) = (inst.measure(&pair.mu)?, inst.measure(&pair.nu)?);
    let results = exponents
        .iter()
        .map(|&s| lorentz_wasserstein(&inst.model, mu, nu, s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if csv {
        let mut text = String::from("s,lw\n");
        for r in &results {
            text.push_str(&format!("{},{}\n", r.s, r.value));
        }
        return Ok(Output { text, code: 0 });
    }
    let value = match results.as_slice() {
        [single] => distance_value(single),
        many => Value::Array(many.iter().map(distance_value).collect()),
    };
    Ok(Output::json(&value, 0))
}

fn certify(pair: &Pair, witness: Option<&Path>) -> Result<Output> {
    let inst = load(&pair.instance)?;
    let (mu, nu) = (inst.measure(&pair.mu)?, inst.measure(&pair.nu)?);
    let model = &inst.model;

    if let Some(path) = witness {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut value: Value = serde_json::from_str(&text)?;
        // accept the output of `check` as well as bare documents
        for key in ["coupling", "certificate"] {
            if let Some(inner) = value.get(key) {
                value = inner.clone();
                break;
            }
        }
        let (kind, verified) = if value.get("entries").is_some() {
            let doc: CouplingDocument = serde_json::from_value(value)?;
            ("coupling", verify_coupling(model, &doc.to_coupling()?, mu, nu))
        } else if value.get("K").is_some() {
            let doc: CertificateDocument = serde_json::from_value(value)?;
            ("certificate", doc.to_certificate()?.verify(model, mu, nu))
        } else {
            return Err("witness is neither a coupling nor a certificate document".into());
        };
        return Ok(Output::json(&json!({ "kind": kind, "verified": verified }), exit_for(verified)));
    }

    let result = check_precedence(model, mu, nu)?;
    let mut value = precedence_value(&result);
    let verified = match &result {
        Precedence::Feasible(c) => verify_coupling(model, c, mu, nu),
        Precedence::Infeasible(cert) => {
            let f: BTreeSet<EventId> = cert.violating_set().iter().copied().collect();
            let integrals = evaluate_causal_function(model, mu, nu, &indicator(model, &f))?;
            if let Some((a, b)) = &integrals {
                value["indicator_integrals"] = json!({ "mu": format_rational(a), "nu": format_rational(b) });
            }
            cert.verify(model, mu, nu) && integrals.is_some()
        }
    };
    value["verified"] = json!(verified);
    Ok(Output::json(&value, exit_for(verified)))
}
