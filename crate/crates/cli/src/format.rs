//! JSON instance and witness files. All numbers are decimal strings.

use std::collections::BTreeMap;

use fracreach::machines::{
    Config, Firing, FiringSequence, IvassRl, IvassRule, PvassRule, Qpvass, Qvass, StackEffect, Tcm, TcmOp, TcmRule, VassRule,
};
use fracreach::numerics::{IntVector, RatVector, Rational};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed file: {0}")]
    Malformed(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

impl FormatError {
    pub fn exit_code(&self) -> i32 {
        match self {
            FormatError::Malformed(_) => 64,
            FormatError::Schema(_) => 65,
        }
    }
}

fn schema(msg: impl Into<String>) -> FormatError {
    FormatError::Schema(msg.into())
}

fn from_json_error(e: serde_json::Error) -> FormatError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => FormatError::Schema(e.to_string()),
        _ => FormatError::Malformed(e.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Qvass,
    Qpvass,
    IvassRl,
    Tcm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StackEffectFile {
    None,
    Push(String),
    Pop(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RuleFile {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack_effect: Option<StackEffectFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_tests: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tcm_op: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub state: String,
    #[serde(default)]
    pub stack: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceFile {
    pub model: ModelKind,
    pub dimension: usize,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stack_alphabet: Option<Vec<String>>,
    pub rules: Vec<RuleFile>,
    pub configs: BTreeMap<String, ConfigFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_length: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiringFile {
    pub fraction: String,
    pub rule: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Qvass(Qvass),
    Qpvass(Qpvass),
    IvassRl(IvassRl),
    Tcm(Tcm),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Qvass(_) => ModelKind::Qvass,
            Model::Qpvass(_) => ModelKind::Qpvass,
            Model::IvassRl(_) => ModelKind::IvassRl,
            Model::Tcm(_) => ModelKind::Tcm,
        }
    }

    pub fn as_machine(&self) -> &dyn fracreach::machines::Machine {
        match self {
            Model::Qvass(m) => m,
            Model::Qpvass(m) => m,
            Model::IvassRl(m) => m,
            Model::Tcm(m) => m,
        }
    }

    pub fn stack_alphabet(&self) -> &[String] {
        match self {
            Model::Qpvass(m) => &m.stack_alphabet,
            _ => &[],
        }
    }

    /// The pushdown view used by the solver, when the model has one.
    pub fn to_qpvass(&self) -> Option<Qpvass> {
        match self {
            Model::Qvass(m) => Some(m.to_qpvass()),
            Model::Qpvass(m) => Some(m.clone()),
            _ => None,
        }
    }
}

/// A loaded, validated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub model: Model,
    pub configs: BTreeMap<String, Config>,
    pub run_length: Option<BigInt>,
    pub provenance: Option<BTreeMap<String, String>>,
}

impl Instance {
    pub fn config(&self, name: &str) -> Result<&Config, FormatError> {
        self.configs.get(name).ok_or_else(|| schema(format!("no configuration named {name:?}")))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    s.parse().map_err(|_| schema(format!("not a rational: {s:?}")))
}

pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn parse_int(s: &str) -> Result<BigInt, FormatError> {
    s.trim().parse().map_err(|_| schema(format!("not an integer: {s:?}")))
}

fn state_index(states: &[String], name: &str) -> Result<usize, FormatError> {
    states.iter().position(|s| s == name).ok_or_else(|| schema(format!("undeclared state {name:?}")))
}

fn symbol_index(alphabet: &[String], name: &str) -> Result<usize, FormatError> {
    alphabet.iter().position(|s| s == name).ok_or_else(|| schema(format!("undeclared stack symbol {name:?}")))
}

/// Stacks are written top-first, either as space-separated symbol names or,
/// when every symbol is a single character, as one run of characters.
pub fn parse_stack(s: &str, alphabet: &[String]) -> Result<Vec<usize>, FormatError> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if t.contains(char::is_whitespace) || alphabet.iter().any(|a| a.chars().count() != 1) {
        t.split_whitespace().map(|x| symbol_index(alphabet, x)).collect()
    } else {
        t.chars().map(|c| symbol_index(alphabet, &c.to_string())).collect()
    }
}

pub fn format_stack(stack: &[usize], alphabet: &[String]) -> String {
    let sep = if alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { " " };
    stack.iter().map(|&i| alphabet[i].as_str()).collect::<Vec<_>>().join(sep)
}

fn parse_update(r: &RuleFile, dim: usize) -> Result<IntVector, FormatError> {
    let u = r.update.as_ref().ok_or_else(|| schema("rule without update"))?;
    if u.len() != dim {
        return Err(schema(format!("update of length {} in dimension {dim}", u.len())));
    }
    Ok(IntVector(u.iter().map(|x| parse_int(x)).collect::<Result<_, _>>()?))
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let f: InstanceFile = serde_json::from_str(text).map_err(from_json_error)?;
    from_file(&f)
}

pub fn from_file(f: &InstanceFile) -> Result<Instance, FormatError> {
    let states = f.states.clone();
    if states.is_empty() {
        return Err(schema("no states"));
    }
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = states.iter().find(|s| !seen.insert(s.as_str())) {
        return Err(schema(format!("duplicate state {dup:?}")));
    }
    let dim = f.dimension;
    let alphabet = f.stack_alphabet.clone().unwrap_or_default();
    if f.model != ModelKind::Qpvass && !alphabet.is_empty() {
        return Err(schema("stack alphabet on a model without a stack"));
    }
    if f.model == ModelKind::Tcm && dim != 2 {
        return Err(schema("two-counter machines have dimension 2"));
    }
    let mut ends = Vec::with_capacity(f.rules.len());
    for r in &f.rules {
        ends.push((state_index(&states, &r.from)?, state_index(&states, &r.to)?));
    }
    let only = |r: &RuleFile, stack: bool, tests: bool, op: bool| -> Result<(), FormatError> {
        if (!stack && r.stack_effect.is_some()) || (!tests && r.zero_tests.is_some()) || (!op && r.tcm_op.is_some()) {
            return Err(schema(format!("field not allowed for {:?} rules", f.model)));
        }
        Ok(())
    };
    let model = match f.model {
        ModelKind::Qvass => {
            let mut rules = Vec::new();
            for (r, &(from, to)) in f.rules.iter().zip(&ends) {
                only(r, false, false, false)?;
                rules.push(VassRule { from, to, update: parse_update(r, dim)? });
            }
            Model::Qvass(Qvass { states: states.clone(), dim, rules })
        }
        ModelKind::Qpvass => {
            let mut rules = Vec::new();
            for (r, &(from, to)) in f.rules.iter().zip(&ends) {
                only(r, true, false, false)?;
                let stack = match r.stack_effect.as_ref().unwrap_or(&StackEffectFile::None) {
                    StackEffectFile::None => StackEffect::None,
                    StackEffectFile::Push(a) => StackEffect::Push(symbol_index(&alphabet, a)?),
                    StackEffectFile::Pop(a) => StackEffect::Pop(symbol_index(&alphabet, a)?),
                };
                rules.push(PvassRule { from, to, update: parse_update(r, dim)?, stack });
            }
            Model::Qpvass(Qpvass { states: states.clone(), stack_alphabet: alphabet.clone(), dim, rules })
        }
        ModelKind::IvassRl => {
            let mut rules = Vec::new();
            for (r, &(from, to)) in f.rules.iter().zip(&ends) {
                only(r, false, true, false)?;
                let zero_tests = r.zero_tests.clone().unwrap_or_default();
                if let Some(&i) = zero_tests.iter().find(|&&i| i >= dim) {
                    return Err(schema(format!("zero test on counter {i} in dimension {dim}")));
                }
                rules.push(IvassRule { from, to, update: parse_update(r, dim)?, zero_tests });
            }
            Model::IvassRl(IvassRl { states: states.clone(), dim, rules })
        }
        ModelKind::Tcm => {
            let mut rules = Vec::new();
            for (r, &(from, to)) in f.rules.iter().zip(&ends) {
                only(r, false, false, true)?;
                if r.update.is_some() {
                    return Err(schema("two-counter rules take tcmOp, not update"));
                }
                let name = r.tcm_op.as_deref().ok_or_else(|| schema("rule without tcmOp"))?;
                let op = TcmOp::parse(name).ok_or_else(|| schema(format!("unknown tcmOp {name:?}")))?;
                rules.push(TcmRule { from, to, op });
            }
            let init = f.configs.get("init").ok_or_else(|| schema("two-counter machines need an init configuration"))?;
            let fin = f.configs.get("final").ok_or_else(|| schema("two-counter machines need a final configuration"))?;
            Model::Tcm(Tcm {
                states: states.clone(),
                initial: state_index(&states, &init.state)?,
                final_state: state_index(&states, &fin.state)?,
                rules,
            })
        }
    };
    let mut configs = BTreeMap::new();
    for (name, c) in &f.configs {
        if c.values.len() != dim {
            return Err(schema(format!("configuration {name:?} has {} values in dimension {dim}", c.values.len())));
        }
        let values = RatVector(c.values.iter().map(|x| parse_rational(x)).collect::<Result<_, _>>()?);
        if !values.is_nonneg() {
            return Err(schema(format!("configuration {name:?} has a negative value")));
        }
        let stack = parse_stack(&c.stack, &alphabet)?;
        configs.insert(name.clone(), Config::with_stack(state_index(&states, &c.state)?, stack, values));
    }
    let run_length = f.run_length.as_deref().map(parse_int).transpose()?;
    if run_length.as_ref().is_some_and(|n| n.sign() == num_bigint::Sign::Minus) {
        return Err(schema("negative run length"));
    }
    Ok(Instance { model, configs, run_length, provenance: f.provenance.clone() })
}

fn update_strings(u: &IntVector) -> Option<Vec<String>> {
    Some(u.0.iter().map(|x| x.to_string()).collect())
}

pub fn to_file(inst: &Instance) -> InstanceFile {
    let m = inst.model.as_machine();
    let states = m.state_names().to_vec();
    let name = |i: usize| states[i].clone();
    let alphabet = inst.model.stack_alphabet().to_vec();
    let rules = match &inst.model {
        Model::Qvass(q) => q
            .rules
            .iter()
            .map(|r| RuleFile { from: name(r.from), to: name(r.to), update: update_strings(&r.update), stack_effect: None, zero_tests: None, tcm_op: None })
            .collect(),
        Model::Qpvass(q) => q
            .rules
            .iter()
            .map(|r| RuleFile {
                from: name(r.from),
                to: name(r.to),
                update: update_strings(&r.update),
                stack_effect: Some(match r.stack {
                    StackEffect::None => StackEffectFile::None,
                    StackEffect::Push(a) => StackEffectFile::Push(alphabet[a].clone()),
                    StackEffect::Pop(a) => StackEffectFile::Pop(alphabet[a].clone()),
                }),
                zero_tests: None,
                tcm_op: None,
            })
            .collect(),
        Model::IvassRl(q) => q
            .rules
            .iter()
            .map(|r| RuleFile {
                from: name(r.from),
                to: name(r.to),
                update: update_strings(&r.update),
                stack_effect: None,
                zero_tests: Some(r.zero_tests.clone()),
                tcm_op: None,
            })
            .collect(),
        Model::Tcm(t) => t
            .rules
            .iter()
            .map(|r| RuleFile { from: name(r.from), to: name(r.to), update: None, stack_effect: None, zero_tests: None, tcm_op: Some(r.op.name()) })
            .collect(),
    };
    let configs = inst
        .configs
        .iter()
        .map(|(k, c)| {
            (
                k.clone(),
                ConfigFile {
                    state: name(c.state),
                    stack: format_stack(&c.stack, &alphabet),
                    values: c.values.0.iter().map(format_rational).collect(),
                },
            )
        })
        .collect();
    InstanceFile {
        model: inst.model.kind(),
        dimension: m.dim(),
        states,
        stack_alphabet: matches!(inst.model, Model::Qpvass(_)).then_some(alphabet),
        rules,
        configs,
        run_length: inst.run_length.as_ref().map(|n| n.to_string()),
        provenance: inst.provenance.clone(),
    }
}

pub fn render_instance(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(inst)).expect("serializable");
    s.push('\n');
    s
}

/// Fractions outside (0,1] parse here and are reported by the replay at
/// the step that uses them.
pub fn parse_witness(text: &str) -> Result<FiringSequence, FormatError> {
    let fs: Vec<FiringFile> = serde_json::from_str(text).map_err(from_json_error)?;
    fs.iter().map(|f| Ok(Firing::new(parse_rational(&f.fraction)?, f.rule))).collect()
}

pub fn render_witness(seq: &[Firing]) -> String {
    let fs: Vec<FiringFile> = seq.iter().map(|f| FiringFile { fraction: format_rational(&f.fraction), rule: f.rule }).collect();
    let mut s = serde_json::to_string_pretty(&fs).expect("serializable");
    s.push('\n');
    s
}

/// Human-readable configuration: state, stack and values.
pub fn show_config(inst: &Instance, c: &Config) -> String {
    let m = inst.model.as_machine();
    let vals: Vec<String> = c.values.0.iter().map(|x| x.to_string()).collect();
    format!("({}, \"{}\", ({}))", m.state_names()[c.state], format_stack(&c.stack, inst.model.stack_alphabet()), vals.join(", "))
}
