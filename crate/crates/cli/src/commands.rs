use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use fracreach::machines::examples::tcm_doubling_cycle;
use fracreach::machines::{check_run, Config, Firing, FiringSequence, PvassRule, Qpvass, Tcm};
use fracreach::numerics::{IntVector, RatVector, Rational};
use fracreach::oracle::{bounded_decide, OracleResult};
use fracreach::solver::{decide, decide_state_reach, Mode, SolverOptions};
use fracreach_reductions::{
    assemble_unary_instance, cvassrl_to_cpvass, ivass_to_cvassrl, pcp_to_tcm, pda_counter, qvass_amplifier, structured_to_superstructured,
    tcm_to_ivass, BoundedPcp, RunLengthInstance,
};
use num_bigint::BigInt;

use crate::format::{parse_instance, parse_witness, render_instance, render_witness, show_config, FormatError, Instance, Model};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_MALFORMED: i32 = 64;
pub const EXIT_SCHEMA: i32 = 65;
pub const EXIT_IO: i32 = 66;

#[derive(Parser, Debug)]
#[command(name = "fracreach", version, about = "Exact reachability for continuous (pushdown) VASS")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolveMode {
    Reach,
    Cover,
    State,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleMode {
    Reach,
    Cover,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Chain {
    TcmFull,
    PcpFull,
    PdaCounter,
    Amplifier,
    UnaryHardened,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide reachability, coverability or state reachability.
    Solve {
        #[arg(long, value_enum)]
        mode: SolveMode,
        #[arg(long = "in")]
        input: PathBuf,
        /// Target state for --mode state (defaults to the final configuration's state).
        #[arg(long)]
        target_state: Option<String>,
        #[arg(long)]
        max_trees: Option<usize>,
        /// Seconds.
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Accepted for compatibility; evaluation is sequential.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Replay a witness.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value = "init")]
        from: String,
        #[arg(long, default_value = "final")]
        to: String,
    },
    /// Generate reduction-chain instances.
    Gen {
        #[arg(long, value_enum)]
        chain: Chain,
        /// key=value pairs, e.g. m=2 or p=3,5 k=4.
        #[arg(long, num_args = 0..)]
        params: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bounded enumeration of run words with one linear program per word.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, value_enum, default_value = "reach")]
        mode: OracleMode,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure { code: e.exit_code(), msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn io_fail(p: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_IO, msg: format!("{}: {e}", p.display()) }
}

fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| io_fail(p, e))
}

fn write(p: &Path, s: &str) -> Result<(), Failure> {
    std::fs::write(p, s).map_err(|e| io_fail(p, e))
}

fn load(p: &Path) -> Result<Instance, Failure> {
    Ok(parse_instance(&read(p)?)?)
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let res = match cli.cmd {
        Cmd::Solve { mode, input, target_state, max_trees, timeout, emit_certificate, witness_out, jobs: _ } => {
            solve(out, mode, &input, target_state, max_trees, timeout, emit_certificate, witness_out)
        }
        Cmd::Check { input, witness, from, to } => check(out, &input, &witness, &from, &to),
        Cmd::Gen { chain, params, out: dir } => gen(out, chain, &params, &dir),
        Cmd::Oracle { input, max_len, mode, force } => oracle(out, &input, max_len, mode, force),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn pushdown(inst: &Instance) -> Result<Qpvass, Failure> {
    inst.model
        .to_qpvass()
        .ok_or_else(|| Failure { code: EXIT_SCHEMA, msg: format!("the solver takes qvass or qpvass models, not {:?}", inst.model.kind()) })
}

#[allow(clippy::too_many_arguments)]
fn solve(
    out: &mut dyn Write,
    mode: SolveMode,
    input: &Path,
    target_state: Option<String>,
    max_trees: Option<usize>,
    timeout: Option<u64>,
    emit_certificate: Option<PathBuf>,
    witness_out: Option<PathBuf>,
) -> Result<i32, Failure> {
    let inst = load(input)?;
    let m = pushdown(&inst)?;
    let c0 = inst.config("init")?;
    let opts = SolverOptions { max_trees, timeout: timeout.map(Duration::from_secs), ..SolverOptions::default() };
    let solver_err = |e: fracreach::solver::SolverError| Failure { code: EXIT_SCHEMA, msg: e.to_string() };
    let verdict = match mode {
        SolveMode::State => {
            let q = match target_state {
                Some(name) => m.states.iter().position(|s| *s == name).ok_or_else(|| usage(format!("unknown state {name:?}")))?,
                None => inst.config("final")?.state,
            };
            decide_state_reach(&m, c0, q, &opts).map_err(solver_err)?
        }
        SolveMode::Reach | SolveMode::Cover => {
            let c1 = inst.config("final")?;
            let md = if matches!(mode, SolveMode::Reach) { Mode::Reach } else { Mode::Cover };
            decide(&m, c0, c1, md, &opts).map_err(solver_err)?
        }
    };
    let _ = writeln!(out, "{}", verdict.outcome);
    if let Some(w) = &verdict.witness {
        let _ = writeln!(out, "witness: {} steps", w.len());
        if let Some(p) = &witness_out {
            write(p, &render_witness(w))?;
        }
    }
    if let (Some(c), Some(p)) = (&verdict.certificate, &emit_certificate) {
        write(p, &c.to_string())?;
    }
    Ok(if verdict.outcome.is_positive() {
        EXIT_POSITIVE
    } else if verdict.outcome.is_negative() {
        EXIT_NEGATIVE
    } else {
        EXIT_TIMEOUT
    })
}

fn check(out: &mut dyn Write, input: &Path, witness: &Path, from: &str, to: &str) -> Result<i32, Failure> {
    let inst = load(input)?;
    let seq = parse_witness(&read(witness)?)?;
    let c0 = inst.config(from)?;
    let m = inst.model.as_machine();
    match check_run(m, c0, &seq) {
        Ok(end) => {
            let _ = writeln!(out, "OK");
            let _ = writeln!(out, "final: {}", show_config(&inst, &end));
            if let Some(t) = inst.configs.get(to) {
                let rel = if end == *t {
                    "reached"
                } else if end.covers(t) {
                    "covered"
                } else {
                    "missed"
                };
                let _ = writeln!(out, "target {to}: {rel}");
            }
            if let Some(n) = &inst.run_length {
                if *n != BigInt::from(seq.len()) {
                    let _ = writeln!(out, "length: {} steps, instance asks for {n}", seq.len());
                }
            }
            Ok(EXIT_POSITIVE)
        }
        Err(e) => {
            let _ = writeln!(out, "FAIL at step {}: {}", e.index, e.error);
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn oracle(out: &mut dyn Write, input: &Path, max_len: usize, mode: OracleMode, force: bool) -> Result<i32, Failure> {
    if max_len > 12 && !force {
        return Err(usage(format!("--max-len {max_len} exceeds 12; pass --force to run anyway")));
    }
    let inst = load(input)?;
    let m = pushdown(&inst)?;
    let c0 = inst.config("init")?;
    let c1 = inst.config("final")?;
    let md = if matches!(mode, OracleMode::Reach) { Mode::Reach } else { Mode::Cover };
    match bounded_decide(&m, c0, c1, md, max_len) {
        OracleResult::Found(w) => {
            let _ = writeln!(out, "REACHABLE-UP-TO-BOUND");
            let _ = writeln!(out, "word length: {}", w.len());
            Ok(EXIT_POSITIVE)
        }
        OracleResult::NoneUpTo(_) => {
            let _ = writeln!(out, "NO-WITNESS-UP-TO-BOUND");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn param_map(params: &[String]) -> Result<BTreeMap<String, String>, Failure> {
    let mut map = BTreeMap::new();
    for p in params.iter().flat_map(|p| p.split_whitespace()) {
        let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("parameter {p:?} is not key=value")))?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

fn get_usize(map: &BTreeMap<String, String>, key: &str, default: Option<usize>) -> Result<usize, Failure> {
    match map.get(key) {
        Some(v) => v.parse().map_err(|_| usage(format!("{key}={v} is not a natural number"))),
        None => default.ok_or_else(|| usage(format!("missing parameter {key}"))),
    }
}

struct Emitter<'a> {
    dir: &'a Path,
    chain: &'static str,
    params: String,
    written: Vec<String>,
}

impl Emitter<'_> {
    fn instance(&mut self, name: &str, model: Model, configs: [(&str, &Config); 2], run_length: Option<usize>, stage: &str) -> Result<(), Failure> {
        let mut prov = BTreeMap::new();
        prov.insert("chain".to_string(), self.chain.to_string());
        prov.insert("stage".to_string(), stage.to_string());
        prov.insert("params".to_string(), self.params.clone());
        prov.insert("seed".to_string(), "none".to_string());
        let inst = Instance {
            model,
            configs: configs.iter().map(|(k, c)| (k.to_string(), (*c).clone())).collect(),
            run_length: run_length.map(BigInt::from),
            provenance: Some(prov),
        };
        let file = format!("{name}.json");
        write(&self.dir.join(&file), &render_instance(&inst))?;
        self.written.push(file);
        Ok(())
    }

    fn witness(&mut self, name: &str, seq: &[Firing]) -> Result<(), Failure> {
        let file = format!("{name}.witness.json");
        write(&self.dir.join(&file), &render_witness(seq))?;
        self.written.push(file);
        Ok(())
    }
}

fn gen(out: &mut dyn Write, chain: Chain, params: &[String], dir: &Path) -> Result<i32, Failure> {
    let map = param_map(params)?;
    std::fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
    let name = match chain {
        Chain::TcmFull => "tcm-full",
        Chain::PcpFull => "pcp-full",
        Chain::PdaCounter => "pda-counter",
        Chain::Amplifier => "amplifier",
        Chain::UnaryHardened => "unary-hardened",
    };
    let mut em = Emitter { dir, chain: name, params: map.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "), written: Vec::new() };
    match chain {
        Chain::TcmFull => {
            let (t, m) = match map.get("tcm") {
                Some(p) => match load(Path::new(p))?.model {
                    Model::Tcm(t) => (t, get_usize(&map, "m", None)?),
                    other => return Err(usage(format!("{p} holds a {:?} model, not tcm", other.kind()))),
                },
                None => (tcm_doubling_cycle(), get_usize(&map, "m", Some(2))?),
            };
            let runs = t.accepting_runs(m, 1);
            emit_tcm_chain(&mut em, &t, m, runs.first().map(|r| r.as_slice()))?;
        }
        Chain::PcpFull => {
            let pairs_s = map.get("pairs").ok_or_else(|| usage("missing parameter pairs (u:v,u:v,...)"))?;
            let mut pairs = Vec::new();
            for p in pairs_s.split(',') {
                let (u, v) = p.split_once(':').ok_or_else(|| usage(format!("pair {p:?} is not u:v")))?;
                pairs.push((u, v));
            }
            let bound = get_usize(&map, "bound", None)?;
            let pcp = BoundedPcp::new(&pairs, bound).map_err(|e| usage(e.to_string()))?;
            let pt = pcp_to_tcm(&pcp);
            let solution = pcp.solve();
            let run = solution.as_ref().map(|s| pt.run_for(s));
            let tcm_init = pt.tcm.initial_config();
            let tcm_fin = Config::new(pt.tcm.final_state, RatVector::zeros(2));
            em.instance("tcm", Model::Tcm(pt.tcm.clone()), [("init", &tcm_init), ("final", &tcm_fin)], Some(pt.m), "tcm")?;
            emit_tcm_chain(&mut em, &pt.tcm, pt.m, run.as_deref())?;
        }
        Chain::PdaCounter => {
            let m = get_usize(&map, "m", None)?;
            let p = pda_counter(m).map_err(|e| usage(e.to_string()))?;
            let machine = Qpvass {
                states: p.states.clone(),
                stack_alphabet: p.symbols.clone(),
                dim: 0,
                rules: p.rules.iter().map(|r| PvassRule { from: r.from, to: r.to, update: IntVector(Vec::new()), stack: r.stack }).collect(),
            };
            let c0 = Config::new(p.start, RatVector(Vec::new()));
            let c1 = Config::new(p.end, RatVector(Vec::new()));
            em.instance("instance", Model::Qpvass(machine), [("init", &c0), ("final", &c1)], Some(m), "counter")?;
            let seq: FiringSequence = p.run().into_iter().map(|r| Firing::new(Rational::one(), r)).collect();
            em.witness("instance", &seq)?;
        }
        Chain::Amplifier => {
            let p = map.get("p").ok_or_else(|| usage("missing parameter p (comma-separated)"))?;
            let p: Vec<BigInt> = p.split(',').map(|x| x.trim().parse().map_err(|_| usage(format!("bad value {x:?}")))).collect::<Result<_, _>>()?;
            let k = get_usize(&map, "k", None)? as u32;
            let amp = qvass_amplifier(&p, k).map_err(|e| usage(e.to_string()))?;
            let b = &amp.inner.instance;
            em.instance("bounded", Model::IvassRl(b.machine.clone()), [("init", &b.c_init), ("final", &b.c_fin)], Some(b.steps), "bounded amplifier")?;
            em.witness("bounded", &amp.inner.witness().map_err(|e| usage(e.to_string()))?)?;
            let q = amp.instance();
            em.instance("instance", Model::Qvass(q.machine.clone()), [("init", &q.c_init), ("final", &q.c_fin)], Some(q.steps), "amplifier")?;
            em.witness("instance", &amp.witness)?;
        }
        Chain::UnaryHardened => {
            let m = get_usize(&map, "m", Some(2))?;
            let t = tcm_doubling_cycle();
            let ch = tcm_to_ivass(&t, m).map_err(|e| usage(e.to_string()))?;
            let cc = ivass_to_cvassrl(&ch.instance);
            let sc = structured_to_superstructured(&cc.instance).map_err(|e| usage(e.to_string()))?;
            let u = assemble_unary_instance(&sc.instance).map_err(|e| usage(e.to_string()))?;
            let q = &u.instance;
            em.instance("instance", Model::Qvass(q.machine.clone()), [("init", &q.c_init), ("final", &q.c_fin)], Some(q.steps), "unary")?;
            if let Some(run) = t.accepting_runs(m, 1).first() {
                let s1 = ch.translate(run).map_err(|e| usage(e.to_string()))?;
                let s = u.translate(&sc.translate(&cc.translate(&s1))).map_err(|e| usage(e.to_string()))?;
                em.witness("instance", &s)?;
            }
        }
    }
    for f in &em.written {
        let _ = writeln!(out, "wrote {}", dir.join(f).display());
    }
    Ok(EXIT_POSITIVE)
}

fn emit_tcm_chain(em: &mut Emitter, t: &Tcm, m: usize, run: Option<&[usize]>) -> Result<(), Failure> {
    let bad = |e: fracreach_reductions::ReductionError| usage(e.to_string());
    let ch = tcm_to_ivass(t, m).map_err(bad)?;
    let i = &ch.instance;
    em.instance("bounded", Model::IvassRl(i.machine.clone()), [("init", &i.c_init), ("final", &i.c_fin)], Some(i.steps), "bounded")?;
    let cc = ivass_to_cvassrl(i);
    let q: &RunLengthInstance<_> = &cc.instance;
    em.instance("continuous", Model::Qvass(q.machine.clone()), [("init", &q.c_init), ("final", &q.c_fin)], Some(q.steps), "continuous")?;
    let pc = cvassrl_to_cpvass(q).map_err(bad)?;
    em.instance("instance", Model::Qpvass(pc.machine.clone()), [("init", &pc.c0), ("final", &pc.c1)], None, "pushdown")?;
    if let Some(run) = run {
        let s1 = ch.translate(run).map_err(bad)?;
        let s2 = cc.translate(&s1);
        let s3 = pc.translate(&s2).map_err(bad)?;
        em.witness("bounded", &s1)?;
        em.witness("continuous", &s2)?;
        em.witness("instance", &s3)?;
    }
    Ok(())
}
