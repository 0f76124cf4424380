use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use robsynth::analyze::{self, Dtmc, Trace};
use robsynth::ast::{expand, parse_formula, parse_formula_unchecked, parse_spec, Expanded, Formula};
use robsynth::casestudies::{self, MinepumpParams};
use robsynth::compile::compile;
use robsynth::dfa::{Alphabet, Dfa};
use robsynth::robust::{self, Criterion, RobustSpec};
use robsynth::semantics;
use robsynth::synth::{self, Controller, Problem, Supervisor, SynthParams};
use robsynth::{Error, Exec};

#[derive(Parser)]
#[command(name = "robsynth", version, about = "Robust controller synthesis from QDDC specifications")]
struct Cli {
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dump,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Hard,
    Soft,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Stage {
    Mps,
    Mphos,
    Controller,
    /// Controller determinized directly from the maximal supervisor.
    MpsController,
}

#[derive(clap::Args)]
struct CriterionArgs {
    /// Robustness criterion; the specification's indicator binding is the
    /// assumption and its soft requirement the commitment.
    #[arg(long)]
    criterion: Option<String>,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = 3)]
    b: u64,
    /// Indicator variable bound to the assumption.
    #[arg(long, default_value = casestudies::INDICATOR)]
    indicator: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a formula or a specification requirement to a minimal automaton.
    Compile {
        /// Specification file.
        spec: Option<PathBuf>,
        #[arg(long, conflicts_with = "spec")]
        formula: Option<String>,
        /// Comma-separated variable order for --formula (default: free variables).
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long, value_enum, default_value = "hard")]
        part: Part,
        #[command(flatten)]
        robust: CriterionArgs,
        #[arg(long, value_enum, default_value = "dump")]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a supervisor or controller.
    Synth {
        spec: PathBuf,
        #[command(flatten)]
        robust: CriterionArgs,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        #[arg(long, default_value_t = 0.9)]
        discount: f64,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        /// Output preference, e.g. `a1,a2,!a3` (default: declared outputs, true first).
        #[arg(long)]
        order: Option<String>,
        #[arg(long, value_enum, default_value = "controller")]
        stage: Stage,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the must-guarantees of two supervisors.
    Dominance {
        left: PathBuf,
        right: PathBuf,
        /// Commitment: a specification file (its soft requirement) or a formula.
        #[arg(long)]
        commit: String,
    },
    /// Long-run expected satisfaction of a property under uniform inputs.
    Expect {
        controller: PathBuf,
        /// Property: a specification file (its soft requirement) or a formula.
        #[arg(long)]
        prop: String,
        /// Write the closed-loop chain as MRMC `.tra`.
        #[arg(long)]
        tra: Option<PathBuf>,
        /// Write the accepting-state labelling as MRMC `.lab`.
        #[arg(long)]
        lab: Option<PathBuf>,
        /// Also estimate the value with this many simulated steps.
        #[arg(long)]
        monte_carlo: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a controller on an input trace.
    Simulate {
        controller: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Verdict columns, `NAME=formula`.
        #[arg(long = "prop")]
        props: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the implication lattice of the robustness criteria.
    Lattice {
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 3)]
        b: u64,
    },
    /// Generate a case-study specification.
    Gen {
        #[command(subcommand)]
        study: Study,
    },
    /// Evaluate a formula on a word, e.g. `{p} {p,q} {}`.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        word: String,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Study {
    Arbiter {
        n: usize,
        k: u64,
        i: usize,
        #[command(flatten)]
        out: GenArgs,
    },
    Minepump {
        w: u64,
        epsilon: u64,
        zeta: u64,
        kappa: u64,
        /// Window of the intermittency macro (default w+1).
        #[arg(long)]
        window: Option<u64>,
        #[command(flatten)]
        out: GenArgs,
    },
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, default_value = "BeCurrentlyCorrect")]
    criterion: String,
    #[arg(long = "ck", default_value_t = 1)]
    ck: u64,
    #[arg(long = "cb", default_value_t = 3)]
    cb: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(e) if e.is_input_error() => 2,
        Some(Error::ResourceLimit(_)) => 3,
        Some(Error::Unrealizable(_)) => 4,
        Some(Error::AlphabetMismatch(_) | Error::InterfaceMismatch(_)) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match run(cli.cmd, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Prints `msg` to stdout when the artifact goes to a file, to stderr
/// otherwise, so stdout carries exactly one artifact.
fn report(out: Option<&Path>, msg: &str) {
    if out.is_some() {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn load_spec(path: &Path) -> anyhow::Result<Expanded> {
    Ok(expand(&parse_spec(&read(path)?)?)?)
}

fn criterion(args: &CriterionArgs) -> anyhow::Result<Option<Criterion>> {
    args.criterion
        .as_ref()
        .map(|n| {
            Criterion::from_parts(n, args.k, args.b)
                .ok_or_else(|| Error::BadArgument(format!("unknown criterion `{n}` or non-positive parameters")).into())
        })
        .transpose()
}

/// Applies `--criterion`: the indicator binding becomes the assumption and
/// the soft requirement the commitment.
fn robustify(e: Expanded, args: &CriterionArgs) -> anyhow::Result<Expanded> {
    let Some(c) = criterion(args)? else { return Ok(e) };
    let assumption = e
        .indicator(&args.indicator)
        .cloned()
        .ok_or_else(|| Error::BadArgument(format!("--criterion needs an indicator `{}` bound to the assumption", args.indicator)))?;
    let spec = RobustSpec {
        name: e.name.clone(),
        inputs: e.inputs.clone(),
        outputs: e.outputs.iter().filter(|o| **o != args.indicator).cloned().collect(),
        assumption,
        commitment: e.soft.clone(),
        criterion: c,
        indicator: args.indicator.clone(),
    };
    Ok(robust::lower(&spec)?)
}

/// A specification file (soft requirement) or a formula over `alphabet`.
fn property(text: &str, alphabet: &Alphabet) -> anyhow::Result<Dfa> {
    let f = if Path::new(text).is_file() {
        load_spec(Path::new(text))?.soft
    } else {
        parse_formula(text, alphabet.vars())?
    };
    Ok(compile(&f, alphabet)?)
}

fn run(cmd: Cmd, exec: Exec) -> anyhow::Result<()> {
    match cmd {
        Cmd::Compile {
            spec,
            formula,
            vars,
            part,
            robust,
            emit,
            out,
        } => {
            let (f, alphabet): (Formula, Alphabet) = match (spec, formula) {
                (Some(path), None) => {
                    let e = robustify(load_spec(&path)?, &robust)?;
                    let f = match part {
                        Part::Hard => e.hard.clone(),
                        Part::Soft => e.soft.clone(),
                    };
                    (f, Alphabet::new(e.vars())?)
                }
                (None, Some(text)) => {
                    let f = parse_formula_unchecked(&text)?;
                    let vars = if vars.is_empty() { f.free_vars().into_iter().collect() } else { vars };
                    (parse_formula(&text, &vars)?, Alphabet::new(vars)?)
                }
                _ => bail!(Error::BadArgument("give a specification file or --formula".into())),
            };
            let d = compile(&f, &alphabet)?;
            let text = match emit {
                Emit::Dump => d.to_dump(),
                Emit::Dot => d.to_dot(),
            };
            write_or_print(out.as_deref(), &text)?;
            report(out.as_deref(), &format!("states {}", d.state_count()));
        }
        Cmd::Synth {
            spec,
            robust,
            horizon,
            discount,
            delta,
            order,
            stage,
            out,
        } => {
            let label = robust.criterion.clone().unwrap_or_else(|| "specification".into());
            let e = robustify(load_spec(&spec)?, &robust)?;
            let p = Problem::new(&e)?;
            let sup = match p.mps() {
                Err(Error::Unrealizable(msg)) => {
                    return Err(anyhow!(Error::Unrealizable(format!("{label}: {msg}"))));
                }
                r => r?,
            };
            let params = SynthParams {
                horizon,
                discount,
                delta,
            };
            let text = match stage {
                Stage::Mps => sup.to_dump("mps"),
                _ => {
                    let h = match stage {
                        Stage::MpsController => sup,
                        _ => synth::mphos(&sup, &p.soft, &params, exec)?,
                    };
                    if stage == Stage::Mphos {
                        h.to_dump("mphos")
                    } else {
                        let lits = match order {
                            Some(o) => synth::parse_order(&o)?,
                            None => {
                                let declared: Vec<&String> = e
                                    .outputs
                                    .iter()
                                    .filter(|o| e.indicator(o).is_none() && **o != robust.indicator)
                                    .collect();
                                synth::parse_order(&declared.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","))?
                            }
                        };
                        synth::det_by_order(&h, &lits)?.to_dump()
                    }
                }
            };
            write_or_print(out.as_deref(), &text)?;
            let states = text.lines().find_map(|l| l.strip_prefix("dfa ")).and_then(|l| l.split(' ').next()).unwrap_or("?");
            report(out.as_deref(), &format!("realizable ({label}); states {states}"));
        }
        Cmd::Dominance { left, right, commit } => {
            let l = Supervisor::from_dump(&read(&left)?)?;
            let r = Supervisor::from_dump(&read(&right)?)?;
            if l.io() != r.io() {
                bail!(Error::InterfaceMismatch("supervisors over different signatures".into()));
            }
            let c = property(&commit, l.io().alphabet())?;
            let d = analyze::must_dominance(&l, &r, &c)?;
            println!("{}", d.relation);
            if let Some(w) = d.left_only {
                println!("left-only\t{w}");
            }
            if let Some(w) = d.right_only {
                println!("right-only\t{w}");
            }
        }
        Cmd::Expect {
            controller,
            prop,
            tra,
            lab,
            monte_carlo,
            seed,
        } => {
            let cnt = Controller::from_dump(&read(&controller)?)?;
            let d = property(&prop, cnt.supervisor().io().alphabet())?;
            let m: Dtmc = analyze::build_dtmc(&cnt, &d)?;
            println!("{:.6}", analyze::long_run_value_with(&m, exec)?);
            if let Some(steps) = monte_carlo {
                let runs = 16;
                println!("monte-carlo {:.6}", analyze::monte_carlo(&m, runs, steps.div_ceil(runs), seed, exec));
            }
            if let Some(p) = tra {
                fs::write(&p, m.to_tra()).with_context(|| format!("writing {}", p.display()))?;
            }
            if let Some(p) = lab {
                fs::write(&p, m.to_lab()).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Cmd::Simulate {
            controller,
            trace,
            props,
            out,
        } => {
            let cnt = Controller::from_dump(&read(&controller)?)?;
            let alphabet = cnt.supervisor().io().alphabet().clone();
            let input = Trace::from_csv(read(&trace)?.as_bytes())?;
            let props = props
                .iter()
                .map(|p| {
                    let (name, text) = p
                        .split_once('=')
                        .ok_or_else(|| Error::BadArgument(format!("--prop `{p}` is not NAME=formula")))?;
                    Ok((name.trim().to_string(), property(text, &alphabet)?))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let result = analyze::simulate(&cnt, &input, &props)?;
            let mut buf = Vec::new();
            result.to_csv(&mut buf)?;
            write_or_print(out.as_deref(), &String::from_utf8(buf)?)?;
        }
        Cmd::Lattice { k, b } => {
            let mut pairs = robust::lattice_edges(k, b);
            for (l, r) in robust::lattice_equivalences(k, b) {
                pairs.push((l, r));
                pairs.push((r, l));
            }
            let rows = robust::lattice_check(&pairs, casestudies::INDICATOR, exec)?;
            println!("lhs\trhs\tverdict\tcounterexample");
            for r in &rows {
                let cex = r.counterexample.as_ref().map(|w| w.to_string()).unwrap_or_else(|| "-".into());
                println!("{}\t{}\t{}\t{cex}", r.lhs, r.rhs, if r.valid { "VALID" } else { "INVALID" });
            }
            if rows.iter().any(|r| !r.valid) {
                bail!("some implications are invalid");
            }
        }
        Cmd::Gen { study } => {
            let (cs, args) = match study {
                Study::Arbiter { n, k, i, out } => (casestudies::arbiter(n, k, i)?, out),
                Study::Minepump {
                    w,
                    epsilon,
                    zeta,
                    kappa,
                    window,
                    out,
                } => {
                    let mut p = MinepumpParams::new(w, epsilon, zeta, kappa);
                    if let Some(n) = window {
                        p = p.with_window(n);
                    }
                    (casestudies::minepump(p)?, out)
                }
            };
            let c = Criterion::from_parts(&args.criterion, args.ck, args.cb)
                .ok_or_else(|| Error::BadArgument(format!("unknown criterion `{}`", args.criterion)))?;
            write_or_print(args.out.as_deref(), &cs.qsf(c).to_string())?;
        }
        Cmd::Eval { formula, word, vars } => {
            let f = parse_formula_unchecked(&formula)?;
            let vars = if vars.is_empty() { f.free_vars().into_iter().collect() } else { vars };
            let alphabet = Alphabet::new(&vars)?;
            let f = parse_formula(&formula, &vars)?;
            let letters = parse_word(&word, &alphabet)?;
            let oracle = semantics::Oracle::new(&f, &alphabet)?;
            let d = compile(&f, &alphabet)?;
            let bits = oracle.prefixes(&letters);
            let mut s = d.initial();
            for (i, &l) in letters.iter().enumerate() {
                s = d.step(s, l);
                let want = bits >> i & 1 == 1;
                if want != d.is_accepting(s) {
                    bail!("automaton and evaluator disagree at position {i}");
                }
                println!("{i}\t{}\t{}", alphabet.format_letter(l), want);
            }
        }
    }
    Ok(())
}

/// Parses `{p} {p,q} {}` (separators between letters are optional).
fn parse_word(text: &str, alphabet: &Alphabet) -> anyhow::Result<Vec<u32>> {
    let mut letters = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('{')
            .and_then(|r| r.split_once('}'))
            .ok_or_else(|| Error::Format(format!("expected `{{...}}` at `{rest}`")))?;
        let names: Vec<&str> = body.0.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        letters.push(alphabet.letter(&names)?);
        rest = body.1.trim_start_matches(|c: char| c == ',' || c == ';' || c.is_whitespace());
    }
    if letters.is_empty() || letters.len() >= semantics::ORACLE_MAX_LEN {
        bail!(Error::Format("word must have between 1 and 63 letters".into()));
    }
    Ok(letters)
}
