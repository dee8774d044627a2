mod report;
mod text;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use probenv_core::atomize::atomize;
use probenv_core::certificates::{parse_certificate, verify_certificate};
use probenv_core::dutchbook::{
    believed_ledger, book_for, book_kind, parse_game, realized_values_with, Enumeration, Mode,
};
use probenv_core::feasibility::{
    feasibility_interval, parse_objective, solve, SolverConfig, Strategy, Verdict,
};
use probenv_core::requirements::{parse_spec, substitute_params, RequirementSet};
use probenv_core::{Error, Result};

use report::{
    book_out, certificate_out, from_book, q, undecided_out, witness_out, IntervalOut, Report,
    VerificationOut,
};

#[derive(Parser, Debug)]
#[command(
    name = "probenv",
    version,
    about = "Decide whether probabilistic requirements can hold together"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args, Debug)]
struct Opts {
    /// Solver route: auto, lp, sturm or interval.
    #[arg(long, global = true, default_value = "auto")]
    strategy: Strategy,
    /// Bisection depth limit for branch and prune.
    #[arg(long, global = true)]
    max_depth: Option<u32>,
    /// Node limit for branch and prune.
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Replace `$NAME` in the spec by VALUE before parsing. Repeatable.
    #[arg(long = "set", global = true, value_name = "NAME=VALUE", value_parser = parse_pair)]
    set: Vec<(String, String)>,
    /// Threads used to enumerate game outcomes.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Report wall-clock time (makes the output vary between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline and print the verdict.
    Check { spec: PathBuf },
    /// Print the system over atom probabilities.
    Atoms { spec: PathBuf },
    /// Print the atom distribution, if one exists.
    Witness { spec: PathBuf },
    /// Print the infeasibility certificate, or check one with --verify.
    Certificate {
        spec: PathBuf,
        #[arg(long, value_name = "FILE")]
        verify: Option<PathBuf>,
    },
    /// Exact range of an objective over the feasible set.
    Interval { spec: PathBuf, objective: String },
    /// Turn the certificate into a betting game and evaluate it.
    DutchBook {
        spec: PathBuf,
        #[arg(long, default_value = "greedy")]
        mode: Mode,
        /// Evaluate a game file instead of compiling the certificate.
        #[arg(long, value_name = "FILE")]
        game: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Atoms { .. } => "atoms",
            Command::Witness { .. } => "witness",
            Command::Certificate { .. } => "certificate",
            Command::Interval { .. } => "interval",
            Command::DutchBook { .. } => "dutch-book",
        }
    }

    fn spec(&self) -> &Path {
        match self {
            Command::Check { spec }
            | Command::Atoms { spec }
            | Command::Witness { spec }
            | Command::Certificate { spec, .. }
            | Command::Interval { spec, .. }
            | Command::DutchBook { spec, .. } => spec,
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected NAME=VALUE, got `{s}`")),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load(path: &Path, opts: &Opts) -> Result<RequirementSet> {
    let text = substitute_params(&read(path)?, &opts.set)?;
    parse_spec(&text)
}

fn config(opts: &Opts) -> Result<SolverConfig> {
    let mut cfg = SolverConfig {
        strategy: opts.strategy,
        ..SolverConfig::default()
    };
    if let Some(d) = opts.max_depth {
        cfg.max_depth = d;
    }
    if let Some(n) = opts.max_nodes {
        cfg.max_nodes = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: &Command, opts: &Opts, rep: &mut Report) -> Result<()> {
    let rs = load(cmd.spec(), opts)?;
    rep.warnings = rs.warnings.iter().map(ToString::to_string).collect();
    let cfg = config(opts)?;

    if let Command::Atoms { .. } = cmd {
        let sys = atomize(&rs);
        rep.spec_digest = Some(sys.hash());
        rep.atoms = Some(sys.atoms_text()?.lines().map(str::to_string).collect());
        return Ok(());
    }
    if let Command::Interval { objective, .. } = cmd {
        let sys = atomize(&rs);
        rep.spec_digest = Some(sys.hash());
        let p = parse_objective(&rs, objective)?;
        let iv = feasibility_interval(&rs, &p, &cfg)?;
        rep.interval = Some(IntervalOut {
            objective: objective.clone(),
            lo: q(iv.lo()),
            hi: q(iv.hi()),
        });
        return Ok(());
    }
    if let Command::Certificate {
        verify: Some(file), ..
    } = cmd
    {
        let sys = atomize(&rs);
        rep.spec_digest = Some(sys.hash());
        let (cert, hash) = parse_certificate(&read(file)?)?;
        let system_matches = hash == sys.hash();
        let v = verify_certificate(&cert, &sys);
        let ok = v.ok && system_matches;
        let diagnostic = if system_matches {
            v.diagnostic
        } else {
            format!("certificate names system {hash}, spec is {}", sys.hash())
        };
        rep.verdict = Some(if ok { "inadmissible" } else { "error" }.into());
        rep.verification = Some(VerificationOut {
            file: file.display().to_string(),
            kind: cert.kind().into(),
            system_matches,
            ok,
            diagnostic,
        });
        return Ok(());
    }
    if let Command::DutchBook {
        game: Some(file), ..
    } = cmd
    {
        let sys = atomize(&rs);
        rep.spec_digest = Some(sys.hash());
        let g = parse_game(&read(file)?)?;
        if g.events != sys.event_names() {
            return Err(Error::Invalid(format!(
                "game events {} do not match the spec's {}",
                g.events.join(" "),
                sys.event_names().join(" ")
            )));
        }
        let real = realized_values_with(&g, &enumeration(opts))?;
        let ledger = believed_ledger(&g);
        let kind = book_kind(&real, &ledger);
        let mut notes = Vec::new();
        if !real.exhaustive {
            notes.push(format!(
                "realized values sampled over {} outcomes, not proven",
                real.outcomes
            ));
        }
        if kind.is_none() {
            notes.push("not a book".into());
        }
        rep.book = Some(book_out(
            &g,
            &real,
            &ledger,
            kind.map(|k| k.to_string()),
            notes,
        ));
        return Ok(());
    }

    let sol = solve(&rs, &cfg)?;
    rep.spec_digest = Some(sol.system.hash());
    rep.verdict = Some(sol.verdict.kind().into());
    rep.trace = Some((&sol.trace).into());
    match (&sol.verdict, cmd) {
        (Verdict::Admissible(w), Command::Check { .. } | Command::Witness { .. }) => {
            rep.witness = Some(witness_out(w, &rs)?);
        }
        (Verdict::Inadmissible(c), Command::Check { .. } | Command::Certificate { .. }) => {
            rep.certificate = Some(certificate_out(c, &sol.system));
        }
        (Verdict::Inadmissible(_), Command::DutchBook { mode, .. }) => {
            rep.book = Some(from_book(&book_for(&sol, *mode, &enumeration(opts))?));
        }
        (Verdict::Unknown(u), _) => rep.undecided = Some(undecided_out(u, &sol.system)),
        _ => {}
    }
    Ok(())
}

fn enumeration(opts: &Opts) -> Enumeration {
    Enumeration {
        jobs: opts.jobs as usize,
        ..Enumeration::default()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let start = Instant::now();
    let mut rep = Report::new(
        cli.command.name(),
        &cli.command.spec().display().to_string(),
    );
    if let Err(e) = run(&cli.command, &cli.opts, &mut rep) {
        eprintln!("probenv: {e}");
        rep.verdict = Some("error".into());
        rep.error = Some(e.to_string());
    }
    if let Some(v) = &rep.verification {
        if !v.ok {
            eprintln!("probenv: certificate rejected: {}", v.diagnostic);
        }
    }
    if cli.opts.timing {
        rep.elapsed_us = Some(start.elapsed().as_micros() as u64);
    }
    match cli.opts.format {
        Format::Text => print!("{}", text::render(&rep)),
        Format::Structured => match serde_json::to_string_pretty(&rep) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("probenv: {e}");
                return ExitCode::from(3);
            }
        },
    }
    ExitCode::from(rep.exit_code())
}
