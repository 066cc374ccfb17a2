use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oddu_core::elementary::{atom_matrix, check_relations, eval_word, Atom};
use oddu_core::factor::{factor_extra, factor_short, factor_tlevel, verify_certificate, ConjugateWord, FactorError};
use oddu_core::level::{level_of, LevelClass};
use oddu_core::sharpness::{
    cap_from_env, check_thm2, check_thm3_staged, check_thm4_lower, probe_open_questions, SharpnessError,
    DEFAULT_FRONTIER_CAP, DEFAULT_ORBIT_CAP,
};
use oddu_core::text::{
    format_certificate, format_matrix, parse_atom, parse_certificate, parse_matrix, parse_setup, parse_word, TargetRef,
};
use oddu_core::{FormSetup, HPair, UMatrix};

/// Computations in odd-dimensional unitary groups over finite fields.
#[derive(Parser)]
#[command(name = "oddu", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the elementary relations on random admissible samples.
    Relations {
        /// Setup file.
        #[arg(long)]
        setup: PathBuf,
        /// Samples per relation family.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify the level of a matrix.
    Level {
        #[arg(long)]
        setup: PathBuf,
        /// Matrix file (`n=<n>` then 2n+1 rows).
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Write a target transvection as a product of conjugates of a matrix.
    Factorize {
        #[arg(long)]
        setup: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// Target atom, `S(i,j,x)` or `X(i,x,y)`.
        #[arg(long)]
        target: String,
        /// Certificate output file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate.
    Verify {
        #[arg(long)]
        setup: PathBuf,
        /// Certificate file.
        #[arg(long)]
        cert: PathBuf,
    },
    /// Exhaustive lower-bound checks.
    Sharpness {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Minimal product lengths over the orbit of a matrix.
    Probe {
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Evaluate a `;`-separated word of atoms and print its matrix.
    Eval {
        #[arg(long)]
        setup: PathBuf,
        /// Word such as `S(1,2,1);X(1,0,1)`.
        #[arg(long)]
        word: String,
        /// Matrix output file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Thm2,
    Thm3,
    Thm4,
    Probe,
}

#[derive(clap::Args)]
struct SearchOpts {
    /// Setup file (probe only).
    #[arg(long)]
    setup: Option<PathBuf>,
    /// Matrix whose orbit is searched (probe only).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Target atoms (probe only); repeatable.
    #[arg(long)]
    target: Vec<String>,
    /// Orbit cap; defaults to ODDU_CAP or 100000.
    #[arg(long)]
    cap: Option<usize>,
    /// Largest product length searched.
    #[arg(long, default_value_t = 4)]
    mmax: usize,
    /// Echoed in the report; the searches are exhaustive.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<SharpnessError> for Failure {
    fn from(e: SharpnessError) -> Self {
        Failure::Check(e.to_string())
    }
}

impl From<FactorError> for Failure {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::BadTarget(_) | FactorError::WrongLevel { .. } | FactorError::RankTooSmall(_) => {
                Failure::Input(e.to_string())
            }
            FactorError::PreconditionFailed(_) | FactorError::Elem(_) | FactorError::Level(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(ctx: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", ctx.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(input(path))
}

fn load_setup(path: &Path) -> Result<FormSetup, Failure> {
    parse_setup(&read(path)?).map_err(input(path))
}

fn load_matrix(setup: &FormSetup, path: &Path) -> Result<UMatrix, Failure> {
    let m = parse_matrix(setup.field(), &read(path)?).map_err(input(path))?;
    if m.rank() != setup.n {
        return Err(Failure::Input(format!(
            "{}: rank {} but setup has n={}",
            path.display(),
            m.rank(),
            setup.n
        )));
    }
    Ok(m)
}

/// Resolves a file reference from a certificate: as given, else next to the certificate.
fn resolve(reference: &str, cert: &Path) -> PathBuf {
    let p = PathBuf::from(reference);
    if p.is_absolute() || p.exists() {
        return p;
    }
    cert.parent().map_or(p.clone(), |d| d.join(&p))
}

fn atom_arg(setup: &FormSetup, s: &str) -> Result<Atom, Failure> {
    parse_atom(setup.field(), s).map_err(|e| Failure::Input(format!("--target: {e}")))
}

/// Runs one verb; returns the report and whether every check passed.
fn run(cmd: Cmd) -> Result<(String, bool), Failure> {
    let mut out = String::new();
    match cmd {
        Cmd::Relations { setup, samples, seed } => {
            let s = load_setup(&setup)?;
            let r = check_relations(&s, samples, seed);
            write!(out, "{r}").unwrap();
            writeln!(
                out,
                "RESULT relations.all_pass={} relations.seed={seed} relations.samples={samples}",
                r.all_pass()
            )
            .unwrap();
            Ok((out, r.all_pass()))
        }
        Cmd::Level { setup, matrix } => {
            let s = load_setup(&setup)?;
            let m = load_matrix(&s, &matrix)?;
            let l = level_of(&s, &m).map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out, "level {}", l.name()).unwrap();
            writeln!(out, "ideal {}", l.ideal()).unwrap();
            if let Some(w) = l.witness() {
                writeln!(out, "witness {}", w.describe(&s)).unwrap();
            }
            writeln!(out, "RESULT level={}", l.name()).unwrap();
            Ok((out, true))
        }
        Cmd::Factorize {
            setup,
            matrix,
            target,
            out: cert_out,
        } => {
            let s = load_setup(&setup)?;
            let m = load_matrix(&s, &matrix)?;
            let atom = atom_arg(&s, &target)?;
            let cw = factorize(&s, &m, atom)?;
            let base_ref = matrix.display().to_string();
            let text = format_certificate(s.field(), &cw, &base_ref, &TargetRef::Atom(atom));
            if let Some(p) = cert_out {
                std::fs::write(&p, &text).map_err(input(&p))?;
            }
            out.push_str(&text);
            writeln!(out, "RESULT factorize.length={} factorize.verified=true", cw.len()).unwrap();
            Ok((out, true))
        }
        Cmd::Verify { setup, cert } => {
            let s = load_setup(&setup)?;
            let f = s.field();
            let c = parse_certificate(f, &read(&cert)?).map_err(input(&cert))?;
            let base = load_matrix(&s, &resolve(&c.base, &cert))?;
            let target = match &c.target {
                TargetRef::Atom(a) => atom_matrix(&s, a).map_err(|e| Failure::Input(e.to_string()))?,
                TargetRef::File(p) => load_matrix(&s, &resolve(p, &cert))?,
            };
            let cw = ConjugateWord {
                base,
                factors: c.factors,
                target,
                target_atom: None,
            };
            let ok = verify_certificate(&s, &cw);
            writeln!(out, "RESULT verify.verified={ok} verify.length={}", cw.len()).unwrap();
            Ok((out, ok))
        }
        Cmd::Sharpness { which, opts } => sharpness(which, opts),
        Cmd::Probe { opts } => sharpness(Which::Probe, opts),
        Cmd::Eval {
            setup,
            word,
            out: mat_out,
        } => {
            let s = load_setup(&setup)?;
            let w = parse_word(s.field(), &word).map_err(|e| Failure::Input(format!("--word: {e}")))?;
            let m = eval_word(&s, &w).map_err(|e| Failure::Input(e.to_string()))?;
            let text = format_matrix(s.field(), &m);
            if let Some(p) = mat_out {
                std::fs::write(&p, &text).map_err(input(&p))?;
            }
            out.push_str(&text);
            Ok((out, true))
        }
    }
}

fn factorize(s: &FormSetup, m: &UMatrix, atom: Atom) -> Result<ConjugateWord, Failure> {
    Ok(match atom {
        Atom::Short { i, j, x } => factor_short(s, m, i, j, x)?,
        Atom::Extra { i, x, y } => {
            let level = level_of(s, m).map_err(|e| Failure::Input(e.to_string()))?;
            if y.is_zero() && matches!(level, LevelClass::TLevel { .. }) {
                factor_tlevel(s, m, i, x)?
            } else {
                factor_extra(s, m, i, HPair::new(x, y))?
            }
        }
        _ => return Err(Failure::Input("target must be S(i,j,x) or X(i,x,y)".into())),
    })
}

fn sharpness(which: Which, o: SearchOpts) -> Result<(String, bool), Failure> {
    let cap = o.cap.unwrap_or_else(|| cap_from_env(DEFAULT_ORBIT_CAP));
    let mut out = format!("seed={} cap={cap} mmax={}\n", o.seed, o.mmax);
    let ok = match which {
        Which::Thm2 => {
            let r = check_thm2(3, cap, o.mmax, DEFAULT_FRONTIER_CAP)?;
            writeln!(out, "{r}{}", r.summary()).unwrap();
            r.passed()
        }
        Which::Thm3 => {
            let r = check_thm3_staged();
            writeln!(out, "{r}{}", r.summary()).unwrap();
            r.passed()
        }
        Which::Thm4 => {
            let r = check_thm4_lower(cap, DEFAULT_FRONTIER_CAP)?;
            writeln!(out, "{r}{}", r.summary()).unwrap();
            r.passed()
        }
        Which::Probe => {
            let setup = o.setup.ok_or_else(|| Failure::Input("probe needs --setup".into()))?;
            let matrix = o.matrix.ok_or_else(|| Failure::Input("probe needs --matrix".into()))?;
            let s = load_setup(&setup)?;
            let m = load_matrix(&s, &matrix)?;
            let names = if o.target.is_empty() {
                vec!["S(1,2,1)".to_string()]
            } else {
                o.target
            };
            let mut targets = vec![];
            for t in names {
                let a = atom_arg(&s, &t)?;
                let tm = atom_matrix(&s, &a).map_err(|e| Failure::Input(e.to_string()))?;
                targets.push((t, tm));
            }
            let r = probe_open_questions(&s, &m, &targets, o.mmax, cap, DEFAULT_FRONTIER_CAP)?;
            writeln!(out, "{r}{}", r.summary()).unwrap();
            true
        }
    };
    Ok((out, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((report, ok)) => {
            print!("{report}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
