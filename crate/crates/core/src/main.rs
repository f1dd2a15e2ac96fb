use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use cubic_minima::classify::{classify_with, classify_with_mclass, verify_mclass, Classification, ClassifyOptions, Evidence};
use cubic_minima::kummer::DEFAULT_PRECISION_BUDGET;
use cubic_minima::survey::{justify, p4_locus, survey, SurveyOptions, JUSTIFY_HEADER};
use cubic_minima::{Error, Radicand};

#[derive(Parser)]
#[command(name = "cubic-minima", version, about = "Principal factorization types and lattice minima of pure cubic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Bit cap for the cube test in Q(∛d, ζ3) before giving up as undecided.
    #[arg(long, default_value_t = DEFAULT_PRECISION_BUDGET)]
    precision_budget: u64,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a single field Q(∛d).
    Classify {
        d: u64,
        /// Also determine the M-class (type β only).
        #[arg(long)]
        mclass: bool,
        /// Check the M-class against the maximal-order chain (implies --mclass).
        #[arg(long)]
        verify: bool,
        /// Run the whole period instead of stopping at the first principal factor.
        #[arg(long)]
        full_period: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Classify all normalized radicands in [lo, hi].
    Survey {
        lo: u64,
        hi: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Keep records already in --out and compute only the missing ones.
        #[arg(long, requires = "out")]
        resume: bool,
        /// JSONL output file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mclass: bool,
        #[command(flatten)]
        common: Common,
    },
    /// CSV of the coarse and fine criteria for species-2 fields of type β.
    Justify {
        #[arg(required = true)]
        d: Vec<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// CSV of sign samples of P4(X, Y) on a grid.
    P4Locus {
        #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        y_min: f64,
        #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
        y_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
}

fn options(c: &Common, full_period: bool) -> ClassifyOptions {
    ClassifyOptions { full_period, precision_budget: c.precision_budget, ..Default::default() }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Inconsistent(e.to_string()))
}

fn report(c: &Classification) {
    let r = Radicand::normalize(c.d).expect("classified radicand");
    println!("d = {} = {}·{}², species {}, f = {}, R = {}", r.d, r.a, r.b, r.species, r.f, r.r);
    println!("type {}", c.pf_type);
    println!("chain: {:?}, period {}", c.chain_used, c.period_length.map_or("not completed".into(), |l| l.to_string()));
    if !c.pf_norms.is_empty() {
        println!("principal factor norms: {:?}", c.pf_norms);
    }
    for ev in &c.evidence {
        match ev {
            Evidence::PfWitness { index, coordinates, denominator, norm } => {
                let den = if denominator == "1" { String::new() } else { format!("/{denominator}") };
                println!("witness θ_{index} = ({}, {}, {}){den}, norm {norm}", coordinates[0], coordinates[1], coordinates[2]);
            }
            Evidence::QIndex { q, .. } => println!("subfield unit index Q = {q}"),
            Evidence::GammaExcluded { prime } => println!("type γ excluded by ℓ = {prime} | f"),
        }
    }
    if let Some(m) = &c.m_class {
        for line in &m.trace {
            println!("  {line}");
        }
        println!("verdict: type {}, {}", c.pf_type, m.level);
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Classify { d, mclass, verify, full_period, common } => {
            let opts = options(&common, full_period);
            let c = if mclass || verify { classify_with_mclass(d, &opts)? } else { classify_with(d, &opts)? };
            let v = if verify { Some(verify_mclass(&c, &opts)?) } else { None };
            if common.json {
                println!("{}", json(&serde_json::json!({ "classification": c, "verification": v }))?);
                return Ok(());
            }
            report(&c);
            if let Some(v) = v {
                println!("maximal order: period ℓ = {}, principal factor norms {:?}", v.maximal_period, v.maximal_pf_norms);
                if let Some(l0) = v.suborder_period {
                    println!("suborder Z[δ, δ̄]: period ℓ₀ = {l0}");
                    for (j, n, shadows) in &v.suborder_factors {
                        let s: Vec<String> = shadows.iter().map(|s| format!("θ_{} (norm {})", s.index, s.norm)).collect();
                        println!("  φ_{j}: norm {n}; shadows in maximal order: {}", if s.is_empty() { "none".into() } else { s.join(", ") });
                    }
                }
                for (n, predicted, actual) in &v.cosets {
                    println!("  coset of norm {n}: predicted minimum {predicted}, actual {actual}");
                }
                println!("verification {}", if v.agrees { "agrees" } else { "DISAGREES" });
                if !v.agrees {
                    return Err(Error::Inconsistent("M-class verification failed".into()));
                }
            }
        }
        Command::Survey { lo, hi, workers, resume, out, mclass, common } => {
            if lo < 2 {
                return Err(Error::InvalidRadicand(lo));
            }
            let opts = SurveyOptions { workers, mclass, resume, out: out.clone(), classify: options(&common, false) };
            let (summary, records) = survey(lo, hi, &opts)?;
            if common.json {
                println!("{}", json(&summary)?);
            } else {
                if out.is_none() {
                    for rec in &records {
                        println!("{}", serde_json::to_string(rec).map_err(|e| Error::Inconsistent(e.to_string()))?);
                    }
                }
                print!("{summary}");
            }
        }
        Command::Justify { d, common } => {
            let opts = options(&common, false);
            let rows: Vec<_> = d.iter().map(|&d| justify(d, &opts)).collect::<Result<_, _>>()?;
            if common.json {
                println!("{}", json(&rows)?);
            } else {
                println!("{JUSTIFY_HEADER}");
                for row in rows {
                    println!("{}", row.csv());
                }
            }
        }
        Command::P4Locus { x_min, x_max, y_min, y_max, step } => {
            if !(step > 0.0) {
                return Err(Error::Inconsistent("step must be positive".into()));
            }
            println!("x,y,p4,sign,kind");
            for (x, y, v, s, kind) in p4_locus((x_min, x_max), (y_min, y_max), step) {
                println!("{x:.6},{y:.6},{v:.6},{s},{kind}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Undecided { .. } | Error::BudgetExceeded(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
