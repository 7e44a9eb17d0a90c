//! Command-line surface for the refutation pipeline: certificate emission
//! and re-checking, 2-closure computation, the exhaustive small-group
//! oracle, and DOT export.
//!
//! Exit codes are stable: 0 ok, 1 property refuted or check failed,
//! 2 pipeline failure, 3 budget exceeded, 4 unsupported export, 64 usage,
//! 65 bad data, 73 output error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use dci8_core::abstract_group::group_by_name;
use dci8_core::construction::ConstructionParams;
use dci8_core::dci::{
    babai_refutation, certificate_from_json, certificate_to_json, dci_brute, verify_certificate,
    PipelineConfig, WitnessKind,
};
use dci8_core::group::PermGroup;
use dci8_core::orbital::{arcs_of_colors, orbital_coloring, two_closure_capped, SEARCH_DEGREE_CAP};
use dci8_core::textio::{parse_generators, write_generators};
use dci8_core::Error;

const EXIT_OK: u8 = 0;
const EXIT_REFUTED_OR_FAILED_CHECK: u8 = 1;
const EXIT_PIPELINE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_UNSUPPORTED_EXPORT: u8 = 4;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 73;

#[derive(Parser)]
#[command(
    name = "dci8",
    version,
    about = "Refutation certificates for the DCI property"
)]
struct Cli {
    /// Seed for the randomized parts of stabilizer-chain construction.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for the witness search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Node budget for backtracking searches.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    node_cap: u64,

    /// Element budget for exhaustive group enumeration.
    #[arg(long, global = true, default_value_t = 100_000)]
    element_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline for (k, r) and write a verified certificate.
    Refute {
        /// Odd fiber size of the second coordinate.
        #[arg(long)]
        k: usize,
        /// Third-coordinate fiber size, 1 or 3.
        #[arg(long)]
        r: usize,
        /// Output path for the certificate document.
        #[arg(long)]
        out: PathBuf,
    },
    /// Independently re-check a certificate file.
    Verify { cert: PathBuf },
    /// Print the order and generators of the 2-closure of a generator file.
    TwoClosure { gens: PathBuf },
    /// Exhaustively decide the DCI property for a named group of order <= 8.
    BruteDci {
        /// Group name: cyclic (`c8`) or a direct product (`c2xc4`).
        name: String,
    },
    /// Export the witness digraph of a certificate as DOT.
    ExportDot {
        cert: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{}", e);
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            eprint!("{}", e);
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cli.jobs == 0 || cli.node_cap == 0 || cli.element_cap == 0 {
        eprintln!("error: budgets and job counts must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    let cfg = PipelineConfig {
        seed: cli.seed,
        node_cap: cli.node_cap,
        element_cap: cli.element_cap,
        jobs: cli.jobs,
        ..PipelineConfig::default()
    };
    let code = match cli.command {
        Command::Refute { k, r, out } => cmd_refute(k, r, &out, &cfg),
        Command::Verify { cert } => cmd_verify(&cert),
        Command::TwoClosure { gens } => cmd_two_closure(&gens, &cfg),
        Command::BruteDci { name } => cmd_brute_dci(&name),
        Command::ExportDot { cert, out } => cmd_export_dot(&cert, &out),
    };
    ExitCode::from(code)
}

fn budget_or(err: &Error, fallback: u8) -> u8 {
    match err {
        Error::Budget(_) | Error::Capacity(_) => EXIT_BUDGET,
        Error::InvalidParams(_) => EXIT_USAGE,
        Error::Parse(_) => EXIT_DATA,
        _ => fallback,
    }
}

fn cmd_refute(k: usize, r: usize, out: &Path, cfg: &PipelineConfig) -> u8 {
    let params = match ConstructionParams::new(k, r) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_USAGE;
        }
    };
    let cert = match babai_refutation(params, cfg) {
        Ok(cert) => cert,
        Err(e) => {
            eprintln!("error: {}", e);
            return budget_or(&e, EXIT_PIPELINE);
        }
    };
    let report = verify_certificate(&cert);
    if !report.passed {
        for reason in &report.reasons {
            eprintln!("self-check failed: {}", reason);
        }
        return EXIT_PIPELINE;
    }
    let json = certificate_to_json(&cert);
    if let Err(e) = std::fs::write(out, json) {
        eprintln!("error: cannot write {}: {}", out.display(), e);
        return EXIT_IO;
    }
    let kind = match cert.witness.kind {
        WitnessKind::Digraph => "digraph",
        WitnessKind::Colored => "colored",
    };
    println!(
        "certificate written: {} (degree {}, witness {}, {} group automorphisms exhausted)",
        out.display(),
        cert.degree,
        kind,
        cert.aut_count
    );
    EXIT_OK
}

fn cmd_verify(path: &Path) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", path.display(), e);
            return EXIT_DATA;
        }
    };
    let cert = match certificate_from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_DATA;
        }
    };
    let report = verify_certificate(&cert);
    for (name, ok) in &report.checks {
        println!("{} {}", if *ok { "pass" } else { "FAIL" }, name);
    }
    if report.passed {
        println!("certificate OK");
        EXIT_OK
    } else {
        for reason in &report.reasons {
            eprintln!("failed: {}", reason);
        }
        EXIT_REFUTED_OR_FAILED_CHECK
    }
}

fn cmd_two_closure(path: &Path, cfg: &PipelineConfig) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", path.display(), e);
            return EXIT_DATA;
        }
    };
    let (degree, gens) = match parse_generators(&text) {
        Ok(parsed) => parsed,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_DATA;
        }
    };
    if degree > SEARCH_DEGREE_CAP {
        eprintln!(
            "error: degree {} exceeds the closure budget {}",
            degree, SEARCH_DEGREE_CAP
        );
        return EXIT_BUDGET;
    }
    let group = match PermGroup::new_seeded(degree, gens, cfg.seed) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_DATA;
        }
    };
    let closure = match two_closure_capped(&group, cfg.node_cap) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return budget_or(&e, EXIT_PIPELINE);
        }
    };
    println!("order {}", group.order());
    println!("closure order {}", closure.order());
    print!("{}", write_generators(closure.generators()));
    EXIT_OK
}

fn cmd_brute_dci(name: &str) -> u8 {
    let group = match group_by_name(name) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_USAGE;
        }
    };
    if group.order() > 8 {
        eprintln!(
            "error: group {} has order {}, above the oracle ceiling 8",
            name,
            group.order()
        );
        return EXIT_USAGE;
    }
    let violations = match dci_brute(&group, group.order().saturating_sub(1)) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}", e);
            return budget_or(&e, EXIT_PIPELINE);
        }
    };
    if violations.is_empty() {
        println!("DCI confirmed for {}", name);
        EXIT_OK
    } else {
        println!(
            "{} is not a DCI group: {} violating pairs",
            name,
            violations.len()
        );
        for (s, t) in &violations {
            println!("S={{{}}} T={{{}}}", join(s.iter()), join(t.iter()));
        }
        EXIT_REFUTED_OR_FAILED_CHECK
    }
}

fn join<'a>(values: impl Iterator<Item = &'a usize>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_export_dot(cert_path: &Path, out: &Path) -> u8 {
    let text = match std::fs::read_to_string(cert_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", cert_path.display(), e);
            return EXIT_DATA;
        }
    };
    let cert = match certificate_from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_DATA;
        }
    };
    if cert.witness.kind != WitnessKind::Digraph {
        eprintln!("error: certificate carries a colored witness; nothing to export");
        return EXIT_UNSUPPORTED_EXPORT;
    }
    let arcs = match witness_arcs(&cert) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}", e);
            return EXIT_DATA;
        }
    };
    let dot = arcs.to_dot(Some((cert.params.k, cert.params.r)));
    if let Err(e) = std::fs::write(out, dot) {
        eprintln!("error: cannot write {}: {}", out.display(), e);
        return EXIT_IO;
    }
    println!("DOT written: {}", out.display());
    EXIT_OK
}

/// Rebuilds the witness arc set from the stored generators and colors.
fn witness_arcs(
    cert: &dci8_core::dci::DciCertificate,
) -> Result<dci8_core::orbital::ArcSet, Error> {
    use dci8_core::perm::Permutation;
    let gens = vec![
        Permutation::from_images(cert.generators.tau1.clone())?,
        Permutation::from_images(cert.generators.tau2.clone())?,
        Permutation::from_images(cert.generators.rho1.clone())?,
        Permutation::from_images(cert.generators.rho2.clone())?,
    ];
    let g = PermGroup::new(cert.degree, gens)?;
    let coloring = orbital_coloring(&g);
    let colors: Vec<u16> = cert.witness.colors.iter().map(|&c| c as u16).collect();
    arcs_of_colors(&coloring, &colors)
}
