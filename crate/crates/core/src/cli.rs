//! Command-line front end. [`run`] returns the process exit code so the
//! binary stays a one-liner and tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::compacta::{CompactInterval, Derivation, SigmaValue};
use crate::delta::t122_points;
use crate::engine::{
    aharoni_demo, distortion_of_sample, lower_bound_for_sigma, refute_with,
    universality_obstruction, CandidateMap, EngineOutcome, LowerBound, RefuteConfig,
};
use crate::error::{Error, Result};
use crate::json::{self, DistortionDoc, OutcomeDoc};
use crate::ordinal::Ordinal;
use crate::rational::{self, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "ckdist",
    version,
    about = "Cantor-Bendixson structure of ordinal compacta and distortion lower bounds for embeddings into C(K)"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derivative chain, σ(K) and i_CB(K) of K = [0, β].
    Cb {
        /// Endpoint β as an ordinal literal, e.g. w^2*3+w+4 or w^w.
        #[arg(long)]
        compact: Ordinal,
        /// Also report K^(N); N is a natural or `omega`.
        #[arg(long)]
        derive: Option<Derivation>,
    },
    /// Expansion, contraction and distortion of a map on a point sample.
    Dist {
        #[arg(long)]
        map: PathBuf,
        /// JSON array of point sets, e.g. [[],[0],[0,2]].
        #[arg(long)]
        points: PathBuf,
    },
    /// Search for a bi-Lipschitz violation. Exit 0: witness, 2: inconclusive.
    Refute {
        #[arg(long)]
        map: PathBuf,
        /// Write the outcome JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest singleton window per family.
        #[arg(long, default_value_t = 1024)]
        max_window: usize,
    },
    /// The two-branch argument for k = 2 on [0,ω] against an isometric
    /// Fréchet map of the two-branch subtree.
    DemoAharoni {
        /// Largest label n in the subtree.
        #[arg(long, default_value_t = 6)]
        n: u64,
        #[arg(long, default_value = "19/10", value_parser = parse_rational)]
        claimed_d: Rational,
    },
    /// Lower bounds (σ+1)/σ on the distortion of SEP into C(K).
    Table {
        #[arg(long, default_value_t = 4)]
        max_sigma: u32,
    },
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Cb { compact, derive } => cb(cli.format, compact, *derive, out).map(|_| EXIT_OK),
        Command::Dist { map, points } => {
            let map = json::load_map(map)?;
            let points = json::load_points(points)?;
            let report = distortion_of_sample(&points, &map)?;
            match cli.format {
                Format::Json => emit(out, &DistortionDoc::from(&report))?,
                Format::Text => {
                    let (a, b) = &report.expansion_pair;
                    writeln!(out, "points: {}", points.len())?;
                    writeln!(
                        out,
                        "expansion ‖f‖_Lip = {} at ({a}, {b})",
                        rational::format(&report.expansion)
                    )?;
                    let (a, b) = &report.contraction_pair;
                    writeln!(
                        out,
                        "contraction ‖f⁻¹‖_Lip = {} at ({a}, {b})",
                        rational::format(&report.contraction)
                    )?;
                    writeln!(out, "distortion = {}", rational::format(&report.distortion))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Refute {
            map,
            out: path,
            max_window,
        } => {
            let map = json::load_map(map)?;
            let config = RefuteConfig {
                max_window: (*max_window).max(1),
                ..RefuteConfig::default()
            };
            let outcome = refute_with(&map, &config)?;
            report_outcome(cli.format, &map, &outcome, path.as_ref(), out)
        }
        Command::DemoAharoni { n, claimed_d } => {
            let compact = CompactInterval::new(Ordinal::omega());
            let domain = t122_points(*n)?;
            let map = CandidateMap::frechet(2, compact, claimed_d.clone(), domain.clone(), true)?;
            if cli.format == Format::Text {
                writeln!(out, "K = [0,ω], k = 2, D = {}", rational::format(claimed_d))?;
                let names: Vec<String> = domain.iter().map(ToString::to_string).collect();
                writeln!(
                    out,
                    "f = Fréchet coordinates of T_n = {{{}}}, evaluated on all of T",
                    names.join(", ")
                )?;
            }
            let outcome = aharoni_demo(&map, &RefuteConfig::default())?;
            report_outcome(cli.format, &map, &outcome, None, out)
        }
        Command::Table { max_sigma } => {
            table(cli.format, *max_sigma, out)?;
            Ok(EXIT_OK)
        }
    }
}

fn report_outcome(
    format: Format,
    map: &CandidateMap,
    outcome: &EngineOutcome,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<i32> {
    let doc = OutcomeDoc::from(outcome);
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    match format {
        Format::Json => emit(out, &doc)?,
        Format::Text => {
            for (i, step) in outcome.trace().iter().enumerate() {
                writeln!(out, "{:>2}. {step}", i + 1)?;
            }
            match outcome {
                EngineOutcome::Witness(w) => {
                    let verified = crate::engine::verify_witness(map, w)?;
                    writeln!(
                        out,
                        "witness: σ = {}, τ = {}, d_Δ = {}, ‖f(σ)−f(τ)‖∞ = {}, {} bound {} violated ({})",
                        w.sigma,
                        w.tau,
                        w.domain_distance,
                        rational::format(&w.measured),
                        w.violation,
                        rational::format(&w.bound()),
                        if verified { "verified" } else { "NOT verified" }
                    )?;
                }
                EngineOutcome::Inconclusive { reason, .. } => {
                    writeln!(out, "inconclusive: {reason}")?
                }
            }
        }
    }
    Ok(match outcome {
        EngineOutcome::Witness(_) => EXIT_OK,
        EngineOutcome::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    })
}

#[derive(Serialize)]
struct CbDoc {
    compact: String,
    chain: Vec<String>,
    sigma: String,
    cb_index: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    derived: Option<DerivedDoc>,
}

#[derive(Serialize)]
struct DerivedDoc {
    order: String,
    interval: Option<String>,
}

fn order_name(d: Derivation) -> String {
    match d {
        Derivation::Finite(n) => n.to_string(),
        Derivation::Omega => "ω".into(),
    }
}

fn cb(
    format: Format,
    endpoint: &Ordinal,
    derive: Option<Derivation>,
    out: &mut dyn Write,
) -> Result<()> {
    let k = CompactInterval::new(endpoint.clone());
    let mut chain = Vec::new();
    if endpoint.is_top() {
        chain.push(format!("K^(n) ≅ {} for every finite n", k.pretty()));
        let kw = k
            .iterated_derivative(Derivation::Omega)
            .expect("top survives");
        chain.push(format!("K^(ω) ≅ {}", kw.pretty()));
        chain.push("K^(ω+1) = ∅".into());
    } else {
        let mut current = Some(k.clone());
        let mut i = 0;
        while let Some(c) = current {
            let rel = if i == 0 { "=" } else { "≅" };
            chain.push(format!("K^({i}) {rel} {}", c.pretty()));
            current = c.derivative();
            i += 1;
        }
        chain.push(format!("K^({i}) = ∅"));
    }
    let derived = derive.map(|d| DerivedDoc {
        order: order_name(d),
        interval: k.iterated_derivative(d).map(|c| c.pretty()),
    });
    let doc = CbDoc {
        compact: k.pretty(),
        chain,
        sigma: k.sigma().to_string(),
        cb_index: k.cb_index().pretty(),
        derived,
    };
    match format {
        Format::Json => emit(out, &doc),
        Format::Text => {
            writeln!(out, "K = {}", doc.compact)?;
            for line in &doc.chain {
                writeln!(out, "{line}")?;
            }
            writeln!(out, "σ(K) = {}", doc.sigma)?;
            writeln!(out, "i_CB(K) = {}", doc.cb_index)?;
            if let Some(d) = &doc.derived {
                let value = d.interval.as_deref().unwrap_or("∅");
                writeln!(
                    out,
                    "derived: K^({}) {} {value}",
                    d.order,
                    if value == "∅" { "=" } else { "≅" }
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct TableRow {
    compact: String,
    sigma: String,
    lower_bound: String,
    almost_isometric_universality: &'static str,
}

fn table_rows(max_sigma: u32) -> Vec<TableRow> {
    let verdict = |possible: bool| if possible { "not excluded" } else { "excluded" };
    let mut rows: Vec<TableRow> = (1..=max_sigma)
        .map(|m| {
            let k = CompactInterval::new(Ordinal::monomial(m, 1));
            let r = universality_obstruction(&k);
            TableRow {
                compact: k.pretty(),
                sigma: r.sigma.to_string(),
                lower_bound: r.bound.to_string(),
                almost_isometric_universality: verdict(r.ai_universal_possible),
            }
        })
        .collect();
    let top = universality_obstruction(&CompactInterval::new(Ordinal::top()));
    rows.push(TableRow {
        compact: "[0,ω^ω]".into(),
        sigma: top.sigma.to_string(),
        lower_bound: top.bound.to_string(),
        almost_isometric_universality: verdict(top.ai_universal_possible),
    });
    for name in ["[0,1]", "βℕ"] {
        let bound = lower_bound_for_sigma(SigmaValue::Infinite);
        rows.push(TableRow {
            compact: name.into(),
            sigma: SigmaValue::Infinite.to_string(),
            lower_bound: bound.to_string(),
            almost_isometric_universality: verdict(SigmaValue::Infinite >= SigmaValue::Omega),
        });
    }
    debug_assert!(rows
        .iter()
        .all(|r| r.lower_bound != LowerBound::Unembeddable.to_string()));
    rows
}

const TABLE_NOTES: [&str; 3] = [
    "bound: (σ(K)+1)/σ(K) ≤ c_C(K)(SEP) for finite σ(K) ≥ 1; no obstruction (1) once σ(K) ≥ ω",
    "almost isometric universality for SEP forces K^(ω) ≠ ∅, i.e. σ(K) ≥ ω",
    "open: the exact constant when σ(K) ≥ 2, and the limit of the Δ≤k constants, are not known",
];

fn table(format: Format, max_sigma: u32, out: &mut dyn Write) -> Result<()> {
    if max_sigma == 0 {
        return Err(Error::InvalidArgument(
            "--max-sigma must be at least 1".into(),
        ));
    }
    let rows = table_rows(max_sigma);
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                rows: &'a [TableRow],
                notes: &'a [&'a str],
            }
            emit(
                out,
                &Doc {
                    rows: &rows,
                    notes: &TABLE_NOTES,
                },
            )
        }
        Format::Text => {
            let width = rows
                .iter()
                .map(|r| r.compact.chars().count())
                .max()
                .unwrap_or(1)
                .max(1);
            writeln!(
                out,
                "{:<width$}  {:<5}  {:<11}  a.i. universality",
                "K", "σ(K)", "lower bound"
            )?;
            for r in &rows {
                let pad = width - r.compact.chars().count();
                writeln!(
                    out,
                    "{}{}  {:<5}  {:<11}  {}",
                    r.compact,
                    " ".repeat(pad),
                    r.sigma,
                    r.lower_bound,
                    r.almost_isometric_universality
                )?;
            }
            writeln!(out)?;
            for note in TABLE_NOTES {
                writeln!(out, "{note}")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("ckdist").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cb_chain() {
        let (code, out, _) = call(&["cb", "--compact", "w^2"]);
        assert_eq!(code, 0);
        assert!(out.contains("K^(1) ≅ [0,ω]"));
        assert!(out.contains("K^(2) ≅ [0,0]"));
        assert!(out.contains("K^(3) = ∅"));
        assert!(out.contains("σ(K) = 2"));
        assert!(out.contains("i_CB(K) = 3"));
    }

    #[test]
    fn cb_top() {
        let (code, out, _) = call(&["cb", "--compact", "w^w", "--derive", "omega"]);
        assert_eq!(code, 0);
        assert!(out.contains("σ(K) = ω"), "{out}");
        assert!(out.contains("derived: K^(ω) ≅ [0,0]"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["cb"]).0, EXIT_USAGE);
        assert_eq!(call(&["cb", "--compact", "w+w^2"]).0, EXIT_USAGE);
        assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn table_rows_match_formula() {
        let (code, out, _) = call(&["table", "--max-sigma", "4"]);
        assert_eq!(code, 0);
        for (k, b) in [
            ("[0,ω]", "2"),
            ("[0,ω^2]", "3/2"),
            ("[0,ω^3]", "4/3"),
            ("[0,ω^4]", "5/4"),
        ] {
            assert!(
                out.lines()
                    .any(|l| l.starts_with(k) && l.contains(&format!(" {b} "))),
                "{out}"
            );
        }
    }
}
