//! `rootnum`: calculators for root-number statistics of (conjugate)
//! self-dual representations.
//!
//! Subcommands expose the library modules directly: `coeffs` (test-function
//! coefficient schedules), `oldforms` (twisted traces on oldform spaces),
//! `epsilon` (segment calculus), `localfield` (residue-ring oracles), `dims`
//! (Weyl dimension norms), and `predict` (the scenario pipeline).
//!
//! Exit codes: 0 success, 2 input validation failure, 3 inconclusive oracle.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use rootnum_core::combinatorics::HalfInt;
use rootnum_core::error::Error;
use rootnum_core::localfield::{
    compute_j_invariant, matrix_witness_search, norm_one_image_phi, QuadDatum, RingElt, Splitting,
    TruncatedQuadRing, WildPreset, WitnessOutcome,
};
use rootnum_core::oldforms::{closed_form_trace, involution_fixed_points, oldform_dimension, TraceCase};
use rootnum_core::predict::{predict, Scenario};
use rootnum_core::segments::{
    bernstein_constant, segment_central_char, segment_conductor, segment_root_number, BernsteinComponent,
    Block, Pairing, QuadCharData, SegmentData,
};
use rootnum_core::shapes::{m_norm, weyl_dim, EtaChar, GroupDescriptor, GroupFamily};
use rootnum_core::transfer::coefficient_schedule;
use rootnum_core::Result;

#[derive(Parser)]
#[command(name = "rootnum", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Selfdual,
    ConjNonsplit,
    ConjSplit,
}

impl From<CaseArg> for TraceCase {
    fn from(c: CaseArg) -> TraceCase {
        match c {
            CaseArg::Selfdual => TraceCase::SelfDual,
            CaseArg::ConjNonsplit => TraceCase::ConjNonsplit,
            CaseArg::ConjSplit => TraceCase::ConjSplit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient schedule of the conductor-isolating test function.
    Coeffs(CoeffsArgs),
    /// Oldform dimension and twisted trace at a given depth.
    Oldforms(OldformsArgs),
    /// Segment calculus: conductor, root number, component constant.
    Epsilon(EpsilonArgs),
    /// Residue-ring oracles over a preset local field.
    Localfield(LocalfieldArgs),
    /// Weyl dimension and norms of an infinitesimal character.
    Dims(DimsArgs),
    /// Run the equidistribution-vs-bias decision on a scenario file.
    Predict(PredictArgs),
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long)]
    case: CaseArg,
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OldformsArgs {
    #[arg(long)]
    case: CaseArg,
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Also run the exhaustive fixed-point enumeration.
    #[arg(long)]
    brute: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct EpsilonArgs {
    /// Comma-separated blocks: `st:T` (Steinberg), `ur` / `ur-` (unramified
    /// character, trivial / nontrivial quadratic), `sc:RANK:COND:EPS`
    /// (self-paired ramified supercuspidal), `pair:RANK:COND:EPS` (dual pair
    /// with joint sign EPS).
    #[arg(long)]
    blocks: String,
    /// Treat the blocks as a component and evaluate the constant at this
    /// conductor.
    #[arg(long)]
    bernstein_k: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Inert3,
    Inert5,
    Tame3,
    Tame5,
    Split3,
    Q2i,
    Q2sqrt2,
    Q2sqrtm2,
    Q2sqrtm5,
}

#[derive(Clone, Copy, ValueEnum)]
enum LocalOp {
    /// Norm-group depth invariant.
    J,
    /// Different exponent of the preset.
    Dexp,
    /// Size of the phi-image at level k.
    PhiImage,
    /// Matrix witness search for norm-one y (coordinates --y).
    Witness,
}

#[derive(Args)]
struct LocalfieldArgs {
    #[arg(long)]
    preset: Preset,
    #[arg(long)]
    op: LocalOp,
    /// Level for phi-image.
    #[arg(long, default_value = "0")]
    k: u32,
    /// Matrix size for the witness search.
    #[arg(long = "N", default_value = "3")]
    n: u32,
    /// Element coordinates `c0,c1` for the witness search.
    #[arg(long)]
    y: Option<String>,
    /// Override the truncation depth (in powers of p_w).
    #[arg(long)]
    level: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sp,
    SoOdd,
    SoEven,
    U,
}

#[derive(Clone, Copy, ValueEnum)]
enum DimOp {
    Dim,
    M,
    Proots,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long)]
    family: FamilyArg,
    /// Exponent multiset of the character, comma-separated half-integers.
    #[arg(long)]
    exponents: String,
    #[arg(long)]
    op: DimOp,
}

#[derive(Args)]
struct PredictArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Coeffs(a) => run_coeffs(a),
        Command::Oldforms(a) => run_oldforms(a),
        Command::Epsilon(a) => run_epsilon(a),
        Command::Localfield(a) => run_localfield(a),
        Command::Dims(a) => run_dims(a),
        Command::Predict(a) => run_predict(a),
    }
}

fn run_coeffs(a: CoeffsArgs) -> Result<()> {
    if a.n < 2 {
        return Err(Error::invalid("rank must be at least 2"));
    }
    let sched = coefficient_schedule(a.case.into(), a.n, a.k);
    match a.format {
        Format::Json => {
            let shifts: BTreeMap<String, serde_json::Value> = sched
                .coeffs
                .iter()
                .map(|(i, c)| (i.to_string(), bigint_json(c)))
                .collect();
            println!("{}", serde_json::json!({ "shifts": shifts }));
        }
        Format::Text => {
            for (i, c) in sched.coeffs.iter() {
                println!("shift {i}: {c}");
            }
        }
    }
    Ok(())
}

fn bigint_json(c: &BigInt) -> serde_json::Value {
    match i64::try_from(c.clone()) {
        Ok(v) => serde_json::json!(v),
        Err(_) => serde_json::json!(c.to_string()),
    }
}

fn run_oldforms(a: OldformsArgs) -> Result<()> {
    if a.n < 2 {
        return Err(Error::invalid("rank must be at least 2"));
    }
    let case = a.case.into();
    let trace = closed_form_trace(case, a.n, a.k);
    let dim = oldform_dimension(a.n, a.k);
    let brute = if a.brute { Some(involution_fixed_points(case, a.n, a.k)?) } else { None };
    match a.format {
        Format::Json => {
            let mut obj = serde_json::json!({
                "dimension": bigint_json(&dim),
                "trace": bigint_json(&trace),
            });
            if let Some(b) = brute {
                obj["fixed_points"] = bigint_json(&b);
            }
            println!("{obj}");
        }
        Format::Text => {
            println!("trace {trace}");
            if let Some(b) = brute {
                println!("fixed_points {b}");
                println!("dimension {dim}");
            }
        }
    }
    Ok(())
}

fn parse_blocks(spec: &str) -> Result<Vec<Block>> {
    let mut out = Vec::new();
    let mut tag = 1u32;
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let fields: Vec<&str> = part.split(':').collect();
        match fields[0] {
            "st" => {
                let size: u32 = fields
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::invalid(format!("bad Steinberg block {part:?}")))?;
                out.push(Block::Steinberg { size });
            }
            "ur" => out.push(Block::unramified_char(QuadCharData::TRIVIAL)),
            "ur-" => out.push(Block::unramified_char(QuadCharData::unramified_nontrivial())),
            "sc" | "pair" => {
                let parse = |i: usize| -> Result<i64> {
                    fields
                        .get(i)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::invalid(format!("bad block {part:?}")))
                };
                let rank = parse(1)? as u32;
                let cond = parse(2)? as u32;
                let eps = parse(3)? as i8;
                if fields[0] == "sc" {
                    out.push(Block::Supercuspidal {
                        rank,
                        conductor: cond,
                        root_number: eps,
                        ramified: true,
                        pairing: Pairing::SelfPaired,
                        central: QuadCharData::TRIVIAL,
                    });
                } else {
                    for member_eps in [eps, 1] {
                        out.push(Block::Supercuspidal {
                            rank,
                            conductor: cond,
                            root_number: member_eps,
                            ramified: true,
                            pairing: Pairing::Partner(tag),
                            central: QuadCharData::TRIVIAL,
                        });
                    }
                    tag += 1;
                }
            }
            other => return Err(Error::invalid(format!("unknown block kind {other:?}"))),
        }
    }
    Ok(out)
}

fn run_epsilon(a: EpsilonArgs) -> Result<()> {
    let blocks = parse_blocks(&a.blocks)?;
    if let Some(k) = a.bernstein_k {
        let component = BernsteinComponent::new(blocks)?;
        match bernstein_constant(&component, k) {
            Some(c) => match a.format {
                Format::Json => println!("{}", serde_json::json!({ "bernstein_constant": c })),
                Format::Text => println!("bernstein_constant {c}"),
            },
            None => match a.format {
                Format::Json => println!("{}", serde_json::json!({ "bernstein_constant": null })),
                Format::Text => println!("bernstein_constant none (conductor below the floor)"),
            },
        }
        return Ok(());
    }
    let n = blocks.iter().map(Block::rank).sum();
    let s = SegmentData::new(n, blocks)?;
    let c = segment_conductor(&s)?;
    let eps = segment_root_number(&s)?;
    let cc = segment_central_char(&s)?;
    match a.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "rank": n,
                "conductor": c,
                "root_number": eps,
                "central_nontrivial": cc.nontrivial,
                "central_conductor": cc.conductor,
            })
        ),
        Format::Text => {
            println!("rank {n}");
            println!("conductor {c}");
            println!("root_number {eps}");
        }
    }
    Ok(())
}

fn preset_ring(preset: Preset, level: Option<u32>) -> Result<TruncatedQuadRing> {
    let (p, splitting, datum, default_level) = match preset {
        Preset::Inert3 => (3, Splitting::Inert, QuadDatum::Inert { a1: 0, a0: 1 }, 5),
        Preset::Inert5 => (5, Splitting::Inert, QuadDatum::Inert { a1: 0, a0: 2 }, 5),
        Preset::Tame3 => (3, Splitting::TameRamified, QuadDatum::Eisenstein { a: 0, b: 3 }, 8),
        Preset::Tame5 => (5, Splitting::TameRamified, QuadDatum::Eisenstein { a: 0, b: 5 }, 8),
        Preset::Split3 => (3, Splitting::Split, QuadDatum::Split, 5),
        Preset::Q2i => (2, Splitting::WildRamified, WildPreset::Q2I.datum(), 8),
        Preset::Q2sqrt2 => (2, Splitting::WildRamified, WildPreset::Q2Sqrt2.datum(), 10),
        Preset::Q2sqrtm2 => (2, Splitting::WildRamified, WildPreset::Q2SqrtM2.datum(), 10),
        Preset::Q2sqrtm5 => (2, Splitting::WildRamified, WildPreset::Q2SqrtM5.datum(), 8),
    };
    TruncatedQuadRing::with_w_level(p, level.unwrap_or(default_level), splitting, datum)
}

fn run_localfield(a: LocalfieldArgs) -> Result<()> {
    let ring = preset_ring(a.preset, a.level)?;
    match a.op {
        LocalOp::J => {
            let j = compute_j_invariant(&ring)?;
            println!("{j}");
        }
        LocalOp::Dexp => println!("{}", ring.different_exponent()),
        LocalOp::PhiImage => {
            let img = norm_one_image_phi(&ring, a.k)?;
            println!(
                "phi-image size {} of norm-one size {} at bounding level {}",
                img.elements.len(),
                img.norm_one_size,
                img.bounding_level
            );
        }
        LocalOp::Witness => {
            let y = match &a.y {
                None => ring.one(),
                Some(spec) => {
                    let parts: Vec<&str> = spec.split(',').collect();
                    if parts.len() != 2 {
                        return Err(Error::invalid("element coordinates are c0,c1"));
                    }
                    let c0 = parts[0].trim().parse().map_err(|_| Error::invalid("bad c0"))?;
                    let c1 = parts[1].trim().parse().map_err(|_| Error::invalid("bad c1"))?;
                    RingElt { c0, c1 }
                }
            };
            match matrix_witness_search(&ring, a.n, y)? {
                WitnessOutcome::Found(m) => {
                    println!("witness found:");
                    for row in m {
                        let cells: Vec<String> =
                            row.iter().map(|e| format!("({},{})", e.c0, e.c1)).collect();
                        println!("  [{}]", cells.join(" "));
                    }
                }
                WitnessOutcome::None => println!("no witness at this truncation"),
            }
        }
    }
    Ok(())
}

fn run_dims(a: DimsArgs) -> Result<()> {
    let exps: Vec<HalfInt> = a
        .exponents
        .split(',')
        .map(|s| s.trim().parse::<HalfInt>())
        .collect::<Result<_>>()?;
    let poly = rootnum_core::combinatorics::LaurentPoly::from_exponents(exps.iter().copied());
    let gl_rank = exps.len() as u32;
    let family = match a.family {
        FamilyArg::Sp => GroupFamily::Sp,
        FamilyArg::SoOdd => GroupFamily::SoOdd,
        FamilyArg::SoEven => GroupFamily::SoEven,
        FamilyArg::U => GroupFamily::UPlus,
    };
    let g = GroupDescriptor { family, gl_rank, eta: EtaChar::trivial() };
    match a.op {
        DimOp::Dim => println!("{}", weyl_dim(&g, &poly)?),
        DimOp::M => println!("{}", m_norm(&g, &poly)?),
        DimOp::Proots => println!("{}", g.positive_root_count()),
    }
    Ok(())
}

fn run_predict(a: PredictArgs) -> Result<()> {
    let data = std::fs::read_to_string(&a.scenario)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", a.scenario.display())))?;
    let scenario = Scenario::from_json(&data)?;
    let report = match predict(&scenario) {
        Ok(r) => r,
        Err(e) => {
            // scope and validation failures still produce a JSON document
            if a.format == Format::Json {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            }
            return Err(e);
        }
    };
    match a.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => {
            println!("case: {:?}, N = {}", scenario.case, scenario.n);
            println!("equidistributes: {:?}", report.equidistributes);
            if let Some(s) = report.bias_sign {
                println!("bias sign: {s:+}");
            }
            for f in &report.bias_factors {
                println!("  factor at {}: {:+}", f.place, f.sign);
            }
            println!("counting positivity: {}", report.c_positivity.holds);
            for c in &report.conditions {
                println!("  [{}] {}", c.rule, c.clause);
            }
        }
    }
    Ok(())
}
