//! Batch front end for the Whitney-disk invariant library: parses
//! diagram manifests, computes the secondary invariants, runs move
//! scripts with invariance checks, and prints reduction reports.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use whitney::canon::{CanonMode, Canonicalizer};
use whitney::diagram::{DiagramManifest, GroupManifest, Pi2Manifest};
use whitney::error::Error;
use whitney::group::GroupSpec;
use whitney::moves::{apply_script, parse_script};
use whitney::multi::{distinct_component, permute_distinct_component, MultiManifest};
use whitney::relations::{
    reduce_in_quotient, reduce_to_km, InstanceContext, Pi2Class, QuotientElement,
};
use whitney::ring::{parse_element, Perm3, RingElement, Variant};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "whitney",
    about = "Secondary intersection invariants of immersed spheres from Whitney-disk diagrams",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Action {
    Signed,
    Unsigned,
    /// The convention selected by the parallel-copies identity (signed).
    Auto,
}

impl Action {
    fn signed(self) -> bool {
        !matches!(self, Action::Unsigned)
    }
    fn describe(self) -> &'static str {
        match self {
            Action::Signed => "signed",
            Action::Unsigned => "unsigned",
            Action::Auto => "signed (auto)",
        }
    }
}

#[derive(Args)]
struct CommonFlags {
    /// Enumeration bound for relation instances (defaults to the word
    /// norms appearing in the target plus pairing data, plus two).
    #[arg(long = "int-bound")]
    int_bound: Option<u64>,
    /// Emit a machine-readable JSON result envelope instead of text.
    #[arg(long = "json-out")]
    json_out: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the single-sphere invariant of a diagram manifest.
    Tau {
        manifest: PathBuf,
        /// Treat the diagram as unframed: disks may twist, and
        /// identity-coordinate classes are identified with zero.
        #[arg(long)]
        unframed: bool,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Compute the self-intersection invariant of a diagram manifest.
    Mu {
        manifest: PathBuf,
        #[arg(long = "json-out")]
        json_out: bool,
    },
    /// Compute the triple invariant of a three-sphere manifest.
    Triple {
        manifest: PathBuf,
        /// Coordinate-permutation convention used when reporting.
        #[arg(long, value_enum, default_value_t = Action::Auto)]
        action: Action,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Compute the n-sphere invariant of a multi-sphere manifest.
    TauN {
        manifest: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Print the signed relation closure of a basis term.
    Orbit {
        /// A term such as "(a,b)", "(a,b,c)", or "(a,b,c)_(1,2,3)".
        term: String,
        /// Generator names (defaults to the letters in the term).
        #[arg(long, value_delimiter = ',')]
        generators: Vec<String>,
        /// Group class for the generators.
        #[arg(long, value_enum, default_value_t = GroupClassArg::Free)]
        class: GroupClassArg,
        /// Modulus for the cyclic class (0 = infinite cyclic).
        #[arg(long, default_value_t = 0)]
        modulus: u64,
        /// Use the unframed pair relations (identity coordinate = 0).
        #[arg(long)]
        unframed: bool,
        /// Permutation action convention for distinct-component terms.
        #[arg(long, value_enum, default_value_t = Action::Auto)]
        action: Action,
        #[arg(long = "json-out")]
        json_out: bool,
    },
    /// Apply a move script to a diagram, asserting invariance.
    Move {
        manifest: PathBuf,
        script: PathBuf,
        /// Skip the per-step invariance assertion.
        #[arg(long = "no-assert")]
        no_assert: bool,
        #[arg(long = "json-out")]
        json_out: bool,
    },
    /// Reduce a group-ring element modulo the relation instances of a
    /// pairing-data file.
    Reduce {
        /// JSON file: {"group": ..., "element": "...", "unframed": false}.
        element_file: PathBuf,
        /// JSON array of pairing-data classes.
        pi2_file: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Reproduce built-in example families.
    Examples {
        #[command(subcommand)]
        which: ExampleCommand,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GroupClassArg {
    Free,
    FreeAbelian,
    Cyclic,
}

#[derive(Subcommand)]
enum ExampleCommand {
    /// One-generator family: a disk with element t^n paired to two
    /// double points, carrying l interior intersections with element
    /// t^m; the raw invariant is l*(t^n, t^m).
    Paper4 {
        #[arg(long, default_value_t = 2)]
        l: i64,
        #[arg(long, default_value_t = 4)]
        m: i64,
        #[arg(long, default_value_t = 3)]
        n: i64,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    group: GroupManifest,
    element: String,
    #[serde(default)]
    unframed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AssertionFailed(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))
}

fn quotient_report(label: &str, raw: &RingElement, q: &QuotientElement) {
    println!("raw {label}: {raw}");
    println!("{q}");
}

fn quotient_json(raw: &RingElement, q: &QuotientElement) -> serde_json::Value {
    json!({
        "raw": raw.to_string(),
        "canonical": q.canonical.to_string(),
        "status": q.status(),
        "certified_zero": q.certified_zero,
        "definitive": q.definitive,
        "relation_instances": q.generator_count,
        "horizon": q.horizon,
    })
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Tau { manifest, unframed, common } => {
            let mut d = DiagramManifest::parse(&read_file(&manifest)?)?.to_diagram()?;
            if unframed {
                d.unframed = true;
            }
            let raw = d.raw_tau()?;
            let q = d.compute_tau(common.int_bound)?;
            let km = reduce_to_km(&q, &d.pi2)?;
            if common.json_out {
                let mut env = quotient_json(&raw, &q);
                env["command"] = json!("tau");
                env["mu"] = json!(d.mu().to_string());
                env["km"] = json!(km.to_string());
                println!("{}", serde_json::to_string_pretty(&env).unwrap());
            } else {
                println!("mu: {}", d.mu());
                quotient_report("invariant", &raw, &q);
                println!("identity-coefficient reduction: {km}");
            }
            Ok(())
        }
        Command::Mu { manifest, json_out } => {
            let d = DiagramManifest::parse(&read_file(&manifest)?)?.to_diagram()?;
            let report = d.validate();
            if !report.is_valid() {
                return Err(Error::InvalidDiagram(report.to_string()));
            }
            let mu = d.mu();
            if json_out {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "command": "mu",
                        "mu": mu.to_string(),
                        "zero": mu.is_zero(),
                    }))
                    .unwrap()
                );
            } else {
                println!("mu: {mu}");
            }
            Ok(())
        }
        Command::Triple { manifest, action, common } => {
            let d = MultiManifest::parse(&read_file(&manifest)?)?.to_diagram()?;
            let raw = distinct_component(&d.raw_tau()?);
            let q = d.compute_triple_lambda(common.int_bound)?;
            if common.json_out {
                let mut env = quotient_json(&raw, &q);
                env["command"] = json!("triple");
                env["action"] = json!(action.describe());
                println!("{}", serde_json::to_string_pretty(&env).unwrap());
            } else {
                quotient_report("triple invariant", &raw, &q);
                println!("action convention: {}", action.describe());
            }
            Ok(())
        }
        Command::TauN { manifest, common } => {
            let d = MultiManifest::parse(&read_file(&manifest)?)?.to_diagram()?;
            let raw = d.raw_tau()?;
            let q = d.compute_tau_n(common.int_bound)?;
            if common.json_out {
                let mut env = quotient_json(&raw, &q);
                env["command"] = json!("tau-n");
                env["spheres"] = json!(d.n);
                println!("{}", serde_json::to_string_pretty(&env).unwrap());
            } else {
                println!("spheres: {}", d.n);
                quotient_report("invariant", &raw, &q);
            }
            Ok(())
        }
        Command::Orbit { term, generators, class, modulus, unframed, action, json_out } => {
            run_orbit(&term, &generators, class, modulus, unframed, action, json_out)
        }
        Command::Move { manifest, script, no_assert, json_out } => {
            let d = DiagramManifest::parse(&read_file(&manifest)?)?.to_diagram()?;
            let steps = parse_script(&read_file(&script)?)?;
            let before = d.compute_tau(None)?;
            let result = apply_script(&d, &steps, !no_assert)?;
            let after = result.compute_tau(None)?;
            let out = DiagramManifest::from_diagram(&result).to_json();
            if json_out {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "command": "move",
                        "steps": steps.len(),
                        "asserted": !no_assert,
                        "canonical_before": before.canonical.to_string(),
                        "canonical_after": after.canonical.to_string(),
                        "manifest": serde_json::from_str::<serde_json::Value>(&out).unwrap(),
                    }))
                    .unwrap()
                );
            } else {
                println!("applied {} steps (invariance {})", steps.len(), if no_assert { "unchecked" } else { "asserted" });
                println!("canonical before: {}", before.canonical);
                println!("canonical after:  {}", after.canonical);
                print!("{out}");
            }
            Ok(())
        }
        Command::Reduce { element_file, pi2_file, common } => {
            let ef: ElementFile = serde_json::from_str(&read_file(&element_file)?)
                .map_err(|e| Error::Manifest(e.to_string()))?;
            let spec = ef.group.to_spec()?;
            let target = parse_element(&spec, &ef.element)?;
            let pi2_manifests: Vec<Pi2Manifest> = serde_json::from_str(&read_file(&pi2_file)?)
                .map_err(|e| Error::Manifest(e.to_string()))?;
            let pi2: Vec<Pi2Class> = pi2_manifests
                .iter()
                .map(|m| whitney::diagram::pi2_from_manifest(&spec, m))
                .collect::<Result<_, _>>()?;
            let context = infer_context(&target, ef.unframed)?;
            let q = reduce_in_quotient(&target, &pi2, context, common.int_bound)?;
            if common.json_out {
                let mut env = quotient_json(&target, &q);
                env["command"] = json!("reduce");
                if q.canonical.variant() == Some(Variant::Pair) || q.canonical.is_zero() {
                    if let Ok(km) = reduce_to_km(&q, &pi2) {
                        env["km"] = json!(km.to_string());
                    }
                }
                println!("{}", serde_json::to_string_pretty(&env).unwrap());
            } else {
                quotient_report("element", &target, &q);
                if q.canonical.variant() == Some(Variant::Pair) || q.canonical.is_zero() {
                    if let Ok(km) = reduce_to_km(&q, &pi2) {
                        println!("identity-coefficient reduction: {km}");
                    }
                }
            }
            Ok(())
        }
        Command::Examples { which } => match which {
            ExampleCommand::Paper4 { l, m, n, common } => {
                let d = whitney::diagram::example_family(l, m, n);
                let manifest = DiagramManifest::from_diagram(&d).to_json();
                let raw = d.raw_tau()?;
                let q = d.compute_tau(common.int_bound)?;
                if common.json_out {
                    let mut env = quotient_json(&raw, &q);
                    env["command"] = json!("examples paper4");
                    env["l"] = json!(l);
                    env["m"] = json!(m);
                    env["n"] = json!(n);
                    env["manifest"] =
                        serde_json::from_str::<serde_json::Value>(&manifest).unwrap();
                    println!("{}", serde_json::to_string_pretty(&env).unwrap());
                } else {
                    print!("{manifest}");
                    quotient_report("invariant", &raw, &q);
                }
                Ok(())
            }
        },
    }
}

/// Picks the reduction context from the element's term variant.
fn infer_context(target: &RingElement, unframed: bool) -> Result<InstanceContext, Error> {
    match target.variant() {
        None | Some(Variant::Pair) => Ok(InstanceContext::SinglePair { unframed }),
        Some(Variant::Triple) => Ok(InstanceContext::Triple),
        Some(Variant::Component) => {
            let n = target
                .support()
                .filter_map(|t| match t {
                    whitney::ring::BasisTerm::Component { spheres, .. } => Some(spheres[2]),
                    _ => None,
                })
                .max()
                .unwrap_or(1);
            Ok(InstanceContext::NSphere { n })
        }
        Some(Variant::Single) => Err(Error::VariantMismatch {
            expected: "pair, triple, or component".into(),
            got: "single".into(),
        }),
    }
}

/// Generator names appearing in a term string, in order of first use.
fn letters_in(term: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut current = String::new();
    for ch in term.chars() {
        if ch.is_ascii_alphabetic() || ch == '_' || (!current.is_empty() && ch.is_ascii_digit()) {
            current.push(ch);
        } else if !current.is_empty() {
            if !out.contains(&current) {
                out.push(current.clone());
            }
            current.clear();
        }
    }
    if !current.is_empty() && !out.contains(&current) {
        out.push(current);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run_orbit(
    term: &str,
    generators: &[String],
    class: GroupClassArg,
    modulus: u64,
    unframed: bool,
    action: Action,
    json_out: bool,
) -> Result<(), Error> {
    let names: Vec<String> =
        if generators.is_empty() { letters_in(term) } else { generators.to_vec() };
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let spec: Arc<GroupSpec> = match class {
        GroupClassArg::Free => GroupSpec::free(&name_refs),
        GroupClassArg::FreeAbelian => GroupSpec::free_abelian(&name_refs),
        GroupClassArg::Cyclic => {
            let name = name_refs.first().copied().unwrap_or("t");
            GroupSpec::cyclic(name, modulus)
        }
    };
    let element = parse_element(&spec, term)?;
    let mut terms = element.support();
    let seed = match (terms.next(), terms.next()) {
        (Some(t), None) => t.clone(),
        _ => {
            return Err(Error::Parse(format!("expected a single basis term, got `{term}`")));
        }
    };
    let mode = match seed {
        whitney::ring::BasisTerm::Pair(..) if unframed => CanonMode::PairUnframed,
        whitney::ring::BasisTerm::Pair(..) => CanonMode::PairFramed,
        whitney::ring::BasisTerm::Triple(..) => CanonMode::Triple,
        whitney::ring::BasisTerm::Component { .. } => CanonMode::Component,
        whitney::ring::BasisTerm::Single(_) => {
            return Err(Error::VariantMismatch {
                expected: "pair, triple, or component".into(),
                got: "single".into(),
            });
        }
    };
    let canon = Canonicalizer::new(mode);
    let cls = canon.class(&seed);
    let members: Vec<(String, i8)> = cls
        .members
        .iter()
        .map(|(t, s)| (t.to_string(), *s))
        .collect();
    let permutation_orbit = permutation_orbit_of(&element, &seed, action)?;
    if json_out {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "orbit",
                "term": seed.to_string(),
                "representative": cls.representative.to_string(),
                "members": members
                    .iter()
                    .map(|(t, s)| json!({"term": t, "sign": s}))
                    .collect::<Vec<_>>(),
                "size": members.len(),
                "torsion2": cls.torsion2,
                "killed": cls.killed,
                "permutation_orbit": permutation_orbit,
                "action": action.describe(),
            }))
            .unwrap()
        );
    } else {
        println!("term: {seed}");
        println!("representative: {}", cls.representative);
        println!("orbit size: {}", members.len());
        for (t, s) in &members {
            println!("  {} {}", if *s > 0 { "+" } else { "-" }, t);
        }
        println!("torsion2: {}", cls.torsion2);
        println!("killed: {}", cls.killed);
        if let Some(orbit) = permutation_orbit {
            println!("coordinate permutation orbit ({}):", action.describe());
            for line in orbit {
                println!("  {line}");
            }
        }
    }
    Ok(())
}

/// For distinct-sphere component terms, the six coordinate-permutation
/// images under the chosen action convention.
fn permutation_orbit_of(
    element: &RingElement,
    seed: &whitney::ring::BasisTerm,
    action: Action,
) -> Result<Option<Vec<String>>, Error> {
    let whitney::ring::BasisTerm::Component { spheres: [1, 2, 3], .. } = seed else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for perm in Perm3::all() {
        let image = permute_distinct_component(element, &perm, action.signed())?;
        out.push(image.to_string());
    }
    Ok(Some(out))
}
