//! `sgp`: build, check, and enumerate finite computational structures.
//!
//! Exit codes: 0 = success/verified, 1 = a checked property fails (the
//! witness goes to stdout), 2 = usage or input format error, 3 = a
//! resource guard refused the computation.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sgp::constructions::{
    direct_product, flip_flop, lookup_semigroup, piggyback_extract, xor_cascade, xor_top_state,
    Cascade, FiniteFunction,
};
use sgp::emulation::{
    find_division, implements_function, is_isomorphic_relation, is_modelling, DivisionOutcome,
    ElementMap, Encoding, Machine, Relation, SearchLimits,
};
use sgp::enumeration::{
    bfs_oracle_enumerate, enumerate_streaming, enumerate_subsemigroups, enumerate_up_to_conjugacy,
    size_distribution, Checkpoint, ClosedSet, ElementUniverse, EnumerationOptions,
    SizeDistribution,
};
use sgp::table::MulTable;
use sgp::transform::{parse_transformation_list, Permutation, TransSgp};
use sgp::Error;

#[derive(Parser)]
#[command(
    name = "sgp",
    version,
    about = "Finite semigroups as computational structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a multiplication table for associativity
    Assoc { table: PathBuf },
    /// Print idempotents, resets, and the identity of a table
    Props { table: PathBuf },
    /// Embed a table into transformations via its right action
    Cayley { table: PathBuf },
    /// Search for an isomorphism between two tables
    Iso { a: PathBuf, b: PathBuf },
    /// Close a transformation list under composition
    Closure { trans: PathBuf },
    /// Print the multiplication table of a closed transformation list
    Table { trans: PathBuf },
    /// Relabel the points of a transformation semigroup
    Conjugate {
        trans: PathBuf,
        /// Transformation file holding exactly one permutation
        #[arg(long, value_name = "PATH")]
        perm: PathBuf,
    },
    /// Print the canonical (lexicographically least) conjugate
    Canonical { trans: PathBuf },
    /// Invert a relation file or a map file (sniffed by `:` vs `->`)
    Invert { file: PathBuf },
    /// List the full transformation semigroup on n points
    Fulltrans { n: usize },
    /// Print the flip-flop (1-bit memory) table
    Flipflop,
    /// Build the lookup-table semigroup of a function file
    Lookup { function: PathBuf },
    /// Direct product of two tables
    Product { a: PathBuf, b: PathBuf },
    /// Cascade-product operations
    Cascade {
        #[command(subcommand)]
        op: CascadeOp,
    },
    /// Run the reversible-XOR cascade and print its truth table
    XorDemo {
        /// Also write the cascade in its file format
        #[arg(long, value_name = "PATH")]
        emit_cascade: Option<PathBuf>,
    },
    /// Extract a function from a permutation through bit patterns
    Piggyback {
        /// Transformation file holding exactly one permutation of degree 2^w
        trans: PathBuf,
        /// Input pattern, one char per bit: x = input, 0/1 = fixed, - = free
        #[arg(long = "in", value_name = "PATTERN")]
        in_pattern: String,
        /// Output pattern, one char per bit: x = selected, - = dropped
        #[arg(long = "out", value_name = "PATTERN")]
        out_pattern: String,
    },
    /// Check the three division clauses of a relation S -> T
    CheckRelation {
        relation: PathBuf,
        s: PathBuf,
        t: PathBuf,
    },
    /// Check that a map T -> S is a surjective homomorphism
    CheckModelling {
        map: PathBuf,
        t: PathBuf,
        s: PathBuf,
    },
    /// Search for an emulation witness of S inside T
    Divides {
        /// Source structure (table file)
        s_table: PathBuf,
        /// Target structure (transformation list; closed before use)
        t_trans: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        /// Write the witness relation in relation-file format
        #[arg(long, value_name = "PATH")]
        emit_relation: Option<PathBuf>,
        /// Write the witness modelling in map-file format (local indices)
        #[arg(long, value_name = "PATH")]
        emit_map: Option<PathBuf>,
        /// Write the witness subsemigroup's own table
        #[arg(long, value_name = "PATH")]
        emit_sub_table: Option<PathBuf>,
    },
    /// Run an event word and compare against a function specification
    RunProgram {
        /// Structure file: a cascade (TOP/BOTTOM/EVENTS) or a table
        /// (events are then element indices acting on the right)
        structure: PathBuf,
        /// Comma-separated event names
        #[arg(long, value_name = "E1,E2,...")]
        program: String,
        /// Encoding file (INPUT/OUTPUT sections of `label -> state`)
        #[arg(long, value_name = "PATH")]
        encode: PathBuf,
        /// Function file the run must implement
        #[arg(long, value_name = "PATH")]
        function: PathBuf,
    },
    /// Enumerate all subsemigroups of a universe
    Enum(EnumArgs),
}

#[derive(Subcommand)]
enum CascadeOp {
    /// Flatten a cascade file to a transformation semigroup on pairs
    Flatten { cascade: PathBuf },
}

#[derive(Args)]
struct LimitArgs {
    /// Ceiling on subsemigroups of the target enumerated or visited
    #[arg(long, default_value_t = SearchLimits::default().max_subsemigroups)]
    max_subsemigroups: usize,
    /// Ceiling on homomorphism search nodes
    #[arg(long, default_value_t = SearchLimits::default().max_homomorphism_nodes)]
    max_homomorphism_nodes: u64,
}

#[derive(Args)]
struct EnumArgs {
    /// Universe from a transformation file (closed before use)
    #[arg(required_unless_present = "fulltrans", conflicts_with = "fulltrans")]
    trans: Option<PathBuf>,
    /// Universe T_n of all transformations on n points
    #[arg(long, value_name = "N")]
    fulltrans: Option<usize>,
    /// Run the independent oracle as well and fail on any disagreement
    #[arg(long, conflicts_with = "checkpoint")]
    oracle: bool,
    /// Emit one canonical representative per conjugacy orbit
    #[arg(long, conflicts_with = "checkpoint")]
    upto_conjugacy: bool,
    /// Write the size histogram as CSV to PATH (- for stdout, which
    /// suppresses the set listing)
    #[arg(long, value_name = "PATH")]
    histogram: Option<String>,
    /// Write the size histogram as space-separated plot data
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
    /// Worker count for the branch-parallel search
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Lift the default universe-size guard (large universes!)
    #[arg(long)]
    long_run: bool,
    /// Checkpoint file: stream output per root branch and resume after
    /// interruption (requires --out)
    #[arg(long, value_name = "PATH", requires = "out")]
    checkpoint: Option<PathBuf>,
    /// Write the enumerated sets to PATH instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sgp: {e}");
            match e {
                Error::Resource(_) => ExitCode::from(3),
                Error::Extraction(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

const OK: ExitCode = ExitCode::SUCCESS;
const PROPERTY_FAILS: ExitCode = ExitCode::FAILURE;

fn run(command: Command) -> sgp::Result<ExitCode> {
    match command {
        Command::Assoc { table } => {
            let t = load_table(&table)?;
            match t.check_associative() {
                sgp::AssocVerdict::Associative => {
                    println!("associative");
                    Ok(OK)
                }
                sgp::AssocVerdict::Violation { x, y, z } => {
                    println!("violation {x} {y} {z}");
                    Ok(PROPERTY_FAILS)
                }
            }
        }
        Command::Props { table } => {
            let t = load_table(&table)?;
            println!("order {}", t.order());
            println!("idempotents {}", join(t.idempotents()));
            println!("resets {}", join(t.resets()));
            match t.identity_element() {
                Some(e) => println!("identity {e}"),
                None => println!("identity none"),
            }
            Ok(OK)
        }
        Command::Cayley { table } => {
            let t = load_table(&table)?;
            print!("{}", t.cayley_embedding()?.to_text());
            Ok(OK)
        }
        Command::Iso { a, b } => {
            let (a, b) = (load_table(&a)?, load_table(&b)?);
            require_associative(&a, "first table")?;
            require_associative(&b, "second table")?;
            match a.are_isomorphic(&b) {
                Some(pi) => {
                    println!("isomorphic {}", join(pi));
                    Ok(OK)
                }
                None => {
                    println!("not-isomorphic");
                    Ok(PROPERTY_FAILS)
                }
            }
        }
        Command::Closure { trans } => {
            let gens = parse_transformation_list(&read_input(&trans)?)?;
            print!("{}", TransSgp::generate(&gens)?.to_text());
            Ok(OK)
        }
        Command::Table { trans } => {
            let gens = parse_transformation_list(&read_input(&trans)?)?;
            print!("{}", TransSgp::generate(&gens)?.mul_table().to_text());
            Ok(OK)
        }
        Command::Conjugate { trans, perm } => {
            let gens = parse_transformation_list(&read_input(&trans)?)?;
            let p = load_permutation(&perm)?;
            print!("{}", TransSgp::generate(&gens)?.conjugate(&p)?.to_text());
            Ok(OK)
        }
        Command::Canonical { trans } => {
            let gens = parse_transformation_list(&read_input(&trans)?)?;
            print!("{}", TransSgp::generate(&gens)?.canonical_form()?.to_text());
            Ok(OK)
        }
        Command::Invert { file } => {
            let text = read_input(&file)?;
            let first_data = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'));
            let looks_like_map = first_data.is_some_and(|l| l.contains("->"));
            let inverted = if looks_like_map {
                ElementMap::parse(&text)?.invert()
            } else {
                Relation::parse(&text)?.invert()
            };
            print!("{}", inverted.to_text());
            Ok(OK)
        }
        Command::Fulltrans { n } => {
            print!("{}", TransSgp::full(n)?.to_text());
            Ok(OK)
        }
        Command::Flipflop => {
            print!("{}", flip_flop().to_text());
            Ok(OK)
        }
        Command::Lookup { function } => {
            let f = FiniteFunction::parse(&read_input(&function)?)?;
            let (table, labels) = lookup_semigroup(&f)?;
            println!("# elements: {}", labels.join(" "));
            print!("{}", table.to_text());
            Ok(OK)
        }
        Command::Product { a, b } => {
            let (a, b) = (load_table(&a)?, load_table(&b)?);
            require_associative(&a, "first table")?;
            require_associative(&b, "second table")?;
            print!("{}", direct_product(&a, &b).to_text());
            Ok(OK)
        }
        Command::Cascade { op } => match op {
            CascadeOp::Flatten { cascade } => {
                let c = Cascade::parse(&read_input(&cascade)?)?;
                print!("{}", c.flatten()?.to_text());
                Ok(OK)
            }
        },
        Command::XorDemo { emit_cascade } => {
            let c = xor_cascade();
            let readout = c.event("readout").expect("built with a readout event");
            for label in ["00", "01", "10", "11"] {
                let top = xor_top_state(label).expect("label is listed");
                // Start the readout part anywhere; the result must not
                // depend on it.
                let (_, out0) = c.step(top, 0, readout);
                let (_, out1) = c.step(top, 1, readout);
                assert_eq!(out0, out1, "readout must override the old bottom state");
                println!("{label} -> {out0}");
            }
            if let Some(path) = emit_cascade {
                write_output(Some(&path), &c.to_text())?;
            }
            Ok(OK)
        }
        Command::Piggyback {
            trans,
            in_pattern,
            out_pattern,
        } => {
            let perm = load_permutation(&trans)?;
            match piggyback_extract(&perm, &in_pattern, &out_pattern) {
                Ok(f) => {
                    print!("{}", f.to_text());
                    Ok(OK)
                }
                Err(Error::Extraction(witness)) => {
                    println!("multi-valued {witness}");
                    Ok(PROPERTY_FAILS)
                }
                Err(e) => Err(e),
            }
        }
        Command::CheckRelation { relation, s, t } => {
            let (s, t) = (load_table(&s)?, load_table(&t)?);
            let phi = Relation::parse(&read_input(&relation)?)?.with_target_order(t.order())?;
            let verdict = is_isomorphic_relation(&phi, &s, &t)?;
            println!("{verdict}");
            Ok(if verdict.is_ok() { OK } else { PROPERTY_FAILS })
        }
        Command::CheckModelling { map, t, s } => {
            let (t, s) = (load_table(&t)?, load_table(&s)?);
            let mu = ElementMap::parse(&read_input(&map)?)?.with_codomain_order(s.order())?;
            let verdict = is_modelling(&mu, &t, &s)?;
            println!("{verdict}");
            Ok(if verdict.is_ok() { OK } else { PROPERTY_FAILS })
        }
        Command::Divides {
            s_table,
            t_trans,
            limits,
            emit_relation,
            emit_map,
            emit_sub_table,
        } => {
            let s = load_table(&s_table)?;
            require_associative(&s, "source table")?;
            let gens = parse_transformation_list(&read_input(&t_trans)?)?;
            let t_sgp = TransSgp::generate(&gens)?;
            let t = t_sgp.mul_table();
            let limits = SearchLimits {
                max_subsemigroups: limits.max_subsemigroups,
                max_homomorphism_nodes: limits.max_homomorphism_nodes,
            };
            let (outcome, stats) = find_division(&s, &t, &limits)?;
            let stats_line = format!(
                "stats enumerated={} tested={} nodes={}",
                stats.subsemigroups_enumerated,
                stats.subsemigroups_tested,
                stats.homomorphism_nodes
            );
            match outcome {
                DivisionOutcome::Found(w) => {
                    println!("divides");
                    println!("subsemigroup {}", join(w.subsemigroup.iter().copied()));
                    for (u, &s_img) in w.modelling.images().iter().enumerate() {
                        println!("mu {u} -> {s_img}");
                    }
                    for x in 0..s.order() {
                        println!("phi {x}: {}", join(w.relation.image(x).iter().copied()));
                    }
                    println!("{stats_line}");
                    if let Some(path) = emit_relation {
                        write_output(Some(&path), &w.relation.to_text())?;
                    }
                    if let Some(path) = emit_map {
                        write_output(Some(&path), &w.modelling.to_text())?;
                    }
                    if let Some(path) = emit_sub_table {
                        write_output(Some(&path), &w.subsemigroup_table(&t).to_text())?;
                    }
                    Ok(OK)
                }
                DivisionOutcome::NoDivision => {
                    println!("no-division");
                    println!("{stats_line}");
                    Ok(PROPERTY_FAILS)
                }
            }
        }
        Command::RunProgram {
            structure,
            program,
            encode,
            function,
        } => {
            let machine = load_machine(&structure)?;
            let f = FiniteFunction::parse(&read_input(&function)?)?;
            let enc = Encoding::parse(&read_input(&encode)?)?;
            let word: Vec<String> = program
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            let verdict = implements_function(&machine, &f, &enc, &word)?;
            println!("{verdict}");
            Ok(if verdict.is_ok() { OK } else { PROPERTY_FAILS })
        }
        Command::Enum(args) => run_enum(args),
    }
}

fn run_enum(args: EnumArgs) -> sgp::Result<ExitCode> {
    let universe = match (&args.trans, args.fulltrans) {
        (Some(path), None) => {
            let gens = parse_transformation_list(&read_input(path)?)?;
            ElementUniverse::new(TransSgp::generate(&gens)?)
        }
        (None, Some(n)) => ElementUniverse::full(n)?,
        _ => unreachable!("clap enforces exactly one universe source"),
    };
    let opts = EnumerationOptions {
        allow_large: args.long_run,
        jobs: args.jobs,
    };

    if let Some(cp_path) = &args.checkpoint {
        return run_enum_streaming(&universe, &opts, cp_path, &args);
    }

    let sets = enumerate_subsemigroups(&universe, &opts)?;
    if args.oracle {
        let oracle = bfs_oracle_enumerate(&universe, &opts)?;
        if sets != oracle {
            let first = sets
                .iter()
                .zip(oracle.iter())
                .find(|(a, b)| a != b)
                .map(|(a, b)| format!("primary {a} vs oracle {b}"))
                .unwrap_or_else(|| format!("counts {} vs {}", sets.len(), oracle.len()));
            println!("oracle-disagreement {first}");
            return Ok(PROPERTY_FAILS);
        }
        eprintln!("oracle agrees: {} sets", oracle.len());
    }

    let emitted: Vec<ClosedSet> = if args.upto_conjugacy {
        let classes = enumerate_up_to_conjugacy(&universe, &opts)?;
        let raw: usize = classes.iter().map(|c| c.orbit_size).sum();
        eprintln!("raw {} classes {}", raw, classes.len());
        classes.into_iter().map(|c| c.representative).collect()
    } else {
        eprintln!("raw {}", sets.len());
        sets
    };

    let dist = size_distribution(&emitted);
    let suppress_listing = write_histograms(&dist, &args)?;
    if !suppress_listing {
        let mut listing = String::new();
        for s in &emitted {
            listing.push_str(&s.to_line());
            listing.push('\n');
        }
        write_output(args.out.as_deref(), &listing)?;
    }
    Ok(OK)
}

fn run_enum_streaming(
    universe: &ElementUniverse,
    opts: &EnumerationOptions,
    cp_path: &Path,
    args: &EnumArgs,
) -> sgp::Result<ExitCode> {
    let out_path = args.out.as_deref().expect("clap requires --out");
    if cp_path.as_os_str() == "-" || out_path.as_os_str() == "-" {
        return Err(Error::Domain(
            "checkpointed runs need real files for --checkpoint and --out (resume rereads them)"
                .into(),
        ));
    }
    let resume = match fs::read_to_string(cp_path) {
        Ok(text) => {
            let cp = Checkpoint::parse(&text)?;
            if !cp.matches(universe) {
                return Err(Error::Format(
                    "checkpoint does not match this universe/algorithm".into(),
                ));
            }
            let flushed = match fs::read_to_string(out_path) {
                Ok(existing) => existing.lines().count() as u64,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
                Err(e) => return Err(e.into()),
            };
            if flushed != cp.raw_count {
                return Err(Error::Format(format!(
                    "output file has {flushed} sets but the checkpoint recorded {}; refusing to resume",
                    cp.raw_count
                )));
            }
            eprintln!("resuming after {} finished roots", cp.roots_done);
            Some(cp)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };
    let mut out = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(out_path)?;
    if resume.is_none() {
        out.set_len(0)?;
    }
    let final_cp = enumerate_streaming(universe, opts, resume, |_root, sets, cp| {
        let mut block = String::new();
        for s in sets {
            block.push_str(&s.to_line());
            block.push('\n');
        }
        out.write_all(block.as_bytes())?;
        out.flush()?;
        // Persist progress only after the data it describes is on disk.
        let tmp = cp_path.with_extension("tmp");
        fs::write(&tmp, cp.to_text())?;
        fs::rename(&tmp, cp_path)?;
        Ok(())
    })?;
    eprintln!("raw {}", final_cp.raw_count);
    write_histograms(&final_cp.distribution, args)?;
    Ok(OK)
}

/// Writes CSV and plot histograms as requested; returns true when the
/// CSV went to stdout (which replaces the set listing there).
fn write_histograms(dist: &SizeDistribution, args: &EnumArgs) -> sgp::Result<bool> {
    let mut suppress = false;
    if let Some(target) = &args.histogram {
        if target == "-" {
            print!("{}", dist.to_csv());
            suppress = true;
        } else {
            fs::write(target, dist.to_csv())?;
        }
    }
    if let Some(path) = &args.plot {
        write_output(Some(path), &dist.to_plot_data())?;
    }
    Ok(suppress)
}

fn read_input(path: &Path) -> sgp::Result<String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn write_output(path: Option<&Path>, content: &str) -> sgp::Result<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) if p.as_os_str() == "-" => {
            print!("{content}");
            Ok(())
        }
        Some(p) => Ok(fs::write(p, content)?),
    }
}

fn load_table(path: &Path) -> sgp::Result<MulTable> {
    MulTable::parse(&read_input(path)?)
}

fn load_permutation(path: &Path) -> sgp::Result<Permutation> {
    let listed = parse_transformation_list(&read_input(path)?)?;
    if listed.len() != 1 {
        return Err(Error::Domain(format!(
            "expected exactly one permutation, found {} transformations",
            listed.len()
        )));
    }
    Permutation::new(listed.into_iter().next().unwrap())
}

fn require_associative(t: &MulTable, what: &str) -> sgp::Result<()> {
    if let sgp::AssocVerdict::Violation { x, y, z } = t.check_associative() {
        return Err(Error::Domain(format!(
            "{what} is not associative (violation at {x} {y} {z})"
        )));
    }
    Ok(())
}

/// A structure file is a cascade when its first data line says TOP,
/// otherwise a multiplication table run through its right action.
fn load_machine(path: &Path) -> sgp::Result<Machine> {
    let text = read_input(path)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    if first == Some("TOP") {
        Ok(Machine::from_cascade(Cascade::parse(&text)?))
    } else {
        Machine::from_table(&MulTable::parse(&text)?, None)
    }
}

fn join<I: IntoIterator<Item = usize>>(items: I) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
