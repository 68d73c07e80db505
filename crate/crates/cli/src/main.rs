//! Batch verification driver: run registered claims and emit a report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ballquot::claims::{self, ConventionChoice, VerifyConfig};
use ballquot::cosets::EnumerationLimits;
use ballquot::data::DataDir;

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    about = "Run the registered verification claims and report results",
    version
)]
struct Args {
    /// Run every registered claim
    #[arg(long, conflicts_with = "claim")]
    all: bool,

    /// Run specific claims by id (repeatable); see --list
    #[arg(long = "claim")]
    claim: Vec<String>,

    /// List claim ids for the selected n values and exit
    #[arg(long)]
    list: bool,

    /// Levels n to instantiate per-level claims at (odd for cover claims)
    #[arg(long = "n", default_values_t = vec![3u64])]
    n_values: Vec<u64>,

    /// Cap on live cosets per enumeration
    #[arg(long, default_value_t = 1_000_000)]
    max_cosets: usize,

    /// Worker threads
    #[arg(long, default_value_t = 4)]
    workers: usize,

    /// Seed for randomized sampling checks
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Data directory (default: $BALLQUOT_DATA_DIR, ./data, or the crate's)
    #[arg(long)]
    data_dir: Option<PathBuf>,

    /// Output format
    #[arg(long, default_value = "text", value_parser = ["json", "text"])]
    format: String,

    /// Word evaluation convention for relator checks
    #[arg(long, default_value = "both", value_parser = ["left", "right", "both"])]
    convention: String,

    /// Write the generated g/w word data file here after a successful run
    #[arg(long)]
    emit_gw_words: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = VerifyConfig {
        n_values: args.n_values.clone(),
        limits: EnumerationLimits {
            max_cosets: args.max_cosets,
            ..Default::default()
        },
        workers: args.workers,
        seed: args.seed,
        data_dir: DataDir::resolve(args.data_dir.as_deref()),
        convention: match args.convention.as_str() {
            "left" => ConventionChoice::Left,
            "right" => ConventionChoice::Right,
            _ => ConventionChoice::Both,
        },
    };
    if args.list {
        for id in claims::claim_ids(&cfg.n_values) {
            println!("{id}");
        }
        return ExitCode::SUCCESS;
    }
    let selection: Option<Vec<String>> = if args.all || args.claim.is_empty() {
        None
    } else {
        Some(args.claim.clone())
    };
    // validate requested ids
    if let Some(sel) = &selection {
        let known = claims::claim_ids(&cfg.n_values);
        for id in sel {
            if !known.contains(id) {
                eprintln!("unknown claim id `{id}` (use --list)");
                return ExitCode::from(2);
            }
        }
    }
    let data_dir = cfg.data_dir.clone();
    let results = claims::run(cfg, selection.as_deref());
    match args.format.as_str() {
        "json" => println!("{}", claims::emit_json(&results)),
        _ => print!("{}", claims::emit_text(&results)),
    }
    if let Some(path) = args.emit_gw_words {
        // regenerate the word data and write it out
        let ctx = ballquot::dm::DmContext::load(&data_dir).expect("data dir");
        match ballquot::dm::rewrite_gi_words(&ctx, EnumerationLimits::default()) {
            Ok(gw) => {
                let gens: Vec<String> = ctx.gamma1.generators.clone();
                let named = gw.named();
                let dir = DataDir {
                    root: path.parent().unwrap_or(&path).to_path_buf(),
                };
                let name = path.file_name().unwrap().to_string_lossy().to_string();
                let header = "Cusp generator and center words over the lattice generators.\nGenerated; validated against the shipped matrices.";
                match dir.write_words(&name, &gens, &named, header) {
                    Ok(p) => eprintln!("wrote {}", p.display()),
                    Err(e) => eprintln!("failed writing word data: {e}"),
                }
            }
            Err(e) => eprintln!("failed generating word data: {e}"),
        }
    }
    ExitCode::from(claims::exit_code(&results) as u8)
}
