mod config;
mod error;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flexhe::keys::KeyGenerator;
use flexhe::params::{Context, ParamSet};
use flexhe::serialize::{self, Kind};
use flexhe_archsim::calibrate::{compare, default_calibration, set1_reference, set2_reference};
use flexhe_archsim::cost::CostModel;
use flexhe_archsim::isa::Opcode;
use flexhe_archsim::workload::{run, Backend, RunOptions, Session, Workload};

use config::{BackendName, FileConfig, Format};
use error::{CliError, Result};

#[derive(Parser)]
#[command(name = "flexhe", version, about = "RNS-CKKS with split-degree rings and an accelerator cycle model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a workload and emit a report.
    Run(RunArgs),
    /// Show parameter sets and their primes.
    Params {
        #[arg(long)]
        param_set: Option<String>,
    },
    /// Generate and write secret, public and evaluation keys.
    Keygen {
        #[arg(long, default_value = "set1")]
        param_set: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rotation steps that get Galois keys.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rotations: Vec<i64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Describe a serialized key or ciphertext file.
    Inspect {
        file: PathBuf,
        /// Parse the payload against this parameter set.
        #[arg(long)]
        param_set: Option<String>,
    },
    /// Show the instruction cost table and the published per-operation rows.
    Costs {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    param_set: Option<String>,
    #[arg(long)]
    workload: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Time every operation on the accelerator model.
    #[arg(long)]
    simulate: bool,
    #[arg(long)]
    clock_mhz: Option<f64>,
    #[arg(long, value_enum)]
    backend: Option<BackendName>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Fit the split-mode surcharge, write the fitted costs here and use them.
    #[arg(long)]
    calibrate_costs: Option<PathBuf>,
}

fn context(name: &str) -> Result<Context> {
    Ok(Context::new(ParamSet::by_name(name)?)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let param_set = args.param_set.or(file.param_set).unwrap_or_else(|| "set1".into());
    let workload = args.workload.or(file.workload).unwrap_or_else(|| "mult-relin".into());
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let simulate = args.simulate || file.simulate.unwrap_or(false) || args.calibrate_costs.is_some();
    let backend = match args.backend.or(file.backend).unwrap_or(BackendName::Library) {
        BackendName::Library => Backend::Library,
        BackendName::Accelerator => Backend::Accelerator,
    };
    let format = args.format.or(file.format).unwrap_or(Format::Json);
    let report_path = args.report.or(file.report);
    let mut costs = file.costs;
    let mut machine = file.machine;
    if let Some(mhz) = args.clock_mhz {
        machine.clock_mhz = mhz;
    }
    costs.validate()?;
    machine.validate()?;
    if let Some(path) = &args.calibrate_costs {
        let fit = default_calibration(&costs, &machine)?;
        costs.split_surcharge = fit.surcharge;
        config::write_costs(path, &costs)?;
    }

    let ctx = context(&param_set)?;
    let w = Workload::preset(&workload, &ctx)?;
    let session = Session::new(&ctx, seed, &w.rotations())?;
    let options = RunOptions { backend, timing: simulate.then(|| (costs, machine)) };
    let report = run(&session, &w, &options)?;
    write_out(report_path.as_deref(), &report::render(&report, format)?)
}

fn cmd_params(name: Option<String>) -> Result<()> {
    let names: Vec<String> = match name {
        Some(n) => vec![n],
        None => ["set1", "set2", "set2-native", "logreg"].map(String::from).to_vec(),
    };
    for n in names {
        let ctx = context(&n)?;
        let p = ctx.params();
        println!("{}: N = 2^{}, transforms of 2^{}, {} mode", p.name, p.log_degree, p.log_hw_degree, p.mode.name());
        println!(
            "  L = {}, log2 pQ = {} (product {} bits), scale 2^{}, sigma {}",
            ctx.max_level(),
            ctx.base().bit_sum(),
            ctx.base().product_bits(),
            p.log_scale,
            p.sigma
        );
        for (j, q) in ctx.base().all().iter().enumerate() {
            let role = if j == ctx.special_index() { "special" } else { "" };
            println!("  q{j:<2} {:>20} {:>2} bits {role}", q.value(), q.bits());
        }
        println!("  fingerprint {:016x}", ctx.fingerprint());
    }
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path).map(std::io::BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn cmd_keygen(param_set: &str, seed: u64, rotations: &[i64], out: &Path) -> Result<()> {
    let ctx = context(param_set)?;
    let gen = KeyGenerator::new(&ctx, seed);
    let sk = gen.secret_key()?;
    let pk = gen.public_key(&sk)?;
    let evk = gen.eval_keys(&sk, rotations)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    serialize::write_secret_key(&ctx, &sk, create(&out.join("secret.key"))?)?;
    serialize::write_public_key(&ctx, &pk, create(&out.join("public.key"))?)?;
    serialize::write_eval_keys(&ctx, &evk, create(&out.join("eval.keys"))?)?;
    println!("wrote secret.key, public.key and eval.keys ({} switching keys) to {}", evk.all().count(), out.display());
    Ok(())
}

fn cmd_inspect(file: &Path, param_set: Option<String>) -> Result<()> {
    let bytes = std::fs::read(file).map_err(|e| CliError::io(file, e))?;
    let header = serialize::Header::parse(&bytes)?;
    println!("{}: {} (format version {}), parameters {:016x}", file.display(), header.kind.name(), header.version, header.fingerprint);
    let Some(name) = param_set else { return Ok(()) };
    let ctx = context(&name)?;
    match header.kind {
        Kind::Ciphertext => {
            let ct = serialize::read_ciphertext(&ctx, &bytes)?;
            println!("  level {}, {} parts, scale 2^{:.3}", ct.level(), ct.parts().len(), ct.scale().log2());
        }
        Kind::SecretKey => {
            serialize::read_secret_key(&ctx, &bytes)?;
            println!("  secret key of degree {}", ctx.degree());
        }
        Kind::PublicKey => {
            let pk = serialize::read_public_key(&ctx, &bytes)?;
            println!("  public key over {} limbs", pk.b.len());
        }
        Kind::EvalKeys => {
            let keys = serialize::read_eval_keys(&ctx, &bytes)?;
            let galois: Vec<String> = keys.galois_elements().map(|g| g.to_string()).collect();
            println!("  relinearization key: {}, Galois elements: [{}]", keys.relin().is_some(), galois.join(", "));
        }
    }
    Ok(())
}

fn cmd_costs(config: Option<PathBuf>) -> Result<()> {
    let file = match &config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let costs: CostModel = file.costs;
    costs.validate()?;
    println!("{:<12} {:>8}", "opcode", "cycles");
    for op in Opcode::ALL {
        println!("{:<12} {:>8}", op.name(), costs.unit(op));
    }
    println!("{:<12} {:>8}", "op_overhead", costs.op_overhead);
    println!();
    println!("{:<11} {:<7} {:>10} {:>10} {:>8}", "operation", "mode", "simulated", "published", "error");
    for row in compare(&set1_reference(), &costs, &file.machine)?.into_iter().chain(compare(&set2_reference(), &costs, &file.machine)?) {
        println!("{:<11} {:<7} {:>10} {:>10} {:>7.2}%", row.op, row.mode, row.simulated, row.reference, 100.0 * row.rel_error);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Params { param_set } => cmd_params(param_set),
        Command::Keygen { param_set, seed, rotations, out } => cmd_keygen(&param_set, seed, &rotations, &out),
        Command::Inspect { file, param_set } => cmd_inspect(&file, param_set),
        Command::Costs { config } => cmd_costs(config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
