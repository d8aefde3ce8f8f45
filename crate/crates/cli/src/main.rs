use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qadapt::adapt::{run_adapt, run_random_ordering, AdaptConfig, AdaptTrace, Termination};
use qadapt::completeness::{completeness_fraction_scan, completeness_rank, DEFAULT_RANK_TOL};
use qadapt::fermion::{
    build_molecular_hamiltonian, parse_fcidump, parse_pauli_hamiltonian, write_pauli_hamiltonian,
    MolecularHamiltonian,
};
use qadapt::pauli::{count_odd_strings, random_real_hamiltonian};
use qadapt::pool::{
    fermionic_pool, minimal_pool_g, minimal_pool_v, parse_pool, qubit_pool, random_odd_pool,
    random_subpool, OperatorPool, QubitPoolOptions,
};
use qadapt::resources::{
    brute_force_counts, closed_form_averages, closed_form_table, estimate_total_cnots, to_f64,
    Averages,
};
use qadapt::state::{
    exact_ground_state, exact_ground_state_in_sector, GroundStateResult, MAX_SIM_QUBITS,
};
use qadapt::{PauliSum, StateVector};

#[derive(Parser)]
#[command(
    name = "qadapt",
    version,
    about = "Qubit-ADAPT-VQE experiments on a statevector simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow an ADAPT ansatz for a Hamiltonian and write the trace.
    RunAdapt(RunAdaptArgs),
    /// Fraction of complete random odd pools per pool size.
    PoolScan(PoolScanArgs),
    /// Closure size, Gram rank and completeness verdict for one pool.
    CheckPool(CheckPoolArgs),
    /// CNOT estimates for spin-adapted fermionic doubles.
    Estimate(EstimateArgs),
    /// Sample a random real Hamiltonian, optionally running ADAPT on it.
    RandomHamiltonian(RandomHamiltonianArgs),
    /// Exact ground-state energy of a Hamiltonian file.
    Diag(DiagArgs),
}

#[derive(Args, Clone)]
struct AdaptFlags {
    /// Operator pool: fermionic, qubit, qubit-with-z, v, g, random or file:PATH.
    #[arg(long, default_value = "qubit")]
    pool: String,
    /// Size of a random pool (default 2n − 2).
    #[arg(long)]
    pool_size: Option<usize>,
    /// Keep only this fraction of the pool, sampled from the seed.
    #[arg(long)]
    fraction: Option<f64>,
    /// Gradient-norm stopping threshold.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Grow by this many uniformly random picks instead of gradient selection.
    #[arg(long)]
    random_order: Option<usize>,
    /// Forbid selecting an operator that is already in the ansatz.
    #[arg(long)]
    no_repeats: bool,
}

#[derive(Args)]
struct RunAdaptArgs {
    /// FCIDUMP or Pauli-text Hamiltonian.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference state: hf, zero, random, or a bit string with qubit 0 rightmost.
    #[arg(long)]
    reference: Option<String>,
    /// Electron count for the FCI sector (FCIDUMP inputs default to NELEC).
    #[arg(long)]
    electrons: Option<usize>,
    #[command(flatten)]
    adapt: AdaptFlags,
}

#[derive(Args)]
struct PoolScanArgs {
    #[arg(long)]
    n: usize,
    /// Pool sizes: a range `a..b` (inclusive) or a comma list.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// Permit n above 7.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args)]
struct CheckPoolArgs {
    /// v, v-reduced, g, random, qubit, qubit-with-z or file:PATH.
    #[arg(long, alias = "family", default_value = "v")]
    pool: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    pool_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    output: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    m: usize,
    /// Also report the total for this many parameters.
    #[arg(long)]
    n_params: Option<usize>,
    #[arg(long, default_value = "out")]
    output: PathBuf,
}

#[derive(Args)]
struct RandomHamiltonianArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// Run ADAPT from a random real state after writing the Hamiltonian.
    #[arg(long)]
    run: bool,
    #[command(flatten)]
    adapt: AdaptFlags,
}

#[derive(Args)]
struct DiagArgs {
    #[arg(long)]
    input: PathBuf,
    /// Restrict to this particle number.
    #[arg(long)]
    electrons: Option<usize>,
    #[arg(long, default_value = "out")]
    output: PathBuf,
}

/// Ordered `key = value` settings, echoed to stderr and `config.txt`.
#[derive(Default)]
struct RunConfig(Vec<(String, String)>);

impl RunConfig {
    fn set(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    fn write(&self, dir: &Path) -> Result<()> {
        eprint!("{}", self.render());
        write_file(dir, "config.txt", &self.render())
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Independent sub-seeds for each stochastic choice of a run.
struct Seeds {
    pool: u64,
    subpool: u64,
    state: u64,
    order: u64,
    hamiltonian: u64,
}

impl Seeds {
    fn from(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Seeds {
            pool: rng.random(),
            subpool: rng.random(),
            state: rng.random(),
            order: rng.random(),
            hamiltonian: rng.random(),
        }
    }
}

enum Input {
    Molecule(MolecularHamiltonian, PauliSum),
    Pauli(PauliSum),
}

impl Input {
    fn hamiltonian(&self) -> &PauliSum {
        match self {
            Input::Molecule(_, h) | Input::Pauli(h) => h,
        }
    }
}

fn read_input(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.to_ascii_uppercase().contains("&FCI") {
        let mol = parse_fcidump(&text).with_context(|| format!("parsing {}", path.display()))?;
        let h = build_molecular_hamiltonian(&mol)?;
        Ok(Input::Molecule(mol, h))
    } else {
        let h = parse_pauli_hamiltonian(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        Ok(Input::Pauli(h))
    }
}

fn build_pool(
    family: &str,
    n: usize,
    pool_size: Option<usize>,
    seeds: &Seeds,
) -> Result<OperatorPool> {
    let spatial = || -> Result<usize> {
        if !n.is_multiple_of(2) {
            bail!("the {family} pool needs an even number of qubits, got {n}");
        }
        Ok(n / 2)
    };
    let pool = match family {
        "fermionic" => fermionic_pool(spatial()?)?,
        "qubit" => qubit_pool(&fermionic_pool(spatial()?)?, QubitPoolOptions::default())?,
        "qubit-with-z" => qubit_pool(
            &fermionic_pool(spatial()?)?,
            QubitPoolOptions {
                strip_z: false,
                ..Default::default()
            },
        )?,
        "v" => minimal_pool_v(n, false)?,
        "v-reduced" => minimal_pool_v(n, true)?,
        "g" => minimal_pool_g(n)?,
        "random" => random_odd_pool(n, pool_size.unwrap_or(2 * n - 2).max(1), seeds.pool)?,
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let text =
                    fs::read_to_string(path).with_context(|| format!("reading pool {path}"))?;
                let pool = parse_pool(&text).with_context(|| format!("parsing pool {path}"))?;
                if pool.n_qubits != n {
                    bail!("pool file has {} qubits, expected {n}", pool.n_qubits);
                }
                pool
            }
            None => bail!("unknown pool family '{other}'"),
        },
    };
    Ok(pool)
}

fn select_pool(flags: &AdaptFlags, n: usize, seeds: &Seeds) -> Result<OperatorPool> {
    let pool = build_pool(&flags.pool, n, flags.pool_size, seeds)?;
    match flags.fraction {
        Some(f) => Ok(random_subpool(&pool, f, seeds.subpool)?),
        None => Ok(pool),
    }
}

fn exit_code(t: Termination) -> u8 {
    match t {
        Termination::GradientConverged => 0,
        Termination::MaxIterations => 2,
        Termination::Stalled => 3,
    }
}

fn record_adapt_flags(cfg: &mut RunConfig, flags: &AdaptFlags, pool: &OperatorPool) {
    cfg.set("pool", &flags.pool);
    cfg.set("pool_description", pool.description());
    cfg.set("pool_len", pool.len());
    cfg.set(
        "fraction",
        flags.fraction.map_or("none".into(), |f| f.to_string()),
    );
    cfg.set("eps", flags.eps);
    cfg.set("max_iter", flags.max_iter);
    cfg.set("allow_operator_repeats", !flags.no_repeats);
    cfg.set(
        "selection",
        flags
            .random_order
            .map_or("gradient".to_string(), |k| format!("random({k})")),
    );
    cfg.set("trotter_order", "lexicographic");
}

fn run_and_write(
    h: &PauliSum,
    pool: &OperatorPool,
    reference: &StateVector,
    exact: Option<f64>,
    flags: &AdaptFlags,
    seeds: &Seeds,
    output: &Path,
) -> Result<AdaptTrace> {
    let config = AdaptConfig {
        grad_norm_eps: flags.eps,
        max_iterations: flags.max_iter,
        allow_operator_repeats: !flags.no_repeats,
        exact_energy: exact,
        ..Default::default()
    };
    let trace = match flags.random_order {
        Some(k) => run_random_ordering(h, pool, reference, k, seeds.order, &config)?,
        None => run_adapt(h, pool, reference, &config)?,
    };
    write_file(output, "trace.csv", &trace.to_csv())?;
    let last = trace.final_row();
    eprintln!(
        "termination = {}\nparameters = {}\nenergy = {:.12}\ncnot_count = {}",
        trace.termination,
        trace.n_params(),
        last.energy,
        last.cnot_count
    );
    if let Some(e) = last.energy_error {
        eprintln!("energy_error = {e:.3e}");
    }
    Ok(trace)
}

fn exact_energy(h: &PauliSum, sector: Option<usize>) -> Result<Option<GroundStateResult>> {
    if h.n_qubits() > 14 {
        return Ok(None);
    }
    Ok(Some(match sector {
        Some(k) => exact_ground_state_in_sector(h, k)?,
        None => exact_ground_state(h)?,
    }))
}

fn cmd_run_adapt(args: RunAdaptArgs) -> Result<u8> {
    let input = read_input(&args.input)?;
    let h = input.hamiltonian();
    let n = h.n_qubits();
    if n > MAX_SIM_QUBITS {
        bail!("{n} qubits exceed the simulator limit of {MAX_SIM_QUBITS}");
    }
    let seeds = Seeds::from(args.seed);
    let pool = select_pool(&args.adapt, n, &seeds)?;
    let reference_kind = args.reference.clone().unwrap_or_else(|| match &input {
        Input::Molecule(..) => "hf".into(),
        Input::Pauli(_) => "zero".into(),
    });
    let reference = match (reference_kind.as_str(), &input) {
        ("hf", Input::Molecule(mol, _)) => StateVector::basis_state(n, &mol.hf_bitstring()?)?,
        ("hf", Input::Pauli(_)) => bail!("the hf reference needs an FCIDUMP input"),
        ("zero", _) => StateVector::zero(n)?,
        ("random", _) => StateVector::random_real_seeded(n, seeds.state)?,
        (bits, _) => StateVector::basis_state(n, bits)?,
    };
    let sector = args.electrons.or(match &input {
        Input::Molecule(mol, _) => mol.n_electrons(),
        Input::Pauli(_) => None,
    });
    let exact = exact_energy(h, sector)?;

    let mut cfg = RunConfig::default();
    cfg.set("command", "run-adapt");
    cfg.set("input", args.input.display());
    cfg.set("n_qubits", n);
    cfg.set("hamiltonian_terms", h.len());
    cfg.set("seed", args.seed);
    cfg.set("reference", &reference_kind);
    cfg.set("fci_sector", sector.map_or("all".into(), |k| k.to_string()));
    cfg.set(
        "fci_energy",
        exact
            .as_ref()
            .map_or("none".into(), |g| format!("{:.16e}", g.energy)),
    );
    record_adapt_flags(&mut cfg, &args.adapt, &pool);
    cfg.set("output", args.output.display());
    cfg.write(&args.output)?;

    let trace = run_and_write(
        h,
        &pool,
        &reference,
        exact.map(|g| g.energy),
        &args.adapt,
        &seeds,
        &args.output,
    )?;
    Ok(exit_code(trace.termination))
}

fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().context("range start")?;
        let b: usize = b.trim().parse().context("range end")?;
        if a > b {
            bail!("empty size range {text}");
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("pool size '{t}'"))
        })
        .collect()
}

fn cmd_pool_scan(args: PoolScanArgs) -> Result<u8> {
    if args.n > 7 && !args.allow_large {
        bail!(
            "n = {} exceeds the default cap of 7; pass --allow-large to override",
            args.n
        );
    }
    if args.trials == 0 {
        bail!("a scan needs at least one trial");
    }
    let sizes = match &args.sizes {
        Some(s) => parse_sizes(s)?,
        None => (1..=2 * args.n).collect(),
    };
    let total = count_odd_strings(args.n)? as usize;
    let mut cfg = RunConfig::default();
    cfg.set("command", "pool-scan");
    cfg.set("n", args.n);
    cfg.set(
        "sizes",
        sizes
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    cfg.set("trials", args.trials);
    cfg.set("seed", args.seed);
    cfg.set("rank_tol", DEFAULT_RANK_TOL);
    cfg.set("output", args.output.display());
    cfg.write(&args.output)?;

    let mut summary = String::from("n,pool_size,trials,complete,fraction_complete\n");
    let mut trials = String::new();
    let mut master = ChaCha8Rng::seed_from_u64(args.seed);
    for size in sizes {
        if size == 0 || size > total {
            bail!("pool size {size} outside 1..={total}");
        }
        let scan = completeness_fraction_scan(args.n, size, args.trials, master.random())?;
        let complete = scan.reports.iter().filter(|r| r.complete).count();
        let _ = writeln!(
            summary,
            "{},{},{},{},{}",
            args.n, size, args.trials, complete, scan.fraction
        );
        let csv = scan.csv();
        if trials.is_empty() {
            trials.push_str(&csv);
        } else {
            trials.extend(csv.lines().skip(1).map(|l| format!("{l}\n")));
        }
        eprintln!("size {size}: {complete}/{} complete", args.trials);
    }
    write_file(&args.output, "pool_scan.csv", &summary)?;
    write_file(&args.output, "pool_scan_trials.csv", &trials)?;
    Ok(0)
}

fn cmd_check_pool(args: CheckPoolArgs) -> Result<u8> {
    let seeds = Seeds::from(args.seed);
    let pool = match (args.pool.strip_prefix("file:"), args.n) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading pool {path}"))?;
            parse_pool(&text).with_context(|| format!("parsing pool {path}"))?
        }
        (None, Some(n)) => build_pool(&args.pool, n, args.pool_size, &seeds)?,
        (None, None) => bail!("--n is required for pool family '{}'", args.pool),
    };
    let report = completeness_rank(&pool, seeds.state, DEFAULT_RANK_TOL)?;
    let mut cfg = RunConfig::default();
    cfg.set("command", "check-pool");
    cfg.set("pool", &args.pool);
    cfg.set("n_qubits", pool.n_qubits);
    cfg.set("seed", args.seed);
    cfg.set("rank_tol", DEFAULT_RANK_TOL);
    cfg.set("output", args.output.display());
    cfg.write(&args.output)?;
    eprint!("{}", report.summary());
    let csv = format!(
        "n,pool,pool_size,closure_size,rank,threshold,complete,truncated\n{},{},{},{},{},{},{},{}\n",
        report.n_qubits,
        args.pool,
        report.pool_size,
        report.closure_size,
        report.gram_rank,
        report.threshold,
        report.complete,
        report.truncated
    );
    write_file(&args.output, "check_pool.csv", &csv)?;
    Ok(0)
}

fn averages_row(m: usize, source: &str, a: &Averages, n_params: Option<usize>) -> String {
    let (spin, pauli, z) = a.as_f64();
    let per = to_f64(a.cnots_per_param());
    let total = n_params
        .map(|k| format!("{:.6}", per * k as f64))
        .unwrap_or_default();
    format!(
        "{m},{source},{},{},{},{spin:.10},{pauli:.10},{z:.10},{per:.6},{total}\n",
        a.n_spin, a.n_pauli, a.n_z
    )
}

fn cmd_estimate(args: EstimateArgs) -> Result<u8> {
    let closed = closed_form_averages(args.m)?;
    let mut cfg = RunConfig::default();
    cfg.set("command", "estimate");
    cfg.set("m", args.m);
    cfg.set(
        "n_params",
        args.n_params.map_or("none".into(), |k| k.to_string()),
    );
    cfg.set("oracle", args.m <= 8);
    cfg.set("output", args.output.display());
    cfg.write(&args.output)?;

    let mut csv = String::from(
        "m,source,n_spin,n_pauli,n_z,n_spin_value,n_pauli_value,n_z_value,cnots_per_param,total_cnots\n",
    );
    csv.push_str(&averages_row(args.m, "closed_form", &closed, args.n_params));
    if args.m <= 8 {
        let report = brute_force_counts(args.m)?;
        let oracle = report.averages();
        csv.push_str(&averages_row(args.m, "enumerated", &oracle, args.n_params));
        write_file(&args.output, "counts.csv", &report.to_csv())?;
        let table = closed_form_table(args.m)?;
        let agree = oracle == closed && table == report.groups;
        eprintln!("enumeration matches closed forms = {agree}");
    }
    write_file(&args.output, "estimate.csv", &csv)?;
    eprintln!("cnots_per_param = {:.2}", to_f64(closed.cnots_per_param()));
    if let Some(k) = args.n_params {
        eprintln!("total_cnots = {:.2}", estimate_total_cnots(args.m, k)?);
    }
    Ok(0)
}

fn cmd_random_hamiltonian(args: RandomHamiltonianArgs) -> Result<u8> {
    let seeds = Seeds::from(args.seed);
    let h = random_real_hamiltonian(args.n, 2.0, seeds.hamiltonian)?;
    let mut cfg = RunConfig::default();
    cfg.set("command", "random-hamiltonian");
    cfg.set("n", args.n);
    cfg.set("seed", args.seed);
    cfg.set("basis", "even-y strings");
    cfg.set("coefficient_range", "[-2, 2]");
    cfg.set("run", args.run);
    let pool = if args.run {
        let pool = select_pool(&args.adapt, args.n, &seeds)?;
        cfg.set("reference", "random");
        record_adapt_flags(&mut cfg, &args.adapt, &pool);
        Some(pool)
    } else {
        None
    };
    cfg.set("output", args.output.display());
    cfg.write(&args.output)?;
    write_file(
        &args.output,
        "hamiltonian.txt",
        &write_pauli_hamiltonian(&h)?,
    )?;
    let Some(pool) = pool else {
        return Ok(0);
    };
    let exact = exact_ground_state(&h)?.energy;
    let reference = StateVector::random_real_seeded(args.n, seeds.state)?;
    let trace = run_and_write(
        &h,
        &pool,
        &reference,
        Some(exact),
        &args.adapt,
        &seeds,
        &args.output,
    )?;
    Ok(exit_code(trace.termination))
}

fn cmd_diag(args: DiagArgs) -> Result<u8> {
    let input = read_input(&args.input)?;
    let h = input.hamiltonian();
    let g = match args.electrons {
        Some(k) => exact_ground_state_in_sector(h, k)?,
        None => exact_ground_state(h)?,
    };
    let mut cfg = RunConfig::default();
    cfg.set("command", "diag");
    cfg.set("input", args.input.display());
    cfg.set("n_qubits", h.n_qubits());
    cfg.set(
        "sector",
        args.electrons.map_or("all".into(), |k| k.to_string()),
    );
    cfg.set("output", args.output.display());
    cfg.write(&args.output)?;
    let csv = format!(
        "n_qubits,sector,energy,residual\n{},{},{:.16e},{:.3e}\n",
        h.n_qubits(),
        args.electrons.map_or("all".into(), |k| k.to_string()),
        g.energy,
        g.residual
    );
    write_file(&args.output, "diag.csv", &csv)?;
    eprintln!("energy = {:.12}", g.energy);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RunAdapt(a) => cmd_run_adapt(a),
        Command::PoolScan(a) => cmd_pool_scan(a),
        Command::CheckPool(a) => cmd_check_pool(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::RandomHamiltonian(a) => cmd_random_hamiltonian(a),
        Command::Diag(a) => cmd_diag(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
