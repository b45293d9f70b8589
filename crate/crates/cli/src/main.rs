use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsynth::block::block_encode;
use qsynth::boson::BosonRegister;
use qsynth::circuit::{peephole_cancel, trotter_step, Circuit, Policy, Strategy};
use qsynth::compiled::{compile, CompiledHamiltonian, Encoding};
use qsynth::lattice::{Boundary, LatticeGeometry, Ordering};
use qsynth::model::{build_preset, HamiltonianModel, HoppingTerm, ModelBuilder, PresetParams};
use qsynth::oracle::Oracle;
use qsynth::resources::{count, scaling_fit, ReportMeta, DEFAULT_T_FACTOR};
use qsynth::vc::{physical_projector, vc_transform};

#[derive(Parser)]
#[command(name = "qsynth", version, about = "Lattice Hamiltonian to circuit compiler")]
struct Cli {
    /// Dense-oracle qubit cap (overrides QSYNTH_ORACLE_LIMIT).
    #[arg(long, global = true)]
    oracle_limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one Trotter step as a circuit file.
    Synth(SynthArgs),
    /// Check fused against naive synthesis on the dense oracle.
    Verify(VerifyArgs),
    /// Gate tallies of one Trotter step as a JSON line.
    Count(CountArgs),
    /// CNOT counts over several L and the fitted exponent.
    Scaling(ScalingArgs),
    /// Build the LCU block encoding and check its top-left block.
    BlockEncode(BlockArgs),
    /// Stabilizer and spectrum checks for the auxiliary-fermion encoding.
    VcCheck(VcCheckArgs),
    /// Re-export a circuit file.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Jw,
    Vc,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Fused,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Pivot,
    Chain,
    Tree,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OrderingArg {
    RowMajorLex,
    Snake,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Jw => Encoding::Jw,
            EncodingArg::Vc => Encoding::Vc,
        }
    }
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Fused => Policy::Fused,
            PolicyArg::Naive => Policy::Naive,
        }
    }
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Pivot => Strategy::PivotLadder,
            StrategyArg::Chain => Strategy::ChainLadder,
            StrategyArg::Tree => Strategy::BalancedTree,
        }
    }
}

impl From<OrderingArg> for Ordering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::RowMajorLex => Ordering::RowMajorLex,
            OrderingArg::Snake => Ordering::Snake,
        }
    }
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

/// Where the model comes from: a JSON file or a named preset.
#[derive(Args, Clone)]
struct ModelArgs {
    /// Model JSON file.
    #[arg(long, conflicts_with = "preset")]
    model: Option<PathBuf>,
    /// Preset name (harmonic_chain, quartic_oscillator, hopping_toy, qcd_layout).
    #[arg(long)]
    preset: Option<String>,
    /// Lattice dimension (presets).
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Sites per axis (presets).
    #[arg(long = "L", default_value_t = 2)]
    l: usize,
    /// Qubits per boson (presets).
    #[arg(long = "Q", default_value_t = 1)]
    q: usize,
    /// Box half-width of each boson grid (presets).
    #[arg(long = "R", default_value_t = 1.0)]
    r: f64,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    #[arg(long, value_enum)]
    ordering: Option<OrderingArg>,
    /// Preset parameter, `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long, value_enum, default_value = "jw")]
    encoding: EncodingArg,
}

#[derive(Args)]
struct StepArgs {
    #[arg(long, value_enum, default_value = "fused")]
    policy: PolicyArg,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "pivot")]
    strategy: StrategyArg,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    step: StepArgs,
    /// Run the CNOT/rotation cancellation pass.
    #[arg(long)]
    peephole: bool,
    /// Circuit file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "pivot")]
    strategy: StrategyArg,
    /// Allowed spectral-norm distance between fused and naive unitaries.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    step: StepArgs,
    #[arg(long)]
    peephole: bool,
    /// T gates per arbitrary rotation, clamped to [10, 50].
    #[arg(long, default_value_t = DEFAULT_T_FACTOR)]
    t_factor: f64,
    /// JSON-lines file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    /// Preset used as the template for every L.
    #[arg(long, default_value = "hopping_toy")]
    preset: String,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Comma-separated lattice extents.
    #[arg(long = "Ls", value_delimiter = ',', default_value = "3,4,5,6")]
    extents: Vec<usize>,
    #[arg(long = "Q", default_value_t = 1)]
    q: usize,
    #[arg(long = "R", default_value_t = 1.0)]
    r: f64,
    #[arg(long, value_enum, default_value = "open")]
    boundary: BoundaryArg,
    #[arg(long, value_enum, default_value = "snake")]
    ordering: OrderingArg,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long, value_enum, default_value = "jw")]
    encoding: EncodingArg,
    #[arg(long, value_enum, default_value = "fused")]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value = "pivot")]
    strategy: StrategyArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlockArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Allowed entrywise deviation of the block from H/λ.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Skip the dense check.
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VcCheckArgs {
    /// Model JSON file; otherwise a fermion hopping model is generated.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long = "L", default_value_t = 2)]
    l: usize,
    /// Complex fermion modes per site.
    #[arg(long, default_value_t = 1)]
    modes: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct ExportArgs {
    /// Circuit file to read.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    peephole: bool,
}

enum Failure {
    Config(String),
    Verify(String),
}

impl From<qsynth::Error> for Failure {
    fn from(e: qsynth::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn config<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Config(msg.into()))
}

fn oracle(limit: Option<usize>) -> Result<Oracle, Failure> {
    match limit {
        Some(l) if l > 20 => config(format!("--oracle-limit {l} exceeds the hard cap of 20")),
        Some(l) => Ok(Oracle::new(l)),
        None => Ok(Oracle::from_env()?),
    }
}

fn parse_params(mut p: PresetParams, raw: &[String]) -> Result<PresetParams, Failure> {
    for kv in raw {
        let Some((k, v)) = kv.split_once('=') else {
            return config(format!("--param expects NAME=VALUE, got `{kv}`"));
        };
        let Ok(v) = v.trim().parse::<f64>() else {
            return config(format!("--param {k}: `{v}` is not a number"));
        };
        p = p.set(k.trim(), v);
    }
    Ok(p)
}

fn check_vc_geometry(enc: Encoding, boundary: Boundary, ordering: Ordering) -> Outcome {
    if enc == Encoding::Vc && boundary != Boundary::Open {
        return config("vc encoding requires open boundary conditions");
    }
    if enc == Encoding::Vc && ordering != Ordering::Snake {
        return config("vc encoding requires snake ordering");
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).or_else(|e| config(format!("cannot read {}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).or_else(|e| config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_model(a: &ModelArgs) -> Result<(HamiltonianModel, Encoding), Failure> {
    let enc: Encoding = a.encoding.into();
    let model = match (&a.model, &a.preset) {
        (Some(path), _) => {
            let m = HamiltonianModel::from_json(&read(path)?)?;
            let g = m.geometry;
            if let Some(b) = a.boundary {
                if Boundary::from(b) != g.boundary {
                    return config(format!("--boundary conflicts with the boundary in {}", path.display()));
                }
            }
            if let Some(o) = a.ordering {
                if Ordering::from(o) != g.ordering {
                    return config(format!("--ordering conflicts with the ordering in {}", path.display()));
                }
            }
            check_vc_geometry(enc, g.boundary, g.ordering)?;
            m
        }
        (None, Some(name)) => {
            let boundary = a.boundary.map(Boundary::from).unwrap_or(Boundary::Open);
            let ordering = a.ordering.map(Ordering::from).unwrap_or(Ordering::Snake);
            check_vc_geometry(enc, boundary, ordering)?;
            let p = parse_params(PresetParams::new(a.d, a.l, boundary, ordering, a.q, a.r), &a.params)?;
            build_preset(name, &p)?
        }
        (None, None) => return config("one of --model or --preset is required"),
    };
    Ok((model, enc))
}

fn compiled(a: &ModelArgs) -> Result<(HamiltonianModel, Encoding, CompiledHamiltonian), Failure> {
    let (model, enc) = load_model(a)?;
    let h = compile(&model, enc)?;
    Ok((model, enc, h))
}

fn check_epsilon(eps: f64) -> Outcome {
    if !eps.is_finite() {
        return config(format!("--epsilon must be finite, got {eps}"));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Outcome {
    if !(tol > 0.0) {
        return config(format!("--tol must be positive, got {tol}"));
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Outcome {
    check_epsilon(a.step.epsilon)?;
    let (_, _, h) = compiled(&a.model)?;
    let mut c = trotter_step(&h, a.step.epsilon, a.step.policy.into(), a.step.strategy.into())?;
    if a.peephole {
        c = peephole_cancel(&c);
    }
    write_out(a.out.as_deref(), &c.to_text())
}

fn verify(a: &VerifyArgs, o: &Oracle) -> Outcome {
    check_epsilon(a.epsilon)?;
    check_tol(a.tol)?;
    let (_, _, h) = compiled(&a.model)?;
    o.check(h.num_qubits())?;
    let s: Strategy = a.strategy.into();
    let fused = o.circuit_matrix(&trotter_step(&h, a.epsilon, Policy::Fused, s)?)?;
    let naive = o.circuit_matrix(&trotter_step(&h, a.epsilon, Policy::Naive, s)?)?;
    let dev = fused.distance(&naive);
    let trotter = o.trotter_error(&h, a.epsilon, Policy::Fused, s)?;
    println!("qubits {}", h.num_qubits());
    println!("fused_vs_naive {dev:.3e} tol {:.3e}", a.tol);
    println!("trotter_error {trotter:.3e} (not gated)");
    if dev > a.tol {
        return Err(Failure::Verify(format!("fused and naive steps differ by {dev:.3e} > {:.3e}", a.tol)));
    }
    Ok(())
}

fn count_cmd(a: &CountArgs) -> Outcome {
    check_epsilon(a.step.epsilon)?;
    let (model, enc, h) = compiled(&a.model)?;
    let policy: Policy = a.step.policy.into();
    let mut c = trotter_step(&h, a.step.epsilon, policy, a.step.strategy.into())?;
    if a.peephole {
        c = peephole_cancel(&c);
    }
    let r = count(&c, a.t_factor, ReportMeta::for_model(&model, policy, enc));
    write_out(a.out.as_deref(), &format!("{}\n", r.to_json_line()))
}

fn scaling(a: &ScalingArgs) -> Outcome {
    let enc: Encoding = a.encoding.into();
    let (boundary, ordering) = (a.boundary.into(), a.ordering.into());
    check_vc_geometry(enc, boundary, ordering)?;
    let base = parse_params(PresetParams::new(a.d, 1, boundary, ordering, a.q, a.r), &a.params)?;
    let template = |l: usize| build_preset(&a.preset, &PresetParams { extent: l, ..base.clone() });
    let fit = scaling_fit(template, &a.extents, a.policy.into(), a.strategy.into(), enc)?;
    let mut text = String::new();
    for r in &fit.reports {
        text.push_str(&r.to_json_line());
        text.push('\n');
    }
    write_out(a.out.as_deref(), &text)?;
    eprintln!("cnot exponent {:.4}", fit.exponent);
    Ok(())
}

fn block(a: &BlockArgs, o: &Oracle) -> Outcome {
    if !a.no_verify {
        check_tol(a.tol)?;
    }
    let (_, _, h) = compiled(&a.model)?;
    let be = block_encode(&h)?;
    let dev = if a.no_verify {
        None
    } else {
        o.check(be.total_qubits())?;
        Some(be.verify_block(o)?)
    };
    let line = serde_json::to_string(&be.report(dev)).expect("report serializes");
    write_out(a.out.as_deref(), &format!("{line}\n"))?;
    match dev {
        Some(d) if d > a.tol => Err(Failure::Verify(format!("block deviates by {d:.3e} > {:.3e}", a.tol))),
        _ => Ok(()),
    }
}

/// Mode-diagonal hopping on every link and a site-dependent mass, no bosons.
fn fermion_model(d: usize, l: usize, m: usize) -> Result<HamiltonianModel, Failure> {
    if m == 0 {
        return config("--modes must be at least 1");
    }
    let g = LatticeGeometry::new(d, l, Boundary::Open, Ordering::Snake)?;
    let mut b = ModelBuilder::new(g, BosonRegister::new(0, 1, 1.0)?, m);
    for n in 1..=g.num_sites() {
        for a in 1..=m {
            b = b.hopping(HoppingTerm::hop(n, a, n, a, 0.25 * n as f64 - 0.4 * a as f64));
        }
    }
    for (i, link) in g.classify_links().iter().enumerate() {
        for a in 1..=m {
            b = b.hopping(HoppingTerm::hop(link.lower, a, link.upper, a, 0.5 + 0.1 * (i + a) as f64));
        }
    }
    Ok(b.build()?)
}

fn vc_check(a: &VcCheckArgs, o: &Oracle) -> Outcome {
    check_tol(a.tol)?;
    let model = match &a.model {
        Some(p) => HamiltonianModel::from_json(&read(p)?)?,
        None => fermion_model(a.d, a.l, a.modes)?,
    };
    let g = model.geometry;
    check_vc_geometry(Encoding::Vc, g.boundary, g.ordering)?;
    let vc = vc_transform(&model)?;
    let st = &vc.stabilizers;
    let h = vc.compiled.coordinate_sum();
    let all: Vec<_> = st.full_set.iter().chain(&st.local_generators).chain(&st.spectators).collect();
    let mut failures = Vec::new();

    let bad_h = all.iter().filter(|s| h.terms().iter().any(|(_, t)| !t.commutes(s))).count();
    let bad_pairs = all.iter().filter(|s| all.iter().any(|t| !t.commutes(s))).count();
    println!(
        "stabilizers {} (links {}, generators {}, spectators {})",
        all.len(),
        st.full_set.len(),
        st.local_generators.len(),
        st.spectators.len()
    );
    println!("noncommuting_with_h {bad_h}");
    println!("noncommuting_pairs {bad_pairs}");
    if bad_h > 0 || bad_pairs > 0 {
        failures.push("stabilizers do not commute");
    }
    println!("max_term_weight {}", vc.compiled.max_weight());

    let n = vc.compiled.num_qubits();
    let jw = compile(&model, Encoding::Jw)?;
    if o.check(n).is_err() {
        println!("dense checks skipped: {n} qubits exceed the oracle limit");
    } else {
        let proj = physical_projector(st, n, o)?;
        let rank = proj.projector_rank()?;
        let expect = 1usize << jw.num_qubits();
        println!("physical_rank {rank} expected {expect}");
        if rank != expect {
            failures.push("physical sector has the wrong dimension");
        }
        let hm = o.pauli_sum_matrix(&h, n)?;
        let comm = hm.commutator(&proj).max_abs();
        println!("h_projector_commutator {comm:.3e}");
        if comm > a.tol {
            failures.push("H does not preserve the physical sector");
        }
        let vc_spec = hm.restricted_spectrum(&proj.range_basis()?)?;
        let jw_spec = o.pauli_sum_matrix(&jw.coordinate_sum(), jw.num_qubits())?.eigenvalues()?;
        let dev = if vc_spec.len() == jw_spec.len() {
            vc_spec.iter().zip(&jw_spec).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        println!("spectrum_deviation {dev:.3e}");
        if dev > a.tol {
            failures.push("spectra differ");
        }
    }
    if failures.is_empty() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Verify(failures.join("; ")))
    }
}

fn export(a: &ExportArgs) -> Outcome {
    let mut c = Circuit::from_text(&read(&a.input)?)?;
    if a.peephole {
        c = peephole_cancel(&c);
    }
    let text = c.to_text();
    if Circuit::from_text(&text)? != c {
        return Err(Failure::Verify("exported circuit does not parse back to itself".into()));
    }
    write_out(a.out.as_deref(), &text)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a, &oracle(cli.oracle_limit)?),
        Command::Count(a) => count_cmd(a),
        Command::Scaling(a) => scaling(a),
        Command::BlockEncode(a) => block(a, &oracle(cli.oracle_limit)?),
        Command::VcCheck(a) => vc_check(a, &oracle(cli.oracle_limit)?),
        Command::Export(a) => export(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
