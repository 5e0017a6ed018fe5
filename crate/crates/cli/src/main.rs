//! `cvqkd` — command-line reports over the security toolkit.
//!
//! Every command emits a JSON envelope on stdout carrying a canonical
//! echo of the invocation, the tool version, and the payload, so a run
//! can be replayed exactly. `curve` additionally writes CSV files.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 domain or
//! degeneracy error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cvqkd_core::{
    ber_from_snr, bob_penalty, classical_channel_penalty, lambda_opt, lossy_bob_bound,
    optimality_report, predict, run_session, single_quanta_reference, snr_for_ber,
    squeezed_eve_bound, squeezing_parameter, tradeoff_curve, AnalyticPrediction, BitErrorRate,
    BoundForm, ChannelParams, CurveProtocol, Error, EveStrategy, Protocol, SessionParams,
    SimReport, SnrValue, TeleportGain, TransferCoefficient,
};

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "Security reports for continuous-variable QKD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transfer-coefficient security bounds and the BERs they imply.
    Bounds(BoundsArgs),
    /// Eve-vs-Bob BER trade-off curves, one CSV per (vn, eta) pair.
    Curve(CurveArgs),
    /// Monte Carlo session with analytic predictions side by side.
    Simulate(SimulateArgs),
    /// Teleportation attack operating point.
    Teleport(TeleportArgs),
}

#[derive(Args)]
struct BoundsArgs {
    /// Protocol: coherent or squeezed.
    #[arg(long)]
    protocol: String,
    /// Squeezed noise floor V_n (squeezed protocol).
    #[arg(long)]
    vn: Option<f64>,
    /// Eve's signal transfer coefficient T_E.
    #[arg(long)]
    te: Option<f64>,
    /// Line transmission efficiency.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Use the looser legacy right-hand side 4 V_n of the squeezed bound.
    #[arg(long)]
    printed_form: bool,
    /// Operating SNR in dB for the implied BERs.
    #[arg(long)]
    snr_db: Option<f64>,
}

#[derive(Args)]
struct CurveArgs {
    /// Noise floors to sweep, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    vn_list: Vec<f64>,
    /// Transmission efficiencies to sweep, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    eta_list: Vec<f64>,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output directory for the CSV files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also emit the ideal single-quanta reference series.
    #[arg(long)]
    single_quanta: bool,
    #[arg(long)]
    printed_form: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    protocol: String,
    /// none | guess | split | tap:F | teleport:G[,LAMBDA]
    #[arg(long, default_value = "none")]
    strategy: String,
    #[arg(long, default_value_t = 1_000_000)]
    symbols: u64,
    /// Random seed; defaults to $CVQKD_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    vn: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
}

#[derive(Args)]
struct TeleportArgs {
    /// Parametric pump gain G of the entanglement source.
    #[arg(long)]
    pump_gain: f64,
    /// Teleporter gain; defaults to the uncertainty-saturating optimum.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Serialize)]
struct ReportEnvelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    /// Canonical re-runnable form of the invocation.
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    notes: Vec<String>,
    payload: T,
}

impl<T: Serialize> ReportEnvelope<T> {
    fn print(command: String, seed: Option<u64>, notes: Vec<String>, payload: T) {
        let envelope = ReportEnvelope {
            tool: "cvqkd",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            notes,
            payload,
        };
        println!("{}", serde_json::to_string_pretty(&envelope).expect("serializable payload"));
    }
}

/// Operating SNR: the 1%-BER point unless --snr-db overrides it.
fn resolve_snr(snr_db: Option<f64>) -> Result<SnrValue, Error> {
    match snr_db {
        Some(db) => SnrValue::from_db(db),
        None => snr_for_ber(BitErrorRate::new(0.01)?),
    }
}

fn bound_form(printed: bool) -> BoundForm {
    if printed {
        BoundForm::Printed
    } else {
        BoundForm::Corrected
    }
}

fn usage_error(msg: &str) -> ! {
    // mirrors clap's own usage-failure exit code
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn parse_protocol(s: &str) -> Protocol {
    match s {
        "coherent" => Protocol::Coherent,
        "squeezed" => Protocol::Squeezed,
        other => usage_error(&format!("unknown protocol {other:?} (coherent|squeezed)")),
    }
}

fn parse_strategy(s: &str) -> EveStrategy {
    match s {
        "none" => EveStrategy::None,
        "guess" => EveStrategy::GuessResend,
        "split" => EveStrategy::SplitSimultaneous,
        _ => {
            if let Some(rest) = s.strip_prefix("tap:") {
                match rest.parse() {
                    Ok(fraction) => EveStrategy::PartialTap { fraction },
                    Err(_) => usage_error(&format!("bad tap fraction in {s:?}")),
                }
            } else if let Some(rest) = s.strip_prefix("teleport:") {
                let mut parts = rest.splitn(2, ',');
                let g = parts.next().and_then(|p| p.parse().ok());
                let Some(pump_gain) = g else {
                    usage_error(&format!("bad pump gain in {s:?}"));
                };
                let gain = match parts.next() {
                    None => TeleportGain::Optimal,
                    Some(l) => match l.parse() {
                        Ok(l) => TeleportGain::Fixed(l),
                        Err(_) => usage_error(&format!("bad teleporter gain in {s:?}")),
                    },
                };
                EveStrategy::Teleport { pump_gain, gain }
            } else {
                usage_error(&format!(
                    "unknown strategy {s:?} (none|guess|split|tap:F|teleport:G[,L])"
                ))
            }
        }
    }
}

#[derive(Serialize)]
struct BoundsPayload {
    protocol: String,
    eta: f64,
    snr_linear: f64,
    snr_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vn: Option<f64>,
    t_eve: f64,
    t_eve_max: f64,
    t_bob_max: f64,
    feasible: bool,
    /// Symmetric penalty V_E implied by T_E.
    v_eve_implied: f64,
    eve_ber: f64,
    bob_ber_min: f64,
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), Error> {
    let snr = resolve_snr(args.snr_db)?;
    let s = snr.linear();
    let form = bound_form(args.printed_form);
    let mut notes = Vec::new();
    if args.printed_form {
        notes.push("printed-form compatibility bound in effect (RHS 4 V_n)".to_string());
    }
    let payload = match args.protocol.as_str() {
        "coherent" => {
            let Some(te) = args.te else {
                usage_error("--te is required for the coherent protocol");
            };
            if !(te > 0.0 && te < 1.0) {
                return Err(Error::Domain(format!("t_eve must lie strictly in (0,1), got {te}")));
            }
            if args.vn.is_some() {
                usage_error("--vn applies only to the squeezed protocol");
            }
            if args.eta != 1.0 {
                usage_error("the coherent bound has no loss model; drop --eta");
            }
            let t_bob = 1.0 - te;
            BoundsPayload {
                protocol: "coherent".into(),
                eta: 1.0,
                snr_linear: s,
                snr_db: snr.db()?,
                vn: None,
                t_eve: te,
                t_eve_max: 1.0,
                t_bob_max: t_bob,
                feasible: true,
                v_eve_implied: 1.0 / te - 1.0,
                eve_ber: ber_from_snr(SnrValue::new(te * s)?).value(),
                bob_ber_min: ber_from_snr(SnrValue::new(t_bob * s)?).value(),
            }
        }
        "squeezed" => {
            let Some(vn) = args.vn else {
                usage_error("--vn is required for the squeezed protocol");
            };
            let te_max = squeezed_eve_bound(vn)?.value();
            let te = args.te.unwrap_or(te_max);
            let bound = lossy_bob_bound(vn, TransferCoefficient::new(te)?, args.eta, form)?;
            let t_bob = bound.t_bob.value();
            if !bound.feasible {
                notes.push("no secure transfer available to Bob at these settings".to_string());
            }
            BoundsPayload {
                protocol: "squeezed".into(),
                eta: args.eta,
                snr_linear: s,
                snr_db: snr.db()?,
                vn: Some(vn),
                t_eve: te,
                t_eve_max: te_max,
                t_bob_max: t_bob,
                feasible: bound.feasible,
                v_eve_implied: 2.0 * vn * (1.0 / te - 1.0),
                eve_ber: ber_from_snr(SnrValue::new(te * s)?).value(),
                bob_ber_min: ber_from_snr(SnrValue::new(t_bob * s)?).value(),
            }
        }
        other => usage_error(&format!("unknown protocol {other:?} (coherent|squeezed)")),
    };

    let mut command = format!("bounds --protocol {}", args.protocol);
    if let Some(vn) = args.vn {
        write!(command, " --vn {vn}").unwrap();
    }
    if let Some(te) = args.te {
        write!(command, " --te {te}").unwrap();
    }
    if args.eta != 1.0 {
        write!(command, " --eta {}", args.eta).unwrap();
    }
    if args.printed_form {
        command.push_str(" --printed-form");
    }
    if let Some(db) = args.snr_db {
        write!(command, " --snr-db {db}").unwrap();
    }
    ReportEnvelope::print(command, None, notes, payload);
    Ok(())
}

#[derive(Serialize)]
struct CurvePayload {
    snr_linear: f64,
    points: usize,
    files: Vec<String>,
}

/// Six significant digits, plot-tool friendly.
fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

fn cmd_curve(args: &CurveArgs) -> Result<(), Error> {
    let snr = resolve_snr(args.snr_db)?;
    let form = bound_form(args.printed_form);
    let mut files = Vec::new();
    let mut notes = vec![
        "curves use the squeezed-protocol bound; vn = 1 is its no-squeezing limit".to_string(),
    ];
    if args.printed_form {
        notes.push("printed-form compatibility bound in effect (RHS 4 V_n)".to_string());
    }
    for &vn in &args.vn_list {
        for &eta in &args.eta_list {
            let curve = tradeoff_curve(
                CurveProtocol::Squeezed,
                &ChannelParams::new(eta, vn)?,
                snr,
                args.points,
                form,
            )?;
            let mut csv = String::from("eve_ber,bob_ber,t_e,t_b,v_e\n");
            for p in &curve.points {
                let row = [p.eve_ber, p.bob_ber, p.t_eve, p.t_bob, p.v_eve]
                    .map(sig6)
                    .join(",");
                csv.push_str(&row);
                csv.push('\n');
            }
            let name = format!("curve_vn{vn}_eta{eta}.csv");
            let path = args.out.join(&name);
            std::fs::write(&path, csv).map_err(Error::from_io)?;
            files.push(name);
        }
    }
    if args.single_quanta {
        let mut csv = String::from("fraction,eve_ber,bob_ber\n");
        for i in 0..args.points {
            let f = i as f64 / (args.points - 1) as f64;
            let (eve, bob) = single_quanta_reference(f)?;
            csv.push_str(&format!("{},{},{}\n", sig6(f), sig6(eve.value()), sig6(bob.value())));
        }
        let name = "single_quanta.csv".to_string();
        std::fs::write(args.out.join(&name), csv).map_err(Error::from_io)?;
        files.push(name);
    }

    let mut command = format!(
        "curve --vn-list {}",
        args.vn_list.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
    );
    if args.eta_list != [1.0] {
        write!(
            command,
            " --eta-list {}",
            args.eta_list.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
        )
        .unwrap();
    }
    if let Some(db) = args.snr_db {
        write!(command, " --snr-db {db}").unwrap();
    }
    write!(command, " --points {}", args.points).unwrap();
    if args.single_quanta {
        command.push_str(" --single-quanta");
    }
    if args.printed_form {
        command.push_str(" --printed-form");
    }
    ReportEnvelope::print(
        command,
        None,
        notes,
        CurvePayload { snr_linear: snr.linear(), points: args.points, files },
    );
    Ok(())
}

#[derive(Serialize)]
struct Agreement {
    bob_sigma_distance: f64,
    eve_sigma_distance: f64,
    within_3_sigma: bool,
}

#[derive(Serialize)]
struct SimulatePayload {
    params: SessionParams,
    report: SimReport,
    predicted: AnalyticPrediction,
    agreement: Agreement,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let snr = resolve_snr(args.snr_db)?;
    let seed = args.seed.unwrap_or_else(|| {
        std::env::var("CVQKD_SEED").ok().and_then(|v| v.parse().ok()).unwrap_or(0)
    });
    let params = SessionParams {
        protocol: parse_protocol(&args.protocol),
        n_symbols: args.symbols,
        base_snr: snr,
        vn: if params_is_coherent(&args.protocol) { 1.0 } else { args.vn },
        v_anti: None,
        channel_eta: args.eta,
        seed,
        strategy: parse_strategy(&args.strategy),
    };
    let report = run_session(&params)?;
    let predicted = predict(&params)?;
    let sigma_distance = |value: f64, n: u64, p: f64| {
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        (value - p).abs() / sigma.max(f64::MIN_POSITIVE)
    };
    let bob = sigma_distance(report.ber_alice_bob.value, report.ber_alice_bob.n, predicted.bob_ber);
    let eve = sigma_distance(report.ber_alice_eve.value, report.ber_alice_eve.n, predicted.eve_ber);
    let agreement = Agreement {
        bob_sigma_distance: bob,
        eve_sigma_distance: eve,
        within_3_sigma: bob <= 3.0 && eve <= 3.0,
    };

    let mut command = format!(
        "simulate --protocol {} --strategy {} --symbols {} --seed {seed}",
        args.protocol, args.strategy, args.symbols
    );
    if let Some(db) = args.snr_db {
        write!(command, " --snr-db {db}").unwrap();
    }
    if !params_is_coherent(&args.protocol) {
        write!(command, " --vn {}", args.vn).unwrap();
    }
    if args.eta != 1.0 {
        write!(command, " --eta {}", args.eta).unwrap();
    }
    ReportEnvelope::print(
        command,
        Some(seed),
        Vec::new(),
        SimulatePayload { params, report, predicted, agreement },
    );
    Ok(())
}

fn params_is_coherent(protocol: &str) -> bool {
    protocol == "coherent"
}

#[derive(Serialize)]
struct TeleportPayload {
    pump_gain: f64,
    v_eve: f64,
    v_squeeze: f64,
    lambda: f64,
    lambda_is_optimal: bool,
    v_bob: f64,
    uncertainty_product: f64,
}

fn cmd_teleport(args: &TeleportArgs) -> Result<(), Error> {
    let g = args.pump_gain;
    let payload = match args.lambda {
        None => {
            let rep = optimality_report(g)?;
            TeleportPayload {
                pump_gain: g,
                v_eve: rep.eve.v_plus(),
                v_squeeze: squeezing_parameter(g)?,
                lambda: rep.signal_gain,
                lambda_is_optimal: true,
                v_bob: rep.bob.v_plus(),
                uncertainty_product: rep.eve.v_plus() * rep.bob.v_plus(),
            }
        }
        Some(lambda) => {
            let v_eve = classical_channel_penalty(g)?;
            let v_bob = bob_penalty(g, lambda)?;
            TeleportPayload {
                pump_gain: g,
                v_eve,
                v_squeeze: squeezing_parameter(g)?,
                lambda,
                lambda_is_optimal: lambda_opt(g).map(|l| l == lambda).unwrap_or(false),
                v_bob,
                uncertainty_product: v_eve * v_bob,
            }
        }
    };
    let mut command = format!("teleport --pump-gain {g}");
    if let Some(l) = args.lambda {
        write!(command, " --lambda {l}").unwrap();
    }
    ReportEnvelope::print(command, None, Vec::new(), payload);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Teleport(args) => cmd_teleport(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
