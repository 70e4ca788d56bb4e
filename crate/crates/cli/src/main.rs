use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use cyclonet::dynamics::{chain_evolve, evolve, format_sci, perturbed_amplitude_series, write_series_csv, So3Example, MAX_CHAIN};
use cyclonet::gates::{compress_runs, GateSpec, U2Params};
use cyclonet::group::classify;
use cyclonet::protocols::{memory_retrieve, memory_store_with, phase_estimation_with_state, sensor_run, MAX_PHASE_BITS};
use cyclonet::spectral::{alternating_lambda0, FallbackPolicy};
use cyclonet::{Network, State, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const NPRIME_LIMIT: u64 = 1_000_000;
const DEFAULT_ALPHA_FAMILY: &str = "-pi/3,-pi/4,-pi/6,0,pi/6,pi/4,pi/3";

#[derive(Parser)]
#[command(name = "cyclonet", version, about = "Cyclic quantum gate networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a network read from JSON
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write figure data as CSV
    Figure {
        #[command(subcommand)]
        figure: Figure,
    },
    /// Run a protocol demo
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Subcommand)]
enum Figure {
    /// Eigenphase nu0 of the alternating SU(3) pair over phi in [0, 2pi]
    Nu0Sweep {
        #[arg(long)]
        output: PathBuf,
        /// Grid spacing of phi, in units of pi
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        /// Comma-separated alpha values, e.g. `-pi/3,0,pi/4`
        #[arg(long, default_value = DEFAULT_ALPHA_FAMILY)]
        alpha_family: String,
    },
    /// Perturbed amplitude of one basis state versus n'
    PertSeries {
        #[arg(long)]
        output: PathBuf,
        /// Target eigenphase, e.g. `pi/4`, `1.01pi/4`, `0.99pi`
        #[arg(long)]
        nu1: String,
        #[arg(long, default_value = "110")]
        basis: String,
        #[arg(long, default_value_t = 1600)]
        nprime_max: u64,
        /// Eigenstate the cyclic pair starts in
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Store a random state, run n cycles, undo with one operator
    Memory {
        #[arg(long, default_value_t = 12345)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Detect an acyclic |1> through the Psi_3 population
    Sensor {
        #[arg(long, default_value_t = 1)]
        bit: u8,
        #[arg(long, default_value_t = 300)]
        nprime: u64,
        #[arg(long, default_value_t = 1.2)]
        phi: f64,
    },
    /// Phase estimation of a controlled phase gate
    PhaseEst {
        #[arg(long, default_value_t = 0.125)]
        phase: f64,
        #[arg(long, default_value_t = 3)]
        bits: usize,
    },
    /// Random networks chained by one acyclic qubit
    Chain {
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long, default_value_t = 10)]
        nprime: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Parses `pi/4`, `-2pi/3`, `1.01pi/4`, `0.99pi` or plain radians.
fn parse_angle(text: &str) -> Result<f64> {
    let t: String = text.trim().chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.replace('π', "pi");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().with_context(|| format!("bad denominator in `{text}`"))?),
        None => (t.as_str(), 1.0),
    };
    let (sign, num) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num.strip_prefix('+').unwrap_or(num)),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim_end_matches('*');
            let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().with_context(|| format!("bad angle `{text}`"))? };
            c * PI
        }
        None => num.parse::<f64>().with_context(|| format!("bad angle `{text}`"))?,
    };
    if den == 0.0 || !value.is_finite() {
        bail!("bad angle `{text}`");
    }
    Ok(sign * value / den)
}

fn read_network(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        anyhow::anyhow!("{}: invalid network at `{at}`: {}", path.display(), e.inner())
    })
}

fn cmd_classify(input: &Path) -> Result<bool> {
    let net = read_network(input)?;
    let class = classify(&net)?;
    let compressed = compress_runs(&net.gates);
    let g = net.compile()?;
    println!("{class}, compressed {}→{} gates", net.gates.len(), compressed.len());
    println!("unitarity residual {}", format_sci(g.unitarity_residual()));
    Ok(true)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn cmd_nu0_sweep(output: &Path, grid_step: f64, family: &str) -> Result<bool> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        bail!("--grid-step must be > 0");
    }
    let alphas = family.split(',').map(parse_angle).collect::<Result<Vec<_>>>()?;
    let steps = (2.0 / grid_step + 1e-9).floor() as usize;
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| (0..=steps).map(move |k| (a, k as f64 * grid_step * PI)))
        .collect();
    let rows: Vec<String> = points
        .par_iter()
        .map(|&(a, phi)| {
            let nu0 = clean(alternating_lambda0(a, phi).arg());
            format!("{},{},{}", format_sci(a), format_sci(phi), format_sci(nu0))
        })
        .collect();
    let mut out = create(output)?;
    writeln!(out, "alpha,phi,nu0")?;
    for r in &rows {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    println!("wrote {} rows to {}", rows.len(), output.display());
    Ok(true)
}

fn cmd_pert_series(output: &Path, nu1: &str, basis: &str, nprime_max: u64, k: usize) -> Result<bool> {
    if nprime_max > NPRIME_LIMIT {
        bail!("--nprime-max must be <= {NPRIME_LIMIT}");
    }
    let nu1 = parse_angle(nu1)?;
    let ex = So3Example::from_nu1(nu1)?;
    let series = perturbed_amplitude_series(&ex, k, basis, nprime_max)?;
    let mut out = create(output)?;
    write_series_csv(&series, &mut out)?;
    out.flush()?;
    println!(
        "|{}> nu1={} phi={} rows={} -> {}",
        series.label,
        format_sci(series.nu1),
        format_sci(ex.phi()),
        series.values.len(),
        output.display()
    );
    Ok(true)
}

fn random_u2(rng: &mut ChaCha8Rng) -> U2Params<f64> {
    let mut a = || rng.gen_range(-PI..PI);
    U2Params::new(a(), a(), a(), a())
}

fn random_network(rng: &mut ChaCha8Rng) -> Network {
    let mut gates = vec![
        GateSpec::control_down(random_u2(rng)),
        GateSpec::control_up(random_u2(rng)),
    ];
    gates.push(GateSpec::single(rng.gen_range(1..=2), random_u2(rng)));
    Network::new(2, gates)
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> State {
    let amps = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    State::normalized(amps)
}

fn cmd_memory(n: u64, seed: u64, policy: FallbackPolicy) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_network(&mut rng);
    let psi = random_state(&mut rng, 4);
    let mut rec = memory_store_with(&net, &psi, policy)?;
    let r = memory_retrieve(&mut rec, n)?;
    println!("# seed={seed}");
    println!("n={n} undo_applications={}", r.undo_applications);
    println!("fidelity {:.9}", r.fidelity);
    Ok(r.fidelity > 1.0 - 1e-9 && r.undo_applications == 1)
}

fn cmd_sensor(bit: u8, nprime: u64, phi: f64) -> Result<bool> {
    let net = So3Example::new(phi)?.network();
    let r = sensor_run(&net, bit, nprime)?;
    println!("P(Ψ₃)={:.9} detected={}", r.p_psi3, r.detected);
    let expect = if bit == 1 { 0.0 } else { 1.0 };
    Ok((r.p_psi3 - expect).abs() < 1e-10 && r.detected == (bit == 1))
}

fn cmd_phase_est(phase: f64, bits: usize, policy: FallbackPolicy) -> Result<bool> {
    if bits == 0 || bits > MAX_PHASE_BITS {
        bail!("--bits must be in 1..={MAX_PHASE_BITS}");
    }
    let net = Network::new(2, vec![GateSpec::control_down(U2Params::new(2.0 * PI * phase, 0.0, 0.0, 0.0))]);
    let g = net.compile()?;
    let r = phase_estimation_with_state(&g, &State::basis(4, 2), bits, policy)?;
    println!("phase={} bits={bits}", r.phase);
    println!("kickback residual {}", format_sci(r.kickback_residual));
    println!("estimate={} probability={:.9}", r.estimate, r.probability);
    let scaled = r.phase * (1u64 << bits) as f64;
    let exact = (scaled - scaled.round()).abs() < 1e-9;
    let mut ok = r.kickback_residual < 1e-9;
    if exact {
        ok &= r.probability > 1.0 - 1e-9 && (r.estimate - r.phase).abs() < 1e-12;
    }
    Ok(ok)
}

fn cmd_chain(q: usize, nprime: u64, seed: u64) -> Result<bool> {
    if q == 0 || q > MAX_CHAIN {
        bail!("--q must be in 1..={MAX_CHAIN}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nets: Vec<Network> = (0..q).map(|_| random_network(&mut rng)).collect();
    let states: Vec<State> = (0..q).map(|_| random_state(&mut rng, 4)).collect();
    let phi = random_state(&mut rng, 2);
    let acyclic = [phi[0], phi[1]];
    let out = chain_evolve(&nets, acyclic, &states, nprime)?;

    // The acyclic |0> branch never touches the networks.
    let mut idle = State::from_amplitudes_unchecked(vec![acyclic[0]]);
    for j in (0..q).rev() {
        idle = idle.kron(&evolve(&nets[j], &states[j], (nprime + q as u64) as i64)?);
    }
    let half = out.dim() / 2;
    let branch = State::from_amplitudes_unchecked(out.amplitudes()[..half].to_vec());
    let resid = branch.max_abs_diff(&idle);
    let p1: f64 = out.amplitudes()[half..].iter().map(|z| z.norm_sqr()).sum();

    println!("# seed={seed}");
    println!("q={q} n'={nprime} dim={}", out.dim());
    println!("norm {:.9}", out.norm());
    println!("P(acyclic=1) {:.9}", p1);
    println!("unperturbed branch residual {}", format_sci(resid));
    Ok((out.norm() - 1.0).abs() < 1e-10 && resid < 1e-10 && (p1 - acyclic[1].norm_sqr()).abs() < 1e-10)
}

fn run(cli: Cli) -> Result<bool> {
    let policy = FallbackPolicy::from_env().map_err(anyhow::Error::msg)?;
    match cli.command {
        Command::Classify { input } => cmd_classify(&input),
        Command::Figure { figure } => match figure {
            Figure::Nu0Sweep {
                output,
                grid_step,
                alpha_family,
            } => cmd_nu0_sweep(&output, grid_step, &alpha_family),
            Figure::PertSeries {
                output,
                nu1,
                basis,
                nprime_max,
                k,
            } => cmd_pert_series(&output, &nu1, &basis, nprime_max, k),
        },
        Command::Demo { demo } => match demo {
            Demo::Memory { n, seed } => cmd_memory(n, seed, policy),
            Demo::Sensor { bit, nprime, phi } => cmd_sensor(bit, nprime, phi),
            Demo::PhaseEst { phase, bits } => cmd_phase_est(phase, bits, policy),
            Demo::Chain { q, nprime, seed } => cmd_chain(q, nprime, seed),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let close = |s: &str, v: f64| assert!((parse_angle(s).unwrap() - v).abs() < 1e-15, "{s}");
        close("pi/4", PI / 4.0);
        close("1.01pi/4", 1.01 * PI / 4.0);
        close("0.99pi", 0.99 * PI);
        close("-2pi/3", -2.0 * PI / 3.0);
        close("0", 0.0);
        close("0.5", 0.5);
        close("π/6", PI / 6.0);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/0").is_err());
    }
}
