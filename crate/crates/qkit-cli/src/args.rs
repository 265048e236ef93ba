//! Command-line grammar. Every argument struct also serializes, so the
//! resolved parameters can be echoed into the report.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "qkit", version, about = "Simulate quantum circuits and run textbook quantum algorithms")]
pub struct Cli {
    /// Seed of the random generator; equal seeds give identical reports.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    pub output: Output,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a QASM file.
    Run(RunArgs),
    /// Grover search for marked items.
    Grover(GroverArgs),
    /// Bernstein-Vazirani recovery of a hidden string.
    Bv(BvArgs),
    /// Quantum Fourier transform of a basis state.
    Qft(QftArgs),
    /// Factor an integer with period finding.
    Shor(ShorArgs),
    /// Solve a 2x2 linear system with HHL.
    Hhl(HhlArgs),
    /// QAOA for MaxCut.
    Qaoa(QaoaArgs),
    /// Discrete-time quantum walk on a cycle.
    Walk(WalkArgs),
    /// Variational ground state of the transverse-field Ising chain.
    Vqe(VqeArgs),
    /// Principal components of two features via a swap-test purity estimate.
    Pca(PcaArgs),
    /// Potts partition function and the two-qubit QFT fragment.
    Potts(PottsArgs),
    /// Split-operator evolution of a particle on a ring.
    Schrodinger(SchrodingerArgs),
    /// Quantum minimum finding.
    Minfind(MinfindArgs),
    /// Breadth-first layers found by repeated Grover search.
    Layered(LayeredArgs),
    /// Matrix element of a group's regular representation.
    Group(GroupArgs),
    /// Circuit preparing a state given as a JSON amplitude list.
    Prep(PrepArgs),
    /// Three-CNOT circuit for a two-qubit unitary given as JSON.
    Synth(SynthArgs),
    /// State tomography by linear inversion or maximum likelihood.
    Tomography(TomographyArgs),
    /// Repetition-code experiment under bit-flip or rotation noise.
    Qec(QecArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run(_) => "run",
            Command::Grover(_) => "grover",
            Command::Bv(_) => "bv",
            Command::Qft(_) => "qft",
            Command::Shor(_) => "shor",
            Command::Hhl(_) => "hhl",
            Command::Qaoa(_) => "qaoa",
            Command::Walk(_) => "walk",
            Command::Vqe(_) => "vqe",
            Command::Pca(_) => "pca",
            Command::Potts(_) => "potts",
            Command::Schrodinger(_) => "schrodinger",
            Command::Minfind(_) => "minfind",
            Command::Layered(_) => "layered",
            Command::Group(_) => "group",
            Command::Prep(_) => "prep",
            Command::Synth(_) => "synth",
            Command::Tomography(_) => "tomography",
            Command::Qec(_) => "qec",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Statevector,
    Sampled,
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    /// Path of the QASM program.
    pub path: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1024)]
    pub shots: u64,
    /// Standard deviation of the per-gate over-rotation angle.
    #[arg(long, default_value_t = 0.0)]
    pub over_rotation: f64,
    /// Flip probability of each touched qubit after every gate.
    #[arg(long, default_value_t = 0.0)]
    pub bitflip: f64,
    /// Flip probability of each explicit idle (`id`) step.
    #[arg(long, default_value_t = 0.0)]
    pub idle_flip: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GroverArgs {
    /// Number of input qubits.
    #[arg(long)]
    pub n: usize,
    /// Marked item as an integer; repeat for several.
    #[arg(long = "target", required = true)]
    pub targets: Vec<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct BvArgs {
    /// Hidden bit string, for example `1011`.
    #[arg(long)]
    pub secret: String,
}

#[derive(Debug, Args, Serialize)]
pub struct QftArgs {
    #[arg(long)]
    pub n: usize,
    /// Basis state to transform.
    #[arg(long, default_value_t = 0)]
    pub input: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ShorArgs {
    /// Integer to factor.
    #[arg(long)]
    pub n: u64,
    /// Also report the register distribution of the compiled N = 15 circuit.
    #[arg(long)]
    pub compiled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Args, Serialize)]
pub struct HhlArgs {
    /// Right-hand side: `0`, `1`, `+` or `-`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b: String,
    /// Observable to estimate; all three when omitted.
    #[arg(long, value_enum)]
    pub observable: Option<Axis>,
    /// Post-selected shots; exact when omitted.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedGraph {
    Edge,
    Triangle,
    TriangleEdge,
}

#[derive(Debug, Args, Serialize)]
pub struct QaoaArgs {
    /// One of the built-in graphs.
    #[arg(long, value_enum, conflicts_with = "edges")]
    pub graph: Option<NamedGraph>,
    /// Node count for `--edges`.
    #[arg(long, requires = "edges")]
    pub nodes: Option<usize>,
    /// Edge list such as `0-1,1-2`.
    #[arg(long, value_parser = parse_edge, value_delimiter = ',')]
    pub edges: Option<Vec<(usize, usize)>>,
    /// Rounds; must match the angle counts when those are given.
    #[arg(long)]
    pub r: Option<usize>,
    /// Cost angles, one per round (accepts `0.8pi`).
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma: Option<Vec<f64>>,
    /// Mixer angles, one per round.
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Option<Vec<f64>>,
    /// Grid points per π for the angle search used when no angles are given.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    /// Sampled statistics from this many shots in addition to the exact ones.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 4)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ansatz {
    Product,
    Entangled,
}

#[derive(Debug, Args, Serialize)]
pub struct VqeArgs {
    /// Number of spins.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Transverse field.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub h: f64,
    #[arg(long, value_enum, default_value_t = Ansatz::Entangled)]
    pub ansatz: Ansatz,
    /// Open chain instead of a ring.
    #[arg(long)]
    pub open: bool,
    #[arg(long, default_value_t = 6)]
    pub restarts: usize,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Shots for a sampled energy estimate at the optimum.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PcaArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x1: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub x2: Vec<f64>,
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PottsArgs {
    /// Vertex count for `--edges`; the unit triangle is used otherwise.
    #[arg(long, requires = "edges")]
    pub nodes: Option<usize>,
    /// Weighted edges such as `0-1:1.0,1-2:0.5` (weight defaults to 1).
    #[arg(long, value_parser = parse_weighted_edge, value_delimiter = ',')]
    pub edges: Option<Vec<(usize, usize, f64)>>,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Shots for the QFT fragment; exact when omitted.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SchrodingerArgs {
    /// Qubits of the position register.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Kinetic phase per step (accepts `0.5pi`).
    #[arg(long, value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    /// Potential phase per site; zero when omitted.
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub potential: Option<Vec<f64>>,
    /// Initial state as a JSON amplitude list; `|0…0⟩` when omitted.
    #[arg(long)]
    pub initial: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct MinfindArgs {
    /// Values to search, for example `3,7,1,9`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub values: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct LayeredArgs {
    #[arg(long)]
    pub nodes: usize,
    /// Undirected edges such as `0-1,1-2`.
    #[arg(long, value_parser = parse_edge, value_delimiter = ',')]
    pub edges: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartArg {
    Re,
    Im,
}

#[derive(Debug, Args, Serialize)]
pub struct GroupArgs {
    /// `s3` or `aN` for the cyclic group of order N.
    #[arg(long, default_value = "s3")]
    pub group: String,
    /// Group element (0-based index).
    #[arg(long)]
    pub element: usize,
    /// State `ψ` as a JSON amplitude list; `|0…0⟩` when omitted.
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long, value_enum, default_value_t = PartArg::Re)]
    pub part: PartArg,
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PrepArgs {
    /// Target state as a JSON list of `[re, im]` pairs or reals (2, 4 or 16 entries).
    #[arg(long)]
    pub amplitudes: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// 4×4 unitary as a JSON list of rows of `[re, im]` pairs or reals.
    #[arg(long)]
    pub unitary: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ml,
    Linear,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct TomographyArgs {
    /// `single`, `bell`, `products:N` or a comma list of Pauli labels such as `zz,xx`.
    #[arg(long, default_value = "single")]
    pub povm: String,
    /// State to measure, as a JSON amplitude list.
    #[arg(long, group = "source")]
    pub state: Option<String>,
    /// QASM program whose final state is measured.
    #[arg(long, group = "source")]
    pub circuit: Option<PathBuf>,
    /// JSON record `{"counts": {basis: {label: count}}}` to estimate from.
    #[arg(long, group = "source")]
    pub record: Option<PathBuf>,
    /// Shots per basis when simulating; exact frequencies when omitted.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_enum, default_value_t = Method::Ml)]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Bitflip,
    Rotation,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct QecArgs {
    #[arg(long, value_enum, default_value_t = NoiseKind::Bitflip)]
    pub noise_kind: NoiseKind,
    /// Readout flip probability of each qubit.
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Standard deviation of the common rotation angle.
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Number of idle T gates (a multiple of 8).
    #[arg(long, default_value_t = 16)]
    pub idle: usize,
}

/// Parses an angle: a plain number, or a multiple of π written `Xpi`,
/// `pi`, `-pi`, `Xpi/Y` or `pi/Y`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("'{s}' is not an angle (try 0.25, 0.8pi or pi/4)");
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coef = match &t[..pos] {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &t[pos + 2..];
    let div = match rest {
        "" => 1.0,
        r => match r.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None => return Err(bad()),
        },
    };
    if div == 0.0 {
        return Err(bad());
    }
    Ok(coef * PI / div)
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.trim().split_once('-').ok_or_else(|| format!("'{s}' is not an edge like 0-1"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("'{s}' is not an edge like 0-1"));
    Ok((n(a)?, n(b)?))
}

fn parse_weighted_edge(s: &str) -> Result<(usize, usize, f64), String> {
    let (e, w) = match s.split_once(':') {
        Some((e, w)) => (e, w.trim().parse::<f64>().map_err(|_| format!("bad weight in '{s}'"))?),
        None => (s, 1.0),
    };
    let (a, b) = parse_edge(e)?;
    Ok((a, b, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.8pi").unwrap(), 0.8 * PI);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn edges() {
        assert_eq!(parse_edge("2-3").unwrap(), (2, 3));
        assert!(parse_edge("2").is_err());
        assert_eq!(parse_weighted_edge("0-1:0.5").unwrap(), (0, 1, 0.5));
        assert_eq!(parse_weighted_edge("0-1").unwrap(), (0, 1, 1.0));
    }

    #[test]
    fn grammar_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
