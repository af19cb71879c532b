use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmdnov::study::presets;
use mmdnov::{KernelSpec, MatrixFormat, TestConfig, Workers};

#[derive(Debug, Parser)]
#[command(
    name = "mmdnov",
    version,
    about = "Kernel two-sample tests for embedding sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Permutation test of two embedding files.
    Test(TestArgs),
    /// Pairwise MMD and p-value matrix over a labelled corpus, with same-label negative controls.
    Matrix(MatrixArgs),
    /// Rejection rate against per-side sample size for label pairs.
    Power(PowerArgs),
    /// Write synthetic embeddings.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Rbf,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Npy,
    Csv,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Npy => MatrixFormat::Npy,
            FormatArg::Csv => MatrixFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for SigmaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(SigmaArg::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(SigmaArg::Fixed(v)),
            _ => Err(format!("expected 'auto' or a positive number, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkersArg(pub Workers);

impl FromStr for WorkersArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(WorkersArg(Workers::Auto));
        }
        s.parse::<usize>()
            .ok()
            .and_then(|n| Workers::fixed(n).ok())
            .map(WorkersArg)
            .ok_or_else(|| format!("expected 'auto' or a positive integer, got {s:?}"))
    }
}

/// Options shared by every command that runs permutation tests.
#[derive(Debug, Args)]
pub struct TestOptions {
    #[arg(long, value_enum, default_value_t = KernelArg::Rbf)]
    pub kernel: KernelArg,
    /// RBF bandwidth: `auto` (median heuristic) or a positive number.
    #[arg(long, default_value = "auto")]
    pub sigma: SigmaArg,
    #[arg(long, default_value_t = mmdnov::perm_test::DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value_t = mmdnov::perm_test::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = mmdnov::perm_test::DEFAULT_SEED)]
    pub seed: u64,
    /// Thread count, `auto` or a positive integer. Output does not depend on it.
    #[arg(long, default_value = "auto")]
    pub workers: WorkersArg,
    /// Report (k + 1) / (P + 1) instead of k / P.
    #[arg(long)]
    pub add_one: bool,
    /// Where to write the JSON document (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl TestOptions {
    pub fn config(&self) -> mmdnov::Result<TestConfig> {
        let kernel = match (self.kernel, self.sigma) {
            (KernelArg::Linear, _) => KernelSpec::linear(),
            (KernelArg::Rbf, SigmaArg::Auto) => KernelSpec::rbf_auto(),
            (KernelArg::Rbf, SigmaArg::Fixed(s)) => KernelSpec::rbf_fixed(s)?,
        };
        let cfg = TestConfig {
            permutations: self.permutations,
            alpha: self.alpha,
            seed: self.seed,
            workers: self.workers.0,
            kernel,
            add_one: self.add_one,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Input format; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Exit with status 3 when the null hypothesis is rejected.
    #[arg(long)]
    pub fail_on_reject: bool,
    #[command(flatten)]
    pub test: TestOptions,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Tab-separated `<label>\t<path>` lines.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Rows drawn per label for each cell.
    #[arg(long, default_value_t = presets::SAMPLE_CAP)]
    pub cap: usize,
    /// MMD matrix as CSV; p-values go next to it as `<stem>.pvalues.csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub test: TestOptions,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated `a:b` label pairs, or a preset (`digits-short`, `digits-full`).
    /// Defaults to every unordered pair of distinct labels in manifest order.
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long, value_delimiter = ',', default_values_t = presets::SAMPLE_SIZES)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = presets::TRIALS)]
    pub trials: usize,
    /// Upper bound on rows drawn per label.
    #[arg(long, default_value_t = presets::SAMPLE_CAP)]
    pub cap: usize,
    /// Long-form CSV `pair,label_a,label_b,n,rate,trials`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub test: TestOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Moons,
    Mixture,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Gaussian)]
    pub family: FamilyArg,
    /// Defaults to the length of `--mean`.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated coordinates. For `moons` this is the translation; for
    /// `mixture` separate component means with `;`.
    #[arg(long)]
    pub mean: String,
    /// Standard deviation (noise level for `moons`).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = mmdnov::perm_test::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Output format; inferred from the extension, else npy.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}
