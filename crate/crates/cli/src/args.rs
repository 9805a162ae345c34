use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellchi_core::oracles::Suite;
use ellchi_core::Mode;

/// Exact orbifold Euler characteristics on the moduli of genus-one curves.
///
/// The Hodge exponent counts powers of H: `--hodge -3` reads the coefficient
/// of q^3 directly, positive values go through variable inversion.
#[derive(Debug, Parser)]
#[command(name = "ellchi", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// On-disk memo cache.
    #[arg(long, env = "ELLCHI_CACHE", global = true)]
    pub cache: Option<PathBuf>,

    /// Do not read, fill or write any cache; overrides `--cache`.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Worker threads.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,

    /// Largest n handled with exact rational functions.
    #[arg(long, default_value_t = 4, global = true)]
    pub exact_ceiling: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Series,
    Auto,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Series => Mode::Series,
            ModeArg::Auto => Mode::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Fast,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Fast => Suite::Fast,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One value χ(M̄₁,ₙ, H^hodge ⊗ L₁^d₁ ⊗ … ⊗ Lₙ^dₙ).
    Chi(ChiArgs),
    /// Values on a grid of exponents.
    Table(TableArgs),
    /// Taylor coefficients of the full generating function.
    Series(SeriesArgs),
    /// The exact generating function P_{n,m} in canonical form.
    Genfun(GenfunArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Inspect or manage the memo cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub hodge: i64,
    /// Comma-separated cotangent exponents d₁,…,dₙ.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub exps: Vec<i64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub n: i64,
    /// Inclusive range `a..b` or a single value.
    #[arg(long, default_value = "0", value_parser = parse_range, allow_hyphen_values = true)]
    pub hodge: RangeInclusive<i64>,
    /// Comma-separated inclusive ranges, one per point, or one range for all.
    #[arg(long, value_delimiter = ',', value_parser = parse_range, allow_hyphen_values = true, required = true)]
    pub exps: Vec<RangeInclusive<i64>>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub n: i64,
    /// Truncation order in every variable.
    #[arg(long)]
    pub order: u32,
    /// Optional bound on the total degree.
    #[arg(long)]
    pub total: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GenfunArgs {
    #[arg(long)]
    pub n: i64,
    /// Number of active cotangent insertions; defaults to n.
    #[arg(long)]
    pub m: Option<i64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
    pub suite: SuiteArg,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Show the cache file and its entries.
    Info,
    /// Delete the cache file.
    Clear,
    /// Fill the cache with every P_{k,m}, k ≤ n.
    Warm {
        #[arg(long)]
        n: i64,
    },
}

/// `a..b` (inclusive) or `a`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| format!("not an integer: {t:?}"))
    };
    match s.split_once("..") {
        Some((a, b)) => Ok(parse(a)?..=parse(b)?),
        None => {
            let a = parse(s)?;
            Ok(a..=a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..12").unwrap(), 0..=12);
        assert_eq!(parse_range("-2..-1").unwrap(), -2..=-1);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "ellchi", "chi", "--n", "2", "--exps", "-1,3", "--hodge", "-2",
        ])
        .unwrap();
        match cli.command {
            Command::Chi(a) => {
                assert_eq!(a.exps, vec![-1, 3]);
                assert_eq!(a.hodge, -2);
            }
            _ => panic!("wrong command"),
        }
        assert!(Cli::try_parse_from(["ellchi", "chi", "--n", "1"]).is_err());
    }
}
