use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rummy_cli::{
    cmd_assist, cmd_eval, cmd_sample_hands, cmd_tournament, AssistArgs, CliResult, EvalArgs,
    Metric, SampleArgs, TournamentArgs,
};
use rummy_core::cards::DeckSpec;

#[derive(Parser)]
#[command(
    name = "rummy",
    version,
    about = "13-card rummy workbench: exact hand metrics, sampling, tournaments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum MetricArg {
    #[value(name = "minscore")]
    MinScore,
    #[value(name = "mindist")]
    MinDist,
    Both,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::MinScore => Metric::MinScore,
            MetricArg::MinDist => Metric::MinDist,
            MetricArg::Both => Metric::Both,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a 13-card hand, or a 14-card hand for the best discard
    Eval {
        /// Space-separated card tokens, e.g. "3C 4C 5C ..."
        #[arg(long)]
        hand: String,
        /// The drawn wildcard indicator card, e.g. 3S
        #[arg(long)]
        wcj: String,
        #[arg(long, value_enum, default_value_t = MetricArg::Both)]
        metric: MetricArg,
        /// Print the optimal grouping too
        #[arg(long)]
        declare: bool,
        /// Requirement chain override, e.g. "pure_sequence,any_sequence" or "none"
        #[arg(long)]
        req: Option<String>,
    },
    /// Sample random deals and write per-hand metrics to a CSV
    SampleHands {
        #[arg(long, default_value_t = 10000)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// CSV output path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        decks: u32,
        /// Printed jokers per deck
        #[arg(long, default_value_t = 2)]
        jokers: u32,
    },
    /// Play every ordered profile pair and report the skill decomposition
    Tournament {
        /// JSON run configuration; flags below override its fields
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated profile names
        #[arg(long)]
        profiles: Option<String>,
        /// Games per ordered pair
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// JSON-lines match records output path
        #[arg(long)]
        records: Option<PathBuf>,
        /// Matrix CSV output path
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Interactive per-turn readout on stdin
    Assist {
        /// Recommend dropping at or above this distance (first turn)
        #[arg(long, default_value_t = 3)]
        drop_threshold: u32,
        /// Requirement chain override
        #[arg(long)]
        req: Option<String>,
    },
}

fn run(cli: Cli) -> CliResult {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Eval { hand, wcj, metric, declare, req } => {
            cmd_eval(&EvalArgs { hand, wcj, metric: metric.into(), declare, req }, &mut out)
        }
        Cmd::SampleHands { n, seed, out: path, decks, jokers } => {
            let deck = DeckSpec { num_decks: decks, printed_jokers_per_deck: jokers };
            cmd_sample_hands(&SampleArgs { n, seed, out: path, deck }, &mut out).map(|_| ())
        }
        Cmd::Tournament { config, profiles, n, seed, records, matrix } => cmd_tournament(
            &TournamentArgs { config, profiles, n, seed, records, matrix },
            &mut out,
        )
        .map(|_| ()),
        Cmd::Assist { drop_threshold, req } => {
            let stdin = std::io::stdin();
            let mut input = stdin.lock();
            cmd_assist(&mut input, &mut out, &AssistArgs { drop_threshold, req })
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = run(cli) {
        let _ = writeln!(std::io::stderr(), "error: {e}");
        std::process::exit(e.exit_code());
    }
}
