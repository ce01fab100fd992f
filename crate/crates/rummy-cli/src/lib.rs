//! Command surface over the core crate: one-shot hand evaluation, random-hand
//! distribution sampling, tournament running, and an interactive assist loop.
//! Every command writes to a caller-supplied sink so tests can capture output.

use std::cell::RefCell;
use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rummy_core::agents::{AgentConfig, Profile, ALL_PROFILES};
use rummy_core::cards::{
    format_card, format_hand, parse_card, parse_hand, Card, DeckSpec, WildcardSpec,
};
use rummy_core::game::GameState;
use rummy_core::solver::{
    Declaration, Requirement, SolverConfig, Workspace, DEFAULT_MAXDIST,
};
use rummy_core::tournament::{run_matrix, MatchRecord, MatrixCell, MatrixReport};
use serde::{Deserialize, Serialize};

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Errors split by exit code: usage/parse problems exit 1, runtime failures 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult<T = ()> = Result<T, CliError>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Metric {
    MinScore,
    MinDist,
    Both,
}

impl Metric {
    fn wants_score(self) -> bool {
        self != Metric::MinDist
    }
    fn wants_dist(self) -> bool {
        self != Metric::MinScore
    }
}

/// Comma-separated requirement-chain override; "none" clears the chain.
pub fn parse_requirements(text: &str) -> CliResult<Vec<Requirement>> {
    if text.trim() == "none" {
        return Ok(vec![]);
    }
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            Requirement::from_name(t).ok_or_else(|| {
                usage(format!(
                    "unknown requirement '{t}' (valid: pure_sequence, any_sequence, any_meld)"
                ))
            })
        })
        .collect()
}

fn solver_config(req: &Option<String>) -> CliResult<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(text) = req {
        cfg.requirements = parse_requirements(text)?;
    }
    Ok(cfg)
}

fn parse_wcj_arg(text: &str) -> CliResult<WildcardSpec> {
    let card = parse_card(text.trim()).map_err(|e| usage(format!("bad wildcard card: {e}")))?;
    WildcardSpec::new(card).map_err(|e| usage(format!("bad wildcard card: {e}")))
}

fn parse_hand_arg(text: &str, sizes: &[usize]) -> CliResult<Vec<Card>> {
    let hand = parse_hand(text).map_err(|e| usage(format!("bad hand: {e}")))?;
    if !sizes.contains(&hand.len()) {
        return Err(usage(format!(
            "hand must have {} cards, got {}",
            sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" or "),
            hand.len()
        )));
    }
    Ok(hand)
}

/// Render a witness grouping. Mask bits at or past the hand length stand for
/// SuperJoker placeholders from distance analysis.
fn write_declaration(
    out: &mut impl Write,
    hand: &[Card],
    decl: &Declaration,
) -> std::io::Result<()> {
    writeln!(out, "declaration:")?;
    for m in &decl.melds {
        let tokens: Vec<String> = (0..32)
            .filter(|i| m.mask & (1u32 << i) != 0)
            .map(|i| {
                if (i as usize) < hand.len() {
                    format_card(hand[i as usize])
                } else {
                    "*".into()
                }
            })
            .collect();
        writeln!(out, "  {}: {}", m.meld_type.name(), tokens.join(" "))?;
    }
    let deadwood: Vec<Card> = (0..hand.len())
        .filter(|&i| decl.deadwood_mask & (1u32 << i) != 0)
        .map(|i| hand[i])
        .collect();
    if deadwood.is_empty() {
        writeln!(out, "  deadwood: none")
    } else {
        writeln!(out, "  deadwood: {}", format_hand(&deadwood))
    }
}

#[derive(Clone, Debug)]
pub struct EvalArgs {
    pub hand: String,
    pub wcj: String,
    pub metric: Metric,
    pub declare: bool,
    pub req: Option<String>,
}

/// Evaluate one 13-card hand (or a 14-card hand, reporting the best discard).
pub fn cmd_eval(args: &EvalArgs, out: &mut impl Write) -> CliResult {
    let hand = parse_hand_arg(&args.hand, &[13, 14])?;
    let w = parse_wcj_arg(&args.wcj)?;
    let mut cfg = solver_config(&args.req)?;
    cfg.emit_declaration = args.declare;
    let mut ws = Workspace::new();

    writeln!(out, "hand: {}", format_hand(&hand))?;
    writeln!(out, "wildcard: {}", format_card(w.drawn_card))?;

    if hand.len() == 13 {
        if args.metric.wants_score() {
            let (score, decl) = ws.min_score(&hand, &w, &cfg);
            writeln!(out, "min_score: {score}")?;
            if score == 0 {
                writeln!(out, "declare now")?;
            }
            if let Some(d) = decl {
                write_declaration(out, &hand, &d)?;
            }
        }
        if args.metric.wants_dist() {
            let r = ws
                .min_dist(&hand, &w, &cfg, DEFAULT_MAXDIST)
                .expect("distance never exceeds the default bound");
            writeln!(out, "min_dist: {}", r.dist)?;
            if r.wasted.is_empty() {
                writeln!(out, "wasted: none")?;
            } else {
                writeln!(out, "wasted: {}", format_hand(&r.wasted))?;
            }
            if args.declare {
                write_declaration(out, &hand, &r.declaration)?;
            }
        }
    } else {
        if args.metric.wants_score() {
            let best = ws.best_discard_minscore(&hand, &w, &cfg);
            writeln!(
                out,
                "best_discard (min_score): {} -> {}",
                format_card(best.card),
                best.score
            )?;
            if best.score == 0 {
                writeln!(out, "declare now: discard {}", format_card(best.card))?;
            }
            if args.declare {
                let kept: Vec<Card> = (0..hand.len())
                    .filter(|&i| i != best.index)
                    .map(|i| hand[i])
                    .collect();
                let (_, decl) = ws.min_score(&kept, &w, &cfg);
                if let Some(d) = decl {
                    writeln!(out, "after discarding {}:", format_card(best.card))?;
                    write_declaration(out, &kept, &d)?;
                }
            }
        }
        if args.metric.wants_dist() {
            let best = ws
                .best_discard_mindist(&hand, &w, &cfg, DEFAULT_MAXDIST)
                .expect("distance never exceeds the default bound");
            writeln!(
                out,
                "best_discard (min_dist): {} -> {}",
                format_card(best.card),
                best.dist
            )?;
            if best.wasted_ranked.is_empty() {
                writeln!(out, "wasted: none")?;
            } else {
                writeln!(out, "wasted: {}", format_hand(&best.wasted_ranked))?;
            }
        }
    }
    Ok(())
}

thread_local! {
    static WORKSPACE: RefCell<Workspace> = RefCell::new(Workspace::new());
}

/// Deal the first seat of a fresh game. The rare all-joker deck tail cannot
/// seed a wildcard; the next seed stands in deterministically.
fn deal_hand(deck: &DeckSpec, seed: u64) -> (Vec<Card>, WildcardSpec) {
    let mut s = seed;
    loop {
        match GameState::new(deck, s) {
            Ok(g) => return (g.hand(0).to_vec(), *g.wcj()),
            Err(_) => s = s.wrapping_add(0x9E37_79B9_7F4A_7C15),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleArgs {
    pub n: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub deck: DeckSpec,
}

/// Distribution summary returned for programmatic checks.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    /// Count per clipped score 0..=80.
    pub score_hist: Vec<usize>,
    pub score_mode: u32,
    /// Count per distance 0..=9.
    pub dist_hist: Vec<usize>,
    pub dist_share_2_to_4: f64,
    pub dist_max: u32,
}

/// Sample seeded random deals, write the per-hand metric CSV, and print
/// binned histogram summaries.
pub fn cmd_sample_hands(args: &SampleArgs, out: &mut impl Write) -> CliResult<SampleStats> {
    if args.n == 0 {
        return Err(usage("need n >= 1"));
    }
    let cfg = SolverConfig::default();
    let rows: Vec<(u64, u32, u32, u32)> = (0..args.n)
        .into_par_iter()
        .map(|i| {
            let seed = args.seed.wrapping_add(i as u64);
            let (hand, w) = deal_hand(&args.deck, seed);
            WORKSPACE.with(|ws| {
                let mut ws = ws.borrow_mut();
                let (clipped, _) = ws.min_score(&hand, &w, &cfg);
                let raw = ws.min_score_unclipped(&hand, &w, &cfg);
                let dist = ws
                    .min_dist(&hand, &w, &cfg, DEFAULT_MAXDIST)
                    .expect("distance never exceeds the default bound")
                    .dist;
                (seed, clipped, raw, dist)
            })
        })
        .collect();

    let mut csv = String::new();
    csv.push_str("schema_version,seed,minscore_clipped,minscore_unclipped,mindist\n");
    for (seed, clipped, raw, dist) in &rows {
        csv.push_str(&format!("{CSV_SCHEMA_VERSION},{seed},{clipped},{raw},{dist}\n"));
    }
    fs::write(&args.out, csv)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", args.out.display())))?;

    let mut score_hist = vec![0usize; 81];
    let mut dist_hist = vec![0usize; 10];
    for &(_, clipped, _, dist) in &rows {
        score_hist[clipped as usize] += 1;
        dist_hist[dist as usize] += 1;
    }
    let score_mode = (0..=80u32).max_by_key(|&s| (score_hist[s as usize], s)).unwrap();
    let in_range: usize = dist_hist[2..=4].iter().sum();
    let share = in_range as f64 / args.n as f64;
    let dist_max = (0..=9u32).filter(|&d| dist_hist[d as usize] > 0).max().unwrap_or(0);

    writeln!(out, "hands: {}", args.n)?;
    writeln!(out, "rows: {}", args.out.display())?;
    writeln!(out, "clipped min_score mode: {score_mode}")?;
    writeln!(out, "clipped min_score histogram (bins of 10):")?;
    for lo in (0..=80).step_by(10) {
        let hi = (lo + 9).min(80);
        let count: usize = score_hist[lo..=hi].iter().sum();
        writeln!(out, "  {lo:>2}-{hi:>2}: {count}")?;
    }
    writeln!(out, "min_dist histogram:")?;
    for d in 0..=9 {
        if dist_hist[d] > 0 {
            writeln!(out, "  {d}: {}", dist_hist[d])?;
        }
    }
    writeln!(out, "min_dist share in 2..4: {:.1}%", share * 100.0)?;
    if dist_max > 6 {
        let over: usize = dist_hist[7..].iter().sum();
        writeln!(out, "warning: {over} hands exceed distance 6 (max {dist_max})")?;
    }

    Ok(SampleStats {
        n: args.n,
        score_hist,
        score_mode,
        dist_hist,
        dist_share_2_to_4: share,
        dist_max,
    })
}

/// Structured run configuration; command-line flags override file fields.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub profiles: Option<Vec<ProfileSpec>>,
    #[serde(default)]
    pub n_games: Option<usize>,
    #[serde(default)]
    pub base_seed: Option<u64>,
    #[serde(default)]
    pub records: Option<PathBuf>,
    #[serde(default)]
    pub matrix: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub profile: String,
    #[serde(default)]
    pub drop_enabled: Option<bool>,
    #[serde(default)]
    pub drop_threshold: Option<u32>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ProfileSpec {
    pub fn named(name: &str) -> ProfileSpec {
        ProfileSpec { profile: name.into(), drop_enabled: None, drop_threshold: None, seed: None }
    }

    pub fn agent_config(&self) -> CliResult<AgentConfig> {
        let profile = Profile::from_name(&self.profile).ok_or_else(|| {
            let valid: Vec<&str> = ALL_PROFILES.iter().map(|p| p.name()).collect();
            usage(format!("unknown profile '{}' (valid: {})", self.profile, valid.join(", ")))
        })?;
        let mut cfg = AgentConfig::new(profile, self.seed.unwrap_or(0));
        if let Some(d) = self.drop_enabled {
            cfg.drop_enabled = d;
        }
        if let Some(t) = self.drop_threshold {
            cfg.drop_threshold = t;
        }
        Ok(cfg)
    }
}

pub fn load_run_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("bad config {}: {e}", path.display())))
}

#[derive(Clone, Debug, Default)]
pub struct TournamentArgs {
    pub config: Option<PathBuf>,
    /// Comma-separated profile names; overrides the config file list.
    pub profiles: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub records: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
}

struct ResolvedTournament {
    configs: Vec<AgentConfig>,
    names: Vec<String>,
    n: usize,
    seed: u64,
    records: Option<PathBuf>,
    matrix: Option<PathBuf>,
}

fn resolve_tournament(args: &TournamentArgs) -> CliResult<ResolvedTournament> {
    let file_cfg = match &args.config {
        Some(p) => load_run_config(p)?,
        None => RunConfig::default(),
    };
    let specs: Vec<ProfileSpec> = if let Some(list) = &args.profiles {
        list.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(ProfileSpec::named)
            .collect()
    } else if let Some(file_specs) = file_cfg.profiles {
        file_specs
    } else {
        ALL_PROFILES.iter().map(|p| ProfileSpec::named(p.name())).collect()
    };
    if specs.is_empty() {
        return Err(usage("need at least one profile"));
    }
    let configs: Vec<AgentConfig> =
        specs.iter().map(|s| s.agent_config()).collect::<CliResult<_>>()?;
    let n = args.n.or(file_cfg.n_games).unwrap_or(200);
    if n == 0 {
        return Err(usage("need n >= 1"));
    }
    Ok(ResolvedTournament {
        configs,
        names: specs.iter().map(|s| s.profile.clone()).collect(),
        n,
        seed: args.seed.or(file_cfg.base_seed).unwrap_or(1),
        records: args.records.clone().or(file_cfg.records),
        matrix: args.matrix.clone().or(file_cfg.matrix),
    })
}

fn write_records_jsonl(path: &Path, records: &[MatchRecord]) -> CliResult {
    let mut text = String::new();
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| CliError::Runtime(format!("encoding record: {e}")))?;
        text.push_str(&line);
        text.push('\n');
    }
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

pub const MATRIX_CSV_HEADER: &str = "schema_version,first,second,n,win_rate,mean_gain,\
median_gain,mean_rounds,a_first,p_star,se,significant";

fn write_matrix_csv(path: &Path, cells: &[MatrixCell]) -> CliResult {
    let mut text = String::from(MATRIX_CSV_HEADER);
    text.push('\n');
    for c in cells {
        text.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
            CSV_SCHEMA_VERSION,
            c.first,
            c.second,
            c.n,
            c.win_rate,
            c.mean_gain,
            c.median_gain,
            c.mean_rounds,
            c.a_first,
            c.p_star,
            c.se,
            c.significant
        ));
    }
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

/// Run every ordered profile pair, emit records and the matrix CSV, and print
/// the first-mover/skill decomposition.
pub fn cmd_tournament(args: &TournamentArgs, out: &mut impl Write) -> CliResult<MatrixReport> {
    let resolved = resolve_tournament(args)?;
    writeln!(
        out,
        "{} profiles, {} games per ordered pair, base seed {}",
        resolved.names.len(),
        resolved.n,
        resolved.seed
    )?;
    let report = run_matrix(&resolved.configs, resolved.n, resolved.seed);
    if let Some(p) = &resolved.records {
        write_records_jsonl(p, &report.records)?;
        writeln!(out, "records: {}", p.display())?;
    }
    if let Some(p) = &resolved.matrix {
        write_matrix_csv(p, &report.cells)?;
        writeln!(out, "matrix: {}", p.display())?;
    }

    let skill = &report.skill;
    let k = skill.profiles.len();
    let width = skill.profiles.iter().map(|p| p.len()).max().unwrap_or(0).max(8);
    writeln!(out, "first-seat win rates (row plays first):")?;
    write!(out, "{:>width$}", "")?;
    for name in &skill.profiles {
        write!(out, " {name:>width$}")?;
    }
    writeln!(out)?;
    for i in 0..k {
        write!(out, "{:>width$}", skill.profiles[i])?;
        for j in 0..k {
            write!(out, " {:>width$.3}", skill.p_hat[i][j])?;
        }
        writeln!(out)?;
    }
    writeln!(out, "first-mover advantage a (from self-play):")?;
    for i in 0..k {
        writeln!(out, "  {:>width$}: {:+.3}", skill.profiles[i], skill.advantage[i])?;
    }
    writeln!(out, "adjusted skill p* (advantage removed):")?;
    write!(out, "{:>width$}", "")?;
    for name in &skill.profiles {
        write!(out, " {name:>width$}")?;
    }
    writeln!(out)?;
    for i in 0..k {
        write!(out, "{:>width$}", skill.profiles[i])?;
        for j in 0..k {
            write!(out, " {:>width$.3}", skill.p_star[i][j])?;
        }
        writeln!(out)?;
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct AssistArgs {
    /// Drop when the hand's distance is at least this, on a first turn.
    pub drop_threshold: u32,
    pub req: Option<String>,
}

fn assist_readout(
    ws: &mut Workspace,
    cfg: &SolverConfig,
    hand: &[Card],
    w: &WildcardSpec,
    threshold: u32,
    out: &mut impl Write,
) -> std::io::Result<()> {
    match hand.len() {
        13 => {
            let (score, _) = ws.min_score(hand, w, cfg);
            let r = ws
                .min_dist(hand, w, cfg, DEFAULT_MAXDIST)
                .expect("distance never exceeds the default bound");
            writeln!(out, "min_score: {score}")?;
            if r.wasted.is_empty() {
                writeln!(out, "min_dist: {} (wasted: none)", r.dist)?;
            } else {
                writeln!(out, "min_dist: {} (wasted: {})", r.dist, format_hand(&r.wasted))?;
            }
            if score == 0 {
                writeln!(out, "declare now")?;
            } else if r.dist >= threshold {
                writeln!(
                    out,
                    "drop: recommended on a first turn (min_dist {} >= threshold {})",
                    r.dist, threshold
                )?;
            } else {
                writeln!(
                    out,
                    "drop: hold (min_dist {} < threshold {})",
                    r.dist, threshold
                )?;
            }
        }
        14 => {
            let best_s = ws.best_discard_minscore(hand, w, cfg);
            writeln!(
                out,
                "best_discard (min_score): {} -> {}",
                format_card(best_s.card),
                best_s.score
            )?;
            let best_d = ws
                .best_discard_mindist(hand, w, cfg, DEFAULT_MAXDIST)
                .expect("distance never exceeds the default bound");
            writeln!(
                out,
                "best_discard (min_dist): {} -> {}",
                format_card(best_d.card),
                best_d.dist
            )?;
            if best_s.score == 0 {
                writeln!(out, "declare now: discard {}", format_card(best_s.card))?;
            }
        }
        _ => writeln!(out, "hand has {} cards; enter 13", hand.len())?,
    }
    Ok(())
}

/// Interactive loop: `hand <13 cards>`, `wcj <card>`, `draw <card>`,
/// `discard <card>`, `show`, `quit`. Malformed lines report an error and
/// re-prompt; the session state survives.
pub fn cmd_assist(
    input: &mut impl BufRead,
    out: &mut impl Write,
    args: &AssistArgs,
) -> CliResult {
    let cfg = solver_config(&args.req)?;
    let mut ws = Workspace::new();
    let mut hand: Vec<Card> = Vec::new();
    let mut wcj: Option<WildcardSpec> = None;

    writeln!(
        out,
        "assist: commands are `hand <13 cards>`, `wcj <card>`, `draw <card>`, \
         `discard <card>`, `show`, `quit`"
    )?;
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let trimmed = line.trim();
        let (cmd, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((c, r)) => (c, r.trim()),
            None => (trimmed, ""),
        };
        let mut changed = false;
        match cmd {
            "" => continue,
            "quit" | "exit" => return Ok(()),
            "hand" => match parse_hand_arg(rest, &[13]) {
                Ok(h) => {
                    hand = h;
                    changed = true;
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "wcj" => match parse_wcj_arg(rest) {
                Ok(w) => {
                    wcj = Some(w);
                    changed = true;
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "draw" => {
                if hand.len() != 13 {
                    writeln!(out, "error: need a 13-card hand before drawing")?;
                } else {
                    match parse_card(rest) {
                        Ok(c) => {
                            hand.push(c);
                            changed = true;
                        }
                        Err(e) => writeln!(out, "error: bad card: {e}")?,
                    }
                }
            }
            "discard" => match parse_card(rest) {
                Ok(c) => match hand.iter().position(|&h| h == c) {
                    Some(at) if hand.len() == 14 => {
                        hand.remove(at);
                        changed = true;
                    }
                    Some(_) => writeln!(out, "error: nothing drawn yet")?,
                    None => writeln!(out, "error: {} is not in the hand", format_card(c))?,
                },
                Err(e) => writeln!(out, "error: bad card: {e}")?,
            },
            "show" => changed = true,
            other => writeln!(out, "error: unknown command '{other}'")?,
        }
        if changed {
            match (&wcj, hand.is_empty()) {
                (Some(w), false) => {
                    assist_readout(&mut ws, &cfg, &hand, w, args.drop_threshold, out)?
                }
                (None, false) => writeln!(out, "wildcard not set; use `wcj <card>`")?,
                (Some(_), true) => writeln!(out, "hand not set; use `hand <13 cards>`")?,
                (None, true) => writeln!(out, "hand and wildcard not set")?,
            }
        }
    }
}
