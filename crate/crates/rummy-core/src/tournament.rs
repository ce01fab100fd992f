//! Seeded pairwise series, aggregation, and the first-mover decomposition
//! with its normal-approximation significance test.
//!
//! Seed scheme: game `g` of a series uses `base_seed + g` (wrapping); the
//! engine deal and each seat's agent derive their own streams from that via
//! splitmix64 with fixed salts, so any single game replays in isolation.

use crate::agents::{Agent, AgentConfig, Observation};
use crate::cards::DeckSpec;
use crate::game::{GameState, Outcome, Phase, PublicEvent, Termination};
use crate::solver::Workspace;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use thiserror::Error;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const ENGINE_SALT: u64 = 0x6761_6D65_5F64_6561; // "game_dea"
const SEAT_SALT: [u64; 2] = [0x7365_6174_5F30_3030, 0x7365_6174_5F31_3131];

/// One line of the JSONL record file.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MatchRecord {
    pub v: u32,
    pub first: String,
    pub second: String,
    pub seed: u64,
    pub winner: usize,
    pub gain: i32,
    pub rounds: u32,
    pub termination: Termination,
}

pub const RECORD_VERSION: u32 = 1;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GamePlayed {
    pub outcome: Outcome,
    pub history: Vec<PublicEvent>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
pub enum StatsError {
    #[error("no records to summarize")]
    Empty,
}

/// Play one full game, calling `inspect` after construction and after every
/// applied action.
pub fn play_game_with<F: FnMut(&GameState)>(
    first: &AgentConfig,
    second: &AgentConfig,
    game_seed: u64,
    ws: &mut Workspace,
    mut inspect: F,
) -> GamePlayed {
    let mut agents = [
        Agent::new(AgentConfig { seed: splitmix64(game_seed ^ SEAT_SALT[0]), ..*first }),
        Agent::new(AgentConfig { seed: splitmix64(game_seed ^ SEAT_SALT[1]), ..*second }),
    ];
    let mut state = GameState::new(&DeckSpec::default(), splitmix64(game_seed ^ ENGINE_SALT))
        .expect("default deck seats a two-player deal");
    inspect(&state);
    while state.phase() != Phase::Terminal {
        let seat = state.turn();
        let legal = state.legal_actions(ws);
        let action = {
            let obs = Observation {
                seat,
                hand: state.hand(seat),
                pile_top: state.pile_top(),
                wcj: state.wcj(),
                round: state.round(),
                first_draw_turn: state.is_first_draw_turn(seat),
                history: state.history(),
                legal: &legal,
            };
            agents[seat].act(&obs, ws)
        };
        state.apply_action(&action, ws).expect("agent action is legal");
        inspect(&state);
    }
    GamePlayed { outcome: *state.outcome().unwrap(), history: state.history().to_vec() }
}

pub fn play_game(
    first: &AgentConfig,
    second: &AgentConfig,
    game_seed: u64,
    ws: &mut Workspace,
) -> GamePlayed {
    play_game_with(first, second, game_seed, ws, |_| {})
}

thread_local! {
    static WORKSPACE: RefCell<Workspace> = RefCell::new(Workspace::new());
}

/// n seeded games in parallel; records come back in game order.
pub fn run_series(
    first: &AgentConfig,
    second: &AgentConfig,
    n: usize,
    base_seed: u64,
) -> Vec<MatchRecord> {
    (0..n)
        .into_par_iter()
        .map(|g| {
            let seed = base_seed.wrapping_add(g as u64);
            let played = WORKSPACE
                .with(|ws| play_game(first, second, seed, &mut ws.borrow_mut()));
            let o = played.outcome;
            MatchRecord {
                v: RECORD_VERSION,
                first: first.profile.name().into(),
                second: second.profile.name().into(),
                seed,
                winner: o.winner,
                gain: o.gain,
                rounds: o.rounds,
                termination: o.termination,
            }
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct SeriesSummary {
    pub n_games: usize,
    pub win_rate_first: f64,
    pub mean_gain: f64,
    pub median_gain: f64,
    pub mean_rounds: f64,
}

pub fn summarize(records: &[MatchRecord]) -> Result<SeriesSummary, StatsError> {
    if records.is_empty() {
        return Err(StatsError::Empty);
    }
    let n = records.len();
    let wins = records.iter().filter(|r| r.winner == 0).count();
    let mut gains: Vec<i32> = records.iter().map(|r| r.gain).collect();
    gains.sort_unstable();
    let median_gain = if n % 2 == 1 {
        gains[n / 2] as f64
    } else {
        (gains[n / 2 - 1] + gains[n / 2]) as f64 / 2.0
    };
    Ok(SeriesSummary {
        n_games: n,
        win_rate_first: wins as f64 / n as f64,
        mean_gain: gains.iter().map(|&g| g as f64).sum::<f64>() / n as f64,
        median_gain,
        mean_rounds: records.iter().map(|r| r.rounds as f64).sum::<f64>() / n as f64,
    })
}

/// Self-play first-seat edge over a fair coin.
pub fn first_mover_advantage(self_play_rate: f64) -> f64 {
    self_play_rate - 0.5
}

/// Win rate with the first seat's edge removed.
pub fn adjusted_skill(p_hat: f64, a: f64) -> f64 {
    (p_hat - a).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ProportionTest {
    pub se: f64,
    pub ci: (f64, f64),
    pub significant: bool,
}

/// Two-decimal rounding, matching the reported interval convention.
fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Acklam's rational approximation to the standard normal quantile.
fn inverse_normal(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile outside (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal(1.0 - p)
    }
}

/// Normal-approximation test of H0: p = p0 against a two-decimal interval.
pub fn proportion_test(p_hat: f64, n: usize, p0: f64, alpha: f64) -> ProportionTest {
    assert!(n >= 30, "normal approximation needs n >= 30");
    let se = (p0 * (1.0 - p0) / n as f64).sqrt();
    let z = inverse_normal(1.0 - alpha / 2.0);
    let hw = round2(z * se);
    let ci = (p0 - hw, p0 + hw);
    ProportionTest { se, ci, significant: p_hat < ci.0 || p_hat > ci.1 }
}

/// Raw win rates decomposed into per-profile first-mover advantages and
/// seat-adjusted skill.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct SkillMatrix {
    pub profiles: Vec<String>,
    /// p_hat[i][j]: first-seat win rate of profile i against profile j.
    pub p_hat: Vec<Vec<f64>>,
    pub advantage: Vec<f64>,
    pub p_star: Vec<Vec<f64>>,
}

pub fn decompose(profiles: Vec<String>, p_hat: Vec<Vec<f64>>) -> SkillMatrix {
    let k = profiles.len();
    assert!(p_hat.len() == k && p_hat.iter().all(|r| r.len() == k));
    let advantage: Vec<f64> = (0..k).map(|i| first_mover_advantage(p_hat[i][i])).collect();
    let p_star = (0..k)
        .map(|i| (0..k).map(|j| adjusted_skill(p_hat[i][j], advantage[i])).collect())
        .collect();
    SkillMatrix { profiles, p_hat, advantage, p_star }
}

/// One ordered-pair row of the matrix report.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct MatrixCell {
    pub first: String,
    pub second: String,
    pub n: usize,
    pub win_rate: f64,
    pub mean_gain: f64,
    pub median_gain: f64,
    pub mean_rounds: f64,
    pub a_first: f64,
    pub p_star: f64,
    pub se: f64,
    pub significant: bool,
}

#[derive(Clone, Debug)]
pub struct MatrixReport {
    pub cells: Vec<MatrixCell>,
    pub skill: SkillMatrix,
    pub records: Vec<MatchRecord>,
}

/// Run every ordered pair (self-play included) at n games each. Pair (i, j)
/// takes the seed block starting at `base_seed + (i*k + j)*n`.
pub fn run_matrix(configs: &[AgentConfig], n: usize, base_seed: u64) -> MatrixReport {
    let k = configs.len();
    let mut series: Vec<Vec<MatchRecord>> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let block = base_seed.wrapping_add(((i * k + j) * n) as u64);
            series.push(run_series(&configs[i], &configs[j], n, block));
        }
    }
    let summaries: Vec<SeriesSummary> =
        series.iter().map(|r| summarize(r).expect("n >= 1")).collect();
    let p_hat: Vec<Vec<f64>> =
        (0..k).map(|i| (0..k).map(|j| summaries[i * k + j].win_rate_first).collect()).collect();
    let names: Vec<String> = configs.iter().map(|c| c.profile.name().to_string()).collect();
    let skill = decompose(names.clone(), p_hat);
    let mut cells = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let s = &summaries[i * k + j];
            let test = proportion_test(skill.p_star[i][j], n.max(30), 0.5, 0.05);
            cells.push(MatrixCell {
                first: names[i].clone(),
                second: names[j].clone(),
                n,
                win_rate: s.win_rate_first,
                mean_gain: s.mean_gain,
                median_gain: s.median_gain,
                mean_rounds: s.mean_rounds,
                a_first: skill.advantage[i],
                p_star: skill.p_star[i][j],
                se: test.se,
                significant: test.significant,
            });
        }
    }
    MatrixReport { cells, skill, records: series.into_iter().flatten().collect() }
}
