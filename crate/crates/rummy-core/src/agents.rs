//! The six bundled decision policies behind one `Agent` type.
//!
//! Policies see only public information (their hand, the pile top, the event
//! history) and the engine-computed legal actions. Every policy declares as
//! soon as a Declare action is offered, and drop rules apply only on a seat's
//! first draw-phase turn.

use crate::cards::{card_value, Card, WildcardSpec};
use crate::game::{Action, EventKind, PublicEvent};
use crate::meld::enumerate_melds;
use crate::solver::{SolverConfig, Workspace, DEFAULT_MAXDIST};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Random,
    DefeatSeeking,
    MinScore,
    MinDist,
    MinDistScore,
    MinDistOpp,
}

pub const ALL_PROFILES: [Profile; 6] = [
    Profile::Random,
    Profile::DefeatSeeking,
    Profile::MinScore,
    Profile::MinDist,
    Profile::MinDistScore,
    Profile::MinDistOpp,
];

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Random => "random",
            Profile::DefeatSeeking => "defeat_seeking",
            Profile::MinScore => "minscore",
            Profile::MinDist => "mindist",
            Profile::MinDistScore => "mindist_score",
            Profile::MinDistOpp => "mindist_opp",
        }
    }

    pub fn from_name(s: &str) -> Option<Profile> {
        ALL_PROFILES.iter().copied().find(|p| p.name() == s)
    }

    pub fn uses_mindist(self) -> bool {
        matches!(self, Profile::MinDist | Profile::MinDistScore | Profile::MinDistOpp)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AgentConfig {
    pub profile: Profile,
    pub drop_enabled: bool,
    /// MinScore compares its hand score, the MinDist family its distance,
    /// against this on the first turn.
    pub drop_threshold: u32,
    pub seed: u64,
}

impl AgentConfig {
    pub fn new(profile: Profile, seed: u64) -> AgentConfig {
        let drop_threshold = if profile.uses_mindist() { 3 } else { 80 };
        AgentConfig { profile, drop_enabled: false, drop_threshold, seed }
    }
}

/// What a seat is allowed to see when choosing an action.
pub struct Observation<'a> {
    pub seat: usize,
    pub hand: &'a [Card],
    pub pile_top: Option<Card>,
    pub wcj: &'a WildcardSpec,
    pub round: u32,
    pub first_draw_turn: bool,
    pub history: &'a [PublicEvent],
    pub legal: &'a [Action],
}

/// Cards the opponent has publicly taken from the pile or discarded.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct OpponentModel {
    pub picked_from_pile: Vec<Card>,
    pub discarded: Vec<Card>,
}

impl OpponentModel {
    pub fn update(&mut self, event: &PublicEvent) {
        match event.kind {
            EventKind::TookPile(c) => self.picked_from_pile.push(c),
            EventKind::Discarded(c) => self.discarded.push(c),
            _ => {}
        }
    }

    pub fn from_history(history: &[PublicEvent], me: usize) -> OpponentModel {
        let mut model = OpponentModel::default();
        for e in history.iter().filter(|e| e.actor != me) {
            model.update(e);
        }
        model
    }
}

/// True iff the two cards could sit in one 3-card meld: same rank in
/// different suits, or same suit within sequence reach (rank distance at
/// most 2, ace counting as 1 or 14). Jokers fit anything, so they are out of
/// scope here.
pub fn meld_compatible(a: Card, b: Card) -> bool {
    let (Card::Natural { rank: ra, suit: sa }, Card::Natural { rank: rb, suit: sb }) = (a, b)
    else {
        return false;
    };
    if a == b {
        return false;
    }
    if ra == rb {
        return sa != sb;
    }
    if sa != sb {
        return false;
    }
    let spans = |r: u8| if r == 1 { vec![1u8, 14] } else { vec![r] };
    spans(ra)
        .iter()
        .any(|&x| spans(rb).iter().any(|&y| x.abs_diff(y) <= 2))
}

pub struct Agent {
    pub cfg: AgentConfig,
    solver_cfg: SolverConfig,
    rng: ChaCha8Rng,
}

fn is_draw(a: &Action) -> bool {
    matches!(a, Action::DrawDeck | Action::DrawPile)
}

impl Agent {
    pub fn new(cfg: AgentConfig) -> Agent {
        Agent {
            cfg,
            solver_cfg: SolverConfig::default(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        }
    }

    pub fn act(&mut self, obs: &Observation, ws: &mut Workspace) -> Action {
        if obs.legal.iter().any(is_draw) {
            self.draw_or_drop(obs, ws)
        } else {
            // Declaring is always right: the winner scores 0.
            if let Some(d) = obs.legal.iter().find(|a| matches!(a, Action::Declare { .. })) {
                return d.clone();
            }
            self.discard(obs, ws)
        }
    }

    fn can(obs: &Observation, want: &Action) -> bool {
        obs.legal.contains(want)
    }

    /// Picks whichever of deck/pile the policy asked for, falling back to the
    /// other when the deck is gone.
    fn draw(obs: &Observation, deck: bool) -> Action {
        if deck && Agent::can(obs, &Action::DrawDeck) {
            Action::DrawDeck
        } else if !deck && Agent::can(obs, &Action::DrawPile) {
            Action::DrawPile
        } else if Agent::can(obs, &Action::DrawDeck) {
            Action::DrawDeck
        } else {
            Action::DrawPile
        }
    }

    fn drop_now(&self, obs: &Observation, ws: &mut Workspace) -> bool {
        if !self.cfg.drop_enabled || !obs.first_draw_turn || !Agent::can(obs, &Action::Drop) {
            return false;
        }
        match self.cfg.profile {
            Profile::Random => false,
            // Folding immediately is the fastest way to lose.
            Profile::DefeatSeeking => true,
            Profile::MinScore => {
                ws.min_score(obs.hand, obs.wcj, &self.solver_cfg).0 >= self.cfg.drop_threshold
            }
            _ => {
                let dist = ws
                    .min_dist(obs.hand, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .map_or(u32::MAX, |r| r.dist);
                dist >= self.cfg.drop_threshold
            }
        }
    }

    fn draw_or_drop(&mut self, obs: &Observation, ws: &mut Workspace) -> Action {
        if self.drop_now(obs, ws) {
            return Action::Drop;
        }
        match self.cfg.profile {
            Profile::Random => {
                let mut choices: Vec<&Action> = obs.legal.iter().filter(|a| is_draw(a)).collect();
                if self.cfg.drop_enabled {
                    choices.extend(obs.legal.iter().filter(|a| matches!(a, Action::Drop)));
                }
                choices[self.rng.gen_range(0..choices.len())].clone()
            }
            Profile::DefeatSeeking => {
                let pile = obs.pile_top.expect("pile nonempty in draw phase");
                let mut with = obs.hand.to_vec();
                with.push(pile);
                let melds = enumerate_melds(&with, obs.wcj, false);
                let pile_melds = melds.iter().any(|m| m.mask & (1 << 13) != 0);
                Agent::draw(obs, pile_melds)
            }
            Profile::MinScore => {
                let pile = obs.pile_top.expect("pile nonempty in draw phase");
                let mut with = obs.hand.to_vec();
                with.push(pile);
                let best = ws.best_discard_minscore(&with, obs.wcj, &self.solver_cfg);
                Agent::draw(obs, !best.used_pile_card)
            }
            _ => {
                let pile = obs.pile_top.expect("pile nonempty in draw phase");
                let current = ws
                    .min_dist(obs.hand, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .map_or(u32::MAX, |r| r.dist);
                let mut with = obs.hand.to_vec();
                with.push(pile);
                let with_pile = ws
                    .analyze_discards_mindist(&with, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .map_or(u32::MAX, |a| a.best_dist);
                Agent::draw(obs, with_pile >= current)
            }
        }
    }

    fn discard(&mut self, obs: &Observation, ws: &mut Workspace) -> Action {
        let hand = obs.hand;
        debug_assert_eq!(hand.len(), 14);
        let card = match self.cfg.profile {
            Profile::Random => hand[self.rng.gen_range(0..hand.len())],
            Profile::DefeatSeeking => {
                let melds = enumerate_melds(hand, obs.wcj, false);
                let pool: Vec<usize> = match melds.first() {
                    // Break the first meld at its cheapest card.
                    Some(m) => (0..hand.len()).filter(|&i| m.mask & (1 << i) != 0).collect(),
                    // No meld to break: keep the expensive cards.
                    None => (0..hand.len()).collect(),
                };
                let i = pool
                    .iter()
                    .copied()
                    .min_by_key(|&i| (card_value(hand[i], obs.wcj), i))
                    .unwrap();
                hand[i]
            }
            Profile::MinScore => ws.best_discard_minscore(hand, obs.wcj, &self.solver_cfg).card,
            Profile::MinDist => {
                ws.best_discard_mindist(hand, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .expect("13-card distance is at most 9")
                    .card
            }
            Profile::MinDistScore => {
                let analysis = ws
                    .analyze_discards_mindist(hand, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .expect("13-card distance is at most 9");
                let mut best: Option<(u32, usize)> = None;
                for &c in &analysis.candidates {
                    let mut kept = hand.to_vec();
                    kept.remove(c);
                    let s = ws.min_score(&kept, obs.wcj, &self.solver_cfg).0;
                    let better = match best {
                        None => true,
                        Some((bs, bi)) => {
                            s < bs
                                || (s == bs
                                    && card_value(hand[c], obs.wcj)
                                        > card_value(hand[bi], obs.wcj))
                        }
                    };
                    if better {
                        best = Some((s, c));
                    }
                }
                hand[best.unwrap().1]
            }
            Profile::MinDistOpp => {
                let pre_dist = ws
                    .min_dist(&hand[..13], obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .map_or(u32::MAX, |r| r.dist);
                let analysis = ws
                    .analyze_discards_mindist(hand, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                    .expect("13-card distance is at most 9");
                if analysis.best_dist < pre_dist {
                    ws.best_discard_mindist(hand, obs.wcj, &self.solver_cfg, DEFAULT_MAXDIST)
                        .unwrap()
                        .card
                } else {
                    let model = OpponentModel::from_history(obs.history, obs.seat);
                    let i = mindist_opp_choice(&analysis.candidates, hand, obs.wcj, &model);
                    hand[i]
                }
            }
        };
        Action::Discard(card)
    }
}

/// Stalled-hand discard choice: avoid feeding opponent pile-picks, prefer
/// shadowing opponent discards, then shed value.
fn mindist_opp_choice(
    candidates: &[usize],
    hand: &[Card],
    wcj: &WildcardSpec,
    model: &OpponentModel,
) -> usize {
    let feeds = |i: usize| {
        model.picked_from_pile.iter().any(|&p| meld_compatible(hand[i], p))
    };
    let shadows = |i: usize| model.discarded.iter().any(|&d| meld_compatible(hand[i], d));
    let safe: Vec<usize> = candidates.iter().copied().filter(|&i| !feeds(i)).collect();
    let pool: &[usize] = if safe.is_empty() { candidates } else { &safe };
    let shadowed: Vec<usize> = pool.iter().copied().filter(|&i| shadows(i)).collect();
    let pool: &[usize] = if shadowed.is_empty() { pool } else { &shadowed };
    pool.iter()
        .copied()
        .min_by_key(|&i| (std::cmp::Reverse(card_value(hand[i], wcj)), i))
        .unwrap()
}
