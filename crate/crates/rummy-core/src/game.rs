//! Authoritative two-player round engine: deal, alternating draw/discard
//! turns, declaration validation, drop scoring, the 100-round cap with its
//! suit tie-break, and signed gains.

use crate::cards::{build_deck, card_value, Card, DeckSpec, Suit, WildcardSpec};
use crate::solver::{Declaration, SolverConfig, Workspace};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const ROUND_CAP: u32 = 100;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Phase {
    AwaitDrawOrDrop,
    AwaitDiscardOrDeclare,
    Terminal,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EventKind {
    TookPile(Card),
    TookDeck,
    Discarded(Card),
    Dropped,
    Declared,
}

/// One trace row; everything here is visible to both players.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PublicEvent {
    pub actor: usize,
    pub kind: EventKind,
    pub round: u32,
}

#[derive(Serialize, Deserialize)]
struct EventRow {
    actor: usize,
    kind: String,
    card: Option<Card>,
    round: u32,
}

impl Serialize for PublicEvent {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let (kind, card) = match self.kind {
            EventKind::TookPile(c) => ("took_pile", Some(c)),
            EventKind::TookDeck => ("took_deck", None),
            EventKind::Discarded(c) => ("discarded", Some(c)),
            EventKind::Dropped => ("dropped", None),
            EventKind::Declared => ("declared", None),
        };
        EventRow { actor: self.actor, kind: kind.into(), card, round: self.round }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PublicEvent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let row = EventRow::deserialize(de)?;
        let need = |c: Option<Card>| c.ok_or_else(|| D::Error::custom("event kind needs a card"));
        let kind = match row.kind.as_str() {
            "took_pile" => EventKind::TookPile(need(row.card)?),
            "took_deck" => EventKind::TookDeck,
            "discarded" => EventKind::Discarded(need(row.card)?),
            "dropped" => EventKind::Dropped,
            "declared" => EventKind::Declared,
            other => return Err(D::Error::custom(format!("unknown event kind {other}"))),
        };
        Ok(PublicEvent { actor: row.actor, kind, round: row.round })
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Action {
    DrawDeck,
    DrawPile,
    Discard(Card),
    /// Discard and declare the remaining 13 in one move. The declaration is
    /// carried for the record; validity is judged on the kept cards alone.
    Declare {
        discard: Card,
        declaration: Declaration,
    },
    Drop,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ValidDeclare,
    Drop,
    RoundCap,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Outcome {
    pub winner: usize,
    pub scores: [u32; 2],
    /// Signed for seat 0; the game is zero-sum so seat 1 gets the negation.
    pub gain: i32,
    pub rounds: u32,
    pub termination: Termination,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum EngineError {
    #[error("deck of {0} cards cannot seat two 13-card hands plus wildcard and pile starter")]
    DeckTooSmall(usize),
    #[error("no natural card available for the wildcard indicator")]
    NoNaturalIndicator,
    #[error("illegal action: {0}")]
    IllegalAction(&'static str),
    #[error("game is over")]
    GameOver,
}

pub struct GameState {
    hands: [Vec<Card>; 2],
    closed_deck: Vec<Card>,
    /// Top of the pile is the last element.
    open_pile: Vec<Card>,
    wcj: WildcardSpec,
    round: u32,
    turn: usize,
    phase: Phase,
    history: Vec<PublicEvent>,
    /// Set once a seat has acted in a draw phase; a drop before that costs
    /// 20, afterwards 40.
    acted: [bool; 2],
    outcome: Option<Outcome>,
    reshuffle_rng: ChaCha8Rng,
    solver_cfg: SolverConfig,
}

/// True iff the 13 cards admit a 0-score grouping under default rules.
pub fn validate_declaration(hand: &[Card], wcj: &WildcardSpec, ws: &mut Workspace) -> bool {
    ws.min_score(hand, wcj, &SolverConfig::default()).0 == 0
}

/// Round-cap winner given per-seat scores and per-seat suit point totals
/// indexed [Diamonds, Clubs, Hearts, Spades].
fn round_cap_winner(scores: [u32; 2], suit_points: [[u32; 4]; 2]) -> usize {
    if scores[0] != scores[1] {
        return if scores[0] < scores[1] { 0 } else { 1 };
    }
    for s in 0..4 {
        if suit_points[0][s] != suit_points[1][s] {
            return if suit_points[0][s] > suit_points[1][s] { 0 } else { 1 };
        }
    }
    0
}

const TIE_SUITS: [Suit; 4] = [Suit::Diamonds, Suit::Clubs, Suit::Hearts, Suit::Spades];

impl GameState {
    pub fn new(spec: &DeckSpec, seed: u64) -> Result<GameState, EngineError> {
        let deck = build_deck(spec, seed);
        GameState::from_deck(deck, seed)
    }

    /// Build from an explicit deck order (top of deck = last element).
    pub fn from_deck(mut deck: Vec<Card>, seed: u64) -> Result<GameState, EngineError> {
        if deck.len() < 2 * 13 + 2 {
            return Err(EngineError::DeckTooSmall(deck.len()));
        }
        let mut hands = [Vec::with_capacity(14), Vec::with_capacity(14)];
        for hand in &mut hands {
            for _ in 0..13 {
                hand.push(deck.pop().unwrap());
            }
        }
        // Indicator must be natural: jokers drawn here slide to the bottom.
        let mut wcj = None;
        for _ in 0..deck.len() {
            let c = deck.pop().unwrap();
            if c.is_natural() {
                wcj = Some(WildcardSpec::new(c).unwrap());
                break;
            }
            deck.insert(0, c);
        }
        let wcj = wcj.ok_or(EngineError::NoNaturalIndicator)?;
        let starter = deck.pop().ok_or(EngineError::DeckTooSmall(0))?;
        Ok(GameState {
            hands,
            closed_deck: deck,
            open_pile: vec![starter],
            wcj,
            round: 1,
            turn: 0,
            phase: Phase::AwaitDrawOrDrop,
            history: Vec::new(),
            acted: [false; 2],
            outcome: None,
            // Distinct stream from the deal shuffle.
            reshuffle_rng: ChaCha8Rng::seed_from_u64(seed ^ 0xA076_1D64_78BD_642F),
            solver_cfg: SolverConfig::default(),
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn turn(&self) -> usize {
        self.turn
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn wcj(&self) -> &WildcardSpec {
        &self.wcj
    }

    pub fn hand(&self, seat: usize) -> &[Card] {
        &self.hands[seat]
    }

    pub fn pile_top(&self) -> Option<Card> {
        self.open_pile.last().copied()
    }

    pub fn open_pile(&self) -> &[Card] {
        &self.open_pile
    }

    pub fn closed_deck(&self) -> &[Card] {
        &self.closed_deck
    }

    pub fn history(&self) -> &[PublicEvent] {
        &self.history
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        self.outcome.as_ref()
    }

    /// True until the seat takes its first draw-phase action.
    pub fn is_first_draw_turn(&self, seat: usize) -> bool {
        !self.acted[seat]
    }

    fn can_draw_deck(&self) -> bool {
        !self.closed_deck.is_empty() || self.open_pile.len() >= 2
    }

    pub fn legal_actions(&self, ws: &mut Workspace) -> Vec<Action> {
        let mut actions = Vec::new();
        match self.phase {
            Phase::Terminal => {}
            Phase::AwaitDrawOrDrop => {
                if self.can_draw_deck() {
                    actions.push(Action::DrawDeck);
                }
                if !self.open_pile.is_empty() {
                    actions.push(Action::DrawPile);
                }
                actions.push(Action::Drop);
            }
            Phase::AwaitDiscardOrDeclare => {
                let hand = &self.hands[self.turn];
                let best = ws.best_discard_minscore(hand, &self.wcj, &self.solver_cfg);
                if best.score == 0 {
                    let mut kept = hand.clone();
                    kept.remove(best.index);
                    let cfg = SolverConfig { emit_declaration: true, ..self.solver_cfg.clone() };
                    let (score, decl) = ws.min_score(&kept, &self.wcj, &cfg);
                    debug_assert_eq!(score, 0);
                    actions.push(Action::Declare {
                        discard: best.card,
                        declaration: decl.unwrap(),
                    });
                }
                for &c in hand {
                    actions.push(Action::Discard(c));
                }
            }
        }
        actions
    }

    fn remove_from_hand(&mut self, card: Card) -> Result<(), EngineError> {
        let hand = &mut self.hands[self.turn];
        match hand.iter().position(|&c| c == card) {
            Some(i) => {
                hand.remove(i);
                Ok(())
            }
            None => Err(EngineError::IllegalAction("card not in hand")),
        }
    }

    fn push_event(&mut self, kind: EventKind) {
        self.history.push(PublicEvent { actor: self.turn, kind, round: self.round });
    }

    fn finish(&mut self, winner: usize, scores: [u32; 2], termination: Termination) {
        let diff = scores[1 - winner] - scores[winner];
        let gain = if winner == 0 { diff as i32 } else { -(diff as i32) };
        self.outcome = Some(Outcome { winner, scores, gain, rounds: self.round, termination });
        self.phase = Phase::Terminal;
    }

    fn suit_points(&self, seat: usize) -> [u32; 4] {
        let mut totals = [0u32; 4];
        for &c in &self.hands[seat] {
            if let Some(s) = c.suit() {
                let slot = TIE_SUITS.iter().position(|&t| t == s).unwrap();
                totals[slot] += card_value(c, &self.wcj);
            }
        }
        totals
    }

    fn settle_round_cap(&mut self, ws: &mut Workspace) {
        let scores = [
            ws.min_score(&self.hands[0], &self.wcj, &self.solver_cfg).0,
            ws.min_score(&self.hands[1], &self.wcj, &self.solver_cfg).0,
        ];
        let winner = round_cap_winner(scores, [self.suit_points(0), self.suit_points(1)]);
        self.finish(winner, scores, Termination::RoundCap);
    }

    /// Ends the actor's turn after a discard, advancing seat and round, and
    /// settling by round cap once both seats finish round `ROUND_CAP`.
    fn end_turn(&mut self, ws: &mut Workspace) {
        self.phase = Phase::AwaitDrawOrDrop;
        if self.turn == 0 {
            self.turn = 1;
        } else if self.round == ROUND_CAP {
            self.settle_round_cap(ws);
        } else {
            self.turn = 0;
            self.round += 1;
        }
    }

    pub fn apply_action(&mut self, action: &Action, ws: &mut Workspace) -> Result<(), EngineError> {
        if self.phase == Phase::Terminal {
            return Err(EngineError::GameOver);
        }
        let draw_phase = self.phase == Phase::AwaitDrawOrDrop;
        match *action {
            Action::DrawDeck => {
                if !draw_phase {
                    return Err(EngineError::IllegalAction("draw outside draw phase"));
                }
                if !self.can_draw_deck() {
                    return Err(EngineError::IllegalAction("closed deck exhausted"));
                }
                if self.closed_deck.is_empty() {
                    // Keep the visible top; everything under it becomes the
                    // new closed deck.
                    let top = self.open_pile.pop().unwrap();
                    self.closed_deck.append(&mut self.open_pile);
                    self.closed_deck.shuffle(&mut self.reshuffle_rng);
                    self.open_pile.push(top);
                }
                let c = self.closed_deck.pop().unwrap();
                self.hands[self.turn].push(c);
                self.acted[self.turn] = true;
                self.push_event(EventKind::TookDeck);
                self.phase = Phase::AwaitDiscardOrDeclare;
            }
            Action::DrawPile => {
                if !draw_phase {
                    return Err(EngineError::IllegalAction("draw outside draw phase"));
                }
                let c = self
                    .open_pile
                    .pop()
                    .ok_or(EngineError::IllegalAction("open pile is empty"))?;
                self.hands[self.turn].push(c);
                self.acted[self.turn] = true;
                self.push_event(EventKind::TookPile(c));
                self.phase = Phase::AwaitDiscardOrDeclare;
            }
            Action::Drop => {
                if !draw_phase {
                    return Err(EngineError::IllegalAction("drop outside draw phase"));
                }
                let penalty = if self.acted[self.turn] { 40 } else { 20 };
                self.acted[self.turn] = true;
                self.push_event(EventKind::Dropped);
                let mut scores = [0u32; 2];
                scores[self.turn] = penalty;
                self.finish(1 - self.turn, scores, Termination::Drop);
            }
            Action::Discard(c) => {
                if draw_phase {
                    return Err(EngineError::IllegalAction("discard outside discard phase"));
                }
                self.remove_from_hand(c)?;
                self.open_pile.push(c);
                self.push_event(EventKind::Discarded(c));
                self.end_turn(ws);
            }
            Action::Declare { discard, ref declaration } => {
                if draw_phase {
                    return Err(EngineError::IllegalAction("declare outside discard phase"));
                }
                let _ = declaration;
                self.remove_from_hand(discard)?;
                self.open_pile.push(discard);
                self.push_event(EventKind::Discarded(discard));
                self.push_event(EventKind::Declared);
                let me = self.turn;
                let opp = 1 - me;
                if validate_declaration(&self.hands[me], &self.wcj, ws) {
                    let mut scores = [0u32; 2];
                    scores[opp] = ws.min_score(&self.hands[opp], &self.wcj, &self.solver_cfg).0;
                    self.finish(me, scores, Termination::ValidDeclare);
                } else {
                    // Misdeclaration loses outright at the cap.
                    let mut scores = [0u32; 2];
                    scores[me] = self.solver_cfg.cap;
                    self.finish(opp, scores, Termination::ValidDeclare);
                }
            }
        }
        Ok(())
    }
}
