//! Exact hand evaluation: MinScore and MinDist with witnesses.
//!
//! Both metrics run over the same engine: a requirement-chain phase that picks
//! one meld per chain level (iterating candidate melds, so chain order never
//! constrains meld positions), then a free phase running a lowest-bit subset DP
//! over the remaining cards. Melds are `CountedMeld`s: original positions plus
//! a SuperJoker count. Memo tables live in a reusable `Workspace` and are
//! invalidated by a generation stamp, so repeated queries (14 discard roots,
//! ascending super budgets) share subproblems.

mod dist;
mod score;

pub use score::declaration_consistent;

use crate::cards::{card_value, Card, WildcardSpec};
use crate::meld::{counted_melds, CountedMeld, MeldMask, MeldType};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAXDIST: u32 = 9;

/// One link of the meld requirement chain.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    PureSequence,
    AnySequence,
    AnyMeld,
}

impl Requirement {
    pub fn satisfied_by(self, t: MeldType) -> bool {
        match self {
            Requirement::PureSequence => t == MeldType::PureSequence,
            Requirement::AnySequence => t.is_sequence(),
            Requirement::AnyMeld => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Requirement::PureSequence => "pure_sequence",
            Requirement::AnySequence => "any_sequence",
            Requirement::AnyMeld => "any_meld",
        }
    }

    pub fn from_name(s: &str) -> Option<Requirement> {
        match s {
            "pure_sequence" => Some(Requirement::PureSequence),
            "any_sequence" => Some(Requirement::AnySequence),
            "any_meld" => Some(Requirement::AnyMeld),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Scores clip here (applied at the top, never inside the DP).
    pub cap: u32,
    pub min_meld_len: usize,
    /// Melds must satisfy chain link i before any meld may occupy link i+1;
    /// once the chain is exhausted every meld type is allowed. Groupings may
    /// stop at any link: the chain constrains meld order, not completion.
    pub requirements: Vec<Requirement>,
    pub emit_declaration: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cap: 80,
            min_meld_len: 3,
            requirements: vec![Requirement::PureSequence, Requirement::AnySequence],
            emit_declaration: false,
        }
    }
}

/// A grouping witness: disjoint melds plus leftover deadwood positions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Declaration {
    pub melds: Vec<MeldMask>,
    pub deadwood_mask: u32,
    pub score: u32,
}

/// MinDist outcome. The declaration's melds may include SuperJoker positions
/// appended after the original hand (position n onward); `wasted` lists the
/// originals those SuperJokers replace, highest value first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MinDistResult {
    pub dist: u32,
    pub declaration: Declaration,
    pub wasted: Vec<Card>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ScoreDiscard {
    pub index: usize,
    pub card: Card,
    pub score: u32,
    /// False iff the discarded index is the designated drawn position (last).
    pub used_pile_card: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistDiscard {
    pub index: usize,
    pub card: Card,
    pub dist: u32,
    /// Wasted cards of the kept hand, highest value first.
    pub wasted_ranked: Vec<Card>,
}

/// Discard analysis kept rich for agent tie-breaking.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistAnalysis {
    pub best_dist: u32,
    /// Discard indices whose kept 13 cards reach `best_dist`.
    pub candidates: Vec<usize>,
    /// Unmelded positions of the canonical full-hand grouping.
    pub grouping_unmelded: u32,
}

const MASK_BITS: usize = 14;

pub struct Workspace {
    // Bound query context.
    pub(crate) n: usize,
    pub(crate) values: Vec<u32>,
    pub(crate) nonzero_mask: u16,
    pub(crate) chain_len: usize,
    pub(crate) cap: u32,
    pub(crate) melds: Vec<CountedMeld>,
    /// Candidate meld indices per chain level, ascending by meld mask.
    pub(crate) level_cands: Vec<Vec<u32>>,
    /// Meld indices containing each position (melds with nonempty masks).
    pub(crate) melds_at: Vec<Vec<u32>>,
    // Score memo: index (level << MASK_BITS) | mask.
    pub(crate) s_val: Vec<u16>,
    pub(crate) s_gen: Vec<u32>,
    pub(crate) s_levels: usize,
    // Dist memo: index ((level * budgets + s) << MASK_BITS) | mask.
    pub(crate) d_val: Vec<u128>,
    pub(crate) d_gen: Vec<u32>,
    pub(crate) d_levels: usize,
    pub(crate) d_budgets: usize,
    pub(crate) gen: u32,
}

impl Default for Workspace {
    fn default() -> Self {
        Self::new()
    }
}

impl Workspace {
    pub fn new() -> Self {
        Workspace {
            n: 0,
            values: Vec::new(),
            nonzero_mask: 0,
            chain_len: 0,
            cap: 0,
            melds: Vec::new(),
            level_cands: Vec::new(),
            melds_at: Vec::new(),
            s_val: Vec::new(),
            s_gen: Vec::new(),
            s_levels: 0,
            d_val: Vec::new(),
            d_gen: Vec::new(),
            d_levels: 0,
            d_budgets: 0,
            gen: 0,
        }
    }

    /// Rebuild the query context. `max_supers` > 0 switches on counted super
    /// melds for the dist solver; the score solver binds with 0.
    pub(crate) fn bind(
        &mut self,
        hand: &[Card],
        wcj: &WildcardSpec,
        cfg: &SolverConfig,
        max_supers: u8,
    ) {
        assert!(hand.len() <= MASK_BITS, "hand too large: {}", hand.len());
        assert!(hand.iter().all(|c| !c.is_super()), "SuperJoker in solver input");
        self.n = hand.len();
        self.values = hand.iter().map(|&c| card_value(c, wcj)).collect();
        self.nonzero_mask = self
            .values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v > 0)
            .fold(0u16, |m, (i, _)| m | (1 << i));
        self.chain_len = cfg.requirements.len();
        self.cap = cfg.cap;
        self.melds = counted_melds(hand, wcj, max_supers, cfg.min_meld_len, true);
        self.level_cands = cfg
            .requirements
            .iter()
            .map(|req| {
                self.melds
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| req.satisfied_by(m.meld_type))
                    .map(|(i, _)| i as u32)
                    .collect()
            })
            .collect();
        self.melds_at = (0..self.n)
            .map(|p| {
                self.melds
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.mask & (1 << p) != 0)
                    .map(|(i, _)| i as u32)
                    .collect()
            })
            .collect();
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.s_gen.fill(0);
            self.d_gen.fill(0);
            self.gen = 1;
        }
    }

    pub(crate) fn full_mask(&self) -> u16 {
        ((1u32 << self.n) - 1) as u16
    }

    pub(crate) fn mask_value_sum(&self, mask: u16) -> u32 {
        let mut sum = 0;
        let mut bits = mask;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            sum += self.values[p];
        }
        sum
    }

    pub(crate) fn nz_count(&self, mask: u16) -> u32 {
        (mask & self.nonzero_mask).count_ones()
    }
}

/// Positions of set bits, ascending.
pub(crate) fn mask_positions(mask: u32) -> Vec<usize> {
    let mut out = Vec::new();
    let mut bits = mask;
    while bits != 0 {
        out.push(bits.trailing_zeros() as usize);
        bits &= bits - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requirement_satisfaction_table() {
        use MeldType::*;
        let chain = [Requirement::PureSequence, Requirement::AnySequence, Requirement::AnyMeld];
        let table = [
            (PureSequence, [true, true, true]),
            (ImpureSequence, [false, true, true]),
            (PureSet, [false, false, true]),
            (ImpureSet, [false, false, true]),
        ];
        for (t, expect) in table {
            for (req, &e) in chain.iter().zip(&expect) {
                assert_eq!(req.satisfied_by(t), e, "{req:?} vs {t:?}");
            }
        }
    }

    #[test]
    fn requirement_names_round_trip() {
        for req in [Requirement::PureSequence, Requirement::AnySequence, Requirement::AnyMeld] {
            assert_eq!(Requirement::from_name(req.name()), Some(req));
        }
        assert_eq!(Requirement::from_name("pure"), None);
    }
}
