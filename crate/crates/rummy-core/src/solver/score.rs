//! MinScore: minimum deadwood value over disjoint melds honoring the chain.

use super::{mask_positions, Declaration, ScoreDiscard, SolverConfig, Workspace, MASK_BITS};
use crate::cards::{Card, WildcardSpec};
use crate::meld::MeldMask;

/// Packed objective: deadwood value in the high bits, deadwood card count in
/// the low nibble, minimized lexicographically (fewer leftover cards break
/// value ties). Value ≤ 140 and count ≤ 14, so sums never overflow a nibble.
fn pack(value: u32, count: u32) -> u16 {
    ((value as u16) << 4) | count as u16
}

impl Workspace {
    fn bind_score(&mut self, hand: &[Card], wcj: &WildcardSpec, cfg: &SolverConfig) {
        self.bind(hand, wcj, cfg, 0);
        let levels = self.chain_len + 1;
        let want = levels << MASK_BITS;
        if self.s_val.len() < want {
            self.s_val = vec![0; want];
            self.s_gen = vec![0; want];
        }
        self.s_levels = levels;
    }

    fn deadwood_pack(&self, mask: u16) -> u16 {
        pack(self.mask_value_sum(mask), mask.count_ones())
    }

    /// Free phase: no chain constraint left; lowest set bit is either left as
    /// deadwood or covered by one of the melds containing it.
    fn s_free(&mut self, mask: u16) -> u16 {
        if mask == 0 {
            return 0;
        }
        let idx = (self.chain_len << MASK_BITS) | mask as usize;
        if self.s_gen[idx] == self.gen {
            return self.s_val[idx];
        }
        let low = mask.trailing_zeros() as usize;
        let mut best = self.s_free(mask & (mask - 1)) + pack(self.values[low], 1);
        for mi in 0..self.melds_at[low].len() {
            let m = self.melds[self.melds_at[low][mi] as usize];
            if m.supers == 0 && m.mask & !mask == 0 {
                best = best.min(self.s_free(mask & !m.mask));
            }
        }
        self.s_gen[idx] = self.gen;
        self.s_val[idx] = best;
        best
    }

    /// Chain phase: stop melding entirely, or meld one chain-satisfying meld
    /// and move to the next link.
    fn s_chain(&mut self, level: usize, mask: u16) -> u16 {
        if level == self.chain_len {
            return self.s_free(mask);
        }
        let idx = (level << MASK_BITS) | mask as usize;
        if self.s_gen[idx] == self.gen {
            return self.s_val[idx];
        }
        let mut best = self.deadwood_pack(mask);
        for ci in 0..self.level_cands[level].len() {
            let m = self.melds[self.level_cands[level][ci] as usize];
            if m.supers == 0 && m.mask & !mask == 0 {
                best = best.min(self.s_chain(level + 1, mask & !m.mask));
            }
        }
        self.s_gen[idx] = self.gen;
        self.s_val[idx] = best;
        best
    }

    /// Deterministic witness: re-derive one optimal grouping from the memo,
    /// taking the smallest-masked meld that achieves the optimum at each step.
    fn score_witness(&mut self, root: u16, clipped: u32) -> Declaration {
        let mut melds: Vec<MeldMask> = Vec::new();
        let mut mask = root;
        let mut level = 0;
        'chain: while level < self.chain_len {
            let needed = self.s_chain(level, mask);
            if self.deadwood_pack(mask) == needed {
                break 'chain;
            }
            for ci in 0..self.level_cands[level].len() {
                let m = self.melds[self.level_cands[level][ci] as usize];
                if m.supers == 0 && m.mask & !mask == 0 && self.s_chain(level + 1, mask & !m.mask) == needed {
                    melds.push(MeldMask { mask: m.mask as u32, meld_type: m.meld_type });
                    mask &= !m.mask;
                    level += 1;
                    continue 'chain;
                }
            }
            unreachable!("memoized optimum not reproducible");
        }
        let mut deadwood = 0u32;
        if level == self.chain_len {
            'free: while mask != 0 {
                let needed = self.s_free(mask);
                let low = mask.trailing_zeros() as usize;
                for mi in 0..self.melds_at[low].len() {
                    let m = self.melds[self.melds_at[low][mi] as usize];
                    if m.supers == 0 && m.mask & !mask == 0 && self.s_free(mask & !m.mask) == needed {
                        melds.push(MeldMask { mask: m.mask as u32, meld_type: m.meld_type });
                        mask &= !m.mask;
                        continue 'free;
                    }
                }
                deadwood |= 1 << low;
                mask &= mask - 1;
            }
        } else {
            deadwood = mask as u32;
        }
        Declaration { melds, deadwood_mask: deadwood, score: clipped }
    }

    /// Minimum achievable score of a hand, clipped at the configured cap, with
    /// an optimal grouping when `cfg.emit_declaration` is set.
    pub fn min_score(
        &mut self,
        hand: &[Card],
        wcj: &WildcardSpec,
        cfg: &SolverConfig,
    ) -> (u32, Option<Declaration>) {
        assert!(!hand.is_empty(), "empty hand");
        self.bind_score(hand, wcj, cfg);
        let root = self.full_mask();
        let raw = (self.s_chain(0, root) >> 4) as u32;
        let clipped = raw.min(self.cap);
        let declaration =
            if cfg.emit_declaration { Some(self.score_witness(root, clipped)) } else { None };
        (clipped, declaration)
    }

    /// Minimum score without the cap.
    pub fn min_score_unclipped(&mut self, hand: &[Card], wcj: &WildcardSpec, cfg: &SolverConfig) -> u32 {
        assert!(!hand.is_empty(), "empty hand");
        self.bind_score(hand, wcj, cfg);
        (self.s_chain(0, self.full_mask()) >> 4) as u32
    }

    /// Clipped score of each 13-card hand left by discarding position i.
    /// One bind serves all 14 roots; the memo is shared across them.
    pub fn discard_scores(&mut self, hand: &[Card], wcj: &WildcardSpec, cfg: &SolverConfig) -> Vec<u32> {
        assert_eq!(hand.len(), 14, "discard analysis needs 14 cards");
        self.bind_score(hand, wcj, cfg);
        let full = self.full_mask();
        (0..14)
            .map(|i| ((self.s_chain(0, full & !(1 << i)) >> 4) as u32).min(self.cap))
            .collect()
    }

    /// Discard minimizing the kept score; ties prefer throwing the
    /// higher-value card, then the lower index. The drawn card is position 13
    /// by convention, so `used_pile_card` reports whether it was kept.
    pub fn best_discard_minscore(
        &mut self,
        hand: &[Card],
        wcj: &WildcardSpec,
        cfg: &SolverConfig,
    ) -> ScoreDiscard {
        let scores = self.discard_scores(hand, wcj, cfg);
        let mut best = 0usize;
        for i in 1..14 {
            let better = scores[i] < scores[best]
                || (scores[i] == scores[best] && self.values[i] > self.values[best]);
            if better {
                best = i;
            }
        }
        ScoreDiscard {
            index: best,
            card: hand[best],
            score: scores[best],
            used_pile_card: best != 13,
        }
    }
}

/// Re-score a declaration against its hand: melds disjoint, covering
/// everything outside the deadwood mask, each valid and chain-consistent in
/// the declared order after sorting sequences first. Used by tests and the
/// engine to sanity-check witnesses structurally.
pub fn declaration_consistent(
    hand: &[Card],
    wcj: &WildcardSpec,
    cfg: &SolverConfig,
    decl: &Declaration,
) -> bool {
    let full: u32 = (1u32 << hand.len()) - 1;
    let mut used = decl.deadwood_mask;
    for m in &decl.melds {
        if m.mask & used != 0 {
            return false;
        }
        used |= m.mask;
        let cards: Vec<Card> = mask_positions(m.mask).into_iter().map(|p| hand[p]).collect();
        let classified = crate::meld::classify(&cards, wcj, true);
        if classified != Some(m.meld_type) || cards.len() < cfg.min_meld_len {
            return false;
        }
    }
    if used != full {
        return false;
    }
    // Strongest melds first is always a chain-consistent order when one exists.
    let mut types: Vec<_> = decl.melds.iter().map(|m| m.meld_type).collect();
    types.sort_by(|a, b| b.cmp(a));
    for (i, t) in types.iter().enumerate() {
        if i < cfg.requirements.len() && !cfg.requirements[i].satisfied_by(*t) {
            return false;
        }
    }
    true
}
