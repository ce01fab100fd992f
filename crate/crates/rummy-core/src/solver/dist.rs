//! MinDist: fewest card replacements until a hand declares at score 0.
//!
//! Feasibility at budget k: some chain-consistent melds over the originals
//! plus at most k SuperJokers leave unmelded originals U with at most k
//! nonzero-value members and |U| >= k. Wasting the k replaced originals and
//! keeping zero-value leftovers then scores exactly 0, and conversely any
//! 0-score hand after k replacements yields such a grouping, so the smallest
//! feasible k over k = 0,1,2,... is the distance.
//!
//! DP values pack, per count u of unmelded originals, the minimum number of
//! nonzero-value cards among them: 16 bytes in a u128, byte u = that minimum,
//! 0x7F = unreachable. Byte arithmetic is SWAR over u64 halves.

use super::{
    mask_positions, Declaration, DistAnalysis, DistDiscard, MinDistResult, SolverConfig,
    Workspace, MASK_BITS,
};
use crate::cards::{Card, WildcardSpec};
use crate::meld::{CountedMeld, MeldMask};

const INF_B: u8 = 0x7F;
const INF: u128 = u128::from_ne_bytes([INF_B; 16]);
const ONES: u128 = u128::from_ne_bytes([1; 16]);
const HIGH: u128 = u128::from_ne_bytes([0x80; 16]);

fn half_min(a: u64, b: u64) -> u64 {
    // Bytes stay <= 0x7F, so (a|0x80) - b never borrows across bytes; bit 7
    // of each result byte then flags a >= b.
    const H: u64 = 0x8080_8080_8080_8080;
    let d = (a | H).wrapping_sub(b & !H);
    let take_b = ((d & H) >> 7).wrapping_mul(0xFF);
    (b & take_b) | (a & !take_b)
}

/// Per-byte minimum.
fn bmin(a: u128, b: u128) -> u128 {
    let lo = half_min(a as u64, b as u64);
    let hi = half_min((a >> 64) as u64, (b >> 64) as u64);
    ((hi as u128) << 64) | lo as u128
}

/// Add 1 to every byte, keeping 0x7F (unreachable) fixed.
fn badd1(x: u128) -> u128 {
    let t = x.wrapping_add(ONES);
    let overflow = ((t & HIGH) >> 7).wrapping_mul(0xFF);
    (t & !overflow) | (INF & overflow)
}

/// Shift toward higher unmelded counts: byte u moves to u+1, byte 0 clears.
fn bshift(x: u128) -> u128 {
    (x << 8) | INF_B as u128
}

fn bget(x: u128, u: u32) -> u8 {
    (x >> (8 * u)) as u8
}

fn bset_single(u: u32, v: u8) -> u128 {
    (INF & !(0xFFu128 << (8 * u))) | ((v as u128) << (8 * u))
}

impl Workspace {
    fn bind_dist(&mut self, hand: &[Card], wcj: &WildcardSpec, cfg: &SolverConfig, maxdist: u32) {
        assert!(maxdist <= super::DEFAULT_MAXDIST, "maxdist above 9");
        self.bind(hand, wcj, cfg, 5);
        self.d_levels = self.chain_len + 1;
        self.d_budgets = maxdist as usize + 1;
        let want = (self.d_levels * self.d_budgets) << MASK_BITS;
        if self.d_val.len() < want {
            self.d_val = vec![0; want];
            self.d_gen = vec![0; want];
        }
    }

    fn d_index(&self, level: usize, s: u32, mask: u16) -> usize {
        ((level * self.d_budgets + s as usize) << MASK_BITS) | mask as usize
    }

    fn d_free(&mut self, mask: u16, s: u32) -> u128 {
        if mask == 0 {
            return INF ^ INF_B as u128;
        }
        let idx = self.d_index(self.chain_len, s, mask);
        if self.d_gen[idx] == self.gen {
            return self.d_val[idx];
        }
        let low = mask.trailing_zeros() as usize;
        let child = self.d_free(mask & (mask - 1), s);
        let mut best = if self.values[low] > 0 { badd1(bshift(child)) } else { bshift(child) };
        for mi in 0..self.melds_at[low].len() {
            let m = self.melds[self.melds_at[low][mi] as usize];
            if m.mask & !mask == 0 && (m.supers as u32) <= s {
                best = bmin(best, self.d_free(mask & !m.mask, s - m.supers as u32));
            }
        }
        self.d_gen[idx] = self.gen;
        self.d_val[idx] = best;
        best
    }

    fn d_chain(&mut self, level: usize, mask: u16, s: u32) -> u128 {
        if level == self.chain_len {
            return self.d_free(mask, s);
        }
        let idx = self.d_index(level, s, mask);
        if self.d_gen[idx] == self.gen {
            return self.d_val[idx];
        }
        let mut best = bset_single(mask.count_ones(), self.nz_count(mask) as u8);
        for ci in 0..self.level_cands[level].len() {
            let m = self.melds[self.level_cands[level][ci] as usize];
            if m.mask & !mask == 0 && (m.supers as u32) <= s {
                best = bmin(best, self.d_chain(level + 1, mask & !m.mask, s - m.supers as u32));
            }
        }
        self.d_gen[idx] = self.gen;
        self.d_val[idx] = best;
        best
    }

    /// True when budget k admits a grouping wasting exactly k originals.
    fn d_feasible(&mut self, root: u16, k: u32) -> bool {
        let v = self.d_chain(0, root, k);
        (k..=self.n as u32).any(|u| bget(v, u) <= k as u8)
    }

    /// Re-derive a grouping achieving byte `target_u` == `needed` at the root.
    fn dist_witness(
        &mut self,
        root: u16,
        budget: u32,
        mut target_u: u32,
        mut needed: u8,
    ) -> (Vec<CountedMeld>, u16) {
        let mut melds = Vec::new();
        let mut mask = root;
        let mut s = budget;
        let mut level = 0;
        'chain: while level < self.chain_len {
            if mask.count_ones() == target_u && self.nz_count(mask) as u8 == needed {
                return (melds, mask);
            }
            for ci in 0..self.level_cands[level].len() {
                let m = self.melds[self.level_cands[level][ci] as usize];
                if m.mask & !mask == 0 && (m.supers as u32) <= s {
                    let child = self.d_chain(level + 1, mask & !m.mask, s - m.supers as u32);
                    if bget(child, target_u) == needed {
                        melds.push(m);
                        mask &= !m.mask;
                        s -= m.supers as u32;
                        level += 1;
                        continue 'chain;
                    }
                }
            }
            unreachable!("memoized distance not reproducible at level {level}");
        }
        let mut unmelded = 0u16;
        'free: while mask != 0 {
            let low = mask.trailing_zeros() as usize;
            for mi in 0..self.melds_at[low].len() {
                let m = self.melds[self.melds_at[low][mi] as usize];
                if m.mask & !mask == 0 && (m.supers as u32) <= s {
                    let child = self.d_free(mask & !m.mask, s - m.supers as u32);
                    if bget(child, target_u) == needed {
                        melds.push(m);
                        mask &= !m.mask;
                        s -= m.supers as u32;
                        continue 'free;
                    }
                }
            }
            let nzv = (self.values[low] > 0) as u8;
            let child = self.d_free(mask & (mask - 1), s);
            debug_assert!(
                target_u >= 1 && bget(child, target_u - 1) != INF_B
                    && bget(child, target_u - 1) + nzv == needed
            );
            unmelded |= 1 << low;
            mask &= mask - 1;
            target_u -= 1;
            needed -= nzv;
        }
        debug_assert!(target_u == 0 && needed == 0);
        (melds, unmelded)
    }

    /// Split unmelded positions into k wasted (every nonzero-value member,
    /// highest value first, padded with zero-value members) and leftovers.
    fn wasted_selection(&self, unmelded: u16, k: u32) -> Vec<usize> {
        let mut nonzero: Vec<usize> = mask_positions((unmelded & self.nonzero_mask) as u32);
        nonzero.sort_by_key(|&p| (std::cmp::Reverse(self.values[p]), p));
        let zero = mask_positions((unmelded & !self.nonzero_mask) as u32);
        debug_assert!(nonzero.len() <= k as usize);
        nonzero.extend(zero);
        nonzero.truncate(k as usize);
        nonzero
    }

    fn assemble(&mut self, hand: &[Card], root: u16, k: u32) -> MinDistResult {
        let v = self.d_chain(0, root, k);
        let target_u = (k..=self.n as u32).find(|&u| bget(v, u) <= k as u8).expect("feasible k");
        let needed = bget(v, target_u);
        let (counted, unmelded) = self.dist_witness(root, k, target_u, needed);
        let mut next_super = self.n;
        let melds = counted
            .iter()
            .map(|cm| {
                let mut mask = cm.mask as u32;
                for _ in 0..cm.supers {
                    mask |= 1 << next_super;
                    next_super += 1;
                }
                MeldMask { mask, meld_type: cm.meld_type }
            })
            .collect();
        let wasted_positions = self.wasted_selection(unmelded, k);
        let wasted_mask = wasted_positions.iter().fold(0u16, |m, &p| m | (1 << p));
        MinDistResult {
            dist: k,
            declaration: Declaration {
                melds,
                deadwood_mask: (unmelded & !wasted_mask) as u32,
                score: 0,
            },
            wasted: wasted_positions.iter().map(|&p| hand[p]).collect(),
        }
    }

    /// Smallest number of card replacements after which the hand declares at
    /// score 0, with a witness grouping over originals plus SuperJokers.
    /// None when the distance exceeds `maxdist`.
    pub fn min_dist(
        &mut self,
        hand: &[Card],
        wcj: &WildcardSpec,
        cfg: &SolverConfig,
        maxdist: u32,
    ) -> Option<MinDistResult> {
        assert_eq!(hand.len(), 13, "min_dist needs 13 cards");
        self.bind_dist(hand, wcj, cfg, maxdist);
        let root = self.full_mask();
        for k in 0..=maxdist {
            if self.d_feasible(root, k) {
                return Some(self.assemble(hand, root, k));
            }
        }
        None
    }

    /// Which discards of a 14-card hand reach the best kept distance, plus the
    /// canonical full-hand grouping's unmelded positions for tie-breaking.
    pub fn analyze_discards_mindist(
        &mut self,
        hand: &[Card],
        wcj: &WildcardSpec,
        cfg: &SolverConfig,
        maxdist: u32,
    ) -> Option<DistAnalysis> {
        assert_eq!(hand.len(), 14, "discard analysis needs 14 cards");
        self.bind_dist(hand, wcj, cfg, maxdist);
        let full = self.full_mask();
        for k in 0..=maxdist {
            let candidates: Vec<usize> =
                (0..14).filter(|&c| self.d_feasible(full & !(1 << c), k)).collect();
            if candidates.is_empty() {
                continue;
            }
            // The full hand groups with one extra unmelded card (the discard),
            // so gates relax by one; existence follows from any feasible root.
            let v = self.d_chain(0, full, k);
            let target_u = (k + 1..=14)
                .find(|&u| bget(v, u) <= (k + 1) as u8)
                .expect("full-hand grouping");
            let needed = bget(v, target_u);
            let (_, unmelded) = self.dist_witness(full, k, target_u, needed);
            return Some(DistAnalysis {
                best_dist: k,
                candidates,
                grouping_unmelded: unmelded as u32,
            });
        }
        None
    }

    /// Discard keeping the lowest-distance 13: ties prefer a card the
    /// canonical grouping wastes, then higher value, then lower index.
    pub fn best_discard_mindist(
        &mut self,
        hand: &[Card],
        wcj: &WildcardSpec,
        cfg: &SolverConfig,
        maxdist: u32,
    ) -> Option<DistDiscard> {
        let analysis = self.analyze_discards_mindist(hand, wcj, cfg, maxdist)?;
        let in_waste: Vec<usize> = analysis
            .candidates
            .iter()
            .copied()
            .filter(|&c| analysis.grouping_unmelded & (1 << c) != 0)
            .collect();
        let pool = if in_waste.is_empty() { &analysis.candidates } else { &in_waste };
        let mut chosen = pool[0];
        for &c in &pool[1..] {
            if self.values[c] > self.values[chosen] {
                chosen = c;
            }
        }
        let root = self.full_mask() & !(1 << chosen);
        let kept = self.assemble(hand, root, analysis.best_dist);
        Some(DistDiscard {
            index: chosen,
            card: hand[chosen],
            dist: analysis.best_dist,
            wasted_ranked: kept.wasted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::{card_value, parse_card, parse_hand};
    use crate::meld::classify;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wcj(token: &str) -> WildcardSpec {
        WildcardSpec::new(parse_card(token).unwrap()).unwrap()
    }

    #[test]
    fn byte_swar_matches_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4000 {
            let mut a = [0u8; 16];
            let mut b = [0u8; 16];
            for i in 0..16 {
                a[i] = rng.gen_range(0..=0x7F);
                b[i] = rng.gen_range(0..=0x7F);
            }
            let (ua, ub) = (u128::from_ne_bytes(a), u128::from_ne_bytes(b));
            let got = bmin(ua, ub).to_ne_bytes();
            let add = badd1(ua).to_ne_bytes();
            for i in 0..16 {
                assert_eq!(got[i], a[i].min(b[i]));
                let expect = if a[i] == INF_B { INF_B } else { a[i] + 1 };
                assert_eq!(add[i], expect);
            }
        }
        assert_eq!(bget(bshift(0x05), 1), 5);
        assert_eq!(bget(bshift(0x05), 0), INF_B);
        assert_eq!(bget(bset_single(3, 2), 3), 2);
        assert_eq!(bget(bset_single(3, 2), 4), INF_B);
    }

    #[test]
    fn worked_example_distance_one() {
        let hand = parse_hand("3D 9C 5D 6D JS QS 7C 2C 2S 2H AC AS AH").unwrap();
        let w = wcj("7C");
        let mut ws = Workspace::new();
        let r = ws.min_dist(&hand, &w, &SolverConfig::default(), 9).unwrap();
        assert_eq!(r.dist, 1);
        assert_eq!(r.wasted, vec![parse_card("9C").unwrap()]);
        assert_eq!(r.declaration.melds.len(), 4);
        assert_eq!(r.declaration.score, 0);
    }

    #[test]
    fn declarable_hand_has_distance_zero() {
        let hand = parse_hand("2C 3C 4C 5H 6H 7H 9D 9S 9C QD QS QH JK").unwrap();
        let mut ws = Workspace::new();
        let r = ws.min_dist(&hand, &wcj("8D"), &SolverConfig::default(), 9).unwrap();
        assert_eq!(r.dist, 0);
        assert!(r.wasted.is_empty());
    }

    #[test]
    fn incompatible_hand_is_far() {
        let hand = parse_hand("2C 5D 8H JS 3D 6H 9S QC 4H 7S TC KD 2S").unwrap();
        let w = wcj("AD");
        let mut ws = Workspace::new();
        let r = ws.min_dist(&hand, &w, &SolverConfig::default(), 9).unwrap();
        // No meld without supers, but one super bridges a same-suit gap of
        // two ({3D * 5D}) or pairs a rank ({2C 2S *}): four two-original
        // melds and four supers keep eight, wasting five nonzero cards.
        assert_eq!(r.dist, 5);
        assert!(ws.min_dist(&hand, &w, &SolverConfig::default(), 3).is_none());
    }

    #[test]
    fn witness_melds_classify_with_supers() {
        let hands = [
            ("3D 9C 5D 6D JS QS 7C 2C 2S 2H AC AS AH", "7C"),
            ("2C 5D 8H JS 3D 6H 9S QC 4H 7S TC KD 2S", "AD"),
            ("3C 4C 5C 6C 9D TD JD 4D 4H 4S KS KH 7S", "3S"),
        ];
        let mut ws = Workspace::new();
        for (hand_s, wild) in hands {
            let hand = parse_hand(hand_s).unwrap();
            let w = wcj(wild);
            let r = ws.min_dist(&hand, &w, &SolverConfig::default(), 9).unwrap();
            assert_eq!(r.wasted.len() as u32, r.dist);
            let mut extended = hand.clone();
            let supers_used: u32 = r
                .declaration
                .melds
                .iter()
                .map(|m| mask_positions(m.mask).iter().filter(|&&p| p >= 13).count() as u32)
                .sum();
            assert!(supers_used <= r.dist);
            extended.extend(std::iter::repeat(Card::SuperJoker).take(supers_used as usize));
            let mut used = r.declaration.deadwood_mask;
            for m in &r.declaration.melds {
                assert_eq!(m.mask & used, 0, "overlap in witness");
                used |= m.mask;
                let cards: Vec<Card> =
                    mask_positions(m.mask).into_iter().map(|p| extended[p]).collect();
                assert_eq!(classify(&cards, &w, true), Some(m.meld_type), "{hand_s}");
            }
            // Leftovers valueless, wasted sorted by descending value.
            for p in mask_positions(r.declaration.deadwood_mask) {
                assert_eq!(card_value(extended[p], &w), 0);
            }
            let vals: Vec<u32> = r.wasted.iter().map(|&c| card_value(c, &w)).collect();
            assert!(vals.windows(2).all(|ab| ab[0] >= ab[1]));
        }
    }

    #[test]
    fn discard_analysis_agrees_with_per_root_min_dist() {
        let hand = parse_hand("3C 4C 5C 6C 9D TD JD 4D 4H 4S KS KH 7S 7D").unwrap();
        let w = wcj("3S");
        let cfg = SolverConfig::default();
        let mut ws = Workspace::new();
        let analysis = ws.analyze_discards_mindist(&hand, &w, &cfg, 9).unwrap();
        let mut best = u32::MAX;
        let mut expect = Vec::new();
        for c in 0..14 {
            let mut kept = hand.clone();
            kept.remove(c);
            let d = ws.min_dist(&kept, &w, &cfg, 9).unwrap().dist;
            if d < best {
                best = d;
                expect.clear();
            }
            if d == best {
                expect.push(c);
            }
        }
        assert_eq!(analysis.best_dist, best);
        assert_eq!(analysis.candidates, expect);
        let pick = ws.best_discard_mindist(&hand, &w, &cfg, 9).unwrap();
        assert_eq!(pick.dist, best);
        assert!(analysis.candidates.contains(&pick.index));
        assert_eq!(pick.wasted_ranked.len() as u32, best);
    }
}
