//! Meld classification and enumeration.
//!
//! A meld is a group of 3..=5 cards forming a sequence (consecutive ranks, one
//! suit) or a set (one rank, distinct suits, at most 4 cards). Printed jokers
//! and wildcard-rank naturals may stand in for missing cards, which makes a
//! meld impure. SuperJokers stand in for arbitrary cards without breaking
//! purity. Aces play low (A-2-3) or high (Q-K-A); K-A-2 is not a sequence.

use crate::cards::{is_joker, Card, Suit, WildcardSpec};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Variants are declared in ascending preference so `Ord` picks the strongest
/// label when a group satisfies several predicates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeldType {
    ImpureSet,
    PureSet,
    ImpureSequence,
    PureSequence,
}

impl MeldType {
    pub fn name(self) -> &'static str {
        match self {
            MeldType::ImpureSet => "impure_set",
            MeldType::PureSet => "pure_set",
            MeldType::ImpureSequence => "impure_sequence",
            MeldType::PureSequence => "pure_sequence",
        }
    }

    pub fn is_sequence(self) -> bool {
        matches!(self, MeldType::PureSequence | MeldType::ImpureSequence)
    }
}

impl fmt::Display for MeldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A meld as a bitset over hand positions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MeldMask {
    pub mask: u32,
    pub meld_type: MeldType,
}

/// A meld over original-card positions plus a count of SuperJokers used.
/// Super positions are interchangeable, so solvers track only the count.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CountedMeld {
    pub mask: u16,
    pub supers: u8,
    pub meld_type: MeldType,
}

/// Ace maps to slot 1 in the low space and slot 14 in the high space.
fn natural_slot(rank: u8, high: bool) -> u8 {
    if rank == 1 && high {
        14
    } else {
        rank
    }
}

/// True when a window of `len` consecutive slots inside [space_lo, space_hi]
/// covers every fixed slot.
fn window_fits(slots: &[u8], len: u8, space_lo: u8, space_hi: u8) -> bool {
    if slots.is_empty() {
        return space_hi - space_lo + 1 >= len;
    }
    let mn = *slots.iter().min().unwrap();
    let mx = *slots.iter().max().unwrap();
    if mx - mn >= len {
        return false;
    }
    let lo_min = space_lo.max(mx.saturating_sub(len - 1));
    let lo_max = mn.min(space_hi + 1 - len);
    lo_min <= lo_max
}

fn slots_distinct(slots: &[u8]) -> bool {
    let mut seen = 0u16;
    for &s in slots {
        if seen & (1 << s) != 0 {
            return false;
        }
        seen |= 1 << s;
    }
    true
}

fn single_suit(naturals: &[(u8, Suit)]) -> bool {
    naturals.windows(2).all(|w| w[0].1 == w[1].1)
}

fn seq_fits(naturals: &[(u8, Suit)], total_len: usize) -> bool {
    if naturals.is_empty() {
        return true;
    }
    if !single_suit(naturals) {
        return false;
    }
    let len = total_len as u8;
    for high in [false, true] {
        let slots: Vec<u8> = naturals.iter().map(|&(r, _)| natural_slot(r, high)).collect();
        let (lo, hi) = if high { (2, 14) } else { (1, 13) };
        if slots_distinct(&slots) && window_fits(&slots, len, lo, hi) {
            return true;
        }
    }
    false
}

fn distinct_cards(naturals: &[(u8, Suit)]) -> bool {
    let mut sorted: Vec<_> = naturals.to_vec();
    sorted.sort();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Classify one card group, or None when it is not a valid meld.
///
/// Preference when several predicates hold: PureSequence > ImpureSequence >
/// PureSet > ImpureSet. Groups made up entirely of printed jokers and
/// wildcard-rank naturals never count as sequences; they are sets (pure when
/// they are all wildcard naturals of distinct suits, impure otherwise).
pub fn classify(cards: &[Card], wcj: &WildcardSpec, allow_super: bool) -> Option<MeldType> {
    let n = cards.len();
    if !(3..=5).contains(&n) {
        return None;
    }
    if !allow_super && cards.iter().any(|c| c.is_super()) {
        return None;
    }
    let supers = cards.iter().filter(|c| c.is_super()).count();
    let printed = cards.iter().filter(|&&c| c == Card::PrintedJoker).count();
    let naturals: Vec<(u8, Suit)> = cards
        .iter()
        .filter_map(|c| match *c {
            Card::Natural { rank, suit } => Some((rank, suit)),
            _ => None,
        })
        .collect();
    let wilds: Vec<(u8, Suit)> =
        naturals.iter().copied().filter(|&(r, _)| r == wcj.wild_rank).collect();
    let plains: Vec<(u8, Suit)> =
        naturals.iter().copied().filter(|&(r, _)| r != wcj.wild_rank).collect();

    // Entirely printed/wildcard jokers: set territory, never a sequence.
    if supers == 0 && plains.is_empty() && printed + wilds.len() == n {
        if !distinct_cards(&wilds) || n > 4 {
            return None;
        }
        let suits_distinct = slots_distinct(&wilds.iter().map(|&(_, s)| s.index() as u8).collect::<Vec<_>>());
        if printed == 0 && suits_distinct {
            return Some(MeldType::PureSet);
        }
        return Some(MeldType::ImpureSet);
    }

    // Pure sequence: naturals (wildcard-rank ones included) in their own rank
    // slots, one suit, supers filling the rest.
    if printed == 0 && seq_fits(&naturals, n) {
        return Some(MeldType::PureSequence);
    }

    // Impure sequence: at least one card in a joker role. Wildcard naturals
    // choose per subset between their own slot and a joker role.
    for sub in 0..(1u32 << wilds.len()) {
        let mut nats = plains.clone();
        for (i, &w) in wilds.iter().enumerate() {
            if sub & (1 << i) != 0 {
                nats.push(w);
            }
        }
        let jokers = printed + wilds.len() - sub.count_ones() as usize;
        if jokers >= 1 && seq_fits(&nats, n) {
            return Some(MeldType::ImpureSequence);
        }
    }

    // Pure set: one rank, distinct suits, supers allowed, no joker-role cards.
    if printed == 0 && wilds.is_empty() && n <= 4 {
        let rank_ok = plains.windows(2).all(|w| w[0].0 == w[1].0);
        let suits: Vec<u8> = plains.iter().map(|&(_, s)| s.index() as u8).collect();
        if rank_ok && slots_distinct(&suits) {
            return Some(MeldType::PureSet);
        }
    }

    // Impure set: at least 3 concrete members (distinct-suit naturals of one
    // rank plus supers) and jokers only as the 4th card.
    let jokers = printed + wilds.len();
    if jokers >= 1 && n <= 4 && plains.len() + supers >= 3 {
        let rank_ok = plains.windows(2).all(|w| w[0].0 == w[1].0);
        let suits: Vec<u8> = plains.iter().map(|&(_, s)| s.index() as u8).collect();
        if rank_ok && slots_distinct(&suits) {
            return Some(MeldType::ImpureSet);
        }
    }

    None
}

fn for_each_combination(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if buf.len() == k {
            f(buf);
            return;
        }
        let need = k - buf.len();
        for i in start..=items.len().saturating_sub(need) {
            buf.push(items[i]);
            rec(items, k, i + 1, buf, f);
            buf.pop();
        }
    }
    if k <= items.len() {
        rec(items, k, 0, &mut Vec::with_capacity(k), f);
    }
}

struct CountedAcc {
    best: HashMap<(u16, u8), MeldType>,
}

impl CountedAcc {
    fn add(&mut self, mask: u16, supers: u8, t: MeldType) {
        self.best
            .entry((mask, supers))
            .and_modify(|cur| {
                if t > *cur {
                    *cur = t;
                }
            })
            .or_insert(t);
    }
}

/// Enumerate melds over non-super cards with SuperJokers tracked as counts.
///
/// Every returned meld uses `min_len..=5` cards total (sets cap at 4) with
/// `supers <= max_supers`. With `prune` set, melds dominated for solving are
/// dropped: for one original mask, an entry with fewer supers and an
/// equal-or-stronger type supersedes the rest. Enumeration callers that expand
/// super positions must pass `prune = false` to keep every valid variant.
pub fn counted_melds(
    cards: &[Card],
    wcj: &WildcardSpec,
    max_supers: u8,
    min_len: usize,
    prune: bool,
) -> Vec<CountedMeld> {
    assert!(cards.len() <= 16, "too many cards: {}", cards.len());
    assert!(cards.iter().all(|c| !c.is_super()), "SuperJoker passed as a concrete card");
    assert!(min_len >= 3, "min_len below 3");
    let n = cards.len();
    let joker_positions: Vec<usize> = (0..n).filter(|&i| is_joker(cards[i], wcj)).collect();
    let mut acc = CountedAcc { best: HashMap::new() };

    // Sequences: fill each window slot with a natural of that slot and suit, a
    // joker-role card (positions chosen afterwards), or a SuperJoker.
    let min_len = min_len.max(3);
    for suit in Suit::ALL {
        for high in [false, true] {
            for len in min_len..=5 {
                let len_u8 = len as u8;
                let lows: Vec<u8> = if high {
                    vec![15 - len_u8]
                } else {
                    (1..=14 - len_u8).collect()
                };
                for lo in lows {
                    // Per slot: candidate natural positions of this suit.
                    let slot_nats: Vec<Vec<usize>> = (lo..lo + len_u8)
                        .map(|slot| {
                            (0..n)
                                .filter(|&i| match cards[i] {
                                    Card::Natural { rank, suit: s } => {
                                        s == suit && natural_slot(rank, high) == slot
                                    }
                                    _ => false,
                                })
                                .collect()
                        })
                        .collect();
                    seq_dfs(&slot_nats, 0, 0, 0, 0, max_supers, &mut |mask, supers, jokers| {
                        emit_sequence(cards, wcj, &joker_positions, mask, supers, jokers, &mut acc);
                    });
                }
            }
        }
    }

    // Sets of a non-wild rank: at most one natural per suit, supers as further
    // concrete members, at most one joker and only when 3 concrete members exist.
    for rank in 1..=13u8 {
        if rank == wcj.wild_rank {
            continue;
        }
        let per_suit: Vec<Vec<usize>> = Suit::ALL
            .iter()
            .map(|&suit| {
                (0..n)
                    .filter(|&i| cards[i] == Card::Natural { rank, suit })
                    .collect()
            })
            .collect();
        set_dfs(&per_suit, 0, 0, 0, &mut |mask, nat_count| {
            for supers in 0..=max_supers {
                let concrete = nat_count + supers as usize;
                let total = concrete;
                if (min_len..=4).contains(&total) && total >= 3 {
                    acc.add(mask, supers, MeldType::PureSet);
                }
                if concrete >= 3 && concrete + 1 <= 4 && (min_len..=4).contains(&(concrete + 1)) {
                    for &j in &joker_positions {
                        if mask & (1 << j) == 0 {
                            acc.add(mask | (1 << j), supers, MeldType::ImpureSet);
                        }
                    }
                }
            }
        });
    }

    // Groups made up entirely of printed jokers and wildcard naturals.
    for size in min_len..=4usize {
        for_each_combination(&joker_positions, size, &mut |combo| {
            let wild_members: Vec<(u8, Suit)> = combo
                .iter()
                .filter_map(|&i| match cards[i] {
                    Card::Natural { rank, suit } => Some((rank, suit)),
                    _ => None,
                })
                .collect();
            if !distinct_cards(&wild_members) {
                return;
            }
            let printed = combo.len() - wild_members.len();
            let suits: Vec<u8> = wild_members.iter().map(|&(_, s)| s.index() as u8).collect();
            let t = if printed == 0 && slots_distinct(&suits) {
                MeldType::PureSet
            } else {
                MeldType::ImpureSet
            };
            let mask = combo.iter().fold(0u16, |m, &i| m | (1 << i));
            acc.add(mask, 0, t);
        });
    }

    let mut out: Vec<CountedMeld> = acc
        .best
        .into_iter()
        .map(|((mask, supers), meld_type)| CountedMeld { mask, supers, meld_type })
        .collect();
    if prune {
        let mut by_mask: HashMap<u16, Vec<(u8, MeldType)>> = HashMap::new();
        for m in &out {
            by_mask.entry(m.mask).or_default().push((m.supers, m.meld_type));
        }
        out.retain(|m| {
            by_mask[&m.mask].iter().all(|&(s, t)| {
                !(s <= m.supers && t >= m.meld_type && (s, t) != (m.supers, m.meld_type))
            })
        });
    }
    out.sort_by_key(|m| (m.mask, m.supers, m.meld_type));
    out
}

/// Walk window slots choosing a natural, a joker (count only), or a super.
fn seq_dfs(
    slot_nats: &[Vec<usize>],
    idx: usize,
    mask: u16,
    supers: u8,
    jokers: u8,
    max_supers: u8,
    emit: &mut impl FnMut(u16, u8, u8),
) {
    if idx == slot_nats.len() {
        emit(mask, supers, jokers);
        return;
    }
    for &p in &slot_nats[idx] {
        if mask & (1 << p) == 0 {
            seq_dfs(slot_nats, idx + 1, mask | (1 << p), supers, jokers, max_supers, emit);
        }
    }
    seq_dfs(slot_nats, idx + 1, mask, supers, jokers + 1, max_supers, emit);
    if supers < max_supers {
        seq_dfs(slot_nats, idx + 1, mask, supers + 1, jokers, max_supers, emit);
    }
}

fn emit_sequence(
    cards: &[Card],
    wcj: &WildcardSpec,
    joker_positions: &[usize],
    mask: u16,
    supers: u8,
    jokers: u8,
    acc: &mut CountedAcc,
) {
    let free_jokers: Vec<usize> =
        joker_positions.iter().copied().filter(|&p| mask & (1 << p) == 0).collect();
    for_each_combination(&free_jokers, jokers as usize, &mut |combo| {
        let full = combo.iter().fold(mask, |m, &i| m | (1 << i));
        // All-joker groups without supers belong to the set family.
        if supers == 0 {
            let mut all_joker = true;
            let mut b = full;
            while b != 0 {
                let p = b.trailing_zeros() as usize;
                b &= b - 1;
                if !is_joker(cards[p], wcj) {
                    all_joker = false;
                    break;
                }
            }
            if all_joker {
                return;
            }
        }
        let t = if jokers >= 1 { MeldType::ImpureSequence } else { MeldType::PureSequence };
        acc.add(full, supers, t);
    });
}

/// Pick at most one position per suit.
fn set_dfs(
    per_suit: &[Vec<usize>],
    suit_idx: usize,
    mask: u16,
    count: usize,
    emit: &mut impl FnMut(u16, usize),
) {
    if suit_idx == per_suit.len() {
        emit(mask, count);
        return;
    }
    set_dfs(per_suit, suit_idx + 1, mask, count, emit);
    for &p in &per_suit[suit_idx] {
        set_dfs(per_suit, suit_idx + 1, mask | (1 << p), count + 1, emit);
    }
}

/// All valid melds of a hand as position bitmasks, each with its strongest type.
pub fn enumerate_melds(hand: &[Card], wcj: &WildcardSpec, allow_super: bool) -> Vec<MeldMask> {
    assert!(hand.len() <= 16, "hand too large: {}", hand.len());
    let originals: Vec<usize> = (0..hand.len()).filter(|&i| !hand[i].is_super()).collect();
    let supers: Vec<usize> = (0..hand.len()).filter(|&i| hand[i].is_super()).collect();
    let compact: Vec<Card> = originals.iter().map(|&i| hand[i]).collect();
    let max_supers = if allow_super { supers.len().min(5) as u8 } else { 0 };
    let counted = counted_melds(&compact, wcj, max_supers, 3, false);
    let mut out = Vec::new();
    for cm in counted {
        let mut base = 0u32;
        let mut bits = cm.mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            base |= 1 << originals[i];
        }
        for_each_combination(&supers, cm.supers as usize, &mut |combo| {
            let mask = combo.iter().fold(base, |m, &i| m | (1 << i));
            out.push(MeldMask { mask, meld_type: cm.meld_type });
        });
    }
    out.sort_by_key(|m| (m.mask, m.meld_type));
    out
}
