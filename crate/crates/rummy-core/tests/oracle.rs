//! The fast enumeration and solvers must agree with the brute-force
//! reference implementations on realistic random hands.

use rummy_core::cards::Card;
use rummy_core::meld::enumerate_melds;
use rummy_core::solver::{Requirement, SolverConfig, Workspace};
use rummy_testkit as kit;

fn chain_variant(k: u64) -> Vec<Requirement> {
    match k % 4 {
        0 => vec![Requirement::PureSequence, Requirement::AnySequence],
        1 => vec![],
        2 => vec![Requirement::AnyMeld],
        _ => vec![Requirement::PureSequence, Requirement::PureSequence],
    }
}

#[test]
fn enumeration_matches_subset_filter() {
    for seed in 0..240u64 {
        let (mut hand, w) = kit::sample_deal(seed);
        match seed % 3 {
            // A drawn fourteenth card.
            1 => {
                let (extra, _) = kit::sample_deal(seed ^ 0x5bd1_e995);
                hand.push(extra[seed as usize % 13]);
            }
            // SuperJokers in the tail, as distance witnesses carry them.
            2 => {
                hand.truncate(11);
                hand.push(Card::SuperJoker);
                hand.push(Card::SuperJoker);
            }
            _ => {}
        }
        let allow_super = seed % 2 == 0;
        let mut got = enumerate_melds(&hand, &w, allow_super);
        got.sort_by_key(|m| (m.mask, m.meld_type));
        let mut want = kit::subset_melds(&hand, &w, allow_super);
        want.sort_by_key(|m| (m.mask, m.meld_type));
        assert_eq!(got, want, "seed {seed} hand {hand:?}");
    }
}

#[test]
fn min_score_matches_plain_recursion() {
    let mut ws = Workspace::new();
    for seed in 0..200u64 {
        let (hand, w) = kit::sample_deal(seed);
        let cfg = SolverConfig { requirements: chain_variant(seed), ..SolverConfig::default() };
        let (got, _) = ws.min_score(&hand, &w, &cfg);
        let raw = ws.min_score_unclipped(&hand, &w, &cfg);
        assert_eq!(got, raw.min(cfg.cap), "seed {seed}");
        assert_eq!(got, kit::oracle_min_score(&hand, &w, &cfg), "seed {seed}");
        assert_eq!(raw, kit::oracle_min_score_unclipped(&hand, &w, &cfg), "seed {seed}");
    }
}

#[test]
fn min_score_matches_long_sequence_recursion() {
    // Letting the reference grouping use sequences longer than five cards
    // never finds a better score: long runs split into short ones.
    let mut ws = Workspace::new();
    let cfg = SolverConfig::default();
    for seed in 0..120u64 {
        let (hand, w) = kit::sample_deal(seed.wrapping_mul(77));
        let (got, _) = ws.min_score(&hand, &w, &cfg);
        assert_eq!(got, kit::oracle_min_score_big(&hand, &w, &cfg), "seed {seed}");
    }
}

#[test]
fn min_dist_matches_waste_enumeration() {
    let mut ws = Workspace::new();
    let cfg = SolverConfig::default();
    for seed in 500..548u64 {
        let (hand, w) = kit::sample_deal(seed);
        let maxdist = if seed % 4 == 0 { 2 } else { 9 };
        let got = ws.min_dist(&hand, &w, &cfg, maxdist).map(|r| r.dist);
        let want = kit::oracle_min_dist(&hand, &w, &cfg, maxdist);
        assert_eq!(got, want, "seed {seed} maxdist {maxdist}");
    }
}

#[test]
fn distance_witness_waste_sets_really_declare() {
    let mut ws = Workspace::new();
    let cfg = SolverConfig::default();
    for seed in 700..740u64 {
        let (hand, w) = kit::sample_deal(seed);
        let r = ws.min_dist(&hand, &w, &cfg, 9).expect("distance is at most nine");
        assert_eq!(r.wasted.len() as u32, r.dist, "seed {seed}");
        let mut kept = hand.clone();
        for c in &r.wasted {
            let at = kept.iter().position(|k| k == c).expect("wasted card comes from the hand");
            kept.remove(at);
        }
        kept.extend(std::iter::repeat(Card::SuperJoker).take(r.dist as usize));
        assert!(kit::oracle_declarable(&kept, &w, &cfg), "seed {seed} wasted {:?}", r.wasted);
    }
}
