//! Card, deck, and scoring primitives.
//!
//! Cards are value objects. A `Natural` carries rank 1..=13 (1 = Ace, 11 = Jack,
//! 12 = Queen, 13 = King) and a suit. `PrintedJoker` is a physical joker card.
//! `SuperJoker` is a solver-internal placeholder that can stand for any card; it
//! never appears in a deck, hand, pile, or serialized game artifact.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Suit {
    Clubs,
    Diamonds,
    Hearts,
    Spades,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Clubs, Suit::Diamonds, Suit::Hearts, Suit::Spades];

    pub fn letter(self) -> char {
        match self {
            Suit::Clubs => 'C',
            Suit::Diamonds => 'D',
            Suit::Hearts => 'H',
            Suit::Spades => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Suit> {
        match c {
            'C' => Some(Suit::Clubs),
            'D' => Some(Suit::Diamonds),
            'H' => Some(Suit::Hearts),
            'S' => Some(Suit::Spades),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Suit::Clubs => 0,
            Suit::Diamonds => 1,
            Suit::Hearts => 2,
            Suit::Spades => 3,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Card {
    Natural { rank: u8, suit: Suit },
    PrintedJoker,
    SuperJoker,
}

impl Card {
    pub fn natural(rank: u8, suit: Suit) -> Card {
        debug_assert!((1..=13).contains(&rank));
        Card::Natural { rank, suit }
    }

    pub fn is_natural(self) -> bool {
        matches!(self, Card::Natural { .. })
    }

    pub fn is_super(self) -> bool {
        self == Card::SuperJoker
    }

    pub fn rank(self) -> Option<u8> {
        match self {
            Card::Natural { rank, .. } => Some(rank),
            _ => None,
        }
    }

    pub fn suit(self) -> Option<Suit> {
        match self {
            Card::Natural { suit, .. } => Some(suit),
            _ => None,
        }
    }
}

/// The wildcard joker for one game: a natural card drawn and set aside. Every
/// natural whose rank equals the drawn card's rank acts as a joker and scores 0.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WildcardSpec {
    pub drawn_card: Card,
    pub wild_rank: u8,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CardError {
    #[error("malformed card token `{0}`")]
    BadToken(String),
    #[error("wildcard indicator must be a natural card, got `{0}`")]
    NonNaturalWildcard(String),
}

impl WildcardSpec {
    pub fn new(drawn_card: Card) -> Result<WildcardSpec, CardError> {
        match drawn_card {
            Card::Natural { rank, .. } => Ok(WildcardSpec { drawn_card, wild_rank: rank }),
            other => Err(CardError::NonNaturalWildcard(format_card(other))),
        }
    }
}

/// Deck composition. `total_cards` = 52·num_decks + printed_jokers_per_deck·num_decks.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DeckSpec {
    pub num_decks: u32,
    pub printed_jokers_per_deck: u32,
}

impl Default for DeckSpec {
    fn default() -> Self {
        DeckSpec { num_decks: 1, printed_jokers_per_deck: 2 }
    }
}

impl DeckSpec {
    pub fn total_cards(&self) -> usize {
        (52 * self.num_decks + self.printed_jokers_per_deck * self.num_decks) as usize
    }

    /// The full card multiset in a canonical (unshuffled) order.
    pub fn full_multiset(&self) -> Vec<Card> {
        let mut cards = Vec::with_capacity(self.total_cards());
        for _ in 0..self.num_decks {
            for suit in Suit::ALL {
                for rank in 1..=13 {
                    cards.push(Card::natural(rank, suit));
                }
            }
            for _ in 0..self.printed_jokers_per_deck {
                cards.push(Card::PrintedJoker);
            }
        }
        cards
    }
}

/// Point value of a card ignoring the wildcard: 2..10 face value, A/J/Q/K are 10.
pub fn rank_value(rank: u8) -> u32 {
    match rank {
        2..=10 => rank as u32,
        1 | 11 | 12 | 13 => 10,
        _ => panic!("rank out of range: {rank}"),
    }
}

/// Point value under a wildcard spec: jokers of every kind score 0.
pub fn card_value(card: Card, wcj: &WildcardSpec) -> u32 {
    match card {
        Card::Natural { rank, .. } if rank == wcj.wild_rank => 0,
        Card::Natural { rank, .. } => rank_value(rank),
        Card::PrintedJoker | Card::SuperJoker => 0,
    }
}

/// True for printed jokers and wildcard-rank naturals (the cards that may play a
/// joker role). SuperJokers are tracked separately and excluded here.
pub fn is_joker(card: Card, wcj: &WildcardSpec) -> bool {
    match card {
        Card::Natural { rank, .. } => rank == wcj.wild_rank,
        Card::PrintedJoker => true,
        Card::SuperJoker => false,
    }
}

/// Seeded shuffle of the full multiset. Identical seed, identical permutation.
pub fn build_deck(spec: &DeckSpec, seed: u64) -> Vec<Card> {
    let mut cards = spec.full_multiset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cards.shuffle(&mut rng);
    cards
}

fn rank_letter(rank: u8) -> char {
    match rank {
        1 => 'A',
        2..=9 => (b'0' + rank) as char,
        10 => 'T',
        11 => 'J',
        12 => 'Q',
        13 => 'K',
        _ => panic!("rank out of range: {rank}"),
    }
}

fn rank_from_letter(c: char) -> Option<u8> {
    match c {
        'A' => Some(1),
        '2'..='9' => Some(c as u8 - b'0'),
        'T' => Some(10),
        'J' => Some(11),
        'Q' => Some(12),
        'K' => Some(13),
        _ => None,
    }
}

/// Canonical token: rank letter + suit letter, `JK` for printed jokers, `*` for
/// super jokers (display only; `parse_card` rejects it).
pub fn format_card(card: Card) -> String {
    match card {
        Card::Natural { rank, suit } => format!("{}{}", rank_letter(rank), suit.letter()),
        Card::PrintedJoker => "JK".to_string(),
        Card::SuperJoker => "*".to_string(),
    }
}

pub fn parse_card(token: &str) -> Result<Card, CardError> {
    if token == "JK" {
        return Ok(Card::PrintedJoker);
    }
    let mut chars = token.chars();
    let (Some(r), Some(s), None) = (chars.next(), chars.next(), chars.next()) else {
        return Err(CardError::BadToken(token.to_string()));
    };
    match (rank_from_letter(r), Suit::from_letter(s)) {
        (Some(rank), Some(suit)) => Ok(Card::natural(rank, suit)),
        _ => Err(CardError::BadToken(token.to_string())),
    }
}

pub fn parse_hand(text: &str) -> Result<Vec<Card>, CardError> {
    text.split_whitespace().map(parse_card).collect()
}

pub fn format_hand(cards: &[Card]) -> String {
    cards.iter().map(|&c| format_card(c)).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_card(*self))
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_card(*self))
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Card, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_card(&s).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wcj(rank: u8) -> WildcardSpec {
        WildcardSpec::new(Card::natural(rank, Suit::Spades)).unwrap()
    }

    #[test]
    fn values_follow_rank_rules() {
        let w = wcj(9);
        assert_eq!(card_value(Card::natural(5, Suit::Hearts), &w), 5);
        assert_eq!(card_value(Card::natural(13, Suit::Spades), &w), 10);
        assert_eq!(card_value(Card::natural(1, Suit::Clubs), &w), 10);
        assert_eq!(card_value(Card::natural(9, Suit::Clubs), &w), 0);
        assert_eq!(card_value(Card::PrintedJoker, &w), 0);
        assert_eq!(card_value(Card::SuperJoker, &w), 0);
        for rank in 1..=13 {
            for suit in Suit::ALL {
                let v = card_value(Card::natural(rank, suit), &w);
                assert!(v <= 10);
            }
        }
    }

    #[test]
    fn full_deck_value_sum_closed_form() {
        // Per suit: 2+..+10 = 54, plus A/J/Q/K at 10 each = 94; four suits = 376.
        let spec = DeckSpec::default();
        for r in 1..=13 {
            let w = wcj(r);
            let sum: u32 = spec.full_multiset().iter().map(|&c| card_value(c, &w)).sum();
            assert_eq!(sum, 376 - 4 * rank_value(r), "wild rank {r}");
        }
    }

    #[test]
    fn deck_conserves_multiset_and_is_deterministic() {
        let spec = DeckSpec::default();
        let deck = build_deck(&spec, 7);
        assert_eq!(deck.len(), 54);
        let mut sorted = deck.clone();
        sorted.sort();
        let mut reference = spec.full_multiset();
        reference.sort();
        assert_eq!(sorted, reference);
        assert_eq!(deck, build_deck(&spec, 7));

        let two = DeckSpec { num_decks: 2, printed_jokers_per_deck: 2 };
        let mut sorted2 = build_deck(&two, 1);
        assert_eq!(sorted2.len(), 108);
        sorted2.sort();
        let mut ref2 = two.full_multiset();
        ref2.sort();
        assert_eq!(sorted2, ref2);
    }

    #[test]
    fn distinct_seeds_usually_differ() {
        let spec = DeckSpec::default();
        let mut differing = 0;
        for s in 0..100u64 {
            if build_deck(&spec, 2 * s) != build_deck(&spec, 2 * s + 1) {
                differing += 1;
            }
        }
        assert!(differing >= 99, "only {differing}/100 seed pairs differed");
    }

    #[test]
    fn parse_format_round_trip() {
        assert_eq!(parse_card("TD").unwrap(), Card::natural(10, Suit::Diamonds));
        assert_eq!(parse_card("JK").unwrap(), Card::PrintedJoker);
        assert_eq!(parse_card("3S").unwrap(), Card::natural(3, Suit::Spades));
        assert_eq!(format_card(parse_card("3S").unwrap()), "3S");
        assert_eq!(format_card(Card::SuperJoker), "*");
        for bad in ["", "3", "3X", "ZD", "10D", "3s", "*", "jk"] {
            assert!(parse_card(bad).is_err(), "accepted {bad:?}");
        }
        let hand = parse_hand("3C 4C 5C JK").unwrap();
        assert_eq!(format_hand(&hand), "3C 4C 5C JK");
    }

    #[test]
    fn wildcard_requires_natural() {
        assert!(WildcardSpec::new(Card::PrintedJoker).is_err());
        assert!(WildcardSpec::new(Card::SuperJoker).is_err());
        let w = WildcardSpec::new(Card::natural(9, Suit::Diamonds)).unwrap();
        assert_eq!(w.wild_rank, 9);
        assert!(is_joker(Card::natural(9, Suit::Clubs), &w));
        assert!(is_joker(Card::PrintedJoker, &w));
        assert!(!is_joker(Card::natural(8, Suit::Clubs), &w));
        assert!(!is_joker(Card::SuperJoker, &w));
    }

    #[test]
    fn card_serde_uses_tokens() {
        let c = Card::natural(12, Suit::Hearts);
        assert_eq!(serde_json::to_string(&c).unwrap(), "\"QH\"");
        let back: Card = serde_json::from_str("\"QH\"").unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Card>("\"*\"").is_err());
    }
}
