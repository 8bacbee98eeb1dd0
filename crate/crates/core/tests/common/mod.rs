#![allow(dead_code)]

use mvreg_core::features::{Foot, PlayerRecord};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const LEAGUES: [&str; 3] = ["Bundesliga", "La Liga", "Serie A"];
pub const CLUBS: [&str; 5] = ["Atalanta", "Bayern", "Betis", "Genoa", "Mainz"];
pub const NATIONS: [&str; 4] = ["Brazil", "England", "France", "Spain"];
pub const OUTFITTERS: [&str; 3] = ["Adidas", "Nike", "Puma"];

pub fn random_player<R: Rng>(rng: &mut R, i: usize) -> PlayerRecord {
    PlayerRecord {
        name: format!("Player {i:03}"),
        league: LEAGUES.choose(rng).unwrap().to_string(),
        club: CLUBS.choose(rng).unwrap().to_string(),
        age: rng.random_range(20..=34),
        height_cm: rng.random_range(165..=195),
        foot: *[Foot::Left, Foot::Right, Foot::Both].choose(rng).unwrap(),
        nationality: NATIONS.choose(rng).unwrap().to_string(),
        outfitter: OUTFITTERS.choose(rng).unwrap().to_string(),
        matches_played: rng.random_range(5..=45),
        goals: rng.random_range(0..=30),
        assists: rng.random_range(0..=15),
        yellow_cards: rng.random_range(0..=8),
        second_yellow_cards: rng.random_range(0..=1),
        red_cards: rng.random_range(0..=1),
        minutes_played: rng.random_range(600..=3400),
        market_value_m_eur: rng.random_range(10.0..150.0),
        mid_season_transfer: rng.random_bool(0.1),
    }
}

pub fn random_players<R: Rng>(rng: &mut R, n: usize) -> Vec<PlayerRecord> {
    (0..n).map(|i| random_player(rng, i)).collect()
}
