//! Seeded synthetic forward-player generator with published ground truth.

use std::collections::BTreeMap;

use mvreg_core::features::{
    age_group, card_score, goal_contribution, height_group, match_group, EncodedDataset, Foot,
    PlayerRecord, AGE_GROUP_LABELS, HEIGHT_GROUP_LABELS,
};
use mvreg_core::numcore::least_squares_solve;
use mvreg_core::{Error, Result};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

pub const MIN_PLAYERS: usize = 20;

pub const LEAGUES: [&str; 4] = ["Bundesliga", "La Liga", "Premier League", "Serie A"];

pub const CLUBS: [[&str; 10]; 4] = [
    [
        "Augsburg", "Bayern Munich", "Borussia Dortmund", "Eintracht Frankfurt", "Freiburg",
        "Hoffenheim", "Leverkusen", "Monchengladbach", "Schalke", "Wolfsburg",
    ],
    [
        "Athletic Bilbao", "Atletico Madrid", "Barcelona", "Celta Vigo", "Getafe", "Real Betis",
        "Real Madrid", "Real Sociedad", "Sevilla", "Valencia",
    ],
    [
        "Arsenal", "Chelsea", "Everton", "Leicester", "Liverpool", "Manchester City",
        "Manchester United", "Southampton", "Tottenham", "West Ham",
    ],
    [
        "AC Milan", "AS Roma", "Atalanta", "Fiorentina", "Inter", "Juventus", "Lazio", "Napoli",
        "Sampdoria", "Torino",
    ],
];

/// Ordered from most to least common in the generated data.
pub const NATIONALITIES: [&str; 28] = [
    "Spain", "Germany", "France", "England", "Italy", "Brazil", "Argentina", "Belgium",
    "Netherlands", "Portugal", "Uruguay", "Colombia", "Croatia", "Poland", "Senegal", "Denmark",
    "Austria", "Switzerland", "Serbia", "Nigeria", "Ivory Coast", "Mexico", "Chile", "Sweden",
    "Turkey", "Wales", "Gabon", "Egypt",
];

pub const OUTFITTERS: [&str; 5] = ["Adidas", "Joma", "New Balance", "Nike", "Puma"];

const MAX_MATCH_GROUP: u32 = 7;

/// Generating model: market value equals `intercept` plus one effect per
/// categorical level, plus the two slopes times the raw statistics, plus
/// Gaussian noise with standard deviation `noise_sd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub seed: u64,
    pub n: usize,
    pub intercept: f64,
    pub noise_sd: f64,
    pub league: BTreeMap<String, f64>,
    pub club: BTreeMap<String, f64>,
    pub age_group: BTreeMap<String, f64>,
    pub height_group: BTreeMap<String, f64>,
    pub foot: BTreeMap<String, f64>,
    pub nationality: BTreeMap<String, f64>,
    pub outfitter: BTreeMap<String, f64>,
    pub match_group: BTreeMap<String, f64>,
    pub goal_contribution_slope: f64,
    pub card_score_slope: f64,
}

fn effect(map: &BTreeMap<String, f64>, attribute: &str, level: &str) -> Result<f64> {
    map.get(level).copied().ok_or_else(|| {
        Error::InvalidInput(format!("no generating effect for {attribute}={level}"))
    })
}

impl SynthTruth {
    /// Noise-free market value of a record.
    pub fn mean_value(&self, r: &PlayerRecord) -> Result<f64> {
        Ok(self.intercept
            + effect(&self.league, "league", &r.league)?
            + effect(&self.club, "club", &r.club)?
            + effect(&self.age_group, "age_group", AGE_GROUP_LABELS[age_group(r.age)?])?
            + effect(
                &self.height_group,
                "height_group",
                HEIGHT_GROUP_LABELS[height_group(r.height_cm)?],
            )?
            + effect(&self.foot, "foot", r.foot.as_str())?
            + effect(&self.nationality, "nationality", &r.nationality)?
            + effect(&self.outfitter, "outfitter", &r.outfitter)?
            + effect(&self.match_group, "match_group", &match_group(r.matches_played).to_string())?
            + self.goal_contribution_slope * goal_contribution(r.goals, r.assists)
            + self.card_score_slope * f64::from(card_score(r.yellow_cards, r.second_yellow_cards, r.red_cards)))
    }
}

fn draw_effects<'a>(
    rng: &mut ChaCha8Rng,
    levels: impl IntoIterator<Item = &'a str>,
    spread: f64,
) -> BTreeMap<String, f64> {
    levels
        .into_iter()
        .map(|l| (l.to_string(), round2(rng.random_range(-spread..=spread))))
        .collect()
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Generates `n` players and the truth they were drawn from. The output is a
/// pure function of `(seed, n)`.
pub fn generate(seed: u64, n: usize) -> Result<(Vec<PlayerRecord>, SynthTruth)> {
    if n < MIN_PLAYERS {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_PLAYERS} players are required, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut match_effects = BTreeMap::new();
    let mut level = 0.0;
    for g in 1..=MAX_MATCH_GROUP {
        match_effects.insert(g.to_string(), round2(level));
        level += rng.random_range(1.0..3.0);
    }
    let truth = SynthTruth {
        seed,
        n,
        intercept: 70.0,
        noise_sd: 5.0,
        league: draw_effects(&mut rng, LEAGUES, 8.0),
        club: draw_effects(&mut rng, CLUBS.iter().flatten().copied(), 6.0),
        age_group: draw_effects(&mut rng, AGE_GROUP_LABELS, 5.0),
        height_group: draw_effects(&mut rng, HEIGHT_GROUP_LABELS, 3.0),
        foot: draw_effects(&mut rng, [Foot::Both, Foot::Left, Foot::Right].map(Foot::as_str), 2.0),
        nationality: draw_effects(&mut rng, NATIONALITIES, 4.0),
        outfitter: draw_effects(&mut rng, OUTFITTERS, 2.0),
        match_group: match_effects,
        goal_contribution_slope: round2(rng.random_range(1.0..2.0)),
        card_score_slope: round2(rng.random_range(-0.8..-0.2)),
    };

    let nation_weights: Vec<f64> = (0..NATIONALITIES.len())
        .map(|i| 1.0 / (i as f64 + 1.0).powf(0.8))
        .collect();
    let nation_index = WeightedIndex::new(&nation_weights).expect("positive weights");
    let foot_index = WeightedIndex::new([6, 3, 1]).expect("positive weights");
    let noise = Normal::new(0.0, truth.noise_sd).expect("finite sd");

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let league = rng.random_range(0..LEAGUES.len());
        let club = *CLUBS[league].choose(&mut rng).expect("non-empty");
        let height: f64 = Normal::new(182.0, 6.0).expect("finite sd").sample(&mut rng);
        let short_season = rng.random_bool(0.03);
        let matches_played = if short_season {
            rng.random_range(4..=10)
        } else {
            rng.random_range(15..=45)
        };
        let per_match = rng.random_range(70..=88);
        let goals = rng.random_range(0..=matches_played * 3 / 5);
        let assists = rng.random_range(0..=matches_played / 3);
        let mut r = PlayerRecord {
            name: format!("Forward {:03}", i + 1),
            league: LEAGUES[league].to_string(),
            club: club.to_string(),
            age: rng.random_range(20..=34),
            height_cm: height.round().clamp(165.0, 199.0) as u32,
            foot: [Foot::Right, Foot::Left, Foot::Both][foot_index.sample(&mut rng)],
            nationality: NATIONALITIES[nation_index.sample(&mut rng)].to_string(),
            outfitter: OUTFITTERS.choose(&mut rng).expect("non-empty").to_string(),
            matches_played,
            goals,
            assists,
            yellow_cards: rng.random_range(0..=8),
            second_yellow_cards: u32::from(rng.random_bool(0.1)),
            red_cards: u32::from(rng.random_bool(0.05)),
            minutes_played: matches_played * per_match,
            market_value_m_eur: 0.0,
            mid_season_transfer: rng.random_bool(0.03),
        };
        let value = truth.mean_value(&r)? + noise.sample(&mut rng);
        r.market_value_m_eur = round2(value.max(0.01));
        records.push(r);
    }
    Ok((records, truth))
}

/// Coefficients the fit of `data` should recover on average: the
/// least-squares projection of the noise-free values onto the `retained`
/// columns. Entries for other columns are `None`.
///
/// `records` must be the rows `data` was encoded from, in the same order.
pub fn expected_coefficients(
    truth: &SynthTruth,
    records: &[PlayerRecord],
    data: &EncodedDataset,
    retained: &[usize],
) -> Result<Vec<Option<f64>>> {
    if records.len() != data.n_obs() {
        return Err(Error::InvalidInput(format!(
            "{} records but {} encoded rows",
            records.len(),
            data.n_obs()
        )));
    }
    let mean: Vec<f64> = records
        .iter()
        .map(|r| truth.mean_value(r))
        .collect::<Result<_>>()?;
    let x = data.design.select_columns(retained);
    let ls = least_squares_solve(&x, &mean)?;
    let mut out = vec![None; data.design.cols()];
    for (pos, &j) in retained.iter().enumerate() {
        out[j] = Some(ls.coefficients[pos]);
    }
    Ok(out)
}
