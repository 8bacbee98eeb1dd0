//! Player records and their design-matrix encoding.
//!
//! Age, height and matches played are banded, then every categorical or
//! banded attribute is one-hot encoded with its first level dropped so the
//! dummies cannot reproduce the bias column. Goal contribution and card score
//! are the only continuous regressors and are standardized; dummies are not.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Foot {
    Left,
    Right,
    Both,
}

impl Foot {
    pub fn as_str(self) -> &'static str {
        match self {
            Foot::Left => "left",
            Foot::Right => "right",
            Foot::Both => "both",
        }
    }
}

impl fmt::Display for Foot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Foot {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "left" => Ok(Foot::Left),
            "right" => Ok(Foot::Right),
            "both" => Ok(Foot::Both),
            other => Err(format!("expected left, right or both, got {other:?}")),
        }
    }
}

/// One forward's attributes and season statistics. Market value is the response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerRecord {
    pub name: String,
    pub league: String,
    pub club: String,
    pub age: u32,
    pub height_cm: u32,
    pub foot: Foot,
    pub nationality: String,
    pub outfitter: String,
    pub matches_played: u32,
    pub goals: u32,
    pub assists: u32,
    /// Yellow cards that were not part of a two-yellow dismissal.
    pub yellow_cards: u32,
    /// Matches in which the player received two yellow cards.
    pub second_yellow_cards: u32,
    pub red_cards: u32,
    pub minutes_played: u32,
    pub market_value_m_eur: f64,
    pub mid_season_transfer: bool,
}

pub const AGE_GROUP_LABELS: [&str; 7] = ["20-21", "22-23", "24-25", "26-27", "28-29", "30-31", "32+"];
pub const HEIGHT_GROUP_LABELS: [&str; 7] = [
    "160-164", "165-169", "170-174", "175-179", "180-184", "185-189", "190+",
];

/// Two-year bands from 20–21 up to an open 32+ band.
pub fn age_group(age: u32) -> Result<usize> {
    if age < 20 {
        return Err(Error::OutOfRange {
            what: "age group (minimum 20)",
            value: i64::from(age),
        });
    }
    Ok((((age - 20) / 2) as usize).min(6))
}

/// Five-centimetre bands from 160–164 up to an open 190+ band.
pub fn height_group(height_cm: u32) -> Result<usize> {
    if height_cm < 160 {
        return Err(Error::OutOfRange {
            what: "height group (minimum 160 cm)",
            value: i64::from(height_cm),
        });
    }
    Ok((((height_cm - 160) / 5) as usize).min(6))
}

/// 0–15 matches map to 1, then +1 for every further band of five.
pub fn match_group(matches_played: u32) -> u32 {
    if matches_played <= 15 {
        1
    } else {
        1 + (matches_played - 15).div_ceil(5)
    }
}

pub fn goal_contribution(goals: u32, assists: u32) -> f64 {
    f64::from(goals) + f64::from(assists) / 2.0
}

pub fn card_score(yellow_cards: u32, second_yellow_cards: u32, red_cards: u32) -> u32 {
    yellow_cards + 2 * second_yellow_cards + 3 * red_cards
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Bias,
    Encoded,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMeta {
    pub name: String,
    pub kind: ColumnKind,
    pub source_attribute: String,
    /// Category level an encoded column indicates.
    pub level: Option<String>,
}

impl ColumnMeta {
    pub fn bias() -> Self {
        Self {
            name: "const".to_string(),
            kind: ColumnKind::Bias,
            source_attribute: "const".to_string(),
            level: None,
        }
    }

    pub fn continuous(name: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: ColumnKind::Continuous,
            source_attribute: name.to_string(),
            level: None,
        }
    }

    pub fn encoded(attribute: &str, level: &str) -> Self {
        Self {
            name: format!("{attribute}={level}"),
            kind: ColumnKind::Encoded,
            source_attribute: attribute.to_string(),
            level: Some(level.to_string()),
        }
    }
}

/// Centering and scaling applied to one continuous column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardization {
    pub column: String,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std_dev: f64,
    /// Set when the column had no spread; it is then left at zero after centering.
    pub zero_variance: bool,
}

/// Which level of each categorical attribute is left out of the design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DroppedLevel {
    #[default]
    First,
    Last,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub design: Matrix,
    pub columns: Vec<ColumnMeta>,
    /// Market values in millions of euros.
    pub response: Vec<f64>,
    pub standardization: Vec<Standardization>,
}

impl EncodedDataset {
    pub fn from_parts(design: Matrix, columns: Vec<ColumnMeta>, response: Vec<f64>) -> Result<Self> {
        if design.cols() != columns.len() {
            return Err(Error::InvalidInput(format!(
                "design has {} columns but {} column descriptions were given",
                design.cols(),
                columns.len()
            )));
        }
        if design.rows() != response.len() {
            return Err(Error::InvalidInput(format!(
                "design has {} rows but response has {} entries",
                design.rows(),
                response.len()
            )));
        }
        if columns
            .iter()
            .skip(1)
            .any(|c| c.kind == ColumnKind::Bias)
        {
            return Err(Error::InvalidInput(
                "a bias column may only appear first".to_string(),
            ));
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "response entry {i} is not finite"
            )));
        }
        Ok(Self {
            design,
            columns,
            response,
            standardization: Vec::new(),
        })
    }

    /// Dataset from raw regressor columns, optionally with a leading bias column.
    pub fn from_regressors(
        regressors: &[(&str, Vec<f64>)],
        response: Vec<f64>,
        with_bias: bool,
    ) -> Result<Self> {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut meta = Vec::new();
        if with_bias {
            cols.push(vec![1.0; response.len()]);
            meta.push(ColumnMeta::bias());
        }
        for (name, values) in regressors {
            cols.push(values.clone());
            meta.push(ColumnMeta::continuous(name));
        }
        let design = Matrix::from_columns(&cols)?;
        Self::from_parts(design, meta, response)
    }

    pub fn n_obs(&self) -> usize {
        self.response.len()
    }

    pub fn has_bias(&self) -> bool {
        self.columns.first().is_some_and(|c| c.kind == ColumnKind::Bias)
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Sub-dataset with the listed columns, in the order given.
    pub fn select_columns(&self, indices: &[usize]) -> EncodedDataset {
        let columns: Vec<ColumnMeta> = indices.iter().map(|&j| self.columns[j].clone()).collect();
        let standardization = self
            .standardization
            .iter()
            .filter(|s| columns.iter().any(|c| c.name == s.column))
            .cloned()
            .collect();
        EncodedDataset {
            design: self.design.select_columns(indices),
            columns,
            response: self.response.clone(),
            standardization,
        }
    }

    /// Names of continuous columns that had zero variance.
    pub fn zero_variance_columns(&self) -> Vec<&str> {
        self.standardization
            .iter()
            .filter(|s| s.zero_variance)
            .map(|s| s.column.as_str())
            .collect()
    }
}

/// Sort key for a level: banded attributes sort by band, text attributes by label.
type LevelKey = (u32, String);

struct Categorical {
    attribute: &'static str,
    values: Vec<LevelKey>,
}

/// Encodes records with the first level of each attribute dropped.
pub fn encode_dataset(records: &[PlayerRecord]) -> Result<EncodedDataset> {
    encode_dataset_with(records, DroppedLevel::First)
}

pub fn encode_dataset_with(records: &[PlayerRecord], dropped: DroppedLevel) -> Result<EncodedDataset> {
    if records.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "encoding needs at least 2 records, got {}",
            records.len()
        )));
    }
    let text = |f: fn(&PlayerRecord) -> String| -> Vec<LevelKey> {
        records.iter().map(|r| (0, f(r))).collect()
    };
    let mut ages = Vec::with_capacity(records.len());
    let mut heights = Vec::with_capacity(records.len());
    for r in records {
        let a = age_group(r.age)?;
        ages.push((a as u32, AGE_GROUP_LABELS[a].to_string()));
        let h = height_group(r.height_cm)?;
        heights.push((h as u32, HEIGHT_GROUP_LABELS[h].to_string()));
    }
    let categoricals = [
        Categorical {
            attribute: "league",
            values: text(|r| r.league.clone()),
        },
        Categorical {
            attribute: "club",
            values: text(|r| r.club.clone()),
        },
        Categorical {
            attribute: "age_group",
            values: ages,
        },
        Categorical {
            attribute: "height_group",
            values: heights,
        },
        Categorical {
            attribute: "foot",
            values: text(|r| r.foot.as_str().to_string()),
        },
        Categorical {
            attribute: "nationality",
            values: text(|r| r.nationality.clone()),
        },
        Categorical {
            attribute: "outfitter",
            values: text(|r| r.outfitter.clone()),
        },
        Categorical {
            attribute: "match_group",
            values: records
                .iter()
                .map(|r| {
                    let g = match_group(r.matches_played);
                    (g, g.to_string())
                })
                .collect(),
        },
    ];

    let n = records.len();
    let mut columns: Vec<Vec<f64>> = vec![vec![1.0; n]];
    let mut meta = vec![ColumnMeta::bias()];

    for cat in &categoricals {
        let levels: BTreeSet<&LevelKey> = cat.values.iter().collect();
        let kept: Vec<&LevelKey> = match dropped {
            DroppedLevel::First => levels.iter().skip(1).copied().collect(),
            DroppedLevel::Last => {
                let mut v: Vec<&LevelKey> = levels.iter().copied().collect();
                v.pop();
                v
            }
        };
        for level in kept {
            columns.push(
                cat.values
                    .iter()
                    .map(|v| if v == level { 1.0 } else { 0.0 })
                    .collect(),
            );
            meta.push(ColumnMeta::encoded(cat.attribute, &level.1));
        }
    }

    let continuous: [(&str, Vec<f64>); 2] = [
        (
            "goal_contribution",
            records
                .iter()
                .map(|r| goal_contribution(r.goals, r.assists))
                .collect(),
        ),
        (
            "card_score",
            records
                .iter()
                .map(|r| f64::from(card_score(r.yellow_cards, r.second_yellow_cards, r.red_cards)))
                .collect(),
        ),
    ];
    let mut standardization = Vec::new();
    for (name, raw) in continuous {
        let (values, params) = standardize(name, &raw);
        columns.push(values);
        meta.push(ColumnMeta::continuous(name));
        standardization.push(params);
    }

    let design = Matrix::from_columns(&columns)?;
    let response = records.iter().map(|r| r.market_value_m_eur).collect();
    let mut data = EncodedDataset::from_parts(design, meta, response)?;
    data.standardization = standardization;
    Ok(data)
}

fn standardize(name: &str, raw: &[f64]) -> (Vec<f64>, Standardization) {
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let var = centered.iter().map(|v| v * v).sum::<f64>() / (n - 1.0);
    let std_dev = var.sqrt();
    let zero_variance = !(std_dev > 0.0);
    let values = if zero_variance {
        vec![0.0; raw.len()]
    } else {
        centered.iter().map(|v| v / std_dev).collect()
    };
    (
        values,
        Standardization {
            column: name.to_string(),
            mean,
            std_dev,
            zero_variance,
        },
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn player(name: &str, club: &str) -> PlayerRecord {
        PlayerRecord {
            name: name.to_string(),
            league: "Serie A".to_string(),
            club: club.to_string(),
            age: 25,
            height_cm: 181,
            foot: Foot::Right,
            nationality: "Italy".to_string(),
            outfitter: "Nike".to_string(),
            matches_played: 30,
            goals: 10,
            assists: 4,
            yellow_cards: 2,
            second_yellow_cards: 0,
            red_cards: 0,
            minutes_played: 2400,
            market_value_m_eur: 40.0,
            mid_season_transfer: false,
        }
    }

    #[test]
    fn age_bands() {
        assert_eq!(age_group(20).unwrap(), 0);
        assert_eq!(age_group(21).unwrap(), 0);
        assert_eq!(age_group(31).unwrap(), 5);
        assert_eq!(age_group(32).unwrap(), 6);
        assert_eq!(age_group(33).unwrap(), 6);
        assert!(matches!(age_group(19), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn height_bands() {
        assert_eq!(height_group(160).unwrap(), 0);
        assert_eq!(height_group(184).unwrap(), 4);
        assert_eq!(height_group(185).unwrap(), 5);
        assert_eq!(height_group(191).unwrap(), 6);
        assert!(height_group(159).is_err());
    }

    #[test]
    fn match_bands() {
        assert_eq!(match_group(20), 2);
        assert_eq!(match_group(40), 6);
        assert_eq!(match_group(11), 1);
        assert_eq!(match_group(2), 1);
        assert_eq!(match_group(0), 1);
        assert_eq!(match_group(15), 1);
        assert_eq!(match_group(16), 2);
        assert_eq!(match_group(21), 3);
        assert_eq!(match_group(36), 6);
    }

    #[test]
    fn derived_statistics() {
        assert_eq!(goal_contribution(0, 0), 0.0);
        assert_eq!(goal_contribution(10, 4), 12.0);
        assert_eq!(goal_contribution(7, 3), 8.5);
        assert_eq!(card_score(0, 0, 0), 0);
        assert_eq!(card_score(2, 0, 1), 5);
        assert_eq!(card_score(3, 1, 0), 5);
    }

    #[test]
    fn three_clubs_give_two_columns() {
        let recs = vec![player("a", "A"), player("b", "B"), player("c", "C")];
        let data = encode_dataset(&recs).unwrap();
        let clubs: Vec<_> = data
            .columns
            .iter()
            .filter(|c| c.source_attribute == "club")
            .map(|c| c.level.clone().unwrap())
            .collect();
        assert_eq!(clubs, vec!["B", "C"]);
    }

    #[test]
    fn constant_card_score_is_flagged() {
        let mut recs = vec![player("a", "A"), player("b", "B"), player("c", "C")];
        recs[1].goals = 3;
        let data = encode_dataset(&recs).unwrap();
        assert_eq!(data.zero_variance_columns(), vec!["card_score"]);
        let j = data.column_index("card_score").unwrap();
        assert!(data.design.column(j).iter().all(|&v| v == 0.0));
        let g = data.column_index("goal_contribution").unwrap();
        assert!(data.design.column(g).iter().any(|&v| v != 0.0));
    }

    #[test]
    fn single_level_attributes_add_no_columns() {
        let recs = vec![player("a", "A"), player("b", "A")];
        let data = encode_dataset(&recs).unwrap();
        // Only the bias and the two continuous columns remain.
        assert_eq!(data.column_names(), vec!["const", "goal_contribution", "card_score"]);
    }

    #[test]
    fn too_few_records() {
        assert!(matches!(
            encode_dataset(&[player("a", "A")]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn underage_record_is_rejected() {
        let mut recs = vec![player("a", "A"), player("b", "B")];
        recs[0].age = 18;
        assert!(matches!(encode_dataset(&recs), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn match_groups_sort_numerically() {
        let mut recs = vec![player("a", "A"), player("b", "B"), player("c", "C")];
        recs[0].matches_played = 10; // group 1, dropped
        recs[1].matches_played = 20; // group 2
        recs[2].matches_played = 60; // group 10
        let data = encode_dataset(&recs).unwrap();
        let levels: Vec<_> = data
            .columns
            .iter()
            .filter(|c| c.source_attribute == "match_group")
            .map(|c| c.name.clone())
            .collect();
        assert_eq!(levels, vec!["match_group=2", "match_group=10"]);
    }
}
