//! Player CSV parsing and eligibility filtering.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{Foot, PlayerRecord};

/// Required header, in order.
pub const CSV_HEADER: [&str; 17] = [
    "name",
    "league",
    "club",
    "age",
    "height_cm",
    "foot",
    "nationality",
    "outfitter",
    "matches_played",
    "goals",
    "assists",
    "yellow_cards",
    "second_yellow_cards",
    "red_cards",
    "minutes_played",
    "market_value_m_eur",
    "mid_season_transfer",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterConfig {
    pub min_age: u32,
    pub max_age: u32,
    pub min_minutes: u32,
    pub min_market_value_m_eur: f64,
    pub exclude_mid_season_transfers: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_age: 20,
            max_age: 34,
            min_minutes: 1000,
            min_market_value_m_eur: 20.0,
            exclude_mid_season_transfers: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_age > self.max_age {
            return Err(Error::InvalidInput(format!(
                "min_age {} exceeds max_age {}",
                self.min_age, self.max_age
            )));
        }
        if !(self.min_market_value_m_eur >= 0.0) || !self.min_market_value_m_eur.is_finite() {
            return Err(Error::InvalidInput(format!(
                "minimum market value must be a finite non-negative number, got {}",
                self.min_market_value_m_eur
            )));
        }
        Ok(())
    }
}

/// Eligibility rules in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterRule {
    Age,
    MidSeasonTransfer,
    MarketValue,
    Minutes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exclusion {
    pub name: String,
    pub rule: FilterRule,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExclusionLog {
    pub entries: Vec<Exclusion>,
}

impl ExclusionLog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub accepted: Vec<PlayerRecord>,
    pub log: ExclusionLog,
}

/// First rule the record fails, if any.
pub fn first_failing_rule(record: &PlayerRecord, cfg: &FilterConfig) -> Option<FilterRule> {
    if record.age < cfg.min_age || record.age > cfg.max_age {
        Some(FilterRule::Age)
    } else if cfg.exclude_mid_season_transfers && record.mid_season_transfer {
        Some(FilterRule::MidSeasonTransfer)
    } else if record.market_value_m_eur < cfg.min_market_value_m_eur {
        Some(FilterRule::MarketValue)
    } else if record.minutes_played < cfg.min_minutes {
        Some(FilterRule::Minutes)
    } else {
        None
    }
}

/// Splits records into accepted ones and a log naming the first rule each
/// rejected record failed. Thresholds are inclusive: a player at exactly the
/// minimum minutes or value is kept.
pub fn apply_filters(records: &[PlayerRecord], cfg: &FilterConfig) -> Filtered {
    let mut accepted = Vec::new();
    let mut log = ExclusionLog::default();
    for r in records {
        match first_failing_rule(r, cfg) {
            None => accepted.push(r.clone()),
            Some(rule) => log.entries.push(Exclusion {
                name: r.name.clone(),
                rule,
            }),
        }
    }
    Filtered { accepted, log }
}

/// Reads player records. An empty input or a header with no rows yields an
/// empty list.
pub fn parse_players_csv<R: Read>(reader: R) -> Result<Vec<PlayerRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        None => return Ok(Vec::new()),
        Some(h) => h.map_err(|e| Error::Schema(format!("unreadable header: {e}")))?,
    };
    check_header(&header)?;

    let mut out = Vec::new();
    for (i, rec) in records.enumerate() {
        let fallback_row = i as u64 + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row: e.position().map_or(fallback_row, |p| p.line()),
            column: String::new(),
            message: e.to_string(),
        })?;
        let row = rec.position().map_or(fallback_row, |p| p.line());
        if rec.len() == 1 && rec.get(0).is_some_and(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
            });
        }
        out.push(parse_row(&rec, row)?);
    }
    Ok(out)
}

fn check_header(header: &csv::StringRecord) -> Result<()> {
    let names: Vec<&str> = header
        .iter()
        .enumerate()
        .map(|(i, h)| if i == 0 { h.trim_start_matches('\u{feff}') } else { h })
        .map(str::trim)
        .collect();
    if let Some(missing) = CSV_HEADER.iter().find(|c| !names.contains(c)) {
        return Err(Error::Schema(format!("missing column \"{missing}\"")));
    }
    if let Some(extra) = names.iter().find(|n| !CSV_HEADER.contains(n)) {
        return Err(Error::Schema(format!("unexpected column \"{extra}\"")));
    }
    if names.len() != CSV_HEADER.len() {
        return Err(Error::Schema(format!(
            "header has {} columns, expected {}",
            names.len(),
            CSV_HEADER.len()
        )));
    }
    if let Some(pos) = names.iter().zip(CSV_HEADER).position(|(a, b)| *a != b) {
        return Err(Error::Schema(format!(
            "column \"{}\" found where \"{}\" was expected",
            names[pos], CSV_HEADER[pos]
        )));
    }
    Ok(())
}

struct Row<'a> {
    rec: &'a csv::StringRecord,
    row: u64,
}

impl Row<'_> {
    fn raw(&self, col: usize) -> &str {
        self.rec.get(col).unwrap_or("").trim()
    }

    fn err(&self, col: usize, message: String) -> Error {
        Error::Parse {
            row: self.row,
            column: CSV_HEADER[col].to_string(),
            message,
        }
    }

    fn text(&self, col: usize) -> Result<String> {
        let v = self.raw(col);
        if v.is_empty() {
            return Err(self.err(col, "value is empty".to_string()));
        }
        Ok(v.to_string())
    }

    fn count(&self, col: usize) -> Result<u32> {
        let v = self.raw(col);
        v.parse::<u32>()
            .map_err(|_| self.err(col, format!("expected a non-negative integer, got {v:?}")))
    }

    fn bounded(&self, col: usize, lo: u32, hi: u32) -> Result<u32> {
        let v = self.count(col)?;
        if v < lo || v > hi {
            return Err(self.err(col, format!("{v} is outside [{lo}, {hi}]")));
        }
        Ok(v)
    }
}

fn parse_row(rec: &csv::StringRecord, row: u64) -> Result<PlayerRecord> {
    let r = Row { rec, row };
    let foot = r
        .raw(5)
        .parse::<Foot>()
        .map_err(|msg| r.err(5, msg))?;
    let value_raw = r.raw(15);
    let market_value_m_eur = value_raw
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| r.err(15, format!("expected a decimal number, got {value_raw:?}")))?;
    if !(market_value_m_eur > 0.0) {
        return Err(r.err(15, format!("market value must be positive, got {market_value_m_eur}")));
    }
    let mid_season_transfer = match r.raw(16) {
        "0" => false,
        "1" => true,
        other => return Err(r.err(16, format!("expected 0 or 1, got {other:?}"))),
    };
    Ok(PlayerRecord {
        name: r.text(0)?,
        league: r.text(1)?,
        club: r.text(2)?,
        age: r.bounded(3, 15, 120)?,
        height_cm: r.bounded(4, 140, 220)?,
        foot,
        nationality: r.text(6)?,
        outfitter: r.text(7)?,
        matches_played: r.count(8)?,
        goals: r.count(9)?,
        assists: r.count(10)?,
        yellow_cards: r.count(11)?,
        second_yellow_cards: r.count(12)?,
        red_cards: r.count(13)?,
        minutes_played: r.count(14)?,
        market_value_m_eur,
        mid_season_transfer,
    })
}

/// Writes records in the input schema.
pub fn write_players_csv<W: Write>(writer: W, records: &[PlayerRecord]) -> Result<()> {
    let io_err = |e: csv::Error| Error::InvalidInput(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in records {
        w.write_record([
            r.name.clone(),
            r.league.clone(),
            r.club.clone(),
            r.age.to_string(),
            r.height_cm.to_string(),
            r.foot.to_string(),
            r.nationality.clone(),
            r.outfitter.clone(),
            r.matches_played.to_string(),
            r.goals.to_string(),
            r.assists.to_string(),
            r.yellow_cards.to_string(),
            r.second_yellow_cards.to_string(),
            r.red_cards.to_string(),
            r.minutes_played.to_string(),
            r.market_value_m_eur.to_string(),
            u8::from(r.mid_season_transfer).to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))
}
