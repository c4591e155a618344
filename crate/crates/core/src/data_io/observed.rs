use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Daily active-case counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedSeries {
    pub dates: Vec<NaiveDate>,
    pub active_cases: Vec<u64>,
}

impl ObservedSeries {
    pub fn new(dates: Vec<NaiveDate>, active_cases: Vec<u64>) -> Result<Self> {
        if dates.len() != active_cases.len() {
            return Err(Error::Validation(format!(
                "{} dates but {} counts",
                dates.len(),
                active_cases.len()
            )));
        }
        if dates.is_empty() {
            return Err(Error::Validation("observed series is empty".into()));
        }
        if let Some(k) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Validation(format!(
                "dates not strictly increasing at row {}",
                k + 2
            )));
        }
        Ok(Self {
            dates,
            active_cases,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

#[derive(Deserialize)]
struct Row {
    date: String,
    active_cases: String,
}

pub fn parse_observed(reader: impl std::io::Read, origin: &str) -> Result<ObservedSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let data_err = |row: usize, message: String| Error::Data {
        path: origin.to_string(),
        row,
        message,
    };
    let headers = rdr
        .headers()
        .map_err(|e| data_err(0, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["date", "active_cases"] {
        return Err(data_err(
            0,
            format!("expected header `date,active_cases`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut dates = Vec::new();
    let mut counts = Vec::new();
    for (idx, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = idx + 1;
        let rec = rec.map_err(|e| data_err(row, e.to_string()))?;
        let date = NaiveDate::parse_from_str(&rec.date, "%Y-%m-%d")
            .map_err(|e| data_err(row, format!("bad date `{}`: {e}", rec.date)))?;
        let count = rec
            .active_cases
            .parse::<u64>()
            .map_err(|_| data_err(row, format!("bad count `{}`", rec.active_cases)))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(data_err(row, format!("date {date} does not follow {prev}")));
            }
        }
        dates.push(date);
        counts.push(count);
    }
    if dates.is_empty() {
        return Err(data_err(0, "no data rows".into()));
    }
    ObservedSeries::new(dates, counts)
}

pub fn load_observed(path: impl AsRef<Path>) -> Result<ObservedSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_observed(file, &path.display().to_string())
}
