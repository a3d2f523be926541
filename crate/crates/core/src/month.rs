use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A UTC calendar month.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Option<Self> {
        (1..=12)
            .contains(&month)
            .then_some(YearMonth { year, month })
    }

    pub fn from_timestamp(seconds: i64) -> Self {
        let dt = DateTime::from_timestamp(seconds, 0).expect("timestamp in chrono range");
        YearMonth {
            year: dt.year(),
            month: dt.month() as u8,
        }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    /// Months since year 0, used for month arithmetic.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    pub fn from_ordinal(ord: i64) -> Self {
        YearMonth {
            year: ord.div_euclid(12) as i32,
            month: (ord.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// `self - earlier` in months.
    pub fn months_since(self, earlier: YearMonth) -> i64 {
        self.ordinal() - earlier.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid year-month `{0}` (expected YYYY-MM)")]
pub struct ParseYearMonthError(String);

impl FromStr for YearMonth {
    type Err = ParseYearMonthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseYearMonthError(s.to_string());
        let (y, m) = s.rsplit_once('-').ok_or_else(err)?;
        let year = y.parse().map_err(|_| err())?;
        let month = m.parse().map_err(|_| err())?;
        YearMonth::new(year, month).ok_or_else(err)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leap_day_maps_to_february() {
        assert_eq!(
            YearMonth::from_timestamp(1_456_704_000).to_string(),
            "2016-02"
        );
    }

    #[test]
    fn month_boundaries_are_utc() {
        // 2016-03-01T00:00:00Z and one second earlier
        assert_eq!(
            YearMonth::from_timestamp(1_456_790_400).to_string(),
            "2016-03"
        );
        assert_eq!(
            YearMonth::from_timestamp(1_456_790_399).to_string(),
            "2016-02"
        );
    }

    #[test]
    fn ordinal_arithmetic() {
        let m: YearMonth = "2015-11".parse().unwrap();
        assert_eq!(m.offset(2).to_string(), "2016-01");
        assert_eq!(m.offset(-11).to_string(), "2014-12");
        assert_eq!("2016-11".parse::<YearMonth>().unwrap().months_since(m), 12);
        assert!("2016-13".parse::<YearMonth>().is_err());
    }
}
