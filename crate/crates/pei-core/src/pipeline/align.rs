//! Calendar alignment of dated series.
//!
//! Market series skip closure days; the index and case series run on the
//! full calendar. The alignment policy makes the join explicit instead of
//! silently dropping or inventing data.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// How to reconcile mismatched calendars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentPolicy {
    /// Keep only dates present in every series.
    DropClosedDays,
    /// Union of all dates; absent values become 0 (the closed-market
    /// convention for a price-change series).
    ZeroFill,
}

impl AlignmentPolicy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "drop_closed_days" => Ok(AlignmentPolicy::DropClosedDays),
            "zero_fill" => Ok(AlignmentPolicy::ZeroFill),
            other => Err(Error::Argument(format!(
                "unknown alignment policy '{other}' (expected drop_closed_days or zero_fill)"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlignmentPolicy::DropClosedDays => "drop_closed_days",
            AlignmentPolicy::ZeroFill => "zero_fill",
        }
    }
}

/// Series on a shared calendar with no missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    pub dates: Vec<NaiveDate>,
    pub series: BTreeMap<String, Vec<f64>>,
    /// Policy that produced the panel; recorded in report metadata.
    pub policy: AlignmentPolicy,
}

impl AlignedPanel {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Align named `(date, value)` series onto one calendar.
///
/// Inputs must be sorted by date without duplicate dates.
pub fn align(
    series_map: &BTreeMap<String, Vec<(NaiveDate, f64)>>,
    policy: AlignmentPolicy,
) -> Result<AlignedPanel> {
    if series_map.is_empty() {
        return Err(Error::Argument("no series to align".into()));
    }
    for (name, series) in series_map {
        if series.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Argument(format!(
                "series '{name}' is not strictly sorted by date"
            )));
        }
    }

    let date_sets: Vec<BTreeSet<NaiveDate>> = series_map
        .values()
        .map(|s| s.iter().map(|(d, _)| *d).collect())
        .collect();
    let dates: Vec<NaiveDate> = match policy {
        AlignmentPolicy::DropClosedDays => {
            let mut iter = date_sets.iter();
            let first = iter.next().expect("non-empty").clone();
            let shared =
                iter.fold(first, |acc, s| acc.intersection(s).copied().collect());
            if shared.is_empty() {
                return Err(Error::Alignment(
                    "no date is shared by every series under drop_closed_days".into(),
                ));
            }
            shared.into_iter().collect()
        }
        AlignmentPolicy::ZeroFill => {
            let mut union = BTreeSet::new();
            for s in &date_sets {
                union.extend(s.iter().copied());
            }
            union.into_iter().collect()
        }
    };

    let mut series = BTreeMap::new();
    for (name, raw) in series_map {
        let by_date: BTreeMap<NaiveDate, f64> = raw.iter().copied().collect();
        let values = dates
            .iter()
            .map(|d| by_date.get(d).copied().unwrap_or(0.0))
            .collect();
        series.insert(name.clone(), values);
    }
    Ok(AlignedPanel { dates, series, policy })
}
