use chrono::NaiveDate;

use super::{EventStudyError, SpecSummary, MIN_ESTIMATION_OBS};
use crate::corpus::ReturnSeries;

pub const DEFAULT_ESTIMATION_LENGTH: usize = 251;
pub const DEFAULT_EVENT_LENGTH: usize = 61;

/// Event window definition; trading days are the market series' dates.
#[derive(Debug, Clone, PartialEq)]
pub struct EventWindowSpec {
    pub event_date: NaiveDate,
    pub estimation_length: usize,
    pub event_length: usize,
    pub market: ReturnSeries,
}

/// Resolved trading dates. Day 0 is `event[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventWindows {
    pub estimation: Vec<NaiveDate>,
    pub event: Vec<NaiveDate>,
}

impl EventWindowSpec {
    pub fn new(event_date: NaiveDate, market: ReturnSeries) -> Self {
        EventWindowSpec {
            event_date,
            estimation_length: DEFAULT_ESTIMATION_LENGTH,
            event_length: DEFAULT_EVENT_LENGTH,
            market,
        }
    }

    pub fn with_lengths(mut self, estimation_length: usize, event_length: usize) -> Self {
        self.estimation_length = estimation_length;
        self.event_length = event_length;
        self
    }

    pub fn validate(&self) -> Result<(), EventStudyError> {
        if self.estimation_length < MIN_ESTIMATION_OBS {
            return Err(EventStudyError::InvalidSpec(format!(
                "estimation_length {} < {MIN_ESTIMATION_OBS}",
                self.estimation_length
            )));
        }
        if self.event_length == 0 {
            return Err(EventStudyError::InvalidSpec(
                "event_length must be ≥ 1".into(),
            ));
        }
        Ok(())
    }

    /// Day 0 is the first market date on or after the event date; the
    /// estimation window is the `estimation_length` market dates before it.
    /// Both windows must fit entirely inside the market series.
    pub fn windows(&self) -> Result<EventWindows, EventStudyError> {
        self.validate()?;
        let dates: Vec<NaiveDate> = self.market.dates().collect();
        let day0 = dates.partition_point(|d| *d < self.event_date);
        if day0 == dates.len() {
            return Err(EventStudyError::NoTradingDay(self.event_date));
        }
        if day0 < self.estimation_length {
            return Err(EventStudyError::InvalidSpec(format!(
                "only {day0} market days before {}, estimation window needs {}",
                dates[day0], self.estimation_length
            )));
        }
        if day0 + self.event_length > dates.len() {
            return Err(EventStudyError::InvalidSpec(format!(
                "only {} market days from {}, event window needs {}",
                dates.len() - day0,
                dates[day0],
                self.event_length
            )));
        }
        Ok(EventWindows {
            estimation: dates[day0 - self.estimation_length..day0].to_vec(),
            event: dates[day0..day0 + self.event_length].to_vec(),
        })
    }

    pub(super) fn summary(&self, windows: &EventWindows) -> SpecSummary {
        SpecSummary {
            event_date: self.event_date,
            day0: windows.event[0],
            estimation_length: self.estimation_length,
            event_length: self.event_length,
            market: self.market.ticker.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;

    fn market(n: i64) -> ReturnSeries {
        let start = NaiveDate::from_ymd_opt(2021, 1, 4).unwrap();
        // Weekdays only so the event date can fall on a weekend.
        let obs = (0..)
            .map(|i| start + Duration::days(i))
            .filter(|d| chrono::Datelike::weekday(d).number_from_monday() <= 5)
            .take(n as usize)
            .map(|d| (d, 0.0))
            .collect();
        ReturnSeries::new("MKT", obs).unwrap()
    }

    #[test]
    fn day_zero_rolls_forward() {
        let m = market(400);
        let sat = NaiveDate::from_ymd_opt(2022, 2, 5).unwrap();
        let spec = EventWindowSpec::new(sat, m.clone());
        let w = spec.windows().unwrap();
        assert_eq!(w.event[0], NaiveDate::from_ymd_opt(2022, 2, 7).unwrap());
        assert_eq!(w.event.len(), 61);
        assert_eq!(w.estimation.len(), 251);
        assert!(w.estimation.last().unwrap() < &w.event[0]);
        let all: Vec<NaiveDate> = m.dates().collect();
        let idx = all.iter().position(|d| *d == w.event[0]).unwrap();
        assert_eq!(all[idx - 1], *w.estimation.last().unwrap());
    }

    #[test]
    fn invalid_windows() {
        let m = market(300);
        let late = NaiveDate::from_ymd_opt(2030, 1, 1).unwrap();
        assert!(matches!(
            EventWindowSpec::new(late, m.clone()).windows(),
            Err(EventStudyError::NoTradingDay(_))
        ));
        let early = NaiveDate::from_ymd_opt(2021, 3, 1).unwrap();
        assert!(EventWindowSpec::new(early, m.clone()).windows().is_err());
        let all: Vec<NaiveDate> = m.dates().collect();
        let near_end = all[280];
        assert!(EventWindowSpec::new(near_end, m.clone()).windows().is_err());
        let ok = all[260];
        assert!(EventWindowSpec::new(ok, m.clone())
            .with_lengths(29, 5)
            .windows()
            .is_err());
        assert!(EventWindowSpec::new(ok, m)
            .with_lengths(30, 0)
            .windows()
            .is_err());
    }
}
