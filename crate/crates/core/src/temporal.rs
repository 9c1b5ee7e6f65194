//! Temporal literals at three granularities, each read as a half-open UTC
//! interval so values of different granularity can be ordered.
//!
//! Calendar is proleptic Gregorian without leap seconds. Literals without a
//! timezone are taken as UTC.

use crate::vocab::{TIME, XSD};
use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemporalError {
    #[error("malformed {datatype} lexical form {lexical:?}")]
    Malformed { lexical: String, datatype: &'static str },
    #[error("month out of range in {0:?}")]
    MonthOutOfRange(String),
    #[error("day out of range in {0:?}")]
    DayOutOfRange(String),
    #[error("time of day out of range in {0:?}")]
    TimeOutOfRange(String),
    #[error("timezone offset out of range in {0:?}")]
    OffsetOutOfRange(String),
    #[error("unsupported temporal datatype {0}")]
    UnsupportedDatatype(String),
    #[error("interval start {start} is not before end {end}")]
    EmptyInterval { start: String, end: String },
    #[error("year outside the supported range in {0:?}")]
    YearOutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Granularity {
    DateTime,
    Date,
    Year,
}

impl Granularity {
    pub fn datatype_iri(self) -> String {
        format!("{XSD}{}", self.datatype_local())
    }

    fn datatype_local(self) -> &'static str {
        match self {
            Granularity::DateTime => "dateTime",
            Granularity::Date => "date",
            Granularity::Year => "gYear",
        }
    }

    /// The OWL-Time property linking an instant to a literal of this
    /// granularity.
    pub fn predicate_iri(self) -> String {
        let local = match self {
            Granularity::DateTime => "inXSDDateTime",
            Granularity::Date => "inXSDDate",
            Granularity::Year => "inXSDgYear",
        };
        format!("{TIME}{local}")
    }

    pub fn from_datatype(iri: &str) -> Result<Granularity, TemporalError> {
        let local = iri.strip_prefix(XSD).or_else(|| iri.strip_prefix("xsd:"));
        match local {
            Some("dateTime") => Ok(Granularity::DateTime),
            Some("date") => Ok(Granularity::Date),
            Some("gYear") => Ok(Granularity::Year),
            _ => Err(TemporalError::UnsupportedDatatype(iri.to_string())),
        }
    }
}

/// A validated literal plus its interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TemporalLiteral {
    lexical: String,
    granularity: Granularity,
    interval: TimeInterval,
}

/// Half-open interval [start, end) in UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct TimeInterval {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

#[derive(Deserialize)]
struct RawInterval {
    start: DateTime<Utc>,
    end: DateTime<Utc>,
}

impl TryFrom<RawInterval> for TimeInterval {
    type Error = TemporalError;

    fn try_from(r: RawInterval) -> Result<Self, TemporalError> {
        TimeInterval::new(r.start, r.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalRelation {
    Before,
    After,
    Intersects,
}

impl TimeInterval {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<TimeInterval, TemporalError> {
        if start >= end {
            return Err(TemporalError::EmptyInterval { start: start.to_rfc3339(), end: end.to_rfc3339() });
        }
        Ok(TimeInterval { start, end })
    }

    /// Interval covering the calendar years `from..to` (exclusive).
    pub fn years(from: i32, to: i32) -> Result<TimeInterval, TemporalError> {
        let at = |y: i32| Utc.with_ymd_and_hms(y, 1, 1, 0, 0, 0).single();
        match (at(from), at(to)) {
            (Some(s), Some(e)) => TimeInterval::new(s, e),
            _ => Err(TemporalError::YearOutOfRange(format!("{from}..{to}"))),
        }
    }

    pub fn compare(&self, other: &TimeInterval) -> TemporalRelation {
        if self.end <= other.start {
            TemporalRelation::Before
        } else if other.end <= self.start {
            TemporalRelation::After
        } else {
            TemporalRelation::Intersects
        }
    }

    pub fn intersects(&self, other: &TimeInterval) -> bool {
        self.compare(other) == TemporalRelation::Intersects
    }

    pub fn contains_instant(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t < self.end
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", format_instant(self.start), format_instant(self.end))
    }
}

/// xsd:dateTime lexical form of a UTC instant, second precision.
pub fn format_instant(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

impl TemporalLiteral {
    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn datatype_iri(&self) -> String {
        self.granularity.datatype_iri()
    }

    pub fn predicate_iri(&self) -> String {
        self.granularity.predicate_iri()
    }

    pub fn to_interval(&self) -> TimeInterval {
        self.interval
    }

    /// Guesses the granularity from the shape of the lexical form: a bare
    /// year, a date, or a dateTime.
    pub fn infer(lexical: &str) -> Result<TemporalLiteral, TemporalError> {
        let body = lexical.strip_prefix('-').unwrap_or(lexical);
        let granularity = if body.contains('T') {
            Granularity::DateTime
        } else if body.len() >= 10 && body.as_bytes().get(4) == Some(&b'-') {
            Granularity::Date
        } else {
            Granularity::Year
        };
        parse_with(lexical, granularity)
    }

    /// The literal for a UTC instant at dateTime granularity.
    pub fn instant(t: DateTime<Utc>) -> TemporalLiteral {
        let lexical = format_instant(t);
        parse_with(&lexical, Granularity::DateTime).expect("formatted instants are valid")
    }
}

impl Serialize for TemporalLiteral {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.lexical)
    }
}

/// Deserialized from the bare lexical form, granularity inferred.
impl<'de> Deserialize<'de> for TemporalLiteral {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        TemporalLiteral::infer(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for TemporalLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^xsd:{}", self.lexical, self.granularity.datatype_local())
    }
}

pub fn parse_temporal(lexical: &str, datatype: &str) -> Result<TemporalLiteral, TemporalError> {
    parse_with(lexical, Granularity::from_datatype(datatype)?)
}

pub fn compare(a: &TemporalLiteral, b: &TemporalLiteral) -> TemporalRelation {
    a.interval.compare(&b.interval)
}

struct Scanner<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    fn digits(&mut self, min: usize, max: usize) -> Option<(i64, usize)> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() && self.pos - start < max {
            self.pos += 1;
        }
        let n = self.pos - start;
        if n < min {
            return None;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).ok()?;
        Some((text.parse().ok()?, n))
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn done(&self) -> bool {
        self.pos == self.s.len()
    }
}

fn parse_with(lexical: &str, granularity: Granularity) -> Result<TemporalLiteral, TemporalError> {
    let malformed = || TemporalError::Malformed { lexical: lexical.to_string(), datatype: granularity.datatype_local() };
    let mut sc = Scanner { s: lexical.as_bytes(), pos: 0 };
    let negative = sc.eat(b'-');
    let (year_abs, ndigits) = sc.digits(4, 9).ok_or_else(malformed)?;
    // more than four digits may not start with zero
    if ndigits > 4 && lexical.as_bytes()[usize::from(negative)] == b'0' {
        return Err(malformed());
    }
    let year = i32::try_from(if negative { -year_abs } else { year_abs }).map_err(|_| malformed())?;
    let (mut month, mut day) = (1u32, 1u32);
    let (mut hour, mut minute, mut second, mut nanos) = (0u32, 0u32, 0u32, 0u32);
    if granularity != Granularity::Year {
        if !sc.eat(b'-') {
            return Err(malformed());
        }
        month = sc.digits(2, 2).ok_or_else(malformed)?.0 as u32;
        if !sc.eat(b'-') {
            return Err(malformed());
        }
        day = sc.digits(2, 2).ok_or_else(malformed)?.0 as u32;
        if !(1..=12).contains(&month) {
            return Err(TemporalError::MonthOutOfRange(lexical.to_string()));
        }
    }
    if granularity == Granularity::DateTime {
        if !sc.eat(b'T') {
            return Err(malformed());
        }
        hour = sc.digits(2, 2).ok_or_else(malformed)?.0 as u32;
        if !sc.eat(b':') {
            return Err(malformed());
        }
        minute = sc.digits(2, 2).ok_or_else(malformed)?.0 as u32;
        if !sc.eat(b':') {
            return Err(malformed());
        }
        second = sc.digits(2, 2).ok_or_else(malformed)?.0 as u32;
        if sc.eat(b'.') {
            let start = sc.pos;
            while sc.s.get(sc.pos).is_some_and(u8::is_ascii_digit) {
                sc.pos += 1;
            }
            let frac = &lexical[start..sc.pos];
            if frac.is_empty() {
                return Err(malformed());
            }
            // nanosecond precision is plenty; the interval is floored to the second anyway
            nanos = format!("{:0<9}", &frac[..frac.len().min(9)]).parse().map_err(|_| malformed())?;
        }
        let end_of_day = hour == 24 && minute == 0 && second == 0 && nanos == 0;
        if (hour > 23 && !end_of_day) || minute > 59 || second > 59 {
            return Err(TemporalError::TimeOutOfRange(lexical.to_string()));
        }
    }
    let offset_minutes = parse_offset(&mut sc, lexical).map_err(|e| e.unwrap_or_else(malformed))?;
    if !sc.done() {
        return Err(malformed());
    }
    let date = NaiveDate::from_ymd_opt(year, month, day).ok_or_else(|| {
        if NaiveDate::from_ymd_opt(year, 1, 1).is_none() {
            TemporalError::YearOutOfRange(lexical.to_string())
        } else {
            TemporalError::DayOutOfRange(lexical.to_string())
        }
    })?;
    let local = if hour == 24 {
        date.and_hms_opt(0, 0, 0).map(|d| d + Duration::days(1))
    } else {
        date.and_hms_nano_opt(hour, minute, second, nanos)
    }
    .ok_or_else(|| TemporalError::TimeOutOfRange(lexical.to_string()))?;
    let start_local: NaiveDateTime = match granularity {
        Granularity::DateTime => local.with_nanosecond_zero(),
        _ => local,
    };
    let start = Utc.from_utc_datetime(&start_local) - Duration::minutes(offset_minutes);
    let end = match granularity {
        Granularity::DateTime => start + Duration::seconds(1),
        Granularity::Date => start + Duration::days(1),
        Granularity::Year => {
            let next = NaiveDate::from_ymd_opt(year + 1, 1, 1)
                .ok_or_else(|| TemporalError::YearOutOfRange(lexical.to_string()))?
                .and_hms_opt(0, 0, 0)
                .expect("midnight exists");
            Utc.from_utc_datetime(&next) - Duration::minutes(offset_minutes)
        }
    };
    Ok(TemporalLiteral { lexical: lexical.to_string(), granularity, interval: TimeInterval { start, end } })
}

trait NanoZero {
    fn with_nanosecond_zero(self) -> Self;
}

impl NanoZero for NaiveDateTime {
    fn with_nanosecond_zero(self) -> Self {
        use chrono::Timelike;
        self.with_nanosecond(0).expect("zero nanoseconds is valid")
    }
}

/// Optional `Z` or `±hh:mm`; returns the offset east of UTC in minutes.
fn parse_offset(sc: &mut Scanner, lexical: &str) -> Result<i64, Option<TemporalError>> {
    if sc.eat(b'Z') {
        return Ok(0);
    }
    let sign = if sc.eat(b'+') {
        1
    } else if sc.eat(b'-') {
        -1
    } else {
        return Ok(0);
    };
    let h = sc.digits(2, 2).ok_or(None)?.0;
    if !sc.eat(b':') {
        return Err(None);
    }
    let m = sc.digits(2, 2).ok_or(None)?.0;
    if m > 59 || h > 14 || (h == 14 && m > 0) {
        return Err(Some(TemporalError::OffsetOutOfRange(lexical.to_string())));
    }
    Ok(sign * (h * 60 + m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xsd(local: &str) -> String {
        format!("{XSD}{local}")
    }

    fn lit(lexical: &str, dt: &str) -> TemporalLiteral {
        parse_temporal(lexical, &xsd(dt)).unwrap()
    }

    #[test]
    fn template_rows() {
        let dt = lit("1950-01-03T11:00:00+06:00", "dateTime");
        assert_eq!(dt.granularity(), Granularity::DateTime);
        assert_eq!(dt.predicate_iri(), "http://www.w3.org/2006/time#inXSDDateTime");
        let d = lit("1950-01-03", "date");
        assert_eq!(d.datatype_iri(), xsd("date"));
        assert_eq!(d.predicate_iri(), "http://www.w3.org/2006/time#inXSDDate");
        let y = lit("1950", "gYear");
        assert_eq!(y.granularity(), Granularity::Year);
        assert_eq!(y.predicate_iri(), "http://www.w3.org/2006/time#inXSDgYear");
    }

    #[test]
    fn intervals() {
        let y = lit("1950", "gYear").to_interval();
        assert_eq!(y.start, Utc.with_ymd_and_hms(1950, 1, 1, 0, 0, 0).unwrap());
        assert_eq!(y.end, Utc.with_ymd_and_hms(1951, 1, 1, 0, 0, 0).unwrap());
        let d = lit("1950-01-03", "date").to_interval();
        assert_eq!(d.end - d.start, Duration::hours(24));
        let dt = lit("1950-01-03T11:00:00+06:00", "dateTime").to_interval();
        assert_eq!(format_instant(dt.start), "1950-01-03T05:00:00Z");
        assert_eq!(dt.end - dt.start, Duration::seconds(1));
        let frac = lit("2020-02-29T23:59:59.75Z", "dateTime").to_interval();
        assert_eq!(format_instant(frac.start), "2020-02-29T23:59:59Z");
        let eod = lit("1999-12-31T24:00:00", "dateTime").to_interval();
        assert_eq!(format_instant(eod.start), "2000-01-01T00:00:00Z");
    }

    #[test]
    fn errors() {
        let e = parse_temporal("1950-13-01", &xsd("date")).unwrap_err();
        assert_eq!(e, TemporalError::MonthOutOfRange("1950-13-01".into()));
        assert!(matches!(parse_temporal("2023-02-30", &xsd("date")), Err(TemporalError::DayOutOfRange(_))));
        assert!(matches!(parse_temporal("1950", &xsd("gYearMonth")), Err(TemporalError::UnsupportedDatatype(_))));
        assert!(matches!(parse_temporal("50", &xsd("gYear")), Err(TemporalError::Malformed { .. })));
        assert!(matches!(parse_temporal("1950-01-03T25:00:00", &xsd("dateTime")), Err(TemporalError::TimeOutOfRange(_))));
        assert!(matches!(parse_temporal("1950-01-03 ", &xsd("date")), Err(TemporalError::Malformed { .. })));
        assert!(matches!(parse_temporal("1950+15:00", &xsd("gYear")), Err(TemporalError::OffsetOutOfRange(_))));
    }

    #[test]
    fn cross_granularity_ordering() {
        let d = lit("1950-01-03", "date");
        let y = lit("1952", "gYear");
        assert_eq!(compare(&d, &y), TemporalRelation::Before);
        assert_eq!(compare(&y, &d), TemporalRelation::After);
        assert_eq!(compare(&d, &d), TemporalRelation::Intersects);
        assert_eq!(compare(&d, &lit("1950", "gYear")), TemporalRelation::Intersects);
    }

    #[test]
    fn inference() {
        assert_eq!(TemporalLiteral::infer("2020").unwrap().granularity(), Granularity::Year);
        assert_eq!(TemporalLiteral::infer("2020-08-27").unwrap().granularity(), Granularity::Date);
        assert_eq!(TemporalLiteral::infer("2020-08-27T06:00:00Z").unwrap().granularity(), Granularity::DateTime);
    }
}
