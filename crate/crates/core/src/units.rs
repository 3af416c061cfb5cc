//! Time unit conventions. Hours are canonical.

pub const HOURS_PER_YEAR: f64 = 8760.0;
pub const HOURS_PER_MONTH: f64 = 730.0;

#[inline]
pub fn months(m: f64) -> f64 {
    m * HOURS_PER_MONTH
}

#[inline]
pub fn years(y: f64) -> f64 {
    y * HOURS_PER_YEAR
}

#[inline]
pub fn hours_to_months(h: f64) -> f64 {
    h / HOURS_PER_MONTH
}
