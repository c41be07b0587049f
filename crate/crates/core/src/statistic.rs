use std::fmt;

/// Value of a detector's test statistic together with the detector's name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Statistic {
    pub value: f64,
    pub detector: &'static str,
}

impl Statistic {
    pub fn new(detector: &'static str, value: f64) -> Self {
        Self { value, detector }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.detector, self.value)
    }
}
