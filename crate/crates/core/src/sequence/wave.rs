use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{floor, q, serde_str, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knot {
    #[serde(with = "serde_str")]
    pub t: Rational,
    #[serde(with = "serde_str")]
    pub y: Rational,
}

/// A continuous, periodic, piecewise-linear map onto `[0, 1]`.
///
/// `knots` list the breakpoints over one period starting at `t = 0`; the
/// segment after the last knot closes back to the first knot's value at
/// `t = period`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWave")]
pub struct WaveShape {
    #[serde(with = "serde_str")]
    period: Rational,
    knots: Vec<Knot>,
}

#[derive(Deserialize)]
struct RawWave {
    #[serde(with = "serde_str")]
    period: Rational,
    knots: Vec<Knot>,
}

impl TryFrom<RawWave> for WaveShape {
    type Error = Error;

    fn try_from(raw: RawWave) -> Result<Self> {
        WaveShape::new(raw.period, raw.knots)
    }
}

impl Default for WaveShape {
    /// The triangle wave: period 1, `2y` on `[0, 1/2]`, `2 - 2y` on `[1/2, 1]`.
    fn default() -> Self {
        WaveShape {
            period: q(1, 1),
            knots: vec![Knot { t: q(0, 1), y: q(0, 1) }, Knot { t: q(1, 2), y: q(1, 1) }],
        }
    }
}

impl WaveShape {
    pub fn new(period: Rational, knots: Vec<Knot>) -> Result<Self> {
        let zero = q(0, 1);
        let one = q(1, 1);
        if period <= zero {
            return Err(Error::invalid("wave period must be positive"));
        }
        if knots.first().is_none_or(|k| k.t != zero) {
            return Err(Error::invalid("wave knots must start at t = 0"));
        }
        if knots.windows(2).any(|w| w[0].t >= w[1].t) || knots.last().is_some_and(|k| k.t >= period) {
            return Err(Error::invalid("wave knots must be strictly increasing within one period"));
        }
        if knots.iter().any(|k| k.y < zero || k.y > one) {
            return Err(Error::invalid("wave values must lie in [0, 1]"));
        }
        // continuous and piecewise linear, so attaining both extremes means onto [0, 1]
        if !knots.iter().any(|k| k.y == zero) || !knots.iter().any(|k| k.y == one) {
            return Err(Error::invalid("wave is not surjective onto [0, 1]: it must attain 0 and 1"));
        }
        Ok(WaveShape { period, knots })
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        let s = y - Rational::from_integer(floor(&(y / &self.period))) * &self.period;
        let idx = self.knots.partition_point(|k| k.t <= s) - 1;
        let left = &self.knots[idx];
        let (t1, y1) = match self.knots.get(idx + 1) {
            Some(k) => (&k.t, &k.y),
            None => (&self.period, &self.knots[0].y),
        };
        &left.y + (&s - &left.t) * (y1 - &left.y) / (t1 - &left.t)
    }
}
