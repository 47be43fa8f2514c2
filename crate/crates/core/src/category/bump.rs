//! A continuous `f: ℝ → [0, 1]` that vanishes along every member of a
//! finite family yet equals 1 at points tending to infinity.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::adversary::{run_adversary, AdversarialSet, Mode};
use crate::error::Result;
use crate::exact::rational::{abs, from_biguint, from_u64, serde_str, serde_vec};
use crate::exact::{format_rational, Rational};
use crate::sequence::{DivergingSequence, SequenceFamily};

/// `f(x) = max_k max(0, 1 - |x - c_k| / ρ_k)` with ascending centres and
/// radii at most 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TentFunction {
    #[serde(with = "serde_vec")]
    pub centers: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub radii: Vec<Rational>,
}

impl TentFunction {
    pub fn eval(&self, x: &Rational) -> Rational {
        let one = Rational::one();
        let from = self.centers.partition_point(|c| *c <= x - &one);
        let mut best = Rational::zero();
        for (c, r) in self.centers[from..].iter().zip(&self.radii[from..]) {
            if *c >= x + &one {
                break;
            }
            let v = &one - abs(&(x - c)) / r;
            if v > best {
                best = v;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peak {
    pub index: u64,
    #[serde(with = "serde_str")]
    pub x: Rational,
    #[serde(with = "serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberZeroCheck {
    pub member: usize,
    /// Terms `0..checked_terms` were evaluated; later terms lie beyond every tent.
    pub checked_terms: u64,
    pub max_value: String,
    pub all_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BumpDemo {
    pub horizon: u64,
    pub adversary: AdversarialSet,
    pub f: TentFunction,
    pub peaks: Vec<Peak>,
    pub zero_checks: Vec<MemberZeroCheck>,
    pub peaks_at_one: bool,
    pub peaks_increasing: bool,
    /// Every peak index `n` has `x > n`.
    pub peaks_beyond_index: bool,
}

impl BumpDemo {
    pub fn passed(&self) -> bool {
        self.peaks_at_one && self.peaks_increasing && self.peaks_beyond_index && self.zero_checks.iter().all(|c| c.all_zero)
    }
}

/// One tent per adversarial interval `(a_n - 1/h(n), a_n + 1/h(n))`,
/// peaking at `a_n`.
pub fn bump_transfer_demo(family: &SequenceFamily, horizon: u64) -> Result<BumpDemo> {
    let (profile, adversary) = run_adversary(family, Mode::StrongMax, horizon)?;
    let f = TentFunction {
        centers: profile.base.clone(),
        radii: profile.h_combined.iter().map(|h| Rational::one() / from_biguint(h)).collect(),
    };
    let peaks: Vec<Peak> = f
        .centers
        .iter()
        .enumerate()
        .map(|(n, x)| Peak {
            index: n as u64,
            x: x.clone(),
            value: f.eval(x),
        })
        .collect();
    let reach = from_u64(horizon) + Rational::one();
    let zero_checks = family
        .members()
        .iter()
        .enumerate()
        .map(|(member, s)| {
            let end = s.divergence_modulus(&reach)?.max(horizon);
            let mut max = Rational::zero();
            for t in s.terms_range(0, end)? {
                let v = f.eval(&t);
                if v > max {
                    max = v;
                }
            }
            Ok(MemberZeroCheck {
                member,
                checked_terms: end,
                all_zero: max.is_zero(),
                max_value: format_rational(&max),
            })
        })
        .collect::<Result<_>>()?;
    Ok(BumpDemo {
        horizon,
        peaks_at_one: peaks.iter().all(|p| p.value.is_one()),
        peaks_increasing: peaks.windows(2).all(|w| w[0].x < w[1].x),
        peaks_beyond_index: peaks.iter().all(|p| p.x > from_u64(p.index)),
        adversary,
        f,
        peaks,
        zero_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, q};
    use crate::sequence::SequenceSpec;

    #[test]
    fn integers_get_half_integer_peaks() {
        let fam = SequenceFamily::from_specs(&[SequenceSpec::Arith {
            step: int(1),
            offset: int(0),
        }])
        .unwrap();
        let demo = bump_transfer_demo(&fam, 16).unwrap();
        assert!(demo.passed());
        assert_eq!(demo.peaks[3].x, q(7, 2));
        for k in 0..20 {
            assert!(demo.f.eval(&int(k)).is_zero());
        }
        assert_eq!(demo.f.eval(&q(13, 4)), q(1, 2));
        assert!(demo.f.eval(&int(-3)).is_zero());
    }
}
