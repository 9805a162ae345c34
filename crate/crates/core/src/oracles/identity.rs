//! Lattice counts and randomized identity testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{RationalFunction, Scalar};
use crate::error::{Error, Result};

/// `#{(a, b) ≥ 0 : 4a + 6b = d}`, by enumeration.
pub fn modular_dim(d: u64) -> u64 {
    (0..=d / 4)
        .filter(|a| (d - 4 * a).is_multiple_of(6))
        .count() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    /// `f − g` vanished at every sampled point; `canonical` records whether
    /// the exact difference is the zero function as well.
    Identical { points: usize, canonical: bool },
    /// A point where `f` and `g` differ.
    Different {
        #[serde(serialize_with = "ser_point")]
        point: Vec<Scalar>,
        #[serde(serialize_with = "ser_scalar")]
        difference: Scalar,
    },
}

fn ser_point<S: serde::Serializer>(p: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(ToString::to_string))
}

fn ser_scalar<S: serde::Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl Verdict {
    pub fn is_identical(&self) -> bool {
        matches!(self, Verdict::Identical { .. })
    }
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let num: i64 = rng.gen_range(-40..=40);
    let den: i64 = rng.gen_range(1..=40);
    Scalar::new(num.into(), den.into())
}

/// Compares `f` and `g` at `trials` pseudo-random rational points (seeded,
/// so verdicts are reproducible), skipping points where either has a pole.
pub fn random_point_identity(
    f: &RationalFunction,
    g: &RationalFunction,
    trials: usize,
    seed: u64,
) -> Result<Verdict> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch {
            left: f.arity(),
            right: g.arity(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > 100 * trials.max(1) {
            return Err(Error::InternalConsistency(
                "no pole-free sample points found".into(),
            ));
        }
        let point: Vec<Scalar> = (0..f.arity()).map(|_| random_scalar(&mut rng)).collect();
        let (a, b) = match (f.eval_at(&point), g.eval_at(&point)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(Error::Pole), _) | (_, Err(Error::Pole)) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        if a != b {
            return Ok(Verdict::Different {
                point,
                difference: a - b,
            });
        }
        done += 1;
    }
    Ok(Verdict::Identical {
        points: trials,
        canonical: f.checked_sub(g)?.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{one_point_l, one_point_linv};

    #[test]
    fn denumerant() {
        assert_eq!(modular_dim(0), 1);
        assert_eq!(modular_dim(2), 0);
        assert_eq!(modular_dim(10), 1);
        assert_eq!(modular_dim(24), 3);
    }

    #[test]
    fn verdicts() {
        let f = one_point_l(1, 0);
        let g = one_point_linv(1, 0);
        assert_eq!(
            random_point_identity(&f, &f, 5, 1).unwrap(),
            Verdict::Identical {
                points: 5,
                canonical: true
            }
        );
        assert!(!random_point_identity(&f, &g, 5, 1).unwrap().is_identical());
        let other = RationalFunction::one(2);
        assert!(random_point_identity(&f, &other, 5, 1).is_err());
    }
}
