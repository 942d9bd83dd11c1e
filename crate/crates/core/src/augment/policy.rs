//! RandAugment and AutoAugment policy execution.
//!
//! Policy files hold one sub-policy per line:
//!
//! ```text
//! op1 prob1 level1 ; op2 prob2 level2
//! ```
//!
//! Levels are on a `0..=9` scale. Blank lines and `#` comments are ignored.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::RngStream;

use super::primitive::{apply_primitive, PrimitiveKind};

/// Highest level index in a policy table.
pub const POLICY_MAX_LEVEL: f64 = 9.0;
/// Highest RandAugment magnitude.
pub const RANDAUG_MAX_MAGNITUDE: f64 = 30.0;

const BUNDLED_CIFAR10: &str = include_str!("../../data/autoaugment_cifar10.policy");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyEntry {
    pub kind: PrimitiveKind,
    pub probability: f64,
    pub level: u8,
}

pub type SubPolicy = [PolicyEntry; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    sub_policies: Vec<SubPolicy>,
}

impl PolicyTable {
    pub fn new(sub_policies: Vec<SubPolicy>) -> Result<Self> {
        for sp in &sub_policies {
            for e in sp {
                if !(0.0..=1.0).contains(&e.probability) {
                    return Err(Error::argument(format!(
                        "{} probability {} not in [0, 1]",
                        e.kind, e.probability
                    )));
                }
                if e.level as f64 > POLICY_MAX_LEVEL {
                    return Err(Error::argument(format!(
                        "{} level {} above {POLICY_MAX_LEVEL}",
                        e.kind, e.level
                    )));
                }
            }
        }
        Ok(PolicyTable { sub_policies })
    }

    /// The standard 25-sub-policy CIFAR-10 table.
    pub fn cifar10() -> Self {
        BUNDLED_CIFAR10
            .parse()
            .expect("bundled CIFAR-10 policy is well formed")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    pub fn sub_policies(&self) -> &[SubPolicy] {
        &self.sub_policies
    }

    pub fn len(&self) -> usize {
        self.sub_policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sub_policies.is_empty()
    }
}

fn parse_entry(text: &str, line_no: usize) -> Result<PolicyEntry> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let bad = |why: &str| Error::argument(format!("policy line {line_no}: {why} in `{text}`"));
    let [op, prob, level] = fields.as_slice() else {
        return Err(bad("expected `op prob level`"));
    };
    Ok(PolicyEntry {
        kind: op.parse()?,
        probability: prob.parse().map_err(|_| bad("bad probability"))?,
        level: level.parse().map_err(|_| bad("bad level"))?,
    })
}

impl FromStr for PolicyTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut subs = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(';').collect();
            let [a, b] = parts.as_slice() else {
                return Err(Error::argument(format!(
                    "policy line {}: a sub-policy has exactly two entries",
                    i + 1
                )));
            };
            subs.push([parse_entry(a, i + 1)?, parse_entry(b, i + 1)?]);
        }
        PolicyTable::new(subs)
    }
}

impl fmt::Display for PolicyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for [a, b] in &self.sub_policies {
            writeln!(
                f,
                "{} {} {} ; {} {} {}",
                a.kind, a.probability, a.level, b.kind, b.probability, b.level
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandAugParams {
    pub num_ops: usize,
    pub magnitude: f64,
}

impl Default for RandAugParams {
    fn default() -> Self {
        RandAugParams {
            num_ops: 2,
            magnitude: 9.0,
        }
    }
}

impl RandAugParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=RANDAUG_MAX_MAGNITUDE).contains(&self.magnitude) {
            return Err(Error::argument(format!(
                "randaugment magnitude {} not in [0, {RANDAUG_MAX_MAGNITUDE}]",
                self.magnitude
            )));
        }
        Ok(())
    }
}

/// Draws `num_ops` primitives uniformly with replacement and applies them in
/// sequence at the shared magnitude. Returns the ops that were applied.
pub fn rand_augment_traced(
    image: &ImageTensor,
    params: &RandAugParams,
    rng: &mut RngStream,
) -> Result<(ImageTensor, Vec<PrimitiveKind>)> {
    params.validate()?;
    let mut out = image.clone();
    let mut applied = Vec::with_capacity(params.num_ops);
    for _ in 0..params.num_ops {
        let kind = PrimitiveKind::ALL[rng.next_index(PrimitiveKind::ALL.len())?];
        let op = kind.at_level(params.magnitude, RANDAUG_MAX_MAGNITUDE, rng);
        out = apply_primitive(op, &out)?;
        applied.push(kind);
    }
    Ok((out, applied))
}

pub fn rand_augment(
    image: &ImageTensor,
    params: &RandAugParams,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    rand_augment_traced(image, params, rng).map(|(img, _)| img)
}

/// Picks one sub-policy uniformly and applies its two entries in order,
/// each behind its own coin.
pub fn auto_augment(
    image: &ImageTensor,
    policy: &PolicyTable,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    if policy.is_empty() {
        return Err(Error::argument("autoaugment policy table is empty"));
    }
    let sub = &policy.sub_policies[rng.next_index(policy.len())?];
    let mut out = image.clone();
    for entry in sub {
        if rng.next_unit_uniform() < entry.probability {
            let op = entry.kind.at_level(entry.level as f64, POLICY_MAX_LEVEL, rng);
            out = apply_primitive(op, &out)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn img() -> ImageTensor {
        ImageTensor::from_fn(3, 16, 16, |c, y, x| ((c * 40 + y * 13 + x * 9 + x * y) % 256) as u8)
            .unwrap()
    }

    #[test]
    fn bundled_table_has_25_sub_policies() {
        let t = PolicyTable::cifar10();
        assert_eq!(t.len(), 25);
        assert_eq!(t.sub_policies()[0][0].kind, PrimitiveKind::Invert);
        assert_eq!(t.sub_policies()[24][1].kind, PrimitiveKind::AutoContrast);
    }

    #[test]
    fn display_round_trips() {
        let t = PolicyTable::cifar10();
        assert_eq!(t.to_string().parse::<PolicyTable>().unwrap(), t);
    }

    #[test]
    fn malformed_policies_rejected() {
        assert!("Invert 0.1 0".parse::<PolicyTable>().is_err());
        assert!("Invert 1.5 0 ; Invert 1 0".parse::<PolicyTable>().is_err());
        assert!("Blur 0.1 0 ; Invert 1 0".parse::<PolicyTable>().is_err());
        assert!("Rotate 0.1 12 ; Invert 1 0".parse::<PolicyTable>().is_err());
    }

    #[test]
    fn double_invert_is_identity() {
        let t: PolicyTable = "Invert 1.0 0 ; Invert 1.0 0".parse().unwrap();
        for seed in 0..10 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            assert_eq!(auto_augment(&img(), &t, &mut rng).unwrap(), img());
        }
    }

    #[test]
    fn zero_probabilities_are_identity() {
        let t: PolicyTable = "Rotate 0 9 ; Solarize 0 9\nShearX 0 3 ; Equalize 0 0".parse().unwrap();
        for seed in 0..10 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            assert_eq!(auto_augment(&img(), &t, &mut rng).unwrap(), img());
        }
    }

    #[test]
    fn empty_policy_rejected() {
        let t = PolicyTable::new(vec![]).unwrap();
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        assert!(matches!(auto_augment(&img(), &t, &mut rng), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn randaug_zero_ops_is_identity() {
        let p = RandAugParams {
            num_ops: 0,
            magnitude: 9.0,
        };
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        assert_eq!(rand_augment(&img(), &p, &mut rng).unwrap(), img());
    }

    #[test]
    fn randaug_applies_exactly_n_and_replays() {
        let p = RandAugParams::default();
        for seed in 0..20 {
            let run = || rand_augment_traced(&img(), &p, &mut derive_stream(SeedSpec::new(seed, 4))).unwrap();
            let (a, ops) = run();
            let (b, _) = run();
            assert_eq!(ops.len(), 2);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn randaug_magnitude_zero_geometric_only_is_identity() {
        let p = RandAugParams {
            num_ops: 2,
            magnitude: 0.0,
        };
        let mut seen = 0;
        for seed in 0..400 {
            let (out, ops) =
                rand_augment_traced(&img(), &p, &mut derive_stream(SeedSpec::new(seed, 6))).unwrap();
            if ops.iter().all(|k| k.is_geometric()) {
                assert_eq!(out, img());
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn randaug_rejects_magnitude_over_30() {
        let p = RandAugParams {
            num_ops: 2,
            magnitude: 31.0,
        };
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        assert!(rand_augment(&img(), &p, &mut rng).is_err());
    }
}
