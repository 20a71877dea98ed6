//! Structural state of the robot: which legs still work, the fixed body and
//! leg geometry, and whether a damaged morphology can still walk statically.
//!
//! Legs are numbered 1..=6. Odd legs (1, 3, 5) run front to rear along one
//! side of the body, even legs (2, 4, 6) along the other, so the body
//! perimeter visits them in the order 1-3-5-6-4-2.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::JointLimits;

pub const LEG_COUNT: usize = 6;

/// Binary functional-leg mask, `true` for a working leg.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MorphologyVector([bool; LEG_COUNT]);

impl MorphologyVector {
    /// Builds a morphology from 0/1 flags. Anything other than six entries
    /// drawn from {0, 1} is rejected.
    pub fn new(flags: &[u8]) -> Result<Self> {
        if flags.len() != LEG_COUNT {
            return Err(Error::MorphologyLength(flags.len()));
        }
        let mut legs = [false; LEG_COUNT];
        for (slot, &f) in legs.iter_mut().zip(flags) {
            *slot = match f {
                0 => false,
                1 => true,
                _ => return Err(Error::MorphologyValue(format!("{flags:?}"))),
            };
        }
        Ok(Self(legs))
    }

    pub const fn healthy() -> Self {
        Self([true; LEG_COUNT])
    }

    pub const fn from_flags(legs: [bool; LEG_COUNT]) -> Self {
        Self(legs)
    }

    /// Healthy robot with the listed legs removed.
    pub fn without(lost: &[usize]) -> Result<Self> {
        let mut legs = [true; LEG_COUNT];
        for &leg in lost {
            check_leg(leg)?;
            legs[leg - 1] = false;
        }
        Ok(Self(legs))
    }

    /// Every one of the 64 possible masks, in binary counting order.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..64).map(|bits| {
            let mut legs = [false; LEG_COUNT];
            for (i, leg) in legs.iter_mut().enumerate() {
                *leg = bits & (1 << (LEG_COUNT - 1 - i)) != 0;
            }
            Self(legs)
        })
    }

    pub fn is_functional(&self, leg: usize) -> bool {
        (1..=LEG_COUNT).contains(&leg) && self.0[leg - 1]
    }

    pub fn flags(&self) -> [bool; LEG_COUNT] {
        self.0
    }

    pub fn functional_count(&self) -> usize {
        self.0.iter().filter(|&&f| f).count()
    }

    pub fn functional_legs(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=LEG_COUNT).filter(|&l| self.0[l - 1])
    }

    pub fn lost_legs(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=LEG_COUNT).filter(|&l| !self.0[l - 1])
    }

    /// Reflection across the sagittal plane: 1<->2, 3<->4, 5<->6.
    pub fn mirrored(&self) -> Self {
        let mut legs = [false; LEG_COUNT];
        for leg in 1..=LEG_COUNT {
            legs[mirror_leg(leg) - 1] = self.0[leg - 1];
        }
        Self(legs)
    }
}

impl fmt::Display for MorphologyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &leg in &self.0 {
            f.write_str(if leg { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for MorphologyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MorphologyVector({self})")
    }
}

impl FromStr for MorphologyVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let flags = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::MorphologyValue(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&flags)
    }
}

impl TryFrom<String> for MorphologyVector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MorphologyVector> for String {
    fn from(m: MorphologyVector) -> Self {
        m.to_string()
    }
}

pub(crate) fn check_leg(leg: usize) -> Result<()> {
    if (1..=LEG_COUNT).contains(&leg) {
        Ok(())
    } else {
        Err(Error::LegIndex(leg))
    }
}

/// The leg at the same station on the opposite side.
pub fn mirror_leg(leg: usize) -> usize {
    if leg % 2 == 1 {
        leg + 1
    } else {
        leg - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DamageTag {
    Healthy,
    OneLegLost,
    TwoLegsLost,
    Unrecoverable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DamageClass {
    pub tag: DamageTag,
    pub functional_count: usize,
    pub odd_functional: usize,
    pub even_functional: usize,
}

impl DamageClass {
    pub fn is_recoverable(&self) -> bool {
        self.tag != DamageTag::Unrecoverable
    }

    /// Human-readable reason for an unrecoverable classification.
    pub fn diagnostic(&self) -> Option<String> {
        if self.is_recoverable() {
            return None;
        }
        Some(match self.functional_count {
            n if n <= 3 => format!("{n} functional legs; at least 4 are needed to keep 3 in support while one swings"),
            4 => format!(
                "4 functional legs but side condition violated: odd side has {}, even side has {} \
                 (each side needs at least 2)",
                self.odd_functional, self.even_functional
            ),
            n => format!("unexpected functional leg count {n}"),
        })
    }
}

/// Classifies a morphology by functional-leg count and the per-side rule.
pub fn validate_morphology(m: &MorphologyVector) -> DamageClass {
    let n = m.functional_count();
    let odd = m.functional_legs().filter(|l| l % 2 == 1).count();
    let even = n - odd;
    let tag = match n {
        6 => DamageTag::Healthy,
        5 => DamageTag::OneLegLost,
        4 if odd > 1 && even > 1 => DamageTag::TwoLegsLost,
        _ => DamageTag::Unrecoverable,
    };
    DamageClass { tag, functional_count: n, odd_functional: odd, even_functional: even }
}

/// Which legs are spatial neighbours on the body perimeter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[[usize; 2]; 6]", into = "[[usize; 2]; 6]")]
pub struct Adjacency([[usize; 2]; LEG_COUNT]);

impl Adjacency {
    /// Perimeter order 1-3-5-6-4-2-1.
    pub const PERIMETER: Adjacency = Adjacency([[2, 3], [1, 4], [1, 5], [2, 6], [3, 6], [4, 5]]);

    pub fn new(table: [[usize; 2]; LEG_COUNT]) -> Result<Self> {
        for (i, pair) in table.iter().enumerate() {
            let leg = i + 1;
            for &n in pair {
                check_leg(n)?;
                if n == leg {
                    return Err(Error::Geometry(format!("leg {leg} listed as its own neighbour")));
                }
                if !table[n - 1].contains(&leg) {
                    return Err(Error::Geometry(format!(
                        "adjacency not symmetric: {leg} lists {n} but {n} does not list {leg}"
                    )));
                }
            }
            if pair[0] == pair[1] {
                return Err(Error::Geometry(format!("leg {leg} needs two distinct neighbours")));
            }
        }
        Ok(Self(table))
    }

    pub fn neighbors(&self, leg: usize) -> Result<(usize, usize)> {
        check_leg(leg)?;
        let [a, b] = self.0[leg - 1];
        Ok((a, b))
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        (1..=LEG_COUNT).contains(&a) && self.0[a - 1].contains(&b)
    }
}

impl Default for Adjacency {
    fn default() -> Self {
        Self::PERIMETER
    }
}

impl TryFrom<[[usize; 2]; 6]> for Adjacency {
    type Error = Error;

    fn try_from(table: [[usize; 2]; 6]) -> Result<Self> {
        Self::new(table)
    }
}

impl From<Adjacency> for [[usize; 2]; 6] {
    fn from(a: Adjacency) -> Self {
        a.0
    }
}

/// Neighbours of `leg` under the default perimeter adjacency.
pub fn neighbors(leg: usize) -> Result<(usize, usize)> {
    Adjacency::PERIMETER.neighbors(leg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry {
    /// Hip mount (x, y) in the body frame, metres.
    pub hip: [f64; 2],
    /// Coxa, femur and tibia lengths, metres.
    pub links: [f64; 3],
    /// Sign of the lateral coordinate of this side of the body.
    pub side: f64,
    /// Initial tip height offset, metres.
    #[serde(default)]
    pub z0: f64,
}

/// Fixed geometry of the robot. Not optimised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotGeometry {
    pub legs: [LegGeometry; LEG_COUNT],
    /// CoM offset from the body-frame origin, metres.
    #[serde(default)]
    pub body_mass_offset: [f64; 3],
    /// Initial body height H0, metres.
    pub body_height: f64,
    /// Support-phase step depth L_sd, metres.
    pub step_depth: f64,
    #[serde(default)]
    pub adjacency: Adjacency,
    #[serde(default)]
    pub joint_limits: JointLimits,
}

impl Default for RobotGeometry {
    /// JetHexa-like proportions. These are plausible defaults, not measured
    /// values of any particular robot.
    fn default() -> Self {
        let links = [0.045, 0.077, 0.123];
        let leg = |x: f64, y: f64| LegGeometry { hip: [x, y], links, side: x.signum(), z0: 0.0 };
        Self {
            legs: [
                leg(0.06, 0.09),
                leg(-0.06, 0.09),
                leg(0.06, 0.0),
                leg(-0.06, 0.0),
                leg(0.06, -0.09),
                leg(-0.06, -0.09),
            ],
            body_mass_offset: [0.0; 3],
            body_height: 0.13,
            step_depth: 0.005,
            adjacency: Adjacency::PERIMETER,
            joint_limits: JointLimits::default(),
        }
    }
}

impl RobotGeometry {
    pub fn leg(&self, leg: usize) -> Result<&LegGeometry> {
        check_leg(leg)?;
        Ok(&self.legs[leg - 1])
    }

    pub fn validate(&self) -> Result<()> {
        for (i, leg) in self.legs.iter().enumerate() {
            if leg.links.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(Error::Geometry(format!("leg {} link lengths must be > 0", i + 1)));
            }
            if leg.side != 1.0 && leg.side != -1.0 {
                return Err(Error::Geometry(format!("leg {} side must be +1 or -1", i + 1)));
            }
        }
        let odd = self.legs[0].side;
        let even = self.legs[1].side;
        if odd == even {
            return Err(Error::Geometry("odd and even legs must be on opposite sides".into()));
        }
        for (i, leg) in self.legs.iter().enumerate() {
            let expected = if i % 2 == 0 { odd } else { even };
            if leg.side != expected {
                return Err(Error::Geometry(format!("leg {} is on the wrong side", i + 1)));
            }
        }
        if !(self.body_height > 0.0) {
            return Err(Error::Geometry("body_height must be > 0".into()));
        }
        if !(self.step_depth >= 0.0) {
            return Err(Error::Geometry("step_depth must be >= 0".into()));
        }
        self.joint_limits.validate()
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let g: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        g.validate().map_err(|e| e.to_string())?;
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|msg| Error::parse(path, msg))
    }

    /// True when every leg's mirror image is the mirrored leg.
    pub fn is_mirror_symmetric(&self) -> bool {
        (1..=LEG_COUNT).all(|leg| {
            let a = &self.legs[leg - 1];
            let b = &self.legs[mirror_leg(leg) - 1];
            a.hip[0] == -b.hip[0] && a.hip[1] == b.hip[1] && a.links == b.links && a.z0 == b.z0
        }) && self.body_mass_offset[0] == 0.0
    }
}
