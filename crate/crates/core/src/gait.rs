//! Swing/support scheduling for the functional legs.
//!
//! A schedule splits the gait cycle into `sigma` equal slots and assigns each
//! functional leg exactly one slot in which it swings. Windows are half-open
//! fractions `[slot/sigma, (slot+1)/sigma)` of the cycle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::{
    check_leg, mirror_leg, validate_morphology, Adjacency, DamageTag, MorphologyVector, LEG_COUNT,
};

/// First tripod group; swings in the first half of the cycle.
pub const TRIPOD_FIRST: [usize; 3] = [1, 4, 5];
/// Second tripod group.
pub const TRIPOD_SECOND: [usize; 3] = [2, 3, 6];

pub const DEFAULT_GAIT_PERIOD: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaitKind {
    Tripod,
    Quadrangular,
    Pentagonal,
}

impl GaitKind {
    pub fn sigma(self) -> usize {
        match self {
            GaitKind::Tripod => 2,
            GaitKind::Quadrangular => 3,
            GaitKind::Pentagonal => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GaitKind::Tripod => "tripod",
            GaitKind::Quadrangular => "modified quadrangular",
            GaitKind::Pentagonal => "modified pentagonal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, frac: f64) -> bool {
        frac >= self.start && frac < self.end
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaitSchedule {
    sigma: usize,
    period: f64,
    slots: [Option<usize>; LEG_COUNT],
}

impl GaitSchedule {
    /// `slots[leg - 1]` is the swing slot of that leg, `None` for a lost leg.
    pub fn new(sigma: usize, period: f64, slots: [Option<usize>; LEG_COUNT]) -> Result<Self> {
        if !(2..=4).contains(&sigma) {
            return Err(Error::Schedule(format!("sigma must be 2, 3 or 4, got {sigma}")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Schedule(format!("gait period must be > 0, got {period}")));
        }
        if let Some(bad) = slots.iter().flatten().find(|&&s| s >= sigma) {
            return Err(Error::Schedule(format!("slot {bad} out of range for sigma {sigma}")));
        }
        Ok(Self { sigma, period, slots })
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn duty_factor(&self) -> f64 {
        (self.sigma - 1) as f64 / self.sigma as f64
    }

    pub fn kind(&self) -> GaitKind {
        match self.sigma {
            2 => GaitKind::Tripod,
            3 => GaitKind::Quadrangular,
            _ => GaitKind::Pentagonal,
        }
    }

    pub fn slot(&self, leg: usize) -> Option<usize> {
        if (1..=LEG_COUNT).contains(&leg) {
            self.slots[leg - 1]
        } else {
            None
        }
    }

    pub fn swing_window(&self, leg: usize) -> Option<Window> {
        let s = self.slot(leg)?;
        let sigma = self.sigma as f64;
        Some(Window { start: s as f64 / sigma, end: (s + 1) as f64 / sigma })
    }

    pub fn scheduled_legs(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=LEG_COUNT).filter(|&l| self.slots[l - 1].is_some())
    }

    /// Legs swinging during slot `slot`.
    pub fn swinging_in(&self, slot: usize) -> Vec<usize> {
        self.scheduled_legs().filter(|&l| self.slots[l - 1] == Some(slot)).collect()
    }

    /// Whether `leg` swings at cycle fraction `frac` (wrapped into [0, 1)).
    pub fn is_swinging(&self, leg: usize, frac: f64) -> bool {
        let frac = frac.rem_euclid(1.0);
        self.swing_window(leg).is_some_and(|w| w.contains(frac))
    }

    pub fn with_period(&self, period: f64) -> Result<Self> {
        Self::new(self.sigma, period, self.slots)
    }

    /// Same schedule reflected across the sagittal plane.
    pub fn mirrored(&self) -> Self {
        let mut slots = [None; LEG_COUNT];
        for leg in 1..=LEG_COUNT {
            slots[mirror_leg(leg) - 1] = self.slots[leg - 1];
        }
        Self { slots, ..*self }
    }

    pub fn to_json(&self) -> String {
        let doc = ScheduleDoc::from(self);
        serde_json::to_string_pretty(&doc).expect("schedule serialises")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let doc: ScheduleDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
        doc.try_into().map_err(|e: Error| e.to_string())
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    sigma: usize,
    period: f64,
    duty_factor: f64,
    swing_windows: BTreeMap<String, [f64; 2]>,
}

impl From<&GaitSchedule> for ScheduleDoc {
    fn from(s: &GaitSchedule) -> Self {
        let swing_windows = s
            .scheduled_legs()
            .map(|leg| {
                let w = s.swing_window(leg).unwrap();
                (leg.to_string(), [w.start, w.end])
            })
            .collect();
        Self { sigma: s.sigma, period: s.period, duty_factor: s.duty_factor(), swing_windows }
    }
}

impl TryFrom<ScheduleDoc> for GaitSchedule {
    type Error = Error;

    fn try_from(doc: ScheduleDoc) -> Result<Self> {
        let mut slots = [None; LEG_COUNT];
        let sigma = doc.sigma as f64;
        for (key, [start, end]) in doc.swing_windows {
            let leg: usize = key.parse().map_err(|_| Error::Schedule(format!("bad leg key {key:?}")))?;
            check_leg(leg)?;
            let slot = (start * sigma).round();
            if (end - start - 1.0 / sigma).abs() > 1e-9 || (slot / sigma - start).abs() > 1e-9 || slot < 0.0 {
                return Err(Error::Schedule(format!("leg {leg} window [{start}, {end}) is not a 1/sigma slot")));
            }
            slots[leg - 1] = Some(slot as usize);
        }
        GaitSchedule::new(doc.sigma, doc.period, slots)
    }
}

/// Picks the gait for a morphology: tripod when healthy, modified
/// quadrangular with one leg lost, modified pentagonal with two.
pub fn plan_sequence(m: &MorphologyVector, period: f64) -> Result<GaitSchedule> {
    let class = validate_morphology(m);
    let mut slots = [None; LEG_COUNT];
    let sigma = match class.tag {
        DamageTag::Healthy => {
            for &leg in &TRIPOD_FIRST {
                slots[leg - 1] = Some(0);
            }
            for &leg in &TRIPOD_SECOND {
                slots[leg - 1] = Some(1);
            }
            2
        }
        DamageTag::OneLegLost => {
            let QuadGroups { first, second, solo } = quadrangular_groups(m);
            for (leg, slot) in [(first.0, 0), (first.1, 0), (second.0, 1), (second.1, 1), (solo, 2)] {
                slots[leg - 1] = Some(slot);
            }
            3
        }
        DamageTag::TwoLegsLost => {
            // one leg at a time, in index order
            for (k, leg) in m.functional_legs().enumerate() {
                slots[leg - 1] = Some(k);
            }
            4
        }
        DamageTag::Unrecoverable => {
            return Err(Error::Unrecoverable(class.diagnostic().unwrap_or_default()));
        }
    };
    GaitSchedule::new(sigma, period, slots)
}

/// Swing groups of the one-leg-lost gait: two pairs and a solo leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct QuadGroups {
    first: (usize, usize),
    second: (usize, usize),
    solo: usize,
}

/// The tripod group that lost a leg keeps two survivors. The solo leg comes
/// from the intact group, at the position mirroring the lost leg's position
/// within its own group (lost first -> third, second -> second, third ->
/// first). The remaining legs of the first and second tripod groups, in index
/// order, are alpha1, alpha2 and beta1, beta2; the pairs are (alpha1, beta2)
/// then (alpha2, beta1).
fn quadrangular_groups(m: &MorphologyVector) -> QuadGroups {
    let lost = m.lost_legs().next().expect("exactly one lost leg");
    let (damaged, intact) =
        if TRIPOD_FIRST.contains(&lost) { (TRIPOD_FIRST, TRIPOD_SECOND) } else { (TRIPOD_SECOND, TRIPOD_FIRST) };
    let pos = damaged.iter().position(|&l| l == lost).unwrap();
    let solo = intact[2 - pos];
    let rest =
        |group: [usize; 3]| -> Vec<usize> { group.into_iter().filter(|&l| l != solo && m.is_functional(l)).collect() };
    let alpha = rest(TRIPOD_FIRST);
    let beta = rest(TRIPOD_SECOND);
    QuadGroups { first: (alpha[0], beta[1]), second: (alpha[1], beta[0]), solo }
}

/// Rule of neighbourhood plus the three-leg support floor, checked on every
/// slot of the cycle. Also false when the schedule does not cover exactly
/// the functional legs of `m`.
pub fn check_neighborhood_rule(s: &GaitSchedule, m: &MorphologyVector) -> bool {
    check_neighborhood_rule_with(s, m, &Adjacency::PERIMETER)
}

pub fn check_neighborhood_rule_with(s: &GaitSchedule, m: &MorphologyVector, adjacency: &Adjacency) -> bool {
    if (1..=LEG_COUNT).any(|l| m.is_functional(l) != s.slot(l).is_some()) {
        return false;
    }
    let functional = m.functional_count();
    (0..s.sigma()).all(|slot| {
        let swinging = s.swinging_in(slot);
        let no_adjacent = swinging.iter().all(|&a| swinging.iter().all(|&b| !adjacency.are_neighbors(a, b)));
        no_adjacent && functional - swinging.len() >= 3
    })
}

/// Partition of [0, 1) into maximal intervals of constant support count.
pub fn support_count_profile(s: &GaitSchedule, m: &MorphologyVector) -> Vec<(Window, usize)> {
    let sigma = s.sigma();
    let count = |slot: usize| m.functional_legs().filter(|&l| s.slot(l) != Some(slot)).count();
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    for slot in 0..sigma {
        let c = count(slot);
        match out.last_mut() {
            Some((_, end, last)) if *last == c => *end = slot + 1,
            _ => out.push((slot, slot + 1, c)),
        }
    }
    out.into_iter()
        .map(|(a, b, c)| (Window { start: a as f64 / sigma as f64, end: b as f64 / sigma as f64 }, c))
        .collect()
}
