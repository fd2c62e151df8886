//! The `reproduce` table. Scenario rows live in `scenarios.json`; this file
//! only knows how to compute each named quantity.

use std::collections::HashMap;

use qubit_capacity::{
    find_crossing, optimize_global, optimize_horizontal, optimize_n_state, optimize_shannon,
    optimize_vertical, CapacityResult, ChannelSpec, Crossing, Ensemble, GlobalCapacity, Member,
    QubitChannel, SearchConfig, ShannonResult, StateSpace,
};
use serde::{Deserialize, Serialize};

use crate::config::{CrossingSpec, Tolerances};
use crate::CliError;

const TABLE: &str = include_str!("scenarios.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Vertical,
    VerticalAvgZ,
    Horizontal,
    HorizontalAvgZ,
    Capacity,
    CapacityStates,
    PoleProbability,
    SideX,
    SideZ,
    SideProbability,
    C2,
    C2MinAbsZ,
    C3MinusC2,
    Shannon,
    ShannonPairDot,
    GapRatio,
    CrossingParam,
    CrossingVertical,
    CrossingHorizontal,
    CrossingVerticalAvgZ,
    CrossingHorizontalAvgZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TolClass {
    Value,
    Coord,
    Prob,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tolerance {
    Class(TolClass),
    Absolute(f64),
}

impl Tolerance {
    fn resolve(self, t: &Tolerances) -> f64 {
        match self {
            Tolerance::Class(TolClass::Value) => t.value,
            Tolerance::Class(TolClass::Coord) => t.coord,
            Tolerance::Class(TolClass::Prob) => t.prob,
            Tolerance::Absolute(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scenario: String,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    #[serde(default)]
    pub crossing: Option<CrossingSpec>,
    pub quantity: Quantity,
    pub expected: f64,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub scenario: String,
    pub quantity: Quantity,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn table() -> Vec<Scenario> {
    serde_json::from_str(TABLE).expect("built-in scenario table is valid")
}

fn key(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable key")
}

/// Lazily computed results, shared by the rows of one scenario.
struct Cache {
    search: SearchConfig,
    seed: u64,
    global: HashMap<String, GlobalCapacity>,
    vertical: HashMap<String, CapacityResult>,
    horizontal: HashMap<String, CapacityResult>,
    shannon: HashMap<String, ShannonResult>,
    crossing: HashMap<String, Crossing>,
}

impl Cache {
    fn global(&mut self, k: &str, ch: &QubitChannel) -> &GlobalCapacity {
        let search = self.search;
        self.global
            .entry(k.into())
            .or_insert_with(|| optimize_global(ch, &search))
    }

    fn vertical(&mut self, k: &str, ch: &QubitChannel) -> &CapacityResult {
        self.vertical
            .entry(k.into())
            .or_insert_with(|| optimize_vertical(ch))
    }

    fn horizontal(&mut self, k: &str, ch: &QubitChannel) -> &CapacityResult {
        self.horizontal
            .entry(k.into())
            .or_insert_with(|| optimize_horizontal(ch))
    }

    fn shannon(&mut self, k: &str, ch: &QubitChannel) -> &ShannonResult {
        let seed = self.seed;
        self.shannon
            .entry(k.into())
            .or_insert_with(|| optimize_shannon(ch, seed))
    }
}

fn pole(e: &Ensemble) -> Option<f64> {
    e.members().iter().find(|m| m.w.z > 1.0 - 1e-3).map(|m| m.p)
}

fn side(e: &Ensemble) -> Option<Member> {
    e.members()
        .iter()
        .filter(|m| m.w.z < 1.0 - 1e-3)
        .max_by(|a, b| a.w.x.total_cmp(&b.w.x))
        .copied()
}

fn channel_value(cache: &mut Cache, spec: &ChannelSpec, q: Quantity) -> Result<f64, CliError> {
    let ch = spec.build()?;
    let k = key(spec);
    let v = match q {
        Quantity::Vertical => cache.vertical(&k, &ch).value,
        Quantity::VerticalAvgZ => cache.vertical(&k, &ch).avg_output.z,
        Quantity::Horizontal => cache.horizontal(&k, &ch).value,
        Quantity::HorizontalAvgZ => cache.horizontal(&k, &ch).avg_output.z,
        Quantity::Capacity => cache.global(&k, &ch).best.value,
        Quantity::CapacityStates => cache.global(&k, &ch).best.effective_size() as f64,
        Quantity::PoleProbability => pole(&cache.global(&k, &ch).best.ensemble).unwrap_or(f64::NAN),
        Quantity::SideX => side(&cache.global(&k, &ch).best.ensemble).map_or(f64::NAN, |m| m.w.x),
        Quantity::SideZ => side(&cache.global(&k, &ch).best.ensemble).map_or(f64::NAN, |m| m.w.z),
        Quantity::SideProbability => {
            side(&cache.global(&k, &ch).best.ensemble).map_or(f64::NAN, |m| m.p)
        }
        Quantity::C2 => cache.global(&k, &ch).by_size[1],
        Quantity::C2MinAbsZ => {
            let search = cache.search;
            let r = optimize_n_state(&ch, 2, StateSpace::Sphere, &search);
            r.ensemble
                .members()
                .iter()
                .map(|m| m.w.z.abs())
                .fold(f64::INFINITY, f64::min)
        }
        Quantity::C3MinusC2 => {
            let g = cache.global(&k, &ch);
            g.by_size[2] - g.by_size[1]
        }
        Quantity::Shannon => cache.shannon(&k, &ch).result.value,
        Quantity::ShannonPairDot => {
            let m = cache.shannon(&k, &ch).result.ensemble.members().to_vec();
            if m.len() == 2 {
                m[0].w.dot(m[1].w)
            } else {
                f64::NAN
            }
        }
        Quantity::GapRatio => {
            let shan = cache.shannon(&k, &ch).result.value;
            let g = cache.global(&k, &ch);
            (g.by_size[2] - g.by_size[1]) / (g.by_size[1] - shan)
        }
        _ => return Err(CliError::Config(format!("{q:?} needs a crossing scenario"))),
    };
    Ok(v)
}

fn crossing_value(cache: &mut Cache, spec: &CrossingSpec, q: Quantity) -> Result<f64, CliError> {
    let k = key(spec);
    if !cache.crossing.contains_key(&k) {
        let family = spec.family();
        let (lo, hi) = spec.bracket();
        let x = find_crossing(|p| family.at(p), lo, hi, spec.tol)?;
        cache.crossing.insert(k.clone(), x);
    }
    let x = &cache.crossing[&k];
    Ok(match q {
        Quantity::CrossingParam => x.param,
        Quantity::CrossingVertical => x.vertical.value,
        Quantity::CrossingHorizontal => x.horizontal.value,
        Quantity::CrossingVerticalAvgZ => x.vertical.avg_output.z,
        Quantity::CrossingHorizontalAvgZ => x.horizontal.avg_output.z,
        _ => return Err(CliError::Config(format!("{q:?} needs a channel scenario"))),
    })
}

pub fn run(
    scenarios: &[Scenario],
    search: SearchConfig,
    tol: &Tolerances,
) -> Result<Vec<Row>, CliError> {
    let mut cache = Cache {
        search,
        seed: search.seed,
        global: HashMap::new(),
        vertical: HashMap::new(),
        horizontal: HashMap::new(),
        shannon: HashMap::new(),
        crossing: HashMap::new(),
    };
    scenarios
        .iter()
        .map(|s| {
            let observed = match (&s.channel, &s.crossing) {
                (Some(ch), None) => channel_value(&mut cache, ch, s.quantity)?,
                (None, Some(x)) => crossing_value(&mut cache, x, s.quantity)?,
                _ => {
                    return Err(CliError::Config(format!(
                        "scenario {:?} needs exactly one of channel or crossing",
                        s.scenario
                    )))
                }
            };
            let tolerance = s.tolerance.resolve(tol);
            Ok(Row {
                scenario: s.scenario.clone(),
                quantity: s.quantity,
                observed,
                expected: s.expected,
                tolerance,
                pass: (observed - s.expected).abs() <= tolerance,
            })
        })
        .collect()
}
