//! Deterministic random instances on reduced grid layouts, plus tiny
//! instances sized for the oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{
    BatteryRecord, EdgeRecord, Instance, InstanceFile, JobRecord, ModelError, TaskRecord, VehicleRecord,
};

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    Spec(String),
    #[error("could not remove {wanted} edge pairs without disconnecting the grid (removed {removed} after {tries} tries)")]
    Connectivity { wanted: usize, removed: usize, tries: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Instance family: node, vehicle and job counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    C15_3_5,
    C25_4_7,
    C35_6_8,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::C15_3_5, Class::C25_4_7, Class::C35_6_8];

    /// `(columns, rows)`.
    pub fn grid(self) -> (usize, usize) {
        match self {
            Class::C15_3_5 => (5, 3),
            Class::C25_4_7 => (5, 5),
            Class::C35_6_8 => (5, 7),
        }
    }

    pub fn nodes(self) -> usize {
        let (c, r) = self.grid();
        c * r
    }

    pub fn vehicles(self) -> usize {
        match self {
            Class::C15_3_5 => 3,
            Class::C25_4_7 => 4,
            Class::C35_6_8 => 6,
        }
    }

    pub fn jobs(self) -> usize {
        match self {
            Class::C15_3_5 => 5,
            Class::C25_4_7 => 7,
            Class::C35_6_8 => 8,
        }
    }

    /// Bidirectional edge pairs removed for an edge reduction percentage.
    pub fn removed_pairs(self, reduction: u32) -> Option<usize> {
        let step = match self {
            Class::C15_3_5 => 3,
            Class::C25_4_7 => 6,
            Class::C35_6_8 => 9,
        };
        match reduction {
            0 => Some(0),
            25 => Some(step),
            50 => Some(2 * step),
            _ => None,
        }
    }

    fn code(self) -> u64 {
        match self {
            Class::C15_3_5 => 1,
            Class::C25_4_7 => 2,
            Class::C35_6_8 => 3,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Class::C15_3_5 => "15-3-5",
            Class::C25_4_7 => "25-4-7",
            Class::C35_6_8 => "35-6-8",
        })
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Class::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown class `{s}` (15-3-5, 25-4-7, 35-6-8)"))
    }
}

impl Serialize for Class {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Class {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub class: Class,
    /// Edge reduction percentage: 0, 25 or 50.
    pub reduction: u32,
    pub deadline: u32,
    pub seed: u64,
}

impl GenSpec {
    /// Cell label shared by the instances of one parameter combination.
    pub fn cell(&self) -> String {
        format!("{}/r{}/d{}", self.class, self.reduction, self.deadline)
    }

    pub fn id(&self) -> String {
        format!("{}_r{}_d{}_s{}", self.class, self.reduction, self.deadline, self.seed)
    }

    fn rng(&self) -> ChaCha8Rng {
        // distinct streams per cell even for equal seeds
        let cell = self.class.code() << 48 | u64::from(self.reduction) << 32 | u64::from(self.deadline);
        ChaCha8Rng::seed_from_u64(self.seed ^ cell.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// Rejection budget for connectivity-preserving edge removal.
pub const REMOVAL_BUDGET: usize = 1000;

fn grid_edges(cols: usize, rows: usize, name: &dyn Fn(usize, usize) -> String) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                pairs.push((name(r, c), name(r, c + 1)));
            }
            if r + 1 < rows {
                pairs.push((name(r, c), name(r + 1, c)));
            }
        }
    }
    pairs
}

fn to_records(pairs: &[(String, String)], length: impl Fn(usize) -> u32) -> Vec<EdgeRecord> {
    let mut edges = Vec::with_capacity(2 * pairs.len());
    for (i, (a, b)) in pairs.iter().enumerate() {
        for (from, to) in [(a, b), (b, a)] {
            edges.push(EdgeRecord {
                from: from.clone(),
                to: to.clone(),
                length: length(i),
                capacity: 1,
            });
        }
    }
    edges
}

fn connected(nodes: &[String], pairs: &[(String, String)]) -> bool {
    let file = InstanceFile {
        nodes: nodes.to_vec(),
        hubs: Vec::new(),
        edges: to_records(pairs, |_| 1),
        vehicles: Vec::new(),
        jobs: Vec::new(),
        battery: BatteryRecord {
            operating_range: 0,
            charge: 0,
            discharge: 0,
            stations: Vec::new(),
        },
        deadline: 0,
    };
    Instance::from_file(&file).is_ok_and(|i| i.graph.is_strongly_connected())
}

/// Removes `count` random pairs, rejecting removals that disconnect.
fn reduce(
    rng: &mut ChaCha8Rng,
    nodes: &[String],
    mut pairs: Vec<(String, String)>,
    count: usize,
) -> Result<Vec<(String, String)>, GenError> {
    let mut removed = 0;
    let mut tries = 0;
    while removed < count {
        if tries == REMOVAL_BUDGET || pairs.is_empty() {
            return Err(GenError::Connectivity {
                wanted: count,
                removed,
                tries,
            });
        }
        tries += 1;
        let k = rng.gen_range(0..pairs.len());
        let pair = pairs.remove(k);
        if connected(nodes, &pairs) {
            removed += 1;
        } else {
            pairs.insert(k, pair);
        }
    }
    Ok(pairs)
}

/// Builds one instance of the grid families.
pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    let class = spec.class;
    let removals = class
        .removed_pairs(spec.reduction)
        .ok_or_else(|| GenError::Spec(format!("edge reduction must be 0, 25 or 50, got {}", spec.reduction)))?;
    if spec.deadline == 0 {
        return Err(GenError::Spec("deadline must be positive".into()));
    }
    let mut rng = spec.rng();
    let (cols, rows) = class.grid();
    let name = |r: usize, c: usize| format!("r{r}c{c}");
    let nodes: Vec<String> = (0..rows).flat_map(|r| (0..cols).map(move |c| name(r, c))).collect();
    let pairs = reduce(&mut rng, &nodes, grid_edges(cols, rows, &name), removals)?;
    let edges = to_records(&pairs, |_| 1);

    let nv = class.vehicles();
    let depots: Vec<String> = nodes.choose_multiple(&mut rng, nv).cloned().collect();
    let vehicles: Vec<VehicleRecord> = depots
        .iter()
        .enumerate()
        .map(|(i, d)| VehicleRecord {
            id: vehicle_name(i),
            start: d.clone(),
        })
        .collect();

    // vehicle types: every type has at least one vehicle
    let types = rng.gen_range(nv.div_ceil(2)..=nv);
    let mut type_of: Vec<usize> = (0..nv).map(|i| if i < types { i } else { rng.gen_range(0..types) }).collect();
    type_of.shuffle(&mut rng);

    // distances on the final layout
    let skeleton = Instance::from_file(&InstanceFile {
        nodes: nodes.clone(),
        hubs: Vec::new(),
        edges: edges.clone(),
        vehicles: vehicles.clone(),
        jobs: Vec::new(),
        battery: BatteryRecord {
            operating_range: 0,
            charge: 0,
            discharge: 0,
            stations: Vec::new(),
        },
        deadline: spec.deadline,
    })?;
    let g = &skeleton.graph;
    let dist = |a: &str, b: &str| {
        g.shortest_path_length(g.find(a).expect("node"), g.find(b).expect("node"))
            .expect("strongly connected")
    };
    let horizon = skeleton.horizon();
    let deadline = spec.deadline;

    let nj = class.jobs();
    let mut jobs = Vec::with_capacity(nj);
    let mut round_trip = 0;
    for j in 0..nj {
        let shared = j + 1 == nj;
        let eligible: Vec<usize> = if shared {
            (0..nv).collect()
        } else {
            let ty = rng.gen_range(0..types);
            (0..nv).filter(|&i| type_of[i] == ty).collect()
        };
        let pickup = nodes.choose(&mut rng).expect("nodes").clone();
        let delivery = loop {
            let q = nodes.choose(&mut rng).expect("nodes");
            if *q != pickup {
                break q.clone();
            }
        };
        let arrival = eligible
            .iter()
            .map(|&i| dist(&depots[i], &pickup) + dist(&pickup, &delivery))
            .min()
            .expect("eligible vehicle");
        let latest = eligible
            .iter()
            .map(|&i| deadline.saturating_sub(dist(&delivery, &depots[i])))
            .max()
            .expect("eligible vehicle");
        let trip = eligible
            .iter()
            .map(|&i| dist(&depots[i], &pickup) + dist(&pickup, &delivery) + dist(&delivery, &depots[i]))
            .min()
            .expect("eligible vehicle");
        round_trip = round_trip.max(trip);

        // window width grows with the deadline; its start floats between
        // the earliest arrival and the latest time that still allows a return
        let slack: u32 = rng.gen_range(2..=6);
        let width = (slack * deadline).div_ceil(15);
        let room = latest.saturating_sub(arrival + width);
        let lo = (arrival + rng.gen_range(0..=room)).min(horizon);
        let hi = (lo + width).min(horizon);
        jobs.push(JobRecord {
            id: if shared { "x1".into() } else { format!("j{}", j + 1) },
            eligible: eligible.iter().map(|&i| vehicle_name(i)).collect(),
            tasks: vec![
                TaskRecord {
                    id: "pickup".into(),
                    location: pickup,
                    predecessors: Vec::new(),
                    tw: [0, horizon],
                },
                TaskRecord {
                    id: "delivery".into(),
                    location: delivery,
                    predecessors: vec!["pickup".into()],
                    tw: [lo, hi],
                },
            ],
        });
    }

    let operating_range = rng.gen_range(round_trip..=2 * round_trip);
    let charge = rng.gen_range(1..=2);
    let file = InstanceFile {
        nodes,
        hubs: Vec::new(),
        edges,
        vehicles,
        jobs,
        battery: BatteryRecord {
            operating_range,
            charge,
            discharge: 1,
            stations: depots,
        },
        deadline,
    };
    Ok(Instance::from_file(&file)?)
}

fn vehicle_name(i: usize) -> String {
    // a, b, c, ...
    char::from(b'a' + (i % 26) as u8).to_string() + &"'".repeat(i / 26)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub cell: String,
    pub spec: GenSpec,
    /// Relative to the manifest's directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub instances: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl SuiteManifest {
    pub fn load(path: &Path) -> Result<Self, GenError> {
        let text = std::fs::read_to_string(path).map_err(|source| GenError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| GenError::Model(ModelError::Parse(e)))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Cross product of the parameter lists with seeds `0..seeds_per_cell`.
pub fn suite_specs(classes: &[Class], reductions: &[u32], deadlines: &[u32], seeds_per_cell: u64) -> Vec<GenSpec> {
    let mut specs = Vec::new();
    for &class in classes {
        for &reduction in reductions {
            for &deadline in deadlines {
                for seed in 0..seeds_per_cell {
                    specs.push(GenSpec {
                        class,
                        reduction,
                        deadline,
                        seed,
                    });
                }
            }
        }
    }
    specs
}

/// Generates and writes every instance of the cross product into `out_dir`
/// together with a `manifest.json`.
pub fn generate_suite(
    classes: &[Class],
    reductions: &[u32],
    deadlines: &[u32],
    seeds_per_cell: u64,
    out_dir: &Path,
) -> Result<SuiteManifest, GenError> {
    generate_specs(&suite_specs(classes, reductions, deadlines, seeds_per_cell), out_dir)
}

/// Writes one file per spec plus the manifest.
pub fn generate_specs(specs: &[GenSpec], out_dir: &Path) -> Result<SuiteManifest, GenError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GenError::Io { path, source }
    };
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let instances = crate::par::map(specs, |spec| -> Result<ManifestEntry, GenError> {
        let inst = generate(spec)?;
        let file = PathBuf::from(format!("{}.json", spec.id()));
        inst.save(out_dir.join(&file))?;
        Ok(ManifestEntry {
            id: spec.id(),
            cell: spec.cell(),
            spec: *spec,
            path: file,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let manifest = SuiteManifest { instances };
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_json()).map_err(io(&path))?;
    Ok(manifest)
}

/// Instance within the oracle's reach: at most 9 nodes, 2 vehicles, 2 jobs
/// and a horizon of at most 12. Some edges take two steps and some start
/// nodes are shared hubs, so transit, hub and battery rules all get
/// exercised.
pub fn generate_tiny(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7469_6e79);
    let (cols, rows) = *[(2, 1), (3, 1), (2, 2), (3, 2), (4, 2), (3, 3)].choose(&mut rng).expect("shapes");
    let name = |r: usize, c: usize| format!("{}{}", char::from(b'A' + r as u8), c);
    let nodes: Vec<String> = (0..rows).flat_map(|r| (0..cols).map(move |c| name(r, c))).collect();
    let mut pairs = grid_edges(cols, rows, &name);
    // occasionally drop one pair when the graph stays connected
    if pairs.len() > nodes.len() && rng.gen_bool(0.3) {
        let k = rng.gen_range(0..pairs.len());
        let p = pairs.remove(k);
        if !connected(&nodes, &pairs) {
            pairs.insert(k, p);
        }
    }
    let lengths: Vec<u32> = pairs.iter().map(|_| if rng.gen_bool(0.25) { 2 } else { 1 }).collect();
    let longest = lengths.iter().copied().max().unwrap_or(1);
    let capacity_two = rng.gen_bool(0.15);
    let mut edges = to_records(&pairs, |i| lengths[i]);
    if capacity_two {
        for e in &mut edges {
            e.capacity = 2;
        }
    }

    let nv = rng.gen_range(1..=2);
    let mut hubs = Vec::new();
    let mut starts: Vec<String> = nodes.choose_multiple(&mut rng, nv).cloned().collect();
    if nv == 2 && rng.gen_bool(0.2) {
        starts[1] = starts[0].clone();
        hubs.push(starts[0].clone());
    }
    let vehicles: Vec<VehicleRecord> = starts
        .iter()
        .enumerate()
        .map(|(i, s)| VehicleRecord {
            id: vehicle_name(i),
            start: s.clone(),
        })
        .collect();

    let deadline = rng.gen_range(2..=12 - longest);
    let horizon = deadline + longest;
    let nj = rng.gen_range(0..=2);
    let mut jobs = Vec::new();
    for j in 0..nj {
        let mut eligible: BTreeSet<String> = BTreeSet::new();
        for v in &vehicles {
            if rng.gen_bool(0.7) {
                eligible.insert(v.id.clone());
            }
        }
        if eligible.is_empty() {
            eligible.insert(vehicles.choose(&mut rng).expect("vehicle").id.clone());
        }
        let window = |rng: &mut ChaCha8Rng| {
            let lo = rng.gen_range(0..=horizon);
            let hi = rng.gen_range(lo..=horizon.min(lo + 6));
            [lo, hi]
        };
        let delivery_tw = window(&mut rng);
        let mut tasks = Vec::new();
        if rng.gen_bool(0.75) {
            tasks.push(TaskRecord {
                id: "p".into(),
                location: nodes.choose(&mut rng).expect("nodes").clone(),
                predecessors: Vec::new(),
                tw: if rng.gen_bool(0.5) { [0, horizon] } else { window(&mut rng) },
            });
        }
        let preds = tasks.iter().map(|t| t.id.clone()).collect();
        tasks.push(TaskRecord {
            id: "d".into(),
            location: nodes.choose(&mut rng).expect("nodes").clone(),
            predecessors: preds,
            tw: delivery_tw,
        });
        jobs.push(JobRecord {
            id: format!("j{j}"),
            eligible: eligible.into_iter().collect(),
            tasks,
        });
    }

    let stations: Vec<String> = nodes.iter().filter(|_| rng.gen_bool(0.3)).cloned().collect();
    let file = InstanceFile {
        nodes,
        hubs,
        edges,
        vehicles,
        jobs,
        battery: BatteryRecord {
            operating_range: rng.gen_range(1..=8),
            charge: rng.gen_range(0..=2),
            discharge: rng.gen_range(1..=2),
            stations,
        },
        deadline,
    };
    Instance::from_file(&file).expect("tiny generator builds valid instances")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_round_trip() {
        for c in Class::ALL {
            assert_eq!(c.to_string().parse::<Class>().unwrap(), c);
        }
        assert!("10-2-2".parse::<Class>().is_err());
    }

    #[test]
    fn reduced_edge_count() {
        let spec = GenSpec {
            class: Class::C25_4_7,
            reduction: 25,
            deadline: 20,
            seed: 11,
        };
        let inst = generate(&spec).unwrap();
        // 5x5 grid: 40 undirected pairs, 6 removed
        let full = 2 * (2 * 5 * 5 - 5 - 5);
        assert_eq!(inst.graph.edges().len(), full - 2 * 6);
        assert_eq!(inst.graph.edges().len(), 68);
    }

    #[test]
    fn rejects_unknown_reduction() {
        let spec = GenSpec {
            class: Class::C15_3_5,
            reduction: 30,
            deadline: 20,
            seed: 0,
        };
        assert!(matches!(generate(&spec), Err(GenError::Spec(_))));
    }

    #[test]
    fn tiny_instances_fit_the_oracle() {
        for seed in 0..200 {
            let i = generate_tiny(seed);
            assert!(i.graph.node_count() <= 9);
            assert!(i.vehicles.len() <= 2);
            assert!(i.jobs.len() <= 2);
            assert!(i.horizon() <= 12);
        }
    }
}
