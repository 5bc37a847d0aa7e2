use std::fmt::Write as _;

use rand::seq::{index, IndexedRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gap::greedy_gap;
use crate::imeasure::conditional_entropies;
use crate::lp::{LpStatus, OBJECTIVE_TOLERANCE};
use crate::network::{Edge, NetworkInstance, SourceNode};
use crate::problems::{self, ProblemKind};
use crate::scalar::{fmt6, format_rational, parse_rational, rational_int, Rational, Scalar};

/// Settings of the random comparison study.
///
/// Storage costs of random instances are drawn from `storage_costs`, which
/// defaults to the edge-cost choice set.
#[derive(Clone, PartialEq, Debug)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub nodes: usize,
    pub edges: usize,
    pub sources: usize,
    pub terminals: usize,
    pub entropy: Rational,
    pub capacities: Vec<Rational>,
    pub edge_costs: Vec<Rational>,
    pub storage_costs: Vec<Rational>,
    pub seed: u64,
    /// Relative tolerance for calling two optima equal.
    pub tolerance: f64,
}

fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| rational_int(v)).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let costs = ints(&[1, 2, 3, 4, 5, 6, 29, 31]);
        ExperimentConfig {
            trials: 200,
            nodes: 25,
            edges: 90,
            sources: 3,
            terminals: 3,
            entropy: rational_int(3),
            capacities: ints(&[1, 2, 3, 4, 5]),
            edge_costs: costs.clone(),
            storage_costs: costs,
            seed: 1,
            tolerance: OBJECTIVE_TOLERANCE,
        }
    }
}

fn parse_list(value: &str) -> Option<Vec<Rational>> {
    let items: Option<Vec<Rational>> = value.split(',').map(parse_rational).collect();
    items.filter(|v| !v.is_empty())
}

fn format_list(values: &[Rational]) -> String {
    values
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::invalid("at least two nodes are required"));
        }
        if self.edges > self.nodes * (self.nodes - 1) {
            return Err(Error::invalid(format!(
                "{} edges do not fit in a simple directed graph on {} nodes",
                self.edges, self.nodes
            )));
        }
        if self.sources == 0 || self.terminals == 0 {
            return Err(Error::invalid(
                "at least one source and one terminal are required",
            ));
        }
        if self.sources + self.terminals > self.nodes {
            return Err(Error::invalid(
                "sources plus terminals exceed the node count",
            ));
        }
        if self.sources > crate::imeasure::MAX_SOURCES {
            return Err(Error::invalid("too many sources"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid("tolerance must be a nonnegative number"));
        }
        if self.entropy <= rational_int(0) {
            return Err(Error::invalid("entropy must be positive"));
        }
        for (name, set) in [
            ("capacities", &self.capacities),
            ("edge_costs", &self.edge_costs),
            ("storage_costs", &self.storage_costs),
        ] {
            if set.is_empty() || set.iter().any(|v| *v < rational_int(0)) {
                return Err(Error::invalid(format!(
                    "{name} must be a nonempty list of nonnegative values"
                )));
            }
        }
        Ok(())
    }

    /// Applies `key value` lines (`#` comments allowed) on top of `self`.
    pub fn apply_text(mut self, text: &str) -> Result<Self> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: idx + 1,
                column: 1,
                message,
            };
            let (key, value) = line
                .split_once(char::is_whitespace)
                .map(|(k, v)| (k, v.trim()))
                .ok_or_else(|| err(format!("expected `key value`, got `{line}`")))?;
            let count = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{key}` needs a whole number")))
            };
            match key {
                "trials" => self.trials = count()?,
                "nodes" => self.nodes = count()?,
                "edges" => self.edges = count()?,
                "sources" => self.sources = count()?,
                "terminals" => self.terminals = count()?,
                "tolerance" => {
                    self.tolerance = value
                        .parse()
                        .map_err(|_| err("`tolerance` needs a number".into()))?
                }
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| err("`seed` needs a whole number".into()))?
                }
                "entropy" => {
                    self.entropy = parse_rational(value)
                        .ok_or_else(|| err("`entropy` needs a number".into()))?
                }
                "capacities" => {
                    self.capacities =
                        parse_list(value).ok_or_else(|| err("bad `capacities` list".into()))?
                }
                "edge_costs" => {
                    self.edge_costs =
                        parse_list(value).ok_or_else(|| err("bad `edge_costs` list".into()))?
                }
                "storage_costs" => {
                    self.storage_costs =
                        parse_list(value).ok_or_else(|| err("bad `storage_costs` list".into()))?
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(self)
    }

    pub fn to_text(&self) -> String {
        format!(
            "seed {}\ntrials {}\nnodes {}\nedges {}\nsources {}\nterminals {}\nentropy {}\ncapacities {}\nedge_costs {}\nstorage_costs {}\ntolerance {}\n",
            self.seed,
            self.trials,
            self.nodes,
            self.edges,
            self.sources,
            self.terminals,
            format_rational(&self.entropy),
            format_list(&self.capacities),
            format_list(&self.edge_costs),
            format_list(&self.storage_costs),
            self.tolerance,
        )
    }
}

/// Generator for trial `trial`: ChaCha8 seeded from `seed`, on stream `trial`.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Random instance for trial `trial`: distinct ordered node pairs as edges,
/// disjoint uniformly placed sources and terminals.
pub fn random_instance(cfg: &ExperimentConfig, trial: usize) -> Result<NetworkInstance> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let n = cfg.nodes;
    let pick = |rng: &mut ChaCha8Rng, set: &[Rational]| {
        set.choose(rng).expect("nonempty choice set").clone()
    };
    let pairs = index::sample(&mut rng, n * (n - 1), cfg.edges);
    let mut edges = Vec::with_capacity(cfg.edges);
    for k in pairs.iter() {
        let tail = k / (n - 1);
        let offset = k % (n - 1);
        let head = if offset < tail { offset } else { offset + 1 };
        let capacity = pick(&mut rng, &cfg.capacities);
        let cost = pick(&mut rng, &cfg.edge_costs);
        edges.push(Edge {
            tail: tail + 1,
            head: head + 1,
            capacity,
            cost,
        });
    }
    let placed = index::sample(&mut rng, n, cfg.sources + cfg.terminals).into_vec();
    let sources = placed[..cfg.sources]
        .iter()
        .map(|&v| SourceNode {
            node: v + 1,
            storage_cost: pick(&mut rng, &cfg.storage_costs),
        })
        .collect();
    let terminals = placed[cfg.sources..].iter().map(|&v| v + 1).collect();
    NetworkInstance::new(n, edges, sources, terminals, cfg.entropy.clone())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrialStatus {
    Equal,
    NonEqual,
    /// The coded program is infeasible: the network cannot carry `h` to every terminal.
    Infeasible,
    /// A solve failed numerically; counted with the discarded trials.
    SolverFailure,
}

impl TrialStatus {
    pub fn name(self) -> &'static str {
        match self {
            TrialStatus::Equal => "equal",
            TrialStatus::NonEqual => "non_equal",
            TrialStatus::Infeasible => "infeasible",
            TrialStatus::SolverFailure => "solver_failure",
        }
    }

    pub fn is_discarded(self) -> bool {
        matches!(self, TrialStatus::Infeasible | TrialStatus::SolverFailure)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct TrialRecord {
    pub trial: usize,
    pub status: TrialStatus,
    pub coded: Option<f64>,
    pub subset: Option<f64>,
    pub gap_lp: Option<f64>,
    pub greedy: Option<f64>,
    /// `coded + gap_lp` exceeds the subset optimum.
    pub bound_not_tight: bool,
    /// Greedy delta exceeds the gap program optimum.
    pub greedy_suboptimal: bool,
    pub detail: String,
}

impl TrialRecord {
    fn new(trial: usize, status: TrialStatus) -> Self {
        TrialRecord {
            trial,
            status,
            coded: None,
            subset: None,
            gap_lp: None,
            greedy: None,
            bound_not_tight: false,
            greedy_suboptimal: false,
            detail: String::new(),
        }
    }
}

/// Solves one instance and classifies it; optima within `tolerance · max(1, |·|)` count as equal.
pub fn evaluate_instance(net: &NetworkInstance, trial: usize, tolerance: f64) -> TrialRecord {
    let differs = |a: f64, b: f64, scale: f64| (a - b).abs() > tolerance * scale.abs().max(1.0);
    let failure = |mut rec: TrialRecord, e: crate::Error| {
        rec.status = match e {
            crate::Error::NotOptimal(LpStatus::Infeasible) => TrialStatus::Infeasible,
            _ => TrialStatus::SolverFailure,
        };
        rec.detail = e.to_string();
        rec
    };
    let mut rec = TrialRecord::new(trial, TrialStatus::Equal);
    let coded = match problems::solve::<f64>(ProblemKind::Coded, net) {
        Ok(b) => b.objective,
        Err(e) => return failure(rec, e),
    };
    rec.coded = Some(coded);
    let subset = match problems::solve::<f64>(ProblemKind::Subset, net) {
        Ok(b) => b.objective,
        Err(e) => {
            // Subset is never infeasible when coded is feasible; treat any error as numerical.
            let mut rec = failure(rec, e);
            rec.status = TrialStatus::SolverFailure;
            return rec;
        }
    };
    rec.subset = Some(subset);
    if !differs(subset, coded, coded) {
        return rec;
    }
    rec.status = TrialStatus::NonEqual;
    let analysis = problems::solve::<f64>(ProblemKind::AtomCoded, net).and_then(|atom_coded| {
        let gap = problems::solve_gap(net, &atom_coded)?.objective;
        let mu1 = atom_coded.atoms.as_ref().expect("atom-coded atoms");
        let h = f64::from_rational(net.entropy());
        let greedy =
            greedy_gap(&conditional_entropies(mu1), &h, &net.storage_costs::<f64>())?.delta;
        Ok((gap, greedy))
    });
    match analysis {
        Ok((gap, greedy)) => {
            rec.gap_lp = Some(gap);
            rec.greedy = Some(greedy);
            rec.bound_not_tight = differs(coded + gap, subset, subset);
            rec.greedy_suboptimal = differs(greedy, gap, coded);
        }
        Err(e) => rec.detail = format!("gap analysis failed: {e}"),
    }
    rec
}

#[derive(Clone, PartialEq, Debug)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn count(&self, status: TrialStatus) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn equal(&self) -> usize {
        self.count(TrialStatus::Equal)
    }

    pub fn non_equal(&self) -> usize {
        self.count(TrialStatus::NonEqual)
    }

    pub fn discarded(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status.is_discarded())
            .count()
    }

    pub fn bound_not_tight(&self) -> usize {
        self.records.iter().filter(|r| r.bound_not_tight).count()
    }

    pub fn greedy_suboptimal(&self) -> usize {
        self.records.iter().filter(|r| r.greedy_suboptimal).count()
    }

    /// Table of counts followed by `key=value` summary lines and one line per unequal trial.
    pub fn text(&self) -> String {
        let c = &self.config;
        let column = format!(
            "({},{},{})",
            c.sources,
            c.terminals,
            format_rational(&c.entropy)
        );
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {}", "(|S|,|T|,h)", column);
        let _ = writeln!(out, "{:<12} {}", "Equal", self.equal());
        let _ = writeln!(out, "{:<12} {}", "Non-equal", self.non_equal());
        let _ = writeln!(out, "{:<12} {}", "Discarded", self.discarded());
        let _ = writeln!(out, "seed={}", c.seed);
        let _ = writeln!(out, "trials={}", c.trials);
        let _ = writeln!(out, "nodes={}", c.nodes);
        let _ = writeln!(out, "edges={}", c.edges);
        let _ = writeln!(out, "equal={}", self.equal());
        let _ = writeln!(out, "non_equal={}", self.non_equal());
        let _ = writeln!(out, "discarded={}", self.discarded());
        let _ = writeln!(
            out,
            "solver_failures={}",
            self.count(TrialStatus::SolverFailure)
        );
        let _ = writeln!(out, "bound_not_tight={}", self.bound_not_tight());
        let _ = writeln!(out, "greedy_suboptimal={}", self.greedy_suboptimal());
        for r in self
            .records
            .iter()
            .filter(|r| r.status == TrialStatus::NonEqual)
        {
            let _ = writeln!(
                out,
                "non_equal trial={} coded={} subset={} gap_lp={} greedy={}",
                r.trial,
                opt6(r.coded),
                opt6(r.subset),
                opt6(r.gap_lp),
                opt6(r.greedy)
            );
        }
        out
    }

    /// Comma-separated records with a header row.
    pub fn records(&self) -> String {
        let mut out = String::from(
            "trial,status,coded,subset,gap_lp,greedy,bound_not_tight,greedy_suboptimal\n",
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.trial,
                r.status.name(),
                opt6(r.coded),
                opt6(r.subset),
                opt6(r.gap_lp),
                opt6(r.greedy),
                r.bound_not_tight as u8,
                r.greedy_suboptimal as u8
            );
        }
        out
    }
}

fn opt6(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| fmt6(&v))
}

/// Runs every trial (in parallel) and keeps the records in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            random_instance(cfg, trial).map(|net| evaluate_instance(&net, trial, cfg.tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        config: cfg.clone(),
        records,
    })
}
