use crate::error::{Error, Result};
use crate::imeasure::enumerate_atoms;
use crate::lp::{Sense, Solvable};
use crate::network::{parse_network, NetworkInstance};
use crate::problems::{self, decode, ProblemKind, SolutionBundle};

/// Two mirrors feeding two terminals through a shared bottleneck 3 → 4.
/// Four unit pieces, capacity 3 everywhere, unit edge and storage costs.
pub const BUTTERFLY: &str = "\
# butterfly: sources 1, 2; relays 3, 4; terminals 5, 6
nodes 6
source 1 cost 1
source 2 cost 1
terminal 5
terminal 6
edge 1 5 cap 3 cost 1
edge 1 3 cap 3 cost 1
edge 2 3 cap 3 cost 1
edge 2 6 cap 3 cost 1
edge 3 4 cap 3 cost 1
edge 4 5 cap 3 cost 1
edge 4 6 cap 3 cost 1
entropy 4
";

/// Three mirrors, four terminals, unit capacities and unit edge costs.
/// Terminals 6, 7, 8 each see a different pair of mirrors; terminal 9 is fed
/// by mirrors 1 and 2 through relays 4 and 5. Coded storage costs 16, uncoded 17.
pub const FIG5: &str = "\
# three mirrors, tight gap instance
nodes 9
source 1 cost 2
source 2 cost 2
source 3 cost 1
terminal 6
terminal 7
terminal 8
terminal 9
edge 1 6 cap 1 cost 1
edge 2 6 cap 1 cost 1
edge 1 7 cap 1 cost 1
edge 3 7 cap 1 cost 1
edge 2 8 cap 1 cost 1
edge 3 8 cap 1 cost 1
edge 1 4 cap 1 cost 1
edge 2 4 cap 1 cost 1
edge 4 5 cap 1 cost 1
edge 4 9 cap 1 cost 1
edge 5 9 cap 1 cost 1
entropy 2
";

pub const FIXTURE_NAMES: [&str; 2] = ["butterfly", "fig5"];

pub fn fixture_text(name: &str) -> Result<&'static str> {
    match name {
        "butterfly" => Ok(BUTTERFLY),
        "fig5" => Ok(FIG5),
        other => Err(Error::invalid(format!(
            "unknown fixture `{other}` (expected butterfly or fig5)"
        ))),
    }
}

pub fn fixture(name: &str) -> Result<NetworkInstance> {
    parse_network(fixture_text(name)?)
}

/// Storage layouts forced on the uncoded program.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StoragePin {
    /// Only single-source atoms: mirrors hold disjoint pieces.
    Independent,
    /// Only the all-sources atom: every mirror holds the same pieces.
    FullReplication,
}

/// Uncoded optimum with every atom outside the pinned layout fixed to zero.
pub fn solve_pinned_subset<T: Solvable>(
    net: &NetworkInstance,
    pin: StoragePin,
) -> Result<SolutionBundle<T>> {
    let mut formulation = problems::build::<T>(ProblemKind::Subset, net)?;
    let n = net.source_count();
    for (a, &var) in enumerate_atoms(n)?.iter().zip(&formulation.layout.atoms) {
        let allowed = match pin {
            StoragePin::Independent => a.len() == 1,
            StoragePin::FullReplication => a.len() == n,
        };
        if !allowed {
            formulation.lp.add_constraint(
                format!("pin_{}", a.bits()),
                vec![(var, T::one())],
                Sense::Eq,
                T::zero(),
            );
        }
    }
    let sol = T::solve_lp(&formulation.lp)?;
    decode(&formulation, net, sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        assert_eq!(fixture("butterfly").unwrap().source_count(), 2);
        let fig5 = fixture("fig5").unwrap();
        assert_eq!(fig5.source_count(), 3);
        assert_eq!(fig5.terminals(), &[6, 7, 8, 9]);
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn butterfly_prefers_partial_replication() {
        let net = fixture("butterfly").unwrap();
        let free = problems::solve::<f64>(ProblemKind::Subset, &net)
            .unwrap()
            .objective;
        let independent = solve_pinned_subset::<f64>(&net, StoragePin::Independent)
            .unwrap()
            .objective;
        let replicated = solve_pinned_subset::<f64>(&net, StoragePin::FullReplication)
            .unwrap()
            .objective;
        assert!(free < independent - 1e-6, "{free} vs {independent}");
        assert!(free < replicated - 1e-6, "{free} vs {replicated}");
    }
}
