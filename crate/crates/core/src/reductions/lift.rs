use std::collections::{BTreeMap, BTreeSet};

use super::{ReductionError, ReductionWitness, Stutter};
use crate::game::Layer;
use crate::objective::Objective;

/// Horizon in the reduced game that covers `h` steps of the original.
pub fn lift_horizon(h: usize, witness: &ReductionWitness) -> Result<usize, ReductionError> {
    match witness.stutter {
        Stutter::None => Ok(h),
        Stutter::Double => Ok(2 * h),
        Stutter::AfterProbabilistic => {
            // Probabilistic states sit at every other position, starting
            // with the initial state's layer.
            let visits = match witness.initial_layer {
                Some(Layer::Probabilistic) => h.div_ceil(2),
                _ => h / 2,
            };
            Ok(h + visits)
        }
        Stutter::Variable => {
            Err(ReductionError::IncompatibleWitness { kind: witness.kind, what: "bounded-horizon objectives" })
        }
    }
}

/// Transports an objective of the original game to the reduced game.
///
/// Reachability targets are embedded as they are: an auxiliary state is
/// only visited right after its source, so adding it would change nothing.
/// For the other objectives auxiliary states inherit the membership or
/// priority of their source. A sink, if any, is never winning.
pub fn lift_objective(objective: &Objective, witness: &ReductionWitness) -> Result<Objective, ReductionError> {
    let embed = |set: &BTreeSet<String>| -> BTreeSet<String> {
        set.iter().filter_map(|s| witness.embedding.get(s).cloned()).collect()
    };
    let with_aux = |set: &BTreeSet<String>| -> BTreeSet<String> {
        let mut out = embed(set);
        out.extend(witness.aux.iter().filter(|(_, src)| set.contains(*src)).map(|(a, _)| a.clone()));
        out
    };
    let lifted = match objective {
        Objective::Reach(t) => Objective::Reach(embed(t)),
        Objective::BoundedReach { target, horizon } => {
            Objective::BoundedReach { target: embed(target), horizon: lift_horizon(*horizon, witness)? }
        }
        Objective::Safety(t) => Objective::Safety(with_aux(t)),
        Objective::Buchi(t) => Objective::Buchi(with_aux(t)),
        Objective::CoBuchi(t) => Objective::CoBuchi(with_aux(t)),
        Objective::Parity(p) => {
            let mut out: BTreeMap<String, u32> = BTreeMap::new();
            for (s, k) in p {
                if let Some(r) = witness.embedding.get(s) {
                    out.insert(r.clone(), *k);
                }
            }
            for (a, src) in &witness.aux {
                if let Some(k) = p.get(src) {
                    out.insert(a.clone(), *k);
                }
            }
            if let Some(sink) = &witness.sink {
                let max = p.values().copied().max().unwrap_or(0);
                out.insert(sink.clone(), if max % 2 == 1 { max } else { max + 1 });
            }
            Objective::Parity(out)
        }
    };
    Ok(lifted)
}
