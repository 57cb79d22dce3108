use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{fresh_name, ReductionError, ReductionKind, ReductionWitness, Stutter};
use crate::game::{interaction_layers, Game, Layer, PartitionSpec, Player, StateId};
use crate::rational::{rat, Rational};
use crate::ActionId;

/// Simulates every probabilistic state with fair coin flips, separately
/// per state: draw `m` bits, read them as `u < 2^m`, pick the successor
/// whose cumulative range contains `u`, and restart from the state when
/// `u` exceeds the common denominator.
///
/// Intermediate states share the observation of their source. Under
/// partial observation this is *not* an equivalent game: the number of
/// flips differs between states with the same observation.
pub fn naive_binary_reduction(game: &Game) -> Result<(Game, ReductionWitness), ReductionError> {
    let layers = interaction_layers(game).ok_or(ReductionError::NotSeparated)?;
    let mut b = game.to_builder();
    let mut taken: BTreeSet<String> = game.state_names().iter().cloned().collect();
    let mut w = ReductionWitness::identity(ReductionKind::NaiveBinary, game);
    w.stutter = Stutter::Variable;
    w.n = 2;
    let mut owner_of: HashMap<String, String> = HashMap::new();

    for s in game.states() {
        if layers[s.0] != Layer::Probabilistic {
            continue;
        }
        let sn = game.state_name(s).to_string();
        let dist = game.transition(s, ActionId(0), ActionId(0));
        let den = dist.iter().fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
        if den.is_one() {
            continue;
        }
        w.probabilistic.insert(sn.clone());
        let den = den.to_u64().expect("denominator too large for a binary gadget");
        let m = 64 - (den - 1).leading_zeros() as usize;
        // Cumulative upper bounds of each successor on [0, den).
        let mut bounds: Vec<(u64, String)> = Vec::new();
        let mut acc = 0u64;
        for (t, p) in dist.iter() {
            acc += (p * Rational::from_integer(den.into())).to_integer().to_u64().unwrap();
            bounds.push((acc, game.state_name(t).to_string()));
        }
        let leaf = |u: u64| -> String {
            bounds.iter().find(|(hi, _)| u < *hi).map(|(_, t)| t.clone()).unwrap_or_else(|| sn.clone())
        };
        let mut node_names: HashMap<String, String> = HashMap::new();
        for len in 1..m {
            for bits in 0..(1u64 << len) {
                let key = format!("{bits:0len$b}");
                let name = fresh_name(&format!("({sn}~{key})"), &|x| taken.contains(x));
                taken.insert(name.clone());
                owner_of.insert(name.clone(), sn.clone());
                w.aux.insert(name.clone(), sn.clone());
                b.state(&name);
                node_names.insert(key, name);
            }
        }
        let child = |prefix: &str, bit: char| -> String {
            let key = format!("{prefix}{bit}");
            if key.len() == m {
                leaf(u64::from_str_radix(&key, 2).unwrap())
            } else {
                node_names[&key].clone()
            }
        };
        let half = rat(1, 2);
        let mut set = |name: &str, prefix: &str| {
            let dist = vec![(child(prefix, '0'), half.clone()), (child(prefix, '1'), half.clone())];
            b.uniform_transition(name, merge(dist));
        };
        set(&sn, "");
        let mut keys: Vec<_> = node_names.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        keys.sort();
        for (key, name) in keys {
            set(&name, &key);
        }
    }

    for p in [Player::One, Player::Two] {
        if let PartitionSpec::Blocks(blocks) = game.partition_spec(p) {
            let blocks = blocks
                .into_iter()
                .map(|(label, mut members)| {
                    let extra: Vec<String> = owner_of
                        .iter()
                        .filter(|(_, src)| members.contains(src))
                        .map(|(n, _)| n.clone())
                        .collect();
                    members.extend(extra);
                    (label, members)
                })
                .collect();
            b.observation(p, PartitionSpec::Blocks(blocks));
        }
    }
    Ok((b.build()?, w))
}

fn merge(dist: Vec<(String, Rational)>) -> Vec<(String, Rational)> {
    let mut out: Vec<(String, Rational)> = Vec::new();
    for (t, p) in dist {
        match out.iter_mut().find(|(u, _)| *u == t) {
            Some((_, q)) => *q += p,
            None => out.push((t, p)),
        }
    }
    out
}

/// Probability that a walk from `source` in the binary gadget has not yet
/// reached one of the source's original successors after `steps` steps.
pub fn unresolved_after(reduced: &Game, witness: &ReductionWitness, source: &str, steps: usize) -> Option<Rational> {
    let src = reduced.state_id(source)?;
    let inside = |s: StateId| s == src || witness.aux.get(reduced.state_name(s)).is_some_and(|o| o == source);
    let mut mass: HashMap<StateId, Rational> = HashMap::from([(src, Rational::one())]);
    for _ in 0..steps {
        let mut next: HashMap<StateId, Rational> = HashMap::new();
        for (s, m) in mass {
            for (t, p) in reduced.transition(s, ActionId(0), ActionId(0)).iter() {
                if inside(t) {
                    *next.entry(t).or_insert_with(Rational::zero) += &m * p;
                }
            }
        }
        mass = next;
    }
    Some(mass.values().fold(Rational::zero(), |a, b| a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn skewed_coins_overrun() {
        let (r, w) = naive_binary_reduction(&fixtures::skewed_coins()).unwrap();
        assert_eq!(unresolved_after(&r, &w, "s2", 2), Some(rat(1, 4)));
        assert_eq!(unresolved_after(&r, &w, "s1", 2), Some(Rational::zero()));
        assert_eq!(unresolved_after(&r, &w, "s2", 4), Some(rat(1, 16)));
    }

    #[test]
    fn skewed_coins_shape() {
        let (r, _) = naive_binary_reduction(&fixtures::skewed_coins()).unwrap();
        let id = |n: &str| r.state_id(n).unwrap();
        let d = |n: &str| r.transition(id(n), ActionId(0), ActionId(0)).clone();
        assert_eq!(d("(s1~1)").point_mass(), Some(id("s1''")));
        assert_eq!(d("(s2~1)").weight(id("s2")), rat(1, 2));
        assert_eq!(d("(s2~0)").weight(id("s2'")), rat(1, 2));
        // Intermediate states share their source's observation.
        assert_eq!(r.block_of(Player::One, id("(s2~1)")), r.block_of(Player::One, id("s1")));
    }

    #[test]
    fn fair_coin_is_untouched() {
        let mut b = crate::GameBuilder::new("coin");
        for s in ["c", "h", "t"] {
            b.state(s);
        }
        b.actions(Player::One, ["a"]).actions(Player::Two, ["b"]);
        b.uniform_transition("c", vec![("h".into(), rat(1, 2)), ("t".into(), rat(1, 2))]);
        b.uniform_transition("h", crate::game::tests::one("c"));
        b.uniform_transition("t", crate::game::tests::one("c"));
        let g = b.build().unwrap();
        let (r, _) = naive_binary_reduction(&g).unwrap();
        assert_eq!(r.num_states(), 3);
        assert_eq!(r, g);
    }
}
