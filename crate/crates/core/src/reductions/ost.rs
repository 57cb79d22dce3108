use std::collections::BTreeMap;

use super::{
    fresh_name, initial_layer, probabilistic_states, separated_arity, slots_of, ReductionError, ReductionKind,
    ReductionWitness, Stutter,
};
use crate::game::{classify_state, gadget_action_name, Game, GameBuilder, Layer, PartitionSpec, Player, Turn};
use crate::rational::{int, Rational};
use crate::ActionId;

pub(crate) fn slot_state_name(s: &str, i: usize) -> String {
    format!("({s},{i})")
}

/// Replaces every probabilistic state `s` by a state of `chooser` picking
/// an offset `i`, followed by a state `(s,i)` of the other player picking
/// `j` and moving to slot `(i + j) mod n`.
///
/// `chooser` is the player meant to keep complete observation (Player 2
/// in the usual presentation). Actions that the construction forbids lead
/// to a fresh absorbing `sink`.
pub fn ost_gadget(game: &Game, chooser: Player) -> Result<(Game, ReductionWitness), ReductionError> {
    let (_, n) = separated_arity(game)?;
    ost_gadget_with_arity(game, chooser, n)
}

pub fn ost_gadget_with_arity(
    game: &Game,
    chooser: Player,
    n: usize,
) -> Result<(Game, ReductionWitness), ReductionError> {
    let (layers, _) = separated_arity(game)?;
    if !game.gadget_actions(Player::One).is_empty() || !game.gadget_actions(Player::Two).is_empty() {
        return Err(ReductionError::GadgetClash);
    }
    let mover = chooser.opponent();
    let prob = probabilistic_states(game, &layers);

    let mut taken: std::collections::BTreeSet<String> = game.state_names().iter().cloned().collect();
    let mut slot_states: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut succ: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for &s in &prob {
        let name = game.state_name(s).to_string();
        let slots = slots_of(game, s, n).ok_or_else(|| ReductionError::NotUniform { state: name.clone(), n })?;
        succ.insert(name.clone(), slots.iter().map(|&t| game.state_name(t).to_string()).collect());
        let mut aux = Vec::with_capacity(n);
        for i in 0..n {
            let a = fresh_name(&slot_state_name(&name, i), &|x| taken.contains(x));
            taken.insert(a.clone());
            aux.push(a);
        }
        slot_states.insert(name, aux);
    }
    let sink = fresh_name("sink", &|x| taken.contains(x));

    let gadgets: Vec<String> = (0..n).map(gadget_action_name).collect();
    let a1: Vec<String> = game.actions(Player::One).to_vec();
    let a2: Vec<String> = game.actions(Player::Two).to_vec();
    let mut b = GameBuilder::new(game.name());
    b.actions(Player::One, a1.iter().chain(gadgets.iter()).cloned());
    b.actions(Player::Two, a2.iter().chain(gadgets.iter()).cloned());
    let all1: Vec<String> = a1.iter().chain(gadgets.iter()).cloned().collect();
    let all2: Vec<String> = a2.iter().chain(gadgets.iter()).cloned().collect();
    let gidx = |x: &str| crate::game::gadget_action_index(x);
    let to = |t: &str| vec![(t.to_string(), int(1))];
    // (own action, other action) -> (player 1 action, player 2 action)
    let order = |p: Player, own: &str, other: &str| -> (String, String) {
        match p {
            Player::One => (own.to_string(), other.to_string()),
            Player::Two => (other.to_string(), own.to_string()),
        }
    };

    for s in game.states() {
        let sn = game.state_name(s);
        b.state(sn);
        if layers[s.0] == Layer::Probabilistic {
            let (own, other) = match chooser {
                Player::One => (&all1, &all2),
                Player::Two => (&all2, &all1),
            };
            let aux = &slot_states[sn];
            for x in own {
                let target = match gidx(x) {
                    Some(i) => aux[i].clone(),
                    None => sink.clone(),
                };
                for y in other {
                    let (p1, p2) = order(chooser, x, y);
                    b.transition(sn, &p1, &p2, to(&target));
                }
            }
            let slots = &succ[sn];
            let (own, other) = match mover {
                Player::One => (&all1, &all2),
                Player::Two => (&all2, &all1),
            };
            for (i, state) in aux.iter().enumerate() {
                b.state(state);
                for x in own {
                    let target = match gidx(x) {
                        Some(j) => slots[(i + j) % n].clone(),
                        None => sink.clone(),
                    };
                    for y in other {
                        let (p1, p2) = order(mover, x, y);
                        b.transition(state, &p1, &p2, to(&target));
                    }
                }
            }
        } else {
            // A player's gadget actions lead to the sink where that player
            // moves, and are inert where the other player moves, so that
            // turn-based states stay turn-based.
            let turn = classify_state(game, s)?.turn;
            let moves1 = matches!(turn, Turn::Player1 | Turn::Concurrent);
            let moves2 = matches!(turn, Turn::Player2 | Turn::Concurrent);
            for x in &all1 {
                for y in &all2 {
                    let g1 = gidx(x).is_some();
                    let g2 = gidx(y).is_some();
                    let dist: Vec<(String, Rational)> = if (g1 && moves1) || (g2 && moves2) {
                        to(&sink)
                    } else {
                        let ax = if g1 { ActionId(0) } else { game.action_id(Player::One, x).unwrap() };
                        let by = if g2 { ActionId(0) } else { game.action_id(Player::Two, y).unwrap() };
                        game.transition(s, ax, by).iter().map(|(t, w)| (game.state_name(t).to_string(), w.clone())).collect()
                    };
                    b.transition(sn, x, y, dist);
                }
            }
        }
    }
    b.state(&sink);
    b.uniform_transition(&sink, to(&sink));
    b.sink(&sink);

    for p in [Player::One, Player::Two] {
        if p == chooser && game.has_full_observation(p) {
            b.observation(p, PartitionSpec::Full);
            continue;
        }
        let mut labels: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
        let mut blocks: Vec<(Option<String>, Vec<String>)> = Vec::new();
        for o in 0..game.num_blocks(p) {
            let o = crate::ObsId(o);
            let label = game.block_label(p, o).to_string();
            let mut members: Vec<String> = Vec::new();
            for s in game.block_states(p, o) {
                let sn = game.state_name(s);
                members.push(sn.to_string());
                if let Some(aux) = slot_states.get(sn) {
                    members.extend(aux.iter().cloned());
                }
            }
            labels.insert(label.clone());
            blocks.push((Some(label), members));
        }
        let sink_label = fresh_name(&sink, &|x| labels.contains(x));
        blocks.push((Some(sink_label), vec![sink.clone()]));
        b.observation(p, PartitionSpec::Blocks(blocks));
    }
    if let Some(s) = game.initial() {
        b.initial(game.state_name(s));
    }
    let reduced = b.build()?;

    let mut w = ReductionWitness::identity(ReductionKind::OstGadget, game);
    w.n = n;
    w.succ = succ;
    w.probabilistic = prob.iter().map(|&s| game.state_name(s).to_string()).collect();
    w.initial_layer = initial_layer(game, &layers);
    w.chooser = Some(chooser);
    w.sink = Some(sink);
    w.stutter = Stutter::AfterProbabilistic;
    for (s, aux) in &slot_states {
        for a in aux {
            w.aux.insert(a.clone(), s.clone());
        }
    }
    Ok((reduced, w))
}
