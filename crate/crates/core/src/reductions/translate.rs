use super::{lift_horizon, ReductionError, ReductionKind, ReductionWitness};
use crate::game::{ActionId, Game, Layer, ObsId, Player};
use crate::strategy::{point, uniform, ActionDist, Policy, StrategyError};

/// What a position of a reduced play stands for.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Slot {
    /// The reduced state is (the image of) the original state at `step`.
    Original { step: usize, probabilistic: bool },
    /// A fresh state inserted after original step `step`.
    Between,
}

/// A strategy of the original game, played in the reduced game.
///
/// At positions that copy an original state the inner policy is consulted
/// on the projected observation history. At gadget positions the player
/// mixes uniformly over the gadget actions; at positions where the player
/// has no say it plays its smallest original action.
pub struct TranslatedPolicy<P> {
    inner: P,
    kind: ReductionKind,
    initial_layer: Option<Layer>,
    chooser: Option<Player>,
    horizon: usize,
    /// Reduced block to original block, where one exists.
    block_map: Vec<Option<ObsId>>,
    /// Original action to reduced action.
    action_map: Vec<ActionId>,
    filler: ActionDist,
    gadget: ActionDist,
}

pub fn translate_policy<P: Policy>(
    original: &Game,
    reduced: &Game,
    witness: &ReductionWitness,
    policy: P,
) -> Result<TranslatedPolicy<P>, ReductionError> {
    if witness.kind == ReductionKind::NaiveBinary {
        return Err(ReductionError::IncompatibleWitness { kind: witness.kind, what: "strategy translation" });
    }
    let p = policy.player();
    let block_map = (0..reduced.num_blocks(p))
        .map(|o| original.block_id(p, reduced.block_label(p, ObsId(o))))
        .collect();
    let action_map = original
        .actions(p)
        .iter()
        .map(|a| reduced.action_id(p, a).ok_or_else(|| crate::game::GameError::UnknownAction { player: p, name: a.clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    let filler = point(action_map[0]);
    let gadgets = reduced.gadget_actions(p);
    let gadget = if gadgets.is_empty() { filler.clone() } else { uniform(&gadgets) };
    Ok(TranslatedPolicy {
        horizon: lift_horizon(policy.horizon(), witness)?,
        inner: policy,
        kind: witness.kind,
        initial_layer: witness.initial_layer,
        chooser: witness.chooser,
        block_map,
        action_map,
        filler,
        gadget,
    })
}

impl<P: Policy> TranslatedPolicy<P> {
    /// Slot of every position `0..len` of a reduced play.
    fn slots(&self, len: usize) -> Vec<Slot> {
        let mut out = Vec::with_capacity(len);
        let mut step = 0;
        let mut prob = self.initial_layer == Some(Layer::Probabilistic);
        while out.len() < len {
            out.push(Slot::Original { step, probabilistic: prob });
            let stutter = match self.kind {
                ReductionKind::Separate => true,
                ReductionKind::OstGadget => prob,
                _ => false,
            };
            if stutter {
                out.push(Slot::Between);
            }
            step += 1;
            if self.initial_layer.is_some() {
                prob = !prob;
            }
        }
        out.truncate(len);
        out
    }

    fn copy(&self, history: &[ObsId], slots: &[Slot]) -> Result<ActionDist, StrategyError> {
        let mut projected = Vec::new();
        for (o, slot) in history.iter().zip(slots) {
            if let Slot::Original { .. } = slot {
                let mapped = self.block_map[o.0].ok_or_else(|| StrategyError::Undefined {
                    player: self.inner.player(),
                    history: history.iter().map(|o| o.0.to_string()).collect::<Vec<_>>().join(" "),
                })?;
                projected.push(mapped);
            }
        }
        let dist = self.inner.decide(&projected)?;
        Ok(dist.into_iter().map(|(a, w)| (self.action_map[a.0], w)).collect::<Vec<_>>()).map(sorted)
    }
}

fn sorted(mut d: ActionDist) -> ActionDist {
    d.sort_by_key(|(a, _)| *a);
    d
}

impl<P: Policy> Policy for TranslatedPolicy<P> {
    fn player(&self) -> Player {
        self.inner.player()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn decide(&self, history: &[ObsId]) -> Result<ActionDist, StrategyError> {
        if history.len() > self.horizon {
            return Err(StrategyError::BeyondHorizon { len: history.len(), horizon: self.horizon });
        }
        if history.is_empty() {
            return self.inner.decide(history);
        }
        let slots = self.slots(history.len());
        let me = self.player();
        match (self.kind, *slots.last().unwrap()) {
            (ReductionKind::CocGadget, Slot::Original { probabilistic: true, .. }) => Ok(self.gadget.clone()),
            (ReductionKind::OstGadget, Slot::Original { probabilistic: true, .. }) => {
                Ok(if self.chooser == Some(me) { self.gadget.clone() } else { self.filler.clone() })
            }
            (ReductionKind::OstGadget, Slot::Between) => {
                Ok(if self.chooser == Some(me) { self.filler.clone() } else { self.gadget.clone() })
            }
            (_, Slot::Between) => Ok(self.filler.clone()),
            (_, Slot::Original { .. }) => self.copy(history, &slots),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::reductions::{coc_gadget, ost_gadget, separate};
    use crate::rational::rat;
    use crate::strategy::Strategy;

    #[test]
    fn separation_copies_at_even_positions() {
        let g = fixtures::hidden_switch();
        let (r, w) = separate(&g).unwrap();
        let a2 = g.action_id(Player::One, "a2").unwrap();
        let sigma = Strategy::stationary(&g, Player::One, 3, point(a2)).unwrap();
        let t = translate_policy(&g, &r, &w, sigma).unwrap();
        assert_eq!(t.horizon(), 6);
        let o = |s: &str| r.block_of(Player::One, r.state_id(s).unwrap());
        let ra2 = r.action_id(Player::One, "a2").unwrap();
        let ra1 = r.action_id(Player::One, "a1").unwrap();
        assert_eq!(t.decide(&[o("s1")]).unwrap(), point(ra2));
        assert_eq!(t.decide(&[o("s1"), o("(s1,a1,b1)")]).unwrap(), point(ra1));
        assert!(t.decide(&[o("s1"); 7]).is_err());
    }

    #[test]
    fn gadget_positions_mix_uniformly() {
        let g = fixtures::third_split();
        let (r, w) = coc_gadget(&g).unwrap();
        let a2 = g.action_id(Player::One, "a2").unwrap();
        let sigma = Strategy::stationary(&g, Player::One, 4, point(a2)).unwrap();
        let t = translate_policy(&g, &r, &w, sigma).unwrap();
        let s = r.block_of(Player::One, r.state_id("s").unwrap());
        let d = t.decide(&[s]).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|(_, p)| *p == rat(1, 3)));
        let s0 = r.block_of(Player::One, r.state_id("s'0").unwrap());
        assert_eq!(t.decide(&[s, s0]).unwrap(), point(r.action_id(Player::One, "a2").unwrap()));
    }

    #[test]
    fn turn_based_gadget_roles() {
        let g = fixtures::third_split();
        let (r, w) = ost_gadget(&g, Player::Two).unwrap();
        let p1 = Strategy::stationary(&g, Player::One, 2, point(ActionId(1))).unwrap();
        let p2 = Strategy::stationary(&g, Player::Two, 2, point(ActionId(0))).unwrap();
        let t1 = translate_policy(&g, &r, &w, p1).unwrap();
        let t2 = translate_policy(&g, &r, &w, p2).unwrap();
        assert_eq!(t1.horizon(), 3);
        let o1 = |s: &str| r.block_of(Player::One, r.state_id(s).unwrap());
        let o2 = |s: &str| r.block_of(Player::Two, r.state_id(s).unwrap());
        // s: the chooser mixes, the mover idles.
        assert_eq!(t2.decide(&[o2("s")]).unwrap().len(), 3);
        assert_eq!(t1.decide(&[o1("s")]).unwrap(), point(r.action_id(Player::One, "a1").unwrap()));
        // (s,i): roles swap.
        assert_eq!(t1.decide(&[o1("s"), o1("(s,2)")]).unwrap().len(), 3);
        assert_eq!(t2.decide(&[o2("s"), o2("(s,2)")]).unwrap().len(), 1);
        // s'1 copies the original decision.
        let d = t1.decide(&[o1("s"), o1("(s,2)"), o1("s'1")]).unwrap();
        assert_eq!(d, point(r.action_id(Player::One, "a2").unwrap()));
    }
}
