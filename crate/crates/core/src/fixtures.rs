//! Small hand-built games used throughout the tests, the CLI examples and
//! the Python smoke test.

use crate::game::{Game, GameBuilder, PartitionSpec, Player};
use crate::rational::{int, rat, Rational};

fn to(s: &str) -> Vec<(String, Rational)> {
    vec![(s.to_string(), int(1))]
}

fn blocks(spec: &[(&str, &[&str])]) -> PartitionSpec {
    PartitionSpec::Blocks(
        spec.iter()
            .map(|(label, members)| (Some(label.to_string()), members.iter().map(|m| m.to_string()).collect()))
            .collect(),
    )
}

/// Turn-based game where Player 1 cannot tell `s2` from `s2'` nor `s3`
/// from `s3'`; Player 2 observes everything. Uniform play by Player 1
/// reaches `s4` with probability 1/2 per round.
pub fn hidden_switch() -> Game {
    let mut b = GameBuilder::new("hidden_switch");
    for s in ["s1", "s2", "s2'", "s3", "s3'", "s4"] {
        b.state(s);
    }
    b.actions(Player::One, ["a1", "a2"]).actions(Player::Two, ["b1", "b2"]);
    for a in ["a1", "a2"] {
        b.transition("s1", a, "b1", to("s2"));
        b.transition("s1", a, "b2", to("s2'"));
    }
    for x in ["b1", "b2"] {
        b.transition("s2", "a1", x, to("s3"));
        b.transition("s2", "a2", x, to("s3'"));
        b.transition("s2'", "a1", x, to("s3'"));
        b.transition("s2'", "a2", x, to("s3"));
    }
    b.uniform_transition("s3", to("s1"));
    b.uniform_transition("s3'", to("s4"));
    b.uniform_transition("s4", to("s4"));
    b.observation(
        Player::One,
        blocks(&[("o1", &["s1"]), ("o2", &["s2", "s2'"]), ("o3", &["s3", "s3'"]), ("o4", &["s4"])]),
    );
    b.initial("s1");
    b.build().expect("hidden_switch fixture is valid")
}

/// Two probabilistic states sharing an observation, with distributions
/// (1/4, 3/4) and (1/3, 2/3). Every successor returns to `s1`.
pub fn skewed_coins() -> Game {
    let mut b = GameBuilder::new("skewed_coins");
    for s in ["s1", "s1'", "s1''", "s2", "s2'", "s2''"] {
        b.state(s);
    }
    b.actions(Player::One, ["a"]).actions(Player::Two, ["b"]);
    b.uniform_transition("s1", vec![("s1'".into(), rat(1, 4)), ("s1''".into(), rat(3, 4))]);
    b.uniform_transition("s2", vec![("s2'".into(), rat(1, 3)), ("s2''".into(), rat(2, 3))]);
    for s in ["s1'", "s1''", "s2'", "s2''"] {
        b.uniform_transition(s, to("s1"));
    }
    b.observation(
        Player::One,
        blocks(&[("o", &["s1", "s2"]), ("p", &["s1'", "s2'"]), ("q", &["s1''", "s2''"])]),
    );
    b.initial("s1");
    b.build().expect("skewed_coins fixture is valid")
}

/// Probabilistic state `s` with `s'0` w.p. 1/3 and `s'1` w.p. 2/3; both
/// successors return to `s` whatever Player 1 plays. Player 1 does not
/// observe which successor was taken.
pub fn third_split() -> Game {
    let mut b = GameBuilder::new("third_split");
    for s in ["s", "s'0", "s'1"] {
        b.state(s);
    }
    b.actions(Player::One, ["a1", "a2"]).actions(Player::Two, ["b1"]);
    b.uniform_transition("s", vec![("s'0".into(), rat(1, 3)), ("s'1".into(), rat(2, 3))]);
    b.uniform_transition("s'0", to("s"));
    b.uniform_transition("s'1", to("s"));
    b.observation(Player::One, blocks(&[("o", &["s"]), ("o'", &["s'0", "s'1"])]));
    b.initial("s");
    b.build().expect("third_split fixture is valid")
}

/// Matching pennies for reachability: `(h,h)` and `(t,t)` reach `goal`,
/// mismatches fall into `miss`. Value 1/2 at `s`.
pub fn matching_pennies() -> Game {
    let mut b = GameBuilder::new("pennies");
    for s in ["s", "goal", "miss"] {
        b.state(s);
    }
    b.actions(Player::One, ["h", "t"]).actions(Player::Two, ["h", "t"]);
    b.transition("s", "h", "h", to("goal"));
    b.transition("s", "t", "t", to("goal"));
    b.transition("s", "h", "t", to("miss"));
    b.transition("s", "t", "h", to("miss"));
    b.uniform_transition("goal", to("goal"));
    b.uniform_transition("miss", to("miss"));
    b.initial("s");
    b.build().expect("pennies fixture is valid")
}
