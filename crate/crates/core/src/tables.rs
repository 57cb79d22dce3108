//! When randomness can be dropped without changing values, per class of
//! games: in the transition function, and in strategies.

use std::fmt::{self, Write as _};

use crate::game::{GameClass, Interaction, ObservationClass, Players};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Transitions,
    Strategies,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Free,
    NotFree,
    /// Pure strategies are as good up to every `ε > 0`; whether `ε = 0`
    /// works is open.
    EpsilonOptimalOnly,
    NotApplicable,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    Complete,
    OneSided,
    Partial,
    Mdp,
    Pomdp,
}

impl Column {
    pub const ALL: [Column; 5] = [Column::Complete, Column::OneSided, Column::Partial, Column::Mdp, Column::Pomdp];

    pub fn of(class: &GameClass) -> Column {
        match (class.players, class.observation) {
            (Players::OneAndHalf, ObservationClass::Co) => Column::Mdp,
            (Players::OneAndHalf, _) => Column::Pomdp,
            (_, ObservationClass::Co) => Column::Complete,
            (_, ObservationClass::Os1 | ObservationClass::Os2) => Column::OneSided,
            (_, ObservationClass::Pa) => Column::Partial,
        }
    }

    pub fn heading(self) -> &'static str {
        match self {
            Column::Complete => "complete",
            Column::OneSided => "one-sided",
            Column::Partial => "partial",
            Column::Mdp => "MDP",
            Column::Pomdp => "POMDP",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ClassificationEntry {
    pub axis: Axis,
    pub class: GameClass,
    pub verdict: Verdict,
}

pub fn cell(axis: Axis, row: Interaction, column: Column) -> Verdict {
    use Column::*;
    use Verdict::*;
    match (axis, row, column) {
        (_, Interaction::Concurrent, Mdp | Pomdp) => NotApplicable,
        (Axis::Transitions, Interaction::TurnBased, Complete | Mdp | Pomdp) => NotFree,
        (Axis::Transitions, _, _) => Free,
        (Axis::Strategies, Interaction::TurnBased, Complete) => EpsilonOptimalOnly,
        (Axis::Strategies, Interaction::TurnBased, Mdp | Pomdp) => Free,
        (Axis::Strategies, _, _) => NotFree,
    }
}

pub fn randomness_tables(axis: Axis, class: GameClass) -> ClassificationEntry {
    ClassificationEntry { axis, class, verdict: cell(axis, class.interaction, Column::of(&class)) }
}

pub fn cell_text(axis: Axis, verdict: Verdict) -> &'static str {
    match (axis, verdict) {
        (_, Verdict::NotFree) => "not",
        (_, Verdict::NotApplicable) => "(NA)",
        (Axis::Transitions, Verdict::Free) => "free",
        (Axis::Strategies, Verdict::Free) => "ε ≥ 0",
        (_, Verdict::EpsilonOptimalOnly) => "ε > 0",
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Transitions => "transitions",
            Axis::Strategies => "strategies",
        })
    }
}

/// Both tables as plain text, one line per row.
pub fn render_tables() -> String {
    let mut out = String::new();
    for (axis, title) in [
        (Axis::Transitions, "probabilistic transitions can be eliminated"),
        (Axis::Strategies, "pure (ε-optimal) strategies are as powerful as randomized ones"),
    ] {
        writeln!(out, "{axis}: {title}").unwrap();
        let heads: Vec<&str> = Column::ALL.iter().map(|c| c.heading()).collect();
        writeln!(out, "columns: {}", heads.join(" ")).unwrap();
        for (row, name) in [(Interaction::TurnBased, "turn-based"), (Interaction::Concurrent, "concurrent")] {
            let cells: Vec<&str> = Column::ALL.iter().map(|&c| cell_text(axis, cell(axis, row, c))).collect();
            writeln!(out, "{name}: {}", cells.join(" ")).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(o: ObservationClass, i: Interaction, p: Players) -> GameClass {
        GameClass { observation: o, interaction: i, players: p }
    }

    #[test]
    fn examples() {
        let co_t = class(ObservationClass::Co, Interaction::TurnBased, Players::TwoAndHalf);
        assert_eq!(randomness_tables(Axis::Transitions, co_t).verdict, Verdict::NotFree);
        let os_t = class(ObservationClass::Os2, Interaction::TurnBased, Players::TwoAndHalf);
        assert_eq!(randomness_tables(Axis::Transitions, os_t).verdict, Verdict::Free);
        let pomdp = class(ObservationClass::Os2, Interaction::TurnBased, Players::OneAndHalf);
        assert_eq!(randomness_tables(Axis::Strategies, pomdp).verdict, Verdict::Free);
        assert_eq!(randomness_tables(Axis::Strategies, co_t).verdict, Verdict::EpsilonOptimalOnly);
    }

    #[test]
    fn rendering_rows() {
        let text = render_tables();
        assert!(text.contains("turn-based: not free free not not\n"));
        assert!(text.contains("concurrent: free free free (NA) (NA)\n"));
        assert!(text.contains("turn-based: ε > 0 not not ε ≥ 0 ε ≥ 0\n"));
        assert!(text.contains("concurrent: not not not (NA) (NA)\n"));
    }
}
