use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The two evaluation-game players: Eloise (`E`) and Abelard (`A`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    E,
    A,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::E => Player::A,
            Player::A => Player::E,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::E => "E",
            Player::A => "A",
        })
    }
}

impl FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "eloise" => Ok(Player::E),
            "a" | "abelard" => Ok(Player::A),
            _ => Err(format!("unknown player '{s}' (expected E or A)")),
        }
    }
}
