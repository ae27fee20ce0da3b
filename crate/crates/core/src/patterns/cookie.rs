//! The Cookie domain: three rooms (orange, green, blue) joined by a hallway.
//! Pushing the button in the orange room places a cookie in the green or blue
//! room at random, replacing any cookie already there. The agent only sees
//! the room it is in.
//!
//! The predicted quantity at step `t` is the probability that a cookie is in
//! the agent's location at `t` (seen there, or eaten there), given the
//! observations before `t` and the location at `t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::prime::{HIGH, HOLD, LOW, RESET, SET};
use crate::automata::{CascadeSpec, OutputTiming, PrimeKind, SpecBuilder, Wiring};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Location {
    Hallway,
    OrangeRoom,
    GreenRoom,
    BlueRoom,
}

/// The Boolean properties observed at one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CookieObservation {
    pub cookie: bool,
    pub cookie_eaten: bool,
    pub button_pushed: bool,
    pub green_room: bool,
    pub orange_room: bool,
    pub blue_room: bool,
    pub hallway: bool,
}

/// Every observation the domain can produce, one letter each.
pub const COOKIE_LETTERS: [&str; 9] = [
    "hallway",
    "orangeRoom",
    "orangeRoom+buttonPushed",
    "greenRoom",
    "greenRoom+cookie",
    "greenRoom+cookieEaten",
    "blueRoom",
    "blueRoom+cookie",
    "blueRoom+cookieEaten",
];

pub const PROBABILITY_LETTERS: [&str; 3] = ["0", "0.5", "1"];

impl CookieObservation {
    pub fn at(location: Location) -> Self {
        let mut o = CookieObservation::default();
        match location {
            Location::Hallway => o.hallway = true,
            Location::OrangeRoom => o.orange_room = true,
            Location::GreenRoom => o.green_room = true,
            Location::BlueRoom => o.blue_room = true,
        }
        o
    }

    pub fn location(&self) -> Result<Location> {
        let flags = [
            (self.hallway, Location::Hallway),
            (self.orange_room, Location::OrangeRoom),
            (self.green_room, Location::GreenRoom),
            (self.blue_room, Location::BlueRoom),
        ];
        let mut held = flags.iter().filter(|f| f.0);
        match (held.next(), held.next()) {
            (Some(&(_, l)), None) => Ok(l),
            _ => Err(Error::invalid("observation must hold exactly one location")),
        }
    }

    pub fn letter(&self) -> Result<usize> {
        let label = self.label()?;
        Ok(COOKIE_LETTERS.iter().position(|l| *l == label).expect("label is a letter"))
    }

    fn label(&self) -> Result<String> {
        let location = self.location()?;
        let mut label = match location {
            Location::Hallway => "hallway",
            Location::OrangeRoom => "orangeRoom",
            Location::GreenRoom => "greenRoom",
            Location::BlueRoom => "blueRoom",
        }
        .to_string();
        let colored = matches!(location, Location::GreenRoom | Location::BlueRoom);
        let extras = [
            (self.button_pushed, "buttonPushed", location == Location::OrangeRoom),
            (self.cookie, "cookie", colored && !self.cookie_eaten),
            (self.cookie_eaten, "cookieEaten", colored && !self.cookie),
        ];
        for (held, name, allowed) in extras {
            if held {
                if !allowed {
                    return Err(Error::invalid(format!("{name} cannot hold in {label}")));
                }
                label = format!("{label}+{name}");
            }
        }
        Ok(label)
    }

    pub fn from_letter(letter: usize) -> Result<Self> {
        let label = COOKIE_LETTERS
            .get(letter)
            .ok_or_else(|| Error::invalid(format!("no cookie letter {letter}")))?;
        let mut parts = label.split('+');
        let mut o = CookieObservation::at(match parts.next() {
            Some("hallway") => Location::Hallway,
            Some("orangeRoom") => Location::OrangeRoom,
            Some("greenRoom") => Location::GreenRoom,
            _ => Location::BlueRoom,
        });
        match parts.next() {
            Some("buttonPushed") => o.button_pushed = true,
            Some("cookie") => o.cookie = true,
            Some("cookieEaten") => o.cookie_eaten = true,
            _ => {}
        }
        Ok(o)
    }
}

/// One simulated episode with the ground-truth prediction per step.
#[derive(Debug, Clone, PartialEq)]
pub struct CookieEpisode {
    pub observations: Vec<CookieObservation>,
    pub probabilities: Vec<f64>,
}

/// Simulates `steps` observations of a uniform random walk starting in the
/// hallway with no cookie. From the hallway the agent enters one of the
/// three rooms; in a room it either returns to the hallway or interacts
/// (pushes the button in the orange room, eats a cookie if one is there).
pub fn cookie_reference(seed: u64, steps: usize) -> CookieEpisode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rooms = [Location::OrangeRoom, Location::GreenRoom, Location::BlueRoom];
    let mut location = Location::Hallway;
    let mut cookie: Option<Location> = None;
    let mut observations = Vec::with_capacity(steps);
    if steps > 0 {
        observations.push(CookieObservation::at(location));
    }
    while observations.len() < steps {
        let mut obs;
        if location == Location::Hallway {
            location = rooms[rng.random_range(0..3)];
            obs = CookieObservation::at(location);
            obs.cookie = cookie == Some(location);
        } else if rng.random_bool(0.5) {
            location = Location::Hallway;
            obs = CookieObservation::at(location);
        } else {
            obs = CookieObservation::at(location);
            if location == Location::OrangeRoom {
                cookie = Some(if rng.random_bool(0.5) { Location::GreenRoom } else { Location::BlueRoom });
                obs.button_pushed = true;
            } else if cookie == Some(location) {
                cookie = None;
                obs.cookie_eaten = true;
            }
        }
        observations.push(obs);
    }
    let probabilities = cookie_belief(&observations).expect("simulated observations are consistent");
    CookieEpisode { observations, probabilities }
}

/// Exact posterior prediction by tracking the set of cookie placements
/// (none, green, blue) consistent with the observations so far. The prior
/// after a button press is uniform and observations only rule placements
/// out, so the posterior is uniform over the set.
pub fn cookie_belief(observations: &[CookieObservation]) -> Result<Vec<f64>> {
    let mut possible = vec![None];
    let mut out = Vec::with_capacity(observations.len());
    for (t, o) in observations.iter().enumerate() {
        let location = o.location()?;
        o.label()?;
        let colored = matches!(location, Location::GreenRoom | Location::BlueRoom);
        let hits = possible.iter().filter(|&&c| c == Some(location)).count();
        out.push(if colored { hits as f64 / possible.len() as f64 } else { 0.0 });
        if o.button_pushed {
            possible = vec![Some(Location::GreenRoom), Some(Location::BlueRoom)];
        }
        if o.cookie_eaten {
            if hits == 0 {
                return Err(Error::invalid(format!("cookie eaten at step {t} where none could be")));
            }
            possible = vec![None];
        } else if colored {
            possible.retain(|&c| (c == Some(location)) == o.cookie);
        }
        if possible.is_empty() {
            return Err(Error::invalid(format!("observation at step {t} contradicts the history")));
        }
    }
    Ok(out)
}

pub fn probability_letter(p: f64) -> Option<&'static str> {
    match p {
        0.0 => Some("0"),
        0.5 => Some("0.5"),
        1.0 => Some("1"),
        _ => None,
    }
}

/// Three independent flip-flops F1 (cookie around), F2 (green or blue room
/// visited since the button press) and F3 (cookie in green rather than
/// blue), with the prediction read from their states before the step.
pub fn cookie_cascade() -> Result<CascadeSpec> {
    let obs: Vec<CookieObservation> =
        (0..COOKIE_LETTERS.len()).map(CookieObservation::from_letter).collect::<Result<_>>()?;
    let mut b = SpecBuilder::new(&COOKIE_LETTERS, Wiring::Cascade);
    let f1 = b.declare("F1", PrimeKind::FlipFlop, LOW);
    let f2 = b.declare("F2", PrimeKind::FlipFlop, LOW);
    let f3 = b.declare("F3", PrimeKind::FlipFlop, LOW);
    b.wire(f1, &[], |l, _| {
        if obs[l].button_pushed {
            SET
        } else if obs[l].cookie_eaten {
            RESET
        } else {
            HOLD
        }
    })?;
    b.wire(f2, &[], |l, _| {
        if obs[l].button_pushed {
            RESET
        } else if obs[l].green_room || obs[l].blue_room {
            SET
        } else {
            HOLD
        }
    })?;
    b.wire(f3, &[], |l, _| match (obs[l].green_room, obs[l].blue_room, obs[l].cookie) {
        (true, _, true) => SET,
        (true, _, false) => RESET,
        (_, true, true) => RESET,
        (_, true, false) => SET,
        _ => HOLD,
    })?;
    let (zero, half, one) = (0, 1, 2);
    b.output(&PROBABILITY_LETTERS, &[f1, f2, f3], OutputTiming::Pre, |l, st| {
        let o = &obs[l];
        if !(o.green_room || o.blue_room) || st[0] == LOW {
            return zero;
        }
        if st[1] == LOW {
            return half;
        }
        if (st[2] == HIGH) == o.green_room {
            one
        } else {
            zero
        }
    })?;
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(obs: &[CookieObservation]) -> Vec<usize> {
        obs.iter().map(|o| o.letter().unwrap()).collect()
    }

    fn obs(labels: &[&str]) -> Vec<CookieObservation> {
        labels
            .iter()
            .map(|l| CookieObservation::from_letter(COOKIE_LETTERS.iter().position(|x| x == l).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn letters_round_trip() {
        for l in 0..COOKIE_LETTERS.len() {
            assert_eq!(CookieObservation::from_letter(l).unwrap().letter().unwrap(), l);
        }
        let mut bad = CookieObservation::at(Location::Hallway);
        bad.green_room = true;
        assert!(bad.letter().is_err());
        let mut bad = CookieObservation::at(Location::Hallway);
        bad.cookie = true;
        assert!(bad.letter().is_err());
    }

    #[test]
    fn belief_examples() {
        let none = obs(&["hallway", "greenRoom", "hallway", "blueRoom"]);
        assert_eq!(cookie_belief(&none).unwrap(), vec![0.0; 4]);
        let pushed = obs(&["orangeRoom", "orangeRoom+buttonPushed", "hallway", "greenRoom"]);
        assert_eq!(cookie_belief(&pushed).unwrap()[3], 0.5);
        let seen = obs(&["orangeRoom+buttonPushed", "hallway", "greenRoom+cookie", "hallway", "greenRoom+cookie"]);
        assert_eq!(cookie_belief(&seen).unwrap()[4], 1.0);
        let elsewhere = obs(&["orangeRoom+buttonPushed", "hallway", "blueRoom", "hallway", "greenRoom+cookie"]);
        assert_eq!(cookie_belief(&elsewhere).unwrap()[4], 1.0);
        let inconsistent = obs(&["greenRoom+cookie"]);
        assert!(cookie_belief(&inconsistent).is_err());
    }

    #[test]
    fn flipflop_examples() {
        let spec = cookie_cascade().unwrap();
        let init = spec.initial_state();
        let push = obs(&["orangeRoom+buttonPushed"])[0].letter().unwrap();
        let after = spec.step(&init, push);
        assert_eq!(after[0], HIGH);
        assert_eq!(after[1], LOW);
        let blue = obs(&["blueRoom"])[0].letter().unwrap();
        assert_eq!(spec.step(&after, blue)[2], HIGH);
    }

    #[test]
    fn cascade_matches_belief() {
        let spec = cookie_cascade().unwrap();
        for seed in 0..20 {
            let ep = cookie_reference(seed, 100);
            assert_eq!(ep.observations.len(), 100);
            let predicted = spec.run_outputs(&letters(&ep.observations)).unwrap();
            let want: Vec<usize> = ep
                .probabilities
                .iter()
                .map(|&p| PROBABILITY_LETTERS.iter().position(|l| Some(*l) == probability_letter(p)).unwrap())
                .collect();
            assert_eq!(predicted, want, "seed {seed}");
        }
    }

    #[test]
    fn simulation_is_seeded() {
        assert_eq!(cookie_reference(7, 50), cookie_reference(7, 50));
        assert!(cookie_reference(0, 0).observations.is_empty());
    }
}
