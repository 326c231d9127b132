//! JSON game files.
//!
//! A game file names the counts and the winning tuples:
//!
//! ```json
//! {
//!   "name": "chsh",
//!   "alice_questions": 2, "bob_questions": 2,
//!   "alice_answers": 2, "bob_answers": 2,
//!   "distribution": [[0, 0, 0.25], [0, 1, 0.25], [1, 0, 0.25], [1, 1, 0.25]],
//!   "winning": [[0, 0, 0, 0], [1, 1, 0, 0], ...]
//! }
//! ```
//!
//! `distribution` may be omitted for the uniform distribution. A polynomial
//! file instead carries `signature` and `polynomial` (text form) plus an
//! optional `scale_note`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSignature, Polynomial};
use crate::error::{Error, Result};
use crate::games::{GamePolynomial, GameSpec, NonlocalGame, ProbabilityMap};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    name: String,
    alice_questions: usize,
    bob_questions: usize,
    alice_answers: usize,
    bob_answers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distribution: Option<Vec<(usize, usize, f64)>>,
    winning: Vec<[usize; 4]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialFile {
    name: String,
    signature: AlgebraSignature,
    polynomial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale_note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probability: Option<ProbabilityMap>,
}

fn parse_json<D: DeserializeOwned>(text: &str, origin: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("{origin}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })
}

fn game_from_file(f: GameFile) -> Result<NonlocalGame> {
    NonlocalGame::new(
        f.name,
        [f.alice_questions, f.bob_questions, f.alice_answers, f.bob_answers],
        f.distribution.as_deref(),
        &f.winning,
    )
}

fn game_to_file(g: &NonlocalGame) -> GameFile {
    let [xq, yq, aa, ba] = g.counts();
    GameFile {
        name: g.name().to_string(),
        alice_questions: xq,
        bob_questions: yq,
        alice_answers: aa,
        bob_answers: ba,
        distribution: Some(g.distribution_entries()),
        winning: g.winning_tuples(),
    }
}

/// Parses a game file.
pub fn load_game(path: &Path) -> Result<NonlocalGame> {
    let text = fs::read_to_string(path)?;
    game_from_file(parse_json(&text, &path.display().to_string())?)
}

pub fn save_game(g: &NonlocalGame, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&game_to_file(g))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Parses either a game file or a polynomial file.
pub fn load_spec(path: &Path) -> Result<GameSpec> {
    let text = fs::read_to_string(path)?;
    let origin = path.display().to_string();
    let value: serde_json::Value = parse_json(&text, &origin)?;
    if value.get("polynomial").is_some() {
        let f: PolynomialFile = parse_json(&text, &origin)?;
        f.signature.validate()?;
        let poly = Polynomial::parse(&f.polynomial, f.signature).map_err(|e| Error::Parse {
            location: format!("{origin}: field `polynomial`"),
            message: e.to_string(),
        })?;
        Ok(GameSpec::Polynomial(GamePolynomial::new(
            f.name,
            poly,
            f.scale_note,
            f.probability,
        )?))
    } else {
        Ok(GameSpec::Game(game_from_file(parse_json(&text, &origin)?)?))
    }
}

pub fn save_spec(spec: &GameSpec, path: &Path) -> Result<()> {
    match spec {
        GameSpec::Game(g) => save_game(g, path),
        GameSpec::Polynomial(p) => {
            let f = PolynomialFile {
                name: p.name().to_string(),
                signature: *p.signature(),
                polynomial: p.poly().to_string(),
                scale_note: p.scale_note().map(str::to_string),
                probability: p.probability(),
            };
            fs::write(path, serde_json::to_string_pretty(&f)? + "\n")?;
            Ok(())
        }
    }
}
