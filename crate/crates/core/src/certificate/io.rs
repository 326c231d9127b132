//! JSON certificate files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "bound": 6.0,
//!   "generator_kind": "observable",
//!   "alice_questions": 3, "bob_questions": 3,
//!   "alice_answers": 2, "bob_answers": 2,
//!   "provenance": "...",
//!   "terms": [{"lambda": 1.0, "poly": "1 0 : A.0.1; -0.5 0 : B.0.1"}],
//!   "constraint_part": []
//! }
//! ```
//!
//! Polynomials use the text form of [`Polynomial`]. Numbers are written with
//! shortest round-trip formatting, so a save/load cycle is lossless.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConstraintTerm, SosCertificate, SquareTerm};
use crate::algebra::{AlgebraSignature, GeneratorKind, Polynomial};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertFile {
    format_version: u32,
    bound: f64,
    generator_kind: GeneratorKind,
    alice_questions: usize,
    bob_questions: usize,
    alice_answers: usize,
    bob_answers: usize,
    #[serde(default)]
    provenance: String,
    terms: Vec<TermEntry>,
    #[serde(default)]
    constraint_part: Vec<ConstraintEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermEntry {
    lambda: f64,
    poly: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintEntry {
    mu: f64,
    poly: String,
}

fn to_file<T: Real>(cert: &SosCertificate<T>) -> CertFile {
    let s = cert.signature;
    CertFile {
        format_version: FORMAT_VERSION,
        bound: cert.bound.to_f64_lossy(),
        generator_kind: s.kind,
        alice_questions: s.alice_questions,
        bob_questions: s.bob_questions,
        alice_answers: s.alice_answers,
        bob_answers: s.bob_answers,
        provenance: cert.provenance.clone(),
        terms: cert
            .terms
            .iter()
            .map(|t| TermEntry {
                lambda: t.lambda.to_f64_lossy(),
                poly: t.poly.to_string(),
            })
            .collect(),
        constraint_part: cert
            .constraint_part
            .iter()
            .map(|c| ConstraintEntry {
                mu: c.mu.to_f64_lossy(),
                poly: c.poly.to_string(),
            })
            .collect(),
    }
}

fn from_file<T: Real>(f: CertFile, origin: &str) -> Result<SosCertificate<T>> {
    if f.format_version != FORMAT_VERSION {
        return Err(Error::Parse {
            location: origin.to_string(),
            message: format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                f.format_version
            ),
        });
    }
    let sig = AlgebraSignature::new(
        f.alice_questions,
        f.bob_questions,
        f.alice_answers,
        f.bob_answers,
        f.generator_kind,
    )?;
    let poly = |field: String, text: &str| -> Result<Polynomial<T>> {
        Polynomial::parse(text, sig).map_err(|e| Error::Parse {
            location: format!("{origin}: {field}"),
            message: e.to_string(),
        })
    };
    let mut cert = SosCertificate::new(T::lit(f.bound), sig, f.provenance);
    for (i, t) in f.terms.iter().enumerate() {
        if !(t.lambda >= 0.0) || !t.lambda.is_finite() {
            return Err(Error::Parse {
                location: format!("{origin}: terms[{i}].lambda"),
                message: format!("weight {} must be finite and nonnegative", t.lambda),
            });
        }
        cert.terms.push(SquareTerm {
            lambda: T::lit(t.lambda),
            poly: poly(format!("terms[{i}].poly"), &t.poly)?,
        });
    }
    for (i, c) in f.constraint_part.iter().enumerate() {
        cert.constraint_part.push(ConstraintTerm {
            mu: T::lit(c.mu),
            poly: poly(format!("constraint_part[{i}].poly"), &c.poly)?,
        });
    }
    Ok(cert)
}

impl<T: Real> SosCertificate<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&to_file(self))? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_at(text, "<text>")
    }

    fn from_json_at(text: &str, origin: &str) -> Result<Self> {
        let f: CertFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{origin}:{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        from_file(f, origin)
    }
}

pub fn save_cert<T: Real>(cert: &SosCertificate<T>, path: &Path) -> Result<()> {
    fs::write(path, cert.to_json()?)?;
    Ok(())
}

pub fn load_cert<T: Real>(path: &Path) -> Result<SosCertificate<T>> {
    let text = fs::read_to_string(path)?;
    SosCertificate::from_json_at(&text, &path.display().to_string())
}
