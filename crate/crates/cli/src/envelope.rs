//! The certificate envelope: a JSON wrapper carrying one certificate
//! with its tower, provenance, and verification status.
//!
//! Schema version "1". The payload holds the certificate fields with
//! elements in the nested-array coordinate format of the ambient tower;
//! the interior-point kind nests its two difference certificates with
//! their own (taller) towers. The verification block is only ever
//! written by a verifier run.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};
use trcert_core::{
    verify_four_squares, verify_sum32, verify_unit_pair, verify_x_witness, AlgNum,
    FourSquaresCert, Sum32Cert, Tower, UnitPairCert, VerifyReport, XWitnessCert,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    UnitPair,
    Sum32,
    XWitness,
    FourSquares,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::UnitPair => "unit-pair",
            Kind::Sum32 => "sum32",
            Kind::XWitness => "x-witness",
            Kind::FourSquares => "four-squares",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        match s {
            "unit-pair" => Some(Kind::UnitPair),
            "sum32" => Some(Kind::Sum32),
            "x-witness" => Some(Kind::XWitness),
            "four-squares" => Some(Kind::FourSquares),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Unverified,
    Pass,
    Fail { clause: String },
}

/// One certificate with its envelope metadata.
pub struct Envelope {
    pub kind: Kind,
    pub tower: Arc<Tower>,
    pub payload: Value,
    pub builder: String,
    /// Seconds since the Unix epoch; None under --reproducible.
    pub timestamp: Option<u64>,
    pub verification: Verification,
}

#[derive(Debug)]
pub struct EnvelopeError(pub String);

impl fmt::Display for EnvelopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for EnvelopeError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, EnvelopeError> {
    Err(EnvelopeError(msg.into()))
}

impl Envelope {
    pub fn to_value(&self) -> Value {
        let verification = match &self.verification {
            Verification::Unverified => json!({ "status": "unverified" }),
            Verification::Pass => json!({ "status": "pass" }),
            Verification::Fail { clause } => json!({ "status": "fail", "clause": clause }),
        };
        json!({
            "schema": SCHEMA_VERSION,
            "kind": self.kind.as_str(),
            "tower": self.tower.to_json(),
            "payload": self.payload,
            "provenance": {
                "builder": self.builder,
                "timestamp": self.timestamp,
            },
            "verification": verification,
        })
    }

    pub fn from_value(v: &Value) -> Result<Envelope, EnvelopeError> {
        let obj = match v.as_object() {
            Some(o) => o,
            None => return bad("envelope is not a JSON object"),
        };
        match obj.get("schema").and_then(Value::as_str) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return bad(format!("unsupported schema version {other:?}")),
            None => return bad("envelope lacks a schema version"),
        }
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .and_then(Kind::parse)
            .ok_or_else(|| EnvelopeError("envelope lacks a recognized kind".into()))?;
        let tower_v = obj.get("tower").ok_or_else(|| EnvelopeError("envelope lacks a tower".into()))?;
        let tower = Tower::from_json(tower_v)
            .map_err(|e| EnvelopeError(format!("envelope tower is invalid: {e}")))?;
        let payload = obj
            .get("payload")
            .cloned()
            .ok_or_else(|| EnvelopeError("envelope lacks a payload".into()))?;
        let provenance = obj.get("provenance").and_then(Value::as_object);
        let builder = provenance
            .and_then(|p| p.get("builder"))
            .and_then(Value::as_str)
            .unwrap_or("unknown")
            .to_string();
        let timestamp = provenance.and_then(|p| p.get("timestamp")).and_then(Value::as_u64);
        let verification = match obj.get("verification").and_then(Value::as_object) {
            None => Verification::Unverified,
            Some(ver) => match ver.get("status").and_then(Value::as_str) {
                Some("unverified") | None => Verification::Unverified,
                Some("pass") => Verification::Pass,
                Some("fail") => Verification::Fail {
                    clause: ver
                        .get("clause")
                        .and_then(Value::as_str)
                        .unwrap_or("unspecified")
                        .to_string(),
                },
                Some(other) => {
                    return bad(format!("unrecognized verification status {other:?}"))
                }
            },
        };
        Ok(Envelope { kind, tower, payload, builder, timestamp, verification })
    }
}

/// A decoded certificate of any kind.
pub enum AnyCert {
    UnitPair(UnitPairCert),
    Sum32(Sum32Cert),
    XWitness(XWitnessCert),
    FourSquares(FourSquaresCert),
}

impl AnyCert {
    pub fn verify(&self) -> VerifyReport {
        match self {
            AnyCert::UnitPair(c) => verify_unit_pair(c),
            AnyCert::Sum32(c) => verify_sum32(c),
            AnyCert::XWitness(c) => verify_x_witness(c),
            AnyCert::FourSquares(c) => verify_four_squares(c),
        }
    }
}

fn sum32_fields(cert: &Sum32Cert) -> Result<Value, EnvelopeError> {
    let d = cert
        .d
        .lift_to(&cert.tower)
        .map_err(|e| EnvelopeError(format!("certificate tower does not contain d: {e}")))?;
    Ok(json!({
        "d": d.to_json(),
        "u": cert.u.to_json(),
        "v": cert.v.to_json(),
    }))
}

/// Same fields plus the certificate's own tower, for nesting inside an
/// envelope whose top-level tower is shorter.
fn sum32_nested(cert: &Sum32Cert) -> Result<Value, EnvelopeError> {
    let mut v = sum32_fields(cert)?;
    v.as_object_mut().unwrap().insert("tower".into(), cert.tower.to_json());
    Ok(v)
}

/// Wraps a freshly built certificate. The envelope tower is the tower the
/// parameter was supplied in for the interior-point kind, and the
/// certificate's ambient tower otherwise.
pub fn encode(cert: &AnyCert, builder: String, timestamp: Option<u64>) -> Result<Envelope, EnvelopeError> {
    let (kind, tower, payload) = match cert {
        AnyCert::UnitPair(c) => {
            let d = c
                .d
                .lift_to(&c.tower)
                .map_err(|e| EnvelopeError(format!("certificate tower does not contain d: {e}")))?;
            let payload = json!({
                "d": d.to_json(),
                "u": c.u.to_json(),
                "a": c.a.to_json(),
            });
            (Kind::UnitPair, c.tower.clone(), payload)
        }
        AnyCert::Sum32(c) => (Kind::Sum32, c.tower.clone(), sum32_fields(c)?),
        AnyCert::XWitness(c) => {
            let base = c.alpha.tower().clone();
            let payload = json!({
                "alpha": c.alpha.to_json(),
                "d1": c.d1.to_json(),
                "d2": c.d2.to_json(),
                "plus": sum32_nested(&c.plus)?,
                "minus": sum32_nested(&c.minus)?,
            });
            (Kind::XWitness, base, payload)
        }
        AnyCert::FourSquares(c) => {
            let payload = json!({
                "x": c.x.to_json(),
                "a": c.a.to_string(),
                "b": c.b.to_string(),
                "y": c.y.iter().map(AlgNum::to_json).collect::<Vec<_>>(),
            });
            (Kind::FourSquares, c.x.tower().clone(), payload)
        }
    };
    Ok(Envelope { kind, tower, payload, builder, timestamp, verification: Verification::Unverified })
}

fn field<'a>(payload: &'a Value, name: &str) -> Result<&'a Value, EnvelopeError> {
    payload
        .get(name)
        .ok_or_else(|| EnvelopeError(format!("payload lacks the field {name:?}")))
}

fn element(tower: &Arc<Tower>, payload: &Value, name: &str) -> Result<AlgNum, EnvelopeError> {
    AlgNum::from_json(tower, field(payload, name)?)
        .map_err(|e| EnvelopeError(format!("payload field {name:?} is not a tower element: {e}")))
}

fn decode_sum32(tower: &Arc<Tower>, payload: &Value) -> Result<Sum32Cert, EnvelopeError> {
    Ok(Sum32Cert {
        d: element(tower, payload, "d")?,
        tower: tower.clone(),
        u: element(tower, payload, "u")?,
        v: element(tower, payload, "v")?,
    })
}

/// Rebuilds the typed certificate from an envelope.
pub fn decode(env: &Envelope) -> Result<AnyCert, EnvelopeError> {
    match env.kind {
        Kind::UnitPair => Ok(AnyCert::UnitPair(UnitPairCert {
            d: element(&env.tower, &env.payload, "d")?,
            tower: env.tower.clone(),
            u: element(&env.tower, &env.payload, "u")?,
            a: element(&env.tower, &env.payload, "a")?,
        })),
        Kind::Sum32 => Ok(AnyCert::Sum32(decode_sum32(&env.tower, &env.payload)?)),
        Kind::XWitness => {
            let mut parts = Vec::with_capacity(2);
            for name in ["plus", "minus"] {
                let sub = field(&env.payload, name)?;
                let sub_tower = Tower::from_json(field(sub, "tower")?)
                    .map_err(|e| EnvelopeError(format!("{name} tower is invalid: {e}")))?;
                parts.push(decode_sum32(&sub_tower, sub)?);
            }
            let minus = parts.pop().unwrap();
            let plus = parts.pop().unwrap();
            Ok(AnyCert::XWitness(XWitnessCert {
                alpha: element(&env.tower, &env.payload, "alpha")?,
                d1: element(&env.tower, &env.payload, "d1")?,
                d2: element(&env.tower, &env.payload, "d2")?,
                plus,
                minus,
            }))
        }
        Kind::FourSquares => {
            let int = |name: &str| -> Result<BigInt, EnvelopeError> {
                let s = field(&env.payload, name)?
                    .as_str()
                    .ok_or_else(|| EnvelopeError(format!("field {name:?} must be a string integer")))?;
                BigInt::from_str(s)
                    .map_err(|e| EnvelopeError(format!("field {name:?} is not an integer: {e}")))
            };
            let ys = field(&env.payload, "y")?
                .as_array()
                .ok_or_else(|| EnvelopeError("field \"y\" must be an array".into()))?;
            if ys.len() != 9 {
                return bad(format!("field \"y\" must hold 9 witnesses, found {}", ys.len()));
            }
            let mut witnesses = Vec::with_capacity(9);
            for (i, v) in ys.iter().enumerate() {
                witnesses.push(AlgNum::from_json(&env.tower, v).map_err(|e| {
                    EnvelopeError(format!("witness y{i} is not a tower element: {e}"))
                })?);
            }
            let y: [AlgNum; 9] = witnesses.try_into().map_err(|_| {
                EnvelopeError("field \"y\" must hold 9 witnesses".into())
            })?;
            Ok(AnyCert::FourSquares(FourSquaresCert {
                x: element(&env.tower, &env.payload, "x")?,
                a: int("a")?,
                b: int("b")?,
                y,
            }))
        }
    }
}
