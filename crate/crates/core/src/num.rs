//! Text and JSON representations of scores that may be infinite.
//!
//! A log score of zero probability is `-inf`. Delimited text writes the
//! literal token `-inf`; JSON cannot carry infinities, so [`extended`]
//! replaces non-finite values with a sentinel object
//! `{"non_finite": "-inf"}`. Finite values use the shortest decimal that
//! parses back to the same `f64`.

use crate::error::{Error, Result};

/// Full-precision text form of a score.
pub fn format_score(value: f64) -> String {
    if value.is_nan() {
        "nan".to_string()
    } else if value == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if value == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{value}")
    }
}

/// Two-decimal display form, as used in human-readable tables.
pub fn display_score(value: f64) -> String {
    if value.is_finite() {
        let rounded = format!("{value:.2}");
        // avoid "-0.00"
        if rounded.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            rounded.trim_start_matches('-').to_string()
        } else {
            rounded
        }
    } else {
        format_score(value)
    }
}

pub fn parse_score(text: &str) -> Result<f64> {
    match text.trim() {
        "-inf" => Ok(f64::NEG_INFINITY),
        "inf" | "+inf" => Ok(f64::INFINITY),
        "nan" => Ok(f64::NAN),
        other => other
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("not a number: `{other}`"))),
    }
}

/// Serde adapter for `f64` fields that may hold infinities.
///
/// Use as `#[serde(with = "probscore::num::extended")]`.
pub mod extended {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct NonFinite {
        non_finite: String,
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Sentinel(NonFinite),
    }

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else {
            NonFinite {
                non_finite: super::format_score(*value),
            }
            .serialize(serializer)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(v),
            Repr::Sentinel(s) => super::parse_score(&s.non_finite).map_err(D::Error::custom),
        }
    }

    /// Same as the parent module for `Option<f64>`.
    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(serde::Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => super::serialize(v, serializer),
                None => serializer.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(deserializer)?.map(|w| w.0))
        }
    }
}
