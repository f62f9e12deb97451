//! Subshift languages: construction, factor enumeration, word complexity.

mod automaton;
mod finite_type;
mod language;
mod sturmian;
mod substitution;
mod toeplitz;
mod word;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use automaton::factor_counts;
pub use finite_type::FiniteType;
pub use language::{CertifiedSource, LanguageTable, Subshift, SubshiftSpec, MAX_SOURCE_LEN};
pub use sturmian::Sturmian;
pub use substitution::{substitution_iterate, Substitution};
pub use toeplitz::{toeplitz_word, ToeplitzPattern};
pub use word::{center_slice, Alphabet, Word, HOLE};

use crate::error::{Error, Result};

/// Serializable description of a subshift, as found in spec files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecDescription {
    Sturmian {
        cf: Vec<u32>,
        #[serde(default)]
        swap_letters: bool,
    },
    Substitution {
        rules: BTreeMap<String, String>,
        seed: String,
    },
    Toeplitz {
        pattern: String,
    },
    FullShift {
        alphabet: String,
    },
    Explicit {
        alphabet: String,
        forbidden: Vec<String>,
    },
}

/// Validate a description and build the subshift spec.
pub fn build_spec(description: &SpecDescription) -> Result<SubshiftSpec> {
    Ok(match description {
        SpecDescription::Sturmian { cf, swap_letters } => {
            SubshiftSpec::Sturmian(Sturmian::new(cf.clone(), *swap_letters)?)
        }
        SpecDescription::Substitution { rules, seed } => SubshiftSpec::Substitution(
            Substitution::from_pairs(rules.iter().map(|(k, v)| (k.as_str(), v.as_str())), seed)?,
        ),
        SpecDescription::Toeplitz { pattern } => {
            SubshiftSpec::Toeplitz(ToeplitzPattern::parse(pattern)?)
        }
        SpecDescription::FullShift { alphabet } => SubshiftSpec::FullShift(Alphabet::parse(alphabet)?),
        SpecDescription::Explicit { alphabet, forbidden } => {
            let alphabet = Alphabet::parse(alphabet)?;
            let forbidden: BTreeSet<Word> = forbidden.iter().map(|w| Word::from(w.as_str())).collect();
            SubshiftSpec::Explicit(FiniteType::new(alphabet, forbidden)?)
        }
    })
}

/// Inverse of [`build_spec`].
pub fn describe(spec: &SubshiftSpec) -> SpecDescription {
    match spec {
        SubshiftSpec::Sturmian(s) => SpecDescription::Sturmian {
            cf: s.coefficients().to_vec(),
            swap_letters: s.swap_letters(),
        },
        SubshiftSpec::Substitution(s) => SpecDescription::Substitution {
            rules: s
                .rules()
                .iter()
                .map(|(k, v)| ((*k as char).to_string(), v.to_string()))
                .collect(),
            seed: (s.seed() as char).to_string(),
        },
        SubshiftSpec::Toeplitz(t) => SpecDescription::Toeplitz {
            pattern: String::from_utf8_lossy(t.pattern()).into_owned(),
        },
        SubshiftSpec::FullShift(a) => SpecDescription::FullShift {
            alphabet: a.to_string(),
        },
        SubshiftSpec::Explicit(f) => SpecDescription::Explicit {
            alphabet: f.alphabet().to_string(),
            forbidden: f.forbidden().iter().map(|w| w.to_string()).collect(),
        },
    }
}

/// Admissible words of length `n`.
pub fn factors(subshift: &Subshift, n: usize) -> Result<std::sync::Arc<BTreeSet<Word>>> {
    subshift.factors(n)
}

/// Word complexity at length `n`.
pub fn complexity(subshift: &Subshift, n: usize) -> Result<u64> {
    subshift.complexity(n)
}

/// Whether the substitution is primitive.
pub fn is_primitive(rules: &Substitution) -> bool {
    rules.is_primitive()
}

/// Least-squares slope and intercept of `ln ρ(n)` against `ln n` over `ns`.
pub fn loglog_slope(subshift: &Subshift, ns: std::ops::RangeInclusive<usize>) -> Result<(f64, f64)> {
    let hi = *ns.end();
    if *ns.start() == 0 || ns.clone().count() < 2 {
        return Err(Error::InvalidArgument("slope fit needs at least two positive lengths".into()));
    }
    let profile = subshift.complexity_profile(hi)?;
    let pts: Vec<(f64, f64)> = ns
        .map(|n| ((n as f64).ln(), (profile[n] as f64).ln()))
        .collect();
    Ok(linear_fit(&pts))
}

pub(crate) fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_spec_examples() {
        let fib: SpecDescription =
            serde_json::from_str(r#"{"variant":"substitution","rules":{"a":"ab","b":"a"},"seed":"a"}"#).unwrap();
        assert!(build_spec(&fib).is_ok());
        let bad: SpecDescription =
            serde_json::from_str(r#"{"variant":"substitution","rules":{"a":"a"},"seed":"a"}"#).unwrap();
        assert!(matches!(
            build_spec(&bad),
            Err(Error::ConditionViolated { condition: crate::error::SubstitutionCondition::Growth, .. })
        ));
        let np: SpecDescription =
            serde_json::from_str(r#"{"variant":"substitution","rules":{"a":"aba","b":"bb"},"seed":"a"}"#).unwrap();
        assert!(build_spec(&np).is_ok());
        let empty: SpecDescription = serde_json::from_str(r#"{"variant":"full_shift","alphabet":""}"#).unwrap();
        assert!(matches!(build_spec(&empty), Err(Error::EmptyAlphabet)));
    }

    #[test]
    fn describe_round_trips() {
        for json in [
            r#"{"variant":"sturmian","cf":[1,2]}"#,
            r#"{"variant":"toeplitz","pattern":"ab*a*"}"#,
            r#"{"variant":"explicit","alphabet":"ab","forbidden":["bb"]}"#,
        ] {
            let d: SpecDescription = serde_json::from_str(json).unwrap();
            assert_eq!(describe(&build_spec(&d).unwrap()), d);
        }
    }
}
