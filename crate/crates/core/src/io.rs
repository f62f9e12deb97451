//! JSON file formats: subshift specs (with an optional point), cocycle
//! elements, generator sets and step measures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fullgroup::{fibonacci_generators, CocycleElement, GeneratorSet};
use crate::points::{Point, PointDescription};
use crate::randwalk::StepMeasure;
use crate::symbolic::{build_spec, describe, SpecDescription, Subshift, Word};

/// A spec file: the subshift description plus an optional `"point"`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecFile {
    pub spec: SpecDescription,
    pub point: Option<PointDescription>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let point = match value.as_object_mut().and_then(|o| o.remove("point")) {
            Some(p) => Some(serde_json::from_value(p)?),
            None => None,
        };
        Ok(SpecFile {
            spec: serde_json::from_value(value)?,
            point,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(&self.spec)?;
        if let (Some(p), Some(o)) = (&self.point, value.as_object_mut()) {
            o.insert("point".into(), serde_json::to_value(p)?);
        }
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn subshift(&self) -> Result<Arc<Subshift>> {
        Ok(Subshift::new(build_spec(&self.spec)?))
    }

    /// The declared point, or the family default.
    pub fn point(&self, subshift: Arc<Subshift>) -> Result<Point> {
        match &self.point {
            Some(p) => Point::new(subshift, p.to_generator()?),
            None => Point::default_for(subshift),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub word: String,
    pub k: i64,
}

/// `{depth, entries: [{word, k}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub depth: usize,
    pub entries: Vec<EntryJson>,
}

impl ElementJson {
    pub fn from_element(g: &CocycleElement) -> Self {
        ElementJson {
            depth: g.depth(),
            entries: g
                .table()
                .iter()
                .map(|(w, &k)| EntryJson { word: w.to_string(), k })
                .collect(),
        }
    }

    pub fn to_element(&self, subshift: Arc<Subshift>) -> Result<CocycleElement> {
        let mut table = BTreeMap::new();
        for e in &self.entries {
            if table.insert(Word::from(e.word.as_str()), e.k).is_some() {
                return Err(Error::IncompleteTable(format!("word '{}' listed twice", e.word)));
            }
        }
        CocycleElement::from_table(subshift, self.depth, table)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedElementJson {
    pub name: String,
    #[serde(flatten)]
    pub element: ElementJson,
}

/// Generator file: a spec path (relative to the file) and either a builtin
/// set or explicit tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsFile {
    pub spec: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<NamedElementJson>,
}

/// A loaded generator file together with the spec it references.
pub struct LoadedGenerators {
    pub spec_path: PathBuf,
    pub spec: SpecFile,
    pub gens: GeneratorSet,
}

impl GeneratorsFile {
    pub fn load(path: &Path) -> Result<LoadedGenerators> {
        let file: GeneratorsFile = serde_json::from_str(&read_text(path)?)?;
        let spec_path = path.parent().unwrap_or(Path::new(".")).join(&file.spec);
        let spec = SpecFile::load(&spec_path)?;
        let gens = file.resolve(spec.subshift()?)?;
        Ok(LoadedGenerators { spec_path, spec, gens })
    }

    pub fn resolve(&self, subshift: Arc<Subshift>) -> Result<GeneratorSet> {
        match (&self.builtin, self.generators.is_empty()) {
            (Some(name), true) if name == "fibonacci" => fibonacci_generators(&subshift),
            (Some(name), true) => Err(Error::InvalidSpec(format!("unknown builtin generator set '{name}'"))),
            (Some(_), false) => Err(Error::InvalidSpec("give either a builtin or generator tables, not both".into())),
            (None, _) => GeneratorSet::new(
                subshift.clone(),
                self.generators
                    .iter()
                    .map(|g| Ok((g.name.clone(), g.element.to_element(subshift.clone())?)))
                    .collect::<Result<_>>()?,
            ),
        }
    }
}

/// Measure file: `{"uniform": true}` or `{"atoms": [{"generator", "p"}]}`,
/// probabilities written as `"1/3"`, `"0.25"` or `"1"`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    #[serde(default)]
    pub uniform: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    /// a generator name, `"e"` for the identity, or `"name^-1"`
    pub generator: String,
    pub p: String,
}

impl MeasureFile {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_text(path)?)?)
    }

    pub fn resolve(&self, gens: &GeneratorSet) -> Result<StepMeasure> {
        if self.uniform || self.atoms.is_empty() {
            if !self.atoms.is_empty() {
                return Err(Error::InvalidArgument("a uniform measure takes no atom list".into()));
            }
            return StepMeasure::uniform(gens);
        }
        let sym = gens.symmetrized()?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let g = if a.generator == "e" {
                    CocycleElement::identity(gens.subshift().clone())?
                } else {
                    sym.get(&a.generator)
                        .cloned()
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown generator '{}'", a.generator)))?
                };
                Ok((a.generator.clone(), g, parse_probability(&a.p)?))
            })
            .collect::<Result<_>>()?;
        StepMeasure::new(gens.subshift().clone(), atoms)
    }
}

/// File contents, with the path in the error message.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// Exact rational from `"p/q"`, a decimal, or an integer.
pub fn parse_probability(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("'{s}' is not a probability"));
    let s = s.trim();
    let q = if let Some((int, frac)) = s.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || !int.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = BigInt::from_str(&format!("{int}{frac}")).map_err(|_| bad())?;
        BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
    } else {
        BigRational::from_str(s).map_err(|_| bad())?
    };
    if q < BigRational::zero() || q > BigRational::one() {
        return Err(bad());
    }
    Ok(q)
}

/// Spec file for a subshift with no point attached.
pub fn spec_file_for(subshift: &Subshift) -> SpecFile {
    SpecFile {
        spec: describe(subshift.spec()),
        point: None,
    }
}
