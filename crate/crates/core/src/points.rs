//! Bi-infinite admissible points exposed through finite centered windows.

use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Subshift, SubshiftSpec, Word};

/// Windows up to this length are checked against the language oracle.
pub const GUARD_MAX_LEN: usize = 65;

const MIN_BUFFER_RADIUS: usize = 64;

/// How the letters of a point are produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointGenerator {
    /// Two-sided Sturmian point built from even-index standard words of the
    /// owning Sturmian spec, read from `intercept`.
    Mechanical { intercept: i64 },
    /// Two-sided fixed point of the square of the owning substitution, with
    /// `x_{-1} = left` and `x_0 = right`.
    SubstitutionFixedPoint { left: u8, right: u8 },
    /// Two-sided Toeplitz sequence of the owning pattern, read from `anchor`.
    Toeplitz { anchor: i64 },
    /// `x_i = period[i mod |period|]`.
    Periodic { period: Word },
    /// `core[origin]` sits at index 0; the tails repeat outward.
    Explicit {
        left_tail: Word,
        core: Word,
        origin: usize,
        right_tail: Word,
    },
}

/// Serializable point descriptor, embedded in spec files under `"point"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointDescription {
    Mechanical {
        #[serde(default)]
        intercept: i64,
    },
    SubstitutionFixedPoint {
        left: String,
        right: String,
    },
    Toeplitz {
        #[serde(default)]
        anchor: i64,
    },
    Periodic {
        period: String,
    },
    Explicit {
        left_tail: String,
        core: String,
        #[serde(default)]
        origin: usize,
        right_tail: String,
    },
}

impl PointDescription {
    pub fn to_generator(&self) -> Result<PointGenerator> {
        let letter = |s: &str| -> Result<u8> {
            match s.as_bytes() {
                [c] => Ok(*c),
                _ => Err(Error::InvalidSpec(format!("'{s}' is not a single letter"))),
            }
        };
        Ok(match self {
            PointDescription::Mechanical { intercept } => PointGenerator::Mechanical {
                intercept: *intercept,
            },
            PointDescription::SubstitutionFixedPoint { left, right } => {
                PointGenerator::SubstitutionFixedPoint {
                    left: letter(left)?,
                    right: letter(right)?,
                }
            }
            PointDescription::Toeplitz { anchor } => PointGenerator::Toeplitz { anchor: *anchor },
            PointDescription::Periodic { period } => PointGenerator::Periodic {
                period: Word::from(period.as_str()),
            },
            PointDescription::Explicit {
                left_tail,
                core,
                origin,
                right_tail,
            } => PointGenerator::Explicit {
                left_tail: Word::from(left_tail.as_str()),
                core: Word::from(core.as_str()),
                origin: *origin,
                right_tail: Word::from(right_tail.as_str()),
            },
        })
    }
}

/// Letters `base_{-radius} ..= base_{radius}` of the unshifted sequence.
struct Buffer {
    data: Vec<u8>,
    radius: usize,
}

/// A point of a subshift. Immutable apart from its internally synchronized
/// letter cache, so it can be shared across threads.
pub struct Point {
    subshift: Arc<Subshift>,
    generator: PointGenerator,
    cache: RwLock<Buffer>,
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Point").field("generator", &self.generator).finish()
    }
}

impl Point {
    pub fn new(subshift: Arc<Subshift>, generator: PointGenerator) -> Result<Self> {
        validate(&subshift, &generator)?;
        let point = Point {
            subshift,
            generator,
            cache: RwLock::new(Buffer {
                data: Vec::new(),
                radius: 0,
            }),
        };
        // probe so that an inconsistent generator fails at construction
        point.window(0, 16)?;
        Ok(point)
    }

    /// A canonical point for generated families: the mechanical point for
    /// Sturmian specs, the first admissible two-sided fixed point of the
    /// squared substitution, and the Toeplitz point at anchor 0. Full shifts
    /// and shifts of finite type need a user-supplied point.
    pub fn default_for(subshift: Arc<Subshift>) -> Result<Self> {
        let generator = match subshift.spec() {
            SubshiftSpec::Sturmian(_) => PointGenerator::Mechanical { intercept: 0 },
            SubshiftSpec::Toeplitz(_) => PointGenerator::Toeplitz { anchor: 0 },
            SubshiftSpec::Substitution(s) => {
                let letters = s.alphabet().letters().to_vec();
                let mut found = None;
                'search: for &left in &letters {
                    for &right in &letters {
                        let g = PointGenerator::SubstitutionFixedPoint { left, right };
                        if validate(&subshift, &g).is_ok() {
                            found = Some(g);
                            break 'search;
                        }
                    }
                }
                found.ok_or_else(|| {
                    Error::InvalidSpec("no two-sided fixed point of the squared substitution".into())
                })?
            }
            SubshiftSpec::FullShift(_) | SubshiftSpec::Explicit(_) => {
                return Err(Error::InvalidSpec(
                    "no default point for this family; supply a point descriptor".into(),
                ))
            }
        };
        Point::new(subshift, generator)
    }

    pub fn subshift(&self) -> &Arc<Subshift> {
        &self.subshift
    }

    pub fn generator(&self) -> &PointGenerator {
        &self.generator
    }

    fn shift(&self) -> i64 {
        match self.generator {
            PointGenerator::Mechanical { intercept } => intercept,
            PointGenerator::Toeplitz { anchor } => anchor,
            _ => 0,
        }
    }

    /// Calls `f` with the letters `x_{lo} ..= x_{hi}` without copying.
    pub fn with_segment<R>(&self, lo: i64, hi: i64, f: impl FnOnce(&[u8]) -> R) -> Result<R> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty segment {lo}..={hi}")));
        }
        let (blo, bhi) = (lo + self.shift(), hi + self.shift());
        let needed = blo.unsigned_abs().max(bhi.unsigned_abs()) as usize;
        {
            let cache = self.cache.read().unwrap();
            if cache.radius >= needed {
                let start = (cache.radius as i64 + blo) as usize;
                let end = (cache.radius as i64 + bhi) as usize;
                return Ok(f(&cache.data[start..=end]));
            }
        }
        let mut cache = self.cache.write().unwrap();
        if cache.radius < needed {
            let radius = needed.max(2 * cache.radius).max(MIN_BUFFER_RADIUS);
            cache.data = self.generate(radius)?;
            cache.radius = radius;
        }
        let start = (cache.radius as i64 + blo) as usize;
        let end = (cache.radius as i64 + bhi) as usize;
        Ok(f(&cache.data[start..=end]))
    }

    /// Letters `x_{lo} ..= x_{hi}`.
    pub fn segment(&self, lo: i64, hi: i64) -> Result<Vec<u8>> {
        self.with_segment(lo, hi, |s| s.to_vec())
    }

    /// The centered window `x_{center-radius} ..= x_{center+radius}`.
    /// Windows of length at most [`GUARD_MAX_LEN`] are checked against the
    /// language of the owning subshift.
    pub fn window(&self, center: i64, radius: usize) -> Result<Word> {
        let r = radius as i64;
        let w = Word::new(self.segment(center - r, center + r)?);
        if w.len() <= GUARD_MAX_LEN && !self.subshift.is_admissible(w.as_bytes())? {
            return Err(Error::AdmissibilityViolation {
                window: w.to_string(),
            });
        }
        Ok(w)
    }

    /// Base letters on `[-radius, radius]`.
    fn generate(&self, radius: usize) -> Result<Vec<u8>> {
        let len = 2 * radius + 1;
        let spec = self.subshift.spec();
        let data = match (&self.generator, spec) {
            (PointGenerator::Mechanical { .. }, SubshiftSpec::Sturmian(s)) => {
                let w = s.standard_word(radius + 1, Some(0));
                two_sided(&w[w.len() - radius..], &w[..=radius])
            }
            (PointGenerator::SubstitutionFixedPoint { left, right }, SubshiftSpec::Substitution(s)) => {
                let mut l = vec![*left];
                while l.len() < radius {
                    l = s.apply(&s.apply(&l));
                }
                let mut r = vec![*right];
                while r.len() < radius + 1 {
                    r = s.apply(&s.apply(&r));
                }
                two_sided(&l[l.len() - radius..], &r[..=radius])
            }
            (PointGenerator::Toeplitz { .. }, SubshiftSpec::Toeplitz(t)) => (-(radius as i64)..=radius as i64)
                .map(|j| {
                    t.letter_at(j).ok_or_else(|| {
                        Error::InvalidSpec(format!("Toeplitz position {j} is never filled"))
                    })
                })
                .collect::<Result<Vec<u8>>>()?,
            (PointGenerator::Periodic { period }, _) => {
                let p = period.as_bytes();
                (-(radius as i64)..=radius as i64)
                    .map(|j| p[j.rem_euclid(p.len() as i64) as usize])
                    .collect()
            }
            (
                PointGenerator::Explicit {
                    left_tail,
                    core,
                    origin,
                    right_tail,
                },
                _,
            ) => {
                let (lt, c, rt) = (left_tail.as_bytes(), core.as_bytes(), right_tail.as_bytes());
                let start = -(*origin as i64);
                let end = start + c.len() as i64;
                (-(radius as i64)..=radius as i64)
                    .map(|j| {
                        if j < start {
                            let back = (start - 1 - j) as usize;
                            lt[lt.len() - 1 - back % lt.len()]
                        } else if j < end {
                            c[(j - start) as usize]
                        } else {
                            rt[(j - end) as usize % rt.len()]
                        }
                    })
                    .collect()
            }
            _ => unreachable!("generator validated against the spec"),
        };
        debug_assert_eq!(data.len(), len);
        Ok(data)
    }
}

fn two_sided(left: &[u8], right: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(left.len() + right.len());
    v.extend_from_slice(left);
    v.extend_from_slice(right);
    v
}

fn validate(subshift: &Subshift, generator: &PointGenerator) -> Result<()> {
    let spec = subshift.spec();
    let alphabet = subshift.alphabet();
    match (generator, spec) {
        (PointGenerator::Mechanical { .. }, SubshiftSpec::Sturmian(_)) => Ok(()),
        (PointGenerator::Mechanical { .. }, _) => {
            Err(Error::SpecMismatch("mechanical points need a Sturmian spec".into()))
        }
        (PointGenerator::SubstitutionFixedPoint { left, right }, SubshiftSpec::Substitution(s)) => {
            alphabet.check_word(&[*left, *right])?;
            let l2 = s.iterate(&[*left], 2);
            let r2 = s.iterate(&[*right], 2);
            if l2.last() != Some(*left) || l2.len() < 2 {
                return Err(Error::InvalidSpec(format!(
                    "square of the substitution does not end '{}' with itself",
                    *left as char
                )));
            }
            if r2.first() != Some(*right) || r2.len() < 2 {
                return Err(Error::InvalidSpec(format!(
                    "square of the substitution does not start '{}' with itself",
                    *right as char
                )));
            }
            if !subshift.is_admissible(&[*left, *right])? {
                return Err(Error::InvalidSpec(format!(
                    "seed pair '{}{}' is not admissible",
                    *left as char, *right as char
                )));
            }
            Ok(())
        }
        (PointGenerator::SubstitutionFixedPoint { .. }, _) => Err(Error::SpecMismatch(
            "substitution fixed points need a substitution spec".into(),
        )),
        (PointGenerator::Toeplitz { .. }, SubshiftSpec::Toeplitz(t)) => {
            let p = t.period() as i64;
            for j in -p..0 {
                if t.letter_at(j).is_none() {
                    return Err(Error::InvalidSpec(format!(
                        "two-sided Toeplitz sequence leaves position {j} unfilled"
                    )));
                }
            }
            Ok(())
        }
        (PointGenerator::Toeplitz { .. }, _) => {
            Err(Error::SpecMismatch("Toeplitz points need a Toeplitz spec".into()))
        }
        (PointGenerator::Periodic { period }, _) => {
            if period.is_empty() {
                return Err(Error::InvalidSpec("period is empty".into()));
            }
            alphabet.check_word(period.as_bytes())
        }
        (
            PointGenerator::Explicit {
                left_tail,
                core,
                origin,
                right_tail,
            },
            _,
        ) => {
            if left_tail.is_empty() || right_tail.is_empty() || core.is_empty() {
                return Err(Error::InvalidSpec("explicit point parts must be nonempty".into()));
            }
            if *origin >= core.len() {
                return Err(Error::InvalidSpec("origin outside the core word".into()));
            }
            alphabet.check_word(left_tail.as_bytes())?;
            alphabet.check_word(core.as_bytes())?;
            alphabet.check_word(right_tail.as_bytes())
        }
    }
}

/// Window `x_{center-radius} ..= x_{center+radius}` of `p`.
pub fn window(p: &Point, center: i64, radius: usize) -> Result<Word> {
    p.window(center, radius)
}

/// Smallest period of the radius-`radius` window around 0, provided the
/// window repeats it at least twice.
pub fn is_periodic_window(p: &Point, radius: usize) -> Result<Option<usize>> {
    if radius == 0 {
        return Err(Error::InvalidArgument("radius must be at least 1".into()));
    }
    let w = p.segment(-(radius as i64), radius as i64)?;
    Ok(smallest_period(&w))
}

pub(crate) fn smallest_period(w: &[u8]) -> Option<usize> {
    (1..=w.len() / 2).find(|&per| w[per..].iter().zip(w).all(|(a, b)| a == b))
}
