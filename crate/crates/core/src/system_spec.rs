//! JSON description of a tower system.
//!
//! ```json
//! { "generator": "periodic", "levels": [{ "words": ["1"] }, { "words": ["11"] }], "period": 1, "depth": 20 }
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::example_ab::ExampleGenerator;
use crate::tower::{LevelSource, LevelSpec, TowerError, TowerSystem};

/// Depth used for generators when neither the spec nor the caller gives one.
pub const DEFAULT_DEPTH: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Explicit,
    Periodic,
    ExampleAb,
    Odometer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelWords {
    pub words: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub generator: GeneratorKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelWords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl SystemSpec {
    /// `"odometer"` or `"example-ab"`.
    pub fn named(name: &str) -> Option<Self> {
        let generator = match name {
            "odometer" => GeneratorKind::Odometer,
            "example-ab" => GeneratorKind::ExampleAb,
            _ => return None,
        };
        Some(Self { generator, levels: Vec::new(), period: None, depth: None })
    }

    pub fn from_json(text: &str) -> Result<Self, TowerError> {
        serde_json::from_str(text).map_err(|e| TowerError::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    fn parsed_levels(&self) -> Result<Vec<LevelSpec>, TowerError> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| LevelSpec::parse_at(i + 1, &l.words.iter().map(String::as_str).collect::<Vec<_>>()))
            .collect()
    }

    /// Depth that [`SystemSpec::build`] uses for a given override.
    pub fn resolved_depth(&self, depth: Option<usize>) -> usize {
        depth.or(self.depth).unwrap_or(match self.generator {
            GeneratorKind::Explicit => self.levels.len(),
            _ => DEFAULT_DEPTH,
        })
    }

    /// Builds the system; `depth` overrides the spec's own depth.
    pub fn build(&self, depth: Option<usize>) -> Result<TowerSystem, TowerError> {
        let depth = self.resolved_depth(depth);
        let needs_levels = matches!(self.generator, GeneratorKind::Explicit | GeneratorKind::Periodic);
        if needs_levels && self.levels.is_empty() {
            return Err(TowerError::Spec("\"levels\" is required for this generator".into()));
        }
        if !needs_levels && !self.levels.is_empty() {
            return Err(TowerError::Spec("\"levels\" is only accepted by explicit and periodic generators".into()));
        }
        if self.period.is_some() && self.generator != GeneratorKind::Periodic {
            return Err(TowerError::Spec("\"period\" is only accepted by the periodic generator".into()));
        }
        let source = match self.generator {
            GeneratorKind::Explicit => LevelSource::Explicit(self.parsed_levels()?),
            GeneratorKind::Periodic => LevelSource::Periodic {
                levels: self.parsed_levels()?,
                period: self.period.ok_or_else(|| TowerError::Spec("\"period\" is required".into()))?,
            },
            GeneratorKind::Odometer => LevelSource::Odometer,
            GeneratorKind::ExampleAb => {
                if depth < 2 {
                    return Err(TowerError::Spec(format!("example-ab needs depth >= 2, got {depth}")));
                }
                LevelSource::Generator(Arc::new(ExampleGenerator))
            }
        };
        TowerSystem::build(source, depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_generators() {
        let ex = SystemSpec::named("example-ab").unwrap().build(Some(5)).unwrap();
        assert_eq!(ex.depth(), 5);
        assert_eq!(ex.name(), "example-ab");
        assert_eq!(SystemSpec::named("odometer").unwrap().build(None).unwrap().depth(), DEFAULT_DEPTH);
        assert!(SystemSpec::named("nope").is_none());
    }

    #[test]
    fn explicit_from_json() {
        let spec = SystemSpec::from_json(r#"{"generator":"explicit","levels":[{"words":["1","1"]},{"words":["2211111","22211"]}]}"#)
            .unwrap();
        let sys = spec.build(None).unwrap();
        assert_eq!(sys.depth(), 2);
        assert_eq!(sys.word(2, 2), &[2, 2, 2, 1, 1]);
        assert_eq!(SystemSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn periodic_from_json() {
        let spec =
            SystemSpec::from_json(r#"{"generator":"periodic","levels":[{"words":["1"]},{"words":["11"]}],"period":1,"depth":9}"#)
                .unwrap();
        let sys = spec.build(None).unwrap();
        assert_eq!(sys.depth(), 9);
        assert_eq!(sys.heights(9).unwrap()[0], 256.into());
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = |s: &str| SystemSpec::from_json(s).and_then(|spec| spec.build(None));
        assert!(matches!(bad(r#"{"generator":"explicit"}"#), Err(TowerError::Spec(_))));
        assert!(matches!(bad(r#"{"generator":"odometer","extra":1}"#), Err(TowerError::Spec(_))));
        assert!(matches!(bad(r#"{"generator":"periodic","levels":[{"words":["1"]}]}"#), Err(TowerError::Spec(_))));
        assert!(matches!(
            bad(r#"{"generator":"explicit","levels":[{"words":["1","1"]},{"words":["210","21"]}]}"#),
            Err(TowerError::UnparsableWord { .. } | TowerError::InvalidWord { .. })
        ));
    }
}
