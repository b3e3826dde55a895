use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Free,
    FiniteTable,
    SmallCancellation,
    FreeProduct,
}

/// Multiplication table of a finite group. Element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicationTable {
    /// Element index of each declared generator.
    pub generator_elements: Vec<usize>,
    /// `products[i][j]` is the index of `i * j`.
    pub products: Vec<Vec<usize>>,
}

/// Declarative description of a group, its absolute generating set and its
/// parabolic subgroups. Read from JSON; see `specs/` for samples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub family: Family,
    /// Primitive generator names. Derived from the factors for free products.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<MultiplicationTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<GroupSpec>,
    /// Factor indices of the parabolic subgroups, or `"none"`.
    #[serde(
        default,
        serialize_with = "ser_parabolics",
        deserialize_with = "de_parabolics"
    )]
    pub parabolics: Vec<usize>,
    /// Extra absolute generators, each a word over the primitive generators.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub redundant_generators: Vec<String>,
}

fn ser_parabolics<S: Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_empty() {
        s.serialize_str("none")
    } else {
        v.serialize(s)
    }
}

fn de_parabolics<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Keyword(String),
        Indices(Vec<usize>),
    }
    match Raw::deserialize(d)? {
        Raw::Keyword(k) if k == "none" => Ok(Vec::new()),
        Raw::Keyword(k) => Err(serde::de::Error::custom(format!(
            "parabolics must be a list of factor indices or \"none\", got \"{k}\""
        ))),
        Raw::Indices(v) => Ok(v),
    }
}

impl GroupSpec {
    pub fn free(generators: &[&str]) -> Self {
        GroupSpec {
            family: Family::Free,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            relators: Vec::new(),
            table: None,
            factors: Vec::new(),
            parabolics: Vec::new(),
            redundant_generators: Vec::new(),
        }
    }

    /// Cyclic group of the given order as a finite table on one generator.
    pub fn cyclic(generator: &str, order: usize) -> Self {
        assert!(order >= 1);
        let products = (0..order)
            .map(|i| (0..order).map(|j| (i + j) % order).collect())
            .collect();
        GroupSpec {
            family: Family::FiniteTable,
            generators: vec![generator.to_string()],
            relators: Vec::new(),
            table: Some(MultiplicationTable {
                generator_elements: vec![1 % order],
                products,
            }),
            factors: Vec::new(),
            parabolics: Vec::new(),
            redundant_generators: Vec::new(),
        }
    }

    pub fn small_cancellation(generators: &[&str], relators: &[&str]) -> Self {
        GroupSpec {
            family: Family::SmallCancellation,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            relators: relators.iter().map(|s| s.to_string()).collect(),
            table: None,
            factors: Vec::new(),
            parabolics: Vec::new(),
            redundant_generators: Vec::new(),
        }
    }

    pub fn free_product(factors: Vec<GroupSpec>, parabolics: Vec<usize>) -> Self {
        GroupSpec {
            family: Family::FreeProduct,
            generators: Vec::new(),
            relators: Vec::new(),
            table: None,
            factors,
            parabolics,
            redundant_generators: Vec::new(),
        }
    }

    pub fn with_redundant(mut self, words: &[&str]) -> Self {
        self.redundant_generators = words.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    /// All primitive generator names in global order.
    pub fn primitive_generators(&self) -> Vec<String> {
        match self.family {
            Family::FreeProduct => self
                .factors
                .iter()
                .flat_map(|f| f.primitive_generators())
                .collect(),
            _ => self.generators.clone(),
        }
    }

    /// Hex SHA-256 of the compact JSON serialisation.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("spec serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Structural checks that do not need the word problem.
    pub fn check_structure(&self) -> Result<()> {
        let gens = self.primitive_generators();
        for name in &gens {
            let ok = !name.is_empty()
                && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::InvalidSpec(format!(
                    "generator name `{name}` is not an ASCII identifier"
                )));
            }
        }
        let mut sorted = gens.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != gens.len() {
            return Err(Error::InvalidSpec(
                "generator names must be pairwise distinct".into(),
            ));
        }
        match self.family {
            Family::FreeProduct => {
                if self.factors.is_empty() {
                    return Err(Error::InvalidSpec("free product needs factors".into()));
                }
                if !self.generators.is_empty() && self.generators != gens {
                    return Err(Error::InvalidSpec(
                        "free-product generators must be the concatenated factor generators"
                            .into(),
                    ));
                }
                for &p in &self.parabolics {
                    if p >= self.factors.len() {
                        return Err(Error::InvalidSpec(format!(
                            "parabolic index {p} refers to no factor"
                        )));
                    }
                }
                let mut ps = self.parabolics.clone();
                ps.sort();
                ps.dedup();
                if ps.len() != self.parabolics.len() {
                    return Err(Error::InvalidSpec("parabolic indices repeat".into()));
                }
                for f in &self.factors {
                    if !f.parabolics.is_empty() || !f.redundant_generators.is_empty() {
                        return Err(Error::InvalidSpec(
                            "factors may not declare parabolics or redundant generators".into(),
                        ));
                    }
                    f.check_structure()?;
                }
            }
            _ => {
                if !self.parabolics.is_empty() {
                    return Err(Error::InvalidSpec(
                        "parabolics are factor indices and need the free-product family".into(),
                    ));
                }
                if !self.factors.is_empty() {
                    return Err(Error::InvalidSpec("only free products have factors".into()));
                }
            }
        }
        if self.family == Family::FiniteTable && self.table.is_none() {
            return Err(Error::InvalidSpec("finite-table family needs a table".into()));
        }
        if self.family != Family::SmallCancellation && !self.relators.is_empty() {
            return Err(Error::InvalidSpec(
                "relators are only allowed in the small-cancellation family".into(),
            ));
        }
        Ok(())
    }
}
