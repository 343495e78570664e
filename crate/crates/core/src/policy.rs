//! Tree-depth policies, selectable by name at runtime.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{FfiaError, Result};
use crate::special::{empirical_level, select_level, CostModel};

/// Chooses `l_max` for a source/target count and FMM truncation `p`.
pub trait LevelPolicy: Send + Sync + fmt::Debug {
    /// Registry name, including any argument (`"fixed:7"`).
    fn name(&self) -> String;
    fn choose(&self, sources: usize, targets: usize, p: usize) -> usize;
}

/// Minimises the modelled operation count.
#[derive(Debug, Default)]
pub struct CostModelPolicy {
    pub cost: CostModel,
}

impl LevelPolicy for CostModelPolicy {
    fn name(&self) -> String {
        "cost-model".into()
    }

    fn choose(&self, sources: usize, targets: usize, p: usize) -> usize {
        select_level(sources, targets, p, &self.cost)
    }
}

/// `l_max = log2 N - l_star`.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalPolicy {
    pub l_star: usize,
}

impl Default for EmpiricalPolicy {
    fn default() -> Self {
        Self { l_star: 5 }
    }
}

impl LevelPolicy for EmpiricalPolicy {
    fn name(&self) -> String {
        if self.l_star == 5 {
            "empirical".into()
        } else {
            format!("empirical:{}", self.l_star)
        }
    }

    fn choose(&self, sources: usize, targets: usize, _p: usize) -> usize {
        empirical_level(sources, targets, self.l_star)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedLevel(pub usize);

impl LevelPolicy for FixedLevel {
    fn name(&self) -> String {
        format!("fixed:{}", self.0)
    }

    fn choose(&self, _sources: usize, _targets: usize, _p: usize) -> usize {
        self.0
    }
}

type Factory = Box<dyn Fn(Option<&str>) -> Result<Arc<dyn LevelPolicy>> + Send + Sync>;

/// Name to policy constructor. Specs have the form `name` or `name:arg`.
pub struct PolicyRegistry {
    factories: BTreeMap<String, Factory>,
}

impl PolicyRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(
        &mut self,
        name: &str,
        factory: impl Fn(Option<&str>) -> Result<Arc<dyn LevelPolicy>> + Send + Sync + 'static,
    ) {
        self.factories.insert(name.to_owned(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn resolve(&self, spec: &str) -> Result<Arc<dyn LevelPolicy>> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let factory = self.factories.get(name).ok_or_else(|| {
            FfiaError::InvalidArgument(format!(
                "unknown level policy '{name}' (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        factory(arg)
    }
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register("cost-model", |arg| {
            no_argument("cost-model", arg)?;
            Ok(Arc::new(CostModelPolicy::default()))
        });
        registry.register("empirical", |arg| {
            let l_star = match arg {
                Some(a) => parse_level(a)?,
                None => 5,
            };
            Ok(Arc::new(EmpiricalPolicy { l_star }))
        });
        registry.register("fixed", |arg| {
            let level = parse_level(arg.ok_or_else(|| {
                FfiaError::InvalidArgument("fixed level policy needs 'fixed:<level>'".into())
            })?)?;
            if !(2..=30).contains(&level) {
                return Err(FfiaError::InvalidArgument(format!(
                    "fixed level {level} outside 2..=30"
                )));
            }
            Ok(Arc::new(FixedLevel(level)))
        });
        registry
    }
}

impl fmt::Debug for PolicyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

fn no_argument(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        Some(a) => Err(FfiaError::InvalidArgument(format!(
            "policy '{name}' takes no argument, got '{a}'"
        ))),
        None => Ok(()),
    }
}

fn parse_level(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| FfiaError::InvalidArgument(format!("'{s}' is not a level")))
}
