use crate::error::{Error, Result};

use super::models::{BvE, BvG, BvGCo, BvGE, BvGG, BvH1, Decomposer, Rof};
use super::params::ModelParams;

pub type BuildFn = fn(&ModelParams) -> Result<Box<dyn Decomposer>>;

/// A named model and how to build it from parameters.
#[derive(Clone, Copy)]
pub struct ModelEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Produces a noise component `w`.
    pub three_part: bool,
    /// Parameters without a default.
    pub required: &'static [&'static str],
    pub build: BuildFn,
}

impl std::fmt::Debug for ModelEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelEntry")
            .field("name", &self.name)
            .field("three_part", &self.three_part)
            .field("required", &self.required)
            .finish()
    }
}

/// Name-keyed collection of decomposition models.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    entries: Vec<ModelEntry>,
}

fn boxed<D: Decomposer + 'static>(d: Result<D>) -> Result<Box<dyn Decomposer>> {
    Ok(Box::new(d?))
}

const BUILTIN: [ModelEntry; 7] = [
    ModelEntry {
        name: "rof",
        summary: "total variation with L2 fidelity",
        three_part: false,
        required: &["lambda"],
        build: |p| boxed(Rof::from_params(p)),
    },
    ModelEntry {
        name: "bv-g",
        summary: "structures + textures in a G-ball",
        three_part: false,
        required: &["lambda", "mu"],
        build: |p| boxed(BvG::from_params(p)),
    },
    ModelEntry {
        name: "bv-e",
        summary: "structures + textures in a Besov ball (wavelet shrinkage)",
        three_part: false,
        required: &["lambda", "mu"],
        build: |p| boxed(BvE::from_params(p)),
    },
    ModelEntry {
        name: "bv-h1",
        summary: "total variation with H^-1 fidelity",
        three_part: false,
        required: &["lambda"],
        build: |p| boxed(BvH1::from_params(p)),
    },
    ModelEntry {
        name: "bv-g-g",
        summary: "structures + textures + noise in two G-balls, locally weighted",
        three_part: true,
        required: &["lambda", "mu1", "mu2", "window"],
        build: |p| boxed(BvGG::from_params(p)),
    },
    ModelEntry {
        name: "bv-g-e",
        summary: "structures + textures + noise, wavelet shrinkage",
        three_part: true,
        required: &["lambda", "mu", "delta"],
        build: |p| boxed(BvGE::from_params(p)),
    },
    ModelEntry {
        name: "bv-g-co",
        summary: "structures + textures + noise, contourlet shrinkage",
        three_part: true,
        required: &["lambda", "mu", "delta"],
        build: |p| boxed(BvGCo::from_params(p)),
    },
];

impl ModelRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The seven built-in models.
    pub fn builtin() -> Self {
        Self {
            entries: BUILTIN.to_vec(),
        }
    }

    /// Adds a model; names must be unique.
    pub fn register(&mut self, entry: ModelEntry) -> Result<()> {
        if self.get(entry.name).is_some() {
            return Err(Error::invalid("model", format!("`{}` is already registered", entry.name)));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ModelEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn entries(&self) -> &[ModelEntry] {
        &self.entries
    }

    pub fn build(&self, name: &str, params: &ModelParams) -> Result<Box<dyn Decomposer>> {
        let entry = self.get(name).ok_or_else(|| Error::UnknownModel(name.to_string()))?;
        (entry.build)(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_and_lookup() {
        let r = ModelRegistry::builtin();
        assert_eq!(r.names(), ["rof", "bv-g", "bv-e", "bv-h1", "bv-g-g", "bv-g-e", "bv-g-co"]);
        assert!(matches!(r.build("tv-l1", &ModelParams::default()), Err(Error::UnknownModel(_))));
        let m = r
            .build(
                "bv-g",
                &ModelParams {
                    lambda: Some(1.0),
                    mu: Some(2.0),
                    ..Default::default()
                },
            )
            .unwrap();
        assert_eq!(m.name(), "bv-g");
    }

    #[test]
    fn duplicate_registration_rejected() {
        let mut r = ModelRegistry::builtin();
        let e = *r.get("rof").unwrap();
        assert!(r.register(e).is_err());
        let mut fresh = ModelRegistry::empty();
        fresh.register(e).unwrap();
        assert_eq!(fresh.names(), ["rof"]);
    }

    #[test]
    fn required_fields_are_enforced() {
        let r = ModelRegistry::builtin();
        for e in r.entries() {
            if e.required.is_empty() {
                continue;
            }
            assert!(r.build(e.name, &ModelParams::default()).is_err(), "{}", e.name);
        }
    }
}
