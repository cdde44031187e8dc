use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::divisor::{parse_terms, Divisor, ModelTag};
use super::SurfaceError;
use crate::cones::cone_rays;
use crate::qlinalg::{
    LinalgError, LinearProgram, LpOutcome, QMat, QVec, Rat, Relation,
};

/// Bundled models: name and JSON source.
pub const BUNDLED_MODELS: &[(&str, &str)] = &[
    ("blp2", include_str!("../../models/blp2.json")),
    ("blp2x2", include_str!("../../models/blp2x2.json")),
    ("hirzebruch-0", include_str!("../../models/hirzebruch-0.json")),
    ("hirzebruch-1", include_str!("../../models/hirzebruch-1.json")),
    ("hirzebruch-2", include_str!("../../models/hirzebruch-2.json")),
];

/// On-disk model format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub classes: Vec<String>,
    pub intersection: Vec<Vec<Rat>>,
    pub effective_generators: Vec<BTreeMap<String, Rat>>,
    pub canonical: BTreeMap<String, Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<BTreeMap<String, Rat>>,
}

/// A declared generator of the effective cone.
///
/// A generator equal to a single class takes that class name as its label;
/// any other generator is labelled by its literal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    pub divisor: Divisor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NefCheck {
    pub nef: bool,
    /// `D·G` for every generator, in declaration order.
    pub values: Vec<(String, Rat)>,
    /// First generator with negative pairing.
    pub violator: Option<(String, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsefCheck {
    pub pseudoeffective: bool,
    /// Nonnegative weights over the generators when pseudo-effective.
    pub expression: Option<Vec<(String, Rat)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    tag: Arc<ModelTag>,
    description: Option<String>,
    intersection: QMat,
    generators: Vec<Generator>,
    canonical: Divisor,
    genus: Option<BTreeMap<String, u64>>,
    relations: Vec<Divisor>,
    nef_generators: Vec<Divisor>,
}

impl SurfaceModel {
    pub fn from_file(file: ModelFile, fallback_name: &str) -> Result<Self, SurfaceError> {
        let bad = |m: String| SurfaceError::InvalidModel(m);
        let n = file.classes.len();
        if n == 0 {
            return Err(bad("no classes".into()));
        }
        for (i, c) in file.classes.iter().enumerate() {
            if file.classes[..i].contains(c) {
                return Err(bad(format!("duplicate class `{c}`")));
            }
            parse_terms(c)
                .ok()
                .filter(|t| t.len() == 1 && t[0].1.as_deref() == Some(c.as_str()))
                .ok_or_else(|| bad(format!("class name `{c}` is not an identifier")))?;
        }
        let intersection = QMat::from_rows(file.intersection).map_err(|e| bad(e.to_string()))?;
        if intersection.nrows() != n || intersection.ncols() != n {
            return Err(bad(format!("intersection form must be {n}x{n}")));
        }
        if !intersection.is_symmetric() {
            return Err(bad("intersection form is not symmetric".into()));
        }
        let tag = Arc::new(ModelTag {
            name: file.name.unwrap_or_else(|| fallback_name.to_string()),
            classes: file.classes,
        });
        let from_map = |m: &BTreeMap<String, Rat>| -> Result<Divisor, SurfaceError> {
            let mut v = vec![Rat::zero(); n];
            for (k, c) in m {
                let i = tag
                    .classes
                    .iter()
                    .position(|x| x == k)
                    .ok_or_else(|| SurfaceError::UnknownClass(k.clone()))?;
                v[i] = c.clone();
            }
            Ok(Divisor::new(tag.clone(), v))
        };
        let mut generators = Vec::new();
        for g in &file.effective_generators {
            let d = from_map(g)?;
            if d.is_zero() {
                return Err(bad("zero effective generator".into()));
            }
            let nonzero: Vec<usize> = (0..n).filter(|&i| !d.coeff(i).is_zero()).collect();
            let label = if nonzero.len() == 1 && d.coeff(nonzero[0]).is_one() {
                tag.classes[nonzero[0]].clone()
            } else {
                d.to_string()
            };
            if generators.iter().any(|x: &Generator| x.label == label) {
                return Err(bad(format!("duplicate generator `{label}`")));
            }
            generators.push(Generator { label, divisor: d });
        }
        if generators.is_empty() {
            return Err(bad("no effective generators".into()));
        }
        let canonical = from_map(&file.canonical)?;
        if let Some(g) = &file.genus {
            if let Some(k) = g.keys().find(|k| !tag.classes.contains(k)) {
                return Err(SurfaceError::UnknownClass(k.clone()));
            }
        }
        let relations = file
            .relations
            .iter()
            .map(from_map)
            .collect::<Result<Vec<_>, _>>()?;

        // Nef cone: {D : D·G ≥ 0 for all generators G}.
        let normals: Vec<QVec> = generators
            .iter()
            .map(|g| intersection.mul_vec(g.divisor.coeffs()))
            .collect::<Result<_, _>>()?;
        let (rays, lineality) = cone_rays(n, &normals);
        let nef_generators = rays
            .into_iter()
            .chain(lineality)
            .map(|v| Divisor::new(tag.clone(), v))
            .collect();

        Ok(SurfaceModel {
            tag,
            description: file.description,
            intersection,
            generators,
            canonical,
            genus: file.genus,
            relations,
            nef_generators,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, SurfaceError> {
        Self::from_json_named(text, "model")
    }

    pub fn from_json_named(text: &str, fallback_name: &str) -> Result<Self, SurfaceError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| SurfaceError::InvalidModel(e.to_string()))?;
        Self::from_file(file, fallback_name)
    }

    pub fn load(path: &Path) -> Result<Self, SurfaceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SurfaceError::Io(format!("{}: {e}", path.display())))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
        Self::from_json_named(&text, stem)
    }

    pub fn bundled(name: &str) -> Result<Self, SurfaceError> {
        let (_, src) = BUNDLED_MODELS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| SurfaceError::UnknownModel(name.to_string()))?;
        Self::from_json_named(src, name)
    }

    /// A bundled model by name, otherwise a model file at that path.
    pub fn resolve(name_or_path: &str) -> Result<Self, SurfaceError> {
        if BUNDLED_MODELS.iter().any(|(n, _)| *n == name_or_path) {
            return Self::bundled(name_or_path);
        }
        let path = Path::new(name_or_path);
        if path.exists() {
            return Self::load(path);
        }
        Err(SurfaceError::UnknownModel(name_or_path.to_string()))
    }

    /// The model as a file, suitable for embedding in structured output.
    pub fn to_file(&self) -> ModelFile {
        let map = |d: &Divisor| -> BTreeMap<String, Rat> {
            d.classes()
                .iter()
                .zip(d.coeffs())
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect()
        };
        let n = self.dim();
        ModelFile {
            name: Some(self.name().to_string()),
            description: self.description.clone(),
            classes: self.class_names().to_vec(),
            intersection: (0..n)
                .map(|i| (0..n).map(|j| self.intersection.get(i, j).clone()).collect())
                .collect(),
            effective_generators: self.generators.iter().map(|g| map(&g.divisor)).collect(),
            canonical: map(&self.canonical),
            genus: self.genus.clone(),
            relations: self.relations.iter().map(map).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.tag.name
    }

    pub fn description(&self) -> Option<&str> {
        self.description.as_deref()
    }

    pub fn class_names(&self) -> &[String] {
        &self.tag.classes
    }

    pub fn dim(&self) -> usize {
        self.tag.classes.len()
    }

    pub fn intersection(&self) -> &QMat {
        &self.intersection
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn canonical(&self) -> &Divisor {
        &self.canonical
    }

    pub fn relations(&self) -> &[Divisor] {
        &self.relations
    }

    /// Generators of the nef cone (extreme rays, then both signs of any
    /// numerically trivial directions).
    pub fn nef_generators(&self) -> &[Divisor] {
        &self.nef_generators
    }

    pub fn genus(&self, class: &str) -> Option<u64> {
        self.genus.as_ref()?.get(class).copied()
    }

    /// Index of the generator with this label.
    pub fn generator_index(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    pub fn divisor(&self, coeffs: QVec) -> Result<Divisor, SurfaceError> {
        if coeffs.len() != self.dim() {
            return Err(SurfaceError::Linalg(LinalgError::DimensionMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            }));
        }
        Ok(Divisor::new(self.tag.clone(), coeffs))
    }

    pub fn zero(&self) -> Divisor {
        Divisor::new(self.tag.clone(), vec![Rat::zero(); self.dim()])
    }

    pub fn class(&self, name: &str) -> Result<Divisor, SurfaceError> {
        let i = self
            .tag
            .classes
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| SurfaceError::UnknownClass(name.to_string()))?;
        Ok(Divisor::new(self.tag.clone(), crate::qlinalg::unit(self.dim(), i)))
    }

    /// Parses a literal such as `"3/2*H - 1*E"` against this model.
    pub fn parse(&self, literal: &str) -> Result<Divisor, SurfaceError> {
        let mut v = vec![Rat::zero(); self.dim()];
        for (c, name) in parse_terms(literal)? {
            match name {
                Some(n) => {
                    let i = self
                        .tag
                        .classes
                        .iter()
                        .position(|x| *x == n)
                        .ok_or(SurfaceError::UnknownClass(n))?;
                    v[i] += &c;
                }
                None if c.is_zero() => {}
                None => {
                    return Err(SurfaceError::Parse(format!(
                        "constant term `{c}` in `{literal}`"
                    )))
                }
            }
        }
        Ok(Divisor::new(self.tag.clone(), v))
    }

    /// Re-attaches a deserialized divisor to this model.
    pub fn adopt(&self, d: &Divisor) -> Result<Divisor, SurfaceError> {
        if **d.tag() != *self.tag {
            return Err(SurfaceError::ModelMismatch {
                left: self.name().to_string(),
                right: d.model_name().to_string(),
            });
        }
        Ok(Divisor::new(self.tag.clone(), d.coeffs().to_vec()))
    }

    /// Errors unless `d` belongs to this model.
    pub fn check(&self, d: &Divisor) -> Result<(), SurfaceError> {
        if d.tag() != &self.tag && **d.tag() != *self.tag {
            return Err(SurfaceError::ModelMismatch {
                left: self.name().to_string(),
                right: d.model_name().to_string(),
            });
        }
        Ok(())
    }

    pub fn pair(&self, d: &Divisor, e: &Divisor) -> Result<Rat, SurfaceError> {
        self.check(d)?;
        self.check(e)?;
        Ok(self.intersection.bilinear(d.coeffs(), e.coeffs())?)
    }

    pub fn is_nef(&self, d: &Divisor) -> Result<NefCheck, SurfaceError> {
        let mut values = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            values.push((g.label.clone(), self.pair(d, &g.divisor)?));
        }
        let violator = values.iter().find(|(_, v)| v.is_negative()).cloned();
        Ok(NefCheck {
            nef: violator.is_none(),
            values,
            violator,
        })
    }

    /// Strict positivity against every generator.
    pub fn is_ample_proxy(&self, a: &Divisor) -> Result<bool, SurfaceError> {
        for g in &self.generators {
            if !self.pair(a, &g.divisor)?.is_positive() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Solves `D = Σ t_j G_j + Σ r_k R_k` with `t ≥ 0` over the generators
    /// and free relation weights `r`.
    pub fn is_pseudoeffective(&self, d: &Divisor) -> Result<PsefCheck, SurfaceError> {
        self.check(d)?;
        let g = self.generators.len();
        let cols: Vec<&Divisor> = self
            .generators
            .iter()
            .map(|x| &x.divisor)
            .chain(self.relations.iter())
            .collect();
        let mut lp = LinearProgram::feasibility(cols.len());
        for j in 0..g {
            lp = lp.nonnegative(j);
        }
        for i in 0..self.dim() {
            let row = cols.iter().map(|c| c.coeff(i).clone()).collect();
            lp = lp.constraint(row, Relation::Eq, d.coeff(i).clone());
        }
        Ok(match lp.solve()? {
            LpOutcome::Optimal { point, .. } => PsefCheck {
                pseudoeffective: true,
                expression: Some(
                    self.generators
                        .iter()
                        .zip(point)
                        .map(|(x, t)| (x.label.clone(), t))
                        .collect(),
                ),
            },
            _ => PsefCheck {
                pseudoeffective: false,
                expression: None,
            },
        })
    }

    /// Basis of the radical of the intersection form.
    pub fn radical(&self) -> Vec<QVec> {
        self.intersection.null_space()
    }
}
