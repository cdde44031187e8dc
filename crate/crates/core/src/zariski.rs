//! Zariski decompositions with certificates, a brute-force uniqueness
//! oracle, and Nakayama's σ′/σ/N_σ/P_σ.
//!
//! Negative parts are combinations of effective generators (the curves of
//! the model), so "N ≥ 0" means nonnegative weights over generators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qlinalg::{
    is_negative_definite, solve_linear, LinalgError, LinearProgram, LpOutcome, QMat, QVec, Rat,
    Relation,
};
use crate::surface::{Divisor, SurfaceError, SurfaceModel};

/// Largest generator count the subset oracle accepts.
pub const ORACLE_MAX_GENERATORS: usize = 12;

/// First and last exponent `k` tried by [`sigma`] with `ε = 1/2^k`.
pub const SIGMA_K_START: u32 = 4;
pub const SIGMA_K_CAP: u32 = 40;
/// Consecutive equal extrapolations required by [`sigma`].
pub const SIGMA_WINDOW: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZariskiError {
    #[error("divisor {0} is not pseudo-effective")]
    NotPseudoEffective(String),
    #[error("model inconsistency: {0}")]
    Inconsistent(String),
    #[error("certificate check failed: {0}")]
    CertificateInvalid(String),
    #[error("oracle supports at most {ORACLE_MAX_GENERATORS} generators, model has {0}")]
    TooManyGenerators(usize),
    #[error("oracle found {0} admissible supports, expected exactly one")]
    NotUnique(usize),
    #[error("{0} is not ample (it must pair positively with every generator)")]
    NotAmple(String),
    #[error("sigma extrapolation did not stabilize by k = {SIGMA_K_CAP}")]
    NoStabilization,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZariskiCertificate {
    /// Weight `ν_i` of each support generator in `N`.
    pub coefficients: Vec<(String, Rat)>,
    /// `P·G` for every generator.
    pub nef_values: Vec<(String, Rat)>,
    /// `P·N_i` for every support generator.
    pub orthogonality: Vec<(String, Rat)>,
    /// Leading principal minors of minus the support Gram matrix.
    pub minors: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZariskiResult {
    pub model: String,
    #[serde(rename = "D")]
    pub divisor: Divisor,
    #[serde(rename = "P")]
    pub positive: Divisor,
    #[serde(rename = "N")]
    pub negative: Divisor,
    pub support: Vec<String>,
    pub certificate: ZariskiCertificate,
}

impl ZariskiResult {
    /// Re-checks every certificate entry against the model from scratch.
    pub fn verify(&self, model: &SurfaceModel) -> Result<(), ZariskiError> {
        let bad = |m: String| Err(ZariskiError::CertificateInvalid(m));
        if self.model != model.name() {
            return bad(format!("result is for model `{}`", self.model));
        }
        let d = model.adopt(&self.divisor)?;
        let p = model.adopt(&self.positive)?;
        let n = model.adopt(&self.negative)?;
        if p.try_add(&n)? != d {
            return bad("P + N differs from D".into());
        }
        let names: Vec<&str> = self.certificate.coefficients.iter().map(|(s, _)| s.as_str()).collect();
        if names != self.support.iter().map(String::as_str).collect::<Vec<_>>() {
            return bad("support and coefficient labels disagree".into());
        }
        let mut gens = Vec::new();
        let mut sum = model.zero();
        for (label, nu) in &self.certificate.coefficients {
            let Some(i) = model.generator_index(label) else {
                return bad(format!("unknown generator `{label}`"));
            };
            if !nu.is_positive() {
                return bad(format!("weight of {label} is not positive"));
            }
            let g = &model.generators()[i].divisor;
            sum = sum.try_add(&g.scale(nu))?;
            gens.push(g.clone());
        }
        if sum != n {
            return bad("N is not the stated combination of generators".into());
        }
        let nef = model.is_nef(&p)?;
        if nef.values != self.certificate.nef_values {
            return bad("recorded nef values do not match".into());
        }
        if !nef.nef {
            return bad("P is not nef".into());
        }
        let mut orth = Vec::new();
        for (label, g) in self.support.iter().zip(&gens) {
            orth.push((label.clone(), model.pair(&p, g)?));
        }
        if orth != self.certificate.orthogonality {
            return bad("recorded orthogonality products do not match".into());
        }
        if orth.iter().any(|(_, v)| !v.is_zero()) {
            return bad("P is not orthogonal to the support".into());
        }
        let def = is_negative_definite(&gram(model, &gens)?)?;
        if def.minors != self.certificate.minors {
            return bad("recorded minors do not match".into());
        }
        if !def.negative_definite {
            return bad("support Gram matrix is not negative definite".into());
        }
        Ok(())
    }
}

fn gram(model: &SurfaceModel, gens: &[Divisor]) -> Result<QMat, ZariskiError> {
    let vs: Vec<QVec> = gens.iter().map(|g| g.coeffs().to_vec()).collect();
    Ok(model.intersection().gram(&vs)?)
}

/// Solves for the support weights and assembles the result, or explains why
/// this support is not admissible.
fn candidate(
    model: &SurfaceModel,
    d: &Divisor,
    support: &[usize],
) -> Result<Result<ZariskiResult, String>, ZariskiError> {
    let gens: Vec<Divisor> = support
        .iter()
        .map(|&i| model.generators()[i].divisor.clone())
        .collect();
    let g = gram(model, &gens)?;
    let def = is_negative_definite(&g)?;
    if !def.negative_definite {
        return Ok(Err("support Gram matrix is not negative definite".into()));
    }
    let rhs: QVec = gens.iter().map(|c| model.pair(d, c)).collect::<Result<_, _>>()?;
    let nu = solve_linear(&g, &rhs)?.expect("negative definite matrices are nonsingular");
    let mut n = model.zero();
    for (c, v) in gens.iter().zip(&nu) {
        n = n.try_add(&c.scale(v))?;
    }
    let p = d.try_sub(&n)?;
    let labels: Vec<String> = support
        .iter()
        .map(|&i| model.generators()[i].label.clone())
        .collect();
    if let Some(k) = nu.iter().position(|v| !v.is_positive()) {
        return Ok(Err(format!("weight of {} is {}", labels[k], nu[k])));
    }
    let nef = model.is_nef(&p)?;
    let orth = labels
        .iter()
        .zip(&gens)
        .map(|(l, c)| Ok((l.clone(), model.pair(&p, c)?)))
        .collect::<Result<Vec<_>, ZariskiError>>()?;
    let result = ZariskiResult {
        model: model.name().to_string(),
        divisor: d.clone(),
        positive: p,
        negative: n,
        support: labels.clone(),
        certificate: ZariskiCertificate {
            coefficients: labels.into_iter().zip(nu).collect(),
            nef_values: nef.values,
            orthogonality: orth,
            minors: def.minors,
        },
    };
    if !nef.nef {
        return Ok(Err("positive part is not nef".into()));
    }
    Ok(Ok(result))
}

fn require_psef(model: &SurfaceModel, d: &Divisor) -> Result<(), ZariskiError> {
    if !model.is_pseudoeffective(d)?.pseudoeffective {
        return Err(ZariskiError::NotPseudoEffective(d.to_string()));
    }
    Ok(())
}

/// Zariski decomposition by support growth: solve `P·C = 0` on the current
/// support, then add every generator that `P` pairs negatively with.
pub fn zariski_decompose(model: &SurfaceModel, d: &Divisor) -> Result<ZariskiResult, ZariskiError> {
    require_psef(model, d)?;
    let mut support: Vec<usize> = Vec::new();
    loop {
        let gens: Vec<Divisor> = support
            .iter()
            .map(|&i| model.generators()[i].divisor.clone())
            .collect();
        let g = gram(model, &gens)?;
        let def = is_negative_definite(&g)?;
        if !def.negative_definite {
            return Err(ZariskiError::Inconsistent(format!(
                "curves {:?} do not have a negative definite intersection matrix",
                support_labels(model, &support)
            )));
        }
        let rhs: QVec = gens.iter().map(|c| model.pair(d, c)).collect::<Result<_, _>>()?;
        let nu = solve_linear(&g, &rhs)?.expect("negative definite matrices are nonsingular");
        if let Some(k) = nu.iter().position(Rat::is_negative) {
            return Err(ZariskiError::Inconsistent(format!(
                "negative weight {} on {}",
                nu[k],
                model.generators()[support[k]].label
            )));
        }
        let mut n = model.zero();
        for (c, v) in gens.iter().zip(&nu) {
            n = n.try_add(&c.scale(v))?;
        }
        let p = d.try_sub(&n)?;
        let nef = model.is_nef(&p)?;
        if nef.nef {
            let kept: Vec<usize> = support
                .iter()
                .zip(&nu)
                .filter(|(_, v)| v.is_positive())
                .map(|(&i, _)| i)
                .collect();
            return match candidate(model, d, &kept)? {
                Ok(r) => Ok(r),
                Err(why) => Err(ZariskiError::Inconsistent(why)),
            };
        }
        let violators: Vec<usize> = nef
            .values
            .iter()
            .enumerate()
            .filter(|(_, (_, v))| v.is_negative())
            .map(|(i, _)| i)
            .collect();
        if violators.iter().any(|i| support.contains(i)) {
            return Err(ZariskiError::Inconsistent(
                "support curve violates orthogonality".into(),
            ));
        }
        support.extend(violators);
        support.sort_unstable();
    }
}

fn support_labels(model: &SurfaceModel, support: &[usize]) -> Vec<String> {
    support
        .iter()
        .map(|&i| model.generators()[i].label.clone())
        .collect()
}

/// Exhaustive search over every subset of generators as candidate support.
pub fn zariski_oracle(model: &SurfaceModel, d: &Divisor) -> Result<ZariskiResult, ZariskiError> {
    let g = model.generators().len();
    if g > ORACLE_MAX_GENERATORS {
        return Err(ZariskiError::TooManyGenerators(g));
    }
    require_psef(model, d)?;
    let mut found: Vec<ZariskiResult> = Vec::new();
    for mask in 0u32..(1 << g) {
        let support: Vec<usize> = (0..g).filter(|i| mask & (1 << i) != 0).collect();
        if let Ok(r) = candidate(model, d, &support)? {
            found.push(r);
        }
    }
    if found.len() != 1 {
        return Err(ZariskiError::NotUnique(found.len()));
    }
    Ok(found.pop().unwrap())
}

/// `σ_Γ` or `σ′_Γ`; `None` when the divisor is not pseudo-effective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaValue {
    pub gamma: String,
    pub value: Option<Rat>,
}

impl SigmaValue {
    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }
}

/// Which generator `gamma` names. Classes that are not generators carry no
/// multiplicity in any representative.
fn gamma_index(model: &SurfaceModel, gamma: &str) -> Result<Option<usize>, ZariskiError> {
    if let Some(i) = model.generator_index(gamma) {
        return Ok(Some(i));
    }
    if model.class_names().iter().any(|c| c == gamma) {
        return Ok(None);
    }
    Err(SurfaceError::UnknownClass(gamma.to_string()).into())
}

/// `σ′_Γ(D)`: least weight on `Γ` over representations of `D` as a
/// nonnegative combination of effective generators and nef-cone generators,
/// modulo the model's relations.
pub fn sigma_prime(model: &SurfaceModel, d: &Divisor, gamma: &str) -> Result<SigmaValue, ZariskiError> {
    let gi = gamma_index(model, gamma)?;
    model.check(d)?;
    let cols: Vec<&Divisor> = model
        .generators()
        .iter()
        .map(|x| &x.divisor)
        .chain(model.nef_generators())
        .collect();
    let nonneg = cols.len();
    let cols: Vec<&Divisor> = cols.into_iter().chain(model.relations()).collect();
    let mut objective = vec![Rat::zero(); cols.len()];
    if let Some(i) = gi {
        objective[i] = Rat::one();
    }
    let mut lp = LinearProgram::new(objective);
    for j in 0..nonneg {
        lp = lp.nonnegative(j);
    }
    for i in 0..model.dim() {
        let row = cols.iter().map(|c| c.coeff(i).clone()).collect();
        lp = lp.constraint(row, Relation::Eq, d.coeff(i).clone());
    }
    let value = match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => {
            return Err(ZariskiError::Inconsistent(
                "sigma program is unbounded".into(),
            ))
        }
    };
    Ok(SigmaValue {
        gamma: gamma.to_string(),
        value,
    })
}

pub fn check_ample(model: &SurfaceModel, a: &Divisor) -> Result<(), ZariskiError> {
    if !model.is_nef(a)?.nef || !model.is_ample_proxy(a)? {
        return Err(ZariskiError::NotAmple(a.to_string()));
    }
    Ok(())
}

/// Sum of the nef-cone extreme rays, which pairs positively with every
/// generator on the bundled models.
pub fn default_ample(model: &SurfaceModel) -> Result<Divisor, ZariskiError> {
    let mut a = model.zero();
    for r in model.nef_generators() {
        a = a.try_add(r)?;
    }
    check_ample(model, &a)?;
    Ok(a)
}

/// `σ_Γ(D) = lim σ′_Γ(D + εA)`, evaluated by affine extrapolation from
/// `ε = 1/2^k` and `1/2^(k+1)` until three consecutive `k` agree.
pub fn sigma(
    model: &SurfaceModel,
    d: &Divisor,
    gamma: &str,
    a: &Divisor,
) -> Result<SigmaValue, ZariskiError> {
    check_ample(model, a)?;
    let undefined = SigmaValue {
        gamma: gamma.to_string(),
        value: None,
    };
    if !model.is_pseudoeffective(d)?.pseudoeffective {
        gamma_index(model, gamma)?;
        return Ok(undefined);
    }
    let at = |k: u32| -> Result<Option<Rat>, ZariskiError> {
        let shifted = d.try_add(&a.scale(&Rat::pow2_recip(k)))?;
        Ok(sigma_prime(model, &shifted, gamma)?.value)
    };
    let mut prev = at(SIGMA_K_START)?;
    let mut history: Vec<Rat> = Vec::new();
    for k in SIGMA_K_START..SIGMA_K_CAP {
        let next = at(k + 1)?;
        let (Some(v0), Some(v1)) = (&prev, &next) else {
            return Ok(undefined);
        };
        let e = Rat::from(2) * v1 - v0;
        history.push(e.clone());
        let n = history.len();
        if n >= SIGMA_WINDOW && history[n - SIGMA_WINDOW..].iter().all(|x| *x == e) {
            return Ok(SigmaValue {
                gamma: gamma.to_string(),
                value: Some(e),
            });
        }
        prev = next;
    }
    Err(ZariskiError::NoStabilization)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaDecomposition {
    pub values: Vec<SigmaValue>,
    #[serde(rename = "N_sigma")]
    pub negative: Divisor,
    #[serde(rename = "P_sigma")]
    pub positive: Divisor,
}

/// `N_σ(D) = Σ σ_Γ(D)·Γ` over the generators, and `P_σ = D − N_σ`.
pub fn sigma_decomposition(
    model: &SurfaceModel,
    d: &Divisor,
    a: &Divisor,
) -> Result<SigmaDecomposition, ZariskiError> {
    let mut values = Vec::new();
    let mut n = model.zero();
    for g in model.generators() {
        let s = sigma(model, d, &g.label, a)?;
        let Some(v) = &s.value else {
            return Err(ZariskiError::NotPseudoEffective(d.to_string()));
        };
        n = n.try_add(&g.divisor.scale(v))?;
        values.push(s);
    }
    let p = d.try_sub(&n)?;
    Ok(SigmaDecomposition {
        values,
        negative: n,
        positive: p,
    })
}

pub fn n_sigma(model: &SurfaceModel, d: &Divisor, a: &Divisor) -> Result<Divisor, ZariskiError> {
    Ok(sigma_decomposition(model, d, a)?.negative)
}

pub fn p_sigma(model: &SurfaceModel, d: &Divisor, a: &Divisor) -> Result<Divisor, ZariskiError> {
    Ok(sigma_decomposition(model, d, a)?.positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blp2() -> SurfaceModel {
        SurfaceModel::bundled("blp2").unwrap()
    }

    fn blp2x2() -> SurfaceModel {
        SurfaceModel::bundled("blp2x2").unwrap()
    }

    #[test]
    fn nef_divisor_is_its_own_positive_part() {
        let m = blp2();
        let d = m.parse("H").unwrap();
        let r = zariski_decompose(&m, &d).unwrap();
        assert_eq!(r.positive, d);
        assert!(r.negative.is_zero());
        assert!(r.support.is_empty());
        r.verify(&m).unwrap();
    }

    #[test]
    fn blp2_golden() {
        let m = blp2();
        let r = zariski_decompose(&m, &m.parse("H + 2*E").unwrap()).unwrap();
        assert_eq!(r.positive, m.parse("H").unwrap());
        assert_eq!(r.negative, m.parse("2*E").unwrap());
        assert_eq!(r.support, vec!["E"]);
        assert_eq!(r.certificate.minors, vec![Rat::one()]);
        r.verify(&m).unwrap();
        assert_eq!(zariski_oracle(&m, &r.divisor).unwrap(), r);
    }

    #[test]
    fn blp2x2_golden() {
        let m = blp2x2();
        let d = m.parse("H + 2*E1 + 3*E2").unwrap();
        let r = zariski_decompose(&m, &d).unwrap();
        assert_eq!(r.positive, m.parse("H").unwrap());
        assert_eq!(r.negative, m.parse("2*E1 + 3*E2").unwrap());
        assert_eq!(zariski_oracle(&m, &d).unwrap(), r);

        let d = m.parse("2*H - 2*E1 - 2*E2").unwrap();
        let r = zariski_decompose(&m, &d).unwrap();
        assert!(r.positive.is_zero());
        assert_eq!(r.negative, d);
        r.verify(&m).unwrap();
        assert_eq!(zariski_oracle(&m, &d).unwrap(), r);
    }

    #[test]
    fn not_pseudoeffective_is_reported() {
        let m = blp2();
        assert!(matches!(
            zariski_decompose(&m, &m.parse("-H").unwrap()),
            Err(ZariskiError::NotPseudoEffective(_))
        ));
    }

    #[test]
    fn corrupted_certificate_is_rejected() {
        let m = blp2();
        let mut r = zariski_decompose(&m, &m.parse("H + 2*E").unwrap()).unwrap();
        r.certificate.minors[0] = Rat::from(2);
        assert!(matches!(r.verify(&m), Err(ZariskiError::CertificateInvalid(_))));
    }

    #[test]
    fn sigma_prime_examples() {
        let m = blp2();
        let v = sigma_prime(&m, &m.parse("H + 2*E").unwrap(), "E").unwrap();
        assert_eq!(v.value, Some(Rat::from(2)));
        let v = sigma_prime(&m, &m.parse("H").unwrap(), "H").unwrap();
        assert_eq!(v.value, Some(Rat::zero()));
        for g in ["H", "E"] {
            assert_eq!(sigma_prime(&m, &m.zero(), g).unwrap().value, Some(Rat::zero()));
        }
        assert_eq!(sigma_prime(&m, &m.parse("-H").unwrap(), "E").unwrap().value, None);
        assert!(sigma_prime(&m, &m.zero(), "Q").is_err());
    }

    #[test]
    fn sigma_examples() {
        let m = blp2();
        let a = default_ample(&m).unwrap();
        let d = m.parse("H + 2*E").unwrap();
        assert_eq!(sigma(&m, &d, "E", &a).unwrap().value, Some(Rat::from(2)));
        let d2 = d.scale(&Rat::from(2));
        assert_eq!(sigma(&m, &d2, "E", &a).unwrap().value, Some(Rat::from(4)));
        let h = m.parse("H").unwrap();
        assert_eq!(sigma(&m, &h, "E", &a).unwrap().value, Some(Rat::zero()));
        let s = sigma_decomposition(&m, &d, &a).unwrap();
        assert_eq!(s.negative, m.parse("2*E").unwrap());
        assert_eq!(s.positive, h);
        assert!(sigma(&m, &d, "E", &h).is_err());
    }

    #[test]
    fn sigma_on_boundary_divisor() {
        // 2L with L = H - E1 - E2 lies on the boundary of the effective cone
        let m = blp2x2();
        let a = default_ample(&m).unwrap();
        let d = m.parse("2*H - 2*E1 - 2*E2").unwrap();
        let s = sigma_decomposition(&m, &d, &a).unwrap();
        assert_eq!(s.negative, d);
        assert!(s.positive.is_zero());
    }
}
