use serde::{Deserialize, Serialize};

use super::FingenError;
use crate::qlinalg::{solve_linear, QMat, QVec, Rat};
use crate::surface::{lambda_threshold_coeffs, Divisor, SurfaceModel, Threshold};
use crate::zariski::{check_ample, zariski_decompose, ZariskiError, ZariskiResult};

/// Coefficients over the effective generators, which play the role of the
/// prime divisors `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCoords {
    pub primes: Vec<String>,
    pub coeffs: QVec,
}

impl std::fmt::Display for PrimeCoords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (c, name) in self.coeffs.iter().zip(&self.primes) {
            if c.is_zero() {
                continue;
            }
            let sep = match (first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            if name.contains(' ') {
                write!(f, "{sep}{}*({name})", c.abs())?;
            } else {
                write!(f, "{sep}{}*{name}", c.abs())?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceChecks {
    /// `0 ≤ R ≤ ⌈N⌉`.
    pub r_bounds: bool,
    /// Every nonzero coefficient of `B′` lies in `(0, 1]`.
    pub b_prime_range: bool,
    /// `⌊B′⌋ = Σ`.
    pub floor_is_sigma: bool,
}

impl TraceChecks {
    pub fn all(&self) -> bool {
        self.r_bounds && self.b_prime_range && self.floor_is_sigma
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointTrace {
    pub model: String,
    #[serde(rename = "A")]
    pub a: Divisor,
    #[serde(rename = "B")]
    pub b: Divisor,
    pub zariski: ZariskiResult,
    pub lambda: Rat,
    #[serde(rename = "B_coords")]
    pub b_coords: PrimeCoords,
    #[serde(rename = "P_coords")]
    pub p_coords: PrimeCoords,
    #[serde(rename = "N_coords")]
    pub n_coords: PrimeCoords,
    #[serde(rename = "Sigma")]
    pub sigma: PrimeCoords,
    #[serde(rename = "R")]
    pub r: PrimeCoords,
    #[serde(rename = "B_prime")]
    pub b_prime: PrimeCoords,
    pub checks: TraceChecks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AdjointOutcome {
    Trace(Box<AdjointTrace>),
    /// `P = 0`, so the threshold is unbounded and there is nothing to replay.
    TrivialPositivePart { zariski: Box<ZariskiResult> },
}

/// Coordinates of `d` over the effective generators, which must form a basis.
pub fn prime_coords(model: &SurfaceModel, d: &Divisor) -> Result<PrimeCoords, FingenError> {
    model.check(d)?;
    let gens = model.generators();
    if gens.len() != model.dim() {
        return Err(FingenError::UnsupportedModel(
            "the effective generators must form a basis of the class space".into(),
        ));
    }
    let cols = QMat::from_rows(gens.iter().map(|g| g.divisor.coeffs().to_vec()).collect())?
        .transpose();
    let coeffs = solve_linear(&cols, d.coeffs())?.ok_or_else(|| {
        FingenError::UnsupportedModel("the effective generators are linearly dependent".into())
    })?;
    Ok(PrimeCoords {
        primes: gens.iter().map(|g| g.label.clone()).collect(),
        coeffs,
    })
}

fn with(c: &PrimeCoords, coeffs: QVec) -> PrimeCoords {
    PrimeCoords {
        primes: c.primes.clone(),
        coeffs,
    }
}

/// Replays the divisor arithmetic of the adjoint finite-generation argument:
/// `D = K + A + B = P + N`, `λ`, `Σ`, `R` and `B′`, with its three identities.
pub fn adjoint_trace(
    model: &SurfaceModel,
    a: &Divisor,
    b: &Divisor,
) -> Result<AdjointOutcome, FingenError> {
    check_ample(model, a).map_err(|e| FingenError::Precondition(e.to_string()))?;
    let bc = prime_coords(model, b)?;
    if bc.coeffs.iter().any(|c| c.is_negative() || *c >= Rat::one()) {
        return Err(FingenError::Precondition(format!(
            "B = {bc} needs coefficients in [0, 1)"
        )));
    }
    let d = model.canonical().try_add(a)?.try_add(b)?;
    let z = match zariski_decompose(model, &d) {
        Ok(z) => z,
        Err(ZariskiError::NotPseudoEffective(s)) => return Err(FingenError::NotPseudoEffective(s)),
        Err(e) => return Err(e.into()),
    };
    let pc = prime_coords(model, &z.positive)?;
    let nc = prime_coords(model, &z.negative)?;
    if pc.coeffs.iter().chain(&nc.coeffs).any(Rat::is_negative) {
        return Err(FingenError::InvariantViolated(
            "Zariski parts are not effective over the generators".into(),
        ));
    }
    let lambda = match lambda_threshold_coeffs(&bc.coeffs, &pc.coeffs, &nc.coeffs)? {
        Threshold::Finite(l) => l,
        Threshold::Infinite => {
            return Ok(AdjointOutcome::TrivialPositivePart {
                zariski: Box::new(z),
            })
        }
    };
    let n = bc.coeffs.len();
    // B + λP − N
    let shifted: QVec = (0..n)
        .map(|i| &bc.coeffs[i] + &(&lambda * &pc.coeffs[i]) - &nc.coeffs[i])
        .collect();
    let sigma: QVec = shifted
        .iter()
        .map(|c| if c.is_one() { Rat::one() } else { Rat::zero() })
        .collect();
    let r: QVec = shifted
        .iter()
        .map(|c| {
            let m = -c;
            if m.is_positive() {
                m.ceil()
            } else {
                Rat::zero()
            }
        })
        .collect();
    let b_prime: QVec = shifted.iter().zip(&r).map(|(s, r)| s + r).collect();
    let checks = TraceChecks {
        r_bounds: r
            .iter()
            .zip(&nc.coeffs)
            .all(|(r, nv)| !r.is_negative() && *r <= nv.ceil()),
        b_prime_range: b_prime
            .iter()
            .all(|c| c.is_zero() || (c.is_positive() && *c <= Rat::one())),
        floor_is_sigma: b_prime.iter().map(Rat::floor).collect::<QVec>() == sigma,
    };
    let trace = AdjointTrace {
        model: model.name().to_string(),
        a: a.clone(),
        b: b.clone(),
        lambda,
        sigma: with(&bc, sigma),
        r: with(&bc, r),
        b_prime: with(&bc, b_prime),
        b_coords: bc,
        p_coords: pc,
        n_coords: nc,
        zariski: z,
        checks,
    };
    if !trace.checks.all() {
        return Err(FingenError::InvariantViolated(format!(
            "adjoint identities fail: {:?}",
            trace.checks
        )));
    }
    Ok(AdjointOutcome::Trace(Box::new(trace)))
}

impl AdjointTrace {
    /// Recomputes the trace from its inputs and compares every field.
    pub fn verify(&self, model: &SurfaceModel) -> Result<(), String> {
        self.zariski.verify(model).map_err(|e| e.to_string())?;
        let a = model.adopt(&self.a).map_err(|e| e.to_string())?;
        let b = model.adopt(&self.b).map_err(|e| e.to_string())?;
        match adjoint_trace(model, &a, &b).map_err(|e| e.to_string())? {
            AdjointOutcome::Trace(t) if *t == *self => Ok(()),
            _ => Err("recomputed trace differs".into()),
        }
    }
}
