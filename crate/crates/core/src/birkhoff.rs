//! Both directions of the HSP theorem, and the preservation of identities
//! under H, S, P and isomorphism, as pass/fail pipelines over concrete
//! finite instances.
//!
//! The hard direction is only ever run on algebras presented with an
//! [`HspCertificate`]; a report never claims membership in the variety for
//! an algebra that merely satisfies a bounded theory.

use std::fmt;

use thiserror::Error;

use crate::caps::Caps;
use crate::catalog::all_algebras;
use crate::closure::{
    hom_image, hsp_certificate_check, product, subalgebra_generate, CertError, CertFactor, ClosureError, HspCertificate,
};
use crate::eqlogic::{mod_check, satisfies, theory_upto, SatError};
use crate::free::{build_free, FreeError, UniversalMapError};
use crate::homs::{classify, find_homs, CarrierMap, HomConstraints, HomError, HomViolation};
use crate::sigcore::{Elem, FiniteAlgebra, Signature};
use crate::terms::{evaluate, var_names, Environment, Equation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    Pass,
    /// Passes because the hypothesis does not hold.
    Vacuous,
    Fail,
}

/// Concrete evidence for a failed stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Counterexample {
        algebra: FiniteAlgebra,
        equation: Equation,
        env: Environment,
    },
    NonHom {
        map: CarrierMap,
        violation: HomViolation,
    },
    Unreached {
        map: CarrierMap,
        element: Elem,
    },
    Certificate {
        class: Vec<FiniteAlgebra>,
        target: FiniteAlgebra,
        cert: HspCertificate,
        stage: u8,
        message: String,
    },
}

impl Witness {
    /// Re-runs the failing check; true when the failure reproduces.
    pub fn replay(&self, caps: &Caps) -> bool {
        match self {
            Witness::Counterexample { algebra, equation, env } => {
                match (
                    evaluate(algebra, &equation.lhs, env),
                    evaluate(algebra, &equation.rhs, env),
                ) {
                    (Ok(a), Ok(b)) => a != b,
                    _ => false,
                }
            }
            Witness::NonHom { map, violation } => {
                matches!(classify(map), Ok(c) if c.witness.as_ref() == Some(violation))
            }
            Witness::Unreached { map, element } => map.first_unreached() == Some(*element),
            Witness::Certificate {
                class,
                target,
                cert,
                stage,
                ..
            } => matches!(
                hsp_certificate_check(class, target, cert, caps.product, caps.search),
                Err(e) if e.stage() == *stage
            ),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Counterexample { algebra, equation, env } => {
                write!(f, "size={} equation=\"{equation}\" env={env}", algebra.size())
            }
            Witness::NonHom { map, violation } => write!(f, "map=\"{map}\" violation=\"{violation}\""),
            Witness::Unreached { map, element } => write!(f, "map=\"{map}\" unreached={element}"),
            Witness::Certificate { stage, message, .. } => write!(f, "stage={stage} \"{message}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PipelineReport {
    pub stages: Vec<Stage>,
    pub overall: bool,
}

impl PipelineReport {
    fn new() -> Self {
        PipelineReport {
            stages: Vec::new(),
            overall: true,
        }
    }

    fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.push(name, StageStatus::Pass, detail.into(), None);
    }

    fn vacuous(&mut self, name: &str, detail: impl Into<String>) {
        self.push(name, StageStatus::Vacuous, detail.into(), None);
    }

    fn fail(&mut self, name: &str, detail: impl Into<String>, witness: Option<Witness>) {
        self.push(name, StageStatus::Fail, detail.into(), witness);
    }

    fn push(&mut self, name: &str, status: StageStatus, detail: String, witness: Option<Witness>) {
        self.overall &= status != StageStatus::Fail;
        self.stages.push(Stage {
            name: name.to_string(),
            status,
            detail,
            witness,
        });
    }

    pub fn is_vacuous(&self) -> bool {
        self.stages.iter().any(|s| s.status == StageStatus::Vacuous)
    }

    /// `STAGE <name> PASS|VACUOUS|FAIL <detail or witness>`, one per line.
    pub fn machine_lines(&self) -> Vec<String> {
        self.stages
            .iter()
            .map(|s| {
                let status = match s.status {
                    StageStatus::Pass => "PASS",
                    StageStatus::Vacuous => "VACUOUS",
                    StageStatus::Fail => "FAIL",
                };
                match &s.witness {
                    Some(w) => format!("STAGE {} {status} {w}", s.name),
                    None => format!("STAGE {} {status} {}", s.name, s.detail).trim_end().to_string(),
                }
            })
            .collect()
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            let mark = match s.status {
                StageStatus::Pass => "ok",
                StageStatus::Vacuous => "ok (vacuous)",
                StageStatus::Fail => "FAILED",
            };
            writeln!(f, "{:<16} {mark:<13} {}", s.name, s.detail)?;
            if let Some(w) = &s.witness {
                writeln!(f, "{:<16} witness: {w}", "")?;
            }
        }
        write!(f, "overall: {}", if self.overall { "pass" } else { "FAIL" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BirkhoffError {
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("algebra pool exceeds cap {0}")]
    PoolCap(usize),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// How a derived algebra is obtained from `A`.
#[derive(Debug, Clone)]
pub enum Derivation {
    /// Mutually inverse homomorphisms `A → B` and `B → A`.
    Iso { to: CarrierMap, back: CarrierMap },
    /// A homomorphism out of `A`; the derived algebra is its image.
    HomImage(CarrierMap),
    /// An injective homomorphism `B → A`.
    Subalgebra(CarrierMap),
    /// The derived algebra is `A × others[0] × ..`.
    Product(Vec<FiniteAlgebra>),
}

fn malformed(msg: impl Into<String>) -> BirkhoffError {
    BirkhoffError::MalformedWitness(msg.into())
}

fn require_hom(m: &CarrierMap, what: &str) -> Result<(), BirkhoffError> {
    match classify(m) {
        Ok(c) if c.is_hom => Ok(()),
        Ok(c) => Err(malformed(format!(
            "{what} is not a homomorphism: {}",
            c.witness.expect("witness")
        ))),
        Err(e) => Err(malformed(format!("{what}: {e}"))),
    }
}

/// Confirms that `A ⊧ eq` carries over to the algebra derived by `how`.
pub fn verify_invariance(
    alg: &FiniteAlgebra,
    eq: &Equation,
    how: &Derivation,
    caps: &Caps,
) -> Result<PipelineReport, BirkhoffError> {
    let (kind, derived, extra) = match how {
        Derivation::Iso { to, back } => {
            if to.src() != alg || back.dst() != alg || to.dst() != back.src() {
                return Err(malformed("iso maps do not connect the algebra and its copy"));
            }
            require_hom(to, "forward map")?;
            require_hom(back, "backward map")?;
            let inverse =
                (0..alg.size()).all(|a| back.at(to.at(a)) == a) && (0..to.dst().size()).all(|b| to.at(back.at(b)) == b);
            if !inverse {
                return Err(malformed("iso maps are not mutually inverse"));
            }
            ("iso", to.dst().clone(), Vec::new())
        }
        Derivation::HomImage(m) => {
            if m.src() != alg {
                return Err(malformed("hom does not start at the algebra"));
            }
            require_hom(m, "image map")?;
            ("image", hom_image(m)?.algebra, Vec::new())
        }
        Derivation::Subalgebra(e) => {
            if e.dst() != alg {
                return Err(malformed("embedding does not land in the algebra"));
            }
            require_hom(e, "embedding")?;
            if !e.is_injective() {
                return Err(malformed("embedding is not injective"));
            }
            ("subalgebra", e.src().clone(), Vec::new())
        }
        Derivation::Product(others) => {
            let mut factors = vec![alg.clone()];
            factors.extend(others.iter().cloned());
            let p = product(&factors, caps.product).map_err(|e| malformed(e.to_string()))?;
            ("product", p.algebra, others.clone())
        }
    };

    let mut report = PipelineReport::new();
    let base = satisfies(alg, eq, caps.envs)?;
    if !base.holds {
        report.vacuous("antecedent", format!("algebra does not satisfy {eq}"));
        return Ok(report);
    }
    for other in &extra {
        if !satisfies(other, eq, caps.envs)?.holds {
            report.vacuous("antecedent", format!("a product factor does not satisfy {eq}"));
            return Ok(report);
        }
    }
    report.pass("antecedent", format!("{eq} holds"));
    let r = satisfies(&derived, eq, caps.envs)?;
    match r.counterexample {
        None => report.pass(kind, format!("size {} satisfies {eq}", derived.size())),
        Some(env) => report.fail(
            kind,
            "derived algebra violates the identity",
            Some(Witness::Counterexample {
                algebra: derived,
                equation: eq.clone(),
                env,
            }),
        ),
    }
    Ok(report)
}

fn check_models(
    report: &mut PipelineReport,
    stage: &str,
    algebras: &[FiniteAlgebra],
    eqs: &[Equation],
    caps: &Caps,
) -> Result<(), BirkhoffError> {
    for alg in algebras {
        let r = mod_check(alg, eqs, caps.envs)?;
        if let Some(fail) = r.failure {
            report.fail(
                stage,
                format!("{} of {} checked", algebras.len(), algebras.len()),
                Some(Witness::Counterexample {
                    algebra: alg.clone(),
                    equation: eqs[fail.index].clone(),
                    env: fail.counterexample,
                }),
            );
            return Ok(());
        }
    }
    report.pass(stage, format!("{} algebras model E", algebras.len()));
    Ok(())
}

/// Every nonempty subset of the carrier, as generator lists.
fn generator_sets(n: usize) -> impl Iterator<Item = Vec<Elem>> {
    (1usize..(1 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// Enumerates every algebra of `sig` up to `bound` elements, keeps the
/// models of `eqs`, and checks that products of two models, all generated
/// subalgebras and all homomorphic images (into pool members) model `eqs`.
pub fn eqcl_to_var_check(
    sig: &Signature,
    eqs: &[Equation],
    bound: usize,
    caps: &Caps,
) -> Result<PipelineReport, BirkhoffError> {
    let mut pool = Vec::new();
    for n in 1..=bound {
        let remaining = caps.pool.saturating_sub(pool.len());
        let algs = all_algebras(sig, n, remaining).ok_or(BirkhoffError::PoolCap(caps.pool))?;
        pool.extend(algs);
    }
    let mut models = Vec::new();
    for a in &pool {
        if mod_check(a, eqs, caps.envs)?.holds {
            models.push(a.clone());
        }
    }
    let mut report = PipelineReport::new();
    report.pass(
        "models",
        format!("{} of {} algebras up to size {bound}", models.len(), pool.len()),
    );

    let mut products = Vec::new();
    for a in &models {
        for b in &models {
            products.push(product(&[a.clone(), b.clone()], caps.product)?.algebra);
        }
    }
    check_models(&mut report, "products", &products, eqs, caps)?;

    let sources: Vec<FiniteAlgebra> = models.iter().chain(&products).cloned().collect();
    let mut subs = Vec::new();
    for a in &sources {
        for gens in generator_sets(a.size()) {
            subs.push(subalgebra_generate(a, &gens)?.algebra);
        }
    }
    check_models(&mut report, "subalgebras", &subs, eqs, caps)?;

    let mut images = Vec::new();
    for a in &sources {
        for t in &pool {
            for m in find_homs(a, t, &HomConstraints::any(), caps.search)? {
                images.push(hom_image(&m)?.algebra);
            }
        }
    }
    check_models(&mut report, "images", &images, eqs, caps)?;
    Ok(report)
}

/// Runs the hard direction for a certified `B ∈ V K`: builds the free
/// algebra of `K` on one variable per element of `B` and checks that the
/// identity assignment extends to a surjective homomorphism onto `B`. Also
/// checks that `B` satisfies the depth-2, two-variable theory of `K`.
pub fn var_to_eqcl_check(
    class: &[FiniteAlgebra],
    target: &FiniteAlgebra,
    cert: &HspCertificate,
    caps: &Caps,
) -> Result<PipelineReport, BirkhoffError> {
    let mut report = PipelineReport::new();
    if let Err(e) = hsp_certificate_check(class, target, cert, caps.product, caps.search) {
        report.fail(
            "certificate",
            "certificate does not replay",
            Some(Witness::Certificate {
                class: class.to_vec(),
                target: target.clone(),
                cert: cert.clone(),
                stage: e.stage(),
                message: e.to_string(),
            }),
        );
        return Ok(report);
    }
    report.pass("certificate", "target is in H S P of the class");

    let sig = target.signature();
    let vars = var_names(target.size());
    let free = build_free(sig, class, &vars, caps.free())?;
    report.pass(
        "free",
        format!(
            "{} vars, {} elements, {} coordinates",
            vars.len(),
            free.size(),
            free.index.len()
        ),
    );

    let assign = Environment::from_values(&vars, &target.carrier().collect::<Vec<_>>());
    match crate::free::universal_map(&free, target, &assign) {
        Ok(u) if u.map.is_surjective() => report.pass("universal-map", format!("surjective hom {}", u.map)),
        Ok(u) => {
            let element = u.map.first_unreached().expect("not surjective");
            report.fail(
                "universal-map",
                "identity assignment does not reach the target",
                Some(Witness::Unreached { map: u.map, element }),
            );
        }
        Err(UniversalMapError::NotHom { map, violation }) => report.fail(
            "universal-map",
            "induced map is not a homomorphism",
            Some(Witness::NonHom { map, violation }),
        ),
        Err(UniversalMapError::NotSurjective { map, unreached }) => report.fail(
            "universal-map",
            "induced map is not surjective",
            Some(Witness::Unreached {
                map,
                element: unreached,
            }),
        ),
        Err(e) => return Err(BirkhoffError::MalformedWitness(e.to_string())),
    }

    let theory = theory_upto(sig, class, &var_names(2), 2, caps.theory())?;
    let mut failed = None;
    for eq in &theory {
        if let Some(env) = satisfies(target, eq, caps.envs)?.counterexample {
            failed = Some(Witness::Counterexample {
                algebra: target.clone(),
                equation: eq.clone(),
                env,
            });
            break;
        }
    }
    match failed {
        None => report.pass("theory", format!("{} identities of depth <= 2 hold", theory.len())),
        Some(w) => report.fail("theory", "target violates an identity of the class", Some(w)),
    }
    Ok(report)
}

/// Members of `V K` reachable as homomorphic images of generated
/// subalgebras of `K[index]²`, each with its certificate. Images are taken
/// along every homomorphism from the subalgebra into itself and into
/// `K[index]`; duplicates (equal tables) are dropped.
pub fn square_certificates(
    class: &[FiniteAlgebra],
    index: usize,
    caps: &Caps,
) -> Result<Vec<(FiniteAlgebra, HspCertificate)>, BirkhoffError> {
    let base = &class[index];
    let sq = product(&[base.clone(), base.clone()], caps.product)?;
    let mut out: Vec<(FiniteAlgebra, HspCertificate)> = Vec::new();
    for gens in generator_sets(sq.algebra.size()) {
        let sub = subalgebra_generate(&sq.algebra, &gens)?;
        let mut homs = find_homs(&sub.algebra, &sub.algebra, &HomConstraints::any(), caps.search)?;
        homs.extend(find_homs(&sub.algebra, base, &HomConstraints::any(), caps.search)?);
        for m in homs {
            let img = hom_image(&m)?;
            if out.iter().any(|(b, _)| *b == img.algebra) {
                continue;
            }
            let cert = HspCertificate {
                factors: vec![CertFactor {
                    algebra: index,
                    power: 2,
                }],
                gens: gens.iter().map(|&g| sq.codec.decode(g)).collect(),
                image: img.surjection.image().to_vec(),
            };
            out.push((img.algebra, cert));
        }
    }
    Ok(out)
}
