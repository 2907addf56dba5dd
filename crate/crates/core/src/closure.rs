//! Products, generated subalgebras and homomorphic images, plus
//! certificates witnessing membership in `H S P` of a class.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::homs::{classify, find_first_hom, find_iso, CarrierMap, HomConstraints, HomError, HomViolation};
use crate::sigcore::{table_len, ArgTuples, Elem, FiniteAlgebra};

pub const DEFAULT_PRODUCT_CAP: usize = 4096;

/// Largest operation table a product may materialize.
const MAX_TABLE_CELLS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("{what} exceeds cap {limit}")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("algebras do not share a signature")]
    SignatureMismatch,
    #[error("a product needs at least one factor")]
    EmptyProduct,
    #[error("empty generating set and no constants")]
    EmptyGenerators,
    #[error("generator {0} is outside the carrier")]
    GeneratorOutOfRange(Elem),
    #[error("map is not a homomorphism: {0}")]
    NotHom(HomViolation),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// How an element entered a closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Origin {
    /// Position in the seed list.
    Seed(usize),
    /// Operation index applied to earlier labels.
    Op(usize, Vec<usize>),
}

/// Closes `seeds` under the operations of `sig`, with `apply(op, args)`
/// computing one operation. Labels follow discovery order: seeds (first
/// occurrence), then nullary symbols, then rounds in which each symbol, in
/// signature order, is applied to every label tuple (row-major) that mentions
/// an element found in the previous round.
pub(crate) fn saturate<T, F>(
    sig: &crate::sigcore::Signature,
    seeds: impl IntoIterator<Item = T>,
    limit: usize,
    mut apply: F,
) -> Result<(Vec<T>, Vec<Origin>), ClosureError>
where
    T: Clone + Eq + Hash,
    F: FnMut(usize, &[&T]) -> T,
{
    let mut elems: Vec<T> = Vec::new();
    let mut origins = Vec::new();
    let mut labels: HashMap<T, usize> = HashMap::new();
    let mut push = |t: T, o: Origin, elems: &mut Vec<T>, origins: &mut Vec<Origin>| -> Result<(), ClosureError> {
        if labels.contains_key(&t) {
            return Ok(());
        }
        if elems.len() >= limit {
            return Err(ClosureError::CapExceeded { what: "carrier", limit });
        }
        labels.insert(t.clone(), elems.len());
        elems.push(t);
        origins.push(o);
        Ok(())
    };
    for (i, s) in seeds.into_iter().enumerate() {
        push(s, Origin::Seed(i), &mut elems, &mut origins)?;
    }
    for (op, sym) in sig.ops().iter().enumerate() {
        if sym.arity == 0 {
            let t = apply(op, &[]);
            push(t, Origin::Op(op, Vec::new()), &mut elems, &mut origins)?;
        }
    }
    let mut old = 0;
    loop {
        let cur = elems.len();
        if cur == old {
            break;
        }
        for (op, sym) in sig.ops().iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            for idx in ArgTuples::new(cur, sym.arity) {
                if idx.iter().all(|&i| i < old) {
                    continue;
                }
                let args: Vec<&T> = idx.iter().map(|&i| &elems[i]).collect();
                let t = apply(op, &args);
                push(t, Origin::Op(op, idx), &mut elems, &mut origins)?;
            }
        }
        old = cur;
    }
    Ok((elems, origins))
}

/// Builds the algebra on labels `0..elems.len()` induced by `apply`.
fn induced_algebra<T: Clone + Eq + Hash>(
    sig: &crate::sigcore::Signature,
    elems: &[T],
    mut apply: impl FnMut(usize, &[&T]) -> T,
) -> FiniteAlgebra {
    let labels: HashMap<&T, usize> = elems.iter().enumerate().map(|(i, t)| (t, i)).collect();
    FiniteAlgebra::from_fn(sig.clone(), elems.len(), |op, idx| {
        let args: Vec<&T> = idx.iter().map(|&i| &elems[i]).collect();
        labels[&apply(op, &args)]
    })
}

/// Mixed-radix codec for product carriers; factor 0 is most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCodec {
    radices: Vec<usize>,
}

impl ProductCodec {
    pub fn new(radices: Vec<usize>) -> Self {
        ProductCodec { radices }
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn size(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn encode(&self, tuple: &[Elem]) -> Elem {
        debug_assert_eq!(tuple.len(), self.radices.len());
        tuple.iter().zip(&self.radices).fold(0, |acc, (&a, &r)| acc * r + a)
    }

    pub fn decode(&self, mut flat: Elem) -> Vec<Elem> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = flat % r;
            flat /= r;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Product {
    pub algebra: FiniteAlgebra,
    pub codec: ProductCodec,
}

/// Direct product with componentwise operations.
pub fn product(factors: &[FiniteAlgebra], cap: usize) -> Result<Product, ClosureError> {
    let first = factors.first().ok_or(ClosureError::EmptyProduct)?;
    let sig = first.signature();
    if factors.iter().any(|a| a.signature() != sig) {
        return Err(ClosureError::SignatureMismatch);
    }
    let size = factors
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.size()))
        .filter(|&s| s <= cap)
        .ok_or(ClosureError::CapExceeded {
            what: "product size",
            limit: cap,
        })?;
    for sym in sig.ops() {
        if table_len(size, sym.arity).is_none_or(|c| c > MAX_TABLE_CELLS) {
            return Err(ClosureError::CapExceeded {
                what: "product table",
                limit: MAX_TABLE_CELLS,
            });
        }
    }
    let codec = ProductCodec::new(factors.iter().map(FiniteAlgebra::size).collect());
    let decoded: Vec<Vec<Elem>> = (0..size).map(|e| codec.decode(e)).collect();
    let mut component = Vec::new();
    let mut out = vec![0; factors.len()];
    let algebra = FiniteAlgebra::from_fn(sig.clone(), size, |op, args| {
        for (i, (fac, slot)) in factors.iter().zip(out.iter_mut()).enumerate() {
            component.clear();
            component.extend(args.iter().map(|&a| decoded[a][i]));
            *slot = fac.apply(op, &component);
        }
        codec.encode(&out)
    });
    Ok(Product { algebra, codec })
}

#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub algebra: FiniteAlgebra,
    /// Label `i` is `elements[i]` of the parent.
    pub elements: Vec<Elem>,
    pub inclusion: CarrierMap,
}

/// The least subuniverse containing `gens`, relabeled in discovery order.
pub fn subalgebra_generate(alg: &FiniteAlgebra, gens: &[Elem]) -> Result<Subalgebra, ClosureError> {
    if let Some(&g) = gens.iter().find(|&&g| g >= alg.size()) {
        return Err(ClosureError::GeneratorOutOfRange(g));
    }
    if gens.is_empty() && !alg.signature().has_constants() {
        return Err(ClosureError::EmptyGenerators);
    }
    let apply = |op: usize, args: &[&Elem]| {
        let args: Vec<Elem> = args.iter().map(|&&a| a).collect();
        alg.apply(op, &args)
    };
    let (elements, _) = saturate(alg.signature(), gens.iter().copied(), alg.size(), apply)?;
    let algebra = induced_algebra(alg.signature(), &elements, apply);
    let inclusion = CarrierMap::new(algebra.clone(), alg.clone(), elements.clone())?;
    Ok(Subalgebra {
        algebra,
        elements,
        inclusion,
    })
}

#[derive(Debug, Clone)]
pub struct HomImage {
    pub algebra: FiniteAlgebra,
    /// The homomorphism corestricted onto the image.
    pub surjection: CarrierMap,
    /// Inclusion of the image into the original target.
    pub embedding: CarrierMap,
}

/// The image of a homomorphism, labeled by increasing target value.
pub fn hom_image(m: &CarrierMap) -> Result<HomImage, ClosureError> {
    if let Some(w) = classify(m)?.witness {
        return Err(ClosureError::NotHom(w));
    }
    let mut values: Vec<Elem> = m.image().to_vec();
    values.sort_unstable();
    values.dedup();
    let mut label = vec![usize::MAX; m.dst().size()];
    for (i, &v) in values.iter().enumerate() {
        label[v] = i;
    }
    let dst = m.dst();
    let algebra = FiniteAlgebra::from_fn(dst.signature().clone(), values.len(), |op, args| {
        let args: Vec<Elem> = args.iter().map(|&a| values[a]).collect();
        label[dst.apply(op, &args)]
    });
    let surjection = CarrierMap::new(
        m.src().clone(),
        algebra.clone(),
        m.image().iter().map(|&v| label[v]).collect(),
    )?;
    let embedding = CarrierMap::new(algebra.clone(), dst.clone(), values)?;
    Ok(HomImage {
        algebra,
        surjection,
        embedding,
    })
}

/// First injective homomorphism `a → b` in canonical order.
pub fn check_leq(a: &FiniteAlgebra, b: &FiniteAlgebra, cap: usize) -> Result<Option<CarrierMap>, ClosureError> {
    if a.size() > b.size() {
        return Ok(None);
    }
    Ok(find_first_hom(a, b, &HomConstraints::injective(), cap)?)
}

/// Componentwise map between products. Factor maps must line up with the
/// codecs.
pub fn product_map(src: &Product, dst: &Product, maps: &[CarrierMap]) -> Result<CarrierMap, ClosureError> {
    let image = (0..src.algebra.size())
        .map(|e| {
            let t: Vec<Elem> = src.codec.decode(e).iter().zip(maps).map(|(&a, m)| m.at(a)).collect();
            dst.codec.encode(&t)
        })
        .collect();
    Ok(CarrierMap::new(src.algebra.clone(), dst.algebra.clone(), image)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CertFactor {
    /// Index into the class.
    pub algebra: usize,
    /// Number of consecutive copies.
    pub power: usize,
}

/// A witness that `B ∈ H(S(P K))`: a product of members of `K`, generators
/// of a subalgebra of it, and a surjective homomorphism from that
/// subalgebra onto `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HspCertificate {
    pub factors: Vec<CertFactor>,
    /// Generators as product tuples, one component per copy.
    pub gens: Vec<Vec<Elem>>,
    /// Image of each subalgebra label in `B`.
    pub image: Vec<Elem>,
}

impl HspCertificate {
    /// `K[index] ∈ V K` by the unary product, all elements as generators
    /// and the identity.
    pub fn trivial(index: usize, alg: &FiniteAlgebra) -> Self {
        HspCertificate {
            factors: vec![CertFactor {
                algebra: index,
                power: 1,
            }],
            gens: alg.carrier().map(|a| vec![a]).collect(),
            image: alg.carrier().collect(),
        }
    }

    /// The flattened list of factor algebras.
    pub fn factor_list(&self, class: &[FiniteAlgebra]) -> Result<Vec<FiniteAlgebra>, CertError> {
        let mut out = Vec::new();
        for f in &self.factors {
            let alg = class.get(f.algebra).ok_or(CertError::BadFactor(f.algebra))?;
            out.extend(std::iter::repeat_n(alg.clone(), f.power));
        }
        if out.is_empty() {
            return Err(CertError::Product(ClosureError::EmptyProduct));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("stage 1: no algebra {0} in the class")]
    BadFactor(usize),
    #[error("stage 1: {0}")]
    Product(ClosureError),
    #[error("stage 2: generator {index} is not an element of the product")]
    BadGenerator { index: usize },
    #[error("stage 2: {0}")]
    Subalgebra(ClosureError),
    #[error("stage 3: {0}")]
    ImageMap(HomError),
    #[error("stage 3: image map is not a homomorphism: {0}")]
    ImageNotHom(HomViolation),
    #[error("stage 3: image map misses element {0}")]
    ImageNotSurjective(Elem),
    #[error("stage 4: image is not isomorphic to the target")]
    NotIsomorphic,
    #[error("stage 4: {0}")]
    Iso(HomError),
}

impl CertError {
    pub fn stage(&self) -> u8 {
        match self {
            CertError::BadFactor(_) | CertError::Product(_) => 1,
            CertError::BadGenerator { .. } | CertError::Subalgebra(_) => 2,
            CertError::ImageMap(_) | CertError::ImageNotHom(_) | CertError::ImageNotSurjective(_) => 3,
            CertError::NotIsomorphic | CertError::Iso(_) => 4,
        }
    }
}

/// The intermediate algebras of a replayed certificate.
#[derive(Debug, Clone)]
pub struct HspReplay {
    pub product: Product,
    pub subalgebra: Subalgebra,
    pub image_map: CarrierMap,
    pub image: HomImage,
    pub iso: CarrierMap,
}

/// Replays `cert` and checks that it ends in an algebra isomorphic to
/// `target`.
pub fn hsp_certificate_check(
    class: &[FiniteAlgebra],
    target: &FiniteAlgebra,
    cert: &HspCertificate,
    product_cap: usize,
    search_cap: usize,
) -> Result<HspReplay, CertError> {
    let factors = cert.factor_list(class)?;
    let prod = product(&factors, product_cap).map_err(CertError::Product)?;
    let mut gens = Vec::with_capacity(cert.gens.len());
    for (index, g) in cert.gens.iter().enumerate() {
        let ok = g.len() == factors.len() && g.iter().zip(&factors).all(|(&a, f)| a < f.size());
        if !ok {
            return Err(CertError::BadGenerator { index });
        }
        gens.push(prod.codec.encode(g));
    }
    let sub = subalgebra_generate(&prod.algebra, &gens).map_err(CertError::Subalgebra)?;
    let image_map =
        CarrierMap::new(sub.algebra.clone(), target.clone(), cert.image.clone()).map_err(CertError::ImageMap)?;
    let class_ = classify(&image_map).map_err(CertError::ImageMap)?;
    if let Some(w) = class_.witness {
        return Err(CertError::ImageNotHom(w));
    }
    if let Some(c) = image_map.first_unreached() {
        return Err(CertError::ImageNotSurjective(c));
    }
    let image = hom_image(&image_map).map_err(|e| match e {
        ClosureError::NotHom(w) => CertError::ImageNotHom(w),
        other => CertError::Subalgebra(other),
    })?;
    let iso = find_iso(&image.algebra, target, search_cap)
        .map_err(CertError::Iso)?
        .ok_or(CertError::NotIsomorphic)?;
    Ok(HspReplay {
        product: prod,
        subalgebra: sub,
        image_map,
        image,
        iso,
    })
}
