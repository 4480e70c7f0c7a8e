//! Limits and colimits of finite sets: products, pullbacks, coproducts,
//! image factorizations, and reflexive coequalizers.
//!
//! Constructed labels are deterministic: products and pullbacks label pairs
//! `(x,y)`, coproducts tag summands `L:x` / `R:y`, and quotient classes are
//! named after their lexicographically least member.

use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::finset::{pair_label, FinFn, FinSet};

/// A binary product with its projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub set: FinSet,
    pub p1: FinFn,
    pub p2: FinFn,
}

/// Builds `a × b` with pair labels `(x,y)`.
///
/// Labels containing commas or parentheses can in principle make two distinct
/// pairs collide as strings; that surfaces as a duplicate-label error rather
/// than a silently merged element.
pub fn product(a: &FinSet, b: &FinSet) -> Result<Product, CoreError> {
    let mut labels = Vec::with_capacity(a.len() * b.len());
    let mut first = BTreeMap::new();
    let mut second = BTreeMap::new();
    for x in a.iter() {
        for y in b.iter() {
            let l = pair_label(x, y);
            first.insert(l.clone(), x.to_string());
            second.insert(l.clone(), y.to_string());
            labels.push(l);
        }
    }
    let set = FinSet::new(labels)?;
    let p1 = FinFn::new(set.clone(), a.clone(), first)?;
    let p2 = FinFn::new(set.clone(), b.clone(), second)?;
    Ok(Product { set, p1, p2 })
}

/// The pairing `⟨f,g⟩ : X → A×B` of two maps with a common domain.
pub fn pair_fns(f: &FinFn, g: &FinFn) -> Result<FinFn, CoreError> {
    if f.dom() != g.dom() {
        return Err(CoreError::CompositionMismatch {
            expected: format!("{:?}", f.dom()),
            found: format!("{:?}", g.dom()),
        });
    }
    let prod = product(f.cod(), g.cod())?;
    FinFn::from_fn(f.dom(), &prod.set, |x| pair_label(f.apply(x), g.apply(x)))
}

/// A pullback apex with its two projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pullback {
    pub apex: FinSet,
    pub q1: FinFn,
    pub q2: FinFn,
}

/// Builds the pullback of `f : X → Z` and `g : Y → Z`:
/// apex `{(x,y) | f(x) = g(y)}` with projections to `X` and `Y`.
pub fn pullback(f: &FinFn, g: &FinFn) -> Result<Pullback, CoreError> {
    if f.cod() != g.cod() {
        return Err(CoreError::CodomainMismatch {
            left: format!("{:?}", f.cod()),
            right: format!("{:?}", g.cod()),
        });
    }
    let mut labels = Vec::new();
    let mut to_x = BTreeMap::new();
    let mut to_y = BTreeMap::new();
    for x in f.dom().iter() {
        for y in g.dom().iter() {
            if f.apply(x) == g.apply(y) {
                let l = pair_label(x, y);
                to_x.insert(l.clone(), x.to_string());
                to_y.insert(l.clone(), y.to_string());
                labels.push(l);
            }
        }
    }
    let apex = FinSet::new(labels)?;
    let q1 = FinFn::new(apex.clone(), f.dom().clone(), to_x)?;
    let q2 = FinFn::new(apex.clone(), g.dom().clone(), to_y)?;
    Ok(Pullback { apex, q1, q2 })
}

/// A binary coproduct with its injections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coproduct {
    pub set: FinSet,
    pub inl: FinFn,
    pub inr: FinFn,
}

/// Builds `a ⊔ b` with summand tags `L:x` and `R:y`.
pub fn coproduct(a: &FinSet, b: &FinSet) -> Result<Coproduct, CoreError> {
    let mut labels = Vec::with_capacity(a.len() + b.len());
    labels.extend(a.iter().map(|x| format!("L:{x}")));
    labels.extend(b.iter().map(|y| format!("R:{y}")));
    let set = FinSet::new(labels)?;
    let inl = FinFn::from_fn(a, &set, |x| format!("L:{x}"))?;
    let inr = FinFn::from_fn(b, &set, |y| format!("R:{y}"))?;
    Ok(Coproduct { set, inl, inr })
}

/// A surjection-followed-by-injection factorization of a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageFactorization {
    pub image: FinSet,
    /// `dom → image`, surjective, same values as the original map.
    pub surjection: FinFn,
    /// `image ↪ cod`, the inclusion.
    pub injection: FinFn,
}

/// Splits `f` as an surjection onto its image followed by an inclusion.
pub fn image_factorization(f: &FinFn) -> ImageFactorization {
    let image_labels: std::collections::BTreeSet<String> =
        f.dom().iter().map(|x| f.apply(x).to_string()).collect();
    let image = FinSet::new(image_labels).expect("image labels are distinct by construction");
    let surjection = FinFn::from_fn(f.dom(), &image, |x| f.apply(x).to_string())
        .expect("surjection onto the image is total");
    let injection = FinFn::from_fn(&image, f.cod(), |x| x.to_string())
        .expect("image is a subset of the codomain");
    ImageFactorization { image, surjection, injection }
}

/// A coequalizer quotient with its projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coequalizer {
    pub quotient: FinSet,
    pub projection: FinFn,
}

/// Coequalizes the reflexive pair `f, g : R ⇉ X` along a common section
/// `s : X → R` (so `f∘s = id = g∘s`).
///
/// Classes are computed by union-find, merging `f(r) ~ g(r)` for every
/// `r ∈ R`; each class is labelled by its lexicographically least member, so
/// the quotient's labels are a subset of `X`'s.
pub fn reflexive_coequalizer(
    f: &FinFn,
    g: &FinFn,
    s: &FinFn,
) -> Result<Coequalizer, CoreError> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(CoreError::NotParallel);
    }
    if s.dom() != f.cod() || s.cod() != f.dom() {
        return Err(CoreError::NotParallel);
    }
    for x in f.cod().iter() {
        if f.apply(s.apply(x)) != x || g.apply(s.apply(x)) != x {
            return Err(CoreError::InvalidSection { label: x.to_string() });
        }
    }
    Ok(coequalize(f, g))
}

/// The coequalizer of an arbitrary parallel pair; shared tail of
/// [`reflexive_coequalizer`] and of callers that build the section
/// themselves.
pub(crate) fn coequalize(f: &FinFn, g: &FinFn) -> Coequalizer {
    let carrier = f.cod();
    let n = carrier.len();
    let index: BTreeMap<&str, usize> = carrier
        .iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    let mut uf = UnionFind::new(n);
    for r in f.dom().iter() {
        uf.union(index[f.apply(r)], index[g.apply(r)]);
    }
    // Union keeps the smaller root, so a class's root is its least index;
    // the carrier is sorted, so that index carries the least label.
    let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let quotient = FinSet::new(
        (0..n)
            .filter(|&i| roots[i] == i)
            .map(|i| carrier.elements()[i].clone()),
    )
    .expect("class representatives are distinct");
    let projection = FinFn::from_fn(carrier, &quotient, |x| {
        carrier.elements()[roots[index[x]]].clone()
    })
    .expect("projection is total by construction");
    Coequalizer { quotient, projection }
}

/// Union-find over `0..n` with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Merges the classes of `a` and `b`, keeping the smaller root.
    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> FinSet {
        FinSet::new(labels.iter().copied()).unwrap()
    }

    fn func(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
        FinFn::new(
            dom.clone(),
            cod.clone(),
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn product_labels_and_projections() {
        let a = set(&["x", "y"]);
        let b = set(&["0"]);
        let p = product(&a, &b).unwrap();
        assert_eq!(p.set.elements(), &["(x,0)", "(y,0)"]);
        assert_eq!(p.p1.apply("(y,0)"), "y");
        assert_eq!(p.p2.apply("(y,0)"), "0");
    }

    #[test]
    fn pullback_matches_hand_computed_example() {
        // f : {x,y} → {0,1} constant at 0; g : {u,v} → {0,1} with u↦0, v↦1.
        // Matched pairs: (x,u) and (y,u) only.
        let ab = set(&["x", "y"]);
        let uv = set(&["u", "v"]);
        let z = set(&["0", "1"]);
        let f = func(&ab, &z, &[("x", "0"), ("y", "0")]);
        let g = func(&uv, &z, &[("u", "0"), ("v", "1")]);
        let pb = pullback(&f, &g).unwrap();
        assert_eq!(pb.apex.elements(), &["(x,u)", "(y,u)"]);
        assert_eq!(pb.q1.apply("(x,u)"), "x");
        assert_eq!(pb.q2.apply("(y,u)"), "u");
    }

    #[test]
    fn pullback_rejects_mismatched_codomains() {
        let a = set(&["x"]);
        let f = func(&a, &set(&["0"]), &[("x", "0")]);
        let g = func(&a, &set(&["1"]), &[("x", "1")]);
        assert!(matches!(
            pullback(&f, &g),
            Err(CoreError::CodomainMismatch { .. })
        ));
    }

    /// Independent oracle: equivalence closure by repeated merging of
    /// overlapping sets, no union-find involved.
    fn closure_classes(f: &FinFn, g: &FinFn) -> Vec<Vec<String>> {
        let mut classes: Vec<Vec<String>> = f
            .cod()
            .iter()
            .map(|x| vec![x.to_string()])
            .collect();
        for r in f.dom().iter() {
            let a = f.apply(r).to_string();
            let b = g.apply(r).to_string();
            let ia = classes.iter().position(|c| c.contains(&a)).unwrap();
            let ib = classes.iter().position(|c| c.contains(&b)).unwrap();
            if ia != ib {
                let merged = classes.remove(ia.max(ib));
                classes[ia.min(ib)].extend(merged);
            }
        }
        for c in &mut classes {
            c.sort();
        }
        classes.sort();
        classes
    }

    #[test]
    fn reflexive_coequalizer_matches_closure_oracle() {
        // Carrier {x,y,z}; one non-degenerate relation joins x and y.
        let x = set(&["x", "y", "z"]);
        let r = set(&["ex", "ey", "ez", "r1"]);
        let f = func(&r, &x, &[("ex", "x"), ("ey", "y"), ("ez", "z"), ("r1", "x")]);
        let g = func(&r, &x, &[("ex", "x"), ("ey", "y"), ("ez", "z"), ("r1", "y")]);
        let s = func(&x, &r, &[("x", "ex"), ("y", "ey"), ("z", "ez")]);
        let c = reflexive_coequalizer(&f, &g, &s).unwrap();
        assert_eq!(c.quotient.elements(), &["x", "z"]);
        assert_eq!(c.projection.apply("y"), "x");
        assert_eq!(c.projection.apply("z"), "z");

        let oracle = closure_classes(&f, &g);
        assert_eq!(
            oracle,
            vec![
                vec!["x".to_string(), "y".to_string()],
                vec!["z".to_string()]
            ]
        );
        // Class representatives agree with the least member of each oracle class.
        let reps: Vec<&str> = oracle.iter().map(|c| c[0].as_str()).collect();
        assert_eq!(c.quotient.elements(), reps.as_slice());
    }

    #[test]
    fn reflexive_coequalizer_validates_section() {
        let x = set(&["x", "y"]);
        let r = set(&["ex", "ey"]);
        let f = func(&r, &x, &[("ex", "x"), ("ey", "y")]);
        let g = func(&r, &x, &[("ex", "y"), ("ey", "y")]);
        let s = func(&x, &r, &[("x", "ex"), ("y", "ey")]);
        // g(s(x)) = y ≠ x, so s is not a common section.
        assert!(matches!(
            reflexive_coequalizer(&f, &g, &s),
            Err(CoreError::InvalidSection { .. })
        ));

        let h = func(&set(&["a"]), &set(&["b"]), &[("a", "b")]);
        assert!(matches!(
            reflexive_coequalizer(&f, &h, &s),
            Err(CoreError::NotParallel)
        ));
    }

    #[test]
    fn image_factorization_decomposes() {
        let a = set(&["p", "q", "r"]);
        let b = set(&["0", "1", "2"]);
        let f = func(&a, &b, &[("p", "1"), ("q", "1"), ("r", "0")]);
        let im = image_factorization(&f);
        assert_eq!(im.image.elements(), &["0", "1"]);
        assert!(im.surjection.is_surjective());
        assert!(im.injection.is_injective());
        assert_eq!(im.injection.compose(&im.surjection).unwrap(), f);
    }

    #[test]
    fn coproduct_tags_summands() {
        let a = set(&["x"]);
        let b = set(&["x", "y"]);
        let c = coproduct(&a, &b).unwrap();
        assert_eq!(c.set.elements(), &["L:x", "R:x", "R:y"]);
        assert_eq!(c.inl.apply("x"), "L:x");
        assert_eq!(c.inr.apply("x"), "R:x");
    }
}
