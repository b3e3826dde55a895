//! Group arithmetic with canonical normal forms for the supported families:
//! free groups, finite groups given by a table, C'(1/6) small-cancellation
//! presentations, and free products of those.

mod dehn;
mod spec;
mod table;
mod word;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use dehn::{Piece, PresentationReport};
pub use spec::{Family, GroupSpec, MultiplicationTable};
pub use word::{free_reduce, invert_word, GroupElement, Letter};

use crate::error::{Error, Result};
use dehn::DehnGroup;
use table::TableGroup;

/// How infinite parabolic subgroups are turned into a finite edge alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ParabolicMode {
    /// Every parabolic must be finite.
    #[default]
    Exact,
    /// Infinite parabolics contribute their elements of absolute word length
    /// at most the radius. Results derived from them are approximate.
    Truncated(u32),
}

/// Canonical id of the left coset `g H_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetId {
    pub parabolic_index: usize,
    pub representative: GroupElement,
}

/// A member of the absolute generating set X.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsoluteGenerator {
    pub name: String,
    pub element: GroupElement,
}

#[derive(Debug, Clone)]
enum Kind {
    Free,
    Table(TableGroup),
    Dehn(DehnGroup),
    Product(Vec<Factor>),
}

#[derive(Debug, Clone)]
struct Factor {
    group: Group,
    offset: usize,
    ngens: usize,
}

#[derive(Debug, Clone)]
pub struct Group {
    spec: GroupSpec,
    names: Vec<String>,
    kind: Kind,
    absolute: Vec<AbsoluteGenerator>,
    hash: String,
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        spec.check_structure()?;
        let names = spec.primitive_generators();
        let kind = match spec.family {
            Family::Free => Kind::Free,
            Family::FiniteTable => {
                Kind::Table(TableGroup::new(spec.table.as_ref().unwrap(), names.len())?)
            }
            Family::SmallCancellation => {
                let relators = spec
                    .relators
                    .iter()
                    .map(|r| parse_letters(r, &names))
                    .collect::<Result<Vec<_>>>()?;
                Kind::Dehn(DehnGroup::new(relators, |w| format_letters(w, &names))?)
            }
            Family::FreeProduct => {
                let mut offset = 0;
                let mut factors = Vec::new();
                for f in &spec.factors {
                    let group = Group::new(f.clone())?;
                    let ngens = group.names.len();
                    factors.push(Factor {
                        group,
                        offset,
                        ngens,
                    });
                    offset += ngens;
                }
                Kind::Product(factors)
            }
        };
        let mut group = Group {
            hash: spec.hash(),
            spec,
            names,
            kind,
            absolute: Vec::new(),
        };
        group.absolute = group.build_absolute()?;
        Ok(group)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Group::new(GroupSpec::from_json(text)?)
    }

    fn build_absolute(&self) -> Result<Vec<AbsoluteGenerator>> {
        let mut out: Vec<AbsoluteGenerator> = self
            .names
            .iter()
            .enumerate()
            .map(|(i, name)| AbsoluteGenerator {
                name: name.clone(),
                element: self.reduce_letters(&[Letter::new(i, false)]),
            })
            .collect();
        for word in &self.spec.redundant_generators {
            let name: String = word.split_whitespace().collect();
            if out.iter().any(|g| g.name == name) {
                return Err(Error::InvalidSpec(format!(
                    "redundant generator `{name}` clashes with an existing name"
                )));
            }
            out.push(AbsoluteGenerator {
                name,
                element: self.reduce(word)?,
            });
        }
        Ok(out)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn spec_hash(&self) -> &str {
        &self.hash
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    /// The absolute generating set X: primitives then redundant generators.
    pub fn absolute_generators(&self) -> &[AbsoluteGenerator] {
        &self.absolute
    }

    pub fn parabolic_count(&self) -> usize {
        self.spec.parabolics.len()
    }

    /// Order of the group when it is known to be finite.
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            Kind::Table(t) => Some(t.order()),
            Kind::Free if self.names.is_empty() => Some(1),
            _ => None,
        }
    }

    pub(crate) fn normalize(&self, word: &[Letter]) -> Vec<Letter> {
        match &self.kind {
            Kind::Free => free_reduce(word),
            Kind::Table(t) => t.normalize(word),
            Kind::Dehn(d) => d.normalize(word),
            Kind::Product(factors) => normalize_product(factors, word),
        }
    }

    /// Word length of `g` over the primitive generators and their inverses,
    /// read off the normal form, where a syllable from a factor listed in
    /// `coned` costs 1. `None` for small-cancellation groups, whose normal
    /// forms need not be geodesic.
    pub fn normal_form_length(&self, g: &GroupElement, coned: &[usize]) -> Option<usize> {
        self.letters_length(g.letters(), coned)
    }

    fn letters_length(&self, w: &[Letter], coned: &[usize]) -> Option<usize> {
        match &self.kind {
            Kind::Free => Some(w.len()),
            Kind::Table(t) => Some(t.word_length(w)),
            Kind::Dehn(_) => None,
            Kind::Product(factors) => {
                let mut total = 0;
                let mut i = 0;
                while i < w.len() {
                    let fi = factors
                        .iter()
                        .position(|f| w[i].gen() >= f.offset && w[i].gen() < f.offset + f.ngens)?;
                    let f = &factors[fi];
                    let mut j = i;
                    let mut local = Vec::new();
                    while j < w.len() && w[j].gen() >= f.offset && w[j].gen() < f.offset + f.ngens {
                        local.push(Letter::new(w[j].gen() - f.offset, w[j].is_inverse()));
                        j += 1;
                    }
                    total += if coned.contains(&fi) {
                        1
                    } else {
                        f.group.letters_length(&local, &[])?
                    };
                    i = j;
                }
                Some(total)
            }
        }
    }

    pub fn reduce_letters(&self, word: &[Letter]) -> GroupElement {
        GroupElement::from_normal_form(self.normalize(word))
    }

    /// Parse a raw word over the primitive generators and return its normal form.
    pub fn reduce(&self, raw: &str) -> Result<GroupElement> {
        Ok(self.reduce_letters(&parse_letters(raw, &self.names)?))
    }

    pub fn parse_letters(&self, raw: &str) -> Result<Vec<Letter>> {
        parse_letters(raw, &self.names)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity()
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        if g.is_identity() {
            return h.clone();
        }
        if h.is_identity() {
            return g.clone();
        }
        let mut w = g.letters().to_vec();
        w.extend_from_slice(h.letters());
        self.reduce_letters(&w)
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        self.reduce_letters(&invert_word(g.letters()))
    }

    /// `g^{-1} h`, the element carrying `g` to `h`.
    pub fn quotient(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let mut w = invert_word(g.letters());
        w.extend_from_slice(h.letters());
        self.reduce_letters(&w)
    }

    pub fn format(&self, g: &GroupElement) -> String {
        if g.is_identity() {
            "e".to_string()
        } else {
            format_letters(g.letters(), &self.names)
        }
    }

    pub fn format_letters(&self, w: &[Letter]) -> String {
        format_letters(w, &self.names)
    }

    fn parabolic_factor(&self, i: usize) -> Result<(&Factor, usize)> {
        let fi = *self.spec.parabolics.get(i).ok_or(Error::NotParabolic(i))?;
        match &self.kind {
            Kind::Product(factors) => Ok((&factors[fi], fi)),
            _ => Err(Error::NotParabolic(i)),
        }
    }

    pub fn parabolic_is_finite(&self, i: usize) -> Result<bool> {
        let (f, _) = self.parabolic_factor(i)?;
        Ok(f.group.order().is_some())
    }

    /// Canonical representative of `g H_i`: the normal form with a trailing
    /// `H_i` syllable removed.
    pub fn coset_id(&self, g: &GroupElement, i: usize) -> Result<CosetId> {
        let (f, _) = self.parabolic_factor(i)?;
        let range = f.offset..f.offset + f.ngens;
        let letters = g.letters();
        let keep = letters
            .iter()
            .rposition(|l| !range.contains(&l.gen()))
            .map_or(0, |p| p + 1);
        Ok(CosetId {
            parabolic_index: i,
            representative: GroupElement::from_normal_form(letters[..keep].to_vec()),
        })
    }

    /// Nonidentity elements of `H_i` in shortlex order.
    pub fn parabolic_elements(&self, i: usize, mode: ParabolicMode) -> Result<Vec<GroupElement>> {
        let (f, _) = self.parabolic_factor(i)?;
        let local: Vec<Vec<Letter>> = match (&f.group.kind, mode) {
            (Kind::Table(t), _) => t.canonical_words().to_vec(),
            (_, ParabolicMode::Exact) => return Err(Error::InfiniteParabolic(i)),
            (_, ParabolicMode::Truncated(radius)) => f.group.ball_words(radius as usize),
        };
        let mut out: Vec<GroupElement> = local
            .into_iter()
            .filter(|w| !w.is_empty())
            .map(|w| GroupElement::from_normal_form(w.iter().map(|l| l.offset(f.offset)).collect()))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Normal forms of all elements within word length `radius` over the
    /// primitive generators.
    fn ball_words(&self, radius: usize) -> Vec<Vec<Letter>> {
        let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::from([Vec::new()]);
        let mut frontier = VecDeque::from([Vec::new()]);
        for _ in 0..radius {
            let mut next = VecDeque::new();
            while let Some(w) = frontier.pop_front() {
                for g in 0..self.names.len() {
                    for inv in [false, true] {
                        let mut x: Vec<Letter> = w.clone();
                        x.push(Letter::new(g, inv));
                        let x = self.normalize(&x);
                        if seen.insert(x.clone()) {
                            next.push_back(x);
                        }
                    }
                }
            }
            frontier = next;
        }
        seen.into_iter().collect()
    }

    /// True when `word` represents the identity (Dehn's algorithm for
    /// small-cancellation groups, normal forms otherwise).
    pub fn is_trivial_word(&self, word: &[Letter]) -> bool {
        match &self.kind {
            Kind::Dehn(d) => d.is_trivial(word),
            _ => self.normalize(word).is_empty(),
        }
    }
}

fn normalize_product(factors: &[Factor], word: &[Letter]) -> Vec<Letter> {
    let factor_of = |gen: usize| {
        factors
            .iter()
            .position(|f| gen >= f.offset && gen < f.offset + f.ngens)
            .expect("letter belongs to a factor")
    };
    let mut stack: Vec<(usize, Vec<Letter>)> = Vec::new();
    for &l in word {
        let fi = factor_of(l.gen());
        let f = &factors[fi];
        let local = Letter::new(l.gen() - f.offset, l.is_inverse());
        match stack.last_mut() {
            Some((top, syl)) if *top == fi => {
                syl.push(local);
                let n = f.group.normalize(syl);
                if n.is_empty() {
                    stack.pop();
                } else {
                    *syl = n;
                }
            }
            _ => {
                let n = f.group.normalize(&[local]);
                if !n.is_empty() {
                    stack.push((fi, n));
                }
            }
        }
    }
    stack
        .into_iter()
        .flat_map(|(fi, syl)| {
            let off = factors[fi].offset;
            syl.into_iter().map(move |l| l.offset(off))
        })
        .collect()
}

/// A parsed token: name index and signed exponent.
pub(crate) fn tokenize(raw: &str, names: &[String]) -> Result<Vec<(usize, i64)>> {
    let malformed = |reason: &str| Error::MalformedWord {
        word: raw.to_string(),
        reason: reason.to_string(),
    };
    let mut out = Vec::new();
    for chunk in raw.split_whitespace() {
        let mut rest = chunk;
        while !rest.is_empty() {
            let matched = names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            let (idx, len) = match matched {
                Some((i, n)) => (Some(i), n.len()),
                None => {
                    let c = rest.chars().next().unwrap();
                    if matches!(c, 'e' | '1' | 'ε') {
                        (None, c.len_utf8())
                    } else {
                        let ident: String = rest
                            .chars()
                            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                            .collect();
                        return Err(Error::UnknownGenerator(if ident.is_empty() {
                            rest.to_string()
                        } else {
                            ident
                        }));
                    }
                }
            };
            rest = &rest[len..];
            let mut power: i64 = 1;
            loop {
                if let Some(r) = rest.strip_prefix('\'') {
                    power = -power;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix("⁻¹") {
                    power = -power;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('²') {
                    power *= 2;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('³') {
                    power *= 3;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('^') {
                    let digits: String = r
                        .char_indices()
                        .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'))
                        .map(|(_, c)| c)
                        .collect();
                    let n: i64 = digits.parse().map_err(|_| malformed("bad exponent"))?;
                    power *= n;
                    rest = &r[digits.len()..];
                } else {
                    break;
                }
            }
            if let Some(i) = idx {
                out.push((i, power));
            }
        }
    }
    Ok(out)
}

pub(crate) fn parse_letters(raw: &str, names: &[String]) -> Result<Vec<Letter>> {
    let mut word = Vec::new();
    for (i, p) in tokenize(raw, names)? {
        let l = Letter::new(i, p < 0);
        for _ in 0..p.unsigned_abs() {
            word.push(l);
        }
    }
    Ok(word)
}

pub(crate) fn format_letters(w: &[Letter], names: &[String]) -> String {
    w.iter()
        .map(|l| {
            let mut s = names[l.gen()].clone();
            if l.is_inverse() {
                s.push('\'');
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Piece analysis for small-cancellation specs; other families are skipped.
pub fn validate_presentation(spec: &GroupSpec) -> Result<PresentationReport> {
    if spec.family != Family::SmallCancellation || spec.relators.is_empty() {
        return Ok(PresentationReport {
            skipped: true,
            relator_lengths: Vec::new(),
            pieces: Vec::new(),
            max_ratio: None,
            passes: true,
        });
    }
    let names = spec.primitive_generators();
    let relators = spec
        .relators
        .iter()
        .map(|r| parse_letters(r, &names).map(|w| word::cyclic_reduce(&w)))
        .collect::<Result<Vec<_>>>()?;
    for (r, raw) in relators.iter().zip(&spec.relators) {
        if r.len() != parse_letters(raw, &names)?.len() {
            return Err(Error::InvalidSpec(format!(
                "relator `{raw}` is not cyclically reduced"
            )));
        }
    }
    Ok(dehn::analyze_pieces(&relators, |w| format_letters(w, &names)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3_z2() -> Group {
        Group::new(GroupSpec::free_product(
            vec![GroupSpec::cyclic("a", 3), GroupSpec::cyclic("b", 2)],
            vec![0, 1],
        ))
        .unwrap()
    }

    fn surface() -> Group {
        Group::new(GroupSpec::small_cancellation(
            &["a", "b", "c", "d"],
            &["a b a' b' c d c' d'"],
        ))
        .unwrap()
    }

    #[test]
    fn free_reduction_example() {
        let g = Group::new(GroupSpec::free(&["a", "b"])).unwrap();
        assert_eq!(g.format(&g.reduce("a b b' a").unwrap()), "a a");
        assert_eq!(g.format(&g.reduce("a b b⁻¹ a").unwrap()), "a a");
    }

    #[test]
    fn finite_table_example() {
        let g = Group::new(GroupSpec::cyclic("a", 3)).unwrap();
        assert_eq!(g.format(&g.reduce("a a a a").unwrap()), "a");
        assert_eq!(g.format(&g.reduce("a^-1").unwrap()), "a a");
    }

    #[test]
    fn dehn_reduces_relator_to_identity() {
        let g = surface();
        assert!(g.reduce("a b a' b' c d c' d'").unwrap().is_identity());
        assert!(g.reduce("c d c' d' a b a' b'").unwrap().is_identity());
    }

    #[test]
    fn half_relator_has_unique_normal_form() {
        let g = surface();
        // a b a' b' = d c d' c' in the surface group.
        let x = g.reduce("a b a' b'").unwrap();
        let y = g.reduce("d c d' c'").unwrap();
        assert_eq!(x, y);
        assert_eq!(g.format(&x), "a b a' b'");
    }

    #[test]
    fn free_product_multiplication_examples() {
        let g = z3_z2();
        let ab = g.reduce("a b").unwrap();
        let a = g.reduce("a").unwrap();
        let b = g.reduce("b").unwrap();
        assert_eq!(g.format(&g.multiply(&ab, &a)), "a b a");
        assert_eq!(g.format(&g.multiply(&ab, &b)), "a");
        let a_inv = g.inverse(&a);
        assert!(g.multiply(&a, &a_inv).is_identity());
    }

    #[test]
    fn coset_examples() {
        let g = z3_z2();
        let e = g.identity();
        assert!(g.coset_id(&e, 0).unwrap().representative.is_identity());
        let a2 = g.reduce("a a").unwrap();
        let a = g.reduce("a").unwrap();
        assert_eq!(g.coset_id(&a2, 0).unwrap(), g.coset_id(&a, 0).unwrap());
        let ba = g.reduce("b a").unwrap();
        assert_eq!(g.format(&g.coset_id(&ba, 0).unwrap().representative), "b");
        assert!(matches!(g.coset_id(&e, 2), Err(Error::NotParabolic(2))));
    }

    #[test]
    fn parabolic_element_examples() {
        let g = z3_z2();
        let fmt = |v: Vec<GroupElement>| v.iter().map(|x| g.format(x)).collect::<Vec<_>>();
        assert_eq!(fmt(g.parabolic_elements(1, ParabolicMode::Exact).unwrap()), ["b"]);
        assert_eq!(fmt(g.parabolic_elements(0, ParabolicMode::Exact).unwrap()), ["a", "a a"]);

        let zz2 = Group::new(GroupSpec::free_product(
            vec![GroupSpec::free(&["a"]), GroupSpec::cyclic("b", 2)],
            vec![0, 1],
        ))
        .unwrap();
        assert!(matches!(
            zz2.parabolic_elements(0, ParabolicMode::Exact),
            Err(Error::InfiniteParabolic(0))
        ));
        let els = zz2.parabolic_elements(0, ParabolicMode::Truncated(3)).unwrap();
        let names: Vec<String> = els.iter().map(|x| zz2.format(x)).collect();
        assert_eq!(names, ["a", "a'", "a a", "a' a'", "a a a", "a' a' a'"]);
    }

    #[test]
    fn presentation_validation_examples() {
        let surface = GroupSpec::small_cancellation(&["a", "b", "c", "d"], &["a b a' b' c d c' d'"]);
        let r = validate_presentation(&surface).unwrap();
        assert!(r.passes);
        assert_eq!(r.max_ratio, Some((1, 8)));

        let bad = GroupSpec::small_cancellation(&["a", "b"], &["a b a b'"]);
        let r = validate_presentation(&bad).unwrap();
        assert!(!r.passes);
        assert_eq!(r.max_ratio, Some((1, 4)));
        assert!(matches!(Group::new(bad), Err(Error::NotSmallCancellation { .. })));

        let free = GroupSpec::free(&["a"]);
        assert!(validate_presentation(&free).unwrap().skipped);
    }

    #[test]
    fn unknown_generator_is_reported() {
        let g = Group::new(GroupSpec::free(&["a", "b"])).unwrap();
        assert!(matches!(g.reduce("a z"), Err(Error::UnknownGenerator(n)) if n == "z"));
    }

    #[test]
    fn redundant_generators_are_named_by_their_word() {
        let g = Group::new(GroupSpec::free(&["a", "b"]).with_redundant(&["a b"])).unwrap();
        let x = g.absolute_generators();
        assert_eq!(x.len(), 3);
        assert_eq!(x[2].name, "ab");
        assert_eq!(g.format(&x[2].element), "a b");
    }
}
