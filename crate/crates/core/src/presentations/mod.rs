//! Finite presentations of PSL2(O_d) and PGL2(O_d) with matrix realizations,
//! and the cell complexes used for H^2.
//!
//! Presentations are JSON documents (see `PresentationFile`); the PSL ones
//! are embedded from `data/`, the PGL ones are derived from them as the
//! semidirect product with `T = diag(e, 1)` for a non-square unit `e`. Every
//! relator is evaluated on the matrices at load time.

mod cells;
mod word;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::polymod::GroupKind;
use crate::ring::{Mat2, QuadInt, RingId, Z};
pub use cells::{load_cellcomplex, CellComplex, CellComplexFile, Edge, Face, FaceSide, FiniteGroup, Vertex};
pub use word::{Letter, Word};

/// One of the ten supported groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId {
    pub ring: RingId,
    pub kind: GroupKind,
}

impl GroupId {
    pub fn new(ring: RingId, kind: GroupKind) -> GroupId {
        GroupId { ring, kind }
    }

    pub fn psl(d: u32) -> Result<GroupId> {
        Ok(GroupId { ring: RingId::new(d)?, kind: GroupKind::Psl })
    }

    pub fn pgl(d: u32) -> Result<GroupId> {
        Ok(GroupId { ring: RingId::new(d)?, kind: GroupKind::Pgl })
    }

    pub fn all() -> impl Iterator<Item = GroupId> {
        [GroupKind::Psl, GroupKind::Pgl]
            .into_iter()
            .flat_map(|kind| RingId::all().map(move |ring| GroupId { ring, kind }))
    }

    /// Whether `m` represents the identity of this group.
    pub fn is_trivial(&self, m: &Mat2) -> bool {
        match self.kind {
            GroupKind::Psl => m.is_pm_identity(),
            GroupKind::Pgl => m.is_unit_scalar(),
        }
    }

    /// Whether `m` is an admissible element: determinant 1 for PSL, a unit for PGL.
    pub fn admits(&self, m: &Mat2) -> bool {
        if m.ring() != self.ring {
            return false;
        }
        let det = m.det();
        match self.kind {
            GroupKind::Psl => det.is_one(),
            GroupKind::Pgl => det.is_unit(),
        }
    }

    /// Normal form of the class of `m` in the group.
    pub fn normal_form(&self, m: &Mat2) -> Mat2 {
        match self.kind {
            GroupKind::Psl => m.sign_normal_form(),
            GroupKind::Pgl => m.projective_normal_form(),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}2(O_{})", self.kind, self.ring.d())
    }
}

/// Parse `a + b*w` written as e.g. `1`, `-w`, `2-3w`, `1+w`; `wb` is the
/// conjugate of `w`.
pub fn parse_elem(s: &str, ring: RingId) -> Result<QuadInt> {
    let bad = || Error::CorruptData(format!("cannot parse ring element {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut total = ring.zero();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1i64, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body[1..].find(['+', '-']).map_or(body.len(), |i| i + 1);
        let term = &body[..end];
        rest = &body[end..];
        let digits = term.find(|c: char| !c.is_ascii_digit()).unwrap_or(term.len());
        let coef: Z = if digits == 0 { Z::ONE } else { term[..digits].parse().map_err(|_| bad())? };
        let unit = match &term[digits..] {
            "" if digits > 0 => ring.one(),
            "w" => ring.omega(),
            "wb" => ring.omega().conj(),
            _ => return Err(bad()),
        };
        total = &total + &unit.scale(&(&coef * &Z::from(sign)));
    }
    Ok(total)
}

/// A matrix entry in a data file: either a QuadInt object or a string for `parse_elem`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemSpec {
    Object { a: Z, b: Z },
    Text(String),
}

impl ElemSpec {
    pub fn resolve(&self, ring: RingId) -> Result<QuadInt> {
        match self {
            ElemSpec::Object { a, b } => Ok(ring.elem(a.clone(), b.clone())),
            ElemSpec::Text(s) => parse_elem(s, ring),
        }
    }
}

pub type MatSpec = [[ElemSpec; 2]; 2];

pub fn resolve_matrix(spec: &MatSpec, ring: RingId) -> Result<Mat2> {
    Ok(Mat2::new(
        spec[0][0].resolve(ring)?,
        spec[0][1].resolve(ring)?,
        spec[1][0].resolve(ring)?,
        spec[1][1].resolve(ring)?,
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub matrix: MatSpec,
}

/// JSON schema for presentations:
///
/// ```json
/// { "ring": 2, "group": "PSL", "source": "...",
///   "generators": [ {"name": "A", "matrix": [["1", "1"], ["0", "1"]]}, ... ],
///   "relators": ["B^2", "(A B)^3", "[A, U]", "(B U^-1 B U)^2"] }
/// ```
///
/// Words are juxtaposed factors `X`, `X^e`, `(...)^e` and commutators `[u, v]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationFile {
    pub ring: u32,
    pub group: GroupKind,
    #[serde(default)]
    pub source: String,
    pub generators: Vec<GeneratorSpec>,
    pub relators: Vec<String>,
}

/// A validated finite presentation together with its matrix realization.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    pub id: GroupId,
    pub names: Vec<String>,
    pub matrices: Vec<Mat2>,
    inverses: Vec<Mat2>,
    pub relators: Vec<Word>,
    pub source: String,
}

impl GroupPresentation {
    /// Build and validate: generators must be admissible and every relator
    /// must evaluate to a central element.
    pub fn new(id: GroupId, generators: Vec<(String, Mat2)>, relators: Vec<Word>, source: String) -> Result<Self> {
        let mut names = Vec::new();
        let mut matrices = Vec::new();
        let mut inverses = Vec::new();
        for (name, m) in generators {
            if !id.admits(&m) {
                return Err(Error::CorruptData(format!("generator {name} = {m} is not an element of {id}")));
            }
            if names.contains(&name) {
                return Err(Error::CorruptData(format!("duplicate generator {name}")));
            }
            inverses.push(m.inverse().expect("unit determinant"));
            matrices.push(m);
            names.push(name);
        }
        let p = GroupPresentation { id, names, matrices, inverses, relators, source };
        for r in &p.relators {
            if r.letters().iter().any(|l| l.gen >= p.names.len()) {
                return Err(Error::CorruptData("relator uses an unknown generator".into()));
            }
            let v = p.evaluate(r);
            if !id.is_trivial(&v) {
                return Err(Error::CorruptData(format!(
                    "relator {} evaluates to {v}, which is not central in {id}",
                    r.display(&p.names)
                )));
            }
        }
        Ok(p)
    }

    pub fn from_file(file: &PresentationFile) -> Result<Self> {
        let ring = RingId::new(file.ring)?;
        let id = GroupId::new(ring, file.group);
        let generators = file
            .generators
            .iter()
            .map(|g| Ok((g.name.clone(), resolve_matrix(&g.matrix, ring)?)))
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
        let relators = file.relators.iter().map(|r| Word::parse(r, &names)).collect::<Result<Vec<_>>>()?;
        Self::new(id, generators, relators, file.source.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    pub fn ring(&self) -> RingId {
        self.id.ring
    }

    pub fn generator(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Word::parse(s, &self.names)
    }

    /// Matrix of `g^e` for a single syllable.
    pub fn letter_matrix(&self, gen: usize, exp: i32) -> Mat2 {
        let base = if exp < 0 { &self.inverses[gen] } else { &self.matrices[gen] };
        let mut acc = Mat2::identity(self.ring());
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * base;
        }
        acc
    }

    /// Product of the realizations along the word.
    pub fn evaluate(&self, w: &Word) -> Mat2 {
        let mut acc = Mat2::identity(self.ring());
        for l in w.letters() {
            acc = &acc * &self.letter_matrix(l.gen, l.exp);
        }
        acc
    }

    pub fn to_file(&self) -> PresentationFile {
        let spec = |x: &QuadInt| ElemSpec::Object { a: x.a.clone(), b: x.b.clone() };
        PresentationFile {
            ring: self.ring().d(),
            group: self.id.kind,
            source: self.source.clone(),
            generators: self
                .names
                .iter()
                .zip(&self.matrices)
                .map(|(n, m)| GeneratorSpec {
                    name: n.clone(),
                    matrix: [[spec(&m.a), spec(&m.b)], [spec(&m.c), spec(&m.d)]],
                })
                .collect(),
            relators: self.relators.iter().map(|r| r.display(&self.names).to_string()).collect(),
        }
    }
}

fn embedded_psl(d: u32) -> &'static str {
    match d {
        1 => include_str!("../../data/presentations/psl2_o1.json"),
        2 => include_str!("../../data/presentations/psl2_o2.json"),
        3 => include_str!("../../data/presentations/psl2_o3.json"),
        7 => include_str!("../../data/presentations/psl2_o7.json"),
        11 => include_str!("../../data/presentations/psl2_o11.json"),
        _ => unreachable!("RingId is always supported"),
    }
}

/// The validated presentation of one of the ten supported groups.
pub fn load_presentation(id: GroupId) -> Result<GroupPresentation> {
    let psl = GroupPresentation::from_json(embedded_psl(id.ring.d()))?;
    match id.kind {
        GroupKind::Psl => Ok(psl),
        GroupKind::Pgl => derive_pgl(&psl),
    }
}

/// Scale `m` by a unit so that it lands in SL2, if its determinant is a square unit.
pub fn to_sl2(m: &Mat2) -> Option<Mat2> {
    let det = m.det();
    m.ring()
        .units()
        .into_iter()
        .find(|u| (&(u * u) * &det).is_one())
        .map(|u| m.scale(&u))
}

/// Writes elements of SL2(O) as words in a PSL presentation that contains the
/// translations `A = (1 1; 0 1)`, `U = (1 w; 0 1)`, the inversion
/// `B = (0 -1; 1 0)` and, for d = 1, 3, a diagonal generator `L`.
pub struct WordSolver<'a> {
    p: &'a GroupPresentation,
    a: usize,
    u: usize,
    b: usize,
    diagonals: Vec<(Mat2, Word)>,
}

impl<'a> WordSolver<'a> {
    pub fn new(p: &'a GroupPresentation) -> Result<Self> {
        let ring = p.ring();
        let find = |name: &str, m: Mat2| -> Result<usize> {
            let g = p
                .generator(name)
                .ok_or_else(|| Error::CorruptData(format!("{} has no generator {name}", p.id)))?;
            if p.matrices[g].sign_normal_form() != m.sign_normal_form() {
                return Err(Error::CorruptData(format!("generator {name} of {} is not {m}", p.id)));
            }
            Ok(g)
        };
        let (o, z) = (ring.one(), ring.zero());
        let a = find("A", Mat2::new(o.clone(), o.clone(), z.clone(), o.clone()))?;
        let u = find("U", Mat2::new(o.clone(), ring.omega(), z.clone(), o.clone()))?;
        let b = find("B", Mat2::new(z.clone(), -&o, o.clone(), z.clone()))?;
        let mut diagonals = vec![(Mat2::identity(ring), Word::empty())];
        if let Some(l) = p.generator("L") {
            let mut w = Word::generator(l);
            loop {
                let m = p.evaluate(&w);
                if m.is_pm_identity() {
                    break;
                }
                diagonals.push((m.sign_normal_form(), w.clone()));
                w.push(l, 1);
                if diagonals.len() > 6 {
                    return Err(Error::CorruptData("generator L has infinite order".into()));
                }
            }
        }
        Ok(WordSolver { p, a, u, b, diagonals })
    }

    fn translation(&self, x: &QuadInt) -> Word {
        let ea = x.a.as_i64().and_then(|v| i32::try_from(v).ok()).expect("translation too large");
        let eb = x.b.as_i64().and_then(|v| i32::try_from(v).ok()).expect("translation too large");
        Word::from_letters([(self.a, ea), (self.u, eb)])
    }

    /// A word evaluating to `m` up to sign; `m` must have determinant 1.
    pub fn solve(&self, m: &Mat2) -> Result<Word> {
        if !m.det().is_one() {
            return Err(Error::InvalidArgument(format!("{m} is not in SL2")));
        }
        let mut cur = m.clone();
        // cur = m * right
        let mut right = Word::empty();
        while !cur.c.is_zero() {
            let (q, _) = cur.d.div_rem(&cur.c)?;
            let step = self.translation(&-&q).concat(&Word::generator(self.b));
            cur = &cur * &self.p.evaluate(&step);
            right = right.concat(&step);
        }
        let u = cur.d.clone();
        let uinv = u.unit_inverse().expect("unit diagonal");
        let diag = Mat2::new(uinv.clone(), cur.c.clone(), cur.c.clone(), u.clone()).sign_normal_form();
        let dword = self
            .diagonals
            .iter()
            .find(|(dm, _)| *dm == diag)
            .map(|(_, w)| w.clone())
            .ok_or_else(|| Error::CorruptData(format!("no word for the diagonal matrix {diag}")))?;
        let x = &u * &cur.b;
        let w = dword.concat(&self.translation(&x)).concat(&right.inverse());
        debug_assert_eq!(self.p.evaluate(&w).sign_normal_form(), m.sign_normal_form());
        Ok(w)
    }
}

/// PGL2(O) as PSL2(O) extended by `T = diag(e, 1)`: the relators of PSL2(O),
/// `T^2 = w0` and `T^-1 X T = w_X` for each generator X, with the right-hand
/// words found by `WordSolver`.
pub fn derive_pgl(psl: &GroupPresentation) -> Result<GroupPresentation> {
    let ring = psl.ring();
    let e = ring.nonsquare_unit();
    let t = Mat2::new(e, ring.zero(), ring.zero(), ring.one());
    let tinv = t.inverse().expect("unit determinant");
    let solver = WordSolver::new(psl)?;
    let tg = psl.ngens();
    let mut generators: Vec<(String, Mat2)> = psl.names.iter().cloned().zip(psl.matrices.iter().cloned()).collect();
    generators.push(("T".to_string(), t.clone()));
    let mut relators = psl.relators.clone();
    let t2 = to_sl2(&(&t * &t)).expect("T^2 has square determinant");
    relators.push(Word::from_letters([(tg, 2)]).concat(&solver.solve(&t2)?.inverse()));
    for (g, m) in psl.matrices.iter().enumerate() {
        let conj = &(&tinv * m) * &t;
        let w = solver.solve(&conj)?;
        relators.push(Word::from_letters([(tg, -1), (g, 1), (tg, 1)]).concat(&w.inverse()));
    }
    let source = format!("derived from the PSL presentation ({}) by adjoining T = diag({}, 1)", psl.source, ring.nonsquare_unit());
    GroupPresentation::new(GroupId::new(ring, GroupKind::Pgl), generators, relators, source)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_elements() {
        let r = RingId::new(7).unwrap();
        assert_eq!(parse_elem("2-3w", r).unwrap(), r.elem(2, -3));
        assert_eq!(parse_elem("-w", r).unwrap(), r.elem(0, -1));
        assert_eq!(parse_elem("wb", r).unwrap(), r.elem(1, -1));
        assert_eq!(parse_elem(" 1 + w ", r).unwrap(), r.elem(1, 1));
        assert_eq!(parse_elem("-2wb", r).unwrap(), r.elem(-2, 2));
        assert!(parse_elem("x", r).is_err());
        assert!(parse_elem("", r).is_err());
    }

    #[test]
    fn all_presentations_load() {
        for id in GroupId::all() {
            let p = load_presentation(id).unwrap();
            assert_eq!(p.id, id);
            for r in &p.relators {
                assert!(id.is_trivial(&p.evaluate(r)));
            }
        }
    }

    #[test]
    fn psl2_o2_shape() {
        let p = load_presentation(GroupId::psl(2).unwrap()).unwrap();
        assert_eq!(p.names, ["A", "B", "U"]);
        assert_eq!(p.relators.len(), 4);
        assert_eq!(p.evaluate(&Word::empty()), Mat2::identity(p.ring()));
        let bb = p.evaluate(&p.parse_word("B B").unwrap());
        assert_eq!(bb, Mat2::scalar(p.ring().int(-1)));
        assert!(p.evaluate(&p.parse_word("A U A^-1 U^-1").unwrap()).is_pm_identity());
    }

    #[test]
    fn quoted_o2_relator_is_not_central() {
        // (B U^2 B U^-1)^2 with the standard realizations has trace 2, so it
        // cannot be a relator; the presentation ships (B U^-1 B U)^2 instead.
        let p = load_presentation(GroupId::psl(2).unwrap()).unwrap();
        let m = p.evaluate(&p.parse_word("(B U^2 B U^-1)^2").unwrap());
        assert!(!m.is_pm_identity());
        assert_eq!(m.trace(), p.ring().int(2));
        let file = PresentationFile {
            ring: 2,
            group: GroupKind::Psl,
            source: String::new(),
            generators: p.to_file().generators,
            relators: vec!["(B U^2 B U^-1)^2".into()],
        };
        assert!(matches!(GroupPresentation::from_file(&file), Err(Error::CorruptData(_))));
    }

    #[test]
    fn solver_round_trip() {
        for d in RingId::SUPPORTED {
            let p = load_presentation(GroupId::psl(d).unwrap()).unwrap();
            let s = WordSolver::new(&p).unwrap();
            let g = p.evaluate(&p.parse_word("A U B A^-2 B U^3 B").unwrap());
            let w = s.solve(&g).unwrap();
            assert_eq!(p.evaluate(&w).sign_normal_form(), g.sign_normal_form());
        }
    }
}
