//! Fundamental 2-cells of the Mendoza complexes, as data.
//!
//! JSON schema (`CellComplexFile`):
//!
//! ```json
//! { "ring": 2, "group": "PSL", "source": "...",
//!   "elements": [ {"name": "a", "matrix": [["1", "w"], ["w", "-1"]]}, ... ],
//!   "vertices": [ {"name": "P1", "stabilizer": ["a", "c"], "label": "D2"},
//!                 {"name": "P4", "image_of": "P1", "by": "g", "stabilizer": ["abar", "c"], "label": "D2"} ],
//!   "edges": [ {"name": "P1P2", "from": "P1", "to": "P2", "stabilizer": ["a"], "label": "C2"},
//!              {"name": "P4P3", "from": "P4", "to": "P3", "image_of": "P1P2", "by": "g"} ],
//!   "face": ["P1", "P2", "P3", "P4"] }
//! ```
//!
//! Cells without `image_of` are orbit representatives. A cell with
//! `image_of: X, by: h` is the translate `h X` (left action on the complex);
//! for edges, `from` and `to` must be the translates of the endpoints of X.
//! Stabilizers are words in the named elements. `face` lists the vertices
//! of the 2-cell boundary in order; consecutive vertices must be joined by
//! an edge.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{resolve_matrix, GeneratorSpec, GroupId, GroupKind, Word};
use crate::error::{Error, Result};
use crate::ring::{Mat2, RingId};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexSpec {
    pub name: String,
    #[serde(default)]
    pub stabilizer: Vec<String>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub image_of: Option<String>,
    #[serde(default)]
    pub by: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub stabilizer: Vec<String>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub image_of: Option<String>,
    #[serde(default)]
    pub by: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellComplexFile {
    pub ring: u32,
    pub group: GroupKind,
    #[serde(default)]
    pub source: String,
    pub elements: Vec<GeneratorSpec>,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    pub face: Vec<String>,
}

/// A finite subgroup given by generators, with all its elements in normal form.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub generators: Vec<Mat2>,
    pub elements: BTreeSet<String>,
    normal: Vec<Mat2>,
}

impl FiniteGroup {
    pub const MAX_ORDER: usize = 24;

    /// Closure under multiplication, failing past `MAX_ORDER` elements.
    pub fn generate(id: GroupId, generators: Vec<Mat2>) -> Result<FiniteGroup> {
        let identity = id.normal_form(&Mat2::identity(id.ring));
        let mut seen: HashMap<Mat2, ()> = HashMap::new();
        let mut normal = vec![identity.clone()];
        seen.insert(identity.clone(), ());
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = id.normal_form(&(&x * g));
                if seen.insert(y.clone(), ()).is_none() {
                    normal.push(y.clone());
                    queue.push_back(y);
                    if normal.len() > Self::MAX_ORDER {
                        return Err(Error::CorruptData(format!(
                            "stabilizer generated by {generators:?} has more than {} elements",
                            Self::MAX_ORDER
                        )));
                    }
                }
            }
        }
        let elements = normal.iter().map(|m| m.to_string()).collect();
        Ok(FiniteGroup { generators, elements, normal })
    }

    pub fn order(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, id: GroupId, m: &Mat2) -> bool {
        self.elements.contains(&id.normal_form(m).to_string())
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn conjugate(&self, id: GroupId, h: &Mat2) -> Result<FiniteGroup> {
        let hinv = h.inverse().expect("group element");
        FiniteGroup::generate(id, self.generators.iter().map(|g| &(h * g) * &hinv).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Mat2> {
        self.normal.iter()
    }
}

/// Order of a labelled finite group such as `D4` or `S3`.
pub fn label_order(label: &str) -> Option<usize> {
    let (kind, n) = label.split_at(1);
    let n: usize = n.parse().ok()?;
    match kind {
        "C" => Some(n),
        "D" => Some(2 * n),
        "S" => (1..=n).try_fold(1usize, |acc, k| Some(acc * k)),
        "A" => (1..=n).try_fold(1usize, |acc, k| Some(acc * k)).map(|f| f / 2),
        _ => None,
    }
}

/// An orbit representative of vertices.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub name: String,
    pub stabilizer: FiniteGroup,
    pub label: Option<String>,
}

/// A vertex of the 2-cell written as `element * vertices[rep]`.
#[derive(Clone, Debug)]
pub struct VertexRef {
    pub rep: usize,
    pub element: Mat2,
}

/// An orbit representative of edges, oriented `from -> to`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub name: String,
    pub from: VertexRef,
    pub to: VertexRef,
    pub stabilizer: FiniteGroup,
    pub label: Option<String>,
}

/// One side of the 2-cell boundary: `sign * element * edges[edge]`.
#[derive(Clone, Debug)]
pub struct FaceSide {
    pub edge: usize,
    pub sign: i32,
    pub element: Mat2,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub sides: Vec<FaceSide>,
}

/// A validated fundamental cell with orbit representatives and gluings.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub id: GroupId,
    pub source: String,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub face: Face,
    /// Number of vertices and edges on the boundary of the 2-cell before identification.
    pub boundary_cells: (usize, usize),
    /// Number of boundary edges identified with another boundary edge.
    pub glued_edges: usize,
}

impl CellComplex {
    pub fn from_json(text: &str) -> Result<CellComplex> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn from_file(file: &CellComplexFile) -> Result<CellComplex> {
        let ring = RingId::new(file.ring)?;
        let id = GroupId::new(ring, file.group);
        let corrupt = |msg: String| Error::CorruptData(format!("{id} cell data: {msg}"));

        let names: Vec<String> = file.elements.iter().map(|e| e.name.clone()).collect();
        let mut mats = Vec::new();
        for e in &file.elements {
            let m = resolve_matrix(&e.matrix, ring)?;
            if !id.admits(&m) {
                return Err(corrupt(format!("element {} = {m} is not in the group", e.name)));
            }
            mats.push(m);
        }
        let eval = |s: &str| -> Result<Mat2> {
            let w = Word::parse(s, &names)?;
            let mut acc = Mat2::identity(ring);
            for l in w.letters() {
                let base = if l.exp < 0 { mats[l.gen].inverse().unwrap() } else { mats[l.gen].clone() };
                for _ in 0..l.exp.unsigned_abs() {
                    acc = &acc * &base;
                }
            }
            Ok(acc)
        };
        let group_of = |gens: &[String], label: &Option<String>, what: &str| -> Result<FiniteGroup> {
            let g = FiniteGroup::generate(id, gens.iter().map(|s| eval(s)).collect::<Result<_>>()?)?;
            if let Some(label) = label {
                let want = label_order(label).ok_or_else(|| corrupt(format!("unknown group label {label}")))?;
                if g.order() != want {
                    return Err(corrupt(format!("stabilizer of {what} has order {}, label {label} says {want}", g.order())));
                }
            }
            Ok(g)
        };

        // vertices: representatives first, then translates
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut vref: HashMap<String, VertexRef> = HashMap::new();
        for v in file.vertices.iter().filter(|v| v.image_of.is_none()) {
            let stabilizer = group_of(&v.stabilizer, &v.label, &v.name)?;
            vref.insert(v.name.clone(), VertexRef { rep: vertices.len(), element: Mat2::identity(ring) });
            vertices.push(Vertex { name: v.name.clone(), stabilizer, label: v.label.clone() });
        }
        for v in file.vertices.iter().filter(|v| v.image_of.is_some()) {
            let src = v.image_of.as_ref().unwrap();
            let base = vref.get(src).cloned().ok_or_else(|| corrupt(format!("vertex {} is the image of unknown {src}", v.name)))?;
            let h = eval(v.by.as_deref().ok_or_else(|| corrupt(format!("vertex {} has no `by`", v.name)))?)?;
            let r = VertexRef { rep: base.rep, element: &h * &base.element };
            if !v.stabilizer.is_empty() {
                let listed = group_of(&v.stabilizer, &v.label, &v.name)?;
                let expect = vertices[r.rep].stabilizer.conjugate(id, &r.element)?;
                if listed.elements != expect.elements {
                    return Err(corrupt(format!("stabilizer of {} is not the conjugate of that of {src}", v.name)));
                }
            }
            if vref.insert(v.name.clone(), r).is_some() {
                return Err(corrupt(format!("duplicate vertex {}", v.name)));
            }
        }
        let same_point = |a: &VertexRef, b: &VertexRef| -> bool {
            a.rep == b.rep
                && vertices[a.rep]
                    .stabilizer
                    .contains(id, &(&b.element.inverse().unwrap() * &a.element))
        };
        // stabilizer of the point element * rep
        let point_stabilizer = |r: &VertexRef| vertices[r.rep].stabilizer.conjugate(id, &r.element);

        let mut edges: Vec<Edge> = Vec::new();
        // name -> (rep edge, element, from, to)
        let mut eref: HashMap<String, (usize, Mat2, VertexRef, VertexRef)> = HashMap::new();
        let lookup = |name: &str, vref: &HashMap<String, VertexRef>| {
            vref.get(name).cloned().ok_or_else(|| corrupt(format!("unknown vertex {name}")))
        };
        for e in file.edges.iter().filter(|e| e.image_of.is_none()) {
            let from = lookup(&e.from, &vref)?;
            let to = lookup(&e.to, &vref)?;
            let stabilizer = group_of(&e.stabilizer, &e.label, &e.name)?;
            for end in [&from, &to] {
                if !stabilizer.is_subgroup_of(&point_stabilizer(end)?) {
                    return Err(corrupt(format!("stabilizer of edge {} does not fix its endpoints", e.name)));
                }
            }
            eref.insert(e.name.clone(), (edges.len(), Mat2::identity(ring), from.clone(), to.clone()));
            edges.push(Edge { name: e.name.clone(), from, to, stabilizer, label: e.label.clone() });
        }
        for e in file.edges.iter().filter(|e| e.image_of.is_some()) {
            let src = e.image_of.as_ref().unwrap();
            let (rep, base, _, _) =
                eref.get(src).cloned().ok_or_else(|| corrupt(format!("edge {} is the image of unknown {src}", e.name)))?;
            if base != Mat2::identity(ring) {
                return Err(corrupt(format!("edge {} is the image of a non-representative", e.name)));
            }
            let h = eval(e.by.as_deref().ok_or_else(|| corrupt(format!("edge {} has no `by`", e.name)))?)?;
            let from = lookup(&e.from, &vref)?;
            let to = lookup(&e.to, &vref)?;
            let moved = |r: &VertexRef| VertexRef { rep: r.rep, element: &h * &r.element };
            if !same_point(&from, &moved(&edges[rep].from)) || !same_point(&to, &moved(&edges[rep].to)) {
                return Err(corrupt(format!("{} does not map {src} onto {}", e.by.as_deref().unwrap(), e.name)));
            }
            if !e.stabilizer.is_empty() {
                let listed = group_of(&e.stabilizer, &e.label, &e.name)?;
                if listed.elements != edges[rep].stabilizer.conjugate(id, &h)?.elements {
                    return Err(corrupt(format!("stabilizer of {} is not the conjugate of that of {src}", e.name)));
                }
            }
            eref.insert(e.name.clone(), (rep, h, from, to));
        }

        // the 2-cell boundary
        let n = file.face.len();
        if n < 3 {
            return Err(corrupt("the face needs at least three vertices".into()));
        }
        let mut sides = Vec::new();
        let mut used = BTreeSet::new();
        for i in 0..n {
            let (x, y) = (&file.face[i], &file.face[(i + 1) % n]);
            let hit = file.edges.iter().find_map(|e| {
                if (&e.from, &e.to) == (x, y) {
                    Some((e.name.clone(), 1))
                } else if (&e.from, &e.to) == (y, x) {
                    Some((e.name.clone(), -1))
                } else {
                    None
                }
            });
            let (name, sign) = hit.ok_or_else(|| corrupt(format!("no edge joins {x} and {y}")))?;
            if !used.insert(name.clone()) {
                return Err(corrupt(format!("edge {name} occurs twice on the boundary")));
            }
            let (rep, element, _, _) = eref[&name].clone();
            sides.push(FaceSide { edge: rep, sign, element });
        }
        if used.len() != file.edges.len() {
            return Err(corrupt("some edges are not on the boundary of the face".into()));
        }
        for v in &file.face {
            lookup(v, &vref)?;
        }
        // a face element fixing every boundary vertex would be a nontrivial face stabilizer
        let mut common: Option<BTreeSet<String>> = None;
        for v in &file.face {
            let s = point_stabilizer(&vref[v])?.elements;
            common = Some(match common {
                None => s,
                Some(c) => c.intersection(&s).cloned().collect(),
            });
        }
        if common.map_or(0, |c| c.len()) != 1 {
            return Err(corrupt("the boundary vertices have a common nontrivial stabilizer".into()));
        }
        let glued_edges = file.edges.len() - edges.len();
        Ok(CellComplex {
            id,
            source: file.source.clone(),
            vertices,
            edges,
            face: Face { sides },
            boundary_cells: (n, n),
            glued_edges,
        })
    }

    /// Euler characteristic of the quotient cell structure.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + 1
    }
}

fn embedded(id: GroupId) -> Option<&'static str> {
    Some(match (id.kind, id.ring.d()) {
        (GroupKind::Psl, 2) => include_str!("../../data/cells/psl2_o2.json"),
        (GroupKind::Pgl, 1) => include_str!("../../data/cells/pgl2_o1.json"),
        (GroupKind::Pgl, 2) => include_str!("../../data/cells/pgl2_o2.json"),
        (GroupKind::Pgl, 3) => include_str!("../../data/cells/pgl2_o3.json"),
        (GroupKind::Pgl, 7) => include_str!("../../data/cells/pgl2_o7.json"),
        (GroupKind::Pgl, 11) => include_str!("../../data/cells/pgl2_o11.json"),
        _ => return None,
    })
}

/// The embedded cell complex for PSL2(O_2) or any PGL2(O_d).
pub fn load_cellcomplex(id: GroupId) -> Result<CellComplex> {
    let text = embedded(id).ok_or_else(|| Error::MissingCellData { group: id.kind.to_string(), ring: id.ring })?;
    CellComplex::from_json(text)
}
