//! Finite acyclic quivers and their paths.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuiverError {
    #[error("duplicate vertex label {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate arrow name {0:?}")]
    DuplicateArrow(String),
    #[error("arrow {arrow:?} references unknown vertex {vertex:?}")]
    UnknownVertex { arrow: String, vertex: String },
    #[error("quiver has a directed cycle")]
    Cyclic,
    #[error("unknown vertex label {0:?}")]
    NoSuchVertex(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

/// A finite acyclic quiver with named vertices and arrows.
#[derive(Clone, PartialEq, Eq)]
pub struct Quiver {
    name: String,
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    /// vertex indices in a fixed topological order
    topo: Vec<usize>,
}

impl fmt::Debug for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quiver({}: {} vertices, {} arrows)", self.name, self.vertices.len(), self.arrows.len())
    }
}

impl Quiver {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        arrows: Vec<(String, String, String)>,
    ) -> Result<Arc<Self>, QuiverError> {
        let name = name.into();
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(QuiverError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut arr = Vec::with_capacity(arrows.len());
        for (aname, from, to) in arrows {
            if !seen.insert(aname.clone()) {
                return Err(QuiverError::DuplicateArrow(aname));
            }
            let f = *index.get(from.as_str()).ok_or(QuiverError::UnknownVertex {
                arrow: aname.clone(),
                vertex: from.clone(),
            })?;
            let t = *index.get(to.as_str()).ok_or(QuiverError::UnknownVertex {
                arrow: aname.clone(),
                vertex: to.clone(),
            })?;
            arr.push(Arrow {
                name: aname,
                from: f,
                to: t,
            });
        }
        let topo = topological_order(vertices.len(), &arr).ok_or(QuiverError::Cyclic)?;
        Ok(Arc::new(Quiver {
            name,
            vertices,
            arrows: arr,
            topo,
        }))
    }

    /// Linear quiver `1 -> 2 -> ... -> n` with arrows `a12, a23, ...`.
    pub fn linear(n: usize) -> Arc<Self> {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (1..n)
            .map(|i| (format!("a{}{}", i, i + 1), i.to_string(), (i + 1).to_string()))
            .collect();
        Quiver::new(format!("A{n}"), vertices, arrows).expect("linear quiver is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_labels(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, label: &str) -> Result<usize, QuiverError> {
        self.vertices
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| QuiverError::NoSuchVertex(label.to_string()))
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn arrows_from(&self, v: usize) -> impl Iterator<Item = (usize, &Arrow)> {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.from == v)
    }

    pub fn arrows_into(&self, v: usize) -> impl Iterator<Item = (usize, &Arrow)> {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.to == v)
    }

    /// All paths from `u` to `v`, trivial path included when `u == v`,
    /// in a deterministic order.
    pub fn paths(&self, u: usize, v: usize) -> Vec<Path> {
        let mut out = Vec::new();
        let mut stack = vec![(u, Vec::new())];
        while let Some((w, arrows_so_far)) = stack.pop() {
            if w == v {
                out.push(Path {
                    from: u,
                    to: v,
                    arrows: arrows_so_far.clone(),
                });
            }
            let mut next: Vec<(usize, Vec<usize>)> = Vec::new();
            for (ai, a) in self.arrows_from(w) {
                let mut ext = arrows_so_far.clone();
                ext.push(ai);
                next.push((a.to, ext));
            }
            // reversed so the stack pops in arrow order
            for item in next.into_iter().rev() {
                stack.push(item);
            }
        }
        out.sort();
        out
    }

    pub fn path_count(&self, u: usize, v: usize) -> usize {
        self.paths(u, v).len()
    }

    /// The opposite quiver: arrows reversed, same names and labels.
    pub fn opposite(&self) -> Arc<Quiver> {
        let arrows = self
            .arrows
            .iter()
            .map(|a| {
                (
                    a.name.clone(),
                    self.vertices[a.to].clone(),
                    self.vertices[a.from].clone(),
                )
            })
            .collect();
        Quiver::new(format!("{}^op", self.name), self.vertices.clone(), arrows)
            .expect("opposite of acyclic is acyclic")
    }

    /// Induced subquiver on a vertex subset; returns the quiver and the map
    /// from new vertex indices to old ones.
    pub fn induced(&self, keep: &[usize], name: impl Into<String>) -> (Arc<Quiver>, Vec<usize>) {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let labels: Vec<String> = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let arrows = self
            .arrows
            .iter()
            .filter(|a| keep.contains(&a.from) && keep.contains(&a.to))
            .map(|a| {
                (
                    a.name.clone(),
                    self.vertices[a.from].clone(),
                    self.vertices[a.to].clone(),
                )
            })
            .collect();
        let q = Quiver::new(name, labels, arrows).expect("induced subquiver is acyclic");
        (q, keep)
    }

    /// Is `set` closed under predecessors (every arrow into the set starts in it)?
    pub fn predecessor_closed(&self, set: &[usize]) -> bool {
        self.arrows
            .iter()
            .all(|a| !set.contains(&a.to) || set.contains(&a.from))
    }

    /// Is `set` closed under successors (every arrow out of the set ends in it)?
    pub fn successor_closed(&self, set: &[usize]) -> bool {
        self.arrows
            .iter()
            .all(|a| !set.contains(&a.from) || set.contains(&a.to))
    }
}

fn topological_order(n: usize, arrows: &[Arrow]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for a in arrows {
        indeg[a.to] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    queue.sort_unstable();
    let mut order = Vec::with_capacity(n);
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        order.push(v);
        for a in arrows.iter().filter(|a| a.from == v) {
            indeg[a.to] -= 1;
            if indeg[a.to] == 0 {
                queue.push(a.to);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// A directed path, stored as the arrow indices traversed in order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub from: usize,
    pub to: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path {
            from: v,
            to: v,
            arrows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// `other` after `self`: composite `other . self` when self: u->v, other: v->w.
    pub fn then(&self, other: &Path) -> Path {
        assert_eq!(self.to, other.from, "paths do not compose");
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Path {
            from: self.from,
            to: other.to,
            arrows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_quiver_paths() {
        let q = Quiver::linear(3);
        assert_eq!(q.num_vertices(), 3);
        assert_eq!(q.path_count(0, 2), 1);
        assert_eq!(q.path_count(0, 0), 1);
        assert_eq!(q.path_count(2, 0), 0);
        let p = &q.paths(0, 2)[0];
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn rejects_cycles_and_duplicates() {
        let cyc = Quiver::new(
            "C",
            vec!["1".into(), "2".into()],
            vec![
                ("a".into(), "1".into(), "2".into()),
                ("b".into(), "2".into(), "1".into()),
            ],
        );
        assert_eq!(cyc.unwrap_err(), QuiverError::Cyclic);
        let dup = Quiver::new("D", vec!["1".into(), "1".into()], vec![]);
        assert!(dup.is_err());
    }

    #[test]
    fn opposite_and_induced() {
        let q = Quiver::linear(3);
        let op = q.opposite();
        assert_eq!(op.path_count(2, 0), 1);
        assert_eq!(op.path_count(0, 2), 0);
        let (sub, map) = q.induced(&[0, 1], "B");
        assert_eq!(sub.num_vertices(), 2);
        assert_eq!(sub.arrows().len(), 1);
        assert_eq!(map, vec![0, 1]);
    }

    #[test]
    fn closures() {
        let q = Quiver::linear(3);
        assert!(q.successor_closed(&[2]));
        assert!(q.predecessor_closed(&[0, 1]));
        assert!(!q.predecessor_closed(&[1]));
        assert!(!q.successor_closed(&[1]));
        // multiple-path quiver
        let k = Quiver::new(
            "K",
            vec!["1".into(), "2".into()],
            vec![
                ("a".into(), "1".into(), "2".into()),
                ("b".into(), "1".into(), "2".into()),
            ],
        )
        .unwrap();
        assert_eq!(k.path_count(0, 1), 2);
    }
}
