//! Finite-dimensional representations of acyclic quivers: standard modules,
//! Hom spaces, duality, the Nakayama correspondence on projectives, and
//! sub/quotient extraction.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::Scalar;
use crate::linalg::{Matrix, SpanSolver};
use crate::quiver::{Path, Quiver};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("representations live over different quivers")]
    QuiverMismatch,
    #[error("map for arrow {arrow:?} has shape {got}, expected {expected}")]
    BadMapShape {
        arrow: String,
        got: String,
        expected: String,
    },
    #[error("morphism blocks do not commute with the arrow maps")]
    NotCommuting,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("module is not projective")]
    NotProjective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Projective,
    Injective,
    Simple,
}

/// A representation: one space per vertex, one matrix per arrow
/// (shape dim(target) x dim(source)).
#[derive(Clone, PartialEq)]
pub struct Representation<K: Scalar> {
    quiver: Arc<Quiver>,
    dims: Vec<usize>,
    maps: Vec<Matrix<K>>,
}

impl<K: Scalar> fmt::Debug for Representation<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rep{:?}", self.dims)
    }
}

impl<K: Scalar> Representation<K> {
    pub fn new(
        quiver: Arc<Quiver>,
        dims: Vec<usize>,
        maps: Vec<Matrix<K>>,
    ) -> Result<Self, RepError> {
        assert_eq!(dims.len(), quiver.num_vertices());
        assert_eq!(maps.len(), quiver.arrows().len());
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            if m.rows() != dims[a.to] || m.cols() != dims[a.from] {
                return Err(RepError::BadMapShape {
                    arrow: a.name.clone(),
                    got: format!("{}x{}", m.rows(), m.cols()),
                    expected: format!("{}x{}", dims[a.to], dims[a.from]),
                });
            }
        }
        Ok(Representation { quiver, dims, maps })
    }

    pub fn zero(quiver: Arc<Quiver>) -> Self {
        let dims = vec![0; quiver.num_vertices()];
        let maps = quiver
            .arrows()
            .iter()
            .map(|_| Matrix::zeros(0, 0))
            .collect();
        Representation { quiver, dims, maps }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_at(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn map(&self, arrow: usize) -> &Matrix<K> {
        &self.maps[arrow]
    }

    /// Offset of vertex `v` in the concatenated total space.
    pub fn vertex_offset(&self, v: usize) -> usize {
        self.dims[..v].iter().sum()
    }

    /// Apply the composite of arrow maps along `path`.
    pub fn path_map(&self, path: &Path) -> Matrix<K> {
        let mut m = Matrix::identity(self.dims[path.from]);
        for &ai in &path.arrows {
            m = self.maps[ai].matmul(&m);
        }
        m
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.quiver, &other.quiver) || self.quiver == other.quiver);
        let dims = self
            .dims
            .iter()
            .zip(&other.dims)
            .map(|(a, b)| a + b)
            .collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        Representation {
            quiver: self.quiver.clone(),
            dims,
            maps,
        }
    }

    pub fn sum_all(quiver: &Arc<Quiver>, parts: &[Representation<K>]) -> Self {
        let mut acc = Representation::zero(quiver.clone());
        for p in parts {
            acc = acc.direct_sum(p);
        }
        acc
    }

    /// Standard module at a vertex under the path-basis convention:
    /// P_v has basis at w the paths v -> w, I_v the duals of paths w -> v,
    /// S_v is one-dimensional at v. On the linear quiver 1->2->3 this makes
    /// I_3 = P_1.
    pub fn standard(quiver: &Arc<Quiver>, v: usize, kind: StandardKind) -> Self {
        assert!(v < quiver.num_vertices());
        match kind {
            StandardKind::Simple => {
                let mut dims = vec![0; quiver.num_vertices()];
                dims[v] = 1;
                let maps = quiver
                    .arrows()
                    .iter()
                    .map(|a| Matrix::zeros(dims[a.to], dims[a.from]))
                    .collect();
                Representation {
                    quiver: quiver.clone(),
                    dims,
                    maps,
                }
            }
            StandardKind::Projective => {
                let bases: Vec<Vec<Path>> = (0..quiver.num_vertices())
                    .map(|w| quiver.paths(v, w))
                    .collect();
                let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
                let maps = quiver
                    .arrows()
                    .iter()
                    .enumerate()
                    .map(|(ai, a)| {
                        // basis path p: v -> from  maps to  (arrow . p): v -> to
                        Matrix::from_fn(dims[a.to], dims[a.from], |i, j| {
                            let mut ext = bases[a.from][j].clone();
                            ext.arrows.push(ai);
                            ext.to = a.to;
                            if bases[a.to][i] == ext {
                                K::one()
                            } else {
                                K::zero()
                            }
                        })
                    })
                    .collect();
                Representation {
                    quiver: quiver.clone(),
                    dims,
                    maps,
                }
            }
            StandardKind::Injective => {
                let bases: Vec<Vec<Path>> = (0..quiver.num_vertices())
                    .map(|w| quiver.paths(w, v))
                    .collect();
                let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
                let maps = quiver
                    .arrows()
                    .iter()
                    .enumerate()
                    .map(|(ai, a)| {
                        // dual of precomposition: paths(to -> v) -> paths(from -> v)
                        Matrix::from_fn(dims[a.to], dims[a.from], |i, j| {
                            let mut ext = Path::trivial(a.from);
                            ext.arrows.push(ai);
                            ext.to = a.to;
                            let composed = ext.then(&bases[a.to][i]);
                            if bases[a.from][j] == composed {
                                K::one()
                            } else {
                                K::zero()
                            }
                        })
                    })
                    .collect();
                Representation {
                    quiver: quiver.clone(),
                    dims,
                    maps,
                }
            }
        }
    }

    /// The regular module A = direct sum of all P_v.
    pub fn regular(quiver: &Arc<Quiver>) -> Self {
        let parts: Vec<_> = (0..quiver.num_vertices())
            .map(|v| Representation::standard(quiver, v, StandardKind::Projective))
            .collect();
        Representation::sum_all(quiver, &parts)
    }

    /// The dual D(A) = direct sum of all I_v.
    pub fn coregular(quiver: &Arc<Quiver>) -> Self {
        let parts: Vec<_> = (0..quiver.num_vertices())
            .map(|v| Representation::standard(quiver, v, StandardKind::Injective))
            .collect();
        Representation::sum_all(quiver, &parts)
    }

    /// Dual representation over the opposite quiver (maps transposed).
    pub fn dualize(&self, opposite: &Arc<Quiver>) -> Self {
        debug_assert_eq!(opposite.num_vertices(), self.quiver.num_vertices());
        let maps = opposite
            .arrows()
            .iter()
            .map(|a_op| {
                // the opposite quiver keeps arrow names
                let ai = self
                    .quiver
                    .arrows()
                    .iter()
                    .position(|a| a.name == a_op.name)
                    .expect("arrow names match in opposite quiver");
                self.maps[ai].transpose()
            })
            .collect();
        Representation {
            quiver: opposite.clone(),
            dims: self.dims.clone(),
            maps,
        }
    }

    /// Dimension vector of the radical: spans of all incoming arrow images.
    pub fn radical_subspace(&self) -> Vec<Matrix<K>> {
        (0..self.quiver.num_vertices())
            .map(|w| {
                let mut gens: Option<Matrix<K>> = None;
                for (ai, _) in self.quiver.arrows_into(w) {
                    let img = &self.maps[ai];
                    gens = Some(match gens {
                        None => img.clone(),
                        Some(g) => g.hstack(img),
                    });
                }
                match gens {
                    None => Matrix::zeros(self.dims[w], 0),
                    Some(g) => g.column_space_basis(),
                }
            })
            .collect()
    }

    /// Extract the subrepresentation spanned by the given per-vertex bases.
    /// Panics if the spans are not arrow-stable.
    pub fn subrep(&self, bases: &[Matrix<K>]) -> (Representation<K>, RepMorphism<K>) {
        let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
        let maps: Vec<Matrix<K>> = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                let image = self.maps[ai].matmul(&bases[a.from]);
                bases[a.to]
                    .solve_matrix(&image)
                    .expect("shape")
                    .expect("subspace not arrow-stable")
            })
            .collect();
        let sub = Representation {
            quiver: self.quiver.clone(),
            dims,
            maps,
        };
        let incl = RepMorphism {
            source: Box::new(sub.clone()),
            target: Box::new(self.clone()),
            blocks: bases.to_vec(),
        };
        debug_assert!(incl.commutes());
        (sub, incl)
    }

    /// Quotient by the subspace spanned by the per-vertex bases.
    pub fn quotient(&self, bases: &[Matrix<K>]) -> (Representation<K>, RepMorphism<K>) {
        // choose complements: extend basis columns to a full basis, quotient
        // coordinates are the non-pivot complement
        let mut proj_blocks = Vec::new();
        let mut dims = Vec::new();
        for (v, b) in bases.iter().enumerate() {
            let n = self.dims[v];
            let full = b.hstack(&Matrix::identity(n));
            let red = full.reduce();
            // pivot columns beyond b's columns give the complement
            let comp: Vec<usize> = red
                .pivot_cols
                .iter()
                .copied()
                .filter(|&c| c >= b.cols())
                .map(|c| c - b.cols())
                .collect();
            dims.push(comp.len());
            // projection: coordinates in (b | complement) basis, keep complement part
            let basis_matrix = b.hstack(&Matrix::identity(n).select_cols(&comp));
            let inv = basis_matrix.inverse().expect("full basis");
            // last rows of inv give complement coordinates
            let proj = Matrix::from_fn(comp.len(), n, |i, j| inv[(b.cols() + i, j)].clone());
            proj_blocks.push(proj);
        }
        let maps: Vec<Matrix<K>> = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                // induced map: proj_to . M_a . section_from
                // solve proj_from * X = id to get a section, then compose
                let pf = &proj_blocks[a.from];
                let section = pf
                    .transpose()
                    .matmul(&pf.matmul(&pf.transpose()).inverse().unwrap_or_else(|_| {
                        Matrix::identity(pf.rows())
                    }));
                // safer: solve pf * s = id columnwise
                let section = pf
                    .solve_matrix(&Matrix::identity(pf.rows()))
                    .expect("shape")
                    .unwrap_or(section);
                proj_blocks[a.to]
                    .matmul(&self.maps[ai])
                    .matmul(&section)
            })
            .collect();
        let quot = Representation {
            quiver: self.quiver.clone(),
            dims,
            maps,
        };
        let proj = RepMorphism {
            source: Box::new(self.clone()),
            target: Box::new(quot.clone()),
            blocks: proj_blocks,
        };
        debug_assert!(proj.commutes());
        (quot, proj)
    }
}

/// A morphism of representations: one block per vertex, commuting with all
/// arrow maps.
#[derive(Clone, PartialEq)]
pub struct RepMorphism<K: Scalar> {
    source: Box<Representation<K>>,
    target: Box<Representation<K>>,
    blocks: Vec<Matrix<K>>,
}

impl<K: Scalar> fmt::Debug for RepMorphism<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepMorphism{:?}->{:?}", self.source.dims, self.target.dims)
    }
}

impl<K: Scalar> RepMorphism<K> {
    pub fn new(
        source: Representation<K>,
        target: Representation<K>,
        blocks: Vec<Matrix<K>>,
    ) -> Result<Self, RepError> {
        if source.quiver != target.quiver {
            return Err(RepError::QuiverMismatch);
        }
        let m = RepMorphism {
            source: Box::new(source),
            target: Box::new(target),
            blocks,
        };
        if !m.commutes() {
            return Err(RepError::NotCommuting);
        }
        Ok(m)
    }

    /// Construct without the commuting check; for transports whose
    /// correctness follows from functoriality, verified in debug builds.
    pub fn new_unchecked(
        source: Representation<K>,
        target: Representation<K>,
        blocks: Vec<Matrix<K>>,
    ) -> Self {
        let m = RepMorphism {
            source: Box::new(source),
            target: Box::new(target),
            blocks,
        };
        debug_assert!(m.commutes(), "unchecked morphism does not commute");
        m
    }

    pub fn zero(source: Representation<K>, target: Representation<K>) -> Self {
        let blocks = (0..source.quiver.num_vertices())
            .map(|v| Matrix::zeros(target.dims[v], source.dims[v]))
            .collect();
        RepMorphism {
            source: Box::new(source),
            target: Box::new(target),
            blocks,
        }
    }

    pub fn identity(rep: &Representation<K>) -> Self {
        let blocks = rep.dims.iter().map(|&d| Matrix::identity(d)).collect();
        RepMorphism {
            source: Box::new(rep.clone()),
            target: Box::new(rep.clone()),
            blocks,
        }
    }

    pub fn source(&self) -> &Representation<K> {
        &self.source
    }

    pub fn target(&self) -> &Representation<K> {
        &self.target
    }

    pub fn block(&self, v: usize) -> &Matrix<K> {
        &self.blocks[v]
    }

    pub fn blocks(&self) -> &[Matrix<K>] {
        &self.blocks
    }

    pub fn commutes(&self) -> bool {
        self.source
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .all(|(ai, a)| {
                let lhs = self.target.maps[ai].matmul(&self.blocks[a.from]);
                let rhs = self.blocks[a.to].matmul(&self.source.maps[ai]);
                lhs == rhs
            })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks.iter().all(|b| b.is_invertible())
    }

    pub fn inverse(&self) -> Option<RepMorphism<K>> {
        let mut blocks = Vec::new();
        for b in &self.blocks {
            blocks.push(b.inverse().ok()?);
        }
        Some(RepMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            blocks,
        })
    }

    /// `self . g` (apply g first).
    pub fn compose(&self, g: &RepMorphism<K>) -> RepMorphism<K> {
        debug_assert_eq!(g.target.dims, self.source.dims);
        let blocks = self
            .blocks
            .iter()
            .zip(&g.blocks)
            .map(|(f, g)| f.matmul(g))
            .collect();
        RepMorphism {
            source: g.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    pub fn add(&self, other: &RepMorphism<K>) -> RepMorphism<K> {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    pub fn sub(&self, other: &RepMorphism<K>) -> RepMorphism<K> {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    pub fn neg(&self) -> RepMorphism<K> {
        let blocks = self.blocks.iter().map(|b| -b).collect();
        RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    pub fn scale(&self, c: &K) -> RepMorphism<K> {
        let blocks = self.blocks.iter().map(|b| b.scale(c)).collect();
        RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    /// Direct sum of morphisms.
    pub fn direct_sum(&self, other: &RepMorphism<K>) -> RepMorphism<K> {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        RepMorphism {
            source: Box::new(self.source.direct_sum(&other.source)),
            target: Box::new(self.target.direct_sum(&other.target)),
            blocks,
        }
    }

    /// Kernel as a subrepresentation with its inclusion.
    pub fn kernel(&self) -> (Representation<K>, RepMorphism<K>) {
        let bases: Vec<Matrix<K>> = self.blocks.iter().map(|b| b.reduce().kernel_basis).collect();
        self.source.subrep(&bases)
    }

    /// Image as a subrepresentation of the target with its inclusion.
    pub fn image(&self) -> (Representation<K>, RepMorphism<K>) {
        let bases: Vec<Matrix<K>> = self.blocks.iter().map(|b| b.column_space_basis()).collect();
        self.target.subrep(&bases)
    }

    /// Flatten to coordinates in the concatenated Hom space, for span work.
    pub fn flatten(&self) -> Vec<K> {
        self.blocks.iter().flat_map(|b| b.vectorize()).collect()
    }
}

/// Builds morphisms from flattened coordinates.
pub struct HomShape<K: Scalar> {
    source: Representation<K>,
    target: Representation<K>,
    sizes: Vec<(usize, usize)>,
}

impl<K: Scalar> HomShape<K> {
    pub fn new(source: &Representation<K>, target: &Representation<K>) -> Self {
        let sizes = (0..source.quiver().num_vertices())
            .map(|v| (target.dims[v], source.dims[v]))
            .collect();
        HomShape {
            source: source.clone(),
            target: target.clone(),
            sizes,
        }
    }

    pub fn total_len(&self) -> usize {
        self.sizes.iter().map(|(r, c)| r * c).sum()
    }

    pub fn unflatten(&self, coords: &[K]) -> RepMorphism<K> {
        let mut blocks = Vec::new();
        let mut at = 0;
        for &(r, c) in &self.sizes {
            let m = Matrix::from_fn(r, c, |i, j| coords[at + i * c + j].clone());
            at += r * c;
            blocks.push(m);
        }
        RepMorphism {
            source: Box::new(self.source.clone()),
            target: Box::new(self.target.clone()),
            blocks,
        }
    }
}

/// Basis of Hom(M, N), solved from the commuting-square linear system.
pub fn hom_space<K: Scalar>(
    m: &Representation<K>,
    n: &Representation<K>,
) -> Result<Vec<RepMorphism<K>>, RepError> {
    if m.quiver() != n.quiver() {
        return Err(RepError::QuiverMismatch);
    }
    let q = m.quiver().clone();
    let shape = HomShape::new(m, n);
    let unknowns = shape.total_len();
    // block offset per vertex
    let mut offset = vec![0usize; q.num_vertices() + 1];
    for v in 0..q.num_vertices() {
        offset[v + 1] = offset[v] + n.dim_at(v) * m.dim_at(v);
    }
    let mut rows: Vec<Vec<K>> = Vec::new();
    for (ai, a) in q.arrows().iter().enumerate() {
        let na = n.map(ai);
        let ma = m.map(ai);
        // constraint: N_a * F_from - F_to * M_a = 0, entrywise (r, c)
        for r in 0..n.dim_at(a.to) {
            for c in 0..m.dim_at(a.from) {
                let mut row = vec![K::zero(); unknowns];
                // sum_s N_a[r,s] * F_from[s,c]
                for s in 0..n.dim_at(a.from) {
                    let coeff = na[(r, s)].clone();
                    if !coeff.is_zero() {
                        let idx = offset[a.from] + s * m.dim_at(a.from) + c;
                        row[idx] = row[idx].clone() + coeff;
                    }
                }
                // - sum_t F_to[r,t] * M_a[t,c]
                for t in 0..m.dim_at(a.to) {
                    let coeff = ma[(t, c)].clone();
                    if !coeff.is_zero() {
                        let idx = offset[a.to] + r * m.dim_at(a.to) + t;
                        row[idx] = row[idx].clone() - coeff;
                    }
                }
                rows.push(row);
            }
        }
    }
    let system = if rows.is_empty() {
        Matrix::zeros(0, unknowns)
    } else {
        Matrix::from_rows(rows)
    };
    let kernel = system.reduce().kernel_basis;
    let basis = (0..kernel.cols())
        .map(|j| shape.unflatten(&kernel.col_vec(j)))
        .collect::<Vec<_>>();
    debug_assert!(basis.iter().all(|f| f.commutes()));
    Ok(basis)
}

pub fn hom_dim<K: Scalar>(m: &Representation<K>, n: &Representation<K>) -> usize {
    hom_space(m, n).map(|b| b.len()).unwrap_or(0)
}

/// Morphism P_i -> P_j induced by a path p: j -> i (precomposition).
pub fn projective_path_morphism<K: Scalar>(
    quiver: &Arc<Quiver>,
    p: &Path,
) -> RepMorphism<K> {
    let (j, i) = (p.from, p.to);
    let pi = Representation::standard(quiver, i, StandardKind::Projective);
    let pj = Representation::standard(quiver, j, StandardKind::Projective);
    let blocks = (0..quiver.num_vertices())
        .map(|w| {
            let from_basis = quiver.paths(i, w);
            let to_basis = quiver.paths(j, w);
            Matrix::from_fn(to_basis.len(), from_basis.len(), |r, c| {
                if to_basis[r] == p.then(&from_basis[c]) {
                    K::one()
                } else {
                    K::zero()
                }
            })
        })
        .collect();
    RepMorphism {
        source: Box::new(pi),
        target: Box::new(pj),
        blocks,
    }
}

/// Morphism I_i -> I_j induced by a path p: j -> i (dual of postcomposition).
pub fn injective_path_morphism<K: Scalar>(
    quiver: &Arc<Quiver>,
    p: &Path,
) -> RepMorphism<K> {
    let (j, i) = (p.from, p.to);
    let ii = Representation::standard(quiver, i, StandardKind::Injective);
    let ij = Representation::standard(quiver, j, StandardKind::Injective);
    let blocks = (0..quiver.num_vertices())
        .map(|w| {
            let src_basis = quiver.paths(w, i); // basis indices of (I_i)_w
            let tgt_basis = quiver.paths(w, j); // basis indices of (I_j)_w
            // dual of q |-> p . q : paths(w->j) -> paths(w->i)
            Matrix::from_fn(tgt_basis.len(), src_basis.len(), |r, c| {
                if src_basis[c] == tgt_basis[r].then(p) {
                    K::one()
                } else {
                    K::zero()
                }
            })
        })
        .collect();
    RepMorphism {
        source: Box::new(ii),
        target: Box::new(ij),
        blocks,
    }
}

/// Data of a module expressed as an explicit direct sum of standard
/// projectives, with the embedding coordinates.
pub struct ProjectivePresentation<K: Scalar> {
    /// vertices of the summands P_{v_k}
    pub summand_vertices: Vec<usize>,
    /// iso from the abstract sum of those projectives to the module
    pub iso: RepMorphism<K>,
}

/// The Nakayama correspondence on add(A): sends each projective summand P_v
/// to I_v and transports morphisms along the common path basis
/// Hom(P_i, P_j) = span(paths j -> i) = Hom(I_i, I_j).
pub struct Nakayama {
    quiver: Arc<Quiver>,
}

impl Nakayama {
    pub fn new(quiver: Arc<Quiver>) -> Self {
        Nakayama { quiver }
    }

    pub fn image_of_vertex<K: Scalar>(&self, v: usize) -> Representation<K> {
        Representation::standard(&self.quiver, v, StandardKind::Injective)
    }

    /// Transport f: (+) P_{a_k} -> (+) P_{b_l} to nu(f): (+) I_{a_k} -> (+) I_{b_l}.
    /// `src`/`tgt` name the projective summand vertices of source and target.
    pub fn transport<K: Scalar>(
        &self,
        src: &[usize],
        tgt: &[usize],
        f: &RepMorphism<K>,
    ) -> RepMorphism<K> {
        let q = &self.quiver;
        // source/target offsets per summand at each vertex
        let src_reps: Vec<Representation<K>> = src
            .iter()
            .map(|&v| Representation::standard(q, v, StandardKind::Projective))
            .collect();
        let tgt_reps: Vec<Representation<K>> = tgt
            .iter()
            .map(|&v| Representation::standard(q, v, StandardKind::Projective))
            .collect();
        debug_assert_eq!(
            Representation::sum_all(q, &src_reps).dims(),
            f.source().dims()
        );
        debug_assert_eq!(
            Representation::sum_all(q, &tgt_reps).dims(),
            f.target().dims()
        );
        // component (l, k): read coefficients from the generator image
        let mut nu_components: Vec<Vec<RepMorphism<K>>> = Vec::new();
        for (l, &bv) in tgt.iter().enumerate() {
            let mut row = Vec::new();
            for (k, &av) in src.iter().enumerate() {
                // generator of P_av sits at vertex av, summand-k offset,
                // basis position of the trivial path
                let gen_vertex = av;
                let src_offset: usize = src_reps[..k]
                    .iter()
                    .map(|r| r.dim_at(gen_vertex))
                    .sum();
                let triv_pos = q
                    .paths(av, av)
                    .iter()
                    .position(|p| p.is_trivial())
                    .expect("trivial path present");
                // image of the generator in the target block at vertex av
                let block = f.block(gen_vertex);
                let tgt_offset: usize = tgt_reps[..l]
                    .iter()
                    .map(|r| r.dim_at(gen_vertex))
                    .sum();
                let paths_bv_av = q.paths(bv, av); // basis of (P_bv)_av
                let mut comp: Option<RepMorphism<K>> = None;
                for (pi, path) in paths_bv_av.iter().enumerate() {
                    let coeff = block[(tgt_offset + pi, src_offset + triv_pos)].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    let base: RepMorphism<K> = injective_path_morphism(q, path);
                    let term = base.scale(&coeff);
                    comp = Some(match comp {
                        None => term,
                        Some(acc) => acc.add(&term),
                    });
                }
                let comp = comp.unwrap_or_else(|| {
                    RepMorphism::zero(
                        Representation::standard(q, av, StandardKind::Injective),
                        Representation::standard(q, bv, StandardKind::Injective),
                    )
                });
                row.push(comp);
            }
            nu_components.push(row);
        }
        assemble_block_morphism(q, src.len(), tgt.len(), |l, k| nu_components[l][k].clone())
    }
}

/// Assemble a morphism between direct sums from its components.
pub fn assemble_block_morphism<K: Scalar>(
    quiver: &Arc<Quiver>,
    src_count: usize,
    tgt_count: usize,
    component: impl Fn(usize, usize) -> RepMorphism<K>,
) -> RepMorphism<K> {
    assert!(src_count > 0 && tgt_count > 0);
    let comps: Vec<Vec<RepMorphism<K>>> = (0..tgt_count)
        .map(|l| (0..src_count).map(|k| component(l, k)).collect())
        .collect();
    let src_parts: Vec<Representation<K>> =
        (0..src_count).map(|k| comps[0][k].source().clone()).collect();
    let tgt_parts: Vec<Representation<K>> =
        (0..tgt_count).map(|l| comps[l][0].target().clone()).collect();
    let source = Representation::sum_all(quiver, &src_parts);
    let target = Representation::sum_all(quiver, &tgt_parts);
    let blocks = (0..quiver.num_vertices())
        .map(|v| {
            let mut rows_of_blocks: Vec<Matrix<K>> = Vec::new();
            for l in 0..tgt_count {
                let mut row: Option<Matrix<K>> = None;
                for k in 0..src_count {
                    let b = comps[l][k].block(v).clone();
                    row = Some(match row {
                        None => b,
                        Some(r) => r.hstack(&b),
                    });
                }
                rows_of_blocks.push(row.unwrap());
            }
            let mut out: Option<Matrix<K>> = None;
            for r in rows_of_blocks {
                out = Some(match out {
                    None => r,
                    Some(o) => o.vstack(&r),
                });
            }
            out.unwrap()
        })
        .collect();
    let m = RepMorphism {
        source: Box::new(source),
        target: Box::new(target),
        blocks,
    };
    debug_assert!(m.commutes());
    m
}

/// Express every morphism of `fs` in the span of `basis`, as coordinate rows.
pub fn morphisms_in_basis<K: Scalar>(
    basis: &[RepMorphism<K>],
    fs: &[RepMorphism<K>],
) -> Option<Vec<Vec<K>>> {
    if basis.is_empty() {
        return fs.iter().all(|f| f.is_zero()).then(|| vec![Vec::new(); fs.len()]);
    }
    let cols: Vec<Vec<K>> = basis.iter().map(|b| b.flatten()).collect();
    let len = cols[0].len();
    let gens = Matrix::from_fn(len, cols.len(), |i, j| cols[j][i].clone());
    let solver = SpanSolver::new(gens);
    fs.iter().map(|f| solver.express(&f.flatten())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    type R = Rational;

    fn a3() -> Arc<Quiver> {
        Quiver::linear(3)
    }

    #[test]
    fn standard_dims_match_path_counts() {
        let q = a3();
        for v in 0..3 {
            let p = Representation::<R>::standard(&q, v, StandardKind::Projective);
            for w in 0..3 {
                assert_eq!(p.dim_at(w), q.path_count(v, w));
            }
            let i = Representation::<R>::standard(&q, v, StandardKind::Injective);
            for w in 0..3 {
                assert_eq!(i.dim_at(w), q.path_count(w, v));
            }
        }
        let s = Representation::<R>::standard(&q, 1, StandardKind::Simple);
        assert_eq!(s.dims(), &[0, 1, 0]);
    }

    #[test]
    fn p1_dims_and_i3_p1_coincide_dimensionwise() {
        let q = a3();
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        assert_eq!(p1.dims(), &[1, 1, 1]);
        let i3 = Representation::<R>::standard(&q, 2, StandardKind::Injective);
        assert_eq!(i3.dims(), &[1, 1, 1]);
        // both maps are nonzero 1x1, hence the identity block morphism works
        assert_eq!(hom_dim(&i3, &p1), 1);
    }

    #[test]
    fn hom_dims_standard() {
        let q = a3();
        let s1 = Representation::<R>::standard(&q, 0, StandardKind::Simple);
        let s3 = Representation::<R>::standard(&q, 2, StandardKind::Simple);
        assert_eq!(hom_dim(&s1, &s3), 0);
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let i1 = Representation::<R>::standard(&q, 0, StandardKind::Injective);
        assert_eq!(hom_dim(&p1, &i1), 1);
        // dim Hom(P_v, M) = dim M_v and dim Hom(M, I_v) = dim M_v
        let m = Representation::<R>::coregular(&q);
        for v in 0..3 {
            let pv = Representation::<R>::standard(&q, v, StandardKind::Projective);
            let iv = Representation::<R>::standard(&q, v, StandardKind::Injective);
            assert_eq!(hom_dim(&pv, &m), m.dim_at(v));
            assert_eq!(hom_dim(&m, &iv), m.dim_at(v));
        }
    }

    #[test]
    fn dualize_involution_and_duality() {
        let q = a3();
        let op = q.opposite();
        let p2 = Representation::<R>::standard(&q, 1, StandardKind::Projective);
        let d = p2.dualize(&op);
        let dd = d.dualize(&q);
        assert_eq!(dd, p2);
        // dualize(P_v) should be I_v over the opposite quiver: same dims
        let i2_op = Representation::<R>::standard(&op, 1, StandardKind::Injective);
        assert_eq!(d.dims(), i2_op.dims());
        assert_eq!(hom_dim(&d, &i2_op), 1);
    }

    #[test]
    fn path_morphisms_commute() {
        let q = a3();
        for u in 0..3 {
            for v in 0..3 {
                for p in q.paths(u, v) {
                    let pm: RepMorphism<R> = projective_path_morphism(&q, &p);
                    assert!(pm.commutes());
                    let im: RepMorphism<R> = injective_path_morphism(&q, &p);
                    assert!(im.commutes());
                }
            }
        }
        // Hom(P_i, P_j) dimension equals number of paths j -> i
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let p3 = Representation::<R>::standard(&q, 2, StandardKind::Projective);
        assert_eq!(hom_dim(&p3, &p1), q.path_count(0, 2));
        assert_eq!(hom_dim(&p1, &p3), q.path_count(2, 0));
    }

    #[test]
    fn kernel_image_quotient() {
        let q = a3();
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let s1 = Representation::<R>::standard(&q, 0, StandardKind::Simple);
        // the projection P_1 -> S_1
        let basis = hom_space(&p1, &s1).unwrap();
        assert_eq!(basis.len(), 1);
        let f = &basis[0];
        let (ker, incl) = f.kernel();
        assert_eq!(ker.dims(), &[0, 1, 1]);
        assert!(incl.commutes());
        let (img, _) = f.image();
        assert_eq!(img.dims(), s1.dims());
        let (quot, proj) = p1.quotient(incl.blocks());
        assert_eq!(quot.dims(), &[1, 0, 0]);
        assert!(proj.commutes());
    }

    #[test]
    fn radical_and_top() {
        let q = a3();
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let rad = p1.radical_subspace();
        let dims: Vec<usize> = rad.iter().map(|b| b.cols()).collect();
        assert_eq!(dims, vec![0, 1, 1]);
    }
}
