//! Krull-Schmidt decomposition of modules and isomorphism testing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::endo::{EngineError, EngineOutcome, OperatorAlgebra};
use crate::field::Scalar;
use crate::linalg::Matrix;
use crate::rep::{hom_space, RepError, RepMorphism, Representation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("the semisimple quotient of an endomorphism algebra contains a non-split division algebra; retry over a prime field")]
    FieldTooSmall,
    #[error("decomposition search stalled")]
    Stalled,
    #[error("internal radical verification failed")]
    RadicalUnverified,
    #[error(transparent)]
    Rep(#[from] RepError),
}

impl From<EngineError> for DecomposeError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Stalled => DecomposeError::Stalled,
            EngineError::RadicalUnverified => DecomposeError::RadicalUnverified,
            EngineError::NotUnital => DecomposeError::RadicalUnverified,
        }
    }
}

/// One indecomposable summand together with a split pair
/// `project . include = id`.
#[derive(Clone)]
pub struct Summand<K: Scalar> {
    pub rep: Representation<K>,
    pub include: RepMorphism<K>,
    pub project: RepMorphism<K>,
}

/// Decompose into indecomposable summands with embeddings; the entries come
/// in no particular grouping.
pub fn decompose_with_embeddings<K: Scalar>(
    m: &Representation<K>,
    char_p: u64,
    seed: u64,
) -> Result<Vec<Summand<K>>, DecomposeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let root = Summand {
        rep: m.clone(),
        include: RepMorphism::identity(m),
        project: RepMorphism::identity(m),
    };
    decompose_rec(root, char_p, &mut rng, &mut out)?;
    Ok(out)
}

fn decompose_rec<K: Scalar>(
    piece: Summand<K>,
    char_p: u64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Summand<K>>,
) -> Result<(), DecomposeError> {
    if piece.rep.is_zero() {
        return Ok(());
    }
    let endos = hom_space(&piece.rep, &piece.rep)?;
    if endos.len() == 1 {
        out.push(piece);
        return Ok(());
    }
    let ops: Vec<Matrix<K>> = endos.iter().map(block_diag).collect();
    let alg = OperatorAlgebra::new(&ops, char_p)?;
    match alg.split_or_certify(rng, 200) {
        Ok(EngineOutcome::Local) => {
            out.push(piece);
            Ok(())
        }
        Ok(EngineOutcome::Split { operator }) => {
            let endo = from_block_diag(&piece.rep, &operator);
            let (a, b) = split_by(&piece.rep, &endo);
            for part in [a, b] {
                let chained = Summand {
                    rep: part.rep.clone(),
                    include: piece.include.compose(&part.include),
                    project: part.project.compose(&piece.project),
                };
                decompose_rec(chained, char_p, rng, out)?;
            }
            Ok(())
        }
        Err(EngineError::Stalled) if char_p == 0 => Err(DecomposeError::FieldTooSmall),
        Err(e) => Err(e.into()),
    }
}

/// Split M along an endomorphism y with W = ker(y) (+) im(y), both proper.
fn split_by<K: Scalar>(
    m: &Representation<K>,
    y: &RepMorphism<K>,
) -> (Summand<K>, Summand<K>) {
    let ker_bases: Vec<Matrix<K>> = y.blocks().iter().map(|b| b.reduce().kernel_basis).collect();
    let im_bases: Vec<Matrix<K>> = y.blocks().iter().map(|b| b.column_space_basis()).collect();
    let (ker_rep, ker_incl) = m.subrep(&ker_bases);
    let (im_rep, im_incl) = m.subrep(&im_bases);
    // per-vertex inverse of [ker | im] gives the two projections
    let mut ker_proj_blocks = Vec::new();
    let mut im_proj_blocks = Vec::new();
    for v in 0..m.quiver().num_vertices() {
        let combined = ker_bases[v].hstack(&im_bases[v]);
        let inv = combined
            .inverse()
            .expect("Fitting decomposition spans the space");
        let kd = ker_bases[v].cols();
        let total = m.dim_at(v);
        ker_proj_blocks.push(Matrix::from_fn(kd, total, |i, j| inv[(i, j)].clone()));
        im_proj_blocks.push(Matrix::from_fn(total - kd, total, |i, j| {
            inv[(kd + i, j)].clone()
        }));
    }
    let ker_proj = RepMorphism::new(m.clone(), ker_rep.clone(), ker_proj_blocks)
        .expect("projection commutes");
    let im_proj =
        RepMorphism::new(m.clone(), im_rep.clone(), im_proj_blocks).expect("projection commutes");
    (
        Summand {
            rep: ker_rep,
            include: ker_incl,
            project: ker_proj,
        },
        Summand {
            rep: im_rep,
            include: im_incl,
            project: im_proj,
        },
    )
}

fn block_diag<K: Scalar>(f: &RepMorphism<K>) -> Matrix<K> {
    let mut out = Matrix::zeros(0, 0);
    for b in f.blocks() {
        out = out.direct_sum(b);
    }
    out
}

fn from_block_diag<K: Scalar>(m: &Representation<K>, op: &Matrix<K>) -> RepMorphism<K> {
    let mut blocks = Vec::new();
    let mut at = 0usize;
    for v in 0..m.quiver().num_vertices() {
        let d = m.dim_at(v);
        blocks.push(Matrix::from_fn(d, d, |i, j| op[(at + i, at + j)].clone()));
        at += d;
    }
    RepMorphism::new(m.clone(), m.clone(), blocks).expect("engine operators are endomorphisms")
}

/// Decompose into (indecomposable, multiplicity) pairs, grouped up to
/// isomorphism.
pub fn decompose_module<K: Scalar>(
    m: &Representation<K>,
    char_p: u64,
    seed: u64,
) -> Result<Vec<(Representation<K>, usize)>, DecomposeError> {
    let parts = decompose_with_embeddings(m, char_p, seed)?;
    let mut grouped: Vec<(Representation<K>, usize)> = Vec::new();
    for part in parts {
        if let Some(slot) = grouped
            .iter_mut()
            .find(|(rep, _)| iso_indecomposable(rep, &part.rep).is_some())
        {
            slot.1 += 1;
        } else {
            grouped.push((part.rep, 1));
        }
    }
    Ok(grouped)
}

/// Isomorphism between two modules already known (or expected) to be
/// indecomposable. Since End is local, some basis element of Hom is
/// invertible exactly when an iso exists.
pub fn iso_indecomposable<K: Scalar>(
    m: &Representation<K>,
    n: &Representation<K>,
) -> Option<RepMorphism<K>> {
    if m.dims() != n.dims() {
        return None;
    }
    let basis = hom_space(m, n).ok()?;
    for f in &basis {
        if f.is_invertible() {
            return Some(f.clone());
        }
    }
    // fallback for callers that pass decomposables: small combinations
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            for (ci, cj) in [(1i64, 1i64), (1, -1), (2, 1), (1, 2)] {
                let f = basis[i]
                    .scale(&K::from_int(ci))
                    .add(&basis[j].scale(&K::from_int(cj)));
                if f.is_invertible() {
                    return Some(f);
                }
            }
        }
    }
    None
}

/// Isomorphism test with witness: decompose both sides and match summands.
pub fn iso_modules<K: Scalar>(
    m: &Representation<K>,
    n: &Representation<K>,
    char_p: u64,
    seed: u64,
) -> Result<Option<RepMorphism<K>>, DecomposeError> {
    if m.quiver() != n.quiver() {
        return Err(RepError::QuiverMismatch.into());
    }
    if m.dims() != n.dims() {
        return Ok(None);
    }
    if m.is_zero() {
        return Ok(Some(RepMorphism::zero(m.clone(), n.clone())));
    }
    let mp = decompose_with_embeddings(m, char_p, seed)?;
    let mut np = decompose_with_embeddings(n, char_p, seed.wrapping_add(1))?;
    if mp.len() != np.len() {
        return Ok(None);
    }
    let mut witness = RepMorphism::zero(m.clone(), n.clone());
    for part in &mp {
        let mut matched = None;
        for (k, cand) in np.iter().enumerate() {
            if let Some(w) = iso_indecomposable(&part.rep, &cand.rep) {
                matched = Some((k, w));
                break;
            }
        }
        let Some((k, w)) = matched else {
            return Ok(None);
        };
        let cand = np.swap_remove(k);
        witness = witness.add(&cand.include.compose(&w).compose(&part.project));
    }
    if witness.is_invertible() {
        Ok(Some(witness))
    } else {
        Ok(None)
    }
}

/// Multiset-of-summands as dimension vectors, for quick reporting.
pub fn summand_dims<K: Scalar>(
    parts: &[(Representation<K>, usize)],
) -> Vec<(Vec<usize>, usize)> {
    parts
        .iter()
        .map(|(r, m)| (r.dims().to_vec(), *m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp64, Rational};
    use crate::quiver::Quiver;
    use crate::rep::StandardKind;
    use rand::Rng;

    type R = Rational;

    #[test]
    fn regular_module_a2_decomposes_into_projectives() {
        let q = Quiver::linear(2);
        let b = Representation::<R>::regular(&q);
        let parts = decompose_module(&b, 0, 1).unwrap();
        assert_eq!(parts.len(), 2);
        let mut dims: Vec<Vec<usize>> = parts.iter().map(|(r, _)| r.dims().to_vec()).collect();
        dims.sort();
        assert_eq!(dims, vec![vec![0, 1], vec![1, 1]]);
        // P_1 over A2 is also the injective I_2
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let i2 = Representation::<R>::standard(&q, 1, StandardKind::Injective);
        assert!(iso_indecomposable(&p1, &i2).is_some());
    }

    #[test]
    fn simple_is_indecomposable() {
        let q = Quiver::linear(3);
        let s2 = Representation::<R>::standard(&q, 1, StandardKind::Simple);
        let parts = decompose_module(&s2, 0, 2).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 1);
    }

    #[test]
    fn doubled_projective_has_multiplicity_two() {
        let q = Quiver::linear(3);
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let m = p1.direct_sum(&p1);
        let parts = decompose_module(&m, 0, 3).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 2);
        assert!(iso_indecomposable(&parts[0].0, &p1).is_some());
    }

    #[test]
    fn iso_i3_p1_on_a3() {
        let q = Quiver::linear(3);
        let p1 = Representation::<R>::standard(&q, 0, StandardKind::Projective);
        let i3 = Representation::<R>::standard(&q, 2, StandardKind::Injective);
        let w = iso_modules(&i3, &p1, 0, 4).unwrap().unwrap();
        assert!(w.is_invertible());
        let s1 = Representation::<R>::standard(&q, 0, StandardKind::Simple);
        let s2 = Representation::<R>::standard(&q, 1, StandardKind::Simple);
        assert!(iso_modules(&s1, &s2, 0, 5).unwrap().is_none());
    }

    #[test]
    fn iso_after_basis_conjugation() {
        let q = Quiver::linear(3);
        let m = Representation::<R>::coregular(&q);
        let conj = random_conjugate(&m, 99);
        let w = iso_modules(&m, &conj, 0, 6).unwrap().unwrap();
        assert!(w.is_invertible());
    }

    #[test]
    fn krull_schmidt_shuffle_determinism() {
        let q = Quiver::linear(3);
        let m = Representation::<R>::regular(&q)
            .direct_sum(&Representation::<R>::standard(&q, 1, StandardKind::Simple));
        let c1 = random_conjugate(&m, 7);
        let c2 = random_conjugate(&m, 8);
        let p1 = decompose_module(&c1, 0, 9).unwrap();
        let p2 = decompose_module(&c2, 0, 10).unwrap();
        let key = |parts: &[(Representation<R>, usize)]| {
            let mut v: Vec<(Vec<usize>, usize)> = summand_dims(parts);
            v.sort();
            v
        };
        assert_eq!(key(&p1), key(&p2));
    }

    #[test]
    fn decompose_over_prime_fields() {
        for p in [2u64, 3, 5] {
            let q = Quiver::linear(2);
            let unit = Fp64::new(1, p);
            let b = Representation::<Fp64>::regular(&q);
            // size the matrices
            let maps = q
                .arrows()
                .iter()
                .enumerate()
                .map(|(ai, _)| b.map(ai).scale(&unit))
                .collect();
            let b = Representation::new(q.clone(), b.dims().to_vec(), maps).unwrap();
            let parts = decompose_module(&b, p, 11).unwrap();
            assert_eq!(parts.len(), 2, "p={p}");
        }
    }

    /// change of basis by random invertible block matrices
    pub(crate) fn random_conjugate(
        m: &Representation<R>,
        seed: u64,
    ) -> Representation<R> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = m.quiver().clone();
        let gs: Vec<Matrix<R>> = m
            .dims()
            .iter()
            .map(|&d| {
                // unit lower times unit upper keeps it invertible
                let lower = Matrix::from_fn(d, d, |i, j| {
                    if i == j {
                        R::from_int(1)
                    } else if i > j {
                        R::from_int(rng.gen_range(-2..=2))
                    } else {
                        R::from_int(0)
                    }
                });
                let upper = Matrix::from_fn(d, d, |i, j| {
                    if i == j {
                        R::from_int(1)
                    } else if i < j {
                        R::from_int(rng.gen_range(-2..=2))
                    } else {
                        R::from_int(0)
                    }
                });
                lower.matmul(&upper)
            })
            .collect();
        let maps = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                gs[a.to]
                    .matmul(m.map(ai))
                    .matmul(&gs[a.from].inverse().unwrap())
            })
            .collect();
        Representation::new(q, m.dims().to_vec(), maps).unwrap()
    }
}
