//! Splitting engine for algebras of operators.
//!
//! Input: a basis of a unital algebra E of linear operators on a space W
//! (endomorphisms of a module, or chain endomorphisms of a complex, given as
//! block matrices). Output: either an operator that splits W into two proper
//! E-stable summands, or a certificate that E is local (W indecomposable).
//!
//! Radical: trace form of the left regular representation in characteristic
//! zero; the iterated trace-kernel chain with characteristic-polynomial
//! coefficients c_{p^i} over prime fields. Idempotents found in the
//! semisimple quotient are lifted along e -> 3e^2 - 2e^3.


use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::Scalar;
use crate::linalg::{Matrix, SpanSolver};
use crate::poly::{factor_squarefree_fp, try_split_squarefree_rational, Poly, SplitOutcome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("operator algebra does not contain the identity")]
    NotUnital,
    #[error("radical verification failed")]
    RadicalUnverified,
    #[error("splitting search stalled before certification")]
    Stalled,
}

#[derive(Debug)]
pub enum EngineOutcome<K: Scalar> {
    /// `operator` is E-central enough to split: W = ker(op) (+) im(op), both
    /// proper, both E-stable (op is a power of an element of E, or an
    /// idempotent of E).
    Split { operator: Matrix<K> },
    /// E is local; W is indecomposable over E.
    Local,
}

/// Characteristic polynomial by the division-free Samuelson-Berkowitz
/// algorithm; coefficients in descending degree, leading coefficient 1.
pub fn charpoly<K: Scalar>(a: &Matrix<K>) -> Vec<K> {
    let n = a.rows();
    assert!(a.is_square());
    if n == 0 {
        return vec![K::one()];
    }
    // p_M for the trailing principal submatrices, built up from 1x1
    let sub = |m: &Matrix<K>, k: usize| -> Matrix<K> {
        Matrix::from_fn(n - k, n - k, |i, j| m[(k + i, k + j)].clone())
    };
    let mut p: Vec<K> = vec![K::one(), -a[(n - 1, n - 1)].clone()];
    for k in (0..n - 1).rev() {
        let m = sub(a, k + 1);
        let size = n - k; // leading submatrix size being processed
        let pivot = a[(k, k)].clone();
        let row: Vec<K> = (k + 1..n).map(|j| a[(k, j)].clone()).collect();
        let col: Vec<K> = (k + 1..n).map(|i| a[(i, k)].clone()).collect();
        // v = [1, -pivot, -row.col, -row.M.col, ...]
        let mut v: Vec<K> = Vec::with_capacity(size + 1);
        v.push(K::one());
        v.push(-pivot);
        let mut cur = col.clone();
        for _ in 0..size - 1 {
            let dot = row
                .iter()
                .zip(&cur)
                .fold(K::zero(), |acc, (r, c)| acc + r.clone() * c.clone());
            v.push(-dot);
            cur = m.apply(&cur);
        }
        // p_new = Toeplitz(v) * p   (p has length size, p_new length size+1)
        let mut out = vec![K::zero(); size + 1];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, pj) in p.iter().enumerate() {
                if i + j <= size {
                    out[i + j] = out[i + j].clone() + vi.clone() * pj.clone();
                }
            }
        }
        p = out;
    }
    p
}

/// k-th elementary symmetric function of the eigenvalues, from charpoly.
fn elementary_symmetric<K: Scalar>(cp: &[K], k: usize) -> K {
    // cp[k] = (-1)^k e_k
    let v = cp.get(k).cloned().unwrap_or_else(K::zero);
    if k % 2 == 0 {
        v
    } else {
        -v
    }
}

pub struct OperatorAlgebra<K: Scalar> {
    /// independent basis of E as operators on W
    ops: Vec<Matrix<K>>,
    dim_w: usize,
    solver: SpanSolver<K>,
    /// left-multiplication matrices in the chosen basis
    left_mult: Vec<Matrix<K>>,
    #[allow(dead_code)]
    identity_coords: Vec<K>,
    char_p: u64,
}

impl<K: Scalar> OperatorAlgebra<K> {
    pub fn new(raw_ops: &[Matrix<K>], char_p: u64) -> Result<Self, EngineError> {
        assert!(!raw_ops.is_empty());
        let dim_w = raw_ops[0].rows();
        let unit = K::sized_one(char_p);
        // prune to an independent basis; size every entry so prime-field
        // moduli are attached throughout
        let flat_len = dim_w * dim_w;
        let mut ops: Vec<Matrix<K>> = Vec::new();
        let mut flats: Vec<Vec<K>> = Vec::new();
        for raw in raw_ops {
            let op = raw.scale(&unit);
            let mut cand = flats.clone();
            cand.push(op.vectorize());
            let m = Matrix::from_fn(flat_len, cand.len(), |i, j| cand[j][i].clone());
            if m.rank() == cand.len() {
                flats.push(op.vectorize());
                ops.push(op);
            }
        }
        let gens = Matrix::from_fn(flat_len, flats.len(), |i, j| flats[j][i].clone());
        let solver = SpanSolver::new(gens);
        let identity_coords = solver
            .express(&Matrix::<K>::identity(dim_w).scale(&unit).vectorize())
            .ok_or(EngineError::NotUnital)?;
        let dim_e = ops.len();
        let mut left_mult = Vec::with_capacity(dim_e);
        for x in &ops {
            let mut cols = Vec::with_capacity(dim_e);
            for y in &ops {
                let prod = x.matmul(y);
                let coords = solver
                    .express(&prod.vectorize())
                    .expect("algebra closed under multiplication");
                cols.push(coords);
            }
            left_mult.push(Matrix::from_fn(dim_e, dim_e, |i, j| cols[j][i].clone()));
        }
        Ok(OperatorAlgebra {
            ops,
            dim_w,
            solver,
            left_mult,
            identity_coords,
            char_p,
        })
    }

    pub fn dim(&self) -> usize {
        self.ops.len()
    }

    pub fn basis(&self) -> &[Matrix<K>] {
        &self.ops
    }

    fn op_from_coords(&self, coords: &[K]) -> Matrix<K> {
        let mut out = Matrix::zeros(self.dim_w, self.dim_w);
        for (c, op) in coords.iter().zip(&self.ops) {
            if c.is_zero() {
                continue;
            }
            out = &out + &op.scale(c);
        }
        out
    }

    fn left_mult_of(&self, coords: &[K]) -> Matrix<K> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (c, l) in coords.iter().zip(&self.left_mult) {
            if c.is_zero() {
                continue;
            }
            out = &out + &l.scale(c);
        }
        out
    }

    /// Jacobson radical as a list of coordinate vectors.
    pub fn radical(&self) -> Result<Vec<Vec<K>>, EngineError> {
        let n = self.dim();
        let rad_coords: Vec<Vec<K>> = if self.char_p == 0 {
            // kernel of the trace form tr(L_x L_y)
            let gram = Matrix::from_fn(n, n, |i, j| self.left_mult[i].matmul(&self.left_mult[j]).trace());
            let ker = gram.reduce().kernel_basis;
            (0..ker.cols()).map(|j| ker.col_vec(j)).collect()
        } else {
            // iterated trace-kernel chain with c_{p^i} coefficients
            let p = self.char_p;
            let mut current: Vec<Vec<K>> = (0..n)
                .map(|i| {
                    let mut e = vec![K::zero(); n];
                    e[i] = K::one();
                    e
                })
                .collect();
            let mut pk: u128 = 1;
            while pk <= n as u128 && !current.is_empty() {
                let d = current.len();
                let ls: Vec<Matrix<K>> = current.iter().map(|c| self.left_mult_of(c)).collect();
                let form = Matrix::from_fn(d, d, |i, j| {
                    let prod = ls[i].matmul(&ls[j]);
                    let cp = charpoly(&prod);
                    elementary_symmetric(&cp, pk as usize)
                });
                let ker = form.reduce().kernel_basis;
                let next: Vec<Vec<K>> = (0..ker.cols())
                    .map(|j| {
                        let lambda = ker.col_vec(j);
                        let mut combo = vec![K::zero(); n];
                        for (l, base) in lambda.iter().zip(&current) {
                            for (slot, b) in combo.iter_mut().zip(base) {
                                *slot = slot.clone() + l.clone() * b.clone();
                            }
                        }
                        combo
                    })
                    .collect();
                current = next;
                pk = pk.saturating_mul(p as u128);
            }
            current
        };
        self.verify_radical(&rad_coords)?;
        Ok(rad_coords)
    }

    fn verify_radical(&self, rad: &[Vec<K>]) -> Result<(), EngineError> {
        if rad.is_empty() {
            return Ok(());
        }
        let rad_ops: Vec<Matrix<K>> = rad.iter().map(|c| self.op_from_coords(c)).collect();
        let flat_len = self.dim_w * self.dim_w;
        let flats: Vec<Vec<K>> = rad_ops.iter().map(|o| o.vectorize()).collect();
        let span = SpanSolver::new(Matrix::from_fn(flat_len, flats.len(), |i, j| flats[j][i].clone()));
        // two-sided ideal
        for b in &self.ops {
            for r in &rad_ops {
                if span.express(&b.matmul(r).vectorize()).is_none()
                    || span.express(&r.matmul(b).vectorize()).is_none()
                {
                    return Err(EngineError::RadicalUnverified);
                }
            }
        }
        // nilpotent: powers of the span must die
        let mut layer = rad_ops.clone();
        for _ in 0..self.dim() + 1 {
            if layer.iter().all(|m| m.is_zero()) {
                return Ok(());
            }
            let mut next = Vec::new();
            for a in &layer {
                for r in &rad_ops {
                    next.push(a.matmul(r));
                }
            }
            // prune for size
            let mut pruned: Vec<Matrix<K>> = Vec::new();
            let mut fl: Vec<Vec<K>> = Vec::new();
            for m in next {
                if m.is_zero() {
                    continue;
                }
                let mut cand = fl.clone();
                cand.push(m.vectorize());
                let g = Matrix::from_fn(flat_len, cand.len(), |i, j| cand[j][i].clone());
                if g.rank() == cand.len() {
                    fl.push(m.vectorize());
                    pruned.push(m);
                }
            }
            layer = pruned;
        }
        Err(EngineError::RadicalUnverified)
    }

    /// Search for a splitting operator, or certify E local.
    pub fn split_or_certify(
        &self,
        rng: &mut ChaCha8Rng,
        budget: usize,
    ) -> Result<EngineOutcome<K>, EngineError> {
        if self.dim() == 1 {
            return Ok(EngineOutcome::Local);
        }
        // fast Fitting scan over basis and simple combinations
        if let Some(y) = self.fitting_scan(rng, budget) {
            return Ok(EngineOutcome::Split { operator: y });
        }
        let rad = self.radical()?;
        let quotient = QuotientView::new(self, &rad);
        if quotient.dim() == 1 {
            return Ok(EngineOutcome::Local);
        }
        match quotient.split_semisimple(rng, budget)? {
            QuotientOutcome::Idempotent(coords) => {
                let e = self.lift_idempotent(&quotient.lift(&coords))?;
                Ok(EngineOutcome::Split { operator: e })
            }
            QuotientOutcome::DivisionAlgebra => Ok(EngineOutcome::Local),
        }
    }

    fn fitting_scan(&self, rng: &mut ChaCha8Rng, budget: usize) -> Option<Matrix<K>> {
        let try_op = |x: &Matrix<K>| -> Option<Matrix<K>> {
            let y = stable_power(x, self.dim_w);
            let r = y.rank();
            (r > 0 && r < self.dim_w).then_some(y)
        };
        for op in &self.ops {
            if let Some(y) = try_op(op) {
                return Some(y);
            }
        }
        let n = self.dim();
        for i in 0..n.min(12) {
            for j in 0..n.min(12) {
                if i != j {
                    if let Some(y) = try_op(&self.ops[i].matmul(&self.ops[j])) {
                        return Some(y);
                    }
                    if let Some(y) = try_op(&(&self.ops[i] + &self.ops[j])) {
                        return Some(y);
                    }
                }
            }
        }
        for _ in 0..budget {
            let coords: Vec<K> = (0..n)
                .map(|_| K::from_int(rng.gen_range(-3..=3)))
                .collect();
            let x = self.op_from_coords(&coords);
            if let Some(y) = try_op(&x) {
                return Some(y);
            }
        }
        None
    }

    /// Newton lift of an approximate idempotent (idempotent mod radical).
    fn lift_idempotent(&self, e0: &Matrix<K>) -> Result<Matrix<K>, EngineError> {
        let mut e = e0.clone();
        for _ in 0..48 {
            let e2 = e.matmul(&e);
            if e2 == e {
                let r = e.rank();
                if r == 0 || r == self.dim_w {
                    return Err(EngineError::Stalled);
                }
                debug_assert!(self.solver.express(&e.vectorize()).is_some());
                return Ok(e);
            }
            // e <- 3e^2 - 2e^3
            let e3 = e2.matmul(&e);
            e = &e2.scale(&K::from_int(3)) - &e3.scale(&K::from_int(2));
        }
        Err(EngineError::Stalled)
    }
}

fn stable_power<K: Scalar>(x: &Matrix<K>, dim: usize) -> Matrix<K> {
    // x^(2^k) with 2^k >= dim
    let mut y = x.clone();
    let mut covered = 1usize;
    while covered < dim {
        y = y.matmul(&y);
        covered *= 2;
    }
    y
}

enum QuotientOutcome<K: Scalar> {
    /// a nontrivial idempotent of E/rad, in quotient coordinates
    Idempotent(Vec<K>),
    DivisionAlgebra,
}

/// The semisimple quotient S = E/rad with multiplication via lifts.
struct QuotientView<'a, K: Scalar> {
    parent: &'a OperatorAlgebra<K>,
    /// E-coordinates of the chosen S-basis lifts
    lifts: Vec<Vec<K>>,
    /// solver over [rad basis | S lifts] in E-coordinates
    mixed: SpanSolver<K>,
    rad_count: usize,
}

impl<'a, K: Scalar> QuotientView<'a, K> {
    fn new(parent: &'a OperatorAlgebra<K>, rad: &[Vec<K>]) -> Self {
        let n = parent.dim();
        // choose E-basis vectors independent modulo rad
        let mut cols: Vec<Vec<K>> = rad.to_vec();
        let mut lifts = Vec::new();
        for i in 0..n {
            let mut e = vec![K::zero(); n];
            e[i] = K::one();
            let mut cand = cols.clone();
            cand.push(e.clone());
            let m = Matrix::from_fn(n, cand.len(), |r, c| cand[c][r].clone());
            if m.rank() == cand.len() {
                cols.push(e.clone());
                lifts.push(e);
            }
        }
        let gens = Matrix::from_fn(n, cols.len(), |r, c| cols[c][r].clone());
        QuotientView {
            parent,
            lifts,
            mixed: SpanSolver::new(gens),
            rad_count: rad.len(),
        }
    }

    fn dim(&self) -> usize {
        self.lifts.len()
    }

    /// E-coordinates of a quotient element.
    fn lift(&self, s_coords: &[K]) -> Matrix<K> {
        let n = self.parent.dim();
        let mut combo = vec![K::zero(); n];
        for (c, l) in s_coords.iter().zip(&self.lifts) {
            for (slot, v) in combo.iter_mut().zip(l) {
                *slot = slot.clone() + c.clone() * v.clone();
            }
        }
        self.parent.op_from_coords(&combo)
    }

    /// project an operator known to lie in E onto S-coordinates
    fn project(&self, op: &Matrix<K>) -> Vec<K> {
        let e_coords = self
            .parent
            .solver
            .express(&op.vectorize())
            .expect("element of E");
        let mixed = self.mixed.express(&e_coords).expect("basis of E");
        mixed[self.rad_count..].to_vec()
    }

    fn mul(&self, a: &[K], b: &[K]) -> Vec<K> {
        self.project(&self.lift(a).matmul(&self.lift(b)))
    }

    fn identity(&self) -> Vec<K> {
        let unit = K::sized_one(self.parent.char_p);
        self.project(&Matrix::identity(self.parent.dim_w).scale(&unit))
    }

    fn is_zero_el(&self, a: &[K]) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    /// minimal polynomial of `s`, monic, coefficients ascending
    fn minpoly(&self, s: &[K]) -> Poly<K> {
        let d = self.dim();
        let mut powers: Vec<Vec<K>> = vec![self.identity()];
        let mut cur = self.identity();
        loop {
            cur = self.mul(&cur, s);
            // is cur in span of powers?
            let gens = Matrix::from_fn(d, powers.len(), |i, j| powers[j][i].clone());
            let solver = SpanSolver::new(gens);
            if let Some(coords) = solver.express(&cur) {
                // cur = sum coords_j * s^j  =>  minpoly = t^k - sum coords_j t^j
                let unit = K::sized_one(self.parent.char_p);
                let k = powers.len();
                let mut cf = vec![K::zero(); k + 1];
                for (j, c) in coords.iter().enumerate() {
                    cf[j] = -(c.clone() * unit.clone());
                }
                cf[k] = unit;
                return Poly::new(cf);
            }
            powers.push(cur.clone());
            assert!(powers.len() <= d + 1, "minpoly search overran dimension");
        }
    }

    fn eval_poly(&self, f: &Poly<K>, s: &[K]) -> Vec<K> {
        let mut acc = vec![K::zero(); self.dim()];
        for c in f.coeffs.iter().rev() {
            acc = self.mul(&acc, s);
            let id = self.identity();
            for (slot, idc) in acc.iter_mut().zip(&id) {
                *slot = slot.clone() + c.clone() * idc.clone();
            }
        }
        acc
    }

    /// Find a nontrivial idempotent of the (expected semisimple) quotient, or
    /// certify it is a division algebra.
    fn split_semisimple(
        &self,
        rng: &mut ChaCha8Rng,
        budget: usize,
    ) -> Result<QuotientOutcome<K>, EngineError> {
        let d = self.dim();
        let mut candidates: Vec<Vec<K>> = Vec::new();
        for i in 0..d {
            let mut e = vec![K::zero(); d];
            e[i] = K::one();
            candidates.push(e);
        }
        for i in 0..d.min(10) {
            for j in (i + 1)..d.min(10) {
                let mut e = vec![K::zero(); d];
                e[i] = K::one();
                e[j] = K::one();
                candidates.push(e.clone());
                candidates.push(self.mul(&candidates[i], &candidates[j]));
            }
        }
        for _ in 0..budget {
            candidates.push((0..d).map(|_| K::from_int(rng.gen_range(-3..=3))).collect());
        }
        let mut commutative_seen = true;
        for i in 0..d.min(8) {
            for j in (i + 1)..d.min(8) {
                let a: Vec<K> = {
                    let mut e = vec![K::zero(); d];
                    e[i] = K::one();
                    e
                };
                let b: Vec<K> = {
                    let mut e = vec![K::zero(); d];
                    e[j] = K::one();
                    e
                };
                if self.mul(&a, &b) != self.mul(&b, &a) {
                    commutative_seen = false;
                }
            }
        }

        let mut all_irreducible = true;
        for s in &candidates {
            if self.is_zero_el(s) {
                continue;
            }
            match self.idempotent_from_element(s, rng) {
                ElementVerdict::Idempotent(e) => return Ok(QuotientOutcome::Idempotent(e)),
                ElementVerdict::IrreducibleMinpoly => {}
                ElementVerdict::Unknown => all_irreducible = false,
            }
        }

        if self.parent.char_p > 0 && commutative_seen {
            // Berlekamp subalgebra of a commutative semisimple F_p-algebra
            return self.berlekamp_split(rng);
        }
        if self.parent.char_p == 0 && commutative_seen && all_irreducible {
            // look for a primitive element certifying a field
            for _ in 0..64 {
                let z: Vec<K> = (0..d).map(|_| K::from_int(rng.gen_range(-5..=5))).collect();
                let f = self.minpoly(&z);
                if f.degree() == d {
                    let sf = f.squarefree_part(0);
                    if sf.degree() < f.degree() {
                        continue;
                    }
                    return match try_split_rational_generic::<K>(&f) {
                        Some(SplitDecision::Irreducible) => Ok(QuotientOutcome::DivisionAlgebra),
                        Some(SplitDecision::Split(g, h)) => {
                            match self.crt_idempotent(&z, &g, &h) {
                                Some(e) => Ok(QuotientOutcome::Idempotent(e)),
                                None => Err(EngineError::Stalled),
                            }
                        }
                        None => Err(EngineError::Stalled),
                    };
                }
            }
        }
        Err(EngineError::Stalled)
    }

    fn berlekamp_split(&self, rng: &mut ChaCha8Rng) -> Result<QuotientOutcome<K>, EngineError> {
        let p = self.parent.char_p;
        let d = self.dim();
        // Frobenius matrix: b_i -> b_i^p
        let mut cols = Vec::with_capacity(d);
        for i in 0..d {
            let mut e = vec![K::zero(); d];
            e[i] = K::one();
            // e^p via square-and-multiply in S
            let mut acc = self.identity();
            let mut base = e;
            let mut exp = p;
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = self.mul(&acc, &base);
                }
                base = self.mul(&base.clone(), &base);
                exp >>= 1;
            }
            cols.push(acc);
        }
        let frob = Matrix::from_fn(d, d, |i, j| cols[j][i].clone());
        let fixed = (&frob - &Matrix::identity(d)).reduce().kernel_basis;
        if fixed.cols() <= 1 {
            return Ok(QuotientOutcome::DivisionAlgebra);
        }
        // element of the fixed space independent of 1
        let id = self.identity();
        for j in 0..fixed.cols() {
            let b = fixed.col_vec(j);
            let gens = Matrix::from_fn(d, 1, |i, _| id[i].clone());
            if SpanSolver::new(gens).express(&b).is_some() {
                continue;
            }
            let f = self.minpoly(&b);
            let sf = f.squarefree_part(p);
            let fp_poly = poly_to_fp(&sf);
            let mut fp_rng = rng.clone();
            let factors = factor_squarefree_fp(&fp_poly, p, &mut fp_rng);
            if factors.len() >= 2 {
                let g = poly_from_fp::<K>(&factors[0], p);
                let rest = factors[1..]
                    .iter()
                    .fold(Poly::<crate::field::Fp64>::one(), |acc, q| acc.mul(q));
                let h = poly_from_fp::<K>(&rest, p);
                if let Some(e) = self.crt_idempotent(&b, &g, &h) {
                    return Ok(QuotientOutcome::Idempotent(e));
                }
            }
        }
        Err(EngineError::Stalled)
    }

    /// Try to produce an idempotent from one element via its minimal polynomial.
    fn idempotent_from_element(&self, s: &[K], rng: &mut ChaCha8Rng) -> ElementVerdict<K> {
        let f = self.minpoly(s);
        if f.degree() == 0 {
            return ElementVerdict::IrreducibleMinpoly;
        }
        let p = self.parent.char_p;
        let sf = f.squarefree_part(p);
        if sf.degree() < f.degree() && sf.degree() == 1 && sf.coeffs[0].is_zero() {
            // s nilpotent and nonzero: right-identity of the left ideal S s
            if let Some(e) = self.ideal_idempotent(s) {
                return ElementVerdict::Idempotent(e);
            }
            return ElementVerdict::Unknown;
        }
        // try to split the square-free part into two coprime factors
        let split = if p == 0 {
            try_split_rational_generic::<K>(&sf)
        } else {
            let mut fp_rng = rng.clone();
            let factors = factor_squarefree_fp(&poly_to_fp(&sf), p, &mut fp_rng);
            if factors.len() >= 2 {
                let g = poly_from_fp::<K>(&factors[0], p);
                let rest = factors[1..]
                    .iter()
                    .fold(Poly::<crate::field::Fp64>::one(), |acc, q| acc.mul(q));
                Some(SplitDecision::Split(g, poly_from_fp::<K>(&rest, p)))
            } else {
                Some(SplitDecision::Irreducible)
            }
        };
        match split {
            Some(SplitDecision::Split(g, h)) => match self.crt_idempotent(s, &g, &h) {
                Some(e) => ElementVerdict::Idempotent(e),
                None => ElementVerdict::Unknown,
            },
            Some(SplitDecision::Irreducible) => {
                if sf.degree() < f.degree() {
                    // minpoly is a power of one irreducible: g(s) is nilpotent
                    let g_of_s = self.eval_poly(&sf, s);
                    if !self.is_zero_el(&g_of_s) {
                        if let Some(e) = self.ideal_idempotent(&g_of_s) {
                            return ElementVerdict::Idempotent(e);
                        }
                    }
                    ElementVerdict::Unknown
                } else {
                    ElementVerdict::IrreducibleMinpoly
                }
            }
            None => ElementVerdict::Unknown,
        }
    }

    /// CRT idempotent for s with squarefree minpoly part g*h (coprime), then
    /// Newton-corrected inside S to an exact idempotent.
    fn crt_idempotent(&self, s: &[K], g: &Poly<K>, h: &Poly<K>) -> Option<Vec<K>> {
        let (one, u, _v) = g.xgcd(h);
        if one.degree() != 0 {
            return None;
        }
        // e = u*g mod (g*h): e = 0 mod g, 1 mod h
        let e_poly = u.mul(g);
        let mut e = self.eval_poly(&e_poly, s);
        // Newton: e <- 3e^2 - 2e^3 until exact
        for _ in 0..48 {
            let e2 = self.mul(&e, &e);
            if e2 == e {
                let trivial = self.is_zero_el(&e) || e == self.identity();
                return (!trivial).then_some(e);
            }
            let e3 = self.mul(&e2, &e);
            let mut next = vec![K::zero(); self.dim()];
            for i in 0..self.dim() {
                next[i] = K::from_int(3) * e2[i].clone() - K::from_int(2) * e3[i].clone();
            }
            e = next;
        }
        None
    }

    /// For a zero divisor s (for instance nilpotent): the left ideal S s has a
    /// right identity in a semisimple algebra, and that element is idempotent.
    fn ideal_idempotent(&self, s: &[K]) -> Option<Vec<K>> {
        let d = self.dim();
        // basis of L = S s
        let mut gens: Vec<Vec<K>> = Vec::new();
        for i in 0..d {
            let mut b = vec![K::zero(); d];
            b[i] = K::one();
            gens.push(self.mul(&b, s));
        }
        let gm = Matrix::from_fn(d, gens.len(), |i, j| gens[j][i].clone());
        let red = gm.reduce();
        let basis: Vec<Vec<K>> = red
            .pivot_cols
            .iter()
            .map(|&c| gens[c].clone())
            .collect();
        let ldim = basis.len();
        if ldim == 0 || ldim == d {
            return None;
        }
        // solve sum_k lambda_k (y_j * y_k) = y_j for all j
        let mut rows: Vec<Vec<K>> = Vec::new();
        let mut rhs: Vec<K> = Vec::new();
        for yj in &basis {
            let products: Vec<Vec<K>> = basis.iter().map(|yk| self.mul(yj, yk)).collect();
            for coord in 0..d {
                rows.push(products.iter().map(|pr| pr[coord].clone()).collect());
                rhs.push(yj[coord].clone());
            }
        }
        let system = Matrix::from_rows(rows);
        let lambda = system.solve(&rhs).ok()??;
        let mut e = vec![K::zero(); d];
        for (l, y) in lambda.iter().zip(&basis) {
            for (slot, c) in e.iter_mut().zip(y) {
                *slot = slot.clone() + l.clone() * c.clone();
            }
        }
        if self.mul(&e, &e) != e || self.is_zero_el(&e) || e == self.identity() {
            return None;
        }
        Some(e)
    }
}

enum ElementVerdict<K: Scalar> {
    Idempotent(Vec<K>),
    IrreducibleMinpoly,
    Unknown,
}

enum SplitDecision<K: Scalar> {
    Split(Poly<K>, Poly<K>),
    Irreducible,
}

/// Rational splitting decisions routed through the concrete Rational type.
fn try_split_rational_generic<K: Scalar>(f: &Poly<K>) -> Option<SplitDecision<K>> {
    // reinterpret coefficients through render/parse; exact for Rational
    let spec = crate::field::FieldSpec::Rationals;
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    for c in &f.coeffs {
        coeffs.push(crate::field::Rational::parse_in(&spec, &c.render()).ok()?);
    }
    let fq = Poly::new(coeffs);
    match try_split_squarefree_rational(&fq) {
        SplitOutcome::Split(g, h) => {
            let back = |p: &Poly<crate::field::Rational>| -> Option<Poly<K>> {
                let mut out = Vec::with_capacity(p.coeffs.len());
                for c in &p.coeffs {
                    out.push(K::parse_in(&spec, &c.render()).ok()?);
                }
                Some(Poly::new(out))
            };
            Some(SplitDecision::Split(back(&g)?, back(&h)?))
        }
        SplitOutcome::Irreducible => Some(SplitDecision::Irreducible),
        SplitOutcome::Unknown => None,
    }
}

fn poly_to_fp<K: Scalar>(f: &Poly<K>) -> Poly<crate::field::Fp64> {
    // coefficients rendered as canonical residues
    Poly::new(
        f.coeffs
            .iter()
            .map(|c| {
                let hint = c.characteristic_hint();
                let text = c.render();
                let v: i128 = text.parse().expect("prime field coefficient");
                crate::field::Fp64::new(v, if hint > 0 { hint } else { guess_modulus(f) })
            })
            .collect(),
    )
}

fn guess_modulus<K: Scalar>(f: &Poly<K>) -> u64 {
    f.coeffs
        .iter()
        .map(|c| c.characteristic_hint())
        .find(|&p| p > 0)
        .expect("at least one sized prime-field coefficient")
}

fn poly_from_fp<K: Scalar>(f: &Poly<crate::field::Fp64>, char_p: u64) -> Poly<K> {
    let unit = K::sized_one(char_p);
    Poly::new(f.coeffs.iter().map(|c| {
        let v: i64 = c.render().parse().expect("small residue");
        K::from_int(v) * unit.clone()
    }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Fp64, Rational};
    use rand::SeedableRng;

    #[test]
    fn charpoly_known_values() {
        // diag(1,2,3): t^3 - 6t^2 + 11t - 6
        let d = Matrix::<Rational>::from_ints(3, 3, &[1, 0, 0, 0, 2, 0, 0, 0, 3]);
        let cp = charpoly(&d);
        let expect: Vec<Rational> = [1, -6, 11, -6].iter().map(|&n| rat(n)).collect();
        assert_eq!(cp, expect);
        // nilpotent: t^2
        let n = Matrix::<Rational>::from_ints(2, 2, &[0, 1, 0, 0]);
        assert_eq!(charpoly(&n), vec![rat(1), rat(0), rat(0)]);
        // companion of t^3 + 2t + 5
        let c = Matrix::<Rational>::from_ints(3, 3, &[0, 0, -5, 1, 0, -2, 0, 1, 0]);
        assert_eq!(charpoly(&c), vec![rat(1), rat(0), rat(2), rat(5)]);
        // over F_p
        let m = Matrix::<Fp64>::from_ints(2, 2, &[1, 1, 0, 1]).scale(&Fp64::new(1, 5));
        let cp = charpoly(&m);
        assert_eq!(cp.len(), 3);
        assert_eq!(cp[1], Fp64::new(-2, 5));
        assert_eq!(cp[2], Fp64::new(1, 5));
    }

    fn matrix_algebra_2x2<K: Scalar>() -> Vec<Matrix<K>> {
        vec![
            Matrix::from_ints(2, 2, &[1, 0, 0, 0]),
            Matrix::from_ints(2, 2, &[0, 1, 0, 0]),
            Matrix::from_ints(2, 2, &[0, 0, 1, 0]),
            Matrix::from_ints(2, 2, &[0, 0, 0, 1]),
        ]
    }

    #[test]
    fn splits_full_matrix_algebra() {
        let alg = OperatorAlgebra::<Rational>::new(&matrix_algebra_2x2(), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        match alg.split_or_certify(&mut rng, 50).unwrap() {
            EngineOutcome::Split { operator } => {
                let r = operator.rank();
                assert!(r > 0 && r < 2);
            }
            EngineOutcome::Local => panic!("M_2(Q) is not local"),
        }
    }

    #[test]
    fn certifies_local_algebras() {
        // K[x]/(x^2) acting on K^2: basis {id, nilpotent}
        let ops = vec![
            Matrix::<Rational>::identity(2),
            Matrix::<Rational>::from_ints(2, 2, &[0, 1, 0, 0]),
        ];
        let alg = OperatorAlgebra::new(&ops, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            alg.split_or_certify(&mut rng, 50).unwrap(),
            EngineOutcome::Local
        ));
        // the field Q(sqrt 2) as 2x2 matrices: id, [[0,2],[1,0]]
        let ops = vec![
            Matrix::<Rational>::identity(2),
            Matrix::<Rational>::from_ints(2, 2, &[0, 2, 1, 0]),
        ];
        let alg = OperatorAlgebra::new(&ops, 0).unwrap();
        assert!(matches!(
            alg.split_or_certify(&mut rng, 50).unwrap(),
            EngineOutcome::Local
        ));
    }

    #[test]
    fn splits_product_of_fields() {
        // Q x Q embedded diagonally with a twisted basis {id, [[1,0],[0,-1]]-ish}
        let ops = vec![
            Matrix::<Rational>::identity(2),
            Matrix::<Rational>::from_ints(2, 2, &[1, 0, 0, -1]),
        ];
        let alg = OperatorAlgebra::new(&ops, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        match alg.split_or_certify(&mut rng, 50).unwrap() {
            EngineOutcome::Split { operator } => assert_eq!(operator.rank(), 1),
            EngineOutcome::Local => panic!("Q x Q splits"),
        }
    }

    #[test]
    fn radical_detection_with_nilpotents() {
        // upper triangular 2x2: basis e11, e12, e22; radical = <e12>
        let ops = vec![
            Matrix::<Rational>::from_ints(2, 2, &[1, 0, 0, 0]),
            Matrix::<Rational>::from_ints(2, 2, &[0, 1, 0, 0]),
            Matrix::<Rational>::from_ints(2, 2, &[0, 0, 0, 1]),
        ];
        let alg = OperatorAlgebra::new(&ops, 0).unwrap();
        let rad = alg.radical().unwrap();
        assert_eq!(rad.len(), 1);
    }

    #[test]
    fn prime_field_engine() {
        for p in [2u64, 3, 5] {
            let one = Fp64::new(1, p);
            let ops: Vec<Matrix<Fp64>> = matrix_algebra_2x2::<Fp64>()
                .into_iter()
                .map(|m| m.scale(&one))
                .collect();
            let alg = OperatorAlgebra::new(&ops, p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6 + p);
            match alg.split_or_certify(&mut rng, 80).unwrap() {
                EngineOutcome::Split { operator } => {
                    let r = operator.rank();
                    assert!(r > 0 && r < 2, "p={p}");
                }
                EngineOutcome::Local => panic!("M_2(F_{p}) splits"),
            }
            // F_p[x]/(x^2) is local
            let ops = vec![
                Matrix::<Fp64>::identity(2).scale(&one),
                Matrix::<Fp64>::from_ints(2, 2, &[0, 1, 0, 0]).scale(&one),
            ];
            let alg = OperatorAlgebra::new(&ops, p).unwrap();
            assert!(matches!(
                alg.split_or_certify(&mut rng, 80).unwrap(),
                EngineOutcome::Local
            ));
        }
    }

    #[test]
    fn fp_field_extension_is_local() {
        // F_4 = F_2[x]/(x^2+x+1) acting on F_2^2 via companion matrix
        let p = 2u64;
        let one = Fp64::new(1, p);
        let comp = Matrix::<Fp64>::from_ints(2, 2, &[0, 1, 1, 1]).scale(&one);
        let ops = vec![Matrix::<Fp64>::identity(2).scale(&one), comp];
        let alg = OperatorAlgebra::new(&ops, p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert!(matches!(
            alg.split_or_certify(&mut rng, 80).unwrap(),
            EngineOutcome::Local
        ));
    }
}
