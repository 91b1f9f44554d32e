//! Dense univariate polynomials over a [`Scalar`] field, with gcd,
//! square-free parts, and complete factorization over prime fields.


use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::field::{Fp64, Scalar};

/// Coefficients in ascending degree; normalized (no trailing zeros).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<K: Scalar> {
    pub coeffs: Vec<K>,
}

impl<K: Scalar> Poly<K> {
    pub fn new(mut coeffs: Vec<K>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![K::one()],
        }
    }

    pub fn x() -> Self {
        Poly {
            coeffs: vec![K::zero(), K::one()],
        }
    }

    pub fn constant(c: K) -> Self {
        Poly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> K {
        self.coeffs.last().cloned().unwrap_or_else(K::zero)
    }

    pub fn monic(&self) -> Poly<K> {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().try_inverse().expect("nonzero leading");
        Poly::new(self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect())
    }

    pub fn add(&self, other: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(K::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(K::zero);
            out.push(a + b);
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(K::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(K::zero);
            out.push(a - b);
        }
        Poly::new(out)
    }

    pub fn mul(&self, other: &Poly<K>) -> Poly<K> {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![K::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn divmod(&self, d: &Poly<K>) -> (Poly<K>, Poly<K>) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quo = vec![K::zero(); self.coeffs.len().saturating_sub(d.coeffs.len()) + 1];
        let dl = d.leading();
        let dinv = dl.try_inverse().expect("field");
        while !rem.is_zero() && rem.degree() >= d.degree() {
            let shift = rem.degree() - d.degree();
            let factor = rem.leading() * dinv.clone();
            quo[shift] = factor.clone();
            // rem -= factor * x^shift * d
            let mut sub = vec![K::zero(); shift];
            sub.extend(d.coeffs.iter().map(|c| c.clone() * factor.clone()));
            rem = rem.sub(&Poly::new(sub));
        }
        (Poly::new(quo), rem)
    }

    pub fn rem(&self, d: &Poly<K>) -> Poly<K> {
        self.divmod(d).1
    }

    pub fn gcd(&self, other: &Poly<K>) -> Poly<K> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Extended gcd: returns (g, u, v) with u*self + v*other = g (monic).
    pub fn xgcd(&self, other: &Poly<K>) -> (Poly<K>, Poly<K>, Poly<K>) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let linv = r0.leading().try_inverse().expect("field");
        let scale = |p: &Poly<K>| {
            Poly::new(p.coeffs.iter().map(|c| c.clone() * linv.clone()).collect())
        };
        (scale(&r0), scale(&s0), scale(&t0))
    }

    pub fn derivative(&self) -> Poly<K> {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| K::from_int(i as i64) * c.clone())
            .collect();
        Poly::new(out)
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = K::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Square-free part. `char_p` is the field characteristic (0 for Q).
    pub fn squarefree_part(&self, char_p: u64) -> Poly<K> {
        if self.degree() == 0 || self.is_zero() {
            return self.monic();
        }
        let d = self.derivative();
        if d.is_zero() {
            // f = g(x^p) over a prime field; Frobenius is the identity on F_p
            assert!(char_p > 0, "zero derivative over characteristic 0");
            let p = char_p as usize;
            let mut g = Vec::new();
            for (i, c) in self.coeffs.iter().enumerate() {
                if i % p == 0 {
                    g.push(c.clone());
                } else {
                    debug_assert!(c.is_zero());
                }
            }
            return Poly::new(g).squarefree_part(char_p);
        }
        let g = self.gcd(&d);
        if g.degree() == 0 {
            return self.monic();
        }
        let (q, _) = self.divmod(&g);
        // q may still share factors with g when char divides multiplicities
        let head = q.monic();
        let tail = g.squarefree_part(char_p);
        let common = head.gcd(&tail);
        let (extra, _) = tail.divmod(&common);
        head.mul(&extra).monic()
    }
}

/// `base^e mod m` in K[x].
fn powmod<K: Scalar>(base: &Poly<K>, mut e: u128, m: &Poly<K>) -> Poly<K> {
    let mut acc = Poly::one();
    let mut b = base.rem(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b).rem(m);
        }
        b = b.mul(&b).rem(m);
        e >>= 1;
    }
    acc
}

/// Complete factorization of a monic square-free polynomial over F_p into
/// monic irreducibles (with multiplicity 1), via distinct-degree plus
/// equal-degree Cantor-Zassenhaus splitting.
pub fn factor_squarefree_fp(f: &Poly<Fp64>, p: u64, rng: &mut ChaCha8Rng) -> Vec<Poly<Fp64>> {
    let f = f.monic();
    if f.degree() == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    // distinct degree
    let mut rest = f.clone();
    let x = Poly::<Fp64>::x();
    let mut h = x.clone();
    let mut d = 0usize;
    while rest.degree() > 0 {
        d += 1;
        if 2 * d > rest.degree() {
            out.push(rest.clone());
            break;
        }
        h = powmod(&h, p as u128, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.degree() > 0 {
            // g is a product of irreducibles of degree d
            equal_degree_split(&g, d, p, rng, &mut out);
            let (q, _) = rest.divmod(&g);
            rest = q.monic();
            h = h.rem(&rest);
        }
    }
    out.sort_by(|a, b| (a.degree(), render_key(a)).cmp(&(b.degree(), render_key(b))));
    out
}

fn render_key(p: &Poly<Fp64>) -> String {
    p.coeffs
        .iter()
        .map(|c| c.render())
        .collect::<Vec<_>>()
        .join(",")
}

fn equal_degree_split(
    g: &Poly<Fp64>,
    d: usize,
    p: u64,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Poly<Fp64>>,
) {
    if g.degree() == d {
        out.push(g.monic());
        return;
    }
    let n = g.degree();
    loop {
        // random polynomial of degree < n
        let coeffs: Vec<Fp64> = (0..n)
            .map(|_| Fp64::new(rng.gen_range(0..p) as i128, p))
            .collect();
        let r = Poly::new(coeffs);
        if r.degree() == 0 && r.is_zero() {
            continue;
        }
        let candidate = if p == 2 {
            // trace map T(r) = r + r^2 + ... + r^(2^(d-1))
            let mut acc = Poly::zero();
            let mut cur = r.rem(g);
            for _ in 0..d {
                acc = acc.add(&cur).rem(g);
                cur = cur.mul(&cur).rem(g);
            }
            acc
        } else {
            // r^((p^d - 1)/2) - 1
            let e = (p as u128).pow(d as u32) / 2;
            powmod(&r, e, g).sub(&Poly::one())
        };
        let h = g.gcd(&candidate);
        if h.degree() > 0 && h.degree() < g.degree() {
            let (q, _) = g.divmod(&h);
            equal_degree_split(&h, d, p, rng, out);
            equal_degree_split(&q.monic(), d, p, rng, out);
            return;
        }
    }
}

/// Small rational/integer root scan plus low-degree certification over Q.
/// Returns either a proper monic coprime split of the square-free input, or
/// a verdict that it is irreducible, or gives up.
pub enum SplitOutcome<K: Scalar> {
    Split(Poly<K>, Poly<K>),
    Irreducible,
    Unknown,
}

pub fn try_split_squarefree_rational(f: &Poly<crate::field::Rational>) -> SplitOutcome<crate::field::Rational> {
    use crate::field::{ratio, Rational};
    let f = f.monic();
    if f.degree() <= 1 {
        return SplitOutcome::Irreducible;
    }
    // root scan over small rationals a/b
    for b in 1i64..=12 {
        for a in -60i64..=60 {
            let x = ratio(a, b);
            if f.eval(&x).is_zero() {
                let lin = Poly::<Rational>::new(vec![-x, Rational::from_int(1)]);
                let (q, r) = f.divmod(&lin);
                debug_assert!(r.is_zero());
                return SplitOutcome::Split(lin, q.monic());
            }
        }
    }
    if f.degree() <= 3 {
        // rootless degree <= 3 would only factor with a linear part
        return SplitOutcome::Irreducible;
    }
    SplitOutcome::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Rational};
    use rand::SeedableRng;

    fn qp(ints: &[i64]) -> Poly<Rational> {
        Poly::new(ints.iter().map(|&n| rat(n)).collect())
    }

    #[test]
    fn divmod_gcd() {
        let f = qp(&[-1, 0, 1]); // x^2 - 1
        let g = qp(&[-1, 1]); // x - 1
        let (q, r) = f.divmod(&g);
        assert!(r.is_zero());
        assert_eq!(q, qp(&[1, 1]));
        assert_eq!(f.gcd(&g), g.monic());
        let (gg, u, v) = f.xgcd(&qp(&[1, 1]));
        assert_eq!(gg, qp(&[1, 1]).monic());
        assert_eq!(u.mul(&f).add(&v.mul(&qp(&[1, 1]))), gg);
    }

    #[test]
    fn squarefree() {
        let f = qp(&[1, 2, 1]); // (x+1)^2
        assert_eq!(f.squarefree_part(0), qp(&[1, 1]));
        let g = qp(&[0, 0, 1]).mul(&qp(&[-1, 1])); // x^2 (x-1)
        assert_eq!(g.squarefree_part(0), qp(&[0, 1]).mul(&qp(&[-1, 1])));
    }

    #[test]
    fn rational_split() {
        let f = qp(&[-2, 1]).mul(&qp(&[3, 1])); // (x-2)(x+3)
        match try_split_squarefree_rational(&f) {
            SplitOutcome::Split(a, b) => assert_eq!(a.mul(&b).monic(), f.monic()),
            _ => panic!("expected split"),
        }
        let irr = qp(&[2, 0, 1]); // x^2 + 2
        assert!(matches!(
            try_split_squarefree_rational(&irr),
            SplitOutcome::Irreducible
        ));
    }

    #[test]
    fn fp_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = 7u64;
        let el = |n: i128| Fp64::new(n, p);
        // (x-1)(x-2)(x^2+1); squares mod 7 are {0,1,2,4}, so x^2+1 is irreducible
        let f = Poly::new(vec![el(-1), el(1)])
            .mul(&Poly::new(vec![el(-2), el(1)]))
            .mul(&Poly::new(vec![el(1), el(0), el(1)]));
        let factors = factor_squarefree_fp(&f, p, &mut rng);
        assert_eq!(factors.len(), 3);
        let product = factors.iter().fold(Poly::one(), |acc, g| acc.mul(g));
        assert_eq!(product.monic(), f.monic());
        assert!(factors.iter().all(|g| g.degree() >= 1));

        // over F_2 with the trace-map branch
        let mut rng2 = ChaCha8Rng::seed_from_u64(2);
        let e2 = |n: i128| Fp64::new(n, 2);
        // x^2 + x + 1 irreducible, x, x+1
        let g = Poly::new(vec![e2(1), e2(1), e2(1)])
            .mul(&Poly::new(vec![e2(0), e2(1)]))
            .mul(&Poly::new(vec![e2(1), e2(1)]));
        let fs = factor_squarefree_fp(&g, 2, &mut rng2);
        assert_eq!(fs.len(), 3);
    }
}
