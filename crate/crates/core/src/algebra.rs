//! Finite cyclic realization of the per-site Weyl pair and dense complex
//! operator arithmetic on tensor-product spaces.
//!
//! The chain's local operators enter only through the pair `U = exp(-i*eta*p)`
//! and `V = exp(x)`, which obey `U V = omega V U` with `omega = exp(-eta)`.
//! On a local space of dimension `L` this is realized exactly by the clock and
//! shift matrices at the root of unity `omega = exp(2*pi*i*r/L)`, which forces
//! `eta = -2*pi*i*r/L`.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

/// Dense complex matrix backing all operators.
pub type OpMat<T> = DMatrix<Cx<T>>;

/// Residual above which a numerical inverse is rejected.
pub const INVERSION_RESIDUAL_LIMIT: f64 = 1e-9;

/// Finite faithful realization of the shift/multiplication operator pair on
/// one site.
#[derive(Debug, Clone)]
pub struct CyclicWeylRep<T: Real> {
    local_dim: usize,
    root_index: i64,
    /// `exp(2*pi*i*r/L)`; satisfies `U V = omega V U`.
    pub omega: Cx<T>,
    /// `-2*pi*i*r/L`, so that `exp(-eta) = omega`.
    pub eta: Cx<T>,
    u: OpMat<T>,
    u_inv: OpMat<T>,
    v: OpMat<T>,
    v_inv: OpMat<T>,
}

impl<T: Real> CyclicWeylRep<T> {
    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn root_index(&self) -> i64 {
        self.root_index
    }

    /// Cyclic index-decrement shift, realizing `exp(-i*eta*p)`.
    pub fn u(&self) -> &OpMat<T> {
        &self.u
    }

    pub fn u_inv(&self) -> &OpMat<T> {
        &self.u_inv
    }

    /// Clock matrix `diag(omega^0, ..., omega^(L-1))`, realizing `exp(x)`.
    pub fn v(&self) -> &OpMat<T> {
        &self.v
    }

    pub fn v_inv(&self) -> &OpMat<T> {
        &self.v_inv
    }

    /// Integer power of `U` (negative powers use the cached inverse).
    pub fn u_pow(&self, p: i32) -> OpMat<T> {
        int_pow(&self.u, &self.u_inv, p, self.local_dim)
    }

    pub fn v_pow(&self, p: i32) -> OpMat<T> {
        int_pow(&self.v, &self.v_inv, p, self.local_dim)
    }
}

fn int_pow<T: Real>(m: &OpMat<T>, m_inv: &OpMat<T>, p: i32, dim: usize) -> OpMat<T> {
    let base = if p >= 0 { m } else { m_inv };
    let mut out = OpMat::<T>::identity(dim, dim);
    for _ in 0..p.unsigned_abs() {
        out = base * out;
    }
    out
}

/// Build the clock/shift pair for local dimension `l` and root index `r`.
///
/// Orientation: `U` decrements the basis index (`U e_j = e_{j-1 mod L}`) and
/// `V = diag(omega^0, ..., omega^(L-1))`, so that `U V = omega V U` holds with
/// `omega = exp(-eta)`; this matches the ordering forced by
/// `exp(-i*eta*p) exp(x) = exp(-eta) exp(x) exp(-i*eta*p)`.
pub fn build_cyclic_rep<T: Real>(l: usize, r: i64) -> Result<CyclicWeylRep<T>> {
    if l < 2 {
        return Err(Error::InvalidRep(format!("local dimension {l} < 2")));
    }
    if r.rem_euclid(l as i64) == 0 {
        return Err(Error::InvalidRep(format!(
            "root index {r} is 0 mod {l}: omega would degenerate to 1"
        )));
    }
    let two_pi_r_over_l = 2.0 * std::f64::consts::PI * (r as f64) / (l as f64);
    let omega = cx::<T>(0.0, two_pi_r_over_l).exp();
    let eta = cx::<T>(0.0, -two_pi_r_over_l);

    let mut u = OpMat::<T>::zeros(l, l);
    let mut v = OpMat::<T>::zeros(l, l);
    let mut u_inv = OpMat::<T>::zeros(l, l);
    let mut v_inv = OpMat::<T>::zeros(l, l);
    for j in 0..l {
        u[((j + l - 1) % l, j)] = Cx::new(T::one(), T::zero());
        u_inv[((j + 1) % l, j)] = Cx::new(T::one(), T::zero());
        let phase = cx::<T>(0.0, two_pi_r_over_l * j as f64).exp();
        v[(j, j)] = phase;
        v_inv[(j, j)] = phase.inv();
    }
    Ok(CyclicWeylRep {
        local_dim: l,
        root_index: r,
        omega,
        eta,
        u,
        u_inv,
        v,
        v_inv,
    })
}

/// Dense operator on the `N`-site tensor product space, dimension `L^N`.
///
/// Site 1 is the first Kronecker factor.
#[derive(Debug, Clone)]
pub struct SiteEmbeddedOp<T: Real> {
    n_sites: usize,
    local_dim: usize,
    pub mat: OpMat<T>,
}

impl<T: Real> SiteEmbeddedOp<T> {
    pub fn new(n_sites: usize, local_dim: usize, mat: OpMat<T>) -> Self {
        let dim = local_dim.pow(n_sites as u32);
        assert_eq!(
            (mat.nrows(), mat.ncols()),
            (dim, dim),
            "operator matrix must be {dim}x{dim} for {n_sites} sites of dimension {local_dim}"
        );
        Self {
            n_sites,
            local_dim,
            mat,
        }
    }

    pub fn identity(n_sites: usize, local_dim: usize) -> Self {
        let dim = local_dim.pow(n_sites as u32);
        Self::new(n_sites, local_dim, OpMat::<T>::identity(dim, dim))
    }

    pub fn zero(n_sites: usize, local_dim: usize) -> Self {
        let dim = local_dim.pow(n_sites as u32);
        Self::new(n_sites, local_dim, OpMat::<T>::zeros(dim, dim))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    fn check_conforming(&self, other: &Self, what: &str) {
        assert_eq!(
            (self.n_sites, self.local_dim),
            (other.n_sites, other.local_dim),
            "{what}: operators live on different spaces"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_conforming(other, "add");
        Self::new(self.n_sites, self.local_dim, &self.mat + &other.mat)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_conforming(other, "sub");
        Self::new(self.n_sites, self.local_dim, &self.mat - &other.mat)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_conforming(other, "mul");
        Self::new(self.n_sites, self.local_dim, &self.mat * &other.mat)
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        let mut mat = self.mat.clone();
        mat.iter_mut().for_each(|z| *z *= c);
        Self::new(self.n_sites, self.local_dim, mat)
    }

    pub fn trace(&self) -> Cx<T> {
        self.mat.diagonal().iter().fold(Cx::zero(), |s, z| s + z)
    }

    /// Entry-wise maximum modulus.
    pub fn max_norm(&self) -> T {
        mat_max_norm(&self.mat)
    }

    /// Numerical inverse, rejected when `|A A^-1 - I|_max` exceeds
    /// [`INVERSION_RESIDUAL_LIMIT`].
    pub fn inverse(&self) -> Result<Self> {
        let inv = invert(&self.mat)?;
        Ok(Self::new(self.n_sites, self.local_dim, inv))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }
}

/// Entry-wise maximum modulus of a dense matrix.
pub fn mat_max_norm<T: Real>(m: &OpMat<T>) -> T {
    m.iter()
        .map(|z| z.norm())
        .fold(T::zero(), crate::scalar::max_t)
}

/// Invert a dense complex matrix, validating the residual.
pub fn invert<T: Real>(m: &OpMat<T>) -> Result<OpMat<T>> {
    let inv = m.clone().try_inverse().ok_or(Error::SingularMatrix {
        residual: f64::INFINITY,
        limit: INVERSION_RESIDUAL_LIMIT,
    })?;
    let dim = m.nrows();
    let residual = mat_max_norm(&(m * &inv - OpMat::<T>::identity(dim, dim))).to_f64();
    if residual > INVERSION_RESIDUAL_LIMIT {
        return Err(Error::SingularMatrix {
            residual,
            limit: INVERSION_RESIDUAL_LIMIT,
        });
    }
    Ok(inv)
}

/// Embed a local `L x L` matrix at `site` (1-based) of an `N`-site chain.
pub fn embed<T: Real>(local: &OpMat<T>, site: usize, n_sites: usize) -> Result<SiteEmbeddedOp<T>> {
    if site == 0 || site > n_sites {
        return Err(Error::DimensionMismatch(format!(
            "site {site} outside 1..={n_sites}"
        )));
    }
    let l = local.nrows();
    if local.ncols() != l {
        return Err(Error::DimensionMismatch(format!(
            "local operator is {}x{}, expected square",
            local.nrows(),
            local.ncols()
        )));
    }
    let left = OpMat::<T>::identity(l.pow((site - 1) as u32), l.pow((site - 1) as u32));
    let right = OpMat::<T>::identity(
        l.pow((n_sites - site) as u32),
        l.pow((n_sites - site) as u32),
    );
    let mat = left.kronecker(local).kronecker(&right);
    Ok(SiteEmbeddedOp::new(n_sites, l, mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    type C = Cx<f64>;

    fn weyl_residual(rep: &CyclicWeylRep<f64>) -> f64 {
        let lhs = rep.u() * rep.v();
        let mut rhs = rep.v() * rep.u();
        rhs.iter_mut().for_each(|z| *z *= rep.omega);
        mat_max_norm(&(lhs - rhs))
    }

    #[test]
    fn smallest_clock_shift_pair() {
        let rep = build_cyclic_rep::<f64>(2, 1).unwrap();
        assert!((rep.omega - C::new(-1.0, 0.0)).norm() < 1e-15);
        // U is the flip, V = diag(1, -1).
        assert_eq!(rep.u()[(0, 1)], C::new(1.0, 0.0));
        assert_eq!(rep.u()[(1, 0)], C::new(1.0, 0.0));
        assert!((rep.v()[(1, 1)] - C::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(weyl_residual(&rep) < 1e-14);
    }

    #[test]
    fn defining_relation_all_small_reps() {
        for l in 2..=8usize {
            for r in 1..l as i64 {
                let rep = build_cyclic_rep::<f64>(l, r).unwrap();
                assert!(
                    weyl_residual(&rep) < 1e-14,
                    "U V = omega V U violated for L={l}, r={r}"
                );
            }
        }
    }

    #[test]
    fn cyclicity_l4() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let u4 = rep.u_pow(4);
        let v4 = rep.v_pow(4);
        let id = OpMat::<f64>::identity(4, 4);
        assert!(mat_max_norm(&(u4 - &id)) < 1e-14);
        assert!(mat_max_norm(&(v4 - &id)) < 1e-14);
    }

    #[test]
    fn cached_inverses_are_inverses() {
        let rep = build_cyclic_rep::<f64>(6, 5).unwrap();
        let id = OpMat::<f64>::identity(6, 6);
        assert!(mat_max_norm(&(rep.u() * rep.u_inv() - &id)) < 1e-14);
        assert!(mat_max_norm(&(rep.v() * rep.v_inv() - &id)) < 1e-14);
    }

    #[test]
    fn degenerate_reps_rejected() {
        assert!(build_cyclic_rep::<f64>(1, 1).is_err());
        assert!(build_cyclic_rep::<f64>(4, 0).is_err());
        assert!(build_cyclic_rep::<f64>(4, 8).is_err());
        assert!(build_cyclic_rep::<f64>(4, -4).is_err());
    }

    #[test]
    fn embed_identity_and_homomorphism() {
        let rep = build_cyclic_rep::<f64>(3, 1).unwrap();
        let id = embed(&OpMat::<f64>::identity(3, 3), 2, 2).unwrap();
        assert!(mat_max_norm(&(id.mat.clone() - OpMat::<f64>::identity(9, 9))) < 1e-15);

        // Same-site embedding is multiplicative.
        let u1 = embed(rep.u(), 1, 2).unwrap();
        let v1 = embed(rep.v(), 1, 2).unwrap();
        let uv = embed(&(rep.u() * rep.v()), 1, 2).unwrap();
        assert!(u1.mul(&v1).sub(&uv).max_norm() < 1e-14);
    }

    #[test]
    fn disjoint_sites_commute() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let u1 = embed(rep.u(), 1, 2).unwrap();
        let v2 = embed(rep.v(), 2, 2).unwrap();
        assert!(u1.commutator(&v2).max_norm() < 1e-14);
    }

    #[test]
    fn embed_rejects_bad_site_and_shape() {
        let rep = build_cyclic_rep::<f64>(3, 1).unwrap();
        assert!(embed(rep.u(), 0, 2).is_err());
        assert!(embed(rep.u(), 3, 2).is_err());
        let rect = OpMat::<f64>::zeros(2, 3);
        assert!(embed(&rect, 1, 2).is_err());
    }

    #[test]
    fn trace_of_identity() {
        let op = SiteEmbeddedOp::<f64>::identity(3, 4);
        assert!((op.trace() - C::new(64.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_of_embedded_shift() {
        let rep = build_cyclic_rep::<f64>(4, 3).unwrap();
        let u = embed(rep.u(), 2, 2).unwrap();
        let u_inv = u.inverse().unwrap();
        let expected = embed(rep.u_inv(), 2, 2).unwrap();
        assert!(u_inv.sub(&expected).max_norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let op = SiteEmbeddedOp::<f64>::zero(1, 3);
        assert!(matches!(
            op.inverse(),
            Err(Error::SingularMatrix { .. })
        ));
    }

    fn random_op(rng: &mut StdRng, n_sites: usize, l: usize) -> SiteEmbeddedOp<f64> {
        let dim = l.pow(n_sites as u32);
        let mat = OpMat::<f64>::from_fn(dim, dim, |_, _| {
            C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        SiteEmbeddedOp::new(n_sites, l, mat)
    }

    #[test]
    fn distributivity_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let a = random_op(&mut rng, 2, 3);
            let b = random_op(&mut rng, 2, 3);
            let c = random_op(&mut rng, 2, 3);
            let lhs = a.add(&b).mul(&c);
            let rhs = a.mul(&c).add(&b.mul(&c));
            assert!(lhs.sub(&rhs).max_norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Operators embedded on distinct sites commute, for random local
        /// matrices and random distinct sites.
        #[test]
        fn embedded_distinct_sites_commute(
            seed in 0u64..1u64 << 48,
            l in 2usize..5,
            n in 2usize..4,
        ) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = OpMat::<f64>::from_fn(l, l, |_, _| {
                C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let b = OpMat::<f64>::from_fn(l, l, |_, _| {
                C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let site_a = rng.gen_range(1..=n);
            let mut site_b = rng.gen_range(1..=n);
            if site_b == site_a {
                site_b = site_a % n + 1;
            }
            let ea = embed(&a, site_a, n).unwrap();
            let eb = embed(&b, site_b, n).unwrap();
            prop_assert!(ea.commutator(&eb).max_norm() < 1e-13);
        }
    }
}
