//! R-matrix, Lax operators, monodromy, transfer matrix and Hamiltonians.
//!
//! Everything here is a finite-matrix statement in a cyclic Weyl
//! representation: the Yang-Baxter relation for the Lax operator, its lift to
//! the monodromy matrix, the mutually commuting transfer family, and the
//! equality between the Hamiltonian extracted from the transfer-matrix
//! expansion and the directly built one.

use crate::algebra::{embed, invert, mat_max_norm, CyclicWeylRep, OpMat, SiteEmbeddedOp};
use crate::error::{Error, Result};
use crate::scalar::{cx, max_t, Cx, Real};

/// 4x4 numeric R-matrix on the two auxiliary spaces.
///
/// Corners carry `sinh(u + eta)`, the middle block is
/// `[[sinh u, sinh eta], [sinh eta, sinh u]]`.
#[derive(Debug, Clone)]
pub struct RMat<T: Real> {
    pub u: Cx<T>,
    pub eta: Cx<T>,
    pub mat: OpMat<T>,
}

pub fn r_matrix<T: Real>(u: Cx<T>, eta: Cx<T>) -> RMat<T> {
    let a = (u + eta).sinh();
    let b = u.sinh();
    let c = eta.sinh();
    let zero = cx::<T>(0.0, 0.0);
    let mat = OpMat::<T>::from_row_slice(
        4,
        4,
        &[
            a, zero, zero, zero, //
            zero, b, c, zero, //
            zero, c, b, zero, //
            zero, zero, zero, a,
        ],
    );
    RMat { u, eta, mat }
}

/// 4x4 permutation of the two auxiliary spaces.
pub fn aux_swap<T: Real>() -> OpMat<T> {
    let mut p = OpMat::<T>::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            p[(a * 2 + b, b * 2 + a)] = cx::<T>(1.0, 0.0);
        }
    }
    p
}

impl<T: Real> RMat<T> {
    /// Residual of `R(u) P R(-u) P = sinh(eta+u) sinh(eta-u) I`.
    pub fn unitarity_residual(&self) -> T {
        let p = aux_swap::<T>();
        let r_neg = r_matrix(-self.u, self.eta);
        let lhs = &self.mat * &p * &r_neg.mat * &p;
        let scalar = (self.eta + self.u).sinh() * (self.eta - self.u).sinh();
        let mut rhs = OpMat::<T>::identity(4, 4);
        rhs.iter_mut().for_each(|z| *z *= scalar);
        mat_max_norm(&(lhs - rhs))
    }
}

/// 2x2 matrix in the auxiliary space with operator-valued entries.
///
/// Used for both single-site Lax operators and the ordered monodromy product.
#[derive(Debug, Clone)]
pub struct AuxOpMatrix<T: Real> {
    pub a: SiteEmbeddedOp<T>,
    pub b: SiteEmbeddedOp<T>,
    pub c: SiteEmbeddedOp<T>,
    pub d: SiteEmbeddedOp<T>,
    pub u: Cx<T>,
}

impl<T: Real> AuxOpMatrix<T> {
    /// Auxiliary-space 2x2 product `self * rhs` (operator entries multiply).
    pub fn aux_mul(&self, rhs: &Self) -> Self {
        AuxOpMatrix {
            a: self.a.mul(&rhs.a).add(&self.b.mul(&rhs.c)),
            b: self.a.mul(&rhs.b).add(&self.b.mul(&rhs.d)),
            c: self.c.mul(&rhs.a).add(&self.d.mul(&rhs.c)),
            d: self.c.mul(&rhs.b).add(&self.d.mul(&rhs.d)),
            u: self.u,
        }
    }

    /// Trace over the auxiliary space: the transfer matrix.
    pub fn aux_trace(&self) -> SiteEmbeddedOp<T> {
        self.a.add(&self.d)
    }
}

/// Lax operator at `site` of an `n_sites` chain:
/// entries `[[e^u U - e^-u U^-1, -g V], [g V^-1, 0]]`.
pub fn lax<T: Real>(
    site: usize,
    u: Cx<T>,
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> AuxOpMatrix<T> {
    let eu = u.exp();
    let eu_inv = (-u).exp();
    let mut upper = rep.u().clone();
    upper.iter_mut().for_each(|z| *z *= eu);
    let mut lower = rep.u_inv().clone();
    lower.iter_mut().for_each(|z| *z *= eu_inv);
    let a_local = upper - lower;
    let a = embed(&a_local, site, n_sites).expect("valid site");
    let b = embed(rep.v(), site, n_sites)
        .expect("valid site")
        .scale(-g);
    let c = embed(rep.v_inv(), site, n_sites)
        .expect("valid site")
        .scale(g);
    let d = SiteEmbeddedOp::zero(n_sites, rep.local_dim());
    AuxOpMatrix { a, b, c, d, u }
}

/// Ordered product `L_N(u) ... L_1(u)`.
pub fn monodromy<T: Real>(
    u: Cx<T>,
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> AuxOpMatrix<T> {
    assert!(n_sites >= 1, "monodromy needs at least one site");
    let mut t = lax(1, u, rep, g, n_sites);
    for site in 2..=n_sites {
        t = lax(site, u, rep, g, n_sites).aux_mul(&t);
    }
    t
}

/// Transfer matrix `t(u) = A(u) + D(u)`.
pub fn transfer<T: Real>(
    u: Cx<T>,
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> SiteEmbeddedOp<T> {
    monodromy(u, rep, g, n_sites).aux_trace()
}

/// Place a 2x2 aux-space operator matrix in the first auxiliary factor of
/// (aux1 x aux2 x quantum).
fn in_aux1<T: Real>(m: &AuxOpMatrix<T>) -> OpMat<T> {
    let dim = m.a.dim();
    let mut out = OpMat::<T>::zeros(4 * dim, 4 * dim);
    let entries = [[&m.a, &m.b], [&m.c, &m.d]];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                out.view_mut(((a * 2 + c) * dim, (b * 2 + c) * dim), (dim, dim))
                    .copy_from(&entries[a][b].mat);
            }
        }
    }
    out
}

/// Same in the second auxiliary factor.
fn in_aux2<T: Real>(m: &AuxOpMatrix<T>) -> OpMat<T> {
    let dim = m.a.dim();
    let mut out = OpMat::<T>::zeros(4 * dim, 4 * dim);
    let entries = [[&m.a, &m.b], [&m.c, &m.d]];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                out.view_mut(((c * 2 + a) * dim, (c * 2 + b) * dim), (dim, dim))
                    .copy_from(&entries[a][b].mat);
            }
        }
    }
    out
}

fn r_on_quantum<T: Real>(r: &RMat<T>, dim: usize) -> OpMat<T> {
    r.mat.kronecker(&OpMat::<T>::identity(dim, dim))
}

/// Yang-Baxter residual for a single Lax operator:
/// `R(u-v) L^1(u) L^2(v) - L^2(v) L^1(u) R(u-v)` on the `4 L`-dimensional
/// space (superscripts denote the auxiliary factor).
pub fn verify_ybe_lax<T: Real>(u: Cx<T>, v: Cx<T>, rep: &CyclicWeylRep<T>, g: Cx<T>) -> T {
    ybe_residual(&lax(1, u, rep, g, 1), &lax(1, v, rep, g, 1), rep.eta)
}

/// Yang-Baxter residual for the full monodromy matrix on `4 L^N` dimensions.
pub fn verify_ybe_monodromy<T: Real>(
    u1: Cx<T>,
    u2: Cx<T>,
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> T {
    ybe_residual(
        &monodromy(u1, rep, g, n_sites),
        &monodromy(u2, rep, g, n_sites),
        rep.eta,
    )
}

fn ybe_residual<T: Real>(t1: &AuxOpMatrix<T>, t2: &AuxOpMatrix<T>, eta: Cx<T>) -> T {
    let dim = t1.a.dim();
    let r = r_on_quantum(&r_matrix(t1.u - t2.u, eta), dim);
    let m1 = in_aux1(t1);
    let m2 = in_aux2(t2);
    let lhs = &r * &m1 * &m2;
    let rhs = &m2 * &m1 * &r;
    mat_max_norm(&(lhs - rhs))
}

/// Commutator residual `|[t(u), t(v)]|_max` of the transfer family.
pub fn transfer_commutator_residual<T: Real>(
    u: Cx<T>,
    v: Cx<T>,
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> T {
    transfer(u, rep, g, n_sites)
        .commutator(&transfer(v, rep, g, n_sites))
        .max_norm()
}

/// Laurent coefficients of the transfer matrix in `exp(u)`:
/// `t(u) = sum_k t_k exp(k u)` over modes `k in {N, N-2, ..., -N}`.
#[derive(Debug, Clone)]
pub struct TransferCoeffs<T: Real> {
    pub n_sites: usize,
    /// `(mode, coefficient)` ordered from `N` down to `-N`.
    pub modes: Vec<(i64, SiteEmbeddedOp<T>)>,
}

impl<T: Real> TransferCoeffs<T> {
    pub fn get(&self, mode: i64) -> Option<&SiteEmbeddedOp<T>> {
        self.modes
            .iter()
            .find(|(k, _)| *k == mode)
            .map(|(_, op)| op)
    }

    /// Reconstruct `t(u)` from the coefficients.
    pub fn eval(&self, u: Cx<T>) -> SiteEmbeddedOp<T> {
        let mut acc: Option<SiteEmbeddedOp<T>> = None;
        for (k, op) in &self.modes {
            let w = (u * cx::<T>(*k as f64, 0.0)).exp();
            let term = op.scale(w);
            acc = Some(match acc {
                Some(s) => s.add(&term),
                None => term,
            });
        }
        acc.expect("at least one mode")
    }
}

/// Extract the transfer coefficients by discrete Fourier inversion.
///
/// Writing `w = exp(-2u)`, `t(u) exp(-N u)` is a polynomial of degree `N` in
/// `w`; sampling `w` at the `(N+1)`-th roots of unity makes the inversion
/// exact for band-limited data.
pub fn transfer_coeffs<T: Real>(
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> TransferCoeffs<T> {
    let s = n_sites + 1;
    let samples: Vec<(Cx<T>, SiteEmbeddedOp<T>)> = (0..s)
        .map(|m| {
            let u = cx::<T>(0.0, std::f64::consts::PI * m as f64 / s as f64);
            (u, transfer(u, rep, g, n_sites))
        })
        .collect();
    let modes = (0..=n_sites)
        .map(|j| {
            let k = n_sites as i64 - 2 * j as i64;
            let mut acc = SiteEmbeddedOp::<T>::zero(n_sites, rep.local_dim());
            for (m, (u, t)) in samples.iter().enumerate() {
                let omega_pow =
                    cx::<T>(0.0, 2.0 * std::f64::consts::PI * (m * j) as f64 / s as f64).exp();
                let w = (-*u * cx::<T>(n_sites as f64, 0.0)).exp() * omega_pow
                    / cx::<T>(s as f64, 0.0);
                acc = acc.add(&t.scale(w));
            }
            (k, acc)
        })
        .collect();
    TransferCoeffs { n_sites, modes }
}

/// Relative residual of reconstructing `t(u)` at a held-out point.
pub fn transfer_reconstruction_residual<T: Real>(
    coeffs: &TransferCoeffs<T>,
    u: Cx<T>,
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
) -> T {
    let direct = transfer(u, rep, g, coeffs.n_sites);
    let rebuilt = coeffs.eval(u);
    let scale = max_t(direct.max_norm(), T::of(1e-30));
    rebuilt.sub(&direct).max_norm() / scale
}

/// Out-of-band energy of `t(u)`: oversample and compare the DFT bins outside
/// `{N, N-2, ..., -N}` against those inside (relative max-norm).
pub fn transfer_band_limit_residual<T: Real>(
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> T {
    let s = 2 * (n_sites + 2);
    let samples: Vec<SiteEmbeddedOp<T>> = (0..s)
        .map(|m| {
            let u = cx::<T>(0.0, std::f64::consts::PI * m as f64 / s as f64);
            transfer(u, rep, g, n_sites).scale((-u * cx::<T>(n_sites as f64, 0.0)).exp())
        })
        .collect();
    let mut in_band = T::zero();
    let mut out_band = T::zero();
    for j in 0..s {
        let mut acc = SiteEmbeddedOp::<T>::zero(n_sites, rep.local_dim());
        for (m, t) in samples.iter().enumerate() {
            let w = cx::<T>(0.0, 2.0 * std::f64::consts::PI * (m * j) as f64 / s as f64).exp()
                / cx::<T>(s as f64, 0.0);
            acc = acc.add(&t.scale(w));
        }
        let norm = acc.max_norm();
        if j <= n_sites {
            in_band = max_t(in_band, norm);
        } else {
            out_band = max_t(out_band, norm);
        }
    }
    out_band / max_t(in_band, T::of(1e-30))
}

/// Operator-ordering conventions for the coupling term of the direct
/// Hamiltonian, whose classical form does not fix the quantum ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingOrdering {
    /// Momentum cosine to the left of the exponential, as printed classically.
    CosLeft,
    /// Exponential to the left of the momentum cosine.
    CosRight,
    /// Symmetrized average of the two.
    Symmetrized,
}

impl CouplingOrdering {
    pub const ALL: [CouplingOrdering; 3] = [
        CouplingOrdering::CosLeft,
        CouplingOrdering::CosRight,
        CouplingOrdering::Symmetrized,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CouplingOrdering::CosLeft => "cos_left",
            CouplingOrdering::CosRight => "cos_right",
            CouplingOrdering::Symmetrized => "symmetrized",
        }
    }
}

/// Hamiltonian from the transfer-matrix expansion:
/// `H = -1/2 (t_{N-2} t_N^-1 + t_{2-N} t_{-N}^-1)`.
pub fn hamiltonian_from_transfer<T: Real>(
    coeffs: &TransferCoeffs<T>,
) -> Result<SiteEmbeddedOp<T>> {
    let n = coeffs.n_sites as i64;
    let t_top = coeffs
        .get(n)
        .ok_or_else(|| Error::DimensionMismatch("missing leading transfer mode".into()))?;
    let t_bot = coeffs
        .get(-n)
        .ok_or_else(|| Error::DimensionMismatch("missing trailing transfer mode".into()))?;
    let t_sub = coeffs
        .get(n - 2)
        .ok_or_else(|| Error::DimensionMismatch("missing transfer mode N-2".into()))?;
    let t_sup = coeffs
        .get(2 - n)
        .ok_or_else(|| Error::DimensionMismatch("missing transfer mode 2-N".into()))?;
    let top_inv = invert(&t_top.mat)?;
    let bot_inv = invert(&t_bot.mat)?;
    let first = &t_sub.mat * &top_inv;
    let second = &t_sup.mat * &bot_inv;
    let mut mat = first + second;
    mat.iter_mut().for_each(|z| *z *= cx::<T>(-0.5, 0.0));
    Ok(SiteEmbeddedOp::new(coeffs.n_sites, t_top.local_dim(), mat))
}

/// Directly built Hamiltonian with periodic indexing (site `N+1 = 1`):
/// kinetic part `sum_n (U_n^2 + U_n^-2)/2` plus the coupling
/// `g^2 sum_n` of `(U_n U_{n+1} + U_n^-1 U_{n+1}^-1)/2` placed against
/// `V_{n+1} V_n^-1` per the chosen ordering.
pub fn hamiltonian_direct<T: Real>(
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
    ordering: CouplingOrdering,
) -> SiteEmbeddedOp<T> {
    let l = rep.local_dim();
    let half = cx::<T>(0.5, 0.0);
    let mut h = SiteEmbeddedOp::<T>::zero(n_sites, l);
    for n in 1..=n_sites {
        let u2 = embed(&rep.u_pow(2), n, n_sites).unwrap();
        let u2_inv = embed(&rep.u_pow(-2), n, n_sites).unwrap();
        h = h.add(&u2.add(&u2_inv).scale(half));
    }
    for n in 1..=n_sites {
        let next = n % n_sites + 1;
        let (cos_part, exp_part) = if next == n {
            // Single-site chain: the periodic wrap couples the site to itself
            // and the exponential collapses to the identity.
            let cp = embed(&rep.u_pow(2), n, n_sites)
                .unwrap()
                .add(&embed(&rep.u_pow(-2), n, n_sites).unwrap())
                .scale(half);
            (cp, SiteEmbeddedOp::identity(n_sites, l))
        } else {
            let uu = embed(rep.u(), n, n_sites)
                .unwrap()
                .mul(&embed(rep.u(), next, n_sites).unwrap());
            let uu_inv = embed(rep.u_inv(), n, n_sites)
                .unwrap()
                .mul(&embed(rep.u_inv(), next, n_sites).unwrap());
            let cp = uu.add(&uu_inv).scale(half);
            let ep = embed(rep.v(), next, n_sites)
                .unwrap()
                .mul(&embed(rep.v_inv(), n, n_sites).unwrap());
            (cp, ep)
        };
        let coupling = match ordering {
            CouplingOrdering::CosLeft => cos_part.mul(&exp_part),
            CouplingOrdering::CosRight => exp_part.mul(&cos_part),
            CouplingOrdering::Symmetrized => cos_part
                .mul(&exp_part)
                .add(&exp_part.mul(&cos_part))
                .scale(half),
        };
        h = h.add(&coupling.scale(g * g));
    }
    h
}

/// Residual of the expansion Hamiltonian against the direct one, per ordering.
pub fn hamiltonian_ordering_residuals<T: Real>(
    rep: &CyclicWeylRep<T>,
    g: Cx<T>,
    n_sites: usize,
) -> Result<Vec<(CouplingOrdering, T)>> {
    let coeffs = transfer_coeffs(rep, g, n_sites);
    let h_transfer = hamiltonian_from_transfer(&coeffs)?;
    Ok(CouplingOrdering::ALL
        .iter()
        .map(|&ord| {
            let h_direct = hamiltonian_direct(rep, g, n_sites, ord);
            (ord, h_transfer.sub(&h_direct).max_norm())
        })
        .collect())
}

/// Product of the shift operators over all sites, `prod_n U_n`.
pub fn total_shift<T: Real>(rep: &CyclicWeylRep<T>, n_sites: usize) -> SiteEmbeddedOp<T> {
    let mut out = SiteEmbeddedOp::<T>::identity(n_sites, rep.local_dim());
    for n in 1..=n_sites {
        out = out.mul(&embed(rep.u(), n, n_sites).unwrap());
    }
    out
}

/// Residuals of the leading/trailing transfer coefficients against their
/// closed forms `t_N = prod U_n` and `t_{-N} = (-1)^N prod U_n^-1`.
pub fn transfer_asymptotics_residual<T: Real>(
    coeffs: &TransferCoeffs<T>,
    rep: &CyclicWeylRep<T>,
) -> Result<T> {
    let n = coeffs.n_sites;
    let shift = total_shift(rep, n);
    let shift_inv = shift.inverse()?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let top = coeffs
        .get(n as i64)
        .expect("leading mode")
        .sub(&shift)
        .max_norm();
    let bot = coeffs
        .get(-(n as i64))
        .expect("trailing mode")
        .sub(&shift_inv.scale(cx::<T>(sign, 0.0)))
        .max_norm();
    Ok(max_t(top, bot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_cyclic_rep;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    type C = Cx<f64>;

    fn rand_cx(rng: &mut StdRng, re: f64, im: f64) -> C {
        C::new(rng.gen_range(-re..re), rng.gen_range(-im..im))
    }

    #[test]
    fn r_matrix_at_zero_is_permutation() {
        let eta = C::new(0.3, 0.7);
        let r = r_matrix(C::new(0.0, 0.0), eta);
        let mut expected = aux_swap::<f64>();
        expected.iter_mut().for_each(|z| *z *= eta.sinh());
        assert!(mat_max_norm(&(r.mat - expected)) < 1e-15);
    }

    #[test]
    fn r_matrix_unitarity() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let u = rand_cx(&mut rng, 1.0, 1.5);
            let eta = rand_cx(&mut rng, 1.0, 1.5);
            assert!(r_matrix(u, eta).unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn r_matrix_at_eta_has_rank_one_middle_block() {
        let eta = C::new(0.4, -0.2);
        let r = r_matrix(eta, eta);
        let s = eta.sinh();
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((r.mat[(i, j)] - s).norm() < 1e-14);
        }
    }

    #[test]
    fn lax_lower_right_entry_is_zero() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let l = lax(1, C::new(0.2, 0.4), &rep, C::new(0.5, 0.1), 1);
        assert_eq!(l.d.max_norm(), 0.0);
    }

    #[test]
    fn lax_decouples_at_g_zero() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let t = monodromy(C::new(0.1, 0.2), &rep, C::new(0.0, 0.0), 2);
        assert_eq!(t.b.max_norm(), 0.0);
        assert_eq!(t.c.max_norm(), 0.0);
    }

    #[test]
    fn ybe_lax_coincident_points() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let u = C::new(0.3, -0.9);
        assert!(verify_ybe_lax(u, u, &rep, C::new(0.7, 0.2)) < 1e-12);
    }

    #[test]
    fn ybe_lax_random_samples() {
        let mut rng = StdRng::seed_from_u64(23);
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        for _ in 0..20 {
            let u = rand_cx(&mut rng, 0.6, 1.5);
            let v = rand_cx(&mut rng, 0.6, 1.5);
            let g = rand_cx(&mut rng, 1.0, 1.0);
            let res = verify_ybe_lax(u, v, &rep, g);
            assert!(res < 1e-11, "YBE residual {res:e} at u={u}, v={v}, g={g}");
        }
    }

    #[test]
    fn ybe_lax_shift_invariance() {
        // The relation depends on u - v only through R; a simultaneous
        // imaginary shift leaves the residual small.
        let rep = build_cyclic_rep::<f64>(6, 1).unwrap();
        let (u, v, g) = (C::new(0.2, 0.3), C::new(-0.4, 0.1), C::new(0.4, -0.3));
        let c = C::new(0.0, 0.83);
        assert!(verify_ybe_lax(u, v, &rep, g) < 1e-12);
        assert!(verify_ybe_lax(u + c, v + c, &rep, g) < 1e-12);
    }

    #[test]
    fn monodromy_single_site_is_lax() {
        let rep = build_cyclic_rep::<f64>(3, 1).unwrap();
        let u = C::new(0.5, -0.3);
        let g = C::new(0.6, 0.0);
        let t = monodromy(u, &rep, g, 1);
        let l = lax(1, u, &rep, g, 1);
        for (x, y) in [(&t.a, &l.a), (&t.b, &l.b), (&t.c, &l.c), (&t.d, &l.d)] {
            assert!(x.sub(y).max_norm() < 1e-15);
        }
    }

    #[test]
    fn ybe_monodromy_random() {
        let mut rng = StdRng::seed_from_u64(5);
        let rep = build_cyclic_rep::<f64>(3, 1).unwrap();
        for _ in 0..5 {
            let u1 = rand_cx(&mut rng, 0.5, 1.5);
            let u2 = rand_cx(&mut rng, 0.5, 1.5);
            let g = rand_cx(&mut rng, 1.0, 1.0);
            let res = verify_ybe_monodromy(u1, u2, &rep, g, 2);
            assert!(res < 1e-10, "monodromy YBE residual {res:e}");
        }
    }

    #[test]
    fn transfer_family_commutes() {
        let mut rng = StdRng::seed_from_u64(17);
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        for _ in 0..5 {
            let u = rand_cx(&mut rng, 0.5, 1.5);
            let v = rand_cx(&mut rng, 0.5, 1.5);
            let g = rand_cx(&mut rng, 1.0, 1.0);
            let res = transfer_commutator_residual(u, v, &rep, g, 3);
            assert!(res < 1e-10, "commutator residual {res:e}");
        }
    }

    #[test]
    fn transfer_coeffs_reconstruct_and_band_limit() {
        let rep = build_cyclic_rep::<f64>(4, 3).unwrap();
        let g = C::new(0.4, 0.2);
        let coeffs = transfer_coeffs(&rep, g, 3);
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..4 {
            let u = rand_cx(&mut rng, 0.4, 1.0);
            assert!(transfer_reconstruction_residual(&coeffs, u, &rep, g) < 1e-10);
        }
        assert!(transfer_band_limit_residual(&rep, g, 3) < 1e-11);
    }

    #[test]
    fn transfer_leading_coefficients() {
        for n in [2usize, 3] {
            let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
            let coeffs = transfer_coeffs(&rep, C::new(0.7, -0.1), n);
            assert!(transfer_asymptotics_residual(&coeffs, &rep).unwrap() < 1e-12);
        }
    }

    /// The coupling's cosine and exponential factors commute exactly
    /// (`p_n + p_{n+1}` commutes with `x_{n+1} - x_n`), so all three ordering
    /// conventions coincide and each matches the transfer-expansion form.
    #[test]
    fn hamiltonian_ordering_n2_n3() {
        for n in [2usize, 3] {
            let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
            let g = C::new(0.6, 0.3);
            let residuals = hamiltonian_ordering_residuals(&rep, g, n).unwrap();
            for (ord, res) in &residuals {
                assert!(*res < 1e-9, "N={n}, {}: residual {res:e}", ord.label());
            }
            let left = hamiltonian_direct(&rep, g, n, CouplingOrdering::CosLeft);
            let right = hamiltonian_direct(&rep, g, n, CouplingOrdering::CosRight);
            assert!(left.sub(&right).max_norm() < 1e-13);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_transfer() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let g = C::new(0.5, -0.2);
        let coeffs = transfer_coeffs(&rep, g, 2);
        let h = hamiltonian_from_transfer(&coeffs).unwrap();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..5 {
            let u = rand_cx(&mut rng, 0.5, 1.5);
            let t = transfer(u, &rep, g, 2);
            assert!(h.commutator(&t).max_norm() < 1e-10);
        }
        // Total-momentum symmetry: H commutes with prod U_n.
        let shift = total_shift(&rep, 2);
        assert!(h.commutator(&shift).max_norm() < 1e-11);
    }

    #[test]
    fn free_limit_hamiltonian() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let h = hamiltonian_direct(&rep, C::new(0.0, 0.0), 2, CouplingOrdering::CosLeft);
        let mut expected = SiteEmbeddedOp::<f64>::zero(2, 4);
        for n in 1..=2 {
            let u2 = embed(&rep.u_pow(2), n, 2).unwrap();
            let u2_inv = embed(&rep.u_pow(-2), n, 2).unwrap();
            expected = expected.add(&u2.add(&u2_inv).scale(C::new(0.5, 0.0)));
        }
        assert!(h.sub(&expected).max_norm() < 1e-15);
        // Diagonal in the shift eigenbasis: commutes with every U_n.
        for n in 1..=2 {
            let un = embed(rep.u(), n, 2).unwrap();
            assert!(h.commutator(&un).max_norm() < 1e-13);
        }
    }

    #[test]
    fn single_site_periodic_wrap() {
        let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
        let g = C::new(0.5, 0.0);
        let h = hamiltonian_direct(&rep, g, 1, CouplingOrdering::CosLeft);
        // (1 + g^2) (U^2 + U^-2)/2
        let kin = embed(&rep.u_pow(2), 1, 1)
            .unwrap()
            .add(&embed(&rep.u_pow(-2), 1, 1).unwrap())
            .scale(C::new(0.5, 0.0));
        let expected = kin.scale(C::new(1.0, 0.0) + g * g);
        assert!(h.sub(&expected).max_norm() < 1e-14);
    }
}
