//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test -p rtoda-core --test acceptance -- --nocapture` to see
//! the per-criterion summary lines.

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rtoda_core::algebra::build_cyclic_rep;
use rtoda_core::bethe::{
    derive_params, energy_identity_residual, lambda_leading_phase_residual,
    lambda_leading_product_residual, product_form_residual, solve_bae, tq_consistency_residual,
    verify_unwanted,
};
use rtoda_core::gauge::{
    verify_gauged_commutations, verify_vector_relations, GaugeVariant,
};
use rtoda_core::lattice::{
    hamiltonian_ordering_residuals, transfer_asymptotics_residual, transfer_coeffs,
    transfer_commutator_residual, verify_ybe_lax, verify_ybe_monodromy,
};
use rtoda_core::wavefun::{
    verify_global_actions, verify_local_actions, verify_offshell_action, VacuumSpec,
};

fn rand_cx(rng: &mut StdRng, re: f64, im: f64) -> C {
    C::new(rng.gen_range(-re..re), rng.gen_range(-im..im))
}

fn report(criterion: u32, label: &str, worst: f64, tol: f64) {
    let verdict = if worst < tol { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {criterion}: {label} (worst residual {worst:.3e}, tolerance {tol:.1e})");
    assert!(
        worst < tol,
        "criterion {criterion} failed: {label}: {worst:.3e} >= {tol:.1e}"
    );
}

/// 1. Lax-level Yang-Baxter relation over the cyclic representations.
#[test]
fn acceptance_1_yang_baxter_lax() {
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for (l, r) in [(3usize, 1i64), (3, 2), (4, 1), (4, 3), (6, 1), (6, 5)] {
        let rep = build_cyclic_rep::<f64>(l, r).unwrap();
        for _ in 0..20 {
            let u = rand_cx(&mut rng, 0.5, 1.5);
            let v = rand_cx(&mut rng, 0.5, 1.5);
            let g = rand_cx(&mut rng, 1.0, 1.0);
            worst = worst.max(verify_ybe_lax(u, v, &rep, g));
        }
    }
    report(1, "Lax Yang-Baxter, L in {3,4,6}, 20 samples each", worst, 1e-10);
}

/// 2. Monodromy-level Yang-Baxter relation and the commuting transfer family.
#[test]
fn acceptance_2_yang_baxter_monodromy_commuting_family() {
    let mut rng = StdRng::seed_from_u64(202);
    let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
    let n_sites = 3;
    let mut worst_ybe: f64 = 0.0;
    let mut worst_comm: f64 = 0.0;
    for _ in 0..20 {
        let u1 = rand_cx(&mut rng, 0.5, 1.5);
        let u2 = rand_cx(&mut rng, 0.5, 1.5);
        let g = rand_cx(&mut rng, 1.0, 1.0);
        worst_ybe = worst_ybe.max(verify_ybe_monodromy(u1, u2, &rep, g, n_sites));
        worst_comm = worst_comm.max(transfer_commutator_residual(u1, u2, &rep, g, n_sites));
    }
    report(2, "monodromy Yang-Baxter, L=4, N=3, 20 pairs", worst_ybe, 1e-10);
    report(2, "[t(u), t(v)] commuting family, 20 pairs", worst_comm, 1e-10);
}

/// 3. Transfer-expansion Hamiltonian vs the direct construction, and the
/// leading transfer coefficients.
#[test]
fn acceptance_3_hamiltonian_identity() {
    let mut rng = StdRng::seed_from_u64(303);
    let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
    let mut worst_match: f64 = 0.0;
    let mut worst_asym: f64 = 0.0;
    for n in [2usize, 3] {
        let g = rand_cx(&mut rng, 1.0, 1.0);
        let residuals = hamiltonian_ordering_residuals(&rep, g, n).unwrap();
        let (best_ord, best) = residuals
            .iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        println!(
            "    N={n}: matching ordering convention `{}` (all three agree: {:?})",
            best_ord.label(),
            residuals
                .iter()
                .map(|(o, r)| format!("{}={r:.2e}", o.label()))
                .collect::<Vec<_>>()
        );
        worst_match = worst_match.max(*best);
        let coeffs = transfer_coeffs(&rep, g, n);
        worst_asym = worst_asym.max(transfer_asymptotics_residual(&coeffs, &rep).unwrap());
    }
    report(3, "H from transfer expansion vs direct, L=4, N in {2,3}", worst_match, 1e-9);
    report(3, "leading coefficients t_{+-N} closed form", worst_asym, 1e-12);
}

/// 4. The eight gauge-vector exchange relations, both variants.
#[test]
fn acceptance_4_vector_exchange_relations() {
    let mut rng = StdRng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for variant in [GaugeVariant::A, GaugeVariant::B] {
        let mut done = 0;
        while done < 50 {
            let eta = rand_cx(&mut rng, 0.8, 0.8);
            let m = rand_cx(&mut rng, 1.5, 1.5);
            // Keep the index ladder away from the sinh zeros.
            let safe = (-2..=2).all(|off| ((m + C::new(off as f64, 0.0)) * eta).sinh().norm() > 0.15);
            if !safe || eta.norm() < 0.2 {
                continue;
            }
            let u1 = rand_cx(&mut rng, 0.7, 1.5);
            let u2 = rand_cx(&mut rng, 0.7, 1.5);
            let res = verify_vector_relations(variant, u1, u2, m, eta).unwrap();
            for r in res {
                worst = worst.max(r);
            }
            done += 1;
        }
    }
    report(4, "eight vector exchange relations, 50 triples, variants A and B", worst, 1e-12);
}

/// 5. Commutation relations of the gauged monodromy entries in the cyclic
/// representation.
#[test]
fn acceptance_5_gauged_commutation_relations() {
    let mut rng = StdRng::seed_from_u64(505);
    let rep = build_cyclic_rep::<f64>(4, 1).unwrap();
    let mut worst: f64 = 0.0;
    for n_sites in [1usize, 2, 3] {
        let mut done = 0;
        while done < 10 {
            let m_prime = rand_cx(&mut rng, 1.5, 1.5);
            let m = rand_cx(&mut rng, 1.5, 1.5);
            let safe = |k: C| {
                (-2..=2).all(|off| ((k + C::new(off as f64, 0.0)) * rep.eta).sinh().norm() > 0.15)
            };
            if !safe(m_prime) || !safe(m) {
                continue;
            }
            let u1 = rand_cx(&mut rng, 0.5, 1.0);
            let u2 = rand_cx(&mut rng, 0.5, 1.0);
            if (u1 - u2).sinh().norm() < 0.05 {
                continue;
            }
            let g = rand_cx(&mut rng, 1.0, 1.0);
            match verify_gauged_commutations(GaugeVariant::A, m_prime, m, u1, u2, &rep, g, n_sites)
            {
                Ok(check) => {
                    worst = worst.max(check.cc).max(check.ac).max(check.dc_printed);
                    done += 1;
                }
                Err(_) => continue,
            }
        }
    }
    report(5, "C-C, A-C, D-C commutation relations, N in {1,2,3}, 10 samples each", worst, 1e-10);
}

/// 6. Vacuum suite: local and global annihilation/shift identities, both
/// variants.
#[test]
fn acceptance_6_vacuum_suite() {
    let mut rng = StdRng::seed_from_u64(606);
    let mut worst: f64 = 0.0;
    for variant in [GaugeVariant::A, GaugeVariant::B] {
        for n_sites in [1usize, 2, 3] {
            for _ in 0..10 {
                let eta = match variant {
                    GaugeVariant::A => C::new(rng.gen_range(0.2..1.5), rng.gen_range(-0.4..0.4)),
                    GaugeVariant::B => C::new(rng.gen_range(-1.5..-0.2), rng.gen_range(-0.4..0.4)),
                };
                let g_mod = match variant {
                    GaugeVariant::A => rng.gen_range(0.3..0.9),
                    GaugeVariant::B => 1.0 / rng.gen_range(0.3..0.9),
                };
                let g = C::from_polar(g_mod, rng.gen_range(-3.0..3.0));
                let alpha = rand_cx(&mut rng, 1.0, 1.0);
                let spec = VacuumSpec::new(variant, alpha, eta, g).unwrap();
                let u = rand_cx(&mut rng, 0.8, 1.5);
                let n_label = rng.gen_range(1..=n_sites);
                let local = verify_local_actions(&spec, n_label, u).unwrap();
                let global = verify_global_actions(&spec, n_sites, u).unwrap();
                for r in [
                    local.b_annihilation,
                    local.a_shift,
                    local.d_shift,
                    global.b_annihilation,
                    global.a_shift,
                    global.d_shift,
                ] {
                    worst = worst.max(r);
                }
            }
        }
    }
    report(6, "vacuum annihilation/shift identities, N in {1,2,3}, variants A and B", worst, 1e-11);
}

/// 7. Off-shell action of the diagonal gauged entries on Bethe-type states,
/// including the exchange-product denominator question.
#[test]
fn acceptance_7_offshell_action() {
    let mut rng = StdRng::seed_from_u64(707);
    let mut worst: f64 = 0.0;
    let mut printed_best = f64::INFINITY;
    for (n_sites, m_roots) in [(1usize, 1usize), (2, 1), (1, 2)] {
        let g = C::from_polar(rng.gen_range(0.4..0.7), rng.gen_range(-1.0..1.0));
        let params = derive_params::<f64>(n_sites, m_roots, 1, g, 0.0).unwrap();
        let alpha = rand_cx(&mut rng, 0.6, 0.6);
        let spec = VacuumSpec::new(GaugeVariant::A, alpha, params.eta, g).unwrap();
        let roots: Vec<C> = (0..m_roots)
            .map(|j| C::new(0.8 * (j as f64 + 0.4) * (-1.0f64).powi(j as i32), 0.3 + 0.25 * j as f64))
            .collect();
        let u = C::new(-0.55, 0.7);
        let check = verify_offshell_action(&spec, n_sites, &roots, u).unwrap();
        worst = worst.max(check.a_offshell).max(check.d_offshell);
        if m_roots >= 2 {
            printed_best = printed_best.min(check.d_offshell_printed_denominator);
        }
    }
    println!(
        "    exchange-product denominator: sinh(u_j - u_l) satisfies the identity; \
         the printed sinh(u_j + u_l) form misses by {printed_best:.3e}"
    );
    assert!(printed_best > 1e-6, "printed denominator unexpectedly valid");
    report(7, "off-shell A/D action, (N,M) in {(1,1),(2,1),(1,2)}", worst, 1e-10);
}

/// 8. Bethe solver self-consistency battery.
#[test]
fn acceptance_8_bethe_solver() {
    let g = C::new((-0.5f64).exp(), 0.0);
    let mut worst_log: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    let mut worst_unwanted: f64 = 0.0;
    let mut worst_band: f64 = 0.0;
    let mut worst_leading: f64 = 0.0;
    let mut worst_phase: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    let mut worst_tq: f64 = 0.0;
    let mut worst_closed_form: f64 = 0.0;
    for m_roots in [1usize, 2] {
        for q in [1i64, 2] {
            for k in [0.0, 1.0] {
                let params = derive_params::<f64>(2, m_roots, q, g, k).unwrap();
                let branch: Vec<i64> = (0..m_roots as i64).collect();
                let sol = solve_bae(&params, Some(&branch), None).unwrap();
                worst_log = worst_log.max(sol.residual);
                worst_product = worst_product.max(product_form_residual(&params, &sol.roots));
                worst_unwanted = worst_unwanted.max(verify_unwanted(&params, &sol.roots).worst());
                worst_band = worst_band.max(sol.lambda.out_of_band);
                worst_leading = worst_leading.max(lambda_leading_product_residual(&sol).unwrap());
                worst_phase = worst_phase.max(lambda_leading_phase_residual(&sol).unwrap());
                worst_energy = worst_energy.max(energy_identity_residual(&sol).unwrap());
                worst_tq = worst_tq.max(
                    tq_consistency_residual(&params, &sol.roots, C::new(0.31, 0.43)).unwrap(),
                );
                if m_roots == 1 {
                    // Branch 0 closed form: lambda_1 = i eta K / N.
                    let expected = rtoda_core::cx::<f64>(0.0, 1.0) * params.eta * params.k_momentum
                        / C::new(2.0, 0.0);
                    worst_closed_form = worst_closed_form.max((sol.roots[0] - expected).norm());
                    if q == 1 {
                        // eta = 1/2 real: lambda_1 = i K / 4.
                        let frozen = C::new(0.0, k / 4.0);
                        worst_closed_form =
                            worst_closed_form.max((sol.roots[0] - frozen).norm());
                    }
                }
            }
        }
    }
    report(8, "logarithmic residual", worst_log, 1e-12);
    report(8, "product-form residual", worst_product, 1e-11);
    report(8, "unwanted terms vanish", worst_unwanted, 1e-10);
    report(8, "Lambda band-limited to modes {N..-N}", worst_band, 1e-9);
    report(
        8,
        "Lambda_N Lambda_{-N} = g^{2N} e^{(N+2M) eta} (= (-1)^N under the constraint)",
        worst_leading,
        1e-10,
    );
    report(8, "Lambda_N e^{i eta K} sign-resolved asymptotics", worst_phase, 1e-10);
    report(8, "energy identity E vs Laurent-coefficient form", worst_energy, 1e-9);
    report(8, "T-Q two-form consistency", worst_tq, 1e-10);
    report(8, "closed-form M=1 root recovered (branch 0)", worst_closed_form, 1e-12);
}
