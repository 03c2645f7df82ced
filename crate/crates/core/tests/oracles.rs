mod common;

use common::*;
use modrec::algebra::{restrict, trace_distance, Algebra, State};
use modrec::analytic::{
    filter_operator, filter_vector, filtering_entropy_curve, xi_g, xi_infimum_sequence, FilterFamily, FilterSpec,
    GammaFamily,
};
use modrec::linalg::{self, kron};
use modrec::measures::{entropy_difference, fidelity, lp_norm, lp_norm_variational, projected_norm, relative_entropy, LpParams};
use modrec::optimize::SearchBudget;
use modrec::quadrature::QuadratureSpec;
use modrec::recovery::{
    exact_sufficiency_check, nonfaithful_extend, petz_general, petz_map, rotated_petz, rotated_petz_literal, universal_bound,
    universal_recovery, universal_recovery_spectral, PetzFamily, ProjectedInclusion,
};
use modrec::standard_form::{cone_rep, v_embed};
use modrec::CMat;

const SHAPES: [&[(usize, usize)]; 4] = [&[(2, 2)], &[(2, 3)], &[(2, 2), (1, 3)], &[(1, 2), (2, 1), (1, 1)]];

#[test]
fn restriction_matches_index_loops() {
    for (i, b) in SHAPES.iter().enumerate() {
        let s = spec(b);
        let rho = state(s.n(), s.n(), 1, i as u64);
        let got = restrict(&s, &rho).unwrap();
        assert!(fro(&(got.matrix() - ptrace(rho.matrix(), b))) < 1e-14);
        let x = got.matrix().clone();
        assert!(fro(&(s.embed_matrix(&x) - embed(&x, b))) < 1e-15);
    }
}

#[test]
fn entropies_and_fidelity_match_reference() {
    for i in 0..20 {
        let rho = state(6, if i % 3 == 0 { 3 } else { 6 }, 2, i);
        let sigma = state(6, 6, 3, i);
        let s = relative_entropy(&rho, &sigma).unwrap().value();
        assert!((s - rel_entropy(rho.matrix(), sigma.matrix())).abs() < 1e-10);
        let f = fidelity(&rho, &sigma).unwrap();
        assert!((f - common::fidelity(rho.matrix(), sigma.matrix())).abs() < 1e-10);
    }
}

#[test]
fn petz_predual_matches_formula() {
    for (i, b) in SHAPES.iter().enumerate() {
        let s = spec(b);
        let sigma = state(s.n(), s.n(), 4, i as u64);
        let rho = state(s.n(), s.n(), 5, i as u64);
        let rb = restrict(&s, &rho).unwrap();
        let ch = petz_map(&s, &sigma).unwrap();
        let want = petz_predual(sigma.matrix(), rb.matrix(), b);
        assert!(fro(&(ch.predual(rb.matrix()) - want)) < 1e-10, "{b:?}");
    }
}

#[test]
fn rotated_petz_literal_and_closed_form_agree() {
    let b: &[(usize, usize)] = &[(2, 2), (1, 2)];
    let s = spec(b);
    let sigma = state(s.n(), s.n(), 6, 0);
    for t in [-1.3, -0.2, 0.0, 0.45, 2.0] {
        let a = rotated_petz(&s, &sigma, t).unwrap();
        let l = rotated_petz_literal(&s, &sigma, t).unwrap();
        assert!(a.choi_distance(&l) < 1e-10, "t = {t}");
    }
}

#[test]
fn universal_channel_matches_spectral_and_direct_integration() {
    for (i, b) in SHAPES.iter().enumerate() {
        let s = spec(b);
        let sigma = state(s.n(), s.n(), 7, i as u64);
        let rho = state(s.n(), s.n(), 8, i as u64);
        let rb = restrict(&s, &rho).unwrap();
        let quad = universal_recovery(&s, &sigma, &QuadratureSpec::default()).unwrap();
        let spectral = universal_recovery_spectral(&s, &sigma).unwrap();
        assert!(quad.choi_distance(&spectral) < 1e-10, "{b:?}: {}", quad.choi_distance(&spectral));
        let direct = universal_predual(sigma.matrix(), rb.matrix(), b, 0.02);
        assert!(fro(&(spectral.predual(rb.matrix()) - direct)) < 1e-10);
    }
}

#[test]
fn universal_predual_agrees_with_channel() {
    let s = spec(&[(2, 2)]);
    let sigma = state(4, 4, 9, 0);
    let rho = state(4, 4, 9, 1);
    let rb = restrict(&s, &rho).unwrap();
    let quad = QuadratureSpec::default();
    let fam = PetzFamily::new(&s, &sigma).unwrap();
    let ch = fam.universal(&quad).unwrap();
    let direct = fam.universal_predual(&quad, rb.matrix()).unwrap();
    assert!(fro(&(ch.predual(rb.matrix()) - &direct)) < 1e-12);
    let rec = State::new(direct, Algebra::A).unwrap();
    let r = universal_bound(&s, &rho, &sigma, &quad).unwrap();
    assert!((r.trace_distance - trace_distance(&rho, &rec).unwrap()).abs() < 1e-12);
}

#[test]
fn saturation_witness_recovers_half_half() {
    let s = spec(&[(2, 2)]);
    let sigma = State::maximally_mixed(4, Algebra::A);
    let rho = State::from_diagonal(&[1.0, 0.0, 0.0, 0.0], Algebra::A).unwrap();
    let ch = universal_recovery(&s, &sigma, &QuadratureSpec::default()).unwrap();
    let rec = ch.predual(restrict(&s, &rho).unwrap().matrix());
    let want = linalg::diag_real(&[0.5, 0.5, 0.0, 0.0]);
    assert!(fro(&(rec - want)) < 1e-12);
    let r = universal_bound(&s, &rho, &sigma, &QuadratureSpec::default()).unwrap();
    assert!((r.fidelity - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((r.neg_two_log_fidelity - 2f64.ln()).abs() < 1e-9);
    assert!((r.delta_s - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn tensor_split_pairs_are_sufficient() {
    for i in 0..20 {
        let s = spec(&[(2, 2)]);
        let rb = state(2, 2, 10, i);
        let sb = state(2, 2, 11, i);
        let sc = state(2, 2, 12, i);
        let rho = State::new(kron(rb.matrix(), sc.matrix()), Algebra::A).unwrap();
        let sigma = State::new(kron(sb.matrix(), sc.matrix()), Algebra::A).unwrap();
        let r = exact_sufficiency_check(&s, &rho, &sigma, &[-1.0, 0.0, 0.7]).unwrap();
        assert!(r.delta_s.abs() <= 1e-10);
        assert!(r.recovery_distance <= 1e-9);
        assert!(r.intertwining_residual <= 1e-9);
    }
}

#[test]
fn embedding_isometry_identities() {
    for (i, b) in SHAPES.iter().enumerate() {
        let s = spec(b);
        let sigma = state(s.n(), s.n(), 13, i as u64);
        let v = v_embed(&s, &sigma).unwrap().matrix();
        let vv = v.adjoint() * &v;
        let id = CMat::identity(vv.nrows(), vv.ncols());
        assert!(fro(&(&vv - id)) < 1e-12);
        let p = &v * v.adjoint();
        assert!(fro(&(&p * &p - &p)) < 1e-12);
    }
}

#[test]
fn channels_are_unital_and_cp() {
    for (i, b) in SHAPES.iter().enumerate() {
        let s = spec(b);
        let sigma = state(s.n(), s.n(), 14, i as u64);
        for ch in [
            petz_map(&s, &sigma).unwrap(),
            rotated_petz(&s, &sigma, 0.8).unwrap(),
            universal_recovery(&s, &sigma, &QuadratureSpec::default()).unwrap(),
        ] {
            assert!(ch.unitality_residual() < 1e-9);
            assert!(ch.min_choi_eigenvalue() > -1e-9);
        }
    }
}

#[test]
fn non_faithful_sigma_extension() {
    let b: &[(usize, usize)] = &[(2, 2)];
    let s = spec(b);
    for i in 0..5 {
        let sigma = state(4, 2, 15, i);
        let rho = state(4, 4, 16, i);
        let proj = ProjectedInclusion::new(&s, &sigma).unwrap();
        let inner = proj.petz();
        let ext = nonfaithful_extend(&s, &sigma, &inner).unwrap();
        assert!(ext.unitality_residual() < 1e-9);
        assert!(ext.min_choi_eigenvalue() > -1e-9);
        let g = petz_general(&s, &sigma).unwrap();
        assert!(g.choi_distance(&ext) < 1e-12);
        let sb = restrict(&s, &sigma).unwrap();
        assert!(fro(&(ext.predual(sb.matrix()) - sigma.matrix())) < 1e-9);
        let rb = restrict(&s, &rho).unwrap();
        let rec = ext.predual(rb.matrix());
        assert!((rec.trace().re - 1.0).abs() < 1e-10);
        assert!(linalg::min_eigenvalue(&linalg::hermitian_part(&rec)) > -1e-10);
        let proj_u = proj.universal(&QuadratureSpec::default()).unwrap();
        let ext_u = nonfaithful_extend(&s, &sigma, &proj_u).unwrap();
        assert!(ext_u.unitality_residual() < 1e-9);
    }
}

#[test]
fn lp_endpoints() {
    for i in 0..20 {
        let rho = state(4, 4, 17, i);
        let sigma = state(4, if i % 2 == 0 { 4 } else { 2 }, 18, i);
        let zeta = cone_rep(&sigma);
        let p1 = lp_norm(&zeta, &LpParams::new(1.0, rho.clone()).unwrap()).unwrap();
        assert!((p1 - common::fidelity(rho.matrix(), sigma.matrix())).abs() < 1e-10);
        let p2 = lp_norm(&zeta, &LpParams::new(2.0, rho.clone()).unwrap()).unwrap();
        assert!((p2 - projected_norm(&zeta, &rho)).abs() < 1e-10);
    }
}

#[test]
fn lp_variational_oracle() {
    let budget = SearchBudget {
        starts: 8,
        iterations: 2000,
        seed: 1,
    };
    for i in 0..3 {
        let rho = state(2, 2, 19, i);
        let zeta = cone_rep(&state(2, 2, 20, i));
        let params = LpParams::new(1.5, rho).unwrap();
        let closed = lp_norm(&zeta, &params).unwrap();
        let var = lp_norm_variational(&zeta, &params, budget).unwrap();
        assert!((closed - var.value).abs() < 1e-6, "{closed} vs {}", var.value);
    }
}

#[test]
fn gamma_bounded_on_strip_and_maximal_on_boundary() {
    let s = spec(&[(2, 2)]);
    let rho = state(4, 4, 21, 0);
    let sigma = state(4, 4, 22, 0);
    let fam = GammaFamily::new(&s, &rho, &sigma).unwrap();
    let xs: Vec<f64> = (0..=10).map(|j| j as f64 * 0.05).collect();
    let ts: Vec<f64> = (-20..=20).map(|j| j as f64 * 0.1).collect();
    let grid = fam.strip_norms(&xs, &ts).unwrap();
    let max = grid.iter().flatten().cloned().fold(0.0, f64::max);
    assert!(max <= 1.0 + 1e-10);
    let edge = grid[0].iter().chain(&grid[10]).cloned().fold(0.0, f64::max);
    assert!(edge >= max - 1e-9);
}

#[test]
fn top_edge_fidelity_bound() {
    let s = spec(&[(2, 2)]);
    for i in 0..10 {
        let rho = state(4, if i % 2 == 0 { 4 } else { 2 }, 23, i);
        let sigma = state(4, 4, 24, i);
        let fam = GammaFamily::new(&s, &rho, &sigma).unwrap();
        let r = fam.gamma_top_state_check(0.3 * i as f64 - 1.0, 16, i).unwrap();
        assert!(r.l1_norm <= r.fidelity + 1e-9);
        assert!(r.min_eigenvalue >= -1e-10);
        assert!(r.sampled_slack >= -1e-10);
    }
}

#[test]
fn filtering_curves() {
    let rho = state(4, 4, 25, 0);
    let sigma = state(4, 4, 26, 0);
    let flat = filtering_entropy_curve(&sigma, &sigma, FilterFamily::Gaussian, &[1.0, 10.0]).unwrap();
    assert!(flat.entropies.iter().all(|s| s.abs() < 1e-10));
    let curve = filtering_entropy_curve(&rho, &sigma, FilterFamily::Gaussian, &[1.0, 10.0, 100.0, 1e3, 1e4]).unwrap();
    assert!(curve.final_offset().abs() <= 1e-4);
    let bump = filtering_entropy_curve(&rho, &sigma, FilterFamily::CompactBump, &[10.0, 100.0, 1e3]).unwrap();
    let bound = 2.0 * bump.l1_norms.last().unwrap().ln();
    assert!(bump.final_offset() <= bound + 1e-6);
}

#[test]
fn filter_operator_bound_holds_across_scales() {
    let rho = state(4, 4, 27, 0);
    let sigma = state(4, 4, 28, 0);
    for p in [0.5, 1.0, 3.0, 20.0] {
        let f = FilterSpec::new(FilterFamily::Gaussian, p).unwrap();
        let a = filter_operator(&rho, &sigma, &f).unwrap();
        let v = filter_vector(&rho, &sigma, &f).unwrap();
        assert!(fro(&(&a * rho.sqrt() - v.matrix())) < 1e-9);
        assert!(linalg::op_norm(&a) <= f.l1_norm() + 1e-8);
    }
}

#[test]
fn xi_infimum_approaches_g() {
    let s = spec(&[(2, 2)]);
    let rho = state(4, 4, 29, 0);
    let sigma = state(4, 4, 30, 0);
    let th = 0.1;
    let g = xi_g(&s, &rho, &sigma, th).unwrap();
    let seq = xi_infimum_sequence(
        &s,
        &rho,
        &sigma,
        th,
        SearchBudget {
            starts: 6,
            iterations: 3000,
            seed: 2,
        },
    )
    .unwrap();
    assert!(seq.windows(2).all(|w| w[1] <= w[0]));
    let last = *seq.last().unwrap();
    assert!(last >= g - 1e-6);
    assert!(last - g < 1e-4, "{last} vs {g}");
}

#[test]
fn entropy_difference_nonnegative_example() {
    let s = spec(&[(2, 2)]);
    let rho = State::new(kron(&linalg::diag_real(&[0.7, 0.3]), &linalg::diag_real(&[0.6, 0.4])), Algebra::A).unwrap();
    let sigma = State::maximally_mixed(4, Algebra::A);
    let ds = entropy_difference(&s, &rho, &sigma).unwrap().value();
    let want = 2f64.ln() - (-(0.6f64 * 0.6f64.ln() + 0.4 * 0.4f64.ln()));
    assert!((ds - want).abs() < 1e-12);
}
