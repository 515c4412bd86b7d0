mod common;

use common::*;
use mixedforms::assembly::*;
use mixedforms::material::NeoHookeanParams;
use mixedforms::mesh::{generate_cook, markers, CookGeometry};
use mixedforms::quadrature::quadrature;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn element_residual_and_tangent_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let quad = quadrature(4).unwrap();
    let params = NeoHookeanParams::new(3.0, 40.0).unwrap();
    let h = 1e-6;
    for _ in 0..20 {
        let g = random_triangle(&mut rng);
        let s = random_local_state(&mut rng, &g, 2.0);
        let r = element_residual(&g, &s, &params, &quad).unwrap();
        let k = element_tangent(&g, &s, &params, &quad).unwrap();
        for a in 0..LOCAL_DOFS {
            let (mut sp, mut sm) = (s, s);
            sp.0[a] += h;
            sm.0[a] -= h;
            let fp = element_functional(&g, &sp, &params, &quad).unwrap();
            let fm = element_functional(&g, &sm, &params, &quad).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            assert!((fd - r[a]).abs() <= 1e-6 * (1.0 + r[a].abs()), "r[{a}]: {} vs {fd}", r[a]);
            let rp = element_residual(&g, &sp, &params, &quad).unwrap();
            let rm = element_residual(&g, &sm, &params, &quad).unwrap();
            for b in 0..LOCAL_DOFS {
                let fd = (rp[b] - rm[b]) / (2.0 * h);
                assert!((fd - k[b][a]).abs() <= 1e-5 * (1.0 + k[b][a].abs()), "K[{b}][{a}]");
            }
        }
    }
}

/// The assembled residual (with the dead load) is the gradient of the
/// assembled functional, and the assembled tangent its Hessian, including all
/// orientation signs of shared edge DoFs.
#[test]
fn assembled_system_matches_central_differences() {
    let mesh = generate_cook(&CookGeometry::default(), 0);
    let layout = DofLayout::new(&mesh);
    let params = NeoHookeanParams::new(80.0, 4000.0).unwrap();
    let mut bcs = BoundaryConditions::default();
    bcs.add_traction(&mesh, markers::COOK_LOADED, [1.0, 3.0]);
    let quad = quadrature(4).unwrap();
    let mut s = MixedState::from_deformation(&mesh, &layout, |x| [x[0] + 0.01 * x[1], x[1] + 0.002 * x[0] * x[0]]);
    for (i, v) in s.values.iter_mut().enumerate() {
        *v += 0.01 * (((i * 7919) % 13) as f64 / 13.0 - 0.5);
    }
    let alpha = 0.7;
    let sys = assemble(&mesh, &layout, &s, &params, &bcs, alpha, &quad, AssemblyMode::Full).unwrap();
    let k = sys.tangent.as_ref().unwrap().to_dense();
    let h = 1e-6;
    for a in 0..layout.len() {
        let mut sp = s.clone();
        sp.values[a] += h;
        let mut sm = s.clone();
        sm.values[a] -= h;
        let p = assemble(&mesh, &layout, &sp, &params, &bcs, alpha, &quad, AssemblyMode::Residual).unwrap();
        let m = assemble(&mesh, &layout, &sm, &params, &bcs, alpha, &quad, AssemblyMode::Residual).unwrap();
        let fd = (p.value - m.value) / (2.0 * h);
        assert!((fd - sys.residual[a]).abs() <= 1e-5 * (1.0 + sys.residual[a].abs()), "R[{a}]");
        for b in 0..layout.len() {
            let fd = (p.residual[b] - m.residual[b]) / (2.0 * h);
            assert!((fd - k[b][a]).abs() <= 1e-5 * (1.0 + k[b][a].abs()), "K[{b}][{a}]");
        }
    }
    assert!(sys.tangent.unwrap().max_asymmetry() < 1e-9);
}
