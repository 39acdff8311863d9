use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rtm_core::modelkit::{build_gradient_model, Grid2D, ScalarField};
use rtm_core::raytools::*;
use std::f64::consts::PI;

#[test]
fn constant_medium_matches_closed_forms_at_random_points() {
    let g = Grid2D::new(261, 231, 10.0, (-1300.0, -100.0)).unwrap();
    let c0 = 2000.0;
    let c = ScalarField::constant(g, c0);
    let go = go_fields(&c, [0.0, 0.0], &FanSpec::downgoing(4001, c0, 10.0, 1.5)).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_t: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for _ in 0..100 {
        let i = rng.random_range(20..g.nx1 - 20);
        let j = rng.random_range(30..g.nx2 - 20);
        let (x1, x2) = g.coords(i, j);
        let r = x1.hypot(x2);
        let t = r / c0;
        let a = (c0 / (8.0 * PI * r)).sqrt();
        worst_t = worst_t.max((go.t_s.at(i, j) - t).abs());
        worst_a = worst_a.max((go.a_s.at(i, j) - a).abs() / a);
    }
    println!("constant c: max |T err| {worst_t:.2e} s, max A rel err {worst_a:.2e}");
    assert!(worst_t < 1e-6);
    assert!(worst_a <= 1e-3);
}

#[test]
fn gradient_model_eikonal_and_direction() {
    let g = Grid2D::new(321, 321, 10.0, (-600.0, -600.0)).unwrap();
    let c = build_gradient_model(g, 2000.0, 1.0).unwrap();
    let go = go_fields(&c, [0.0, 0.0], &FanSpec::downgoing(4001, c.max(), 10.0, 2.0)).unwrap();
    let zone = [0.0, 2000.0, 200.0, 1800.0];
    let mut worst_eik: f64 = 0.0;
    let mut worst_ang: f64 = 0.0;
    let mut cells = 0;
    for j in 1..g.nx2 - 1 {
        for i in 1..g.nx1 - 1 {
            let (x1, x2) = g.coords(i, j);
            if x1 < zone[0] || x1 > zone[1] || x2 < zone[2] || x2 > zone[3] {
                continue;
            }
            let near = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1), (i, j)];
            if near.iter().any(|&(a, b)| !go.valid(g.idx(a, b))) {
                continue;
            }
            cells += 1;
            let gx = (go.t_s.at(i + 1, j) - go.t_s.at(i - 1, j)) / (2.0 * g.dx);
            let gz = (go.t_s.at(i, j + 1) - go.t_s.at(i, j - 1)) / (2.0 * g.dx);
            let ci = c.at(i, j);
            worst_eik = worst_eik.max((gx.hypot(gz) - 1.0 / ci).abs() * ci);
            let ns = go.ns_at(i, j);
            let cross = (ci * gx) * ns[1] - (ci * gz) * ns[0];
            let dotp = (ci * gx) * ns[0] + (ci * gz) * ns[1];
            worst_ang = worst_ang.max(cross.atan2(dotp).abs());
        }
    }
    println!("gradient model: {cells} cells, eikonal residual {worst_eik:.2e}, direction {worst_ang:.2e} rad, caustic cells {}", go.caustic_cells());
    assert!(cells > 30000);
    assert!(worst_eik <= 1e-3);
    assert!(worst_ang <= 1e-2);
    assert_eq!(go.multipath_fraction(zone), 0.0);
    assert_eq!(go.caustic_cells(), 0);
    assert!(go.check_sme(zone, 0.0).is_ok());
}

fn random_unit(rng: &mut StdRng) -> [f64; 2] {
    let a = rng.random_range(0.0..2.0 * PI);
    [a.cos(), a.sin()]
}

#[test]
fn covariable_algebra() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100_000 {
        let ns = random_unit(&mut rng);
        let m = rng.random_range(1e-3..10.0);
        let d = random_unit(&mut rng);
        let xi = [m * d[0], m * d[1]];
        let z = zeta_from_xi(xi, ns);
        let zn = z[0] * ns[0] + z[1] * ns[1];
        assert!(zn <= 0.0);
        if zn < -1e-9 * m {
            assert!(zn < 0.0);
        }
    }
    let mut worst_rt: f64 = 0.0;
    let mut worst_jac: f64 = 0.0;
    for _ in 0..1000 {
        let ns = random_unit(&mut rng);
        let m = rng.random_range(0.01..5.0);
        let mut d = random_unit(&mut rng);
        // keep away from xi parallel to n_s, where zeta degenerates
        if d[0] * ns[0] + d[1] * ns[1] > 0.99 {
            d = [-d[0], -d[1]];
        }
        let xi = [m * d[0], m * d[1]];
        let back = xi_from_zeta(zeta_from_xi(xi, ns), ns).unwrap();
        worst_rt = worst_rt.max((back[0] - xi[0]).hypot(back[1] - xi[1]) / m);

        let h = 1e-6 * m;
        let col = |k: usize| {
            let mut a = xi;
            let mut b = xi;
            a[k] += h;
            b[k] -= h;
            let (za, zb) = (zeta_from_xi(a, ns), zeta_from_xi(b, ns));
            [(za[0] - zb[0]) / (2.0 * h), (za[1] - zb[1]) / (2.0 * h)]
        };
        let (c0, c1) = (col(0), col(1));
        let det = c0[0] * c1[1] - c1[0] * c0[1];
        let jac = snell_jacobian(xi, ns);
        worst_jac = worst_jac.max((det - jac).abs() / jac.abs().max(1e-3));
    }
    println!("round trip {worst_rt:.2e}, jacobian {worst_jac:.2e}");
    assert!(worst_rt <= 1e-12);
    assert!(worst_jac <= 1e-6);
}

proptest! {
    #[test]
    fn zeta_lies_in_closed_halfspace(a in 0.0..2.0 * PI, b in 0.0..2.0 * PI, m in 1e-6f64..1e3) {
        let ns = [a.cos(), a.sin()];
        let xi = [m * b.cos(), m * b.sin()];
        let z = zeta_from_xi(xi, ns);
        prop_assert!(z[0] * ns[0] + z[1] * ns[1] <= 1e-12 * m);
    }

    #[test]
    fn xi_zeta_round_trip(a in 0.0..2.0 * PI, b in 0.0..2.0 * PI, m in 1e-3f64..1e3) {
        let ns = [a.cos(), a.sin()];
        let zeta = [m * b.cos(), m * b.sin()];
        let zn = zeta[0] * ns[0] + zeta[1] * ns[1];
        prop_assume!(zn < -1e-3 * m);
        let xi = xi_from_zeta(zeta, ns).unwrap();
        let back = zeta_from_xi(xi, ns);
        prop_assert!((back[0] - zeta[0]).hypot(back[1] - zeta[1]) <= 1e-10 * m);
        let j = snell_jacobian(xi, ns);
        prop_assert!((0.0..=2.0).contains(&j));
    }
}
