//! The governing equations of the densities and their convolutions, checked
//! in residual form with the operators module.

use nonlocal_heat::functions::Datum;
use nonlocal_heat::laplace::{density_h, elliptic_plus, h_convolution, l_convolution, resolvent_at_zero};
use nonlocal_heat::num::deriv1;
use nonlocal_heat::operators::{marchaud_right, riemann_liouville_left, QuadratureConfig, SampledFunction};
use nonlocal_heat::paths::{mc_resolvent, McConfig};
use nonlocal_heat::{BernsteinSymbol, Problem};

fn cfg() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-9,
        rel_tol: 1e-8,
        fd_tol: 1e-9,
        taylor_width: 1e-2,
        ..Default::default()
    }
}

fn bump() -> SampledFunction {
    Datum::Bump { center: 1.0, width: 0.8 }.build().unwrap().zero_extended()
}

fn half() -> BernsteinSymbol {
    BernsteinSymbol::stable(0.5).unwrap()
}

#[test]
fn density_h_solves_the_forward_equation() {
    // ∂ₜh(t,y) = −𝐃_{y+}h(t,y): the density seen from y is h(t, y − x) seen from x.
    let sym = half();
    let dt = 1e-4;
    for t in [0.5, 1.0] {
        for y in [0.3, 0.5, 1.0, 2.0] {
            let s = sym.clone();
            let h = SampledFunction::new(move |z| density_h(&s, t, z).unwrap())
                .zero_extended()
                .with_scale(0.05);
            let dh = (density_h(&sym, t + dt, y).unwrap() - density_h(&sym, t - dt, y).unwrap()) / (2.0 * dt);
            let r = (dh + marchaud_right(&h, y, &sym, &cfg()).unwrap()).abs();
            assert!(r < 1e-3, "t={t} y={y}: {r}");
        }
    }
}

#[test]
fn h_convolution_solves_its_equation() {
    let sym = half();
    let f = bump();
    let t = 1.0;
    let dt = 1e-3;
    for x in [1.0, 1.5, 2.0] {
        let (s, g) = (sym.clone(), f.clone());
        let hf = SampledFunction::new(move |z| h_convolution(&s, &g, t, z).unwrap())
            .zero_extended()
            .with_scale(0.2);
        let d_t = (h_convolution(&sym, &f, t + dt, x).unwrap() - h_convolution(&sym, &f, t - dt, x).unwrap()) / (2.0 * dt);
        let r = (d_t + marchaud_right(&hf, x, &sym, &cfg()).unwrap()).abs();
        assert!(r < 1e-3, "x={x}: {r}");
    }
}

#[test]
fn l_convolution_solves_its_equation() {
    // l_f(·,x) − f(x) grows like √t, so the memory term is taken in
    // Riemann–Liouville form, minus f(x)Π̄(t), rather than through l_f′.
    let sym = half();
    let f = bump();
    let t = 1.0;
    let loose = QuadratureConfig {
        abs_tol: 1e-7,
        rel_tol: 1e-7,
        ..cfg()
    };
    for x in [1.0, 1.5] {
        let (s, g) = (sym.clone(), f.clone());
        let in_time = SampledFunction::new(move |tau| l_convolution(&s, &g, tau, x).unwrap()).with_scale(0.2);
        let memory = riemann_liouville_left(&in_time, t, &sym, &loose).unwrap() - f.eval(x) * sym.tail(t);
        let d_x = deriv1(&|z| l_convolution(&sym, &f, t, z).unwrap(), x, 1e-3, 0.0);
        let r = (memory + d_x).abs();
        assert!(r < 1e-3, "x={x}: {r}");
    }
}

#[test]
fn abel_equation_recovers_the_datum() {
    // h̄_f = ∫h_f dt is w₊ at λ = 0, and 𝐃ₓ₊h̄_f = f.
    let sym = half();
    let f = bump();
    let g = f.clone();
    let s = sym.clone();
    let bar = SampledFunction::new(move |x| elliptic_plus(&g, 0.0, x, &s).unwrap())
        .zero_extended()
        .with_scale(0.2);
    for x in [0.5, 1.0, 1.5, 2.5] {
        let r = (marchaud_right(&bar, x, &sym, &cfg()).unwrap() - f.eval(x)).abs();
        assert!(r < 1e-3, "x={x}: {r}");
    }
}

#[test]
fn boundary_resolvent_matches_the_potential_of_the_process() {
    let sym = half();
    let f = SampledFunction::exp_sum(vec![(1.0, 1.0)]);
    let p = Problem::new(sym.clone(), sym.clone(), 1.0, f.clone()).unwrap();
    let target = resolvent_at_zero(&f, 1.0, 1.0, &sym, &sym).unwrap();
    let mc = McConfig {
        paths: 20_000,
        dt: 1e-3,
        seed: 5,
        ..Default::default()
    };
    let horizon = 12.0;
    let e = mc_resolvent(&p, 1.0, 0.0, horizon, 0.01, &mc).unwrap();
    let tail = (-horizon).exp();
    assert!((e.mean - target).abs() <= 3.0 * e.se + tail, "{e:?} vs {target}");
}
