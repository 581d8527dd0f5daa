//! Values checked against closed forms derived independently of the library.

use chiral_blocks::blocks::chiral_image_basis;
use chiral_blocks::exterior::sphere_monomial_integral;
use chiral_blocks::fock::cocycle_pairing;
use chiral_blocks::spectra::{assemble_w, build_hpi, build_hpp_second, eigenlevel_cached, v_inner};
use chiral_blocks::{GaussScalar, PolyForm};

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// Harmonic polynomials of degree `i` in `n` variables.
fn harmonic_polys(n: usize, i: usize) -> usize {
    binom(i + n - 1, n - 1) - if i >= 2 { binom(i + n - 3, n - 1) } else { 0 }
}

/// Coclosed harmonic p-forms of degree i: d* maps the harmonic p-forms onto
/// the coclosed harmonic (p−1)-forms of degree i−1.
fn coclosed_harmonic(n: usize, p: usize, i: usize) -> usize {
    let all = binom(n, p) * harmonic_polys(n, i);
    if p == 0 || i == 0 {
        return all;
    }
    all - coclosed_harmonic(n, p - 1, i - 1)
}

#[test]
fn coclosed_harmonic_dimensions() {
    assert_eq!(coclosed_harmonic(6, 2, 1), 84);
    assert_eq!(coclosed_harmonic(6, 2, 2), 265);
    assert_eq!(coclosed_harmonic(6, 2, 3), 636);
    for (i, expected) in [(1, 84), (2, 265), (3, 636)] {
        assert_eq!(build_hpi(1, 2, i).unwrap().dim(), expected);
    }
    assert_eq!(build_hpi(0, 0, 2).unwrap().dim(), 2);
}

#[test]
fn eigenspace_dimensions() {
    for (k, i) in [(0, 1), (0, 5), (1, 1), (1, 2)] {
        let expected = 2 * binom(4 * k + i, 2 * k) * binom(2 * k + i - 1, 2 * k);
        assert_eq!(build_hpp_second(k, 2 * k, i as u32).unwrap().dim(), expected, "k={k} i={i}");
    }
}

#[test]
fn circle_integrals_by_quadrature() {
    // the trapezoid rule is exact for trigonometric polynomials of low degree
    let steps = 64;
    for a in [[0u16, 0], [2, 0], [4, 2], [6, 0], [3, 1], [2, 2]] {
        let sum: f64 = (0..steps)
            .map(|t| {
                let th = 2.0 * std::f64::consts::PI * t as f64 / steps as f64;
                th.cos().powi(a[0] as i32) * th.sin().powi(a[1] as i32)
            })
            .sum();
        let quad = sum * 2.0 * std::f64::consts::PI / steps as f64;
        let exact = sphere_monomial_integral(&a).unwrap().to_f64();
        assert!((quad - exact).abs() < 1e-12, "{a:?}: {quad} vs {exact}");
    }
}

#[test]
fn six_sphere_volume() {
    // Vol(S⁵) = π³
    let v = sphere_monomial_integral(&[0; 6]).unwrap();
    assert_eq!(v.value, GaussScalar::from_i64(1));
    // ∫x₁² = Vol/6 by symmetry
    let x2 = sphere_monomial_integral(&[2, 0, 0, 0, 0, 0]).unwrap();
    assert_eq!(x2.value * GaussScalar::from_i64(6), GaussScalar::from_i64(1));
}

fn x(j: usize) -> PolyForm {
    PolyForm::coord(2, j)
}

#[test]
fn fourier_weights() {
    // cos θ has L² norm π on the circle, weighted by √λ = 1
    let l1 = eigenlevel_cached(0, 1).unwrap();
    assert_eq!(v_inner(&l1, &x(0), &x(0)).unwrap().value, GaussScalar::from_i64(1));
    // cos 2θ = x₁² − x₂², weight 2
    let l2 = eigenlevel_cached(0, 2).unwrap();
    let c2 = &x(0).mul_function(&x(0)) - &x(1).mul_function(&x(1));
    assert_eq!(v_inner(&l2, &c2, &c2).unwrap().value, GaussScalar::from_i64(2));
    // ∫ cos θ d(sin θ) = π
    assert_eq!(cocycle_pairing(&x(0), &x(1)).unwrap().value, GaussScalar::from_i64(1));
}

#[test]
fn circle_w_is_holomorphic() {
    let w = assemble_w(0, 3).unwrap();
    let reps = chiral_image_basis(0, 3).unwrap();
    let z = &x(0) + &x(1).scale(&GaussScalar::i());
    let mut zi = PolyForm::constant(2, GaussScalar::from_i64(1));
    for (i, rep) in reps.iter().enumerate() {
        zi = zi.mul_function(&z);
        let (key, c) = zi.terms().next().unwrap();
        let ratio = c.clone() / rep.b.coefficient(key);
        assert_eq!(rep.b.scale(&ratio), zi, "level {}", i + 1);
    }
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                assert_eq!(w.gram[(a, b)], GaussScalar::from_i64(0));
            }
        }
    }
}
