//! Flat (Euclidean) operators: d, *, d*, Δ and the Euler contraction.

use super::{BasisKey, PolyForm};
use crate::scalar::GaussScalar;

fn count_below(indices: &[u8], j: u8) -> usize {
    indices.iter().take_while(|&&i| i < j).count()
}

impl PolyForm {
    /// Exterior derivative.
    pub fn ext_d(&self) -> PolyForm {
        let n = self.n();
        if self.degree() == n {
            return PolyForm::zero(n, n);
        }
        let mut out = PolyForm::zero(n, self.degree() + 1);
        for (key, c) in self.terms() {
            for j in 0..n {
                let a = key.exps[j];
                if a == 0 || key.indices.contains(&(j as u8)) {
                    continue;
                }
                let pos = count_below(&key.indices, j as u8);
                let mut indices = key.indices.clone();
                indices.insert(pos, j as u8);
                let mut exps = key.exps.clone();
                exps[j] -= 1;
                let coeff = c.scale(&crate::scalar::int(a as i64));
                out.add_term(BasisKey { indices, exps }, if pos % 2 == 1 { -coeff } else { coeff });
            }
        }
        out
    }

    /// Hodge star for the Euclidean metric with `dx_1 ∧ … ∧ dx_n` positive:
    /// `dx_I ∧ *dx_I = vol`.
    pub fn hodge_star(&self) -> PolyForm {
        let n = self.n();
        let mut out = PolyForm::zero(n, n - self.degree());
        for (key, c) in self.terms() {
            let complement: Vec<u8> = (0..n as u8).filter(|j| !key.indices.contains(j)).collect();
            let inversions: usize = key.indices.iter().enumerate().map(|(t, &i)| i as usize - t).sum();
            let coeff = if inversions % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(BasisKey { indices: complement, exps: key.exps.clone() }, coeff);
        }
        out
    }

    /// Codifferential `d* = −Σ_j ι(∂_j) ∂_j`, the formal adjoint of `d`.
    /// On even-dimensional space this coincides with `−*d*`.
    pub fn codiff(&self) -> PolyForm {
        let n = self.n();
        if self.degree() == 0 {
            return PolyForm::zero(n, 0);
        }
        let mut out = PolyForm::zero(n, self.degree() - 1);
        for (key, c) in self.terms() {
            for (pos, &j) in key.indices.iter().enumerate() {
                let a = key.exps[j as usize];
                if a == 0 {
                    continue;
                }
                let mut indices = key.indices.clone();
                indices.remove(pos);
                let mut exps = key.exps.clone();
                exps[j as usize] -= 1;
                let coeff = c.scale(&crate::scalar::int(a as i64));
                // -(-1)^pos
                out.add_term(BasisKey { indices, exps }, if pos % 2 == 0 { -coeff } else { coeff });
            }
        }
        out
    }

    /// Hodge Laplacian `Δ = d d* + d* d`.
    pub fn laplacian(&self) -> PolyForm {
        let n = self.n();
        let mut out = PolyForm::zero(n, self.degree());
        if self.degree() > 0 {
            out = self.codiff().ext_d();
        }
        if self.degree() < n {
            out = &out + &self.ext_d().codiff();
        }
        out
    }

    /// Interior product with the Euler field `Σ x_j ∂_j`.
    pub fn euler_contract(&self) -> PolyForm {
        let n = self.n();
        if self.degree() == 0 {
            return PolyForm::zero(n, 0);
        }
        let mut out = PolyForm::zero(n, self.degree() - 1);
        for (key, c) in self.terms() {
            for (pos, &j) in key.indices.iter().enumerate() {
                let mut indices = key.indices.clone();
                indices.remove(pos);
                let mut exps = key.exps.clone();
                exps[j as usize] += 1;
                out.add_term(BasisKey { indices, exps }, if pos % 2 == 1 { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    /// `true` when the Euler contraction vanishes identically.
    pub fn is_tangential(&self) -> bool {
        self.euler_contract().is_zero()
    }

    /// A polynomial form with vanishing Euler contraction that agrees with
    /// `self` on the unit sphere modulo the normal direction:
    /// `|x|²·ω − ν ∧ ι_E ω` with `ν = Σ x_j dx_j`. Its restriction to the
    /// sphere equals the pullback of `ω`.
    pub fn tangential_part(&self) -> PolyForm {
        let n = self.n();
        let r2 = PolyForm::radius_squared(n);
        let scaled = self.mul_function(&r2);
        if self.degree() == 0 {
            return scaled;
        }
        let normal = PolyForm::radial_form(n).wedge(&self.euler_contract()).expect("degree preserved");
        &scaled - &normal
    }

    /// `(1 − s·i·*)` applied to `self`, where `s = ±1`; the kernel of this
    /// map on middle-degree forms is the `*`-eigenspace with eigenvalue `−s·i`.
    pub fn chirality_defect(&self, sign: i64) -> PolyForm {
        let star = self.hodge_star();
        let mut out = self.clone();
        out.add_scaled(&GaussScalar::from_ints(0, -sign), &star);
        out
    }

    /// Partial derivative of every coefficient along `x_j`.
    pub fn partial(&self, j: usize) -> PolyForm {
        let mut out = PolyForm::zero(self.n(), self.degree());
        for (key, c) in self.terms() {
            let a = key.exps[j];
            if a == 0 {
                continue;
            }
            let mut exps = key.exps.clone();
            exps[j] -= 1;
            out.add_term(BasisKey { indices: key.indices.clone(), exps }, c.scale(&crate::scalar::int(a as i64)));
        }
        out
    }

    /// Sum of homogeneous parts: `(degree, part)` in increasing degree.
    pub fn homogeneous_parts(&self) -> Vec<(u32, PolyForm)> {
        let mut parts: std::collections::BTreeMap<u32, PolyForm> = Default::default();
        for (key, c) in self.terms() {
            parts
                .entry(key.degree())
                .or_insert_with(|| PolyForm::zero(self.n(), self.degree()))
                .add_term(key.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussScalar as G;

    fn x(n: usize, j: usize) -> PolyForm {
        PolyForm::coord(n, j)
    }
    fn dx(n: usize, j: usize) -> PolyForm {
        PolyForm::dx(n, j)
    }
    fn c(n: usize, v: i64) -> PolyForm {
        PolyForm::constant(n, G::from_i64(v))
    }
    fn vol(n: usize) -> PolyForm {
        PolyForm::monomial(n, &vec![0; n], &(0..n).collect::<Vec<_>>(), G::from_i64(1)).unwrap()
    }

    #[test]
    fn exterior_derivative_examples() {
        assert_eq!(x(2, 0).ext_d(), dx(2, 0));
        let exact = &x(2, 0).wedge(&dx(2, 1)).unwrap() + &x(2, 1).wedge(&dx(2, 0)).unwrap();
        assert!(exact.ext_d().is_zero());
        assert_eq!(x(2, 0).wedge(&dx(2, 1)).unwrap().ext_d(), vol(2));
    }

    #[test]
    fn hodge_star_examples() {
        assert_eq!(dx(2, 0).hodge_star(), dx(2, 1));
        assert_eq!(dx(2, 0).hodge_star().hodge_star(), -&dx(2, 0));
        let d123 = PolyForm::monomial(6, &[0; 6], &[0, 1, 2], G::from_i64(1)).unwrap();
        let d456 = PolyForm::monomial(6, &[0; 6], &[3, 4, 5], G::from_i64(1)).unwrap();
        assert_eq!(d123.hodge_star(), d456);
        assert_eq!(c(2, 1).hodge_star(), vol(2));
    }

    #[test]
    fn codifferential_examples() {
        assert!(dx(2, 0).codiff().is_zero());
        let w = x(2, 0).wedge(&dx(2, 0)).unwrap();
        assert_eq!(w.codiff(), c(2, -1));
        let f = x(2, 0).mul_function(&x(2, 1));
        assert!(f.ext_d().codiff().is_zero());
        assert!(c(2, 3).codiff().is_zero());
    }

    #[test]
    fn codiff_matches_star_d_star() {
        let w = &x(2, 0).wedge(&dx(2, 1)).unwrap() + &x(2, 1).mul_function(&x(2, 1)).wedge(&dx(2, 0)).unwrap();
        assert_eq!(w.codiff(), -&w.hodge_star().ext_d().hodge_star());
    }

    #[test]
    fn laplacian_examples() {
        let h = &x(2, 0).mul_function(&x(2, 0)) - &x(2, 1).mul_function(&x(2, 1));
        assert!(h.laplacian().is_zero());
        assert_eq!(x(2, 0).mul_function(&x(2, 0)).laplacian(), c(2, -2));
        assert!(dx(2, 0).laplacian().is_zero());
    }

    #[test]
    fn euler_contraction_examples() {
        assert_eq!(dx(2, 0).euler_contract(), x(2, 0));
        let expected = &x(2, 0).wedge(&dx(2, 1)).unwrap() - &x(2, 1).wedge(&dx(2, 0)).unwrap();
        assert_eq!(vol(2).euler_contract(), expected);
        let w = x(2, 0).wedge(&dx(2, 1)).unwrap();
        let cartan = &w.euler_contract().ext_d() + &w.ext_d().euler_contract();
        assert_eq!(cartan, w.scale(&G::from_i64(2)));
        assert!(c(2, 1).euler_contract().is_zero());
    }

    #[test]
    fn tangential_part_is_tangential() {
        let w = &x(4, 0).wedge(&dx(4, 2)).unwrap() + &dx(4, 1);
        let t = w.tangential_part();
        assert!(t.is_tangential());
        assert!(!w.is_tangential());
        // radial form restricts to zero
        assert!(PolyForm::radial_form(4).tangential_part().is_zero());
    }

    #[test]
    fn chirality_of_z() {
        let n = 2;
        let z = &x(n, 0) + &x(n, 1).scale(&G::i());
        assert!(z.ext_d().chirality_defect(1).is_zero());
        assert!(!z.ext_d().chirality_defect(-1).is_zero());
        assert_eq!(z.ext_d().hodge_star(), z.ext_d().scale(&G::from_ints(0, -1)));
    }
}
