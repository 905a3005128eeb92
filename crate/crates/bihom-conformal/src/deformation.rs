//! One-parameter formal deformations of a regular algebra: a bilinear
//! datum ψ deforms the bracket to `[a_λ b] + t·ψ(a, b)` with `t` a formal
//! variable, the three identities that make the deformed bracket an
//! algebra identically in t, Nijenhuis operators, and the triviality
//! certificate `T_t = id + t·f` with its t-degree matching.
//!
//! ψ is stored at its diagonal specialization: the tensor entry at
//! (i, j) is the value of `ψ_(λ, −∂−λ)(eᵢ, eⱼ)` as a polynomial in
//! `(del, l0)`, and ψ extends sesquilinearly exactly like a bracket, so
//! nested evaluations reuse the shared tensor machinery.

use crate::algebra::{
    jacobi_terms, residuals_to_report, tensor_eval_at, tensor_skew_residual, unit, AlgebraElement,
    CheckReport, ConformalAlgebra, EndoMatrix, LabeledResiduals, LambdaVector, Tensor,
};
use crate::poly::{lam, tvar, Poly, Scalar, VarId};
use crate::Error;
use num_traits::Zero;

/// The generator of a deformation: tensor `ψ[i][j][k]` in `(del, l0)`
/// meaning `ψ_(λ,−∂−λ)(eᵢ, eⱼ) = Σₖ ψ[i][j][k] eₖ`. The second spectral
/// subscript is determined by the first, so only the diagonal form is
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearDatum {
    values: Tensor,
}

impl BilinearDatum {
    pub fn new(values: Tensor) -> Result<Self, Error> {
        let n = values.len();
        for row in &values {
            if row.len() != n {
                return Err(Error::Shape("bilinear datum must be cubic".to_string()));
            }
            for cell in row {
                if cell.len() != n {
                    return Err(Error::Shape("bilinear datum must be cubic".to_string()));
                }
                for p in cell {
                    let ok = p
                        .vars_used()
                        .iter()
                        .all(|&v| v == VarId::Del || v == VarId::Slot(0));
                    if !ok {
                        return Err(Error::Shape(format!(
                            "bilinear datum entry `{p}` may use only del and l0"
                        )));
                    }
                }
            }
        }
        Ok(BilinearDatum { values })
    }

    pub fn zero(n: usize) -> Self {
        BilinearDatum {
            values: vec![vec![vec![Poly::zero(); n]; n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &Tensor {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().flatten().all(Poly::is_zero)
    }

    /// Sesquilinear evaluation at an arbitrary spectral polynomial.
    #[allow(dead_code)]
    pub(crate) fn eval_at(&self, a: &[Poly], b: &[Poly], at: &Poly) -> Vec<Poly> {
        tensor_eval_at(&self.values, a, b, at)
    }
}

/// A base algebra together with a deformation generator; the deformed
/// bracket is `[a_λ b] + t·ψ(a, b)` with `t` formal, never evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalDeformation {
    base: ConformalAlgebra,
    psi: BilinearDatum,
}

impl FormalDeformation {
    pub fn new(base: ConformalAlgebra, psi: BilinearDatum) -> Result<Self, Error> {
        if psi.n() != base.rank() {
            return Err(Error::RankMismatch {
                expected: base.rank(),
                got: psi.n(),
            });
        }
        Ok(FormalDeformation { base, psi })
    }

    pub fn base(&self) -> &ConformalAlgebra {
        &self.base
    }

    pub fn psi(&self) -> &BilinearDatum {
        &self.psi
    }

    /// The deformed bracket tensor `p + t·ψ`.
    pub fn deformed_tensor(&self) -> Tensor {
        let t = tvar();
        let n = self.base.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| {
                                &self.base.bracket_tensor()[i][j][k]
                                    + &(&t * &self.psi.values()[i][j][k])
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Sesquilinear evaluation of the deformed bracket; the result may
    /// carry the formal variable `t`.
    pub fn bracket_eval(
        &self,
        a: &AlgebraElement,
        b: &AlgebraElement,
    ) -> Result<LambdaVector, Error> {
        let n = self.base.rank();
        if a.len() != n || b.len() != n {
            return Err(Error::RankMismatch {
                expected: n,
                got: if a.len() != n { a.len() } else { b.len() },
            });
        }
        let tensor = self.deformed_tensor();
        Ok(LambdaVector {
            coeffs: tensor_eval_at(&tensor, a.coeffs(), b.coeffs(), &lam()),
        })
    }
}

/// Skew, square, and mixed identities for a deformation generator: the
/// three conditions equivalent to the deformed bracket satisfying the
/// algebra axioms identically in t (the t⁰ level being the base).
pub fn check_deformation(def: &FormalDeformation) -> Result<CheckReport, Error> {
    let base = def.base();
    let breport = base.check();
    if !breport.passed() {
        return Err(Error::Precondition(format!(
            "deformation base fails the axiom suite: {}",
            breport.failures[0]
        )));
    }
    let n = base.rank();
    let alpha = base.alpha();
    let beta = base.beta();
    let psi = def.psi().values();
    let bracket = base.bracket_tensor();
    let mut set = LabeledResiduals::new();
    for i in 0..n {
        for j in 0..n {
            let res = tensor_skew_residual(alpha, beta, psi, i, j);
            set.push(("deformation-skew", vec![i + 1, j + 1], res));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // t² level: the square identity for ψ alone.
                let (l, r1, r2) = jacobi_terms(alpha, beta, psi, psi, i, j, k);
                let res: Vec<Poly> = (0..n).map(|c| &(&l[c] - &r1[c]) - &r2[c]).collect();
                set.push(("deformation-square", vec![i + 1, j + 1, k + 1], res));

                // t¹ level: the mixed bracket/ψ identity.
                let (lb, rb1, rb2) = jacobi_terms(alpha, beta, bracket, psi, i, j, k);
                let (lp, rp1, rp2) = jacobi_terms(alpha, beta, psi, bracket, i, j, k);
                let res: Vec<Poly> = (0..n)
                    .map(|c| {
                        let lhs = &lb[c] + &lp[c];
                        let rhs = &(&(&rb1[c] + &rp1[c]) + &rb2[c]) + &rp2[c];
                        &lhs - &rhs
                    })
                    .collect();
                set.push(("deformation-mixed", vec![i + 1, j + 1, k + 1], res));
            }
        }
    }
    Ok(residuals_to_report(set))
}

/// A ℚ[∂]-module map commuting with both twists, the carrier for
/// Nijenhuis operators (a spectral-free conformal linear map applied
/// without the λ-shift).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisCandidate {
    map: EndoMatrix,
}

impl NijenhuisCandidate {
    pub fn new(map: EndoMatrix) -> Self {
        NijenhuisCandidate { map }
    }

    /// From a conformal linear map with spectral-free entries.
    pub fn from_clm(d: &crate::derivations::ConformalLinearMap) -> Result<Self, Error> {
        Ok(NijenhuisCandidate { map: d.to_endo()? })
    }

    pub fn map(&self) -> &EndoMatrix {
        &self.map
    }

    pub fn identity(n: usize) -> Self {
        NijenhuisCandidate {
            map: EndoMatrix::identity(n),
        }
    }

    pub fn zero(n: usize) -> Self {
        NijenhuisCandidate {
            map: EndoMatrix::identity(n).sub(&EndoMatrix::identity(n)),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        NijenhuisCandidate {
            map: EndoMatrix::new(
                self.map
                    .entries()
                    .iter()
                    .map(|r| r.iter().map(|p| p.scale(c)).collect())
                    .collect(),
            )
            .expect("scaling preserves shape"),
        }
    }

    pub fn is_scalar(&self) -> bool {
        let n = self.map.n();
        if n == 0 {
            return true;
        }
        let c = self.map.entry(0, 0).clone();
        let scaled = EndoMatrix::new(
            EndoMatrix::identity(n)
                .entries()
                .iter()
                .map(|r| r.iter().map(|p| p * &c).collect())
                .collect(),
        )
        .expect("square");
        self.map.sub(&scaled).is_zero()
    }

    fn require_commuting(&self, algebra: &ConformalAlgebra) -> Result<(), Error> {
        if self.map.n() != algebra.rank() {
            return Err(Error::RankMismatch {
                expected: algebra.rank(),
                got: self.map.n(),
            });
        }
        if !self.map.commutes_with(algebra.alpha()) || !self.map.commutes_with(algebra.beta()) {
            return Err(Error::Precondition(
                "candidate must commute with both twists".to_string(),
            ));
        }
        Ok(())
    }
}

/// The deformed-bracket datum of a candidate map:
/// `ψ(eᵢ, eⱼ) = [f(eᵢ)_λ eⱼ] + [eᵢ_λ f(eⱼ)] − f([eᵢ_λ eⱼ])`.
pub fn nijenhuis_bracket(
    algebra: &ConformalAlgebra,
    f: &NijenhuisCandidate,
) -> Result<BilinearDatum, Error> {
    f.require_commuting(algebra)?;
    let n = algebra.rank();
    let mut values = vec![vec![vec![Poly::zero(); n]; n]; n];
    for i in 0..n {
        let fi = f.map().apply_coeffs(&unit(n, i));
        for j in 0..n {
            let fj = f.map().apply_coeffs(&unit(n, j));
            let t1 = algebra.bracket_eval_at(&fi, &unit(n, j), &lam());
            let t2 = algebra.bracket_eval_at(&unit(n, i), &fj, &lam());
            let plain = algebra.bracket_eval_at(&unit(n, i), &unit(n, j), &lam());
            let t3 = f.map().apply_coeffs(&plain);
            for k in 0..n {
                values[i][j][k] = &(&t1[k] + &t2[k]) - &t3[k];
            }
        }
    }
    BilinearDatum::new(values)
}

/// The defining identity of a Nijenhuis operator on all basis pairs:
/// `[f(a)_λ f(b)] = f([a_λ b]_N)` with the deformed bracket from
/// [`nijenhuis_bracket`]. Commutation with the twists is a precondition,
/// rejected before the identity is attempted.
pub fn check_nijenhuis(
    algebra: &ConformalAlgebra,
    f: &NijenhuisCandidate,
) -> Result<CheckReport, Error> {
    f.require_commuting(algebra)?;
    let n = algebra.rank();
    let deformed = nijenhuis_bracket(algebra, f)?;
    let mut set = LabeledResiduals::new();
    for i in 0..n {
        let fi = f.map().apply_coeffs(&unit(n, i));
        for j in 0..n {
            let fj = f.map().apply_coeffs(&unit(n, j));
            let lhs = algebra.bracket_eval_at(&fi, &fj, &lam());
            let rhs = f.map().apply_coeffs(&deformed.values()[i][j]);
            let res: Vec<Poly> = (0..n).map(|c| &lhs[c] - &rhs[c]).collect();
            set.push(("nijenhuis", vec![i + 1, j + 1], res));
        }
    }
    Ok(residuals_to_report(set))
}

/// The deformation generated by a Nijenhuis operator: `ψ = [·_λ·]_N`.
/// The Nijenhuis identity is verified first; the returned deformation is
/// expected to pass [`check_deformation`] and [`check_triviality`].
pub fn deformation_from_nijenhuis(
    algebra: &ConformalAlgebra,
    f: &NijenhuisCandidate,
) -> Result<FormalDeformation, Error> {
    let report = check_nijenhuis(algebra, f)?;
    if !report.passed() {
        return Err(Error::Precondition(format!(
            "candidate fails the Nijenhuis identity: {}",
            report.failures[0]
        )));
    }
    FormalDeformation::new(algebra.clone(), nijenhuis_bracket(algebra, f)?)
}

/// Triviality certificate: `T_t([a_λ b]_t) = [T_t(a)_λ T_t(b)]` with
/// `T_t = id + t·f`, matched degree by degree in t (t⁰ is the base
/// bracket; t¹ and t² are reported separately). Requires the deformation
/// to be the one generated by `f`.
pub fn check_triviality(
    def: &FormalDeformation,
    f: &NijenhuisCandidate,
) -> Result<CheckReport, Error> {
    let algebra = def.base();
    f.require_commuting(algebra)?;
    let expected = nijenhuis_bracket(algebra, f)?;
    if &expected != def.psi() {
        return Err(Error::Precondition(
            "deformation was not generated by the given operator".to_string(),
        ));
    }
    let n = algebra.rank();
    let t = tvar();
    let deformed = def.deformed_tensor();
    let mut set = LabeledResiduals::new();
    for i in 0..n {
        for j in 0..n {
            // T_t([eᵢ_λ eⱼ]_t) = (id + tf) of the deformed bracket.
            let value = tensor_eval_at(&deformed, &unit(n, i), &unit(n, j), &lam());
            let f_value = f.map().apply_coeffs(&value);
            let lhs: Vec<Poly> = (0..n).map(|c| &value[c] + &(&t * &f_value[c])).collect();

            // [T_t(eᵢ)_λ T_t(eⱼ)] under the base bracket.
            let fi = f.map().apply_coeffs(&unit(n, i));
            let ti: Vec<Poly> = (0..n).map(|c| &unit(n, i)[c] + &(&t * &fi[c])).collect();
            let fj = f.map().apply_coeffs(&unit(n, j));
            let tj: Vec<Poly> = (0..n).map(|c| &unit(n, j)[c] + &(&t * &fj[c])).collect();
            let rhs = algebra.bracket_eval_at(&ti, &tj, &lam());

            let residual: Vec<Poly> = (0..n).map(|c| &lhs[c] - &rhs[c]).collect();
            for deg in 0..=2u32 {
                let level: Vec<Poly> = residual
                    .iter()
                    .map(|p| p.coefficients_of(VarId::T).remove(&deg).unwrap_or_default())
                    .collect();
                let tag = match deg {
                    0 => "triviality-t0",
                    1 => "triviality-t1",
                    _ => "triviality-t2",
                };
                set.push((tag, vec![i + 1, j + 1], level));
            }
            // Structural bookkeeping: nothing beyond t² may appear.
            let overflow: Vec<Poly> = residual
                .iter()
                .map(|p| {
                    let mut out = Poly::zero();
                    for (deg, q) in p.coefficients_of(VarId::T) {
                        if deg > 2 {
                            out += q;
                        }
                    }
                    out
                })
                .collect();
            set.push(("triviality-degree", vec![i + 1, j + 1], overflow));
        }
    }
    Ok(residuals_to_report(set))
}

/// Small exhaustive search for a non-scalar Nijenhuis operator: scans
/// constant matrices with entries in the box `[-bound, bound]` and
/// returns the first non-scalar twist-commuting candidate passing the
/// Nijenhuis identity.
pub fn find_nonscalar_nijenhuis(
    algebra: &ConformalAlgebra,
    bound: i64,
) -> Option<NijenhuisCandidate> {
    let n = algebra.rank();
    let mut counters = vec![0i64; n * n];
    loop {
        let entries: Vec<Vec<Poly>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| Poly::from_int(counters[r * n + c] - bound))
                    .collect()
            })
            .collect();
        if let Ok(m) = EndoMatrix::new(entries) {
            let cand = NijenhuisCandidate::new(m);
            if !cand.is_scalar()
                && cand.require_commuting(algebra).is_ok()
                && check_nijenhuis(algebra, &cand)
                    .map(|r| r.passed())
                    .unwrap_or(false)
            {
                return Some(cand);
            }
        }
        // Odometer step over the box.
        let mut pos = 0;
        loop {
            if pos == counters.len() {
                return None;
            }
            counters[pos] += 1;
            if counters[pos] <= 2 * bound {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};
    use crate::samples::{current_xy, twisted2};

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn deformed_bracket_definitional() {
        let a = twisted2();
        // ψ = 0 reproduces the base bracket with no t anywhere.
        let zero = FormalDeformation::new(a.clone(), BilinearDatum::zero(2)).unwrap();
        let x = a.basis_element(0);
        let y = a.basis_element(1);
        assert_eq!(
            zero.bracket_eval(&x, &y).unwrap(),
            a.bracket_eval(&x, &y).unwrap()
        );

        // With a nonzero ψ the value is p + t·ψ at each pair.
        let mut values = vec![vec![vec![Poly::zero(); 2]; 2]; 2];
        values[0][1][1] = p("del + l0");
        let psi = BilinearDatum::new(values).unwrap();
        let def = FormalDeformation::new(a.clone(), psi).unwrap();
        let v = def.bracket_eval(&x, &y).unwrap();
        assert_eq!(v.coeffs[1], p("3 + t*del + t*l0"));
    }

    #[test]
    fn zero_psi_passes_deformation_check() {
        let a = twisted2();
        let def = FormalDeformation::new(a, BilinearDatum::zero(2)).unwrap();
        assert!(check_deformation(&def).unwrap().passed());
    }

    #[test]
    fn bracket_as_psi_passes_on_lie_conformal_base() {
        // ψ equal to the bracket itself deforms an untwisted algebra into
        // a rescaled copy; the square and mixed identities reduce to the
        // base identities.
        let a = current_xy();
        let psi = BilinearDatum::new(a.bracket_tensor().clone()).unwrap();
        let def = FormalDeformation::new(a, psi).unwrap();
        assert!(check_deformation(&def).unwrap().passed());
    }

    #[test]
    fn broken_skew_psi_is_reported() {
        let a = twisted2();
        let mut values = vec![vec![vec![Poly::zero(); 2]; 2]; 2];
        // Same sign both ways breaks the skew identity.
        values[0][1][1] = Poly::one();
        values[1][0][1] = Poly::one();
        let def = FormalDeformation::new(a, BilinearDatum::new(values).unwrap()).unwrap();
        let report = check_deformation(&def).unwrap();
        assert!(!report.passed());
        assert!(report
            .failures
            .iter()
            .any(|f| f.axiom == "deformation-skew"));
    }

    #[test]
    fn deformation_check_matches_t_extended_axioms() {
        // The three identities hold exactly when the deformed tensor
        // satisfies skew-symmetry and the twisted Jacobi identity with t
        // riding along as a passive variable.
        let a = twisted2();
        let candidates: Vec<BilinearDatum> = vec![
            BilinearDatum::zero(2),
            nijenhuis_bracket(&a, &NijenhuisCandidate::new(EndoMatrix::diag_ints(&[1, 2])))
                .unwrap(),
            {
                let mut values = vec![vec![vec![Poly::zero(); 2]; 2]; 2];
                values[0][1][1] = p("l0");
                values[1][0][1] = p("del + l0");
                BilinearDatum::new(values).unwrap()
            },
        ];
        for psi in candidates {
            let def = FormalDeformation::new(a.clone(), psi).unwrap();
            let via_check = check_deformation(&def).unwrap().passed();
            let tensor = def.deformed_tensor();
            let mut t_extended_ok = true;
            for i in 0..2 {
                for j in 0..2 {
                    let res = tensor_skew_residual(a.alpha(), a.beta(), &tensor, i, j);
                    if res.iter().any(|q| !q.is_zero()) {
                        t_extended_ok = false;
                    }
                    for k in 0..2 {
                        let (l, r1, r2) =
                            jacobi_terms(a.alpha(), a.beta(), &tensor, &tensor, i, j, k);
                        if (0..2).any(|c| !(&(&l[c] - &r1[c]) - &r2[c]).is_zero()) {
                            t_extended_ok = false;
                        }
                    }
                }
            }
            assert_eq!(via_check, t_extended_ok);
        }
    }

    #[test]
    fn nijenhuis_bracket_special_cases() {
        let a = twisted2();
        let zero = NijenhuisCandidate::zero(2);
        assert!(nijenhuis_bracket(&a, &zero).unwrap().is_zero());

        let id = NijenhuisCandidate::identity(2);
        let psi = nijenhuis_bracket(&a, &id).unwrap();
        assert_eq!(psi.values(), a.bracket_tensor());

        let half = id.scale(&rat(1, 2));
        let psi_half = nijenhuis_bracket(&a, &half).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(
                        psi_half.values()[i][j][k],
                        a.bracket_tensor()[i][j][k].scale(&rat(1, 2))
                    );
                }
            }
        }
    }

    #[test]
    fn nijenhuis_check_examples() {
        let a = twisted2();
        for c in [int(1), rat(3, 2), int(-2)] {
            let f = NijenhuisCandidate::identity(2).scale(&c);
            assert!(check_nijenhuis(&a, &f).unwrap().passed());
        }
        // Projection onto the ideal spanned by y.
        let proj = NijenhuisCandidate::new(EndoMatrix::diag_ints(&[0, 1]));
        assert!(check_nijenhuis(&a, &proj).unwrap().passed());
        // A map failing twist commutation is rejected before the identity.
        let bad = NijenhuisCandidate::new(
            EndoMatrix::new(vec![vec![p("0"), p("1")], vec![p("0"), p("0")]]).unwrap(),
        );
        assert!(check_nijenhuis(&a, &bad).is_err());
    }

    #[test]
    fn psi_skew_holds_for_any_commuting_map() {
        // The skew identity for ψ needs only twist commutation, not the
        // Nijenhuis identity; exercised with del-dependent diagonals.
        let a = twisted2();
        for f in [
            NijenhuisCandidate::new(
                EndoMatrix::new(vec![vec![p("del"), p("0")], vec![p("0"), p("0")]]).unwrap(),
            ),
            NijenhuisCandidate::new(
                EndoMatrix::new(vec![vec![p("1 + del^2"), p("0")], vec![p("0"), p("del")]])
                    .unwrap(),
            ),
        ] {
            let psi = nijenhuis_bracket(&a, &f).unwrap();
            let def = FormalDeformation::new(a.clone(), psi).unwrap();
            let report = check_deformation(&def).unwrap();
            assert!(!report
                .failures
                .iter()
                .any(|fail| fail.axiom == "deformation-skew"));
        }
    }

    #[test]
    fn theorem_pipeline_end_to_end() {
        // Nijenhuis ⇒ deformation ⇒ trivial, with the t-levels matched.
        let a = twisted2();
        let candidates = vec![
            NijenhuisCandidate::zero(2),
            NijenhuisCandidate::identity(2),
            NijenhuisCandidate::identity(2).scale(&rat(3, 2)),
            find_nonscalar_nijenhuis(&a, 2).expect("search finds a non-scalar operator"),
        ];
        for f in candidates {
            assert!(check_nijenhuis(&a, &f).unwrap().passed());
            let def = deformation_from_nijenhuis(&a, &f).unwrap();
            assert!(check_deformation(&def).unwrap().passed());
            assert!(check_triviality(&def, &f).unwrap().passed());
        }
    }

    #[test]
    fn triviality_rejects_foreign_deformation() {
        let a = twisted2();
        let f = NijenhuisCandidate::identity(2);
        let other = FormalDeformation::new(a.clone(), BilinearDatum::zero(2)).unwrap();
        assert!(check_triviality(&other, &f).is_err());
    }

    #[test]
    fn t_degree_bookkeeping() {
        let a = twisted2();
        let f = NijenhuisCandidate::new(EndoMatrix::diag_ints(&[1, 2]));
        let def = deformation_from_nijenhuis(&a, &f).unwrap();
        let x = a.basis_element(0);
        let y = a.basis_element(1);
        let v = def.bracket_eval(&x, &y).unwrap();
        for c in &v.coeffs {
            assert!(c.degree_in(VarId::T) <= 1);
        }
        let report = check_triviality(&def, &f).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn found_nonscalar_candidate_is_genuinely_nonscalar() {
        let a = twisted2();
        let f = find_nonscalar_nijenhuis(&a, 2).unwrap();
        assert!(!f.is_scalar());
        assert!(check_nijenhuis(&a, &f).unwrap().passed());
    }
}
