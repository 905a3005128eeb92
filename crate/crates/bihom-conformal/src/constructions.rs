//! The four algebra-building procedures: twisting a conformal algebra by
//! a pair of commuting multiplicative maps, promoting a finite
//! BiHom-Lie algebra to its current conformal algebra, the semidirect
//! product with a module, and the rank-one extension by a derivation.
//!
//! Each constructor validates its hypotheses and returns an algebra whose
//! axiom suite is expected to pass; the tests replay that expectation.

use crate::algebra::{
    unit, BiHomLieAlgebra, ConformalAlgebra, ConformalModule, EndoMatrix, Tensor,
};
use crate::derivations::ConformalLinearMap;
use crate::poly::{lam, minus_del_minus, Poly};
use crate::Error;

/// Twist of a conformal algebra with identity twists (a Lie conformal
/// algebra datum) by commuting multiplicative maps `a`, `b`: the new
/// bracket is `[eᵢ_λ eⱼ]' = [a(eᵢ)_λ b(eⱼ)]` and the twist pair of the
/// result is `(a, b)`.
pub fn yau_twist(
    base: &ConformalAlgebra,
    a: &EndoMatrix,
    b: &EndoMatrix,
) -> Result<ConformalAlgebra, Error> {
    if !base.alpha().is_identity() || !base.beta().is_identity() {
        return Err(Error::Precondition(
            "twist input must carry identity twists (a Lie conformal algebra datum)".to_string(),
        ));
    }
    let report = base.check();
    if !report.passed() {
        return Err(Error::Precondition(format!(
            "twist input fails the axiom suite: {}",
            report.failures[0]
        )));
    }
    let n = base.rank();
    if a.n() != n || b.n() != n {
        return Err(Error::RankMismatch {
            expected: n,
            got: a.n().max(b.n()),
        });
    }
    if !a.commutes_with(b) {
        return Err(Error::Precondition("twist maps must commute".to_string()));
    }
    // Multiplicativity of both maps over the untwisted bracket.
    for (m, name) in [(a, "first"), (b, "second")] {
        for i in 0..n {
            for j in 0..n {
                let plain = base.bracket_eval_at(&unit(n, i), &unit(n, j), &lam());
                let lhs = m.apply_coeffs(&plain);
                let rhs = base.bracket_eval_at(
                    &m.apply_coeffs(&unit(n, i)),
                    &m.apply_coeffs(&unit(n, j)),
                    &lam(),
                );
                if lhs.iter().zip(&rhs).any(|(x, y)| x != y) {
                    return Err(Error::Precondition(format!(
                        "{name} twist map is not multiplicative over the bracket at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    let mut bracket: Tensor = vec![vec![vec![Poly::zero(); n]; n]; n];
    for i in 0..n {
        let ai = a.apply_coeffs(&unit(n, i));
        for j in 0..n {
            let bj = b.apply_coeffs(&unit(n, j));
            let value = base.bracket_eval_at(&ai, &bj, &lam());
            for (k, p) in value.into_iter().enumerate() {
                bracket[i][j][k] = p;
            }
        }
    }
    ConformalAlgebra::new(base.basis_names().to_vec(), bracket, a.clone(), b.clone())
}

/// Current conformal algebra of a finite BiHom-Lie algebra: the free
/// ℚ[∂]-module on the same basis with `[u_λ v] = [u, v]` and the twists
/// acting coefficient-wise.
pub fn affinize(lie: &BiHomLieAlgebra) -> Result<ConformalAlgebra, Error> {
    let report = lie.check();
    if !report.passed() {
        return Err(Error::Precondition(format!(
            "affinization input fails the BiHom-Lie axiom suite: {}",
            report.failures[0]
        )));
    }
    let n = lie.dim();
    let mut bracket: Tensor = vec![vec![vec![Poly::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                bracket[i][j][k] = Poly::constant(lie.structure()[i][j][k].clone());
            }
        }
    }
    let scalar_to_endo = |m: &Vec<Vec<crate::poly::Scalar>>| -> Result<EndoMatrix, Error> {
        EndoMatrix::new(
            m.iter()
                .map(|row| row.iter().map(|c| Poly::constant(c.clone())).collect())
                .collect(),
        )
    };
    ConformalAlgebra::new(
        lie.basis_names().to_vec(),
        bracket,
        scalar_to_endo(lie.alpha())?,
        scalar_to_endo(lie.beta())?,
    )
}

/// Semidirect product of a regular algebra with a module whose twists are
/// invertible: rank n+m on the combined basis, with
///
/// ```text
/// [eᵢ_λ eⱼ]  from the algebra,
/// [eᵢ_λ vⱼ] = eᵢ ·_λ vⱼ,
/// [vᵢ_λ eⱼ] = −(α⁻¹β(eⱼ) ·_ν α_M β_M⁻¹(vᵢ)) at ν = −∂−λ,
/// [vᵢ_λ vⱼ] = 0,
/// ```
///
/// and block-diagonal twists (α ⊕ α_M, β ⊕ β_M).
pub fn semidirect_product(
    algebra: &ConformalAlgebra,
    module: &ConformalModule,
) -> Result<ConformalAlgebra, Error> {
    if module.parent() != algebra {
        return Err(Error::Precondition(
            "module is not over the given algebra".to_string(),
        ));
    }
    if !algebra.is_regular() {
        return Err(Error::Precondition(
            "semidirect product requires a regular algebra".to_string(),
        ));
    }
    if !module.alpha_m().is_invertible() || !module.beta_m().is_invertible() {
        return Err(Error::Precondition(
            "semidirect product requires invertible module twists".to_string(),
        ));
    }
    let mreport = module.check();
    if !mreport.passed() {
        return Err(Error::Precondition(format!(
            "module fails its axiom suite: {}",
            mreport.failures[0]
        )));
    }
    let n = algebra.rank();
    let m = module.rank();
    let total = n + m;
    let alpha_inv_beta = algebra.alpha().inverse()?.mul(algebra.beta());
    let am_bm_inv = module.alpha_m().mul(&module.beta_m().inverse()?);

    let mut bracket: Tensor = vec![vec![vec![Poly::zero(); total]; total]; total];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                bracket[i][j][k] = algebra.bracket_tensor()[i][j][k].clone();
            }
        }
        for j in 0..m {
            for k in 0..m {
                bracket[i][n + j][n + k] = module.action_tensor()[i][j][k].clone();
            }
        }
    }
    for i in 0..m {
        let vi = am_bm_inv.apply_coeffs(&unit(m, i));
        for j in 0..n {
            let ej = alpha_inv_beta.apply_coeffs(&unit(n, j));
            let value = module.action_eval_at(&ej, &vi, &minus_del_minus(&lam()));
            for (k, p) in value.into_iter().enumerate() {
                bracket[n + i][j][n + k] = -&p;
            }
        }
    }
    let names: Vec<String> = algebra
        .basis_names()
        .iter()
        .cloned()
        .chain(module.basis_names().iter().cloned())
        .collect();
    ConformalAlgebra::new(
        names,
        bracket,
        EndoMatrix::block_diag(algebra.alpha(), module.alpha_m()),
        EndoMatrix::block_diag(algebra.beta(), module.beta_m()),
    )
}

/// Rank-one extension of a regular algebra by a conformal linear map
/// commuting with the twists: basis (e₁, …, eₙ, d) with
///
/// ```text
/// [d_λ eⱼ] = D_λ(eⱼ),
/// [eᵢ_λ d] = −D_ν(αβ⁻¹(eᵢ)) at ν = −∂−λ,
/// [d_λ d] = 0,
/// ```
///
/// and twists extended by the identity on the d-line. The result passes
/// the axiom suite precisely when `D` is an α⁰β¹-derivation.
pub fn derivation_extension(
    algebra: &ConformalAlgebra,
    d: &ConformalLinearMap,
) -> Result<ConformalAlgebra, Error> {
    if !algebra.is_regular() {
        return Err(Error::Precondition(
            "derivation extension requires a regular algebra".to_string(),
        ));
    }
    if d.n() != algebra.rank() {
        return Err(Error::RankMismatch {
            expected: algebra.rank(),
            got: d.n(),
        });
    }
    if !d.commutes_with_endo(algebra.alpha()) || !d.commutes_with_endo(algebra.beta()) {
        return Err(Error::Precondition(
            "extension map must commute with both twists".to_string(),
        ));
    }
    let n = algebra.rank();
    let total = n + 1;
    let ab_inv = algebra.alpha().mul(&algebra.beta().inverse()?);
    let mut bracket: Tensor = vec![vec![vec![Poly::zero(); total]; total]; total];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                bracket[i][j][k] = algebra.bracket_tensor()[i][j][k].clone();
            }
        }
    }
    for j in 0..n {
        let col = d.apply_at(&unit(n, j), &lam());
        for (k, p) in col.into_iter().enumerate() {
            bracket[n][j][k] = p;
        }
    }
    for i in 0..n {
        let twisted = ab_inv.apply_coeffs(&unit(n, i));
        let value = d.apply_at(&twisted, &minus_del_minus(&lam()));
        for (k, p) in value.into_iter().enumerate() {
            bracket[i][n][k] = -&p;
        }
    }
    let mut names = algebra.basis_names().to_vec();
    names.push("d".to_string());
    ConformalAlgebra::new(
        names,
        bracket,
        EndoMatrix::block_diag(algebra.alpha(), &EndoMatrix::identity(1)),
        EndoMatrix::block_diag(algebra.beta(), &EndoMatrix::identity(1)),
    )
}
