//! The shipped example algebras used throughout the tests, the runnable
//! examples, and the definition files under `defs/`.

use crate::algebra::{BiHomLieAlgebra, ConformalAlgebra, EndoMatrix};
use crate::poly::{int, Poly, Scalar};
use num_traits::Zero;

/// Rank-1 abelian algebra with identity twists: every identity is 0 = 0.
pub fn abelian1() -> ConformalAlgebra {
    ConformalAlgebra::abelian(1)
}

/// Current conformal algebra of the Lie algebra [x, y] = y with identity
/// twists: `[x_λ y] = y`, `[y_λ x] = −y`.
pub fn current_xy() -> ConformalAlgebra {
    let mut bracket = vec![vec![vec![Poly::zero(); 2]; 2]; 2];
    bracket[0][1][1] = Poly::one();
    bracket[1][0][1] = Poly::from_int(-1);
    ConformalAlgebra::new(
        vec!["x".into(), "y".into()],
        bracket,
        EndoMatrix::identity(2),
        EndoMatrix::identity(2),
    )
    .expect("valid shape")
}

/// The twisted current algebra: the twist of [`current_xy`] by the
/// commuting multiplicative pair a = diag(1,2), b = diag(1,3), so that
/// `[x_λ y]' = 3y`, `[y_λ x]' = −2y` with α = diag(1,2), β = diag(1,3).
/// Regular, with trivial center — the workhorse rank-2 example.
pub fn twisted2() -> ConformalAlgebra {
    let mut bracket = vec![vec![vec![Poly::zero(); 2]; 2]; 2];
    bracket[0][1][1] = Poly::from_int(3);
    bracket[1][0][1] = Poly::from_int(-2);
    ConformalAlgebra::new(
        vec!["x".into(), "y".into()],
        bracket,
        EndoMatrix::diag_ints(&[1, 2]),
        EndoMatrix::diag_ints(&[1, 3]),
    )
    .expect("valid shape")
}

/// A rank-2 algebra violating only skew-symmetry: `[y_λ y] = x` with
/// identity twists. The twisted Jacobi identity holds (x is central), so
/// the axiom suite fails at exactly the skew tag, witness (2, 2).
pub fn broken_skew2() -> ConformalAlgebra {
    let mut bracket = vec![vec![vec![Poly::zero(); 2]; 2]; 2];
    bracket[1][1][0] = Poly::one();
    ConformalAlgebra::new(
        vec!["x".into(), "y".into()],
        bracket,
        EndoMatrix::identity(2),
        EndoMatrix::identity(2),
    )
    .expect("valid shape")
}

/// The 2-dimensional BiHom-Lie algebra obtained by twisting [x, y] = y:
/// `[x, y]' = 3y`, `[y, x]' = −2y` with α = diag(1,2), β = diag(1,3).
/// Its affinization is [`twisted2`].
pub fn twisted_bihom_lie2() -> BiHomLieAlgebra {
    let z = Scalar::zero;
    let mut c = vec![vec![vec![z(); 2]; 2]; 2];
    c[0][1][1] = int(3);
    c[1][0][1] = int(-2);
    BiHomLieAlgebra::new(
        vec!["x".into(), "y".into()],
        c,
        vec![vec![int(1), z()], vec![z(), int(2)]],
        vec![vec![int(1), z()], vec![z(), int(3)]],
    )
    .expect("valid shape")
}
