//! Exact linear algebra over F2, F_p, Q and Z.

pub mod bitmat;
pub mod fieldmat;
pub mod ring;
pub mod snf;
pub mod sparse;

pub use bitmat::BitMatrix;
pub use fieldmat::FieldMatrix;
pub use ring::{Coefficients, Field, Fp, Integers, Rationals, Ring, F2};
pub use snf::{elementary_divisors, invariant_factors, smith_normal_form, IntMatrix, SmithForm};
pub use sparse::{Rref, SparseMatrix, SparseVec, Subspace};

/// Runs `$body` with `$f` bound to the field named by a [`Coefficients`]
/// value. `Z` yields an error.
#[macro_export]
macro_rules! with_field {
    ($coeffs:expr, |$f:ident| $body:expr) => {{
        match $coeffs.normalized()? {
            $crate::exactalg::Coefficients::F2 => {
                let $f = $crate::exactalg::F2;
                $body
            }
            $crate::exactalg::Coefficients::Fp(p) => {
                let $f = $crate::exactalg::Fp::new(p)?;
                $body
            }
            $crate::exactalg::Coefficients::Q => {
                let $f = $crate::exactalg::Rationals;
                $body
            }
            $crate::exactalg::Coefficients::Z => {
                return Err($crate::error::Error::InvalidField("this computation needs a field, not z".into()).into())
            }
        }
    }};
}
