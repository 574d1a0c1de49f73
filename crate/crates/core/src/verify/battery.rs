//! Test functions for operator identities. Each mixes q-polynomials,
//! a Fourier mode in φ, trigonometric factors and a radial profile, so
//! that no generator used in the crate annihilates all of them.

use crate::symx::vars::*;
use crate::symx::Expr;

fn mode(k: i64) -> Expr {
    (Expr::i() * Expr::int(k) * phi()).exp()
}

fn gauss() -> Expr {
    (r().powi(2) * Expr::ratio(-1, 2)).exp()
}

pub fn battery() -> Vec<Expr> {
    let (st, ct, sp, cp) = (theta().sin(), theta().cos(), psi().sin(), psi().cos());
    vec![
        mode(1) * st.powi(2) * &cp * (q() + 3),
        mode(-2) * &ct * sp.powi(3) * (q().powi(2) + 1) * r(),
        &st * &sp * &cp * gauss() * (q() * 2 - 1),
        mode(3) * ct.powi(2) * &sp * r().powi(2) * (q().powi(3) + q() + 5),
        (Expr::one() + &st * &ct + &cp) * mode(1) * r() * gauss() * (q() + Expr::ratio(1, 2)),
        st.powi(3) * sp.powi(2) * (q() - 1).powi(2) * (r().powi(3) + 1) * mode(-1),
    ]
}
