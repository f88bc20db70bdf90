use crate::error::{Error, Result};
use crate::simulate::PointPattern;

use std::f64::consts::PI;

/// Variational estimate for `z(u) = (sin 4 pi u1, sin 4 pi u2)` with
/// `h = div z`, written out by hand:
///
/// ```text
/// theta = M^-1 (sum sin 4 pi u1, sum sin 4 pi u2)'
/// M = [sum cos^2 4 pi u1, sum cos 4 pi u1 cos 4 pi u2; .., sum cos^2 4 pi u2]
/// ```
///
/// The factors `4 pi` and `-16 pi^2` of `div z` and `div div z` cancel.
pub fn model2_div_z_closed_form(x: &PointPattern) -> Result<[f64; 2]> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.dim(),
        });
    }
    let (mut c11, mut c12, mut c22, mut s1, mut s2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for u in x.points() {
        let (a1, a2) = (4.0 * PI * u[0], 4.0 * PI * u[1]);
        let (c1, c2) = (a1.cos(), a2.cos());
        c11 += c1 * c1;
        c12 += c1 * c2;
        c22 += c2 * c2;
        s1 += a1.sin();
        s2 += a2.sin();
    }
    let det = c11 * c22 - c12 * c12;
    if det == 0.0 {
        return Err(Error::SingularSystem("closed form: zero determinant".into()));
    }
    Ok([(c22 * s1 - c12 * s2) / det, (c11 * s2 - c12 * s1) / det])
}
