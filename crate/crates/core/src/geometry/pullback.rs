use crate::error::Result;
use crate::maps::{JacobianSample, MapWord};
use crate::scalar::Scalar;

use super::{eval_eta, CotangentSample, Point};

/// Row vector `α` composed with `Dg`.
pub fn pull_covector<T: Scalar>(alpha: CotangentSample<T>, jac: &JacobianSample<T>) -> CotangentSample<T> {
    CotangentSample::new(alpha.a * jac.m[0][0] + alpha.b * jac.m[1][0], alpha.a * jac.m[0][1] + alpha.b * jac.m[1][1])
}

/// (g*α)_p = α_{g(p)} ∘ Dg_p for an arbitrary 1-form field α.
pub fn pullback_form<T, F>(word: &MapWord<T>, form: F, p: Point<T>) -> Result<CotangentSample<T>>
where
    T: Scalar,
    F: Fn(Point<T>) -> CotangentSample<T>,
{
    let (q, jac, _) = word.eval_full(p)?;
    Ok(pull_covector(form(q.clamped()), &jac))
}

/// (g*η)_p.
pub fn pullback_oneform<T: Scalar>(word: &MapWord<T>, p: Point<T>) -> Result<CotangentSample<T>> {
    pullback_form(word, eval_eta, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{compose_words, make_ham_flow, make_twist, HamSpec, TwistSpec};

    fn twist_s(s: f64) -> MapWord<f64> {
        make_twist(&TwistSpec { m: 1, poly_r2: vec![s], exp: 1 }).unwrap()
    }

    #[test]
    fn identity_and_rotation_preserve_eta() {
        let p = Point::new(0.3f64, -0.45);
        assert_eq!(pullback_oneform(&MapWord::identity(), p).unwrap(), eval_eta(p));
        let r = pullback_oneform(&MapWord::rotation(1.1), p).unwrap();
        assert!((r - eval_eta(p)).a.abs() < 1e-15 && (r - eval_eta(p)).b.abs() < 1e-15);
    }

    #[test]
    fn twist_pullback_against_finite_difference_oracle() {
        // Oracle: central-difference Jacobian of the twist at (t, 0), composed with η at the image.
        let w = twist_s(1.3);
        let t = 0.6;
        let p = Point::new(t, 0.0);
        let h = 1e-6;
        let img = |q: Point<f64>| w.apply(q).unwrap();
        let cx = (img(p + Point::new(h, 0.0)) - img(p - Point::new(h, 0.0))) * (0.5 / h);
        let cy = (img(p + Point::new(0.0, h)) - img(p - Point::new(0.0, h))) * (0.5 / h);
        let fd = JacobianSample::new(cx.x, cy.x, cx.y, cy.y);
        let oracle = pull_covector(eval_eta(img(p)), &fd);
        let got = pullback_oneform(&w, p).unwrap();
        assert!((got - oracle).a.abs() < 1e-8 && (got - oracle).b.abs() < 1e-8);
        // and the closed form: η + (t²/2)β′(t) dr with β′(t) = −2st, dr = dx on the x-axis
        let expected = eval_eta(p) + CotangentSample::new(0.5 * t * t * (-2.0 * 1.3 * t), 0.0);
        assert!((got - expected).a.abs() < 1e-14 && (got - expected).b.abs() < 1e-14);
    }

    #[test]
    fn pullback_is_functorial() {
        let a = twist_s(0.7);
        let b: MapWord<f64> =
            make_ham_flow(&HamSpec { k: 1, q: vec![vec![0.2, 0.5], vec![-0.4]], time: 0.3, steps: None, exp: 1 })
                .unwrap();
        let ab = compose_words(&a, &b);
        let p = Point::new(-0.2, 0.55);
        // (a∘b)*η = b*(a*η)
        let direct = pullback_oneform(&ab, p).unwrap();
        let (q, jb, _) = b.eval_full(p).unwrap();
        let iterated = pull_covector(pullback_oneform(&a, q).unwrap(), &jb);
        assert!((direct - iterated).a.abs() < 1e-13 && (direct - iterated).b.abs() < 1e-13);
    }
}
