//! Substitution operators on [`MultiSeries`].
//!
//! Window discipline: a substitution is exact on the window as long as it
//! never moves a monomial from outside the window back inside. Geometric and
//! squaring substitutions only raise exponents, so any per-variable window is
//! safe. The sigma substitution can lower the exponent of `v` (and `x`),
//! which is why its callers must keep the caps on those variables at least
//! as large as the true degrees of the series they feed it.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::{Monomial, MultiSeries, SeriesError, Var};

impl MultiSeries {
    /// The substitution `v -> v+w+vw`, `x -> x+y+xy` (a ring morphism).
    ///
    /// Requires the profile to cap both `v` and `x`.
    pub fn subst_sigma(&self) -> Result<MultiSeries, SeriesError> {
        for var in [Var::V, Var::X] {
            if self.profile.cap(var).is_none() {
                return Err(SeriesError::UncappedVariable(var.symbol()));
            }
        }
        let sv = pair_expansion(Var::V, Var::W, self);
        let sx = pair_expansion(Var::X, Var::Y, self);
        let mut pow_v: Vec<MultiSeries> = vec![MultiSeries::one(self.profile)];
        let mut pow_x: Vec<MultiSeries> = vec![MultiSeries::one(self.profile)];
        let mut out = MultiSeries::zero(self.profile);
        for (m, c) in self.terms() {
            let (ev, ex) = (m.exp(Var::V), m.exp(Var::X));
            while pow_v.len() <= ev as usize {
                pow_v.push(pow_v.last().unwrap() * &sv);
            }
            while pow_x.len() <= ex as usize {
                pow_x.push(pow_x.last().unwrap() * &sx);
            }
            let mut rest = *m;
            rest.exps[Var::V.index()] = 0;
            rest.exps[Var::X.index()] = 0;
            let image = (&pow_v[ev as usize] * &pow_x[ex as usize]).mul_monomial(&rest);
            out = &out + &image.scale(c.clone());
        }
        Ok(out)
    }

    /// The substitution `var -> var/(1-var)`, expanded geometrically up to
    /// the cap on `var` (which must exist). Exponents only grow, so the
    /// window stays exact.
    pub fn subst_geometric(&self, var: Var) -> Result<MultiSeries, SeriesError> {
        let cap = self
            .profile
            .cap(var)
            .ok_or(SeriesError::UncappedVariable(var.symbol()))?;
        // geo = var + var^2 + ... + var^cap
        let geo = MultiSeries::from_terms(
            self.profile,
            (1..=cap).map(|e| (Monomial::var_pow(var, e), 1)),
        );
        let mut pow: Vec<MultiSeries> = vec![MultiSeries::one(self.profile)];
        let mut grouped: HashMap<u32, MultiSeries> = HashMap::new();
        for (m, c) in self.terms() {
            let e = m.exp(var);
            let mut rest = *m;
            rest.exps[var.index()] = 0;
            grouped
                .entry(e)
                .or_insert_with(|| MultiSeries::zero(self.profile))
                .add_term(rest, c.clone());
        }
        let mut out = MultiSeries::zero(self.profile);
        let mut exps: Vec<u32> = grouped.keys().copied().collect();
        exps.sort_unstable();
        for e in exps {
            while pow.len() <= e as usize {
                pow.push(pow.last().unwrap() * &geo);
            }
            out = &out + &(&pow[e as usize] * &grouped[&e]);
        }
        Ok(out)
    }

    /// The substitution `var -> var^2` (exponent doubling). Exponents only
    /// grow, so the window stays exact.
    pub fn subst_square(&self, var: Var) -> MultiSeries {
        let mut out = MultiSeries::zero(self.profile);
        for (m, c) in self.terms() {
            let mut doubled = *m;
            doubled.exps[var.index()] *= 2;
            out.add_term(doubled, c.clone());
        }
        out
    }
}

/// `a + b + a*b` as a series, the image of `a` under sigma for the pair
/// `(a, b)`.
fn pair_expansion(a: Var, b: Var, like: &MultiSeries) -> MultiSeries {
    MultiSeries::from_terms(
        like.profile(),
        [
            (Monomial::var(a), BigInt::from(1)),
            (Monomial::var(b), BigInt::from(1)),
            (Monomial::from_pairs(&[(a, 1), (b, 1)]), BigInt::from(1)),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{v_poly, Profile};

    fn profile() -> Profile {
        Profile::unbounded().with_caps(&[Var::V, Var::W, Var::X, Var::Y], 8)
    }

    #[test]
    fn sigma_on_v() {
        let p = profile();
        let v = MultiSeries::variable(Var::V, p);
        let image = v.subst_sigma().unwrap();
        assert_eq!(image, pair_expansion(Var::V, Var::W, &v));
    }

    #[test]
    fn sigma_is_multiplicative_on_monomials() {
        let p = profile();
        let xv = MultiSeries::monomial(Monomial::from_pairs(&[(Var::X, 1), (Var::V, 1)]), 1, p);
        let expected = pair_expansion(Var::X, Var::Y, &xv) * pair_expansion(Var::V, Var::W, &xv);
        assert_eq!(xv.subst_sigma().unwrap(), expected);
    }

    #[test]
    fn sigma_requires_caps() {
        let p = Profile::unbounded().with_cap(Var::V, 4);
        let f = MultiSeries::variable(Var::V, p);
        assert_eq!(
            f.subst_sigma(),
            Err(SeriesError::UncappedVariable('x'))
        );
    }

    #[test]
    fn sigma_iterates_to_v_polynomials() {
        // Applying sigma i times to the bare series v gives V_i(v, w).
        let p = profile();
        let v = MultiSeries::variable(Var::V, p);
        let w = MultiSeries::variable(Var::W, p);
        let mut iterated = v.clone();
        for i in 1..=6u32 {
            iterated = iterated.subst_sigma().unwrap();
            assert_eq!(iterated, v_poly(i, &v, &w).unwrap(), "iteration {i}");
        }
    }

    #[test]
    fn geometric_on_powers() {
        let p = Profile::unbounded().with_cap(Var::X, 4);
        let x = MultiSeries::variable(Var::X, p);
        let geo = x.subst_geometric(Var::X).unwrap();
        let expected = MultiSeries::from_terms(p, (1..=4).map(|e| (Monomial::var_pow(Var::X, e), 1)));
        assert_eq!(geo, expected);
        // Constant series is fixed.
        let one = MultiSeries::one(p);
        assert_eq!(one.subst_geometric(Var::X).unwrap(), one);
        // x^2 -> x^2 + 2x^3 + 3x^4 under cap 4.
        let x2 = MultiSeries::monomial(Monomial::var_pow(Var::X, 2), 1, p);
        let expected = MultiSeries::from_terms(
            p,
            [
                (Monomial::var_pow(Var::X, 2), 1),
                (Monomial::var_pow(Var::X, 3), 2),
                (Monomial::var_pow(Var::X, 4), 3),
            ],
        );
        assert_eq!(x2.subst_geometric(Var::X).unwrap(), expected);
    }

    #[test]
    fn geometric_requires_cap() {
        let p = Profile::unbounded().with_cap(Var::X, 4);
        let f = MultiSeries::variable(Var::Y, p);
        assert_eq!(
            f.subst_geometric(Var::Y),
            Err(SeriesError::UncappedVariable('y'))
        );
    }

    #[test]
    fn squaring_doubles_exponents() {
        let p = Profile::unbounded().with_cap(Var::V, 5);
        let f = MultiSeries::variable(Var::V, p).plus_constant(1);
        let sq = f.subst_square(Var::V);
        let expected = MultiSeries::from_terms(
            p,
            [(Monomial::one(), 1), (Monomial::var_pow(Var::V, 2), 1)],
        );
        assert_eq!(sq, expected);
        // v^3 doubles out of the window.
        let v3 = MultiSeries::monomial(Monomial::var_pow(Var::V, 3), 1, p);
        assert!(v3.subst_square(Var::V).is_zero());
    }
}
