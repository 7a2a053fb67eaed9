//! Congruence subgroup bookkeeping for `Gamma_1(N)`: membership, Hecke coset
//! representatives, cusp double cosets and the factorizations built on them.
//!
//! Right cosets `Gamma_1(N) g` in `SL2(Z)` are labelled by the bottom row of `g`
//! modulo `N`; double cosets `Gamma_1(N) g Gamma_inf` are orbits of those rows
//! under right multiplication by the stabilizer of infinity.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2Z;
use crate::par::{try_map_range, Exec};
use crate::radical::Slope;

fn modn(x: &BigInt, n: u64) -> u64 {
    x.mod_floor(&BigInt::from(n)).to_u64().unwrap()
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `det g = 1`, `a = d = 1 (mod N)`, `c = 0 (mod N)`.
pub fn gamma1_contains(n: u64, g: &Mat2Z) -> bool {
    g.det().is_one() && modn(&g.a, n) == 1 % n && modn(&g.d, n) == 1 % n && modn(&g.c, n) == 0
}

/// Positive determinant, `a = 1 (mod N)`, `c = 0 (mod N)`.
pub fn delta1_contains(n: u64, g: &Mat2Z) -> bool {
    g.det().is_positive() && modn(&g.a, n) == 1 % n && modn(&g.c, n) == 0
}

/// `Gamma_1(N) alpha Gamma_1(N)` written as a disjoint union of right cosets `Gamma_1(N) alpha_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetDecomposition {
    pub level: u64,
    pub alpha: Mat2Z,
    pub reps: Vec<Mat2Z>,
}

impl CosetDecomposition {
    /// The trivial decomposition of `Gamma_1(N) I Gamma_1(N)`.
    pub fn identity(level: u64) -> Self {
        CosetDecomposition { level, alpha: Mat2Z::identity(), reps: vec![Mat2Z::identity()] }
    }

    /// True if `x` lies in `Gamma_1(N) rep`.
    pub fn same_coset(level: u64, x: &Mat2Z, rep: &Mat2Z) -> bool {
        let det = rep.det();
        if det.is_zero() || x.det() != det {
            return false;
        }
        let p = x.mul(&rep.adjugate());
        let all = [&p.a, &p.b, &p.c, &p.d];
        if !all.iter().all(|e| (*e % &det).is_zero()) {
            return false;
        }
        let q = Mat2Z::new(&p.a / &det, &p.b / &det, &p.c / &det, &p.d / &det);
        gamma1_contains(level, &q)
    }

    /// Every representative lies in `Delta_1(N)` with the determinant of `alpha`,
    /// and no two share a coset.
    pub fn validate(&self) -> Result<()> {
        let det = self.alpha.det();
        for r in &self.reps {
            if r.det() != det || !delta1_contains(self.level, r) {
                return Err(Error::Internal(format!("coset representative {r} not in Delta_1({})", self.level)));
            }
        }
        for i in 0..self.reps.len() {
            for j in 0..i {
                if Self::same_coset(self.level, &self.reps[i], &self.reps[j]) {
                    return Err(Error::Internal(format!(
                        "representatives {} and {} share a coset",
                        self.reps[i], self.reps[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that every matrix of `Delta_1(N)` with the right determinant and
    /// entries bounded by `bound` lies in one of the cosets. Returns how many were checked.
    pub fn check_coverage(&self, bound: i64) -> Result<usize> {
        let n = self.level as i64;
        let det = self.alpha.det();
        let mut checked = 0;
        for a in -bound..=bound {
            if (a - 1).rem_euclid(n) != 0 {
                continue;
            }
            for c in -bound..=bound {
                if c.rem_euclid(n) != 0 {
                    continue;
                }
                for d in -bound..=bound {
                    // b = (a d - det) / c, or for c = 0 any b with a d = det
                    let ad = BigInt::from(a * d);
                    let bs: Vec<BigInt> = if c == 0 {
                        if ad == det {
                            (-bound..=bound).map(BigInt::from).collect()
                        } else {
                            vec![]
                        }
                    } else {
                        let num = &ad - &det;
                        if (&num % c).is_zero() {
                            let b = num / c;
                            if b.abs() <= BigInt::from(bound) {
                                vec![b]
                            } else {
                                vec![]
                            }
                        } else {
                            vec![]
                        }
                    };
                    for b in bs {
                        let x = Mat2Z::new(a, b, c, d);
                        checked += 1;
                        if !self.reps.iter().any(|r| Self::same_coset(self.level, &x, r)) {
                            return Err(Error::Internal(format!("{x} is in no coset")));
                        }
                    }
                }
            }
        }
        Ok(checked)
    }
}

/// Representatives for `Gamma_1(N) diag(1, p) Gamma_1(N)`, `p` prime not dividing `N`.
///
/// The first `p` are `(1 j; 0 p)`; the last is `sigma diag(p, 1)` with
/// `sigma` in `SL2(Z)` congruent to `diag(1/p, p)` modulo `N`.
pub fn hecke_coset_reps(level: u64, p: u64) -> Result<CosetDecomposition> {
    if level == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if level.is_multiple_of(p) {
        return Err(Error::Unsupported(format!("p = {p} divides the level {level}")));
    }
    let pb = BigInt::from(p);
    let mut reps: Vec<Mat2Z> = (0..p).map(|j| Mat2Z::new(1, j, 0, p)).collect();
    if level == 1 {
        reps.push(Mat2Z::new(p, 0, 0, 1));
    } else {
        let nb = BigInt::from(level);
        let alpha = mod_inverse(&pb, &nb).expect("p is a unit mod N");
        let delta = mod_inverse(&alpha, &nb).expect("unit");
        let beta = (&alpha * &delta - 1) / &nb;
        reps.push(Mat2Z::new(&alpha * &pb, beta, &nb * &pb, delta));
    }
    let dec = CosetDecomposition { level, alpha: Mat2Z::new(1, 0, 0, p), reps };
    dec.validate()?;
    Ok(dec)
}

/// Least nonnegative inverse of `a` modulo `m`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Which subgroup plays the role of the stabilizer of infinity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stabilizer {
    /// `<-I, T>`, so double cosets match cusps one to one.
    #[default]
    WithSign,
    /// The stabilizer inside `Gamma_1(N)`: `<T>`, plus `-I` when `N <= 2`.
    Level,
}

impl Stabilizer {
    fn has_sign(self, level: u64) -> bool {
        match self {
            Stabilizer::WithSign => true,
            Stabilizer::Level => level <= 2,
        }
    }
}

/// Representatives `g_nu` of `Gamma_1(N) \ SL2(Z) / Gamma_inf`.
#[derive(Clone, Debug)]
pub struct CuspTable {
    pub level: u64,
    pub stabilizer: Stabilizer,
    pub reps: Vec<Mat2Z>,
    /// Slope of `g_nu . 0`, i.e. the cusp `a/c`.
    pub labels: Vec<Slope>,
    orbit_of: HashMap<(u64, u64), usize>,
}

impl CuspTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    fn bottom(&self, g: &Mat2Z) -> (u64, u64) {
        (modn(&g.c, self.level), modn(&g.d, self.level))
    }

    /// Index of the double coset containing `g`.
    pub fn index_of(&self, g: &Mat2Z) -> Option<usize> {
        self.orbit_of.get(&self.bottom(g)).copied()
    }

    /// Rebuilds the lookup from representatives, checking that they hit
    /// every orbit exactly once.
    pub fn from_reps(level: u64, stabilizer: Stabilizer, reps: Vec<Mat2Z>) -> Result<Self> {
        let orbits = bottom_row_orbits(level, stabilizer.has_sign(level));
        let n_orbits = orbits.values().copied().max().map_or(0, |m| m + 1);
        if reps.len() != n_orbits {
            return Err(Error::Internal(format!("{} representatives for {n_orbits} double cosets", reps.len())));
        }
        let mut orbit_to_rep = vec![usize::MAX; n_orbits];
        let mut labels = Vec::with_capacity(reps.len());
        for (i, r) in reps.iter().enumerate() {
            if !r.det().is_one() {
                return Err(Error::Internal(format!("cusp representative {r} not in SL2(Z)")));
            }
            let key = (modn(&r.c, level), modn(&r.d, level));
            let o = orbits[&key];
            if orbit_to_rep[o] != usize::MAX {
                return Err(Error::Internal(format!("representatives {} and {i} share a double coset", orbit_to_rep[o])));
            }
            orbit_to_rep[o] = i;
            labels.push(Slope::new(r.a.clone(), r.c.clone())?);
        }
        let orbit_of = orbits.into_iter().map(|(k, o)| (k, orbit_to_rep[o])).collect();
        Ok(CuspTable { level, stabilizer, reps, labels, orbit_of })
    }
}

// Orbit id for every bottom row (c, d) mod N with gcd(c, d, N) = 1, under
// d -> d + c and optionally (c, d) -> (-c, -d). Ids follow first appearance in
// lexicographic order.
fn bottom_row_orbits(n: u64, with_sign: bool) -> HashMap<(u64, u64), usize> {
    let mut id = HashMap::new();
    let mut next = 0;
    for c in 0..n {
        for d in 0..n {
            if gcd_u64(gcd_u64(c, d), n) != 1 || id.contains_key(&(c, d)) {
                continue;
            }
            let mut stack = vec![(c, d)];
            while let Some((x, y)) = stack.pop() {
                if id.insert((x, y), next).is_some() {
                    continue;
                }
                stack.push((x, (y + x) % n));
                if with_sign {
                    stack.push(((n - x) % n, (n - y) % n));
                }
            }
            next += 1;
        }
    }
    if n == 1 {
        id.insert((0, 0), 0);
    }
    id
}

/// Number of double cosets counted directly from bottom-row orbits.
pub fn double_coset_count(level: u64, stabilizer: Stabilizer) -> usize {
    let o = bottom_row_orbits(level, stabilizer.has_sign(level));
    o.values().copied().max().map_or(0, |m| m + 1)
}

/// Cusp equivalence under `Gamma_1(N)` by the congruence criterion:
/// `(a:c) ~ (a':c')` iff `c' = e c (mod N)` and `a' = e a (mod gcd(c, N))` for a sign `e`.
pub fn cusps_equivalent(level: u64, x: &Slope, y: &Slope) -> bool {
    let n = BigInt::from(level);
    let g = x.v().gcd(&n);
    [BigInt::one(), -BigInt::one()].iter().any(|e| {
        (y.v() - e * x.v()).mod_floor(&n).is_zero() && (y.u() - e * x.u()).mod_floor(&g).is_zero()
    })
}

/// One representative per double coset, taking cusps `(a:c)` in order of
/// increasing `c` then `a` and lifting each with [`lift_slope`] (and its
/// negative when the stabilizer has no sign).
pub fn cusp_table(level: u64, stabilizer: Stabilizer) -> Result<CuspTable> {
    if level == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let with_sign = stabilizer.has_sign(level);
    let orbits = bottom_row_orbits(level, with_sign);
    let total = orbits.values().copied().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    let mut consider = |g: Mat2Z, reps: &mut Vec<Mat2Z>| {
        let o = orbits[&(modn(&g.c, level), modn(&g.d, level))];
        if !seen[o] {
            seen[o] = true;
            reps.push(g);
        }
    };
    consider(Mat2Z::identity(), &mut reps);
    if !with_sign {
        consider(Mat2Z::identity().neg(), &mut reps);
    }
    let n = level as i64;
    'outer: for c in 1..=n {
        for a in 0..=(n * n + 1) {
            if reps.len() == total {
                break 'outer;
            }
            if a.gcd(&c) != 1 {
                continue;
            }
            let g = lift_slope(&Slope::new(a, c)?);
            if !with_sign {
                consider(g.neg(), &mut reps);
                // keep the positive lift first when both are new
                let last = reps.pop();
                consider(g, &mut reps);
                if let Some(l) = last {
                    reps.push(l);
                }
            } else {
                consider(g, &mut reps);
            }
        }
    }
    if reps.len() != total {
        return Err(Error::Internal(format!("found {} of {total} cusp representatives", reps.len())));
    }
    CuspTable::from_reps(level, stabilizer, reps)
}

/// `g` in `SL2(Z)` with first column `(u, v)`, so that `g.0` has slope `(u : v)`.
///
/// Uses the least nonnegative `y` with `u y = 1 (mod v)`.
pub fn lift_slope(s: &Slope) -> Mat2Z {
    let (u, v) = (s.u(), s.v());
    if v.is_zero() {
        return Mat2Z::identity();
    }
    let y = mod_inverse(u, v).expect("coprime slope");
    let x = (u * &y - 1) / v;
    Mat2Z { a: u.clone(), b: x, c: v.clone(), d: y }
}

/// `g = gamma * g_nu * gamma_inf` with `gamma` in `Gamma_1(N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspFactorization {
    pub gamma: Mat2Z,
    pub nu: usize,
    pub gamma_inf: Mat2Z,
}

/// Factors `g` in `SL2(Z)` through the cusp table.
///
/// `gamma_inf = e T^k` is searched over signs allowed by the stabilizer and
/// `0 <= k < N`, which suffices because `T^N` lies in `Gamma_1(N)`.
pub fn factor_by_cusp(g: &Mat2Z, table: &CuspTable) -> Result<CuspFactorization> {
    if !g.det().is_one() {
        return Err(Error::Precondition(format!("{g} is not in SL2(Z)")));
    }
    let n = table.level;
    let nu = table
        .index_of(g)
        .ok_or_else(|| Error::Internal(format!("no double coset for {g}")))?;
    let rep = &table.reps[nu];
    let signs: &[i64] = if table.stabilizer.has_sign(n) { &[1, -1] } else { &[1] };
    for &e in signs {
        for k in 0..n.max(1) {
            let gi = Mat2Z::translation(k);
            let gi = if e < 0 { gi.neg() } else { gi };
            let h = rep.mul(&gi);
            // gamma = g h^-1, h in SL2(Z)
            let gamma = g.mul(&h.adjugate());
            if gamma1_contains(n, &gamma) {
                debug_assert_eq!(gamma.mul(&h), *g);
                return Ok(CuspFactorization { gamma, nu, gamma_inf: gi });
            }
        }
    }
    Err(Error::Internal(format!("no stabilizer element factors {g} through {rep}")))
}

/// How to lift a cusp slope to `SL2(Z)`; alternatives exist to test independence of the choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Lift {
    #[default]
    Canonical,
    /// Canonical lift times `T^k`.
    Shifted(i64),
    /// Negative of the canonical lift.
    Negated,
}

impl Lift {
    pub fn apply(self, s: &Slope) -> Mat2Z {
        let g = lift_slope(s);
        match self {
            Lift::Canonical => g,
            Lift::Shifted(k) => g.mul(&Mat2Z::translation(k)),
            Lift::Negated => g.neg(),
        }
    }
}

/// Cusp map and group elements for one pair `(mu, nu)`:
/// `alpha_mu g_nu . 0 = beta g_xi . 0` with `beta` in `Gamma_1(N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PermEntry {
    pub xi: usize,
    pub beta: Mat2Z,
    pub lift: Mat2Z,
    pub gamma_inf: Mat2Z,
}

/// `entries[mu][nu]` for every coset representative and cusp.
pub fn hecke_permutation_data(
    cosets: &CosetDecomposition,
    table: &CuspTable,
    lift: Lift,
    exec: Exec,
) -> Result<Vec<Vec<PermEntry>>> {
    if cosets.level != table.level {
        return Err(Error::Precondition("coset and cusp tables have different levels".into()));
    }
    let m = table.len();
    let flat = try_map_range(exec, cosets.reps.len() * m, |idx| {
        let (mu, nu) = (idx / m, idx % m);
        let h = cosets.reps[mu].mul(&table.reps[nu]);
        let slope = Slope::new(h.a.clone(), h.c.clone())?;
        let g = lift.apply(&slope);
        let f = factor_by_cusp(&g, table)?;
        let check = f.gamma.mul(&table.reps[f.nu]);
        let back = Slope::new(check.a.clone(), check.c.clone())?;
        if back != slope {
            return Err(Error::Internal(format!("cusp identity fails at ({mu}, {nu}): {back} != {slope}")));
        }
        Ok(PermEntry { xi: f.nu, beta: f.gamma, lift: g, gamma_inf: f.gamma_inf })
    })?;
    let mut out = vec![Vec::with_capacity(m); cosets.reps.len()];
    for (idx, e) in flat.into_iter().enumerate() {
        out[idx / m].push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn membership_examples() {
        assert!(gamma1_contains(7, &Mat2Z::identity()));
        assert!(gamma1_contains(4, &Mat2Z::new(1, 1, 0, 1)));
        assert!(!gamma1_contains(4, &Mat2Z::new(1, 0, 2, 1)));
        assert!(gamma1_contains(1, &Mat2Z::new(2, 1, 1, 1)));
        assert!(!gamma1_contains(3, &Mat2Z::new(-1, 0, 0, -1)));
    }

    #[test]
    fn coset_examples() {
        let d = hecke_coset_reps(1, 2).unwrap();
        assert_eq!(d.reps, vec![Mat2Z::new(1, 0, 0, 2), Mat2Z::new(1, 1, 0, 2), Mat2Z::new(2, 0, 0, 1)]);
        assert_eq!(hecke_coset_reps(1, 3).unwrap().reps.len(), 4);
        assert_eq!(hecke_coset_reps(4, 3).unwrap().reps[3], Mat2Z::new(9, 2, 12, 3));
        assert_eq!(CosetDecomposition::identity(5).reps, vec![Mat2Z::identity()]);
        assert!(matches!(hecke_coset_reps(4, 2), Err(Error::Unsupported(_))));
        assert!(hecke_coset_reps(4, 9).is_err());
    }

    #[test]
    fn coset_counts_and_coverage() {
        for n in [1u64, 3, 4, 5] {
            for p in [2u64, 3, 5, 7] {
                if n % p == 0 {
                    continue;
                }
                let d = hecke_coset_reps(n, p).unwrap();
                assert_eq!(d.reps.len() as u64, p + 1);
                let checked = d.check_coverage(8).unwrap();
                assert!(checked > 0);
            }
        }
    }

    fn euler_phi(n: u64) -> u64 {
        (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn cusp_counts() {
        let expected = [1, 2, 2, 3, 4, 4, 6, 6, 8, 8, 10, 10];
        for n in 1..=12u64 {
            let t = cusp_table(n, Stabilizer::WithSign).unwrap();
            assert_eq!(t.len(), expected[n as usize - 1], "N = {n}");
            if n >= 5 {
                // classical count: half the sum over divisors of phi(d) phi(N/d)
                let s: u64 = (1..=n).filter(|d| n % d == 0).map(|d| euler_phi(d) * euler_phi(n / d)).sum();
                assert_eq!(t.len() as u64, s / 2);
            }
            for i in 0..t.len() {
                for j in 0..i {
                    assert!(!cusps_equivalent(n, &t.labels[i], &t.labels[j]));
                }
            }
        }
    }

    #[test]
    fn level_stabilizer_doubles_regular_cusps() {
        assert_eq!(cusp_table(1, Stabilizer::Level).unwrap().len(), 1);
        assert_eq!(cusp_table(2, Stabilizer::Level).unwrap().len(), 2);
        // N = 4 has one irregular cusp (1/2)
        assert_eq!(cusp_table(4, Stabilizer::Level).unwrap().len(), 5);
        assert_eq!(cusp_table(5, Stabilizer::Level).unwrap().len(), 8);
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_slope(&Slope::zero_angle()), Mat2Z::identity());
        assert_eq!(lift_slope(&Slope::new(0, 1).unwrap()), Mat2Z::new(0, -1, 1, 0));
        assert_eq!(lift_slope(&Slope::new(2, 3).unwrap()), Mat2Z::new(2, 1, 3, 2));
        assert_eq!(lift_slope(&Slope::new(-7, 5).unwrap()).det(), BigInt::one());
    }

    #[test]
    fn factor_examples() {
        let t4 = cusp_table(4, Stabilizer::WithSign).unwrap();
        let f = factor_by_cusp(&Mat2Z::identity(), &t4).unwrap();
        assert_eq!((f.gamma.clone(), f.nu, f.gamma_inf.clone()), (Mat2Z::identity(), 0, Mat2Z::identity()));
        let g = Mat2Z::new(1, 7, 0, 1);
        let f = factor_by_cusp(&g, &t4).unwrap();
        assert_eq!(f.nu, 0);
        assert_eq!(f.gamma.mul(&t4.reps[f.nu]).mul(&f.gamma_inf), g);
        let s = Mat2Z::new(0, -1, 1, 0);
        let f = factor_by_cusp(&s, &t4).unwrap();
        assert!(cusps_equivalent(4, &t4.labels[f.nu], &Slope::new(0, 1).unwrap()));
        assert_eq!(f.gamma.mul(&t4.reps[f.nu]).mul(&f.gamma_inf), s);
    }

    #[test]
    fn permutation_examples() {
        let t1 = cusp_table(1, Stabilizer::WithSign).unwrap();
        let d = hecke_coset_reps(1, 2).unwrap();
        let data = hecke_permutation_data(&d, &t1, Lift::Canonical, Exec::Sequential).unwrap();
        assert!(data.iter().all(|row| row[0].xi == 0));
        let t4 = cusp_table(4, Stabilizer::WithSign).unwrap();
        let id = hecke_permutation_data(&CosetDecomposition::identity(4), &t4, Lift::Canonical, Exec::Sequential).unwrap();
        for (nu, e) in id[0].iter().enumerate() {
            assert_eq!(e.xi, nu);
        }
        let d43 = hecke_coset_reps(4, 3).unwrap();
        let data = hecke_permutation_data(&d43, &t4, Lift::Canonical, Exec::Parallel).unwrap();
        assert_eq!(data.len() * data[0].len(), 12);
        for lift in [Lift::Shifted(3), Lift::Negated] {
            let alt = hecke_permutation_data(&d43, &t4, lift, Exec::Sequential).unwrap();
            for (r1, r2) in data.iter().zip(&alt) {
                for (a, b) in r1.iter().zip(r2) {
                    assert_eq!(a.xi, b.xi);
                }
            }
        }
    }

    fn sl2() -> impl Strategy<Value = Mat2Z> {
        // random words in T and S give SL2(Z) elements with entries up to about 1e6
        proptest::collection::vec((-40i64..=40, any::<bool>()), 1..6).prop_map(|w| {
            let mut g = Mat2Z::identity();
            for (k, s) in w {
                g = g.mul(&Mat2Z::translation(k));
                if s {
                    g = g.mul(&Mat2Z::new(0, -1, 1, 0));
                }
            }
            g
        })
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(g in sl2(), n in 1u64..=12) {
            let t = cusp_table(n, Stabilizer::WithSign).unwrap();
            let f = factor_by_cusp(&g, &t).unwrap();
            prop_assert!(gamma1_contains(n, &f.gamma));
            prop_assert_eq!(f.gamma.mul(&t.reps[f.nu]).mul(&f.gamma_inf), g.clone());
            let tl = cusp_table(n, Stabilizer::Level).unwrap();
            let f = factor_by_cusp(&g, &tl).unwrap();
            prop_assert_eq!(f.gamma.mul(&tl.reps[f.nu]).mul(&f.gamma_inf), g);
        }
    }
}
