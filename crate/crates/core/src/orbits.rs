//! Representation-generating orbits (SO₀(2,1) on dual vectors) and coadjoint
//! orbits of G: sampling, classification, dimensions and stabilizers.

use std::fmt;

use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coadjoint::{
    casimirs, coad, infinitesimal_coad_span, orbit_dimension, CasimirValues, DualElement, Mat6,
    BETA_ZERO_TOL,
};
use crate::lorentz::{
    exp_generator, minkowski_dot, GeneratorId, GroupElement, LorentzMatrix, NullRotation, RowVec3,
    Vec3,
};

/// Iwasawa parameters of random group elements are drawn from `[−R, R]`.
pub const PARAM_RANGE: f64 = 2.0;

/// Annihilation threshold for stabilizer directions, relative to `max(1, ‖X*‖)`.
pub const STABILIZER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "mass")]
pub enum MomentumOrbitClass {
    Degenerate,
    TwoSheetUpper(f64),
    TwoSheetLower(f64),
    ConeUpper,
    ConeLower,
    OneSheet(f64),
}

impl MomentumOrbitClass {
    pub fn label(&self) -> &'static str {
        match self {
            MomentumOrbitClass::Degenerate => "origin",
            MomentumOrbitClass::TwoSheetUpper(_) => "two-sheet-upper",
            MomentumOrbitClass::TwoSheetLower(_) => "two-sheet-lower",
            MomentumOrbitClass::ConeUpper => "cone-upper",
            MomentumOrbitClass::ConeLower => "cone-lower",
            MomentumOrbitClass::OneSheet(_) => "one-sheet",
        }
    }

    pub fn mass(&self) -> Option<f64> {
        match self {
            MomentumOrbitClass::TwoSheetUpper(m)
            | MomentumOrbitClass::TwoSheetLower(m)
            | MomentumOrbitClass::OneSheet(m) => Some(*m),
            _ => None,
        }
    }

    /// Same orbit type, masses compared with a relative tolerance.
    pub fn same_orbit(&self, other: &Self, rel_tol: f64) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
            && match (self.mass(), other.mass()) {
                (Some(a), Some(b)) => (a - b).abs() <= rel_tol * a.max(b),
                _ => true,
            }
    }
}

impl fmt::Display for MomentumOrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mass() {
            Some(m) => write!(f, "{}(m={m})", self.label()),
            None => f.write_str(self.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoadjointOrbitClass {
    pub geometry: MomentumOrbitClass,
    /// True on the `β* ≠ 0` stratum, where the orbit carries a plane of
    /// translations on top of the momentum orbit.
    pub cotangent: bool,
    pub dimension: usize,
    pub casimirs: CasimirValues,
}

impl CoadjointOrbitClass {
    /// Labels such as `two-sheet-upper+plane` or `one-sheet`.
    pub fn label(&self) -> String {
        if self.cotangent {
            format!("{}+plane", self.geometry.label())
        } else {
            self.geometry.label().to_string()
        }
    }
}

fn class_tol(k: &RowVec3) -> f64 {
    1e-9 * (1.0 + k.norm_squared())
}

pub fn classify_momentum(k0: &RowVec3) -> MomentumOrbitClass {
    let c = minkowski_dot(k0, k0);
    let tol = class_tol(k0);
    if c > tol {
        let m = c.sqrt();
        if k0[0] > 0.0 {
            MomentumOrbitClass::TwoSheetUpper(m)
        } else {
            MomentumOrbitClass::TwoSheetLower(m)
        }
    } else if c < -tol {
        MomentumOrbitClass::OneSheet((-c).sqrt())
    } else if k0.norm() <= tol {
        MomentumOrbitClass::Degenerate
    } else if k0[0] > 0.0 {
        MomentumOrbitClass::ConeUpper
    } else {
        MomentumOrbitClass::ConeLower
    }
}

pub fn classify_coadjoint(x: &DualElement) -> CoadjointOrbitClass {
    let b = x.beta();
    let cotangent = b.norm() > BETA_ZERO_TOL;
    let geometry = if cotangent {
        classify_momentum(&b)
    } else {
        classify_momentum(&x.alpha())
    };
    CoadjointOrbitClass {
        geometry,
        cotangent,
        dimension: orbit_dimension(x),
        casimirs: casimirs(x),
    }
}

/// Points of a sampled orbit together with the group parameters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample<P> {
    pub points: Vec<P>,
    /// Per point: `[θ, γ, ρ]` for momentum orbits, `[θ, γ, ρ, v₀, v₁, v₂]` for coadjoint orbits.
    pub generator_log: Vec<Vec<f64>>,
}

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `exp(J0, θ) exp(J2, γ) exp(J−, ρ)` with parameters uniform in `[−r, r]`.
pub fn random_lorentz<R: Rng>(rng: &mut R, r: f64) -> (LorentzMatrix, [f64; 3]) {
    let p = [
        rng.gen_range(-r..=r),
        rng.gen_range(-r..=r),
        rng.gen_range(-r..=r),
    ];
    let l = exp_generator(GeneratorId::J0, p[0]).unwrap()
        * exp_generator(GeneratorId::J2, p[1]).unwrap()
        * exp_generator(NullRotation::Minus.generator(), p[2]).unwrap();
    (l, p)
}

pub fn random_group_element<R: Rng>(rng: &mut R, r: f64) -> (GroupElement, [f64; 6]) {
    let (l, p) = random_lorentz(rng, r);
    let v = Vec3::new(
        rng.gen_range(-r..=r),
        rng.gen_range(-r..=r),
        rng.gen_range(-r..=r),
    );
    (
        GroupElement::new(l, v),
        [p[0], p[1], p[2], v[0], v[1], v[2]],
    )
}

/// Points `k0 Λᵢ`; point `i` uses its own random stream so the output does not
/// depend on how the work is split.
pub fn sample_repgen_orbit(k0: &RowVec3, n: usize, seed: u64) -> OrbitSample<RowVec3> {
    let mut points = Vec::with_capacity(n);
    let mut log = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = rng_for(seed, i as u64);
        let (l, p) = random_lorentz(&mut rng, PARAM_RANGE);
        points.push(l.apply_row(k0));
        log.push(p.to_vec());
    }
    OrbitSample {
        points,
        generator_log: log,
    }
}

pub fn sample_coadjoint_orbit(x: &DualElement, n: usize, seed: u64) -> OrbitSample<DualElement> {
    let mut points = Vec::with_capacity(n);
    let mut log = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = rng_for(seed, i as u64);
        let (g, p) = random_group_element(&mut rng, PARAM_RANGE);
        points.push(coad(&g, x));
        log.push(p.to_vec());
    }
    OrbitSample {
        points,
        generator_log: log,
    }
}

/// A direction in the six-dimensional algebra, named after a basis generator
/// or a mixed combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub label: String,
    pub coords: [f64; 6],
}

impl Direction {
    fn generator(id: GeneratorId) -> Self {
        Self {
            label: id.name().to_string(),
            coords: id.coords(),
        }
    }

    fn mixed(label: &str, coords: [f64; 6]) -> Self {
        Self {
            label: label.to_string(),
            coords,
        }
    }
}

/// Candidate directions checked by [`stabilizer_probe`]: the eight named
/// generators plus the light-like translations `P0 ± P1`.
pub fn candidate_directions() -> Vec<Direction> {
    let mut out: Vec<Direction> = GeneratorId::ALL
        .iter()
        .map(|g| Direction::generator(*g))
        .collect();
    out.push(Direction::mixed("P0+P1", [0.0, 0.0, 0.0, 1.0, 1.0, 0.0]));
    out.push(Direction::mixed("P0-P1", [0.0, 0.0, 0.0, 1.0, -1.0, 0.0]));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerReport {
    /// Candidate directions annihilating `X*`.
    pub directions: Vec<Direction>,
    /// Dimension of the stabilizer algebra, `6 − dim orbit`.
    pub kernel_dim: usize,
    /// Whether the returned directions span the whole stabilizer algebra.
    pub spans_kernel: bool,
}

impl StabilizerReport {
    pub fn labels(&self) -> Vec<&str> {
        self.directions.iter().map(|d| d.label.as_str()).collect()
    }
}

/// Residual `‖c · S‖` of a direction against the tangent span `S`.
pub fn annihilation_residual(span: &Mat6, coords: &[f64; 6]) -> f64 {
    let c = nalgebra::RowVector6::from_row_slice(coords);
    let n = c.norm();
    if n == 0.0 {
        return 0.0;
    }
    (c * span).norm() / n
}

/// Rank of a set of directions.
pub fn directions_rank(dirs: &[[f64; 6]]) -> usize {
    if dirs.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(dirs.len(), 6, |i, j| dirs[i][j]);
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-8 * smax).count()
}

pub fn stabilizer_probe(x: &DualElement) -> StabilizerReport {
    let span = infinitesimal_coad_span(x);
    let tol = STABILIZER_TOL * x.row().norm().max(1.0);
    let directions: Vec<Direction> = candidate_directions()
        .into_iter()
        .filter(|d| annihilation_residual(&span, &d.coords) <= tol)
        .collect();
    let kernel_dim = 6 - orbit_dimension(x);
    let coords: Vec<[f64; 6]> = directions.iter().map(|d| d.coords).collect();
    StabilizerReport {
        spans_kernel: directions_rank(&coords) == kernel_dim,
        directions,
        kernel_dim,
    }
}

/// Dimension of the momentum orbit through `k0`, from the rank of `{k0 Jᵢ}`.
pub fn momentum_orbit_dimension(k0: &RowVec3) -> usize {
    let mut m = Matrix3::zeros();
    for (i, id) in [GeneratorId::J0, GeneratorId::J1, GeneratorId::J2]
        .iter()
        .enumerate()
    {
        m.set_row(i, &(k0 * id.matrix().unwrap()));
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax <= 1e-12 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-8 * smax).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsomorphismReport {
    pub coadjoint_dimension: usize,
    pub momentum_dimension: usize,
    pub dimension_ok: bool,
    /// Sampled coadjoint points whose `β*` projection left the momentum orbit.
    pub projection_failures: usize,
    pub samples: usize,
}

impl IsomorphismReport {
    pub fn ok(&self) -> bool {
        self.dimension_ok && self.projection_failures == 0
    }
}

/// Checks `dim 𝒪_(0,k0) = 2 dim 𝒪*_k0` and that the `β*` projection of the
/// coadjoint orbit stays on the momentum orbit.
pub fn verify_isomorphism(k0: &RowVec3, samples: usize, seed: u64) -> IsomorphismReport {
    let x = DualElement::momentum(*k0);
    let cd = orbit_dimension(&x);
    let md = momentum_orbit_dimension(k0);
    let class = classify_momentum(k0);
    let sample = sample_coadjoint_orbit(&x, samples, seed);
    let projection_failures = sample
        .points
        .iter()
        .filter(|p| !classify_momentum(&p.beta()).same_orbit(&class, 1e-8))
        .count();
    IsomorphismReport {
        coadjoint_dimension: cd,
        momentum_dimension: md,
        dimension_ok: cd == 2 * md,
        projection_failures,
        samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkDrift {
    pub i1: f64,
    pub i2: f64,
    pub i3: Option<f64>,
    pub steps: usize,
}

/// Random walk `X*_{j+1} = coad(g_j, X*_j)` with small steps, recording the
/// largest Casimir drift relative to `max(1, ‖X*_j‖²)`.
///
/// On the `β* = 0` stratum the steps are pure Lorentz so the walk stays in
/// the stratum and `i3` is tracked too.
pub fn coadjoint_walk(x: &DualElement, steps: usize, step: f64, seed: u64) -> WalkDrift {
    let mut rng = rng_for(seed, 0);
    let c0 = casimirs(x);
    let lorentz_only = c0.i3.is_some();
    let mut cur = *x;
    let mut drift = WalkDrift {
        i1: 0.0,
        i2: 0.0,
        i3: c0.i3.map(|_| 0.0),
        steps,
    };
    for _ in 0..steps {
        let g = if lorentz_only {
            GroupElement::lorentz(random_lorentz(&mut rng, step).0)
        } else {
            random_group_element(&mut rng, step).0
        };
        cur = coad(&g, &cur);
        let scale = cur.row().norm_squared().max(1.0);
        let c = casimirs(&cur);
        drift.i1 = drift.i1.max((c.i1 - c0.i1).abs() / scale);
        drift.i2 = drift.i2.max((c.i2 - c0.i2).abs() / scale);
        if let (Some(d), Some(a), Some(b)) = (drift.i3.as_mut(), c0.i3, c.i3) {
            *d = d.max((a - b).abs() / scale);
        }
    }
    drift
}

/// The seven seed vectors of the coadjoint-orbit table, upper signs, mass `m`.
pub fn table_seeds(m: f64) -> [(&'static str, DualElement); 7] {
    let z = RowVec3::zeros();
    [
        ("origin", DualElement::zero()),
        ("two-sheet", DualElement::new(RowVec3::new(m, 0.0, 0.0), z)),
        (
            "two-sheet+plane",
            DualElement::new(z, RowVec3::new(m, 0.0, 0.0)),
        ),
        ("cone", DualElement::new(RowVec3::new(1.0, 1.0, 0.0), z)),
        (
            "cone+plane",
            DualElement::new(z, RowVec3::new(1.0, 1.0, 0.0)),
        ),
        ("one-sheet", DualElement::new(RowVec3::new(0.0, m, 0.0), z)),
        (
            "one-sheet+plane",
            DualElement::new(z, RowVec3::new(0.0, m, 0.0)),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn momentum_classification_examples() {
        assert_eq!(
            classify_momentum(&RowVec3::new(2.0, 0.0, 0.0)),
            MomentumOrbitClass::TwoSheetUpper(2.0)
        );
        assert_eq!(
            classify_momentum(&RowVec3::new(-1.0, 1.0, 0.0)),
            MomentumOrbitClass::ConeLower
        );
        assert_eq!(
            classify_momentum(&RowVec3::new(0.0, 1.5, 0.0)),
            MomentumOrbitClass::OneSheet(1.5)
        );
        assert_eq!(
            classify_momentum(&RowVec3::zeros()),
            MomentumOrbitClass::Degenerate
        );
    }

    #[test]
    fn coadjoint_classification_examples() {
        let c = classify_coadjoint(&DualElement::zero());
        assert_eq!((c.label().as_str(), c.dimension), ("origin", 0));
        for s in [1.0, -1.0] {
            let c = classify_coadjoint(&DualElement::new(
                RowVec3::new(s, 1.0, 0.0),
                RowVec3::zeros(),
            ));
            assert_eq!(c.dimension, 2);
            assert!(c.label().starts_with("cone"));
        }
        let c = classify_coadjoint(&DualElement::momentum(RowVec3::new(0.0, 1.0, 0.0)));
        assert_eq!((c.label().as_str(), c.dimension), ("one-sheet+plane", 4));
    }

    #[test]
    fn repgen_orbit_examples() {
        let k0 = RowVec3::new(1.0, 1.0, 0.0);
        let a: f64 = 0.8;
        let k = exp_generator(GeneratorId::J0, a).unwrap().apply_row(&k0);
        assert!((k - RowVec3::new(1.0, a.cos(), -a.sin())).norm() < 1e-15);
        let g: f64 = 1.1;
        let k = exp_generator(GeneratorId::J2, g).unwrap().apply_row(&k0);
        let want = RowVec3::new(g.cosh() + g.sinh(), g.sinh() + g.cosh(), 0.0);
        assert!((k - want).norm() < 1e-14);

        let s = sample_repgen_orbit(&RowVec3::new(1.3, 0.0, 0.0), 200, 7);
        for k in &s.points {
            assert!((minkowski_dot(k, k) - 1.69).abs() <= 1e-8 * (1.0 + k.norm_squared()));
        }
        assert_eq!(s, sample_repgen_orbit(&RowVec3::new(1.3, 0.0, 0.0), 200, 7));
    }

    #[test]
    fn coadjoint_orbit_examples() {
        let s = sample_coadjoint_orbit(&DualElement::zero(), 10, 1);
        assert!(s.points.iter().all(|p| p.row().norm() == 0.0));
        let x = DualElement::new(RowVec3::new(1.0, 0.0, 0.0), RowVec3::zeros());
        for p in sample_coadjoint_orbit(&x, 100, 2).points {
            assert_eq!(p.beta(), RowVec3::zeros());
            let a = p.alpha();
            assert!((minkowski_dot(&a, &a) - 1.0).abs() <= 1e-9 * a.norm_squared());
        }
        let x = DualElement::momentum(RowVec3::new(1.0, 1.0, 0.0));
        for p in sample_coadjoint_orbit(&x, 100, 3).points {
            assert_eq!(classify_momentum(&p.beta()), MomentumOrbitClass::ConeUpper);
        }
    }

    #[test]
    fn stabilizer_examples() {
        let m = 1.0;
        let r = stabilizer_probe(&DualElement::momentum(RowVec3::new(m, 0.0, 0.0)));
        assert_eq!(r.labels(), ["J0", "P0"]);
        assert!(r.spans_kernel);
        let r = stabilizer_probe(&DualElement::new(
            RowVec3::new(0.0, m, 0.0),
            RowVec3::zeros(),
        ));
        assert_eq!(r.labels(), ["J1", "P0", "P1", "P2", "P0+P1", "P0-P1"]);
        assert!(r.spans_kernel && r.kernel_dim == 4);
        let r = stabilizer_probe(&DualElement::momentum(RowVec3::new(1.0, 1.0, 0.0)));
        assert_eq!(r.labels(), ["J+", "P0-P1"]);
        let r = stabilizer_probe(&DualElement::momentum(RowVec3::new(-1.0, 1.0, 0.0)));
        assert_eq!(r.labels(), ["J-", "P0+P1"]);
    }

    #[test]
    fn isomorphism_examples() {
        for k0 in [
            RowVec3::new(1.0, 0.0, 0.0),
            RowVec3::new(1.0, 1.0, 0.0),
            RowVec3::new(0.0, 1.0, 0.0),
        ] {
            let r = verify_isomorphism(&k0, 100, 5);
            assert_eq!((r.coadjoint_dimension, r.momentum_dimension), (4, 2));
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn walks_keep_casimirs() {
        for (_, x) in table_seeds(1.0) {
            let d = coadjoint_walk(&x, 1000, 0.05, 11);
            assert!(d.i1 <= 1e-9 && d.i2 <= 1e-9, "{d:?}");
            if let Some(i3) = d.i3 {
                assert!(i3 <= 1e-9);
            }
        }
    }

    fn dual() -> impl Strategy<Value = DualElement> {
        prop::array::uniform6(-2.0f64..2.0).prop_map(|x| DualElement::from_slice(&x))
    }

    proptest! {
        #[test]
        fn classification_is_orbit_invariant(x in dual(), seed in 0u64..1000) {
            let c0 = classify_coadjoint(&x);
            let mut rng = rng_for(seed, 0);
            let (g, _) = random_group_element(&mut rng, 1.0);
            let c1 = classify_coadjoint(&coad(&g, &x));
            prop_assert_eq!(c0.label(), c1.label());
            prop_assert_eq!(c0.dimension, c1.dimension);
        }

        #[test]
        fn repgen_orbits_keep_sheet(k in prop::array::uniform3(-3.0f64..3.0), seed in 0u64..1000) {
            let k0 = RowVec3::new(k[0], k[1], k[2]);
            let c = classify_momentum(&k0);
            for p in sample_repgen_orbit(&k0, 20, seed).points {
                prop_assert!((minkowski_dot(&p, &p) - minkowski_dot(&k0, &k0)).abs() <= 1e-8 * (1.0 + p.norm_squared()));
                if !matches!(c, MomentumOrbitClass::OneSheet(_)) {
                    prop_assert_eq!(p[0].signum(), k0[0].signum());
                }
            }
        }
    }
}
