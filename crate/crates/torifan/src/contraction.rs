//! Extremal contraction structure: the fiber/divisorial/small trichotomy,
//! projective-space bundle detection with chart-by-chart lattice splitting
//! certificates, construction of the base fan, and the per-ray theorem
//! report tying length, bundle structure, and the relative tangent foliation
//! together.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::fan::{validate_fan, Fan, LatticeProjection, RawFan};
use crate::foliation::{foliation_from_basis, length, FoliationSubspace};
use crate::intersection::{mori_cone, multiplicity, wall_relation, ExtremalRay};
use crate::linalg::{
    lattice_index, primitive, rat_vec_from_int, smith_normal_form, Int, IntMatrix, Rat,
};

/// Sign trichotomy of an extremal class: all coefficients nonnegative means
/// fiber type, exactly one negative divisorial, two or more small. The
/// convention follows the classical description of toric extremal
/// contractions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionKind {
    FiberType,
    Divisorial,
    Small,
}

impl ContractionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ContractionKind::FiberType => "fiber",
            ContractionKind::Divisorial => "divisorial",
            ContractionKind::Small => "small",
        }
    }
}

/// Classify the contraction of an extremal ray from the sign pattern of its
/// class. The pattern is a class invariant; every wall on the ray is
/// re-checked and a disagreement is an error rather than a silent pick.
pub fn classify_contraction(fan: &Fan, ray: &ExtremalRay) -> Result<ContractionKind, Error> {
    let walls = fan.walls()?;
    for &w in &ray.walls {
        let relation = wall_relation(fan, &walls[w])?;
        if relation.coeffs != ray.class.0 {
            return Err(Error::InconsistentSigns);
        }
    }
    let negatives = ray.class.0.iter().filter(|c| c.is_negative()).count();
    Ok(match negatives {
        0 => ContractionKind::FiberType,
        1 => ContractionKind::Divisorial,
        _ => ContractionKind::Small,
    })
}

/// Witness that a maximal cone's lattice splits off the fiber directions:
/// the columns are a basis of the saturated fiber sublattice followed by a
/// basis of the saturated complement sublattice, and the certificate
/// verifies exactly when that stacked matrix is unimodular.
#[derive(Clone, Debug)]
pub struct SplittingCertificate {
    pub max_cone: usize,
    pub stacked_basis: IntMatrix,
}

impl SplittingCertificate {
    pub fn verify(&self) -> bool {
        self.stacked_basis.rows() == self.stacked_basis.cols()
            && self.stacked_basis.det().abs() == Int::one()
    }
}

/// A detected projective-space bundle structure on an extremal contraction.
#[derive(Clone, Debug)]
pub struct BundleStructure {
    /// The r+1 rays whose primitive generators sum to zero (the fiber fan).
    pub fiber_rays: Vec<usize>,
    pub fiber_rank: usize,
    /// The base fan, constructed by projecting along the fiber span and
    /// validated; complete whenever the input fan is.
    pub quotient: Fan,
    pub splittings: Vec<SplittingCertificate>,
}

/// Structured reason a bundle was not certified, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleRejection {
    /// The ray is not of fiber type, so no bundle is attempted.
    NotFiberType { kind: ContractionKind },
    /// A wall class coefficient on the support differs from one.
    NonUnitCoefficient { ray: usize },
    /// The support size differs from rank + 1.
    WrongSupportSize { expected: usize, found: usize },
    /// A support ray lies outside the foliation subspace.
    SupportOutsideFoliation { ray: usize },
    /// The support rays do not sum to zero (unreachable for unit classes).
    RelationNotZeroSum,
    /// A maximal cone does not contain exactly r fiber rays.
    FiberCountMismatch { max_cone: usize, found: usize },
    /// A wall on the ray has multiplicity differing from an adjacent cone.
    WallMultiplicityMismatch { wall: usize, max_cone: usize },
    /// A maximal cone's lattice does not split off the fiber directions.
    SplittingFails { max_cone: usize },
    /// Fiber rays fail to span their saturated sublattice. The mult
    /// equalities checked above rule this out; a hit here needs review,
    /// not silent rejection.
    FiberLatticeNotSpanned { max_cone: usize },
    /// The projected base did not assemble into a valid complete fan.
    QuotientInvalid { detail: String },
}

impl BundleRejection {
    pub fn describe(&self) -> String {
        match self {
            BundleRejection::NotFiberType { kind } => {
                format!("contraction is {} type, not fiber type", kind.as_str())
            }
            BundleRejection::NonUnitCoefficient { ray } => {
                format!("wall class coefficient on ray {ray} is not 1")
            }
            BundleRejection::WrongSupportSize { expected, found } => {
                format!("class support has {found} rays, expected {expected}")
            }
            BundleRejection::SupportOutsideFoliation { ray } => {
                format!("support ray {ray} lies outside the foliation subspace")
            }
            BundleRejection::RelationNotZeroSum => "support rays do not sum to zero".into(),
            BundleRejection::FiberCountMismatch { max_cone, found } => {
                format!("maximal cone {max_cone} contains {found} fiber rays, expected rank")
            }
            BundleRejection::WallMultiplicityMismatch { wall, max_cone } => {
                format!("wall {wall} and adjacent cone {max_cone} have different multiplicities")
            }
            BundleRejection::SplittingFails { max_cone } => {
                format!("lattice does not split over maximal cone {max_cone}")
            }
            BundleRejection::FiberLatticeNotSpanned { max_cone } => {
                format!("fiber rays do not span their saturation over cone {max_cone}")
            }
            BundleRejection::QuotientInvalid { detail } => {
                format!("base fan construction failed: {detail}")
            }
        }
    }
}

pub enum BundleDetection {
    Bundle(Box<BundleStructure>),
    Rejected(BundleRejection),
}

/// Certify (or reject, with a witness) that the contraction of `ray` is a
/// projective-space bundle compatible with the foliation `v`. All four
/// criteria must hold:
///
///   1. the wall classes on the ray have unit coefficients supported on
///      exactly rank+1 rays of `v`, whose primitive generators sum to zero;
///   2. every maximal cone contains exactly rank of those fiber rays;
///   3. every wall on the ray has the same multiplicity as both adjacent
///      maximal cones;
///   4. over every maximal cone the lattice is the direct sum of the
///      saturated fiber and complement sublattices (certified by a
///      unimodular stacked basis).
///
/// On success the base fan is built by projecting along the fiber span and
/// validated, and the maximal cones must group into fibers exactly.
pub fn detect_projective_bundle(
    fan: &Fan,
    ray: &ExtremalRay,
    v: &FoliationSubspace,
) -> Result<BundleDetection, Error> {
    use BundleDetection::Rejected;

    let kind = classify_contraction(fan, ray)?;
    if kind != ContractionKind::FiberType {
        return Ok(Rejected(BundleRejection::NotFiberType { kind }));
    }

    // Criterion 1: unit coefficients on a support of size rank+1 inside v.
    let class = &ray.class.0;
    let support: Vec<usize> = (0..class.len()).filter(|&i| !class[i].is_zero()).collect();
    for &i in &support {
        if class[i] != Int::one() {
            return Ok(Rejected(BundleRejection::NonUnitCoefficient { ray: i }));
        }
    }
    let r = v.rank();
    if support.len() != r + 1 {
        return Ok(Rejected(BundleRejection::WrongSupportSize {
            expected: r + 1,
            found: support.len(),
        }));
    }
    if let Some(&outside) = support.iter().find(|&&i| !v.contains_ray(i)) {
        return Ok(Rejected(BundleRejection::SupportOutsideFoliation { ray: outside }));
    }
    let n = fan.ambient_rank();
    let mut sum = vec![Int::zero(); n];
    for &i in &support {
        for (s, c) in sum.iter_mut().zip(fan.ray(i).coords()) {
            *s += c;
        }
    }
    if !sum.iter().all(Int::is_zero) {
        return Ok(Rejected(BundleRejection::RelationNotZeroSum));
    }

    // Criterion 2: each maximal cone sees exactly r fiber rays.
    let fiber_set: BTreeSet<usize> = support.iter().copied().collect();
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let found = cone.ray_ids().iter().filter(|id| fiber_set.contains(id)).count();
        if found != r {
            return Ok(Rejected(BundleRejection::FiberCountMismatch { max_cone: ci, found }));
        }
    }

    // Criterion 3: multiplicity equalities across every wall on the ray.
    let walls = fan.walls()?;
    for &w in &ray.walls {
        let wall = &walls[w];
        let mult_wall = multiplicity(fan, &wall.wall_cone)?;
        for cone_id in [wall.left, wall.right] {
            if multiplicity(fan, &fan.max_cones()[cone_id])? != mult_wall {
                return Ok(Rejected(BundleRejection::WallMultiplicityMismatch {
                    wall: w,
                    max_cone: cone_id,
                }));
            }
        }
    }

    // Criterion 4: chart-by-chart lattice splitting.
    let mut splittings = Vec::with_capacity(fan.max_cones().len());
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let fiber_part: Vec<usize> =
            cone.ray_ids().iter().copied().filter(|id| fiber_set.contains(id)).collect();
        let base_part: Vec<usize> =
            cone.ray_ids().iter().copied().filter(|id| !fiber_set.contains(id)).collect();
        let mut stacked = saturation_basis(fan, &fiber_part);
        stacked.extend(saturation_basis(fan, &base_part));
        let certificate = SplittingCertificate {
            max_cone: ci,
            stacked_basis: IntMatrix::from_columns(n, &stacked),
        };
        if !certificate.verify() {
            return Ok(Rejected(BundleRejection::SplittingFails { max_cone: ci }));
        }
        // The mult equalities force the fiber rays to span their saturation;
        // a failure here is escalation material, not a silent rejection.
        if lattice_index(&fan.ray_matrix(&fiber_part))? != Int::one() {
            return Ok(Rejected(BundleRejection::FiberLatticeNotSpanned { max_cone: ci }));
        }
        splittings.push(certificate);
    }

    // Build the base: project every maximal cone along the fiber span.
    let span_vectors: Vec<Vec<Int>> =
        support.iter().map(|&i| fan.ray(i).coords().to_vec()).collect();
    let projection = LatticeProjection::along_span(n, &span_vectors);
    let mut ray_table: Vec<Vec<Int>> = Vec::new();
    let mut ray_lookup: BTreeMap<Vec<Int>, usize> = BTreeMap::new();
    let mut image_cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for cone in fan.max_cones() {
        let mut ids = Vec::new();
        for &rid in cone.ray_ids() {
            if fiber_set.contains(&rid) {
                continue;
            }
            let image = projection.project(fan.ray(rid).coords());
            let prim = match primitive(&image) {
                Ok(p) => p,
                Err(_) => {
                    return Ok(Rejected(BundleRejection::QuotientInvalid {
                        detail: format!("ray {rid} projects to zero"),
                    }))
                }
            };
            let id = *ray_lookup.entry(prim.clone()).or_insert_with(|| {
                ray_table.push(prim);
                ray_table.len() - 1
            });
            ids.push(id);
        }
        ids.sort_unstable();
        image_cones.insert(ids);
    }
    if image_cones.len() * (r + 1) != fan.max_cones().len() {
        return Ok(Rejected(BundleRejection::QuotientInvalid {
            detail: format!(
                "{} maximal cones do not group into fibers of {} over {} base cones",
                fan.max_cones().len(),
                r + 1,
                image_cones.len()
            ),
        }));
    }
    let raw = RawFan {
        ambient_rank: projection.quotient_rank(),
        rays: ray_table,
        max_cones: image_cones.into_iter().collect(),
    };
    let quotient = match validate_fan(&raw) {
        Ok(f) => f,
        Err(diags) => {
            return Ok(Rejected(BundleRejection::QuotientInvalid {
                detail: format!("{} validation diagnostics", diags.len()),
            }))
        }
    };
    if !quotient.is_complete() {
        return Ok(Rejected(BundleRejection::QuotientInvalid {
            detail: "projected base fan is not complete".into(),
        }));
    }

    Ok(BundleDetection::Bundle(Box::new(BundleStructure {
        fiber_rays: support,
        fiber_rank: r,
        quotient,
        splittings,
    })))
}

/// Basis of the saturation of the span of the given rays, chosen through
/// Smith normal form so certificates are reproducible.
fn saturation_basis(fan: &Fan, ids: &[usize]) -> Vec<Vec<Int>> {
    if ids.is_empty() {
        return Vec::new();
    }
    let m = fan.ray_matrix(ids);
    let snf = smith_normal_form(&m);
    let rank = snf.nonzero_count();
    let left_inv = snf
        .left
        .unimodular_inverse()
        .expect("smith normal form left factor is unimodular");
    (0..rank).map(|i| left_inv.column(i)).collect()
}

/// The foliation by the fibers of a detected bundle: the span of the fiber
/// rays.
pub fn relative_tangent_foliation(
    fan: &Fan,
    bundle: &BundleStructure,
) -> Result<FoliationSubspace, Error> {
    let vectors: Vec<Vec<Rat>> = bundle
        .fiber_rays
        .iter()
        .map(|&i| rat_vec_from_int(fan.ray(i).coords()))
        .collect();
    let v = foliation_from_basis(fan, &vectors)?;
    debug_assert_eq!(v.rank(), bundle.fiber_rank);
    Ok(v)
}

/// Per-extremal-ray verdict of the theorem checker.
#[derive(Debug)]
pub struct ContractionReport {
    pub ray_index: usize,
    pub rank: usize,
    pub length: Rat,
    pub kind: ContractionKind,
    pub bundle: Option<BundleStructure>,
    pub rejection: Option<BundleRejection>,
    pub matches_relative_tangent: bool,
    pub theorem_ok: bool,
}

/// Verify the length bound and the bundle clause on every extremal ray of a
/// complete simplicial projective fan:
///
///   * `length <= rank + 1` always;
///   * `length > rank` forces a certified bundle with `V` equal to the span
///     of the fiber rays and `length == rank + 1` exactly.
pub fn verify_theorem(fan: &Fan, v: &FoliationSubspace) -> Result<Vec<ContractionReport>, Error> {
    let mori = mori_cone(fan)?;
    let r = v.rank();
    let r_rat = Rat::from_integer(Int::from(r as u64));
    let bound = &r_rat + Rat::one();
    let mut reports = Vec::with_capacity(mori.extremal_rays.len());
    for (i, ray) in mori.extremal_rays.iter().enumerate() {
        let len = length(fan, v, ray)?;
        let kind = classify_contraction(fan, ray)?;
        let (bundle, rejection) = match detect_projective_bundle(fan, ray, v)? {
            BundleDetection::Bundle(b) => (Some(*b), None),
            BundleDetection::Rejected(reason) => (None, Some(reason)),
        };
        let matches_relative_tangent = match &bundle {
            Some(b) => relative_tangent_foliation(fan, b)?.same_subspace(v),
            None => false,
        };
        let strong_clause_needed = len > r_rat;
        let theorem_ok = len <= bound
            && (!strong_clause_needed
                || (bundle.is_some() && matches_relative_tangent && len == bound));
        reports.push(ContractionReport {
            ray_index: i,
            rank: r,
            length: len,
            kind,
            bundle,
            rejection,
            matches_relative_tangent,
            theorem_ok,
        });
    }
    Ok(reports)
}
