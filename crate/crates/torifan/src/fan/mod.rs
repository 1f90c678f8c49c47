//! Fans of simplicial rational polyhedral cones: validation, wall
//! enumeration, star quotients, and the completeness / projectivity
//! predicates.
//!
//! A fan is stored by its maximal cones over a shared ray table; faces are
//! derived on demand and cached. Validation either returns a [`Fan`] whose
//! invariants hold by construction, or the complete list of violations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::linalg::{
    self, int_rows_rank, kernel_basis, lp, primitive, rat_from_int, rat_vec_from_int,
    smith_normal_form, vectors_rank, Int, IntMatrix, Rat,
};

/// Primitive integer lattice point generating a one-dimensional cone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RayVector {
    coords: Vec<Int>,
}

impl RayVector {
    /// Wraps coordinates that are already primitive. Panics otherwise;
    /// untrusted input goes through [`validate_fan`].
    pub fn new(coords: Vec<Int>) -> Self {
        debug_assert!(
            primitive(&coords).map(|p| p == coords).unwrap_or(false),
            "ray coordinates must be primitive"
        );
        RayVector { coords }
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }
}

/// A simplicial cone given by sorted indices into the fan's ray table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    ray_ids: Vec<usize>,
}

impl Cone {
    pub fn new(mut ray_ids: Vec<usize>) -> Self {
        ray_ids.sort_unstable();
        ray_ids.dedup();
        Cone { ray_ids }
    }

    pub fn ray_ids(&self) -> &[usize] {
        &self.ray_ids
    }

    pub fn dim(&self) -> usize {
        self.ray_ids.len()
    }

    pub fn contains(&self, other: &Cone) -> bool {
        other.ray_ids.iter().all(|id| self.ray_ids.binary_search(id).is_ok())
    }

    fn common_ids(&self, other: &Cone) -> Vec<usize> {
        self.ray_ids
            .iter()
            .copied()
            .filter(|id| other.ray_ids.binary_search(id).is_ok())
            .collect()
    }
}

/// Codimension-one cone separating two maximal cones. `left` is always the
/// lower maximal-cone id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub wall_cone: Cone,
    pub left: usize,
    pub right: usize,
}

/// Unvalidated fan description, as read from the JSON interchange format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawFan {
    pub ambient_rank: usize,
    pub rays: Vec<Vec<Int>>,
    pub max_cones: Vec<Vec<usize>>,
}

/// A violation found by [`validate_fan`]. Diagnostics are data, never a
/// partial fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    WrongRayLength { ray: usize, expected: usize, found: usize },
    ZeroRay { ray: usize },
    NonPrimitiveRay { ray: usize },
    DuplicateRay { first: usize, second: usize },
    RayIndexOutOfRange { cone: usize, index: usize },
    RepeatedRayInCone { cone: usize, ray: usize },
    DependentConeRays { cone: usize },
    DuplicateCone { first: usize, second: usize },
    NonMaximalCone { cone: usize, inside: usize },
    UnusedRay { ray: usize },
    IntersectionNotFace { left: usize, right: usize },
}

impl Diagnostic {
    pub fn code(&self) -> &'static str {
        match self {
            Diagnostic::WrongRayLength { .. } => "WrongRayLength",
            Diagnostic::ZeroRay { .. } => "ZeroRay",
            Diagnostic::NonPrimitiveRay { .. } => "NonPrimitiveRay",
            Diagnostic::DuplicateRay { .. } => "DuplicateRay",
            Diagnostic::RayIndexOutOfRange { .. } => "RayIndexOutOfRange",
            Diagnostic::RepeatedRayInCone { .. } => "RepeatedRayInCone",
            Diagnostic::DependentConeRays { .. } => "DependentConeRays",
            Diagnostic::DuplicateCone { .. } => "DuplicateCone",
            Diagnostic::NonMaximalCone { .. } => "NonMaximalCone",
            Diagnostic::UnusedRay { .. } => "UnusedRay",
            Diagnostic::IntersectionNotFace { .. } => "IntersectionNotFace",
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::WrongRayLength { ray, expected, found } => {
                write!(f, "ray {ray} has {found} coordinates, expected {expected}")
            }
            Diagnostic::ZeroRay { ray } => write!(f, "ray {ray} is the zero vector"),
            Diagnostic::NonPrimitiveRay { ray } => {
                write!(f, "ray {ray} is not primitive (coordinate gcd exceeds 1)")
            }
            Diagnostic::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} are identical")
            }
            Diagnostic::RayIndexOutOfRange { cone, index } => {
                write!(f, "cone {cone} references missing ray {index}")
            }
            Diagnostic::RepeatedRayInCone { cone, ray } => {
                write!(f, "cone {cone} lists ray {ray} more than once")
            }
            Diagnostic::DependentConeRays { cone } => {
                write!(f, "cone {cone} has rationally dependent rays (not simplicial)")
            }
            Diagnostic::DuplicateCone { first, second } => {
                write!(f, "maximal cones {first} and {second} are identical")
            }
            Diagnostic::NonMaximalCone { cone, inside } => {
                write!(f, "cone {cone} is a face of cone {inside}, so it is not maximal")
            }
            Diagnostic::UnusedRay { ray } => {
                write!(f, "ray {ray} does not belong to any maximal cone")
            }
            Diagnostic::IntersectionNotFace { left, right } => {
                write!(f, "cones {left} and {right} intersect in a non-face")
            }
        }
    }
}

/// Validated fan. Immutable after construction; derived caches are filled
/// with single-assignment semantics, so shared references are thread-safe.
#[derive(Debug)]
pub struct Fan {
    ambient_rank: usize,
    rays: Vec<RayVector>,
    max_cones: Vec<Cone>,
    faces: OnceLock<BTreeSet<Vec<usize>>>,
    walls: OnceLock<Result<Vec<Wall>, Error>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan {
            ambient_rank: self.ambient_rank,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
            faces: OnceLock::new(),
            walls: OnceLock::new(),
        }
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_rank == other.ambient_rank
            && self.rays == other.rays
            && self.max_cones == other.max_cones
    }
}
impl Eq for Fan {}

impl Fan {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[RayVector] {
        &self.rays
    }

    pub fn ray(&self, id: usize) -> &RayVector {
        &self.rays[id]
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn to_raw(&self) -> RawFan {
        RawFan {
            ambient_rank: self.ambient_rank,
            rays: self.rays.iter().map(|r| r.coords.clone()).collect(),
            max_cones: self.max_cones.iter().map(|c| c.ray_ids.clone()).collect(),
        }
    }

    /// Matrix whose columns are the given rays.
    pub fn ray_matrix(&self, ids: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<Int>> = ids.iter().map(|&i| self.rays[i].coords.clone()).collect();
        IntMatrix::from_columns(self.ambient_rank, &cols)
    }

    /// All faces of all maximal cones, as sorted ray-id sets (the empty set
    /// is the origin).
    pub fn faces(&self) -> &BTreeSet<Vec<usize>> {
        self.faces.get_or_init(|| {
            let mut out = BTreeSet::new();
            for cone in &self.max_cones {
                let ids = &cone.ray_ids;
                let d = ids.len();
                for mask in 0..(1u32 << d) {
                    let subset: Vec<usize> = (0..d)
                        .filter(|&b| mask & (1 << b) != 0)
                        .map(|b| ids[b])
                        .collect();
                    out.insert(subset);
                }
            }
            out
        })
    }

    pub fn contains_cone(&self, cone: &Cone) -> bool {
        self.faces().contains(&cone.ray_ids)
    }

    /// Re-checks that every maximal cone has independent rays. Holds by
    /// construction for validated fans; see [`is_simplicial_raw`] for raw
    /// descriptions.
    pub fn is_simplicial(&self) -> bool {
        self.max_cones.iter().all(|c| {
            let vectors: Vec<Vec<Int>> =
                c.ray_ids.iter().map(|&i| self.rays[i].coords.clone()).collect();
            vectors_rank(&vectors) == c.dim()
        })
    }

    /// Facet-pairing completeness criterion for pure full-dimensional fans:
    /// complete iff nonempty, every maximal cone is full-dimensional, and
    /// every facet of a maximal cone is shared with exactly one other.
    pub fn is_complete(&self) -> bool {
        if self.ambient_rank == 0 {
            return self.max_cones.iter().any(|c| c.dim() == 0);
        }
        !self.max_cones.is_empty() && self.walls().is_ok()
    }

    /// Every codimension-one cone with its two adjacent maximal cones.
    /// In rank one the single wall is the origin cone between the two rays.
    pub fn walls(&self) -> Result<&[Wall], Error> {
        let cached = self.walls.get_or_init(|| self.compute_walls());
        match cached {
            Ok(walls) => Ok(walls),
            Err(e) => Err(e.clone()),
        }
    }

    fn compute_walls(&self) -> Result<Vec<Wall>, Error> {
        let n = self.ambient_rank;
        if n == 0 {
            return Ok(Vec::new());
        }
        if self.max_cones.is_empty() || self.max_cones.iter().any(|c| c.dim() != n) {
            return Err(Error::NotComplete);
        }
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (id, cone) in self.max_cones.iter().enumerate() {
            for drop in 0..n {
                let mut facet = cone.ray_ids.clone();
                facet.remove(drop);
                facets.entry(facet).or_default().push(id);
            }
        }
        let mut walls = Vec::with_capacity(facets.len());
        for (facet, adjacent) in facets {
            if adjacent.len() != 2 {
                return Err(Error::NotComplete);
            }
            walls.push(Wall {
                wall_cone: Cone::new(facet),
                left: adjacent[0].min(adjacent[1]),
                right: adjacent[0].max(adjacent[1]),
            });
        }
        Ok(walls)
    }

    /// Quotient fan of the star of `tau` in the lattice `N / N_tau`.
    pub fn star_quotient(&self, tau: &Cone) -> Result<QuotientFan, Error> {
        if !self.contains_cone(tau) {
            return Err(Error::ConeNotInFan);
        }
        if tau.dim() == 0 {
            return Ok(QuotientFan {
                tau: tau.clone(),
                projection: LatticeProjection::along_span(self.ambient_rank, &[]),
                fan: self.clone(),
            });
        }
        let span: Vec<Vec<Int>> =
            tau.ray_ids.iter().map(|&i| self.rays[i].coords.clone()).collect();
        let projection = LatticeProjection::along_span(self.ambient_rank, &span);

        let mut ray_table: Vec<Vec<Int>> = Vec::new();
        let mut ray_lookup: BTreeMap<Vec<Int>, usize> = BTreeMap::new();
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cone in self.max_cones.iter().filter(|c| c.contains(tau)) {
            let mut image_ids = Vec::new();
            for &rid in &cone.ray_ids {
                if tau.ray_ids.binary_search(&rid).is_ok() {
                    continue;
                }
                let image = projection.project(self.rays[rid].coords());
                let prim = primitive(&image).map_err(|_| {
                    Error::Internal("star ray projected to zero".into())
                })?;
                let id = *ray_lookup.entry(prim.clone()).or_insert_with(|| {
                    ray_table.push(prim);
                    ray_table.len() - 1
                });
                image_ids.push(id);
            }
            image_ids.sort_unstable();
            cones.insert(image_ids);
        }
        let raw = RawFan {
            ambient_rank: projection.quotient_rank(),
            rays: ray_table,
            max_cones: cones.into_iter().collect(),
        };
        let fan = validate_fan(&raw).map_err(|d| {
            Error::Internal(format!("star quotient failed validation: {:?}", d))
        })?;
        Ok(QuotientFan { tau: tau.clone(), projection, fan })
    }

    /// Projectivity via the Mori cone: a complete simplicial fan is
    /// projective here iff the cone spanned by its wall curve classes is
    /// strongly convex, decided by one exact feasibility run.
    pub fn is_projective(&self) -> Result<bool, Error> {
        let classes = crate::intersection::deduped_wall_classes(self)?;
        let vectors: Vec<Vec<Rat>> = classes.iter().map(|c| rat_vec_from_int(c)).collect();
        Ok(lp::strictly_positive_functional(self.ray_count(), &vectors).is_some())
    }
}

/// Projection of the ambient lattice onto the quotient by a saturated
/// sublattice, with basis chosen by Smith normal form so coordinates are
/// reproducible.
#[derive(Clone, Debug)]
pub struct LatticeProjection {
    left: IntMatrix,
    killed: usize,
    ambient: usize,
}

impl LatticeProjection {
    /// Projection along the saturation of the span of the given vectors.
    pub fn along_span(ambient: usize, vectors: &[Vec<Int>]) -> Self {
        if vectors.is_empty() {
            return LatticeProjection {
                left: IntMatrix::identity(ambient),
                killed: 0,
                ambient,
            };
        }
        let m = IntMatrix::from_columns(ambient, vectors);
        let snf = smith_normal_form(&m);
        let killed = snf.nonzero_count();
        LatticeProjection { left: snf.left, killed, ambient }
    }

    pub fn quotient_rank(&self) -> usize {
        self.ambient - self.killed
    }

    /// Image of a lattice point in the chosen basis of the quotient.
    pub fn project(&self, v: &[Int]) -> Vec<Int> {
        let full = self.left.mul_vec(v);
        full[self.killed..].to_vec()
    }
}

/// Star quotient: the fan of the invariant subvariety attached to `tau`.
#[derive(Clone, Debug)]
pub struct QuotientFan {
    pub tau: Cone,
    pub projection: LatticeProjection,
    pub fan: Fan,
}

/// Simpliciality of a raw description: every listed cone must reference
/// rationally independent rays. Tolerates descriptions that fail other
/// axioms, as long as indices resolve.
pub fn is_simplicial_raw(raw: &RawFan) -> bool {
    raw.max_cones.iter().all(|cone| {
        let mut ids = cone.clone();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != cone.len() {
            return false;
        }
        let Some(vectors) = ids
            .iter()
            .map(|&i| raw.rays.get(i).cloned())
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        vectors_rank(&vectors) == ids.len()
    })
}

/// Validate a raw fan description. Returns the fan, or every violation
/// found; never a partially valid structure.
pub fn validate_fan(raw: &RawFan) -> Result<Fan, Vec<Diagnostic>> {
    let n = raw.ambient_rank;
    let mut diags = Vec::new();

    // Ray table.
    let mut seen: BTreeMap<&[Int], usize> = BTreeMap::new();
    for (i, ray) in raw.rays.iter().enumerate() {
        if ray.len() != n {
            diags.push(Diagnostic::WrongRayLength { ray: i, expected: n, found: ray.len() });
            continue;
        }
        match primitive(ray) {
            Err(_) => diags.push(Diagnostic::ZeroRay { ray: i }),
            Ok(p) if p != *ray => diags.push(Diagnostic::NonPrimitiveRay { ray: i }),
            Ok(_) => {}
        }
        match seen.get(ray.as_slice()) {
            Some(&first) => diags.push(Diagnostic::DuplicateRay { first, second: i }),
            None => {
                seen.insert(ray.as_slice(), i);
            }
        }
    }

    // Cone index hygiene is checkable regardless of ray problems.
    let mut cones: Vec<Option<Cone>> = Vec::with_capacity(raw.max_cones.len());
    for (ci, ids) in raw.max_cones.iter().enumerate() {
        let mut ok = true;
        for &id in ids {
            if id >= raw.rays.len() {
                diags.push(Diagnostic::RayIndexOutOfRange { cone: ci, index: id });
                ok = false;
            }
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                diags.push(Diagnostic::RepeatedRayInCone { cone: ci, ray: w[0] });
                ok = false;
            }
        }
        cones.push(ok.then(|| Cone::new(ids.clone())));
    }

    // Membership of every ray in some maximal cone needs only the indices.
    let mut used = vec![false; raw.rays.len()];
    for ids in &raw.max_cones {
        for &id in ids {
            if id < raw.rays.len() {
                used[id] = true;
            }
        }
    }
    for (i, u) in used.iter().enumerate() {
        if !u {
            diags.push(Diagnostic::UnusedRay { ray: i });
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    let cones: Vec<Cone> = cones.into_iter().map(Option::unwrap).collect();

    // Simpliciality per cone.
    let mut independent = vec![true; cones.len()];
    for (ci, cone) in cones.iter().enumerate() {
        let vectors: Vec<Vec<Int>> =
            cone.ray_ids.iter().map(|&i| raw.rays[i].clone()).collect();
        if vectors_rank(&vectors) != cone.dim() {
            diags.push(Diagnostic::DependentConeRays { cone: ci });
            independent[ci] = false;
        }
    }

    // Duplicates, containments, unused rays.
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            if cones[i] == cones[j] {
                diags.push(Diagnostic::DuplicateCone { first: i, second: j });
            } else if cones[j].contains(&cones[i]) {
                diags.push(Diagnostic::NonMaximalCone { cone: i, inside: j });
            } else if cones[i].contains(&cones[j]) {
                diags.push(Diagnostic::NonMaximalCone { cone: j, inside: i });
            }
        }
    }
    let mut used = vec![false; raw.rays.len()];
    for cone in &cones {
        for &id in &cone.ray_ids {
            used[id] = true;
        }
    }
    for (i, u) in used.iter().enumerate() {
        if !u {
            diags.push(Diagnostic::UnusedRay { ray: i });
        }
    }

    // Pairwise proper-intersection check, on pairs of independent cones that
    // are not nested. A certificate functional vanishing on the common rays,
    // strictly positive on the rest of one cone and strictly negative on the
    // rest of the other, proves the intersection is the common face; the
    // separation direction is decided exactly by LP when cheap certificates
    // fail.
    let dual_rows: Vec<Option<IntMatrix>> = cones
        .iter()
        .enumerate()
        .map(|(ci, cone)| {
            if !independent[ci] || cone.dim() != n || n == 0 {
                return None;
            }
            let m = matrix_of(raw, &cone.ray_ids);
            linalg::scaled_dual_rows(&m).ok()
        })
        .collect();

    for i in 0..cones.len() {
        if !independent[i] {
            continue;
        }
        for j in i + 1..cones.len() {
            if !independent[j] {
                continue;
            }
            let (a, b) = (&cones[i], &cones[j]);
            if a.contains(b) || b.contains(a) {
                continue; // already reported as duplicate / non-maximal
            }
            if !proper_intersection(raw, a, b, dual_rows[i].as_ref(), dual_rows[j].as_ref()) {
                diags.push(Diagnostic::IntersectionNotFace { left: i, right: j });
            }
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Fan {
        ambient_rank: n,
        rays: raw.rays.iter().map(|r| RayVector { coords: r.clone() }).collect(),
        max_cones: cones,
        faces: OnceLock::new(),
        walls: OnceLock::new(),
    })
}

fn matrix_of(raw: &RawFan, ids: &[usize]) -> IntMatrix {
    let cols: Vec<Vec<Int>> = ids.iter().map(|&i| raw.rays[i].clone()).collect();
    IntMatrix::from_columns(raw.ambient_rank, &cols)
}

/// Decide whether two simplicial cones meet exactly in the cone spanned by
/// their common rays (which is then automatically a face of each).
fn proper_intersection(
    raw: &RawFan,
    a: &Cone,
    b: &Cone,
    dual_a: Option<&IntMatrix>,
    dual_b: Option<&IntMatrix>,
) -> bool {
    let common = a.common_ids(b);

    // If the spans meet only in the span of the common rays, the cones do
    // too: a point of the intersection lies in both spans, hence in the
    // common span, and a simplicial cone meets the span of a generator
    // subset exactly in the subset's cone.
    let mut union_vectors: Vec<Vec<Int>> = Vec::new();
    let mut union_ids: Vec<usize> = a.ray_ids.iter().chain(b.ray_ids.iter()).copied().collect();
    union_ids.sort_unstable();
    union_ids.dedup();
    for &id in &union_ids {
        union_vectors.push(raw.rays[id].clone());
    }
    let expected = a.dim() + b.dim() - common.len();
    if int_rows_rank(&mut union_vectors) == expected {
        return true;
    }

    let only_a: Vec<usize> = a
        .ray_ids
        .iter()
        .copied()
        .filter(|id| common.binary_search(id).is_err())
        .collect();
    let only_b: Vec<usize> = b
        .ray_ids
        .iter()
        .copied()
        .filter(|id| common.binary_search(id).is_err())
        .collect();

    if certificate_separates(raw, a, &common, &only_b, dual_a)
        || certificate_separates(raw, b, &common, &only_a, dual_b)
    {
        return true;
    }

    // Exact decision: a separating functional exists iff the intersection is
    // the common face (separation lemma for cones meeting along a face).
    let eqs: Vec<(Vec<Rat>, Rat)> = common
        .iter()
        .map(|&id| (rat_vec_from_int(&raw.rays[id]), Rat::zero()))
        .collect();
    let mut ges: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for &id in &only_a {
        ges.push((rat_vec_from_int(&raw.rays[id]), Rat::from_integer(1.into())));
    }
    for &id in &only_b {
        let neg: Vec<Rat> = raw.rays[id].iter().map(|x| -rat_from_int(x.clone())).collect();
        ges.push((neg, Rat::from_integer(1.into())));
    }
    lp::feasible_linear_system(&eqs, &ges).is_some()
}

/// Try the canonical candidate functional built from one cone's dual rows:
/// zero on the common rays, strictly positive on the cone's remaining rays.
/// If it is strictly negative on the other cone's remaining rays it
/// certifies the pair.
fn certificate_separates(
    raw: &RawFan,
    cone: &Cone,
    common: &[usize],
    other_only: &[usize],
    dual: Option<&IntMatrix>,
) -> bool {
    if other_only.is_empty() {
        return false;
    }
    match dual {
        Some(d) => {
            // Sum of dual rows at positions outside the common set.
            let n = raw.ambient_rank;
            let mut m = vec![Int::zero(); n];
            for (pos, &rid) in cone.ray_ids.iter().enumerate() {
                if common.binary_search(&rid).is_ok() {
                    continue;
                }
                for (slot, v) in m.iter_mut().zip(d.row(pos)) {
                    *slot += v;
                }
            }
            other_only
                .iter()
                .all(|&id| linalg::dot_int(&m, &raw.rays[id]).is_negative())
        }
        None => {
            // Lower-dimensional cone: solve for a functional directly.
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for &id in common {
                rows.push(rat_vec_from_int(&raw.rays[id]));
                rhs.push(Rat::zero());
            }
            for &id in cone.ray_ids.iter() {
                if common.binary_search(&id).is_err() {
                    rows.push(rat_vec_from_int(&raw.rays[id]));
                    rhs.push(Rat::from_integer(1.into()));
                }
            }
            let Some(m) = linalg::solve_exact(&rows, &rhs) else {
                return false;
            };
            other_only.iter().all(|&id| {
                linalg::dot_rat(&m, &rat_vec_from_int(&raw.rays[id])).is_negative()
            })
        }
    }
}

/// Saturated-kernel helper used by intersection theory: the relation lattice
/// of a set of rays, i.e. the kernel of the matrix whose columns they form.
pub fn relation_kernel(fan: &Fan, ids: &[usize]) -> IntMatrix {
    kernel_basis(&fan.ray_matrix(ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_vec;

    pub(crate) fn raw(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> RawFan {
        RawFan {
            ambient_rank: rank,
            rays: rays.iter().map(|r| int_vec(r)).collect(),
            max_cones: cones.iter().map(|c| c.to_vec()).collect(),
        }
    }

    pub(crate) fn p2() -> Fan {
        validate_fan(&raw(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1]],
            &[&[0, 1], &[1, 2], &[0, 2]],
        ))
        .expect("plane fan is valid")
    }

    fn p1() -> Fan {
        validate_fan(&raw(1, &[&[1], &[-1]], &[&[0], &[1]])).expect("line fan is valid")
    }

    fn p1xp1() -> Fan {
        validate_fan(&raw(
            2,
            &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        ))
        .expect("product fan is valid")
    }

    fn hirzebruch(a: i64) -> Fan {
        validate_fan(&raw(
            2,
            &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        ))
        .expect("hirzebruch fan is valid")
    }

    #[test]
    fn plane_fan_is_valid() {
        let fan = p2();
        assert_eq!(fan.ray_count(), 3);
        assert_eq!(fan.max_cones().len(), 3);
        assert!(fan.is_simplicial());
        assert!(fan.is_complete());
    }

    #[test]
    fn improper_overlap_is_diagnosed() {
        // second cone's interior ray (1,1) sits inside the first cone
        let bad = raw(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1], &[0, 2]]);
        let diags = validate_fan(&bad).unwrap_err();
        assert!(
            diags
                .iter()
                .any(|d| matches!(d, Diagnostic::IntersectionNotFace { left: 0, right: 1 })),
            "expected an intersection diagnostic, got {diags:?}"
        );
    }

    #[test]
    fn non_primitive_ray_is_diagnosed() {
        let bad = raw(2, &[&[2, 4], &[0, 1]], &[&[0, 1]]);
        let diags = validate_fan(&bad).unwrap_err();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::NonPrimitiveRay { ray: 0 })));
    }

    #[test]
    fn duplicate_and_unused_rays_are_diagnosed() {
        let bad = raw(2, &[&[1, 0], &[1, 0], &[0, 1]], &[&[0, 2]]);
        let diags = validate_fan(&bad).unwrap_err();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::DuplicateRay { first: 0, second: 1 })));
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::UnusedRay { ray: 1 })));
    }

    #[test]
    fn square_base_cone_is_not_simplicial() {
        let square = raw(
            3,
            &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]],
            &[&[0, 1, 2, 3]],
        );
        assert!(!is_simplicial_raw(&square));
        let diags = validate_fan(&square).unwrap_err();
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::DependentConeRays { cone: 0 })));
    }

    #[test]
    fn rank_one_fans_are_simplicial() {
        assert!(is_simplicial_raw(&p1().to_raw()));
    }

    #[test]
    fn completeness_examples() {
        assert!(p1().is_complete());
        let single = validate_fan(&raw(2, &[&[1, 0], &[0, 1]], &[&[0, 1]])).unwrap();
        assert!(!single.is_complete());
        assert!(hirzebruch(1).is_complete());
    }

    #[test]
    fn wall_counts() {
        assert_eq!(p2().walls().unwrap().len(), 3);
        assert_eq!(p1xp1().walls().unwrap().len(), 4);
        let p1 = p1();
        let walls = p1.walls().unwrap();
        assert_eq!(walls.len(), 1, "rank one has the single origin wall");
        assert_eq!(walls[0].wall_cone.dim(), 0);
    }

    #[test]
    fn walls_error_when_not_complete() {
        let single = validate_fan(&raw(2, &[&[1, 0], &[0, 1]], &[&[0, 1]])).unwrap();
        assert_eq!(single.walls().unwrap_err(), Error::NotComplete);
    }

    #[test]
    fn each_max_cone_is_adjacent_n_times() {
        for fan in [p2(), p1xp1(), hirzebruch(2)] {
            let n = fan.ambient_rank();
            let mut counts = vec![0usize; fan.max_cones().len()];
            for wall in fan.walls().unwrap() {
                counts[wall.left] += 1;
                counts[wall.right] += 1;
            }
            assert!(counts.iter().all(|&c| c == n), "adjacency counts {counts:?}");
        }
    }

    #[test]
    fn star_quotient_of_plane_ray_is_line() {
        let fan = p2();
        let q = fan.star_quotient(&Cone::new(vec![0])).unwrap();
        assert_eq!(q.fan.ambient_rank(), 1);
        assert_eq!(q.fan.ray_count(), 2);
        assert!(q.fan.is_complete());
    }

    #[test]
    fn star_quotient_at_origin_is_identity() {
        let fan = p2();
        let q = fan.star_quotient(&Cone::new(vec![])).unwrap();
        assert_eq!(q.fan, fan);
    }

    #[test]
    fn star_quotient_of_hirzebruch_fiber_ray() {
        let fan = hirzebruch(1);
        let q = fan.star_quotient(&Cone::new(vec![1])).unwrap();
        assert_eq!(q.fan.ambient_rank(), 1);
        assert!(q.fan.is_complete());
    }

    #[test]
    fn star_quotient_rejects_foreign_cone() {
        let fan = p2();
        assert_eq!(
            fan.star_quotient(&Cone::new(vec![0, 1, 2])).unwrap_err(),
            Error::ConeNotInFan
        );
    }

    #[test]
    fn star_quotient_of_complete_fan_is_complete() {
        for fan in [p2(), p1xp1(), hirzebruch(3)] {
            for face in fan.faces().clone() {
                let q = fan.star_quotient(&Cone::new(face)).unwrap();
                assert!(q.fan.is_complete(), "star quotient must stay complete");
            }
        }
    }

    #[test]
    fn validation_is_idempotent() {
        for fan in [p2(), p1xp1(), hirzebruch(2)] {
            let again = validate_fan(&fan.to_raw()).expect("re-validation must succeed");
            assert_eq!(again, fan);
        }
    }

    /// Exact rank-two tiling check: a complete fan's two-dimensional cones,
    /// read in circular order of their rays, must be exactly the consecutive
    /// pairs; this is the "solid angles sum to one" statement without floats.
    fn assert_rank2_tiling(fan: &Fan) {
        use std::cmp::Ordering;
        assert_eq!(fan.ambient_rank(), 2);
        let half = |v: &[Int]| -> u8 {
            // upper half-plane first (including positive x-axis)
            if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
                0
            } else {
                1
            }
        };
        let mut order: Vec<usize> = (0..fan.ray_count()).collect();
        order.sort_by(|&a, &b| {
            let va = fan.ray(a).coords();
            let vb = fan.ray(b).coords();
            half(va).cmp(&half(vb)).then_with(|| {
                // within a half-plane, counterclockwise iff cross > 0
                let cross = &va[0] * &vb[1] - &va[1] * &vb[0];
                match cross.sign() {
                    num_bigint::Sign::Plus => Ordering::Less,
                    num_bigint::Sign::Minus => Ordering::Greater,
                    num_bigint::Sign::NoSign => Ordering::Equal,
                }
            })
        });
        let k = order.len();
        let expected: BTreeSet<Vec<usize>> = (0..k)
            .map(|i| {
                let mut pair = vec![order[i], order[(i + 1) % k]];
                pair.sort_unstable();
                pair
            })
            .collect();
        let actual: BTreeSet<Vec<usize>> =
            fan.max_cones().iter().map(|c| c.ray_ids().to_vec()).collect();
        assert_eq!(actual, expected, "maximal cones must tile the circle");
    }

    #[test]
    fn complete_rank2_fans_tile_the_circle() {
        for fan in [p2(), p1xp1(), hirzebruch(0), hirzebruch(1), hirzebruch(4)] {
            assert_rank2_tiling(&fan);
        }
    }
}
