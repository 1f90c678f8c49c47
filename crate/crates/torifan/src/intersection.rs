//! Intersection theory on complete simplicial fans: cone multiplicities,
//! wall relations, divisor-curve pairings, the divisor class group, curve
//! classes, and the Mori cone with its extremal rays.

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::fan::{relation_kernel, Cone, Fan, Wall};
use crate::linalg::{
    lattice_index, lp, rat_from_int, rat_vec_from_int, rref, Int, Rat,
};

/// Index of the sublattice spanned by the cone's primitive generators inside
/// its saturation; 1 exactly on smooth cones. The origin cone has
/// multiplicity 1, which makes the rank-one degenerate wall work uniformly.
pub fn multiplicity(fan: &Fan, cone: &Cone) -> Result<Int, Error> {
    lattice_index(&fan.ray_matrix(cone.ray_ids()))
}

/// The unique integer relation among the n+1 rays of a wall's two adjacent
/// maximal cones, normalized to content one with the two extra rays carrying
/// strictly positive coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallRelation {
    /// Coefficient per ray of the fan; zero outside the n+1 involved rays.
    pub coeffs: Vec<Int>,
    /// Ray unique to the left adjacent cone.
    pub extra_left: usize,
    /// Ray unique to the right adjacent cone.
    pub extra_right: usize,
}

pub fn wall_relation(fan: &Fan, wall: &Wall) -> Result<WallRelation, Error> {
    let left = &fan.max_cones()[wall.left];
    let right = &fan.max_cones()[wall.right];
    let in_wall = |id: &usize| wall.wall_cone.ray_ids().binary_search(id).is_ok();
    let extra_left = *left
        .ray_ids()
        .iter()
        .find(|id| !in_wall(id))
        .ok_or_else(|| Error::Internal("left cone equals its wall".into()))?;
    let extra_right = *right
        .ray_ids()
        .iter()
        .find(|id| !in_wall(id))
        .ok_or_else(|| Error::Internal("right cone equals its wall".into()))?;

    let mut involved: Vec<usize> = wall.wall_cone.ray_ids().to_vec();
    involved.push(extra_left);
    involved.push(extra_right);
    involved.sort_unstable();

    let kernel = relation_kernel(fan, &involved);
    if kernel.cols() != 1 {
        return Err(Error::Internal(format!(
            "wall relation kernel has rank {}, expected 1",
            kernel.cols()
        )));
    }
    let local = kernel.column(0);
    let mut coeffs = vec![Int::zero(); fan.ray_count()];
    for (pos, &id) in involved.iter().enumerate() {
        coeffs[id] = local[pos].clone();
    }
    // The two extra coefficients are nonzero and share a sign; pin both
    // positive.
    if coeffs[extra_right].is_negative() {
        for c in &mut coeffs {
            *c = -std::mem::take(c);
        }
    }
    if !coeffs[extra_left].is_positive() || !coeffs[extra_right].is_positive() {
        return Err(Error::Internal(
            "wall relation extras must have positive coefficients".into(),
        ));
    }
    Ok(WallRelation { coeffs, extra_left, extra_right })
}

/// Relation plus the three multiplicities the degree formula needs.
#[derive(Clone, Debug)]
pub struct WallData {
    pub relation: WallRelation,
    pub mult_wall: Int,
    pub mult_left: Int,
    pub mult_right: Int,
}

pub fn wall_data(fan: &Fan, wall: &Wall) -> Result<WallData, Error> {
    Ok(WallData {
        relation: wall_relation(fan, wall)?,
        mult_wall: multiplicity(fan, &wall.wall_cone)?,
        mult_left: multiplicity(fan, &fan.max_cones()[wall.left])?,
        mult_right: multiplicity(fan, &fan.max_cones()[wall.right])?,
    })
}

impl WallData {
    /// `D_rho . V(wall) = a_rho * mult(wall) / (a_R * mult(right cone))`,
    /// anchored on the right cone; the proportionality identity
    /// `a_L mult(left) = a_R mult(right)` makes the choice immaterial.
    pub fn degree_scale(&self) -> Rat {
        let a_r = &self.relation.coeffs[self.relation.extra_right];
        rat_from_int(self.mult_wall.clone())
            / rat_from_int(a_r * &self.mult_right)
    }

    pub fn degree_of_ray(&self, ray: usize) -> Rat {
        rat_from_int(self.relation.coeffs[ray].clone()) * self.degree_scale()
    }

    /// The full vector `(D_rho . V(wall))_rho`.
    pub fn degree_vector(&self) -> Vec<Rat> {
        let scale = self.degree_scale();
        self.relation
            .coeffs
            .iter()
            .map(|a| rat_from_int(a.clone()) * &scale)
            .collect()
    }
}

/// `D_rho . V(wall)`; zero for rays outside the wall's two adjacent cones.
pub fn divisor_curve_intersection(fan: &Fan, ray: usize, wall: &Wall) -> Result<Rat, Error> {
    if ray >= fan.ray_count() {
        return Err(Error::RayOutOfRange(ray));
    }
    Ok(wall_data(fan, wall)?.degree_of_ray(ray))
}

/// `-K_X . V(wall)`: the sum of all divisor-curve intersections on a wall.
pub fn canonical_degree(fan: &Fan, wall: &Wall) -> Result<Rat, Error> {
    let data = wall_data(fan, wall)?;
    let sum: Int = data.relation.coeffs.iter().cloned().sum();
    Ok(rat_from_int(sum) * data.degree_scale())
}

/// Divisor class group presented as cokernel of the character map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

pub fn class_group(fan: &Fan) -> Result<ClassGroup, Error> {
    let d = fan.ray_count();
    let n = fan.ambient_rank();
    let rows: Vec<Vec<Int>> = (0..d).map(|i| fan.ray(i).coords().to_vec()).collect();
    let m = crate::linalg::IntMatrix::from_rows(&rows);
    let snf = crate::linalg::smith_normal_form(&m);
    if snf.nonzero_count() < n {
        return Err(Error::RaysDoNotSpan);
    }
    Ok(ClassGroup {
        free_rank: d - n,
        torsion: snf.diag.iter().filter(|v| **v > Int::one()).cloned().collect(),
    })
}

/// A torus-invariant divisor with its canonical image in the rational class
/// group, used for exact class-level equality tests.
#[derive(Clone, Debug)]
pub struct DivisorClass {
    pub coeffs: Vec<Rat>,
    image: Vec<Rat>,
}

impl DivisorClass {
    pub fn new(fan: &Fan, coeffs: Vec<Rat>) -> Self {
        assert_eq!(coeffs.len(), fan.ray_count(), "one coefficient per ray");
        let image = reduce_mod_principal(fan, &coeffs);
        DivisorClass { coeffs, image }
    }

    pub fn image(&self) -> &[Rat] {
        &self.image
    }
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.image == other.image
    }
}
impl Eq for DivisorClass {}

/// Reduce a divisor coefficient vector modulo the principal divisors
/// (the row space of the ray matrix), giving a canonical representative of
/// its rational class.
fn reduce_mod_principal(fan: &Fan, coeffs: &[Rat]) -> Vec<Rat> {
    let n = fan.ambient_rank();
    let d = fan.ray_count();
    let principal: Vec<Vec<Rat>> = (0..n)
        .map(|k| (0..d).map(|i| rat_from_int(fan.ray(i).coords()[k].clone())).collect())
        .collect();
    let (basis, pivots) = rref(principal);
    let mut out = coeffs.to_vec();
    for (row, &p) in basis.iter().zip(&pivots) {
        if out[p].is_zero() {
            continue;
        }
        let f = out[p].clone();
        for j in 0..d {
            let sub = &f * &row[j];
            out[j] = &out[j] - &sub;
        }
    }
    out
}

/// Numerical class of a wall curve: the wall relation's coefficient vector
/// over all rays, primitive, with the two extra-ray coefficients positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CurveClass(pub Vec<Int>);

pub fn curve_class(fan: &Fan, wall: &Wall) -> Result<CurveClass, Error> {
    Ok(CurveClass(wall_relation(fan, wall)?.coeffs))
}

/// All distinct wall classes, sorted. The wall-relation normalization is
/// already a canonical representative up to positive scaling, so
/// deduplication is exact vector equality.
pub fn deduped_wall_classes(fan: &Fan) -> Result<Vec<Vec<Int>>, Error> {
    let mut classes: Vec<Vec<Int>> = fan
        .walls()?
        .iter()
        .map(|w| wall_relation(fan, w).map(|r| r.coeffs))
        .collect::<Result<_, _>>()?;
    classes.sort();
    classes.dedup();
    Ok(classes)
}

/// One extremal ray of the Mori cone: a primitive class representative and
/// the walls whose classes lie on the ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalRay {
    pub class: CurveClass,
    pub walls: Vec<usize>,
}

/// The Mori cone, generated by the deduplicated wall classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoriCone {
    pub generators: Vec<CurveClass>,
    pub extremal_rays: Vec<ExtremalRay>,
}

/// Compute the Mori cone and extract the extremal rays by one exact
/// feasibility test per generator: a class is extremal exactly when it is
/// not a nonnegative combination of the other generators.
pub fn mori_cone(fan: &Fan) -> Result<MoriCone, Error> {
    let walls = fan.walls()?;
    let mut wall_classes = Vec::with_capacity(walls.len());
    for wall in walls {
        wall_classes.push(wall_relation(fan, wall)?.coeffs);
    }
    let mut generators: Vec<Vec<Int>> = wall_classes.clone();
    generators.sort();
    generators.dedup();

    let d = fan.ray_count();
    let rat_gens: Vec<Vec<Rat>> = generators.iter().map(|g| rat_vec_from_int(g)).collect();
    if lp::strictly_positive_functional(d, &rat_gens).is_none() {
        return Err(Error::NotProjective);
    }

    let mut extremal_rays = Vec::new();
    for (i, class) in generators.iter().enumerate() {
        let others: Vec<&Vec<Int>> = generators
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g)
            .collect();
        if others.is_empty() || !is_nonnegative_combination(d, &others, class) {
            let ray_walls: Vec<usize> = wall_classes
                .iter()
                .enumerate()
                .filter(|&(_, c)| c == class)
                .map(|(w, _)| w)
                .collect();
            extremal_rays.push(ExtremalRay {
                class: CurveClass(class.clone()),
                walls: ray_walls,
            });
        }
    }

    Ok(MoriCone {
        generators: generators.into_iter().map(CurveClass).collect(),
        extremal_rays,
    })
}

/// Exact test for `target` lying in the cone spanned by `columns`.
pub fn is_nonnegative_combination(dim: usize, columns: &[&Vec<Int>], target: &[Int]) -> bool {
    let rows: Vec<Vec<Rat>> = (0..dim)
        .map(|coord| columns.iter().map(|c| rat_from_int(c[coord].clone())).collect())
        .collect();
    let b: Vec<Rat> = target.iter().map(|x| rat_from_int(x.clone())).collect();
    lp::nonnegative_solution(&rows, &b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named_fan;
    use crate::linalg::int_vec;

    fn wall_on(fan: &Fan, ids: &[usize]) -> Wall {
        let target = Cone::new(ids.to_vec());
        fan.walls()
            .unwrap()
            .iter()
            .find(|w| w.wall_cone == target)
            .cloned()
            .unwrap_or_else(|| panic!("no wall with rays {ids:?}"))
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn multiplicity_examples() {
        let p2 = named_fan("Pn:2").unwrap();
        assert_eq!(multiplicity(&p2, &Cone::new(vec![0, 1])).unwrap(), Int::one());

        let wps = named_fan("wps:1,1,2").unwrap();
        // cone on (0,1) and (-1,-2)
        assert_eq!(multiplicity(&wps, &Cone::new(vec![1, 2])).unwrap(), Int::from(2));

        // a two-dimensional cone in a rank-three lattice
        let raw = crate::fan::RawFan {
            ambient_rank: 3,
            rays: vec![int_vec(&[1, 0, 0]), int_vec(&[1, 2, 0]), int_vec(&[0, 0, 1])],
            max_cones: vec![vec![0, 1, 2]],
        };
        let fan = crate::fan::validate_fan(&raw).unwrap();
        assert_eq!(multiplicity(&fan, &Cone::new(vec![0, 1])).unwrap(), Int::from(2));
    }

    #[test]
    fn wall_relation_on_plane() {
        let p2 = named_fan("Pn:2").unwrap();
        let rel = wall_relation(&p2, &wall_on(&p2, &[0])).unwrap();
        assert_eq!(rel.coeffs, int_vec(&[1, 1, 1]));
    }

    #[test]
    fn wall_relation_on_hirzebruch_one() {
        let f1 = named_fan("hirzebruch:1").unwrap();
        // wall on ray (0,1): (1,0) + (-1,1) = (0,1)
        let rel = wall_relation(&f1, &wall_on(&f1, &[1])).unwrap();
        assert_eq!(rel.coeffs, int_vec(&[1, -1, 1, 0]));
    }

    #[test]
    fn wall_relation_on_weighted_plane() {
        let wps = named_fan("wps:1,1,2").unwrap();
        // wall on ray (1,0): (1,0) + 2(0,1) + (-1,-2) = 0
        let rel = wall_relation(&wps, &wall_on(&wps, &[0])).unwrap();
        assert_eq!(rel.coeffs, int_vec(&[1, 2, 1]));
    }

    #[test]
    fn plane_divisor_degrees_are_one() {
        let p2 = named_fan("Pn:2").unwrap();
        for wall in p2.walls().unwrap() {
            for ray in 0..3 {
                assert_eq!(divisor_curve_intersection(&p2, ray, wall).unwrap(), rat(1, 1));
            }
        }
    }

    #[test]
    fn weighted_plane_divisor_degrees() {
        let wps = named_fan("wps:1,1,2").unwrap();
        let wall = wall_on(&wps, &[0]);
        assert_eq!(divisor_curve_intersection(&wps, 2, &wall).unwrap(), rat(1, 2));
        assert_eq!(divisor_curve_intersection(&wps, 1, &wall).unwrap(), rat(1, 1));
        assert_eq!(divisor_curve_intersection(&wps, 0, &wall).unwrap(), rat(1, 2));
    }

    #[test]
    fn rays_outside_the_wall_pair_to_zero() {
        let f1 = named_fan("hirzebruch:1").unwrap();
        let wall = wall_on(&f1, &[1]);
        assert_eq!(divisor_curve_intersection(&f1, 3, &wall).unwrap(), rat(0, 1));
    }

    #[test]
    fn canonical_degree_examples() {
        let p2 = named_fan("Pn:2").unwrap();
        for wall in p2.walls().unwrap() {
            assert_eq!(canonical_degree(&p2, wall).unwrap(), rat(3, 1));
        }
        let wps = named_fan("wps:1,1,2").unwrap();
        assert_eq!(canonical_degree(&wps, &wall_on(&wps, &[0])).unwrap(), rat(2, 1));
        let p1p1 = named_fan("P1xP1").unwrap();
        for wall in p1p1.walls().unwrap() {
            assert_eq!(canonical_degree(&p1p1, wall).unwrap(), rat(2, 1));
        }
    }

    #[test]
    fn class_group_examples() {
        let p2 = named_fan("Pn:2").unwrap();
        assert_eq!(class_group(&p2).unwrap(), ClassGroup { free_rank: 1, torsion: vec![] });
        let wps = named_fan("wps:1,1,2").unwrap();
        assert_eq!(class_group(&wps).unwrap(), ClassGroup { free_rank: 1, torsion: vec![] });
        let p1p1 = named_fan("P1xP1").unwrap();
        assert_eq!(class_group(&p1p1).unwrap(), ClassGroup { free_rank: 2, torsion: vec![] });
    }

    #[test]
    fn class_group_requires_spanning_rays() {
        let raw = crate::fan::RawFan {
            ambient_rank: 2,
            rays: vec![int_vec(&[1, 0]), int_vec(&[-1, 0])],
            max_cones: vec![vec![0], vec![1]],
        };
        let fan = crate::fan::validate_fan(&raw).unwrap();
        assert_eq!(class_group(&fan).unwrap_err(), Error::RaysDoNotSpan);
    }

    #[test]
    fn curve_classes_on_plane_coincide() {
        let p2 = named_fan("Pn:2").unwrap();
        let classes = deduped_wall_classes(&p2).unwrap();
        assert_eq!(classes, vec![int_vec(&[1, 1, 1])]);
    }

    #[test]
    fn product_fan_has_two_classes_from_four_walls() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let classes = deduped_wall_classes(&p1p1).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(p1p1.walls().unwrap().len(), 4);
    }

    #[test]
    fn hirzebruch_one_has_three_classes_with_fiber_repeated() {
        let f1 = named_fan("hirzebruch:1").unwrap();
        let classes = deduped_wall_classes(&f1).unwrap();
        assert_eq!(classes.len(), 3, "three distinct classes among four walls");
        // fiber class appears on both fiber walls
        let fiber = int_vec(&[1, 0, 1, 0]);
        let mori = mori_cone(&f1).unwrap();
        let fiber_ray = mori
            .extremal_rays
            .iter()
            .find(|r| r.class.0 == fiber)
            .expect("fiber class is extremal");
        assert_eq!(fiber_ray.walls.len(), 2);
    }

    #[test]
    fn extremal_ray_counts() {
        for (name, expected) in [
            ("Pn:1", 1),
            ("Pn:2", 1),
            ("Pn:3", 1),
            ("hirzebruch:0", 2),
            ("hirzebruch:2", 2),
            ("product:Pn:1,product:Pn:1,Pn:1", 3),
        ] {
            let fan = named_fan(name).unwrap();
            let mori = mori_cone(&fan).unwrap();
            assert_eq!(mori.extremal_rays.len(), expected, "extremal rays of {name}");
        }
    }

    #[test]
    fn mori_cone_rejects_nonprojective_fan() {
        let fan = named_fan("nonprojective3fold").unwrap();
        assert_eq!(mori_cone(&fan).unwrap_err(), Error::NotProjective);
    }

    #[test]
    fn generators_decompose_over_extremal_rays() {
        for name in ["hirzebruch:1", "wps:1,1,2", "flip3fold", "product:Pn:1,Pn:2"] {
            let fan = named_fan(name).unwrap();
            let mori = mori_cone(&fan).unwrap();
            let reps: Vec<&Vec<Int>> = mori.extremal_rays.iter().map(|r| &r.class.0).collect();
            for g in &mori.generators {
                assert!(
                    is_nonnegative_combination(fan.ray_count(), &reps, &g.0),
                    "generator {:?} must decompose over extremal rays of {name}",
                    g.0
                );
            }
        }
    }

    /// Chow-level consistency on every wall of a fan: the degree vector is a
    /// positive multiple of the relation, both extra rays recover their
    /// multiplicity quotients, and principal divisors pair to zero.
    pub(crate) fn assert_chow_consistency(fan: &Fan) {
        let n = fan.ambient_rank();
        for wall in fan.walls().unwrap() {
            let data = wall_data(fan, wall).unwrap();
            let degrees = data.degree_vector();
            let scale = data.degree_scale();
            assert!(scale.is_positive(), "degree scale must be positive");
            for (deg, a) in degrees.iter().zip(&data.relation.coeffs) {
                assert_eq!(deg.clone(), rat_from_int(a.clone()) * &scale);
            }
            let a_l = &data.relation.coeffs[data.relation.extra_left];
            let a_r = &data.relation.coeffs[data.relation.extra_right];
            assert_eq!(
                a_l * &data.mult_left,
                a_r * &data.mult_right,
                "left/right normalizations must agree"
            );
            assert_eq!(
                degrees[data.relation.extra_right].clone(),
                rat_from_int(data.mult_wall.clone()) / rat_from_int(data.mult_right.clone()),
            );
            assert_eq!(
                degrees[data.relation.extra_left].clone(),
                rat_from_int(data.mult_wall.clone()) / rat_from_int(data.mult_left.clone()),
            );
            for k in 0..n {
                let mut pairing = Rat::zero();
                for (i, deg) in degrees.iter().enumerate() {
                    pairing += rat_from_int(fan.ray(i).coords()[k].clone()) * deg;
                }
                assert!(pairing.is_zero(), "principal divisor must pair to zero");
            }
        }
    }

    #[test]
    fn chow_consistency_on_small_corpus() {
        for name in ["Pn:2", "Pn:3", "P1xP1", "hirzebruch:1", "hirzebruch:3", "wps:1,1,2", "flip3fold"] {
            assert_chow_consistency(&named_fan(name).unwrap());
        }
    }

    #[test]
    fn smooth_fans_have_integer_intersections() {
        for name in ["Pn:2", "Pn:4", "P1xP1", "hirzebruch:2", "flip3fold"] {
            let fan = named_fan(name).unwrap();
            let smooth = fan
                .max_cones()
                .iter()
                .all(|c| multiplicity(&fan, c).unwrap() == Int::one());
            assert!(smooth, "{name} should be smooth");
            for wall in fan.walls().unwrap() {
                for deg in wall_data(&fan, wall).unwrap().degree_vector() {
                    assert!(deg.is_integer(), "smooth {name} must have integer degrees");
                }
            }
        }
    }

    #[test]
    fn divisor_class_equality_modulo_principal() {
        let p2 = named_fan("Pn:2").unwrap();
        // D_0 and D_1 are linearly equivalent on the plane
        let d0 = DivisorClass::new(&p2, vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        let d1 = DivisorClass::new(&p2, vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(d0, d1);
        let twice = DivisorClass::new(&p2, vec![rat(2, 1), rat(0, 1), rat(0, 1)]);
        assert_ne!(d0, twice);
    }
}
