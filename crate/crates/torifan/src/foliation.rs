//! Toric foliations as rational subspaces of the cocharacter space, their
//! canonical classes, the foliated degree of a wall curve, and the length of
//! an extremal ray with respect to a foliation.
//!
//! Only rational subspaces are supported: every quantity computed here
//! depends on the subspace through its dimension and the set of fan rays it
//! contains, and exact arithmetic requires rationality.

use num_traits::Zero;

use crate::error::Error;
use crate::fan::{Fan, Wall};
use crate::intersection::{wall_data, DivisorClass, ExtremalRay};
use crate::linalg::{primitive_from_rational, rat_from_int, vectors_rank, Int, Rat};

/// A rational subspace `V` of the cocharacter space, with the fan rays it
/// contains resolved at construction time.
#[derive(Clone, Debug)]
pub struct FoliationSubspace {
    basis: Vec<Vec<Int>>,
    rank: usize,
    rays_in_v: Vec<usize>,
}

impl FoliationSubspace {
    pub fn basis(&self) -> &[Vec<Int>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Sorted ids of the fan rays lying in the subspace.
    pub fn rays_in_v(&self) -> &[usize] {
        &self.rays_in_v
    }

    pub fn contains_ray(&self, ray: usize) -> bool {
        self.rays_in_v.binary_search(&ray).is_ok()
    }

    /// Exact membership by a rank comparison; no tolerances.
    pub fn contains_vector(&self, v: &[Int]) -> bool {
        let mut extended = self.basis.clone();
        extended.push(v.to_vec());
        vectors_rank(&extended) == self.rank
    }

    /// Subspace equality by mutual containment.
    pub fn same_subspace(&self, other: &FoliationSubspace) -> bool {
        self.rank == other.rank && other.basis.iter().all(|v| self.contains_vector(v))
    }
}

/// Build the subspace spanned by the given rational vectors and resolve which
/// fan rays it contains. Zero vectors are ignored; the basis is reduced to an
/// independent subset in input order.
pub fn foliation_from_basis(fan: &Fan, vectors: &[Vec<Rat>]) -> Result<FoliationSubspace, Error> {
    let n = fan.ambient_rank();
    let mut basis: Vec<Vec<Int>> = Vec::new();
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if v.iter().all(Rat::is_zero) {
            continue;
        }
        let prim = primitive_from_rational(v)?;
        let mut extended = basis.clone();
        extended.push(prim.clone());
        if vectors_rank(&extended) > basis.len() {
            basis.push(prim);
        }
    }
    if basis.is_empty() {
        return Err(Error::ZeroSubspace);
    }
    let rank = basis.len();
    let rays_in_v = (0..fan.ray_count())
        .filter(|&i| {
            let mut extended = basis.clone();
            extended.push(fan.ray(i).coords().to_vec());
            vectors_rank(&extended) == rank
        })
        .collect();
    Ok(FoliationSubspace { basis, rank, rays_in_v })
}

/// The full space `V = N_Q`, for which the foliated quantities reduce to the
/// classical anticanonical ones.
pub fn full_foliation(fan: &Fan) -> FoliationSubspace {
    let n = fan.ambient_rank();
    let basis: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { rat_from_int(1) } else { Rat::zero() })
                .collect()
        })
        .collect();
    foliation_from_basis(fan, &basis).expect("the full space is never zero")
}

/// The foliated canonical class: coefficient -1 on every ray inside `V`,
/// zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoliatedCanonicalClass {
    pub class: DivisorClass,
}

pub fn foliated_canonical_class(fan: &Fan, v: &FoliationSubspace) -> FoliatedCanonicalClass {
    let coeffs: Vec<Rat> = (0..fan.ray_count())
        .map(|i| if v.contains_ray(i) { -rat_from_int(1) } else { Rat::zero() })
        .collect();
    let class = DivisorClass::new(fan, coeffs);
    debug_assert_eq!(
        class,
        {
            // identity with the canonical class plus the rays outside V
            let kx_plus: Vec<Rat> = (0..fan.ray_count())
                .map(|i| {
                    let kx = -rat_from_int(1);
                    if v.contains_ray(i) { kx } else { kx + rat_from_int(1) }
                })
                .collect();
            DivisorClass::new(fan, kx_plus)
        },
        "foliated canonical class identity must hold"
    );
    FoliatedCanonicalClass { class }
}

/// `-K_F . V(wall)`: the sum of the wall's divisor degrees over the rays
/// contained in `V`.
pub fn foliated_degree(fan: &Fan, v: &FoliationSubspace, wall: &Wall) -> Result<Rat, Error> {
    let data = wall_data(fan, wall)?;
    let scale = data.degree_scale();
    let mut sum = Int::zero();
    for &ray in v.rays_in_v() {
        sum += &data.relation.coeffs[ray];
    }
    Ok(rat_from_int(sum) * scale)
}

/// Length of an extremal ray with respect to the foliation: the minimum
/// foliated degree over the ray's torus-invariant wall curves.
pub fn length(fan: &Fan, v: &FoliationSubspace, ray: &ExtremalRay) -> Result<Rat, Error> {
    let walls = fan.walls()?;
    let mut best: Option<Rat> = None;
    for &w in &ray.walls {
        let deg = foliated_degree(fan, v, &walls[w])?;
        best = Some(match best {
            Some(b) if b <= deg => b,
            _ => deg,
        });
    }
    best.ok_or_else(|| Error::Internal("extremal ray without walls".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named_fan;
    use crate::intersection::mori_cone;
    use crate::linalg::int_vec;
    use num_traits::{One, Signed};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn span(fan: &Fan, vectors: &[&[i64]]) -> FoliationSubspace {
        let rats: Vec<Vec<Rat>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| rat(x, 1)).collect())
            .collect();
        foliation_from_basis(fan, &rats).unwrap()
    }

    #[test]
    fn full_space_contains_all_rays() {
        let p2 = named_fan("Pn:2").unwrap();
        let v = span(&p2, &[&[1, 0], &[0, 1]]);
        assert_eq!(v.rank(), 2);
        assert_eq!(v.rays_in_v(), &[0, 1, 2]);
    }

    #[test]
    fn vertical_span_on_product() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let v = span(&p1p1, &[&[0, 1]]);
        assert_eq!(v.rank(), 1);
        // rays (0,1) and (0,-1) have ids 1 and 3
        assert_eq!(v.rays_in_v(), &[1, 3]);
    }

    #[test]
    fn horizontal_span_on_hirzebruch_one() {
        let f1 = named_fan("hirzebruch:1").unwrap();
        let v = span(&f1, &[&[1, 0]]);
        assert_eq!(v.rank(), 1);
        assert_eq!(v.rays_in_v(), &[0], "(-1,1) is outside the span of e1");
    }

    #[test]
    fn rejects_zero_span() {
        let p2 = named_fan("Pn:2").unwrap();
        let zero = vec![vec![Rat::zero(), Rat::zero()]];
        assert_eq!(foliation_from_basis(&p2, &zero).unwrap_err(), Error::ZeroSubspace);
    }

    #[test]
    fn rational_basis_vectors_are_cleared() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let v = foliation_from_basis(&p1p1, &[vec![rat(0, 1), rat(-3, 2)]]).unwrap();
        assert_eq!(v.basis(), &[int_vec(&[0, -1])]);
        assert_eq!(v.rays_in_v(), &[1, 3]);
    }

    #[test]
    fn canonical_class_examples() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let v = span(&p1p1, &[&[0, 1]]);
        let kf = foliated_canonical_class(&p1p1, &v);
        let expected = DivisorClass::new(
            &p1p1,
            vec![rat(0, 1), rat(-1, 1), rat(0, 1), rat(-1, 1)],
        );
        assert_eq!(kf.class, expected);

        // V = N_Q reduces to the canonical class
        let full = full_foliation(&p1p1);
        let kf_full = foliated_canonical_class(&p1p1, &full);
        let kx = DivisorClass::new(&p1p1, vec![rat(-1, 1); 4]);
        assert_eq!(kf_full.class, kx);
    }

    #[test]
    fn foliated_degrees_on_product() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let v = span(&p1p1, &[&[0, 1]]);
        let walls = p1p1.walls().unwrap();
        // fiber wall on ray (1,0); base wall on ray (0,1)
        let fiber_wall = walls
            .iter()
            .find(|w| w.wall_cone.ray_ids() == [0])
            .unwrap();
        let base_wall = walls
            .iter()
            .find(|w| w.wall_cone.ray_ids() == [1])
            .unwrap();
        assert_eq!(foliated_degree(&p1p1, &v, fiber_wall).unwrap(), rat(2, 1));
        assert_eq!(foliated_degree(&p1p1, &v, base_wall).unwrap(), rat(0, 1));
    }

    #[test]
    fn plane_full_degree_is_canonical() {
        let p2 = named_fan("Pn:2").unwrap();
        let full = full_foliation(&p2);
        for wall in p2.walls().unwrap() {
            assert_eq!(foliated_degree(&p2, &full, wall).unwrap(), rat(3, 1));
        }
    }

    #[test]
    fn lengths_on_projective_spaces() {
        for (name, expected) in [("Pn:1", 2), ("Pn:2", 3), ("Pn:3", 4), ("Pn:4", 5)] {
            let fan = named_fan(name).unwrap();
            let full = full_foliation(&fan);
            let mori = mori_cone(&fan).unwrap();
            assert_eq!(mori.extremal_rays.len(), 1);
            let len = length(&fan, &full, &mori.extremal_rays[0]).unwrap();
            assert_eq!(len, rat(expected, 1), "length on {name}");
        }
    }

    #[test]
    fn lengths_on_product_with_vertical_foliation() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let v = span(&p1p1, &[&[0, 1]]);
        let mori = mori_cone(&p1p1).unwrap();
        let mut lengths: Vec<Rat> = mori
            .extremal_rays
            .iter()
            .map(|r| length(&p1p1, &v, r).unwrap())
            .collect();
        lengths.sort();
        assert_eq!(lengths, vec![rat(0, 1), rat(2, 1)]);
    }

    #[test]
    fn lengths_on_hirzebruch_one_horizontal_foliation() {
        let f1 = named_fan("hirzebruch:1").unwrap();
        let v = span(&f1, &[&[1, 0]]);
        let mori = mori_cone(&f1).unwrap();
        for ray in &mori.extremal_rays {
            let len = length(&f1, &v, ray).unwrap();
            assert!(len <= rat(1, 1) + Rat::one(), "bound holds");
            assert!(
                len <= rat(1, 1),
                "both rays stay at or below the rank for this foliation, got {len}"
            );
        }
    }

    #[test]
    fn monotone_under_subspace_growth_on_nonnegative_walls() {
        // if V is contained in W, the degree can only grow on walls where the
        // extra rays of W pair nonnegatively
        let f1 = named_fan("hirzebruch:1").unwrap();
        let small = span(&f1, &[&[1, 0]]);
        let big = full_foliation(&f1);
        for wall in f1.walls().unwrap() {
            let data = wall_data(&f1, wall).unwrap();
            let extra_rays: Vec<usize> = big
                .rays_in_v()
                .iter()
                .copied()
                .filter(|r| !small.contains_ray(*r))
                .collect();
            let all_nonneg = extra_rays
                .iter()
                .all(|&r| !data.degree_of_ray(r).is_negative());
            if all_nonneg {
                assert!(
                    foliated_degree(&f1, &small, wall).unwrap()
                        <= foliated_degree(&f1, &big, wall).unwrap()
                );
            }
        }
    }

    #[test]
    fn subspace_equality_is_mutual_containment() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let a = span(&p1p1, &[&[0, 1]]);
        let b = span(&p1p1, &[&[0, -2]]);
        let c = span(&p1p1, &[&[1, 0]]);
        assert!(a.same_subspace(&b));
        assert!(!a.same_subspace(&c));
    }
}
