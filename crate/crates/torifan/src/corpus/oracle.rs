//! Brute-force oracles, implemented independently of the intersection-theory
//! code path: wall adjacency is re-enumerated here, relations are solved by
//! rational row reduction instead of a Smith-form kernel, and degrees come
//! from the principal-divisor linear system. Only the exact linear algebra
//! layer is shared.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::fan::Fan;
use crate::foliation::FoliationSubspace;
use crate::linalg::{
    lattice_index, lp, primitive_from_rational, rat_from_int, rat_vec_from_int, rref, Int, Rat,
};

/// Facet-sharing structure recomputed from scratch: sorted facet ray ids
/// mapped to the two adjacent maximal cones.
fn facet_adjacency(fan: &Fan) -> Result<BTreeMap<Vec<usize>, (usize, usize)>, Error> {
    let n = fan.ambient_rank();
    if n == 0 {
        return Ok(BTreeMap::new());
    }
    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        if cone.dim() != n {
            return Err(Error::NotComplete);
        }
        for drop in 0..n {
            let mut ids = cone.ray_ids().to_vec();
            ids.remove(drop);
            facets.entry(ids).or_default().push(ci);
        }
    }
    let mut out = BTreeMap::new();
    for (facet, adj) in facets {
        if adj.len() != 2 {
            return Err(Error::NotComplete);
        }
        out.insert(facet, (adj[0].min(adj[1]), adj[0].max(adj[1])));
    }
    Ok(out)
}

/// Solve the one-dimensional relation among the involved rays by rational
/// row reduction: put the coordinate matrix in reduced echelon form, set the
/// free variable to one, and back-substitute. The sign is pinned by making
/// the coefficient on `positive_ray` positive.
fn relation_by_row_reduction(
    fan: &Fan,
    involved: &[usize],
    positive_ray: usize,
) -> Result<Vec<Int>, Error> {
    let n = fan.ambient_rank();
    let k = involved.len();
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|coord| {
            involved
                .iter()
                .map(|&rid| rat_from_int(fan.ray(rid).coords()[coord].clone()))
                .collect()
        })
        .collect();
    let (reduced, pivots) = rref(rows);
    if pivots.len() + 1 != k {
        return Err(Error::Internal(format!(
            "expected a rank-one relation space, found corank {}",
            k - pivots.len()
        )));
    }
    let free = (0..k).find(|c| !pivots.contains(c)).expect("one free column");
    let mut local = vec![Rat::zero(); k];
    local[free] = Rat::one();
    for (row, &p) in reduced.iter().zip(&pivots) {
        local[p] = -row[free].clone();
    }
    let ints = primitive_from_rational(&local)?;
    let pos = involved
        .iter()
        .position(|&r| r == positive_ray)
        .expect("positive ray among the involved rays");
    let flip = ints[pos].is_negative();
    let mut coeffs = vec![Int::zero(); fan.ray_count()];
    for (slot, &rid) in ints.iter().zip(involved) {
        coeffs[rid] = if flip { -slot.clone() } else { slot.clone() };
    }
    Ok(coeffs)
}

/// All wall curve classes, one per facet, recomputed from first principles.
fn all_wall_classes(fan: &Fan) -> Result<Vec<(Vec<usize>, Vec<Int>)>, Error> {
    let extra_of = |facet: &[usize], cone_id: usize| {
        *fan.max_cones()[cone_id]
            .ray_ids()
            .iter()
            .find(|id| facet.binary_search(id).is_err())
            .expect("adjacent cone differs from its facet")
    };
    let mut out = Vec::new();
    for (facet, (left, right)) in facet_adjacency(fan)? {
        let extra_right = extra_of(&facet, right);
        let mut involved = facet.clone();
        involved.push(extra_of(&facet, left));
        involved.push(extra_right);
        involved.sort_unstable();
        involved.dedup();
        let coeffs = relation_by_row_reduction(fan, &involved, extra_right)?;
        out.push((facet, coeffs));
    }
    Ok(out)
}

/// Independent extremal-ray oracle: recompute all wall classes, deduplicate,
/// and keep exactly the classes that are not nonnegative combinations of the
/// others (one exact feasibility test each). Intended for desk-scale fans.
pub fn brute_force_extremal_rays(fan: &Fan) -> Result<Vec<Vec<Int>>, Error> {
    let mut classes: Vec<Vec<Int>> =
        all_wall_classes(fan)?.into_iter().map(|(_, c)| c).collect();
    classes.sort();
    classes.dedup();
    let d = fan.ray_count();
    let mut extremal = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        let others: Vec<&Vec<Int>> =
            classes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| c).collect();
        if others.is_empty() {
            extremal.push(class.clone());
            continue;
        }
        let rows: Vec<Vec<Rat>> = (0..d)
            .map(|coord| others.iter().map(|c| rat_from_int(c[coord].clone())).collect())
            .collect();
        let target: Vec<Rat> = rat_vec_from_int(class);
        if lp::nonnegative_solution(&rows, &target).is_none() {
            extremal.push(class.clone());
        }
    }
    Ok(extremal)
}

/// Independent length oracle: for every wall whose class equals the given
/// one, solve the principal-divisor system for the degree vector (the unique
/// kernel vector supported on the wall's rays), pin its scale by the
/// multiplicity quotient on the higher adjacent cone's extra ray, sum over
/// the foliation's rays, and take the minimum.
pub fn brute_force_length(
    fan: &Fan,
    v: &FoliationSubspace,
    class: &[Int],
) -> Result<Rat, Error> {
    let extra_of = |facet: &[usize], cone_id: usize| {
        *fan.max_cones()[cone_id]
            .ray_ids()
            .iter()
            .find(|id| facet.binary_search(id).is_err())
            .expect("adjacent cone differs from its facet")
    };
    let mut best: Option<Rat> = None;
    for (facet, (left, right)) in facet_adjacency(fan)? {
        let extra_left = extra_of(&facet, left);
        let extra_right = extra_of(&facet, right);
        let mut involved = facet.clone();
        involved.push(extra_left);
        involved.push(extra_right);
        involved.sort_unstable();
        involved.dedup();
        let coeffs = relation_by_row_reduction(fan, &involved, extra_right)?;
        if coeffs != class {
            continue;
        }
        // degree vector: relation rescaled so the extra ray's degree is
        // mult(wall) / mult(adjacent cone)
        let mult_wall = lattice_index(&fan.ray_matrix(&facet))?;
        let mult_right = lattice_index(&fan.ray_matrix(fan.max_cones()[right].ray_ids()))?;
        let scale = rat_from_int(mult_wall)
            / (rat_from_int(coeffs[extra_right].clone()) * rat_from_int(mult_right));
        let mut degree = Rat::zero();
        for &rid in v.rays_in_v() {
            degree += rat_from_int(coeffs[rid].clone()) * &scale;
        }
        best = Some(match best {
            Some(b) if b <= degree => b,
            _ => degree,
        });
    }
    best.ok_or_else(|| Error::Internal("no wall carries the requested class".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{named_fan, random_projective_fan, GeneratorConfig};
    use crate::foliation::full_foliation;
    use crate::intersection::mori_cone;
    use crate::linalg::int_vec;

    #[test]
    fn oracle_matches_plane() {
        let p2 = named_fan("Pn:2").unwrap();
        let classes = brute_force_extremal_rays(&p2).unwrap();
        assert_eq!(classes, vec![int_vec(&[1, 1, 1])]);
    }

    #[test]
    fn oracle_matches_hirzebruch_two() {
        let f2 = named_fan("hirzebruch:2").unwrap();
        let classes = brute_force_extremal_rays(&f2).unwrap();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn oracle_agrees_with_mori_cone_on_random_subdivision() {
        let cfg = GeneratorConfig { seed: 42, rank: 2, steps: 2, base: "Pn:2".into() };
        let fan = random_projective_fan(&cfg).unwrap();
        let mut oracle = brute_force_extremal_rays(&fan).unwrap();
        let mut main: Vec<Vec<Int>> = mori_cone(&fan)
            .unwrap()
            .extremal_rays
            .into_iter()
            .map(|r| r.class.0)
            .collect();
        oracle.sort();
        main.sort();
        assert_eq!(oracle, main);
    }

    #[test]
    fn length_oracle_examples() {
        for (name, expected) in [("Pn:1", 2), ("Pn:2", 3), ("Pn:3", 4)] {
            let fan = named_fan(name).unwrap();
            let full = full_foliation(&fan);
            let classes = brute_force_extremal_rays(&fan).unwrap();
            assert_eq!(classes.len(), 1);
            let len = brute_force_length(&fan, &full, &classes[0]).unwrap();
            assert_eq!(len, rat_from_int(Int::from(expected)), "{name}");
        }
        // weighted plane: 1/2 + 1 + 1/2
        let wps = named_fan("wps:1,1,2").unwrap();
        let full = full_foliation(&wps);
        let classes = brute_force_extremal_rays(&wps).unwrap();
        let len = brute_force_length(&wps, &full, &classes[0]).unwrap();
        assert_eq!(len, rat_from_int(Int::from(2)));
    }

    #[test]
    fn length_oracle_on_product_fiber() {
        let p1p1 = named_fan("P1xP1").unwrap();
        let v = crate::foliation::foliation_from_basis(
            &p1p1,
            &[vec![Rat::zero(), rat_from_int(Int::one())]],
        )
        .unwrap();
        let mut lengths: Vec<Rat> = brute_force_extremal_rays(&p1p1)
            .unwrap()
            .iter()
            .map(|c| brute_force_length(&p1p1, &v, c).unwrap())
            .collect();
        lengths.sort();
        assert_eq!(lengths, vec![Rat::zero(), rat_from_int(Int::from(2))]);
    }
}
