use torifan::fan::{validate_fan, RawFan};
use torifan::intersection::deduped_wall_classes;
use torifan::linalg::{lp, rat_vec_from_int, Int, Rat};
use num_traits::{Zero, One};

fn ivec(v: &[i64]) -> Vec<Int> { v.iter().map(|&x| Int::from(x)).collect() }

#[test]
fn certificate_for_mask1() {
    let rays: Vec<Vec<Int>> = vec![
        ivec(&[1,1,1]), ivec(&[-1,1,1]), ivec(&[-1,-1,1]), ivec(&[1,-1,1]),
        ivec(&[1,1,-1]), ivec(&[-1,1,-1]), ivec(&[-1,-1,-1]), ivec(&[1,-1,-1]),
    ];
    let cones = vec![
        vec![0,1,3], vec![1,2,3],    // top via diag (1,3)
        vec![4,5,6], vec![4,6,7],    // bottom via (4,6)
        vec![0,3,7], vec![0,4,7],    // +x via (0,7)
        vec![1,2,6], vec![1,5,6],    // -x via (1,6)
        vec![0,1,5], vec![0,4,5],    // +y via (0,5)
        vec![2,3,7], vec![2,6,7],    // -y via (2,7)
    ];
    let raw = RawFan { ambient_rank: 3, rays, max_cones: cones };
    let fan = validate_fan(&raw).expect("valid");
    assert!(fan.is_complete());
    assert!(!fan.is_projective().unwrap());
    let classes = deduped_wall_classes(&fan).unwrap();
    println!("classes ({}):", classes.len());
    for c in &classes { println!("  {:?}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>()); }
    // find lambda >= 0, sum lambda = 1, sum lambda_i c_i = 0
    let k = classes.len();
    let d = fan.ray_count();
    let mut rows: Vec<Vec<Rat>> = (0..d).map(|coord| classes.iter().map(|c| Rat::from_integer(c[coord].clone())).collect()).collect();
    rows.push(vec![Rat::one(); k]);
    let mut b = vec![Rat::zero(); d];
    b.push(Rat::one());
    let sol = lp::nonnegative_solution(&rows, &b).expect("positive circuit exists");
    println!("lambda: {:?}", sol.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    let _ = rat_vec_from_int(&classes[0]);
    panic!("done");
}
