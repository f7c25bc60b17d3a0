// debug: tie analysis for criterion 2
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use xube::domains::SlidingTileDomain;
use xube::search::{bwas, FnHeuristicV, GraphSearchParams, ZeroHeuristicV};

fn main() {
    let domain = SlidingTileDomain::new(3).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let ks: Vec<usize> = xube::domain::sample_ks(19, 100, &mut rng).into_iter().map(|k| k + 1).collect();
    let insts = xube::domain::gen_prob_insts_reverse(&domain, &ks, &mut rng).unwrap();
    let params = GraphSearchParams { max_itrs: 1_000_000, ..Default::default() };
    let manhattan = FnHeuristicV::new(|s, g| {
        let mut goal_pos = vec![0usize; 9];
        let g: &xube::domains::StpGoal = g;
        for (cell, &t) in g.target.iter().enumerate() { goal_pos[t as usize] = cell; }
        let s: &xube::domains::StpState = s;
        let mut total = 0usize;
        for (cell, &t) in s.tiles.iter().enumerate() {
            if t == 0 { continue; }
            let want = goal_pos[t as usize];
            total += (cell / 3).abs_diff(want / 3) + (cell % 3).abs_diff(want % 3);
        }
        total as f64
    });
    let mut ties = 0;
    for (i, inst) in insts.iter().enumerate() {
        let mut r1 = ChaCha12Rng::seed_from_u64(0);
        let m = bwas(&domain, inst, &manhattan, &params, &mut r1).unwrap();
        let z = bwas(&domain, inst, &ZeroHeuristicV, &params, &mut r1).unwrap();
        if m.nodes_generated >= z.nodes_generated {
            ties += 1;
            println!("inst {i}: k={} cost={} manhattan={} zero={}", inst.gen_steps, m.path_cost, m.nodes_generated, z.nodes_generated);
        }
    }
    println!("ties: {ties}");
}
