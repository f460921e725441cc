//! Adaptive 2:1 balanced octree over a clustered point set.

use stokes_dmk::cli::{generate_points, Generator};
use stokes_dmk::tree::build_tree;

fn main() -> stokes_dmk::Result<()> {
    let mut points = generate_points(Generator::UniformCube, 2000, 3, 3);
    points.extend(generate_points(Generator::CornerCluster, 2000, 3, 4));
    let tree = build_tree(3, &points, None, 100, false, 8)?;
    println!("{} boxes, {} leaves, depth {}", tree.boxes.len(), tree.n_leaves(), tree.depth());
    for (level, ids) in tree.levels.iter().enumerate() {
        let leaves = ids.iter().filter(|&&i| tree.boxes[i].is_leaf()).count();
        let fine = ids.iter().map(|&i| tree.fine[i].len()).max().unwrap_or(0);
        println!("level {level}: {:>4} boxes, {:>4} leaves, at most {fine} fine neighbors", ids.len(), leaves);
    }
    let deepest = *tree.levels.last().unwrap().first().unwrap();
    let (colleagues, coarse, fine) = tree.neighbor_query(deepest);
    println!("box {deepest}: {} colleagues, {} coarse, {} fine", colleagues.len(), coarse.len(), fine.len());
    Ok(())
}
