//! Generate an Erdős–Rényi graph, save it as an edge list, reload it and build
//! both Laplacians.

use heatcheb::prelude::*;
use heatcheb::sparse::{load_graph, write_edge_list, GraphFormat};

fn main() -> Result<()> {
    let (n, p, seed) = (400, 0.02, 3);
    let edges = erdos_renyi(n, p, seed)?;
    println!("ER({n}, {p}) seed {seed}: {} edges", edges.len());

    let dir = std::env::temp_dir().join("heatcheb-graph-io");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("er.txt");
    let mut file = std::fs::File::create(&path)?;
    write_edge_list(
        &mut file,
        &edges,
        n,
        &[format!("erdos-renyi n={n} p={p} seed={seed}")],
    )?;
    drop(file);

    let (reloaded, n_reloaded) = load_graph(&path, GraphFormat::from_path(&path))?;
    assert_eq!((reloaded.len(), n_reloaded), (edges.len(), n));
    println!("round trip through {} ok", path.display());

    let l = build_laplacian(&reloaded, n, LaplacianKind::Combinatorial)?;
    let ones = vec![1.0; n];
    let residual = l.matvec(&ones)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!(
        "combinatorial: nnz={} symmetric={} max|L 1|={residual:e}",
        l.nnz(),
        l.is_symmetric()
    );

    match build_laplacian(&reloaded, n, LaplacianKind::Normalized) {
        Ok(ln) => println!("normalized: nnz={} diagonal[0]={}", ln.nnz(), ln.get(0, 0)),
        Err(err) => println!("normalized: {err}"),
    }

    let x = GraphSignal::standard_normal(n, 1);
    println!("signal: ||x||^2={:.3} sum={:.3}", x.norm_sq(), x.sum());
    Ok(())
}
