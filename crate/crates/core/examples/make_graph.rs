//! Write a synthetic edge list for trying the CLI without real datasets.
//!
//! Usage: make_graph <ba|planted> <nodes> <seed> <output-path>

use cwalker_core::gen;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 5 {
        eprintln!("usage: make_graph <ba|planted> <nodes> <seed> <output-path>");
        std::process::exit(2);
    }
    let kind = args[1].as_str();
    let n: usize = args[2].parse().expect("nodes");
    let seed: u64 = args[3].parse().expect("seed");
    let path = std::path::Path::new(&args[4]);
    let g = match kind {
        "ba" => gen::barabasi_albert(n, 3, seed),
        "planted" => gen::planted_clique(n, (n as f64).sqrt() as usize, 3.0, seed),
        other => {
            eprintln!("unknown kind {other:?} (ba|planted)");
            std::process::exit(2);
        }
    };
    g.write_edge_list_path(path).expect("write edge list");
    eprintln!(
        "wrote {} nodes, {} edges, max degree {} to {}",
        g.node_count(),
        g.edge_count(),
        g.max_degree(),
        path.display()
    );
}
