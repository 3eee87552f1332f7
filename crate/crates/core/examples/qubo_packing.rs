//! Encode subproblems as QUBOs, pack several into one device-sized
//! problem and decode an exact minimum back into cliques.
//!
//! ```text
//! cargo run --example qubo_packing
//! ```

use hybrid_clique::backend::{solve_qubo_sa, SaParams};
use hybrid_clique::graph::generate_er;
use hybrid_clique::kcore::{core_decompose, enumerate_subproblems};
use hybrid_clique::qubo::{decode, pack, pack_with, Accounting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_er(60, 0.15, 7);
    let cd = core_decompose(&g);
    let subs: Vec<_> = enumerate_subproblems(&g, &cd).filter(|s| !s.candidates.is_empty()).take(8).collect();
    let sizes: Vec<usize> = subs.iter().map(|s| s.candidates.len()).collect();
    println!("K(G) = {}, candidate counts {:?}", cd.k_graph, sizes);

    let device_size = 21;
    let packing = pack(&subs, &g, device_size)?;
    let packed = &packing.packed;
    println!(
        "packed {} blocks into {} variables ({} counting roots), {} left over",
        packed.blocks.len(),
        packed.qubo.dim,
        packed.root_inclusive_size,
        packing.leftovers.len()
    );
    let inclusive = pack_with(&subs, &g, device_size, Accounting::RootInclusive)?;
    println!("with root slots the same device takes {} blocks", inclusive.packed.blocks.len());

    print!("{}", packed.qubo.to_coordinate_text().lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");

    let (bits, energy) = solve_qubo_sa(&packed.qubo, &SaParams::default());
    println!("annealed energy {energy}");
    for d in decode(packed, &bits)? {
        let root = d.root.map_or_else(|| "seed".into(), |r| g.label(r));
        let members: Vec<String> = d.vertices.iter().map(|&v| g.label(v)).collect();
        println!("  {root:>4} + {{{}}}: size {}, repaired {}", members.join(" "), d.clique_size(), d.dropped);
    }
    Ok(())
}
