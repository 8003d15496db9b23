//! The functional graph of a map on the special fiber.

use padic_periods::dynamics::FunctionalGraph;
use padic_periods::models::RationalMapP1;
use padic_periods::models::Model;
use padic_periods::IntPolynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = IntPolynomial::parse("x^2", &["x"], Some(7))?;
    let model = Model::P1(RationalMapP1::polynomial(7, &f)?);
    let graph = FunctionalGraph::build(&model)?;
    println!("x^2 on P^1(F_7): {} points", graph.len());
    for (cycle, len) in graph.cycle_decomposition() {
        let pts: Vec<String> = cycle.iter().map(|q| q.to_string()).collect();
        println!("  cycle of length {len}: {}", pts.join(" -> "));
    }
    for node in graph.nodes() {
        let (tail, n0) = graph.residual_data(&node.coords).unwrap();
        println!("  {}: tail {tail}, lands on a {n0}-cycle", node.coords);
    }
    Ok(())
}
