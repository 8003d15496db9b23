//! Orders of matrices over F_p, and the map induced on a quotient space.

use padic_periods::linalg::FpMatrix;

fn main() {
    let rot = FpMatrix::from_rows(5, &[vec![0, 4], vec![1, 0]]);
    println!("[[0,-1],[1,0]] over F_5 has order {:?}", rot.order());
    let unip = FpMatrix::from_rows(3, &[vec![1, 1], vec![0, 1]]);
    println!("[[1,1],[0,1]] over F_3 has order {:?}", unip.order());
    let singular = FpMatrix::from_rows(3, &[vec![1, 0], vec![0, 0]]);
    println!("diag(1,0) over F_3: {:?}", singular.order());

    // swap on F_3^2, modulo the line spanned by (1, 1)
    let swap = FpMatrix::from_rows(3, &[vec![0, 1], vec![1, 0]]);
    let line = FpMatrix::from_rows(3, &[vec![1, 1]]);
    let q = swap.induced_on_quotient(&line).expect("line is invariant");
    println!("swap mod (1,1): {:?}, order {:?}", q.to_rows(), q.order());
}
