//! Private linear computation on a `[4,2]` code over F_5 with a hand-written
//! rate matrix. Shows validation, the interference matrices and a run for
//! every candidate.

use anyhow::Result;
use coded_pc::codes::example_code;
use coded_pc::field::PrimeField;
use coded_pc::functions::CandidateSet;
use coded_pc::matrices::{interference, validate, MatrixKind, RateMatrix};
use coded_pc::protocol::{run_end_to_end, SchemeParams};

fn main() -> Result<()> {
    let field = PrimeField::new(5)?;
    let code = example_code(field);
    let rm = RateMatrix::from_text("1010\n0101\n", MatrixKind::Pir)?;
    println!("rate matrix (kappa={}, nu={}):\n{}", rm.kappa, rm.nu, rm.to_text());
    println!("validation: {}", validate(&rm, &code, None));

    let im = interference(&rm);
    println!("A = {:?}", im.a);
    println!("B = {:?}", im.b);

    // a support without an information set is rejected
    let bad = RateMatrix::from_text("1100\n0011\n", MatrixKind::Pir)?;
    println!("1100/0011: {}", validate(&bad, &code, None));

    let set = CandidateSet::linear(field, &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]])?;
    let params = SchemeParams::plc(code, rm, set)?;
    for v in 0..params.mu() {
        let r = run_end_to_end(&params, v, 1)?.report;
        println!("candidate {}: L={} D={} L/D={}", r.v, r.l, r.d, r.measured_factor);
    }
    Ok(())
}
