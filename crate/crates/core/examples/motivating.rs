//! Two databases holding a repetition code, three messages over F_3 and four
//! linear candidates. Prints the queries of one retrieval, the answers, and
//! the recovered evaluation.

use anyhow::Result;
use coded_pc::codes::LinearCode;
use coded_pc::field::PrimeField;
use coded_pc::functions::CandidateSet;
use coded_pc::linalg::Matrix;
use coded_pc::matrices::{construct_mds_cyclic, MatrixKind};
use coded_pc::protocol::{answer_all, build_store, run_end_to_end, SchemeParams};
use coded_pc::querygen::{stream, stream_rng};

fn main() -> Result<()> {
    let field = PrimeField::new(3)?;
    let code = LinearCode::new(field, Matrix::from_rows(&[vec![1, 1]])?)?;
    let set = CandidateSet::linear(field, &[vec![1, 0, 1], vec![0, 1, 0], vec![1, 1, 1], vec![1, 2, 1]])?;
    let params = SchemeParams::plc(code, construct_mds_cyclic(2, 1, MatrixKind::Pir)?, set)?;

    let (v, seed) = (2, 7);
    let out = run_end_to_end(&params, v, seed)?;
    println!("queries for candidate {} (database, size, role, signed terms cand:row):", v + 1);
    print!("{}", out.queries.to_text());

    // same seed, same store: the answers the decoder saw
    let (_, store) = build_store(&params, &mut stream_rng(seed, stream::MESSAGES))?;
    for (j, a) in answer_all(&params, &out.queries, &store).iter().enumerate() {
        println!("database {} answers {:?}", j + 1, a);
    }

    let r = &out.report;
    println!("decoded rows {:?}", out.decoded.values);
    println!("L = {}, D = {}, rate = {} (closed form {})", r.l, r.d, r.measured_factor, r.closed_form_factor);
    println!("eliminated sums checked: {}", out.decoded.removed_checked);
    Ok(())
}
