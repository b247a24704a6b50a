//! Private monomial computation on a Lagrange-encoded `[4,2]` RS code over
//! F_5: candidates W1, W2 and W1*W2, plus a larger code where the degree-2
//! evaluations need fewer databases than the storage code has.

use anyhow::Result;
use coded_pc::analysis::{ppc_rate_factor, to_f64};
use coded_pc::codes::star_product_code;
use coded_pc::field::PrimeField;
use coded_pc::functions::CandidateSet;
use coded_pc::protocol::{run_end_to_end, SchemeParams};

fn main() -> Result<()> {
    let field = PrimeField::new(5)?;
    let set = CandidateSet::nonparallel_monomials(field, 2, 2)?;
    let params = SchemeParams::ppc(field, 4, 2, 2, set)?;
    let rs = params.rs.as_ref().expect("polynomial scheme");
    println!("alpha = {:?}, gamma = {:?}", rs.alpha, rs.gamma);
    println!("star-product dimension k~ = {}", star_product_code(rs, 2)?.k());
    println!("(kappa, nu) = {:?}", params.kappa_nu());

    for v in 0..params.mu() {
        let out = run_end_to_end(&params, v, 4)?;
        let r = &out.report;
        println!(
            "candidate {}: L={} D={} rate={:.6} (H_min={:.6}) per-round {:?}",
            r.v, r.l, r.d, r.rate_measured, r.h_min, out.decoded.per_round
        );
    }

    let field = PrimeField::new(7)?;
    let set = CandidateSet::all_monomials(field, 2, 2)?;
    let params = SchemeParams::ppc(field, 7, 2, 2, set)?;
    let r = run_end_to_end(&params, 4, 4)?.report;
    let closed = ppc_rate_factor(7, 2, 2, 2, 5)?;
    println!("[7,2] code, all monomials: L={} D={} L/D={} closed form {} = {:.6}", r.l, r.d, r.measured_factor, closed, to_f64(&closed));
    Ok(())
}
