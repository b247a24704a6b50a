//! Polynomial computation over a systematic RS code: only the first `n_hat`
//! databases are queried.

use anyhow::Result;
use coded_pc::analysis::{sys_ppc_rate_factor, to_f64};
use coded_pc::field::PrimeField;
use coded_pc::functions::CandidateSet;
use coded_pc::matrices::{n_hat, nu_sys};
use coded_pc::protocol::{run_end_to_end, SchemeParams};

fn main() -> Result<()> {
    for (q, n) in [(5, 4), (7, 7)] {
        let field = PrimeField::new(q)?;
        let set = CandidateSet::nonparallel_monomials(field, 2, 2)?;
        let params = SchemeParams::sys_ppc(field, n, 2, 2, set)?;
        println!("n={n}: n_hat={} nu={}", n_hat(n, 2, 3), nu_sys(n, 2, 3));
        if let Some(rm) = &params.rate_matrix {
            print!("{}", rm.to_text());
        }
        for v in 0..params.mu() {
            let out = run_end_to_end(&params, v, 2)?;
            let counts: Vec<usize> = (0..n).map(|j| out.queries.count_at(j)).collect();
            println!(
                "  candidate {}: D={} L={} per-round {:?} queries per database {:?}",
                v + 1,
                out.report.d,
                out.report.l,
                out.decoded.per_round,
                counts
            );
        }
        let f = sys_ppc_rate_factor(n, 2, 2, 2, 3)?;
        println!("  closed-form rate factor {f} = {:.6}", to_f64(&f));
    }
    Ok(())
}
