//! Entropy terms and the converse bound for monomial candidate sets, next to
//! the achievable rates of both polynomial schemes.

use anyhow::Result;
use coded_pc::analysis::{ppc_converse, ppc_rate, sys_ppc_rate};
use coded_pc::field::PrimeField;
use coded_pc::functions::{CandidateSet, EntropyOracle};

fn main() -> Result<()> {
    let field = PrimeField::new(3)?;
    let (n, k, g) = (7, 2, 2);
    println!("f  mu  H_min     r  converse  rs_l      sys_rs_l");
    for f in 1..=4 {
        let set = CandidateSet::all_monomials(field, f, g)?;
        let oracle = EntropyOracle::new(&set)?;
        let (r, _) = oracle.effective_rank()?;
        let c = ppc_converse(&set, n, k)?;
        let mu = set.mu();
        println!(
            "{f}  {mu:<3} {:.6}  {r}  {:.6}  {:.6}  {:.6}",
            c.h_min,
            c.value,
            ppc_rate(n, k, g, f, mu, c.h_min)?,
            sys_ppc_rate(n, k, g, f, mu, c.h_min)?
        );
    }

    // linear candidates: entropies in q-ary units, effective rank = matrix rank
    let set = CandidateSet::linear(PrimeField::new(5)?, &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]])?;
    let oracle = EntropyOracle::new(&set)?;
    println!("linear set: H(all) = {:.3}, H(X1) = {:.3}, H(X3 | X1) = {:.3}", oracle.full(), oracle.single(0), oracle.conditional(&[2], &[0]));
    Ok(())
}
