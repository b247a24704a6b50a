//! Prime-field arithmetic, Lagrange interpolation, RS codes and their star
//! products.

use anyhow::Result;
use coded_pc::codes::{rs_code, star_product, star_product_code};
use coded_pc::field::{field_arith, lagrange_interpolate, ArithOp, PrimeField};

fn main() -> Result<()> {
    let f = PrimeField::new(7)?;
    let (a, b) = (f.elem(3), f.elem(5));
    println!("in F_7: 3+5={} 3*5={} 3/5={}", a + b, a * b, field_arith(a, b, ArithOp::Div)?);
    println!("3/0 -> {}", field_arith(a, f.elem(0), ArithOp::Div).unwrap_err());

    let poly = lagrange_interpolate(f, &[(0, 1), (1, 3), (2, 0)])?;
    println!("through (0,1),(1,3),(2,0): coefficients {:?}", poly.coeffs());

    let code = rs_code(f, 6, 2, (0..6).collect(), vec![6, 5])?;
    let u = code.base.encode_row(&[1, 2])?;
    let w = code.base.encode_row(&[4, 4])?;
    println!("codewords {u:?} and {w:?}, product {:?}", star_product(f, &u, &w)?);
    for g in 1..=3 {
        println!("{g}-fold star product dimension {}", star_product_code(&code, g)?.k());
    }
    Ok(())
}
