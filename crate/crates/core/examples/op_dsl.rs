//! Parsing and checking operator expressions.

use shapeinv::cli::parse_op_expr;
use shapeinv::verify::{op_identity, SamplePlan};

fn main() {
    let plan = SamplePlan::new(8, 40);
    for text in ["[Lp, Lm] - 2*L3", "[L3,Rp]", "Lp - Rp", "Lm(2)*Rm(3) - Rm(2)*Lm(3)", "Foo(1)"] {
        match parse_op_expr(text) {
            Ok(ast) => {
                let r = op_identity(&ast.to_string(), &ast.pieces().unwrap(), &plan, 1e-10).unwrap();
                println!("{:<28} {}", ast.to_string(), if r.pass { "vanishes" } else { "does not vanish" });
            }
            Err(e) => println!("{text:<28} error: {e}"),
        }
    }
}
