use zseries::summation::{sum_to_tolerance, partial_sum, SumMethod, SumOptions};
use zseries::{corpus, PrecisionContext, Real};

fn main() {
    let c = PrecisionContext::new(256).unwrap();
    let entry = corpus::get("z3_sum2").unwrap();
    let tol = Real::from_f64(1e-5, &c);
    let r = sum_to_tolerance(&entry.seq, 2, &tol, SumMethod::ZImproved, true, &c, &SumOptions::default()).unwrap();
    println!("certified={} m={} bound={} terms={}", r.certified, r.m, r.bound.magnitude().to_f64(), r.terms_evaluated);
    let err = r.sum.sub(&Real::from_u64(2, &c), &c).abs();
    println!("err={:e}", err.to_f64());
    println!("sum={}", r.sum.to_f64());
    let direct = partial_sum(&entry.seq, r.m, &c).unwrap();
    println!("direct={} diff={:e}", direct.to_f64(), direct.sub(&r.sum, &c).abs().to_f64());
    for d in 0..8i64 {
        let m = (r.m as i64 + d - 3) as u64;
        let a = entry.seq.eval_term(m, &c).unwrap();
        println!("a[{}] = {:e}", m, a.to_f64());
    }
}
