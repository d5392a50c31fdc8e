use compop::oracle::{approximation_numbers, build_matrix};
use compop::symbols::Symbol;
use std::time::Instant;

fn main() {
    for spec in ["lens:theta=0.5", "mobius:a=0.5", "scaling:c=0.5"] {
        let sym = Symbol::parse(spec).unwrap();
        let t = Instant::now();
        let m = build_matrix(&sym, 1024).unwrap();
        let t_build = t.elapsed();
        let t = Instant::now();
        let table = approximation_numbers(&m, 25).unwrap();
        println!(
            "{spec}: build(1024) {t_build:?}, approx_numbers {:?}, converged_upto={} converged={} s1={:.6} s25={:.3e}",
            t.elapsed(),
            table.converged_upto,
            table.converged,
            table.values[0],
            table.values[24]
        );
    }
}
