use compop::fit::{self, ModelKind};
use compop::oracle::{approximation_numbers, build_matrix};
use compop::symbols::Symbol;

fn main() {
    let lens = Symbol::lens(0.5).unwrap();
    let m = build_matrix(&lens, 1024).unwrap();
    let table = approximation_numbers(&m, 60).unwrap();
    for (lo, hi) in [(10usize, 30usize), (10, 45), (10, 60), (20, 60)] {
        let s = fit::fit_table(&table, ModelKind::Stretched, (lo, hi)).unwrap();
        let compop::fit::FittedParams::Stretched { b, log_n_coeff, .. } = s.params else { panic!() };
        println!("free-d  [{lo},{hi}]: b={b:.4} d={log_n_coeff:.4} r2={:.6}", s.r_squared);
    }
    // pinned d = -1/(2 p~) = -0.25: fit log s + 0.25 ln n = -b sqrt(n) + c
    for (lo, hi) in [(10usize, 30usize), (10, 60)] {
        let ns: Vec<usize> = (lo..=hi).collect();
        let logs: Vec<f64> = ns
            .iter()
            .map(|&n| table.values[n - 1].ln() + 0.25 * (n as f64).ln())
            .collect();
        // reuse geometric-style 2-param LS on regressor sqrt(n): quick inline
        let sx: f64 = ns.iter().map(|&n| (n as f64).sqrt()).sum();
        let sy: f64 = logs.iter().sum();
        let sxx: f64 = ns.iter().map(|&n| n as f64).sum();
        let sxy: f64 = ns.iter().zip(&logs).map(|(&n, &l)| (n as f64).sqrt() * l).sum();
        let k = ns.len() as f64;
        let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        println!("pinned-d [{lo},{hi}]: b={:.4}", -slope);
    }
}
