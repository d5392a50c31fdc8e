use compop::fit::{self, ModelKind};
use compop::oracle::build_matrix;
use compop::symbols::Symbol;

fn main() {
    let lens = Symbol::lens(0.5).unwrap();
    let s1024 = build_matrix(&lens, 1024).unwrap().singular_values();
    let s2048 = build_matrix(&lens, 2048).unwrap().singular_values();
    for n in [5usize, 10, 15, 20, 25, 30, 40, 50, 60] {
        let a = s1024[n - 1];
        let b = s2048[n - 1];
        println!("n={n}: s(1024)={a:.6e} s(2048)={b:.6e} rel drift={:.2e}", (b - a) / b);
    }
    let table = compop::oracle::SingularValueTable {
        values: s2048[..60].to_vec(),
        truncation: 2048,
        converged_upto: 60,
        converged: true,
    };
    for (lo, hi) in [(10usize, 30usize), (10, 60)] {
        let s = fit::fit_table(&table, ModelKind::Stretched, (lo, hi)).unwrap();
        let compop::fit::FittedParams::Stretched { b, log_n_coeff, .. } = s.params else { panic!() };
        println!("2048 free-d [{lo},{hi}]: b={b:.4} d={log_n_coeff:.4} r2={:.6}", s.r_squared);
        let ns: Vec<usize> = (lo..=hi).collect();
        let logs: Vec<f64> = ns.iter().map(|&n| table.values[n - 1].ln() + 0.25 * (n as f64).ln()).collect();
        let sx: f64 = ns.iter().map(|&n| (n as f64).sqrt()).sum();
        let sy: f64 = logs.iter().sum();
        let sxx: f64 = ns.iter().map(|&n| n as f64).sum();
        let sxy: f64 = ns.iter().zip(&logs).map(|(&n, &l)| (n as f64).sqrt() * l).sum();
        let k = ns.len() as f64;
        let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
        println!("2048 pinned-d [{lo},{hi}]: b={:.4}", -slope);
    }
}
