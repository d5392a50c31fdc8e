use compop::bounds::{global_regular_upper_bound, BoundConstants};
use compop::fit::{fit_log, ModelKind};
use compop::symbols::Symbol;

fn main() {
    let constants = BoundConstants::for_p(2.0).unwrap();
    let cusp_mod = Symbol::cusp().modulus().unwrap();
    // log-spaced k
    let mut ns = Vec::new();
    let mut logs = Vec::new();
    let mut k = 2f64;
    while k <= 10000.0 {
        let ki = k as usize;
        let b = global_regular_upper_bound(&cusp_mod, &constants, 1, ki).unwrap();
        if ns.last() != Some(&ki) {
            ns.push(ki);
            logs.push(b.log_value);
        }
        k *= 1.06;
    }
    println!("log-spaced points: {}", ns.len());
    let m = fit_log(&ns, &logs, ModelKind::Cusp, (2, 10000)).unwrap();
    println!("cusp stairs log-spaced: b={:.4} r2={:.5}", m.decay_coefficient(), m.r_squared);
    // also try larger chi (finer dyadic steps)? chi is 0.5 default; try 0.7
    let mut c2 = BoundConstants::for_p(2.0).unwrap();
    c2.set("upper_chi", 0.7).unwrap();
    let mut logs2 = Vec::new();
    for &ki in &ns {
        logs2.push(global_regular_upper_bound(&cusp_mod, &c2, 1, ki).unwrap().log_value);
    }
    let m = fit_log(&ns, &logs2, ModelKind::Cusp, (2, 10000)).unwrap();
    println!("cusp stairs log-spaced chi=0.7: b={:.4} r2={:.5}", m.decay_coefficient(), m.r_squared);
    // uniform k with chi=0.7
    let nsu: Vec<usize> = (2..=10000).collect();
    let logsu: Vec<f64> = nsu.iter().map(|&ki| global_regular_upper_bound(&cusp_mod, &c2, 1, ki).unwrap().log_value).collect();
    let m = fit_log(&nsu, &logsu, ModelKind::Cusp, (2, 10000)).unwrap();
    println!("cusp stairs uniform chi=0.7: b={:.4} r2={:.5}", m.decay_coefficient(), m.r_squared);
}
