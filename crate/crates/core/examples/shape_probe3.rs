use compop::bounds::{global_regular_upper_bound, BoundConstants};
use compop::fit::{fit_log, ModelKind};
use compop::symbols::Symbol;

fn main() {
    let constants = BoundConstants::for_p(2.0).unwrap();
    let cusp_mod = Symbol::cusp().modulus().unwrap();
    // Refresh points: k where N_k increments, i.e. k = l*N*d_N + 1.
    let mut ns = Vec::new();
    let mut logs = Vec::new();
    let mut prev_nk = usize::MAX;
    for k in 2..=10000usize {
        let b = global_regular_upper_bound(&cusp_mod, &constants, 1, k).unwrap();
        if b.n_k != prev_nk {
            prev_nk = b.n_k;
            ns.push(k);
            logs.push(b.log_value);
            println!("refresh at k={k}: N_k={} log={:.2}", b.n_k, b.log_value);
        }
    }
    if ns.len() >= 4 {
        let m = fit_log(&ns, &logs, ModelKind::Cusp, (2, 10000)).unwrap();
        println!("cusp refresh-point fit: {} pts, b={:.4} r2={:.5}", ns.len(), m.decay_coefficient(), m.r_squared);
    }
}
