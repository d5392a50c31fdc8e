use compop::bounds::{global_regular_upper_bound, radial_objective_log, BoundConstants};
use compop::fit::{fit_log, ModelKind};
use compop::symbols::Symbol;

fn main() {
    let constants = BoundConstants::for_p(2.0).unwrap();
    // (a) lens modulus staircase vs stretched law
    let lens_mod = Symbol::lens(0.5).unwrap().modulus().unwrap();
    let mut ns = Vec::new();
    let mut logs = Vec::new();
    for k in 1..=10000usize {
        let b = global_regular_upper_bound(&lens_mod, &constants, 2, k).unwrap();
        ns.push(k);
        logs.push(b.log_value);
    }
    for lo in [1usize, 2, 10, 50] {
        let m = fit_log(&ns, &logs, ModelKind::Stretched, (lo, 10000)).unwrap();
        println!("lens stairs fit [{lo},1e4]: b={:.4} r2={:.5}", m.decay_coefficient(), m.r_squared);
    }
    // (b) cusp modulus staircase vs cusp law
    let cusp_mod = Symbol::cusp().modulus().unwrap();
    let mut logs = Vec::new();
    let mut ns2 = Vec::new();
    for k in 2..=10000usize {
        let b = global_regular_upper_bound(&cusp_mod, &constants, 1, k).unwrap();
        ns2.push(k);
        logs.push(b.log_value);
    }
    for lo in [2usize, 10, 50] {
        let m = fit_log(&ns2, &logs, ModelKind::Cusp, (lo, 10000)).unwrap();
        println!("cusp stairs fit [{lo},1e4]: b={:.4} r2={:.5}", m.decay_coefficient(), m.r_squared);
    }
    // (c) cusp radial minoration at the paper's sigma choice
    let cusp = Symbol::cusp();
    let a = cusp.radial_gap(1.0).unwrap();
    let mut ns3 = Vec::new();
    let mut logs3 = Vec::new();
    let mut n = 1000usize;
    while n <= 100_000 {
        let sigma = 1.0 - (n as f64).ln() / (4.0 * n as f64);
        let v = radial_objective_log(&cusp_mod, &constants, a, n, sigma).unwrap();
        ns3.push(n);
        logs3.push(v);
        n = (n as f64 * 1.13) as usize + 1;
    }
    let m = fit_log(&ns3, &logs3, ModelKind::Cusp, (1000, 100_000)).unwrap();
    println!("cusp radial@paper-sigma fit [1e3,1e5]: b={:.4} r2={:.6}", m.decay_coefficient(), m.r_squared);
}
