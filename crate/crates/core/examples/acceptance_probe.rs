use compop::bounds::{self, BoundConstants};
use compop::fit::{self, ModelKind};
use compop::oracle::{approximation_numbers, build_matrix};
use compop::symbols::Symbol;
use std::time::Instant;

fn main() {
    let constants = BoundConstants::for_p(2.0).unwrap();
    let lens = Symbol::lens(0.5).unwrap();
    let t = Instant::now();
    let m = build_matrix(&lens, 1024).unwrap();
    let table = approximation_numbers(&m, 30).unwrap();
    println!("lens05 oracle(1024, 30): {:?}", t.elapsed());

    // criterion 6: stretched fit on [10,30]
    let stretched = fit::fit_table(&table, ModelKind::Stretched, (10, 30)).unwrap();
    let geo = fit::fit_table(&table, ModelKind::Geometric, (10, 30)).unwrap();
    let beta = bounds::beta_p_theta(0.5, 2.0);
    println!(
        "stretched: b={:.4} r2={:.6}; geometric r2={:.6}; cap 1.1*beta={:.4}",
        stretched.decay_coefficient(),
        stretched.r_squared,
        geo.r_squared,
        1.1 * beta
    );

    // criterion 4a: geometric windows in [5,25] vs floor - 0.05
    let floor = bounds::geometric_decay_floor(&lens, 4000).unwrap().value;
    let mut worst: f64 = 1.0;
    for a in 5..=21usize {
        for b in (a + 4)..=25usize {
            let w = fit::fit_table(&table, ModelKind::Geometric, (a, b)).unwrap();
            worst = worst.min(w.geometric_rate().unwrap());
        }
    }
    println!("floor={:.4}, worst window r={:.4} (need >= {:.4})", floor, worst, floor - 0.05);

    // criterion 1 margins for the tightest symbol at n=25
    for spec in ["lens:theta=0.3", "lens:theta=0.7", "mobius:a=0.5"] {
        let sym = Symbol::parse(spec).unwrap();
        let t = Instant::now();
        let mm = build_matrix(&sym, 1024).unwrap();
        let tt = approximation_numbers(&mm, 25).unwrap();
        let mut worst_margin = f64::INFINITY;
        for n in 1..=25usize {
            let (_, rep) = bounds::optimize_lobo_sequence(&sym, n, &constants).unwrap();
            worst_margin = worst_margin.min(tt.values[n - 1] / rep.values[0]);
        }
        println!("{spec}: oracle time {:?}, min oracle/lower ratio over n<=25: {:.3e}", t.elapsed(), worst_margin);
    }

    // invariant: radial vs closed-form lens decay exponents within 50%
    let mut ns = Vec::new();
    let mut logs_radial = Vec::new();
    let mut logs_closed = Vec::new();
    let mut n = 100usize;
    while n <= 10000 {
        let r = bounds::radial_lower_bound(&lens, &constants, n, None).unwrap();
        ns.push(n);
        logs_radial.push(r.log_values[0]);
        logs_closed.push(match bounds::lens_asymptotic_lower_bound(0.5, &constants, n) {
            Ok(b) => b.log_value,
            Err(_) => f64::NAN,
        });
        n = (n as f64 * 1.25) as usize + 1;
    }
    let fr = fit::fit_log(&ns, &logs_radial, ModelKind::Stretched, (100, 10000)).unwrap();
    let fc = fit::fit_log(&ns, &logs_closed, ModelKind::Stretched, (100, 10000)).unwrap();
    println!(
        "radial b={:.4} vs closed-form b={:.4} (ratio {:.3})",
        fr.decay_coefficient(),
        fc.decay_coefficient(),
        fr.decay_coefficient() / fc.decay_coefficient()
    );
}
