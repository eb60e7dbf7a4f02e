use lsc_core::benchgen::{generate, LatticeModel, LatticeSpec};
use lsc_core::layout::max_routing_paths;
use lsc_core::pipeline::{compile, CompileOptions};
use std::time::Instant;

#[test]
fn sweep_probe() {
    let t0 = Instant::now();
    let models = [
        LatticeModel::Ising2d,
        LatticeModel::Heisenberg2d,
        LatticeModel::FermiHubbard2d,
    ];
    let mut worst: f64 = 0.0;
    for model in models {
        for l in [2usize, 4, 6] {
            for r in [2usize, 3, 4, 6] {
                for n in [1usize, 2, 4] {
                    let c = generate(&LatticeSpec::new(model, l)).unwrap();
                    match compile(&c, &CompileOptions::new(r, n)) {
                        Ok(out) => {
                            let ok = out.validation.is_clean();
                            let ratio = if out.report.lower_bound_d > 0.0 {
                                out.report.exec_time_d / out.report.lower_bound_d
                            } else {
                                0.0
                            };
                            worst = worst.max(ratio);
                            if !ok || out.report.exec_time_d < out.report.lower_bound_d {
                                println!(
                                    "BAD {:?} L={l} r={r} n={n}: viol={} exec={} lb={}",
                                    model,
                                    out.validation.violations.len(),
                                    out.report.exec_time_d,
                                    out.report.lower_bound_d
                                );
                                for v in out.validation.violations.iter().take(3) {
                                    println!("  {v}");
                                }
                            }
                        }
                        Err(e) => println!("ERR {model:?} L={l} r={r} n={n}: {e}"),
                    }
                }
            }
        }
    }
    println!("worst ratio {worst:.3}, elapsed {:.1?}", t0.elapsed());
}

#[test]
fn ushape_probe() {
    let c = generate(&LatticeSpec::new(LatticeModel::Ising2d, 6)).unwrap();
    for r in [3usize, max_routing_paths(6)] {
        let mut row = format!("r={r}: ");
        for n in 1..=8 {
            let out = compile(&c, &CompileOptions::new(r, n)).unwrap();
            row.push_str(&format!(
                "{}:{:.0}/{:.0} ",
                n, out.report.spacetime_incl, out.report.exec_time_d
            ));
        }
        println!("{row}");
    }
}

#[test]
fn monotonicity_probe() {
    for model in [
        LatticeModel::Ising2d,
        LatticeModel::Heisenberg2d,
        LatticeModel::FermiHubbard2d,
    ] {
        for l in [2usize, 4] {
            for r in [2usize, 3, 4] {
                let c = generate(&LatticeSpec::new(model, l)).unwrap();
                let mut prev: Option<(usize, f64)> = None;
                for n in [1usize, 2, 4, 8] {
                    match compile(&c, &CompileOptions::new(r, n)) {
                        Ok(out) => {
                            if let Some((pn, pt)) = prev {
                                if out.report.exec_time_d > pt {
                                    println!(
                                        "NONMONO {:?} L={l} r={r}: n={pn} t={pt} -> n={n} t={}",
                                        model, out.report.exec_time_d
                                    );
                                }
                            }
                            prev = Some((n, out.report.exec_time_d));
                        }
                        Err(e) => {
                            println!("ERR {:?} L={l} r={r} n={n}: {e}", model);
                            break;
                        }
                    }
                }
            }
        }
    }
    println!("monotonicity probe done");
}
