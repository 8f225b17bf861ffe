//! Scratch: inf-sup and stabilization probes for the acceptance design.

use std::time::Instant;

use faer::Mat;
use stilt::bench::BenchmarkData;
use stilt::fem::assembly::{mass_1d, stiffness_1d, Weight};
use stilt::fractional::build_spectral;
use stilt::saddle::{
    assemble, assemble_with_options, BilinearForm, Discretization, FormulationKind,
};
use stilt::solve::{cg, generalized_eigen_bounds, multiplier_schur_dense, BlockDiagPrecond};

fn beta_row(kind: FormulationKind, form: BilinearForm, levels: u32) -> Vec<f64> {
    let data = BenchmarkData::new();
    let mut out = Vec::new();
    for level in 1..=levels {
        let disc = Discretization::new(kind, level).unwrap();
        let sys = assemble(&disc, form, &data.problem()).unwrap();
        let red = sys.reduce();
        let p = BlockDiagPrecond::build(&disc, &sys).unwrap();
        let n = p.multiplier_norm_dense();
        let g = multiplier_schur_dense(&red, false).unwrap();
        let (smin, _) = generalized_eigen_bounds(&g, &n).unwrap();
        out.push(smin.sqrt());
    }
    out
}

fn main() {
    let data = BenchmarkData::new();

    println!(
        "c1d beta FullH1   : {:?}",
        beta_row(FormulationKind::Coupled1D, BilinearForm::FullH1, 4)
    );
    println!(
        "c1d beta Stiffness: {:?}",
        beta_row(FormulationKind::Coupled1D, BilinearForm::StiffnessOnly, 4)
    );
    println!(
        "c2d beta FullH1   : {:?}",
        beta_row(FormulationKind::Coupled2D, BilinearForm::FullH1, 4)
    );

    // stabilized vs unstabilized smallest multiplier eigenvalue, level 3
    {
        let disc = Discretization::new(FormulationKind::Stabilized1D, 3).unwrap();
        let problem = data.problem();
        let with = assemble_with_options(&disc, BilinearForm::FullH1, &problem, true).unwrap();
        let without = assemble_with_options(&disc, BilinearForm::FullH1, &problem, false).unwrap();
        let p = BlockDiagPrecond::build(&disc, &with).unwrap();
        let n = p.multiplier_norm_dense();
        let gw = multiplier_schur_dense(&with.reduce(), true).unwrap();
        let go = multiplier_schur_dense(&without.reduce(), false).unwrap();
        let (aw, _) = generalized_eigen_bounds(&gw, &n).unwrap();
        let (ao, _) = generalized_eigen_bounds(&go, &n).unwrap();
        println!("stab level 3: smin with {aw:.4e} without {ao:.4e} ratio {:.2e}", aw / ao);
        let idw = generalized_eigen_bounds(&gw, &Mat::identity(gw.nrows(), gw.nrows())).unwrap();
        let ido = generalized_eigen_bounds(&go, &Mat::identity(go.nrows(), go.nrows())).unwrap();
        println!(
            "stab level 3 (identity norm): with {:.4e} without {:.4e} ratio {:.2e}",
            idw.0,
            ido.0,
            idw.0 / ido.0
        );
    }

    // level-5 Coupled1D Schur singular values, matrix-free primal solves
    {
        let t = Instant::now();
        let disc = Discretization::new(FormulationKind::Coupled1D, 5).unwrap();
        let sys = assemble(&disc, BilinearForm::FullH1, &data.problem()).unwrap();
        let red = sys.reduce();
        let unit = Weight::constant(1.0);
        let m1 = mass_1d(&disc.line, &unit);
        let a1 = stiffness_1d(&disc.line, &unit).add(&m1);
        let op = build_spectral(&a1, &m1, Some(sys.mult_constrained.as_slice()), 40_000).unwrap();
        let n = op.norm_matrix(-0.5);
        let np = red.a.nrows();
        let nm = red.b.nrows();
        let dinv: Vec<f64> = (0..np).map(|i| 1.0 / red.a.get(i, i)).collect();
        let apply_a = |x: &[f64]| red.a.matvec(x);
        let apply_p =
            |x: &[f64]| x.iter().zip(&dinv).map(|(v, d)| v * d).collect::<Vec<f64>>();
        let rows: Vec<Vec<f64>> = (0..nm)
            .map(|i| {
                let (cols, vals) = red.b.row(i);
                let mut r = vec![0.0; np];
                for (&c, &v) in cols.iter().zip(vals) {
                    r[c as usize] = v;
                }
                r
            })
            .collect();
        let mut g = Mat::<f64>::zeros(nm, nm);
        let mut total_iters = 0usize;
        for j in 0..nm {
            let (x, rep) = cg(&apply_a, &apply_p, &rows[j], 1e-9, 20_000).unwrap();
            total_iters += rep.iterations;
            for i in 0..nm {
                g[(i, j)] = rows[i].iter().zip(&x).map(|(a, b)| a * b).sum();
            }
            if j % 16 == 0 {
                eprintln!("  col {j}/{nm} ({} iters, {:.0}s)", rep.iterations, t.elapsed().as_secs_f64());
            }
        }
        for i in 0..nm {
            for j in (i + 1)..nm {
                let v = 0.5 * (g[(i, j)] + g[(j, i)]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        let (smin, smax) = generalized_eigen_bounds(&g, &n).unwrap();
        let kap = (1.0 + (1.0 + 4.0 * smax).sqrt()) / ((1.0 + 4.0 * smin).sqrt() - 1.0);
        println!(
            "level 5: sigma_min^2 {smin:.4} sigma_max^2 {smax:.4} beta {:.4} kappa_exact {kap:.3} ({} cg iters, {:.0}s)",
            smin.sqrt(),
            total_iters,
            t.elapsed().as_secs_f64()
        );
    }
}
