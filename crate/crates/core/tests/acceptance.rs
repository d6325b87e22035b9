//! Acceptance criteria. Runs as a plain binary so that every criterion
//! prints one PASS/FAIL line, even when an earlier one fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use common::*;
use geolip::analysis::{
    distortion_scan, fit_holder, make_epsilon_family, PairSampler, RandomPairs, ScanOptions,
    DEFAULT_EPSILONS,
};
use geolip::assignment::hungarian;
use geolip::datagen::{gen_level_groups, PairSpec};
use geolip::matching::{match_pair, round_rows, sinkhorn, MatchOptions};
use geolip::metrics::{
    gram_procrustes_bounds, hgw_exact, hgw_exact_with, pm_exact, wass_inf, HgwOptions,
};
use geolip::models::{
    bilip_2d, bilip_2d_nodes, bilip_general, bilip_general_tuples, node_features, wl1_forward,
    BiLipConfig, NodeFeatures, Symmetrizer, Wl1Config,
};
use geolip::{MultiSet, Orientation, PointSet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent pair or a perturbed moved copy, centered and jointly scaled
/// into the unit ball.
fn unit_pair(
    d: usize,
    n: usize,
    near: bool,
    r: &mut rand_chacha::ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let x = gaussian(d, n, r);
    let y = if near {
        let delta = 10f64.powf(r.random_range(-3.0..0.0));
        let moved = &x + gaussian(d, n, r) * delta;
        let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let rot = orthogonal(d, sign, r);
        let perm = shuffled(n, r);
        act(
            &moved,
            &perm,
            &rot,
            &gaussian(d, 1, r).column(0).into_owned(),
        )
    } else {
        gaussian(d, n, r)
    };
    let (x, y) = (centered(&x), centered(&y));
    let s = op_norm_12(&x).max(op_norm_12(&y));
    (x / s, y / s)
}

fn criterion_1() -> Outcome {
    let mut r = rng(1001);
    let mut worst_upper = 0.0f64;
    let mut worst_holder = 0.0f64;
    for k in 0..200 {
        let d = 2 + k % 2;
        let n = r.random_range(4..=7);
        let (x, y) = unit_pair(d, n, k % 4 >= 2, &mut r);
        let pm = pm_exact(&ps(x.clone()), &ps(y.clone()), false)
            .unwrap()
            .value;
        let hgw = hgw_exact(&ps(x.clone()), &ps(y.clone())).unwrap().value;
        let (pm_ref, hgw_ref) = (pm_brute(&x, &y, false), hgw_brute(&x, &y));
        check((pm - pm_ref).abs() <= 1e-9, || {
            format!("pair {k}: pm {pm} vs oracle {pm_ref}")
        })?;
        check((hgw - hgw_ref).abs() <= 1e-9, || {
            format!("pair {k}: hgw {hgw} vs oracle {hgw_ref}")
        })?;
        let nf = n as f64;
        check(hgw <= 2.0 * nf.powf(1.5) * pm + 1e-9, || {
            format!("pair {k}: hgw {hgw} > 2n^1.5·pm with pm {pm}")
        })?;
        check(pm * pm <= (4.0 * nf + 2.0) * hgw + 1e-9, || {
            format!("pair {k}: pm² {} > (4n+2)·hgw with hgw {hgw}", pm * pm)
        })?;
        if pm > 0.0 {
            worst_upper = worst_upper.max(hgw / (2.0 * nf.powf(1.5) * pm));
        }
        if hgw > 0.0 {
            worst_holder = worst_holder.max(pm * pm / ((4.0 * nf + 2.0) * hgw));
        }
    }
    Ok(format!(
        "200 pairs; largest lhs/rhs: {worst_upper:.3} (hgw bound), {worst_holder:.3} (pm² bound)"
    ))
}

fn criterion_2() -> Outcome {
    let fam = make_epsilon_family(5, 2, &DEFAULT_EPSILONS, 2002).map_err(|e| e.to_string())?;
    let base = fam.base().matrix().clone();
    let mut pts = Vec::new();
    for (&eps, set) in fam.epsilons.iter().zip(&fam.sets) {
        let pm = pm_brute(&base, set.matrix(), false);
        let hgw = hgw_brute(&base, set.matrix());
        let pm_lib = pm_exact(&fam.base(), set, false).unwrap().value;
        let hgw_lib = hgw_exact(&fam.base(), set).unwrap().value;
        check(
            (pm - pm_lib).abs() <= 1e-9 && (hgw - hgw_lib).abs() <= 1e-9,
            || format!("ε={eps}: library ({pm_lib}, {hgw_lib}) vs oracle ({pm}, {hgw})"),
        )?;
        check(pm >= eps - 1e-9, || format!("ε={eps}: pm {pm} < ε"))?;
        pts.push((pm, hgw));
    }
    let slope = loglog_slope(&pts);
    let fit = fit_holder(&pts).map_err(|e| e.to_string())?;
    check((fit.slope - slope).abs() < 1e-9, || {
        format!("library slope {} vs oracle {slope}", fit.slope)
    })?;
    check((slope - 2.0).abs() <= 0.1, || {
        format!("slope {slope:.4} outside 2.0 ± 0.1")
    })?;
    Ok(format!("pm ≥ ε at all 5 levels, log-log slope {slope:.4}"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3003);
    let mut worst = 1.0f64;
    for k in 0..100 {
        let d = 2 + k % 2;
        let n = r.random_range(3..=8);
        let x = gaussian(d, n, &mut r);
        let y = if k % 3 == 0 {
            gaussian(d, n, &mut r)
        } else {
            let delta = 10f64.powf(r.random_range(-3.0..0.0));
            orthogonal(d, 1.0, &mut r) * (&x + gaussian(d, n, &mut r) * delta)
        };
        let lower = procrustes_brute(&x, &y);
        let mid = (gram_sqrt(&x) - gram_sqrt(&y)).norm();
        let tn = trace_norm(&(x.transpose() * &x - y.transpose() * &y));
        let lib = gram_procrustes_bounds(&ps(x.clone()), &ps(y.clone())).unwrap();
        check(
            (lib.lower - lower).abs() <= 1e-8
                && (lib.mid - mid).abs() <= 1e-8
                && (lib.trace_norm - tn).abs() <= 1e-8 * tn.max(1.0),
            || format!("pair {k}: library {lib:?} vs oracle ({lower}, {mid}, {tn})"),
        )?;
        check(lower <= mid + 1e-8, || {
            format!("pair {k}: lower {lower} > mid {mid}")
        })?;
        check(mid <= std::f64::consts::SQRT_2 * lower + 1e-8, || {
            format!("pair {k}: mid {mid} > √2·lower {lower}")
        })?;
        check(mid * mid <= tn + 1e-8, || {
            format!("pair {k}: mid² {} > trace norm {tn}", mid * mid)
        })?;
        if lower > 1e-6 {
            worst = worst.max(mid / lower);
        }
    }
    Ok(format!(
        "100 pairs; largest mid/lower {worst:.4} (bound 1.4142)"
    ))
}

fn wl1_ratio(cfg: &Wl1Config, x: &PointSet, y: &PointSet) -> f64 {
    let fx = wl1_forward(x, cfg).unwrap().0;
    let fy = wl1_forward(y, cfg).unwrap().0;
    (fx - fy).norm() / pm_brute(x.matrix(), y.matrix(), false)
}

fn criterion_4() -> Outcome {
    let mut lines = Vec::new();
    for seed in [41u64, 42, 43] {
        let fam = make_epsilon_family(5, 2, &[1e-1, 1e-3], seed).map_err(|e| e.to_string())?;
        let cfg = Wl1Config::new(seed, 5, 3, 8).map_err(|e| e.to_string())?;
        let coarse = wl1_ratio(&cfg, &fam.base(), &fam.sets[0]);
        let fine = wl1_ratio(&cfg, &fam.base(), &fam.sets[1]);
        check(fine <= 0.1 * coarse, || {
            format!("seed {seed}: ratio {fine:.3e} at ε=1e-3 vs {coarse:.3e} at ε=1e-1")
        })?;
        lines.push(format!("{:.1e}", fine / coarse));
    }
    Ok(format!(
        "ratio(1e-3)/ratio(1e-1) over 3 families: {}",
        lines.join(", ")
    ))
}

fn wl1_max_ratio(configs: &[(usize, Wl1Config)], seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let d = 2 + k % 2;
        let (n, cfg) = &configs[r.random_range(0..configs.len())];
        let (x, y) = unit_pair(d, *n, k % 4 >= 2, &mut r);
        let hgw = hgw_brute(&x, &y);
        if hgw < 1e-10 {
            continue;
        }
        let fx = wl1_forward(&ps(x), cfg).unwrap().0;
        let fy = wl1_forward(&ps(y), cfg).unwrap().0;
        worst = worst.max((fx - fy).norm() / hgw);
    }
    worst
}

fn criterion_5() -> Outcome {
    let configs: Vec<(usize, Wl1Config)> = (3..=6)
        .map(|n| (n, Wl1Config::new(5005, n, 3, 8).unwrap()))
        .collect();
    let a = wl1_max_ratio(&configs, 51);
    let b = wl1_max_ratio(&configs, 52);
    check(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0, || {
        format!("max ratios {a}, {b}")
    })?;
    check(a.max(b) <= 2.0 * a.min(b), || {
        format!("max ratios {a:.4} and {b:.4} differ by more than 2×")
    })?;
    Ok(format!("max ratio {a:.4} and {b:.4} on disjoint seeds"))
}

fn sup(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

fn equivariant(orig: &NodeFeatures, moved: &NodeFeatures, perm: &[usize], tol: f64) -> bool {
    moved.index.iter().zip(&moved.features).all(|(idx, f)| {
        let mapped: Vec<usize> = idx.iter().map(|&i| perm[i]).collect();
        orig.get(&mapped).is_some_and(|g| sup(f, g) <= tol)
    })
}

/// Planar and general models evaluated by hand: tuple features from explicit
/// Gram entries and cross products, then both sort embeddings.
fn hand_general(x: &DMatrix<f64>, cfg: &BiLipConfig) -> DVector<f64> {
    let d = x.nrows();
    let n = x.ncols();
    let xc = centered(x);
    let f = xc.norm();
    let mut feats = Vec::new();
    let tuples: Vec<Vec<usize>> = if d == 2 {
        (0..n).map(|i| vec![i]).collect()
    } else {
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| vec![i, j]))
            .collect()
    };
    for tuple in tuples {
        {
            let xi = xc.column(tuple[0]);
            let z: DVector<f64> = if d == 2 {
                DVector::from_vec(vec![-xi[1], xi[0]])
            } else {
                xi.cross(&xc.column(tuple[1]))
            };
            let mut head = Vec::new();
            for &a in &tuple {
                for &b in &tuple {
                    head.push(if a == b {
                        xc.column(a).norm()
                    } else {
                        xc.column(a).dot(&xc.column(b)) / f
                    });
                }
            }
            let others: Vec<usize> = (0..n).filter(|k| !tuple.contains(k)).collect();
            let elems = DMatrix::from_fn(d + 1, others.len(), |row, col| {
                let xk = xc.column(others[col]);
                if row < d - 1 {
                    xc.column(tuple[row]).dot(&xk) / f
                } else if row == d - 1 {
                    z.dot(&xk) / f.powi(d as i32 - 1)
                } else {
                    xk.norm()
                }
            });
            let beta = sort_embed_hand(cfg.psi(), &elems);
            feats.push(DVector::from_iterator(
                head.len() + beta.len(),
                head.into_iter().chain(beta.iter().copied()),
            ));
        }
    }
    sort_embed_hand(cfg.phi(), &DMatrix::from_columns(&feats))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6006);
    let n = 6;
    let mut details = Vec::new();
    for d in [2usize, 3] {
        let cfg = BiLipConfig::new(d, n, 66).map_err(|e| e.to_string())?;
        let model = |x: &PointSet| {
            if d == 2 {
                bilip_2d(x, &cfg).unwrap().0
            } else {
                bilip_general(x, &cfg).unwrap().0
            }
        };
        let tuples = |x: &PointSet| {
            if d == 2 {
                bilip_2d_nodes(x, &cfg).unwrap()
            } else {
                bilip_general_tuples(x, &cfg).unwrap()
            }
        };
        let mut worst_inv = 0.0f64;
        let mut worst_hom = 0.0f64;
        for trial in 0..10 {
            let xm = gaussian(d, n, &mut r);
            let x = ps(xm.clone());
            let hx = model(&x);
            let perm = shuffled(n, &mut r);
            let rot = orthogonal(d, 1.0, &mut r);
            let t = gaussian(d, 1, &mut r).column(0).into_owned();
            let gx = ps(act(&xm, &perm, &rot, &t));
            worst_inv = worst_inv.max(sup(&model(&gx), &hx));

            let px = ps(permute_columns(&xm, &perm));
            check(equivariant(&tuples(&x), &tuples(&px), &perm, 1e-9), || {
                format!("d={d} trial {trial}: tuple features not equivariant")
            })?;
            let (nx, npx) = (
                node_features(&x, &cfg).unwrap(),
                node_features(&px, &cfg).unwrap(),
            );
            check(equivariant(&nx, &npx, &perm, 1e-9), || {
                format!("d={d} trial {trial}: node features not equivariant")
            })?;

            for s in [0.5, 2.0, 3.0] {
                let scaled = model(&ps(&xm * s));
                worst_hom = worst_hom.max((&scaled - &hx * s).norm() / (&hx * s).norm());
            }

            let general = bilip_general(&x, &cfg).unwrap().0;
            let hand = hand_general(&xm, &cfg);
            let rel = (&general - &hand).norm() / hand.norm();
            check(rel <= 1e-12, || {
                format!("d={d}: general model vs hand evaluation {rel:.2e}")
            })?;
            if d == 2 {
                let planar = bilip_2d(&x, &cfg).unwrap().0;
                let rel = (&general - &planar).norm() / planar.norm();
                check(rel <= 1e-12, || format!("general vs planar path {rel:.2e}"))?;
            }
        }
        check(worst_inv <= 1e-9, || {
            format!("d={d}: invariance error {worst_inv:.2e}")
        })?;
        check(worst_hom <= 1e-12, || {
            format!("d={d}: homogeneity error {worst_hom:.2e}")
        })?;
        let zero = PointSet::zeros(d, n).unwrap();
        check(model(&zero).iter().all(|v| *v == 0.0), || {
            format!("d={d}: H(0) ≠ 0")
        })?;
        check(
            tuples(&zero)
                .features
                .iter()
                .all(|f| f.iter().all(|v| *v == 0.0)),
            || format!("d={d}: features of 0 ≠ 0"),
        )?;
        details.push(format!(
            "d={d}: invariance {worst_inv:.1e}, homogeneity {worst_hom:.1e}"
        ));
    }
    Ok(details.join("; "))
}

/// Frozen for the seeds below from the first run of this suite.
const DISTORTION_BASELINE: (f64, f64) = (1.325080, 17.00465);

fn criterion_7() -> Outcome {
    let mut rows = Vec::new();
    for d in [2usize, 3] {
        let configs: Vec<(usize, BiLipConfig)> = (4..=7)
            .map(|n| (n, BiLipConfig::new(d, n, 77).unwrap()))
            .collect();
        let sampler = RandomPairs {
            dim: d,
            n_min: 4,
            n_max: 7,
            orientation: Orientation::Proper,
        };
        let model = |x: &PointSet| {
            let cfg = &configs.iter().find(|(n, _)| *n == x.count()).unwrap().1;
            if d == 2 {
                bilip_2d(x, cfg).map(|o| o.0)
            } else {
                bilip_general(x, cfg).map(|o| o.0)
            }
        };
        let metric = |x: &PointSet, y: &PointSet| Ok(pm_brute(x.matrix(), y.matrix(), true));
        let opts = ScanOptions {
            pairs: 100,
            seed: 700 + d as u64,
            omega_c: Some(0.1),
            ..Default::default()
        };
        let report = distortion_scan(model, metric, &sampler as &dyn PairSampler, &opts)
            .map_err(|e| e.to_string())?;
        check(report.pairs_sampled == 100, || {
            format!("d={d}: only {} pairs", report.pairs_sampled)
        })?;
        rows.extend(report.per_pair);
    }
    let r_min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let r_max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    check(r_min > 0.0 && (r_max / r_min).is_finite(), || {
        format!("r_min {r_min}, r_max {r_max}")
    })?;
    let (b_min, b_max) = DISTORTION_BASELINE;
    let within = |v: f64, b: f64| v <= 2.0 * b && b <= 2.0 * v;
    check(within(r_min, b_min) && within(r_max, b_max), || {
        format!("r_min {r_min:.6e}, r_max {r_max:.6e} vs baseline ({b_min:.6e}, {b_max:.6e})")
    })?;
    Ok(format!(
        "200 pairs in Ω_0.1: r_min {r_min:.4e}, r_max {r_max:.4e}, distortion {:.2}",
        r_max / r_min
    ))
}

fn criterion_8() -> Outcome {
    let (d, n) = (2, 5);
    let cfg = BiLipConfig::new(d, n, 88).map_err(|e| e.to_string())?;
    let sym = Symmetrizer::new(d, cfg.output_dim(), 89).map_err(|e| e.to_string())?;
    let f = |x: &PointSet| sym.apply(|z| bilip_2d(z, &cfg).map(|o| o.0), x);
    let mut r = rng(8008);
    let xm = gaussian(d, n, &mut r);
    let fx = f(&ps(xm.clone())).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let perm = shuffled(n, &mut r);
        let rot = orthogonal(d, -1.0, &mut r);
        let t = gaussian(d, 1, &mut r).column(0).into_owned();
        worst = worst.max(sup(&f(&ps(act(&xm, &perm, &rot, &t))).unwrap(), &fx));
    }
    check(worst <= 1e-9, || {
        format!("improper invariance error {worst:.2e}")
    })?;

    let mut ratios = Vec::new();
    for k in 0..40 {
        let (x, y) = unit_pair(d, n, k % 2 == 1, &mut r);
        let dist = pm_brute(&x, &y, false);
        if dist < 1e-10 {
            continue;
        }
        ratios.push(sup(&f(&ps(x)).unwrap(), &f(&ps(y)).unwrap()) / dist);
    }
    let r_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    check(r_min > 0.0, || format!("r_min {r_min}"))?;
    Ok(format!(
        "invariance error {worst:.1e}, r_min {r_min:.4e} over {} pairs",
        ratios.len()
    ))
}

fn criterion_9() -> Outcome {
    let levels = [0.0, 0.005, 0.01, 0.05, 0.1];
    let per_level = 100;
    let pairs = gen_level_groups(&levels, per_level, 9009, &PairSpec::default())
        .map_err(|e| e.to_string())?;
    let cfg = BiLipConfig::new(2, 90, 99).map_err(|e| e.to_string())?;
    let opts = MatchOptions::default();
    let acc: Vec<f64> = pairs
        .par_iter()
        .map(|p| {
            let m = match_pair(&p.x, &p.y, &cfg, &opts, None).unwrap();
            let mut inverse = vec![0; p.x.count()];
            for (j, &i) in p.truth_perm.as_slice().iter().enumerate() {
                inverse[i] = j;
            }
            let hits = m
                .assignment
                .iter()
                .zip(&inverse)
                .filter(|(a, b)| a == b)
                .count();
            hits as f64 / p.x.count() as f64
        })
        .collect();
    let means: Vec<f64> = acc
        .chunks(per_level)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    let table = levels
        .iter()
        .zip(&means)
        .map(|(l, m)| format!("{l}: {m:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(acc[..per_level].iter().all(|&a| a == 1.0), || {
        format!("zero-noise pairs not all recovered ({table})")
    })?;
    check(means[1..].windows(2).all(|w| w[1] <= w[0]), || {
        format!("accuracy not monotone ({table})")
    })?;
    Ok(table)
}

fn criterion_10() -> Outcome {
    let mut r = rng(10010);
    for k in 0..60 {
        let n = 1 + k % 7;
        let dim = 1 + k % 3;
        // Every third instance uses small integers to force ties.
        let draw = |r: &mut rand_chacha::ChaCha8Rng| {
            if k % 3 == 0 {
                DMatrix::from_fn(dim, n, |_, _| r.random_range(0..3) as f64)
            } else {
                gaussian(dim, n, r)
            }
        };
        let (s, t) = (draw(&mut r), draw(&mut r));
        let lib = wass_inf(
            &MultiSet::from_columns(&s).unwrap(),
            &MultiSet::from_columns(&t).unwrap(),
        )
        .unwrap()
        .value;
        let brute = winf_brute(&s, &t);
        check(lib == brute, || {
            format!("W∞ instance {k}: {lib} vs {brute}")
        })?;
    }
    for k in 0..40 {
        let n = 2 + k % 5;
        let d = 2 + k % 2;
        let (x, y) = (gaussian(d, n, &mut r), gaussian(d, n, &mut r));
        let (px, py) = (ps(x.clone()), ps(y.clone()));
        let bnb = hgw_exact_with(
            &px,
            &py,
            &HgwOptions {
                cap: 8,
                prune: true,
            },
        )
        .unwrap()
        .value;
        let plain = hgw_exact_with(
            &px,
            &py,
            &HgwOptions {
                cap: 8,
                prune: false,
            },
        )
        .unwrap()
        .value;
        let brute = hgw_brute(&x, &y);
        check(bnb == plain, || {
            format!("Hard-GW instance {k}: pruned {bnb} vs plain {plain}")
        })?;
        check((bnb - brute).abs() <= 1e-12 * brute.max(1.0), || {
            format!("Hard-GW instance {k}: {bnb} vs oracle {brute}")
        })?;
    }
    for k in 0..10 {
        let n = if k < 5 { 4 } else { 7 };
        let cost = DMatrix::from_fn(n, n, |_, _| r.random_range(0.0..1.0));
        let ds = sinkhorn(&cost, 0.01, 5000, 1e-9).map_err(|e| e.to_string())?;
        check(round_rows(&ds.q) == lap_brute(&cost).0, || {
            format!("Sinkhorn instance {k} (n={n}) disagrees with the optimal assignment")
        })?;
        if n == 4 {
            check(hungarian(&cost).0 == lap_brute(&cost).0, || {
                format!("Hungarian instance {k} is not optimal")
            })?;
        }
    }
    Ok("60 W∞, 40 Hard-GW and 10 assignment instances agree".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("metric inequalities", criterion_1),
        ("Hölder exponent on the ε-family", criterion_2),
        ("Gram sandwich", criterion_3),
        ("1-WL not lower Lipschitz", criterion_4),
        ("1-WL upper Lipschitz against Hard-GW", criterion_5),
        ("bi-Lipschitz model properties", criterion_6),
        ("empirical distortion on Ω_c", criterion_7),
        ("symmetrization", criterion_8),
        ("matching pipeline", criterion_9),
        ("oracle equivalences", criterion_10),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id:>2} PASS [{name}] {msg} ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL [{name}] {msg} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
