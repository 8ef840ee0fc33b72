//! Brute-force reference implementations, written from the metric
//! definitions without touching the library's kernels.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::Rng;
use synthaudit::data::Quantizer;
use synthaudit::downstream::{
    attack_all, fairness_metrics, AttackConfig, Classifier, PredictionSet, TokenEmbeddings, TokenFeaturizer,
};
use synthaudit::embedding::fit_embedder;
use synthaudit::fidelity::{chi_squared_per_field, frechet_distance, knn_precision_recall, mutual_information_matrix};
use synthaudit::neighbors::{Euclidean, Hamming, KnnConfig};
use synthaudit::privacy::{knn_distance_stats, PRIVACY_KS};
use synthaudit::seed;
use synthaudit::synthgen::{demo_population, project_to_simplex};

/// Tolerance for kernels that sum in a different order than the oracle.
pub const SUM_TOL: f64 = 1e-12;
/// Tolerance for paths through a symmetric eigendecomposition.
pub const EIGEN_TOL: f64 = 1e-6;
/// Covariance shrinkage the Fréchet kernel adds to each diagonal entry.
const FID_SHRINKAGE: f64 = 1e-6;

pub type Check = Result<(), String>;
pub type NamedCheck = (&'static str, fn() -> Check);

fn close(what: &str, got: f64, want: f64, tol: f64) -> Check {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, oracle {want} (tol {tol:e})"))
    }
}

fn random_tokens(rng: &mut impl Rng, rows: usize, vocab: &[u32]) -> Array2<u32> {
    Array2::from_shape_fn((rows, vocab.len()), |(_, j)| rng.random_range(0..vocab[j]))
}

fn random_points(rng: &mut impl Rng, rows: usize, dim: usize, shift: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, dim), |_| rng.random_range(-1.0..1.0) + shift)
}

fn frequencies(tokens: ArrayView2<u32>, field: usize, vocab: usize) -> Vec<f64> {
    let mut f = vec![0.0; vocab];
    for &t in tokens.column(field) {
        f[t as usize] += 1.0;
    }
    f.iter().map(|c| c / tokens.nrows() as f64).collect()
}

pub fn chi_squared() -> Check {
    let mut rng = seed::rng(1);
    let vocab = [4u32, 2, 7];
    for trial in 0..10 {
        let real = random_tokens(&mut rng, 150, &vocab);
        let synth = random_tokens(&mut rng, 80 + trial * 10, &vocab);
        for (f, &v) in vocab.iter().enumerate() {
            let r = frequencies(real.view(), f, v as usize);
            let s = frequencies(synth.view(), f, v as usize);
            let want: f64 = r
                .iter()
                .zip(&s)
                .filter(|(a, b)| *a + *b > 0.0)
                .map(|(a, b)| 0.5 * (a - b).powi(2) / (a + b))
                .sum();
            let got =
                chi_squared_per_field::<f64>(real.view(), synth.view(), f, v as usize).map_err(|e| e.to_string())?;
            close(&format!("χ² field {f}"), got, want, SUM_TOL)?;
        }
    }
    Ok(())
}

fn mi_oracle(tokens: ArrayView2<u32>, i: usize, j: usize) -> f64 {
    let n = tokens.nrows() as f64;
    let mut joint: HashMap<(u32, u32), f64> = HashMap::new();
    let mut pa: HashMap<u32, f64> = HashMap::new();
    let mut pb: HashMap<u32, f64> = HashMap::new();
    for row in tokens.rows() {
        *joint.entry((row[i], row[j])).or_default() += 1.0 / n;
        *pa.entry(row[i]).or_default() += 1.0 / n;
        *pb.entry(row[j]).or_default() += 1.0 / n;
    }
    let mut mi = 0.0;
    for (&a, &p_a) in &pa {
        for (&b, &p_b) in &pb {
            if let Some(&p_ab) = joint.get(&(a, b)) {
                mi += p_ab * (p_ab / (p_a * p_b)).ln();
            }
        }
    }
    mi
}

pub fn mutual_information() -> Check {
    let mut rng = seed::rng(2);
    for _ in 0..10 {
        let mut tokens = random_tokens(&mut rng, 200, &[3, 5, 2, 4]);
        // a deterministic dependence so off-diagonal MI is far from zero
        for i in 0..tokens.nrows() {
            tokens[[i, 3]] = (tokens[[i, 0]] + tokens[[i, 2]]) % 4;
        }
        let got = mutual_information_matrix::<f64>(tokens.view());
        for i in 0..4 {
            for j in 0..4 {
                close(
                    &format!("MI[{i},{j}]"),
                    got[[i, j]],
                    mi_oracle(tokens.view(), i, j),
                    SUM_TOL,
                )?;
            }
        }
    }
    Ok(())
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var + FID_SHRINKAGE)
}

/// Closed forms: 1-D Gaussians, and full-factorial grids whose sample
/// covariance is exactly diagonal.
pub fn frechet() -> Check {
    let mut rng = seed::rng(3);
    for _ in 0..10 {
        let a = random_points(&mut rng, 150, 1, 0.0);
        let b = random_points(&mut rng, 120, 1, 0.7).mapv(|v| v * 2.5);
        let (ma, va) = mean_var(a.as_slice().unwrap());
        let (mb, vb) = mean_var(b.as_slice().unwrap());
        let want = (ma - mb).powi(2) + va + vb - 2.0 * (va * vb).sqrt();
        let got = frechet_distance(a.view(), b.view()).map_err(|e| e.to_string())?;
        close("FID 1-D", got, want, EIGEN_TOL)?;
    }
    let grid = |xs: &[f64], ys: &[f64]| {
        Array2::from_shape_fn((xs.len() * ys.len(), 2), |(r, c)| {
            if c == 0 {
                xs[r / ys.len()]
            } else {
                ys[r % ys.len()]
            }
        })
    };
    for _ in 0..10 {
        let xs: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ys: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..3.0)).collect();
        let us: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..5.0)).collect();
        let vs: Vec<f64> = (0..9).map(|_| rng.random_range(-3.0..0.0)).collect();
        let (a, b) = (grid(&xs, &ys), grid(&us, &vs));
        let mut want = 0.0;
        for c in 0..2 {
            let (ma, va) = mean_var(&a.column(c).to_vec());
            let (mb, vb) = mean_var(&b.column(c).to_vec());
            want += (ma - mb).powi(2) + (va.sqrt() - vb.sqrt()).powi(2);
        }
        let got = frechet_distance(a.view(), b.view()).map_err(|e| e.to_string())?;
        close("FID diagonal", got, want, EIGEN_TOL)?;
    }
    Ok(())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn kth_radius(points: ArrayView2<f64>, i: usize, k: usize) -> f64 {
    let p = points.row(i).to_vec();
    let mut d: Vec<f64> = (0..points.nrows())
        .filter(|&j| j != i)
        .map(|j| euclid(&points.row(j).to_vec(), &p))
        .collect();
    d.sort_by(f64::total_cmp);
    d[k - 1]
}

fn coverage(queries: ArrayView2<f64>, reference: ArrayView2<f64>, k: usize) -> f64 {
    let radii: Vec<f64> = (0..reference.nrows()).map(|i| kth_radius(reference, i, k)).collect();
    let hits = queries
        .rows()
        .into_iter()
        .filter(|q| {
            let q = q.to_vec();
            (0..reference.nrows()).any(|j| euclid(&reference.row(j).to_vec(), &q) <= radii[j])
        })
        .count();
    hits as f64 / queries.nrows() as f64
}

pub fn precision_recall() -> Check {
    let mut rng = seed::rng(4);
    for trial in 0..8 {
        let real = random_points(&mut rng, 120, 3, 0.0);
        let synth = random_points(&mut rng, 100, 3, 0.1 * trial as f64);
        for k in [1, 3, 5] {
            let (p, r) = knn_precision_recall(real.view(), synth.view(), k).map_err(|e| e.to_string())?;
            close(
                &format!("precision k={k}"),
                p,
                coverage(synth.view(), real.view(), k),
                0.0,
            )?;
            close(&format!("recall k={k}"), r, coverage(real.view(), synth.view(), k), 0.0)?;
        }
    }
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Per query: median of its k smallest reference distances; then mean and
/// median over queries.
fn privacy_oracle(dists: Vec<Vec<f64>>, k: usize) -> (f64, f64) {
    let mut per_query: Vec<f64> = dists
        .into_iter()
        .map(|mut d| {
            d.sort_by(f64::total_cmp);
            median(&d[..k])
        })
        .collect();
    let mean = per_query.iter().sum::<f64>() / per_query.len() as f64;
    per_query.sort_by(f64::total_cmp);
    (mean, median(&per_query))
}

pub fn privacy_distances() -> Check {
    let mut rng = seed::rng(5);
    let cfg = KnnConfig::default();
    for _ in 0..5 {
        let real = random_tokens(&mut rng, 150, &[3, 4, 2, 5, 3]);
        let synth = random_tokens(&mut rng, 90, &[3, 4, 2, 5, 3]);
        let stats = knn_distance_stats::<_, _, f64>(real.view(), synth.view(), &PRIVACY_KS, &Hamming, &cfg)
            .map_err(|e| e.to_string())?;
        let dists: Vec<Vec<f64>> = synth
            .rows()
            .into_iter()
            .map(|q| {
                real.rows()
                    .into_iter()
                    .map(|r| r.iter().zip(q.iter()).filter(|(a, b)| a != b).count() as f64)
                    .collect()
            })
            .collect();
        for s in &stats {
            let (mean, med) = privacy_oracle(dists.clone(), s.k);
            close(&format!("Hamming k={} mean", s.k), s.mean, mean, SUM_TOL)?;
            close(&format!("Hamming k={} median", s.k), s.median, med, 0.0)?;
        }

        let real = random_points(&mut rng, 140, 4, 0.0);
        let synth = random_points(&mut rng, 70, 4, 0.3);
        let stats = knn_distance_stats::<_, _, f64>(real.view(), synth.view(), &PRIVACY_KS, &Euclidean, &cfg)
            .map_err(|e| e.to_string())?;
        let dists: Vec<Vec<f64>> = synth
            .rows()
            .into_iter()
            .map(|q| {
                let q = q.to_vec();
                real.rows().into_iter().map(|r| euclid(&r.to_vec(), &q)).collect()
            })
            .collect();
        for s in &stats {
            let (mean, med) = privacy_oracle(dists.clone(), s.k);
            close(&format!("Euclidean k={} mean", s.k), s.mean, mean, SUM_TOL)?;
            close(&format!("Euclidean k={} median", s.k), s.median, med, SUM_TOL)?;
        }
    }
    Ok(())
}

fn group_rates(p: &[u8], t: &[u8], g: &[bool], group: bool) -> (f64, f64) {
    let rows = || (0..t.len()).filter(move |&i| g[i] == group);
    let pos = rows().filter(|&i| t[i] == 1).count() as f64;
    let neg = rows().filter(|&i| t[i] == 0).count() as f64;
    let tp = rows().filter(|&i| t[i] == 1 && p[i] == 1).count() as f64;
    let fp = rows().filter(|&i| t[i] == 0 && p[i] == 1).count() as f64;
    (tp / pos, fp / neg)
}

pub fn fairness() -> Check {
    let mut rng = seed::rng(6);
    for _ in 0..20 {
        let n = 200;
        let t: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let p: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let g: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        let (tpr_p, fpr_p) = group_rates(&p, &t, &g, true);
        let (tpr_u, fpr_u) = group_rates(&p, &t, &g, false);
        let got = fairness_metrics(&PredictionSet::new(p, t, g).unwrap()).map_err(|e| e.to_string())?;
        close("EOD", got.eod, (tpr_p - tpr_u).abs(), SUM_TOL)?;
        close(
            "AOD",
            got.aod,
            (0.5 * ((tpr_p - tpr_u) + (fpr_p - fpr_u))).abs(),
            SUM_TOL,
        )?;
        close(
            "EqOdds",
            got.eq_odds,
            (tpr_p - tpr_u).abs().max((fpr_p - fpr_u).abs()),
            SUM_TOL,
        )?;
    }
    Ok(())
}

/// Exhaustive KKT characterization: the projection is `max(y − θ, 0)` for
/// the unique support `S` with `θ = (Σ_S y − 1)/|S|`, `y_i > θ` on `S` and
/// `y_i ≤ θ` off it.
pub fn simplex_oracle(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    for mask in 1u32..(1 << n) {
        let inside: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let theta = (inside.iter().map(|&i| y[i]).sum::<f64>() - 1.0) / inside.len() as f64;
        let ok = (0..n).all(|i| {
            if mask & (1 << i) != 0 {
                y[i] > theta
            } else {
                y[i] <= theta
            }
        });
        if ok {
            return y.iter().map(|v| (v - theta).max(0.0)).collect();
        }
    }
    unreachable!("every vector has a KKT support")
}

pub fn simplex() -> Check {
    let mut rng = seed::rng(7);
    for _ in 0..300 {
        let n = rng.random_range(1..=10);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let got = project_to_simplex(&y);
        for (g, w) in got.iter().zip(simplex_oracle(&y)) {
            close("simplex coordinate", *g, w, SUM_TOL)?;
        }
    }
    Ok(())
}

/// Fixed logistic scorer over the featurized row.
struct Linear {
    w: Vec<f64>,
    b: f64,
}

impl Classifier<f64> for Linear {
    fn predict_proba(&self, x: ArrayView2<f64>) -> Vec<f64> {
        x.rows()
            .into_iter()
            .map(|r| {
                let z: f64 = r.iter().zip(&self.w).map(|(a, b)| a * b).sum::<f64>() + self.b;
                1.0 / (1.0 + (-z).exp())
            })
            .collect()
    }
}

fn bce(p: f64, label: u8) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

fn cosine(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        0.0
    } else {
        dot / (nx * ny)
    }
}

#[allow(clippy::too_many_arguments)]
fn attack_oracle(
    clf: &Linear,
    row: &[u32],
    label: u8,
    fz: &TokenFeaturizer<f64>,
    emb: &TokenEmbeddings,
    quantizer: &Quantizer,
    cfg: &AttackConfig,
    order_seed: u64,
) -> Vec<u32> {
    let loss_of = |tokens: &[u32]| {
        let t = Array2::from_shape_vec((1, tokens.len()), tokens.to_vec()).unwrap();
        bce(clf.predict_proba(fz.featurize(t.view()).view())[0], label)
    };
    let mut fields = fz.attackable_fields();
    let budget = (cfg.budget * fields.len() as f64 + 1e-9).floor() as usize;
    fields.shuffle(&mut seed::rng(order_seed));
    let mut cur = row.to_vec();
    let mut loss = loss_of(&cur);
    let mut subs = 0;
    for f in fields {
        if subs >= budget {
            break;
        }
        let unseen = quantizer.fields[f].quantizer.unseen_token();
        let vecs = &emb.vectors[f];
        let mut cands: Vec<(f64, u32)> = (0..vecs.len() as u32)
            .filter(|&t| t != cur[f] && Some(t) != unseen)
            .map(|t| (cosine(&vecs[cur[f] as usize], &vecs[t as usize]), t))
            .collect();
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(f64, u32)> = None;
        for &(_, c) in cands.iter().take(cfg.candidates) {
            let mut trial = cur.clone();
            trial[f] = c;
            let l = loss_of(&trial);
            if best.is_none_or(|(bl, _)| l > bl) {
                best = Some((l, c));
            }
        }
        if let Some((l, c)) = best {
            if l > loss {
                cur[f] = c;
                loss = l;
                subs += 1;
            }
        }
    }
    cur
}

pub fn greedy_attack() -> Check {
    let data = demo_population(200, 8).map_err(|e| e.to_string())?;
    let quantizer = Quantizer::fit(&data, 10).map_err(|e| e.to_string())?;
    let embedder = fit_embedder(&data).map_err(|e| e.to_string())?;
    let fz = TokenFeaturizer::<f64>::new(&quantizer, &embedder).map_err(|e| e.to_string())?;
    let tokens = quantizer.quantize(&data);
    let emb = TokenEmbeddings::fit(&quantizer, tokens.view());
    let mut rng = seed::rng(9);
    let mut changed = 0;
    let labels: Vec<u8> = (0..tokens.nrows()).map(|_| rng.random_range(0..2)).collect();
    for (trial, budget) in [0.2, 0.3, 0.5, 1.0].into_iter().enumerate() {
        let clf = Linear {
            w: (0..fz.dim()).map(|_| rng.random_range(-1.5..1.5)).collect(),
            b: rng.random_range(-0.5..0.5),
        };
        let cfg = AttackConfig {
            candidates: 3 + trial,
            budget,
            seed: 100 + trial as u64,
        };
        let got = attack_all(&clf, tokens.view(), &labels, &fz, &emb, &cfg);
        for (i, &label) in labels.iter().enumerate() {
            let order_seed = seed::derive(cfg.seed, &[seed::tag("attack"), i as u64]);
            let want = attack_oracle(
                &clf,
                &tokens.row(i).to_vec(),
                label,
                &fz,
                &emb,
                &quantizer,
                &cfg,
                order_seed,
            );
            changed += usize::from(want != tokens.row(i).to_vec());
            if got.row(i).to_vec() != want {
                return Err(format!(
                    "attack row {i} (budget {budget}): got {:?}, oracle {want:?}",
                    got.row(i)
                ));
            }
        }
    }
    if changed == 0 {
        return Err("no row was ever substituted, so the comparison is vacuous".into());
    }
    Ok(())
}

/// Every oracle check with its name.
pub fn all() -> Vec<NamedCheck> {
    vec![
        ("chi-squared", chi_squared as fn() -> Check),
        ("mutual information matrix", mutual_information),
        ("Fréchet distance", frechet),
        ("kNN precision/recall", precision_recall),
        ("kNN privacy distances", privacy_distances),
        ("fairness gaps", fairness),
        ("simplex projection", simplex),
        ("greedy substitution attack", greedy_attack),
    ]
}
