//! Checks over the shipped image corpus.

use std::collections::BTreeMap;
use std::path::PathBuf;

use lowrank::bench::BenchRecord;
use lowrank::image::{
    compare_methods, decode_pgm, encode_pgm, read_pgm, reconstruct_image, synth, write_pgm, GrayImage, Sweep,
};
use lowrank::Algorithm;

type Check = Result<(), String>;

pub const NAMES: [&str; 3] = ["blobs", "house", "clouds"];

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(format!("{name}.pgm"))
}

pub fn corpus() -> Vec<(&'static str, GrayImage)> {
    NAMES.into_iter().map(|n| (n, read_pgm(data(n)).unwrap())).collect()
}

/// Decoding, re-encoding and a disk round trip reproduce every file byte for byte.
pub fn round_trip() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, img) in corpus() {
        let bytes = std::fs::read(data(name)).unwrap();
        let copy = dir.path().join("copy.pgm");
        write_pgm(&img, &copy).unwrap();
        if encode_pgm(&img) != bytes || std::fs::read(&copy).unwrap() != bytes || decode_pgm(&bytes).unwrap() != img {
            return Err(format!("{name} does not round-trip"));
        }
    }
    Ok(())
}

pub fn constant_is_rank_one() -> Check {
    let img = synth::constant(256, 256, 200);
    let (out, report) = reconstruct_image(&img, 1e-3, 0, 1).unwrap();
    if report.selected_d != 1 || out != img {
        return Err(format!(
            "selected d {}, identical output {}",
            report.selected_d,
            out == img
        ));
    }
    Ok(())
}

type Curves = BTreeMap<(&'static str, usize), Vec<(usize, f64)>>;

/// (method, tau) -> [(d, rel_err)] over the swept grid.
fn curves(records: &[BenchRecord], sweep: &Sweep) -> Curves {
    let grid = sweep.values();
    let mut out: Curves = BTreeMap::new();
    for rec in records.iter().filter(|r| r.d.is_some_and(|d| grid.contains(&d))) {
        out.entry((rec.algorithm.name(), rec.tau))
            .or_default()
            .push((rec.d.unwrap(), rec.rel_err.unwrap()));
    }
    for v in out.values_mut() {
        v.sort_by_key(|p| p.0);
        v.dedup_by_key(|p| p.0);
    }
    out
}

/// Per method, RelErr is non-increasing along a `d` sweep and in `tau`.
pub fn monotone_in_d_and_tau() -> Check {
    let sweep: Sweep = "8:64:8".parse().unwrap();
    let taus = [0, 1, 2];
    let mut violations = Vec::new();
    for (name, img) in corpus() {
        let recs = compare_methods(&img, 1e-3, &taus, 1, Some(sweep)).unwrap();
        if let Some(bad) = recs.iter().find(|r| !r.is_ok()) {
            return Err(format!("{name}: {bad:?}"));
        }
        let c = curves(&recs, &sweep);
        for ((alg, tau), pts) in &c {
            for w in pts.windows(2) {
                if w[1].1 > w[0].1 + 1e-10 {
                    violations.push(format!(
                        "{name} {alg} tau {tau}: d {} -> {}: {:e} -> {:e}",
                        w[0].0, w[1].0, w[0].1, w[1].1
                    ));
                }
            }
            if *tau > 0 {
                for (p, q) in c[&(*alg, tau - 1)].iter().zip(pts) {
                    if q.1 > p.1 + 1e-10 {
                        violations.push(format!(
                            "{name} {alg} d {}: tau {} -> {tau}: {:e} -> {:e}",
                            p.0,
                            tau - 1,
                            p.1,
                            q.1
                        ));
                    }
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations.join("; "))
    }
}

/// At the adaptively selected `d` and a fixed `tau`, the six methods'
/// errors lie within a factor of 3. The truncated-SVD row is a reference,
/// not one of the compared methods.
pub fn parity_factor_three() -> Check {
    let mut spread = Vec::new();
    for (name, img) in corpus() {
        for tau in [0, 2] {
            let recs = compare_methods(&img, 1e-3, &[tau], 1, None).unwrap();
            let errs: Vec<(&str, f64)> = recs
                .iter()
                .filter(|r| r.algorithm != Algorithm::ReferenceSvd)
                .map(|r| (r.algorithm.name(), r.rel_err.unwrap()))
                .collect();
            let lo = errs.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            let hi = errs.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            if hi.1 > 3.0 * lo.1 {
                spread.push(format!(
                    "{name} tau {tau}: {} {:.3e} vs {} {:.3e} (x{:.2})",
                    hi.0,
                    hi.1,
                    lo.0,
                    lo.1,
                    hi.1 / lo.1
                ));
            }
        }
    }
    if spread.is_empty() {
        Ok(())
    } else {
        Err(spread.join("; "))
    }
}

/// Selected `d` at `eps = 1e-3` stays within 10% of its median over 20 seeds.
pub fn seed_stability() -> Check {
    let mut unstable = Vec::new();
    for (name, img) in corpus() {
        let ds: Vec<usize> = (1..=20)
            .map(|seed| reconstruct_image(&img, 1e-3, 0, seed).unwrap().1.selected_d)
            .collect();
        let mut sorted = ds.clone();
        sorted.sort_unstable();
        let median = sorted[10] as f64;
        if ds.iter().any(|&d| (d as f64 - median).abs() > 0.1 * median) {
            unstable.push(format!("{name} {ds:?}"));
        }
    }
    if unstable.is_empty() {
        Ok(())
    } else {
        Err(unstable.join("; "))
    }
}
