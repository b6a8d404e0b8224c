mod common;

use common::images;
use lowrank::bench::{reference_svd, rel_err};
use lowrank::image::{decode_pgm, encode_pgm, reconstruct_image, synth};

#[test]
fn shipped_files_round_trip_byte_exact() {
    images::round_trip().unwrap();
}

#[test]
fn shipped_files_match_their_generators() {
    for ((name, shipped), (gen_name, generated)) in images::corpus().into_iter().zip(synth::corpus()) {
        assert_eq!(name, gen_name);
        assert_eq!(shipped, generated, "{name}");
    }
}

#[test]
fn seeded_images_round_trip() {
    for seed in 1..=5 {
        for img in [
            synth::blobs(37, 23, seed),
            synth::value_noise(64, 17, seed),
            synth::low_rank_integer(20, 30, 3, seed),
        ] {
            assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        }
    }
}

#[test]
fn constant_image_is_rank_one() {
    images::constant_is_rank_one().unwrap();
}

#[test]
fn more_power_iterations_sharpen_the_reconstruction() {
    for (name, img) in images::corpus() {
        let (_, r0) = reconstruct_image(&img, 1e-3, 0, 1).unwrap();
        let (_, r2) = reconstruct_image(&img, 1e-3, 2, 1).unwrap();
        assert_eq!(r0.selected_d, r2.selected_d);
        assert!(r2.rel_err <= r0.rel_err, "{name}: {} > {}", r2.rel_err, r0.rel_err);
    }
}

#[test]
fn full_rank_reference_is_exact() {
    let a = images::corpus()[1].1.to_matrix();
    let e = rel_err(&a, &reference_svd(&a, 256).unwrap()).unwrap();
    assert!(e <= 1e-12, "{e:e}");
}

#[test]
fn errors_are_monotone_in_d_and_tau() {
    images::monotone_in_d_and_tau().unwrap();
}

#[test]
fn methods_agree_within_factor_three_at_fixed_d() {
    images::parity_factor_three().unwrap();
}

#[test]
fn selected_d_is_stable_across_seeds() {
    images::seed_stability().unwrap();
}
