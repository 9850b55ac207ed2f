//! Hot-path benchmarks: packed-point membership, the Veronese map, line
//! singularity tests and the closure of a small image.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use vlab_core::algebra::{make_algebra, Kind};
use vlab_core::field::gf_make;
use vlab_core::geom::{self, PointSet};
use vlab_core::veronese::{closure_of_veronese_image, rho};

fn membership(c: &mut Criterion) {
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let pts: Vec<u128> = (0..500_000u64).map(|_| rng.gen::<u128>() >> 16).collect();
    let set = PointSet::from_vec(pts.clone());
    let probes: Vec<u128> = pts.iter().step_by(37).copied().collect();
    c.bench_function("pointset_contains_500k", |b| {
        b.iter(|| {
            let mut hits = 0usize;
            for &p in &probes {
                if set.contains(black_box(p)) {
                    hits += 1;
                }
            }
            hits
        })
    });
}

fn veronese_map(c: &mut Criterion) {
    let f = gf_make(3).unwrap();
    let alg = make_algebra(Kind::Sextonions, &f).unwrap();
    let b1 = alg.elem_from_index(123);
    let c1 = alg.elem_from_index(456);
    c.bench_function("rho_sextonions", |b| {
        b.iter(|| rho(&alg, black_box(&b1), black_box(&c1)).unwrap())
    });
}

fn singular_line(c: &mut Criterion) {
    let f = gf_make(3).unwrap();
    let alg = make_algebra(Kind::Ternions, &f).unwrap();
    let out = closure_of_veronese_image(&alg).unwrap();
    let pts: Vec<u128> = out.points.iter().collect();
    let set = out.points.clone();
    c.bench_function("singular_line_ternions", |b| {
        b.iter(|| {
            let mut n = 0usize;
            for i in (0..1000).step_by(7) {
                if geom::is_singular_line(&f, 12, pts[i], pts[i + 13], |t| set.contains(t)) {
                    n += 1;
                }
            }
            n
        })
    });
}

fn closure(c: &mut Criterion) {
    let f = gf_make(3).unwrap();
    let alg = make_algebra(Kind::Ternions, &f).unwrap();
    c.bench_function("closure_ternions", |b| {
        b.iter(|| closure_of_veronese_image(black_box(&alg)).unwrap().points.len())
    });
}

criterion_group!(benches, membership, veronese_map, singular_line, closure);
criterion_main!(benches);
