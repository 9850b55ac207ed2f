use vlab_core::dual::{build_ds, build_hds, grassmann, segre, segre_families};
use vlab_core::field::gf_make;
use vlab_core::fingerprint::{compare, fingerprint};
use vlab_core::veronese::build_v2;
use vlab_core::algebra::Kind;

fn main() {
    let f = gf_make(3).unwrap();
    let t = std::time::Instant::now();
    let s22 = segre(2, 2, &f).unwrap();
    println!("segre22: N={} X={} xi={} params={:?} ({:?})", s22.n(), s22.x.len(), s22.xi.len(), s22.params, t.elapsed());
    let (fa, fb) = segre_families(2, 2, &f);
    println!("families: {} and {}", fa.len(), fb.len());
    let t = std::time::Instant::now();
    let s12 = segre(1, 2, &f).unwrap();
    println!("segre12: N={} X={} ({:?})", s12.n(), s12.x.len(), t.elapsed());
    let t = std::time::Instant::now();
    let hds = build_hds(2, 2, &f).unwrap();
    println!("hds22: N={} X={} Z={} xi={} theta={} params={:?} ({:?})", hds.n(), hds.x.len(), hds.z.len(), hds.xi.len(), hds.theta.len(), hds.params, t.elapsed());
    let t = std::time::Instant::now();
    let v2t = build_v2(Kind::Ternions, &f).unwrap();
    println!("v2tern ({:?})", t.elapsed());
    let t = std::time::Instant::now();
    let fp_hds = fingerprint(&hds).unwrap();
    let fp_v2t = fingerprint(&v2t).unwrap();
    let (eq, diffs) = compare(&fp_hds, &fp_v2t);
    println!("hds22 vs v2:ternions fingerprint equal = {eq} {:?} ({:?})", diffs, t.elapsed());
    let t = std::time::Instant::now();
    let ds = build_ds(2, 2, &f).unwrap();
    println!("ds22: N={} X={} Z={} xi={} theta={} params={:?} ({:?})", ds.n(), ds.x.len(), ds.z.len(), ds.xi.len(), ds.theta.len(), ds.params, t.elapsed());
    let t = std::time::Instant::now();
    let g6 = grassmann(6, &f).unwrap();
    println!("grassmann6: N={} X={} xi={} params={:?} ({:?})", g6.n(), g6.x.len(), g6.xi.len(), g6.params, t.elapsed());
}
