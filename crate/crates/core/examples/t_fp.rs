use vlab_core::algebra::Kind;
use vlab_core::dual::{build_hds, grassmann};
use vlab_core::field::gf_make;
use vlab_core::fingerprint::{compare, fingerprint};
use vlab_core::veronese::build_v2;

fn main() {
    let f = gf_make(3).unwrap();
    let t = std::time::Instant::now();
    let hds = build_hds(2, 2, &f).unwrap();
    let v2t = build_v2(Kind::Ternions, &f).unwrap();
    println!("built both ({:?})", t.elapsed());
    let t = std::time::Instant::now();
    let fp1 = fingerprint(&hds).unwrap();
    let fp2 = fingerprint(&v2t).unwrap();
    let (eq, diffs) = compare(&fp1, &fp2);
    println!("hds22 vs v2:ternions equal={eq} diffs={diffs:?} ({:?})", t.elapsed());
    println!("fp: {:?}", fp1);
    let t = std::time::Instant::now();
    let g6 = grassmann(6, &f).unwrap();
    println!("grassmann6: N={} X={} xi={} params={:?} ({:?})", g6.n(), g6.x.len(), g6.xi.len(), g6.params, t.elapsed());
}
