use vlab_core::dual::build_hds;
use vlab_core::field::gf_make;
fn main() {
    let f = gf_make(3).unwrap();
    let t = std::time::Instant::now();
    let m = build_hds(2, 2, &f).unwrap();
    println!("hds22: N={} X={} Z={} xi={} theta={} params={:?} ({:?})", m.n(), m.x.len(), m.z.len(), m.xi.len(), m.theta.len(), m.params, t.elapsed());
}
