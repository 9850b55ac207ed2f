use vlab_core::dual::segre;
use vlab_core::field::gf_make;
fn main() {
    let f = gf_make(3).unwrap();
    let t = std::time::Instant::now();
    let s = segre(2, 2, &f).unwrap();
    println!("segre22: N={} X={} xi={} params={:?} ({:?})", s.n(), s.x.len(), s.xi.len(), s.params, t.elapsed());
}
