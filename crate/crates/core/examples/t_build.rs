use vlab_core::algebra::Kind;
use vlab_core::field::gf_make;
use vlab_core::veronese::build_v2;
use vlab_core::model::Params;

fn main() {
    let f = gf_make(3).unwrap();
    let t0 = std::time::Instant::now();
    let m = build_v2(Kind::Ternions, &f).unwrap();
    println!("ternions: N={} X={} Z={} xi={} theta={} params={:?} iters={:?} in {:?}",
        m.n(), m.x.len(), m.z.len(), m.xi.len(), m.theta.len(), m.params,
        m.provenance.closure_effective_iterations, t0.elapsed());
    assert_eq!(m.n(), 11);
    assert_eq!(m.params, Params::Duo { r: 1, v: 0, rp: 2, vp: -1 });
}
