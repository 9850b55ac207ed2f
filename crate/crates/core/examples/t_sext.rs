use vlab_core::algebra::{make_algebra, Kind};
use vlab_core::field::gf_make;
use vlab_core::veronese::{build_v2, closure_of_veronese_image};

fn main() {
    let f = gf_make(3).unwrap();
    let alg = make_algebra(Kind::Sextonions, &f).unwrap();
    let t = std::time::Instant::now();
    let c = closure_of_veronese_image(&alg).unwrap();
    println!("sextonion closure: {} points, {} effective iterations ({:?})",
        c.points.len(), c.effective_iterations, t.elapsed());
    let t = std::time::Instant::now();
    let m = build_v2(Kind::Sextonions, &f).unwrap();
    println!("v2:sextonions: N={} X={} Z={} xi={} theta={} params={:?} ({:?})",
        m.n(), m.x.len(), m.z.len(), m.xi.len(), m.theta.len(), m.params, t.elapsed());
}
