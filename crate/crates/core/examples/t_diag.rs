use vlab_core::algebra::Kind;
use vlab_core::field::gf_make;
use vlab_core::veronese::build_v2;
use vlab_core::check::{self, CheckMode, SympIndex};

fn main() {
    let f = gf_make(3).unwrap();
    let m = build_v2(Kind::Ternions, &f).unwrap();
    // degree of a few points
    let all = m.all.as_slice();
    let x0 = m.x.as_slice()[0];
    let deg = all.iter().filter(|&&s| s != x0 && m.is_singular_line(x0, s)).count();
    println!("deg(x0) = {deg} of {}", all.len() - 1);
    // xi shapes & sizes
    let s = &m.xi[0];
    println!("xi[0]: shape={:?} pts={} xy={}", s.shape, s.point_count, s.xy_count);
    let s = &m.theta[0];
    println!("theta[0]: shape={:?} pts={} xy={}", s.shape, s.point_count, s.xy_count);
    // S1 exhaustive
    let idx = SympIndex::build(&m);
    let r1 = check::check_s1(&m, &idx, CheckMode::Exhaustive);
    println!("S1: checked={} verdict={} failures={}", r1.checked, r1.verdict, r1.failures.len());
    if !r1.failures.is_empty() {
        println!("first failures: {:?}", &r1.failures[..r1.failures.len().min(3)]);
    }
}
