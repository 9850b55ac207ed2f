use vlab_core::algebra::{make_algebra, Kind};
use vlab_core::field::gf_make;
use std::collections::BTreeSet;

fn main() {
    let f = gf_make(3).unwrap();
    for kind in [Kind::Ternions, Kind::Hpp, Kind::Sextonions] {
        let alg = make_algebra(kind.clone(), &f).unwrap();
        let nulls: Vec<Vec<u8>> = (0..alg.element_count())
            .map(|i| alg.elem_from_index(i))
            .filter(|e| alg.norm(e) == 0)
            .collect();
        let zero = alg.zero();
        let mut classes: BTreeSet<Vec<u8>> = BTreeSet::new();
        let mut pairs = 0usize;
        for u in &nulls {
            for v in &nulls {
                if u == &zero && v == &zero { continue; }
                if alg.mul_unchecked(u, v).iter().any(|&c| c != 0) { continue; }
                pairs += 1;
                let mut tail: Vec<u8> = v.iter().chain(u.iter()).copied().collect();
                let lead = *tail.iter().find(|&&c| c != 0).unwrap();
                if lead != 1 {
                    let s = f.inv(lead).unwrap();
                    for c in tail.iter_mut() { *c = f.mul(*c, s); }
                }
                classes.insert(tail);
            }
        }
        println!("{kind}: nulls={} pairs(D)={} classes(PD)={}", nulls.len(), pairs, classes.len());
    }
}
