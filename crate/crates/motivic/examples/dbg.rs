use motivic::*;
use std::time::Instant;
fn main() {
    let alg = Algebra::new(2, BaseMode::Generic).unwrap();
    let max_d = 40i64;
    let mut monos: Vec<Monomial> = Vec::new();
    for (_, b) in alg.basis_bidegrees_up_to(max_d) { monos.extend(b.iter().cloned()); }
    let degs: Vec<i64> = monos.iter().map(|m| m.bidegree(2).d).collect();
    let mut pairs = Vec::new();
    for i in 0..monos.len() { for j in 0..monos.len() { if degs[i]+degs[j] <= max_d { pairs.push((i,j)); } } }
    println!("pairs: {}", pairs.len());

    // warm phi cache
    let t0 = Instant::now();
    for m in &monos { let _ = alg.dual_coproduct(&DualElement::monomial(m.clone(), alg.coeff_one())); }
    println!("phi cache warm: {:?}", t0.elapsed());

    // coassociativity
    let t0 = Instant::now();
    for m in monos.iter() { assert_eq!(alg.coassoc_left(m).num_terms(), alg.coassoc_right(m).num_terms()); }
    println!("coassoc-ish: {:?}", t0.elapsed());

    // multiplicativity only
    let t0 = Instant::now();
    let mut n = 0u64;
    for &(i,j) in &pairs {
        let prod = alg.dual_mul(&DualElement::monomial(monos[i].clone(), alg.coeff_one()),
                                &DualElement::monomial(monos[j].clone(), alg.coeff_one())).unwrap();
        let lhs = alg.dual_coproduct(&prod).unwrap();
        n += lhs.num_terms() as u64;
    }
    println!("phi(ab) side: {:?} ({n} terms total)", t0.elapsed());

    let t0 = Instant::now();
    let mut n2 = 0u64;
    for &(i,j) in &pairs {
        let ta = alg.dual_coproduct(&DualElement::monomial(monos[i].clone(), alg.coeff_one())).unwrap();
        let tb = alg.dual_coproduct(&DualElement::monomial(monos[j].clone(), alg.coeff_one())).unwrap();
        let rhs = alg.tensor_mul(&ta, &tb);
        n2 += rhs.num_terms() as u64;
    }
    println!("phi(a)phi(b) side: {:?} ({n2} terms)", t0.elapsed());
}
