//! Brute-force helpers shared by unit tests.

/// All permutations of `0..n` by plain recursive insertion (order unspecified).
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
}

pub fn gaussian_points(d: usize, n: usize, rng: &mut crate::rng::Rng) -> crate::PointSet {
    use rand_distr::{Distribution, StandardNormal};
    crate::PointSet::from_matrix(nalgebra::DMatrix::from_fn(d, n, |_, _| {
        StandardNormal.sample(rng)
    }))
    .unwrap()
}
