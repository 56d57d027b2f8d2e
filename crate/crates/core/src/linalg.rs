//! Row-span linear algebra over the chain ring `Z/p^m`.
//!
//! Spans are put in Howell form: echelon rows whose pivots are powers of
//! `p`, entries above a pivot `p^v` reduced to `[0, p^v)`, and for every
//! pivot row of valuation `v > 0` the row `p^{m-v}·row` folded back into the
//! remaining rows. The last step makes the form unique per span and lets
//! membership be decided by a single reduction pass.

use num_integer::Integer;

/// The ring `Z/p^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChainRing {
    p: u64,
    m: u32,
    q: u64,
}

impl ChainRing {
    pub fn new(p: u64, m: u32) -> Self {
        Self { p, m, q: p.pow(m) }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `v_p(x)`, with `v_p(0) = m`.
    pub fn valuation(&self, mut x: u64) -> u32 {
        x %= self.q;
        if x == 0 {
            return self.m;
        }
        let mut v = 0;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit of `Z/p^m`.
    pub fn unit_inverse(&self, u: u64) -> u64 {
        let g = (u as i128).extended_gcd(&(self.q as i128));
        debug_assert_eq!(g.gcd, 1, "{u} is not a unit mod {}", self.q);
        g.x.rem_euclid(self.q as i128) as u64
    }

    fn axpy(&self, target: &mut [u64], f: u64, source: &[u64]) {
        // target -= f * source
        if f == 0 {
            return;
        }
        for (t, &s) in target.iter_mut().zip(source) {
            if s != 0 {
                *t = (*t + self.q - f * s % self.q) % self.q;
            }
        }
    }

    fn scale(&self, row: &mut [u64], f: u64) {
        for x in row.iter_mut() {
            *x = *x * f % self.q;
        }
    }
}

/// A dense matrix of residues mod `p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMatrix {
    ring: ChainRing,
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl ResidueMatrix {
    pub fn new(ring: ChainRing, cols: usize, rows: Vec<Vec<i128>>) -> Self {
        let q = ring.q as i128;
        let rows = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "row length must equal the column count");
                r.into_iter().map(|x| x.rem_euclid(q) as u64).collect()
            })
            .collect();
        Self { ring, cols, rows }
    }

    pub fn from_residues(ring: ChainRing, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        Self::new(ring, cols, rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect())
    }

    pub fn ring(&self) -> ChainRing {
        self.ring
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }
}

/// Canonical (Howell) form of the row span; zero rows are dropped so equal
/// spans give identical matrices.
pub fn canonical_form(matrix: &ResidueMatrix) -> ResidueMatrix {
    let e = Echelon::new(matrix.ring, matrix.cols, &matrix.rows);
    ResidueMatrix { ring: matrix.ring, cols: matrix.cols, rows: e.rows }
}

/// Howell form of a row span, optionally remembering how each row was
/// obtained from the input rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    ring: ChainRing,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<(usize, u32)>,
    transforms: Option<Vec<Vec<u64>>>,
}

impl Echelon {
    pub fn new(ring: ChainRing, cols: usize, input: &[Vec<u64>]) -> Self {
        Self::build(ring, cols, input, false)
    }

    /// Like [`Echelon::new`], additionally tracking transforms so that
    /// [`Echelon::solve`] can express vectors in terms of the input rows.
    pub fn with_transform(ring: ChainRing, cols: usize, input: &[Vec<u64>]) -> Self {
        Self::build(ring, cols, input, true)
    }

    fn build(ring: ChainRing, cols: usize, input: &[Vec<u64>], track: bool) -> Self {
        let q = ring.q;
        let width = if track { input.len() } else { 0 };
        let mut pending: Vec<(Vec<u64>, Vec<u64>)> = input
            .iter()
            .enumerate()
            .map(|(idx, r)| {
                debug_assert_eq!(r.len(), cols);
                let mut t: Vec<u64> = vec![0; width];
                if track {
                    t[idx] = 1;
                }
                (r.iter().map(|x| x % q).collect::<Vec<u64>>(), t)
            })
            .filter(|(r, _)| r.iter().any(|&x| x != 0))
            .collect();
        let mut rows = Vec::new();
        let mut trans = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..cols {
            let best = pending
                .iter()
                .enumerate()
                .filter(|(_, (r, _))| r[c] != 0)
                .min_by_key(|(_, (r, _))| ring.valuation(r[c]))
                .map(|(idx, _)| idx);
            let Some(best) = best else { continue };
            let (mut row, mut t) = pending.remove(best);
            let v = ring.valuation(row[c]);
            let pv = ring.p.pow(v);
            let inv = ring.unit_inverse(row[c] / pv);
            ring.scale(&mut row, inv);
            ring.scale(&mut t, inv);
            for (r, tr) in pending.iter_mut() {
                let f = r[c] / pv;
                ring.axpy(r, f, &row);
                ring.axpy(tr, f, &t);
            }
            if v > 0 {
                let f = ring.p.pow(ring.m - v);
                let mut extra = row.clone();
                let mut extra_t = t.clone();
                ring.scale(&mut extra, f);
                ring.scale(&mut extra_t, f);
                pending.push((extra, extra_t));
            }
            pending.retain(|(r, _)| r.iter().any(|&x| x != 0));
            rows.push(row);
            trans.push(t);
            pivots.push((c, v));
        }
        for t in 0..rows.len() {
            let (c, v) = pivots[t];
            let pv = ring.p.pow(v);
            let (head, tail) = rows.split_at_mut(t);
            let (thead, ttail) = trans.split_at_mut(t);
            for (s, row) in head.iter_mut().enumerate() {
                let f = row[c] / pv;
                ring.axpy(row, f, &tail[0]);
                ring.axpy(&mut thead[s], f, &ttail[0]);
            }
        }
        Self { ring, cols, rows, pivots, transforms: track.then_some(trans) }
    }

    pub fn ring(&self) -> ChainRing {
        self.ring
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// `(column, valuation)` of each pivot.
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    /// `log_p` of the number of elements of the span.
    pub fn log_size(&self) -> u32 {
        self.pivots.iter().map(|&(_, v)| self.ring.m - v).sum()
    }

    /// Canonical remainder of `v` modulo the span, with the multipliers of
    /// the Howell rows used.
    fn reduce_with(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let mut rem: Vec<u64> = v.iter().map(|x| x % self.ring.q).collect();
        let mut used = vec![0; self.rows.len()];
        for (idx, (&(c, val), row)) in self.pivots.iter().zip(&self.rows).enumerate() {
            let f = rem[c] / self.ring.p.pow(val);
            self.ring.axpy(&mut rem, f, row);
            used[idx] = f;
        }
        (rem, used)
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        self.reduce_with(v).0
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coefficients `x` over the input rows with `x·input = v`, if `v` lies
    /// in the span. Requires [`Echelon::with_transform`].
    pub fn solve(&self, v: &[u64]) -> Option<Vec<u64>> {
        let trans = self.transforms.as_ref().expect("echelon built without transforms");
        let (rem, used) = self.reduce_with(v);
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        let width = trans.first().map_or(0, Vec::len);
        let q = self.ring.q;
        let mut x = vec![0; width];
        for (f, t) in used.iter().zip(trans) {
            for (xi, &ti) in x.iter_mut().zip(t) {
                *xi = (*xi + f * ti) % q;
            }
        }
        Some(x)
    }

    /// Whether two echelons describe the same span.
    pub fn same_span(&self, other: &Self) -> bool {
        self.cols == other.cols && self.rows == other.rows
    }
}

/// Generators of `{x : x·A = 0}` where `A` has the given rows.
pub fn left_kernel(ring: ChainRing, cols: usize, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let r = rows.len();
    let augmented: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(idx, row)| {
            let mut a = row.clone();
            a.extend((0..r).map(|k| u64::from(k == idx)));
            a
        })
        .collect();
    let e = Echelon::new(ring, cols + r, &augmented);
    e.rows
        .iter()
        .zip(&e.pivots)
        .filter(|(_, &(c, _))| c >= cols)
        .map(|(row, _)| row[cols..].to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn span(ring: ChainRing, rows: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
        let q = ring.modulus();
        let cols = 2;
        let mut out = BTreeSet::new();
        let count = q.pow(rows.len() as u32);
        for code in 0..count {
            let mut v = vec![0; cols];
            let mut c = code;
            for row in rows {
                let f = c % q;
                c /= q;
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = (*x + f * r) % q;
                }
            }
            out.insert(v);
        }
        out
    }

    fn all_2x2(ring: ChainRing) -> Vec<Vec<Vec<u64>>> {
        let q = ring.modulus();
        (0..q.pow(4))
            .map(|code| {
                let e: Vec<u64> = (0..4).map(|k| code / q.pow(k) % q).collect();
                vec![e[0..2].to_vec(), e[2..4].to_vec()]
            })
            .collect()
    }

    #[test]
    fn canonical_form_examples() {
        let z4 = ChainRing::new(2, 2);
        let id = ResidueMatrix::new(z4, 2, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(canonical_form(&id), id);
        let dup = ResidueMatrix::new(z4, 2, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(canonical_form(&dup).rows(), &[vec![1, 1]]);
        let tor = ResidueMatrix::new(z4, 2, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(canonical_form(&tor), tor);
    }

    #[test]
    fn howell_row_is_added_for_torsion() {
        let z4 = ChainRing::new(2, 2);
        let e = Echelon::new(z4, 2, &[vec![2, 1]]);
        assert_eq!(e.rows(), &[vec![2, 1], vec![0, 2]]);
        assert!(e.contains(&[0, 2]));
        assert_eq!(e.log_size(), 2);
    }

    #[test]
    fn exhaustive_2x2_spans() {
        for ring in [ChainRing::new(2, 2), ChainRing::new(3, 2)] {
            let mut by_span: std::collections::BTreeMap<BTreeSet<Vec<u64>>, Vec<Vec<u64>>> = Default::default();
            for m in all_2x2(ring) {
                let e = Echelon::new(ring, 2, &m);
                let s = span(ring, &m);
                assert_eq!(span(ring, e.rows()), s, "span changed for {m:?}");
                assert_eq!(ring.p().pow(e.log_size()), s.len() as u64);
                let again = Echelon::new(ring, 2, e.rows());
                assert_eq!(again.rows(), e.rows(), "not idempotent for {m:?}");
                let prev = by_span.entry(s.clone()).or_insert_with(|| e.rows().to_vec());
                assert_eq!(prev, e.rows(), "two forms for one span");
                for a in 0..ring.modulus() {
                    for b in 0..ring.modulus() {
                        assert_eq!(e.contains(&[a, b]), s.contains(&vec![a, b]));
                    }
                }
            }
        }
    }

    #[test]
    fn solve_recovers_combination() {
        let ring = ChainRing::new(3, 2);
        let input = vec![vec![3, 1], vec![6, 0], vec![1, 4]];
        let e = Echelon::with_transform(ring, 2, &input);
        for target in span(ring, &input) {
            let x = e.solve(&target).expect("member");
            let mut v = vec![0; 2];
            for (f, row) in x.iter().zip(&input) {
                for (a, &b) in v.iter_mut().zip(row) {
                    *a = (*a + f * b) % 9;
                }
            }
            assert_eq!(v, target);
        }
        assert!(Echelon::with_transform(ring, 2, &[vec![3, 0]]).solve(&[1, 0]).is_none());
    }

    #[test]
    fn kernel_matches_brute_force() {
        let ring = ChainRing::new(2, 2);
        for m in all_2x2(ring).into_iter().step_by(7) {
            let ker = left_kernel(ring, 2, &m);
            let brute: BTreeSet<Vec<u64>> = (0..16)
                .map(|c| vec![c % 4, c / 4])
                .filter(|x| (0..2).all(|j| (x[0] * m[0][j] + x[1] * m[1][j]) % 4 == 0))
                .collect();
            assert_eq!(span(ring, &ker), brute, "kernel of {m:?}");
        }
    }
}
