//! Brute-force oracle: Ext of a tensor algebra through the two-sided bar
//! resolution `P = A ⊗ T(sĀ)`, compared with the library's small closure.
//!
//! Everything here is independent of the library except the final
//! comparison: words, the bar differential, the Hom complex and the dense
//! elimination are rebuilt from scratch. Natural (homological) degrees are
//! used throughout; `k` is the cohomological Hom degree, so `f ∈ Hom^k`
//! sends bar degree `n` to `A_{n−k}`.
//!
//! `Hom_A(P, A)` is a product over bar degrees. Restricting to bar degree
//! `≤ L` gives a tower of quotient complexes; `Ext^k` is read off as the
//! image of `H^k(≤ L2) → H^k(≤ L1)`, which must be the same for two choices of
//! `(L1, L2)` before the test trusts it.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use gorext::ext::{ext_groups, ExtOptions, Window};
use gorext::parse::parse_model;

type Word = Vec<u8>;
type Bar = Vec<Word>;

/// Integer-coefficient tensor presentation.
pub struct Tensor {
    pub degrees: Vec<i32>,
    pub d: Vec<Vec<(i64, Word)>>,
    pub p: u64,
}

pub struct Oracle {
    t: Tensor,
    /// `words[n]`: basis of `A_n`.
    words: Vec<Vec<Word>>,
    word_index: Vec<HashMap<Word, usize>>,
    /// `bars[n]`: basis of the bar construction in degree `n`.
    bars: Vec<Vec<Bar>>,
    bar_index: Vec<HashMap<Bar, usize>>,
}

fn md(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn sign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

impl Oracle {
    /// Words up to degree `word_top`, bar words up to `bar_top ≤ word_top`.
    fn new(t: Tensor, bar_top: usize, word_top: usize) -> Self {
        let mut words: Vec<Vec<Word>> = vec![vec![vec![]]];
        for n in 1..=word_top {
            let mut here = Vec::new();
            for (g, &dg) in t.degrees.iter().enumerate() {
                let dg = dg as usize;
                if dg <= n {
                    for w in &words[n - dg] {
                        let mut x = vec![g as u8];
                        x.extend(w);
                        here.push(x);
                    }
                }
            }
            here.sort();
            words.push(here);
        }
        let word_index = words.iter().map(|ws| ws.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect()).collect();
        // A bar word `[a1|..|ak]` has degree Σ(|ai| + 1).
        let mut bars: Vec<Vec<Bar>> = vec![vec![vec![]]];
        for n in 1..=bar_top {
            let mut here = Vec::new();
            for first in 2..=n {
                for a in &words[first - 1] {
                    for rest in &bars[n - first] {
                        let mut b = vec![a.clone()];
                        b.extend(rest.iter().cloned());
                        here.push(b);
                    }
                }
            }
            here.sort();
            bars.push(here);
        }
        let bar_index = bars.iter().map(|bs| bs.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect()).collect();
        Oracle { t, words, word_index, bars, bar_index }
    }

    fn wdeg(&self, w: &[u8]) -> i32 {
        w.iter().map(|&g| self.t.degrees[g as usize]).sum()
    }

    /// Leibniz rule: `d(w1 w2) = d(w1) w2 + (−1)^{|w1|} w1 d(w2)`.
    fn d_word(&self, w: &[u8]) -> Vec<(i64, Word)> {
        let mut out = Vec::new();
        let mut before = 0;
        for (i, &g) in w.iter().enumerate() {
            for (c, img) in &self.t.d[g as usize] {
                let mut x = w[..i].to_vec();
                x.extend(img);
                x.extend(&w[i + 1..]);
                out.push((c * sign(before % 2 == 1), x));
            }
            before += self.t.degrees[g as usize];
        }
        out
    }

    /// `d(1⊗[a1|..|ak])` as terms `c · a ⊗ β`.
    fn d_bar(&self, b: &[Word]) -> Vec<(i64, Word, Bar)> {
        let mut out = Vec::new();
        let mut eps = 0;
        for i in 0..b.len() {
            for (c, img) in self.d_word(&b[i]) {
                let mut nb = b.to_vec();
                nb[i] = img;
                out.push((-c * sign(eps % 2 == 1), vec![], nb));
            }
            if i == 0 {
                out.push((1, b[0].clone(), b[1..].to_vec()));
            } else {
                let mut nb = b[..i - 1].to_vec();
                let mut joined = b[i - 1].clone();
                joined.extend(&b[i]);
                nb.push(joined);
                nb.extend(b[i + 1..].iter().cloned());
                out.push((sign(eps % 2 == 1), vec![], nb));
            }
            eps += self.wdeg(&b[i]) + 1;
        }
        out
    }

    /// `d(a⊗β) = da⊗β + (−1)^{|a|} a·d(1⊗β)`.
    fn d_total(&self, a: &[u8], b: &[Word]) -> Vec<(i64, Word, Bar)> {
        let mut out: Vec<(i64, Word, Bar)> = self.d_word(a).into_iter().map(|(c, w)| (c, w, b.to_vec())).collect();
        let s = sign(self.wdeg(a) % 2 == 1);
        for (c, w, nb) in self.d_bar(b) {
            let mut x = a.to_vec();
            x.extend(w);
            out.push((s * c, x, nb));
        }
        out
    }

    fn bar_deg(&self, b: &[Word]) -> usize {
        b.iter().map(|w| self.wdeg(w) as usize + 1).sum()
    }

    /// Dense matrix of `d: P_n → P_{n−1}` over `F_p`.
    fn p_matrix(&self, n: usize) -> (Vec<Vec<u64>>, usize) {
        let basis = |n: usize| -> Vec<(Word, Bar)> {
            let mut v = Vec::new();
            for m in 0..=n {
                for a in &self.words[m] {
                    for b in &self.bars[n - m] {
                        v.push((a.clone(), b.clone()));
                    }
                }
            }
            v
        };
        let src = basis(n);
        let tgt: HashMap<(Word, Bar), usize> = if n == 0 {
            HashMap::new()
        } else {
            basis(n - 1).into_iter().enumerate().map(|(i, x)| (x, i)).collect()
        };
        let p = self.t.p;
        let cols = src
            .iter()
            .map(|(a, b)| {
                let mut col = vec![0u64; tgt.len()];
                for (c, w, nb) in self.d_total(a, b) {
                    let i = tgt[&(w, nb)];
                    col[i] = (col[i] + md(c, p)) % p;
                }
                col
            })
            .collect();
        (cols, src.len())
    }

    /// Coordinates `(β, w)` of `Hom^k` on bar degrees `≤ l`, ordered by bar
    /// degree so that lower truncations are prefixes.
    fn hom_basis(&self, k: i32, l: usize) -> Vec<(usize, usize, usize)> {
        let mut v = Vec::new();
        for n in 0..=l {
            let m = n as i32 - k;
            if m < 0 {
                continue;
            }
            assert!((m as usize) < self.words.len(), "word basis too short for degree {m}");
            for bi in 0..self.bars[n].len() {
                for wi in 0..self.words[m as usize].len() {
                    v.push((n, bi, wi));
                }
            }
        }
        v
    }

    /// `D(f)(γ) = d(f(γ)) − (−1)^k f(d(1⊗γ))`, with
    /// `f(a⊗β) = (−1)^{k|a|} a·f(β)`, as dense columns.
    fn hom_matrix(&self, k: i32, l: usize) -> Vec<Vec<u64>> {
        let p = self.t.p;
        let src = self.hom_basis(k, l);
        let tgt: HashMap<(usize, usize, usize), usize> =
            self.hom_basis(k + 1, l).into_iter().enumerate().map(|(i, x)| (x, i)).collect();
        // rev[(n, β)] = [(γ index in degree n', c, a)] for terms c·a⊗β of d(1⊗γ).
        let mut rev: HashMap<(usize, usize), Vec<(usize, usize, i64, Word)>> = HashMap::new();
        for n in 0..=l {
            for (gi, g) in self.bars[n].iter().enumerate() {
                for (c, a, nb) in self.d_bar(g) {
                    let bn = self.bar_deg(&nb);
                    let bi = self.bar_index[bn][&nb];
                    rev.entry((bn, bi)).or_default().push((n, gi, c, a));
                }
            }
        }
        let tgt_len = tgt.len();
        src.iter()
            .map(|&(n, bi, wi)| {
                let mut col = vec![0u64; tgt_len];
                let mut add = |gn: usize, gi: usize, c: i64, w: &Word| {
                    let m = self.wdeg(w);
                    let idx = tgt[&(gn, gi, self.word_index[m as usize][w])];
                    col[idx] = (col[idx] + md(c, p)) % p;
                };
                let w = &self.words[(n as i32 - k) as usize][wi];
                for (c, dw) in self.d_word(w) {
                    add(n, bi, c, &dw);
                }
                let s = -sign(k.rem_euclid(2) == 1);
                if let Some(terms) = rev.get(&(n, bi)) {
                    for (gn, gi, c, a) in terms {
                        let mut x = a.clone();
                        x.extend(w);
                        let s2 = sign((k * self.wdeg(a)).rem_euclid(2) == 1);
                        add(*gn, *gi, s * s2 * c, &x);
                    }
                }
                col
            })
            .collect()
    }
}

/// Row echelon over `F_p` on column vectors; `insert` reports independence.
struct Echelon {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (piv, r) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = (*x + p - c * y % p) % p;
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            Some(piv) => {
                let inv = pow_mod(v[piv], p - 2, p);
                for x in v.iter_mut() {
                    *x = *x * inv % p;
                }
                for (_, r) in self.rows.iter_mut() {
                    let c = r[piv];
                    if c != 0 {
                        for (x, y) in r.iter_mut().zip(&v) {
                            *x = (*x + p - c * y % p) % p;
                        }
                    }
                }
                self.rows.push((piv, v));
                true
            }
            None => false,
        }
    }
}

fn rank(cols: &[Vec<u64>], p: u64) -> usize {
    let mut e = Echelon::new(p);
    cols.iter().filter(|c| e.insert((*c).clone())).count()
}

/// Kernel basis of the map whose columns are `cols` (each of length `rows`).
fn kernel(cols: &[Vec<u64>], rows: usize, p: u64) -> Vec<Vec<u64>> {
    let n = cols.len();
    // Row-reduce the augmented system [col ; e_j] and keep the tails of
    // combinations whose head vanishes.
    let mut e = Echelon::new(p);
    let mut out = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        v.resize(rows + n, 0);
        v[rows + j] = 1;
        e.insert(v);
    }
    for (piv, r) in &e.rows {
        if *piv >= rows {
            out.push(r[rows..].to_vec());
        }
    }
    out
}

impl Oracle {
    /// `dim im(H^k(≤ l2) → H^k(≤ l1))`.
    fn stable_dim(&self, k: i32, l1: usize, l2: usize) -> usize {
        let p = self.t.p;
        let len1 = self.hom_basis(k, l1).len();
        let rows2 = self.hom_basis(k + 1, l2).len();
        let z2 = kernel(&self.hom_matrix(k, l2), rows2, p);
        let b1 = self.hom_matrix(k - 1, l1);
        let rb = rank(&b1, p);
        let mut all: Vec<Vec<u64>> = b1;
        all.extend(z2.into_iter().map(|z| z[..len1].to_vec()));
        rank(&all, p) - rb
    }
}

pub struct Case {
    pub name: &'static str,
    pub model: &'static str,
    pub t: Tensor,
    /// Truncation pairs `(L1, L2)`; the oracle must agree across them.
    pub levels: [(usize, usize); 2],
}

pub fn cases() -> Vec<Case> {
    let big = 1_000_003;
    vec![
        Case { name: "T(a), |a|=1", model: "flavor adams-hilton\ngen a 1\n", t: Tensor { degrees: vec![1], d: vec![vec![]], p: big }, levels: [(6, 8), (7, 9)] },
        Case { name: "T(a), |a|=2", model: "flavor adams-hilton\ngen a 2\n", t: Tensor { degrees: vec![2], d: vec![vec![]], p: big }, levels: [(6, 8), (7, 9)] },
        Case { name: "T(a), |a|=3", model: "flavor adams-hilton\ngen a 3\n", t: Tensor { degrees: vec![3], d: vec![vec![]], p: big }, levels: [(6, 8), (7, 9)] },
        Case {
            name: "two-cell q=2 r=1 over Q",
            model: "flavor adams-hilton\ngen a 1\ngen a' 2\nd a' = -a\n",
            t: Tensor { degrees: vec![1, 2], d: vec![vec![], vec![(-1, vec![0])]], p: big },
            levels: [(4, 5), (5, 6)],
        },
        Case {
            name: "two-cell q=2 r=3 over F3",
            model: "field F3\nflavor adams-hilton\ngen a 1\ngen a' 2\nd a' = -3*a\n",
            t: Tensor { degrees: vec![1, 2], d: vec![vec![], vec![]], p: 3 },
            levels: [(4, 5), (5, 6)],
        },
        Case {
            name: "two-cell q=3 r=2 over Q",
            model: "flavor adams-hilton\ngen a 2\ngen a' 3\nd a' = -2*a\n",
            t: Tensor { degrees: vec![2, 3], d: vec![vec![], vec![(-2, vec![0])]], p: big },
            levels: [(6, 8), (7, 9)],
        },
        Case {
            name: "T(a,b), |a|=2, |b|=3, db = 0",
            model: "flavor adams-hilton\ngen a 2\ngen b 3\n",
            t: Tensor { degrees: vec![2, 3], d: vec![vec![], vec![]], p: big },
            levels: [(6, 8), (7, 9)],
        },
        Case {
            name: "T(a,b), |a|=1, |b|=3, db = a^2",
            model: "field F5\nflavor adams-hilton\ngen a 1\ngen b 3\nd b = a*a\n",
            t: Tensor { degrees: vec![1, 3], d: vec![vec![], vec![(1, vec![0, 0])]], p: 5 },
            levels: [(5, 6), (6, 7)],
        },
    ]
}

/// Multiplies dense column-major maps: `g ∘ f`, checking it vanishes.
fn composite_vanishes(f: &[Vec<u64>], g: &[Vec<u64>], p: u64) -> bool {
    let rows = g.first().map_or(0, Vec::len);
    f.iter().all(|col| {
        let mut img = vec![0u64; rows];
        for (j, &x) in col.iter().enumerate() {
            if x != 0 {
                for (i, &y) in g[j].iter().enumerate() {
                    img[i] = (img[i] + x * y) % p;
                }
            }
        }
        img.iter().all(|&v| v == 0)
    })
}

/// `d² = 0` on `P` and `H(P) = K`, in degrees below 6.
pub fn check_resolution(c: Case) -> Result<(), String> {
    let name = c.name;
    let o = Oracle::new(c.t, 7, 7);
    let p = o.t.p;
    for n in 0..6 {
        let (dn, len_n) = o.p_matrix(n);
        let (dn1, _) = o.p_matrix(n + 1);
        if n > 0 && !composite_vanishes(&dn1, &dn, p) {
            return Err(format!("{name}: d² ≠ 0 in degree {}", n + 1));
        }
        let h = len_n - rank(&dn, p) - rank(&dn1, p);
        if h != usize::from(n == 0) {
            return Err(format!("{name}: H_{n}(P) = {h}"));
        }
    }
    Ok(())
}

/// `D² = 0` on the truncated Hom complex in degrees `[−3, 3]`.
pub fn check_hom_square(c: Case) -> Result<(), String> {
    let name = c.name;
    let o = Oracle::new(c.t, 6, 10);
    for k in -3..=3 {
        if !composite_vanishes(&o.hom_matrix(k, 6), &o.hom_matrix(k + 1, 6), o.t.p) {
            return Err(format!("{name}: D² ≠ 0 at {k}"));
        }
    }
    Ok(())
}

/// Oracle dimensions in `[−3, 3]` against the library's closure.
pub fn check_against_closure(c: Case) -> Result<BTreeMap<i32, usize>, String> {
    let (name, model, levels) = (c.name, c.model, c.levels);
    let top = levels[1].1;
    let o = Oracle::new(c.t, top, top + 4);
    let pres = Arc::new(parse_model(model).map_err(|e| e.to_string())?);
    let ext = ext_groups(pres, &ExtOptions::new(Window::new(-3, 3).unwrap())).map_err(|e| e.to_string())?;
    let mut out = BTreeMap::new();
    for k in -3..=3 {
        let dims: Vec<usize> = levels.iter().map(|&(l1, l2)| o.stable_dim(k, l1, l2)).collect();
        if dims.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{name}: oracle not stable at {k}: {dims:?}"));
        }
        if ext.dim(k) != Some(dims[0]) {
            return Err(format!("{name}: Ext^{k} is {:?}, oracle {}", ext.dim(k), dims[0]));
        }
        out.insert(k, dims[0]);
    }
    Ok(out)
}
