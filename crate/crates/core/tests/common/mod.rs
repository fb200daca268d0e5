//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torlib::linalg::{int, rat, solve_rational, IntMat, Rat, RatMat};
use torlib::symbolic::{SymVec, SymbolPool};
use torlib::{AffineZpAction, ZpAction};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mat(rows: &[Vec<i64>]) -> IntMat {
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    IntMat::from_i64(&refs)
}

pub fn random_int_mat(rng: &mut TestRng, rows: usize, cols: usize, bound: i64) -> IntMat {
    let m: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    if rows == 0 {
        IntMat::zeros(0, cols)
    } else {
        mat(&m)
    }
}

/// Product of `steps` elementary matrices with a random signed permutation.
pub fn random_unimodular(rng: &mut TestRng, q: usize, steps: usize) -> (IntMat, IntMat) {
    let mut perm: Vec<usize> = (0..q).collect();
    perm.shuffle(rng);
    let mut m = IntMat::zeros(q, q);
    for (r, &c) in perm.iter().enumerate() {
        m = set(&m, r, c, if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    for _ in 0..steps {
        if q < 2 {
            break;
        }
        let i = rng.gen_range(0..q);
        let mut j = rng.gen_range(0..q - 1);
        if j >= i {
            j += 1;
        }
        let e = set(&IntMat::identity(q), i, j, if rng.gen_bool(0.5) { 1 } else { -1 });
        m = e.mul(&m);
    }
    let inv = m.inverse_unimodular().unwrap();
    (m, inv)
}

fn set(m: &IntMat, r: usize, c: usize, v: i64) -> IntMat {
    let mut rows = m.to_rows();
    rows[r][c] = int(v);
    IntMat::from_rows(rows).unwrap()
}

pub fn random_unipotent(rng: &mut TestRng, n: usize, bound: i64) -> IntMat {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| match c.cmp(&r) {
                    std::cmp::Ordering::Less => rng.gen_range(-bound..=bound),
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => 0,
                })
                .collect()
        })
        .collect();
    if n == 0 {
        IntMat::zeros(0, 0)
    } else {
        mat(&rows)
    }
}

/// Unimodular matrix without eigenvalue 1, as a block sum of small
/// fixed-point-free blocks.
pub fn random_fix_free(rng: &mut TestRng, m: usize) -> IntMat {
    let twos: [Vec<Vec<i64>>; 5] = [
        vec![vec![2, 1], vec![1, 1]],
        vec![vec![0, -1], vec![1, 0]],
        vec![vec![0, -1], vec![1, -1]],
        vec![vec![-1, 1], vec![0, -1]],
        vec![vec![1, 1], vec![1, 2]],
    ];
    let mut blocks = Vec::new();
    let mut left = m;
    while left > 0 {
        if left >= 2 && rng.gen_bool(0.6) {
            blocks.push(mat(twos.choose(rng).unwrap()));
            left -= 2;
        } else {
            blocks.push(mat(&[vec![-1]]));
            left -= 1;
        }
    }
    let b = block_diag(&blocks);
    if m == 0 {
        return b;
    }
    let (c, c_inv) = random_unimodular(rng, m, 2);
    c.mul(&b).mul(&c_inv)
}

pub fn block_diag(blocks: &[IntMat]) -> IntMat {
    let q: usize = blocks.iter().map(IntMat::rows).sum();
    let mut rows = vec![vec![int(0); q]; q];
    let mut off = 0;
    for b in blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                rows[off + r][off + c] = b[(r, c)].clone();
            }
        }
        off += b.rows();
    }
    if q == 0 {
        IntMat::zeros(0, 0)
    } else {
        IntMat::from_rows(rows).unwrap()
    }
}

/// `M^e` for any integer `e`.
pub fn power(m: &IntMat, e: i64) -> IntMat {
    if e >= 0 {
        m.pow(e as u32)
    } else {
        m.inverse_unimodular().unwrap().pow((-e) as u32)
    }
}

/// Generators of one of three commuting families on `Z^q`, in block form.
fn family(rng: &mut TestRng, q: usize, p: usize) -> Vec<IntMat> {
    match rng.gen_range(0..3) {
        0 => {
            // powers of [[N, 0], [V, B]], N unipotent, B fixed-point-free
            let n = rng.gen_range(0..=q);
            let m = q - n;
            let nn = random_unipotent(rng, n, 1);
            let b = random_fix_free(rng, m);
            let v = random_int_mat(rng, m, n, 1);
            let top = IntMat::hstack(&[nn, IntMat::zeros(n, m)], n);
            let bottom = IntMat::hstack(&[v, b], m);
            let gen = IntMat::vstack(&[top, bottom], q);
            (0..p)
                .map(|_| {
                    let g = power(&gen, rng.gen_range(-1..=2));
                    if rng.gen_bool(0.1) {
                        g.neg()
                    } else {
                        g
                    }
                })
                .collect()
        }
        1 => {
            // [[I, 0], [Vᵢ, I]]
            let n = rng.gen_range(1..=q.max(1)).min(q);
            let k = q - n;
            (0..p)
                .map(|_| {
                    let v = random_int_mat(rng, k, n, 1);
                    IntMat::from_blocks(&IntMat::identity(n), &IntMat::zeros(n, k), &v, &IntMat::identity(k))
                })
                .collect()
        }
        _ => {
            // commuting powers of a fixed-point-free matrix, possibly ±I
            let b = random_fix_free(rng, q);
            (0..p)
                .map(|_| match rng.gen_range(0..4) {
                    0 => IntMat::identity(q),
                    1 => IntMat::identity(q).neg(),
                    _ => power(&b, rng.gen_range(-1..=1)),
                })
                .collect()
        }
    }
}

/// Random commuting action with `q ≤ max_q`, `p ≤ max_p`: a block sum of
/// one or two families conjugated by a random unimodular matrix.
pub fn random_action(rng: &mut TestRng, max_q: usize, max_p: usize) -> ZpAction {
    let q = rng.gen_range(1..=max_q);
    let p = rng.gen_range(1..=max_p);
    let gens = if q >= 2 && rng.gen_bool(0.4) {
        let q1 = rng.gen_range(1..q);
        let a = family(rng, q1, p);
        let b = family(rng, q - q1, p);
        a.iter()
            .zip(&b)
            .map(|(x, y)| block_diag(&[x.clone(), y.clone()]))
            .collect()
    } else {
        family(rng, q, p)
    };
    let (c, c_inv) = random_unimodular(rng, q, 3);
    let gens = gens.iter().map(|g| c.mul(g).mul(&c_inv)).collect();
    ZpAction::new(q, gens).expect("families commute")
}

/// `[[I_n, 0], [Vᵢ, I_k]]` with random `Vᵢ`, conjugated when `conj` is set.
pub fn random_trivial_quotient(rng: &mut TestRng, n: usize, k: usize, p: usize, bound: i64, conj: bool) -> ZpAction {
    let q = n + k;
    let gens: Vec<IntMat> = (0..p)
        .map(|_| {
            let v = random_int_mat(rng, k, n, bound);
            IntMat::from_blocks(&IntMat::identity(n), &IntMat::zeros(n, k), &v, &IntMat::identity(k))
        })
        .collect();
    let gens = if conj {
        let (c, c_inv) = random_unimodular(rng, q, 3);
        gens.iter().map(|g| c.mul(g).mul(&c_inv)).collect()
    } else {
        gens
    };
    ZpAction::new(q, gens).unwrap()
}

/// Basis of the rational translation vectors `(γ₁, …, γ_p)` satisfying
/// `(Aᵢ − I)γⱼ = (Aⱼ − I)γᵢ`, each scaled to integer entries.
pub fn compatible_basis(a: &ZpAction) -> Vec<Vec<Rat>> {
    let (p, q) = (a.p(), a.q());
    let mut blocks = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            // columns for γⱼ get (Aᵢ − I), columns for γᵢ get −(Aⱼ − I)
            let mut row_blocks = vec![RatMat::zeros(q, q); p];
            row_blocks[j] = a.gen(i).minus_identity().to_rat();
            row_blocks[i] = a.gen(j).minus_identity().to_rat().neg();
            blocks.push(RatMat::hstack(&row_blocks, q));
        }
    }
    let n = p * q;
    if blocks.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| rat((i == j) as i64, 1)).collect())
            .collect();
    }
    let system = RatMat::vstack(&blocks, n);
    let zero = vec![rat(0, 1); system.rows()];
    let sol = solve_rational(&system, &zero).expect("homogeneous system");
    sol.nullspace
        .into_iter()
        .map(|v| {
            let den = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| {
                num_integer::Integer::lcm(&acc, x.denom())
            });
            v.into_iter().map(|x| x * Rat::from_integer(den.clone())).collect()
        })
        .collect()
}

/// Random compatible rational translations with denominators at most
/// `max_den`.
pub fn random_rational_affine(rng: &mut TestRng, a: &ZpAction, max_den: i64) -> AffineZpAction {
    let (p, q) = (a.p(), a.q());
    let basis = compatible_basis(a);
    let den = Rat::from_integer(rng.gen_range(1..=max_den).into());
    let mut flat = vec![rat(0, 1); p * q];
    for b in &basis {
        let c = Rat::from_integer(rng.gen_range(-3..=3).into()) / den.clone();
        for (x, y) in flat.iter_mut().zip(b) {
            *x += c.clone() * y;
        }
    }
    let trans = (0..p).map(|i| SymVec::from_rats(&flat[i * q..(i + 1) * q])).collect();
    AffineZpAction::new(a.clone(), SymbolPool::new(), trans).expect("compatible by construction")
}
