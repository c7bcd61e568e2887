//! Hadamard matrices for balanced half-sampling.
//!
//! Orders are built from 1 and 2 by Sylvester doubling, Paley's first
//! construction (order `q + 1`, prime `q ≡ 3 mod 4`) and Paley's second
//! construction (order `2(q + 1)`, prime `q ≡ 1 mod 4`). Every returned
//! matrix is normalized so its first column is all `+1`.

/// Row-major ±1 matrix.
pub type Hadamard = Vec<Vec<i8>>;

/// A Hadamard matrix of exactly `order`, if one of the supported constructions reaches it.
pub fn hadamard(order: usize) -> Option<Hadamard> {
    let mut h = build(order)?;
    for row in &mut h {
        if row[0] < 0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Some(h)
}

/// Order used for `strata` two-PSU strata: the smallest multiple of 4 that is at least `strata`.
pub fn default_order(strata: usize) -> usize {
    strata.max(1).div_ceil(4) * 4
}

fn build(order: usize) -> Option<Hadamard> {
    match order {
        0 => None,
        1 => Some(vec![vec![1]]),
        2 => Some(vec![vec![1, 1], vec![1, -1]]),
        n if n % 4 != 0 => None,
        n => paley_one(n).or_else(|| paley_two(n)).or_else(|| build(n / 2).map(|h| double(&h))),
    }
}

fn double(h: &Hadamard) -> Hadamard {
    let mut out = Vec::with_capacity(2 * h.len());
    for row in h {
        out.push(row.iter().chain(row).copied().collect());
    }
    for row in h {
        out.push(row.iter().copied().chain(row.iter().map(|x| -x)).collect());
    }
    out
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// Quadratic character of `a` modulo the odd prime `q`.
fn legendre(a: usize, q: usize) -> i8 {
    let a = a % q;
    if a == 0 {
        return 0;
    }
    let (mut base, mut exp, mut acc) = (a as u64, ((q - 1) / 2) as u64, 1u64);
    let q64 = q as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q64;
        }
        base = base * base % q64;
        exp >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

fn jacobsthal(q: usize) -> Vec<Vec<i8>> {
    (0..q).map(|i| (0..q).map(|j| legendre(j + q - i, q)).collect()).collect()
}

fn paley_one(n: usize) -> Option<Hadamard> {
    let q = n - 1;
    if !(is_prime(q) && q % 4 == 3) {
        return None;
    }
    let jq = jacobsthal(q);
    let mut h = vec![vec![0i8; n]; n];
    h[0][1..].fill(1);
    for row in h.iter_mut().skip(1) {
        row[0] = -1;
    }
    for i in 0..q {
        for j in 0..q {
            h[i + 1][j + 1] = jq[i][j];
        }
    }
    for (i, row) in h.iter_mut().enumerate() {
        row[i] += 1;
    }
    Some(h)
}

fn paley_two(n: usize) -> Option<Hadamard> {
    if !n.is_multiple_of(2) {
        return None;
    }
    let q = n / 2 - 1;
    if !(is_prime(q) && q % 4 == 1) {
        return None;
    }
    let jq = jacobsthal(q);
    let c = |i: usize, j: usize| -> i8 {
        match (i, j) {
            (0, 0) => 0,
            (0, _) | (_, 0) => 1,
            _ => jq[i - 1][j - 1],
        }
    };
    let mut h = vec![vec![0i8; n]; n];
    for i in 0..=q {
        for j in 0..=q {
            let block: [[i8; 2]; 2] = match c(i, j) {
                0 => [[1, -1], [-1, -1]],
                s => [[s, s], [s, -s]],
            };
            for (a, row) in block.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    h[2 * i + a][2 * j + b] = v;
                }
            }
        }
    }
    Some(h)
}
