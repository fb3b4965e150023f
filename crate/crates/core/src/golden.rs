//! Reference values of `t_p(n)` for the eight smallest primes, `n <= 20`.

use std::sync::OnceLock;

use crate::arith::{parse_rational, ExactRational, Prime};

pub const GOLDEN_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
pub const GOLDEN_MAX_N: usize = 20;

// Row n, column i holds t_p(n) for p = GOLDEN_PRIMES[i].
const GOLDEN: [[&str; 8]; 21] = [
    ["1", "1", "1", "1", "1", "1", "1", "1"],
    ["0", "0", "0", "0", "0", "0", "0", "0"],
    ["1/2", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "1/3", "0", "0", "0", "0", "0", "0"],
    ["5/8", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "1/5", "0", "0", "0", "0", "0"],
    ["7/16", "2/9", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "1/7", "0", "0", "0", "0"],
    ["83/128", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "23/81", "0", "0", "0", "0", "0", "0"],
    ["119/256", "0", "3/25", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "1/11", "0", "0", "0"],
    ["561/1024", "44/243", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "1/13", "0", "0"],
    ["887/2048", "0", "0", "4/49", "0", "0", "0", "0"],
    ["0", "109/729", "11/125", "0", "0", "0", "0", "0"],
    ["20739/32768", "0", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0", "1/17", "0"],
    ["31275/65536", "1259/6561", "0", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "0", "0", "1/19"],
    ["144427/262144", "0", "44/625", "0", "0", "0", "0", "0"],
];

#[derive(Debug, Clone)]
pub struct GoldenTable {
    columns: Vec<(Prime, Vec<ExactRational>)>,
}

impl GoldenTable {
    /// `t_p(n)` when `(p, n)` is covered.
    pub fn get(&self, p: Prime, n: usize) -> Option<&ExactRational> {
        self.column(p).and_then(|c| c.get(n))
    }

    pub fn column(&self, p: Prime) -> Option<&[ExactRational]> {
        self.columns
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, c)| c.as_slice())
    }

    /// Every `(p, n, t_p(n))`, ordered by prime then index.
    pub fn entries(&self) -> impl Iterator<Item = (Prime, usize, &ExactRational)> {
        self.columns
            .iter()
            .flat_map(|(p, col)| col.iter().enumerate().map(move |(n, t)| (*p, n, t)))
    }

    pub fn len(&self) -> usize {
        self.columns.iter().map(|(_, c)| c.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn golden_table() -> &'static GoldenTable {
    static TABLE: OnceLock<GoldenTable> = OnceLock::new();
    TABLE.get_or_init(|| GoldenTable {
        columns: GOLDEN_PRIMES
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let col = GOLDEN
                    .iter()
                    .map(|row| parse_rational(row[i]).expect("embedded value parses"))
                    .collect();
                (Prime::new(p).expect("embedded prime"), col)
            })
            .collect(),
    })
}
