//! Reference scoring written independently of the library: alignments by
//! exhaustive path enumeration, distances by a two-row DP, fractions as
//! plain `(numerator, denominator)` pairs.

#![allow(dead_code)]

/// Step ranks in tie-break order, compared from the end of the strings.
const MATCH: u8 = 0;
const SUB: u8 = 1;
const DEL: u8 = 2;
const INS: u8 = 3;

/// Enumerate every alignment path from the end back to the start; keep the
/// cheapest, then the lexicographically smallest step sequence. Exponential,
/// so only for short strings.
pub fn brute_force_matched(truth: &str, pred: &str) -> (Vec<usize>, usize) {
    let t: Vec<char> = truth.chars().collect();
    let p: Vec<char> = pred.chars().collect();
    let mut best: Option<(usize, Vec<u8>)> = None;
    let mut steps = Vec::new();
    walk(&t, &p, t.len(), p.len(), 0, &mut steps, &mut best);
    let (cost, steps) = best.unwrap();
    let (mut i, mut matched) = (t.len(), Vec::new());
    for s in steps {
        match s {
            MATCH => {
                i -= 1;
                matched.push(i);
            }
            SUB | DEL => i -= 1,
            _ => {}
        }
    }
    matched.reverse();
    (matched, cost)
}

fn walk(
    t: &[char],
    p: &[char],
    i: usize,
    j: usize,
    cost: usize,
    steps: &mut Vec<u8>,
    best: &mut Option<(usize, Vec<u8>)>,
) {
    if let Some((c, _)) = best {
        if cost > *c {
            return;
        }
    }
    if i == 0 && j == 0 {
        let better = match best {
            None => true,
            Some((c, s)) => cost < *c || (cost == *c && steps[..] < s[..]),
        };
        if better {
            *best = Some((cost, steps.clone()));
        }
        return;
    }
    let mut go = |di: usize, dj: usize, rank: u8, extra: usize, steps: &mut Vec<u8>| {
        steps.push(rank);
        walk(t, p, i - di, j - dj, cost + extra, steps, best);
        steps.pop();
    };
    if i > 0 && j > 0 {
        if t[i - 1] == p[j - 1] {
            go(1, 1, MATCH, 0, steps);
        } else {
            go(1, 1, SUB, 1, steps);
        }
    }
    if i > 0 {
        go(1, 0, DEL, 1, steps);
    }
    if j > 0 {
        go(0, 1, INS, 1, steps);
    }
}

/// Unit-cost edit distance with two rolling rows.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(ca != cb))
                .min(prev[j + 1] + 1)
                .min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Longest common subsequence length, an upper bound on matched glyphs.
pub fn lcs(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev = vec![0usize; b.len() + 1];
    for ca in &a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            cur[j + 1] = if ca == cb {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        prev = cur;
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac(pub u64, pub u64);

impl Frac {
    pub fn value(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }

    pub fn same_as(self, num: u64, den: u64) -> bool {
        self.0 * den == num * self.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scores {
    pub ra: Frac,
    pub cra: Frac,
    pub cra_c: Frac,
    pub cra_nc: Frac,
}

/// All four metrics from brute-force alignments.
pub fn scores(pairs: &[(&str, &str)]) -> Scores {
    let (mut exact, mut chars, mut matched, mut first, mut rest, mut rest_total) =
        (0, 0, 0, 0, 0, 0);
    for (t, p) in pairs {
        let (m, _) = brute_force_matched(t, p);
        let len = t.chars().count() as u64;
        exact += u64::from(t == p);
        chars += len;
        matched += m.len() as u64;
        let first_hit = m.contains(&0);
        first += u64::from(first_hit);
        rest += m.len() as u64 - u64::from(first_hit);
        rest_total += len - 1;
    }
    let n = pairs.len() as u64;
    Scores {
        ra: Frac(exact, n),
        cra: Frac(matched, chars),
        cra_c: Frac(first, n),
        cra_nc: Frac(rest, rest_total),
    }
}

/// Twenty truth/prediction pairs covering exact hits, substitutions,
/// dropped and extra glyphs (including at the province position), empty
/// output, swaps and repeated glyphs where tie-breaking decides.
pub const FIXTURE: [(&str, &str); 20] = [
    ("京A12345", "京A12345"),
    ("京A12345", "京A12845"),
    ("京A12345", "A12345"),
    ("京A12345", "沪A12345"),
    ("粤B88888", "粤B8888"),
    ("粤B88888", "粤B888888"),
    ("苏E0A1B2", ""),
    ("苏E0A1B2", "苏E0A1B2X"),
    ("浙C9Z8Y7", "X浙C9Z8Y7"),
    ("浙C9Z8Y7", "浙C9Z8Y7"),
    ("鲁Q11111", "鲁Q1111"),
    ("鲁Q11111", "1111111"),
    ("川A0B0C0", "川A0C0B0"),
    ("川A0B0C0", "A川0B0C0"),
    ("新H12345", "新H54321"),
    ("新H12345", "新12345"),
    ("云K7K7K7", "云7K7K7K"),
    ("云K7K7K7", "云K7K7K7"),
    ("黑M00000", "黑N00000"),
    ("黑M00000", "京M0000"),
];
