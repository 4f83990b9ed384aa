//! Set partitions of {1..n}, optionally signed, and their counts.
//!
//! Each partition block groups comonotone copula variables; a minus sign
//! marks a countermonotone member. The lowest element of every block is
//! positive by convention, so signs are relative to the block seed.

use super::CopulaError;
use std::fmt;
use std::str::FromStr;

/// One block member: a zero-based variable index plus its sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Member {
    pub index: usize,
    pub negated: bool,
}

impl Member {
    pub fn plus(index: usize) -> Self {
        Member {
            index,
            negated: false,
        }
    }

    pub fn minus(index: usize) -> Self {
        Member {
            index,
            negated: true,
        }
    }
}

/// A (signed) set partition of {0..n-1} in canonical form: members sorted
/// within blocks, blocks sorted by their smallest member, the smallest member
/// of every block positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<Member>>,
}

impl SetPartition {
    pub fn new(n: usize, mut blocks: Vec<Vec<Member>>) -> Result<Self, CopulaError> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(CopulaError::BadPartition("empty block".into()));
            }
            block.sort_by_key(|m| m.index);
            for m in block.iter() {
                if m.index >= n {
                    return Err(CopulaError::BadPartition(format!(
                        "element {} out of range for n={n}",
                        m.index + 1
                    )));
                }
                if seen[m.index] {
                    return Err(CopulaError::BadPartition(format!(
                        "element {} appears twice",
                        m.index + 1
                    )));
                }
                seen[m.index] = true;
            }
            if block[0].negated {
                return Err(CopulaError::BadPartition(format!(
                    "block seed {} must be positive",
                    block[0].index + 1
                )));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(CopulaError::BadPartition(format!(
                "element {} is missing",
                i + 1
            )));
        }
        blocks.sort_by_key(|b| b[0].index);
        Ok(SetPartition { n, blocks })
    }

    /// The single-block, all-positive partition (comonotonicity).
    pub fn comonotone(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(0..n).map(Member::plus).collect()],
        }
    }

    /// All-singletons partition (independence).
    pub fn independence(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (0..n).map(|i| vec![Member::plus(i)]).collect(),
        }
    }

    /// Bivariate countermonotone partition {{1,-2}}.
    pub fn countermonotone2() -> Self {
        SetPartition {
            n: 2,
            blocks: vec![vec![Member::plus(0), Member::minus(1)]],
        }
    }

    /// The partition pairing variable `a` with variable `b` (both positive),
    /// everything else singleton.
    pub fn pair(n: usize, a: usize, b: usize) -> Result<Self, CopulaError> {
        let mut blocks = vec![vec![Member::plus(a.min(b)), Member::plus(a.max(b))]];
        for i in 0..n {
            if i != a && i != b {
                blocks.push(vec![Member::plus(i)]);
            }
        }
        SetPartition::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<Member>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_signed(&self) -> bool {
        self.blocks.iter().flatten().any(|m| m.negated)
    }

    /// Sign-aware block lookup: for variable `v`, returns (block index,
    /// negated flag).
    pub fn block_of(&self, v: usize) -> (usize, bool) {
        for (b, block) in self.blocks.iter().enumerate() {
            if let Some(m) = block.iter().find(|m| m.index == v) {
                return (b, m.negated);
            }
        }
        unreachable!("partition covers all variables");
    }

    /// True when `i` and `j` share a block with equal signs, which is what
    /// makes the pair comonotone (and hence upper-tail dependent).
    pub fn comonotone_pair(&self, i: usize, j: usize) -> bool {
        let (bi, si) = self.block_of(i);
        let (bj, sj) = self.block_of(j);
        bi == bj && si == sj
    }
}

impl fmt::Display for SetPartition {
    /// One-based notation with `|` between blocks, e.g. `1,-2|3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|m| {
                        if m.negated {
                            format!("-{}", m.index + 1)
                        } else {
                            format!("{}", m.index + 1)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", blocks.join("|"))
    }
}

impl FromStr for SetPartition {
    type Err = CopulaError;

    /// Parses the `Display` form, e.g. `1,2|3` or `1,-2,3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut blocks = Vec::new();
        let mut max_index = 0usize;
        for block_str in s.split('|') {
            let mut block = Vec::new();
            for item in block_str.split(',') {
                let item = item.trim();
                let (negated, digits) = match item.strip_prefix('-') {
                    Some(rest) => (true, rest),
                    None => (false, item),
                };
                let one_based: usize = digits
                    .parse()
                    .map_err(|_| CopulaError::BadPartition(format!("bad element '{item}'")))?;
                if one_based == 0 {
                    return Err(CopulaError::BadPartition("elements are 1-based".into()));
                }
                max_index = max_index.max(one_based - 1);
                block.push(Member {
                    index: one_based - 1,
                    negated,
                });
            }
            blocks.push(block);
        }
        SetPartition::new(max_index + 1, blocks)
    }
}

/// Bell number B(n): the count of unsigned set partitions.
pub fn bell_number(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

const MAX_UNSIGNED_N: usize = 12;
const MAX_SIGNED_N: usize = 8;

/// Enumerates all set partitions of {1..n}. With `signed`, every non-seed
/// member of each block additionally takes both signs, so each partition with
/// block sizes s_1..s_B expands to prod 2^(s_i - 1) signed variants.
pub fn set_partitions(n: usize, signed: bool) -> Result<Vec<SetPartition>, CopulaError> {
    let cap = if signed { MAX_SIGNED_N } else { MAX_UNSIGNED_N };
    if n == 0 || n > cap {
        return Err(CopulaError::DimensionOutOfRange { n, max: cap });
    }
    let mut out = Vec::new();
    // restricted growth strings: a[0] = 0, a[i] <= max(a[..i]) + 1
    let mut rgs = vec![0usize; n];
    loop {
        let num_blocks = rgs.iter().max().unwrap() + 1;
        let mut blocks: Vec<Vec<Member>> = vec![Vec::new(); num_blocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(Member::plus(i));
        }
        if signed {
            emit_signed(n, &blocks, &mut out);
        } else {
            out.push(SetPartition {
                n,
                blocks: blocks.clone(),
            });
        }
        // next RGS
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

fn emit_signed(n: usize, blocks: &[Vec<Member>], out: &mut Vec<SetPartition>) {
    let free: Vec<(usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, block)| (1..block.len()).map(move |j| (b, j)))
        .collect();
    for mask in 0..1usize << free.len() {
        let mut signed_blocks = blocks.to_vec();
        for (bit, &(b, j)) in free.iter().enumerate() {
            signed_blocks[b][j].negated = (mask >> bit) & 1 == 1;
        }
        out.push(SetPartition {
            n,
            blocks: signed_blocks,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivariate_unsigned_partitions() {
        let parts = set_partitions(3, false).unwrap();
        let shown: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["1,2,3", "1,2|3", "1,3|2", "1|2,3", "1|2|3"]);
    }

    #[test]
    fn single_element() {
        assert_eq!(set_partitions(1, false).unwrap().len(), 1);
        assert_eq!(set_partitions(1, true).unwrap().len(), 1);
    }

    #[test]
    fn counts_match_bell_numbers() {
        let expected = [2u64, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (i, &want) in expected.iter().enumerate() {
            let n = i + 2;
            assert_eq!(bell_number(n), want, "Bell({n})");
            if n <= 10 {
                assert_eq!(set_partitions(n, false).unwrap().len() as u64, want);
            }
        }
    }

    #[test]
    fn signed_counts() {
        // 2, 3, 11, 49, 257 signed partitions for n = 1..5
        assert_eq!(set_partitions(2, true).unwrap().len(), 3);
        assert_eq!(set_partitions(3, true).unwrap().len(), 11);
        assert_eq!(set_partitions(4, true).unwrap().len(), 49);
        assert_eq!(set_partitions(5, true).unwrap().len(), 257);
    }

    #[test]
    fn signed_trivariate_matches_listed_extension() {
        let parts = set_partitions(3, true).unwrap();
        let shown: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        for expected in [
            "1,-2,3", "1,2,-3", "1,-2,-3", "1,-2|3", "1,-3|2", "1|2,-3",
        ] {
            assert!(shown.contains(&expected.to_string()), "missing {expected}");
        }
        assert_eq!(parts.iter().filter(|p| !p.is_signed()).count(), 5);
    }

    #[test]
    fn range_checks() {
        assert!(set_partitions(0, false).is_err());
        assert!(set_partitions(13, false).is_err());
        assert!(set_partitions(9, true).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["1,2,3", "1,-2|3", "1|2,-3", "1|2|3"] {
            let p: SetPartition = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("1,1".parse::<SetPartition>().is_err());
        assert!("-1,2".parse::<SetPartition>().is_err());
        assert!("1|3".parse::<SetPartition>().is_err()); // 2 missing
    }

    #[test]
    fn comonotone_pair_respects_signs() {
        let p: SetPartition = "1,-2,3".parse().unwrap();
        assert!(p.comonotone_pair(0, 2));
        assert!(!p.comonotone_pair(0, 1));
        assert!(!p.comonotone_pair(1, 2));
    }
}
