//! Finite groups given by a full multiplication table.

use super::RingError;

/// A finite group with named elements. `table[a][b]` is the index of `a·b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup, RingError> {
        let n = names.len();
        let bad = |m: &str| Err(RingError::InvalidDescriptor(format!("group: {m}")));
        if n == 0 {
            return bad("empty group");
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("multiplication table must be an n×n table of element indices");
        }
        for i in 0..n {
            if names[..i].contains(&names[i]) {
                return bad("duplicate element name");
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        else {
            return bad("no identity element");
        };
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            match (0..n).find(|&h| table[g][h] == identity && table[h][g] == identity) {
                Some(h) => inverses.push(h),
                None => return bad("element without inverse"),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("table is not associative");
                    }
                }
            }
        }
        Ok(FiniteGroup {
            names,
            table,
            identity,
            inverses,
        })
    }

    /// Cyclic group of order `n` with elements `e, g, g2, …`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(names, table).expect("cyclic table is a group")
    }

    /// Symmetric group on three letters. Elements are permutations of
    /// `{0,1,2}` written in one-line notation; products compose right to left
    /// (`(σ·τ)(i) = σ(τ(i))`).
    pub fn symmetric3() -> FiniteGroup {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let names = ["e", "s01", "s12", "s02", "c012", "c021"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| idx([s[t[0]], s[t[1]], s[t[2]]]))
                    .collect()
            })
            .collect();
        FiniteGroup::new(names, table).expect("S3 table is a group")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// `true` when `perm` is a bijection respecting the multiplication table.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.order();
        if perm.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        (0..n).all(|a| (0..n).all(|b| perm[self.table[a][b]] == self.table[perm[a]][perm[b]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_is_nonabelian_of_order_six() {
        let g = FiniteGroup::symmetric3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        let s = g.index_of("s01").unwrap();
        assert_eq!(g.mul(s, s), g.identity());
        let c = g.index_of("c012").unwrap();
        assert_eq!(g.mul(c, g.mul(c, c)), g.identity());
    }

    #[test]
    fn bad_tables_are_rejected() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::new(names.clone(), vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteGroup::new(names, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn conjugation_is_an_automorphism() {
        let g = FiniteGroup::symmetric3();
        let s = g.index_of("s01").unwrap();
        let perm: Vec<usize> = (0..6).map(|x| g.mul(g.mul(s, x), g.inverse(s))).collect();
        assert!(g.is_automorphism(&perm));
        assert!(!g.is_automorphism(&[1, 0, 2, 3, 4, 5]));
    }
}
