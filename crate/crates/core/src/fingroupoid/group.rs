//! Finite groups given by multiplication tables.

use std::collections::BTreeSet;

use super::FinError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, FinError> {
        let n = table.len();
        if n == 0 {
            return Err(FinError::structure("group", "empty multiplication table", vec![]));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(FinError::structure("group", "table is not square", vec![i]));
            }
            if let Some(j) = row.iter().position(|&v| v >= n) {
                return Err(FinError::structure("group", "product out of range", vec![i, j]));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| FinError::structure("group", "no identity element", vec![]))?;
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| FinError::structure("group", "element without inverse", vec![x]))?;
            inverse.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(FinError::structure("group", "associativity", vec![a, b, c]));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity, inverse })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::from_table(table).expect("cyclic group table")
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// Direct product; element `(a, b)` has index `a * |other| + b`.
    pub fn product(&self, other: &FiniteGroup) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table).expect("product of groups")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The subgroup generated by `gens`, sorted.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::from([self.identity]);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        set.contains(&self.identity)
            && set.iter().all(|&a| a < self.order())
            && set.iter().all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, self.inv(b)))))
    }

    pub fn is_normal(&self, elems: &[usize]) -> bool {
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        self.is_subgroup(elems)
            && self
                .elements()
                .all(|g| set.iter().all(|&n| set.contains(&self.mul(self.mul(g, n), self.inv(g)))))
    }

    /// Restriction of the table to a subgroup; returns the group and the
    /// embedding `new index -> old index`.
    pub fn subgroup(&self, elems: &[usize]) -> Result<(FiniteGroup, Vec<usize>), FinError> {
        if !self.is_subgroup(elems) {
            return Err(FinError::Precondition("elements do not form a subgroup".into()));
        }
        let embed: Vec<usize> = elems.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pos = |x: usize| embed.binary_search(&x).expect("closed under products");
        let table = embed.iter().map(|&a| embed.iter().map(|&b| pos(self.mul(a, b))).collect()).collect();
        Ok((FiniteGroup::from_table(table)?, embed))
    }

    /// Quotient by a normal subgroup; returns the group and the projection.
    /// Cosets are numbered in order of their smallest element.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>), FinError> {
        if !self.is_normal(normal) {
            return Err(FinError::Precondition("subgroup is not normal".into()));
        }
        let mut proj = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for g in self.elements() {
            if proj[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &n in normal {
                proj[self.mul(g, n)] = id;
            }
        }
        let table = reps.iter().map(|&a| reps.iter().map(|&b| proj[self.mul(a, b)]).collect()).collect();
        Ok((FiniteGroup::from_table(table)?, proj))
    }

    /// Whether `f: self -> other` is a homomorphism.
    pub fn is_hom(&self, other: &FiniteGroup, f: &[usize]) -> bool {
        f.len() == self.order()
            && f.iter().all(|&x| x < other.order())
            && self
                .elements()
                .all(|a| self.elements().all(|b| f[self.mul(a, b)] == other.mul(f[a], f[b])))
    }

    /// A small generating set, chosen greedily in index order.
    pub fn generators_of(&self, elems: &[usize]) -> Vec<usize> {
        let target: BTreeSet<usize> = elems.iter().copied().collect();
        let mut gens = Vec::new();
        let mut span: BTreeSet<usize> = BTreeSet::from([self.identity]);
        for &x in &target {
            if !span.contains(&x) {
                gens.push(x);
                span = self.generated(&gens).into_iter().collect();
            }
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_product() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.inv(1), 3);
        assert!(z4.is_abelian());
        let k = FiniteGroup::cyclic(2).product(&FiniteGroup::cyclic(2));
        assert_eq!(k.order(), 4);
        assert!(k.elements().all(|x| k.mul(x, x) == k.identity()));
    }

    #[test]
    fn bad_tables() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1]]).is_err());
        assert!(FiniteGroup::from_table(vec![]).is_err());
    }

    #[test]
    fn subgroups_and_quotients() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.generated(&[2]), vec![0, 2]);
        let (q, proj) = z4.quotient(&[0, 2]).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj, vec![0, 1, 0, 1]);
        let (sub, embed) = z4.subgroup(&[2, 0]).unwrap();
        assert_eq!(sub.order(), 2);
        assert_eq!(embed, vec![0, 2]);
        assert!(z4.subgroup(&[0, 1]).is_err());
        assert!(z4.quotient(&[0, 4]).is_err());
        assert_eq!(z4.generators_of(&[0, 1, 2, 3]), vec![1]);
    }

    #[test]
    fn homomorphisms() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        assert!(z4.is_hom(&z2, &[0, 1, 0, 1]));
        assert!(!z4.is_hom(&z2, &[0, 1, 1, 0]));
    }
}
