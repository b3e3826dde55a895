use std::collections::VecDeque;

use super::spec::MultiplicationTable;
use super::word::Letter;
use crate::error::{Error, Result};

const MAX_ORDER: usize = 1024;

/// Finite group given by its multiplication table.
///
/// The normal form of an element is its shortlex-least word over the
/// positive generators, found by breadth-first search.
#[derive(Debug, Clone)]
pub(crate) struct TableGroup {
    products: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    gen_elements: Vec<usize>,
    canonical: Vec<Vec<Letter>>,
    /// Word length over the generators and their inverses.
    lengths: Vec<usize>,
}

impl TableGroup {
    pub(crate) fn new(table: &MultiplicationTable, ngens: usize) -> Result<Self> {
        let n = table.products.len();
        if n == 0 || n > MAX_ORDER {
            return Err(Error::InvalidSpec(format!(
                "table order must be between 1 and {MAX_ORDER}"
            )));
        }
        if table.products.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidSpec("table must be square with entries < order".into()));
        }
        if table.generator_elements.len() != ngens {
            return Err(Error::InvalidSpec(
                "one table element per generator is required".into(),
            ));
        }
        if table.generator_elements.iter().any(|&g| g >= n) {
            return Err(Error::InvalidSpec("generator element out of range".into()));
        }
        let p = &table.products;
        for i in 0..n {
            if p[0][i] != i || p[i][0] != i {
                return Err(Error::InvalidSpec("element 0 must be the identity".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if p[p[i][j]][k] != p[i][p[j][k]] {
                        return Err(Error::InvalidSpec(format!(
                            "table is not associative at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for i in 0..n {
            inverses[i] = (0..n)
                .find(|&j| p[i][j] == 0)
                .ok_or_else(|| Error::InvalidSpec(format!("element {i} has no inverse")))?;
        }

        let mut canonical: Vec<Option<Vec<Letter>>> = vec![None; n];
        canonical[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (gen, &g) in table.generator_elements.iter().enumerate() {
                let y = p[x][g];
                if canonical[y].is_none() {
                    let mut w = canonical[x].clone().unwrap();
                    w.push(Letter::new(gen, false));
                    canonical[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        if canonical.iter().any(|c| c.is_none()) {
            return Err(Error::InvalidSpec("generators do not generate the table".into()));
        }
        let mut lengths = vec![usize::MAX; n];
        lengths[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &table.generator_elements {
                for y in [p[x][g], p[x][inverses[g]]] {
                    if lengths[y] == usize::MAX {
                        lengths[y] = lengths[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(TableGroup {
            lengths,
            products: table.products.clone(),
            inverses,
            gen_elements: table.generator_elements.clone(),
            canonical: canonical.into_iter().map(|c| c.unwrap()).collect(),
        })
    }

    pub(crate) fn order(&self) -> usize {
        self.products.len()
    }

    /// Table index of the element spelled by `word` (local letters).
    pub(crate) fn evaluate(&self, word: &[Letter]) -> usize {
        word.iter().fold(0, |acc, l| {
            let g = self.gen_elements[l.gen()];
            let g = if l.is_inverse() { self.inverses[g] } else { g };
            self.products[acc][g]
        })
    }

    pub(crate) fn normalize(&self, word: &[Letter]) -> Vec<Letter> {
        self.canonical[self.evaluate(word)].clone()
    }

    pub(crate) fn word_length(&self, word: &[Letter]) -> usize {
        self.lengths[self.evaluate(word)]
    }

    pub(crate) fn canonical_words(&self) -> &[Vec<Letter>] {
        &self.canonical
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;

    #[test]
    fn cyclic_three_normal_forms() {
        let spec = GroupSpec::cyclic("a", 3);
        let t = TableGroup::new(spec.table.as_ref().unwrap(), 1).unwrap();
        let a = Letter::new(0, false);
        assert_eq!(t.normalize(&[a, a, a, a]), vec![a]);
        assert_eq!(t.normalize(&[a.inverse()]), vec![a, a]);
        assert!(t.normalize(&[a, a.inverse()]).is_empty());
    }

    #[test]
    fn rejects_non_associative_table() {
        let table = MultiplicationTable {
            generator_elements: vec![1],
            products: vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]],
        };
        assert!(TableGroup::new(&table, 1).is_err());
    }
}
