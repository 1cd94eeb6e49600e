//! The category DAG: subsumption, disjointness and quality-leaf marks.

use std::collections::{BTreeSet, HashMap};

use crate::error::TaxonomyError;

/// Top category of the quality branch.
pub const QUALITY: &str = "Q";

/// Categories the engine refers to by name.
pub mod cat {
    pub const ED: &str = "ED";
    pub const PED: &str = "PED";
    pub const NPED: &str = "NPED";
    pub const PD: &str = "PD";
    pub const PRO: &str = "PRO";
    pub const Q: &str = "Q";
    pub const TQ: &str = "TQ";
    pub const PQ: &str = "PQ";
    pub const AQ: &str = "AQ";
    pub const TL: &str = "TL";
    pub const AB: &str = "AB";
    pub const C: &str = "C";
    pub const RL: &str = "RL";
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryId(pub(crate) u32);

/// Declarative description of a taxonomy, as read from a config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaxonomySpec {
    /// `(category, parents)` in declaration order.
    pub categories: Vec<(String, Vec<String>)>,
    pub disjoint_groups: Vec<Vec<String>>,
    pub quality_leaves: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Taxonomy {
    names: Vec<String>,
    index: HashMap<String, CategoryId>,
    parents: Vec<Vec<CategoryId>>,
    children: Vec<Vec<CategoryId>>,
    // reflexive ancestor sets
    ancestors: Vec<BTreeSet<CategoryId>>,
    disjoint_groups: Vec<Vec<CategoryId>>,
    quality_leaves: BTreeSet<CategoryId>,
}

impl Taxonomy {
    pub fn load(spec: &TaxonomySpec) -> Result<Taxonomy, TaxonomyError> {
        let mut tax = Taxonomy {
            names: Vec::new(),
            index: HashMap::new(),
            parents: Vec::new(),
            children: Vec::new(),
            ancestors: Vec::new(),
            disjoint_groups: Vec::new(),
            quality_leaves: BTreeSet::new(),
        };
        for (name, _) in &spec.categories {
            if !tax.index.contains_key(name) {
                tax.push_name(name);
            }
        }
        for (name, parents) in &spec.categories {
            let child = tax.index[name];
            for p in parents {
                let parent = *tax.index.get(p).ok_or_else(|| TaxonomyError::UnknownParent {
                    child: name.clone(),
                    parent: p.clone(),
                })?;
                if !tax.parents[child.0 as usize].contains(&parent) {
                    tax.parents[child.0 as usize].push(parent);
                    tax.children[parent.0 as usize].push(child);
                }
            }
        }
        tax.compute_ancestors()?;
        for group in &spec.disjoint_groups {
            let ids = group.iter().map(|c| tax.id(c)).collect::<Result<Vec<_>, _>>()?;
            tax.disjoint_groups.push(ids);
        }
        for leaf in &spec.quality_leaves {
            let id = tax.id(leaf)?;
            tax.quality_leaves.insert(id);
        }
        tax.validate()?;
        Ok(tax)
    }

    fn push_name(&mut self, name: &str) -> CategoryId {
        let id = CategoryId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.parents.push(Vec::new());
        self.children.push(Vec::new());
        self.ancestors.push(BTreeSet::new());
        id
    }

    fn compute_ancestors(&mut self) -> Result<(), TaxonomyError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let n = self.names.len();
        let mut state = vec![0u8; n];
        let mut anc: Vec<BTreeSet<CategoryId>> = vec![BTreeSet::new(); n];
        fn visit(
            tax: &Taxonomy,
            c: usize,
            state: &mut [u8],
            anc: &mut [BTreeSet<CategoryId>],
        ) -> Result<(), TaxonomyError> {
            match state[c] {
                2 => return Ok(()),
                1 => return Err(TaxonomyError::Cycle(tax.names[c].clone())),
                _ => {}
            }
            state[c] = 1;
            let mut set = BTreeSet::from([CategoryId(c as u32)]);
            for p in &tax.parents[c] {
                visit(tax, p.0 as usize, state, anc)?;
                set.extend(anc[p.0 as usize].iter().copied());
            }
            anc[c] = set;
            state[c] = 2;
            Ok(())
        }
        for c in 0..n {
            visit(self, c, &mut state, &mut anc)?;
        }
        self.ancestors = anc;
        Ok(())
    }

    fn validate(&self) -> Result<(), TaxonomyError> {
        for (c, anc) in self.ancestors.iter().enumerate() {
            let roots: Vec<String> = anc
                .iter()
                .filter(|a| self.parents[a.0 as usize].is_empty())
                .map(|a| self.names[a.0 as usize].clone())
                .collect();
            if roots.len() != 1 {
                return Err(TaxonomyError::RootAmbiguity { category: self.names[c].clone(), roots });
            }
        }
        let quality = self.index.get(QUALITY).copied();
        for leaf in &self.quality_leaves {
            let under_q = quality.is_some_and(|q| self.ancestors[leaf.0 as usize].contains(&q));
            if !under_q || !self.children[leaf.0 as usize].is_empty() {
                return Err(TaxonomyError::BadQualityLeaf(self.name(*leaf).to_string()));
            }
        }
        for group in &self.disjoint_groups {
            for (c, anc) in self.ancestors.iter().enumerate() {
                let hits: Vec<CategoryId> = group.iter().copied().filter(|g| anc.contains(g)).collect();
                if hits.len() > 1 {
                    return Err(TaxonomyError::DisjointOverlap {
                        category: self.names[c].clone(),
                        a: self.name(hits[0]).to_string(),
                        b: self.name(hits[1]).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Adds a category under existing parents. Redeclaring a known category
    /// is accepted when the stated parents are already among its parents.
    pub fn extend(&mut self, name: &str, parents: &[String]) -> Result<CategoryId, TaxonomyError> {
        let parent_ids = parents.iter().map(|p| {
            self.id(p).map_err(|_| TaxonomyError::UnknownParent { child: name.to_string(), parent: p.clone() })
        });
        let parent_ids = parent_ids.collect::<Result<Vec<_>, _>>()?;
        if let Some(&id) = self.index.get(name) {
            for p in &parent_ids {
                if !self.parents[id.0 as usize].contains(p) {
                    return Err(TaxonomyError::ConflictingParent {
                        category: name.to_string(),
                        parent: self.name(*p).to_string(),
                    });
                }
            }
            return Ok(id);
        }
        let mut next = self.clone();
        let id = next.push_name(name);
        for p in &parent_ids {
            next.parents[id.0 as usize].push(*p);
            next.children[p.0 as usize].push(id);
        }
        next.compute_ancestors()?;
        next.validate()?;
        *self = next;
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Result<CategoryId, TaxonomyError> {
        self.index.get(name).copied().ok_or_else(|| TaxonomyError::UnknownCategory(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn name(&self, id: CategoryId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn parents(&self, id: CategoryId) -> &[CategoryId] {
        &self.parents[id.0 as usize]
    }

    pub fn children(&self, id: CategoryId) -> &[CategoryId] {
        &self.children[id.0 as usize]
    }

    pub fn disjoint_groups(&self) -> &[Vec<CategoryId>] {
        &self.disjoint_groups
    }

    pub fn is_quality_leaf(&self, id: CategoryId) -> bool {
        self.quality_leaves.contains(&id)
    }

    pub(crate) fn subsumes_id(&self, ancestor: CategoryId, descendant: CategoryId) -> bool {
        self.ancestors[descendant.0 as usize].contains(&ancestor)
    }

    /// Reflexive-transitive isa test.
    pub fn subsumes(&self, ancestor: &str, descendant: &str) -> Result<bool, TaxonomyError> {
        Ok(self.subsumes_id(self.id(ancestor)?, self.id(descendant)?))
    }

    /// Deepest category subsuming all the given ones; ties go to the name
    /// that sorts first.
    pub fn least_common_subsumer(&self, cats: &[CategoryId]) -> Option<CategoryId> {
        let mut common: Option<BTreeSet<CategoryId>> = None;
        for c in cats {
            let anc = &self.ancestors[c.0 as usize];
            common = Some(match common {
                None => anc.clone(),
                Some(acc) => acc.intersection(anc).copied().collect(),
            });
        }
        common?
            .into_iter()
            .max_by(|a, b| {
                let da = self.ancestors[a.0 as usize].len();
                let db = self.ancestors[b.0 as usize].len();
                da.cmp(&db).then_with(|| self.name(*b).cmp(self.name(*a)))
            })
    }
}

/// The bundled taxonomy config.
pub const DEFAULT_TAXONOMY: &str = include_str!("../data/dolce.tax");
