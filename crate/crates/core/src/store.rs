//! ELO repository: objects, the ordered re-use DAG, and registries.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::elo::{Elo, EloError, VocabField};
use crate::ids::EloId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("ELO {0} not found")]
    NotFound(EloId),
    #[error("attaching {child} under {parent} would create a cycle")]
    Cycle { parent: EloId, child: EloId },
    #[error("{child} is already a child of {parent}")]
    DuplicateChild { parent: EloId, child: EloId },
    #[error("{0}: invalid vocabulary value")]
    Vocab(String),
    #[error(transparent)]
    Elo(#[from] EloError),
}

/// Kinds of auxiliary registries that ELOs reference by identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegistryKind {
    Glossary,
    Bibliography,
    Taxonomy,
    Person,
}

impl RegistryKind {
    pub const ALL: [RegistryKind; 4] = [
        RegistryKind::Glossary,
        RegistryKind::Bibliography,
        RegistryKind::Taxonomy,
        RegistryKind::Person,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegistryKind::Glossary => "glossary",
            RegistryKind::Bibliography => "bibliography",
            RegistryKind::Taxonomy => "taxonomy",
            RegistryKind::Person => "person",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn refs(self, elo: &Elo) -> &[String] {
        match self {
            RegistryKind::Glossary => &elo.refs.glossary,
            RegistryKind::Bibliography => &elo.refs.bibliography,
            RegistryKind::Taxonomy => &elo.refs.taxonomy,
            RegistryKind::Person => &elo.refs.person,
        }
    }
}

/// Opaque registry entry; only its label is modeled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistryEntry {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingRef {
    pub elo: EloId,
    pub kind: RegistryKind,
    pub reference: String,
}

/// One node of a [`TreeView`]. A re-used ELO yields one node per root path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub id: EloId,
    pub depth: usize,
    /// Child ordinals from the root, e.g. `[1, 0]` is the first child of the
    /// root's second child.
    pub path: Vec<usize>,
    pub children: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeView {
    pub root: TreeNode,
}

impl TreeView {
    /// Preorder flattening of the view.
    pub fn flatten(&self) -> Vec<&TreeNode> {
        fn walk<'a>(n: &'a TreeNode, out: &mut Vec<&'a TreeNode>) {
            out.push(n);
            for c in &n.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Repository {
    elos: BTreeMap<EloId, Elo>,
    children: BTreeMap<EloId, Vec<EloId>>,
    registries: BTreeMap<RegistryKind, BTreeMap<String, RegistryEntry>>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces an ELO. The structure is not touched.
    pub fn put_elo(&mut self, elo: Elo) -> Result<(), StoreError> {
        elo.check_structure()?;
        self.elos.insert(elo.id.clone(), elo);
        Ok(())
    }

    pub fn get_elo(&self, id: &EloId) -> Result<&Elo, StoreError> {
        self.elos.get(id).ok_or_else(|| StoreError::NotFound(id.clone()))
    }

    pub fn contains(&self, id: &EloId) -> bool {
        self.elos.contains_key(id)
    }

    pub fn elos(&self) -> impl Iterator<Item = &Elo> {
        self.elos.values()
    }

    pub fn len(&self) -> usize {
        self.elos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elos.is_empty()
    }

    /// Removes an ELO and every edge touching it.
    pub fn remove_elo(&mut self, id: &EloId) -> Result<Elo, StoreError> {
        let elo = self
            .elos
            .remove(id)
            .ok_or_else(|| StoreError::NotFound(id.clone()))?;
        self.children.remove(id);
        for kids in self.children.values_mut() {
            kids.retain(|k| k != id);
        }
        self.children.retain(|_, kids| !kids.is_empty());
        Ok(elo)
    }

    pub fn children(&self, id: &EloId) -> &[EloId] {
        self.children.get(id).map(Vec::as_slice).unwrap_or_default()
    }

    pub fn parents(&self, id: &EloId) -> Vec<&EloId> {
        self.children
            .iter()
            .filter(|(_, kids)| kids.contains(id))
            .map(|(p, _)| p)
            .collect()
    }

    /// ELOs without a parent, in id order.
    pub fn roots(&self) -> Vec<&EloId> {
        let with_parent: BTreeSet<&EloId> = self.children.values().flatten().collect();
        self.elos.keys().filter(|id| !with_parent.contains(id)).collect()
    }

    /// All parent → ordered child lists.
    pub fn edges(&self) -> impl Iterator<Item = (&EloId, &[EloId])> {
        self.children.iter().map(|(p, c)| (p, c.as_slice()))
    }

    fn is_ancestor_or_self(&self, candidate: &EloId, of: &EloId) -> bool {
        let mut stack = vec![candidate];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == of {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.children(n));
            }
        }
        false
    }

    /// Inserts `child` into `parent`'s ordered child list at `position`,
    /// clamped to the list length.
    pub fn attach_child(
        &mut self,
        parent: &EloId,
        child: &EloId,
        position: usize,
    ) -> Result<(), StoreError> {
        for id in [parent, child] {
            if !self.contains(id) {
                return Err(StoreError::NotFound(id.clone()));
            }
        }
        if self.is_ancestor_or_self(child, parent) {
            return Err(StoreError::Cycle {
                parent: parent.clone(),
                child: child.clone(),
            });
        }
        let kids = self.children.entry(parent.clone()).or_default();
        if kids.contains(child) {
            return Err(StoreError::DuplicateChild {
                parent: parent.clone(),
                child: child.clone(),
            });
        }
        kids.insert(position.min(kids.len()), child.clone());
        Ok(())
    }

    pub fn detach_child(&mut self, parent: &EloId, child: &EloId) -> Result<(), StoreError> {
        let kids = self
            .children
            .get_mut(parent)
            .ok_or_else(|| StoreError::NotFound(parent.clone()))?;
        let before = kids.len();
        kids.retain(|k| k != child);
        if kids.len() == before {
            return Err(StoreError::NotFound(child.clone()));
        }
        if kids.is_empty() {
            self.children.remove(parent);
        }
        Ok(())
    }

    /// Depth-first, non-normalised expansion of the structure below `root`.
    pub fn tree_view(&self, root: &EloId, max_depth: Option<usize>) -> Result<TreeView, StoreError> {
        if !self.contains(root) {
            return Err(StoreError::NotFound(root.clone()));
        }
        fn expand(repo: &Repository, id: &EloId, path: Vec<usize>, max: Option<usize>) -> TreeNode {
            let depth = path.len();
            let children = if max.is_some_and(|m| depth >= m) {
                Vec::new()
            } else {
                repo.children(id)
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let mut p = path.clone();
                        p.push(i);
                        expand(repo, c, p, max)
                    })
                    .collect()
            };
            TreeNode {
                id: id.clone(),
                depth,
                path,
                children,
            }
        }
        Ok(TreeView {
            root: expand(self, root, Vec::new(), max_depth),
        })
    }

    /// Preorder access path below `root`; re-used ELOs repeat.
    pub fn linearize(&self, root: &EloId) -> Result<Vec<EloId>, StoreError> {
        let view = self.tree_view(root, None)?;
        Ok(view.flatten().into_iter().map(|n| n.id.clone()).collect())
    }

    /// Keeps ids whose difficulty is at most `ceiling`; unrated ELOs are kept.
    pub fn filter_by_difficulty(&self, ids: &[EloId], ceiling: &str) -> Result<Vec<EloId>, StoreError> {
        let scale = VocabField::Difficulty;
        let limit = scale
            .rank(ceiling)
            .ok_or_else(|| StoreError::Vocab(scale.name().into()))?;
        Ok(ids
            .iter()
            .filter(|id| {
                let rated = self
                    .elos
                    .get(*id)
                    .and_then(|e| e.metadata.difficulty.as_deref())
                    .and_then(|d| scale.rank(d));
                rated.is_none_or(|r| r <= limit)
            })
            .cloned()
            .collect())
    }

    pub fn put_registry_entry(&mut self, kind: RegistryKind, entry: RegistryEntry) {
        self.registries.entry(kind).or_default().insert(entry.id.clone(), entry);
    }

    pub fn registry(&self, kind: RegistryKind) -> impl Iterator<Item = &RegistryEntry> {
        self.registries.get(&kind).into_iter().flat_map(|m| m.values())
    }

    /// Reference identifiers that do not resolve against the registries.
    pub fn dangling_refs(&self) -> Vec<DanglingRef> {
        let mut out = Vec::new();
        for elo in self.elos.values() {
            for kind in RegistryKind::ALL {
                for r in kind.refs(elo) {
                    let known = self.registries.get(&kind).is_some_and(|m| m.contains_key(r));
                    if !known {
                        out.push(DanglingRef {
                            elo: elo.id.clone(),
                            kind,
                            reference: r.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}
