use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::perm::{Arrow, Kind, Permutation};

/// An arrow of a generated class, in index form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassArrow {
    pub end: usize,
    pub winner: Letter,
    pub loser: Letter,
}

/// A Rauzy class with its diagram: the closure of a permutation under the
/// top and bottom operations.
///
/// Vertices are stored in BFS order from the seed, the top arrow explored
/// before the bottom one, which fixes a deterministic vertex index.
#[derive(Debug, Clone)]
pub struct RauzyClass {
    alphabet: Arc<Alphabet>,
    vertices: Vec<Permutation>,
    arrows: Vec<[ClassArrow; 2]>,
    index: HashMap<(Vec<Letter>, Vec<Letter>), usize>,
}

impl RauzyClass {
    pub fn generate(seed: &Permutation) -> Result<Self> {
        Self::generate_with_order(seed, false)
    }

    /// Same closure with the exploration order of the two operations
    /// swapped; used as an independent oracle for the BFS order.
    pub fn generate_with_order(seed: &Permutation, bottom_first: bool) -> Result<Self> {
        if !seed.is_irreducible() {
            return Err(Error::Reducible);
        }
        let kinds = if bottom_first {
            [Kind::Bottom, Kind::Top]
        } else {
            [Kind::Top, Kind::Bottom]
        };
        let mut vertices = vec![seed.clone()];
        let mut index = HashMap::new();
        index.insert(Self::key(seed), 0);
        let mut edges: Vec<[Option<ClassArrow>; 2]> = vec![[None, None]];
        let mut next = 0;
        while next < vertices.len() {
            for kind in kinds {
                let arrow = vertices[next].apply_operation(kind)?;
                let end = match index.get(&Self::key(&arrow.end)) {
                    Some(&i) => i,
                    None => {
                        let i = vertices.len();
                        vertices.push(arrow.end.clone());
                        index.insert(Self::key(&arrow.end), i);
                        edges.push([None, None]);
                        i
                    }
                };
                edges[next][Self::slot(kind)] = Some(ClassArrow {
                    end,
                    winner: arrow.winner,
                    loser: arrow.loser,
                });
            }
            next += 1;
        }
        let arrows = edges
            .into_iter()
            .map(|[t, b]| [t.unwrap(), b.unwrap()])
            .collect();
        Ok(RauzyClass {
            alphabet: seed.alphabet().clone(),
            vertices,
            arrows,
            index,
        })
    }

    fn key(p: &Permutation) -> (Vec<Letter>, Vec<Letter>) {
        (p.row(Kind::Top).to_vec(), p.row(Kind::Bottom).to_vec())
    }

    fn slot(kind: Kind) -> usize {
        match kind {
            Kind::Top => 0,
            Kind::Bottom => 1,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: usize) -> &Permutation {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Permutation] {
        &self.vertices
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(&Self::key(p)).copied()
    }

    pub fn arrow(&self, vertex: usize, kind: Kind) -> ClassArrow {
        self.arrows[vertex][Self::slot(kind)]
    }

    /// The arrow as a full [`Arrow`] value.
    pub fn arrow_value(&self, vertex: usize, kind: Kind) -> Arrow {
        let ca = self.arrow(vertex, kind);
        Arrow {
            start: self.vertices[vertex].clone(),
            end: self.vertices[ca.end].clone(),
            kind,
            winner: ca.winner,
            loser: ca.loser,
        }
    }

    /// Number of incoming arrows of each kind per vertex.
    pub fn incoming_counts(&self) -> Vec<[usize; 2]> {
        let mut counts = vec![[0usize; 2]; self.len()];
        for v in 0..self.len() {
            for kind in [Kind::Top, Kind::Bottom] {
                counts[self.arrow(v, kind).end][Self::slot(kind)] += 1;
            }
        }
        counts
    }

    /// DOT export: one node per vertex labeled by its text form, edges
    /// labeled `t:<winner>>|<loser>` / `b:<winner>>|<loser>`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rauzy {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{v}\"];");
        }
        for v in 0..self.len() {
            for kind in [Kind::Top, Kind::Bottom] {
                let a = self.arrow(v, kind);
                let _ = writeln!(
                    out,
                    "  v{} -> v{} [label=\"{}:{}>|{}\"];",
                    v,
                    a.end,
                    kind.as_char(),
                    self.alphabet.name(a.winner),
                    self.alphabet.name(a.loser),
                );
            }
        }
        out.push_str("}\n");
        out
    }
}
