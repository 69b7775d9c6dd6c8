use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::GridSpec;

/// Distinct node indices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct RegionSpec {
    nodes: Vec<usize>,
}

impl TryFrom<Vec<usize>> for RegionSpec {
    type Error = Error;

    fn try_from(nodes: Vec<usize>) -> Result<Self> {
        RegionSpec::new(nodes)
    }
}

impl From<RegionSpec> for Vec<usize> {
    fn from(r: RegionSpec) -> Vec<usize> {
        r.nodes
    }
}

impl RegionSpec {
    pub fn new(mut nodes: Vec<usize>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidRegion("region is empty".into()));
        }
        let n = nodes.len();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.len() != n {
            return Err(Error::InvalidRegion("region repeats a node".into()));
        }
        Ok(RegionSpec { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn check_range(&self, n_b: usize) -> Result<()> {
        match self.nodes.last() {
            Some(&i) if i >> n_b != 0 => Err(Error::InvalidRegion(format!(
                "node {i} outside a {n_b}-qubit register"
            ))),
            _ => Ok(()),
        }
    }

    /// Drops the higher index of every complete pair `{2k, 2k+1}`.
    /// Returns the pruned region and the dropped nodes.
    pub fn pruned(&self) -> (RegionSpec, Vec<usize>) {
        let (keep, drop): (Vec<usize>, Vec<usize>) = self
            .nodes
            .iter()
            .partition(|&&i| i % 2 == 0 || !self.nodes.contains(&(i - 1)));
        (RegionSpec { nodes: keep }, drop)
    }
}

/// Region file contents: a node list or a grid shorthand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionFile {
    Nodes(Vec<usize>),
    Shape(RegionShape),
}

/// Grid-relative shorthands; coordinates are `(col, row)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum RegionShape {
    /// `[col0, row0, width, height]`.
    Rect([usize; 4]),
    /// `[row]`: every column of one row.
    Row([usize; 1]),
    /// `[col]`: every row of one column.
    Col([usize; 1]),
    /// `[]`: cells with `col == row`.
    Diag([usize; 0]),
}

impl RegionFile {
    pub fn resolve(&self, grid: &GridSpec) -> Result<RegionSpec> {
        let nodes = match self {
            RegionFile::Nodes(n) => n.clone(),
            RegionFile::Shape(shape) => shape
                .cells(grid)?
                .into_iter()
                .map(|(c, r)| grid.index(c, r))
                .collect(),
        };
        let region = RegionSpec::new(nodes)?;
        region.check_range(grid.n_b())?;
        Ok(region)
    }
}

impl RegionShape {
    fn cells(&self, g: &GridSpec) -> Result<Vec<(usize, usize)>> {
        let out_of_grid =
            || Error::InvalidRegion(format!("shape {self:?} leaves the {}x{} grid", g.nx, g.ny));
        Ok(match *self {
            RegionShape::Rect([c0, r0, w, h]) => {
                if w == 0 || h == 0 || c0 + w > g.nx || r0 + h > g.ny {
                    return Err(out_of_grid());
                }
                (c0..c0 + w)
                    .flat_map(|c| (r0..r0 + h).map(move |r| (c, r)))
                    .collect()
            }
            RegionShape::Row([r]) => {
                if r >= g.ny {
                    return Err(out_of_grid());
                }
                (0..g.nx).map(|c| (c, r)).collect()
            }
            RegionShape::Col([c]) => {
                if c >= g.nx {
                    return Err(out_of_grid());
                }
                (0..g.ny).map(|r| (c, r)).collect()
            }
            RegionShape::Diag([]) => (0..g.nx.min(g.ny)).map(|i| (i, i)).collect(),
        })
    }
}
