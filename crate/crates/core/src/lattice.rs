//! Hypercubic lattices, site orderings and link classes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Lexicographic with axis 1 fastest.
    RowMajorLex,
    /// Boustrophedon: each row, plane, ... alternates direction.
    Snake,
}

impl std::str::FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row_major_lex" | "row_major" => Ok(Ordering::RowMajorLex),
            "snake" => Ok(Ordering::Snake),
            _ => Err(Error::InvalidArgument(format!("unknown ordering `{s}`"))),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            _ => Err(Error::InvalidArgument(format!("unknown boundary `{s}`"))),
        }
    }
}

/// `L^d` sites with 1-based indices and 1-based coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub dims: usize,
    pub extent: usize,
    pub boundary: Boundary,
    pub ordering: Ordering,
}

/// Direction and kind of a nearest-neighbour link. For `d = 2` with the
/// lexicographic ordering, `(1, false)`, `(1, true)`, `(2, false)`,
/// `(2, true)` are the four colour classes of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkClass {
    pub axis: usize,
    pub wrap: bool,
}

impl fmt::Display for LinkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.wrap {
            write!(f, "axis{}-wrap", self.axis)
        } else {
            write!(f, "axis{}", self.axis)
        }
    }
}

/// Undirected link with `lower < upper` (site indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub lower: usize,
    pub upper: usize,
    pub class: LinkClass,
}

impl LatticeGeometry {
    pub fn new(dims: usize, extent: usize, boundary: Boundary, ordering: Ordering) -> Result<Self> {
        if dims == 0 || extent == 0 {
            return Err(Error::InvalidArgument(format!(
                "lattice needs d >= 1 and L >= 1, got d={dims}, L={extent}"
            )));
        }
        if extent.checked_pow(dims as u32).is_none_or(|n| n > 1 << 24) {
            return Err(Error::InvalidArgument(format!(
                "lattice {extent}^{dims} is too large"
            )));
        }
        Ok(LatticeGeometry {
            dims,
            extent,
            boundary,
            ordering,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.extent.pow(self.dims as u32)
    }

    pub fn site_index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dims {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.dims,
                coords.len()
            )));
        }
        for &c in coords {
            if c == 0 || c > self.extent {
                return Err(Error::IndexOutOfRange {
                    what: "coordinate",
                    index: c,
                    limit: self.extent,
                });
            }
        }
        Ok(match self.ordering {
            Ordering::RowMajorLex => {
                let mut idx = 0;
                for &c in coords.iter().rev() {
                    idx = idx * self.extent + (c - 1);
                }
                idx + 1
            }
            Ordering::Snake => snake_index(coords, self.extent),
        })
    }

    pub fn site_coords(&self, index: usize) -> Result<Vec<usize>> {
        let n = self.num_sites();
        if index == 0 || index > n {
            return Err(Error::IndexOutOfRange {
                what: "site",
                index,
                limit: n,
            });
        }
        Ok(match self.ordering {
            Ordering::RowMajorLex => {
                let mut r = index - 1;
                (0..self.dims)
                    .map(|_| {
                        let c = r % self.extent + 1;
                        r /= self.extent;
                        c
                    })
                    .collect()
            }
            Ordering::Snake => snake_coords(index, self.dims, self.extent),
        })
    }

    /// All nearest-neighbour links, each once, sorted by class (axis, then
    /// interior before wrap) and then by `(lower, upper)`.
    ///
    /// For `L = 2` the periodic wrap link coincides with the interior one and
    /// is not repeated; for `L = 1` there are no links.
    pub fn classify_links(&self) -> Vec<Link> {
        let l = self.extent;
        let mut links = Vec::new();
        if l < 2 {
            return links;
        }
        for idx in 1..=self.num_sites() {
            let coords = self.site_coords(idx).expect("index in range");
            for axis in 1..=self.dims {
                let c = coords[axis - 1];
                let (other, wrap) = if c < l {
                    (c + 1, false)
                } else if self.boundary == Boundary::Periodic && l > 2 {
                    (1, true)
                } else {
                    continue;
                };
                let mut nb = coords.clone();
                nb[axis - 1] = other;
                let j = self.site_index(&nb).expect("neighbour in range");
                links.push(Link {
                    lower: idx.min(j),
                    upper: idx.max(j),
                    class: LinkClass { axis, wrap },
                });
            }
        }
        links.sort_by_key(|k| (k.class, k.lower, k.upper));
        links
    }

    /// True if `a` and `b` share a link.
    pub fn are_neighbors(&self, a: usize, b: usize) -> Result<bool> {
        let ca = self.site_coords(a)?;
        let cb = self.site_coords(b)?;
        let mut diff_axes = 0;
        let mut adjacent = true;
        for (x, y) in ca.iter().zip(&cb) {
            if x == y {
                continue;
            }
            diff_axes += 1;
            let d = x.abs_diff(*y);
            let wrap = self.boundary == Boundary::Periodic && d == self.extent - 1 && self.extent > 2;
            adjacent &= d == 1 || wrap;
        }
        Ok(diff_axes == 1 && adjacent)
    }

    /// Class of the link between two neighbouring sites.
    pub fn link_class(&self, a: usize, b: usize) -> Result<LinkClass> {
        if a != b && !self.are_neighbors(a, b)? {
            return Err(Error::InvalidArgument(format!("sites {a} and {b} are not neighbours")));
        }
        let ca = self.site_coords(a)?;
        let cb = self.site_coords(b)?;
        for (k, (x, y)) in ca.iter().zip(&cb).enumerate() {
            if x != y {
                return Ok(LinkClass {
                    axis: k + 1,
                    wrap: x.abs_diff(*y) != 1,
                });
            }
        }
        Err(Error::InvalidArgument(format!("sites {a} and {b} coincide")))
    }
}

fn snake_index(coords: &[usize], l: usize) -> usize {
    let d = coords.len();
    if d == 1 {
        return coords[0];
    }
    let block = l.pow(d as u32 - 1);
    let inner = snake_index(&coords[..d - 1], l);
    let nd = coords[d - 1];
    let within = if nd % 2 == 1 { inner } else { block + 1 - inner };
    (nd - 1) * block + within
}

fn snake_coords(index: usize, d: usize, l: usize) -> Vec<usize> {
    if d == 1 {
        return vec![index];
    }
    let block = l.pow(d as u32 - 1);
    let nd = (index - 1) / block + 1;
    let r = index - (nd - 1) * block;
    let inner = if nd % 2 == 1 { r } else { block + 1 - r };
    let mut c = snake_coords(inner, d - 1, l);
    c.push(nd);
    c
}
