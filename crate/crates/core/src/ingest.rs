//! SNAP-style edge lists in, community assignments out.
//!
//! Input lines are `u v` or `u v w`, separated by tabs or spaces; lines
//! starting with `#` are comments. Raw ids get dense ids in order of first
//! appearance. Each undirected edge is expected once; [`Graph::build`]
//! adds the reverse arc.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, WeightedEdge};
use crate::partition::Partition;

pub type RawId = u64;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawEdgeList {
    /// Edges over dense ids.
    pub edges: Vec<WeightedEdge>,
    pub id_map: HashMap<RawId, VertexId>,
    /// Dense id to raw id.
    pub reverse_map: Vec<RawId>,
}

impl RawEdgeList {
    pub fn num_vertices(&self) -> usize {
        self.reverse_map.len()
    }

    fn intern(&mut self, raw: RawId) -> VertexId {
        let next = self.reverse_map.len() as VertexId;
        *self.id_map.entry(raw).or_insert_with(|| {
            self.reverse_map.push(raw);
            next
        })
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Graph::build(self.num_vertices(), &self.edges)
    }

    pub fn dense_id(&self, raw: RawId) -> Option<VertexId> {
        self.id_map.get(&raw).copied()
    }
}

fn parse_id(token: &str, line: usize) -> Result<RawId> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid vertex id {token:?}"),
    })
}

pub fn parse_snap<R: BufRead>(reader: R) -> Result<RawEdgeList> {
    let mut out = RawEdgeList::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(u), Some(v)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected at least two columns".into(),
            });
        };
        let u = parse_id(u, line_no)?;
        let v = parse_id(v, line_no)?;
        let w = match tokens.next() {
            None => 1.0,
            Some(t) => match t.parse::<f64>() {
                Ok(w) if w.is_finite() => w,
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("invalid weight {t:?}"),
                    })
                }
            },
        };
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "too many columns".into(),
            });
        }
        let u = out.intern(u);
        let v = out.intern(v);
        out.edges.push((u, v, w));
    }
    Ok(out)
}

/// Writes edges back in SNAP form over raw ids; unit weights get no weight
/// column.
pub fn write_edge_list<W: Write>(edges: &RawEdgeList, mut sink: W) -> Result<()> {
    for &(u, v, w) in &edges.edges {
        let (u, v) = (edges.reverse_map[u as usize], edges.reverse_map[v as usize]);
        if w == 1.0 {
            writeln!(sink, "{u}\t{v}")?;
        } else {
            writeln!(sink, "{u}\t{v}\t{w:?}")?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// One `raw_id\tcommunity` line per vertex, sorted by raw id.
pub fn write_assignment<W: Write>(
    partition: &Partition,
    reverse_map: &[RawId],
    mut sink: W,
) -> Result<()> {
    if partition.len() != reverse_map.len() {
        return Err(Error::SizeMismatch {
            partition: partition.len(),
            graph: reverse_map.len(),
        });
    }
    let mut rows: Vec<(RawId, u32)> = reverse_map
        .iter()
        .copied()
        .zip(partition.assignment().iter().copied())
        .collect();
    rows.sort_unstable();
    let mut buf = String::with_capacity(rows.len() * 12);
    for (raw, c) in rows {
        use std::fmt::Write as _;
        let _ = writeln!(buf, "{raw}\t{c}");
    }
    sink.write_all(buf.as_bytes())?;
    sink.flush()?;
    Ok(())
}

/// Reads an assignment written by [`write_assignment`] back onto the dense
/// ids of `edges`. Every vertex must be assigned exactly once.
pub fn read_assignment<R: BufRead>(reader: R, edges: &RawEdgeList) -> Result<Partition> {
    let n = edges.num_vertices();
    let mut labels: Vec<Option<u32>> = vec![None; n];
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(raw), Some(c), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected `vertex community`".into(),
            });
        };
        let raw = parse_id(raw, line_no)?;
        let c: u32 = c.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid community id {c:?}"),
        })?;
        let v = edges.dense_id(raw).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("vertex {raw} is not in the graph"),
        })?;
        if labels[v as usize].replace(c).is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("vertex {raw} assigned twice"),
            });
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| {
            l.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("vertex {} has no community", edges.reverse_map[v]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::from_labels(labels))
}
