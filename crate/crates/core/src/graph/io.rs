//! CSV ingestion and export of node and edge tables.

use std::collections::HashSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::{Edge, NodeId, Point2D, RoadNetwork};
use crate::error::{Error, Result};

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(ReaderBuilder::new()
        .has_headers(true)
        .trim(Trim::All)
        .flexible(false)
        .from_reader(file))
}

fn check_header(path: &Path, header: &StringRecord, expected: &[&str], optional: &[&str]) -> Result<()> {
    let got: Vec<&str> = header.iter().collect();
    let ok = got.len() >= expected.len()
        && got.len() <= expected.len() + optional.len()
        && got.iter().zip(expected.iter().chain(optional)).all(|(a, b)| a.eq_ignore_ascii_case(b));
    if ok {
        Ok(())
    } else {
        let mut want = expected.join(",");
        if !optional.is_empty() {
            want.push_str(&format!("[,{}]", optional.join(",")));
        }
        Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("header is '{}', expected '{want}'", got.join(",")),
        })
    }
}

fn row_error(path: &Path, rec: &StringRecord, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: rec.position().map_or(0, |p| p.line()),
        message: message.into(),
    }
}

fn csv_row_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

fn field<'a>(path: &Path, rec: &'a StringRecord, i: usize, name: &str) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| row_error(path, rec, format!("missing column '{name}'")))
}

fn parse_u64(path: &Path, rec: &StringRecord, i: usize, name: &str) -> Result<u64> {
    let s = field(path, rec, i, name)?;
    s.parse()
        .map_err(|_| row_error(path, rec, format!("column '{name}': '{s}' is not a non-negative integer")))
}

fn parse_f64(path: &Path, rec: &StringRecord, i: usize, name: &str) -> Result<f64> {
    let s = field(path, rec, i, name)?;
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(row_error(path, rec, format!("column '{name}': '{s}' is not a finite number"))),
    }
}

/// Reads a nodes table with header `id,x,y`.
pub fn read_nodes(path: impl AsRef<Path>) -> Result<Vec<(NodeId, Point2D)>> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_row_error(path, e))?.clone();
    check_header(path, &header, &["id", "x", "y"], &[])?;
    let mut seen = HashSet::new();
    let mut nodes = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_row_error(path, e))?;
        let id = NodeId(parse_u64(path, &rec, 0, "id")?);
        let x = parse_f64(path, &rec, 1, "x")?;
        let y = parse_f64(path, &rec, 2, "y")?;
        if !seen.insert(id) {
            return Err(row_error(path, &rec, format!("duplicate node id {id}")));
        }
        nodes.push((id, Point2D::new(x, y)));
    }
    Ok(nodes)
}

/// Reads a single-column `node_id` table, keeping row order.
pub fn read_node_list(path: impl AsRef<Path>) -> Result<Vec<NodeId>> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_row_error(path, e))?.clone();
    check_header(path, &header, &["node_id"], &[])?;
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| csv_row_error(path, e))?;
            Ok(NodeId(parse_u64(path, &rec, 0, "node_id")?))
        })
        .collect()
}

/// Reads an edges table with header `source,target,length[,edge_id]`,
/// validating endpoints against `known`.
pub fn read_edges(path: impl AsRef<Path>, known: &HashSet<NodeId>) -> Result<Vec<Edge>> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    let header = rdr.headers().map_err(|e| csv_row_error(path, e))?.clone();
    check_header(path, &header, &["source", "target", "length"], &["edge_id"])?;
    let has_id = header.len() == 4;
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_row_error(path, e))?;
        let source = NodeId(parse_u64(path, &rec, 0, "source")?);
        let target = NodeId(parse_u64(path, &rec, 1, "target")?);
        let length = parse_f64(path, &rec, 2, "length")?;
        for (role, id) in [("source", source), ("target", target)] {
            if !known.contains(&id) {
                return Err(row_error(path, &rec, format!("{role} refers to unknown node id {id}")));
            }
        }
        if source == target {
            return Err(row_error(path, &rec, format!("self-loop on node {source}")));
        }
        if length <= 0.0 {
            return Err(row_error(path, &rec, format!("length must be positive, got {length}")));
        }
        let edge_id = match rec.get(3).filter(|_| has_id) {
            Some("") | None => None,
            Some(_) => Some(parse_u64(path, &rec, 3, "edge_id")?),
        };
        edges.push(Edge {
            source,
            target,
            length,
            edge_id,
        });
    }
    Ok(edges)
}

/// Loads a directed road network from its node and edge tables. The network
/// is named after the node file's stem.
pub fn ingest_network(node_file: impl AsRef<Path>, edge_file: impl AsRef<Path>) -> Result<RoadNetwork> {
    let node_file = node_file.as_ref();
    let nodes = read_nodes(node_file)?;
    let known: HashSet<NodeId> = nodes.iter().map(|(id, _)| *id).collect();
    let edges = read_edges(edge_file, &known)?;
    let name = node_file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "network".to_string());
    let net = RoadNetwork::new(name, nodes, edges)?;
    log::info!("ingested {} nodes and {} edges", net.node_count(), net.edge_count());
    Ok(net)
}

/// Writes the network as `id,x,y` and `source,target,length[,edge_id]`
/// tables. Floats use the shortest representation that parses back exactly.
pub fn write_network(net: &RoadNetwork, node_file: impl AsRef<Path>, edge_file: impl AsRef<Path>) -> Result<()> {
    let node_file = node_file.as_ref();
    let edge_file = edge_file.as_ref();
    let mut w = std::io::BufWriter::new(File::create(node_file).map_err(|e| Error::io(node_file, e))?);
    let io = |e| Error::io(node_file, e);
    writeln!(w, "id,x,y").map_err(io)?;
    for (id, p) in net.nodes() {
        writeln!(w, "{id},{},{}", p.x, p.y).map_err(io)?;
    }
    w.flush().map_err(io)?;

    let with_ids = net.edges().iter().any(|e| e.edge_id.is_some());
    let mut w = std::io::BufWriter::new(File::create(edge_file).map_err(|e| Error::io(edge_file, e))?);
    let io = |e| Error::io(edge_file, e);
    writeln!(w, "{}", if with_ids { "source,target,length,edge_id" } else { "source,target,length" }).map_err(io)?;
    for e in net.edges() {
        if with_ids {
            let id = e.edge_id.map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{id}", e.source, e.target, e.length).map_err(io)?;
        } else {
            writeln!(w, "{},{},{}", e.source, e.target, e.length).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    Ok(())
}
