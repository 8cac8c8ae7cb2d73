use std::io::{BufRead, Write};

use super::{GraphError, PlantedGraph};

/// Header `# n=<n> p1=<p1> gamma=<gamma> seed=<seed>`, then one `u v` line per
/// edge with `u < v`.
pub fn write_edge_list<W: Write>(mut w: W, g: &PlantedGraph, p1: f64) -> std::io::Result<()> {
    writeln!(w, "# n={} p1={} gamma={} seed={}", g.n(), p1, g.gamma, g.seed)?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(mut w: W, g: &PlantedGraph) -> std::io::Result<()> {
    for &l in &g.labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

/// Header fields and edges of an edge-list file.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub p1: Option<f64>,
    pub gamma: f64,
    pub seed: u64,
    pub edges: Vec<(u32, u32)>,
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<EdgeList, GraphError> {
    let mut out = EdgeList { n: 0, p1: None, gamma: 0.0, seed: 0, edges: Vec::new() };
    let mut have_n = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            for field in header.split_whitespace() {
                let Some((k, v)) = field.split_once('=') else { continue };
                let bad = || GraphError::Parse(format!("bad header field '{field}'"));
                match k {
                    "n" => {
                        out.n = v.parse().map_err(|_| bad())?;
                        have_n = true;
                    }
                    "p1" => out.p1 = Some(v.parse().map_err(|_| bad())?),
                    "gamma" => out.gamma = v.parse().map_err(|_| bad())?,
                    "seed" => out.seed = v.parse().map_err(|_| bad())?,
                    _ => {}
                }
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |s: Option<&str>| -> Result<u32, GraphError> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| GraphError::Parse(format!("line {}: expected 'u v'", lineno + 1)))
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        out.edges.push((u, v));
    }
    if !have_n {
        out.n = out.edges.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    }
    Ok(out)
}

pub fn read_labels<R: BufRead>(r: R) -> Result<Vec<u8>, GraphError> {
    let mut labels = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t {
            "1" => labels.push(1),
            "2" => labels.push(2),
            _ => return Err(GraphError::Parse(format!("line {}: label '{t}'", lineno + 1))),
        }
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = PlantedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], vec![1, 1, 2, 2], 0.5, 9)
            .unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g, 0.5).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n=4 p1=0.5 gamma=0.5 seed=9\n"));
        let e = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(e.n, 4);
        assert_eq!(e.seed, 9);
        let mut lb = Vec::new();
        write_labels(&mut lb, &g).unwrap();
        let labels = read_labels(lb.as_slice()).unwrap();
        let h = PlantedGraph::from_edges(e.n, &e.edges, labels, e.gamma, e.seed).unwrap();
        assert_eq!(g, h);
    }
}
