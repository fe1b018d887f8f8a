use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::graphs::Adjacency;
use crate::instance::PerturbedInstance;

/// Which graph a cycle edge is claimed to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    H,
    G,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::H => "H",
            Provenance::G => "G",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" => Ok(Provenance::H),
            "G" => Ok(Provenance::G),
            other => Err(parse_err(0, format!("unknown provenance {other:?}"))),
        }
    }
}

/// A Hamilton cycle: `order[i]` is followed by `order[(i + 1) % n]`, joined
/// by an edge of the graph named in `provenance[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub order: Vec<u32>,
    pub provenance: Vec<Provenance>,
}

impl CycleCertificate {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Cyclic edges `(u, v, provenance)` in cycle order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Provenance)> + '_ {
        let n = self.order.len();
        (0..n).map(move |i| {
            (
                self.order[i] as usize,
                self.order[(i + 1) % n] as usize,
                self.provenance[i],
            )
        })
    }

    /// Certificate file format: `n`, the cycle order on one line, then one
    /// `u v P` line per cyclic edge.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.order.len())?;
        let order: Vec<String> = self.order.iter().map(ToString::to_string).collect();
        writeln!(w, "{}", order.join(" "))?;
        for (u, v, p) in self.edges() {
            writeln!(w, "{u} {v} {p}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, l)) => Ok((i, l?)),
                None => Err(parse_err(
                    0,
                    format!("unexpected end of file, expected {what}"),
                )),
            }
        };
        let (lineno, header) = next("header")?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, "bad vertex count"))?;
        let (lineno, order_line) = next("cycle order")?;
        let order = order_line
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| parse_err(lineno, format!("bad vertex {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if order.len() != n {
            return Err(parse_err(
                lineno,
                format!("expected {n} vertices, found {}", order.len()),
            ));
        }
        let mut provenance = Vec::with_capacity(n);
        for i in 0..n {
            let (lineno, line) = next("edge line")?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [u, v, p] = toks[..] else {
                return Err(parse_err(lineno, "expected `u v P`"));
            };
            let (u, v): (u32, u32) = match (u.parse(), v.parse()) {
                (Ok(u), Ok(v)) => (u, v),
                _ => return Err(parse_err(lineno, "bad vertex id")),
            };
            if u != order[i] || v != order[(i + 1) % n] {
                return Err(parse_err(lineno, "edge does not match the cycle order"));
            }
            provenance.push(
                p.parse()
                    .map_err(|_| parse_err(lineno, format!("bad provenance {p:?}")))?,
            );
        }
        Ok(CycleCertificate { order, provenance })
    }
}

/// Checks a certificate against explicit `H` and `G`: the order is a
/// permutation of `0..n` with `n >= 3`, and every cyclic pair is an edge of
/// the graph its provenance names.
pub fn verify_with<H, G>(cert: &CycleCertificate, host: &H, geometric: &G) -> bool
where
    H: Adjacency + ?Sized,
    G: Adjacency + ?Sized,
{
    let n = host.vertex_count();
    if geometric.vertex_count() != n || cert.order.len() != n || cert.provenance.len() != n || n < 3
    {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in &cert.order {
        let v = v as usize;
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    cert.edges().all(|(u, v, p)| match p {
        Provenance::H => host.has_edge(u, v),
        Provenance::G => geometric.has_edge(u, v),
    })
}

/// [`verify_with`] against the instance's own `H` and `G`.
pub fn verify(cert: &CycleCertificate, instance: &PerturbedInstance) -> bool {
    verify_with(cert, instance.host(), instance.geometric())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;

    fn cert(order: &[u32], prov: &[Provenance]) -> CycleCertificate {
        CycleCertificate {
            order: order.to_vec(),
            provenance: prov.to_vec(),
        }
    }

    #[test]
    fn verify_examples() {
        use Provenance::*;
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = Graph::empty(3);
        assert!(verify_with(&cert(&[0, 1, 2], &[G, G, G]), &h, &g));
        assert!(!verify_with(&cert(&[0, 1, 1], &[G, G, G]), &h, &g));
        // Right edges, wrong provenance.
        assert!(!verify_with(&cert(&[0, 1, 2], &[H, G, G]), &h, &g));

        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = Graph::empty(4);
        assert!(!verify_with(&cert(&[0, 1, 2, 3], &[G; 4]), &h, &g));
        let h = Graph::from_edges(4, [(0, 3)]).unwrap();
        assert!(verify_with(&cert(&[0, 1, 2, 3], &[G, G, G, H]), &h, &g));
        assert!(!verify_with(&cert(&[0, 1, 2], &[G, G, H]), &h, &g));
    }

    #[test]
    fn tiny_graphs_have_no_cycle() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert!(!verify_with(&cert(&[0, 1], &[Provenance::G; 2]), &g, &g));
    }

    #[test]
    fn file_round_trip() {
        use Provenance::*;
        let c = cert(&[2, 0, 1, 3], &[G, H, G, G]);
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "4\n2 0 1 3\n2 0 G\n0 1 H\n1 3 G\n3 2 G\n"
        );
        assert_eq!(CycleCertificate::read_from(&buf[..]).unwrap(), c);
        assert!(CycleCertificate::read_from(&b"3\n0 1 2\n0 1 G\n1 2 G\n0 2 G\n"[..]).is_err());
        assert!(CycleCertificate::read_from(&b"3\n0 1 2\n0 1 G\n1 2 X\n2 0 G\n"[..]).is_err());
    }
}
