use std::collections::BTreeMap;
use std::fmt::Write;

use super::ExplanationGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: filled nodes colored by role, gray edges whose pen
/// width scales with weight, one subgraph cluster per co-cluster.
pub fn to_dot(graph: &ExplanationGraph) -> String {
    let mut out = String::from("digraph explanation {\n  rankdir=LR;\n  node [shape=circle];\n");
    let mut by_cluster: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
    for (i, n) in graph.nodes.iter().enumerate() {
        by_cluster.entry(n.cluster).or_default().push(i);
    }
    let node_line = |out: &mut String, indent: &str, i: usize| {
        let n = &graph.nodes[i];
        let _ = writeln!(
            out,
            "{indent}n{i} [label=\"{}\", style=filled, fillcolor={}];",
            escape(&n.text),
            n.role.color()
        );
    };
    for (cluster, members) in &by_cluster {
        match cluster {
            Some(c) => {
                let _ = writeln!(out, "  subgraph cluster_{c} {{");
                let score = graph.selected_clusters.iter().find(|s| s.id == *c);
                match score {
                    Some(s) => {
                        let _ = writeln!(out, "    label=\"cluster {c} (density {:.3})\";", s.score);
                    }
                    None => {
                        let _ = writeln!(out, "    label=\"cluster {c}\";");
                    }
                }
                for &i in members {
                    node_line(&mut out, "    ", i);
                }
                out.push_str("  }\n");
            }
            None => {
                for &i in members {
                    node_line(&mut out, "  ", i);
                }
            }
        }
    }
    let max = graph.edges.iter().map(|e| e.weight).fold(0.0, f64::max);
    for e in &graph.edges {
        let width = if max > 0.0 { 1.0 + 4.0 * e.weight / max } else { 1.0 };
        let _ = writeln!(
            out,
            "  n{} -> n{} [color=gray, penwidth={width:.3}];",
            e.source, e.target
        );
    }
    out.push_str("}\n");
    out
}
