//! Reading input graphs and writing outputs.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use netcompare::{read_edge_list, Graph};

use crate::commands::CliError;

/// Sidecar path holding the `id<TAB>label` mapping of a remapped edge list.
pub fn labels_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_os_string();
    name.push(".labels.tsv");
    data.with_file_name(name)
}

fn is_dense_integer_list(text: &str) -> bool {
    let mut has_header = false;
    for line in text.lines() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            has_header |= comment.trim().starts_with("n=");
            continue;
        }
        if line
            .split_whitespace()
            .any(|tok| tok.parse::<usize>().is_err())
        {
            return false;
        }
    }
    has_header
}

/// Reads an edge list. Files with an `# n=N` header and integer ids are read
/// as is; anything else has its labels mapped to dense ids in order of first
/// appearance, and the mapping is written next to the input.
pub fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    if is_dense_integer_list(&text) {
        return read_edge_list(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())));
    }
    let (graph, labels) =
        remap_labels(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut sidecar = String::from("id\tlabel\n");
    for (id, label) in labels.iter().enumerate() {
        sidecar.push_str(&format!("{id}\t{label}\n"));
    }
    let side = labels_path(path);
    std::fs::write(&side, sidecar)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", side.display())))?;
    Ok(graph)
}

/// Graph plus labels indexed by dense id.
pub fn remap_labels(text: &str) -> netcompare::Result<(Graph, Vec<String>)> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |label: &str| -> usize {
        *ids.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [a] => {
                intern(a);
            }
            [a, b] => {
                if a == b {
                    return Err(netcompare::Error::Parse {
                        line: line_no,
                        message: format!("self-loop on {a}"),
                    });
                }
                edges.push((intern(a), intern(b)));
            }
            _ => {
                return Err(netcompare::Error::Parse {
                    line: line_no,
                    message: format!("expected two fields, found {}", fields.len()),
                })
            }
        }
    }
    let graph = Graph::from_edges(labels.len(), edges)?;
    Ok((graph, labels))
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| {
                    CliError::config(format!("cannot create {}: {e}", dir.display()))
                })?;
            }
            std::fs::write(path, content)
                .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::config(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Serializes records to CSV text.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(CliError::internal)?;
    for row in rows {
        w.write_record(row).map_err(CliError::internal)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::internal(e.into_error()))?;
    String::from_utf8(bytes).map_err(CliError::internal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lists_need_a_header_to_be_read_verbatim() {
        assert!(is_dense_integer_list("# n=3\n0\t1\n"));
        assert!(!is_dense_integer_list("0\t1\n"));
        assert!(!is_dense_integer_list("# n=3\nalice\tbob\n"));
    }

    #[test]
    fn labels_are_assigned_in_order_of_appearance() {
        let (g, labels) = remap_labels("# social\nbob\talice\nalice carol\ndave\n").unwrap();
        assert_eq!(labels, vec!["bob", "alice", "carol", "dave"]);
        assert_eq!(g.node_count(), 4);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
        assert_eq!(g.degree(3), 0);
    }

    #[test]
    fn remapped_self_loop_reports_its_line() {
        let err = remap_labels("a\tb\nc\tc\n").unwrap_err();
        assert_eq!(
            err,
            netcompare::Error::Parse {
                line: 2,
                message: "self-loop on c".into()
            }
        );
    }

    #[test]
    fn sidecar_sits_next_to_the_input() {
        assert_eq!(
            labels_path(Path::new("/x/y/net.tsv")),
            PathBuf::from("/x/y/net.tsv.labels.tsv")
        );
    }
}
