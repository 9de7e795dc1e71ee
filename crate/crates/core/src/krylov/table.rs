use rayon::prelude::*;

use super::{gmres, LinearOperator};
use crate::schur::Preconditioner;

/// One system of an iteration-count sweep with a preconditioner per column.
/// `None` stands for the identity.
pub struct TableRow<'a> {
    pub label: String,
    pub op: &'a dyn LinearOperator,
    pub rhs: Vec<f64>,
    pub preconditioners: Vec<Option<Preconditioner>>,
}

/// GMRES iteration counts; `None` marks a cell that did not converge.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub cells: Vec<Vec<Option<usize>>>,
    pub tol: f64,
    pub maxit: usize,
}

/// Runs every (row, column) solve; cells run concurrently but land in order.
/// Solver errors and non-convergence both become the sentinel.
pub fn iteration_count_matrix(
    col_labels: &[String],
    rows: &[TableRow<'_>],
    tol: f64,
    maxit: usize,
) -> CountTable {
    let jobs: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.preconditioners.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Option<usize>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let row = &rows[i];
            match gmres(row.op, row.preconditioners[j].as_ref(), &row.rhs, tol, maxit) {
                Ok((_, st)) if st.converged => Some(st.iterations),
                _ => None,
            }
        })
        .collect();
    let mut cells: Vec<Vec<Option<usize>>> =
        rows.iter().map(|r| Vec::with_capacity(r.preconditioners.len())).collect();
    for (&(i, _), v) in jobs.iter().zip(results) {
        cells[i].push(v);
    }
    CountTable {
        row_labels: rows.iter().map(|r| r.label.clone()).collect(),
        col_labels: col_labels.to_vec(),
        cells,
        tol,
        maxit,
    }
}

impl CountTable {
    fn cell_text(&self, c: Option<usize>) -> String {
        c.map_or_else(|| format!(">{}", self.maxit), |v| v.to_string())
    }

    /// Header `label,<columns>` followed by one line per row.
    pub fn to_csv(&self, corner: &str) -> String {
        let mut out = format!("{corner},{}\n", self.col_labels.join(","));
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let cells: Vec<String> = row.iter().map(|&c| self.cell_text(c)).collect();
            out.push_str(&format!("{label},{}\n", cells.join(",")));
        }
        out
    }

    /// Pipe table with right-aligned, width-padded columns.
    pub fn to_markdown(&self, corner: &str) -> String {
        let mut grid: Vec<Vec<String>> = vec![std::iter::once(corner.to_string())
            .chain(self.col_labels.iter().cloned())
            .collect()];
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            grid.push(
                std::iter::once(label.clone())
                    .chain(row.iter().map(|&c| self.cell_text(c)))
                    .collect(),
            );
        }
        let ncol = grid.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..ncol)
            .map(|j| grid.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0).max(3))
            .collect();
        let line = |r: &Vec<String>| {
            let cells: Vec<String> = (0..ncol)
                .map(|j| format!("{:>w$}", r.get(j).map_or("", String::as_str), w = widths[j]))
                .collect();
            format!("| {} |\n", cells.join(" | "))
        };
        let mut out = line(&grid[0]);
        let rule: Vec<String> = widths.iter().map(|w| format!("{}:", "-".repeat(w - 1))).collect();
        out.push_str(&format!("| {} |\n", rule.join(" | ")));
        for r in &grid[1..] {
            out.push_str(&line(r));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{assemble, random_system, SystemOptions};
    use crate::dense::DenseMatrix;
    use crate::schur::{make_nested, nested_chain, Preset};

    #[test]
    fn identity_table() {
        let a = DenseMatrix::identity(4);
        let rows = [TableRow {
            label: "I".into(),
            op: &a,
            rhs: vec![1.0; 4],
            preconditioners: vec![None],
        }];
        let t = iteration_count_matrix(&["none".into()], &rows, 1e-8, 10);
        assert_eq!(t.cells, vec![vec![Some(1)]]);
        assert_eq!(t.to_csv("sys"), "sys,none\nI,1\n");
    }

    #[test]
    fn exact_presets_respect_degree_bounds() {
        let labels = vec!["P1".to_string(), "PD1".to_string()];
        let mut systems = Vec::new();
        for seed in 0..4 {
            let opts = SystemOptions::new(vec![6, 5, 4], seed).zero_tail(true);
            let sys = random_system(&opts).unwrap();
            let chain = nested_chain(&sys).unwrap();
            let p1 = make_nested(&Preset::P1.spec(), &sys, &chain).unwrap();
            let pd1 = make_nested(&Preset::PD1.spec(), &sys, &chain).unwrap();
            systems.push((assemble(&sys), vec![Some(p1), Some(pd1)]));
        }
        let rows: Vec<TableRow> = systems
            .iter()
            .enumerate()
            .map(|(i, (a, p))| TableRow {
                label: format!("s{i}"),
                op: a,
                rhs: (0..a.rows()).map(|k| 1.0 + k as f64).collect(),
                preconditioners: p.clone(),
            })
            .collect();
        let t = iteration_count_matrix(&labels, &rows, 1e-12, 50);
        for row in &t.cells {
            assert!(row[0].unwrap() <= 3, "{row:?}");
            assert!(row[1].unwrap() <= 6, "{row:?}");
        }
    }

    #[test]
    fn sentinel_and_markdown() {
        let t = CountTable {
            row_labels: vec!["16".into()],
            col_labels: vec!["A".into(), "B".into()],
            cells: vec![vec![Some(12), None]],
            tol: 1e-8,
            maxit: 500,
        };
        assert_eq!(t.to_csv("N"), "N,A,B\n16,12,>500\n");
        let md = t.to_markdown("N");
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "|   N |   A |    B |");
        assert_eq!(lines[2], "|  16 |  12 | >500 |");
    }
}
