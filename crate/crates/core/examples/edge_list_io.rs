//! Round-trips DAGs, summary graphs, CPDAGs and data matrices through
//! their text formats.

use relsort::mec::{cpdag, Pdag};
use relsort::scm::{sample_observations, sample_params};
use relsort::{seeded, Dag, DataMatrix, Regime, SummaryGraph};

fn main() -> relsort::Result<()> {
    let g = Dag::parse_edge_list("# a chain with a shortcut\n4\n0 1\n1 2\n2 3\n0 3\n")?;
    let text = g.to_edge_list();
    print!("DAG:\n{text}");
    assert_eq!(Dag::parse_edge_list(&text)?, g);

    let s = SummaryGraph::new(3, &[(0, 1), (1, 0), (1, 2)])?;
    let text = s.to_edge_list();
    print!("summary graph:\n{text}");
    assert_eq!(SummaryGraph::parse_edge_list(&text)?, s);

    let p = cpdag(&g);
    let text = p.to_edge_list();
    print!("CPDAG:\n{text}");
    assert_eq!(Pdag::parse_edge_list(&text)?, p);

    let data = sample_observations(&sample_params(g, &mut seeded(1)), 3, Regime::Raw, &mut seeded(2))?;
    let mut csv = Vec::new();
    data.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("ASCII");
    print!("data:\n{csv}");
    assert_eq!(DataMatrix::read_csv(&csv)?, data);
    Ok(())
}
