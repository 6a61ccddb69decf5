use morphogrow::oracle::oracle_compare;

use super::{two_segment, CmdError};
use crate::config::RunConfig;
use crate::output::{num, RunDir};

/// `oracle_errors.csv`: one data row per level, then one order row per
/// consecutive pair labelled `coarse:fine`.
pub fn run(cfg: &RunConfig, out: &mut RunDir) -> Result<(), CmdError> {
    let problem = two_segment(cfg)?;
    let table = oracle_compare(&problem, &cfg.oracle.refine)
        .map_err(|e| CmdError::Solver(e.to_string()))?;
    let mut text = String::from("refine,stress_err,nutrient_err,order\n");
    for row in &table.rows {
        text.push_str(&format!(
            "{},{},{},\n",
            row.refine,
            num(row.stress_error),
            num(row.nutrient_error)
        ));
    }
    for (pair, order) in table.rows.windows(2).zip(&table.orders) {
        text.push_str(&format!(
            "{}:{},,,{}\n",
            pair[0].refine,
            pair[1].refine,
            num(*order)
        ));
    }
    out.write("oracle_errors.csv", &text)?;
    Ok(())
}
