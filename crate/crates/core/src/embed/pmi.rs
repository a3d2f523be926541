use super::EmbedError;
use crate::ingest::PairCountTable;
use crate::scalar::Real;

/// Largest community × user matrix the diagnostic will materialize.
pub const MAX_PMI_CELLS: usize = 10_000_000;

/// Dense community × user PMI matrix; zero-count cells hold `-inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct PmiMatrix<F> {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<F>,
}

impl<F: Real> PmiMatrix<F> {
    pub fn get(&self, community: u32, user: u32) -> F {
        self.values[community as usize * self.cols + user as usize]
    }
}

/// `PMI(c, u) = ln(#(c,u) · #total / (#(c) · #(u)))` for every cell.
pub fn pmi_matrix<F: Real>(table: &PairCountTable) -> Result<PmiMatrix<F>, EmbedError> {
    let (rows, cols) = (table.n_communities(), table.n_users());
    let cells = rows.saturating_mul(cols);
    if cells > MAX_PMI_CELLS {
        return Err(EmbedError::TooLarge {
            cells,
            limit: MAX_PMI_CELLS,
        });
    }
    let mut values = vec![F::neg_infinity(); cells];
    let total = F::of_count(table.total());
    for t in table.triples() {
        let num = F::of_count(t.count) * total;
        let den = F::of_count(table.community_totals()[t.community as usize])
            * F::of_count(table.user_totals()[t.user as usize]);
        values[t.community as usize * cols + t.user as usize] = (num / den).ln();
    }
    Ok(PmiMatrix { rows, cols, values })
}
