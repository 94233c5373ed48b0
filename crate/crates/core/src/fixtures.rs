//! Embedded single-item example: four bidders, integer bids 0..=3, and two
//! tabulated rebate functions `r` and `r'` on the sorted other bids.
//! `t' = VCG + r'` welfare dominates `t = VCG + r` without dominating it.

use crate::mechanism::RebateTable;
use crate::profile::GridSpec;
use crate::rational::{int, Rational};
use crate::setting::{AuctionSetting, Setting};

/// One table row: sorted other bids, `r` as `(num, den)`, `r'` as `(num, den)`.
pub type FixtureRow = ([i64; 3], (i64, i64), (i64, i64));

pub const TABLE_ROWS: [FixtureRow; 20] = [
    ([0, 0, 0], (0, 1), (0, 1)),
    ([1, 0, 0], (0, 1), (0, 1)),
    ([1, 1, 0], (1, 4), (1, 4)),
    ([1, 1, 1], (1, 4), (1, 4)),
    ([2, 0, 0], (0, 1), (0, 1)),
    ([2, 1, 0], (1, 12), (7, 24)),
    ([2, 1, 1], (0, 1), (1, 6)),
    ([2, 2, 0], (1, 2), (1, 2)),
    ([2, 2, 1], (0, 1), (1, 4)),
    ([2, 2, 2], (1, 2), (1, 2)),
    ([3, 0, 0], (0, 1), (0, 1)),
    ([3, 1, 0], (1, 4), (1, 4)),
    ([3, 1, 1], (0, 1), (1, 4)),
    ([3, 2, 0], (2, 3), (2, 3)),
    ([3, 2, 1], (1, 1), (19, 24)),
    ([3, 2, 2], (0, 1), (1, 6)),
    ([3, 3, 0], (2, 3), (5, 6)),
    ([3, 3, 1], (0, 1), (7, 12)),
    ([3, 3, 2], (1, 1), (5, 6)),
    ([3, 3, 3], (0, 1), (1, 2)),
];

pub fn table_auction() -> AuctionSetting {
    AuctionSetting::new(4, 1, int(0), int(3)).expect("fixture setting is valid")
}

pub fn table_setting() -> Setting {
    table_auction().into()
}

pub fn table_grid() -> GridSpec {
    GridSpec::new(&table_setting(), (0..=3).map(int).collect()).expect("fixture grid is valid")
}

fn table(pick: impl Fn(&FixtureRow) -> (i64, i64)) -> RebateTable {
    RebateTable::from_entries(TABLE_ROWS.iter().map(|row| {
        let (p, q) = pick(row);
        (
            row.0.iter().map(|&v| int(v)).collect::<Vec<_>>(),
            Rational::new(p.into(), q.into()),
        )
    }))
    .expect("fixture keys share one length")
}

/// The dominated rebate `r`.
pub fn table_r() -> RebateTable {
    table(|row| row.1)
}

/// The welfare-improving rebate `r'`.
pub fn table_r_prime() -> RebateTable {
    table(|row| row.2)
}
