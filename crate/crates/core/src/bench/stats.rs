//! A scaled-down copy of the Stack Exchange STATS schema.

use super::generate::{PlanColumn, PlanTable, Values};
use crate::catalog::TableRef;

/// Full-size row counts; they add up to 1,029,842.
const TABLES: &[(&str, u64)] = &[
    ("users", 40_325),
    ("posts", 91_976),
    ("postLinks", 11_102),
    ("postHistory", 303_187),
    ("comments", 174_305),
    ("votes", 328_064),
    ("badges", 79_851),
    ("tags", 1_032),
];

const USERS: usize = 0;
const POSTS: usize = 1;

fn col(name: &str, sql_type: &'static str, values: Values) -> PlanColumn {
    PlanColumn { name: name.to_string(), sql_type, values }
}

fn int(name: &str, low: i64, high: i64) -> PlanColumn {
    col(name, "integer", Values::Int { low, high, null_rate: 0.0 })
}

fn reference(name: &str, table: usize, null_rate: f64) -> PlanColumn {
    col(name, "integer", Values::Reference { table, null_rate })
}

fn created(name: &str) -> PlanColumn {
    col(name, "timestamp", Values::Timestamp)
}

/// Tables in `TABLES` order. Keys are `Id`; names keep the original
/// camel case regardless of the requested naming style.
pub(super) fn stats_plan(scale: f64) -> Vec<PlanTable> {
    let id = || col("Id", "integer", Values::Serial);
    let columns: [Vec<PlanColumn>; 8] = [
        vec![
            id(),
            int("Reputation", 1, 5000),
            created("CreationDate"),
            int("Views", 0, 2000),
            int("UpVotes", 0, 800),
            int("DownVotes", 0, 100),
        ],
        vec![
            id(),
            int("PostTypeId", 1, 7),
            created("CreationDate"),
            int("Score", -5, 100),
            int("ViewCount", 0, 5000),
            reference("OwnerUserId", USERS, 0.0),
            int("AnswerCount", 0, 10),
            int("CommentCount", 0, 25),
            int("FavoriteCount", 0, 50),
            reference("LastEditorUserId", USERS, 0.4),
        ],
        vec![id(), created("CreationDate"), reference("PostId", POSTS, 0.0), reference("RelatedPostId", POSTS, 0.0), int("LinkTypeId", 1, 3)],
        vec![id(), int("PostHistoryTypeId", 1, 38), reference("PostId", POSTS, 0.0), created("CreationDate"), reference("UserId", USERS, 0.0)],
        vec![id(), reference("PostId", POSTS, 0.0), int("Score", 0, 20), created("CreationDate"), reference("UserId", USERS, 0.0)],
        vec![
            id(),
            reference("PostId", POSTS, 0.0),
            int("VoteTypeId", 1, 15),
            created("CreationDate"),
            reference("UserId", USERS, 0.6),
            col("BountyAmount", "integer", Values::Int { low: 50, high: 500, null_rate: 0.95 }),
        ],
        vec![id(), reference("UserId", USERS, 0.0), created("Date")],
        vec![id(), int("Count", 1, 5000), reference("ExcerptPostId", POSTS, 0.0)],
    ];
    TABLES
        .iter()
        .zip(columns)
        .map(|(&(name, rows), columns)| PlanTable {
            table: TableRef::new("stats", name),
            rows: ((rows as f64 * scale).round() as u64).max(1),
            columns,
        })
        .collect()
}
