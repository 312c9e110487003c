// Copyright 2026 The sgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Similarity group-by over two-dimensional tuples.
//!
//! Two grouping semantics are provided:
//!
//! - **distance-to-all** ([`sgb_all`]): every pair of members of a group is
//!   within ε. Points that qualify for several groups are arbitrated by an
//!   [`OverlapPolicy`].
//! - **distance-to-any** ([`sgb_any`]): groups are the connected components of
//!   the graph joining points within ε of each other.
//!
//! Both engines run over an ordered list of [`Record`]s and return a
//! [`GroupingResult`]. The [`query`] module puts an SQL-like front end with
//! aggregates on top, and [`bench`] holds the data generators and timing
//! harness.
//!
//! ```
//! use sgb_core::{run_sgb_all, Metric, OverlapPolicy, Record, SgbAllConfig, Strategy};
//!
//! let points = [
//!     Record::new(1, 0.0, 0.0),
//!     Record::new(2, 1.0, 0.0),
//!     Record::new(3, 5.0, 0.0),
//!     Record::new(4, 6.0, 0.0),
//!     Record::new(5, 3.0, 0.0),
//! ];
//! let cfg = SgbAllConfig::new(Metric::LInf, 3.0, OverlapPolicy::Eliminate, Strategy::Indexed);
//! let result = run_sgb_all(&points, &cfg).unwrap();
//! assert_eq!(result.sizes(), vec![2, 2]);
//! ```

/// Case-insensitive `FromStr` plus string serde for keyword-like enums.
/// Underscores are read as hyphens.
macro_rules! keyword_enum {
    ($ty:ident, $what:literal, { $($variant:ident => [$($alias:literal),+]),+ $(,)? }) => {
        impl std::str::FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                let key = s.trim().to_ascii_lowercase().replace('_', "-");
                $(
                    if [$($alias),+].contains(&key.as_str()) {
                        return Ok($ty::$variant);
                    }
                )+
                Err(format!("unknown {} '{s}'", $what))
            }
        }

        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

pub mod bench;
pub mod disjoint_set;
pub mod geometry;
pub mod group_store;
pub mod query;
pub mod sgb_all;
pub mod sgb_any;
pub mod spatial_index;
pub mod validate;

pub use geometry::{convex_hull, Hull, Metric, Point, Rect};
pub use group_store::{GroupId, Record, RecordId};
pub use sgb_all::{
    run_sgb_all, GroupingResult, OutputGroup, OverlapPolicy, SgbAllConfig, SgbError, Strategy,
};
pub use sgb_any::{run_sgb_any, AnyStrategy, SgbAnyConfig};
pub use spatial_index::RTree;
