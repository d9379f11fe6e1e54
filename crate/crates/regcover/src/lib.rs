//! Regular covering testing for multigraphs.

pub mod multigraph;
pub mod covering;
pub mod decomposition;
pub mod expansion;
pub mod ivmatch;
pub mod oracle;
pub mod planar;
pub mod reduction;
