//! Pearcey functions, the limiting kernels available in closed form, and the
//! rescaled finite-n kernels that converge to them.

pub mod pearcey;
pub mod scaling;

pub use pearcey::{
    folded_minus, folded_plus, pearcey_grid, pearcey_kernel, pearcey_p, pearcey_q, KernelGridRow, KernelValue,
    PearceyEvaluator, Which,
};
pub use scaling::{
    c1_pearcey, limit_compare_pearcey, limit_report, multicrit_selfconsistency, multicrit_value, DriftRecord,
    LimitRecord, LimitReport, LimitSide, SystemCache,
};

#[cfg(test)]
mod tests;
