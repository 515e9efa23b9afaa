//! Line-oriented per-slice solver report.
//!
//! ```text
//! slice 0 n 5 converged true loss 0.127341 kkt 3.1e-8 outer 6
//! residual 0 isometry 0 on-curve 1.2e-11 positivity 0 ordering 0 admissible 0
//! step 0 1 objective 0.12 max-eq 0.003 max-ineq 0 kkt 0.01 rho 10 inner 14
//! ```

use std::io::{self, Write};

use super::slice::SliceDesign;
use crate::export::fmt_num;

pub fn write_slice_report<W: Write>(mut w: W, designs: &[SliceDesign]) -> io::Result<()> {
    for d in designs {
        writeln!(
            w,
            "slice {} n {} converged {} loss {} kkt {} outer {}",
            d.slice,
            d.n(),
            d.converged,
            fmt_num(d.loss),
            fmt_num(d.kkt),
            d.history.len()
        )?;
        write!(w, "residual {}", d.slice)?;
        for (name, v) in d.residuals.families() {
            write!(w, " {name} {}", fmt_num(v))?;
        }
        writeln!(w)?;
        for (k, s) in d.history.iter().enumerate() {
            writeln!(
                w,
                "step {} {} objective {} max-eq {} max-ineq {} kkt {} rho {} inner {}",
                d.slice,
                k + 1,
                fmt_num(s.objective),
                fmt_num(s.max_eq),
                fmt_num(s.max_ineq),
                fmt_num(s.kkt),
                fmt_num(s.rho),
                s.inner_iterations
            )?;
        }
    }
    Ok(())
}
