/// Formats `x` rounded to 9 significant digits in its shortest form.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    // normalise negative zero
    let v = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{v}")
}
