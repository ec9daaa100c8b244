//! Report emission: atomic file writes, default output locations, and the
//! optional profile bar chart.

use std::fs;
use std::path::{Path, PathBuf};

use spaceform::frenet::CurvatureProfile;

/// Directory used when `--out` is omitted; overridden by SPACEFORM_OUT_DIR.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("SPACEFORM_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn default_out_path(command: &str) -> PathBuf {
    default_out_dir().join(format!("{command}.json"))
}

/// Write-then-rename so an interrupted run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = path.with_file_name(format!("{file_name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Single-file SVG bar chart of a curvature profile. Convenience output
/// only; nothing downstream consumes it.
pub fn profile_svg(profile: &CurvatureProfile) -> String {
    let ks = &profile.curvatures;
    let bar_w = 52.0;
    let gap = 12.0;
    let plot_h = 200.0;
    let n = ks.len().max(1);
    let width = 40.0 + (bar_w + gap) * n as f64;
    let height = plot_h + 60.0;
    let kmax = ks.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    );
    svg.push_str(&format!(
        "  <text x=\"8\" y=\"16\" font-family=\"monospace\" font-size=\"12\">geodesic curvatures (speed {:.6})</text>\n",
        profile.speed
    ));
    for (i, k) in ks.iter().enumerate() {
        let h = (k / kmax) * plot_h;
        let x = 20.0 + (bar_w + gap) * i as f64;
        let y = 30.0 + (plot_h - h);
        svg.push_str(&format!(
            "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w:.1}\" height=\"{h:.1}\" fill=\"#4878a8\"/>\n"
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">k{}</text>\n",
            x + bar_w / 2.0,
            plot_h + 46.0,
            i + 1
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"middle\">{k:.4}</text>\n",
            x + bar_w / 2.0,
            y - 4.0
        ));
    }
    if ks.is_empty() {
        svg.push_str(
            "  <text x=\"20\" y=\"120\" font-family=\"monospace\" font-size=\"12\">no curvatures (geodesic)</text>\n",
        );
    }
    svg.push_str("</svg>\n");
    svg
}
