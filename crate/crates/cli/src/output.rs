//! CSV and gnuplot emission. Floats use `Display`, the shortest decimal
//! that round-trips.

use std::fmt::Write as _;
use std::path::Path;

use twofluid::entropy_e;
use twofluid::fvm::SimulationFrame;
use twofluid::rankine_hugoniot::{classify_shock, ShockPoint};
use twofluid::{ModelParams, PrimitiveState};

use crate::error::CliError;

pub const SHOCK_HEADER: &str = "sigma,rho_n+,rho_s+,u_n+,u_s+,residual,dissipation,family,lax_ok";
pub const FRAME_HEADER: &str = "x,rho_n,rho_s,u_n,u_s,p,E";
pub const MONITOR_HEADER: &str = "t,mass_n,mass_s,momentum,energy,min_density,hyperbolic";

pub fn shock_row(pt: &ShockPoint, u_minus: &PrimitiveState, p: &ModelParams) -> String {
    let class = classify_shock(pt, u_minus, p);
    let u = pt.u_plus;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        pt.sigma,
        u.rho_n,
        u.rho_s,
        u.u_n,
        u.u_s,
        pt.residual_norm,
        pt.dissipation,
        class.family.map_or(String::new(), |k| k.to_string()),
        class.lax_ok
    )
}

pub fn frame_csv(frame: &SimulationFrame, centers: &[f64], p: &ModelParams) -> String {
    let mut s = String::with_capacity(64 * (centers.len() + 1));
    s.push_str(FRAME_HEADER);
    s.push('\n');
    for (x, u) in centers.iter().zip(&frame.primitive) {
        let _ = writeln!(
            s,
            "{x},{},{},{},{},{},{}",
            u.rho_n,
            u.rho_s,
            u.u_n,
            u.u_s,
            p.pressure(u.rho_n),
            entropy_e(u, p)
        );
    }
    s
}

pub fn monitor_row(frame: &SimulationFrame) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        frame.t,
        frame.total_mass_n,
        frame.total_mass_s,
        frame.total_momentum,
        frame.total_energy,
        frame.min_density,
        u8::from(frame.hyperbolic_everywhere)
    )
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

pub fn shock_gnuplot(csv: &Path) -> String {
    let name = csv.display();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'sigma'\n\
         set multiplot layout 2,2\n\
         plot '{name}' using 1:2 with linespoints\n\
         plot '{name}' using 1:3 with linespoints\n\
         plot '{name}' using 1:4 with linespoints\n\
         plot '{name}' using 1:5 with linespoints\n\
         unset multiplot\n\
         pause -1\n"
    )
}

pub fn frames_gnuplot(last_frame: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'x'\n\
         set multiplot layout 2,2\n\
         plot '{last_frame}' using 1:2 with lines\n\
         plot '{last_frame}' using 1:3 with lines\n\
         plot '{last_frame}' using 1:4 with lines\n\
         plot '{last_frame}' using 1:5 with lines\n\
         unset multiplot\n\
         pause -1\n"
    )
}
