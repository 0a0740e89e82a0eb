use std::io::{self, Write};

use super::Trajectory;

/// `t,Omega_1_2,...,Gamma_1,...,E,constraint_residual,gamma_norm_err`
pub fn csv_header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for i in 1..=n {
        for j in (i + 1)..=n {
            cols.push(format!("Omega_{i}_{j}"));
        }
    }
    cols.extend((1..=n).map(|i| format!("Gamma_{i}")));
    cols.extend(["E", "constraint_residual", "gamma_norm_err"].map(String::from));
    cols.join(",")
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the trajectory with 17 significant digits per value.
pub fn write_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", csv_header(traj.n))?;
    for ((t, s), aux) in traj.times.iter().zip(&traj.states).zip(&traj.aux) {
        let mut row = vec![fmt(*t)];
        row.extend(s.omega.upper().into_iter().map(fmt));
        row.extend(s.gamma.iter().map(|g| fmt(*g)));
        row.push(fmt(aux.energy));
        row.push(fmt(aux.constraint_residual));
        row.push(fmt(aux.gamma_norm_err));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
