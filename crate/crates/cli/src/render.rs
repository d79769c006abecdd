//! Space-time diagrams of controlled runs, as text art or a binary PBM.

use ca_control::{RegionWord, Trajectory};

/// Cell states of each diagram row, with `border` control cells on each
/// side. `None` marks a boundary cell without a control (the last row).
fn diagram(traj: &Trajectory, border: usize) -> Vec<Vec<Option<u8>>> {
    let side = |w: Option<RegionWord>| -> Vec<Option<u8>> {
        match w {
            Some(w) => w.symbols().into_iter().map(Some).collect(),
            None => vec![None; border],
        }
    };
    traj.rows
        .iter()
        .map(|row| {
            let mut cells = Vec::with_capacity(row.word.len() + 2 * border);
            if border > 0 {
                cells.extend(side(row.control.map(|c| c.left)));
            }
            cells.extend(row.word.symbols().into_iter().map(Some));
            if border > 0 {
                cells.extend(side(row.control.map(|c| c.right)));
            }
            cells
        })
        .collect()
}

/// One line per time step, `█` for 1 and `·` for 0. A nonzero `border`
/// draws that many control cells on both sides (blank on the final row).
pub fn render_text(traj: &Trajectory, border: usize) -> String {
    let mut out = String::new();
    for row in diagram(traj, border) {
        for cell in row {
            out.push(match cell {
                Some(1) => '█',
                Some(_) => '·',
                None => ' ',
            });
        }
        out.push('\n');
    }
    out
}

/// Binary PBM (`P4`), one pixel per cell, top row is time 0. Missing
/// boundary cells are white.
pub fn render_pbm(traj: &Trajectory, border: usize) -> Vec<u8> {
    let rows = diagram(traj, border);
    let width = rows.first().map_or(0, Vec::len);
    let mut out = format!("P4\n{} {}\n", width, rows.len()).into_bytes();
    for row in rows {
        let mut byte = 0u8;
        for (i, cell) in row.iter().enumerate() {
            if *cell == Some(1) {
                byte |= 0x80 >> (i % 8);
            }
            if i % 8 == 7 {
                out.push(byte);
                byte = 0;
            }
        }
        if width % 8 != 0 {
            out.push(byte);
        }
    }
    out
}
