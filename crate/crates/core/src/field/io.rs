use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Field, Grid, ScalarField, SymMat2, TensorField, VectorField};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ScalarRow {
    i: usize,
    j: usize,
    x: f64,
    y: f64,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorRow {
    i: usize,
    j: usize,
    x: f64,
    y: f64,
    a11: f64,
    a12: f64,
    a22: f64,
}

/// One row per cell: the cell-center average, the cell's own west/south faces
/// and, on the last column/row of a Dirichlet grid, the east/north faces.
#[derive(Debug, Serialize, Deserialize)]
struct VectorRow {
    i: usize,
    j: usize,
    x: f64,
    y: f64,
    u1: f64,
    u2: f64,
    u1_west: f64,
    u2_south: f64,
    u1_east: Option<f64>,
    u2_north: Option<f64>,
}

fn cells(g: &Grid) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..g.n).flat_map(move |j| (0..g.n).map(move |i| (i, j)))
}

pub fn write_scalar_csv<W: Write>(f: &ScalarField, w: W) -> Result<()> {
    let g = f.grid();
    let mut wr = csv::Writer::from_writer(w);
    for (i, j) in cells(g) {
        let [x, y] = g.cell_center(i, j);
        wr.serialize(ScalarRow { i, j, x, y, value: f.at(i, j) })?;
    }
    wr.flush().map_err(|e| Error::io("csv", e))?;
    Ok(())
}

pub fn write_tensor_csv<W: Write>(f: &TensorField, w: W) -> Result<()> {
    let g = f.grid();
    let mut wr = csv::Writer::from_writer(w);
    for (i, j) in cells(g) {
        let [x, y] = g.cell_center(i, j);
        let q = f.at(i, j);
        wr.serialize(TensorRow { i, j, x, y, a11: q.a11, a12: q.a12, a22: q.a22 })?;
    }
    wr.flush().map_err(|e| Error::io("csv", e))?;
    Ok(())
}

pub fn write_vector_csv<W: Write>(u: &VectorField, w: W) -> Result<()> {
    let g = *u.grid();
    let mut wr = csv::Writer::from_writer(w);
    let last = g.n - 1;
    for (i, j) in cells(&g) {
        let [x, y] = g.cell_center(i, j);
        let [c1, c2] = u.at(i, j);
        let (ii, jj) = (i as isize, j as isize);
        let east = (!g.is_periodic() && i == last).then(|| u.u1(ii + 1, jj)).flatten();
        let north = (!g.is_periodic() && j == last).then(|| u.u2(ii, jj + 1)).flatten();
        wr.serialize(VectorRow {
            i,
            j,
            x,
            y,
            u1: c1,
            u2: c2,
            u1_west: u.u1(ii, jj).expect("own face"),
            u2_south: u.u2(ii, jj).expect("own face"),
            u1_east: east,
            u2_north: north,
        })?;
    }
    wr.flush().map_err(|e| Error::io("csv", e))?;
    Ok(())
}

fn check_cell(g: &Grid, i: usize, j: usize, seen: &mut [bool]) -> Result<usize> {
    if i >= g.n || j >= g.n {
        return Err(Error::GridMismatch(format!("cell ({i}, {j}) outside {}x{} grid", g.n, g.n)));
    }
    let k = g.cell_index(i, j);
    if std::mem::replace(&mut seen[k], true) {
        return Err(Error::GridMismatch(format!("duplicate cell ({i}, {j})")));
    }
    Ok(k)
}

fn all_seen(seen: &[bool]) -> Result<()> {
    match seen.iter().position(|s| !s) {
        Some(k) => Err(Error::GridMismatch(format!("missing row for cell index {k}"))),
        None => Ok(()),
    }
}

pub fn read_scalar_csv<R: Read>(g: Grid, r: R) -> Result<ScalarField> {
    let mut values = vec![0.0; g.cell_count()];
    let mut seen = vec![false; g.cell_count()];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: ScalarRow = row?;
        values[check_cell(&g, row.i, row.j, &mut seen)?] = row.value;
    }
    all_seen(&seen)?;
    ScalarField::new(g, values)
}

pub fn read_tensor_csv<R: Read>(g: Grid, r: R) -> Result<TensorField> {
    let mut values = vec![SymMat2::ZERO; g.cell_count()];
    let mut seen = vec![false; g.cell_count()];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: TensorRow = row?;
        values[check_cell(&g, row.i, row.j, &mut seen)?] = SymMat2::new(row.a11, row.a12, row.a22);
    }
    all_seen(&seen)?;
    TensorField::new(g, values)
}

pub fn read_vector_csv<R: Read>(g: Grid, r: R) -> Result<VectorField> {
    let mut faces = vec![f64::NAN; g.face_count()];
    let mut seen = vec![false; g.cell_count()];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: VectorRow = row?;
        check_cell(&g, row.i, row.j, &mut seen)?;
        let (i, j) = (row.i as isize, row.j as isize);
        faces[g.u1_face(i, j).expect("checked")] = row.u1_west;
        faces[g.u2_face(i, j).expect("checked")] = row.u2_south;
        if let (Some(v), Some(k)) = (row.u1_east, g.u1_face(i + 1, j)) {
            if !g.is_periodic() {
                faces[k] = v;
            }
        }
        if let (Some(v), Some(k)) = (row.u2_north, g.u2_face(i, j + 1)) {
            if !g.is_periodic() {
                faces[k] = v;
            }
        }
    }
    all_seen(&seen)?;
    VectorField::new(g, faces)
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

impl ScalarField {
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_scalar_csv(self, create(path.as_ref())?)
    }
    pub fn load_csv(g: Grid, path: impl AsRef<Path>) -> Result<Self> {
        read_scalar_csv(g, open(path.as_ref())?)
    }
}

impl TensorField {
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_tensor_csv(self, create(path.as_ref())?)
    }
    pub fn load_csv(g: Grid, path: impl AsRef<Path>) -> Result<Self> {
        read_tensor_csv(g, open(path.as_ref())?)
    }
}

impl VectorField {
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_vector_csv(self, create(path.as_ref())?)
    }
    pub fn load_csv(g: Grid, path: impl AsRef<Path>) -> Result<Self> {
        read_vector_csv(g, open(path.as_ref())?)
    }
}
