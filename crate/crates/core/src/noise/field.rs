use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{SpaceTimeGrid, TimeGrid};
use crate::error::{check_shape, Error, Result};

const MAGIC: &[u8; 5] = b"SPDF1";

/// Values of a process at the nodes `t_0, ..., t_n` of a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl Path {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        check_shape(grid.n_steps() + 1, values.len())?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, values: vec![0.0; grid.n_steps() + 1] }
    }

    /// Successive differences `X_{t_{k+1}} - X_{t_k}`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("paths have at least two nodes")
    }
}

/// How the time axis of a [`Field`] is indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldLayout {
    /// One value per space-time cell (`n_steps` time slabs); used for noise masses.
    Cells,
    /// One value per time node `t_0..t_n` and spatial cell center; used for solutions.
    Nodes,
}

/// Real values on a space-time grid, row-major with time outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub grid: SpaceTimeGrid,
    pub layout: FieldLayout,
    pub values: Vec<f64>,
}

impl Field {
    pub fn time_len(grid: &SpaceTimeGrid, layout: FieldLayout) -> usize {
        match layout {
            FieldLayout::Cells => grid.time().n_steps(),
            FieldLayout::Nodes => grid.time().n_steps() + 1,
        }
    }

    pub fn new(grid: SpaceTimeGrid, layout: FieldLayout, values: Vec<f64>) -> Result<Self> {
        check_shape(Self::time_len(&grid, layout) * grid.space_len(), values.len())?;
        Ok(Self { grid, layout, values })
    }

    pub fn zeros(grid: SpaceTimeGrid, layout: FieldLayout) -> Self {
        let n = Self::time_len(&grid, layout) * grid.space_len();
        Self { grid, layout, values: vec![0.0; n] }
    }

    pub fn n_times(&self) -> usize {
        Self::time_len(&self.grid, self.layout)
    }

    pub fn n_space(&self) -> usize {
        self.grid.space_len()
    }

    pub fn get(&self, k: usize, flat: usize) -> f64 {
        self.values[k * self.n_space() + flat]
    }

    /// All spatial values at time index `k`.
    pub fn slice(&self, k: usize) -> &[f64] {
        let n = self.n_space();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [f64] {
        let n = self.n_space();
        &mut self.values[k * n..(k + 1) * n]
    }

    /// Time coordinate of row `k`: slab midpoint for cells, node time for nodes.
    pub fn time_coordinate(&self, k: usize) -> f64 {
        let tg = self.grid.time();
        match self.layout {
            FieldLayout::Cells => 0.5 * (tg.node(k) + tg.node(k + 1)),
            FieldLayout::Nodes => tg.node(k),
        }
    }

    /// CSV with header `t,x1,..,xd,value`; spatial coordinates are cell centers.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.grid.dim();
        let mut header = String::from("t");
        for a in 1..=d {
            header.push_str(&format!(",x{a}"));
        }
        header.push_str(",value\n");
        w.write_all(header.as_bytes())?;
        for k in 0..self.n_times() {
            let t = self.time_coordinate(k);
            for flat in 0..self.n_space() {
                let mut line = fmt17(t);
                for i in self.grid.unflatten(flat) {
                    line.push(',');
                    line.push_str(&fmt17(self.grid.center(i)));
                }
                line.push(',');
                line.push_str(&fmt17(self.get(k, flat)));
                line.push('\n');
                w.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }

    /// Binary container: magic `SPDF1`, layout byte, dimension byte, a zero
    /// pad byte, then little-endian `n_steps: u64`, `n_cells: u64`,
    /// `t_max: f64`, `half_width: f64`, `count: u64` and `count` f64 values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        let layout = match self.layout {
            FieldLayout::Cells => 0u8,
            FieldLayout::Nodes => 1u8,
        };
        w.write_all(&[layout, self.grid.dim() as u8, 0])?;
        w.write_all(&(self.grid.time().n_steps() as u64).to_le_bytes())?;
        w.write_all(&(self.grid.n_cells() as u64).to_le_bytes())?;
        w.write_all(&self.grid.time().t_max().to_le_bytes())?;
        w.write_all(&self.grid.half_width().to_le_bytes())?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        if &head[..5] != MAGIC {
            return Err(Error::Format("missing SPDF1 magic bytes".into()));
        }
        let layout = match head[5] {
            0 => FieldLayout::Cells,
            1 => FieldLayout::Nodes,
            b => return Err(Error::Format(format!("unknown layout byte {b}"))),
        };
        let dim = head[6] as usize;
        let n_steps = read_u64(&mut r)? as usize;
        let n_cells = read_u64(&mut r)? as usize;
        let t_max = f64::from_bits(read_u64(&mut r)?);
        let half_width = f64::from_bits(read_u64(&mut r)?);
        let count = read_u64(&mut r)? as usize;
        let grid = SpaceTimeGrid::new(TimeGrid::new(t_max, n_steps)?, half_width, n_cells, dim)
            .map_err(|e| Error::Format(format!("invalid grid header: {e}")))?;
        if count != Self::time_len(&grid, layout) * grid.space_len() {
            return Err(Error::Format(format!("value count {count} does not match grid")));
        }
        let mut bytes = vec![0u8; 8 * count];
        r.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Self::new(grid, layout, values)
    }
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let g = SpaceTimeGrid::line(1.0, 3, 2.0, 4).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| (i as f64).sin() * 1e-7).collect();
        let f = Field::new(g, FieldLayout::Nodes, vals).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..5], b"SPDF1");
        let back = Field::read_binary(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_magic() {
        let err = Field::read_binary(&b"SPDF2\0\0\0"[..]).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn csv_shape() {
        let g = SpaceTimeGrid::line(1.0, 2, 1.0, 2).unwrap();
        let f = Field::zeros(g, FieldLayout::Cells);
        let mut out = Vec::new();
        f.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x1,value");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("2.5000000000000000e-1,-5.0000000000000000e-1"));
    }
}
