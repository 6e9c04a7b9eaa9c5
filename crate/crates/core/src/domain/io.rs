//! Field serialization: a `t,xprime,xn,re,im` CSV layout and a compact
//! binary dump with a self-describing textual header.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Scalar};

use super::field::{ComplexField, Region};
use super::grid::{make_grid, GridConfig, SpaceTimeGrid, TimeAxis};

fn region_name(region: Region) -> &'static str {
    match region {
        Region::Volume => "volume",
        Region::Lateral => "lateral",
        Region::AxialEnds => "axial_ends",
    }
}

fn region_from_name(name: &str) -> Result<Region> {
    match name {
        "volume" => Ok(Region::Volume),
        "lateral" => Ok(Region::Lateral),
        "axial_ends" => Ok(Region::AxialEnds),
        other => Err(Error::Region(format!("unknown region tag '{other}'"))),
    }
}

/// Writes the CSV layout. Coordinates are node positions; for the lateral
/// region the `xprime` column carries the wall coordinate.
pub fn write_csv<T: Scalar>(f: &ComplexField<T>, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "t,xprime,xn,re,im")?;
    let grid = f.grid();
    let v = f.values();
    for k in 0..v.dim().0 {
        let t = grid.time(k);
        for i in 0..v.dim().1 {
            for j in 0..v.dim().2 {
                let (xp, xn) = match f.region() {
                    Region::Volume => (grid.xprime(i), grid.axial(j)),
                    Region::Lateral => (
                        if i == 0 { grid.omega.0 } else { grid.omega.1 },
                        grid.axial(j),
                    ),
                    Region::AxialEnds => (
                        grid.xprime(i),
                        if j == 0 {
                            -grid.axial_halfwidth
                        } else {
                            grid.axial_halfwidth
                        },
                    ),
                };
                let z = v[(k, i, j)];
                writeln!(out, "{t},{xp},{xn},{},{}", z.re, z.im)?;
            }
        }
    }
    Ok(())
}

/// Writes the binary dump: textual header, `---` separator, then the values
/// as little-endian f64 `(re, im)` pairs in row-major `(t, x', x_n)` order.
pub fn write_binary<T: Scalar>(f: &ComplexField<T>, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    let grid = f.grid();
    writeln!(out, "carlwave-field v1")?;
    writeln!(out, "region {}", region_name(f.region()))?;
    writeln!(
        out,
        "counts {} {} {}",
        grid.n_time, grid.n_xprime, grid.n_axial
    )?;
    writeln!(out, "omega {} {}", grid.omega.0, grid.omega.1)?;
    writeln!(out, "axial_halfwidth {}", grid.axial_halfwidth)?;
    writeln!(out, "time_halfwidth {}", grid.time_halfwidth)?;
    writeln!(out, "support_halfwidth {}", grid.support_halfwidth)?;
    writeln!(
        out,
        "time_axis {}",
        match grid.time_axis {
            TimeAxis::Forward => "forward",
            TimeAxis::Symmetric => "symmetric",
        }
    )?;
    writeln!(
        out,
        "spacings {} {} {}",
        grid.dt(),
        grid.h_xprime(),
        grid.h_axial()
    )?;
    writeln!(out, "---")?;
    for z in f.values().iter() {
        out.write_all(&z.re.to_f64().unwrap().to_le_bytes())?;
        out.write_all(&z.im.to_f64().unwrap().to_le_bytes())?;
    }
    Ok(())
}

/// Reads a binary dump written by [`write_binary`], rebuilding the grid
/// from the header.
pub fn read_binary(path: &Path) -> Result<ComplexField<f64>> {
    let mut reader = BufReader::new(std::fs::File::open(path)?);
    let mut header = Vec::new();
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(Error::Region("truncated field header".into()));
        }
        let line = line.trim_end().to_string();
        if line == "---" {
            break;
        }
        header.push(line);
    }
    let mut region = None;
    let mut counts = None;
    let mut omega = (0.0, 1.0);
    let mut x = 1.0;
    let mut t = 1.0;
    let mut support = 0.0;
    let mut axis = TimeAxis::Forward;
    for line in &header {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("region") => region = Some(region_from_name(it.next().unwrap_or(""))?),
            Some("counts") => {
                let f = |s: Option<&str>| -> Result<usize> {
                    s.and_then(|v| v.parse().ok())
                        .ok_or_else(|| Error::Region("bad counts".into()))
                };
                counts = Some((f(it.next())?, f(it.next())?, f(it.next())?));
            }
            Some("omega") => {
                omega = (
                    it.next().unwrap_or("0").parse().unwrap_or(0.0),
                    it.next().unwrap_or("1").parse().unwrap_or(1.0),
                );
            }
            Some("axial_halfwidth") => x = it.next().unwrap_or("1").parse().unwrap_or(1.0),
            Some("time_halfwidth") => t = it.next().unwrap_or("1").parse().unwrap_or(1.0),
            Some("support_halfwidth") => {
                support = it.next().unwrap_or("0").parse().unwrap_or(0.0)
            }
            Some("time_axis") => {
                axis = match it.next() {
                    Some("symmetric") => TimeAxis::Symmetric,
                    _ => TimeAxis::Forward,
                }
            }
            _ => {}
        }
    }
    let (nt, nx, na) =
        counts.ok_or_else(|| Error::Region("field header missing counts".into()))?;
    let region = region.ok_or_else(|| Error::Region("field header missing region".into()))?;
    let grid: Arc<SpaceTimeGrid<f64>> = Arc::new(make_grid(&GridConfig {
        omega,
        axial_halfwidth: x,
        time_halfwidth: t,
        support_halfwidth: support,
        n_xprime: nx,
        n_axial: na,
        n_time: nt,
        time_axis: axis,
    })?);
    let shape = match region {
        Region::Volume => (nt, nx, na),
        Region::Lateral => (nt, 2, na),
        Region::AxialEnds => (nt, nx, 2),
    };
    let mut values = Array3::<Cplx<f64>>::zeros(shape);
    let mut buf = [0u8; 16];
    for z in values.iter_mut() {
        reader.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        *z = Cplx::new(re, im);
    }
    ComplexField::new(grid, region, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::{make_grid, GridConfig};

    #[test]
    fn binary_round_trip() {
        let grid = Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: 2.0,
                time_halfwidth: 0.5,
                support_halfwidth: 1.0,
                n_xprime: 5,
                n_axial: 9,
                n_time: 4,
                time_axis: TimeAxis::Symmetric,
            })
            .unwrap(),
        );
        let f = ComplexField::from_fn(grid, |t, xp, xn| Cplx::new(t * xp, xn));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.bin");
        write_binary(&f, &path).unwrap();
        let g = read_binary(&path).unwrap();
        assert_eq!(f.values(), g.values());
        assert_eq!(f.region(), g.region());
    }

    #[test]
    fn csv_header_and_rows() {
        let grid = Arc::new(
            make_grid(&GridConfig {
                omega: (0.0, 1.0),
                axial_halfwidth: 2.0,
                time_halfwidth: 0.5,
                support_halfwidth: 1.0,
                n_xprime: 3,
                n_axial: 3,
                n_time: 3,
                time_axis: TimeAxis::Forward,
            })
            .unwrap(),
        );
        let f = ComplexField::zeros(grid, Region::Volume);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.csv");
        write_csv(&f, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,xprime,xn,re,im");
        assert_eq!(text.lines().count(), 1 + 27);
    }
}
