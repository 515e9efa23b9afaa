//! STL writers, binary and text.

use std::io::{self, Write};

use crate::curvature::mesh::TriMesh;

fn facet_normal(m: &TriMesh, f: usize) -> [f32; 3] {
    let n = m.face_normal(f);
    [n.x as f32, n.y as f32, n.z as f32]
}

pub fn write_stl_binary<W: Write>(mut w: W, m: &TriMesh) -> io::Result<()> {
    let mut header = [0u8; 80];
    let tag = b"popup binary stl";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    w.write_all(&(m.faces.len() as u32).to_le_bytes())?;
    for (f, face) in m.faces.iter().enumerate() {
        for c in facet_normal(m, f) {
            w.write_all(&c.to_le_bytes())?;
        }
        for &i in face {
            let v = m.vertices[i];
            for c in [v.x, v.y, v.z] {
                w.write_all(&(c as f32).to_le_bytes())?;
            }
        }
        w.write_all(&0u16.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_stl_text<W: Write>(mut w: W, name: &str, m: &TriMesh) -> io::Result<()> {
    writeln!(w, "solid {name}")?;
    for (f, face) in m.faces.iter().enumerate() {
        let n = facet_normal(m, f);
        writeln!(w, "  facet normal {:e} {:e} {:e}", n[0], n[1], n[2])?;
        writeln!(w, "    outer loop")?;
        for &i in face {
            let v = m.vertices[i];
            writeln!(w, "      vertex {:e} {:e} {:e}", v.x as f32, v.y as f32, v.z as f32)?;
        }
        writeln!(w, "    endloop")?;
        writeln!(w, "  endfacet")?;
    }
    writeln!(w, "endsolid {name}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Vec3;

    #[test]
    fn binary_size_matches_facet_count() {
        let m = TriMesh::new(
            vec![
                Vec3::zero(),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_stl_binary(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 84 + 2 * 50);
        assert_eq!(u32::from_le_bytes(buf[80..84].try_into().unwrap()), 2);
        let mut txt = Vec::new();
        write_stl_text(&mut txt, "t", &m).unwrap();
        assert_eq!(String::from_utf8(txt).unwrap().matches("facet normal").count(), 2);
    }
}
