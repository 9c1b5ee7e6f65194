//! Cube-face projection: xyz ↔ (face, u, v) ↔ (face, s, t).
//!
//! Face axes are right-handed, so increasing u then v runs counter-clockwise
//! seen from outside the sphere on every face.

use crate::sphere::Point3;

pub(crate) fn face_uv_to_xyz(face: u8, u: f64, v: f64) -> Point3 {
    match face {
        0 => Point3::new(1.0, u, v),
        1 => Point3::new(-u, 1.0, v),
        2 => Point3::new(-u, -v, 1.0),
        3 => Point3::new(-1.0, -v, -u),
        4 => Point3::new(v, -1.0, -u),
        _ => Point3::new(v, u, -1.0),
    }
}

/// (u, v) of `p` projected onto `face`. Only meaningful when `p` is on the
/// face's side of the sphere.
pub(crate) fn xyz_to_uv(face: u8, p: Point3) -> (f64, f64) {
    match face {
        0 => (p.y / p.x, p.z / p.x),
        1 => (-p.x / p.y, p.z / p.y),
        2 => (-p.x / p.z, -p.y / p.z),
        3 => (p.z / p.x, p.y / p.x),
        4 => (p.z / p.y, -p.x / p.y),
        _ => (-p.y / p.z, -p.x / p.z),
    }
}

/// Faces whose axis attains the largest absolute component. More than one
/// only for points exactly on a face edge or corner.
pub(crate) fn candidate_faces(p: Point3) -> Vec<u8> {
    let comps = [p.x, p.y, p.z];
    let max = comps.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut faces: Vec<u8> = (0..3)
        .filter(|&a| comps[a].abs() == max)
        .map(|a| if comps[a] < 0.0 { a as u8 + 3 } else { a as u8 })
        .collect();
    faces.sort_unstable();
    faces
}

/// Quadratic transform from cell-space s to face coordinate u.
pub(crate) fn st_to_uv(s: f64) -> f64 {
    if s >= 0.5 {
        (1.0 / 3.0) * (4.0 * s * s - 1.0)
    } else {
        (1.0 / 3.0) * (1.0 - 4.0 * (1.0 - s) * (1.0 - s))
    }
}

pub(crate) fn uv_to_st(u: f64) -> f64 {
    if u >= 0.0 {
        0.5 * (1.0 + 3.0 * u).sqrt()
    } else {
        1.0 - 0.5 * (1.0 - 3.0 * u).sqrt()
    }
}
