use super::projection::{candidate_faces, face_uv_to_xyz, st_to_uv, uv_to_st, xyz_to_uv};
use super::DggError;
use crate::geometry::{Geometry, Polygon};
use crate::sphere::{signed_triangle_area, LatLng, Point3, EARTH_RADIUS_KM};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const MAX_LEVEL: u8 = 30;
const POS_BITS: u32 = 61;
const SWAP: u8 = 1;
const INVERT: u8 = 2;

/// Hilbert sub-cell visited at each position, indexed by orientation; the
/// value packs (i bit << 1) | j bit.
const POS_TO_IJ: [[u8; 4]; 4] = [[0, 1, 3, 2], [0, 2, 3, 1], [3, 2, 0, 1], [3, 1, 0, 2]];
const POS_TO_ORIENTATION: [u8; 4] = [SWAP, 0, 0, INVERT | SWAP];

const fn ij_to_pos() -> [[u8; 4]; 4] {
    let mut out = [[0u8; 4]; 4];
    let mut o = 0;
    while o < 4 {
        let mut p = 0;
        while p < 4 {
            out[o][POS_TO_IJ[o][p] as usize] = p as u8;
            p += 1;
        }
        o += 1;
    }
    out
}
const IJ_TO_POS: [[u8; 4]; 4] = ij_to_pos();

/// A cell of the hierarchical grid: 3 face bits, 2 bits per level of
/// Hilbert position, then a sentinel 1-bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(u64);

/// Integer cell coordinates within a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceIJ {
    pub face: u8,
    pub i: u32,
    pub j: u32,
    pub level: u8,
}

impl FaceIJ {
    pub fn to_cell(self) -> Result<CellId, DggError> {
        check_level(self.level)?;
        let size = 1u64 << self.level;
        if self.face > 5 || u64::from(self.i) >= size || u64::from(self.j) >= size {
            return Err(DggError::InvalidFaceIJ(self));
        }
        Ok(CellId::from_face_ij(self.face, self.i, self.j, self.level))
    }
}

fn check_level(level: u8) -> Result<(), DggError> {
    if level > MAX_LEVEL {
        Err(DggError::InvalidLevel(level))
    } else {
        Ok(())
    }
}

const fn lsb_for_level(level: u8) -> u64 {
    1u64 << (2 * (MAX_LEVEL - level) as u32)
}

impl CellId {
    /// Wraps raw bits, rejecting anything that is not a valid cell.
    pub fn from_raw(bits: u64) -> Result<CellId, DggError> {
        let c = CellId(bits);
        if c.is_valid() {
            Ok(c)
        } else {
            Err(DggError::InvalidCell(bits))
        }
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn is_valid(self) -> bool {
        self.0 >> POS_BITS < 6 && (self.lsb() & 0x1555_5555_5555_5555) != 0
    }

    pub fn from_face(face: u8) -> CellId {
        CellId((u64::from(face) << POS_BITS) | lsb_for_level(0))
    }

    /// The six level-0 face cells in id order.
    pub fn faces() -> impl DoubleEndedIterator<Item = CellId> + ExactSizeIterator {
        (0..6).map(CellId::from_face)
    }

    fn lsb(self) -> u64 {
        self.0 & self.0.wrapping_neg()
    }

    pub fn level(self) -> u8 {
        MAX_LEVEL - (self.0.trailing_zeros() / 2) as u8
    }

    pub fn face(self) -> u8 {
        (self.0 >> POS_BITS) as u8
    }

    pub(crate) fn from_face_ij(face: u8, i: u32, j: u32, level: u8) -> CellId {
        let mut orientation = face & 1;
        let mut pos = 0u64;
        for k in (0..level).rev() {
            let ij = ((((i >> k) & 1) << 1) | ((j >> k) & 1)) as usize;
            let p = IJ_TO_POS[orientation as usize][ij];
            pos = (pos << 2) | u64::from(p);
            orientation ^= POS_TO_ORIENTATION[p as usize];
        }
        let shift = 2 * u32::from(MAX_LEVEL - level) + 1;
        CellId((u64::from(face) << POS_BITS) | (pos << shift) | lsb_for_level(level))
    }

    pub fn to_face_ij(self) -> FaceIJ {
        let level = self.level();
        let face = self.face();
        let mut orientation = face & 1;
        let (mut i, mut j) = (0u32, 0u32);
        for k in 0..level {
            let shift = POS_BITS - 2 - 2 * u32::from(k);
            let p = ((self.0 >> shift) & 3) as usize;
            let ij = POS_TO_IJ[orientation as usize][p];
            i = (i << 1) | u32::from(ij >> 1);
            j = (j << 1) | u32::from(ij & 1);
            orientation ^= POS_TO_ORIENTATION[p];
        }
        FaceIJ { face, i, j, level }
    }

    /// The cell at `level` containing `p`.
    ///
    /// A point on a shared edge or corner belongs to the candidate with the
    /// smallest id. Candidates at a coarser level are exactly the parents of
    /// the finer candidates and parent() is monotone, so the choice agrees
    /// across levels.
    pub fn from_point(p: LatLng, level: u8) -> Result<CellId, DggError> {
        check_level(level)?;
        Ok(Self::from_xyz(p.to_point(), level))
    }

    pub(crate) fn from_xyz(p: Point3, level: u8) -> CellId {
        let scale = (1u64 << level) as f64;
        let max_index = (1u32 << level) - 1;
        let axis = |s: f64| -> (u32, u32) {
            let x = (s.clamp(0.0, 1.0)) * scale;
            let f = x.floor();
            let hi = (f as u32).min(max_index);
            if f == x && x > 0.0 && hi == f as u32 {
                (hi - 1, hi)
            } else {
                (hi, hi)
            }
        };
        let mut best: Option<CellId> = None;
        for face in candidate_faces(p) {
            let (u, v) = xyz_to_uv(face, p);
            let (i0, i1) = axis(uv_to_st(u));
            let (j0, j1) = axis(uv_to_st(v));
            for i in [i0, i1] {
                for j in [j0, j1] {
                    let c = CellId::from_face_ij(face, i, j, level);
                    if best.is_none_or(|b| c < b) {
                        best = Some(c);
                    }
                }
            }
        }
        best.expect("every point has a face")
    }

    pub fn parent(self, level: u8) -> Result<CellId, DggError> {
        if level > self.level() {
            return Err(DggError::ParentLevel { level, cell_level: self.level() });
        }
        Ok(self.parent_unchecked(level))
    }

    pub(crate) fn parent_unchecked(self, level: u8) -> CellId {
        let lsb = lsb_for_level(level);
        CellId((self.0 & lsb.wrapping_neg()) | lsb)
    }

    pub fn children(self) -> Result<[CellId; 4], DggError> {
        if self.level() == MAX_LEVEL {
            return Err(DggError::LeafHasNoChildren(self));
        }
        Ok(self.children_unchecked())
    }

    pub(crate) fn children_unchecked(self) -> [CellId; 4] {
        let lsb = self.lsb();
        let step = lsb >> 2;
        let base = self.0 - lsb;
        [1, 3, 5, 7].map(|k| CellId(base + step * k))
    }

    /// Smallest and largest leaf-level ids under this cell.
    pub fn range(self) -> (u64, u64) {
        let lsb = self.lsb();
        (self.0 - (lsb - 1), self.0 + (lsb - 1))
    }

    /// True when `other` equals this cell or is one of its descendants.
    pub fn contains_cell(self, other: CellId) -> bool {
        let (lo, hi) = self.range();
        lo <= other.0 && other.0 <= hi
    }

    fn st_bounds(self) -> (u8, [f64; 4]) {
        let FaceIJ { face, i, j, level } = self.to_face_ij();
        let scale = (1u64 << level) as f64;
        let (s0, s1) = (f64::from(i) / scale, f64::from(i + 1) / scale);
        let (t0, t1) = (f64::from(j) / scale, f64::from(j + 1) / scale);
        (face, [s0, s1, t0, t1])
    }

    /// Corner points, counter-clockwise seen from outside the sphere.
    pub fn vertices(self) -> [Point3; 4] {
        let (face, [s0, s1, t0, t1]) = self.st_bounds();
        let (u0, u1, v0, v1) = (st_to_uv(s0), st_to_uv(s1), st_to_uv(t0), st_to_uv(t1));
        [(u0, v0), (u1, v0), (u1, v1), (u0, v1)].map(|(u, v)| face_uv_to_xyz(face, u, v).normalize())
    }

    pub fn center(self) -> Point3 {
        let (face, [s0, s1, t0, t1]) = self.st_bounds();
        face_uv_to_xyz(face, st_to_uv((s0 + s1) / 2.0), st_to_uv((t0 + t1) / 2.0)).normalize()
    }

    /// The cell quadrilateral as a polygon with geodesic edges.
    pub fn bounds(self) -> Geometry {
        Geometry::Polygon(Polygon::from_ccw_points_unchecked(self.vertices().to_vec()))
    }

    pub fn bounds_latlng(self) -> [LatLng; 4] {
        self.vertices().map(LatLng::from_point)
    }

    /// Area in steradians.
    pub fn area(self) -> f64 {
        let [a, b, c, d] = self.vertices();
        signed_triangle_area(a, b, c) + signed_triangle_area(a, c, d)
    }

    pub fn area_km2(self) -> f64 {
        self.area() * EARTH_RADIUS_KM * EARTH_RADIUS_KM
    }

    /// The four cells sharing an edge with this one, in the order
    /// -i, +i, -j, +j of the face coordinates.
    pub fn edge_neighbors(self) -> Result<[CellId; 4], DggError> {
        let level = self.level();
        if level == 0 {
            return Err(DggError::NoNeighborsAtLevelZero);
        }
        let FaceIJ { face, i, j, .. } = self.to_face_ij();
        let size = 1i64 << level;
        let (i, j) = (i64::from(i), i64::from(j));
        Ok([(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)].map(|(ni, nj)| {
            if (0..size).contains(&ni) && (0..size).contains(&nj) {
                CellId::from_face_ij(face, ni as u32, nj as u32, level)
            } else {
                wrapped_neighbor(face, ni, nj, level)
            }
        }))
    }

    /// Hex form of the bits with trailing zero digits removed. Tokens of one
    /// level all have the same length, so their order matches id order.
    pub fn token(self) -> String {
        let hex = format!("{:016x}", self.0);
        let trimmed = hex.trim_end_matches('0');
        if trimmed.is_empty() {
            "X".to_string()
        } else {
            trimmed.to_string()
        }
    }

    pub fn from_token(token: &str) -> Result<CellId, DggError> {
        let malformed = || DggError::MalformedToken(token.to_string());
        if token.is_empty() || token.len() > 16 || !token.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(malformed());
        }
        let bits = u64::from_str_radix(&format!("{token:0<16}"), 16).map_err(|_| malformed())?;
        let cell = CellId::from_raw(bits).map_err(|_| malformed())?;
        if cell.token() != token.to_ascii_lowercase() {
            return Err(malformed());
        }
        Ok(cell)
    }
}

/// Neighbor across a face edge: a leaf position just outside the face is
/// carried through xyz onto the adjacent face, then lifted to `level`.
fn wrapped_neighbor(face: u8, ni: i64, nj: i64, level: u8) -> CellId {
    let shift = MAX_LEVEL - level;
    let leaf = |n: i64| -> f64 {
        let size = 1i64 << level;
        let half = 1i64 << shift >> 1;
        if n < 0 {
            -1.0
        } else if n >= size {
            (1i64 << MAX_LEVEL) as f64
        } else {
            ((n << shift) + half) as f64
        }
    };
    let leaf_scale = (1u64 << MAX_LEVEL) as f64;
    let s = (leaf(ni) + 0.5) / leaf_scale;
    let t = (leaf(nj) + 0.5) / leaf_scale;
    let p = face_uv_to_xyz(face, st_to_uv(s), st_to_uv(t)).normalize();
    CellId::from_xyz(p, MAX_LEVEL).parent_unchecked(level)
}

impl fmt::Debug for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellId({}/{})", self.level(), self.token())
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}
