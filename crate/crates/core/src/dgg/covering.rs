use super::{CellId, DggError, LevelRange};
use crate::geometry::{relate, Geometry, SpatialRelation};
use crate::sphere::Cap;
use serde::{Deserialize, Serialize};

/// Default bound on cells emitted by one covering.
pub const COVERING_CAP: usize = 1_000_000;

/// How a geometry relates to one covering cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellRelation {
    /// The geometry contains the whole cell.
    ContainsCell,
    /// The geometry lies inside the cell.
    WithinCell,
    /// The geometry partially covers the cell.
    Overlaps,
}

impl CellRelation {
    /// Predicate from the geometry to the cell.
    pub fn spatial_relation(self) -> SpatialRelation {
        match self {
            CellRelation::ContainsCell => SpatialRelation::Contains,
            CellRelation::WithinCell => SpatialRelation::Within,
            CellRelation::Overlaps => SpatialRelation::Overlaps,
        }
    }
}

/// Classifies one cell against `g` the way the covering does. `None` for
/// disjoint and touching cells.
pub fn classify_cell(g: &Geometry, cell: CellId) -> Option<CellRelation> {
    match relate(g, &cell.bounds())? {
        SpatialRelation::Equals | SpatialRelation::Contains => Some(CellRelation::ContainsCell),
        SpatialRelation::Within => Some(CellRelation::WithinCell),
        SpatialRelation::Overlaps => Some(CellRelation::Overlaps),
        SpatialRelation::Touches => None,
    }
}

/// Cells related to `g`, found by descending from the six faces.
///
/// Levels below `min_level` are always refined. A cell inside `g` is
/// reported as contained and not refined further. A cell containing `g` is
/// reported as within at each level of the range and refined. Partially
/// covered cells are refined down to `max_level` and reported as overlaps
/// there. Cells that only touch `g` are left out. Points take their cell
/// from `CellId::from_point` at every level, so a point on a cell edge gets
/// exactly one cell per level.
pub fn covering(g: &Geometry, range: LevelRange) -> Result<Vec<(CellId, CellRelation)>, DggError> {
    covering_with_cap(g, range, COVERING_CAP)
}

pub fn covering_with_cap(
    g: &Geometry,
    range: LevelRange,
    cap: usize,
) -> Result<Vec<(CellId, CellRelation)>, DggError> {
    if g.is_empty() {
        return Err(DggError::EmptyGeometry);
    }
    let mut out = Vec::new();
    if let Geometry::Point(p) = g {
        for level in range.min_level..=range.max_level {
            out.push((CellId::from_xyz(p.to_point(), level), CellRelation::WithinCell));
        }
        if out.len() > cap {
            return Err(DggError::CoveringTooLarge { limit: cap });
        }
        out.sort();
        return Ok(out);
    }
    let bound = g.cap_bound();
    let mut stack: Vec<CellId> = CellId::faces().rev().collect();
    while let Some(cell) = stack.pop() {
        let level = cell.level();
        if !bound.may_intersect(&Cap::from_points(&cell.vertices())) {
            continue;
        }
        let Some(rel) = classify_cell(g, cell) else { continue };
        match rel {
            CellRelation::ContainsCell => {
                if level >= range.min_level {
                    out.push((cell, rel));
                } else {
                    emit_descendants(cell, range.min_level, &mut out, cap)?;
                }
            }
            CellRelation::WithinCell | CellRelation::Overlaps => {
                if level >= range.min_level && (rel == CellRelation::WithinCell || level == range.max_level) {
                    out.push((cell, rel));
                }
                if level < range.max_level {
                    stack.extend(cell.children_unchecked().into_iter().rev());
                }
            }
        }
        if out.len() > cap {
            return Err(DggError::CoveringTooLarge { limit: cap });
        }
    }
    out.sort();
    Ok(out)
}

fn emit_descendants(
    cell: CellId,
    level: u8,
    out: &mut Vec<(CellId, CellRelation)>,
    cap: usize,
) -> Result<(), DggError> {
    let count = 1usize.checked_shl(2 * u32::from(level - cell.level())).unwrap_or(usize::MAX);
    if out.len().saturating_add(count) > cap {
        return Err(DggError::CoveringTooLarge { limit: cap });
    }
    let mut cells = vec![cell];
    for _ in cell.level()..level {
        cells = cells.into_iter().flat_map(CellId::children_unchecked).collect();
    }
    out.extend(cells.into_iter().map(|c| (c, CellRelation::ContainsCell)));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    #[test]
    fn whole_sphere_level_zero() {
        let cov = covering(&Geometry::whole_sphere(), LevelRange::new(0, 0).unwrap()).unwrap();
        let expected: Vec<_> = CellId::faces().map(|c| (c, CellRelation::ContainsCell)).collect();
        assert_eq!(cov, expected);
    }

    #[test]
    fn single_point_one_cell_per_level() {
        let g = Geometry::point(34.42, -119.7).unwrap();
        let cov = covering(&g, LevelRange::default()).unwrap();
        assert_eq!(cov.len(), 6);
        let levels: Vec<u8> = cov.iter().map(|(c, _)| c.level()).collect();
        let mut sorted = levels.clone();
        sorted.sort();
        assert_eq!(sorted, vec![8, 9, 10, 11, 12, 13]);
        assert!(cov.iter().all(|(_, r)| *r == CellRelation::WithinCell));
    }

    #[test]
    fn empty_geometry_errors() {
        assert_eq!(covering(&Geometry::MultiPolygon(vec![]), LevelRange::default()), Err(DggError::EmptyGeometry));
    }

    #[test]
    fn cap_is_enforced() {
        let g = parse_wkt("POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))").unwrap();
        let err = covering_with_cap(&g, LevelRange::new(8, 12).unwrap(), 100).unwrap_err();
        assert_eq!(err, DggError::CoveringTooLarge { limit: 100 });
    }

    #[test]
    fn area_is_bracketed() {
        let g = parse_wkt("POLYGON ((10 10, 10.7 10.1, 10.5 10.9, 9.9 10.6, 10 10))").unwrap();
        let cov = covering(&g, LevelRange::new(6, 9).unwrap()).unwrap();
        let inner: f64 = cov.iter().filter(|(_, r)| *r == CellRelation::ContainsCell).map(|(c, _)| c.area()).sum();
        let outer: f64 =
            inner + cov.iter().filter(|(_, r)| *r == CellRelation::Overlaps).map(|(c, _)| c.area()).sum::<f64>();
        assert!(inner <= g.area() && g.area() <= outer, "{inner} {} {outer}", g.area());
        for (c, rel) in &cov {
            assert_eq!(classify_cell(&g, *c), Some(*rel));
        }
    }
}
