//! Cell-mediated spatial operators.

use super::QueryError;
use crate::dgg::{covering_with_cap, CellId, LevelRange, COVERING_CAP};
use crate::geometry::{parse_wkt, relate, Geometry, SpatialRelation};
use crate::materialize::cell_of_iri;
use crate::store::{Store, Term};
use crate::vocab::{term, GEO, KWG_ONT, RDF};
use std::collections::{BTreeMap, BTreeSet, HashSet};

fn sf_predicates() -> Vec<Term> {
    SpatialRelation::ALL.iter().map(|r| term(KWG_ONT, r.local_name())).collect()
}

fn is_cell(t: &Term) -> bool {
    cell_of_iri(t.value()).is_some()
}

/// Objects of every spatial predicate from `node`.
fn spatial_neighbors(store: &Store, node: &Term, preds: &[Term]) -> Vec<Term> {
    preds.iter().flat_map(|p| store.objects(node, p)).collect()
}

fn entity_of(store: &Store, geometry: &Term) -> Vec<Term> {
    let owners = store.subjects(&term(GEO, "hasGeometry"), geometry);
    if owners.is_empty() { vec![geometry.clone()] } else { owners }
}

/// Entities sharing a cell with `entity`, allowing one parent/child step
/// between the two cells.
pub fn spatially_related(store: &Store, entity: &Term) -> Result<Vec<Term>, QueryError> {
    let preds = sf_predicates();
    let geoms = store.objects(entity, &term(GEO, "hasGeometry"));
    let starts = if geoms.is_empty() { vec![entity.clone()] } else { geoms.clone() };
    let mut cells: BTreeSet<Term> = BTreeSet::new();
    for g in &starts {
        if is_cell(g) {
            cells.insert(g.clone());
        } else {
            cells.extend(spatial_neighbors(store, g, &preds).into_iter().filter(is_cell));
        }
    }
    if cells.is_empty() {
        return Err(QueryError::NoSpatialLinks(entity.value().to_string()));
    }
    let hierarchy = [term(KWG_ONT, "sfWithin"), term(KWG_ONT, "sfContains")];
    let mut hop = cells.clone();
    for c in &cells {
        hop.extend(spatial_neighbors(store, c, &hierarchy).into_iter().filter(is_cell));
    }
    let own: BTreeSet<&Term> = starts.iter().chain(std::iter::once(entity)).collect();
    let mut out = BTreeSet::new();
    for c in &hop {
        for g in spatial_neighbors(store, c, &preds) {
            if is_cell(&g) || own.contains(&g) {
                continue;
            }
            out.extend(entity_of(store, &g).into_iter().filter(|e| e != entity));
        }
    }
    Ok(out.into_iter().collect())
}

/// Union of the level ranges recorded for materialized subgraphs, or the
/// default range when none is recorded.
pub fn stored_level_range(store: &Store) -> LevelRange {
    let read = |p: &str| -> Vec<u8> {
        store
            .match_pattern(None, Some(&term(KWG_ONT, p)), None)
            .iter()
            .filter_map(|t| t.object.lexical()?.parse().ok())
            .collect()
    };
    match (read("minCellLevel").into_iter().min(), read("maxCellLevel").into_iter().max()) {
        (Some(lo), Some(hi)) => LevelRange::new(lo, hi).unwrap_or_default(),
        _ => LevelRange::default(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AreaMatch {
    pub entity: Term,
    /// Distinct stored cells linking the entity to the area.
    pub matched_cells: usize,
}

/// Stored cells, sorted by id, with their terms.
fn stored_cells(store: &Store) -> Vec<(CellId, Term)> {
    let mut cells: Vec<(CellId, Term)> = store
        .subjects(&term(RDF, "type"), &term(KWG_ONT, "S2Cell"))
        .into_iter()
        .filter_map(|t| cell_of_iri(t.value()).map(|c| (c, t)))
        .collect();
    cells.sort();
    cells
}

fn geometry_node_wkt(store: &Store, g: &Term) -> Option<Geometry> {
    store.objects(g, &term(GEO, "asWKT")).iter().find_map(|l| parse_wkt(l.lexical()?).ok())
}

pub fn check_area(poly: &Geometry) -> Result<(), QueryError> {
    if poly.dimension() != 2 || poly.is_empty() || poly.area() <= 0.0 {
        return Err(QueryError::InvalidArea("area must be a polygon with positive area".into()));
    }
    Ok(())
}

/// Entities whose geometries share cells with the area's covering, with
/// cell counts. Stored cells at other levels are matched through the
/// hierarchy.
pub fn area_matches(
    store: &Store,
    poly: &Geometry,
    kinds: &[Term],
    exact: bool,
    range: LevelRange,
    cap: usize,
) -> Result<Vec<AreaMatch>, QueryError> {
    check_area(poly)?;
    let cover = covering_with_cap(poly, range, cap)?;
    let stored = stored_cells(store);
    let stored_ids: HashSet<CellId> = stored.iter().map(|(c, _)| *c).collect();
    let mut hit: BTreeSet<usize> = BTreeSet::new();
    let mut ancestors: BTreeSet<CellId> = BTreeSet::new();
    for (q, _) in &cover {
        // stored descendants (and q itself) form a contiguous id range
        let (lo, hi) = q.range();
        let start = stored.partition_point(|(c, _)| c.raw() < lo);
        let end = stored.partition_point(|(c, _)| c.raw() <= hi);
        hit.extend(start..end);
        for l in 0..q.level() {
            let p = q.parent(l).expect("ancestor level");
            if stored_ids.contains(&p) {
                ancestors.insert(p);
            }
        }
    }
    for a in ancestors {
        if let Ok(i) = stored.binary_search_by(|(c, _)| c.cmp(&a)) {
            hit.insert(i);
        }
    }

    let preds = sf_predicates();
    let mut per_geometry: BTreeMap<Term, usize> = BTreeMap::new();
    for i in hit {
        for g in spatial_neighbors(store, &stored[i].1, &preds) {
            if !is_cell(&g) {
                *per_geometry.entry(g).or_insert(0) += 1;
            }
        }
    }
    let ty = term(RDF, "type");
    let mut per_entity: BTreeMap<Term, usize> = BTreeMap::new();
    for (g, n) in per_geometry {
        if exact {
            match geometry_node_wkt(store, &g) {
                Some(geom) if relate(poly, &geom).is_some() => {}
                _ => continue,
            }
        }
        for e in entity_of(store, &g) {
            if !kinds.is_empty()
                && !kinds.iter().any(|k| store.contains(&crate::store::Triple { subject: e.clone(), predicate: ty.clone(), object: k.clone() }))
            {
                continue;
            }
            *per_entity.entry(e).or_insert(0) += n;
        }
    }
    Ok(per_entity.into_iter().map(|(entity, matched_cells)| AreaMatch { entity, matched_cells }).collect())
}

/// Entities in the area, using the level range recorded in the store.
pub fn entities_in_area(store: &Store, poly: &Geometry, kinds: &[Term], exact: bool) -> Result<Vec<Term>, QueryError> {
    let range = stored_level_range(store);
    Ok(area_matches(store, poly, kinds, exact, range, COVERING_CAP)?.into_iter().map(|m| m.entity).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materialize::*;

    fn world() -> (Store, Vec<Term>) {
        let v = Vocabulary::default();
        let mut store = Store::new();
        let range = LevelRange::new(6, 9).unwrap();
        let kind = format!("{KWG_ONT}Storm");
        let polys = [
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
            [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)],
            [(10.0, 10.0), (11.0, 10.0), (11.0, 11.0), (10.0, 11.0)],
        ];
        let mut iris = Vec::new();
        for (k, p) in polys.iter().enumerate() {
            let g = Geometry::polygon_lnglat(p).unwrap();
            let rec = FeatureRecord::new("storms", &k.to_string(), &kind, g.clone());
            let e = rec.iri().unwrap();
            let mut ts = materialize_entity(&v, &rec).unwrap();
            ts.extend(materialize_spatial_links(&geometry_iri(&e), &g, range).unwrap());
            for t in ts {
                store.insert(&t).unwrap();
            }
            iris.push(e);
        }
        let s = mint_iri(MintKind::Subgraph, "storms").unwrap();
        for t in [
            crate::store::Triple { subject: s.clone(), predicate: term(KWG_ONT, "minCellLevel"), object: Term::integer(6) },
            crate::store::Triple { subject: s, predicate: term(KWG_ONT, "maxCellLevel"), object: Term::integer(9) },
        ] {
            store.insert(&t).unwrap();
        }
        (store, iris)
    }

    #[test]
    fn overlapping_storms_are_symmetric() {
        let (store, iris) = world();
        assert_eq!(spatially_related(&store, &iris[0]).unwrap(), vec![iris[1].clone()]);
        assert_eq!(spatially_related(&store, &iris[1]).unwrap(), vec![iris[0].clone()]);
        assert!(spatially_related(&store, &iris[2]).unwrap().is_empty());
        let ghost = Term::iri("http://example.org/ghost").unwrap();
        assert!(matches!(spatially_related(&store, &ghost), Err(QueryError::NoSpatialLinks(_))));
    }

    #[test]
    fn area_queries() {
        let (store, iris) = world();
        assert_eq!(stored_level_range(&store), LevelRange::new(6, 9).unwrap());
        let q = Geometry::polygon_lnglat(&[(0.1, 0.1), (0.3, 0.1), (0.3, 0.3), (0.1, 0.3)]).unwrap();
        assert_eq!(entities_in_area(&store, &q, &[], true).unwrap(), vec![iris[0].clone()]);
        let approx = entities_in_area(&store, &q, &[], false).unwrap();
        assert!(approx.contains(&iris[0]));
        let empty = Geometry::polygon_lnglat(&[(50.0, 50.0), (50.5, 50.0), (50.5, 50.5), (50.0, 50.5)]).unwrap();
        assert!(entities_in_area(&store, &empty, &[], true).unwrap().is_empty());
        let line = Geometry::LineString(crate::geometry::LineString::new(vec![
            crate::sphere::LatLng::new(0.0, 0.0).unwrap(),
            crate::sphere::LatLng::new(1.0, 1.0).unwrap(),
        ]).unwrap());
        assert!(matches!(entities_in_area(&store, &line, &[], true), Err(QueryError::InvalidArea(_))));
    }

    #[test]
    fn coarser_query_levels_bridge_to_stored_cells() {
        let (store, iris) = world();
        let q = Geometry::polygon_lnglat(&[(0.1, 0.1), (0.3, 0.1), (0.3, 0.3), (0.1, 0.3)]).unwrap();
        for range in [LevelRange::new(3, 5).unwrap(), LevelRange::new(10, 11).unwrap()] {
            let found: Vec<Term> = area_matches(&store, &q, &[], true, range, COVERING_CAP).unwrap().into_iter().map(|m| m.entity).collect();
            assert_eq!(found, vec![iris[0].clone()], "{range:?}");
        }
    }
}
