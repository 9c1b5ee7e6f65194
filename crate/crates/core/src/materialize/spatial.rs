use super::iri::cell_iri;
use super::{Batch, MaterializeError};
use crate::dgg::{covering_with_cap, CellId, LevelRange, COVERING_CAP};
use crate::geometry::{parse_wkt, relate, Geometry, SpatialRelation};
use crate::store::{Store, Term, Triple};
use crate::vocab::{term, GEO, KWG_ONT};
use rayon::prelude::*;
use std::collections::BTreeSet;

/// The pre-computed predicate for a relation.
pub fn spatial_predicate(rel: SpatialRelation) -> Term {
    term(KWG_ONT, rel.local_name())
}

fn pair(b: &mut Batch, a: &Term, rel: SpatialRelation, c: &Term) {
    b.add(a, spatial_predicate(rel), c.clone());
    b.add(c, spatial_predicate(rel.inverse()), a.clone());
}

fn type_cell(b: &mut Batch, cell: CellId, node: &Term) {
    b.typed(node, term(KWG_ONT, "S2Cell"));
    b.typed(node, term(KWG_ONT, &format!("S2Cell_Level{}", cell.level())));
}

/// Links a geometry node to every cell of its covering, in both directions,
/// plus the parent chain of each cell down to the range's minimum level.
pub fn materialize_spatial_links(
    geometry_node: &Term,
    g: &Geometry,
    range: LevelRange,
) -> Result<Vec<Triple>, MaterializeError> {
    materialize_spatial_links_capped(geometry_node, g, range, COVERING_CAP)
}

pub fn materialize_spatial_links_capped(
    geometry_node: &Term,
    g: &Geometry,
    range: LevelRange,
    cap: usize,
) -> Result<Vec<Triple>, MaterializeError> {
    let cells = covering_with_cap(g, range, cap)?;
    let mut b = Batch::default();
    let mut chained = BTreeSet::new();
    for (cell, rel) in &cells {
        let node = cell_iri(*cell);
        pair(&mut b, geometry_node, rel.spatial_relation(), &node);
        let mut c = *cell;
        while chained.insert(c) {
            type_cell(&mut b, c, &cell_iri(c));
            if c.level() <= range.min_level {
                break;
            }
            let p = c.parent_unchecked(c.level() - 1);
            pair(&mut b, &cell_iri(c), SpatialRelation::Within, &cell_iri(p));
            c = p;
        }
    }
    Ok(b.finish())
}

fn geometry_of(store: &Store, entity: &Term) -> Result<Geometry, MaterializeError> {
    let missing = || MaterializeError::MissingGeometry(entity.value().to_string());
    let mut nodes = store.objects(entity, &term(GEO, "hasGeometry"));
    nodes.sort();
    let node = nodes.first().ok_or_else(missing)?;
    let wkt = store.objects(node, &term(GEO, "asWKT"));
    let lit = wkt.iter().find_map(Term::lexical).ok_or_else(missing)?;
    parse_wkt(lit).map_err(|e| MaterializeError::InvalidGeometry(format!("{}: {e}", entity.value())))
}

/// Pairwise relations within an explicit set of regions.
pub fn materialize_region_topology(store: &Store, regions: &[Term]) -> Result<Vec<Triple>, MaterializeError> {
    let mut regions = regions.to_vec();
    regions.sort();
    regions.dedup();
    let with_geoms = regions
        .into_iter()
        .map(|r| geometry_of(store, &r).map(|g| (r, g)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(region_topology_of(&with_geoms))
}

/// Pairwise relations between regions whose geometries are already at hand.
pub fn region_topology_of(regions: &[(Term, Geometry)]) -> Vec<Triple> {
    let mut regions = regions.to_vec();
    regions.sort_by(|a, b| a.0.cmp(&b.0));
    let (regions, geoms): (Vec<Term>, Vec<Geometry>) = regions.into_iter().unzip();
    let caps: Vec<_> = geoms.iter().map(Geometry::cap_bound).collect();
    let found: Vec<(usize, usize, SpatialRelation)> = (0..regions.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (geoms, caps) = (&geoms, &caps);
            ((i + 1)..geoms.len()).filter_map(move |j| {
                if !caps[i].may_intersect(&caps[j]) {
                    return None;
                }
                relate(&geoms[i], &geoms[j]).map(|r| (i, j, r))
            })
        })
        .collect();
    let mut b = Batch::default();
    for (i, j, rel) in found {
        pair(&mut b, &regions[i], rel, &regions[j]);
    }
    b.finish()
}
