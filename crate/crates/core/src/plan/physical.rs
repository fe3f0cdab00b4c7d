// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The colgraph Authors

use std::sync::Arc;

use super::logical::{BuildSide, JoinKind, JoinMethod, JoinNode, Plan};
use crate::error::Result;
use crate::expr::Expr;
use crate::storage::{Catalog, Projection, TableRole};

/// Partitioning and order of a plan's output, as the executor will produce
/// it. Each list holds names of columns carrying equal values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Props {
    pub part: Vec<String>,
    pub sort: Vec<String>,
}

fn has(list: &[String], name: &str) -> bool {
    list.iter().any(|n| n == name)
}

fn scan_projection(catalog: &Catalog, table: &str, name: Option<&str>) -> Option<Arc<Projection>> {
    let entry = catalog.get(table)?;
    match name {
        Some(n) => entry.projection(n).cloned(),
        None => entry.projections.first().cloned(),
    }
}

/// Output properties of `plan` on `catalog`; empty when unknown.
pub fn props(plan: &Plan, catalog: &Catalog) -> Props {
    match plan {
        Plan::Scan(s) => match scan_projection(catalog, &s.table, s.projection.as_deref()) {
            Some(p) => Props {
                part: vec![format!("{}.{}", s.alias, p.segmentation_key)],
                sort: p
                    .sort_key
                    .first()
                    .map(|k| vec![format!("{}.{k}", s.alias)])
                    .unwrap_or_default(),
            },
            None => Props::default(),
        },
        Plan::Filter { input, .. }
        | Plan::ReplaceSink { input, .. }
        | Plan::UpdateSink { input, .. } => props(input, catalog),
        Plan::Project { input, exprs } => {
            let p = props(input, catalog);
            let map = |names: &[String]| -> Vec<String> {
                exprs
                    .iter()
                    .filter(|(e, _)| matches!(e, Expr::Column(c) if has(names, c)))
                    .map(|(_, n)| n.clone())
                    .collect()
            };
            Props {
                part: map(&p.part),
                sort: map(&p.sort),
            }
        }
        Plan::Join(j) => join_props(j, catalog),
        Plan::GroupByAgg(a) => {
            let mut p = props(&a.input, catalog);
            if catalog.partitions() > 1 && !a.keys.iter().any(|k| has(&p.part, k)) {
                p = Props {
                    part: a.keys.first().cloned().into_iter().collect(),
                    sort: Vec::new(),
                };
            }
            let lead = a.keys.iter().find(|k| has(&p.sort, k));
            Props {
                part: a.keys.iter().filter(|k| has(&p.part, k)).cloned().collect(),
                sort: lead.cloned().into_iter().collect(),
            }
        }
        Plan::VertexCompute(_) => Props {
            part: vec!["id".into()],
            sort: Vec::new(),
        },
        Plan::Union(_) => Props::default(),
    }
}

fn join_props(j: &JoinNode, catalog: &Catalog) -> Props {
    let inner = j.kind == JoinKind::Inner;
    let left = props(&j.left, catalog);
    let right = props(&j.right, catalog);
    let (mut p, probe_is_left, other) = match j.method {
        JoinMethod::Merge => (left, true, Some(right)),
        JoinMethod::Hash {
            build: BuildSide::Left,
        } => (right, false, None),
        JoinMethod::Hash {
            build: BuildSide::Right,
        }
        | JoinMethod::Unchosen => (left, true, None),
    };
    if inner {
        for (l, r) in &j.on {
            let (probe_key, other_key) = if probe_is_left { (l, r) } else { (r, l) };
            if has(&p.part, probe_key) {
                p.part.push(other_key.clone());
            }
            if has(&p.sort, probe_key) {
                p.sort.push(other_key.clone());
            }
        }
        if let Some(o) = other {
            p.part.extend(o.part);
        }
    }
    p
}

/// Which side of a plan defines `column`, by its alias prefix.
fn defines(plan: &Plan, column: &str) -> bool {
    column
        .split_once('.')
        .is_some_and(|(alias, _)| plan.scans().iter().any(|s| s.alias == alias))
}

fn is_vertex_scan(plan: &Plan) -> bool {
    match plan {
        Plan::Scan(s) => s.role == TableRole::Vertex,
        Plan::Filter { input, .. } => is_vertex_scan(input),
        _ => false,
    }
}

/// Assigns every unchosen join a method: merge iff both inputs can be read
/// sorted (and co-partitioned) on the key through available projections,
/// otherwise a hash join building the vertex side with SIP into the probe.
pub fn choose_physical(plan: &Plan, catalog: &Catalog) -> Result<Plan> {
    choose(plan, catalog, None)
}

/// `want` names a column the parent would like the output sorted on.
fn choose(plan: &Plan, catalog: &Catalog, want: Option<&str>) -> Result<Plan> {
    match plan {
        Plan::Scan(s) => {
            let mut s = s.clone();
            if let (None, Some(w)) = (&s.projection, want) {
                if let Some((alias, column)) = w.split_once('.') {
                    if alias == s.alias {
                        if let Some(p) = catalog
                            .get(&s.table)
                            .and_then(|e| e.sorted_projection(column))
                        {
                            s.projection = Some(p.name.clone());
                        }
                    }
                }
            }
            Ok(Plan::Scan(s))
        }
        Plan::Filter { input, predicate } => Ok(Plan::Filter {
            input: Box::new(choose(input, catalog, want)?),
            predicate: predicate.clone(),
        }),
        Plan::Project { input, exprs } => {
            let inner_want = want.and_then(|w| {
                exprs.iter().find_map(|(e, n)| match e {
                    Expr::Column(c) if n == w => Some(c.clone()),
                    _ => None,
                })
            });
            Ok(Plan::Project {
                input: Box::new(choose(input, catalog, inner_want.as_deref())?),
                exprs: exprs.clone(),
            })
        }
        Plan::GroupByAgg(a) => {
            let mut a = a.clone();
            a.input = Box::new(choose(
                &a.input,
                catalog,
                a.keys.first().map(String::as_str),
            )?);
            Ok(Plan::GroupByAgg(a))
        }
        Plan::Join(j) if j.method == JoinMethod::Unchosen => choose_join(j, catalog, want),
        Plan::Join(j) => {
            let mut j = j.clone();
            j.left = Box::new(choose(&j.left, catalog, None)?);
            j.right = Box::new(choose(&j.right, catalog, None)?);
            Ok(Plan::Join(j))
        }
        _ => plan.map_children(&mut |c| choose(c, catalog, None)),
    }
}

fn choose_join(j: &JoinNode, catalog: &Catalog, want: Option<&str>) -> Result<Plan> {
    let inner = j.kind == JoinKind::Inner;
    let (lk, rk) = j.on[0].clone();

    let mut merge = j.clone();
    merge.method = JoinMethod::Merge;
    merge.left = Box::new(choose(&j.left, catalog, Some(&lk))?);
    merge.right = Box::new(choose(&j.right, catalog, Some(&rk))?);
    let lp = props(&merge.left, catalog);
    let rp = props(&merge.right, catalog);
    let sorted = has(&lp.sort, &lk) && has(&rp.sort, &rk);
    let co_partitioned = catalog.partitions() == 1 || (has(&lp.part, &lk) && has(&rp.part, &rk));
    let merge = (sorted && co_partitioned).then_some(Plan::Join(merge));

    let build = if inner && is_vertex_scan(&j.left) && !is_vertex_scan(&j.right) {
        BuildSide::Left
    } else {
        BuildSide::Right
    };
    let mut hash = j.clone();
    hash.method = JoinMethod::Hash { build };
    hash.sip = inner;
    let probe_want = want.filter(|w| match build {
        BuildSide::Left => defines(&j.right, w),
        BuildSide::Right => defines(&j.left, w),
    });
    let (lw, rw) = match build {
        BuildSide::Left => (None, probe_want),
        BuildSide::Right => (probe_want, None),
    };
    hash.left = Box::new(choose(&j.left, catalog, lw)?);
    hash.right = Box::new(choose(&j.right, catalog, rw)?);
    let hash = Plan::Join(hash);
    // Merge unless only the hash join delivers the order the parent wants.
    Ok(match (merge, want) {
        (Some(m), Some(w))
            if !has(&props(&m, catalog).sort, w) && has(&props(&hash, catalog).sort, w) =>
        {
            hash
        }
        (Some(m), _) => m,
        (None, _) => hash,
    })
}
