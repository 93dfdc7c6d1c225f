//! Completing a 2-matching into a tour.

use crate::error::{breach, invalid};
use crate::instance::tour_cost;
use crate::lp::LpSolution;
use crate::matching::{Component, DirectedTwoMatching, TwoMatching};
use crate::rational::{int, Rational};
use crate::{Instance, Kind, Result, Tour};

/// Opens every cycle of `m`, joins the paths greedily by cost-1 edges and
/// closes the tour.
pub fn complete_to_tour(m: &TwoMatching, inst: &Instance) -> Result<Tour> {
    if inst.kind() != Kind::Symmetric {
        return invalid("undirected matching over an asymmetric instance");
    }
    complete(m.n(), m.components(), inst)
}

pub fn complete_directed(m: &DirectedTwoMatching, inst: &Instance) -> Result<Tour> {
    if inst.kind() != Kind::Asymmetric {
        return invalid("directed matching over a symmetric instance");
    }
    complete(m.n(), m.components(), inst)
}

fn complete(n: usize, comps: Vec<Component>, inst: &Instance) -> Result<Tour> {
    if n != inst.n() {
        return invalid(format!("matching has {n} vertices, instance has {}", inst.n()));
    }
    let directed = inst.kind() == Kind::Asymmetric;
    let c = comps.len();
    if c == 1 && comps[0].cycle {
        return Tour::new(comps[0].vertices.clone());
    }
    let mut comp_of = vec![0; n];
    for (i, comp) in comps.iter().enumerate() {
        for &v in &comp.vertices {
            comp_of[v] = i;
        }
    }
    let leaves_out = |v: usize| (0..n).any(|w| comp_of[w] != comp_of[v] && inst.is_unit(v, w));
    let enters = |v: usize| (0..n).any(|w| comp_of[w] != comp_of[v] && inst.is_unit(w, v));

    let mut paths: Vec<Vec<usize>> = Vec::with_capacity(c);
    for comp in comps {
        let vs = comp.vertices;
        if !comp.cycle {
            paths.push(vs);
            continue;
        }
        // Deleting edge (vs[i], vs[i + 1]) leaves the path vs[i + 1] .. vs[i].
        let k = vs.len();
        let rank = |i: usize| {
            let (a, b) = (vs[i], vs[(i + 1) % k]);
            let joinable = if directed { leaves_out(a) || enters(b) } else { leaves_out(a) || leaves_out(b) };
            (inst.cost(a, b) != 2, !joinable, i)
        };
        let cut = (0..k).min_by_key(|&i| rank(i)).expect("cycle is non-empty");
        let mut p: Vec<usize> = vs[cut + 1..].to_vec();
        p.extend_from_slice(&vs[..=cut]);
        paths.push(p);
    }
    let kept: u64 = paths
        .iter()
        .flat_map(|p| p.windows(2).map(|w| inst.cost(w[0], w[1]) as u64))
        .sum();

    // Greedy unit joins.
    'join: loop {
        for i in 0..paths.len() {
            for j in 0..paths.len() {
                if i == j {
                    continue;
                }
                let (ie, js) = (*paths[i].last().unwrap(), paths[j][0]);
                let mut flip = None;
                if inst.is_unit(ie, js) {
                    flip = Some((false, false));
                } else if !directed {
                    let (is_, je) = (paths[i][0], *paths[j].last().unwrap());
                    if inst.is_unit(ie, je) {
                        flip = Some((false, true));
                    } else if inst.is_unit(is_, js) {
                        flip = Some((true, false));
                    }
                }
                if let Some((fi, fj)) = flip {
                    let mut b = paths[j].clone();
                    if fj {
                        b.reverse();
                    }
                    if fi {
                        paths[i].reverse();
                    }
                    paths[i].extend(b);
                    paths.remove(j);
                    continue 'join;
                }
            }
        }
        break;
    }
    let order: Vec<usize> = paths.into_iter().flatten().collect();
    let tour = Tour::new(order)?;
    let cost = tour_cost(inst, &tour)?;
    let bound = kept + 2 * c as u64;
    if cost > bound {
        return breach(format!("completed tour costs {cost}, above the bound {bound}"));
    }
    Ok(tour)
}

/// Tour cost over the LP objective.
pub fn approx_ratio(inst: &Instance, tour: &Tour, x: &LpSolution) -> Result<Rational> {
    if x.n != inst.n() || x.kind != inst.kind() || tour.n() != inst.n() {
        return invalid("tour, solution and instance disagree");
    }
    Ok(int(tour_cost(inst, tour)? as i64) / x.objective.clone())
}
