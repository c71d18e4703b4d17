use super::{Color, ColoredBall, Mode, PlacementRecord, RangePlan};
use crate::cayley::{Ball, Bfs, NONE};
use crate::error::{Error, Result};

/// One marked copy of `w_i`, written from `t` toward `t·g_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// 1-based index `i` of the word.
    pub word_index: usize,
    pub t: u32,
    /// Word vertices `v_0 = t, ..., v_L`.
    pub path: Vec<u32>,
    /// Generator along each word edge.
    pub gens: Vec<usize>,
    /// Generator of the chosen `D`-edge at `t`.
    pub d_gen: usize,
    pub d_edge: u32,
    /// `t·g_i`.
    pub companion_vertex: u32,
    /// The `d_gen`-edge at `t·g_i`, colored `E`.
    pub companion_edge: u32,
}

impl Placement {
    pub fn word_edges<'a>(&'a self, ball: &'a Ball) -> impl Iterator<Item = u32> + 'a {
        self.path.iter().zip(&self.gens).map(|(&v, &s)| ball.edge_at(v, s))
    }

    /// Endpoints of the companion edge.
    pub fn companion_endpoints(&self, ball: &Ball) -> [u32; 2] {
        [self.companion_vertex, ball.nbr(self.companion_vertex, self.d_gen)]
    }

    pub(crate) fn to_record(&self, ball: &Ball) -> PlacementRecord {
        let g = ball.group();
        PlacementRecord {
            word_index: self.word_index,
            t: g.element_to_json(ball.vertex(self.t)),
            path: self.path.iter().map(|&v| g.element_to_json(ball.vertex(v))).collect(),
            d_gen: ball.gens().name(self.d_gen).to_string(),
            companion: g.element_to_json(ball.vertex(self.companion_vertex)),
        }
    }

    pub(crate) fn from_record(ball: &Ball, r: &PlacementRecord) -> Result<Self> {
        let g = ball.group();
        let find = |v: &serde_json::Value| -> Result<u32> {
            ball.index_of(&g.element_from_json(v)?)
                .ok_or_else(|| Error::Parse(format!("placement vertex {v} outside ball")))
        };
        let path = r.path.iter().map(find).collect::<Result<Vec<_>>>()?;
        let gens = path
            .windows(2)
            .map(|p| {
                (0..ball.gens().len())
                    .find(|&s| ball.nbr(p[0], s) == p[1])
                    .ok_or_else(|| Error::Parse("placement path is not a path".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let d_gen = ball
            .gens()
            .position(&r.d_gen)
            .ok_or_else(|| Error::Parse(format!("unknown generator {}", r.d_gen)))?;
        let t = find(&r.t)?;
        let companion_vertex = find(&r.companion)?;
        Ok(Placement {
            word_index: r.word_index,
            t,
            path,
            gens,
            d_gen,
            d_edge: ball.edge_at(t, d_gen),
            companion_vertex,
            companion_edge: ball.edge_at(companion_vertex, d_gen),
        })
    }
}

fn paint(colors: &mut [Option<Color>], ball: &Ball, edge: u32, c: Color) -> Result<()> {
    if edge == NONE {
        return Err(Error::BallTooSmall { radius: ball.radius(), needed: ball.radius() + 1 });
    }
    match colors[edge as usize] {
        Some(old) if old != c => Err(Error::PlacementConflict(ball.edge(edge).src)),
        _ => {
            colors[edge as usize] = Some(c);
            Ok(())
        }
    }
}

/// Places copies of `w_k, ..., w_1` greedily in vertex order and fills the
/// rest with `F`.
///
/// Step `i` accepts `t` when its `2R_i'`-ball lies inside the domain, is
/// disjoint from the `2R_i'`-balls of the points already chosen in this
/// step, and avoids the word vertices and companion edges of later words.
pub fn construct_coloring(ball: Ball, plan: &RangePlan) -> Result<ColoredBall> {
    if plan.mode == Mode::Paper && ball.radius() < plan.max_r() {
        return Err(Error::BallTooSmall { radius: ball.radius(), needed: plan.max_r() });
    }
    let n = ball.len();
    let mut colors: Vec<Option<Color>> = vec![None; ball.edges().len()];
    let mut material: Vec<u32> = Vec::new();
    let mut placements = Vec::new();
    let mut bfs = Bfs::new(n);
    let mut geo_bfs = Bfs::new(n);

    for (i, step) in plan.steps.iter().enumerate().rev() {
        let rp = step.r_prime;
        let reach = (2 * rp).max(step.g_len + 1);
        let mut excluded = vec![false; n];
        bfs.run(&ball, &material, 2 * rp);
        for &v in bfs.visited() {
            excluded[v as usize] = true;
        }
        let mut step_material = Vec::new();
        for t in 0..n as u32 {
            if excluded[t as usize] || ball.dist(t) + reach > ball.radius() {
                continue;
            }
            let u = ball.translate(t, &step.g).ok_or(Error::BallTooSmall {
                radius: ball.radius(),
                needed: ball.dist(t) + step.g_len,
            })?;
            let geo = ball
                .canonical_geodesic(&mut geo_bfs, t, u, step.g_len)
                .ok_or_else(|| Error::InternalInconsistency(format!("no geodesic of length {}", step.g_len)))?;
            let len = step.word.len();
            let path = geo.vertices[..=len].to_vec();
            let gens = geo.gens[..len].to_vec();
            let word_edges: Vec<u32> = path.iter().zip(&gens).map(|(&v, &s)| ball.edge_at(v, s)).collect();
            for (&e, &c) in word_edges.iter().zip(step.word.letters()) {
                paint(&mut colors, &ball, e, c)?;
            }
            for (j, &v) in path.iter().enumerate() {
                let mark = if j == 0 { Color::D } else { Color::E };
                for s in 0..ball.gens().len() {
                    let e = ball.edge_at(v, s);
                    if !word_edges.contains(&e) {
                        paint(&mut colors, &ball, e, mark)?;
                    }
                }
            }
            let d_gen = (0..ball.gens().len())
                .find(|&s| !word_edges.contains(&ball.edge_at(t, s)))
                .ok_or_else(|| Error::InternalInconsistency("no non-path edge at t".into()))?;
            let companion_edge = ball.edge_at(u, d_gen);
            paint(&mut colors, &ball, companion_edge, Color::E)?;

            step_material.extend(&path);
            step_material.push(u);
            step_material.push(ball.nbr(u, d_gen));
            bfs.run(&ball, &[t], 4 * rp);
            for &v in bfs.visited() {
                excluded[v as usize] = true;
            }
            placements.push(Placement {
                word_index: i + 1,
                t,
                path,
                gens,
                d_gen,
                d_edge: ball.edge_at(t, d_gen),
                companion_vertex: u,
                companion_edge,
            });
        }
        material.extend(step_material);
    }
    let colors = colors.into_iter().map(|c| c.unwrap_or(Color::F)).collect();
    Ok(ColoredBall::from_parts(ball, colors, placements, Some(plan.clone())))
}
