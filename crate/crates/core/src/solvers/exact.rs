//! Exact solver: branch-and-bound.
//!
//! Before searching, two reductions fix users whose choice is forced:
//! * a user none of whose candidates can host the lowest level stays in the
//!   cloud (capacity only shrinks as others are placed);
//! * if a server can host every still-free user it covers at the top level
//!   at once, those users are placed there at the top level. Each reaches
//!   the maximum QoE and consumes only that server, which no other free user
//!   can use, so some optimal solution contains this placement.
//!
//! The remaining users split into independent components (connected through
//! servers that can still host someone), each searched separately.
//!
//! A component is searched over server loads: a server holding `n` users is
//! worth its best level mix for `n` users, and the concave envelopes of those
//! curves give a matching-based bound (see `matching`). Branches split one
//! server's load range until every load meets its envelope.
//!
//! When some server's mixes are too many to enumerate, the component is
//! searched depth-first over per-user choices instead, pruned by the minimum
//! of a pooled LP bound, a per-server split bound, and two Lagrangian bounds
//! (capacity rows relaxed; assignment rows relaxed). Users with identical
//! candidate sets are interchangeable, so their choices are forced into
//! non-increasing order to skip permuted duplicates.

use std::collections::HashMap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::error::SolverError;
use crate::model::{Scenario, SolverReport};
use crate::scalar::Scalar;
use crate::solvers::bound::Relaxation;
use crate::solvers::greedy::greedy_into;
use crate::solvers::matching::{plan_loads, LoadPlan};
use crate::solvers::mix::{best_mix_levels, level_mix};
use crate::solvers::{to_allocation, Residual};

/// Instances with more than this many `x_ijl` variables are rejected.
pub const MAX_DECISION_VARIABLES: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolverConfig {
    /// Wall-clock budget; zero means unlimited.
    pub time_limit: Duration,
    /// Stop exploring a subtree once its bound is within this much of the
    /// incumbent. A positive value forfeits the optimality guarantee.
    pub gap_tolerance: f64,
    /// Maximum number of search nodes; zero means unlimited.
    pub node_limit: u64,
}

impl Default for ExactSolverConfig {
    fn default() -> Self {
        Self { time_limit: Duration::ZERO, gap_tolerance: 0.0, node_limit: 0 }
    }
}

impl ExactSolverConfig {
    pub fn with_time_limit(time_limit: Duration) -> Self {
        Self { time_limit, ..Self::default() }
    }
}

type Pick = Option<(usize, usize)>;

pub fn solve_exact<T: Scalar>(sc: &Scenario<T>, cfg: &ExactSolverConfig) -> Result<SolverReport<T>, SolverError> {
    solve_with(sc, cfg, MIX_BUDGET)
}

/// Level-count vectors enumerated per server mix before falling back to a
/// relaxed bound (which also rules out searching over loads).
const MIX_BUDGET: usize = 20_000;

fn solve_with<T: Scalar>(sc: &Scenario<T>, cfg: &ExactSolverConfig, mix_budget: usize) -> Result<SolverReport<T>, SolverError> {
    if !(cfg.gap_tolerance >= 0.0 && cfg.gap_tolerance.is_finite()) {
        return Err(SolverError::InvalidConfig(format!("gap tolerance {} must be >= 0", cfg.gap_tolerance)));
    }
    let (n, m, q) = (sc.users().len() as u128, sc.servers().len() as u128, sc.catalog().len() as u128);
    let variables = n * m * q;
    if variables > MAX_DECISION_VARIABLES {
        return Err(SolverError::TooManyVariables { variables, limit: MAX_DECISION_VARIABLES });
    }
    let start = Instant::now();
    let mut search = Search::new(sc, cfg, start);
    search.mix_budget = mix_budget;
    search.presolve();
    let mut upper = T::zero();
    for component in search.components() {
        upper = upper + search.solve_component(&component);
    }
    let alloc = to_allocation(sc, &search.picks);
    let mut report = SolverReport::new("exact", alloc, sc, start.elapsed())?;
    upper = upper + search.fixed_value();
    let proven = !search.aborted && cfg.gap_tolerance == 0.0;
    report.optimal = proven || report.total_qoe + T::tolerance() >= upper;
    report.upper_bound = Some(if report.optimal { report.total_qoe } else { upper.max(report.total_qoe) });
    report.nodes_explored = search.nodes;
    Ok(report)
}

struct Search<'a, T> {
    sc: &'a Scenario<T>,
    q: usize,
    qoe: Vec<T>,
    res: Residual<T>,
    relax: Relaxation<T>,
    /// Users covered by each server.
    coverers: Vec<Vec<usize>>,
    picks: Vec<Pick>,
    settled: Vec<bool>,
    /// Users placed by the current component search (excluded from `fixed_value`).
    searched: Vec<bool>,

    order: Vec<usize>,
    cands: Vec<Vec<usize>>,
    same_as_prev: Vec<bool>,
    codes: Vec<usize>,
    current: Vec<Pick>,
    best: Vec<Pick>,
    best_value: T,
    slack: T,

    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    aborted: bool,

    stamp: Vec<u64>,
    server_level: Vec<usize>,
    generation: u64,
    counts: Vec<usize>,
    single: Vec<usize>,
    touched: Vec<usize>,
    pool: Vec<T>,

    /// Capacity multipliers (`server * dim + k`) of the Lagrangian bound.
    lambda: Vec<T>,
    grad: Vec<T>,
    comp_servers: Vec<usize>,
    lag_level: Vec<usize>,

    /// Multipliers of the one-server-per-user rows, by position.
    mu: Vec<T>,
    /// Positions covering each server, sorted by `mu`.
    by_mu: Vec<Vec<usize>>,
    hits: Vec<usize>,
    mixes: HashMap<(usize, Vec<u64>), Rc<Mix<T>>>,
    mix_budget: usize,
}

/// The component as a choice of server loads.
struct Loads<T> {
    servers: Vec<usize>,
    curves: Vec<Rc<Mix<T>>>,
    cands: Vec<Vec<usize>>,
}

/// Best QoE of `0..` users on one server; `exact` is false when the
/// enumeration was cut short and `values` are only upper bounds.
struct Mix<T> {
    values: Vec<T>,
    exact: bool,
}

impl<'a, T: Scalar> Search<'a, T> {
    fn new(sc: &'a Scenario<T>, cfg: &ExactSolverConfig, start: Instant) -> Self {
        let (n, m, q) = (sc.users().len(), sc.servers().len(), sc.catalog().len());
        let mut coverers = vec![Vec::new(); m];
        for i in 0..n {
            for &j in sc.candidates(i) {
                coverers[j].push(i);
            }
        }
        Self {
            sc,
            q,
            qoe: sc.catalog().levels().iter().map(|l| l.qoe).collect(),
            res: Residual::new(sc),
            relax: Relaxation::new(sc.catalog()),
            coverers,
            picks: vec![None; n],
            settled: vec![false; n],
            searched: vec![false; n],
            order: Vec::new(),
            cands: Vec::new(),
            same_as_prev: Vec::new(),
            codes: Vec::new(),
            current: Vec::new(),
            best: Vec::new(),
            best_value: T::zero(),
            slack: T::tolerance() + T::of(cfg.gap_tolerance),
            nodes: 0,
            node_limit: cfg.node_limit,
            deadline: (!cfg.time_limit.is_zero()).then(|| start + cfg.time_limit),
            aborted: false,
            stamp: vec![0; m],
            server_level: vec![0; m],
            generation: 0,
            counts: vec![0; q],
            single: vec![0; m * q],
            touched: Vec::new(),
            pool: vec![T::zero(); sc.dim()],
            lambda: vec![T::zero(); m * sc.dim()],
            grad: vec![T::zero(); m * sc.dim()],
            comp_servers: Vec::new(),
            lag_level: vec![0; m],
            mu: Vec::new(),
            by_mu: vec![Vec::new(); m],
            hits: Vec::new(),
            mixes: HashMap::new(),
            mix_budget: MIX_BUDGET,
        }
    }

    fn demand(&self, level: usize) -> &'a [T] {
        self.sc.catalog().levels()[level - 1].demand.components()
    }

    fn fits_lowest(&self, j: usize) -> bool {
        self.res.fits(j, self.demand(1))
    }

    fn presolve(&mut self) {
        let n = self.sc.users().len();
        let top = self.q;
        loop {
            let mut changed = false;
            for i in 0..n {
                if !self.settled[i] && !self.sc.candidates(i).iter().any(|&j| self.fits_lowest(j)) {
                    self.settled[i] = true;
                }
            }
            for j in 0..self.sc.servers().len() {
                let free: Vec<usize> = self.coverers[j].iter().copied().filter(|&i| !self.settled[i]).collect();
                if free.is_empty() {
                    continue;
                }
                let w = self.demand(top);
                let k = T::of(free.len() as f64);
                let room = self.res.room(j);
                if w.iter().zip(room).all(|(w, r)| *w * k <= *r + T::tolerance()) {
                    for i in free {
                        self.res.take(j, w);
                        self.picks[i] = Some((j, top));
                        self.settled[i] = true;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Unsettled users grouped into independent subproblems.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.sc.users().len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for j in 0..self.sc.servers().len() {
            if !self.fits_lowest(j) {
                continue;
            }
            let mut first = None;
            for &i in self.coverers[j].iter().filter(|&&i| !self.settled[i]) {
                match first {
                    None => first = Some(i),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, i));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in (0..n).filter(|&i| !self.settled[i]) {
            let r = find(&mut parent, i);
            groups[r].push(i);
        }
        groups.into_iter().filter(|g| !g.is_empty()).collect()
    }

    /// QoE of users settled by presolve.
    fn fixed_value(&self) -> T {
        (0..self.picks.len())
            .filter(|&i| !self.searched[i])
            .filter_map(|i| self.picks[i].map(|(_, l)| self.qoe[l - 1]))
            .sum()
    }

    /// Searches one component, commits its best allocation, and returns an
    /// upper bound on the component's QoE (its optimum if the search finished).
    fn solve_component(&mut self, users: &[usize]) -> T {
        let usable = |s: &Self, i: usize| -> Vec<usize> { s.sc.candidates(i).iter().copied().filter(|&j| s.fits_lowest(j)).collect() };
        let mut keyed: Vec<(Vec<usize>, usize)> = users.iter().map(|&i| (usable(self, i), i)).collect();
        keyed.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        self.order = keyed.iter().map(|k| k.1).collect();
        self.same_as_prev = (0..keyed.len()).map(|p| p > 0 && keyed[p].0 == keyed[p - 1].0).collect();
        self.cands = keyed.into_iter().map(|k| k.0).collect();
        let len = self.order.len();
        self.codes = vec![0; len];
        self.current = vec![None; len];
        for &i in users {
            self.searched[i] = true;
        }

        let mut servers: Vec<usize> = self.cands.iter().flatten().copied().collect();
        servers.sort_unstable();
        servers.dedup();
        self.comp_servers = servers;

        for &j in &self.comp_servers {
            self.by_mu[j].clear();
        }
        for (pos, cands) in self.cands.iter().enumerate() {
            for &j in cands {
                self.by_mu[j].push(pos);
            }
        }
        self.mixes.clear();

        self.incumbent(users);
        let loads = self.load_problem();
        let (finished, root) = if loads.curves.iter().all(|m| m.exact) {
            self.load_search(&loads)
        } else {
            let planned = self.plan_incumbent(&loads);
            self.tune_multipliers();
            self.tune_assignment_multipliers();
            let root = self.remaining_bound(0).min(planned);
            let finished = if self.best_value + self.slack >= root {
                true
            } else if self.aborted {
                false
            } else {
                self.dfs(0, T::zero());
                !self.aborted
            };
            (finished, root)
        };

        for p in 0..len {
            if let Some((j, l)) = self.best[p] {
                self.res.take(j, self.demand(l));
            }
            self.picks[self.order[p]] = self.best[p];
        }
        if finished {
            self.best_value
        } else {
            root.max(self.best_value)
        }
    }

    /// Best of the greedy rule run with every level cap and both user orders.
    fn incumbent(&mut self, users: &[usize]) {
        let len = self.order.len();
        self.best_value = T::zero();
        self.best = vec![None; len];
        let mut scratch = vec![None; self.sc.users().len()];
        for order in [users.to_vec(), self.order.clone()] {
            for cap in 1..=self.q {
                let mut res = self.res.clone();
                for &i in &order {
                    scratch[i] = None;
                }
                greedy_into(self.sc, &mut res, &order, cap, &mut scratch);
                let value: T = order.iter().filter_map(|&i| scratch[i].map(|(_, l)| self.qoe[l - 1])).sum();
                if value > self.best_value + T::tolerance() {
                    self.best_value = value;
                    self.best = self.order.iter().map(|&i| scratch[i]).collect();
                }
            }
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.node_limit > 0 && self.nodes >= self.node_limit {
            self.aborted = true;
        } else if self.nodes.is_multiple_of(512) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    /// Returns the best leaf value found below this node, or -inf if the
    /// subtree was pruned.
    fn dfs(&mut self, p: usize, value: T) -> T {
        self.nodes += 1;
        if self.out_of_budget() {
            return T::neg_infinity();
        }
        if p == self.order.len() {
            if value > self.best_value + T::tolerance() {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return value;
        }
        let upper = value + self.remaining_bound(p);
        if upper <= self.best_value + self.slack {
            return T::neg_infinity();
        }

        let limit = if self.same_as_prev[p] { self.codes[p - 1] } else { usize::MAX };
        let mut children: Vec<(T, T, usize, usize, usize)> = Vec::new();
        for &j in &self.cands[p] {
            let Some(top) = self.sc.catalog().highest_fitting(self.res.room(j), T::tolerance()) else { continue };
            let slack = self.res.normalized_remaining(j);
            for l in 1..=top {
                let code = 1 + j * self.q + (l - 1);
                if code <= limit {
                    children.push((self.qoe[l - 1], slack, code, j, l));
                }
            }
        }
        children.sort_by(|a, b| {
            b.0.partial_cmp(&a.0).expect("finite qoe").then(b.1.partial_cmp(&a.1).expect("finite slack")).then(a.2.cmp(&b.2))
        });

        let mut found = T::neg_infinity();
        for (gain, _, code, j, l) in children {
            let w = self.demand(l);
            self.res.take(j, w);
            self.current[p] = Some((j, l));
            self.codes[p] = code;
            found = found.max(self.dfs(p + 1, value + gain));
            self.res.give(j, w);
            if self.aborted || upper <= self.best_value + self.slack {
                break;
            }
        }
        if !self.aborted && upper > self.best_value + self.slack {
            self.current[p] = None;
            self.codes[p] = 0;
            found = found.max(self.dfs(p + 1, value));
        }
        self.current[p] = None;
        debug_assert!(self.aborted || found <= upper + T::of(1e-6), "bound {upper} below subtree value {found}");
        found
    }

    /// Upper bound on the QoE the users at positions `p..` can still add.
    fn remaining_bound(&mut self, p: usize) -> T {
        self.generation += 1;
        let gen = self.generation;
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.pool.iter_mut().for_each(|c| *c = T::zero());
        self.touched.clear();
        let mut others = T::zero();

        for pos in p..self.order.len() {
            let mut best = 0;
            let mut usable = 0;
            let mut only = 0;
            for &j in &self.cands[pos] {
                if self.stamp[j] != gen {
                    self.stamp[j] = gen;
                    let lv = self.sc.catalog().highest_fitting(self.res.room(j), T::tolerance()).unwrap_or(0);
                    self.server_level[j] = lv;
                    if lv > 0 {
                        for (acc, r) in self.pool.iter_mut().zip(self.res.room(j)) {
                            *acc = *acc + *r;
                        }
                    }
                }
                let lv = self.server_level[j];
                if lv > 0 {
                    usable += 1;
                    only = j;
                    best = best.max(lv);
                }
            }
            if best == 0 {
                continue;
            }
            self.counts[best - 1] += 1;
            if usable == 1 {
                if self.single[only * self.q..(only + 1) * self.q].iter().all(|&c| c == 0) {
                    self.touched.push(only);
                }
                self.single[only * self.q + best - 1] += 1;
            } else {
                others = others + self.qoe[best - 1];
            }
        }

        let pooled = self.relax.bound(&self.counts, &self.pool);
        let mut split = others;
        for t in 0..self.touched.len() {
            let j = self.touched[t];
            let range = j * self.q..(j + 1) * self.q;
            let counts: Vec<usize> = self.single[range.clone()].to_vec();
            split = split + self.relax.bound(&counts, self.res.room(j));
            self.single[range].iter_mut().for_each(|c| *c = 0);
        }
        pooled.min(split).min(self.lagrangian(p, false)).min(self.knapsack_bound(p, false))
    }

    /// Best level mixes for server `j` at its current remaining capacity.
    fn mix(&mut self, j: usize) -> Rc<Mix<T>> {
        let room = self.res.room(j);
        let key = (j, room.iter().map(|r| r.as_f64().to_bits()).collect::<Vec<_>>());
        if let Some(m) = self.mixes.get(&key) {
            return Rc::clone(m);
        }
        let max_n = self.by_mu[j].len();
        let mix = match level_mix(self.sc.catalog(), room, max_n, self.mix_budget) {
            Some(values) => Mix { values, exact: true },
            None => {
                let mut counts = vec![0; self.q];
                let values = (0..=max_n)
                    .map(|n| {
                        counts[self.q - 1] = n;
                        self.relax.bound(&counts, room)
                    })
                    .collect();
                Mix { values, exact: false }
            }
        };
        if self.mixes.len() > 200_000 {
            self.mixes.clear();
        }
        let mix = Rc::new(mix);
        self.mixes.insert(key, Rc::clone(&mix));
        mix
    }

    /// Mix curves of the component's servers at the current residual, with
    /// candidates renumbered to local server indices.
    fn load_problem(&mut self) -> Loads<T> {
        let servers = self.comp_servers.clone();
        let mut local = vec![usize::MAX; self.sc.servers().len()];
        for (s, &j) in servers.iter().enumerate() {
            local[j] = s;
        }
        let curves = servers.iter().map(|&j| self.mix(j)).collect();
        let cands = self.cands.iter().map(|cs| cs.iter().map(|&j| local[j]).collect()).collect();
        Loads { servers, curves, cands }
    }

    fn plan(&self, loads: &Loads<T>, lo: &[usize], hi: &[usize]) -> Option<LoadPlan<T>> {
        let curves: Vec<&[T]> = loads.curves.iter().map(|m| m.values.as_slice()).collect();
        plan_loads(&loads.cands, &curves, lo, hi)
    }

    /// Unrestricted load plan: updates the incumbent and returns the
    /// envelope bound on the component.
    fn plan_incumbent(&mut self, loads: &Loads<T>) -> T {
        let hi: Vec<usize> = loads.curves.iter().map(|m| m.values.len() - 1).collect();
        let plan = self.plan(loads, &vec![0; hi.len()], &hi).expect("no lower limits");
        self.realize(loads, &plan);
        plan.upper
    }

    /// Branch-and-bound over server loads, splitting `n_j <= N - 1` from
    /// `n_j >= N` on the server whose load sits furthest below its envelope.
    /// Returns whether the search finished and the root bound.
    fn load_search(&mut self, loads: &Loads<T>) -> (bool, T) {
        let mut lo = vec![0; loads.servers.len()];
        let mut hi: Vec<usize> = loads.curves.iter().map(|m| m.values.len() - 1).collect();
        let root = self.plan(loads, &lo, &hi).expect("no lower limits");
        let upper = root.upper;
        self.load_node(loads, root, &mut lo, &mut hi);
        (!self.aborted, upper)
    }

    fn load_node(&mut self, loads: &Loads<T>, plan: LoadPlan<T>, lo: &mut [usize], hi: &mut [usize]) {
        self.nodes += 1;
        if self.out_of_budget() || plan.upper <= self.best_value + self.slack {
            return;
        }
        self.realize(loads, &plan);
        let Some(s) = plan.loosest() else { return };
        let n = plan.load[s];

        let (old_lo, old_hi) = (lo[s], hi[s]);
        hi[s] = n - 1;
        let below = self.plan(loads, lo, hi);
        hi[s] = old_hi;
        lo[s] = n;
        let above = self.plan(loads, lo, hi);
        lo[s] = old_lo;

        let mut children: Vec<(bool, LoadPlan<T>)> = [(false, below), (true, above)].into_iter().filter_map(|(up, c)| c.map(|c| (up, c))).collect();
        children.sort_by(|a, b| b.1.upper.partial_cmp(&a.1.upper).expect("finite bound"));
        for (up, child) in children {
            if up {
                lo[s] = n;
            } else {
                hi[s] = n - 1;
            }
            self.load_node(loads, child, lo, hi);
            (lo[s], hi[s]) = (old_lo, old_hi);
            if self.aborted {
                return;
            }
        }
    }

    /// Gives each server its best mix for the users the plan matched to it,
    /// greedily places whoever is left, raises levels where room allows, and
    /// keeps the result if it beats the incumbent.
    fn realize(&mut self, loads: &Loads<T>, plan: &LoadPlan<T>) {
        let n = self.sc.users().len();
        let mut picks: Vec<Pick> = vec![None; n];
        let mut res = self.res.clone();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); loads.servers.len()];
        for (pos, s) in plan.owner.iter().enumerate() {
            if let Some(s) = *s {
                members[s].push(pos);
            }
        }
        for (s, &j) in loads.servers.iter().enumerate() {
            if members[s].is_empty() || !loads.curves[s].exact {
                continue;
            }
            let levels = best_mix_levels(self.sc.catalog(), res.room(j), members[s].len());
            for (&pos, &l) in members[s].iter().zip(&levels) {
                res.take(j, self.demand(l));
                picks[self.order[pos]] = Some((j, l));
            }
        }
        let rest: Vec<usize> = self.order.iter().copied().filter(|&i| picks[i].is_none()).collect();
        greedy_into(self.sc, &mut res, &rest, self.q, &mut picks);
        for &i in &self.order {
            if let Some((j, l)) = picks[i] {
                res.give(j, self.demand(l));
                let top = self.sc.catalog().highest_fitting(res.room(j), T::tolerance()).expect("own level fits");
                res.take(j, self.demand(top));
                picks[i] = Some((j, top));
            }
        }
        let total: T = self.order.iter().filter_map(|&i| picks[i].map(|(_, l)| self.qoe[l - 1])).sum();
        if total > self.best_value + T::tolerance() {
            self.best_value = total;
            self.best = self.order.iter().map(|&i| picks[i]).collect();
        }
    }

    /// The one-server-per-user rows moved into the objective: each server
    /// then independently serves the users with the smallest multipliers
    /// with its best level mix. Valid for any `mu >= 0`. With `grad`, counts
    /// in `self.hits` how many servers took each position.
    fn knapsack_bound(&mut self, p: usize, grad: bool) -> T {
        let mut total: T = self.mu[p..].iter().copied().sum();
        if grad {
            self.hits.iter_mut().for_each(|h| *h = 0);
        }
        for s in 0..self.comp_servers.len() {
            let j = self.comp_servers[s];
            let mix = self.mix(j);
            let mix = &mix.values;
            let top = mix[mix.len() - 1];
            let (mut acc, mut best, mut best_n, mut n) = (T::zero(), T::zero(), 0, 0);
            for &pos in &self.by_mu[j] {
                if pos < p {
                    continue;
                }
                n += 1;
                acc = acc + self.mu[pos];
                if top - acc <= best {
                    break;
                }
                let v = mix[n] - acc;
                if v > best {
                    best = v;
                    best_n = n;
                }
            }
            total = total + best;
            if grad && best_n > 0 {
                for &pos in self.by_mu[j].iter().filter(|&&pos| pos >= p).take(best_n) {
                    self.hits[pos] += 1;
                }
            }
        }
        total
    }

    fn sort_by_mu(&mut self) {
        for &j in &self.comp_servers {
            let mu = &self.mu;
            self.by_mu[j].sort_by(|&a, &b| mu[a].partial_cmp(&mu[b]).expect("finite multipliers").then(a.cmp(&b)));
        }
    }

    /// Subgradient descent on the root assignment multipliers.
    fn tune_assignment_multipliers(&mut self) {
        let len = self.order.len();
        self.mu = vec![T::zero(); len];
        self.hits = vec![0; len];
        self.sort_by_mu();
        let mut best_mu = self.mu.clone();
        let mut best = T::infinity();
        let mut theta = T::of(2.0);
        let mut stale = 0;
        for _ in 0..400 {
            let value = self.knapsack_bound(0, true);
            if value < best {
                best = value;
                best_mu.clone_from(&self.mu);
                stale = 0;
            } else {
                stale += 1;
                if stale >= 15 {
                    theta = theta / T::of(2.0);
                    stale = 0;
                }
            }
            let gap = value - self.best_value;
            if gap <= self.slack || theta < T::of(1e-4) {
                break;
            }
            let norm = self.hits.iter().map(|&h| (1.0 - h as f64).powi(2)).sum::<f64>();
            if norm <= 0.0 {
                break;
            }
            let step = theta * gap / T::of(norm);
            for pos in 0..len {
                let g = T::of(1.0 - self.hits[pos] as f64);
                self.mu[pos] = (self.mu[pos] - step * g).max(T::zero());
            }
            self.sort_by_mu();
        }
        self.mu = best_mu;
        self.sort_by_mu();
    }

    /// Capacity constraints moved into the objective with the current
    /// multipliers: `sum(lambda * room) + sum_i max(0, max_{j,l} e_l - lambda_j . w_l)`.
    /// Valid for any `lambda >= 0`. With `grad`, also leaves a subgradient in `self.grad`.
    fn lagrangian(&mut self, p: usize, grad: bool) -> T {
        let d = self.sc.dim();
        let mut total = T::zero();
        for &j in &self.comp_servers {
            self.lag_level[j] = self.sc.catalog().highest_fitting(self.res.room(j), T::tolerance()).unwrap_or(0);
            for (k, r) in self.res.room(j).iter().enumerate() {
                total = total + self.lambda[j * d + k] * *r;
                if grad {
                    self.grad[j * d + k] = *r;
                }
            }
        }
        let levels = self.sc.catalog().levels();
        for pos in p..self.order.len() {
            let mut best = T::zero();
            let mut pick = None;
            for &j in &self.cands[pos] {
                let lam = &self.lambda[j * d..(j + 1) * d];
                for lv in &levels[..self.lag_level[j]] {
                    let price: T = lam.iter().zip(lv.demand.components()).map(|(a, b)| *a * *b).sum();
                    let gain = lv.qoe - price;
                    if gain > best {
                        best = gain;
                        pick = Some((j, lv.index));
                    }
                }
            }
            total = total + best;
            if let (true, Some((j, l))) = (grad, pick) {
                let w = self.demand(l);
                for (g, w) in self.grad[j * d..(j + 1) * d].iter_mut().zip(w) {
                    *g = *g - *w;
                }
            }
        }
        total
    }

    /// Subgradient descent on the root multipliers, keeping the best found.
    fn tune_multipliers(&mut self) {
        let d = self.sc.dim();
        for &j in &self.comp_servers {
            self.lambda[j * d..(j + 1) * d].iter_mut().for_each(|x| *x = T::zero());
        }
        let mut best_lambda = self.lambda.clone();
        let mut best = T::infinity();
        let mut theta = T::of(2.0);
        let mut stale = 0;
        for _ in 0..400 {
            let value = self.lagrangian(0, true);
            if value < best {
                best = value;
                best_lambda.clone_from(&self.lambda);
                stale = 0;
            } else {
                stale += 1;
                if stale >= 15 {
                    theta = theta / T::of(2.0);
                    stale = 0;
                }
            }
            let gap = value - self.best_value;
            if gap <= self.slack || theta < T::of(1e-4) {
                break;
            }
            let norm: T = self.comp_servers.iter().flat_map(|&j| &self.grad[j * d..(j + 1) * d]).map(|g| *g * *g).sum();
            if norm <= T::zero() {
                break;
            }
            let step = theta * gap / norm;
            for &j in &self.comp_servers {
                for k in j * d..(j + 1) * d {
                    self.lambda[k] = (self.lambda[k] - step * self.grad[k]).max(T::zero());
                }
            }
        }
        self.lambda = best_lambda;
    }
}
