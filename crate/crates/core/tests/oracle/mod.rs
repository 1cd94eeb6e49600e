//! Brute-force reference semantics for small random KBs.
//!
//! Nothing here calls into the kernel. Time regions are bitmasks over at
//! most six instants and every relation is a dense matrix, so each axiom
//! is evaluated by plain enumeration.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

pub type Mask = u32;

/// One violated axiom instance: label, entity witnesses in report order,
/// and the instant for time-indexed labels.
pub type Instance = (String, Vec<String>, Option<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Pob,
    Sob,
    Concept,
    Role,
    Process,
    Accomplishment,
    Fact,
}

impl Sort {
    pub const ALL: [Sort; 7] =
        [Sort::Pob, Sort::Sob, Sort::Concept, Sort::Role, Sort::Process, Sort::Accomplishment, Sort::Fact];

    pub fn category(self) -> &'static str {
        match self {
            Sort::Pob => "POB",
            Sort::Sob => "SOB",
            Sort::Concept => "C",
            Sort::Role => "RL",
            Sort::Process => "PRO",
            Sort::Accomplishment => "ACC",
            Sort::Fact => "Fact",
        }
    }

    fn ed(self) -> bool {
        matches!(self, Sort::Pob | Sort::Sob | Sort::Concept | Sort::Role)
    }

    fn ped(self) -> bool {
        self == Sort::Pob
    }

    fn pd(self) -> bool {
        matches!(self, Sort::Process | Sort::Accomplishment)
    }

    fn ab(self) -> bool {
        self == Sort::Fact
    }

    fn concept(self) -> bool {
        matches!(self, Sort::Concept | Sort::Role)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lit {
    pub positive: bool,
    pub rel: &'static str,
    pub args: Vec<usize>,
    pub time: Option<Mask>,
}

#[derive(Clone, Debug, Default)]
pub struct RandomKb {
    pub instants: u32,
    pub names: Vec<String>,
    pub sorts: Vec<Sort>,
    /// (founded, functional)
    pub flags: Vec<(bool, bool)>,
    pub lits: Vec<Lit>,
    pub requires: Vec<(usize, usize, Mask)>,
    pub life_events: bool,
}

fn bits(m: Mask) -> impl Iterator<Item = u32> {
    (0..32).filter(move |i| m & (1 << i) != 0)
}

fn runs(m: Mask) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for i in bits(m) {
        match out.last_mut() {
            Some((_, hi)) if *hi + 1 == i => *hi = i,
            _ => out.push((i, i)),
        }
    }
    out
}

fn region_text(m: Mask) -> String {
    let names: Vec<String> = runs(m).iter().map(|(a, b)| format!("r{a}_{b}")).collect();
    if names.len() == 1 {
        names[0].clone()
    } else {
        format!("(sum {})", names.join(" "))
    }
}

impl RandomKb {
    pub fn generate(rng: &mut impl Rng, max_entities: usize, max_instants: u32) -> RandomKb {
        let instants = rng.gen_range(1..=max_instants);
        let n = rng.gen_range(2..=max_entities);
        let mut kb = RandomKb { instants, life_events: rng.gen_bool(0.5), ..Default::default() };
        for i in 0..n {
            kb.names.push(format!("e{i}"));
            kb.sorts.push(*Sort::ALL.choose(rng).unwrap());
            kb.flags.push((rng.gen_bool(0.6), rng.gen_bool(0.2)));
        }
        let full: Mask = (1 << instants) - 1;
        let count = rng.gen_range(0..=24);
        let mut seen: BTreeSet<(bool, &'static str, Vec<usize>, Option<Mask>)> = BTreeSet::new();
        for _ in 0..count {
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            let positive = rng.gen_bool(0.8);
            let (rel, args, time) = match rng.gen_range(0..9) {
                0 => ("PRE", vec![x], Some(rng.gen_range(1..=full))),
                1 => ("P", vec![x, y], Some(rng.gen_range(1..=full))),
                2 => ("P", vec![x, y], None),
                3 => ("PC", vec![x, y], Some(rng.gen_range(1..=full))),
                4 => ("K", vec![x, y], Some(rng.gen_range(1..=full))),
                5 | 6 => ("CF", vec![x, y], Some(rng.gen_range(1..=full))),
                7 => ("PC_C", vec![x, y], None),
                _ => ("ExecutesPlan", vec![x, y], None),
            };
            let positive = positive || !matches!(rel, "PC_C" | "ExecutesPlan");
            if seen.contains(&(!positive, rel, args.clone(), time)) {
                continue;
            }
            seen.insert((positive, rel, args.clone(), time));
            kb.lits.push(Lit { positive, rel, args, time });
        }
        // denials aimed at derivations, so blocking and conflicts get exercised
        for _ in 0..rng.gen_range(0..=4) {
            let pos: Vec<Lit> = kb.lits.iter().filter(|l| l.positive).cloned().collect();
            let Some(a) = pos.choose(rng) else { break };
            let deny = match a.rel {
                "P" | "K" => {
                    let next: Vec<&Lit> =
                        pos.iter().filter(|b| b.rel == a.rel && b.args[0] == a.args[1] && b.time.is_some() == a.time.is_some()).collect();
                    match (next.choose(rng), a.time) {
                        (Some(b), Some(t)) if t & b.time.unwrap() != 0 => {
                            Some((a.rel, vec![a.args[0], b.args[1]], Some(t & b.time.unwrap())))
                        }
                        (Some(b), None) => Some((a.rel, vec![a.args[0], b.args[1]], None)),
                        _ => Some(("P", vec![a.args[0], a.args[0]], a.time)),
                    }
                }
                "PC" => Some(("PRE", vec![a.args[0]], a.time)),
                "PRE" => Some(("PRE", vec![a.args[0]], a.time)),
                _ => None,
            };
            if let Some((rel, args, time)) = deny {
                if !seen.contains(&(true, rel, args.clone(), time)) && seen.insert((false, rel, args.clone(), time)) {
                    kb.lits.push(Lit { positive: false, rel, args, time });
                }
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let c = rng.gen_range(0..n);
            let d = rng.gen_range(0..n);
            kb.requires.push((c, d, rng.gen_range(1..=full)));
            if rng.gen_bool(0.3) {
                kb.requires.push((c, d, rng.gen_range(1..=full)));
            }
        }
        kb
    }

    pub fn to_dkb(&self) -> String {
        let mut s = String::new();
        if self.life_events {
            s.push_str("(option add-life-events)\n");
        }
        for (name, sort) in self.names.iter().zip(&self.sorts) {
            s.push_str(&format!("(entity {name} {})\n", sort.category()));
        }
        for a in 0..self.instants {
            for b in a..self.instants {
                s.push_str(&format!("(time r{a}_{b} {a} {b})\n"));
            }
        }
        for (i, (founded, functional)) in self.flags.iter().enumerate() {
            if *founded || *functional {
                let mut f = String::new();
                if *founded {
                    f.push_str(" (founded)");
                }
                if *functional {
                    f.push_str(" (functional)");
                }
                s.push_str(&format!("(concept-flags {}{f})\n", self.names[i]));
            }
        }
        for (c, d, t) in &self.requires {
            s.push_str(&format!("(requires {} {} {})\n", self.names[*c], self.names[*d], region_text(*t)));
        }
        for l in &self.lits {
            let mut atom = format!("({}", l.rel);
            for a in &l.args {
                atom.push(' ');
                atom.push_str(&self.names[*a]);
            }
            if let Some(t) = l.time {
                atom.push(' ');
                atom.push_str(&region_text(t));
            }
            atom.push(')');
            if l.positive {
                s.push_str(&format!("(assert {atom})\n"));
            } else {
                s.push_str(&format!("(assert (not {atom}))\n"));
            }
        }
        s
    }
}

type Matrix = Vec<Vec<Mask>>;

fn matrix(n: usize) -> Matrix {
    vec![vec![0; n]; n]
}

/// Per-instant transitive closure that never derives a link at an instant
/// where it is blocked.
pub fn close_timed(base: &Matrix, blocked: &Matrix, instants: u32) -> Matrix {
    let n = base.len();
    let mut out = base.clone();
    for i in 0..instants {
        let bit = 1 << i;
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if out[a][b] & bit != 0 || blocked[a][b] & bit != 0 {
                        continue;
                    }
                    if (0..n).any(|k| out[a][k] & bit != 0 && out[k][b] & bit != 0) {
                        out[a][b] |= bit;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    out
}

pub fn close_atemporal(base: &[Vec<bool>], blocked: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = base.len();
    let mut out = base.to_vec();
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !out[a][b] && !blocked[a][b] && (0..n).any(|k| out[a][k] && out[k][b]) {
                    out[a][b] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return out;
        }
    }
}

struct State {
    quale: Vec<Mask>,
    pt: Matrix,
    pa: Vec<Vec<bool>>,
    pc: Matrix,
    k: Matrix,
    cf: Matrix,
}

struct World<'a> {
    kb: &'a RandomKb,
    names: Vec<String>,
    sorts: Vec<Sort>,
    lits: Vec<Lit>,
}

impl World<'_> {
    fn n(&self) -> usize {
        self.names.len()
    }

    fn asserted(&self, rel: &str, positive: bool) -> Matrix {
        let mut m = matrix(self.n());
        for l in &self.lits {
            if l.rel == rel && l.positive == positive && l.time.is_some() && l.args.len() == 2 {
                m[l.args[0]][l.args[1]] |= l.time.unwrap();
            }
        }
        m
    }

    fn pre(&self, positive: bool) -> Vec<Mask> {
        let mut v = vec![0; self.n()];
        for l in &self.lits {
            if l.rel == "PRE" && l.positive == positive {
                v[l.args[0]] |= l.time.unwrap();
            }
        }
        v
    }

    fn pairs(&self, rel: &str, positive: bool) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n()]; self.n()];
        for l in &self.lits {
            if l.rel == rel && l.positive == positive && l.time.is_none() {
                m[l.args[0]][l.args[1]] = true;
            }
        }
        m
    }

    /// A denial whose region is wholly asserted is a load-time conflict.
    fn conflict(&self) -> bool {
        for l in self.lits.iter().filter(|l| !l.positive) {
            let t = l.time.unwrap_or(0);
            let hit = match (l.rel, l.time) {
                ("PRE", _) => t & !self.pre(true)[l.args[0]] == 0,
                (rel, Some(_)) => t & !self.asserted(rel, true)[l.args[0]][l.args[1]] == 0,
                (rel, None) => self.pairs(rel, true)[l.args[0]][l.args[1]],
            };
            if hit {
                return true;
            }
        }
        false
    }

    fn saturate(&self) -> State {
        let n = self.n();
        let pre = self.pre(true);
        let pc_asserted = self.asserted("PC", true);
        let pc_blocked = self.asserted("PC", false);
        let pcc = self.pairs("PC_C", true);
        let mut quale = pre.clone();
        let mut pc = pc_asserted.clone();
        loop {
            let mut next_q = pre.clone();
            for e in 0..n {
                if self.sorts[e].ed() {
                    for y in 0..n {
                        next_q[e] |= pc[e][y];
                    }
                }
            }
            let mut next_pc = pc_asserted.clone();
            for x in 0..n {
                for y in 0..n {
                    if pcc[x][y] {
                        next_pc[x][y] |= next_q[y] & !pc_blocked[x][y];
                    }
                }
            }
            if next_q == quale && next_pc == pc {
                break;
            }
            quale = next_q;
            pc = next_pc;
        }

        let p_blocked = self.asserted("P", false);
        let mut pt_base = self.asserted("P", true);
        let pa_blocked = self.pairs("P", false);
        let mut pa_base = self.pairs("P", true);
        for e in 0..n {
            if self.sorts[e].ed() {
                pt_base[e][e] |= quale[e] & !p_blocked[e][e];
            } else if (self.sorts[e].pd() || self.sorts[e].ab()) && !pa_blocked[e][e] {
                pa_base[e][e] = true;
            }
        }
        State {
            pt: close_timed(&pt_base, &p_blocked, self.kb.instants),
            pa: close_atemporal(&pa_base, &pa_blocked),
            k: close_timed(&self.asserted("K", true), &self.asserted("K", false), self.kb.instants),
            cf: self.asserted("CF", true),
            quale,
            pc,
        }
    }
}

/// Every violated instance, or `None` when closure must refuse the KB.
pub fn violations(kb: &RandomKb) -> Option<BTreeSet<Instance>> {
    let mut w = World { kb, names: kb.names.clone(), sorts: kb.sorts.clone(), lits: kb.lits.clone() };
    if w.conflict() {
        return None;
    }
    let mut st = w.saturate();
    if kb.life_events {
        loop {
            let fresh: Vec<usize> = (0..w.n())
                .filter(|&e| w.sorts[e].ed() && st.pc[e].iter().all(|c| *c == 0) && st.quale[e] != 0)
                .collect();
            if fresh.is_empty() {
                break;
            }
            for x in fresh {
                let life = w.n();
                w.names.push(format!("life-of-{}", w.names[x]));
                w.sorts.push(Sort::Process);
                let q = st.quale[x];
                w.lits.push(Lit { positive: true, rel: "PC", args: vec![x, life], time: Some(q) });
                w.lits.push(Lit { positive: true, rel: "PRE", args: vec![life], time: Some(q) });
            }
            st = w.saturate();
        }
    }
    Some(evaluate(&w, &st))
}

fn evaluate(w: &World, st: &State) -> BTreeSet<Instance> {
    let n = w.n();
    let s = &w.sorts;
    let q = &st.quale;
    let mut out = BTreeSet::new();
    let mut emit = |label: &str, ents: &[usize], t: Option<Mask>| {
        let names: Vec<String> = ents.iter().map(|e| w.names[*e].clone()).collect();
        match t {
            Some(m) => {
                for i in bits(m) {
                    out.insert((label.to_string(), names.clone(), Some(i)));
                }
            }
            None => {
                out.insert((label.to_string(), names, None));
            }
        }
    };
    let atemporal = |e: usize| s[e].pd() || s[e].ab();

    // temporary parthood
    for x in 0..n {
        for y in 0..n {
            let cov = st.pt[x][y];
            if cov == 0 {
                continue;
            }
            if !(s[x].ed() && s[y].ed()) {
                emit("Ad10", &[x, y], Some(cov));
            } else if cov & !(q[x] & q[y]) != 0 {
                emit("Ad17", &[x, y], Some(cov & !(q[x] & q[y])));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if st.pa[x][y] && !((s[x].pd() && s[y].pd()) || (s[x].ab() && s[y].ab())) {
                emit("P-typing", &[x, y], None);
            }
        }
    }

    // GEM
    for x in 0..n {
        if s[x].ed() && q[x] & !st.pt[x][x] != 0 {
            emit("GEM-R", &[x], Some(q[x] & !st.pt[x][x]));
        }
        if atemporal(x) && !st.pa[x][x] {
            emit("GEM-R", &[x], None);
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if atemporal(x) && atemporal(y) && st.pa[x][y] && st.pa[y][x] {
                emit("GEM-AS", &[x, y], None);
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let bad = st.pt[x][y] & st.pt[y][z] & !st.pt[x][z];
                if bad != 0 {
                    emit("GEM-T", &[x, y, z], Some(bad));
                }
                if st.pa[x][y] && st.pa[y][z] && !st.pa[x][z] {
                    emit("GEM-T", &[x, y, z], None);
                }
            }
        }
    }
    let part = |a: usize, b: usize, i: u32| st.pt[a][b] & (1 << i) != 0;
    let overlap = |a: usize, b: usize, i: u32| (0..n).any(|c| part(c, a, i) && part(c, b, i));
    let overlap_a = |a: usize, b: usize| (0..n).any(|c| st.pa[c][a] && st.pa[c][b]);
    for x in 0..n {
        for y in 0..n {
            if s[x].ed() && s[y].ed() {
                let mut bad = 0;
                for i in bits(q[x] & q[y]) {
                    if !part(y, x, i) && !(0..n).any(|z| part(z, y, i) && !overlap(z, x, i)) {
                        bad |= 1 << i;
                    }
                }
                if bad != 0 {
                    emit("GEM-SSP", &[x, y], Some(bad));
                }
            }
            if atemporal(x)
                && atemporal(y)
                && !st.pa[y][x]
                && !(0..n).any(|z| st.pa[z][y] && !overlap_a(z, x))
            {
                emit("GEM-SSP", &[x, y], None);
            }
        }
    }

    // presence and participation
    for l in w.lits.iter().filter(|l| l.rel == "PRE" && !l.positive) {
        let t = l.time.unwrap();
        if t & !q[l.args[0]] == 0 {
            emit("Dd40-conflict", &[l.args[0]], Some(t));
        }
    }
    for x in 0..n {
        for y in 0..n {
            let cov = st.pc[x][y];
            if cov == 0 {
                continue;
            }
            if !(s[x].ed() && s[y].pd()) {
                emit("Ad33", &[x, y], Some(cov));
            } else if cov & !(q[x] & q[y]) != 0 {
                emit("Ad36", &[x, y], Some(cov & !(q[x] & q[y])));
            }
        }
    }
    for e in 0..n {
        if s[e].pd() {
            let covered = (0..n).fold(0, |acc, x| acc | st.pc[x][e]);
            if q[e] & !covered != 0 {
                emit("Ad34", &[e], Some(q[e] & !covered));
            }
        } else if s[e].ed() && st.pc[e].iter().all(|c| *c == 0) {
            emit("Ad35", &[e], None);
        }
    }
    let pcc = w.pairs("PC_C", true);
    for x in 0..n {
        for y in 0..n {
            if pcc[x][y] && (q[y] == 0 || q[y] & !st.pc[x][y] != 0) {
                emit("Dd63", &[x, y], None);
            }
        }
    }

    // constitution
    for x in 0..n {
        for y in 0..n {
            let cov = st.k[x][y];
            if cov == 0 {
                continue;
            }
            let eds = s[x].ed() && s[y].ed();
            if !(eds || (s[x].pd() && s[y].pd())) {
                emit("Ad20", &[x, y], Some(cov));
                continue;
            }
            if eds && s[x].ped() != s[y].ped() {
                emit("Ad21", &[x, y], Some(cov));
            }
            if x <= y && cov & st.k[y][x] != 0 {
                emit("Ad24", &[x, y], Some(cov & st.k[y][x]));
            }
            for z in 0..n {
                let bad = cov & st.k[y][z] & !st.k[x][z];
                if bad != 0 {
                    emit("K-trans", &[x, y, z], Some(bad));
                }
            }
        }
    }

    // classification
    for x in 0..n {
        for y in 0..n {
            let cov = st.cf[x][y];
            if cov == 0 {
                continue;
            }
            if !((s[x].ed() || s[x].pd()) && s[y].concept()) {
                emit("A11", &[x, y], Some(cov));
            }
            if cov & !q[x] != 0 {
                emit("A12", &[x, y], Some(cov & !q[x]));
            }
            if x <= y && cov & st.cf[y][x] != 0 {
                emit("A14", &[x, y], Some(cov & st.cf[y][x]));
            }
            for z in 0..n {
                let tri = cov & st.cf[y][z] & st.cf[x][z];
                if tri != 0 {
                    emit("A15", &[x, y, z], Some(tri));
                }
            }
        }
    }
    for c in 0..n {
        let (founded, functional) = w.kb.flags.get(c).copied().unwrap_or_default();
        if s[c] == Sort::Role {
            let rigid = (0..n).find(|&y| st.cf[y][c] != 0 && q[y] & !st.cf[y][c] == 0);
            if let Some(y) = rigid {
                emit("D3-AR", &[c, y], None);
            }
            if !founded {
                emit("D3-FD", &[c], None);
            }
        } else if functional {
            emit("F11-role", &[c], None);
        }
        if functional {
            let players: Vec<usize> = (0..n).filter(|&x| st.cf[x][c] != 0).collect();
            for (i, &a) in players.iter().enumerate() {
                for &b in &players[i + 1..] {
                    let both = st.cf[a][c] & st.cf[b][c];
                    if both != 0 {
                        emit("F12-functional", &[c, a, b], Some(both));
                    }
                }
            }
        }
    }

    // plans and concept dependence
    let exec = w.pairs("ExecutesPlan", true);
    for x in 0..n {
        for y in 0..n {
            if !exec[x][y] {
                continue;
            }
            if !(s[x].pd() && s[y].concept()) {
                emit("F37-typing", &[x, y], None);
            } else if q[x] & !q[y] != 0 {
                emit("F37-presence", &[x, y], Some(q[x] & !q[y]));
            }
        }
    }
    let reqs = &w.kb.requires;
    for &(c, d, t) in reqs {
        for x in 0..n {
            let bad = st.cf[x][c] & t & !st.cf[x][d];
            if bad != 0 {
                emit("F43-concept", &[x, c, d], Some(bad));
            }
        }
    }
    for (i, a) in reqs.iter().enumerate() {
        for b in &reqs[i + 1..] {
            if a.0 == b.0 && a.1 == b.1 && a.2 != b.2 {
                emit("F43-distinct", &[a.0, a.1], None);
            }
        }
    }
    out
}
