//! Random circuits with a known operating point.

use rand::seq::SliceRandom;
use rand::Rng;

use implicit_circuits::netlist::{parse_netlist, Circuit};
use implicit_circuits::operating_point::{BranchState, OperatingPoint};

#[derive(Debug, Clone)]
pub struct Topology {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Connected multigraph without self-loops, `m` branches.
pub fn topology(rng: &mut impl Rng, m: usize, max_nodes: usize) -> Topology {
    let nodes = rng.gen_range(2..=max_nodes.min(m + 1));
    let mut edges = Vec::with_capacity(m);
    for k in 1..nodes {
        let j = rng.gen_range(0..k);
        edges.push(if rng.gen_bool(0.5) { (j, k) } else { (k, j) });
    }
    while edges.len() < m {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b {
            edges.push((a, b));
        }
    }
    edges.shuffle(rng);
    Topology { nodes, edges }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
        a != b
    }
}

/// Integer branch currents satisfying KCL with zero current wherever
/// `allowed` is false.
pub fn circulation(rng: &mut impl Rng, t: &Topology, allowed: &[bool]) -> Vec<i64> {
    let mut dsu = Dsu::new(t.nodes);
    let mut forest = Vec::new();
    let mut extra = Vec::new();
    for (j, &(a, b)) in t.edges.iter().enumerate() {
        if !allowed[j] {
            continue;
        }
        if dsu.union(a, b) {
            forest.push(j);
        } else {
            extra.push(j);
        }
    }
    let mut i = vec![0i64; t.edges.len()];
    for e in extra {
        let c = rng.gen_range(-3..=3);
        let (tail, head) = t.edges[e];
        i[e] += c;
        // walk the forest from head back to tail
        for (j, forward) in forest_path(t, &forest, head, tail) {
            i[j] += if forward { c } else { -c };
        }
    }
    i
}

fn forest_path(t: &Topology, forest: &[usize], from: usize, to: usize) -> Vec<(usize, bool)> {
    let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; t.nodes];
    let mut seen = vec![false; t.nodes];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        for &j in forest {
            let (a, b) = t.edges[j];
            let step = if a == x { Some((b, true)) } else if b == x { Some((a, false)) } else { None };
            if let Some((y, fwd)) = step {
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, j, fwd));
                    queue.push_back(y);
                }
            }
        }
    }
    let mut path = Vec::new();
    let mut y = to;
    while y != from {
        let (x, j, fwd) = prev[y].expect("endpoints connected in the forest");
        path.push((j, fwd));
        y = x;
    }
    path.reverse();
    path
}

/// Branch voltages from integer node potentials, constant across every
/// branch where `shorted` holds.
pub fn potentials(rng: &mut impl Rng, t: &Topology, shorted: &[bool]) -> Vec<i64> {
    let mut dsu = Dsu::new(t.nodes);
    for (j, &(a, b)) in t.edges.iter().enumerate() {
        if shorted[j] {
            dsu.union(a, b);
        }
    }
    let level: Vec<i64> = (0..t.nodes).map(|_| rng.gen_range(-3..=3)).collect();
    t.edges.iter().map(|&(a, b)| level[dsu.find(a)] - level[dsu.find(b)]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    R,
    C,
    L,
    M,
    V,
    I,
}

impl Kind {
    fn prefix(self) -> char {
        match self {
            Kind::R => 'R',
            Kind::C => 'C',
            Kind::L => 'L',
            Kind::M => 'M',
            Kind::V => 'V',
            Kind::I => 'I',
        }
    }
}

pub struct Sample {
    pub circuit: Circuit,
    pub netlist: String,
    pub op: OperatingPoint,
}

fn shifted(var: &str, at: i64) -> String {
    format!("({var} - ({at}))")
}

/// Circuit whose characteristics all pass through a constructed
/// equilibrium, with strictly passive resistors and memristors and
/// positive `C`, `L` there. `nonlinear` adds terms vanishing to second
/// order at the equilibrium.
pub fn build(rng: &mut impl Rng, t: &Topology, kinds: &[Kind], nonlinear: bool) -> Sample {
    let open: Vec<bool> = kinds.iter().map(|k| !matches!(k, Kind::C | Kind::M)).collect();
    let shorted: Vec<bool> = kinds.iter().map(|k| matches!(k, Kind::L | Kind::M)).collect();
    let i = circulation(rng, t, &open);
    let v = potentials(rng, t, &shorted);
    let mut lines = Vec::new();
    let mut states = Vec::new();
    for (j, (&(a, b), &k)) in t.edges.iter().zip(kinds).enumerate() {
        let name = format!("{}{}", k.prefix(), j + 1);
        let pos = rng.gen_range(1..=4);
        let neg = -rng.gen_range(1..=4);
        let (fa, fb) = if rng.gen_bool(0.5) { (pos, neg) } else { (-pos, -neg) };
        let di = shifted("i", i[j]);
        let dv = shifted("v", v[j]);
        let bend = if nonlinear { format!(" + {}*{dv}^2", rng.gen_range(-2..=2)) } else { String::new() };
        let attr = match k {
            Kind::R => format!("f=\"{fa}*{di} + {fb}*{dv}{bend}\""),
            Kind::C => format!("c=\"{} + {dv}^2\"", pos),
            Kind::L => format!("l=\"{} + {di}^2\"", pos),
            Kind::M => {
                let (s0, p0) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
                let ds = shifted("sigma", s0);
                let dp = shifted("phi", p0);
                let bend = if nonlinear { format!(" + {ds}^3") } else { String::new() };
                states.push(BranchState::memristor(s0 as f64, p0 as f64));
                lines.push(format!("{name} n{a} n{b} f=\"{fa}*{ds} + {fb}*{dp}{bend}\""));
                continue;
            }
            Kind::V => format!("dc={}", v[j]),
            Kind::I => format!("dc={}", i[j]),
        };
        states.push(BranchState::new(i[j] as f64, v[j] as f64));
        lines.push(format!("{name} n{a} n{b} {attr}"));
    }
    let netlist = lines.join("\n") + "\n";
    let circuit = parse_netlist(&netlist).unwrap_or_else(|e| panic!("generated netlist rejected: {e}\n{netlist}"));
    Sample { circuit, netlist, op: OperatingPoint::from_states(states) }
}

pub fn pick(rng: &mut impl Rng, weights: &[(Kind, u32)]) -> Kind {
    let total: u32 = weights.iter().map(|w| w.1).sum();
    let mut x = rng.gen_range(0..total);
    for &(k, w) in weights {
        if x < w {
            return k;
        }
        x -= w;
    }
    unreachable!()
}
