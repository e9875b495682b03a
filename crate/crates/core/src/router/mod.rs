//! Swap-network routing of two-qubit Hamiltonian blocks onto a linear chain.
//!
//! Wires are positions on the line. A layout is held as `order[pos] =
//! logical qubit`; circuits record the inverse (logical -> wire).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{identity_permutation, invert_permutation, is_permutation, Circuit, Gate, GateKind};
use crate::error::{Error, Result};


/// Odd-even transposition network: `layers[l]` lists the adjacent wire pairs
/// swapped in layer `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapStrategy {
    pub n: usize,
    pub layers: Vec<Vec<(usize, usize)>>,
}

pub fn linear_swap_network(n: usize) -> Result<SwapStrategy> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("swap network needs at least 2 qubits, got {n}")));
    }
    let layers = (0..n)
        .map(|l| (l % 2..n - 1).step_by(2).map(|i| (i, i + 1)).collect::<Vec<_>>())
        .filter(|layer| !layer.is_empty())
        .collect();
    Ok(SwapStrategy { n, layers })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum MirrorMode {
    /// Forward network first, its mirror second.
    Fs,
    /// Mirror first (starting from the forward network's final layout), then forward.
    Sf,
}

/// One kind of two-qubit rotation with an angle per logical pair `(i, j)`,
/// `i < j`. For ZY the Z acts on `i`; for YZ the Y acts on `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub kind: GateKind,
    pub angles: BTreeMap<(usize, usize), f64>,
}

impl Interaction {
    pub fn new(kind: GateKind, angles: BTreeMap<(usize, usize), f64>) -> Result<Interaction> {
        if !matches!(kind, GateKind::Zz | GateKind::Zy | GateKind::Yz) {
            return Err(Error::InvalidInput(format!("{} is not a two-qubit rotation", kind.name())));
        }
        if let Some(&(i, j)) = angles.keys().find(|(i, j)| i >= j) {
            return Err(Error::InvalidInput(format!("pair ({i},{j}) must satisfy i < j")));
        }
        Ok(Interaction { kind, angles })
    }

    /// Gate for logical pair `key`, placed on wires via `wire[logical]`.
    pub(crate) fn gate(&self, key: (usize, usize), wire: &[usize]) -> Option<Gate> {
        let theta = *self.angles.get(&key)?;
        let (a, b) = (wire[key.0], wire[key.1]);
        Some(match self.kind {
            GateKind::Zz => Gate::zz(a, b, theta),
            GateKind::Zy => Gate::zy(a, b, theta),
            _ => Gate::yz(a, b, theta),
        })
    }
}

/// Interactions applied together on each pair slot. One entry is the usual
/// separated block; several entries give a combined block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTerms {
    pub interactions: Vec<Interaction>,
}

impl BlockTerms {
    pub fn single(interaction: Interaction) -> BlockTerms {
        BlockTerms { interactions: vec![interaction] }
    }

    /// Same angle on every pair of `0..n`.
    pub fn uniform(kind: GateKind, n: usize, theta: f64) -> Result<BlockTerms> {
        let angles = all_pairs(n).into_iter().map(|p| (p, theta)).collect();
        Ok(BlockTerms::single(Interaction::new(kind, angles)?))
    }

    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        self.interactions.iter().flat_map(|i| i.angles.keys().copied()).collect()
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.pairs().into_iter().find(|&(_, j)| j >= n) {
            Some((_, j)) => Err(Error::QubitOutOfRange { qubit: j, n_qubits: n }),
            None => Ok(()),
        }
    }
}

pub fn all_pairs(n: usize) -> BTreeSet<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// One adjacency slot of a routed block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub layer: usize,
    /// Left wire; the slot acts on `(wire, wire + 1)`.
    pub wire: usize,
    /// Logical qubits on `(wire, wire + 1)` when the slot starts.
    pub pair: (usize, usize),
    pub interact: bool,
    pub swap: bool,
}

/// Slot sequence of one block together with the layouts it starts and ends in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub n: usize,
    pub slots: Vec<Slot>,
    pub start_order: Vec<usize>,
    pub end_order: Vec<usize>,
}

impl Schedule {
    /// Walks the odd-even network from `initial_order`. With `keep_all_swaps`
    /// every slot interacts and swaps. Otherwise first-layer swaps are
    /// absorbed into the initial order, and swaps from the last layer that
    /// holds a required pair onward are dropped (their effect is absorbed
    /// into the exit layout).
    pub fn forward(
        n: usize,
        required: &BTreeSet<(usize, usize)>,
        initial_order: &[usize],
        keep_all_swaps: bool,
    ) -> Result<Schedule> {
        if !is_permutation(initial_order, n) {
            return Err(Error::InvalidOrder(format!("{initial_order:?} is not a permutation of 0..{n}")));
        }
        let net = linear_swap_network(n.max(2))?;
        let layers: &[Vec<(usize, usize)>] = if n < 2 { &[] } else { &net.layers };
        // first pass: which pair meets in which slot
        let mut order = initial_order.to_vec();
        let mut raw = Vec::new();
        for (l, layer) in layers.iter().enumerate() {
            for &(w, _) in layer {
                let pair = (order[w], order[w + 1]);
                raw.push((l, w, pair));
                if keep_all_swaps || l > 0 {
                    order.swap(w, w + 1);
                }
            }
        }
        let last = raw
            .iter()
            .filter(|(_, _, p)| keep_all_swaps || required.contains(&key(p.0, p.1)))
            .map(|&(l, _, _)| l)
            .max();
        let mut order = initial_order.to_vec();
        let mut slots = Vec::new();
        for (layer, wire, pair) in raw {
            let interact = keep_all_swaps || required.contains(&key(pair.0, pair.1));
            let swap = keep_all_swaps || (layer > 0 && Some(layer) < last);
            if swap {
                order.swap(wire, wire + 1);
            }
            if interact || swap {
                slots.push(Slot { layer, wire, pair, interact, swap });
            }
        }
        Ok(Schedule { n, slots, start_order: initial_order.to_vec(), end_order: order })
    }

    /// Time reversal: runs the slots backwards from this schedule's end
    /// layout, finishing in its start layout.
    pub fn mirrored(&self) -> Schedule {
        let mut order = self.end_order.clone();
        let mut slots = Vec::with_capacity(self.slots.len());
        for s in self.slots.iter().rev() {
            let pair = (order[s.wire], order[s.wire + 1]);
            if s.swap {
                order.swap(s.wire, s.wire + 1);
            }
            slots.push(Slot { pair, ..*s });
        }
        debug_assert_eq!(order, self.start_order);
        Schedule { n: self.n, slots, start_order: self.end_order.clone(), end_order: order }
    }

    pub fn fused_swaps(&self) -> usize {
        self.slots.iter().filter(|s| s.swap && s.interact).count()
    }

    pub fn bare_swaps(&self) -> usize {
        self.slots.iter().filter(|s| s.swap && !s.interact).count()
    }

    /// CX overhead over the unrouted block: 1 per fused swap, 3 per bare swap.
    pub fn extra_cx(&self) -> usize {
        self.fused_swaps() + 3 * self.bare_swaps()
    }

    /// Emits the gates of this schedule for `terms`.
    pub fn emit(&self, terms: &BlockTerms) -> Result<RoutedBlock> {
        terms.check_range(self.n)?;
        let mut c = Circuit::new(self.n);
        c.set_in_permutation(invert_permutation(&self.start_order))?;
        let mut order = self.start_order.clone();
        let mut wire = invert_permutation(&order);
        let mut gates = Vec::new();
        for s in &self.slots {
            if s.interact {
                let k = key(s.pair.0, s.pair.1);
                gates.extend(terms.interactions.iter().filter_map(|i| i.gate(k, &wire)));
            }
            if s.swap {
                gates.push(Gate::swap(s.wire, s.wire + 1));
                order.swap(s.wire, s.wire + 1);
                wire[order[s.wire]] = s.wire;
                wire[order[s.wire + 1]] = s.wire + 1;
            }
        }
        c.extend(gates)?;
        let permutation = invert_permutation(&order);
        c.set_out_permutation(permutation.clone())?;
        Ok(RoutedBlock {
            circuit: c,
            permutation,
            slots: self.slots.clone(),
            fused_swaps: self.fused_swaps(),
            bare_swaps: self.bare_swaps(),
            extra_cx: self.extra_cx(),
        })
    }
}

/// A routed two-qubit block. `circuit` carries its entry and exit layouts;
/// `permutation` is the exit layout (logical -> wire).
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedBlock {
    pub circuit: Circuit,
    pub permutation: Vec<usize>,
    pub slots: Vec<Slot>,
    pub fused_swaps: usize,
    pub bare_swaps: usize,
    pub extra_cx: usize,
}

impl RoutedBlock {
    /// Interaction pairs in the order the block applies them.
    pub fn covered_pairs(&self) -> Vec<(usize, usize)> {
        self.slots.iter().filter(|s| s.interact).map(|s| s.pair).collect()
    }
}

/// Routes a block whose interaction graph is complete. `Fs` runs the forward
/// network from the identity layout; `Sf` runs its mirror, ending in the
/// identity layout.
pub fn route_complete(
    terms: &BlockTerms,
    n: usize,
    mode: MirrorMode,
    drop_boundary_swaps: bool,
) -> Result<RoutedBlock> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("routing needs at least 2 qubits, got {n}")));
    }
    terms.check_range(n)?;
    if terms.pairs() != all_pairs(n) {
        return Err(Error::NotComplete);
    }
    let fwd = Schedule::forward(n, &all_pairs(n), &identity_permutation(n), !drop_boundary_swaps)?;
    match mode {
        MirrorMode::Fs => fwd.emit(terms),
        MirrorMode::Sf => fwd.mirrored().emit(terms),
    }
}

/// Routes a block whose interaction graph may be partial, starting from
/// `initial_order` (`initial_order[pos]` is the logical qubit on wire `pos`).
pub fn route_partial(terms: &BlockTerms, n: usize, initial_order: &[usize]) -> Result<RoutedBlock> {
    terms.check_range(n)?;
    Schedule::forward(n, &terms.pairs(), initial_order, false)?.emit(terms)
}

/// Extra CX cost of routing `edges` from `order`.
pub fn partial_overhead(edges: &BTreeSet<(usize, usize)>, n: usize, order: &[usize]) -> Result<usize> {
    Ok(Schedule::forward(n, edges, order, false)?.extra_cx())
}

/// Tries the identity order and `n_o - 1` uniformly random permutations and
/// returns the cheapest; the earliest candidate wins ties.
pub fn optimize_initial_order(
    edges: &BTreeSet<(usize, usize)>,
    n: usize,
    n_o: usize,
    seed: u64,
) -> Result<(Vec<usize>, usize)> {
    if n_o == 0 {
        return Err(Error::InvalidInput("order budget must be at least 1".into()));
    }
    if let Some(&(_, j)) = edges.iter().find(|&&(i, j)| i >= j || j >= n) {
        return Err(Error::QubitOutOfRange { qubit: j, n_qubits: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = vec![identity_permutation(n)];
    for _ in 1..n_o {
        let mut p = identity_permutation(n);
        p.shuffle(&mut rng);
        candidates.push(p);
    }
    let scored: Vec<(usize, usize)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, p)| partial_overhead(edges, n, p).map(|c| (c, i)))
        .collect::<Result<_>>()?;
    let (cost, idx) = scored.into_iter().min().expect("at least one candidate");
    Ok((candidates.swap_remove(idx), cost))
}

/// Entry of an assembled ansatz: a routed two-qubit block or a layer of
/// single-qubit gates addressed by logical qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockSpec {
    TwoQubit(BlockTerms),
    SingleQubit(Vec<Gate>),
}

/// Assembles blocks starting from the identity order.
pub fn assemble_blocks(specs: &[BlockSpec], n: usize, mode: MirrorMode) -> Result<Circuit> {
    assemble_blocks_with_order(specs, n, mode, &identity_permutation(n))
}

/// Alternates the forward network and its mirror over consecutive two-qubit
/// blocks, so the layout returns to where it started after every second
/// block. Under `Fs` the circuit starts in `order`; under `Sf` it starts in
/// the layout the forward network reaches from `order`.
pub fn assemble_blocks_with_order(
    specs: &[BlockSpec],
    n: usize,
    mode: MirrorMode,
    order: &[usize],
) -> Result<Circuit> {
    let mut required = BTreeSet::new();
    for s in specs {
        if let BlockSpec::TwoQubit(t) = s {
            t.check_range(n)?;
            required.extend(t.pairs());
        }
    }
    let fwd = Schedule::forward(n, &required, order, false)?;
    let mirror = fwd.mirrored();
    let (first, second) = match mode {
        MirrorMode::Fs => (&fwd, &mirror),
        MirrorMode::Sf => (&mirror, &fwd),
    };
    let mut c = Circuit::new(n);
    c.set_in_permutation(invert_permutation(&first.start_order))?;
    c.set_out_permutation(c.in_permutation().to_vec())?;
    let mut k = 0;
    for s in specs {
        match s {
            BlockSpec::TwoQubit(terms) => {
                let sched = if k % 2 == 0 { first } else { second };
                let block = sched.emit(terms)?;
                c.append(&block.circuit)?;
                k += 1;
            }
            BlockSpec::SingleQubit(gates) => {
                let wire = c.out_permutation().to_vec();
                for g in gates {
                    if let Some(&q) = g.qubits.iter().find(|&&q| q >= n) {
                        return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
                    }
                    let mut g = g.clone();
                    g.qubits.iter_mut().for_each(|q| *q = wire[*q]);
                    c.push(g)?;
                }
            }
        }
    }
    Ok(c)
}
