//! Value-flow accounting over firing traces.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::value::Uint;

use super::engine::FiringRecord;
use super::network::Network;

/// Wei moved between instances, realized at token consumption:
/// `(producer, consumer) -> total`. Tokens still in flight are not flows.
pub fn counterparty_flows(
    network: &Network,
    trace: &[FiringRecord],
) -> BTreeMap<(usize, usize), Uint> {
    let by_id: BTreeMap<&str, usize> =
        network.buffers.iter().enumerate().map(|(i, b)| (b.id.as_str(), i)).collect();
    let mut flows: BTreeMap<(usize, usize), Uint> = BTreeMap::new();
    for record in trace {
        for bt in &record.consumed {
            let Some(&buffer_idx) = by_id.get(bt.buffer.as_str()) else { continue };
            let buffer = &network.buffers[buffer_idx];
            let (Some((from, _)), Some((to, _))) = (buffer.from, buffer.to) else { continue };
            let carried = bt.token.native_value();
            if carried.is_zero() {
                continue;
            }
            let slot = flows.entry((from, to)).or_insert_with(Uint::zero);
            *slot = slot.checked_add(&carried).expect("flow fits 256 bits");
        }
    }
    flows
}

/// Drain metric for dataflow runs, mirroring the sequential definition:
/// for each non-victim counterparty, value received from victims beyond value
/// paid in, summed over counterparties.
pub fn victim_loss(network: &Network, trace: &[FiringRecord]) -> Uint {
    let victims: Vec<usize> = network.victims.clone();
    let flows = counterparty_flows(network, trace);
    let mut received: BTreeMap<usize, Uint> = BTreeMap::new();
    let mut contributed: BTreeMap<usize, Uint> = BTreeMap::new();
    for ((from, to), amount) in flows {
        if victims.contains(&from) && !victims.contains(&to) {
            let slot = received.entry(to).or_insert_with(Uint::zero);
            *slot = slot.checked_add(&amount).expect("fits 256 bits");
        }
        if victims.contains(&to) && !victims.contains(&from) {
            let slot = contributed.entry(from).or_insert_with(Uint::zero);
            *slot = slot.checked_add(&amount).expect("fits 256 bits");
        }
    }
    let mut loss = Uint::zero();
    for (party, got) in received {
        let paid = contributed.get(&party).cloned().unwrap_or_else(Uint::zero);
        if got > paid {
            let gain = got.checked_sub(&paid).expect("got >= paid");
            loss = loss.checked_add(&gain).expect("fits 256 bits");
        }
    }
    loss
}
