# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Graph view of a partial schedule.

Nodes are the operations, numbered job by job, followed by the machines. Precedence edges link
consecutive operations of a job; eligibility edges link an operation with every machine that can
process it and carry the normalized processing time and emission of that pairing.

The topology only depends on the instance and is built once per instance with networkx; the node
features change with the state.
"""

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import networkx as nx
import numpy as np

from ..core import Instance
from ..sim import State

OP_FEATURES = 9
MACHINE_FEATURES = 2
NODE_FEATURES = OP_FEATURES + MACHINE_FEATURES + 1
EDGE_FEATURES = 2


class OpStatus(IntEnum):
    DONE = 0
    READY = 1
    BLOCKED = 2


@dataclass(frozen=True, eq=False)
class Topology:
    """The static part of an instance graph.

    Attributes:
        graph: Operation nodes `('op', j, k)` and machine nodes `('machine', m)`, with directed
            precedence edges and eligibility edges in both directions.
        adjacency: Row-normalized mean-aggregation matrix over all neighbours, in node order.
        edge_features: Per node, the mean `(p, p·e)` features of its eligibility edges.
    """
    graph: nx.DiGraph
    adjacency: np.ndarray
    edge_features: np.ndarray


def op_node(job_id: int, op_index: int) -> tuple[str, int, int]:
    return ('op', job_id, op_index)


def machine_node(machine_id: int) -> tuple[str, int]:
    return ('machine', machine_id)


def node_order(inst: Instance) -> list[tuple]:
    return [op_node(op.job_id, op.op_index) for op in inst.operations()] + \
           [machine_node(m) for m in range(inst.n_machines)]


def instance_graph(inst: Instance) -> nx.DiGraph:
    graph = nx.DiGraph(name=inst.name)
    rates = inst.emission_rates
    for m in range(inst.n_machines):
        graph.add_node(machine_node(m), kind='machine', rate=rates[m])
    for op in inst.operations():
        node = op_node(op.job_id, op.op_index)
        graph.add_node(node, kind='op')
        if op.op_index > 0:
            graph.add_edge(op_node(op.job_id, op.op_index - 1), node, kind='precedence')
        for m, p in op.alternatives:
            features = (p / inst.max_time, p * rates[m] / inst.max_energy)
            graph.add_edge(node, machine_node(m), kind='eligibility', features=features)
            graph.add_edge(machine_node(m), node, kind='eligibility', features=features)
    return graph


def precedence_is_chains(graph: nx.DiGraph) -> bool:
    """Whether the precedence edges form disjoint simple paths."""
    chains = nx.DiGraph()
    chains.add_nodes_from(n for n, kind in graph.nodes(data='kind') if kind == 'op')
    chains.add_edges_from((u, v) for u, v, kind in graph.edges(data='kind') if kind == 'precedence')
    if not nx.is_directed_acyclic_graph(chains):
        return False
    return all(chains.in_degree(n) <= 1 and chains.out_degree(n) <= 1 for n in chains)


@lru_cache(maxsize=256)
def topology(inst: Instance) -> Topology:
    """Build (once per instance) the static graph, its aggregation matrix and edge features."""
    graph = instance_graph(inst)
    nodes = node_order(inst)
    undirected = nx.to_numpy_array(graph.to_undirected(as_view=True), nodelist=nodes, weight=None, dtype=np.float64)
    degree = undirected.sum(axis=1, keepdims=True)
    adjacency = np.divide(undirected, degree, out=np.zeros_like(undirected), where=degree > 0)
    edge_features = np.zeros((len(nodes), EDGE_FEATURES))
    for i, node in enumerate(nodes):
        incident = [f for _, _, f in graph.out_edges(node, data='features') if f is not None]
        if incident:
            edge_features[i] = np.mean(incident, axis=0)
    adjacency.setflags(write=False)
    edge_features.setflags(write=False)
    return Topology(graph, adjacency, edge_features)


@dataclass(frozen=True, eq=False)
class GraphSnapshot:
    """Graph view of a state.

    Attributes:
        op_features: One row per operation: status one-hot (done, ready, blocked), min and mean
            alternative time, remaining operations of the job, job ready time, scheduled start and end.
        machine_features: One row per machine: free-at time and emission rate.
        status: The status of every operation.
        topology: The static graph of the instance.
    """
    op_features: np.ndarray
    machine_features: np.ndarray
    status: np.ndarray
    topology: Topology

    @property
    def n_ops(self) -> int:
        return self.op_features.shape[0]

    @property
    def n_machines(self) -> int:
        return self.machine_features.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        return self.topology.adjacency

    @property
    def edge_features(self) -> np.ndarray:
        return self.topology.edge_features

    def node_features(self) -> np.ndarray:
        """Unified node matrix: operation features, machine features, then an is-machine flag."""
        n, m = self.n_ops, self.n_machines
        features = np.zeros((n + m, NODE_FEATURES))
        features[:n, :OP_FEATURES] = self.op_features
        features[n:, OP_FEATURES:OP_FEATURES + MACHINE_FEATURES] = self.machine_features
        features[n:, -1] = 1.0
        return features


def build_graph(state: State) -> GraphSnapshot:
    """Build the graph view of a state.

    Times are divided by the instance horizon (an upper bound on any makespan), processing times by
    the largest processing time, rates by the largest rate and operation counts by the total number
    of operations, so every feature lies in [0, 1].
    """
    inst = state.instance
    horizon = inst.horizon
    ops = np.zeros((inst.n_ops, OP_FEATURES))
    status = np.empty(inst.n_ops, dtype=np.int64)
    scheduled = {(e.job_id, e.op_index): e for e in state.entries}
    for op in inst.operations():
        j, k = op.job_id, op.op_index
        i = inst.flat_index(j, k)
        nxt = state.next_op[j]
        status[i] = OpStatus.DONE if k < nxt else OpStatus.READY if k == nxt else OpStatus.BLOCKED
        ops[i, status[i]] = 1.0
        ops[i, 3] = op.min_time / inst.max_time
        ops[i, 4] = op.mean_time / inst.max_time
        ops[i, 5] = (inst.job_lengths[j] - k) / inst.n_ops
        ops[i, 6] = state.job_ready[j] / horizon
        entry = scheduled.get((j, k))
        if entry is not None:
            ops[i, 7] = entry.start / horizon
            ops[i, 8] = entry.end / horizon
    machines = np.column_stack([
        np.asarray(state.machine_free_at) / horizon,
        np.asarray(inst.emission_rates) / inst.max_rate,
    ])
    return GraphSnapshot(ops, machines, status, topology(inst))
