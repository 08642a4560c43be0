# src/setfam/incidence.py
"""
Bipartite incidence graph of a family: member nodes on one side, element
nodes on the other. A moonflower is exactly an induced matching here, each
petal matched to its private element.
"""

import networkx as nx


def member_node(i):
    return ("member", i)


def element_node(x):
    return ("element", x)


def incidence_graph(fam):
    G = nx.Graph()
    G.add_nodes_from((member_node(i) for i in range(len(fam))), bipartite=0)
    G.add_nodes_from((element_node(x) for x in sorted(fam.support())), bipartite=1)
    for i, m in enumerate(fam.members):
        G.add_edges_from((member_node(i), element_node(x)) for x in m)
    return G


def witness_matching(witness):
    return [(i, x) for i, x in zip(witness.petal_indices, witness.private)]


def is_induced_matching(G, pairs):
    """
    True when the (member, element) pairs are edges of G, pairwise vertex
    disjoint, and the subgraph induced on their endpoints has no other edge.
    """
    nodes = []
    for i, x in pairs:
        u, v = member_node(i), element_node(x)
        if not G.has_edge(u, v):
            return False
        nodes.extend([u, v])
    if len(set(nodes)) != len(nodes):
        return False
    return G.subgraph(nodes).number_of_edges() == len(pairs)
