"""Graphs, adjacency spectra and concliques.

Builds the lattice and geometric graphs, computes the extreme adjacency
eigenvalues that bound the admissible dependence parameter, partitions the
nodes into concliques, and cuts a connected learn/test split.
"""

import wavesieve as ws

# a four-nearest-neighbour torus: every node has degree 4
torus = ws.torus_lattice(8, 8)
print("torus:", torus)

h0, hm = ws.eigen_bounds(torus, tol=1e-10)
print(f"extreme adjacency eigenvalues: h0 = {h0:.6f}, hm = {hm:.6f}")

lo, hi = ws.eta_range(torus)
print(f"admissible dependence range: ({lo:.4f}, {hi:.4f})")
print("(the even torus always gives (-0.25, 0.25))")

part = ws.concliques(torus)
print(f"concliques: {len(part)} classes of sizes {[c.size for c in part.classes]}")
print("within a class no two nodes are adjacent, so a Gibbs sweep may")
print("update a whole class at once against the frozen rest")

# extra random chords break bipartiteness; the class count grows a little
chorded = ws.torus_with_chords(8, 8, 12, seed=5)
print(f"\nwith 12 random chords: {chorded}, "
      f"{len(ws.concliques(chorded))} conclique classes")

# a geometric graph standing in for irregular planar networks
knn = ws.knn_geometric_graph(120, 4, seed=11)
print(f"\nknn geometric graph: {knn}, degrees {knn.degrees.min()}..{knn.degrees.max()}")
klo, khi = ws.eta_range(knn)
print(f"its admissible range: ({klo:.4f}, {khi:.4f})")

learn, test = ws.connected_split(knn, 0.3, seed=1)
print(f"connected split: {learn.size} learning nodes, {test.size} test nodes")

ws.save_graph(knn, "knn_demo_edges.txt")
again = ws.load_graph("knn_demo_edges.txt")
print(f"edge list round trip: {again.edge_count} == {knn.edge_count} edges")
