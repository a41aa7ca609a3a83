#pragma once
// Preparation circuits for graph-structured states: Hamming-weight-2 states
// whose amplitude on |e_u + e_v> is the weight of edge (u, v), normalized.
// Three synthesizers:
//   prepare_general  any graph, one ancilla qubit per edge plus restore copies
//   prepare_tree     trees, no ancillas; naive level-by-level CNOT stage or a
//                    log-depth separator recursion
//   prepare_grid     grids, no ancillas, divide-and-conquer edge merging
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "hwprep/circuit.hpp"
#include "hwprep/cnot_synth.hpp"
#include "hwprep/errors.hpp"
#include "hwprep/inputs.hpp"
#include "hwprep/unary_enc.hpp"

namespace hwprep {
namespace detail {

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

struct RootedTree {
  int n = 0;
  int root = 1;                            // 1-based, like all vertex ids here
  std::vector<int> parent;                 // parent[root] = 0
  std::vector<double> parent_weight;       // weight of edge (v, parent[v])
  std::vector<std::vector<int>> children;  // ascending
  std::vector<int> height;                 // root at height 0
  int max_height = 0;
};

inline RootedTree root_tree(const TreeGraph& t) {
  const WeightedGraph& g = t.graph;
  g.validate();
  if (g.n < 2) throw NotATreeError("a tree needs at least two vertices");
  if (static_cast<int>(g.edges.size()) != g.n - 1)
    throw NotATreeError("a tree on n vertices has exactly n-1 edges");
  if (t.root < 1 || t.root > g.n)
    throw NotATreeError("root outside the vertex range");

  std::vector<std::vector<std::pair<int, double>>> adj(g.n + 1);
  for (const WeightedEdge& e : g.edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }

  RootedTree rt;
  rt.n = g.n;
  rt.root = t.root;
  rt.parent.assign(g.n + 1, 0);
  rt.parent_weight.assign(g.n + 1, 0.0);
  rt.children.assign(g.n + 1, {});
  rt.height.assign(g.n + 1, -1);
  std::vector<int> order = {t.root};
  rt.height[t.root] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int v = order[head];
    for (const auto& [u, w] : adj[v])
      if (rt.height[u] < 0) {
        rt.height[u] = rt.height[v] + 1;
        rt.max_height = std::max(rt.max_height, rt.height[u]);
        rt.parent[u] = v;
        rt.parent_weight[u] = w;
        rt.children[v].push_back(u);
        order.push_back(u);
      }
  }
  if (static_cast<int>(order.size()) != g.n)
    throw NotATreeError("graph is not connected");
  for (auto& c : rt.children) std::sort(c.begin(), c.end());
  return rt;
}

// Undirected adjacency of the forest given by `parent`, restricted to the
// vertex set `comp` (an edge appears only when both endpoints are members).
inline std::vector<std::vector<int>> forest_adjacency(
    const std::vector<int>& parent, const std::vector<int>& comp,
    const std::vector<char>& in_comp) {
  std::vector<std::vector<int>> adj(parent.size());
  for (int v : comp)
    if (const int p = parent[v]; p != 0 && in_comp[p]) {
      adj[v].push_back(p);
      adj[p].push_back(v);
    }
  for (int v : comp) std::sort(adj[v].begin(), adj[v].end());
  return adj;
}

// Vertex whose removal splits `comp` (connected) into pieces of at most
// ceil(|comp|/2) vertices; smallest id among minimizers for determinism.
inline int component_centroid(const std::vector<int>& comp,
                              const std::vector<std::vector<int>>& adj,
                              const std::vector<char>& in_comp) {
  const int size = static_cast<int>(comp.size());
  if (size == 1) return comp[0];

  // Iterative DFS from comp[0] producing parent links and a postorder.
  std::vector<int> dfs_parent(adj.size(), 0), post, stack = {comp[0]};
  std::vector<char> seen(adj.size(), 0);
  seen[comp[0]] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    post.push_back(v);
    for (int u : adj[v])
      if (in_comp[u] && !seen[u]) {
        seen[u] = 1;
        dfs_parent[u] = v;
        stack.push_back(u);
      }
  }
  std::vector<int> subtree(adj.size(), 1);
  for (auto it = post.rbegin(); it != post.rend(); ++it)
    if (dfs_parent[*it] != 0) subtree[dfs_parent[*it]] += subtree[*it];

  int best = -1, best_piece = size + 1;
  for (int v : comp) {
    int largest = size - subtree[v];
    for (int u : adj[v])
      if (in_comp[u] && dfs_parent[u] == v) largest = std::max(largest, subtree[u]);
    if (largest < best_piece || (largest == best_piece && v < best)) {
      best_piece = largest;
      best = v;
    }
  }
  return best;
}

// Greedy balanced splitting: while some piece has more than |comp|/r
// vertices, remove the centroid of one such piece. Every removal halves the
// offending piece, which keeps the selected set below 2r vertices while the
// remaining pieces all fit the bound.
inline std::vector<int> separator_subset(const std::vector<int>& comp,
                                         const std::vector<std::vector<int>>& adj,
                                         int r) {
  const long long limit_scale = static_cast<long long>(comp.size());
  std::vector<char> active(adj.size(), 0);
  for (int v : comp) active[v] = 1;

  std::vector<int> chosen;
  std::vector<std::vector<int>> worklist = {comp};
  for (std::size_t head = 0; head < worklist.size(); ++head) {
    std::vector<int> piece = worklist[head];
    if (static_cast<long long>(piece.size()) * r <= limit_scale) continue;
    const int c = component_centroid(piece, adj, active);
    chosen.push_back(c);
    active[c] = 0;
    // Split the piece into the components left after removing the centroid.
    std::vector<char> assigned(adj.size(), 0);
    assigned[c] = 1;
    std::sort(piece.begin(), piece.end());
    for (int start : piece) {
      if (assigned[start]) continue;
      std::vector<int> part = {start};
      assigned[start] = 1;
      for (std::size_t i = 0; i < part.size(); ++i)
        for (int u : adj[part[i]])
          if (active[u] && !assigned[u]) {
            assigned[u] = 1;
            part.push_back(u);
          }
      worklist.push_back(std::move(part));
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

constexpr int kTreeLeafSize = 16;  // wire components this small level by level

// Emit CNOTs after which every member of `comp` holds the GF(2) sum of its
// whole subtree within the forest given by `parent` (children accumulate
// before parents); vertices outside `comp` are never touched. The reversed
// gate list is then the usual child-into-father stage. The recursion removes
// a balanced separator: each separator vertex first absorbs its visible
// non-separator descendants, the separator-to-separator sums form the same
// problem on the separator's contracted forest (recursed directly), the
// finished values are pushed one edge outward, and the leftover pieces repeat
// independently. Every stage after the first acts on vertex sets that shrink
// like sqrt, so the sequential depth stays polylogarithmic while the naive
// stage is as deep as the tallest path.
inline void append_subtree_sums(const std::vector<int>& parent,
                                const std::vector<int>& comp, Circuit& out) {
  const int size = static_cast<int>(comp.size());
  if (size <= 1) return;

  std::vector<char> in_comp(parent.size(), 0);
  for (int v : comp) in_comp[v] = 1;
  const auto comp_parent = [&](int v) {
    const int p = parent[v];
    return (p != 0 && in_comp[p]) ? p : 0;
  };

  if (size <= kTreeLeafSize) {
    // Children first: depth of v = length of its parent chain within comp.
    std::vector<std::pair<int, int>> order;  // (-depth, vertex)
    for (int v : comp) {
      int d = 0;
      for (int p = comp_parent(v); p != 0; p = comp_parent(p)) ++d;
      order.push_back({-d, v});
    }
    std::sort(order.begin(), order.end());
    for (const auto& [neg_depth, v] : order)
      if (const int p = comp_parent(v); p != 0)
        out.append(Gate::cnot(v - 1, p - 1));
    return;
  }

  const std::vector<std::vector<int>> adj = forest_adjacency(parent, comp, in_comp);
  const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(size))));
  const std::vector<int> separator = separator_subset(comp, adj, r);
  std::vector<char> in_sep(parent.size(), 0);
  for (int v : separator) in_sep[v] = 1;

  std::vector<std::vector<int>> children(parent.size());
  for (int v : comp)
    if (const int p = comp_parent(v); p != 0) children[p].push_back(v);

  // Step 1: absorb visible descendants (connecting path inside the component
  // with no other separator vertex on it).
  for (int v : separator) {
    std::vector<int> visible, stack;
    for (int u : children[v])
      if (!in_sep[u]) stack.push_back(u);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      visible.push_back(u);
      for (int w : children[u])
        if (!in_sep[w]) stack.push_back(w);
    }
    if (!visible.empty()) {
      std::vector<int> qubits;
      for (int u : visible) qubits.push_back(u - 1);
      append_accumulate(out, v - 1, std::move(qubits));
    }
  }

  // Step 2: separator-to-separator sums. Contracting away the non-separator
  // vertices leaves a forest on the separator alone, and the sums needed are
  // exactly the subtree sums of that forest: recurse on it directly.
  std::vector<int> contracted(parent.size(), 0);
  bool any_edge = false;
  for (int v : separator) {
    int p = parent[v];
    while (p != 0 && in_comp[p] && !in_sep[p]) p = parent[p];
    contracted[v] = (p != 0 && in_comp[p]) ? p : 0;
    any_edge = any_edge || contracted[v] != 0;
  }
  if (any_edge) append_subtree_sums(contracted, separator, out);

  // Step 3: push the finished separator values one edge outward.
  std::vector<std::vector<int>> by_father(parent.size());
  for (int v : separator) {
    const int p = comp_parent(v);
    if (p != 0 && !in_sep[p]) by_father[p].push_back(v - 1);
  }
  for (int v : comp)
    if (!by_father[v].empty()) append_accumulate(out, v - 1, by_father[v]);

  // Leftover pieces continue independently.
  std::vector<char> assigned = in_sep;
  for (int start : comp) {
    if (assigned[start]) continue;
    std::vector<int> piece = {start};
    assigned[start] = 1;
    for (std::size_t i = 0; i < piece.size(); ++i)
      for (int u : adj[piece[i]])
        if (!in_sep[u] && !assigned[u]) {
          assigned[u] = 1;
          piece.push_back(u);
        }
    append_subtree_sums(parent, piece, out);
  }
}

// Child-into-father CNOTs emitted level by level from the root down; on the
// single-excitation support exactly one gate fires per term, turning the
// child's excitation into the edge's endpoint pair.
inline Circuit tree_stage_naive(const RootedTree& rt) {
  std::vector<std::vector<int>> by_height(rt.max_height + 1);
  for (int v = 1; v <= rt.n; ++v)
    if (v != rt.root) by_height[rt.height[v]].push_back(v);
  Circuit c(rt.n);
  for (int h = 1; h <= rt.max_height; ++h)
    for (int v : by_height[h]) c.append(Gate::cnot(v - 1, rt.parent[v] - 1));
  return c;
}

inline Circuit tree_stage_optimized(const RootedTree& rt) {
  std::vector<int> all(rt.n);
  for (int v = 1; v <= rt.n; ++v) all[v - 1] = v;
  Circuit accumulate(rt.n);
  append_subtree_sums(rt.parent, all, accumulate);
  return accumulate.inverse();
}

}  // namespace detail

// Balanced tree separator: a vertex set V' with |V'| <= 2r whose removal
// leaves connected pieces of at most n/r vertices each.
inline std::vector<int> tree_separator(const TreeGraph& t, int r) {
  const detail::RootedTree rt = detail::root_tree(t);
  detail::check(1 <= r && r < rt.n, "separator parameter must satisfy 1 <= r < n");
  std::vector<int> all(rt.n);
  for (int v = 1; v <= rt.n; ++v) all[v - 1] = v;
  const std::vector<char> in_comp(rt.n + 1, 1);
  return detail::separator_subset(
      all, detail::forest_adjacency(rt.parent, all, in_comp), r);
}

// Tree-structured state on exactly n qubits: unary encoding over the non-root
// vertex qubits (each carrying its parent-edge weight) followed by the
// child-into-father CNOT stage, either level by level or via the separator
// recursion. Both stages realize the same GF(2) map.
inline Circuit prepare_tree(const TreeGraph& t, bool optimize = false) {
  const detail::RootedTree rt = detail::root_tree(t);
  std::vector<int> leaf_qubits;
  std::vector<double> weights;
  for (int v = 1; v <= rt.n; ++v)
    if (v != rt.root) {
      leaf_qubits.push_back(v - 1);
      weights.push_back(rt.parent_weight[v]);
    }
  Circuit c(rt.n);
  c.append(unary_encode(AmplitudeVector{weights}, leaf_qubits).staged("unary"));
  const Circuit stage =
      optimize ? detail::tree_stage_optimized(rt) : detail::tree_stage_naive(rt);
  c.append(stage.staged("cnot"));
  return c;
}

// ---------------------------------------------------------------------------
// General graphs
// ---------------------------------------------------------------------------

// One ancilla per edge: unary-encode the edge weights onto the ancillas, raise
// both endpoints of every edge from its ancilla (two batches of vertex-
// targeted accumulations), then clear each ancilla with a Toffoli on its
// endpoints, copying multiply-used endpoints first so all Toffolis commute.
inline std::pair<Circuit, RegisterLayout> prepare_general(const WeightedGraph& g) {
  g.validate();
  if (g.edges.empty())
    throw EmptyGraphError("graph-structured states need at least one edge");
  const int n = g.n;
  const int m = static_cast<int>(g.edges.size());

  std::vector<int> degree(n + 1, 0);
  for (const WeightedEdge& e : g.edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  std::vector<std::vector<int>> copies(n + 1);
  int extra = 0;
  for (int v = 1; v <= n; ++v)
    for (int i = 0; i + 1 < degree[v]; ++i) copies[v].push_back(n + m + extra++);

  RegisterLayout layout;
  layout.add("working", 0, n);
  layout.add("edges", n, m);
  layout.add("copies", n + m, extra);

  Circuit c(n + m + extra);

  std::vector<int> edge_qubits(m);
  std::vector<double> weights(m);
  for (int j = 0; j < m; ++j) {
    edge_qubits[j] = n + j;
    weights[j] = g.edges[j].w;
  }
  c.append(unary_encode(AmplitudeVector{weights}, edge_qubits).staged("unary"));

  Circuit cnot_stage(c.num_qubits());
  for (int side = 0; side < 2; ++side) {
    std::vector<std::vector<int>> by_vertex(n + 1);
    for (int j = 0; j < m; ++j)
      by_vertex[side == 0 ? g.edges[j].u : g.edges[j].v].push_back(n + j);
    for (int v = 1; v <= n; ++v)
      if (!by_vertex[v].empty())
        detail::append_accumulate(cnot_stage, v - 1, by_vertex[v]);
  }
  c.append(cnot_stage.staged("cnot"));

  Circuit copy_stage(c.num_qubits());
  for (int v = 1; v <= n; ++v)
    if (!copies[v].empty()) copy_stage.append(fan_out(v - 1, copies[v]));
  Circuit restore(c.num_qubits());
  restore.append(copy_stage);
  std::vector<int> used(n + 1, 0);
  const auto control_slot = [&](int v) {
    const int slot = used[v]++;
    return slot == 0 ? v - 1 : copies[v][slot - 1];
  };
  for (int j = 0; j < m; ++j) {
    const int cu = control_slot(g.edges[j].u);
    const int cv = control_slot(g.edges[j].v);
    restore.append(Gate::toffoli(cu, cv, n + j));
  }
  restore.append(copy_stage.inverse());
  c.append(restore.staged("toffoli"));

  return {std::move(c), std::move(layout)};
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

namespace detail {

// Working copy of the grid weights; deleted edges are marked with weight 0.
struct GridCutState {
  const GridGraph* grid = nullptr;
  std::vector<std::vector<double>> h;  // h[r-1][c-1]: (r,c)-(r,c+1)
  std::vector<std::vector<double>> v;  // v[r-1][c-1]: (r,c)-(r+1,c)
  std::vector<Gate> deletions;         // weight-merging gates in cut order
};

// Remove the edge (shared, gone) by rotating its weight onto the edge
// (shared, keep); on weight-2 inputs the gate mixes exactly those two edges.
inline void merge_edge(GridCutState& st, int shared, int keep, int gone,
                       double& w_keep, double& w_gone) {
  const double angle = std::atan2(w_gone, w_keep);
  st.deletions.push_back(
      Gate::crbs(shared - 1, keep - 1, gone - 1, -angle));
  w_keep = std::hypot(w_keep, w_gone);
  w_gone = 0.0;
}

// Recursive halving of the subgrid with top-left corner (r0, c0) and shape
// rows x cols. Every child call must stay within ceil(2/3) of its parent's
// vertex count.
inline void grid_cut(GridCutState& st, int r0, int c0, int rows, int cols,
                     int parent_vertices) {
  const int vertices = rows * cols;
  if (parent_vertices > 0 && 3 * vertices > 2 * parent_vertices + 2)
    throw InvariantError("grid split produced an oversized part");

  const GridGraph& g = *st.grid;
  if (cols >= 3) {
    const int c = c0 + cols / 2 - 1;  // cut between columns c and c+1
    for (int k = 0; k < rows; ++k) {
      const int row = r0 + k;
      merge_edge(st, g.vertex(row, c + 1), g.vertex(row, c + 2),
                 g.vertex(row, c), st.h[row - 1][c], st.h[row - 1][c - 1]);
    }
    grid_cut(st, r0, c0, rows, cols / 2, vertices);
    grid_cut(st, r0, c0 + cols / 2, rows, cols - cols / 2, vertices);
  } else if (rows >= 3) {
    const int r = r0 + rows / 2 - 1;  // cut between rows r and r+1
    for (int k = 0; k < cols; ++k) {
      const int col = c0 + k;
      merge_edge(st, g.vertex(r + 1, col), g.vertex(r + 2, col),
                 g.vertex(r, col), st.v[r][col - 1], st.v[r - 1][col - 1]);
    }
    grid_cut(st, r0, c0, rows / 2, cols, vertices);
    grid_cut(st, r0 + rows / 2, c0, rows - rows / 2, cols, vertices);
  } else if (rows == 2 && cols == 2) {
    // Chain the three doomed edges of the square into the surviving top one.
    const int tl = g.vertex(r0, c0), tr = g.vertex(r0, c0 + 1);
    const int bl = g.vertex(r0 + 1, c0), br = g.vertex(r0 + 1, c0 + 1);
    merge_edge(st, bl, br, tl, st.h[r0][c0 - 1], st.v[r0 - 1][c0 - 1]);
    merge_edge(st, br, tr, bl, st.v[r0 - 1][c0], st.h[r0][c0 - 1]);
    merge_edge(st, tr, tl, br, st.h[r0 - 1][c0 - 1], st.v[r0 - 1][c0]);
  }
  // 1x1, 1x2, 2x1: nothing to cut.
}

inline GridCutState run_grid_cut(const GridGraph& g) {
  GridCutState st;
  st.grid = &g;
  st.h = g.h;
  st.v = g.v;
  grid_cut(st, 1, 1, g.s, g.t, 0);
  return st;
}

}  // namespace detail

// Grid-structured state on s*t qubits without ancillas. The synthesis plans
// the reverse direction — recursively merge edge weights across balanced cuts
// until only vertex-disjoint edges remain, collapse each to its lower
// endpoint, undo the unary encoding — and emits the forward circuit: unary
// encoding on the surviving endpoints, one CNOT per surviving edge, then the
// recorded weight merges replayed backwards as edge splits.
inline Circuit prepare_grid(const GridGraph& g) {
  g.validate();
  if (g.s * g.t < 2) throw BadGridError("a grid state needs at least one edge");

  if (g.s == 1 || g.t == 1) {
    // A single row or column is a path; the tree synthesizer handles it.
    TreeGraph path;
    path.graph.n = g.s * g.t;
    for (int i = 1; i < path.graph.n; ++i)
      path.graph.edges.push_back(
          {i, i + 1, g.s == 1 ? g.h[0][i - 1] : g.v[i - 1][0]});
    path.root = 1;
    return prepare_tree(path, /*optimize=*/true);
  }

  detail::GridCutState st = detail::run_grid_cut(g);

  std::vector<int> lower_qubits;
  std::vector<double> merged;
  std::vector<std::pair<int, int>> survivors;
  for (int r = 1; r <= g.s; ++r)
    for (int c = 1; c + 1 <= g.t; ++c)
      if (st.h[r - 1][c - 1] > 0.0) {
        survivors.push_back({g.vertex(r, c), g.vertex(r, c + 1)});
        merged.push_back(st.h[r - 1][c - 1]);
      }
  for (int r = 1; r + 1 <= g.s; ++r)
    for (int c = 1; c <= g.t; ++c)
      if (st.v[r - 1][c - 1] > 0.0) {
        survivors.push_back({g.vertex(r, c), g.vertex(r + 1, c)});
        merged.push_back(st.v[r - 1][c - 1]);
      }
  for (const auto& [u, v] : survivors) lower_qubits.push_back(u - 1);

  Circuit c(g.s * g.t);
  c.append(unary_encode(AmplitudeVector{merged}, lower_qubits).staged("unary"));
  for (const auto& [u, v] : survivors)
    c.append(Gate::cnot(u - 1, v - 1).with_stage("cnot"));
  for (auto it = st.deletions.rbegin(); it != st.deletions.rend(); ++it)
    c.append(it->inverse().with_stage("merge"));
  return c;
}

}  // namespace hwprep
