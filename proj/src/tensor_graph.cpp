#include "qsim/tensor_graph.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "qsim/error.hpp"
#include "qsim/worker_pool.hpp"

namespace qsim {

namespace {

int leg_position(const EdgeTensor& t, VariableId v) {
  const auto it = std::find(t.variables.begin(), t.variables.end(), v);
  return it == t.variables.end() ? -1 : static_cast<int>(it - t.variables.begin());
}

// Collapses leg `pos` by combining its two halves with `combine(x0, x1)`.
template <class Combine>
EdgeTensor reduce_leg(const EdgeTensor& t, int pos, Combine combine) {
  const int r = t.rank();
  const int low_bits = r - 1 - pos;
  const std::uint64_t low_mask = (std::uint64_t{1} << low_bits) - 1;
  EdgeTensor out;
  out.variables = t.variables;
  out.variables.erase(out.variables.begin() + pos);
  out.values.resize(std::size_t{1} << (r - 1));
  for (std::uint64_t o = 0; o < out.values.size(); ++o) {
    const std::uint64_t i0 = ((o >> low_bits) << (low_bits + 1)) | (o & low_mask);
    const std::uint64_t i1 = i0 | (std::uint64_t{1} << low_bits);
    out.values[o] = combine(t.values[i0], t.values[i1]);
  }
  return out;
}

std::string bits_for(const std::string& bits, int qubit_count, const char* what) {
  if (static_cast<int>(bits.size()) != qubit_count ||
      !std::all_of(bits.begin(), bits.end(), [](char c) { return c == '0' || c == '1'; })) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " bits '" + bits + "' must be " +
                                                std::to_string(qubit_count) + " characters of 0/1");
  }
  return bits;
}

int bit_of_qubit(const std::string& bits, int qubit) {
  return bits[bits.size() - 1 - static_cast<std::size_t>(qubit)] - '0';
}

std::vector<std::size_t> incident_edges(const ContractionGraph& g, VariableId v) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].has(v)) out.push_back(e);
  }
  return out;
}

}  // namespace

bool EdgeTensor::has(VariableId v) const {
  return std::find(variables.begin(), variables.end(), v) != variables.end();
}

cplx EdgeTensor::at(std::initializer_list<int> bits) const {
  std::size_t idx = 0;
  for (int b : bits) idx = (idx << 1) | static_cast<std::size_t>(b & 1);
  return values.at(idx);
}

std::vector<VariableId> ContractionGraph::live_vertices() const {
  std::vector<VariableId> out;
  for (VariableId v = 0; v < variables.size(); ++v) {
    if (is_live(v)) out.push_back(v);
  }
  return out;
}

std::size_t ContractionGraph::degree(VariableId v) const {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [v](const EdgeTensor& e) { return e.has(v); }));
}

std::string ContractionGraph::variable_name(VariableId v) const {
  const VariableInfo& info = variables.at(v);
  std::string name = info.qubit < 26 ? std::string(1, static_cast<char>('a' + info.qubit)) : "q" + std::to_string(info.qubit);
  return name + "_" + std::to_string(info.position);
}

EdgeTensor tensor_for_gate(const GateMatrix& u, const std::vector<VariableId>& in_vars,
                           const std::vector<VariableId>& out_vars) {
  const int k = static_cast<int>(in_vars.size());
  if (k < 1 || k > 2 || u.dimension != (1 << k) || out_vars.size() != in_vars.size()) {
    throw Error(ErrorKind::UnsupportedGate, "graph tensors come from one- or two-qubit gates");
  }
  EdgeTensor t;
  if (in_vars == out_vars) {
    if (!u.is_diagonal()) throw Error(ErrorKind::InvalidArgument, "shared in/out legs need a diagonal gate");
    t.variables = in_vars;
    for (int i = 0; i < u.dimension; ++i) t.values.push_back(u(i, i));
    return t;
  }
  t.variables = in_vars;
  t.variables.insert(t.variables.end(), out_vars.begin(), out_vars.end());
  t.values.resize(static_cast<std::size_t>(u.dimension * u.dimension));
  for (int in = 0; in < u.dimension; ++in) {
    for (int out = 0; out < u.dimension; ++out) {
      t.values[static_cast<std::size_t>((in << k) | out)] = u(out, in);
    }
  }
  return t;
}

ContractionGraph circuit_to_graph(const Program& program) {
  ContractionGraph g;
  const int n = program.qubit_count;
  g.worldlines.resize(static_cast<std::size_t>(n));
  auto new_variable = [&](int qubit) {
    const auto id = static_cast<VariableId>(g.variables.size());
    auto& line = g.worldlines[static_cast<std::size_t>(qubit)];
    g.variables.push_back({qubit, static_cast<int>(line.size())});
    line.push_back(id);
    return id;
  };
  for (int q = 0; q < n; ++q) new_variable(q);

  for (const Instruction& inst : program.instructions) {
    if (inst.kind == InstructionKind::PMeasure) continue;
    if (inst.kind == InstructionKind::Measure) {
      throw Error(ErrorKind::UnsupportedGate, "single amplitude mode does not support MEASURE", inst.line);
    }
    const std::vector<int> qubits = inst.all_qubits();
    if (qubits.size() > 2) {
      throw Error(ErrorKind::UnsupportedGate,
                  std::string(gate_mnemonic(inst.gate)) + " acts on more than two qubits", inst.line);
    }
    const GateMatrix u = gate_matrix(inst);
    std::vector<VariableId> in_vars;
    for (int q : qubits) in_vars.push_back(g.worldlines[static_cast<std::size_t>(q)].back());
    if (u.is_diagonal()) {
      g.edges.push_back(tensor_for_gate(u, in_vars, in_vars));
      continue;
    }
    std::vector<VariableId> out_vars;
    for (int q : qubits) out_vars.push_back(new_variable(q));
    g.edges.push_back(tensor_for_gate(u, in_vars, out_vars));
  }
  g.eliminated.assign(g.variables.size(), false);
  return g;
}

EdgeTensor slice(const EdgeTensor& t, VariableId v, int bit) {
  const int pos = leg_position(t, v);
  if (pos < 0) throw Error(ErrorKind::InvalidArgument, "variable is not a leg of the tensor");
  return reduce_leg(t, pos, [bit](cplx x0, cplx x1) { return bit ? x1 : x0; });
}

void fix_variable(ContractionGraph& graph, VariableId v, int bit) {
  if (!graph.is_live(v)) throw Error(ErrorKind::InvalidArgument, "variable " + graph.variable_name(v) + " is not live");
  graph.fixed[v] = bit;
  std::vector<EdgeTensor> kept;
  kept.reserve(graph.edges.size());
  for (auto& e : graph.edges) {
    if (!e.has(v)) {
      kept.push_back(std::move(e));
      continue;
    }
    EdgeTensor s = slice(e, v, bit);
    if (s.rank() == 0) {
      graph.prefactor *= s.values[0];
    } else {
      kept.push_back(std::move(s));
    }
  }
  graph.edges = std::move(kept);
}

void fix_boundary(ContractionGraph& graph, const std::string& input_bits, const std::string& output_bits) {
  const int n = static_cast<int>(graph.worldlines.size());
  const std::string in = bits_for(input_bits, n, "input");
  const std::string out = bits_for(output_bits, n, "output");
  for (int q = 0; q < n; ++q) {
    const auto& line = graph.worldlines[static_cast<std::size_t>(q)];
    const int in_bit = bit_of_qubit(in, q);
    const int out_bit = bit_of_qubit(out, q);
    if (line.size() == 1) {
      if (in_bit != out_bit) graph.prefactor = 0.0;
      fix_variable(graph, line.front(), in_bit);
    } else {
      fix_variable(graph, line.front(), in_bit);
      fix_variable(graph, line.back(), out_bit);
    }
  }
}

EdgeTensor merge_edges(const EdgeTensor& a, const EdgeTensor& b) {
  EdgeTensor out;
  out.variables = a.variables;
  for (VariableId v : b.variables) {
    if (!a.has(v)) out.variables.push_back(v);
  }
  const int r = out.rank();
  std::vector<int> shift_of_b;  // bit shift of each b leg within an output index
  for (VariableId v : b.variables) shift_of_b.push_back(r - 1 - leg_position(out, v));
  const int a_shift = r - a.rank();
  out.values.resize(std::size_t{1} << r);
  for (std::uint64_t o = 0; o < out.values.size(); ++o) {
    std::uint64_t bi = 0;
    for (int s : shift_of_b) bi = (bi << 1) | ((o >> s) & 1U);
    out.values[o] = a.values[o >> a_shift] * b.values[bi];
  }
  return out;
}

EdgeTensor merge_edges(const EdgeTensor& a, const EdgeTensor& b, VariableId shared) {
  if (!a.has(shared) || !b.has(shared)) {
    throw Error(ErrorKind::InvalidArgument, "merge requires the shared variable on both tensors");
  }
  return merge_edges(a, b);
}

EdgeTensor eliminate_vertex_integral(const EdgeTensor& t, VariableId v) {
  const int pos = leg_position(t, v);
  if (pos < 0) throw Error(ErrorKind::InvalidArgument, "variable is not a leg of the tensor");
  return reduce_leg(t, pos, [](cplx x0, cplx x1) { return x0 + x1; });
}

void eliminate_vertex_integral(ContractionGraph& graph, std::size_t edge_index, VariableId v) {
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    if (e != edge_index && graph.edges[e].has(v)) {
      throw Error(ErrorKind::SharedVertexNotMerged,
                  "vertex " + graph.variable_name(v) + " still appears on another edge");
    }
  }
  EdgeTensor reduced = eliminate_vertex_integral(graph.edges.at(edge_index), v);
  if (reduced.rank() == 0) {
    graph.prefactor *= reduced.values[0];
    graph.edges.erase(graph.edges.begin() + static_cast<std::ptrdiff_t>(edge_index));
  } else {
    graph.edges[edge_index] = std::move(reduced);
  }
  graph.eliminated.at(v) = true;
}

std::pair<ContractionGraph, ContractionGraph> eliminate_vertex_differential(const ContractionGraph& graph,
                                                                             VariableId v) {
  std::pair<ContractionGraph, ContractionGraph> out{graph, graph};
  fix_variable(out.first, v, 0);
  fix_variable(out.second, v, 1);
  return out;
}

std::vector<VariableId> select_split_vertices(const ContractionGraph& graph, std::size_t n) {
  std::vector<VariableId> live = graph.live_vertices();
  if (n > live.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "cannot split on " + std::to_string(n) + " of " + std::to_string(live.size()) + " live vertices");
  }
  std::vector<std::pair<std::size_t, VariableId>> ranked;
  for (VariableId v : live) ranked.emplace_back(graph.degree(v), v);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<VariableId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].second);
  return out;
}

void ContractStats::absorb(const ContractStats& other) {
  peak_rank = std::max(peak_rank, other.peak_rank);
  peak_entries = std::max(peak_entries, other.peak_entries);
  subgraphs += other.subgraphs;
}

cplx contract_graph(ContractionGraph graph, const ContractOptions& options, ContractStats* stats) {
  ContractStats local;
  local.subgraphs = 1;
  auto note = [&](const EdgeTensor& t) {
    local.peak_rank = std::max(local.peak_rank, t.rank());
    local.peak_entries = std::max<std::uint64_t>(local.peak_entries, t.values.size());
  };
  for (const auto& e : graph.edges) note(e);

  for (;;) {
    if (graph.prefactor == cplx{}) break;
    const std::vector<VariableId> live = graph.live_vertices();
    if (live.empty()) break;

    // Pick the vertex whose merged tensor would be smallest.
    VariableId best = live.front();
    std::size_t best_rank = SIZE_MAX, best_edges = SIZE_MAX;
    for (VariableId v : live) {
      std::set<VariableId> legs;
      std::size_t count = 0;
      for (const auto& e : graph.edges) {
        if (!e.has(v)) continue;
        ++count;
        legs.insert(e.variables.begin(), e.variables.end());
      }
      const std::size_t rank = legs.size();
      if (rank < best_rank || (rank == best_rank && count < best_edges)) {
        best = v;
        best_rank = rank;
        best_edges = count;
      }
    }
    if (best_rank > static_cast<std::size_t>(options.rank_cap)) {
      throw Error(ErrorKind::TensorTooLarge, "eliminating " + graph.variable_name(best) + " needs a rank-" +
                                                 std::to_string(best_rank) + " tensor (cap " +
                                                 std::to_string(options.rank_cap) + ")");
    }

    std::vector<std::size_t> incident = incident_edges(graph, best);
    if (incident.empty()) {
      // Unconstrained variable: the sum over it contributes a factor of two.
      graph.prefactor *= 2.0;
      graph.eliminated[best] = true;
      continue;
    }
    std::stable_sort(incident.begin(), incident.end(), [&](std::size_t x, std::size_t y) {
      return graph.edges[x].rank() < graph.edges[y].rank();
    });
    EdgeTensor merged = graph.edges[incident.front()];
    for (std::size_t k = 1; k < incident.size(); ++k) {
      merged = merge_edges(merged, graph.edges[incident[k]], best);
      note(merged);
    }
    // Replace the incident edges by the merged one, then integrate the vertex out.
    std::sort(incident.begin(), incident.end());
    for (auto it = incident.rbegin(); it != incident.rend(); ++it) {
      graph.edges.erase(graph.edges.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    graph.edges.push_back(std::move(merged));
    eliminate_vertex_integral(graph, graph.edges.size() - 1, best);
  }

  cplx result = graph.prefactor;
  if (result != cplx{}) {
    for (const auto& e : graph.edges) {
      if (e.rank() != 0) throw Error(ErrorKind::InvalidArgument, "contraction left a tensor with open legs");
      result *= e.values[0];
    }
  }
  if (stats) stats->absorb(local);
  return result;
}

int default_split_count(std::size_t workers) {
  int n = 0;
  while ((std::size_t{1} << n) < workers) ++n;
  return n;
}

cplx run_single(const Program& program, const std::string& input_bits, const std::string& output_bits,
                const SingleRunOptions& options, ContractStats* stats) {
  ContractionGraph graph = circuit_to_graph(program);
  fix_boundary(graph, input_bits, output_bits);
  const std::size_t live = graph.live_vertices().size();
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, options.split_n)), live);
  if (n >= 40) throw Error(ErrorKind::BranchExplosion, "split count " + std::to_string(n) + " is too large");
  const std::vector<VariableId> split = select_split_vertices(graph, n);

  const std::size_t count = std::size_t{1} << n;
  std::vector<cplx> partial(count);
  std::vector<ContractStats> partial_stats(count);
  auto task = [&](std::size_t id) {
    ContractionGraph sub = graph;
    for (std::size_t j = 0; j < n; ++j) fix_variable(sub, split[j], static_cast<int>((id >> j) & 1U));
    partial[id] = contract_graph(std::move(sub), options.contract, &partial_stats[id]);
  };
  if (options.pool) {
    options.pool->run(count, task);
  } else {
    for (std::size_t id = 0; id < count; ++id) task(id);
  }
  cplx sum{};
  for (std::size_t id = 0; id < count; ++id) {
    sum += partial[id];
    if (stats) stats->absorb(partial_stats[id]);
  }
  return sum;
}

}  // namespace qsim
