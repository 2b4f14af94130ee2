#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qsim/gates.hpp"
#include "qsim/program.hpp"

namespace qsim {

class WorkerPool;

/// Boolean worldline variable; ids are assigned in creation order.
using VariableId = std::uint32_t;

/// Complex tensor over Boolean legs. values[idx] where the first variable is
/// the most significant bit of idx.
struct EdgeTensor {
  std::vector<VariableId> variables;
  std::vector<cplx> values;

  int rank() const noexcept { return static_cast<int>(variables.size()); }
  bool has(VariableId v) const;
  cplx at(std::initializer_list<int> bits) const;
};

struct VariableInfo {
  int qubit = 0;
  int position = 0;  // index along the qubit's worldline
};

struct ContractionGraph {
  std::vector<VariableInfo> variables;
  /// Per qubit, variable ids in time order.
  std::vector<std::vector<VariableId>> worldlines;
  std::vector<EdgeTensor> edges;
  std::map<VariableId, int> fixed;
  std::vector<bool> eliminated;
  cplx prefactor{1.0, 0.0};

  bool is_live(VariableId v) const { return !eliminated.at(v) && !fixed.count(v); }
  std::vector<VariableId> live_vertices() const;
  /// Number of edges incident to v.
  std::size_t degree(VariableId v) const;
  /// "a_0", "b_2", ...: qubit letter and worldline position.
  std::string variable_name(VariableId v) const;
};

/// Legs ordered (in..., out...) with T[in, out] = <out|U|in>. A diagonal U
/// with in_vars == out_vars yields the diagonal entries over in_vars only.
EdgeTensor tensor_for_gate(const GateMatrix& u, const std::vector<VariableId>& in_vars,
                           const std::vector<VariableId>& out_vars);

ContractionGraph circuit_to_graph(const Program& program);

/// Fixes v to `bit` and slices every incident tensor; rank-0 results fold into the prefactor.
void fix_variable(ContractionGraph& graph, VariableId v, int bit);

/// Bitstrings have qubit n-1 leftmost.
void fix_boundary(ContractionGraph& graph, const std::string& input_bits, const std::string& output_bits);

/// Elementwise product over all shared legs; legs are a's followed by b's new ones.
EdgeTensor merge_edges(const EdgeTensor& a, const EdgeTensor& b);
/// As above, but requires `shared` to be a leg of both.
EdgeTensor merge_edges(const EdgeTensor& a, const EdgeTensor& b, VariableId shared);

/// Sums the tensor over leg v.
EdgeTensor eliminate_vertex_integral(const EdgeTensor& t, VariableId v);
/// Graph form: sums edge `edge_index` over v and retires v. Throws
/// SharedVertexNotMerged if another edge still references v.
void eliminate_vertex_integral(ContractionGraph& graph, std::size_t edge_index, VariableId v);

/// Restricts a tensor to v = bit.
EdgeTensor slice(const EdgeTensor& t, VariableId v, int bit);

std::pair<ContractionGraph, ContractionGraph> eliminate_vertex_differential(const ContractionGraph& graph,
                                                                             VariableId v);

/// The n live vertices with the most incident edges; ties by smaller id.
std::vector<VariableId> select_split_vertices(const ContractionGraph& graph, std::size_t n);

struct ContractOptions {
  int rank_cap = 26;
};

struct ContractStats {
  int peak_rank = 0;
  std::uint64_t peak_entries = 0;
  std::uint64_t subgraphs = 0;

  void absorb(const ContractStats& other);
};

/// Eliminates every live vertex (fewest distinct neighbours first, ties by
/// edge count then id), merging incident edges in ascending rank before each
/// integral elimination.
cplx contract_graph(ContractionGraph graph, const ContractOptions& options = {}, ContractStats* stats = nullptr);

/// max(0, ceil(log2(workers))).
int default_split_count(std::size_t workers);

struct SingleRunOptions {
  int split_n = 0;
  WorkerPool* pool = nullptr;
  ContractOptions contract;
};

cplx run_single(const Program& program, const std::string& input_bits, const std::string& output_bits,
                const SingleRunOptions& options = {}, ContractStats* stats = nullptr);

}  // namespace qsim
