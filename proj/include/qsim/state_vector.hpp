#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qsim/gates.hpp"
#include "qsim/program.hpp"

namespace qsim {

class WorkerPool;

/// Probability table keyed by bitstring; the first measured qubit is the leftmost character.
using ProbabilityTable = std::map<std::string, double>;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

struct StateVectorOptions {
  int max_qubits = 30;
  /// log2 of the number of amplitude groups per scheduled chunk.
  int chunk_log2 = 12;
  WorkerPool* pool = nullptr;  // nullptr: run on the calling thread
};

/// All 2^n amplitudes; bit k of an index is the value of qubit k.
class StateVector {
 public:
  explicit StateVector(int qubit_count, StateVectorOptions options = {});

  int qubit_count() const noexcept { return n_; }
  std::size_t size() const noexcept { return amps_.size(); }
  int chunk_log2() const noexcept { return options_.chunk_log2; }
  void set_chunk_log2(int log2) { options_.chunk_log2 = log2; }
  void set_pool(WorkerPool* pool) { options_.pool = pool; }
  WorkerPool* pool() const noexcept { return options_.pool; }

  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::span<cplx> amplitudes() noexcept { return amps_; }
  cplx amplitude(std::uint64_t index) const { return amps_.at(index); }

  /// Resets to |0...0>.
  void reset();

  void apply_single_qubit(const Matrix2& u, int target);
  void apply_controlled(const Matrix2& u, std::span<const int> controls, int target);
  /// u is 4x4 with index bit 1 = q_hi, bit 0 = q_lo.
  void apply_two_qubit(std::span<const cplx> u, int q_hi, int q_lo, std::span<const int> controls = {});
  /// Applies diag(1,0) or diag(0,1) without renormalizing.
  void apply_projector(int bit, int target);
  void apply(const KernelGate& gate);

  double norm_squared() const;
  void scale(double factor);
  /// Rescales to unit norm; returns the norm before scaling.
  double normalize();

  /// Probability that qubit k reads 0.
  double probability_zero(int qubit) const;
  /// Projective measurement; collapses and renormalizes.
  int measure(int qubit, std::mt19937_64& rng);
  /// Collapses onto `outcome` with known probability (no draw).
  void collapse(int qubit, int outcome, double probability);

  ProbabilityTable pmeasure(std::span<const int> qubits) const;

 private:
  template <class Body>
  void for_each_group(std::size_t groups, Body&& body);
  template <class Body>
  double reduce_chunks(std::size_t total, Body&& body) const;

  int n_;
  StateVectorOptions options_;
  std::vector<cplx> amps_;
};

/// Binary dump: "QSV1", uint32 version, uint64 n, then 2^n (re, im) doubles, little-endian.
void write_state_dump(const StateVector& state, const std::string& path);
std::vector<cplx> read_state_dump(const std::string& path, int* qubit_count = nullptr);

}  // namespace qsim
