#include "qsim/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>

#include "qsim/error.hpp"
#include "qsim/worker_pool.hpp"

namespace qsim {

namespace {

// Sorted bit positions at which zeros are inserted into a group index.
struct BitInserter {
  std::vector<int> positions;

  explicit BitInserter(std::vector<int> bits) : positions(std::move(bits)) {
    std::sort(positions.begin(), positions.end());
  }

  std::uint64_t operator()(std::uint64_t g) const {
    for (int p : positions) {
      const std::uint64_t low = g & ((std::uint64_t{1} << p) - 1);
      g = ((g >> p) << (p + 1)) | low;
    }
    return g;
  }
};

std::uint64_t mask_of(std::span<const int> qubits) {
  std::uint64_t m = 0;
  for (int q : qubits) m |= std::uint64_t{1} << q;
  return m;
}

void check_distinct(std::vector<int> qs) {
  std::sort(qs.begin(), qs.end());
  if (std::adjacent_find(qs.begin(), qs.end()) != qs.end()) {
    throw Error(ErrorKind::DuplicateQubitArg, "gate qubits must be distinct");
  }
}

}  // namespace

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

StateVector::StateVector(int qubit_count, StateVectorOptions options) : n_(qubit_count), options_(options) {
  if (qubit_count < 1) throw Error(ErrorKind::InvalidArgument, "state needs at least one qubit");
  if (qubit_count > options_.max_qubits || qubit_count > 62) {
    throw Error(ErrorKind::TooManyQubits, std::to_string(qubit_count) + " qubits exceed the " +
                                              std::to_string(options_.max_qubits) + "-qubit memory ceiling");
  }
  try {
    amps_.assign(std::size_t{1} << qubit_count, cplx{});
  } catch (const std::bad_alloc&) {
    throw Error(ErrorKind::TooManyQubits, "cannot allocate 2^" + std::to_string(qubit_count) + " amplitudes");
  }
  amps_[0] = 1.0;
}

void StateVector::reset() {
  std::fill(amps_.begin(), amps_.end(), cplx{});
  amps_[0] = 1.0;
}

template <class Body>
void StateVector::for_each_group(std::size_t groups, Body&& body) {
  const std::size_t grain = std::size_t{1} << std::clamp(options_.chunk_log2, 0, 40);
  if (options_.pool == nullptr || groups <= grain) {
    body(std::size_t{0}, groups);
    return;
  }
  options_.pool->parallel_for(groups, grain, body);
}

template <class Body>
double StateVector::reduce_chunks(std::size_t total, Body&& body) const {
  const std::size_t grain = std::size_t{1} << std::clamp(options_.chunk_log2, 0, 40);
  const std::size_t chunks = (total + grain - 1) / grain;
  std::vector<double> partial(chunks, 0.0);
  auto task = [&](std::size_t c) {
    const std::size_t begin = c * grain;
    partial[c] = body(begin, std::min(total, begin + grain));
  };
  if (options_.pool == nullptr || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) task(c);
  } else {
    options_.pool->run(chunks, task);
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

void StateVector::apply_single_qubit(const Matrix2& u, int target) { apply_controlled(u, {}, target); }

void StateVector::apply_controlled(const Matrix2& u, std::span<const int> controls, int target) {
  std::vector<int> fixed(controls.begin(), controls.end());
  fixed.push_back(target);
  check_distinct(fixed);
  const BitInserter insert(fixed);
  const std::uint64_t ctrl = mask_of(controls);
  const std::uint64_t stride = std::uint64_t{1} << target;
  const std::size_t groups = std::size_t{1} << (n_ - static_cast<int>(fixed.size()));
  const cplx a = u[0], b = u[1], c = u[2], d = u[3];
  cplx* amp = amps_.data();
  for_each_group(groups, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const std::uint64_t i0 = insert(g) | ctrl;
      const std::uint64_t i1 = i0 | stride;
      const cplx x0 = amp[i0], x1 = amp[i1];
      amp[i0] = a * x0 + b * x1;
      amp[i1] = c * x0 + d * x1;
    }
  });
}

void StateVector::apply_two_qubit(std::span<const cplx> u, int q_hi, int q_lo, std::span<const int> controls) {
  if (u.size() != 16) throw Error(ErrorKind::InvalidArgument, "two-qubit kernel needs a 4x4 matrix");
  std::vector<int> fixed(controls.begin(), controls.end());
  fixed.push_back(q_hi);
  fixed.push_back(q_lo);
  check_distinct(fixed);
  const BitInserter insert(fixed);
  const std::uint64_t ctrl = mask_of(controls);
  const std::uint64_t hi = std::uint64_t{1} << q_hi, lo = std::uint64_t{1} << q_lo;
  const std::size_t groups = std::size_t{1} << (n_ - static_cast<int>(fixed.size()));
  cplx* amp = amps_.data();
  const cplx* m = u.data();
  for_each_group(groups, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const std::uint64_t base = insert(g) | ctrl;
      const std::uint64_t idx[4] = {base, base | lo, base | hi, base | hi | lo};
      const cplx x[4] = {amp[idx[0]], amp[idx[1]], amp[idx[2]], amp[idx[3]]};
      for (int r = 0; r < 4; ++r) {
        amp[idx[r]] = m[r * 4] * x[0] + m[r * 4 + 1] * x[1] + m[r * 4 + 2] * x[2] + m[r * 4 + 3] * x[3];
      }
    }
  });
}

void StateVector::apply_projector(int bit, int target) { apply_single_qubit(gates::projector(bit), target); }

void StateVector::apply(const KernelGate& gate) {
  if (gate.targets.size() == 1) {
    const Matrix2 u{gate.base[0], gate.base[1], gate.base[2], gate.base[3]};
    apply_controlled(u, gate.controls, gate.targets[0]);
  } else if (gate.targets.size() == 2) {
    apply_two_qubit(gate.base, gate.targets[0], gate.targets[1], gate.controls);
  } else {
    throw Error(ErrorKind::UnsupportedGate, "kernel gates act on one or two targets");
  }
}

double StateVector::norm_squared() const {
  const cplx* amp = amps_.data();
  return reduce_chunks(amps_.size(), [amp](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += std::norm(amp[i]);
    return s;
  });
}

void StateVector::scale(double factor) {
  cplx* amp = amps_.data();
  for_each_group(amps_.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) amp[i] *= factor;
  });
}

double StateVector::normalize() {
  const double norm = std::sqrt(norm_squared());
  if (norm < 1e-300) throw Error(ErrorKind::DegenerateState, "cannot normalize a zero state");
  scale(1.0 / norm);
  return norm;
}

double StateVector::probability_zero(int qubit) const {
  const cplx* amp = amps_.data();
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  return reduce_chunks(amps_.size(), [amp, bit](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      if ((i & bit) == 0) s += std::norm(amp[i]);
    }
    return s;
  });
}

int StateVector::measure(int qubit, std::mt19937_64& rng) {
  const double total = norm_squared();
  const double p0 = probability_zero(qubit);
  const double p1 = std::max(0.0, total - p0);
  if (p0 < 1e-12 && p1 < 1e-12) {
    throw Error(ErrorKind::DegenerateState, "both outcomes of qubit " + std::to_string(qubit) + " have zero probability");
  }
  const int outcome = uniform01(rng) * (p0 + p1) < p0 ? 0 : 1;
  collapse(qubit, outcome, outcome == 0 ? p0 : p1);
  return outcome;
}

void StateVector::collapse(int qubit, int outcome, double probability) {
  if (probability < 1e-12) throw Error(ErrorKind::DegenerateState, "collapse onto a zero-probability outcome");
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  const std::uint64_t keep = outcome ? bit : 0;
  cplx* amp = amps_.data();
  for_each_group(amps_.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if ((i & bit) != keep) amp[i] = 0.0;
    }
  });
  normalize();
}

ProbabilityTable StateVector::pmeasure(std::span<const int> qubits) const {
  check_distinct({qubits.begin(), qubits.end()});
  const int m = static_cast<int>(qubits.size());
  const std::size_t outcomes = std::size_t{1} << m;
  const std::size_t grain = std::size_t{1} << std::clamp(options_.chunk_log2, 0, 40);
  const std::size_t chunks = (amps_.size() + grain - 1) / grain;
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(outcomes, 0.0));
  const cplx* amp = amps_.data();
  auto task = [&](std::size_t c) {
    auto& local = partial[c];
    const std::size_t begin = c * grain, end = std::min(amps_.size(), begin + grain);
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t key = 0;
      // First listed qubit is the most significant output bit.
      for (int j = 0; j < m; ++j) key = (key << 1) | ((i >> qubits[static_cast<std::size_t>(j)]) & 1U);
      local[key] += std::norm(amp[i]);
    }
  };
  if (options_.pool == nullptr || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) task(c);
  } else {
    options_.pool->run(chunks, task);
  }
  ProbabilityTable table;
  for (std::size_t key = 0; key < outcomes; ++key) {
    double p = 0.0;
    for (const auto& local : partial) p += local[key];
    std::string bits(static_cast<std::size_t>(m), '0');
    for (int j = 0; j < m; ++j) {
      if ((key >> (m - 1 - j)) & 1U) bits[static_cast<std::size_t>(j)] = '1';
    }
    table.emplace(std::move(bits), p);
  }
  return table;
}

namespace {

template <class T>
void put_le(std::ofstream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "dump writer assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get_le(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return value;
}

}  // namespace

void write_state_dump(const StateVector& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out.write("QSV1", 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(state.qubit_count()));
  for (const cplx& a : state.amplitudes()) {
    put_le(out, a.real());
    put_le(out, a.imag());
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path);
}

std::vector<cplx> read_state_dump(const std::string& path, int* qubit_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "QSV1", 4) != 0) throw Error(ErrorKind::IoError, "bad state dump magic");
  const auto version = get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint64_t>(in);
  if (version != 1 || n < 1 || n > 62) throw Error(ErrorKind::IoError, "unsupported state dump header");
  std::vector<cplx> amps(std::size_t{1} << n);
  for (auto& a : amps) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    a = {re, im};
  }
  if (!in) throw Error(ErrorKind::IoError, "truncated state dump");
  if (qubit_count) *qubit_count = static_cast<int>(n);
  return amps;
}

}  // namespace qsim
